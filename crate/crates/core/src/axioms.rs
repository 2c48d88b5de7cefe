//! Property suites for solved tables. Stored entries are re-derived, and sampled keys
//! test the reduction axioms against WDVV.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::RingModel;
use crate::correlators::{
    classical_eval, dimension_filter, evaluate, splitting_residual, CorrelatorKey, CorrelatorTable, Provenance,
};
use crate::descendants::Closure;
use crate::exact::{render, Rational};
use crate::novikov::CurveClass;
use crate::wdvv::{seed_key, table_degree, wdvv_value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomConfig {
    pub samples: usize,
    pub seed: u64,
    /// Extra insertions beyond the minimal count in sampled keys.
    pub spread: usize,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig { samples: 500, seed: 0x5eed, spread: 4 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub entries_checked: usize,
    pub entry_failures: Vec<String>,
    pub filter_violations: Vec<String>,
    pub reduction_checked: usize,
    /// Sampled keys that no WDVV instance isolates (fixed by the divisor axiom alone).
    pub reduction_divisor_only: usize,
    pub reduction_failures: Vec<String>,
    pub off_dimension_checked: usize,
    pub off_dimension_failures: Vec<String>,
    pub splitting_checked: usize,
    pub splitting_failures: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.entry_failures.is_empty()
            && self.filter_violations.is_empty()
            && self.reduction_failures.is_empty()
            && self.off_dimension_failures.is_empty()
            && self.splitting_failures.is_empty()
    }

    pub fn lines(&self) -> Vec<(String, usize, Vec<String>)> {
        vec![
            ("stored entries re-derived".into(), self.entries_checked, self.entry_failures.clone()),
            ("dimension filter on stored entries".into(), self.entries_checked, self.filter_violations.clone()),
            ("divisor/fundamental reductions vs WDVV".into(), self.reduction_checked, self.reduction_failures.clone()),
            ("off-dimension keys vanish".into(), self.off_dimension_checked, self.off_dimension_failures.clone()),
            ("splitting residuals".into(), self.splitting_checked, self.splitting_failures.clone()),
        ]
    }
}

fn mismatch(model: &RingModel, key: &CorrelatorKey, stored: &Rational, derived: Option<&Rational>) -> String {
    match derived {
        Some(d) => format!("{}: stored {} but derived {}", key.render(model), render(stored), render(d)),
        None => format!("{}: stored {} but not derivable", key.render(model), render(stored)),
    }
}

/// Smallest insertion count that can pass the filter in degree `d` for `P^n`.
fn min_insertions(n: usize, d: i64) -> usize {
    let need = (n as i64 + 1) * d + n as i64 - 3;
    let per = n as i64 - 1;
    ((need + per - 1) / per).max(3) as usize
}

/// Random filter-passing keys of `P^n` with a unit or divisor insertion and `k ≥ 4`.
pub fn sample_reducible_keys(n: usize, max_d: i64, cfg: &AxiomConfig) -> Vec<CorrelatorKey> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.samples);
    if n < 2 || max_d < 1 {
        return out;
    }
    while out.len() < cfg.samples {
        let d = rng.gen_range(1..=max_d);
        let kmin = min_insertions(n, d).max(4);
        let k = rng.gen_range(kmin..=kmin + cfg.spread);
        let total = (n as i64 + 1) * d + n as i64 - 3 + k as i64;
        let mut ins: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(0..=n)).collect();
        let last = total - ins.iter().sum::<usize>() as i64;
        if !(0..=n as i64).contains(&last) {
            continue;
        }
        ins.push(last as usize);
        if !ins.iter().any(|&a| a <= 1) {
            continue;
        }
        out.push(CorrelatorKey::primary(CurveClass(vec![d]), &ins));
    }
    out
}

/// Random primary keys that fail the dimension filter.
pub fn sample_off_dimension_keys(model: &RingModel, max_d: i64, cfg: &AxiomConfig) -> Vec<CorrelatorKey> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd1ff);
    let rank = model.rank();
    let mut out = Vec::with_capacity(cfg.samples);
    while out.len() < cfg.samples {
        let d = rng.gen_range(0..=max_d.max(0));
        let k = rng.gen_range(3..=3 + 3 * max_d.max(1) as usize);
        let ins: Vec<usize> = (0..k).map(|_| rng.gen_range(0..rank)).collect();
        let key = CorrelatorKey::primary(CurveClass(vec![d]), &ins);
        if !dimension_filter(model, &key) {
            out.push(key);
        }
    }
    out
}

pub fn verify_axioms(model: &RingModel, table: &CorrelatorTable, cfg: &AxiomConfig) -> AxiomReport {
    let mut report = AxiomReport::default();
    let max_d = table_degree(model, table);
    let closure = Closure::new(model, table);
    for (key, entry) in table.iter() {
        report.entries_checked += 1;
        if !dimension_filter(model, key) {
            if !entry.value.is_zero() {
                report.filter_violations.push(format!("{}: nonzero off dimension", key.render(model)));
            }
            continue;
        }
        let derived = match entry.provenance {
            Provenance::User => match model.projective_dim() {
                Some(n) if *key == seed_key(n) => Some(Rational::from_integer(1.into())),
                _ => continue,
            },
            Provenance::Classical => classical_eval(model, key).ok(),
            Provenance::Solved if key.is_primary() => wdvv_value(model, table, key).ok().flatten(),
            Provenance::Solved => closure.value(key).ok().flatten(),
        };
        if derived.as_ref() != Some(&entry.value) {
            report.entry_failures.push(mismatch(model, key, &entry.value, derived.as_ref()));
        }
    }
    if let Some(n) = model.projective_dim() {
        for key in sample_reducible_keys(n, max_d, cfg) {
            report.reduction_checked += 1;
            let reduced = evaluate(model, table, &key);
            let derived = wdvv_value(model, table, &key);
            match (reduced, derived) {
                (Ok(r), Ok(Some(w))) if r == w => {}
                (Ok(_), Ok(None)) => report.reduction_divisor_only += 1,
                (Ok(r), Ok(Some(w))) => report.reduction_failures.push(format!(
                    "{}: reductions give {}, WDVV gives {}",
                    key.render(model),
                    render(&r),
                    render(&w)
                )),
                (Err(e), _) | (_, Err(e)) => report.reduction_failures.push(format!("{}: {e}", key.render(model))),
            }
        }
    }
    for key in sample_off_dimension_keys(model, max_d, cfg) {
        report.off_dimension_checked += 1;
        match evaluate(model, table, &key) {
            Ok(v) if v.is_zero() => {}
            Ok(v) => report.off_dimension_failures.push(format!("{}: value {}", key.render(model), render(&v))),
            Err(e) => report.off_dimension_failures.push(format!("{}: {e}", key.render(model))),
        }
    }
    let rank = model.rank();
    for class in model.lattice().classes_up_to(table.cutoff()) {
        for q in 0..rank.pow(4) {
            let quad = [q % rank, (q / rank) % rank, (q / rank / rank) % rank, q / rank / rank / rank];
            report.splitting_checked += 1;
            match splitting_residual(model, table, quad, &class) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => report.splitting_failures.push(format!(
                    "({}) in class {class}: residual {}",
                    quad.iter().map(|&i| model.label(i)).collect::<Vec<_>>().join(", "),
                    render(&r)
                )),
                Err(e) => report.splitting_failures.push(format!("{quad:?} in class {class}: {e}")),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::builtin;
    use crate::exact::int;
    use crate::wdvv::solve_recursion;

    #[test]
    fn plane_suite_passes() {
        let m = builtin("P2").unwrap();
        let t = solve_recursion(&m, &int(3)).unwrap();
        let cfg = AxiomConfig { samples: 60, ..AxiomConfig::default() };
        let r = verify_axioms(&m, &t, &cfg);
        assert!(r.ok(), "{:?}", r);
        assert_eq!(r.reduction_checked, 60);
        assert!(r.reduction_divisor_only < 30, "{}", r.reduction_divisor_only);
    }

    #[test]
    fn corrupted_entry_is_named() {
        let m = builtin("P2").unwrap();
        let mut t = solve_recursion(&m, &int(3)).unwrap();
        let key = CorrelatorKey::primary(CurveClass(vec![3]), &[2; 8]);
        t.insert(key.clone(), int(13), Provenance::Solved);
        let r = verify_axioms(&m, &t, &AxiomConfig { samples: 10, ..AxiomConfig::default() });
        assert!(r.entry_failures.iter().any(|f| f.starts_with(&key.render(&m))), "{:?}", r.entry_failures);
    }

    #[test]
    fn samples_pass_filter_and_are_reducible() {
        let m = builtin("P2").unwrap();
        for k in sample_reducible_keys(2, 3, &AxiomConfig::default()) {
            assert!(dimension_filter(&m, &k));
            assert!(k.len() >= 4 && k.insertions().iter().any(|i| i.class <= 1));
        }
    }
}
