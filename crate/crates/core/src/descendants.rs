//! String and dilaton equations, as reducers on descendant keys and as checks on the
//! assembled genus-0 generating function
//! `F = Σ ⟨τ_{d_1}(β_{a_1}) ⋯⟩_A q^A Π t^{a_i}_{d_i} / Π n!`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cohomology::RingModel;
use crate::correlators::{
    dimension_filter, evaluate, CorrelatorError, CorrelatorKey, CorrelatorTable, Insertion, Provenance, Reduction,
};
use crate::exact::{factorial, int, Rational, RationalRepr};
use crate::novikov::CurveClass;
use crate::strata::expected_dimension;

pub const SERIES_SCHEMA: &str = "qhforge.series/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescError {
    #[error("dilaton χ-term unsupported at genus {0}")]
    GenusUnsupported(u32),
    #[error("key {0} has no insertion of the requested kind")]
    NoSuchInsertion(String),
    #[error("string equation not available at (g,k) = (0,3) with A ≠ 0: {0}")]
    ExceptionalThreePoint(String),
    #[error("correlator {0} is outside the string/dilaton closure of the primaries")]
    Undetermined(String),
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
}

/// Removes a `τ_0(1)` insertion, lowering each other descendant in turn.
pub fn string_apply(model: &RingModel, key: &CorrelatorKey) -> Result<Reduction, DescError> {
    let unit = Insertion::primary(model.unit_index());
    let pos = key.position(unit).ok_or_else(|| DescError::NoSuchInsertion(key.render(model)))?;
    if key.len() < 3 {
        return Err(CorrelatorError::TooFewInsertions(key.render(model)).into());
    }
    if key.len() == 3 {
        if !key.class().is_zero() {
            return Err(DescError::ExceptionalThreePoint(key.render(model)));
        }
        if !key.is_primary() {
            return Ok(Reduction::Zero);
        }
        return Ok(Reduction::Value(crate::correlators::classical_eval(model, key)?));
    }
    let rest = key.without(pos);
    let mut terms: BTreeMap<CorrelatorKey, Rational> = BTreeMap::new();
    for (j, ins) in rest.insertions().iter().enumerate() {
        if ins.descendant >= 1 {
            let lowered = rest.replaced(j, Insertion::tau(ins.descendant - 1, ins.class));
            *terms.entry(lowered).or_insert_with(Rational::zero) += Rational::one();
        }
    }
    if terms.is_empty() {
        return Ok(Reduction::Zero);
    }
    Ok(Reduction::Combination(terms.into_iter().map(|(k, c)| (c, k)).collect()))
}

/// Removes a `τ_1(1)` insertion with factor `2g − 2 + k'`, `k'` the remaining count.
pub fn dilaton_apply(model: &RingModel, key: &CorrelatorKey, genus: u32) -> Result<Reduction, DescError> {
    if genus >= 1 {
        return Err(DescError::GenusUnsupported(genus));
    }
    let dil = Insertion::tau(1, model.unit_index());
    let pos = key.position(dil).ok_or_else(|| DescError::NoSuchInsertion(key.render(model)))?;
    if key.len() < 3 {
        return Err(CorrelatorError::TooFewInsertions(key.render(model)).into());
    }
    if key.len() == 3 {
        return Ok(Reduction::Zero);
    }
    let rest = key.without(pos);
    let factor = int(rest.len() as i64 - 2);
    Ok(Reduction::Scaled { factor, key: rest })
}

/// Values of the string/dilaton closure of the primary correlators, memoised.
pub struct Closure<'a> {
    model: &'a RingModel,
    table: &'a CorrelatorTable,
    memo: RefCell<HashMap<CorrelatorKey, Option<Rational>>>,
}

impl<'a> Closure<'a> {
    pub fn new(model: &'a RingModel, table: &'a CorrelatorTable) -> Self {
        Closure { model, table, memo: RefCell::new(HashMap::new()) }
    }

    /// `None` when the key lies outside the closure.
    pub fn value(&self, key: &CorrelatorKey) -> Result<Option<Rational>, DescError> {
        if let Some(v) = self.memo.borrow().get(key) {
            return Ok(v.clone());
        }
        let v = self.compute(key)?;
        self.memo.borrow_mut().insert(key.clone(), v.clone());
        Ok(v)
    }

    fn compute(&self, key: &CorrelatorKey) -> Result<Option<Rational>, DescError> {
        let m = self.model;
        if key.len() < 3 {
            return Err(CorrelatorError::TooFewInsertions(key.render(m)).into());
        }
        if !dimension_filter(m, key) {
            return Ok(Some(Rational::zero()));
        }
        if key.is_primary() {
            return Ok(Some(evaluate(m, self.table, key)?));
        }
        if key.class().is_zero() && key.len() == 3 {
            return Ok(Some(Rational::zero()));
        }
        let unit = m.unit_index();
        let reduction = if key.contains(Insertion::primary(unit)) {
            match string_apply(m, key) {
                Err(DescError::ExceptionalThreePoint(_)) => return Ok(None),
                other => other?,
            }
        } else if key.contains(Insertion::tau(1, unit)) {
            dilaton_apply(m, key, 0)?
        } else {
            return Ok(None);
        };
        self.reduce(&reduction)
    }

    fn reduce(&self, r: &Reduction) -> Result<Option<Rational>, DescError> {
        Ok(match r {
            Reduction::Zero => Some(Rational::zero()),
            Reduction::Value(v) => Some(v.clone()),
            Reduction::Scaled { factor, key } => {
                if factor.is_zero() {
                    Some(Rational::zero())
                } else {
                    self.value(key)?.map(|v| v * factor)
                }
            }
            Reduction::Combination(terms) => {
                let mut total = Rational::zero();
                for (c, k) in terms {
                    match self.value(k)? {
                        Some(v) => total += c * v,
                        None => return Ok(None),
                    }
                }
                Some(total)
            }
        })
    }

    /// Same key reduced by the dilaton rule first when both rules apply.
    pub fn value_dilaton_first(&self, key: &CorrelatorKey) -> Result<Option<Rational>, DescError> {
        let m = self.model;
        if dimension_filter(m, key) && key.len() > 3 && key.contains(Insertion::tau(1, m.unit_index())) {
            return self.reduce(&dilaton_apply(m, key, 0)?);
        }
        self.value(key)
    }
}

/// Variables `t^a_d` with `d ≤ depth`.
pub fn variables(model: &RingModel, depth: u32) -> Vec<Insertion> {
    let mut out: Vec<Insertion> =
        (0..=depth).flat_map(|d| (0..model.rank()).map(move |a| Insertion::tau(d, a))).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn weight(model: &RingModel, i: &Insertion) -> i64 {
    model.degree(i.class) as i64 + 2 * i.descendant as i64
}

/// Multisets of `size` variables with total weight `target`, each sorted descending.
pub fn weighted_multisets(model: &RingModel, vars: &[Insertion], size: usize, target: i64) -> Vec<Vec<Insertion>> {
    fn rec(
        model: &RingModel,
        vars: &[Insertion],
        start: usize,
        size: usize,
        target: i64,
        prefix: &mut Vec<Insertion>,
        out: &mut Vec<Vec<Insertion>>,
    ) {
        if size == 0 {
            if target == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for i in start..vars.len() {
            let w = weight(model, &vars[i]);
            if w > target {
                continue;
            }
            prefix.push(vars[i]);
            rec(model, vars, i, size - 1, target - w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(model, vars, 0, size, target, &mut Vec::new(), &mut out);
    out
}

fn index(model: &RingModel, class: &CurveClass, k: usize) -> i64 {
    expected_dimension(model.lattice().chern(class), 0, k as i64, model.complex_dim() as i64, 0, 0)
}

/// Largest insertion count among stored keys, at least `floor`.
pub fn default_max_insertions(table: &CorrelatorTable, floor: usize) -> usize {
    table.keys().map(|k| k.len() + 1).max().unwrap_or(0).max(floor)
}

/// Adds every missing determined descendant key with depth ≤ `depth`, class within the table
/// cutoff and at most `max_insertions` insertions. Returns the number added.
pub fn close_table(
    model: &RingModel,
    table: &mut CorrelatorTable,
    depth: u32,
    max_insertions: usize,
) -> Result<usize, DescError> {
    let vars = variables(model, depth);
    let classes = model.lattice().classes_up_to(table.cutoff());
    let mut found = Vec::new();
    {
        let closure = Closure::new(model, table);
        for class in &classes {
            for k in 3..=max_insertions {
                for ins in weighted_multisets(model, &vars, k, index(model, class, k)) {
                    let key = CorrelatorKey::new(class.clone(), ins);
                    if key.is_primary() || table.get(&key).is_some() {
                        continue;
                    }
                    if let Some(v) = closure.value(&key)? {
                        found.push((key, v));
                    }
                }
            }
        }
    }
    let added = found.len();
    for (k, v) in found {
        table.insert(k, v, Provenance::Solved);
    }
    Ok(added)
}

/// Truncated genus-0 potential: monomial `(A, insertions)` → coefficient.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenSeries {
    terms: BTreeMap<CorrelatorKey, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    #[serde(rename = "A")]
    pub class: CurveClass,
    /// `[d, a, power]` triples.
    pub monomial: Vec<[u64; 3]>,
    pub coefficient: RationalRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub schema: String,
    pub model: String,
    pub terms: Vec<SeriesTerm>,
}

fn powers(ins: &[Insertion]) -> Vec<(Insertion, u64)> {
    let mut out: Vec<(Insertion, u64)> = Vec::new();
    for &i in ins {
        match out.last_mut() {
            Some((j, n)) if *j == i => *n += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

fn automorphisms(ins: &[Insertion]) -> Rational {
    Rational::from_integer(powers(ins).iter().map(|(_, n)| factorial(*n)).product())
}

impl GenSeries {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &CorrelatorKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CorrelatorKey, &Rational)> {
        self.terms.iter()
    }

    /// Terms sorted by total degree, reverse lexicographic exponents, then energy.
    pub fn sorted_terms(&self, model: &RingModel, depth: u32) -> Vec<SeriesTerm> {
        let vars = variables(model, depth);
        let mut rows: Vec<(Vec<u64>, Rational, SeriesTerm)> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let p = powers(k.insertions());
                let exps: Vec<u64> =
                    vars.iter().map(|v| p.iter().find(|(i, _)| i == v).map(|x| x.1).unwrap_or(0)).collect();
                let term = SeriesTerm {
                    class: k.class().clone(),
                    monomial: p.iter().map(|(i, n)| [i.descendant as u64, i.class as u64, *n]).collect(),
                    coefficient: c.into(),
                };
                (exps, model.lattice().energy(k.class()), term)
            })
            .collect();
        rows.sort_by(|a, b| {
            let (da, db) = (a.0.iter().sum::<u64>(), b.0.iter().sum::<u64>());
            da.cmp(&db)
                .then_with(|| b.0.iter().rev().cmp(a.0.iter().rev()))
                .then_with(|| a.1.cmp(&b.1))
                .then_with(|| a.2.class.cmp(&b.2.class))
        });
        rows.into_iter().map(|r| r.2).collect()
    }

    pub fn to_json(&self, model: &RingModel, depth: u32) -> String {
        let file = SeriesFile {
            schema: SERIES_SCHEMA.into(),
            model: model.name().to_string(),
            terms: self.sorted_terms(model, depth),
        };
        serde_json::to_string_pretty(&file).expect("series serializes")
    }
}

/// Coefficient source for the series: primaries through the reduction axioms, other
/// keys from the table. `None` marks an undetermined coefficient.
fn table_value(model: &RingModel, table: &CorrelatorTable, key: &CorrelatorKey) -> Option<Rational> {
    if !dimension_filter(model, key) {
        return Some(Rational::zero());
    }
    if key.is_primary() {
        return evaluate(model, table, key).ok();
    }
    if key.class().is_zero() && key.len() == 3 {
        return Some(Rational::zero());
    }
    table.get(key).cloned()
}

/// Bounds of the truncated series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesBounds {
    pub depth: u32,
    pub cutoff: Rational,
    pub max_insertions: usize,
}

pub fn assemble_series(model: &RingModel, table: &CorrelatorTable, bounds: &SeriesBounds) -> GenSeries {
    let vars = variables(model, bounds.depth);
    let mut terms = BTreeMap::new();
    for class in model.lattice().classes_up_to(&bounds.cutoff) {
        for k in 3..=bounds.max_insertions {
            for ins in weighted_multisets(model, &vars, k, index(model, &class, k)) {
                let key = CorrelatorKey::new(class.clone(), ins);
                if let Some(v) = table_value(model, table, &key) {
                    if !v.is_zero() {
                        let c = v / automorphisms(key.insertions());
                        terms.insert(key, c);
                    }
                }
            }
        }
    }
    GenSeries { terms }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    String,
    Dilaton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub equation: Equation,
    pub class: CurveClass,
    /// Monomial of the checked coefficient.
    pub monomial: Vec<Insertion>,
    /// Key whose table value enters the left-hand side.
    pub key: CorrelatorKey,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeriesReport {
    pub checked_string: usize,
    pub checked_dilaton: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

impl SeriesReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn render_monomial(model: &RingModel, class: &CurveClass, ins: &[Insertion]) -> String {
    let mut parts: Vec<String> = powers(ins)
        .iter()
        .map(|(i, n)| {
            let base = format!("t^{}_{}", model.label(i.class), i.descendant);
            if *n == 1 {
                base
            } else {
                format!("({base})^{n}")
            }
        })
        .collect();
    if !class.is_zero() {
        parts.push(format!("q^{class}"));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}

impl Violation {
    pub fn describe(&self, model: &RingModel) -> String {
        format!(
            "{} equation fails at {}: lhs {} = {}, rhs {}",
            match self.equation {
                Equation::String => "string",
                Equation::Dilaton => "dilaton",
            },
            render_monomial(model, &self.class, &self.monomial),
            self.key.render(model),
            crate::exact::render(&self.lhs),
            crate::exact::render(&self.rhs)
        )
    }
}

/// Checks `∂F/∂t^1_0 = ½η_ab t^a_0 t^b_0 + Σ t^a_{i+1} ∂F/∂t^a_i` and
/// `∂F/∂t^1_1 = Σ_{i ≥ 0} t^a_i ∂F/∂t^a_i − 2F` coefficient by coefficient. In the
/// divided-power basis the coefficient of `t^M q^A / M!` on each side is a sum of
/// correlators, and only coefficients whose correlators are all determined count.
pub fn verify_series(model: &RingModel, table: &CorrelatorTable, bounds: &SeriesBounds) -> SeriesReport {
    let vars = variables(model, bounds.depth);
    let unit = model.unit_index();
    let mut report = SeriesReport::default();
    let value = |k: &CorrelatorKey| table_value(model, table, k);
    for class in model.lattice().classes_up_to(&bounds.cutoff) {
        for size in 2..bounds.max_insertions {
            // string: unit insertion has weight 0
            for m in weighted_multisets(model, &vars, size, index(model, &class, size + 1)) {
                let lhs_key = CorrelatorKey::new(class.clone(), [m.clone(), vec![Insertion::primary(unit)]].concat());
                if size == 2 && !class.is_zero() {
                    report.skipped += 1;
                    continue;
                }
                let Some(lhs) = value(&lhs_key) else {
                    report.skipped += 1;
                    continue;
                };
                let mut rhs = Some(Rational::zero());
                if size == 2 {
                    if m.iter().all(|i| i.descendant == 0) {
                        rhs = Some(model.pairing()[m[0].class][m[1].class].clone());
                    }
                } else {
                    for (j, ins) in m.iter().enumerate() {
                        if ins.descendant == 0 {
                            continue;
                        }
                        let mut lowered = m.clone();
                        lowered[j] = Insertion::tau(ins.descendant - 1, ins.class);
                        let key = CorrelatorKey::new(class.clone(), lowered);
                        rhs = rhs.zip(value(&key)).map(|(a, b)| a + b);
                    }
                }
                let Some(rhs) = rhs else {
                    report.skipped += 1;
                    continue;
                };
                report.checked_string += 1;
                if lhs != rhs {
                    report.violations.push(Violation {
                        equation: Equation::String,
                        class: class.clone(),
                        monomial: m.clone(),
                        key: lhs_key,
                        lhs,
                        rhs,
                    });
                }
            }
            if bounds.depth == 0 {
                continue;
            }
            // dilaton: τ_1(1) has weight 2
            for m in weighted_multisets(model, &vars, size, index(model, &class, size + 1) - 2) {
                let lhs_key = CorrelatorKey::new(class.clone(), [m.clone(), vec![Insertion::tau(1, unit)]].concat());
                let Some(lhs) = value(&lhs_key) else {
                    report.skipped += 1;
                    continue;
                };
                let rhs = if size == 2 {
                    Some(Rational::zero())
                } else {
                    value(&CorrelatorKey::new(class.clone(), m.clone())).map(|v| v * int(size as i64 - 2))
                };
                let Some(rhs) = rhs else {
                    report.skipped += 1;
                    continue;
                };
                report.checked_dilaton += 1;
                if lhs != rhs {
                    report.violations.push(Violation {
                        equation: Equation::Dilaton,
                        class: class.clone(),
                        monomial: m.clone(),
                        key: lhs_key,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::builtin;
    use crate::wdvv::solve_recursion;

    fn plane(cutoff: i64) -> (RingModel, CorrelatorTable) {
        let m = builtin("P2").unwrap();
        let t = solve_recursion(&m, &int(cutoff)).unwrap();
        (m, t)
    }

    fn key(d: i64, ins: &[(u32, usize)]) -> CorrelatorKey {
        CorrelatorKey::new(CurveClass(vec![d]), ins.iter().map(|&(d, a)| Insertion::tau(d, a)).collect())
    }

    #[test]
    fn string_examples() {
        let (m, t) = plane(1);
        let k = key(1, &[(0, 0), (1, 1), (0, 2), (0, 2)]);
        assert_eq!(
            string_apply(&m, &k).unwrap(),
            Reduction::Combination(vec![(int(1), key(1, &[(0, 1), (0, 2), (0, 2)]))])
        );
        assert_eq!(Closure::new(&m, &t).value(&k).unwrap(), Some(int(1)));
        assert_eq!(string_apply(&m, &key(1, &[(0, 0), (0, 2), (0, 2), (0, 1)])).unwrap(), Reduction::Zero);
        assert_eq!(string_apply(&m, &key(0, &[(0, 0), (1, 1), (0, 1)])).unwrap(), Reduction::Zero);
        assert!(matches!(
            string_apply(&m, &key(1, &[(0, 0), (1, 2), (0, 2)])),
            Err(DescError::ExceptionalThreePoint(_))
        ));
    }

    #[test]
    fn dilaton_examples() {
        let (m, t) = plane(1);
        let k = key(1, &[(1, 0), (0, 2), (0, 2), (0, 1)]);
        assert_eq!(
            dilaton_apply(&m, &k, 0).unwrap(),
            Reduction::Scaled { factor: int(1), key: key(1, &[(0, 2), (0, 2), (0, 1)]) }
        );
        assert_eq!(Closure::new(&m, &t).value(&k).unwrap(), Some(int(1)));
        assert_eq!(dilaton_apply(&m, &k, 1), Err(DescError::GenusUnsupported(1)));
    }

    #[test]
    fn undetermined_keys() {
        let (m, t) = plane(1);
        let c = Closure::new(&m, &t);
        let k = key(1, &[(1, 2), (0, 1), (0, 1), (0, 1)]);
        assert!(dimension_filter(&m, &k));
        assert_eq!(c.value(&k).unwrap(), None);
    }

    #[test]
    fn empty_table_series_is_vacuous() {
        let m = builtin("P2").unwrap();
        let t = CorrelatorTable::new("P2", int(0));
        let bounds = SeriesBounds { depth: 1, cutoff: int(0), max_insertions: 3 };
        let r = verify_series(&m, &t, &bounds);
        assert!(r.ok());
    }

    #[test]
    fn closure_is_confluent() {
        let (m, mut t) = plane(2);
        close_table(&m, &mut t, 2, 6).unwrap();
        let c = Closure::new(&m, &t);
        for (k, e) in t.iter() {
            if k.is_primary() {
                continue;
            }
            assert_eq!(c.value_dilaton_first(k).unwrap().as_ref(), Some(&e.value), "{}", k.render(&m));
        }
    }

    #[test]
    fn closed_plane_series_balances_and_detects_corruption() {
        let (m, mut t) = plane(2);
        close_table(&m, &mut t, 1, 6).unwrap();
        let bounds = SeriesBounds { depth: 1, cutoff: int(2), max_insertions: 6 };
        let r = verify_series(&m, &t, &bounds);
        assert!(r.ok(), "{:?}", r.violations);
        assert!(r.checked_string > 0 && r.checked_dilaton > 0);
        let bad = key(1, &[(0, 0), (1, 1), (0, 2), (0, 2)]);
        t.insert(bad.clone(), int(2), Provenance::User);
        let r = verify_series(&m, &t, &bounds);
        assert!(r.violations.iter().any(|v| v.key == bad));
    }

    #[test]
    fn series_coefficients_divide_by_automorphisms() {
        let (m, t) = plane(2);
        let bounds = SeriesBounds { depth: 0, cutoff: int(2), max_insertions: 5 };
        let s = assemble_series(&m, &t, &bounds);
        assert_eq!(s.coefficient(&key(2, &[(0, 2); 5])), crate::exact::frac(1, 120));
        assert_eq!(s.coefficient(&key(1, &[(0, 2), (0, 2), (0, 1)])), crate::exact::frac(1, 2));
    }
}
