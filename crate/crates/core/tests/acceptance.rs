mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qhforge::axioms::{sample_reducible_keys, verify_axioms, AxiomConfig};
use qhforge::cli::run_args;
use qhforge::cohomology::builtin;
use qhforge::correlators::{evaluate, splitting_residual};
use qhforge::descendants::{close_table, default_max_insertions, verify_series, SeriesBounds};
use qhforge::exact::int;
use qhforge::floer::{arnold_report, fixtures, homology_ranks, FloerComplex};
use qhforge::novikov::{CurveClass, NovikovElement};
use qhforge::strata::{enumerate_strata, expected_dimension};
use qhforge::wdvv::{solve_recursion, solve_recursion_with, QuantumRing};
use qhforge::{CorrelatorKey, Insertion, Provenance, Rational};

const KONTSEVICH_LIMIT: Duration = Duration::from_secs(10);
const ASSOCIATIVITY_LIMIT: Duration = Duration::from_secs(60);
const FLOER_LIMIT: Duration = Duration::from_secs(5);
/// Every comparison below is exact; no numeric tolerance is used.
const AXIOM_SAMPLES: usize = 500;
const AXIOM_MAX_DEGREE: i64 = 3;
const PLANE_ASSOC_DEGREE: i64 = 6;
const P3_ASSOC_DEGREE: i64 = 3;
const RING_RELATION_CUTOFF: i64 = 2;
const SERIES_DEPTH: u32 = 2;
const SERIES_DEGREE: i64 = 2;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn cli(args: &[&str]) -> qhforge::cli::RunResult {
    run_args(std::iter::once("qhforge").chain(args.iter().copied()))
}

fn kontsevich() -> Outcome {
    let start = Instant::now();
    let r = cli(&["kontsevich", "--max-degree", "6"]);
    let t = within(start, KONTSEVICH_LIMIT)?;
    ensure(r.status == 0, format!("exit {}: {}", r.status, r.stderr))?;
    let oracle = common::kontsevich_oracle(6);
    let want: String = oracle.iter().enumerate().map(|(i, n)| format!("N_{} = {n}\n", i + 1)).collect();
    ensure(r.stdout == want, format!("output {:?} differs from oracle {:?}", r.stdout, want))?;
    let classical: Vec<BigInt> = [1, 1, 12, 620].iter().map(|&v| BigInt::from(v)).collect();
    ensure(oracle[..4] == classical[..], "oracle disagrees with N_2=1, N_3=12, N_4=620")?;
    Ok(format!("N_1..N_6 equal the oracle, N_6 = {} ({t:.2?})", oracle[5]))
}

fn associativity() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    for (name, d) in [("P2", PLANE_ASSOC_DEGREE), ("P3", P3_ASSOC_DEGREE)] {
        let m = builtin(name).unwrap();
        let t = solve_recursion(&m, &int(d)).map_err(|e| e.to_string())?;
        let ring = QuantumRing::new(&m, &t, &int(d)).map_err(|e| e.to_string())?;
        let fails = ring.associativity_failures();
        ensure(fails.is_empty(), format!("{name}: {} nonzero associators", fails.len()))?;
        triples += m.rank().pow(3);
    }
    let m = builtin("P3").unwrap();
    let mut t = solve_recursion(&m, &int(P3_ASSOC_DEGREE)).map_err(|e| e.to_string())?;
    let victim = CorrelatorKey::primary(CurveClass(vec![1]), &[3, 2, 2]);
    ensure(t.get(&victim) == Some(&int(1)), "unexpected value at the perturbed key")?;
    t.insert(victim, int(2), Provenance::Solved);
    let ring = QuantumRing::new(&m, &t, &int(P3_ASSOC_DEGREE)).map_err(|e| e.to_string())?;
    let assoc_hits = ring.associativity_failures().len();
    let rank = m.rank();
    let mut residual_hits = 0;
    for q in 0..rank.pow(4) {
        let quad = [q % rank, (q / rank) % rank, (q / rank / rank) % rank, q / rank / rank / rank];
        for d in 0..=P3_ASSOC_DEGREE {
            if let Ok(r) = splitting_residual(&m, &t, quad, &CurveClass(vec![d])) {
                residual_hits += usize::from(!r.is_zero());
            }
        }
    }
    ensure(assoc_hits + residual_hits > 0, "perturbed entry went unnoticed")?;
    let elapsed = within(start, ASSOCIATIVITY_LIMIT)?;
    Ok(format!(
        "{triples} basis triples associate; perturbation seen by {assoc_hits} associators and {residual_hits} residuals ({elapsed:.2?})"
    ))
}

fn ring_relation() -> Outcome {
    for n in 1..=3usize {
        let m = builtin(&format!("P{n}")).unwrap();
        let c = int(RING_RELATION_CUTOFF);
        let t = solve_recursion(&m, &c).map_err(|e| e.to_string())?;
        let ring = QuantumRing::new(&m, &t, &c).map_err(|e| e.to_string())?;
        let power = ring.power(&ring.basis(1), n + 1);
        let q = NovikovElement::monomial(m.lattice().clone(), c.clone(), CurveClass(vec![1]), Rational::one()).unwrap();
        let want = ring.basis(0).mul_scalar(&q);
        ensure(power == want, format!("P{n}: h^{{*{}}} = {}", n + 1, power.render(&m)))?;
    }
    Ok("h^{*(n+1)} = q·1 for n = 1, 2, 3".into())
}

fn axiom_suite() -> Outcome {
    let m = builtin("P2").unwrap();
    let t = solve_recursion(&m, &int(AXIOM_MAX_DEGREE)).map_err(|e| e.to_string())?;
    let cfg = AxiomConfig { samples: AXIOM_SAMPLES, ..AxiomConfig::default() };
    let report = verify_axioms(&m, &t, &cfg);
    for (name, _, failures) in report.lines() {
        ensure(failures.is_empty(), format!("{name}: {}", failures.join("; ")))?;
    }
    ensure(report.reduction_checked == AXIOM_SAMPLES, "wrong reducible sample count")?;
    ensure(report.off_dimension_checked == AXIOM_SAMPLES, "wrong off-dimension sample count")?;
    // closed form d^{#h}·N_d (0 with a unit), N_d from the oracle recursion
    let n: Vec<BigInt> = common::kontsevich_oracle(AXIOM_MAX_DEGREE as usize);
    for key in sample_reducible_keys(2, AXIOM_MAX_DEGREE, &cfg) {
        let d = key.class().0[0];
        let count = |a: usize| key.insertions().iter().filter(|i| i.class == a).count();
        let want = if count(0) > 0 {
            BigInt::zero()
        } else {
            BigInt::from(d).pow(count(1) as u32) * &n[d as usize - 1]
        };
        let got = evaluate(&m, &t, &key).map_err(|e| e.to_string())?;
        ensure(got == Rational::from_integer(want.clone()), format!("{}: {got} vs closed form {want}", key.render(&m)))?;
    }
    Ok(format!(
        "{AXIOM_SAMPLES} reducible keys agree (WDVV cross-check on {}, closed form on all); {} off-dimension keys vanish",
        report.reduction_checked - report.reduction_divisor_only,
        report.off_dimension_checked
    ))
}

fn string_dilaton() -> Outcome {
    let m = builtin("P2").unwrap();
    let mut t = solve_recursion(&m, &int(SERIES_DEGREE)).map_err(|e| e.to_string())?;
    let max_ins = default_max_insertions(&t, 6);
    close_table(&m, &mut t, SERIES_DEPTH, max_ins).map_err(|e| e.to_string())?;
    let bounds = SeriesBounds { depth: SERIES_DEPTH, cutoff: int(SERIES_DEGREE), max_insertions: max_ins };
    let clean = verify_series(&m, &t, &bounds);
    ensure(clean.ok(), format!("{} violations on the solved series", clean.violations.len()))?;
    ensure(clean.checked_string > 0 && clean.checked_dilaton > 0, "nothing was checked")?;
    let bad = CorrelatorKey::new(
        CurveClass(vec![1]),
        vec![Insertion::primary(0), Insertion::tau(1, 1), Insertion::primary(2), Insertion::primary(2)],
    );
    let old = t.get(&bad).cloned().ok_or("corruption target missing")?;
    t.insert(bad.clone(), old + int(1), Provenance::User);
    let dirty = verify_series(&m, &t, &bounds);
    ensure(dirty.violations.iter().any(|v| v.key == bad), "corrupted entry not named")?;
    Ok(format!(
        "{} string and {} dilaton coefficients hold; corruption named as {}",
        clean.checked_string,
        clean.checked_dilaton,
        bad.render(&m)
    ))
}

fn strata() -> Outcome {
    let m = builtin("P2").unwrap();
    let mut graphs = 0;
    for d in 0..=3 {
        for k in 0..=2 {
            let found = enumerate_strata(&m, &CurveClass(vec![d]), 0, k).map_err(|e| e.to_string())?;
            let oracle = common::brute_force(d, k);
            ensure(found.len() == oracle.len(), format!("d={d} k={k}: {} vs oracle {}", found.len(), oracle.len()))?;
            for g in &found {
                ensure(g.ghost_bound(), format!("ghost bound fails for {}", g.describe()))?;
            }
            graphs += found.len();
        }
    }
    for (i, &(c, g, k, n, b, e, want)) in common::DIMENSION_CASES.iter().enumerate() {
        let got = expected_dimension(c, g, k, n, b, e);
        ensure(got == want, format!("dimension case {}: {got} vs {want}", i + 1))?;
    }
    Ok(format!("{graphs} graphs match the brute force; {} dimension cases agree", common::DIMENSION_CASES.len()))
}

fn floer() -> Outcome {
    let start = Instant::now();
    let betti: Vec<(&str, FloerComplex, Vec<usize>)> = vec![
        ("S^2", fixtures::sphere(), vec![1, 0, 1]),
        ("T^2", fixtures::torus(), vec![1, 2, 1]),
        ("genus 2", fixtures::genus_two(), vec![1, 4, 1]),
        ("S^2 with pair", fixtures::sphere_with_pair(), vec![1, 0, 1]),
        ("cancellation", fixtures::cancellation_pair(), vec![]),
        ("interval", fixtures::interval(), vec![]),
    ];
    for (name, c, b) in &betti {
        ensure(c.d_squared_check().map_err(|e| e.to_string())?, format!("{name}: δ² ≠ 0"))?;
        let h = homology_ranks(c).map_err(|e| e.to_string())?;
        let want: Vec<(i64, usize)> = b.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| (i as i64, x)).collect();
        ensure(h.ranks.clone().into_iter().collect::<Vec<_>>() == want, format!("{name}: {}", h.render()))?;
        let r = arnold_report(c, b).map_err(|e| e.to_string())?;
        ensure(r.generators_bound(), format!("{name}: {}", r.render()))?;
    }
    ensure(!fixtures::broken().d_squared_check().map_err(|e| e.to_string())?, "corrupted complex accepted")?;
    let t = within(start, FLOER_LIMIT)?;
    Ok(format!("δ² checks, Betti ranks, acyclic cancellation and Arnold bound hold ({t:.2?})"))
}

fn determinism() -> Outcome {
    let m = builtin("P2").unwrap();
    let a = solve_recursion_with(&m, &int(5), false).map_err(|e| e.to_string())?.to_jsonl();
    let b = solve_recursion_with(&m, &int(5), false).map_err(|e| e.to_string())?.to_jsonl();
    let p = solve_recursion_with(&m, &int(5), true).map_err(|e| e.to_string())?.to_jsonl();
    ensure(a == b && a == p, "table bytes differ between runs")?;
    let commands: [&[&str]; 4] = [
        &["solve", "--model", "P3", "--cutoff", "3"],
        &["qh", "--model", "P2", "--cutoff", "4"],
        &["--format", "csv", "kontsevich", "--max-degree", "5"],
        &["--format", "json", "descendants", "verify", "--depth", "2"],
    ];
    for args in commands {
        let first = cli(args);
        let second = cli(args);
        let par = cli(&[&["--parallel"], args].concat());
        ensure(first.status == 0, format!("{args:?} exit {}", first.status))?;
        ensure(first == second && first.stdout == par.stdout, format!("{args:?} output differs"))?;
    }
    Ok(format!("tables ({} bytes) and {} CLI outputs are byte-identical", a.len(), commands.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("kontsevich counts", kontsevich),
        ("associativity", associativity),
        ("quantum ring relation", ring_relation),
        ("axiom suite", axiom_suite),
        ("string/dilaton", string_dilaton),
        ("strata", strata),
        ("floer", floer),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
