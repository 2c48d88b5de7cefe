//! Small quantum product and the triangular WDVV solver for projective spaces.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cohomology::{build_pn, CohClass, RingModel};
use crate::correlators::{
    classical_eval, composition_residual, dimension_filter, evaluate, evaluate_with, CorrelatorError,
    CorrelatorKey, CorrelatorTable, Insertion, Provenance,
};
use crate::exact::{int, Rational};
use crate::novikov::{ClassLattice, CurveClass, NovikovElement};

/// Bumped whenever the solved values or their serialisation could change.
pub const SOLVER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("model {0} is not a projective space; only P^n tables can be reconstructed")]
    Unsupported(String),
    #[error("system not triangular at key {0}")]
    NotTriangular(String),
    #[error("cutoff must be nonnegative")]
    BadCutoff,
    #[error("cutoff insufficient: degree {need} requested, table reaches degree {have}")]
    CutoffInsufficient { need: i64, have: i64 },
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
}

/// Element of `H^*(V) ⊗ Λ`: one Novikov coefficient per basis class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QClass {
    lattice: Arc<ClassLattice>,
    cutoff: Rational,
    coeffs: BTreeMap<usize, NovikovElement>,
}

impl QClass {
    pub fn zero(lattice: Arc<ClassLattice>, cutoff: Rational) -> Self {
        QClass { lattice, cutoff, coeffs: BTreeMap::new() }
    }

    pub fn from_coh(model: &RingModel, class: &CohClass, cutoff: Rational) -> Self {
        let mut out = QClass::zero(model.lattice().clone(), cutoff);
        for (&i, c) in class.coefficients() {
            let e = NovikovElement::scalar(out.lattice.clone(), out.cutoff.clone(), c.clone());
            out.add_term(i, &e);
        }
        out
    }

    pub fn basis(model: &RingModel, i: usize, cutoff: Rational) -> Self {
        Self::from_coh(model, &CohClass::basis(i), cutoff)
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, NovikovElement> {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> NovikovElement {
        self.coeffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| NovikovElement::zero(self.lattice.clone(), self.cutoff.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, i: usize, c: &NovikovElement) {
        let sum = self.coefficient(i).try_add(c).expect("shared lattice");
        if sum.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, sum);
        }
    }

    pub fn add(&self, other: &QClass) -> QClass {
        let mut out = self.clone();
        for (&i, c) in &other.coeffs {
            out.add_term(i, c);
        }
        out
    }

    pub fn sub(&self, other: &QClass) -> QClass {
        let mut out = self.clone();
        for (&i, c) in &other.coeffs {
            out.add_term(i, &c.neg());
        }
        out
    }

    pub fn mul_scalar(&self, c: &NovikovElement) -> QClass {
        let mut out = QClass::zero(self.lattice.clone(), self.cutoff.clone());
        for (&i, x) in &self.coeffs {
            out.add_term(i, &x.try_mul(c).expect("shared lattice"));
        }
        out
    }

    /// Set of total degrees `deg β_b + 2·c_1(A)` over all terms.
    pub fn degrees(&self, model: &RingModel) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for (&i, c) in &self.coeffs {
            for class in c.terms().keys() {
                out.insert(model.degree(i) as i64 + 2 * self.lattice.chern(class));
            }
        }
        out
    }

    pub fn render(&self, model: &RingModel) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&i, c)| {
                let label = model.label(i);
                let coef = c.to_string();
                if coef == "1" {
                    label.to_string()
                } else if c.terms().len() == 1 {
                    format!("{coef}·{label}")
                } else {
                    format!("({coef})·{label}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

fn basis_three_point(
    model: &RingModel,
    table: &CorrelatorTable,
    idx: [usize; 3],
    classes: &[CurveClass],
    cutoff: &Rational,
) -> Result<NovikovElement, CorrelatorError> {
    let mut terms = Vec::new();
    for class in classes {
        let key = CorrelatorKey::primary(class.clone(), &idx);
        if !dimension_filter(model, &key) {
            continue;
        }
        let v = if class.is_zero() { classical_eval(model, &key)? } else { evaluate(model, table, &key)? };
        terms.push((class.clone(), v));
    }
    Ok(NovikovElement::from_terms(model.lattice().clone(), cutoff.clone(), terms).expect("classes from the lattice"))
}

/// `Σ_A ⟨α, β, γ⟩_A q^A` over effective classes with energy at most `cutoff`.
pub fn three_point_total(
    model: &RingModel,
    table: &CorrelatorTable,
    alpha: &CohClass,
    beta: &CohClass,
    gamma: &CohClass,
    cutoff: &Rational,
) -> Result<NovikovElement, CorrelatorError> {
    let classes = model.lattice().classes_up_to(cutoff);
    let mut total = NovikovElement::zero(model.lattice().clone(), cutoff.clone());
    for (&i, ci) in alpha.coefficients() {
        for (&j, cj) in beta.coefficients() {
            for (&k, ck) in gamma.coefficients() {
                let t = basis_three_point(model, table, [i, j, k], &classes, cutoff)?;
                total = total.try_add(&t.scale(&(ci * cj * ck))).expect("shared lattice");
            }
        }
    }
    Ok(total)
}

/// Structure constants `β_i ×_Q β_j` of the small quantum ring up to a cutoff.
#[derive(Debug, Clone)]
pub struct QuantumRing {
    model: RingModel,
    cutoff: Rational,
    products: Vec<Vec<QClass>>,
}

impl QuantumRing {
    pub fn new(model: &RingModel, table: &CorrelatorTable, cutoff: &Rational) -> Result<Self, CorrelatorError> {
        let n = model.rank();
        let classes = model.lattice().classes_up_to(cutoff);
        let eta_inv = model.eta_inverse();
        let mut products = vec![vec![QClass::zero(model.lattice().clone(), cutoff.clone()); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut p = QClass::zero(model.lattice().clone(), cutoff.clone());
                for a in 0..n {
                    let t = basis_three_point(model, table, [i, j, a], &classes, cutoff)?;
                    if t.is_zero() {
                        continue;
                    }
                    for (b, eta) in eta_inv[a].iter().enumerate() {
                        if !eta.is_zero() {
                            p.add_term(b, &t.scale(eta));
                        }
                    }
                }
                products[j][i] = p.clone();
                products[i][j] = p;
            }
        }
        Ok(QuantumRing { model: model.clone(), cutoff: cutoff.clone(), products })
    }

    pub fn model(&self) -> &RingModel {
        &self.model
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &QClass {
        &self.products[i][j]
    }

    pub fn basis(&self, i: usize) -> QClass {
        QClass::basis(&self.model, i, self.cutoff.clone())
    }

    pub fn mul(&self, x: &QClass, y: &QClass) -> QClass {
        let mut out = QClass::zero(self.model.lattice().clone(), self.cutoff.clone());
        for (&i, ci) in &x.coeffs {
            for (&j, cj) in &y.coeffs {
                let c = ci.try_mul(cj).expect("shared lattice");
                if !c.is_zero() {
                    out = out.add(&self.products[i][j].mul_scalar(&c));
                }
            }
        }
        out
    }

    pub fn power(&self, x: &QClass, times: usize) -> QClass {
        let mut out = self.basis(self.model.unit_index());
        for _ in 0..times {
            out = self.mul(&out, x);
        }
        out
    }

    pub fn associator(&self, x: &QClass, y: &QClass, z: &QClass) -> QClass {
        self.mul(&self.mul(x, y), z).sub(&self.mul(x, &self.mul(y, z)))
    }

    /// Basis triples `(i, j, k)` with nonzero associator.
    pub fn associativity_failures(&self) -> Vec<(usize, usize, usize, QClass)> {
        let n = self.model.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.associator(&self.basis(i), &self.basis(j), &self.basis(k));
                    if !r.is_zero() {
                        out.push((i, j, k, r));
                    }
                }
            }
        }
        out
    }

    /// Each basis product is homogeneous of degree `deg β_i + deg β_j`.
    pub fn grading_failures(&self) -> Vec<(usize, usize)> {
        let n = self.model.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let want = (self.model.degree(i) + self.model.degree(j)) as i64;
                if self.products[i][j].degrees(&self.model).iter().any(|&d| d != want) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn quantum_product(
    model: &RingModel,
    table: &CorrelatorTable,
    alpha: &CohClass,
    beta: &CohClass,
    cutoff: &Rational,
) -> Result<QClass, CorrelatorError> {
    let ring = QuantumRing::new(model, table, cutoff)?;
    Ok(ring.mul(&QClass::from_coh(model, alpha, cutoff.clone()), &QClass::from_coh(model, beta, cutoff.clone())))
}

pub fn associativity_residual(
    model: &RingModel,
    table: &CorrelatorTable,
    alpha: &CohClass,
    beta: &CohClass,
    gamma: &CohClass,
    cutoff: &Rational,
) -> Result<QClass, CorrelatorError> {
    let ring = QuantumRing::new(model, table, cutoff)?;
    let q = |c: &CohClass| QClass::from_coh(model, c, cutoff.clone());
    Ok(ring.associator(&q(alpha), &q(beta), &q(gamma)))
}

/// WDVV instances `(h, β_{e−1} | β_c, β_e')` with the key's remaining insertions as
/// spectators, for each admissible way of singling out a split insertion `β_e`
/// (`e ≥ 2`). The first instance is the one the solver uses.
pub fn relations_for(key: &CorrelatorKey) -> Vec<([usize; 4], Vec<Insertion>)> {
    let ins = key.insertions();
    let m = ins.len();
    let mut out: Vec<([usize; 4], Vec<Insertion>)> = Vec::new();
    if m < 3 || !key.is_primary() {
        return out;
    }
    let mut splits: Vec<usize> = (0..m).filter(|&p| ins[p].class >= 2).collect();
    splits.reverse();
    for &p in &splits {
        for c in 0..m {
            for e in 0..m {
                if c == p || e == p || e == c {
                    continue;
                }
                let quad = [1, ins[p].class - 1, ins[c].class, ins[e].class];
                let rest: Vec<Insertion> =
                    (0..m).filter(|&i| i != p && i != c && i != e).map(|i| ins[i]).collect();
                if !out.iter().any(|(q, r)| *q == quad && *r == rest) {
                    out.push((quad, rest));
                }
            }
        }
    }
    out
}

/// Value of `key` forced by one of its WDVV instances, treating the key itself as the
/// only unknown and evaluating everything else with `known`. `None` if no instance
/// involves the key with a nonzero coefficient.
pub fn solve_for_key(
    model: &RingModel,
    key: &CorrelatorKey,
    known: &(dyn Fn(&CorrelatorKey) -> Result<Rational, CorrelatorError> + Sync),
) -> Result<Option<Rational>, CorrelatorError> {
    for (quad, rest) in relations_for(key) {
        let at = |x: Rational| {
            move |k: &CorrelatorKey| if k == key { Ok(x.clone()) } else { known(k) }
        };
        let r0 = composition_residual(model, &at(Rational::zero()), quad, &rest, key.class())?;
        let r1 = composition_residual(model, &at(Rational::one()), quad, &rest, key.class())?;
        let coef = r1 - &r0;
        if !coef.is_zero() {
            return Ok(Some(-r0 / coef));
        }
    }
    Ok(None)
}

/// Value forced by the WDVV instance of `key` against a fully solved table.
pub fn wdvv_value(
    model: &RingModel,
    table: &CorrelatorTable,
    key: &CorrelatorKey,
) -> Result<Option<Rational>, CorrelatorError> {
    solve_for_key(model, key, &|k| evaluate(model, table, k))
}

fn descending_sequences(len: usize, lo: usize, hi: usize, sum: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, lo: usize, hi: usize, sum: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if len == 0 {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if sum < lo * len || sum > hi * len {
            return;
        }
        for v in (lo..=hi.min(sum)).rev() {
            prefix.push(v);
            rec(len - 1, lo, v, sum - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if lo <= hi {
        rec(len, lo, hi, sum, &mut Vec::new(), &mut out);
    }
    out
}

/// Reduced primary keys of `P^n` in degree `d` with `k` insertions, in descending
/// lexicographic order.
pub fn reduced_keys(n: usize, d: i64, k: usize) -> Vec<CorrelatorKey> {
    let total = (n as i64 + 1) * d + n as i64 - 3 + k as i64;
    if total < 0 {
        return Vec::new();
    }
    let lo = if k == 3 { 1 } else { 2 };
    descending_sequences(k, lo, n, total as usize)
        .into_iter()
        .map(|seq| CorrelatorKey::primary(CurveClass(vec![d]), &seq))
        .collect()
}

/// `⟨pt, pt, h⟩_line = 1`: the single input datum per projective space.
pub fn seed_key(n: usize) -> CorrelatorKey {
    CorrelatorKey::primary(CurveClass(vec![1]), &[n, n, 1])
}

fn max_degree(model: &RingModel, cutoff: &Rational) -> i64 {
    let w = &model.lattice().energy_weights()[0];
    (cutoff / w).floor().numer().try_into().unwrap_or(i64::MAX)
}

pub fn solve_recursion(model: &RingModel, cutoff: &Rational) -> Result<CorrelatorTable, SolveError> {
    solve_recursion_with(model, cutoff, false)
}

/// Solves every reduced primary genus-0 correlator of `P^n` with energy at most
/// `cutoff`: classes ascending, then insertion count ascending, then keys in
/// descending lexicographic order. The parallel mode solves keys of equal
/// `Σ a_i²` concurrently; such keys never depend on one another.
pub fn solve_recursion_with(model: &RingModel, cutoff: &Rational, parallel: bool) -> Result<CorrelatorTable, SolveError> {
    let n = model.projective_dim().ok_or_else(|| SolveError::Unsupported(model.name().to_string()))?;
    if cutoff < &Rational::zero() {
        return Err(SolveError::BadCutoff);
    }
    let mut table = CorrelatorTable::new(model.name(), cutoff.clone());
    let zero = CurveClass(vec![0]);
    for seq in (0..=n).flat_map(|a| (a..=n).flat_map(move |b| (b..=n).map(move |c| [c, b, a]))) {
        let key = CorrelatorKey::primary(zero.clone(), &seq);
        if dimension_filter(model, &key) {
            let v = classical_eval(model, &key)?;
            table.insert(key, v, Provenance::Classical);
        }
    }
    let max_d = max_degree(model, cutoff);
    if max_d < 1 {
        return Ok(table);
    }
    table.insert(seed_key(n), Rational::one(), Provenance::User);
    for d in 1..=max_d {
        let span = (n as i64 + 1) * d + n as i64 - 3;
        for k in 3..=(span.max(3) as usize) {
            let keys: Vec<CorrelatorKey> =
                reduced_keys(n, d, k).into_iter().filter(|key| table.get(key).is_none()).collect();
            if parallel {
                let mut groups: BTreeMap<std::cmp::Reverse<usize>, Vec<CorrelatorKey>> = BTreeMap::new();
                for key in keys {
                    let s: usize = key.insertions().iter().map(|i| i.class * i.class).sum();
                    groups.entry(std::cmp::Reverse(s)).or_default().push(key);
                }
                for (_, group) in groups {
                    let snapshot = &table;
                    let solved: Vec<Result<(CorrelatorKey, Rational), SolveError>> = group
                        .into_par_iter()
                        .map(|key| solve_one(model, snapshot, &key).map(|v| (key, v)))
                        .collect();
                    for r in solved {
                        let (key, v) = r?;
                        table.insert(key, v, Provenance::Solved);
                    }
                }
            } else {
                for key in keys {
                    let v = solve_one(model, &table, &key)?;
                    table.insert(key, v, Provenance::Solved);
                }
            }
        }
    }
    Ok(table)
}

fn solve_one(model: &RingModel, table: &CorrelatorTable, key: &CorrelatorKey) -> Result<Rational, SolveError> {
    let stuck = || SolveError::NotTriangular(key.render(model));
    let first = relations_for(key).into_iter().next().ok_or_else(stuck)?;
    let known = |k: &CorrelatorKey| evaluate_with(model, k, &|x| table.get(x).cloned());
    let at = |x: Rational| move |k: &CorrelatorKey| if k == key { Ok(x.clone()) } else { known(k) };
    let residual = |x: Rational| match composition_residual(model, &at(x), first.0, &first.1, key.class()) {
        Err(CorrelatorError::Missing(_)) => Err(stuck()),
        other => other.map_err(SolveError::from),
    };
    let r0 = residual(Rational::zero())?;
    let coef = residual(Rational::one())? - &r0;
    if coef.is_zero() {
        return Err(stuck());
    }
    Ok(-r0 / coef)
}

/// Table degree reachable for a rank-one model.
pub fn table_degree(model: &RingModel, table: &CorrelatorTable) -> i64 {
    max_degree(model, table.cutoff())
}

/// `N_d = ⟨pt^{3d−1}⟩_d` for the plane, `d = 1..=max_d`; `N_1` is read from the seed.
pub fn kontsevich_from_table(
    model: &RingModel,
    table: &CorrelatorTable,
    max_d: i64,
) -> Result<Vec<Rational>, SolveError> {
    if model.projective_dim() != Some(2) {
        return Err(SolveError::Unsupported(model.name().to_string()));
    }
    let have = table_degree(model, table);
    if max_d > have {
        return Err(SolveError::CutoffInsufficient { need: max_d, have });
    }
    let mut out = Vec::new();
    for d in 1..=max_d {
        let key = if d == 1 {
            seed_key(2)
        } else {
            CorrelatorKey::primary(CurveClass(vec![d]), &vec![2; 3 * d as usize - 1])
        };
        let v = evaluate(model, table, &key)?;
        out.push(v);
    }
    Ok(out)
}

pub fn kontsevich_numbers(max_d: i64, parallel: bool) -> Result<Vec<Rational>, SolveError> {
    let model = build_pn(2, Rational::one()).expect("plane model");
    let table = solve_recursion_with(&model, &int(max_d.max(0)), parallel)?;
    kontsevich_from_table(&model, &table, max_d)
}
