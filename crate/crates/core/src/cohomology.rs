//! Graded ring models of even cohomology with cup structure constants.
//! Each model also carries its intersection pairing together with the diagonal class.
//!
//! Degrees are real (topological) degrees. Only even degrees are accepted, so the
//! cup product is commutative and correlators are fully symmetric.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational, RationalRepr};
use crate::novikov::{ClassLattice, CurveClass, NovikovError};

pub const MODEL_SCHEMA: &str = "qhforge.model/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("degenerate pairing")]
    DegeneratePairing,
    #[error("unknown model {0:?} (built-ins: P1, P2, P3, Pn, PmxPn)")]
    UnknownModel(String),
    #[error("projective space needs dimension at least 1, got {0}")]
    BadDimension(usize),
    #[error("invalid ring model: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] NovikovError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisClass {
    pub label: String,
    /// Real degree; always even.
    pub degree: u32,
}

/// Cohomology class as coefficients on basis positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CohClass(BTreeMap<usize, Rational>);

impl CohClass {
    pub fn zero() -> Self {
        CohClass(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        CohClass::from_pairs([(i, Rational::one())])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut out = CohClass::zero();
        for (i, c) in pairs {
            out.add_term(i, c);
        }
        out
    }

    pub fn add_term(&mut self, i: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, Rational> {
        &self.0
    }

    pub fn coefficient(&self, i: usize) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &CohClass) -> CohClass {
        let mut out = self.clone();
        for (&i, c) in &other.0 {
            out.add_term(i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CohClass) -> CohClass {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> CohClass {
        CohClass::from_pairs(self.0.iter().map(|(&i, c)| (i, c * k)))
    }

    /// Real degree when homogeneous; zero is homogeneous of every degree and reports `None`.
    pub fn degree(&self, model: &RingModel) -> Option<u32> {
        let mut it = self.0.keys().map(|&i| model.basis[i].degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self, model: &RingModel) -> bool {
        self.is_zero() || self.degree(model).is_some()
    }
}

/// Graded ring model of `H^{even}(V; Q)` together with its curve-class lattice.
#[derive(Debug, Clone)]
pub struct RingModel {
    name: String,
    complex_dim: usize,
    basis: Vec<BasisClass>,
    /// `cup[a][b]` is `β_a ∪ β_b` in the basis.
    cup: Vec<Vec<CohClass>>,
    pairing: Vec<Vec<Rational>>,
    pairing_inv: Vec<Vec<Rational>>,
    unit: usize,
    point: usize,
    divisors: Vec<usize>,
    lattice: Arc<ClassLattice>,
    /// `divisor_pairing[i][j]` = `D_i · A_j` for the i-th divisor and j-th lattice generator.
    divisor_pairing: Vec<Vec<Rational>>,
}

impl PartialEq for RingModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.basis == other.basis
            && self.cup == other.cup
            && self.lattice == other.lattice
            && self.divisor_pairing == other.divisor_pairing
    }
}

impl RingModel {
    /// Validates and assembles a model. The pairing is read off the cup product as
    /// the coefficient of the point class.
    pub fn new(
        name: impl Into<String>,
        complex_dim: usize,
        basis: Vec<BasisClass>,
        cup: Vec<Vec<CohClass>>,
        unit: usize,
        point: usize,
        lattice: ClassLattice,
        divisor_pairing: BTreeMap<usize, Vec<Rational>>,
    ) -> Result<Self, ModelError> {
        let invalid = |s: String| Err(ModelError::Invalid(s));
        let n = basis.len();
        if n == 0 {
            return invalid("empty basis".into());
        }
        if let Some(b) = basis.iter().find(|b| b.degree % 2 != 0) {
            return invalid(format!("class {} has odd degree {}", b.label, b.degree));
        }
        if let Some(b) = basis.iter().find(|b| b.degree as usize > 2 * complex_dim) {
            return invalid(format!("class {} exceeds top degree", b.label));
        }
        if unit >= n || point >= n {
            return invalid("unit or point index out of range".into());
        }
        if basis[unit].degree != 0 || basis[point].degree as usize != 2 * complex_dim {
            return invalid("unit must have degree 0 and point the top degree".into());
        }
        if basis.iter().filter(|b| b.degree as usize == 2 * complex_dim).count() != 1 {
            return invalid("top-degree cohomology must be spanned by the point class".into());
        }
        if cup.len() != n || cup.iter().any(|row| row.len() != n) {
            return invalid("cup table has wrong shape".into());
        }
        for a in 0..n {
            for b in 0..n {
                let prod = &cup[a][b];
                if prod.coefficients().keys().any(|&c| c >= n) {
                    return invalid(format!("cup[{a}][{b}] refers to a missing class"));
                }
                let want = basis[a].degree + basis[b].degree;
                if prod.coefficients().keys().any(|&c| basis[c].degree != want) {
                    return invalid(format!("cup[{a}][{b}] is not of degree {want}"));
                }
                if prod != &cup[b][a] {
                    return invalid(format!("cup product not commutative on ({a},{b})"));
                }
            }
            if cup[unit][a] != CohClass::basis(a) {
                return invalid(format!("class {a} is not fixed by the unit"));
            }
        }
        let mul = |x: &CohClass, y: &CohClass| {
            let mut out = CohClass::zero();
            for (&i, ci) in x.coefficients() {
                for (&j, cj) in y.coefficients() {
                    out = out.add(&cup[i][j].scale(&(ci * cj)));
                }
            }
            out
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let left = mul(&cup[a][b], &CohClass::basis(c));
                    let right = mul(&CohClass::basis(a), &cup[b][c]);
                    if left != right {
                        return invalid(format!("cup product not associative on ({a},{b},{c})"));
                    }
                }
            }
        }
        let pairing: Vec<Vec<Rational>> =
            (0..n).map(|a| (0..n).map(|b| cup[a][b].coefficient(point)).collect()).collect();
        let pairing_inv = eta_inverse_of(&pairing)?;

        let divisors: Vec<usize> = (0..n).filter(|&i| basis[i].degree == 2).collect();
        let mut dp = Vec::with_capacity(divisors.len());
        for d in &divisors {
            let values = divisor_pairing
                .get(d)
                .cloned()
                .ok_or_else(|| ModelError::Invalid(format!("missing curve pairing for divisor {}", basis[*d].label)))?;
            if values.len() != lattice.rank() {
                return invalid(format!("divisor {} pairing has wrong length", basis[*d].label));
            }
            dp.push(values);
        }
        if divisor_pairing.keys().any(|k| !divisors.contains(k)) {
            return invalid("curve pairing given for a class that is not a divisor".into());
        }
        Ok(RingModel {
            name: name.into(),
            complex_dim,
            basis,
            cup,
            pairing,
            pairing_inv,
            unit,
            point,
            divisors,
            lattice: Arc::new(lattice),
            divisor_pairing: dp,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn point_index(&self) -> usize {
        self.point
    }

    pub fn divisor_indices(&self) -> &[usize] {
        &self.divisors
    }

    pub fn is_divisor(&self, i: usize) -> bool {
        self.basis[i].degree == 2
    }

    pub fn lattice(&self) -> &Arc<ClassLattice> {
        &self.lattice
    }

    pub fn pairing(&self) -> &[Vec<Rational>] {
        &self.pairing
    }

    /// `η^{ab}`, computed and checked at construction.
    pub fn eta_inverse(&self) -> &[Vec<Rational>] {
        &self.pairing_inv
    }

    pub fn cup_basis(&self, a: usize, b: usize) -> &CohClass {
        &self.cup[a][b]
    }

    pub fn cup(&self, x: &CohClass, y: &CohClass) -> CohClass {
        let mut out = CohClass::zero();
        for (&i, ci) in x.coefficients() {
            for (&j, cj) in y.coefficients() {
                out = out.add(&self.cup[i][j].scale(&(ci * cj)));
            }
        }
        out
    }

    /// Evaluation against the fundamental class.
    pub fn integrate(&self, c: &CohClass) -> Rational {
        c.coefficient(self.point)
    }

    /// `δ* = Σ η^{ab} β_a ⊗ β_b` as its nonzero `(a, b, η^{ab})` triples.
    pub fn diagonal_class(&self) -> Vec<(usize, usize, Rational)> {
        let n = self.rank();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.pairing_inv[a][b].is_zero() {
                    out.push((a, b, self.pairing_inv[a][b].clone()));
                }
            }
        }
        out
    }

    /// `D · A` for a degree-2 basis class.
    pub fn divisor_pairing(&self, divisor: usize, class: &CurveClass) -> Option<Rational> {
        let pos = self.divisors.iter().position(|&d| d == divisor)?;
        Some(
            self.divisor_pairing[pos]
                .iter()
                .zip(class.coords())
                .map(|(v, &c)| v * Rational::from_integer(c.into()))
                .fold(Rational::zero(), |a, b| a + b),
        )
    }

    /// The complex dimension `n` when this is the standard model of `P^n`.
    pub fn projective_dim(&self) -> Option<usize> {
        let n = self.complex_dim;
        if self.rank() != n + 1 || self.unit != 0 || self.point != n {
            return None;
        }
        if self.basis.iter().enumerate().any(|(i, b)| b.degree as usize != 2 * i) {
            return None;
        }
        for i in 0..=n {
            for j in 0..=n {
                let want = if i + j <= n { CohClass::basis(i + j) } else { CohClass::zero() };
                if self.cup[i][j] != want {
                    return None;
                }
            }
        }
        let lat = &self.lattice;
        if lat.rank() != 1 || lat.chern_values()[0] != n as i64 + 1 {
            return None;
        }
        let line = lat.generator(0);
        if n >= 1 && self.divisor_pairing(1, &line) != Some(Rational::one()) {
            return None;
        }
        Some(n)
    }

    pub fn to_file(&self) -> ModelFile {
        let mut cup = Vec::new();
        for a in 0..self.rank() {
            for b in a..self.rank() {
                for (&c, v) in self.cup[a][b].coefficients() {
                    cup.push(CupEntry { a, b, c, value: v.into() });
                }
            }
        }
        ModelFile {
            schema: MODEL_SCHEMA.to_string(),
            name: self.name.clone(),
            complex_dim: self.complex_dim,
            basis: self.basis.clone(),
            cup,
            unit: self.unit,
            point: self.point,
            lattice: LatticeFile {
                energy: self.lattice.energy_weights().iter().map(RationalRepr::from).collect(),
                chern: self.lattice.chern_values().to_vec(),
            },
            divisor_pairing: self
                .divisors
                .iter()
                .zip(&self.divisor_pairing)
                .map(|(&d, v)| DivisorPairing { divisor: d, values: v.iter().map(RationalRepr::from).collect() })
                .collect(),
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        if file.schema != MODEL_SCHEMA {
            return Err(ModelError::Invalid(format!("unsupported schema {:?}", file.schema)));
        }
        let n = file.basis.len();
        let mut cup = vec![vec![CohClass::zero(); n]; n];
        for e in &file.cup {
            if e.a >= n || e.b >= n || e.c >= n {
                return Err(ModelError::Invalid(format!("cup entry ({}, {}, {}) out of range", e.a, e.b, e.c)));
            }
            let v = e.value.to_rational().map_err(|x| ModelError::Invalid(x.to_string()))?;
            cup[e.a][e.b].add_term(e.c, v.clone());
            if e.a != e.b {
                cup[e.b][e.a].add_term(e.c, v);
            }
        }
        let rat = |r: &RationalRepr| r.to_rational().map_err(|x| ModelError::Invalid(x.to_string()));
        let energy = file.lattice.energy.iter().map(rat).collect::<Result<Vec<_>, _>>()?;
        let lattice = ClassLattice::new(energy, file.lattice.chern.clone())?;
        let mut dp = BTreeMap::new();
        for d in &file.divisor_pairing {
            dp.insert(d.divisor, d.values.iter().map(rat).collect::<Result<Vec<_>, _>>()?);
        }
        RingModel::new(file.name.clone(), file.complex_dim, file.basis.clone(), cup, file.unit, file.point, lattice, dp)
    }
}

impl fmt::Display for RingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.basis.iter().map(|b| b.label.as_str()).collect();
        write!(f, "{} (dim_C {}, basis {})", self.name, self.complex_dim, labels.join(", "))
    }
}

/// Inverse of an intersection matrix; singular input is a degenerate pairing.
pub fn eta_inverse_of(pairing: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, ModelError> {
    exact::invert_matrix(pairing).map_err(|_| ModelError::DegeneratePairing)
}

/// Standard model of complex projective `n`-space: basis `1, h, …, h^n`, one curve
/// generator (the line) with energy `energy_weight` and `c_1 = n + 1`.
pub fn build_pn(n: usize, energy_weight: Rational) -> Result<RingModel, ModelError> {
    if n < 1 {
        return Err(ModelError::BadDimension(n));
    }
    let basis = (0..=n)
        .map(|i| BasisClass {
            label: match i {
                0 => "1".to_string(),
                1 => "h".to_string(),
                _ => format!("h^{i}"),
            },
            degree: 2 * i as u32,
        })
        .collect();
    let cup = (0..=n)
        .map(|i| (0..=n).map(|j| if i + j <= n { CohClass::basis(i + j) } else { CohClass::zero() }).collect())
        .collect();
    let lattice = ClassLattice::new(vec![energy_weight], vec![n as i64 + 1])?;
    let dp = BTreeMap::from([(1usize, vec![Rational::one()])]);
    RingModel::new(format!("P{n}"), n, basis, cup, 0, n, lattice, dp)
}

/// Graded tensor product model with the direct-sum curve lattice.
pub fn build_product(x: &RingModel, y: &RingModel) -> Result<RingModel, ModelError> {
    let (nx, ny) = (x.rank(), y.rank());
    let idx = |i: usize, j: usize| i * ny + j;
    let mut basis = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            basis.push(BasisClass {
                label: format!("{}⊗{}", x.label(i), y.label(j)),
                degree: x.degree(i) + y.degree(j),
            });
        }
    }
    let mut cup = vec![vec![CohClass::zero(); nx * ny]; nx * ny];
    for i1 in 0..nx {
        for j1 in 0..ny {
            for i2 in 0..nx {
                for j2 in 0..ny {
                    let mut prod = CohClass::zero();
                    for (&a, ca) in x.cup_basis(i1, i2).coefficients() {
                        for (&b, cb) in y.cup_basis(j1, j2).coefficients() {
                            prod.add_term(idx(a, b), ca * cb);
                        }
                    }
                    cup[idx(i1, j1)][idx(i2, j2)] = prod;
                }
            }
        }
    }
    let energy: Vec<Rational> =
        x.lattice.energy_weights().iter().chain(y.lattice.energy_weights()).cloned().collect();
    let chern: Vec<i64> = x.lattice.chern_values().iter().chain(y.lattice.chern_values()).cloned().collect();
    let lattice = ClassLattice::new(energy, chern)?;
    let (rx, ry) = (x.lattice.rank(), y.lattice.rank());
    let mut dp = BTreeMap::new();
    for (pos, &d) in x.divisors.iter().enumerate() {
        let mut v = x.divisor_pairing[pos].clone();
        v.extend(std::iter::repeat_n(Rational::zero(), ry));
        dp.insert(idx(d, y.unit), v);
    }
    for (pos, &d) in y.divisors.iter().enumerate() {
        let mut v = vec![Rational::zero(); rx];
        v.extend(y.divisor_pairing[pos].iter().cloned());
        dp.insert(idx(x.unit, d), v);
    }
    RingModel::new(
        format!("{}x{}", x.name, y.name),
        x.complex_dim + y.complex_dim,
        basis,
        cup,
        idx(x.unit, y.unit),
        idx(x.point, y.point),
        lattice,
        dp,
    )
}

/// Built-in models by name: `P<n>` and `P<m>xP<n>`, all with unit energy weights.
pub fn builtin(name: &str) -> Result<RingModel, ModelError> {
    let unknown = || ModelError::UnknownModel(name.to_string());
    let pn = |s: &str| -> Result<RingModel, ModelError> {
        let n: usize = s.strip_prefix('P').ok_or_else(unknown)?.parse().map_err(|_| unknown())?;
        if !(1..=12).contains(&n) {
            return Err(unknown());
        }
        build_pn(n, Rational::one())
    };
    match name.split_once('x') {
        Some((a, b)) => build_product(&pn(a)?, &pn(b)?),
        None => pn(name),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: RationalRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub energy: Vec<RationalRepr>,
    pub chern: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorPairing {
    pub divisor: usize,
    pub values: Vec<RationalRepr>,
}

/// On-disk ring model. Cup entries with `a ≤ b` suffice; the product is symmetrized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: String,
    pub name: String,
    pub complex_dim: usize,
    pub basis: Vec<BasisClass>,
    pub cup: Vec<CupEntry>,
    pub unit: usize,
    pub point: usize,
    pub lattice: LatticeFile,
    pub divisor_pairing: Vec<DivisorPairing>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn p(n: usize) -> RingModel {
        build_pn(n, int(1)).unwrap()
    }

    #[test]
    fn sphere_model() {
        let m = p(1);
        let degrees: Vec<u32> = m.basis().iter().map(|b| b.degree).collect();
        assert_eq!(degrees, vec![0, 2]);
        assert_eq!(m.pairing(), &[vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(m.eta_inverse(), &[vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(m.diagonal_class(), vec![(0, 1, int(1)), (1, 0, int(1))]);
    }

    #[test]
    fn plane_model() {
        let m = p(2);
        assert_eq!(m.cup_basis(1, 1), &CohClass::basis(2));
        assert!(m.cup_basis(1, 2).is_zero());
        assert_eq!(m.lattice().chern(&m.lattice().generator(0)), 3);
        let anti: Vec<Vec<Rational>> =
            (0..3).map(|a| (0..3).map(|b| if a + b == 2 { int(1) } else { int(0) }).collect()).collect();
        assert_eq!(m.eta_inverse(), anti.as_slice());
        assert_eq!(m.diagonal_class(), vec![(0, 2, int(1)), (1, 1, int(1)), (2, 0, int(1))]);
        assert_eq!(m.integrate(&CohClass::basis(2)), int(1));
        assert_eq!(m.integrate(&CohClass::basis(1)), int(0));
        assert_eq!(m.integrate(&CohClass::basis(2).scale(&int(5))), int(5));
        assert_eq!(m.projective_dim(), Some(2));
    }

    #[test]
    fn degenerate_pairing_and_bad_dimension() {
        let z = vec![vec![int(0); 2]; 2];
        assert_eq!(eta_inverse_of(&z), Err(ModelError::DegeneratePairing));
        assert_eq!(build_pn(0, int(1)).unwrap_err(), ModelError::BadDimension(0));
    }

    #[test]
    fn dual_basis_contraction() {
        for m in [p(1), p(2), p(3), builtin("P1xP1").unwrap(), builtin("P1xP2").unwrap()] {
            for g in 0..m.rank() {
                let gamma = CohClass::basis(g);
                let mut back = CohClass::zero();
                for (a, b, eta) in m.diagonal_class() {
                    let c = m.integrate(&m.cup(&CohClass::basis(b), &gamma));
                    back.add_term(a, eta * c);
                }
                assert_eq!(back, gamma, "{}", m.name());
            }
        }
    }

    #[test]
    fn cup_laws_and_degree_filter() {
        for m in [p(3), builtin("P1xP1").unwrap()] {
            let n = m.rank();
            for a in 0..n {
                for b in 0..n {
                    let prod = m.cup_basis(a, b);
                    if !prod.is_zero() {
                        assert_eq!(prod.degree(&m), Some(m.degree(a) + m.degree(b)));
                    }
                    for c in 0..n {
                        let l = m.cup(prod, &CohClass::basis(c));
                        let r = m.cup(&CohClass::basis(a), m.cup_basis(b, c));
                        assert_eq!(l, r);
                    }
                }
                assert_eq!(m.cup(&CohClass::basis(m.unit_index()), &CohClass::basis(a)), CohClass::basis(a));
            }
        }
    }

    #[test]
    fn product_model_structure() {
        let m = builtin("P1xP1").unwrap();
        assert_eq!(m.rank(), 4);
        assert_eq!(m.divisor_indices(), &[1, 2]);
        assert_eq!(m.projective_dim(), None);
        let cls = CurveClass(vec![2, 3]);
        assert_eq!(m.divisor_pairing(2, &cls), Some(int(2)));
        assert_eq!(m.divisor_pairing(1, &cls), Some(int(3)));
        assert_eq!(m.lattice().chern(&cls), 10);
    }

    #[test]
    fn file_roundtrip_and_rejects_bad_models() {
        let m = builtin("P1xP2").unwrap();
        let json = serde_json::to_string(&m.to_file()).unwrap();
        let back = RingModel::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);

        let mut f = p(2).to_file();
        f.basis[1].degree = 3;
        assert!(matches!(RingModel::from_file(&f), Err(ModelError::Invalid(_))));
        let mut f = p(2).to_file();
        f.cup.retain(|e| !(e.a == 1 && e.b == 1));
        assert!(RingModel::from_file(&f).is_err());
        assert!(matches!(builtin("Q2"), Err(ModelError::UnknownModel(_))));
    }
}
