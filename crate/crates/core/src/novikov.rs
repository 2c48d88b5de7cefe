//! Truncated Novikov ring over a finitely generated effective curve-class monoid.
//!
//! An element is a finite sum `Σ λ_A e^A` with exact rational coefficients. Every
//! element carries an energy cutoff; terms whose class has energy above the cutoff
//! are discarded, and binary operations work at the smaller of the two cutoffs.
//! This makes the finiteness condition of the completed ring decidable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational, RationalRepr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NovikovError {
    #[error("curve-class lattices do not match (rank {left} vs {right})")]
    LatticeMismatch { left: usize, right: usize },
    #[error("class {class:?} has {got} coordinates, lattice rank is {rank}")]
    ClassRank { class: Vec<i64>, got: usize, rank: usize },
    #[error("not a unit at this valuation: energy-0 coefficient is zero")]
    NotAUnit,
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid coefficient: {0}")]
    Coefficient(String),
}

/// Coordinates of a second-homology class in the lattice's fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Effective means every coordinate is nonnegative.
    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        debug_assert_eq!(self.rank(), other.rank());
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CurveClass) -> CurveClass {
        debug_assert_eq!(self.rank(), other.rank());
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> CurveClass {
        CurveClass(self.0.iter().map(|a| a * k).collect())
    }

    /// All effective classes `B` with `B ≤ self` coordinatewise.
    pub fn effective_parts(&self) -> Vec<CurveClass> {
        let mut out = vec![Vec::with_capacity(self.rank())];
        for &c in &self.0 {
            let mut next = Vec::new();
            for prefix in &out {
                for v in 0..=c.max(0) {
                    let mut p: Vec<i64> = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(CurveClass).collect()
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Basis data of the curve-class lattice: a positive energy weight `ω(A_j)` and a
/// first Chern pairing `C_1(A_j)` per generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLattice {
    energy: Vec<Rational>,
    chern: Vec<i64>,
}

impl ClassLattice {
    pub fn new(energy: Vec<Rational>, chern: Vec<i64>) -> Result<Self, NovikovError> {
        if energy.len() != chern.len() {
            return Err(NovikovError::InvalidLattice(format!(
                "{} energy weights but {} chern values",
                energy.len(),
                chern.len()
            )));
        }
        if let Some(w) = energy.iter().find(|w| !w.is_positive()) {
            return Err(NovikovError::InvalidLattice(format!(
                "energy weight {} is not positive",
                exact::render(w)
            )));
        }
        Ok(ClassLattice { energy, chern })
    }

    pub fn rank(&self) -> usize {
        self.energy.len()
    }

    pub fn energy_weights(&self) -> &[Rational] {
        &self.energy
    }

    pub fn chern_values(&self) -> &[i64] {
        &self.chern
    }

    pub fn energy(&self, class: &CurveClass) -> Rational {
        class
            .0
            .iter()
            .zip(&self.energy)
            .map(|(&c, w)| w * Rational::from_integer(c.into()))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn chern(&self, class: &CurveClass) -> i64 {
        class.0.iter().zip(&self.chern).map(|(c, w)| c * w).sum()
    }

    pub fn zero_class(&self) -> CurveClass {
        CurveClass::zero(self.rank())
    }

    pub fn generator(&self, i: usize) -> CurveClass {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        CurveClass(c)
    }

    pub fn check_class(&self, class: &CurveClass) -> Result<(), NovikovError> {
        if class.rank() != self.rank() {
            return Err(NovikovError::ClassRank {
                class: class.0.clone(),
                got: class.rank(),
                rank: self.rank(),
            });
        }
        Ok(())
    }

    /// Effective classes with energy at most `cutoff`, ordered by (energy, coords).
    pub fn classes_up_to(&self, cutoff: &Rational) -> Vec<CurveClass> {
        let mut out = Vec::new();
        let mut current = vec![0i64; self.rank()];
        self.collect_classes(0, &mut current, &Rational::zero(), cutoff, &mut out);
        out.sort_by(|a, b| self.energy(a).cmp(&self.energy(b)).then_with(|| a.cmp(b)));
        out
    }

    fn collect_classes(
        &self,
        pos: usize,
        current: &mut Vec<i64>,
        used: &Rational,
        cutoff: &Rational,
        out: &mut Vec<CurveClass>,
    ) {
        if pos == self.rank() {
            out.push(CurveClass(current.clone()));
            return;
        }
        let mut used_here = used.clone();
        let mut v = 0;
        while &used_here <= cutoff {
            current[pos] = v;
            self.collect_classes(pos + 1, current, &used_here, cutoff, out);
            used_here += &self.energy[pos];
            v += 1;
        }
        current[pos] = 0;
    }
}

/// Finite truncated element of the Novikov ring.
#[derive(Debug, Clone)]
pub struct NovikovElement {
    lattice: Arc<ClassLattice>,
    terms: BTreeMap<CurveClass, Rational>,
    cutoff: Rational,
}

impl PartialEq for NovikovElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.cutoff == other.cutoff && self.lattice == other.lattice
    }
}

impl Eq for NovikovElement {}

impl NovikovElement {
    pub fn zero(lattice: Arc<ClassLattice>, cutoff: Rational) -> Self {
        NovikovElement { lattice, terms: BTreeMap::new(), cutoff }
    }

    pub fn scalar(lattice: Arc<ClassLattice>, cutoff: Rational, c: Rational) -> Self {
        let zero = lattice.zero_class();
        Self::from_terms(lattice, cutoff, [(zero, c)]).expect("zero class always fits")
    }

    pub fn one(lattice: Arc<ClassLattice>, cutoff: Rational) -> Self {
        Self::scalar(lattice, cutoff, Rational::one())
    }

    pub fn monomial(
        lattice: Arc<ClassLattice>,
        cutoff: Rational,
        class: CurveClass,
        c: Rational,
    ) -> Result<Self, NovikovError> {
        Self::from_terms(lattice, cutoff, [(class, c)])
    }

    /// Builds an element from (class, coefficient) pairs; repeated classes are summed,
    /// zero coefficients pruned and terms above the cutoff dropped.
    pub fn from_terms(
        lattice: Arc<ClassLattice>,
        cutoff: Rational,
        terms: impl IntoIterator<Item = (CurveClass, Rational)>,
    ) -> Result<Self, NovikovError> {
        let mut out = NovikovElement::zero(lattice, cutoff);
        for (class, c) in terms {
            out.lattice.check_class(&class)?;
            if out.lattice.energy(&class) > out.cutoff {
                continue;
            }
            out.accumulate(class, c);
        }
        Ok(out)
    }

    fn accumulate(&mut self, class: CurveClass, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(class) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn lattice(&self) -> &Arc<ClassLattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn terms(&self) -> &BTreeMap<CurveClass, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, class: &CurveClass) -> Rational {
        self.terms.get(class).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `e^0`.
    pub fn unit_part(&self) -> Rational {
        self.coefficient(&self.lattice.zero_class())
    }

    /// Smallest energy among stored terms; `None` for zero.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().map(|c| self.lattice.energy(c)).min()
    }

    pub fn is_unit(&self) -> bool {
        !self.unit_part().is_zero() && self.valuation().is_some_and(|v| !v.is_negative())
    }

    fn check_compatible(&self, other: &Self) -> Result<Rational, NovikovError> {
        if self.lattice != other.lattice {
            return Err(NovikovError::LatticeMismatch {
                left: self.lattice.rank(),
                right: other.lattice.rank(),
            });
        }
        Ok(self.cutoff.clone().min(other.cutoff.clone()))
    }

    /// Discards terms above a (lower) cutoff.
    pub fn truncate(&self, cutoff: &Rational) -> Self {
        let cutoff = cutoff.clone().min(self.cutoff.clone());
        let terms = self
            .terms
            .iter()
            .filter(|(c, _)| self.lattice.energy(c) <= cutoff)
            .map(|(c, v)| (c.clone(), v.clone()))
            .collect();
        NovikovElement { lattice: self.lattice.clone(), terms, cutoff }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, NovikovError> {
        let cutoff = self.check_compatible(other)?;
        let mut out = self.truncate(&cutoff);
        for (c, v) in &other.terms {
            if self.lattice.energy(c) <= cutoff {
                out.accumulate(c.clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        NovikovElement {
            lattice: self.lattice.clone(),
            terms: self.terms.iter().map(|(c, v)| (c.clone(), -v)).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, NovikovError> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return NovikovElement::zero(self.lattice.clone(), self.cutoff.clone());
        }
        NovikovElement {
            lattice: self.lattice.clone(),
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v * k)).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    /// Convolution over class addition, truncated at the smaller cutoff.
    pub fn try_mul(&self, other: &Self) -> Result<Self, NovikovError> {
        let cutoff = self.check_compatible(other)?;
        let mut out = NovikovElement::zero(self.lattice.clone(), cutoff.clone());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let c = a.add(b);
                if self.lattice.energy(&c) <= cutoff {
                    out.accumulate(c, x * y);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by the monomial `e^class`.
    pub fn shift(&self, class: &CurveClass) -> Result<Self, NovikovError> {
        let m = NovikovElement::monomial(self.lattice.clone(), self.cutoff.clone(), class.clone(), Rational::one())?;
        self.try_mul(&m)
    }

    /// Geometric-series inverse `c⁻¹ Σ (−n)^j` of `a = c(1 + n)`, truncated at the cutoff.
    pub fn invert(&self) -> Result<Self, NovikovError> {
        if !self.is_unit() {
            return Err(NovikovError::NotAUnit);
        }
        let c = self.unit_part();
        let c_inv = c.recip();
        let zero = self.lattice.zero_class();
        // n = a/c - 1, all of positive energy
        let mut nilp = self.scale(&c_inv);
        nilp.terms.remove(&zero);
        let minus_n = nilp.neg();
        let mut sum = NovikovElement::one(self.lattice.clone(), self.cutoff.clone());
        let mut power = sum.clone();
        loop {
            power = power.try_mul(&minus_n)?;
            if power.is_zero() {
                break;
            }
            sum = sum.try_add(&power)?;
        }
        Ok(sum.scale(&c_inv))
    }

    /// `2·c_1(A)` shared by every term; `None` when the element is inhomogeneous.
    pub fn degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(|c| 2 * self.lattice.chern(c));
        match degrees.next() {
            None => Some(0),
            Some(d) => degrees.all(|e| e == d).then_some(d),
        }
    }

    pub fn to_repr(&self) -> Vec<NovikovTermRepr> {
        self.terms
            .iter()
            .map(|(c, v)| NovikovTermRepr { coords: c.0.clone(), value: v.into() })
            .collect()
    }

    pub fn from_repr(
        lattice: Arc<ClassLattice>,
        cutoff: Rational,
        terms: &[NovikovTermRepr],
    ) -> Result<Self, NovikovError> {
        let parsed = terms
            .iter()
            .map(|t| {
                let v = t.value.to_rational().map_err(|e| NovikovError::Coefficient(e.to_string()))?;
                Ok((CurveClass(t.coords.clone()), v))
            })
            .collect::<Result<Vec<_>, NovikovError>>()?;
        Self::from_terms(lattice, cutoff, parsed)
    }
}

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, v)| {
                if c.is_zero() {
                    exact::render(v)
                } else if v.is_one() {
                    format!("q^{c}")
                } else {
                    format!("{}·q^{c}", exact::render(v))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `{coords, num, den}` record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovTermRepr {
    pub coords: Vec<i64>,
    #[serde(flatten)]
    pub value: RationalRepr,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, int};
    use proptest::prelude::*;

    fn line_lattice() -> Arc<ClassLattice> {
        Arc::new(ClassLattice::new(vec![int(1)], vec![3]).unwrap())
    }

    fn el(lat: &Arc<ClassLattice>, cutoff: i64, terms: &[(i64, i64)]) -> NovikovElement {
        NovikovElement::from_terms(
            lat.clone(),
            int(cutoff),
            terms.iter().map(|&(d, c)| (CurveClass(vec![d]), int(c))),
        )
        .unwrap()
    }

    #[test]
    fn add_examples() {
        let lat = line_lattice();
        assert_eq!(el(&lat, 5, &[(0, 2)]).try_add(&el(&lat, 5, &[(0, 3)])).unwrap(), el(&lat, 5, &[(0, 5)]));
        let cancelled = el(&lat, 5, &[(0, 1), (1, 1)]).try_add(&el(&lat, 5, &[(1, -1)])).unwrap();
        assert_eq!(cancelled, el(&lat, 5, &[(0, 1)]));
        assert_eq!(cancelled.terms().len(), 1);
        // e^L + e^M with M above the cutoff
        let s = el(&lat, 1, &[(1, 1)]).try_add(&el(&lat, 10, &[(2, 1)])).unwrap();
        assert_eq!(s, el(&lat, 1, &[(1, 1)]));
    }

    #[test]
    fn mismatched_lattice() {
        let a = el(&line_lattice(), 3, &[(0, 1)]);
        let other = Arc::new(ClassLattice::new(vec![int(1), int(1)], vec![2, 2]).unwrap());
        let b = NovikovElement::one(other, int(3));
        assert!(matches!(a.try_add(&b), Err(NovikovError::LatticeMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(NovikovError::LatticeMismatch { .. })));
    }

    #[test]
    fn mul_examples() {
        let lat = line_lattice();
        assert_eq!(el(&lat, 9, &[(1, 1)]).try_mul(&el(&lat, 9, &[(2, 1)])).unwrap(), el(&lat, 9, &[(3, 1)]));
        let p = el(&lat, 2, &[(0, 1), (1, 1)]).try_mul(&el(&lat, 2, &[(0, 1), (1, -1)])).unwrap();
        assert_eq!(p, el(&lat, 2, &[(0, 1), (2, -1)]));
        let p = el(&lat, 1, &[(0, 1), (1, 1)]).try_mul(&el(&lat, 1, &[(0, 1), (1, -1)])).unwrap();
        assert_eq!(p, el(&lat, 1, &[(0, 1)]));
    }

    #[test]
    fn invert_examples() {
        let lat = line_lattice();
        let inv = el(&lat, 4, &[(0, 2)]).invert().unwrap();
        assert_eq!(inv, NovikovElement::scalar(lat.clone(), int(4), frac(1, 2)));
        let inv = el(&lat, 3, &[(0, 1), (1, -1)]).invert().unwrap();
        assert_eq!(inv, el(&lat, 3, &[(0, 1), (1, 1), (2, 1), (3, 1)]));
        assert_eq!(el(&lat, 3, &[(1, 1)]).invert(), Err(NovikovError::NotAUnit));
    }

    #[test]
    fn degree_examples() {
        let lat = line_lattice();
        assert_eq!(el(&lat, 3, &[(1, 1)]).degree(), Some(6));
        assert_eq!(el(&lat, 3, &[(0, 5)]).degree(), Some(0));
        assert_eq!(el(&lat, 3, &[(0, 1), (1, 1)]).degree(), None);
    }

    #[test]
    fn classes_up_to_orders_by_energy() {
        let lat = Arc::new(ClassLattice::new(vec![int(1), int(2)], vec![2, 2]).unwrap());
        let cls = lat.classes_up_to(&int(2));
        let coords: Vec<Vec<i64>> = cls.iter().map(|c| c.0.clone()).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0]]);
    }

    #[test]
    fn serde_repr_roundtrip() {
        let lat = line_lattice();
        let a = NovikovElement::from_terms(lat.clone(), int(4), [(CurveClass(vec![0]), frac(1, 3)), (CurveClass(vec![2]), int(-5))]).unwrap();
        let json = serde_json::to_string(&a.to_repr()).unwrap();
        assert_eq!(json, r#"[{"coords":[0],"num":1,"den":3},{"coords":[2],"num":-5,"den":1}]"#);
        let back: Vec<NovikovTermRepr> = serde_json::from_str(&json).unwrap();
        assert_eq!(NovikovElement::from_repr(lat, int(4), &back).unwrap(), a);
    }

    fn arb_element(cutoff: i64) -> impl Strategy<Value = NovikovElement> {
        let lat = Arc::new(ClassLattice::new(vec![int(1), frac(3, 2)], vec![3, 1]).unwrap());
        proptest::collection::vec(((0i64..4, 0i64..3), -4i64..5), 0..6).prop_map(move |ts| {
            NovikovElement::from_terms(
                lat.clone(),
                int(cutoff),
                ts.into_iter().map(|((a, b), c)| (CurveClass(vec![a, b]), int(c))),
            )
            .unwrap()
        })
    }

    fn arb_unit() -> impl Strategy<Value = NovikovElement> {
        (arb_element(5), 1i64..7, prop::bool::ANY).prop_map(|(e, c, neg)| {
            let mut e = e;
            e.terms.remove(&CurveClass(vec![0, 0]));
            let c = if neg { -c } else { c };
            e.try_add(&NovikovElement::scalar(e.lattice.clone(), int(5), frac(c, 3))).unwrap()
        })
    }

    fn homogeneous(e: NovikovElement) -> NovikovElement {
        let first = e.terms.keys().next().map(|c| e.lattice.chern(c));
        let terms: Vec<_> = e
            .terms
            .iter()
            .filter(|(c, _)| Some(e.lattice.chern(c)) == first)
            .map(|(c, v)| (c.clone(), v.clone()))
            .collect();
        NovikovElement::from_terms(e.lattice.clone(), e.cutoff.clone(), terms).unwrap()
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_element(5), b in arb_element(5), c in arb_element(5)) {
            let ab = a.try_mul(&b).unwrap();
            prop_assert_eq!(ab.try_mul(&c).unwrap(), a.try_mul(&b.try_mul(&c).unwrap()).unwrap());
            prop_assert_eq!(&ab, &b.try_mul(&a).unwrap());
            let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
            let rhs = ab.try_add(&a.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(a.try_sub(&a).unwrap().is_zero());
        }

        #[test]
        fn degree_additive(a in arb_element(5), b in arb_element(5)) {
            let (a, b) = (homogeneous(a), homogeneous(b));
            let p = a.try_mul(&b).unwrap();
            if !p.is_zero() {
                prop_assert_eq!(p.degree(), Some(a.degree().unwrap() + b.degree().unwrap()));
            }
        }

        #[test]
        fn inverse_sound(a in arb_unit()) {
            let inv = a.invert().unwrap();
            prop_assert_eq!(a.try_mul(&inv).unwrap(), NovikovElement::one(a.lattice.clone(), int(5)));
        }

        #[test]
        fn truncation_is_homomorphism(a in arb_element(6), b in arb_element(6), low in 0i64..6) {
            let low = int(low);
            let direct = a.try_mul(&b).unwrap().truncate(&low);
            let via = a.truncate(&low).try_mul(&b.truncate(&low)).unwrap();
            prop_assert_eq!(direct, via);
        }
    }
}
