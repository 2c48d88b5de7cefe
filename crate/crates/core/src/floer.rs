//! Floer-type chain complexes over the truncated Novikov ring.
//!
//! A complex is a list of generators with Conley–Zehnder index and action, and a boundary
//! `δx = Σ_y n(x, y) y` with Novikov coefficients. Homology ranks are taken over the
//! Novikov field by Gaussian cancellation of unit entries; anything left is ranked by
//! fraction-free elimination inside each degree block.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{int, Rational, RationalRepr};
use crate::novikov::{ClassLattice, CurveClass, NovikovElement, NovikovError, NovikovTermRepr};

pub const COMPLEX_SCHEMA: &str = "qhforge.floer/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FloerError {
    #[error("complex file: {0}")]
    Format(String),
    #[error("duplicate generator id {0:?}")]
    DuplicateId(String),
    #[error("unknown generator id {0:?}")]
    UnknownId(String),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("increase cutoff: elimination at pivot ({0} → {1}) loses terms beyond the cutoff")]
    IncreaseCutoff(String, String),
    #[error("non-unit entries connect degrees shifted by Novikov classes with c_1 ≠ 0; ranks are not defined blockwise")]
    MixedBlocks,
    #[error("morse data: {0}")]
    Morse(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub cz: i64,
    pub action: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloerComplex {
    lattice: Arc<ClassLattice>,
    cutoff: Rational,
    generators: Vec<Generator>,
    boundary: BTreeMap<(usize, usize), NovikovElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Grading { from: String, to: String, class: CurveClass, drop: i64 },
    NegativeEnergy { from: String, to: String, class: CurveClass },
    ActionNotDecreasing { from: String, to: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Grading { from, to, class, drop } => {
                write!(f, "grading: {from} → {to} via e^{class} has index drop {drop}, expected 1")
            }
            Violation::NegativeEnergy { from, to, class } => {
                write!(f, "filtration: {from} → {to} via e^{class} has negative energy")
            }
            Violation::ActionNotDecreasing { from, to } => {
                write!(f, "filtration: energy-0 term {from} → {to} does not decrease the action")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRepr {
    pub id: String,
    pub cz: i64,
    pub action: RationalRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRepr {
    pub from: String,
    pub to: String,
    pub terms: Vec<NovikovTermRepr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub generators: Vec<GeneratorRepr>,
    #[serde(default)]
    pub boundary: Vec<BoundaryRepr>,
    pub weights: Vec<RationalRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chern: Option<Vec<i64>>,
    pub cutoff: RationalRepr,
}

fn default_schema() -> String {
    COMPLEX_SCHEMA.to_string()
}

impl FloerComplex {
    pub fn new(lattice: Arc<ClassLattice>, cutoff: Rational, generators: Vec<Generator>) -> Result<Self, FloerError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.id.clone()) {
                return Err(FloerError::DuplicateId(g.id.clone()));
            }
        }
        Ok(FloerComplex { lattice, cutoff, generators, boundary: BTreeMap::new() })
    }

    pub fn lattice(&self) -> &Arc<ClassLattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn boundary(&self) -> &BTreeMap<(usize, usize), NovikovElement> {
        &self.boundary
    }

    pub fn index_of(&self, id: &str) -> Result<usize, FloerError> {
        self.generators.iter().position(|g| g.id == id).ok_or_else(|| FloerError::UnknownId(id.to_string()))
    }

    pub fn zero_coefficient(&self) -> NovikovElement {
        NovikovElement::zero(self.lattice.clone(), self.cutoff.clone())
    }

    pub fn coefficient(&self, from: usize, to: usize) -> NovikovElement {
        self.boundary.get(&(from, to)).cloned().unwrap_or_else(|| self.zero_coefficient())
    }

    /// Adds `c` to the coefficient of `to` in `δ(from)`.
    pub fn add_boundary(&mut self, from: &str, to: &str, c: &NovikovElement) -> Result<(), FloerError> {
        let (x, y) = (self.index_of(from)?, self.index_of(to)?);
        self.add_entry(x, y, c)
    }

    fn add_entry(&mut self, x: usize, y: usize, c: &NovikovElement) -> Result<(), FloerError> {
        let sum = self.coefficient(x, y).try_add(c)?;
        if sum.is_zero() {
            self.boundary.remove(&(x, y));
        } else {
            self.boundary.insert((x, y), sum);
        }
        Ok(())
    }

    pub fn monomial(&self, coords: &[i64], c: i64) -> Result<NovikovElement, FloerError> {
        Ok(NovikovElement::monomial(self.lattice.clone(), self.cutoff.clone(), CurveClass(coords.to_vec()), int(c))?)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&(x, y), c) in &self.boundary {
            let (gx, gy) = (&self.generators[x], &self.generators[y]);
            for class in c.terms().keys() {
                let drop = gx.cz - gy.cz - 2 * self.lattice.chern(class);
                if drop != 1 {
                    out.push(Violation::Grading { from: gx.id.clone(), to: gy.id.clone(), class: class.clone(), drop });
                }
                let e = self.lattice.energy(class);
                if e.is_negative() {
                    out.push(Violation::NegativeEnergy { from: gx.id.clone(), to: gy.id.clone(), class: class.clone() });
                } else if e.is_zero() && gx.action <= gy.action {
                    out.push(Violation::ActionNotDecreasing { from: gx.id.clone(), to: gy.id.clone() });
                }
            }
        }
        out
    }

    /// Nonzero entries of `δ ∘ δ`, truncated at the cutoff.
    pub fn d_squared(&self) -> BTreeMap<(usize, usize), NovikovElement> {
        let mut out: BTreeMap<(usize, usize), NovikovElement> = BTreeMap::new();
        for (&(x, y), a) in &self.boundary {
            for (&(_, z), b) in self.boundary.range((y, 0)..=(y, usize::MAX)) {
                let p = a.try_mul(b).expect("shared lattice");
                let entry = out.entry((x, z)).or_insert_with(|| self.zero_coefficient());
                *entry = entry.try_add(&p).expect("shared lattice");
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn d_squared_check(&self) -> Result<bool, FloerError> {
        if let Some(v) = self.validate().first() {
            return Err(FloerError::Invalid(v.to_string()));
        }
        Ok(self.d_squared().is_empty())
    }

    /// Basis change `x ↦ x + c·z` (a chain isomorphism; `c` carries the degree
    /// difference between `x` and `z`).
    pub fn change_basis(&mut self, x: &str, z: &str, c: &NovikovElement) -> Result<(), FloerError> {
        let (xi, zi) = (self.index_of(x)?, self.index_of(z)?);
        if xi == zi {
            return Err(FloerError::Invalid("basis change needs two distinct generators".into()));
        }
        let row_z: Vec<(usize, NovikovElement)> =
            self.boundary.range((zi, 0)..=(zi, usize::MAX)).map(|(&(_, w), v)| (w, v.clone())).collect();
        for (w, v) in row_z {
            self.add_entry(xi, w, &v.try_mul(c)?)?;
        }
        let col_x: Vec<(usize, NovikovElement)> =
            self.boundary.iter().filter(|(&(_, t), _)| t == xi).map(|(&(r, _), v)| (r, v.clone())).collect();
        for (r, v) in col_x {
            self.add_entry(r, zi, &v.try_mul(c)?.neg())?;
        }
        Ok(())
    }

    /// Adds generators `a`, `b` with `δa = u·b`; preserves homology when `u` is a unit.
    pub fn with_cancelling_pair(
        &self,
        a: Generator,
        b: Generator,
        u: &NovikovElement,
    ) -> Result<FloerComplex, FloerError> {
        let mut out = self.clone();
        let (ai, bi) = (a.id.clone(), b.id.clone());
        for g in [a, b] {
            if out.generators.iter().any(|h| h.id == g.id) {
                return Err(FloerError::DuplicateId(g.id));
            }
            out.generators.push(g);
        }
        out.add_boundary(&ai, &bi, u)?;
        Ok(out)
    }

    pub fn to_file(&self) -> ComplexFile {
        let chern = self.lattice.chern_values().to_vec();
        ComplexFile {
            schema: COMPLEX_SCHEMA.into(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorRepr { id: g.id.clone(), cz: g.cz, action: (&g.action).into() })
                .collect(),
            boundary: self
                .boundary
                .iter()
                .map(|(&(x, y), c)| BoundaryRepr {
                    from: self.generators[x].id.clone(),
                    to: self.generators[y].id.clone(),
                    terms: c.to_repr(),
                })
                .collect(),
            weights: self.lattice.energy_weights().iter().map(|w| w.into()).collect(),
            chern: chern.iter().any(|&c| c != 0).then_some(chern),
            cutoff: (&self.cutoff).into(),
        }
    }

    pub fn from_file(file: &ComplexFile) -> Result<Self, FloerError> {
        if file.schema != COMPLEX_SCHEMA {
            return Err(FloerError::Format(format!("unsupported schema {:?}", file.schema)));
        }
        let fmt = |e: crate::exact::ParseRationalError| FloerError::Format(e.to_string());
        let weights = file.weights.iter().map(|w| w.to_rational()).collect::<Result<Vec<_>, _>>().map_err(fmt)?;
        let chern = file.chern.clone().unwrap_or_else(|| vec![0; weights.len()]);
        let lattice = Arc::new(ClassLattice::new(weights, chern)?);
        let cutoff = file.cutoff.to_rational().map_err(fmt)?;
        let generators = file
            .generators
            .iter()
            .map(|g| Ok(Generator { id: g.id.clone(), cz: g.cz, action: g.action.to_rational().map_err(fmt)? }))
            .collect::<Result<Vec<_>, FloerError>>()?;
        let mut c = FloerComplex::new(lattice.clone(), cutoff.clone(), generators)?;
        for b in &file.boundary {
            let e = NovikovElement::from_repr(lattice.clone(), cutoff.clone(), &b.terms)?;
            c.add_boundary(&b.from, &b.to, &e)?;
        }
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self, FloerError> {
        let file: ComplexFile = serde_json::from_str(text).map_err(|e| FloerError::Format(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("complex serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyRanks {
    pub ranks: BTreeMap<i64, usize>,
    /// False when a non-unit pivot was needed; ranks then hold up to the cutoff.
    pub certified: bool,
}

impl HomologyRanks {
    pub fn total(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn render(&self) -> String {
        if self.ranks.is_empty() {
            return "zero homology".into();
        }
        self.ranks.iter().map(|(k, r)| format!("rank {k}:{r}")).collect::<Vec<_>>().join(", ")
    }
}

fn truncation_free_product(a: &NovikovElement, b: &NovikovElement, lattice: &ClassLattice, cutoff: &Rational) -> bool {
    let (Some(va), Some(vb)) = (a.terms().keys().map(|c| lattice.energy(c)).max(), b.terms().keys().map(|c| lattice.energy(c)).max()) else {
        return true;
    };
    &(va + vb) <= cutoff
}

/// Ranks of `HF_*` over the Novikov field, keyed by Conley–Zehnder index.
pub fn homology_ranks(c: &FloerComplex) -> Result<HomologyRanks, FloerError> {
    if !c.d_squared_check()? {
        return Err(FloerError::Invalid("δ² ≠ 0".into()));
    }
    let lattice = c.lattice.clone();
    let mut d = c.boundary.clone();
    let mut active: BTreeSet<usize> = (0..c.generators.len()).collect();
    // unit pivots, lowest index pair first
    while let Some(((x, y), u)) = d.iter().find(|(_, v)| v.is_unit()).map(|(k, v)| (*k, v.clone())) {
        let u_inv = u.invert()?;
        let row_x: Vec<(usize, NovikovElement)> =
            d.range((x, 0)..=(x, usize::MAX)).filter(|(&(_, w), _)| w != y).map(|(&(_, w), v)| (w, v.clone())).collect();
        let col_y: Vec<(usize, NovikovElement)> =
            d.iter().filter(|(&(z, t), _)| t == y && z != x).map(|(&(z, _), v)| (z, v.clone())).collect();
        for (z, cz) in &col_y {
            let factor = cz.try_mul(&u_inv)?;
            for (w, v) in &row_x {
                let delta = factor.try_mul(v)?.neg();
                let e = d.entry((*z, *w)).or_insert_with(|| c.zero_coefficient());
                *e = e.try_add(&delta)?;
            }
        }
        d.retain(|&(s, t), v| s != x && s != y && t != x && t != y && !v.is_zero());
        active.remove(&x);
        active.remove(&y);
    }
    if d.is_empty() {
        let mut ranks = BTreeMap::new();
        for &g in &active {
            *ranks.entry(c.generators[g].cz).or_insert(0) += 1;
        }
        return Ok(HomologyRanks { ranks, certified: true });
    }
    // remaining entries have positive valuation: rank each degree block fraction-free
    if d.values().any(|v| v.terms().keys().any(|k| lattice.chern(k) != 0)) {
        return Err(FloerError::MixedBlocks);
    }
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &g in &active {
        by_degree.entry(c.generators[g].cz).or_default().push(g);
    }
    let mut block_rank: BTreeMap<i64, usize> = BTreeMap::new();
    for (&k, sources) in &by_degree {
        let Some(targets) = by_degree.get(&(k - 1)) else { continue };
        let mut rows: Vec<Vec<NovikovElement>> = sources
            .iter()
            .map(|&s| targets.iter().map(|&t| d.get(&(s, t)).cloned().unwrap_or_else(|| c.zero_coefficient())).collect())
            .collect();
        block_rank.insert(k, fraction_free_rank(&mut rows, c, sources, targets)?);
    }
    let mut ranks = BTreeMap::new();
    for (&k, gens) in &by_degree {
        let r = gens.len() - block_rank.get(&k).copied().unwrap_or(0) - block_rank.get(&(k + 1)).copied().unwrap_or(0);
        if r > 0 {
            ranks.insert(k, r);
        }
    }
    Ok(HomologyRanks { ranks, certified: false })
}

fn fraction_free_rank(
    rows: &mut [Vec<NovikovElement>],
    c: &FloerComplex,
    sources: &[usize],
    targets: &[usize],
) -> Result<usize, FloerError> {
    let lattice = c.lattice.clone();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    let mut used = vec![false; rows.len()];
    for col in 0..ncols {
        let pivot = (0..rows.len())
            .filter(|&r| !used[r] && !rows[r][col].is_zero())
            .min_by(|&a, &b| rows[a][col].valuation().cmp(&rows[b][col].valuation()).then(a.cmp(&b)));
        let Some(p) = pivot else { continue };
        used[p] = true;
        rank += 1;
        let pv = rows[p][col].clone();
        for r in 0..rows.len() {
            if used[r] || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            for j in 0..ncols {
                let lossless = truncation_free_product(&pv, &rows[r][j], &lattice, &c.cutoff)
                    && truncation_free_product(&f, &rows[p][j], &lattice, &c.cutoff);
                if !lossless {
                    return Err(FloerError::IncreaseCutoff(
                        c.generators[sources[p]].id.clone(),
                        c.generators[targets[col]].id.clone(),
                    ));
                }
                rows[r][j] = pv.try_mul(&rows[r][j])?.try_sub(&f.try_mul(&rows[p][j])?)?;
            }
        }
    }
    Ok(rank)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArnoldReport {
    pub generators: usize,
    pub homology_total: usize,
    pub betti_total: usize,
    pub certified: bool,
}

impl ArnoldReport {
    pub fn generators_bound(&self) -> bool {
        self.generators >= self.betti_total
    }

    pub fn homology_matches(&self) -> bool {
        self.homology_total == self.betti_total
    }

    pub fn ok(&self) -> bool {
        self.generators_bound() && self.homology_matches()
    }

    pub fn render(&self) -> String {
        let verdict = |b: bool| if b { "holds" } else { "FAILS" };
        format!(
            "generators {}, HF total {}, betti total {}\n#generators ≥ Σbetti: {}\nΣ HF ranks = Σbetti: {}{}",
            self.generators,
            self.homology_total,
            self.betti_total,
            verdict(self.generators_bound()),
            verdict(self.homology_matches()),
            if self.certified { "" } else { "\n(ranks certified only up to the cutoff)" }
        )
    }
}

pub fn arnold_report(c: &FloerComplex, betti: &[usize]) -> Result<ArnoldReport, FloerError> {
    let h = homology_ranks(c)?;
    Ok(ArnoldReport {
        generators: c.generators.len(),
        homology_total: h.total(),
        betti_total: betti.iter().sum(),
        certified: h.certified,
    })
}

/// Critical points with Morse indices and signed counts of gradient lines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseData {
    pub critical: Vec<(String, i64)>,
    #[serde(default)]
    pub flows: Vec<(String, String, i64)>,
}

/// Lattice used for Morse fixtures: one class of energy 1 and `c_1 = 0`.
pub fn standalone_lattice() -> Arc<ClassLattice> {
    Arc::new(ClassLattice::new(vec![int(1)], vec![0]).expect("valid lattice"))
}

/// Complex with energy-0 boundary from the flow counts; action equals the index.
pub fn from_morse(data: &MorseData, lattice: Arc<ClassLattice>, cutoff: Rational) -> Result<FloerComplex, FloerError> {
    let generators =
        data.critical.iter().map(|(id, i)| Generator { id: id.clone(), cz: *i, action: int(*i) }).collect();
    let mut c = FloerComplex::new(lattice.clone(), cutoff.clone(), generators)?;
    for (from, to, n) in &data.flows {
        if *n == 0 {
            continue;
        }
        let (x, y) = (c.index_of(from)?, c.index_of(to)?);
        let gap = c.generators[x].cz - c.generators[y].cz;
        if gap != 1 {
            return Err(FloerError::Morse(format!("flow {from} → {to} has index gap {gap}")));
        }
        let e = NovikovElement::scalar(lattice.clone(), cutoff.clone(), int(*n));
        c.add_entry(x, y, &e)?;
    }
    Ok(c)
}

/// Reference complexes.
pub mod fixtures {
    use super::*;

    fn morse(critical: &[(&str, i64)], flows: &[(&str, &str, i64)]) -> FloerComplex {
        let data = MorseData {
            critical: critical.iter().map(|&(id, i)| (id.to_string(), i)).collect(),
            flows: flows.iter().map(|&(a, b, n)| (a.to_string(), b.to_string(), n)).collect(),
        };
        from_morse(&data, standalone_lattice(), int(4)).expect("fixture is well formed")
    }

    /// Height function on the sphere.
    pub fn sphere() -> FloerComplex {
        morse(&[("min", 0), ("max", 2)], &[])
    }

    /// Standard perfect Morse function on the torus.
    pub fn torus() -> FloerComplex {
        morse(&[("min", 0), ("a", 1), ("b", 1), ("max", 2)], &[("a", "min", 1), ("a", "min", -1), ("max", "a", 0)])
    }

    /// Genus-2 surface: one minimum, four saddles, one maximum; counts cancel in pairs.
    pub fn genus_two() -> FloerComplex {
        let mut flows = Vec::new();
        for s in ["a1", "b1", "a2", "b2"] {
            flows.push((s, "min", 1));
            flows.push((s, "min", -1));
            flows.push(("max", s, 1));
            flows.push(("max", s, -1));
        }
        morse(&[("min", 0), ("a1", 1), ("b1", 1), ("a2", 1), ("b2", 1), ("max", 2)], &flows)
    }

    /// One index-1 and one index-0 point joined by a single gradient line.
    pub fn interval() -> FloerComplex {
        morse(&[("x", 1), ("y", 0)], &[("x", "y", 1)])
    }

    /// `δa = (1 − e^A) b` with `A` of energy 1 and `c_1(A) = 0`.
    pub fn cancellation_pair() -> FloerComplex {
        let lat = standalone_lattice();
        let gens = vec![
            Generator { id: "a".into(), cz: 1, action: int(1) },
            Generator { id: "b".into(), cz: 0, action: int(0) },
        ];
        let mut c = FloerComplex::new(lat.clone(), int(4), gens).expect("distinct ids");
        let u = NovikovElement::from_terms(lat, int(4), [(CurveClass(vec![0]), int(1)), (CurveClass(vec![1]), int(-1))])
            .expect("rank one");
        c.add_boundary("a", "b", &u).expect("known ids");
        c
    }

    /// Sphere plus a cancelling pair of indices 1 and 0.
    pub fn sphere_with_pair() -> FloerComplex {
        let base = sphere();
        let u = NovikovElement::from_terms(
            base.lattice().clone(),
            base.cutoff().clone(),
            [(CurveClass(vec![0]), int(1)), (CurveClass(vec![2]), int(3))],
        )
        .expect("rank one");
        base.with_cancelling_pair(
            Generator { id: "p".into(), cz: 1, action: int(1) },
            Generator { id: "r".into(), cz: 0, action: int(0) },
            &u,
        )
        .expect("fresh ids")
    }

    /// `δa = e^A b`, `δb = c`: the composite survives, so `δ² ≠ 0`.
    pub fn broken() -> FloerComplex {
        let lat = standalone_lattice();
        let gens = vec![
            Generator { id: "a".into(), cz: 2, action: int(2) },
            Generator { id: "b".into(), cz: 1, action: int(1) },
            Generator { id: "c".into(), cz: 0, action: int(0) },
        ];
        let mut c = FloerComplex::new(lat, int(4), gens).expect("distinct ids");
        let ea = c.monomial(&[1], 1).expect("rank one");
        let one = c.monomial(&[0], 1).expect("rank one");
        c.add_boundary("a", "b", &ea).expect("known ids");
        c.add_boundary("b", "c", &one).expect("known ids");
        c
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn ranks(pairs: &[(i64, usize)]) -> BTreeMap<i64, usize> {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn sphere_is_valid_with_two_ranks() {
        let c = sphere();
        assert!(c.validate().is_empty());
        assert!(c.d_squared_check().unwrap());
        assert_eq!(homology_ranks(&c).unwrap().ranks, ranks(&[(0, 1), (2, 1)]));
        assert_eq!(homology_ranks(&c).unwrap().render(), "rank 0:1, rank 2:1");
    }

    #[test]
    fn grading_and_filtration_violations() {
        let lat = standalone_lattice();
        let gens = vec![
            Generator { id: "x".into(), cz: 2, action: int(0) },
            Generator { id: "y".into(), cz: 0, action: int(1) },
            Generator { id: "z".into(), cz: 1, action: int(5) },
        ];
        let mut c = FloerComplex::new(lat, int(4), gens).unwrap();
        let one = c.monomial(&[0], 1).unwrap();
        c.add_boundary("x", "y", &one).unwrap();
        assert!(matches!(c.validate()[0], Violation::Grading { drop: 2, .. }));
        let mut c2 = FloerComplex::new(c.lattice().clone(), int(4), c.generators().to_vec()).unwrap();
        let neg = c2.monomial(&[-1], 1).unwrap();
        c2.add_boundary("z", "y", &neg).unwrap();
        assert!(c2.validate().iter().any(|v| matches!(v, Violation::NegativeEnergy { .. })));
        let mut c3 = FloerComplex::new(c.lattice().clone(), int(4), c.generators().to_vec()).unwrap();
        c3.add_boundary("x", "z", &one).unwrap();
        assert!(c3.validate().iter().any(|v| matches!(v, Violation::ActionNotDecreasing { .. })));
    }

    #[test]
    fn d_squared_examples() {
        assert!(cancellation_pair().d_squared_check().unwrap());
        assert!(!broken().d_squared_check().unwrap());
        assert!(torus().d_squared_check().unwrap());
    }

    #[test]
    fn homology_of_fixtures() {
        assert_eq!(homology_ranks(&torus()).unwrap().ranks, ranks(&[(0, 1), (1, 2), (2, 1)]));
        assert_eq!(homology_ranks(&genus_two()).unwrap().ranks, ranks(&[(0, 1), (1, 4), (2, 1)]));
        let h = homology_ranks(&cancellation_pair()).unwrap();
        assert!(h.ranks.is_empty() && h.certified);
        assert!(homology_ranks(&interval()).unwrap().ranks.is_empty());
        assert_eq!(homology_ranks(&sphere_with_pair()).unwrap().total(), 2);
    }

    #[test]
    fn non_unit_pivot_is_flagged() {
        let lat = standalone_lattice();
        let gens = vec![
            Generator { id: "a".into(), cz: 1, action: int(1) },
            Generator { id: "b".into(), cz: 0, action: int(0) },
        ];
        let mut c = FloerComplex::new(lat, int(4), gens).unwrap();
        let e = c.monomial(&[1], 2).unwrap();
        c.add_boundary("a", "b", &e).unwrap();
        let h = homology_ranks(&c).unwrap();
        assert!(h.ranks.is_empty());
        assert!(!h.certified);
    }

    #[test]
    fn arnold_examples() {
        let r = arnold_report(&sphere(), &[1, 0, 1]).unwrap();
        assert!(r.ok());
        let r = arnold_report(&sphere_with_pair(), &[1, 0, 1]).unwrap();
        assert_eq!((r.generators, r.homology_total, r.betti_total), (4, 2, 2));
        assert!(r.ok());
        let r = arnold_report(&sphere(), &[1, 1, 1]).unwrap();
        assert!(!r.homology_matches());
        assert!(r.render().contains("FAILS"));
    }

    #[test]
    fn morse_gap_rejected() {
        let data = MorseData { critical: vec![("a".into(), 2), ("b".into(), 0)], flows: vec![("a".into(), "b".into(), 1)] };
        assert!(matches!(from_morse(&data, standalone_lattice(), int(1)), Err(FloerError::Morse(_))));
    }

    #[test]
    fn json_roundtrip() {
        let c = sphere_with_pair();
        let back = FloerComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(matches!(FloerComplex::from_json("{"), Err(FloerError::Format(_))));
    }

    #[test]
    fn basis_change_preserves_everything() {
        let mut c = sphere_with_pair();
        let e = c.monomial(&[1], 5).unwrap();
        c.change_basis("p", "p", &e).unwrap_err();
        let before = homology_ranks(&c).unwrap();
        c.change_basis("r", "min", &e).unwrap();
        assert!(c.validate().is_empty());
        assert!(c.d_squared_check().unwrap());
        assert_eq!(homology_ranks(&c).unwrap(), before);
    }
}
