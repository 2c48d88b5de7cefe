//! Genus-0 correlators `⟨τ_{d_1}(β_{a_1}) ⋯ τ_{d_k}(β_{a_k})⟩_A` as canonical keys in
//! tables with provenance. The reduction axioms and the η-contracted splitting (WDVV)
//! residual act on these tables.
//!
//! The moduli insertion is always the fundamental class of `M̄_{0,k}`; ψ-powers are
//! carried as descendant exponents. All classes have even degree, so keys are
//! fully symmetric and stored in a canonical order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cohomology::{CohClass, RingModel};
use crate::exact::{self, binomial, Rational, RationalRepr};
use crate::novikov::CurveClass;
use crate::strata::expected_dimension;

pub const TABLE_SCHEMA: &str = "qhforge.table/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrelatorError {
    #[error("correlator {0} has fewer than three insertions")]
    TooFewInsertions(String),
    #[error("missing table entry {0}")]
    Missing(String),
    #[error("classical evaluation needs A = 0, three insertions and no descendants: {0}")]
    NotClassical(String),
    #[error("reduction not available at (g,k) = (0,3) with A ≠ 0: {0}")]
    ExceptionalThreePoint(String),
    #[error("key {0} has no insertion of the requested kind")]
    NoSuchInsertion(String),
    #[error("descendant insertions present in {0}; use the string/dilaton reducers")]
    NotPrimary(String),
    #[error("basis index {0} out of range")]
    BadIndex(usize),
    #[error("class rank mismatch in {0}")]
    ClassRank(String),
    #[error("table schema: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(String),
}

/// One insertion `τ_d(β_a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Insertion {
    pub class: usize,
    pub descendant: u32,
}

impl Insertion {
    pub fn primary(class: usize) -> Self {
        Insertion { class, descendant: 0 }
    }

    pub fn tau(descendant: u32, class: usize) -> Self {
        Insertion { class, descendant }
    }
}

impl Serialize for Insertion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.descendant, self.class).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Insertion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (descendant, class) = <(u32, usize)>::deserialize(d)?;
        Ok(Insertion { class, descendant })
    }
}

/// Canonical genus-0 correlator key: insertions sorted in descending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrelatorKey {
    class: CurveClass,
    insertions: Vec<Insertion>,
}

impl CorrelatorKey {
    pub fn new(class: CurveClass, mut insertions: Vec<Insertion>) -> Self {
        insertions.sort_unstable_by(|a, b| b.cmp(a));
        CorrelatorKey { class, insertions }
    }

    pub fn primary(class: CurveClass, classes: &[usize]) -> Self {
        Self::new(class, classes.iter().map(|&a| Insertion::primary(a)).collect())
    }

    pub fn class(&self) -> &CurveClass {
        &self.class
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn len(&self) -> usize {
        self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    pub fn is_primary(&self) -> bool {
        self.insertions.iter().all(|i| i.descendant == 0)
    }

    pub fn max_descendant(&self) -> u32 {
        self.insertions.iter().map(|i| i.descendant).max().unwrap_or(0)
    }

    pub fn position(&self, ins: Insertion) -> Option<usize> {
        self.insertions.iter().position(|&i| i == ins)
    }

    pub fn contains(&self, ins: Insertion) -> bool {
        self.position(ins).is_some()
    }

    /// Key with the insertion at `pos` removed.
    pub fn without(&self, pos: usize) -> CorrelatorKey {
        let mut ins = self.insertions.clone();
        ins.remove(pos);
        CorrelatorKey { class: self.class.clone(), insertions: ins }
    }

    pub fn with(&self, ins: Insertion) -> CorrelatorKey {
        let mut all = self.insertions.clone();
        all.push(ins);
        CorrelatorKey::new(self.class.clone(), all)
    }

    pub fn replaced(&self, pos: usize, ins: Insertion) -> CorrelatorKey {
        let mut all = self.insertions.clone();
        all[pos] = ins;
        CorrelatorKey::new(self.class.clone(), all)
    }

    /// Total `Σ (deg β_a + 2d)`.
    pub fn insertion_degree(&self, model: &RingModel) -> i64 {
        self.insertions.iter().map(|i| model.degree(i.class) as i64 + 2 * i.descendant as i64).sum()
    }

    pub fn render(&self, model: &RingModel) -> String {
        let parts: Vec<String> = self
            .insertions
            .iter()
            .map(|i| {
                let label = model.basis().get(i.class).map(|b| b.label.as_str()).unwrap_or("?");
                if i.descendant == 0 {
                    label.to_string()
                } else {
                    format!("τ{}({label})", i.descendant)
                }
            })
            .collect();
        format!("⟨{}⟩_{}", parts.join(" "), self.class)
    }

    fn check(&self, model: &RingModel) -> Result<(), CorrelatorError> {
        if let Some(i) = self.insertions.iter().find(|i| i.class >= model.rank()) {
            return Err(CorrelatorError::BadIndex(i.class));
        }
        if self.class.rank() != model.lattice().rank() {
            return Err(CorrelatorError::ClassRank(self.to_string()));
        }
        if self.len() < 3 {
            return Err(CorrelatorError::TooFewInsertions(self.render(model)));
        }
        Ok(())
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .insertions
            .iter()
            .map(|i| if i.descendant == 0 { i.class.to_string() } else { format!("τ{}({})", i.descendant, i.class) })
            .collect();
        write!(f, "⟨{}⟩_{}", parts.join(" "), self.class)
    }
}

/// Result of applying one reduction rule to a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    Zero,
    Value(Rational),
    Scaled { factor: Rational, key: CorrelatorKey },
    Combination(Vec<(Rational, CorrelatorKey)>),
}

/// `Σ (deg α_i + 2d_i)` equals the virtual dimension of `M̄_{0,k}(V, A)`.
pub fn dimension_filter(model: &RingModel, key: &CorrelatorKey) -> bool {
    let index = expected_dimension(
        model.lattice().chern(key.class()),
        0,
        key.len() as i64,
        model.complex_dim() as i64,
        0,
        0,
    );
    key.insertion_degree(model) == index
}

/// `∫ α_1 ∪ α_2 ∪ α_3` for a classical three-point key.
pub fn classical_eval(model: &RingModel, key: &CorrelatorKey) -> Result<Rational, CorrelatorError> {
    key.check(model)?;
    if !key.class().is_zero() || key.len() != 3 || !key.is_primary() {
        return Err(CorrelatorError::NotClassical(key.render(model)));
    }
    let ins = key.insertions();
    let prod = model.cup(model.cup_basis(ins[0].class, ins[1].class), &CohClass::basis(ins[2].class));
    Ok(model.integrate(&prod))
}

/// Removes a primary unit insertion.
pub fn fundamental_reduction(model: &RingModel, key: &CorrelatorKey) -> Result<Reduction, CorrelatorError> {
    key.check(model)?;
    let unit = Insertion::primary(model.unit_index());
    if !key.contains(unit) {
        return Err(CorrelatorError::NoSuchInsertion(key.render(model)));
    }
    if !key.is_primary() {
        return Err(CorrelatorError::NotPrimary(key.render(model)));
    }
    if key.len() == 3 {
        if key.class().is_zero() {
            return Ok(Reduction::Value(classical_eval(model, key)?));
        }
        return Err(CorrelatorError::ExceptionalThreePoint(key.render(model)));
    }
    Ok(Reduction::Zero)
}

/// Removes a primary degree-2 insertion `D`, returning `(D·A, reduced key)`.
pub fn divisor_reduction(model: &RingModel, key: &CorrelatorKey) -> Result<Reduction, CorrelatorError> {
    key.check(model)?;
    if !key.is_primary() {
        return Err(CorrelatorError::NotPrimary(key.render(model)));
    }
    let pos = key
        .insertions()
        .iter()
        .position(|i| model.is_divisor(i.class))
        .ok_or_else(|| CorrelatorError::NoSuchInsertion(key.render(model)))?;
    if key.len() == 3 {
        return Err(CorrelatorError::ExceptionalThreePoint(key.render(model)));
    }
    let divisor = key.insertions()[pos].class;
    let factor = model.divisor_pairing(divisor, key.class()).expect("degree-2 class is a divisor");
    Ok(Reduction::Scaled { factor, key: key.without(pos) })
}

/// Keys that the reduction rules cannot simplify. The solver tabulates exactly these.
pub fn is_reduced(model: &RingModel, key: &CorrelatorKey) -> bool {
    let unit = model.unit_index();
    !key.class().is_zero()
        && key.len() >= 3
        && key.is_primary()
        && dimension_filter(model, key)
        && key.insertions().iter().all(|i| i.class != unit)
        && (key.len() == 3 || key.insertions().iter().all(|i| !model.is_divisor(i.class)))
}

/// Primary correlator via the filter and the reductions, falling back to `lookup`
/// for reduced keys.
pub fn evaluate_with(
    model: &RingModel,
    key: &CorrelatorKey,
    lookup: &dyn Fn(&CorrelatorKey) -> Option<Rational>,
) -> Result<Rational, CorrelatorError> {
    key.check(model)?;
    if !key.is_primary() {
        return Err(CorrelatorError::NotPrimary(key.render(model)));
    }
    if !dimension_filter(model, key) {
        return Ok(Rational::zero());
    }
    if key.class().is_zero() {
        // M̄_{0,k} × V with an integrand pulled back from V: only k = 3 survives
        return if key.len() == 3 { classical_eval(model, key) } else { Ok(Rational::zero()) };
    }
    let unit = Insertion::primary(model.unit_index());
    if key.contains(unit) {
        return match fundamental_reduction(model, key)? {
            Reduction::Zero => Ok(Rational::zero()),
            Reduction::Value(v) => Ok(v),
            _ => unreachable!("fundamental reduction yields a value"),
        };
    }
    if key.len() >= 4 && key.insertions().iter().any(|i| model.is_divisor(i.class)) {
        if let Reduction::Scaled { factor, key: reduced } = divisor_reduction(model, key)? {
            if factor.is_zero() {
                return Ok(factor);
            }
            return Ok(factor * evaluate_with(model, &reduced, lookup)?);
        }
    }
    lookup(key).ok_or_else(|| CorrelatorError::Missing(key.render(model)))
}

pub fn evaluate(model: &RingModel, table: &CorrelatorTable, key: &CorrelatorKey) -> Result<Rational, CorrelatorError> {
    evaluate_with(model, key, &|k| table.get(k).cloned())
}

/// Sub-multisets of a sorted multiset with their multiplicities `Π C(m_j, s_j)`.
pub fn sub_multisets(items: &[Insertion]) -> Vec<(Vec<Insertion>, Vec<Insertion>, Rational)> {
    let mut groups: Vec<(Insertion, u64)> = Vec::new();
    for &i in items {
        match groups.last_mut() {
            Some((g, n)) if *g == i => *n += 1,
            _ => groups.push((i, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new(), Rational::one())];
    for (ins, m) in groups {
        let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
        for (left, right, w) in &out {
            for s in 0..=m {
                let mut l = left.clone();
                let mut r = right.clone();
                l.extend(std::iter::repeat_n(ins, s as usize));
                r.extend(std::iter::repeat_n(ins, (m - s) as usize));
                next.push((l, r, w * Rational::from_integer(binomial(m, s))));
            }
        }
        out = next;
    }
    out
}

/// `Σ_{A_1+A_2=A} Σ_{S_1⊔S_2=S} Σ_{f,g} ⟨x, y, S_1, β_f⟩_{A_1} η^{fg} ⟨β_g, z, w, S_2⟩_{A_2}`.
pub fn degeneration_sum(
    model: &RingModel,
    eval: &dyn Fn(&CorrelatorKey) -> Result<Rational, CorrelatorError>,
    pair_left: (usize, usize),
    pair_right: (usize, usize),
    rest: &[Insertion],
    class: &CurveClass,
) -> Result<Rational, CorrelatorError> {
    let diagonal = model.diagonal_class();
    let splits = sub_multisets(rest);
    let mut total = Rational::zero();
    for a1 in class.effective_parts() {
        let a2 = class.sub(&a1);
        for (s1, s2, weight) in &splits {
            for (f, g, eta) in &diagonal {
                let mut left = vec![Insertion::primary(pair_left.0), Insertion::primary(pair_left.1), Insertion::primary(*f)];
                left.extend_from_slice(s1);
                let left = CorrelatorKey::new(a1.clone(), left);
                let lv = eval(&left)?;
                if lv.is_zero() {
                    continue;
                }
                let mut right =
                    vec![Insertion::primary(*g), Insertion::primary(pair_right.0), Insertion::primary(pair_right.1)];
                right.extend_from_slice(s2);
                let right = CorrelatorKey::new(a2.clone(), right);
                let rv = eval(&right)?;
                total += weight * eta * lv * rv;
            }
        }
    }
    Ok(total)
}

/// Difference of the two degenerations of the four-point function with insertions
/// `(a, b | c, e)` and `(a, c | b, e)` plus the extra primaries `rest`. Identically
/// zero for genuine genus-0 invariants; the sign prefactor is +1 for even classes.
pub fn composition_residual(
    model: &RingModel,
    eval: &dyn Fn(&CorrelatorKey) -> Result<Rational, CorrelatorError>,
    quad: [usize; 4],
    rest: &[Insertion],
    class: &CurveClass,
) -> Result<Rational, CorrelatorError> {
    let [a, b, c, e] = quad;
    let mut rest = rest.to_vec();
    rest.sort_unstable_by(|x, y| y.cmp(x));
    let left = degeneration_sum(model, eval, (a, b), (c, e), &rest, class)?;
    let right = degeneration_sum(model, eval, (a, c), (b, e), &rest, class)?;
    Ok(left - right)
}

/// Number of extra point insertions that makes the four-point function with `quad`
/// dimensionally nontrivial in class `A`; `None` when no point filling exists.
pub fn point_filling(model: &RingModel, quad: [usize; 4], class: &CurveClass) -> Option<usize> {
    let n = model.complex_dim() as i64;
    let quad_deg: i64 = quad.iter().map(|&q| model.degree(q) as i64).sum();
    let chern = model.lattice().chern(class);
    // quad_deg + s·2n = 2c_1 + 2n − 6 + 2(4 + s)
    let lhs = 2 * chern + 2 * n + 2 - quad_deg;
    let per_point = 2 * n - 2;
    if per_point == 0 {
        return (lhs == 0).then_some(0);
    }
    (lhs >= 0 && lhs % per_point == 0).then(|| (lhs / per_point) as usize)
}

/// WDVV instance for the basis quadruple in class `A`, with extra point insertions
/// filling the dimension.
pub fn splitting_residual(
    model: &RingModel,
    table: &CorrelatorTable,
    quad: [usize; 4],
    class: &CurveClass,
) -> Result<Rational, CorrelatorError> {
    if let Some(&bad) = quad.iter().find(|&&q| q >= model.rank()) {
        return Err(CorrelatorError::BadIndex(bad));
    }
    let fill = point_filling(model, quad, class).unwrap_or(0);
    let rest = vec![Insertion::primary(model.point_index()); fill];
    composition_residual(model, &|k| evaluate(model, table, k), quad, &rest, class)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Classical,
    Solved,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: Rational,
    pub provenance: Provenance,
}

/// Exact correlator values keyed canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatorTable {
    model: String,
    cutoff: Rational,
    entries: BTreeMap<CorrelatorKey, TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableHeader {
    pub schema: String,
    pub model: String,
    pub cutoff: RationalRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableLine {
    #[serde(rename = "A")]
    pub class: CurveClass,
    pub insertions: Vec<Insertion>,
    pub value: RationalRepr,
    pub provenance: Provenance,
}

impl CorrelatorTable {
    pub fn new(model: impl Into<String>, cutoff: Rational) -> Self {
        CorrelatorTable { model: model.into(), cutoff, entries: BTreeMap::new() }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<&Rational> {
        self.entries.get(key).map(|e| &e.value)
    }

    pub fn entry(&self, key: &CorrelatorKey) -> Option<&TableEntry> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: CorrelatorKey, value: Rational, provenance: Provenance) {
        self.entries.insert(key, TableEntry { value, provenance });
    }

    pub fn remove(&mut self, key: &CorrelatorKey) -> Option<TableEntry> {
        self.entries.remove(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CorrelatorKey, &TableEntry)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CorrelatorKey> {
        self.entries.keys()
    }

    /// Keys whose stored value violates the dimension filter (nonzero off dimension).
    pub fn filter_violations(&self, model: &RingModel) -> Vec<CorrelatorKey> {
        self.entries
            .iter()
            .filter(|(k, e)| !dimension_filter(model, k) && !e.value.is_zero())
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), CorrelatorError> {
        let io = |e: std::io::Error| CorrelatorError::Io(e.to_string());
        let header = TableHeader { schema: TABLE_SCHEMA.into(), model: self.model.clone(), cutoff: (&self.cutoff).into() };
        writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes")).map_err(io)?;
        for (k, e) in &self.entries {
            let line = TableLine {
                class: k.class.clone(),
                insertions: k.insertions.clone(),
                value: (&e.value).into(),
                provenance: e.provenance,
            };
            writeln!(w, "{}", serde_json::to_string(&line).expect("line serializes")).map_err(io)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self, CorrelatorError> {
        let mut lines = r.lines();
        let schema = |s: String| CorrelatorError::Schema(s);
        let first = lines.next().ok_or_else(|| schema("empty table file".into()))?.map_err(|e| CorrelatorError::Io(e.to_string()))?;
        let header: TableHeader = serde_json::from_str(&first).map_err(|e| schema(e.to_string()))?;
        if header.schema != TABLE_SCHEMA {
            return Err(schema(format!("unsupported schema {:?}", header.schema)));
        }
        let cutoff = header.cutoff.to_rational().map_err(|e| schema(e.to_string()))?;
        let mut table = CorrelatorTable::new(header.model, cutoff);
        for (n, line) in lines.enumerate() {
            let line = line.map_err(|e| CorrelatorError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let l: TableLine = serde_json::from_str(&line).map_err(|e| schema(format!("line {}: {e}", n + 2)))?;
            let v = l.value.to_rational().map_err(|e| schema(e.to_string()))?;
            table.insert(CorrelatorKey::new(l.class, l.insertions), v, l.provenance);
        }
        Ok(table)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Classical => "classical",
            Provenance::Solved => "solved",
            Provenance::User => "user",
        })
    }
}

pub fn render_value(q: &Rational) -> String {
    exact::render(q)
}
