//! Combinatorial types of stable maps: decorated dual graphs, stability, the
//! ghost-bubble bound and expected dimensions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use num_traits::Zero;

use crate::cohomology::RingModel;
use crate::exact::Rational;
use crate::novikov::{ClassLattice, CurveClass, NovikovError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrataError {
    #[error("class {0} is not effective")]
    NotEffective(CurveClass),
    #[error(transparent)]
    Lattice(#[from] NovikovError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    pub class: CurveClass,
    pub marks: BTreeSet<u32>,
    pub ghost: bool,
}

impl Vertex {
    pub fn new(genus: u32, class: CurveClass, marks: impl IntoIterator<Item = u32>) -> Self {
        let ghost = class.is_zero();
        Vertex { genus, class, marks: marks.into_iter().collect(), ghost }
    }
}

/// Dual graph of a stable map. Edges are nodes, stored as sorted vertex pairs;
/// a pair `(v, v)` is a self-node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DualGraph {
    pub genus: u32,
    pub marks: u32,
    pub class: CurveClass,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn new(genus: u32, marks: u32, class: CurveClass, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort();
        DualGraph { genus, marks, class, vertices, edges }
    }

    pub fn ghost_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.ghost).count()
    }

    pub fn non_ghost_count(&self) -> usize {
        self.vertices.len() - self.ghost_count()
    }

    /// Edge ends at each vertex; a self-node contributes two.
    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            val[a] += 1;
            val[b] += 1;
        }
        val
    }

    pub fn special_points(&self, v: usize) -> usize {
        self.valences()[v] + self.vertices[v].marks.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// First Betti number `E − V + 1` of a connected graph.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// All type invariants: genus count, mark partition, ghost flags, effectivity,
    /// special points on ghosts and the class total.
    pub fn check_stability(&self, lattice: &ClassLattice) -> bool {
        if !self.is_connected() || self.edges.iter().any(|&(_, b)| b >= self.vertices.len()) {
            return false;
        }
        let vertex_genus: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        if vertex_genus + self.betti() != self.genus as i64 {
            return false;
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            for &m in &v.marks {
                if m == 0 || m > self.marks || !seen.insert(m) {
                    return false;
                }
            }
        }
        if seen.len() != self.marks as usize {
            return false;
        }
        let mut total = CurveClass::zero(self.class.rank());
        let valences = self.valences();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.class.rank() != self.class.rank() {
                return false;
            }
            total = total.add(&v.class);
            if v.ghost != v.class.is_zero() {
                return false;
            }
            if v.ghost {
                // 2g + n ≥ 3; for genus-0 components this is the three-special-point rule
                if 2 * v.genus as usize + valences[i] + v.marks.len() < 3 {
                    return false;
                }
            } else if !v.class.is_effective() || lattice.energy(&v.class) <= Rational::zero() {
                return false;
            }
        }
        total == self.class
    }

    /// `#ghost ≤ #non-ghost`.
    pub fn ghost_bound(&self) -> bool {
        self.ghost_count() <= self.non_ghost_count()
    }

    /// Relabels vertices into a canonical order; two graphs are isomorphic (as
    /// decorated graphs) iff their canonical forms are equal.
    pub fn canonical(&self) -> DualGraph {
        let n = self.vertices.len();
        let mut adj: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for &(a, b) in &self.edges {
            *adj[a].entry(b).or_insert(0) += 1;
            if a != b {
                *adj[b].entry(a).or_insert(0) += 1;
            }
        }
        // colour refinement
        let initial: Vec<(Vertex, usize)> =
            (0..n).map(|v| (self.vertices[v].clone(), adj[v].values().sum::<usize>())).collect();
        let mut colour = rank_values(&initial);
        loop {
            let sig: Vec<(usize, Vec<(usize, usize)>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(usize, usize)> = adj[v].iter().map(|(&u, &m)| (colour[u], m)).collect();
                    nb.sort();
                    (colour[v], nb)
                })
                .collect();
            let next = rank_values(&sig);
            let classes = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
            if classes(&next) == classes(&colour) {
                colour = next;
                break;
            }
            colour = next;
        }
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            cells.entry(colour[v]).or_default().push(v);
        }
        let cells: Vec<Vec<usize>> = cells.into_values().collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut best_order: Vec<usize> = Vec::new();
        let mut order = Vec::with_capacity(n);
        search_orders(&cells, 0, &mut order, &mut |ord: &[usize]| {
            let mut pos = vec![0; n];
            for (i, &v) in ord.iter().enumerate() {
                pos[v] = i;
            }
            let mut e: Vec<(usize, usize)> = self
                .edges
                .iter()
                .map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
                .collect();
            e.sort();
            if best.as_ref().is_none_or(|b| &e < b) {
                best = Some(e);
                best_order = ord.to_vec();
            }
        });
        let vertices = best_order.iter().map(|&v| self.vertices[v].clone()).collect();
        DualGraph {
            genus: self.genus,
            marks: self.marks,
            class: self.class.clone(),
            vertices,
            edges: best.unwrap_or_default(),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "v{i}[");
            if v.ghost {
                s.push_str("ghost");
            } else {
                let _ = write!(s, "A={}", v.class);
            }
            if v.genus > 0 {
                let _ = write!(s, " g={}", v.genus);
            }
            if !v.marks.is_empty() {
                let m: Vec<String> = v.marks.iter().map(|m| m.to_string()).collect();
                let _ = write!(s, " | {}", m.join(","));
            }
            s.push(']');
        }
        s
    }

    pub fn describe_edges(&self) -> String {
        if self.edges.is_empty() {
            return "-".into();
        }
        self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" ")
    }
}

fn rank_values<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let sorted: BTreeSet<T> = values.iter().cloned().collect();
    let index: BTreeMap<T, usize> = sorted.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    values.iter().map(|v| index[v]).collect()
}

fn search_orders(cells: &[Vec<usize>], i: usize, order: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if i == cells.len() {
        visit(order);
        return;
    }
    let mut cell = cells[i].clone();
    permutations(&mut cell, 0, &mut |p| {
        let len = order.len();
        order.extend_from_slice(p);
        search_orders(cells, i + 1, order, visit);
        order.truncate(len);
    });
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// `2·c_1(A) + 2(3 − n)(g − 1) + 2k + dim X + dim E`.
pub fn expected_dimension(chern: i64, genus: i64, marks: i64, complex_dim: i64, dim_base: i64, dim_e: i64) -> i64 {
    2 * chern + 2 * (3 - complex_dim) * (genus - 1) + 2 * marks + dim_base + dim_e
}

pub fn expected_dimension_of(model: &RingModel, class: &CurveClass, genus: i64, marks: i64) -> i64 {
    expected_dimension(model.lattice().chern(class), genus, marks, model.complex_dim() as i64, 0, 0)
}

/// Upper bound on ghost components used to bound the search. From
/// `Σ_v (2g_v − 2 + n_v) = 2g − 2 + k` with ghosts contributing at least 1 and
/// non-ghosts at least −1; for `k ≤ 2, g = 0` this is `#ghost ≤ #non-ghost`.
pub fn ghost_limit(non_ghost: usize, genus: u32, marks: u32) -> usize {
    (non_ghost as i64 + 2 * genus as i64 - 2 + marks as i64).max(0) as usize
}

/// Multisets of nonzero effective classes summing to `class`, each as a
/// non-increasing list.
pub fn class_decompositions(class: &CurveClass) -> Vec<Vec<CurveClass>> {
    let mut parts: Vec<CurveClass> = class.effective_parts().into_iter().filter(|c| !c.is_zero()).collect();
    parts.sort();
    parts.reverse();
    let mut out = Vec::new();
    let mut current = Vec::new();
    decompose(class, &parts, 0, &mut current, &mut out);
    out
}

fn decompose(
    rest: &CurveClass,
    parts: &[CurveClass],
    from: usize,
    current: &mut Vec<CurveClass>,
    out: &mut Vec<Vec<CurveClass>>,
) {
    if rest.is_zero() {
        out.push(current.clone());
        return;
    }
    for (i, p) in parts.iter().enumerate().skip(from) {
        let r = rest.sub(p);
        if r.is_effective() {
            current.push(p.clone());
            decompose(&r, parts, i, current, out);
            current.pop();
        }
    }
}

type Decoration = (u32, CurveClass, Vec<u32>);

/// Every stable decorated graph of total class `class`, genus `genus` and `marks`
/// marked points, as canonical forms in sorted order.
pub fn enumerate_strata(
    model: &RingModel,
    class: &CurveClass,
    genus: u32,
    marks: u32,
) -> Result<Vec<DualGraph>, StrataError> {
    let lattice = model.lattice();
    lattice.check_class(class)?;
    if !class.is_effective() {
        return Err(StrataError::NotEffective(class.clone()));
    }
    let mut found = BTreeSet::new();
    for parts in class_decompositions(class) {
        let ngh = parts.len();
        for gh in 0..=ghost_limit(ngh, genus, marks) {
            let v = ngh + gh;
            if v == 0 {
                continue;
            }
            let mut classes = parts.clone();
            classes.extend(std::iter::repeat_n(CurveClass::zero(class.rank()), gh));
            for decorations in decoration_multisets(&classes, genus, marks) {
                let vertex_genus: u32 = decorations.iter().map(|d| d.0).sum();
                let loops = (genus - vertex_genus) as usize;
                let mut perm = decorations.clone();
                loop {
                    attach_trees(&perm, loops, genus, marks, class, lattice, &mut found);
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn decoration_multisets(classes: &[CurveClass], genus: u32, marks: u32) -> BTreeSet<Vec<Decoration>> {
    let v = classes.len();
    let mut out = BTreeSet::new();
    let mut genera = vec![0u32; v];
    loop {
        if genera.iter().sum::<u32>() <= genus {
            let mut assign = vec![0usize; marks as usize];
            loop {
                let mut decs: Vec<Decoration> =
                    (0..v).map(|i| (genera[i], classes[i].clone(), Vec::new())).collect();
                for (m, &target) in assign.iter().enumerate() {
                    decs[target].2.push(m as u32 + 1);
                }
                decs.sort();
                out.insert(decs);
                if !odometer(&mut assign, v) {
                    break;
                }
            }
        }
        if !odometer_u32(&mut genera, genus + 1) {
            break;
        }
    }
    out
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn odometer_u32(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Recursive trees (vertex `i` hangs off some `j < i`) on the given labelled
/// decorations, plus `loops` extra nodes for positive first Betti number.
fn attach_trees(
    decorations: &[Decoration],
    loops: usize,
    genus: u32,
    marks: u32,
    class: &CurveClass,
    lattice: &ClassLattice,
    found: &mut BTreeSet<DualGraph>,
) {
    let v = decorations.len();
    let vertices: Vec<Vertex> =
        decorations.iter().map(|(g, c, m)| Vertex::new(*g, c.clone(), m.iter().copied())).collect();
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
    let mut parents = vec![0usize; v.saturating_sub(1)];
    loop {
        let tree: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
        let mut extra = vec![0usize; loops];
        loop {
            let mut edges = tree.clone();
            edges.extend(extra.iter().map(|&e| pairs[e]));
            let g = DualGraph::new(genus, marks, class.clone(), vertices.clone(), edges);
            if g.check_stability(lattice) {
                found.insert(g.canonical());
            }
            if !next_multiset(&mut extra, pairs.len()) {
                break;
            }
        }
        if !next_parent_vector(&mut parents) {
            break;
        }
    }
}

/// Non-decreasing index sequences over `0..base`.
fn next_multiset(idx: &mut [usize], base: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] + 1 < base {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[i];
            }
            return true;
        }
    }
    false
}

/// Parent vectors with `parents[i] ≤ i` (vertex `i + 1` attaches to a smaller label).
fn next_parent_vector(parents: &mut [usize]) -> bool {
    for i in 0..parents.len() {
        if parents[i] < i {
            parents[i] += 1;
            return true;
        }
        parents[i] = 0;
    }
    false
}

pub fn render_table(graphs: &[DualGraph]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>4}  {:<48} edges", "#", "vertices");
    for (i, g) in graphs.iter().enumerate() {
        let _ = writeln!(s, "{:>4}  {:<48} {}", i + 1, g.describe(), g.describe_edges());
    }
    s
}
