//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qhforge::strata::DualGraph;

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let fact = |m: u64| (1..=m).fold(BigInt::one(), |a, i| a * i);
    fact(n) / (fact(k) * fact(n - k))
}

/// `N_d = Σ_{d1+d2=d} N_{d1} N_{d2} d1² d2 [d2·C(3d−4, 3d1−2) − d1·C(3d−4, 3d1−1)]`, `N_1 = 1`.
pub fn kontsevich_oracle(max_d: usize) -> Vec<BigInt> {
    let mut n = vec![BigInt::zero(), BigInt::one()];
    for d in 2..=max_d {
        let mut total = BigInt::zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let top = (3 * d - 4) as u64;
            let c1 = binomial(top, (3 * d1 - 2) as u64);
            let c2 = binomial(top, (3 * d1 - 1) as u64);
            let w = BigInt::from(d2) * c1 - BigInt::from(d1) * c2;
            total += &n[d1] * &n[d2] * BigInt::from(d1 * d1 * d2) * w;
        }
        n.push(total);
    }
    n.split_off(1)
}

/// Decoration per vertex (degree, sorted marks) plus sorted edge list.
pub type Encoded = (Vec<(i64, Vec<u32>)>, Vec<(usize, usize)>);

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn encode(deco: &[(i64, Vec<u32>)], edges: &[(usize, usize)], perms: &[Vec<usize>]) -> Encoded {
    perms
        .iter()
        .map(|p| {
            let mut d = vec![(0, vec![]); deco.len()];
            for (old, &new) in p.iter().enumerate() {
                d[new] = deco[old].clone();
            }
            let mut e: Vec<(usize, usize)> =
                edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort();
            (d, e)
        })
        .min()
        .expect("at least one permutation")
}

/// Tree on `0..n` from a Prüfer sequence.
fn prufer_tree(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        return vec![];
    }
    let mut degree = vec![1; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::new();
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn sequences(len: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|s| (0..base).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    out
}

fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|first| compositions(total - first, parts - 1).into_iter().map(move |r| [vec![first], r].concat()))
        .collect()
}

/// Exhaustive genus-0 stable decorated trees in `P^2` of degree `d` with `k` marks.
pub fn brute_force(d: i64, k: u32) -> BTreeSet<Encoded> {
    let mut out = BTreeSet::new();
    let max_n = (2 * d + 1).max(1) as usize;
    for n in 1..=max_n {
        let perms = permutations(n);
        let trees: Vec<Vec<(usize, usize)>> =
            if n == 1 { vec![vec![]] } else { sequences(n - 2, n).iter().map(|s| prufer_tree(s, n)).collect() };
        let classes = compositions(d, n);
        let marks = sequences(k as usize, n);
        for edges in &trees {
            let mut val = vec![0usize; n];
            for &(a, b) in edges {
                val[a] += 1;
                val[b] += 1;
            }
            for cls in &classes {
                for m in &marks {
                    let mut marked = vec![0usize; n];
                    for &v in m {
                        marked[v] += 1;
                    }
                    if (0..n).any(|v| cls[v] == 0 && val[v] + marked[v] < 3) {
                        continue;
                    }
                    let deco: Vec<(i64, Vec<u32>)> = (0..n)
                        .map(|v| {
                            let ms = m.iter().enumerate().filter(|(_, &w)| w == v).map(|(i, _)| i as u32 + 1).collect();
                            (cls[v], ms)
                        })
                        .collect();
                    out.insert(encode(&deco, edges, &perms));
                }
            }
        }
    }
    out
}

pub fn library_encoded(g: &DualGraph) -> Encoded {
    let deco: Vec<(i64, Vec<u32>)> =
        g.vertices.iter().map(|v| (v.class.0[0], v.marks.iter().copied().collect())).collect();
    encode(&deco, &g.edges, &permutations(g.vertices.len()))
}

/// (c_1(A), g, k, dim_C X, dim base, dim E, value worked out by hand).
pub const DIMENSION_CASES: [(i64, i64, i64, i64, i64, i64, i64); 20] = [
    (3, 0, 0, 2, 0, 0, 4),
    (3, 0, 2, 2, 0, 0, 8),
    (6, 0, 5, 2, 0, 0, 20),
    (9, 0, 8, 2, 0, 0, 32),
    (0, 0, 3, 2, 0, 0, 4),
    (4, 0, 0, 3, 0, 0, 8),
    (4, 1, 0, 3, 0, 0, 8),
    (2, 0, 0, 1, 0, 0, 0),
    (2, 0, 3, 1, 0, 0, 6),
    (0, 1, 1, 2, 0, 0, 2),
    (3, 2, 0, 2, 0, 0, 8),
    (0, 2, 0, 1, 0, 0, 4),
    (0, 0, 3, 3, 2, 0, 8),
    (3, 0, 1, 2, 4, 2, 12),
    (1, 0, 0, 4, 0, 0, 4),
    (1, 3, 0, 4, 0, 0, -2),
    (5, 0, 4, 5, 0, 0, 22),
    (0, 0, 0, 0, 0, 0, -6),
    (2, 1, 2, 3, 0, 3, 11),
    (-1, 0, 2, 2, 0, 0, 0),
];
