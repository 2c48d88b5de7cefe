mod common;

use std::collections::BTreeSet;

use qhforge::cohomology::builtin;
use qhforge::novikov::CurveClass;
use common::{brute_force, library_encoded, Encoded};
use qhforge::strata::enumerate_strata;

#[test]
fn enumeration_equals_brute_force() {
    let m = builtin("P2").unwrap();
    for d in 0..=3 {
        for k in 0..=2 {
            let graphs = enumerate_strata(&m, &CurveClass(vec![d]), 0, k).unwrap();
            let oracle = brute_force(d, k);
            assert_eq!(graphs.len(), oracle.len(), "d={d} k={k}");
            let ours: BTreeSet<Encoded> = graphs.iter().map(library_encoded).collect();
            assert_eq!(ours.len(), graphs.len(), "duplicate isomorphism classes at d={d} k={k}");
            assert_eq!(ours, oracle, "d={d} k={k}");
        }
    }
}

#[test]
fn every_graph_is_stable_and_meets_ghost_bound() {
    let m = builtin("P2").unwrap();
    for d in 1..=3 {
        for k in 0..=2 {
            for g in enumerate_strata(&m, &CurveClass(vec![d]), 0, k).unwrap() {
                assert!(g.check_stability(m.lattice()), "{}", g.describe());
                assert!(g.ghost_bound(), "{}", g.describe());
                assert!(g.ghost_count() <= g.non_ghost_count());
            }
        }
    }
}

#[test]
fn known_small_counts() {
    // d=1: the line itself; d=2, k=0: a conic or two lines meeting
    assert_eq!(brute_force(1, 0).len(), 1);
    assert_eq!(brute_force(2, 0).len(), 2);
    assert_eq!(brute_force(0, 2).len(), 0);
}
