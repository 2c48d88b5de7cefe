use proptest::prelude::*;
use qhforge::floer::{arnold_report, fixtures, homology_ranks, FloerComplex, Generator};
use qhforge::novikov::{CurveClass, NovikovElement};
use qhforge::Rational;

fn ranks(c: &FloerComplex) -> Vec<(i64, usize)> {
    homology_ranks(c).unwrap().ranks.into_iter().collect()
}

fn betti_fixtures() -> Vec<(&'static str, FloerComplex, Vec<usize>)> {
    vec![
        ("sphere", fixtures::sphere(), vec![1, 0, 1]),
        ("torus", fixtures::torus(), vec![1, 2, 1]),
        ("genus two", fixtures::genus_two(), vec![1, 4, 1]),
        ("sphere with pair", fixtures::sphere_with_pair(), vec![1, 0, 1]),
    ]
}

#[test]
fn fixtures_square_to_zero() {
    for (name, c, _) in betti_fixtures() {
        assert!(c.validate().is_empty(), "{name}");
        assert!(c.d_squared_check().unwrap(), "{name}");
    }
    assert!(fixtures::interval().d_squared_check().unwrap());
    assert!(fixtures::cancellation_pair().d_squared_check().unwrap());
    assert!(!fixtures::broken().d_squared_check().unwrap());
}

#[test]
fn ranks_equal_betti_numbers() {
    for (name, c, betti) in betti_fixtures() {
        let want: Vec<(i64, usize)> =
            betti.iter().enumerate().filter(|(_, &b)| b > 0).map(|(i, &b)| (i as i64, b)).collect();
        assert_eq!(ranks(&c), want, "{name}");
        let r = arnold_report(&c, &betti).unwrap();
        assert!(r.ok(), "{name}: {}", r.render());
    }
}

#[test]
fn cancellation_complexes_are_acyclic() {
    assert!(homology_ranks(&fixtures::cancellation_pair()).unwrap().ranks.is_empty());
    assert!(homology_ranks(&fixtures::interval()).unwrap().ranks.is_empty());
}

#[test]
fn file_roundtrip_preserves_complex() {
    for (name, c, _) in betti_fixtures() {
        let back = FloerComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back.to_json(), c.to_json(), "{name}");
        assert_eq!(ranks(&back), ranks(&c), "{name}");
    }
}

fn base(i: usize) -> FloerComplex {
    match i {
        0 => fixtures::sphere(),
        1 => fixtures::torus(),
        _ => fixtures::genus_two(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cancelling_pairs_preserve_homology(which in 0usize..3, cz in 0i64..3, unit in 1i64..4, tail in -3i64..4, tail_deg in 1i64..4) {
        let c = base(which);
        let lat = c.lattice().clone();
        let u = NovikovElement::from_terms(
            lat,
            c.cutoff().clone(),
            [(CurveClass(vec![0]), Rational::from_integer(unit.into())), (CurveClass(vec![tail_deg]), Rational::from_integer(tail.into()))],
        ).unwrap();
        let a = Generator { id: "pa".into(), cz: cz + 1, action: Rational::from_integer((cz + 1).into()) };
        let b = Generator { id: "pb".into(), cz, action: Rational::from_integer(cz.into()) };
        let bigger = c.with_cancelling_pair(a, b, &u).unwrap();
        prop_assert!(bigger.d_squared_check().unwrap());
        prop_assert_eq!(ranks(&bigger), ranks(&c));
    }

    #[test]
    fn basis_changes_preserve_homology(which in 1usize..3, pick in 0usize..16, coef in -3i64..4) {
        let mut c = base(which);
        let saddles: Vec<String> = c.generators().iter().filter(|g| g.cz == 1).map(|g| g.id.clone()).collect();
        let x = saddles[pick % saddles.len()].clone();
        let z = saddles[(pick / saddles.len() + 1 + pick) % saddles.len()].clone();
        prop_assume!(x != z);
        let before = ranks(&c);
        let k = c.monomial(&[0], coef).unwrap();
        c.change_basis(&x, &z, &k).unwrap();
        prop_assert!(c.d_squared_check().unwrap());
        prop_assert_eq!(ranks(&c), before);
    }
}
