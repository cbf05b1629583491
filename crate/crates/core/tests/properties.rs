use proptest::prelude::*;

use redei::arith::{self, hilbert, hilbert_product, int, kronecker, Place, Rational, SquareClass};
use redei::quadfield::{self, primes_above, residue_symbol, valuation_at, QuadElt, Splitting};
use redei::redeimatrix;
use redei::symbol::{self, Side};
use redei::verify;

fn nonzero(max: i64) -> impl Strategy<Value = i64> {
    (-max..=max).prop_filter("non-zero", |&x| x != 0)
}

fn squarefree_nontrivial(max: i64) -> impl Strategy<Value = SquareClass> {
    nonzero(max)
        .prop_filter_map("squarefree, not 1", |x| {
            SquareClass::from_squarefree(x).ok().filter(|s| !s.is_trivial())
        })
}

fn small_prime() -> impl Strategy<Value = u64> {
    (3u64..400).prop_filter("odd prime", |&p| arith::is_prime(p))
}

fn places_of(a: i64, b: i64) -> Vec<Place> {
    let mut v = vec![Place::Infinity, Place::Finite(2)];
    for n in [a, b] {
        for p in arith::factor(n as i128).unwrap().primes() {
            if p != 2 {
                v.push(Place::Finite(p));
            }
        }
    }
    v.sort();
    v.dedup();
    v
}

fn fundamentals(max: i64) -> Vec<i64> {
    verify::fundamental_discriminants(max)
}

proptest! {
    #[test]
    fn kronecker_is_multiplicative(a in -3000i128..3000, b in -3000i128..3000, n in 1i128..3000) {
        prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
    }

    #[test]
    fn hilbert_is_bilinear(a in nonzero(10_000), a2 in nonzero(10_000), b in nonzero(10_000)) {
        for v in places_of(a * a2, b) {
            prop_assert_eq!(
                hilbert(&int(a * a2), &int(b), v),
                hilbert(&int(a), &int(b), v) * hilbert(&int(a2), &int(b), v),
                "at {}", v
            );
        }
    }

    #[test]
    fn product_formula(a in nonzero(1_000_000), b in nonzero(1_000_000)) {
        prop_assert_eq!(hilbert_product(&int(a), &int(b)), Ok(1));
    }

    #[test]
    fn product_formula_rational(a in nonzero(5000), da in 1i64..50, b in nonzero(5000), db in 1i64..50) {
        let x = Rational::new(a as i128, da as i128);
        let y = Rational::new(b as i128, db as i128);
        prop_assert_eq!(hilbert_product(&x, &y), Ok(1));
    }

    #[test]
    fn hilbert_trivial_away_from_ab(a in nonzero(5000), b in nonzero(5000), p in small_prime()) {
        prop_assume!(a % p as i64 != 0 && b % p as i64 != 0);
        prop_assert_eq!(hilbert(&int(a), &int(b), Place::Finite(p)), 1);
    }

    #[test]
    fn norm_is_multiplicative(
        a in squarefree_nontrivial(200),
        x in -100i128..100, y in -100i128..100, u in -100i128..100, w in -100i128..100,
    ) {
        let e = QuadElt::from_ints(x, y, a);
        let f = QuadElt::from_ints(u, w, a);
        prop_assert_eq!((e.clone() * f.clone()).norm(), e.norm() * f.norm());
    }

    #[test]
    fn split_roots_sum_to_zero(a in squarefree_nontrivial(500), p in small_prime()) {
        let (kind, ps) = primes_above(p, a).unwrap();
        if kind == Splitting::Split {
            prop_assert_eq!(ps.len(), 2);
            let m = ps[0].modulus();
            prop_assert_eq!((ps[0].root + ps[1].root).rem_euclid(m), 0);
            prop_assert_eq!((ps[0].root * ps[0].root - a.value() as i128).rem_euclid(m), 0);
        }
    }

    #[test]
    fn residue_symbol_square_invariance(
        a in squarefree_nontrivial(300), p in small_prime(),
        x in -60i128..60, y in -60i128..60, s in -30i128..30, t in -30i128..30,
    ) {
        let (kind, ps) = primes_above(p, a).unwrap();
        prop_assume!(kind == Splitting::Split);
        let beta = QuadElt::from_ints(x, y, a);
        let sq = QuadElt::from_ints(s, t, a);
        prop_assume!(!beta.is_zero() && !sq.is_zero());
        for pr in &ps {
            prop_assume!(valuation_at(&beta, pr).unwrap() == 0);
            let twisted = beta.clone() * sq.clone() * sq.clone();
            prop_assert_eq!(residue_symbol(&twisted, pr), residue_symbol(&beta, pr));
        }
    }

    #[test]
    fn conjugate_residues_give_kronecker_of_norm(
        a in squarefree_nontrivial(300), p in small_prime(),
        x in -60i128..60, y in -60i128..60,
    ) {
        let (kind, ps) = primes_above(p, a).unwrap();
        prop_assume!(kind == Splitting::Split);
        let beta = QuadElt::from_ints(x, y, a);
        prop_assume!(!beta.is_zero());
        let n = beta.norm().to_integer();
        prop_assume!(n % p as i128 != 0);
        let r = residue_symbol(&beta, &ps[0]).unwrap() * residue_symbol(&beta, &ps[1]).unwrap();
        prop_assert_eq!(r, kronecker(n, p as i128));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reciprocity_on_random_triples(seed in any::<u64>()) {
        let ts = verify::random_reciprocity_triples(seed, 1, 600).unwrap();
        let r = verify::reciprocity_sweep(&ts, 1);
        prop_assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn multiplicativity_in_c(seed in any::<u64>()) {
        let r = verify::multiplicativity(seed, 1, 500, 1).unwrap();
        prop_assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn witnesses_agree(seed in any::<u64>()) {
        let r = verify::twist_independence(seed, 1, 600, 3, 1).unwrap();
        prop_assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn side_consistency(seed in any::<u64>()) {
        let ts = verify::random_symbol_triples(seed, 1, 600).unwrap();
        let (a, b, c) = ts[0];
        let w = symbol::minimally_ramified_F(a, b).unwrap();
        for p in c.primes().into_iter().filter(|&p| p != 2) {
            let sa = symbol::p_part_on_side(&w, c, p, Side::A);
            let sb = symbol::p_part_on_side(&w, c, p, Side::B);
            if let (Ok(x), Ok(y)) = (sa, sb) {
                prop_assert_eq!(x, y, "[{}, {}, {}] at {}", a, b, c, p);
            }
        }
    }

    #[test]
    fn trivial_argument_gives_one(a in nonzero(2000), b in nonzero(2000)) {
        prop_assert_eq!(symbol::redei(1, a, b), Ok(1));
        prop_assert_eq!(symbol::redei(a, 1, b), Ok(1));
        prop_assert_eq!(symbol::redei(a, b, 1), Ok(1));
    }
}

#[test]
fn value_is_product_of_parts() {
    for (a, b, c) in verify::random_symbol_triples(99, 40, 800).unwrap() {
        let t = symbol::redei_symbol(a, b, c).unwrap();
        let prod: i8 = t.parts.values().product();
        assert_eq!(t.value, prod);
        for v in t.parts.keys() {
            assert!(symbol::places_dividing(c).contains(v));
        }
    }
}

#[test]
fn trivial_relation_on_second_kind_decompositions() {
    let mut checked = 0;
    for d in fundamentals(2000) {
        for dec in redeimatrix::second_kind_decompositions(d).unwrap() {
            if dec.d1 == 1 {
                continue;
            }
            let (x, y) = dec.radicands();
            let c = SquareClass::new(-dec.d1 * dec.d2).unwrap();
            let s = symbol::redei_symbol(x, y, c).unwrap();
            assert_eq!(s.value, 1, "D = {d}, ({}, {})", dec.d1, dec.d2);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn r4_column_sums_vanish() {
    for d in fundamentals(100_000) {
        let m = redeimatrix::build_R4(d).unwrap();
        assert_eq!(m.entries.column_sums(), 0, "D = {d}");
    }
}

#[test]
fn second_kind_count_and_rank_chain() {
    for d in fundamentals(10_000) {
        let r = redeimatrix::ranks(d).unwrap();
        assert!(r.r2 >= r.r4 && r.r4 >= r.r8, "D = {d}: {r:?}");
        let n = redeimatrix::second_kind_decompositions(d).unwrap().len();
        assert_eq!(n, 1 << r.r4, "D = {d}");
    }
}

#[test]
fn minimal_witnesses_pass_their_own_checks() {
    for (a, b, _) in verify::random_symbol_triples(5, 60, 1000).unwrap() {
        for w in symbol::alternative_witnesses(a, b, 3).unwrap() {
            assert!(symbol::is_minimally_ramified(&w).unwrap(), "{a}, {b}: {}", w.beta);
            assert!(w.solution.satisfies() && w.solution.is_primitive());
        }
    }
}

#[test]
fn dyadic_unit_classes_are_squares_for_squares() {
    for n in -60i64..=60 {
        let Ok(a) = SquareClass::from_squarefree(n) else { continue };
        if a.is_trivial() {
            continue;
        }
        for (x, y) in [(1, 0), (3, 0), (1, 2), (3, 4), (5, 2)] {
            let e = QuadElt::from_ints(x, y, a);
            let sq = e.clone() * e;
            if let Ok(c) = quadfield::dyadic_unit_class(&sq) {
                assert!(c.is_square, "a = {a}: ({x}, {y})^2");
            }
        }
    }
}
