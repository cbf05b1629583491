use redei::arith::{Place, SquareClass};
use redei::symbol::{self, Violation};
use redei::{oracle, redeimatrix};

fn sc(n: i64) -> SquareClass {
    SquareClass::new(n).unwrap()
}

#[test]
fn validation_examples() {
    assert!(symbol::is_valid_triple(sc(-20), sc(41), sc(5)).unwrap());
    let v = symbol::validate_triple(sc(-1), sc(-1), sc(3)).unwrap();
    assert!(v.contains(&Violation::Hilbert { x: -1, y: -1, place: Place::Infinity }));
    for p in [17, 41, 73, 89, 97] {
        assert!(symbol::is_valid_triple(sc(-1), sc(2), sc(p)).unwrap());
    }
}

#[test]
fn twisting_group_examples() {
    let g = symbol::twisting_group(sc(-5), sc(41)).unwrap();
    let mut gens: Vec<i64> = g.generators.iter().map(|s| s.value()).collect();
    gens.sort();
    assert_eq!(gens, vec![-1, 5, 41]);
    let g = symbol::twisting_group(sc(-1), sc(2)).unwrap();
    assert!(g.contains(sc(-1)) && g.contains(sc(2)));
    let g = symbol::twisting_group(sc(5), sc(13)).unwrap();
    assert_eq!(g.elements().len(), 4);
}

#[test]
fn p_part_examples() {
    let w = symbol::minimally_ramified_F(sc(-5), sc(41)).unwrap();
    assert_eq!(symbol::p_part(&w, sc(5), Place::Finite(5)), Ok(-1));
    assert_eq!(symbol::p_part(&w, sc(5), Place::Infinity), Ok(1));
    let w = symbol::minimally_ramified_F(sc(-1), sc(17)).unwrap();
    let part = symbol::p_part(&w, sc(2), Place::Finite(2)).unwrap();
    let r8 = oracle::narrow_ranks(-68).unwrap().r8;
    assert_eq!(part == 1, r8 == 1);
}

#[test]
fn reciprocity_small_primes() {
    let (a, b, c) = (sc(5), sc(13), sc(29));
    if symbol::is_reciprocity_triple(a, b, c).unwrap() {
        assert!(symbol::verify_reciprocity(a, b, c).unwrap().consistent);
    }
    assert!(symbol::verify_reciprocity(sc(-1), sc(2), sc(17)).unwrap().consistent);
}

#[test]
fn matrix_examples() {
    for p in [-3i64, 5, -7, 13, -8, 8, -4] {
        let m = redeimatrix::build_R4(p).unwrap();
        assert_eq!(m.entries.to_rows(), vec![vec![0]], "D = {p}");
        assert_eq!(redeimatrix::second_kind_decompositions(p).unwrap().len(), 1);
    }
    let m = redeimatrix::build_R4(-68).unwrap();
    assert_eq!((m.entries.nrows(), m.entries.ncols()), (2, 2));
    assert_eq!(redeimatrix::r4(-68), Ok(1));
    let m8 = redeimatrix::build_R8(-68).unwrap();
    assert_eq!((m8.entries.nrows(), m8.entries.ncols()), (1, 2));
    assert_eq!(redeimatrix::r8(-68).unwrap(), oracle::narrow_ranks(-68).unwrap().r8);
    for d in [-5460, -1780] {
        let r = redeimatrix::ranks(d).unwrap();
        let o = oracle::narrow_ranks(d).unwrap();
        assert_eq!((r.r2, r.r4, r.r8), (o.r2, o.r4, o.r8), "D = {d}");
    }
}
