//! The Rédei symbol [a,b,c]: minimally ramified witnesses built from conic
//! solutions, their local p-parts, and the assembled symbol.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{self, hilbert_int, Place, Rational, SquareClass};
use crate::conic::{self, ConicSolution};
use crate::error::{Error, Result};
use crate::quadfield::{self, primes_above, QuadElt, Splitting};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A Hilbert symbol (x, y)_v equal to -1.
    Hilbert { x: i64, y: i64, place: Place },
    /// A prime dividing all three discriminants.
    SharedPrime { p: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hilbert { x, y, place } => {
                write!(f, "hilbert({x},{y}) = -1 at {place}")
            }
            Violation::SharedPrime { p } => write!(f, "{p} divides all three discriminants"),
        }
    }
}

/// Discriminant with the convention Δ(1) = 1.
fn disc_or_one(a: SquareClass) -> i64 {
    if a.is_trivial() {
        1
    } else {
        arith::discriminant(a).expect("non-trivial class")
    }
}

/// Every failing Hilbert condition and every prime shared by all three
/// discriminants. An empty list means the triple is valid.
pub fn validate_triple(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (x, y) in [(a, b), (a, c), (b, c)] {
        let (xi, yi) = (arith::int(x.value()), arith::int(y.value()));
        for v in arith::hilbert_places(&xi, &yi)? {
            if hilbert_int(x.value() as i128, y.value() as i128, v) == -1 {
                out.push(Violation::Hilbert {
                    x: x.value(),
                    y: y.value(),
                    place: v,
                });
            }
        }
    }
    let g = disc_or_one(a).gcd(&disc_or_one(b)).gcd(&disc_or_one(c));
    for p in arith::factor(g as i128)?.primes() {
        out.push(Violation::SharedPrime { p });
    }
    Ok(out)
}

pub fn is_valid_triple(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<bool> {
    Ok(validate_triple(a, b, c)?.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistingGroup {
    pub generators: Vec<SquareClass>,
}

impl TwistingGroup {
    /// All products of subsets of the generators, without repetition.
    pub fn elements(&self) -> Vec<SquareClass> {
        let mut out = vec![SquareClass::ONE];
        for &g in &self.generators {
            let more: Vec<SquareClass> = out.iter().map(|&e| e.mul(g)).collect();
            for m in more {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }

    pub fn contains(&self, t: SquareClass) -> bool {
        self.elements().contains(&t)
    }
}

fn two_part_class(d: i64) -> SquareClass {
    let t = arith::two_part(d).expect("fundamental discriminant");
    SquareClass::new(t).expect("non-zero")
}

pub fn twisting_group(a: SquareClass, b: SquareClass) -> Result<TwistingGroup> {
    if a.is_trivial() || b.is_trivial() {
        return Err(Error::TrivialClass);
    }
    let (da, db) = (arith::discriminant(a)?, arith::discriminant(b)?);
    let mut odd: Vec<u64> = a.primes().into_iter().chain(b.primes()).filter(|&p| p != 2).collect();
    odd.sort_unstable();
    odd.dedup();
    let mut gens: Vec<SquareClass> = odd
        .into_iter()
        .map(|p| SquareClass::new(arith::signed_prime(p)).expect("non-zero"))
        .collect();
    gens.push(two_part_class(da));
    gens.push(two_part_class(db));
    if da % 2 == 0 && db % 2 == 0 {
        gens.push(SquareClass::new(-1)?);
        gens.push(SquareClass::new(2)?);
    }
    let mut out: Vec<SquareClass> = Vec::new();
    for g in gens {
        if !g.is_trivial() && !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(TwistingGroup { generators: out })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RamCase {
    UnramifiedAtTwo,
    TwoMinimal,
    OddOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    #[serde(rename = "A_SIDE")]
    A,
    #[serde(rename = "B_SIDE")]
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// The dyadic requirement on a witness for (a, b), and the side on which it
/// is tested.
pub fn ram_case(a: SquareClass, b: SquareClass) -> Result<(RamCase, Side)> {
    let (da, db) = (arith::discriminant(a)?, arith::discriminant(b)?);
    let (ra, rb) = (da.rem_euclid(8), db.rem_euclid(8));
    if (da % 2 != 0 && db % 2 != 0) || ra == 1 || rb == 1 {
        let side = if db % 2 != 0 { Side::A } else { Side::B };
        return Ok((RamCase::UnramifiedAtTwo, side));
    }
    match (ra, rb) {
        (4, 5) => Ok((RamCase::TwoMinimal, Side::A)),
        (5, 4) => Ok((RamCase::TwoMinimal, Side::B)),
        _ => Ok((RamCase::OddOnly, Side::A)),
    }
}

/// A generator of a minimally ramified cyclic quartic extension of
/// Q(sqrt ab): beta over Q(sqrt a) of norm b and alpha over Q(sqrt b) of
/// norm a, both up to squares.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MinRamWitness {
    pub a: SquareClass,
    pub b: SquareClass,
    pub beta: QuadElt,
    pub alpha: QuadElt,
    pub twist: SquareClass,
    pub solution: ConicSolution,
    pub ram_case: RamCase,
}

impl MinRamWitness {
    fn side(&self, side: Side) -> (&QuadElt, SquareClass) {
        match side {
            Side::A => (&self.beta, self.a),
            Side::B => (&self.alpha, self.b),
        }
    }

    /// The twist F_t, with beta and alpha multiplied by t.
    pub fn twisted(&self, t: SquareClass) -> MinRamWitness {
        let q = Rational::from_integer(t.value() as i128);
        MinRamWitness {
            beta: self.beta.scale(q),
            alpha: self.alpha.scale(q),
            twist: self.twist.mul(t),
            ..self.clone()
        }
    }
}

fn rat_valuation(q: &Rational, p: u64) -> i64 {
    let v = |n: i128| if n == 0 { 0 } else { arith::valuation(n, p) as i64 };
    v(*q.numer()) - v(*q.denom())
}

/// Whether every prime of Q(sqrt s) above the odd prime p has even
/// valuation in elt.
fn even_valuations_at(elt: &QuadElt, s: SquareClass, p: u64) -> Result<bool> {
    let (kind, primes) = primes_above(p, s)?;
    if kind == Splitting::Inert {
        return Ok(rat_valuation(&elt.norm(), p).rem_euclid(4) == 0);
    }
    for pr in &primes {
        if quadfield::valuation_at(elt, pr)? % 2 == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn norm_primes(elt: &QuadElt) -> Result<Vec<u64>> {
    let n = elt.norm();
    let mut ps: Vec<u64> = arith::factor(*n.numer())?.primes().collect();
    ps.extend(arith::factor(*n.denom())?.primes());
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Checks the three conditions of minimal ramification for (beta, alpha).
pub fn is_minimally_ramified(w: &MinRamWitness) -> Result<bool> {
    let (da, db) = (arith::discriminant(w.a)?, arith::discriminant(w.b)?);
    let g = da.gcd(&db);
    for p in norm_primes(&w.beta)? {
        if p == 2 || g % p as i64 == 0 || db % p as i64 == 0 {
            continue;
        }
        if !even_valuations_at(&w.beta, w.a, p)? {
            return Ok(false);
        }
    }
    for p in norm_primes(&w.alpha)? {
        if p == 2 || g % p as i64 == 0 || db % p as i64 != 0 {
            continue;
        }
        if !even_valuations_at(&w.alpha, w.b, p)? {
            return Ok(false);
        }
    }
    let (case, side) = ram_case(w.a, w.b)?;
    let (elt, _) = w.side(side);
    match case {
        RamCase::UnramifiedAtTwo => quadfield::is_unramified_at_two(elt),
        RamCase::TwoMinimal => quadfield::is_conductor_two(elt),
        RamCase::OddOnly => Ok(true),
    }
}

/// Twists tried, in order, to make a conic witness minimally ramified.
pub const TWIST_ORDER: [i64; 4] = [1, -1, 2, -2];

/// Builds beta = x + y sqrt(a), alpha = 2(x + z sqrt(b)) from a solution and
/// applies the first twist in `TWIST_ORDER` that is minimally ramified.
pub fn witness_from_solution(a: SquareClass, b: SquareClass, sol: &ConicSolution) -> Result<MinRamWitness> {
    if a == b {
        return Err(Error::DegenerateSquareClass {
            a: a.value(),
            b: b.value(),
        });
    }
    debug_assert!(sol.satisfies());
    let (case, _) = ram_case(a, b)?;
    let base = MinRamWitness {
        a,
        b,
        beta: QuadElt::from_ints(sol.x as i128, sol.y as i128, a),
        alpha: QuadElt::from_ints(2 * sol.x as i128, 2 * sol.z as i128, b),
        twist: SquareClass::ONE,
        solution: *sol,
        ram_case: case,
    };
    for t in TWIST_ORDER {
        let w = base.twisted(SquareClass::new(t)?);
        if is_minimally_ramified(&w)? {
            return Ok(w);
        }
    }
    Err(Error::RamificationAssertFailed {
        place: Place::Finite(2),
        detail: format!("no twist in {{±1, ±2}} of {} is minimally ramified", base.beta),
    })
}

/// The witness from the canonical conic solution.
#[allow(non_snake_case)]
pub fn minimally_ramified_F(a: SquareClass, b: SquareClass) -> Result<MinRamWitness> {
    if a.is_trivial() || b.is_trivial() {
        return Err(Error::TrivialClass);
    }
    if a == b {
        return Err(Error::DegenerateSquareClass {
            a: a.value(),
            b: b.value(),
        });
    }
    let sol = conic::solve(a, b)?;
    witness_from_solution(a, b, &sol)
}

/// The twist of a minimally ramified witness by t, checked to remain
/// minimally ramified.
pub fn twist_witness(w: &MinRamWitness, t: SquareClass) -> Result<MinRamWitness> {
    let tw = w.twisted(t);
    if !is_minimally_ramified(&tw)? {
        return Err(Error::RamificationAssertFailed {
            place: Place::Finite(2),
            detail: format!("twist by {t} of {} is not minimally ramified", w.beta),
        });
    }
    Ok(tw)
}

/// `n` distinct minimally ramified witnesses: the canonical one, then
/// witnesses from further conic solutions twisted by elements of T_{a,b}.
pub fn alternative_witnesses(a: SquareClass, b: SquareClass, n: usize) -> Result<Vec<MinRamWitness>> {
    let first = minimally_ramified_F(a, b)?;
    let group = twisting_group(a, b)?.elements();
    let sols = conic::enumerate_solutions(a, b, n)?;
    let mut out = vec![first];
    let mut k = 0usize;
    while out.len() < n && k < 4 * n * group.len().max(1) {
        let sol = &sols[k % sols.len()];
        let t = group[(k + 1) % group.len()];
        k += 1;
        let w = twist_witness(&witness_from_solution(a, b, sol)?, t)?;
        if !out.iter().any(|o| o.beta == w.beta) {
            out.push(w);
        }
    }
    Ok(out)
}

fn divides(v: Place, c: SquareClass) -> bool {
    match v {
        Place::Infinity => c.value() < 0,
        Place::Finite(p) => c.value() % p as i64 == 0,
    }
}

/// p-part at an odd prime computed on one side, if that side offers a prime
/// of degree one with even valuation. `prefer_unit` restricts to valuation 0
/// at a split prime.
fn odd_part_on(w: &MinRamWitness, p: u64, side: Side, prefer_unit: bool) -> Result<Option<i8>> {
    let (elt, s) = w.side(side);
    let (kind, primes) = primes_above(p, s)?;
    if kind == Splitting::Inert {
        return Ok(None);
    }
    if prefer_unit && kind != Splitting::Split {
        return Ok(None);
    }
    for pr in &primes {
        let v = quadfield::valuation_at(elt, pr)?;
        if (prefer_unit && v == 0) || (!prefer_unit && v % 2 == 0) {
            return quadfield::residue_symbol(elt, pr).map(Some);
        }
    }
    Ok(None)
}

/// The p-part at an odd prime p | c evaluated on a fixed side.
pub fn p_part_on_side(w: &MinRamWitness, c: SquareClass, p: u64, side: Side) -> Result<i8> {
    let v = Place::Finite(p);
    if p == 2 || !divides(v, c) {
        return Err(Error::PartUndefined { place: v, c: c.value() });
    }
    if let Some(s) = odd_part_on(w, p, side, true)? {
        return Ok(s);
    }
    odd_part_on(w, p, side, false)?.ok_or_else(|| Error::RamificationAssertFailed {
        place: v,
        detail: format!("no unramified prime of degree one on side {side}"),
    })
}

fn dyadic_part(w: &MinRamWitness) -> Result<(i8, Side)> {
    let v = Place::Finite(2);
    for side in [Side::A, Side::B] {
        let (elt, s) = w.side(side);
        if s.value().rem_euclid(8) != 1 {
            continue;
        }
        let (_, primes) = primes_above(2, s)?;
        let mut cands = Vec::new();
        for pr in primes {
            let val = quadfield::valuation_at(elt, &pr)?;
            cands.push((val, pr.root, pr));
        }
        cands.sort_by_key(|(val, root, _)| (*val, *root));
        for (val, _, pr) in &cands {
            if val % 2 == 1 {
                continue;
            }
            let u = quadfield::dyadic_embedding(elt, pr, 3)?;
            match u {
                1 => return Ok((1, side)),
                5 => return Ok((-1, side)),
                _ => {}
            }
        }
        return Err(Error::RamificationAssertFailed {
            place: v,
            detail: format!("{elt} is ramified at both primes above 2"),
        });
    }
    Err(Error::RamificationAssertFailed {
        place: v,
        detail: "neither radicand is 1 mod 8".into(),
    })
}

/// The local factor of [a,b,c] at a place v dividing c, with the side used.
pub fn p_part_with_side(w: &MinRamWitness, c: SquareClass, v: Place) -> Result<(i8, Side)> {
    if !divides(v, c) {
        return Err(Error::PartUndefined { place: v, c: c.value() });
    }
    match v {
        Place::Infinity => {
            if w.a.value() < 0 {
                return Err(Error::RamificationAssertFailed {
                    place: v,
                    detail: "imaginary base field at a real place".into(),
                });
            }
            Ok((w.beta.real_sign(), Side::A))
        }
        Place::Finite(2) => dyadic_part(w),
        Place::Finite(p) => {
            for (side, unit) in [(Side::A, true), (Side::B, true), (Side::A, false), (Side::B, false)] {
                if let Some(s) = odd_part_on(w, p, side, unit)? {
                    return Ok((s, side));
                }
            }
            Err(Error::RamificationAssertFailed {
                place: v,
                detail: "no unramified prime of degree one on either side".into(),
            })
        }
    }
}

/// The local factor at v; +1 when v does not divide c.
pub fn p_part(w: &MinRamWitness, c: SquareClass, v: Place) -> Result<i8> {
    if !divides(v, c) {
        return Ok(1);
    }
    Ok(p_part_with_side(w, c, v)?.0)
}

/// The places at which a p-part of [a,b,c] can be non-trivial.
pub fn places_dividing(c: SquareClass) -> Vec<Place> {
    let mut out: Vec<Place> = c.primes().into_iter().map(Place::Finite).collect();
    if c.value() < 0 {
        out.push(Place::Infinity);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolTrace {
    pub a: SquareClass,
    pub b: SquareClass,
    pub c: SquareClass,
    pub value: i8,
    pub parts: BTreeMap<Place, i8>,
    pub base_field_per_place: BTreeMap<Place, Side>,
    pub witness: Option<MinRamWitness>,
}

/// The symbol evaluated with a given witness for (a, b).
pub fn symbol_with_witness(w: &MinRamWitness, c: SquareClass) -> Result<SymbolTrace> {
    let mut parts = BTreeMap::new();
    let mut sides = BTreeMap::new();
    let mut value = 1i8;
    for v in places_dividing(c) {
        let (s, side) = p_part_with_side(w, c, v)?;
        value *= s;
        parts.insert(v, s);
        sides.insert(v, side);
    }
    Ok(SymbolTrace {
        a: w.a,
        b: w.b,
        c,
        value,
        parts,
        base_field_per_place: sides,
        witness: Some(w.clone()),
    })
}

fn check_triple(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<()> {
    let violations = validate_triple(a, b, c)?;
    if !violations.is_empty() {
        return Err(Error::InvalidTriple(violations));
    }
    Ok(())
}

/// The Rédei symbol [a,b,c] with the trace of its computation.
pub fn redei_symbol(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<SymbolTrace> {
    // the trivial-argument rule applies before the Hilbert conditions
    if a.is_trivial() || b.is_trivial() || c.is_trivial() {
        return Ok(SymbolTrace {
            a,
            b,
            c,
            value: 1,
            parts: BTreeMap::new(),
            base_field_per_place: BTreeMap::new(),
            witness: None,
        });
    }
    check_triple(a, b, c)?;
    if a == b {
        return Err(Error::DegenerateSquareClass {
            a: a.value(),
            b: b.value(),
        });
    }
    let w = minimally_ramified_F(a, b)?;
    symbol_with_witness(&w, c)
}

/// Convenience wrapper taking arbitrary non-zero integers, reduced to their
/// square classes.
pub fn redei(a: i64, b: i64, c: i64) -> Result<i8> {
    Ok(redei_symbol(SquareClass::new(a)?, SquareClass::new(b)?, SquareClass::new(c)?)?.value)
}

/// Whether (a, b, c) can enter a reciprocity check: valid, and no argument or
/// pairwise product trivial.
pub fn is_reciprocity_triple(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<bool> {
    if [a, b, c, a.mul(b), a.mul(c), b.mul(c)].iter().any(|s| s.is_trivial()) {
        return Ok(false);
    }
    is_valid_triple(a, b, c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReciprocityReport {
    pub triple: (i64, i64, i64),
    pub values: Vec<((i64, i64, i64), i8)>,
    pub consistent: bool,
}

/// Evaluates the symbol for all six orderings independently.
pub fn verify_reciprocity(a: SquareClass, b: SquareClass, c: SquareClass) -> Result<ReciprocityReport> {
    let perms = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
    let mut values = Vec::with_capacity(6);
    for (x, y, z) in perms {
        let v = redei_symbol(x, y, z)?.value;
        values.push(((x.value(), y.value(), z.value()), v));
    }
    let consistent = values.iter().all(|&(_, v)| v == values[0].1);
    Ok(ReciprocityReport {
        triple: (a.value(), b.value(), c.value()),
        values,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(n: i64) -> SquareClass {
        SquareClass::new(n).unwrap()
    }

    #[test]
    fn worked_example() {
        assert_eq!(redei(-20, 41, 5), Ok(-1));
        assert_eq!(redei(-20, 41, 41), Ok(-1));
        assert_eq!(redei(-5, 41, 5), Ok(-1));
        let w = minimally_ramified_F(sc(-5), sc(41)).unwrap();
        assert_eq!(w.beta, QuadElt::from_ints(12, 2, sc(-5)));
        assert_eq!(w.twist, sc(2));
        assert_eq!(w.ram_case, RamCase::UnramifiedAtTwo);
        for t in [1, -1] {
            let bad = QuadElt::from_ints(6 * t, 1, sc(-5));
            assert!(!quadfield::is_unramified_at_two(&bad).unwrap());
        }
    }

    #[test]
    fn validation() {
        assert!(validate_triple(sc(-5), sc(41), sc(5)).unwrap().is_empty());
        let v = validate_triple(sc(-1), sc(-1), sc(3)).unwrap();
        assert!(v.contains(&Violation::Hilbert {
            x: -1,
            y: -1,
            place: Place::Infinity
        }));
        assert!(validate_triple(sc(-1), sc(2), sc(17)).unwrap().is_empty());
    }

    #[test]
    fn twisting_groups() {
        assert_eq!(
            twisting_group(sc(-5), sc(41)).unwrap().generators,
            vec![sc(5), sc(41), sc(-1)]
        );
        let g = twisting_group(sc(-1), sc(2)).unwrap().generators;
        assert!(g.contains(&sc(-1)) && g.contains(&sc(2)));
        assert_eq!(twisting_group(sc(5), sc(13)).unwrap().generators, vec![sc(5), sc(13)]);
    }

    #[test]
    fn two_minimal_case() {
        let w = minimally_ramified_F(sc(-1), sc(5)).unwrap();
        assert_eq!(w.ram_case, RamCase::TwoMinimal);
        assert!(quadfield::is_conductor_two(&w.beta).unwrap());
    }

    #[test]
    fn trivial_arguments() {
        assert_eq!(redei(1, 7, 11), Ok(1));
        assert_eq!(redei(5, 1, -3), Ok(1));
        assert!(matches!(redei(-1, -1, 3), Err(Error::InvalidTriple(_))));
        assert!(matches!(redei(2, 8, 17), Err(Error::DegenerateSquareClass { .. })));
    }

    #[test]
    fn minus_one_two_family() {
        for p in [17i64, 41, 73, 89, 97, 113] {
            let r = verify_reciprocity(sc(-1), sc(p), sc(2)).unwrap();
            assert!(r.consistent, "{r:?}");
        }
    }

    #[test]
    fn worked_reciprocity() {
        let r = verify_reciprocity(sc(-5), sc(41), sc(5));
        // (41, 5) and (-5, 5) are fine but [a, c, b] needs a != c
        assert!(r.is_ok(), "{r:?}");
        assert!(r.unwrap().consistent);
    }
}
