//! Exact integer arithmetic: trial-division factorization, square classes in
//! Q*/Q*^2, Kronecker symbols, rational Hilbert symbols and the bookkeeping of
//! quadratic discriminants.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

/// Default limit on the cofactor that trial division is allowed to certify.
pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 48;

/// Factorization limit, overridable through `REDEI_FACTOR_BOUND`.
pub fn factor_bound() -> u64 {
    static BOUND: OnceLock<u64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var("REDEI_FACTOR_BOUND")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&b| b >= 4)
            .unwrap_or(DEFAULT_FACTOR_BOUND)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    /// Primes in strictly increasing order with positive exponents.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> i128 {
        let mut v: i128 = self.sign as i128;
        for &(p, e) in &self.factors {
            v *= (p as i128).pow(e);
        }
        v
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

pub fn factor(n: i128) -> Result<Factorization> {
    factor_with_bound(n, factor_bound())
}

pub fn factor_with_bound(n: i128, bound: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let sign = if n < 0 { -1 } else { 1 };
    let mut m = n.unsigned_abs();
    let mut factors = Vec::new();
    let limit = isqrt(bound as u128);
    let mut d: u128 = 2;
    while d * d <= m {
        if d > limit {
            return Err(Error::FactorLimitExceeded {
                n,
                cofactor: m as i128,
                bound,
            });
        }
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            factors.push((d as u64, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m as u64, 1));
    }
    Ok(Factorization { sign, factors })
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact square root of a non-negative integer, if it is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of a non-zero integer.
pub fn valuation(n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Squarefree integer in the class of `n` in Q*/Q*^2.
pub fn squarefree_part(n: i128) -> Result<i128> {
    let f = factor(n)?;
    let mut s: i128 = f.sign as i128;
    for (p, e) in f.factors {
        if e % 2 == 1 {
            s *= p as i128;
        }
    }
    Ok(s)
}

/// An element of Q*/Q*^2, stored as its unique squarefree representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SquareClass(i64);

impl SquareClass {
    pub const ONE: SquareClass = SquareClass(1);

    pub fn new(n: i64) -> Result<Self> {
        let s = squarefree_part(n as i128)?;
        Ok(SquareClass(s as i64))
    }

    /// Wraps a value already known to be squarefree.
    pub fn from_squarefree(n: i64) -> Result<Self> {
        let f = factor(n as i128)?;
        if !f.is_squarefree() {
            return Err(Error::NotSquarefree(n));
        }
        Ok(SquareClass(n))
    }

    pub fn from_rational(q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroInput);
        }
        let n = q.numer() * q.denom();
        let s = squarefree_part(n)?;
        i64::try_from(s).map(SquareClass).map_err(|_| Error::Overflow)
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 1
    }

    /// Product in Q*/Q*^2.
    pub fn mul(self, other: SquareClass) -> SquareClass {
        let g = self.0.gcd(&other.0);
        SquareClass((self.0 / g) * (other.0 / g))
    }

    pub fn discriminant(self) -> Result<i64> {
        discriminant(self)
    }

    pub fn factorization(self) -> Factorization {
        factor(self.0 as i128).expect("squarefree representatives are factorable")
    }

    pub fn primes(self) -> Vec<u64> {
        self.factorization().primes().collect()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn square_class(q: &Rational) -> Result<SquareClass> {
    SquareClass::from_rational(q)
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i128, n: i128) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for arbitrary integers.
pub fn kronecker(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut t = 1i8;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            t = -t;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            t = -t;
        }
        n >>= v;
    }
    t * jacobi(a, n)
}

/// Legendre symbol for an odd prime p.
pub fn legendre(a: i128, p: u64) -> i8 {
    jacobi(a, p as i128)
}

/// A place of Q: a finite prime or the archimedean place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn split_valuation(n: i128, p: u64) -> (u32, i128) {
    let pp = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % pp == 0 {
        n /= pp;
        v += 1;
    }
    (v, n)
}

/// Hilbert symbol (a,b)_v for non-zero integers.
pub fn hilbert_int(a: i128, b: i128, v: Place) -> i8 {
    assert!(a != 0 && b != 0, "Hilbert symbol of zero");
    match v {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let eps = |x: i128| ((x.rem_euclid(4) - 1) / 2) as u32;
            let omega = |x: i128| {
                let r = x.rem_euclid(8);
                u32::from(r == 3 || r == 5)
            };
            let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(w, p);
            }
            s
        }
    }
}

fn rational_to_int(q: &Rational) -> i128 {
    q.numer() * q.denom()
}

/// Hilbert symbol (a,b)_v for non-zero rationals.
pub fn hilbert(a: &Rational, b: &Rational, v: Place) -> i8 {
    hilbert_int(rational_to_int(a), rational_to_int(b), v)
}

/// The places at which (a,b)_v can be non-trivial: 2, the odd primes dividing
/// numerators and denominators of a and b, and infinity.
pub fn hilbert_places(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    let mut primes: Vec<u64> = vec![2];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        primes.extend(factor(*n)?.primes());
    }
    primes.sort_unstable();
    primes.dedup();
    let mut places: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    places.push(Place::Infinity);
    Ok(places)
}

/// Local Hilbert symbols at every place where they may be non-trivial.
pub fn local_hilbert_symbols(a: &Rational, b: &Rational) -> Result<Vec<(Place, i8)>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(hilbert_places(a, b)?
        .into_iter()
        .map(|v| (v, hilbert(a, b, v)))
        .collect())
}

/// Product of all local Hilbert symbols; always 1 for a correct implementation.
pub fn hilbert_product(a: &Rational, b: &Rational) -> Result<i8> {
    let prod: i8 = local_hilbert_symbols(a, b)?.iter().map(|&(_, s)| s).product();
    if prod != 1 {
        return Err(Error::ProductFormulaViolated {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(prod)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Discriminant of Q(sqrt a): a when a = 1 mod 4, otherwise 4a.
pub fn discriminant(a: SquareClass) -> Result<i64> {
    if a.is_trivial() {
        return Err(Error::TrivialClass);
    }
    let v = a.value();
    Ok(if v.rem_euclid(4) == 1 { v } else { 4 * v })
}

pub fn is_fundamental(d: i64) -> Result<bool> {
    if d == 0 || d == 1 {
        return Ok(false);
    }
    match d.rem_euclid(4) {
        1 => Ok(factor(d as i128)?.is_squarefree()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            Ok((r == 2 || r == 3) && factor(m as i128)?.is_squarefree())
        }
        _ => Ok(false),
    }
}

/// Signed prime discriminant p* = (-1)^((p-1)/2) p of an odd prime.
pub fn signed_prime(p: u64) -> i64 {
    if p % 4 == 1 {
        p as i64
    } else {
        -(p as i64)
    }
}

/// Factorization of a fundamental discriminant into prime discriminants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedPrimeDecomposition {
    /// Signed primes p* in increasing order of |p*|.
    pub odd_parts: Vec<i64>,
    /// One of 1, -4, 8, -8.
    pub two_part: i64,
}

impl SignedPrimeDecomposition {
    /// All prime discriminants, the 2-part first.
    pub fn parts(&self) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.odd_parts.len() + 1);
        if self.two_part != 1 {
            v.push(self.two_part);
        }
        v.extend_from_slice(&self.odd_parts);
        v
    }

    /// Rational primes matching `parts()`.
    pub fn primes(&self) -> Vec<u64> {
        self.parts()
            .iter()
            .map(|&q| if q % 2 == 0 { 2 } else { q.unsigned_abs() })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.odd_parts.len() + usize::from(self.two_part != 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn product(&self) -> i64 {
        self.parts().iter().product()
    }
}

pub fn signed_prime_decomposition(d: i64) -> Result<SignedPrimeDecomposition> {
    if !is_fundamental(d)? {
        return Err(Error::NotFundamental(d));
    }
    let f = factor(d as i128)?;
    let odd_parts: Vec<i64> = f.primes().filter(|&p| p != 2).map(signed_prime).collect();
    let odd_prod: i64 = odd_parts.iter().product();
    let two_part = d / odd_prod;
    debug_assert!([1, -4, 8, -8].contains(&two_part));
    Ok(SignedPrimeDecomposition {
        odd_parts,
        two_part,
    })
}

/// The discriminantal 2-part t_D of a fundamental discriminant.
pub fn two_part(d: i64) -> Result<i64> {
    Ok(signed_prime_decomposition(d)?.two_part)
}

pub(crate) fn rat_sign(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        let f = factor(1).unwrap();
        assert!(f.factors.is_empty());
        let f = factor(-820).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.factors, vec![(2, 2), (5, 1), (41, 1)]);
        let f = factor(2310).unwrap();
        assert_eq!(f.factors, vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1)]);
        assert_eq!(factor(0), Err(Error::ZeroInput));
    }

    #[test]
    fn factor_limit() {
        // 1000003 * 1000033 with a bound below the cofactor
        let n = 1_000_003i128 * 1_000_033;
        assert!(matches!(
            factor_with_bound(n, 1 << 20),
            Err(Error::FactorLimitExceeded { .. })
        ));
        let f = factor_with_bound(n, 1 << 48).unwrap();
        assert_eq!(f.factors, vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn square_class_examples() {
        assert_eq!(square_class(&int(12)).unwrap().value(), 3);
        assert_eq!(square_class(&int(-4)).unwrap().value(), -1);
        assert_eq!(square_class(&Rational::new(50, 9)).unwrap().value(), 2);
        assert_eq!(square_class(&int(0)), Err(Error::ZeroInput));
        let a = SquareClass::new(-15).unwrap();
        assert_eq!(a.mul(SquareClass::new(10).unwrap()).value(), -6);
        assert!(SquareClass::new(9).unwrap().is_trivial());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(41, 2), 1);
        assert_eq!(kronecker(17, 1), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(6, 3), 0);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
    }

    #[test]
    fn discriminant_examples() {
        let d = |n| discriminant(SquareClass::new(n).unwrap()).unwrap();
        assert_eq!(d(5), 5);
        assert_eq!(d(-5), -20);
        assert_eq!(d(2), 8);
        assert_eq!(d(-1), -4);
        assert_eq!(discriminant(SquareClass::ONE), Err(Error::TrivialClass));
    }

    #[test]
    fn decomposition_examples() {
        let s = signed_prime_decomposition(-820).unwrap();
        assert_eq!(s.odd_parts, vec![5, 41]);
        assert_eq!(s.two_part, -4);
        let s = signed_prime_decomposition(-4).unwrap();
        assert!(s.odd_parts.is_empty());
        assert_eq!(s.two_part, -4);
        let s = signed_prime_decomposition(60).unwrap();
        assert_eq!(s.odd_parts, vec![-3, 5]);
        assert_eq!(s.two_part, -4);
        assert_eq!(s.product(), 60);
        assert_eq!(
            signed_prime_decomposition(20),
            Err(Error::NotFundamental(20))
        );
        assert_eq!(
            signed_prime_decomposition(-8 * 5).unwrap().parts(),
            vec![-8, 5]
        );
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_int(-1, -1, Place::Infinity), -1);
        assert_eq!(hilbert_int(-1, -1, Place::Finite(2)), -1);
        for v in hilbert_places(&int(-20), &int(41)).unwrap() {
            assert_eq!(hilbert_int(-20, 41, v), 1, "place {v}");
        }
        assert_eq!(hilbert_product(&int(3), &int(5)), Ok(1));
        assert_eq!(hilbert_product(&int(-1), &int(2)), Ok(1));
        assert_eq!(hilbert_product(&int(-20), &int(41)), Ok(1));
    }

    /// Brute force: does z^2 = a x^2 + b y^2 have a primitive solution mod 2^k
    /// that lifts (checked with k large enough for squarefree a, b).
    fn dyadic_brute(a: i128, b: i128) -> i8 {
        let m = 64i128;
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                        continue;
                    }
                    if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn dyadic_hilbert_matches_brute_force() {
        let vals = [-6, -5, -3, -2, -1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15];
        for &a in &vals {
            for &b in &vals {
                assert_eq!(
                    hilbert_int(a, b, Place::Finite(2)),
                    dyadic_brute(a, b),
                    "({a},{b})_2"
                );
            }
        }
    }
}
