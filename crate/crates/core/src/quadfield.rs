//! Exact arithmetic in quadratic fields Q(sqrt a): elements, norms, primes of
//! degree one, residue symbols and the dyadic congruences modulo 4.

use std::fmt;
use std::ops::{Mul, Neg};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{self, legendre, Rational, SquareClass};
use crate::error::{Error, Result};

/// Default Hensel precision for stored roots.
pub const DEFAULT_PRECISION: u32 = 6;

/// Largest modulus used for p-adic computations; keeps products inside u128.
const MAX_MODULUS: i128 = 1 << 62;

/// The element x + y sqrt(a).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElt {
    pub x: Rational,
    pub y: Rational,
    pub a: SquareClass,
}

impl QuadElt {
    pub fn new(x: Rational, y: Rational, a: SquareClass) -> Self {
        assert!(
            y.is_zero() || !a.is_trivial(),
            "irrational part over the trivial class"
        );
        QuadElt { x, y, a }
    }

    pub fn from_ints(x: i128, y: i128, a: SquareClass) -> Self {
        Self::new(Rational::from_integer(x), Rational::from_integer(y), a)
    }

    pub fn rational(q: Rational, a: SquareClass) -> Self {
        Self::new(q, Rational::zero(), a)
    }

    pub fn one(a: SquareClass) -> Self {
        Self::from_ints(1, 0, a)
    }

    /// 1 + sqrt(a).
    pub fn one_plus_root(a: SquareClass) -> Self {
        Self::from_ints(1, 1, a)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn norm(&self) -> Rational {
        let a = Rational::from_integer(self.a.value() as i128);
        self.x * self.x - a * self.y * self.y
    }

    pub fn trace(&self) -> Rational {
        self.x * Rational::from_integer(2)
    }

    pub fn conj(&self) -> Self {
        QuadElt::new(self.x, -self.y, self.a)
    }

    pub fn scale(&self, q: Rational) -> Self {
        QuadElt::new(self.x * q, self.y * q, self.a)
    }

    pub fn inverse(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        self.conj().scale(n.recip())
    }

    /// Sign of the image under the real embedding with sqrt(a) > 0.
    pub fn real_sign(&self) -> i8 {
        assert!(self.a.value() > 0, "no real embedding");
        let sx = arith::rat_sign(&self.x);
        let sy = arith::rat_sign(&self.y);
        if sx == 0 || sx == sy {
            return if sx == 0 { sy } else { sx };
        }
        if sy == 0 {
            return sx;
        }
        let a = Rational::from_integer(self.a.value() as i128);
        let x2 = self.x * self.x;
        let ay2 = a * self.y * self.y;
        if x2 > ay2 {
            sx
        } else {
            sy
        }
    }

    /// Integers (X, Y) with X + Y sqrt(a) = L^2 (x + y sqrt(a)) for the
    /// least common denominator L; the factor L^2 keeps the square class.
    pub fn integral_scaled(&self) -> Result<(i128, i128)> {
        let l = self.x.denom().lcm(self.y.denom());
        let l2 = l.checked_mul(l).ok_or(Error::Overflow)?;
        let xs = (self.x * Rational::from_integer(l2)).to_integer();
        let ys = (self.y * Rational::from_integer(l2)).to_integer();
        Ok((xs, ys))
    }

    /// Coordinates (u0, u1) on the basis 1, theta of the maximal order, where
    /// theta = (1 + sqrt a)/2 for a = 1 mod 4 and sqrt a otherwise.
    pub fn theta_coords(&self) -> (Rational, Rational) {
        if self.a.value().rem_euclid(4) == 1 {
            (self.x - self.y, self.y * Rational::from_integer(2))
        } else {
            (self.x, self.y)
        }
    }
}

impl Mul for &QuadElt {
    type Output = QuadElt;
    fn mul(self, o: &QuadElt) -> QuadElt {
        let a = if self.is_rational() { o.a } else { self.a };
        assert!(
            self.is_rational() || o.is_rational() || self.a == o.a,
            "elements of different fields"
        );
        let av = Rational::from_integer(a.value() as i128);
        QuadElt::new(
            self.x * o.x + av * self.y * o.y,
            self.x * o.y + self.y * o.x,
            a,
        )
    }
}

impl Mul for QuadElt {
    type Output = QuadElt;
    fn mul(self, o: QuadElt) -> QuadElt {
        &self * &o
    }
}

impl Neg for QuadElt {
    type Output = QuadElt;
    fn neg(self) -> QuadElt {
        QuadElt::new(-self.x, -self.y, self.a)
    }
}

impl fmt::Display for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let sign = if self.y.is_negative() { '-' } else { '+' };
        let ay = self.y.abs();
        if ay == Rational::from_integer(1) {
            write!(f, "{} {} sqrt({})", self.x, sign, self.a)
        } else {
            write!(f, "{} {} {}*sqrt({})", self.x, sign, ay, self.a)
        }
    }
}

impl Serialize for QuadElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadElt", 3)?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("a", &self.a)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Splitting {
    Split,
    Ramified,
    Inert,
}

/// A prime of Q(sqrt a) of residue degree one over p, given by the image
/// `root` of sqrt(a) in Z/p^k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DegreeOnePrime {
    pub p: u64,
    pub a: SquareClass,
    pub kind: Splitting,
    pub root: i128,
    pub precision: u32,
}

impl DegreeOnePrime {
    pub fn modulus(&self) -> i128 {
        (self.p as i128).pow(self.precision)
    }
}

pub fn splitting_type(p: u64, a: SquareClass) -> Result<Splitting> {
    let d = arith::discriminant(a)?;
    Ok(match arith::kronecker(d as i128, p as i128) {
        0 => Splitting::Ramified,
        1 => Splitting::Split,
        _ => Splitting::Inert,
    })
}

fn precision_for(p: u64) -> u32 {
    let mut k = DEFAULT_PRECISION;
    while k > 1 && (p as i128).pow(k) >= MAX_MODULUS {
        k -= 1;
    }
    k
}

pub fn primes_above(p: u64, a: SquareClass) -> Result<(Splitting, Vec<DegreeOnePrime>)> {
    let kind = splitting_type(p, a)?;
    let av = a.value() as i128;
    let primes = match kind {
        Splitting::Inert => Vec::new(),
        Splitting::Ramified => {
            let root = if p == 2 { av.rem_euclid(2) } else { 0 };
            vec![DegreeOnePrime {
                p,
                a,
                kind,
                root,
                precision: 1,
            }]
        }
        Splitting::Split => {
            let k = precision_for(p);
            let r = sqrt_mod_prime_power(av, p, k)?;
            let m = (p as i128).pow(k);
            let mut roots = [r.rem_euclid(m), (-r).rem_euclid(m)];
            roots.sort_unstable();
            roots
                .into_iter()
                .map(|root| DegreeOnePrime {
                    p,
                    a,
                    kind,
                    root,
                    precision: k,
                })
                .collect()
        }
    };
    Ok((kind, primes))
}

fn mulmod(x: i128, y: i128, m: i128) -> i128 {
    ((x.rem_euclid(m) as u128 * y.rem_euclid(m) as u128) % m as u128) as i128
}

fn powmod(mut b: i128, mut e: u128, m: i128) -> i128 {
    let mut r = 1 % m;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn invmod(x: i128, m: i128) -> i128 {
    let g = x.rem_euclid(m).extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: i128, p: u64) -> Option<i128> {
    let pp = p as i128;
    let a = a.rem_euclid(pp);
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (pp - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q as u128, pp);
    let mut t = powmod(a, q as u128, pp);
    let mut r = powmod(a, ((q + 1) / 2) as u128, pp);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, pp);
            i += 1;
        }
        let b = powmod(c, 1u128 << (m - i - 1), pp);
        m = i;
        c = mulmod(b, b, pp);
        t = mulmod(t, c, pp);
        r = mulmod(r, b, pp);
    }
    Some(r)
}

/// Lifts a square root r0 of a (valid modulo some power of p) to a root
/// modulo p^k. For odd p, a must be a unit square mod p. For p = 2, a must be
/// 1 mod 8 and the result is the 2-adic square root congruent to r0 modulo
/// 2^(j-1), where 2^j is the precision of r0.
pub fn hensel_lift(a: i128, p: u64, r0: i128, k: u32) -> Result<i128> {
    let pp = p as i128;
    let m = pp.checked_pow(k + u32::from(p == 2)).ok_or(Error::Overflow)?;
    if m >= MAX_MODULUS {
        return Err(Error::Overflow);
    }
    if p == 2 {
        let modk = 1i128 << k;
        let mut r = r0.rem_euclid(m);
        // r^2 = a mod 2^j holds for j = 3 since r is odd and a = 1 mod 8
        let mut j = 3;
        while j <= k {
            let next = 1i128 << (j + 1);
            if (mulmod(r, r, m) - a).rem_euclid(next) != 0 {
                r = (r + (1i128 << (j - 1))).rem_euclid(m);
            }
            j += 1;
        }
        return Ok(r.rem_euclid(modk));
    }
    let mut r = r0.rem_euclid(pp);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let mm = pp.pow(prec);
        let f = (mulmod(r, r, mm) - a).rem_euclid(mm);
        let inv = invmod(2 * r, mm);
        r = (r - mulmod(f, inv, mm)).rem_euclid(mm);
    }
    Ok(r)
}

fn sqrt_mod_prime_power(a: i128, p: u64, k: u32) -> Result<i128> {
    if p == 2 {
        return hensel_lift(a, 2, 1, k);
    }
    let r = sqrt_mod_prime(a, p).expect("split prime has a residue root");
    hensel_lift(a, p, r, k)
}

fn check_field(beta: &QuadElt, a: SquareClass) {
    assert!(
        beta.is_rational() || beta.a == a,
        "element of Q(sqrt {}) evaluated at a prime of Q(sqrt {})",
        beta.a,
        a
    );
}

/// Image of a split-prime element in Z/p^K, with K large enough to detect the
/// valuation. Returns (valuation, unit part mod p^(K - valuation)).
fn split_embedding(beta: &QuadElt, prime: &DegreeOnePrime, extra: u32) -> Result<(u32, i128, i128)> {
    let (x, y) = beta.integral_scaled()?;
    let av = prime.a.value() as i128;
    let n = x
        .checked_mul(x)
        .and_then(|x2| y.checked_mul(y).and_then(|y2| y2.checked_mul(av)).map(|ay2| x2 - ay2))
        .ok_or(Error::Overflow)?;
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let vn = arith::valuation(n, prime.p);
    let k = vn + 1 + extra;
    let r = hensel_lift(av, prime.p, prime.root, k)?;
    let m = (prime.p as i128).pow(k);
    let w = (x.rem_euclid(m) + mulmod(y, r, m)).rem_euclid(m);
    debug_assert!(w != 0);
    let v = arith::valuation(w, prime.p);
    let pv = (prime.p as i128).pow(v);
    Ok((v, w / pv, m / pv))
}

/// Valuation of a non-zero element at a prime of degree one.
pub fn valuation_at(beta: &QuadElt, prime: &DegreeOnePrime) -> Result<u32> {
    check_field(beta, prime.a);
    if beta.is_zero() {
        return Err(Error::ZeroInput);
    }
    match prime.kind {
        Splitting::Split => {
            let l = beta.x.denom().lcm(beta.y.denom());
            Ok(split_embedding(beta, prime, 0)?.0 - 2 * arith::valuation(l, prime.p))
        }
        Splitting::Ramified => {
            let (x, y) = beta.integral_scaled()?;
            let n = x * x - (prime.a.value() as i128) * y * y;
            // the scaling factor L^2 has even valuation, as does its removal
            let l = beta.x.denom().lcm(beta.y.denom());
            Ok(arith::valuation(n, prime.p) - 4 * arith::valuation(l, prime.p))
        }
        Splitting::Inert => Err(Error::InertPrime {
            p: prime.p,
            a: prime.a.value(),
        }),
    }
}

/// Legendre symbol of the residue of the unit part of beta at an odd prime of
/// degree one.
pub fn residue_symbol(beta: &QuadElt, prime: &DegreeOnePrime) -> Result<i8> {
    check_field(beta, prime.a);
    assert!(prime.p != 2, "residue symbol at an odd prime");
    if beta.is_zero() {
        return Err(Error::ZeroInput);
    }
    match prime.kind {
        Splitting::Inert => Err(Error::InertPrime {
            p: prime.p,
            a: prime.a.value(),
        }),
        Splitting::Split => {
            let (v, u, _) = split_embedding(beta, prime, 0)?;
            if v % 2 == 1 {
                return Err(Error::OddValuation { p: prime.p });
            }
            Ok(legendre(u, prime.p))
        }
        Splitting::Ramified => {
            let (x, y) = beta.integral_scaled()?;
            let av = prime.a.value() as i128;
            let n = x * x - av * y * y;
            let v = arith::valuation(n, prime.p);
            if v % 2 == 1 {
                return Err(Error::OddValuation { p: prime.p });
            }
            // v = 2k is attained by the rational coordinate: v_p(x) = k, and
            // beta / a^k reduces to (x / p^k) / (a / p)^k modulo the prime.
            let k = v / 2;
            let xr = x / (prime.p as i128).pow(k);
            debug_assert!(xr % prime.p as i128 != 0);
            let s = legendre(xr, prime.p);
            let t = legendre(av / prime.p as i128, prime.p);
            Ok(if k % 2 == 1 { s * t } else { s })
        }
    }
}

/// Unit part of beta modulo 2^k at a split dyadic prime.
pub fn dyadic_embedding(beta: &QuadElt, prime: &DegreeOnePrime, k: u32) -> Result<i128> {
    check_field(beta, prime.a);
    if prime.p != 2 || prime.kind != Splitting::Split {
        return Err(Error::TwoNotSplit {
            a: prime.a.value(),
        });
    }
    let (v, u, _) = split_embedding(beta, prime, k)?;
    if v % 2 == 1 {
        return Err(Error::OddValuation { p: 2 });
    }
    Ok(u.rem_euclid(1 << k))
}

/// Residue data of a 2-unit modulo 4O.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DyadicResidue {
    /// Coordinates modulo 4 on the basis 1, theta of O (2 ramified or inert).
    Local { u0: u8, u1: u8 },
    /// Unit parts modulo 8 at the two dyadic primes, ordered by root.
    Split { u1: u8, u2: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicUnitClass {
    pub a: SquareClass,
    pub residue: DyadicResidue,
    pub is_square: bool,
}

/// Multiplication in O/4O on the basis 1, theta.
pub fn theta_mul(a: SquareClass, u: (u8, u8), w: (u8, u8)) -> (u8, u8) {
    let av = a.value().rem_euclid(4);
    let (u0, u1, w0, w1) = (u.0 as i64, u.1 as i64, w.0 as i64, w.1 as i64);
    let (c0, c1) = if av == 1 {
        // theta^2 = theta + (a - 1)/4
        let q = (a.value() - 1).div_euclid(4);
        (u0 * w0 + q * u1 * w1, u0 * w1 + u1 * w0 + u1 * w1)
    } else {
        (u0 * w0 + a.value() * u1 * w1, u0 * w1 + u1 * w0)
    };
    (c0.rem_euclid(4) as u8, c1.rem_euclid(4) as u8)
}

/// The unit group (O/4O)* as theta-coordinates.
pub fn unit_group_mod4(a: SquareClass) -> Vec<(u8, u8)> {
    let all: Vec<(u8, u8)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
    all.iter()
        .copied()
        .filter(|&u| all.iter().any(|&w| theta_mul(a, u, w) == (1, 0)))
        .collect()
}

pub fn square_subgroup_mod4(a: SquareClass) -> Vec<(u8, u8)> {
    let mut sq: Vec<(u8, u8)> = unit_group_mod4(a)
        .into_iter()
        .map(|u| theta_mul(a, u, u))
        .collect();
    sq.sort_unstable();
    sq.dedup();
    sq
}

/// Norm to (Z/4Z)* of a theta-coordinate residue.
pub fn norm_mod4(a: SquareClass, u: (u8, u8)) -> u8 {
    let (u0, u1) = (u.0 as i64, u.1 as i64);
    let n = if a.value().rem_euclid(4) == 1 {
        // N(u0 + u1 theta) = u0^2 + u0 u1 - (a - 1)/4 u1^2
        u0 * u0 + u0 * u1 - (a.value() - 1).div_euclid(4) * u1 * u1
    } else {
        u0 * u0 - a.value() * u1 * u1
    };
    n.rem_euclid(4) as u8
}

fn odd_inverse_mod(d: i128, m: i128) -> i128 {
    invmod(d, m)
}

/// Unit representative of beta modulo 2^prec in theta coordinates, for 2
/// ramified or inert. Fails with NotTwoUnit if the valuation is odd.
fn local_dyadic_unit(beta: &QuadElt, prec: u32) -> Result<(i128, i128)> {
    let a = beta.a;
    let av = a.value() as i128;
    let (x, y) = beta.integral_scaled()?;
    if av.rem_euclid(4) == 1 {
        // 2 inert: 2 is a uniformizer of O
        let (u0, u1) = (x - y, 2 * y);
        let v = match (u0, u1) {
            (0, w) | (w, 0) => w.trailing_zeros(),
            _ => u0.trailing_zeros().min(u1.trailing_zeros()),
        };
        if v % 2 == 1 {
            return Err(Error::NotTwoUnit);
        }
        let m = 1i128 << prec;
        return Ok(((u0 >> v).rem_euclid(m), (u1 >> v).rem_euclid(m)));
    }
    // 2 ramified: O = Z[sqrt a], uniformizer pi with N(pi) = 2 * odd
    let n = x
        .checked_mul(x)
        .and_then(|x2| y.checked_mul(y).and_then(|y2| y2.checked_mul(av)).map(|ay2| x2 - ay2))
        .ok_or(Error::Overflow)?;
    let v = n.trailing_zeros();
    if v % 2 == 1 {
        return Err(Error::NotTwoUnit);
    }
    let (p0, p1) = if av.rem_euclid(4) == 2 { (0, -1) } else { (1, -1) };
    let npi = p0 * p0 - av * p1 * p1;
    let mo = npi / 2;
    let top = prec + v;
    if top >= 62 {
        return Err(Error::Overflow);
    }
    let mut m = 1i128 << top;
    let (mut cx, mut cy) = (x.rem_euclid(m), y.rem_euclid(m));
    for _ in 0..v {
        // multiply by conj(pi) and divide by N(pi) = 2 mo
        let nx = (mulmod(cx, p0, m) + mulmod(mulmod(cy, p1, m), av, m)).rem_euclid(m);
        let ny = (mulmod(cx, p1, m) + mulmod(cy, p0, m)).rem_euclid(m);
        debug_assert!(nx % 2 == 0 && ny % 2 == 0);
        m >>= 1;
        let inv = odd_inverse_mod(mo, m);
        cx = mulmod(nx / 2, inv, m);
        cy = mulmod(ny / 2, inv, m);
    }
    Ok((cx, cy))
}

/// Class of beta in (O/4O)* after removing an even power of the dyadic
/// uniformizer(s).
pub fn dyadic_unit_class(beta: &QuadElt) -> Result<DyadicUnitClass> {
    let a = beta.a;
    if beta.is_zero() {
        return Err(Error::ZeroInput);
    }
    if a.is_trivial() {
        return Err(Error::TrivialClass);
    }
    if a.value().rem_euclid(8) == 1 {
        let (_, primes) = primes_above(2, a)?;
        let mut us = [0u8; 2];
        for (i, pr) in primes.iter().enumerate() {
            us[i] = match dyadic_embedding(beta, pr, 3) {
                Ok(u) => u as u8,
                Err(Error::OddValuation { .. }) => return Err(Error::NotTwoUnit),
                Err(e) => return Err(e),
            };
        }
        return Ok(DyadicUnitClass {
            a,
            residue: DyadicResidue::Split { u1: us[0], u2: us[1] },
            is_square: us[0] % 4 == 1 && us[1] % 4 == 1,
        });
    }
    let (u0, u1) = local_dyadic_unit(beta, 2)?;
    let r = (u0 as u8, u1 as u8);
    Ok(DyadicUnitClass {
        a,
        residue: DyadicResidue::Local { u0: r.0, u1: r.1 },
        is_square: square_subgroup_mod4(a).contains(&r),
    })
}

/// Whether Q(sqrt a)(sqrt beta) is unramified at every prime above 2.
pub fn is_unramified_at_two(beta: &QuadElt) -> Result<bool> {
    match dyadic_unit_class(beta) {
        Ok(c) => Ok(c.is_square),
        Err(Error::NotTwoUnit) => Ok(false),
        Err(e) => Err(e),
    }
}

/// For a = 3 mod 4: whether beta is, up to sign and squares, a unit in 1 + 2O.
pub fn is_conductor_two(beta: &QuadElt) -> Result<bool> {
    let a = beta.a;
    if a.value().rem_euclid(4) != 3 {
        return Err(Error::WrongDiscriminantClass { a: a.value() });
    }
    match local_dyadic_unit(beta, 1) {
        // squares of units are 1 mod 2O, and -1 = 1 mod 2O
        Ok((x, y)) => Ok(x % 2 == 1 && y % 2 == 0),
        Err(Error::NotTwoUnit) => Ok(false),
        Err(e) => Err(e),
    }
}

/// tau = (1 + sqrt a)^2 / 2.
pub fn tau(a: SquareClass) -> QuadElt {
    let h = Rational::new(1, 2);
    let s = QuadElt::one_plus_root(a);
    (&s * &s).scale(h)
}
