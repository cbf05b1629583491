//! Narrow class groups of quadratic discriminants as form class groups of
//! primitive binary quadratic forms under proper equivalence.

use std::collections::HashMap;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{self, isqrt};
use crate::error::{Error, Result};

/// Default bound on |D| for enumeration.
pub const DEFAULT_ORACLE_BOUND: u64 = 1_000_000;

/// The form A x^2 + B xy + C y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn principal(d: i64) -> Self {
        if d.rem_euclid(4) == 0 {
            Form::new(1, 0, -d / 4)
        } else {
            Form::new(1, 1, (1 - d) / 4)
        }
    }

    pub fn inverse(&self) -> Self {
        Form::new(self.a, -self.b, self.c)
    }

    fn is_reduced_definite(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// 0 < B < sqrt D and sqrt D - B < 2|A| < sqrt D + B, in exact integers.
    fn is_reduced_indefinite(&self) -> bool {
        let d = self.discriminant() as i128;
        let s = isqrt(d as u128) as i128;
        let (a2, b) = (2 * self.a.unsigned_abs() as i128, self.b as i128);
        b > 0 && b <= s && (a2 + b) * (a2 + b) > d && (a2 - b <= 0 || (a2 - b) * (a2 - b) < d)
    }

    pub fn is_reduced(&self) -> bool {
        if self.discriminant() < 0 {
            self.is_reduced_definite()
        } else {
            self.is_reduced_indefinite()
        }
    }
}

fn reduce_definite(f: Form) -> Form {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if b > a || b <= -a {
            // normalise b into (-a, a]
            let two_a = 2 * a;
            let r = (b + a - 1).div_euclid(two_a);
            let nb = b - two_a * r;
            c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
            b = nb;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    Form::new(a as i64, b as i64, c as i64)
}

/// One step of the reduction operator rho on an indefinite form.
fn rho(f: Form) -> Form {
    let d = f.discriminant() as i128;
    let s = isqrt(d as u128) as i128;
    let (b, c) = (f.b as i128, f.c as i128);
    let two_c = 2 * c.abs();
    let r = if c.unsigned_abs() > isqrt(d as u128) {
        // r = -b mod 2|c| in (-|c|, |c|]
        let mut r = (-b).rem_euclid(two_c);
        if r > c.abs() {
            r -= two_c;
        }
        r
    } else {
        s - (s + b).rem_euclid(two_c)
    };
    let nc = (r * r - d) / (4 * c);
    Form::new(f.c, r as i64, nc as i64)
}

fn reduce_indefinite(mut f: Form) -> Form {
    let mut steps = 0;
    while !f.is_reduced_indefinite() {
        f = rho(f);
        steps += 1;
        assert!(steps < 100_000, "indefinite reduction did not terminate");
    }
    f
}

/// The rho-cycle of a reduced indefinite form.
pub fn cycle(f: Form) -> Vec<Form> {
    let mut out = vec![f];
    let mut g = rho(f);
    while g != f {
        out.push(g);
        g = rho(g);
    }
    out
}

pub fn reduce(f: Form) -> Form {
    if f.discriminant() < 0 {
        reduce_definite(f)
    } else {
        reduce_indefinite(f)
    }
}

/// A proper equivalence class, stored by its canonical reduced form: the
/// unique reduced form when D < 0, the least form of the cycle when D > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FormClass {
    pub form: Form,
    /// A form of the class with positive leading coefficient, used for
    /// composition.
    #[serde(skip)]
    rep: Form,
}

impl FormClass {
    pub fn of(f: Form) -> Self {
        let r = reduce(f);
        if f.discriminant() < 0 {
            return FormClass { form: r, rep: r };
        }
        let form = *cycle(r).iter().min().expect("non-empty cycle");
        let rep = *cycle(form)
            .iter()
            .find(|g| g.a > 0)
            .expect("cycle has a positive form");
        FormClass { form, rep }
    }

    pub fn discriminant(&self) -> i64 {
        self.form.discriminant()
    }

    pub fn identity(d: i64) -> Self {
        FormClass::of(Form::principal(d))
    }

    pub fn inverse(&self) -> Self {
        FormClass::of(self.rep.inverse())
    }
}

/// (g, x, y) with x u + y v = g = gcd(u, v) >= 0.
fn egcd(u: i128, v: i128) -> (i128, i128, i128) {
    let e = u.extended_gcd(&v);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Dirichlet composition of primitive forms with positive leading
/// coefficients, followed by reduction.
fn compose_forms(f1: Form, f2: Form) -> Form {
    let d = f1.discriminant() as i128;
    let (mut a1, mut b1, mut c1) = (f1.a as i128, f1.b as i128, f1.c as i128);
    let (mut a2, mut b2, mut c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    if a1 > a2 {
        std::mem::swap(&mut a1, &mut a2);
        std::mem::swap(&mut b1, &mut b2);
        std::mem::swap(&mut c1, &mut c2);
    }
    let _ = c1;
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, dd) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (g, x, _) = egcd(a2, a1);
        (x, g)
    };
    let (x2, y2, d1) = if s % dd == 0 {
        (0, -1, dd)
    } else {
        let (g, x, y) = egcd(s, dd);
        (x, -y, g)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - d) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d);
    reduce(Form::new(a3 as i64, b3 as i64, c3 as i64))
}

pub fn compose(f: &FormClass, g: &FormClass) -> Result<FormClass> {
    if f.discriminant() != g.discriminant() {
        return Err(Error::DiscriminantMismatch(f.discriminant(), g.discriminant()));
    }
    Ok(FormClass::of(compose_forms(f.rep, g.rep)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassGroup {
    pub discriminant: i64,
    pub elements: Vec<FormClass>,
    pub identity: FormClass,
}

impl ClassGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn compose(&self, f: &FormClass, g: &FormClass) -> FormClass {
        compose(f, g).expect("same discriminant")
    }

    pub fn square(&self, f: &FormClass) -> FormClass {
        self.compose(f, f)
    }

    /// |C[2^k]| for k = 0, 1, 2, ... up to and including the first k where
    /// the count stops growing.
    pub fn two_power_torsion_counts(&self) -> Vec<usize> {
        let mut current: Vec<FormClass> = self.elements.clone();
        let mut counts = vec![1usize];
        let mut k = 0;
        loop {
            k += 1;
            current = current.iter().map(|g| self.square(g)).collect();
            let c = current.iter().filter(|g| **g == self.identity).count();
            let prev = *counts.last().expect("non-empty");
            counts.push(c);
            if c == prev || k > 62 {
                break;
            }
        }
        counts
    }

    /// r_{2^k} for k = 1, 2, 3.
    pub fn ranks(&self) -> (u32, u32, u32) {
        let counts = self.two_power_torsion_counts();
        let at = |k: usize| counts.get(k).copied().unwrap_or(*counts.last().expect("non-empty"));
        let r = |k: usize| (at(k) / at(k - 1)).trailing_zeros();
        (r(1), r(2), r(3))
    }

    /// Orders of the cyclic factors of the 2-Sylow subgroup, ascending.
    pub fn two_part_invariants(&self) -> Vec<u64> {
        let counts = self.two_power_torsion_counts();
        let rank = |k: usize| -> u32 {
            if k >= counts.len() {
                0
            } else {
                (counts[k] / counts[k - 1]).trailing_zeros()
            }
        };
        let mut out = Vec::new();
        for k in 1..counts.len() {
            let exact = rank(k) - rank(k + 1);
            for _ in 0..exact {
                out.push(1u64 << k);
            }
        }
        out
    }
}

pub fn enumerate_classes(d: i64) -> Result<ClassGroup> {
    enumerate_classes_with_bound(d, DEFAULT_ORACLE_BOUND)
}

pub fn enumerate_classes_with_bound(d: i64, bound: u64) -> Result<ClassGroup> {
    if !arith::is_fundamental(d)? {
        return Err(Error::NotFundamental(d));
    }
    if d.unsigned_abs() > bound {
        return Err(Error::BoundExceeded { d, bound });
    }
    let forms = if d < 0 {
        reduced_definite_forms(d)
    } else {
        reduced_indefinite_forms(d)
    };
    let mut seen: HashMap<Form, FormClass> = HashMap::new();
    let mut elements = Vec::new();
    for f in forms {
        if seen.contains_key(&f) {
            continue;
        }
        let cls = FormClass::of(f);
        if d > 0 {
            for g in cycle(f) {
                seen.insert(g, cls);
            }
        } else {
            seen.insert(f, cls);
        }
        elements.push(cls);
    }
    elements.sort();
    elements.dedup();
    Ok(ClassGroup {
        discriminant: d,
        elements,
        identity: FormClass::identity(d),
    })
}

fn primitive(a: i64, b: i64, c: i64) -> bool {
    a.gcd(&b).gcd(&c) == 1
}

fn reduced_definite_forms(d: i64) -> Vec<Form> {
    let mut out = Vec::new();
    let amax = isqrt((-d / 3) as u128) as i64;
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = Form::new(a, b, c);
            if c >= a && f.is_reduced_definite() && primitive(a, b, c) {
                out.push(f);
            }
        }
    }
    out
}

fn reduced_indefinite_forms(d: i64) -> Vec<Form> {
    let mut out = Vec::new();
    let s = isqrt(d as u128) as i64;
    for b in 1..=s {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let num = b * b - d;
        // 2|a| < sqrt D + b
        let amax = (s + b) / 2;
        for a in 1..=amax {
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            for f in [Form::new(a, b, c), Form::new(-a, b, -c)] {
                if f.is_reduced_indefinite() && primitive(f.a, f.b, f.c) {
                    out.push(f);
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OracleRanks {
    pub class_number: usize,
    pub r2: u32,
    pub r4: u32,
    pub r8: u32,
}

pub fn narrow_ranks(d: i64) -> Result<OracleRanks> {
    let g = enumerate_classes(d)?;
    let (r2, r4, r8) = g.ranks();
    Ok(OracleRanks {
        class_number: g.order(),
        r2,
        r4,
        r8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let g = enumerate_classes(-820).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.two_part_invariants(), vec![2, 4]);
        assert_eq!(g.ranks(), (2, 1, 0));
    }

    #[test]
    fn small_groups() {
        let g = enumerate_classes(-4).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.elements[0].form, Form::new(1, 0, 1));
        assert_eq!(g.ranks(), (0, 0, 0));
        let g = enumerate_classes(60).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.two_part_invariants(), vec![2, 2]);
        assert_eq!(narrow_ranks(-68).unwrap().r4, 1);
        assert_eq!(g.ranks(), (2, 0, 0));
        let g = enumerate_classes(-68).unwrap();
        assert_eq!(g.two_part_invariants(), vec![4]);
    }

    #[test]
    fn group_axioms() {
        for d in [-820i64, -5460, -1780, 60, 205, 1365, 2305, 4097] {
            let g = enumerate_classes(d).unwrap();
            let e = g.identity;
            assert!(g.elements.contains(&e), "D = {d}");
            for x in &g.elements {
                assert_eq!(g.compose(x, &e), *x);
                assert_eq!(g.compose(x, &x.inverse()), e);
                for y in g.elements.iter().take(6) {
                    let xy = g.compose(x, y);
                    assert!(g.elements.contains(&xy));
                    assert_eq!(xy, g.compose(y, x));
                    for z in g.elements.iter().take(4) {
                        assert_eq!(g.compose(&xy, z), g.compose(x, &g.compose(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn known_class_numbers() {
        // h(D) for imaginary fields and h+(D) for real fields
        for (d, h) in [(-3, 1), (-23, 3), (-47, 5), (-84, 4), (-420, 8), (5, 1), (12, 2), (40, 2), (60, 4)] {
            assert_eq!(enumerate_classes(d).unwrap().order(), h, "D = {d}");
        }
        assert!(matches!(enumerate_classes(20), Err(Error::NotFundamental(20))));
        assert!(matches!(
            enumerate_classes_with_bound(-820, 100),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
