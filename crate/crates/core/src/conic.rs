//! Primitive integral points on the conic x^2 - a y^2 - b z^2 = 0.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{self, exact_sqrt, hilbert_int, isqrt, Place, SquareClass};
use crate::error::{Error, Result};

/// Bound on max(|y|, |z|) for `enumerate`.
pub const ENUMERATION_HEIGHT_LIMIT: i64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Conic {
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConicSolution {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub a: i64,
    pub b: i64,
}

impl ConicSolution {
    pub fn satisfies(&self) -> bool {
        Conic {
            a: self.a,
            b: self.b,
        }
        .contains(self.x, self.y, self.z)
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y).gcd(&self.z) == 1
    }
}

impl Conic {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::ZeroInput);
        }
        Ok(Conic { a, b })
    }

    pub fn from_classes(a: SquareClass, b: SquareClass) -> Self {
        Conic {
            a: a.value(),
            b: b.value(),
        }
    }

    pub fn contains(&self, x: i64, y: i64, z: i64) -> bool {
        let (x, y, z) = (x as i128, y as i128, z as i128);
        (x, y, z) != (0, 0, 0) && x * x - self.a as i128 * y * y - self.b as i128 * z * z == 0
    }

    /// Local solvability at every place, hence global solvability.
    pub fn is_solvable(&self) -> Result<bool> {
        let (a, b) = (self.a as i128, self.b as i128);
        let mut primes: Vec<u64> = vec![2];
        primes.extend(arith::factor(a)?.primes());
        primes.extend(arith::factor(b)?.primes());
        primes.sort_unstable();
        primes.dedup();
        let ok = primes
            .into_iter()
            .map(Place::Finite)
            .chain(std::iter::once(Place::Infinity))
            .all(|v| hilbert_int(a, b, v) == 1);
        Ok(ok)
    }

    fn solution(&self, x: i64, y: i64, z: i64) -> ConicSolution {
        ConicSolution {
            x,
            y,
            z,
            a: self.a,
            b: self.b,
        }
    }

    /// Smallest primitive solution under (|x|, |y|, |z|), all coordinates
    /// non-negative.
    pub fn solve(&self) -> Result<ConicSolution> {
        if !self.is_solvable()? {
            return Err(Error::NotSolvable {
                a: self.a,
                b: self.b,
            });
        }
        let (sa, fa) = square_split(self.a)?;
        let (sb, fb) = square_split(self.b)?;
        let s = solve_squarefree(sa, sb)?;
        // x^2 = sa Y^2 + sb Z^2 with y = Y / fa, z = Z / fb
        let (x, y, z) = (s.x * fa * fb, s.y * fb, s.z * fa);
        let g = x.gcd(&y).gcd(&z);
        Ok(self.solution(x / g, y / g, z / g))
    }

    /// The first `n` primitive solutions with non-negative coordinates, in
    /// order of max(y, z), then z, then y.
    pub fn enumerate(&self, n: usize) -> Result<Vec<ConicSolution>> {
        if !self.is_solvable()? {
            return Err(Error::NotSolvable {
                a: self.a,
                b: self.b,
            });
        }
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return Ok(out);
        }
        let (a, b) = (self.a as i128, self.b as i128);
        for h in 0..=ENUMERATION_HEIGHT_LIMIT {
            for z in 0..=h {
                let ys = if z == h { 0..=h } else { h..=h };
                for y in ys {
                    if y.gcd(&z) != 1 {
                        continue;
                    }
                    let (yy, zz) = (y as i128, z as i128);
                    if let Some(x) = exact_sqrt(a * yy * yy + b * zz * zz) {
                        out.push(self.solution(x as i64, y, z));
                        if out.len() == n {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        Err(Error::SearchExhausted {
            a: self.a,
            b: self.b,
        })
    }
}

/// n = s * f^2 with s squarefree.
fn square_split(n: i64) -> Result<(i64, i64)> {
    let f = arith::factor(n as i128)?;
    let (mut s, mut r) = (f.sign as i64, 1i64);
    for (p, e) in f.factors {
        if e % 2 == 1 {
            s *= p as i64;
        }
        r *= (p as i64).pow(e / 2);
    }
    Ok((s, r))
}

/// Exhaustive search in the box |y| <= sqrt|b|, |z| <= sqrt|a|, which contains
/// a solution whenever one exists (a, b squarefree).
fn solve_squarefree(a: i64, b: i64) -> Result<ConicSolution> {
    let ymax = isqrt(b.unsigned_abs() as u128) as i64;
    let zmax = isqrt(a.unsigned_abs() as u128) as i64;
    let (ai, bi) = (a as i128, b as i128);
    let mut best: Option<(i64, i64, i64)> = None;
    for z in 0..=zmax {
        for y in 0..=ymax {
            if (y, z) == (0, 0) || y.gcd(&z) != 1 {
                continue;
            }
            let (yy, zz) = (y as i128, z as i128);
            if let Some(x) = exact_sqrt(ai * yy * yy + bi * zz * zz) {
                let cand = (x as i64, y, z);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    let (x, y, z) = best.ok_or(Error::SearchExhausted { a, b })?;
    Ok(ConicSolution { x, y, z, a, b })
}

pub fn is_solvable(a: SquareClass, b: SquareClass) -> Result<bool> {
    Conic::from_classes(a, b).is_solvable()
}

pub fn solve(a: SquareClass, b: SquareClass) -> Result<ConicSolution> {
    Conic::from_classes(a, b).solve()
}

pub fn enumerate_solutions(a: SquareClass, b: SquareClass, n: usize) -> Result<Vec<ConicSolution>> {
    Conic::from_classes(a, b).enumerate(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(n: i64) -> SquareClass {
        SquareClass::new(n).unwrap()
    }

    fn xyz(s: &ConicSolution) -> (i64, i64, i64) {
        (s.x, s.y, s.z)
    }

    #[test]
    fn solvability() {
        assert!(Conic::new(-20, 41).unwrap().is_solvable().unwrap());
        assert!(!is_solvable(sc(-1), sc(-1)).unwrap());
        assert!(Conic::new(-4, 205).unwrap().is_solvable().unwrap());
        assert!(Conic::new(-4, 205).unwrap().contains(3, 7, 1));
    }

    #[test]
    fn solve_examples() {
        let c = Conic::new(-20, 41).unwrap();
        let s = c.solve().unwrap();
        assert!(s.satisfies() && s.is_primitive());
        assert_eq!(xyz(&s), (12, 1, 2));
        assert_eq!(xyz(&solve(sc(-1), sc(2)).unwrap()), (1, 1, 1));
        assert_eq!(xyz(&solve(sc(2), sc(7)).unwrap()), (3, 1, 1));
        assert_eq!(xyz(&solve(sc(-5), sc(41)).unwrap()), (6, 1, 1));
        assert_eq!(
            solve(sc(-1), sc(-1)),
            Err(Error::NotSolvable { a: -1, b: -1 })
        );
    }

    #[test]
    fn enumerate_examples() {
        let sols = Conic::new(-20, 41).unwrap().enumerate(2).unwrap();
        assert_eq!(
            sols.iter().map(xyz).collect::<Vec<_>>(),
            vec![(12, 1, 2), (17, 2, 3)]
        );
        let sols = enumerate_solutions(sc(-1), sc(2), 1).unwrap();
        assert_eq!(xyz(&sols[0]), (1, 1, 1));
        let sols = enumerate_solutions(sc(3), sc(13), 2).unwrap();
        assert_eq!(xyz(&sols[0]), (4, 1, 1));
        assert_eq!(sols.len(), 2);
        assert!(sols.iter().all(|s| s.satisfies() && s.is_primitive()));
    }

    #[test]
    fn solve_succeeds_whenever_solvable() {
        let classes: Vec<SquareClass> = (-200i64..=200)
            .filter_map(|n| SquareClass::from_squarefree(n).ok())
            .filter(|s| !s.is_trivial())
            .collect();
        for &a in &classes {
            for &b in &classes {
                if is_solvable(a, b).unwrap() {
                    let s = solve(a, b).unwrap();
                    assert!(s.satisfies() && s.is_primitive(), "({a},{b})");
                    assert!(s.y.pow(2) <= b.value().abs() && s.z.pow(2) <= a.value().abs());
                }
            }
        }
    }
}
