//! Rédei matrices R4 and R8 of a fundamental discriminant and the 2-, 4- and
//! 8-ranks of its narrow class group.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{self, kronecker, SignedPrimeDecomposition, SquareClass};
use crate::error::{Error, Result};
use crate::f2::{span_rank, F2Matrix};
use crate::symbol;

/// D in {d, 4d} for squarefree d != 1.
pub fn fundamental_discriminant(d: i64) -> Result<i64> {
    if d == 0 {
        return Err(Error::ZeroInput);
    }
    let s = SquareClass::from_squarefree(d)?;
    arith::discriminant(s)
}

fn decomposition(d: i64) -> Result<SignedPrimeDecomposition> {
    arith::signed_prime_decomposition(d)
}

pub fn r2(d: i64) -> Result<u32> {
    Ok(decomposition(d)?.len() as u32 - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedeiMatrixR4 {
    pub discriminant: i64,
    pub entries: F2Matrix,
    /// Signed prime discriminants p*_i.
    pub row_labels: Vec<i64>,
    /// Ramified primes p_j.
    pub col_labels: Vec<u64>,
}

#[allow(non_snake_case)]
pub fn build_R4(d: i64) -> Result<RedeiMatrixR4> {
    let dec = decomposition(d)?;
    let parts = dec.parts();
    let primes = dec.primes();
    let t = parts.len();
    let mut m = F2Matrix::zeros(t, t);
    for j in 0..t {
        let mut diag = false;
        for i in (0..t).filter(|&i| i != j) {
            let e = kronecker(parts[i] as i128, primes[j] as i128) == -1;
            m.set(i, j, e);
            diag ^= e;
        }
        m.set(j, j, diag);
    }
    Ok(RedeiMatrixR4 {
        discriminant: d,
        entries: m,
        row_labels: parts,
        col_labels: primes,
    })
}

pub fn r4(d: i64) -> Result<u32> {
    let m = build_R4(d)?;
    Ok(r2(d)? - m.entries.rank() as u32)
}

/// D = d1 d2 with every prime dividing d_i split in Q(sqrt(D/d_i)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SecondKindDecomposition {
    pub d1: i64,
    pub d2: i64,
}

impl SecondKindDecomposition {
    pub fn is_second_kind(&self) -> Result<bool> {
        for (di, other) in [(self.d1, self.d2), (self.d2, self.d1)] {
            for p in arith::factor(di as i128)?.primes() {
                if kronecker(other as i128, p as i128) != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Radicands of d1 and d2.
    pub fn radicands(&self) -> (SquareClass, SquareClass) {
        (
            SquareClass::new(self.d1).expect("non-zero"),
            SquareClass::new(self.d2).expect("non-zero"),
        )
    }
}

/// The decomposition of D selected by a subset of the parts, normalised so
/// that d1 excludes the last part.
fn decomposition_from_mask(parts: &[i64], mask: u64) -> SecondKindDecomposition {
    let t = parts.len();
    let full = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
    let mask = if mask >> (t - 1) & 1 == 1 { mask ^ full } else { mask };
    let d1: i64 = (0..t).filter(|&i| mask >> i & 1 == 1).map(|i| parts[i]).product();
    let d: i64 = parts.iter().product();
    SecondKindDecomposition { d1, d2: d / d1 }
}

/// All unordered decompositions of the second kind, including (1, D).
pub fn second_kind_decompositions(d: i64) -> Result<Vec<SecondKindDecomposition>> {
    let parts = decomposition(d)?.parts();
    let t = parts.len();
    let mut out = Vec::new();
    for mask in 0..(1u64 << (t - 1)) {
        let dec = decomposition_from_mask(&parts, mask);
        if dec.is_second_kind()? {
            out.push(dec);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedeiMatrixR8 {
    pub discriminant: i64,
    pub entries: F2Matrix,
    pub row_labels: Vec<SecondKindDecomposition>,
    /// Positive squarefree divisors m of D from a basis of ker R4.
    pub col_labels: Vec<i64>,
}

/// R8 of D. For r4 = 0 the matrix is empty (0 rows, 1 column).
#[allow(non_snake_case)]
pub fn build_R8(d: i64) -> Result<RedeiMatrixR8> {
    let r4m = build_R4(d)?;
    let parts = &r4m.row_labels;
    let primes = &r4m.col_labels;
    let t = parts.len();
    let cols: Vec<i64> = r4m
        .entries
        .kernel_basis()
        .into_iter()
        .map(|v| (0..t).filter(|&j| v >> j & 1 == 1).map(|j| primes[j] as i64).product())
        .collect();
    let all_one = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
    let mut chosen: Vec<u64> = vec![all_one];
    let mut rows = Vec::new();
    for v in r4m.entries.transpose().kernel_basis() {
        let mut trial = chosen.clone();
        trial.push(v);
        if span_rank(&trial) == trial.len() {
            chosen.push(v);
            rows.push(decomposition_from_mask(parts, v));
        }
    }
    let mut m = F2Matrix::zeros(rows.len(), cols.len());
    for (i, dec) in rows.iter().enumerate() {
        let (x, y) = dec.radicands();
        for (j, &mj) in cols.iter().enumerate() {
            let c = SquareClass::new(mj)?;
            let s = symbol::redei_symbol(x, y, c)?;
            m.set(i, j, s.value == -1);
        }
    }
    Ok(RedeiMatrixR8 {
        discriminant: d,
        entries: m,
        row_labels: rows,
        col_labels: cols,
    })
}

pub fn r8(d: i64) -> Result<u32> {
    let m = build_R8(d)?;
    Ok(r4(d)? - m.entries.rank() as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ranks {
    pub r2: u32,
    pub r4: u32,
    pub r8: u32,
}

pub fn ranks(d: i64) -> Result<Ranks> {
    let r2 = r2(d)?;
    let r4v = r2 - build_R4(d)?.entries.rank() as u32;
    let r8v = if r4v == 0 {
        0
    } else {
        r4v - build_R8(d)?.entries.rank() as u32
    };
    Ok(Ranks {
        r2,
        r4: r4v,
        r8: r8v,
    })
}

/// Signature of p relative to d: p mod 8 and the Kronecker symbols of the
/// signed odd primes dividing d.
pub type GoverningSignature = (u64, Vec<i8>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoverningReport {
    pub d: i64,
    pub bound: u64,
    pub primes_checked: usize,
    /// r4 values observed per signature class.
    pub classes: BTreeMap<String, Vec<u32>>,
    pub violations: Vec<String>,
}

impl GoverningReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that r4 of the discriminant of dp depends only on the signature of
/// p, for primes p <= bound not dividing 2d.
pub fn governing_r4_check(d: i64, bound: u64) -> Result<GoverningReport> {
    let dc = SquareClass::from_squarefree(d)?;
    let odd: Vec<u64> = dc.primes().into_iter().filter(|&q| q != 2).collect();
    let mut seen: BTreeMap<GoverningSignature, (u32, u64)> = BTreeMap::new();
    let mut classes: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut checked = 0;
    for p in (3..=bound).filter(|&p| arith::is_prime(p) && d % p as i64 != 0) {
        let disc = fundamental_discriminant(d * p as i64)?;
        let sig: GoverningSignature = (
            p % 8,
            odd.iter()
                .map(|&q| kronecker(arith::signed_prime(q) as i128, p as i128))
                .collect(),
        );
        let r = r4(disc)?;
        checked += 1;
        let key = format!("{:?}", sig);
        let entry = classes.entry(key).or_default();
        if !entry.contains(&r) {
            entry.push(r);
        }
        match seen.get(&sig) {
            None => {
                seen.insert(sig, (r, p));
            }
            Some(&(r0, p0)) if r0 != r => violations.push(format!(
                "signature {sig:?}: r4 = {r0} at p = {p0} but {r} at p = {p}"
            )),
            _ => {}
        }
    }
    Ok(GoverningReport {
        d,
        bound,
        primes_checked: checked,
        classes,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        assert_eq!(fundamental_discriminant(-205), Ok(-820));
        let m = build_R4(-820).unwrap();
        assert_eq!(m.row_labels, vec![-4, 5, 41]);
        assert_eq!(m.col_labels, vec![2, 5, 41]);
        assert_eq!(
            m.entries.to_rows(),
            vec![vec![1, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]
        );
        assert_eq!(r2(-820), Ok(2));
        assert_eq!(r4(-820), Ok(1));
        let decs = second_kind_decompositions(-820).unwrap();
        assert!(decs.contains(&SecondKindDecomposition { d1: -20, d2: 41 }));
        assert!(!decs.iter().any(|s| s.d1 == -4 || s.d2 == -4));
        assert_eq!(decs.len(), 2);
        let r8m = build_R8(-820).unwrap();
        assert_eq!(r8m.col_labels, vec![5, 41]);
        assert_eq!(r8m.row_labels, vec![SecondKindDecomposition { d1: -20, d2: 41 }]);
        assert_eq!(r8m.entries.to_rows(), vec![vec![1, 1]]);
        assert_eq!(r8(-820), Ok(0));
    }

    #[test]
    fn small_cases() {
        assert_eq!(r2(-4), Ok(0));
        assert_eq!(r2(60), Ok(2));
        assert_eq!(build_R4(-4).unwrap().entries.to_rows(), vec![vec![0]]);
        assert_eq!(r4(-68), Ok(1));
        assert_eq!(build_R8(-4).unwrap().entries.nrows(), 0);
        assert_eq!(r8(-4), Ok(0));
        assert_eq!(
            second_kind_decompositions(-4).unwrap(),
            vec![SecondKindDecomposition { d1: 1, d2: -4 }]
        );
        assert_eq!(r2(12), Ok(1));
        assert_eq!(r2(20), Err(Error::NotFundamental(20)));
    }

    #[test]
    fn governing_small() {
        let rep = governing_r4_check(-1, 500).unwrap();
        assert!(rep.is_consistent(), "{:?}", rep.violations);
        assert!(governing_r4_check(1, 500).unwrap().is_consistent());
        for p in [3u64, 7, 11, 19, 23] {
            assert_eq!(r2(4 * p as i64), Ok(1));
            assert_eq!(r4(4 * p as i64), Ok(0));
        }
    }
}
