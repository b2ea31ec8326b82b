//! Independent-entry counts for the four structural tensor classes, and a
//! brute-force enumeration of the corresponding equivalence classes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tensor::{advance, TensorClass};

/// Upper bound on `n^m` accepted by [`enumerate_independent_classes`].
pub const ENUMERATION_GUARD: u128 = 1_000_000;

const MAX_COUNT: u128 = i64::MAX as u128;

/// Number of independent entries of an order-`m`, dimension-`n` tensor of
/// the given class:
///
/// | class | count |
/// |-------|-------|
/// | general | `n^m` |
/// | symmetric | `C(n+m−1, m)` |
/// | lower triangular | `Σ_{i=1..n} i^(m−1)` |
/// | lower triangular sub-symmetric | `C(n+m−1, m)` |
pub fn count_independent(class: TensorClass, m: usize, n: usize) -> Result<u64> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidShape { order: m, dim: n });
    }
    let v = match class {
        TensorClass::General => checked_pow(n as u128, m)?,
        TensorClass::Symmetric | TensorClass::LowerTriangularSubSymmetric => binomial(n + m - 1, m)?,
        TensorClass::LowerTriangular => {
            let mut total: u128 = 0;
            for i in 1..=n as u128 {
                total = total.checked_add(checked_pow(i, m - 1)?).ok_or(Error::Overflow)?;
                if total > MAX_COUNT {
                    return Err(Error::Overflow);
                }
            }
            total
        }
    };
    if v > MAX_COUNT {
        return Err(Error::Overflow);
    }
    Ok(v as u64)
}

fn checked_pow(base: u128, exp: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).filter(|&v| v <= MAX_COUNT).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

fn binomial(n: usize, k: usize) -> Result<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n as u128 - i).ok_or(Error::Overflow)? / (i + 1);
        if acc > MAX_COUNT {
            return Err(Error::Overflow);
        }
    }
    Ok(acc)
}

/// Equivalence classes of 0-based index tuples for `class`.
///
/// Tuples that the class forces to zero (a trailing index above the first)
/// are dropped; the rest are grouped by the class symmetry. Classes come back
/// in increasing order of their canonical representative, and tuples inside a
/// class in canonical (lexicographic) order.
pub fn enumerate_independent_classes(class: TensorClass, m: usize, n: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidShape { order: m, dim: n });
    }
    let total = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > ENUMERATION_GUARD {
        return Err(Error::TooLarge(n, m));
    }
    let mut classes: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let lower = idx[1..].iter().all(|&t| t <= idx[0]);
        let key = match class {
            TensorClass::General => Some(idx.clone()),
            TensorClass::Symmetric => {
                let mut k = idx.clone();
                k.sort_unstable();
                Some(k)
            }
            TensorClass::LowerTriangular => lower.then(|| idx.clone()),
            TensorClass::LowerTriangularSubSymmetric => lower.then(|| {
                let mut k = idx.clone();
                k[1..].sort_unstable();
                k
            }),
        };
        if let Some(key) = key {
            classes.entry(key).or_default().push(idx.clone());
        }
        advance(&mut idx, n);
    }
    Ok(classes.into_values().collect())
}
