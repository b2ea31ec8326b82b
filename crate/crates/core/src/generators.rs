//! Cauchy, Hilbert, Lehmer and completely positive tensors, random test
//! instances, and slice-based definiteness checks.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{column_rank, hermitian_eigenvalues};
use crate::multilinear::CPFactorization;
use crate::tensor::{CubicTensor, HermitianTensor3, TriFactor3};

fn sorted3(ix: &[usize]) -> [usize; 3] {
    let mut s = [ix[0], ix[1], ix[2]];
    s.sort_unstable();
    s
}

fn real_symmetric(n: usize, f: impl Fn([usize; 3]) -> f64) -> HermitianTensor3 {
    HermitianTensor3::new_unchecked(CubicTensor::from_fn(3, n, |ix| C64::new(f(sorted3(ix)), 0.0)))
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidShape { order: 3, dim: 0 });
    }
    Ok(())
}

/// `a_ijk = 1/(c_i + c_j + c_k)` for positive `c`.
pub fn cauchy3(c: &[f64]) -> Result<HermitianTensor3> {
    require_dim(c.len())?;
    if let Some(p) = c.iter().position(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveParameter { index: p + 1 });
    }
    Ok(real_symmetric(c.len(), |[a, b, d]| 1.0 / (c[a] + c[b] + c[d])))
}

/// `a_ijk = 1/(i + j + k − 2)` with 1-based indices. This is the Cauchy
/// tensor with `c_i = i − 2/3`.
pub fn hilbert3(n: usize) -> Result<HermitianTensor3> {
    require_dim(n)?;
    Ok(real_symmetric(n, |[a, b, d]| 1.0 / (a + b + d + 1) as f64))
}

/// `a_ijk = min(i, j, k) / max(i, j, k)`.
pub fn lehmer3(n: usize) -> Result<HermitianTensor3> {
    require_dim(n)?;
    Ok(real_symmetric(n, |[a, _, d]| (a + 1) as f64 / (d + 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Definiteness {
    #[serde(rename = "PD")]
    Pd,
    #[serde(rename = "PSD")]
    Psd,
    Indefinite,
}

impl std::fmt::Display for Definiteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Definiteness::Pd => "PD",
            Definiteness::Psd => "PSD",
            Definiteness::Indefinite => "Indefinite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub verdict: Definiteness,
    pub min_slice_eigenvalue: f64,
    /// `(mode, index)` of the slice attaining the minimum, both 1-based.
    pub witness_slice: (usize, usize),
}

/// Ascending eigenvalues of every slice in `mode` (1, 2 or 3).
pub fn slice_spectra(a: &HermitianTensor3, mode: usize) -> Result<Vec<Vec<f64>>> {
    let tol = 1e-9;
    (0..a.dim()).map(|i| hermitian_eigenvalues(&a.slice(mode, i)?, tol)).collect()
}

/// [`is_psd`] using the slices of the given mode.
pub fn is_psd_mode(a: &HermitianTensor3, mode: usize, tol: f64) -> Result<PsdVerdict> {
    let spectra = slice_spectra(a, mode)?;
    let (mut min, mut witness) = (f64::INFINITY, 0);
    for (i, eig) in spectra.iter().enumerate() {
        if eig[0] < min {
            min = eig[0];
            witness = i;
        }
    }
    let bound = tol * a.maxabs();
    let verdict = if min > bound {
        Definiteness::Pd
    } else if min >= -bound {
        Definiteness::Psd
    } else {
        Definiteness::Indefinite
    };
    Ok(PsdVerdict { verdict, min_slice_eigenvalue: min, witness_slice: (mode, witness + 1) })
}

/// Definiteness of `y_i = Σ a_ijk conj(x_j) x_k`, read off the mode-1 slices:
/// `PD` when every slice eigenvalue exceeds `tol·maxabs(A)`, `PSD` when none
/// is below `−tol·maxabs(A)`.
pub fn is_psd(a: &HermitianTensor3, tol: f64) -> Result<PsdVerdict> {
    is_psd_mode(a, 1, tol)
}

/// Entries `a_iij`, `a_ijj`, `a_iji` are real and nonnegative within
/// `tol·maxabs(A)`.
pub fn nonneg_diag_check(a: &HermitianTensor3, tol: f64) -> bool {
    let bound = tol * a.maxabs();
    let n = a.dim();
    let ok = |z: C64| z.im.abs() <= bound && z.re >= -bound;
    (0..n).all(|i| (0..n).all(|j| ok(a.get3(i, i, j)) && ok(a.get3(i, j, j)) && ok(a.get3(i, j, i))))
}

/// For every `i`, the vectors with `u_i > tol` span `ℝⁿ`.
pub fn cp_pd_certificate(f: &CPFactorization, tol: f64) -> Result<bool> {
    let n = f.dim();
    for i in 0..n {
        let support: Vec<Vec<f64>> = f.vectors().iter().filter(|u| u[i] > tol).cloned().collect();
        if column_rank(&support, tol)? != n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// At least `n` vectors, together spanning `ℝⁿ`.
pub fn strongly_cp_check(f: &CPFactorization, tol: f64) -> Result<bool> {
    Ok(f.rank() >= f.dim() && column_rank(f.vectors(), tol)? == f.dim())
}

fn uniform_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A random complex tensor averaged over its six signed-conjugate images.
pub fn random_hermitian3(n: usize, seed: u64) -> Result<HermitianTensor3> {
    require_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = CubicTensor::from_fn(3, n, |_| uniform_complex(&mut rng));
    let t = CubicTensor::from_fn(3, n, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        (raw.get3(i, j, k)
            + raw.get3(j, k, i)
            + raw.get3(k, i, j)
            + raw.get3(j, i, k).conj()
            + raw.get3(i, k, j).conj()
            + raw.get3(k, j, i).conj())
            / 6.0
    });
    HermitianTensor3::new(t, 1e-12)
}

/// Random lower triangular sub-Hermitian tensor with entries in the unit
/// square.
pub fn random_lower_sub_hermitian(n: usize, seed: u64) -> Result<TriFactor3> {
    require_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = CubicTensor::zeros(3, n);
    for i in 0..n {
        for j in 0..=i {
            t.set3(i, j, j, C64::new(rng.gen_range(-1.0..1.0), 0.0));
            for k in 0..j {
                let v = uniform_complex(&mut rng);
                t.set3(i, j, k, v);
                t.set3(i, k, j, v.conj());
            }
        }
    }
    Ok(TriFactor3::new_unchecked(t))
}

/// Random lower triangular tensor of order `m` with complex entries in the
/// unit square.
pub fn random_lower_triangular(m: usize, n: usize, seed: u64) -> Result<CubicTensor> {
    if m < 2 || n == 0 {
        return Err(Error::InvalidShape { order: m, dim: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = CubicTensor::zeros(m, n);
    let offsets: Vec<usize> = t.indices().enumerate().filter(|(_, ix)| ix[1..].iter().all(|&p| p <= ix[0])).map(|(o, _)| o).collect();
    for o in offsets {
        t.entries_mut()[o] = uniform_complex(&mut rng);
    }
    Ok(t)
}

/// `r` vectors of length `n` with components uniform in `[0, 1]`.
pub fn random_cp(n: usize, r: usize, seed: u64) -> Result<CPFactorization> {
    require_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CPFactorization::new((0..r).map(|_| (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::cp_tensor;

    fn re(a: &HermitianTensor3, i: usize, j: usize, k: usize) -> f64 {
        a.get3(i, j, k).re
    }

    #[test]
    fn closed_forms() {
        assert_eq!(re(&cauchy3(&[1.0, 1.0]).unwrap(), 0, 0, 0), 1.0 / 3.0);
        assert_eq!(re(&cauchy3(&[1.0, 2.0]).unwrap(), 0, 1, 1), 0.2);
        let h = hilbert3(3).unwrap();
        assert_eq!(re(&h, 0, 0, 0), 1.0);
        assert_eq!(re(&h, 1, 1, 1), 0.25);
        let l = lehmer3(3).unwrap();
        assert_eq!(re(&l, 0, 1, 2), 1.0 / 3.0);
        for i in 0..3 {
            assert_eq!(re(&l, i, i, i), 1.0);
        }
        for t in [cauchy3(&[0.3, 1.7, 2.2]).unwrap(), h, l] {
            assert_eq!(t.hermitian_deviation(), 0.0);
        }
        assert!(matches!(cauchy3(&[1.0, 0.0]), Err(Error::NonPositiveParameter { index: 2 })));
    }

    #[test]
    fn hilbert_is_shifted_cauchy() {
        for n in 1..=6 {
            let c: Vec<f64> = (1..=n).map(|i| i as f64 - 2.0 / 3.0).collect();
            let diff = hilbert3(n).unwrap().max_abs_diff(&cauchy3(&c).unwrap()).unwrap();
            assert!(diff <= 1e-15, "n={n}: {diff}");
        }
    }

    #[test]
    fn psd_examples() {
        assert_eq!(is_psd(&hilbert3(3).unwrap(), 1e-10).unwrap().verdict, Definiteness::Pd);
        let z = HermitianTensor3::from_tensor(CubicTensor::zeros(3, 2)).unwrap();
        let v = is_psd(&z, 1e-10).unwrap();
        assert_eq!(v.verdict, Definiteness::Psd);
        assert_eq!(v.min_slice_eigenvalue, 0.0);
        // orbit of a_121 = 1, zero diagonal
        let t = CubicTensor::from_fn(3, 2, |ix| {
            let s = sorted3(ix);
            C64::new(if s == [0, 0, 1] { 1.0 } else { 0.0 }, 0.0)
        });
        let t = HermitianTensor3::from_tensor(t).unwrap();
        assert_eq!(is_psd(&t, 1e-10).unwrap().verdict, Definiteness::Indefinite);
    }

    #[test]
    fn diag_check_examples() {
        assert!(nonneg_diag_check(&hilbert3(4).unwrap(), 1e-10));
        let t = CubicTensor::from_fn(3, 2, |ix| {
            let s = sorted3(ix);
            C64::new(if s == [0, 0, 1] { -1.0 } else { 0.0 }, 0.0)
        });
        assert!(!nonneg_diag_check(&HermitianTensor3::from_tensor(t).unwrap(), 1e-10));
        assert!(nonneg_diag_check(&HermitianTensor3::from_tensor(CubicTensor::zeros(3, 3)).unwrap(), 1e-10));
    }

    #[test]
    fn cp_checks() {
        let basis = CPFactorization::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(!cp_pd_certificate(&basis, 1e-10).unwrap());
        assert!(strongly_cp_check(&basis, 1e-10).unwrap());
        let f = CPFactorization::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(cp_pd_certificate(&f, 1e-10).unwrap());
        assert_eq!(is_psd(&cp_tensor(&f), 1e-10).unwrap().verdict, Definiteness::Pd);
        let f = CPFactorization::new(vec![vec![1.0, 1.0]]).unwrap();
        assert!(!strongly_cp_check(&f, 1e-10).unwrap());
        let f = CPFactorization::new(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(!strongly_cp_check(&f, 1e-10).unwrap());
    }

    #[test]
    fn random_factories_are_deterministic() {
        assert_eq!(random_hermitian3(3, 7).unwrap(), random_hermitian3(3, 7).unwrap());
        assert_ne!(random_hermitian3(3, 7).unwrap(), random_hermitian3(3, 8).unwrap());
        let l = random_lower_sub_hermitian(4, 1).unwrap();
        assert_eq!(TriFactor3::structure_deviation(&l), 0.0);
        assert_eq!(l, random_lower_sub_hermitian(4, 1).unwrap());
        assert!(random_lower_triangular(3, 4, 2).unwrap().is_lower_triangular());
    }
}
