//! Chain products of sub-Hermitian tensors, the cubic power, the quadratic
//! form map, and completely positive constructions.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensor::{default_hermitian_tol, CubicTensor, HermitianTensor3, SliceMatrix};

/// `max(1, maxabs)³` over the given tensors, the natural size of any cubic
/// expression in their entries.
pub fn cubic_scale(tensors: &[&CubicTensor]) -> f64 {
    tensors.iter().fold(1f64, |m, t| m.max(t.maxabs())).powi(3)
}

fn require_order3(t: &CubicTensor) -> Result<()> {
    if t.order() != 3 {
        return Err(Error::OrderMismatch { expected: 3, got: t.order() });
    }
    Ok(())
}

fn require_same_shape(ts: &[&CubicTensor]) -> Result<usize> {
    for t in ts {
        require_order3(t)?;
    }
    let n = ts[0].dim();
    if let Some(bad) = ts.iter().find(|t| t.dim() != n) {
        return Err(Error::DimMismatch(bad.dim(), n));
    }
    Ok(n)
}

fn require_sub_hermitian(ts: &[&CubicTensor], tol: f64) -> Result<()> {
    if ts.iter().all(|t| t.is_sub_hermitian3(tol)) {
        Ok(())
    } else {
        Err(Error::NotSubHermitian)
    }
}

/// Mode-3 slice `B^s`, i.e. the matrix `(b_irs)_{i,r}`.
fn mode3(t: &CubicTensor, s: usize) -> SliceMatrix {
    SliceMatrix::from_fn(t.dim(), |i, r| t.get3(i, r, s))
}

/// `a_ijk = Σ_{r,s,t} b_irs · c_jtr · d_kst`, evaluated slice by slice as
/// `A^k = Σ_{s,t} d_kst · B^s · (C^t)ᴴ`.
///
/// The two forms agree because `C` is sub-Hermitian; `tol` is the accepted
/// sub-Hermitian deviation of each input.
pub fn chain_multiply(b: &CubicTensor, c: &CubicTensor, d: &CubicTensor, tol: f64) -> Result<CubicTensor> {
    let n = require_same_shape(&[b, c, d])?;
    require_sub_hermitian(&[b, c, d], tol)?;
    let bs: Vec<SliceMatrix> = (0..n).map(|s| mode3(b, s)).collect();
    let ch: Vec<SliceMatrix> = (0..n).map(|t| mode3(c, t).conj_transpose()).collect();
    let mut products = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            products.push(bs[s].matmul(&ch[t]));
        }
    }
    let slices: Vec<SliceMatrix> = (0..n)
        .map(|k| {
            let mut acc = SliceMatrix::zeros(n);
            for s in 0..n {
                for t in 0..n {
                    let w = d.get3(k, s, t);
                    if w != C64::new(0.0, 0.0) {
                        accumulate(&mut acc, &products[s * n + t], w);
                    }
                }
            }
            acc
        })
        .collect();
    CubicTensor::from_mode3_slices(&slices)
}

fn accumulate(acc: &mut SliceMatrix, m: &SliceMatrix, w: C64) {
    let n = acc.dim();
    for i in 0..n {
        for j in 0..n {
            acc.set(i, j, acc.get(i, j) + w * m.get(i, j));
        }
    }
}

/// Direct `O(n⁶)` triple sum `a_ijk = Σ_{r,s,t} b_irs · c_jtr · d_kst`.
pub fn chain_multiply_direct(b: &CubicTensor, c: &CubicTensor, d: &CubicTensor) -> Result<CubicTensor> {
    let n = require_same_shape(&[b, c, d])?;
    Ok(CubicTensor::from_fn(3, n, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    acc += b.get3(i, r, s) * c.get3(j, t, r) * d.get3(k, s, t);
                }
            }
        }
        acc
    }))
}

/// Mode-3 slice `k` of `g(B)`, summing `s, t < upto` only:
/// `Σ_{s,t<upto} b_kst · B^s · (B^t)ᴴ`.
///
/// With `upto = n` this is the exact slice. For lower triangular `B` every
/// term with `s > k` or `t > k` vanishes, so `upto = k + 1` already is.
pub fn cubic_power_slice(b: &CubicTensor, k: usize, upto: usize) -> Result<SliceMatrix> {
    require_order3(b)?;
    let n = b.dim();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k + 1, dim: n });
    }
    let upto = upto.min(n);
    let mut acc = SliceMatrix::zeros(n);
    for s in 0..upto {
        let bs = mode3(b, s);
        for t in 0..upto {
            let w = b.get3(k, s, t);
            if w != C64::new(0.0, 0.0) {
                accumulate(&mut acc, &bs.matmul(&mode3(b, t).conj_transpose()), w);
            }
        }
    }
    Ok(acc)
}

/// The cubic power `g(B)`: `a_ijk = Σ_{r,s,t} b_irs · conj(b_jrt) · b_kst`.
///
/// `B` must be sub-Hermitian within [`default_hermitian_tol`]. The result is
/// Hermitian up to rounding; it is not projected.
pub fn cubic_power(b: &CubicTensor) -> Result<HermitianTensor3> {
    require_order3(b)?;
    require_sub_hermitian(&[b], default_hermitian_tol(b))?;
    let n = b.dim();
    let lower = b.is_lower_triangular();
    let slices = (0..n)
        .map(|k| cubic_power_slice(b, k, if lower { k + 1 } else { n }))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianTensor3::new_unchecked(CubicTensor::from_mode3_slices(&slices)?))
}

/// `y` and the largest imaginary part discarded while forming it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormResult {
    pub y: Vec<f64>,
    pub max_imag_leak: f64,
}

/// `y_i = Σ_{j,k} a_ijk · conj(x_j) · x_k`, which is real for Hermitian `A`.
pub fn quadratic_form_map(a: &HermitianTensor3, x: &[C64]) -> Result<QuadraticFormResult> {
    let n = a.dim();
    if x.len() != n {
        return Err(Error::DimMismatch(x.len(), n));
    }
    let mut y = Vec::with_capacity(n);
    let mut leak: f64 = 0.0;
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let xj = x[j].conj();
            for k in 0..n {
                acc += a.get3(i, j, k) * xj * x[k];
            }
        }
        leak = leak.max(acc.im.abs());
        y.push(acc.re);
    }
    Ok(QuadraticFormResult { y, max_imag_leak: leak })
}

/// `u³`, entry `(i, j, k)` equal to `u_i · u_j · u_k`.
///
/// The product is formed in sorted index order, so the result is exactly
/// symmetric.
pub fn rank_one_cube(u: &[f64]) -> Result<CubicTensor> {
    if u.is_empty() {
        return Err(Error::InvalidShape { order: 3, dim: 0 });
    }
    if let Some(offset) = u.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteEntry { offset });
    }
    Ok(CubicTensor::from_fn(3, u.len(), |ix| C64::new(sorted_product(u, ix), 0.0)))
}

fn sorted_product(u: &[f64], ix: &[usize]) -> f64 {
    let mut s = [ix[0], ix[1], ix[2]];
    s.sort_unstable();
    u[s[0]] * u[s[1]] * u[s[2]]
}

/// Nonnegative vectors `u^(1), …, u^(r)` of a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct CPFactorization {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl CPFactorization {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vectors.first() else { return Err(Error::EmptyFactorization) };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidShape { order: 3, dim: 0 });
        }
        for (l, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimMismatch(v.len(), dim));
            }
            if let Some(c) = v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(Error::NegativeComponent { vector: l + 1, component: c + 1 });
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }
}

/// `Σ_l (u^(l))³`. Real, entrywise nonnegative and exactly symmetric.
pub fn cp_tensor(f: &CPFactorization) -> HermitianTensor3 {
    let t = CubicTensor::from_fn(3, f.dim, |ix| {
        C64::new(f.vectors.iter().map(|u| sorted_product(u, ix)).sum(), 0.0)
    });
    HermitianTensor3::new_unchecked(t)
}
