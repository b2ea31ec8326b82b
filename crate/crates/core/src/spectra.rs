//! Eigenpairs `T·x^(m−1) = λ·x^[m−1]` of lower triangular tensors.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::poly_roots;
use crate::tensor::{advance, CubicTensor};

/// Default cap on the number of explored leaves of the root tree.
pub const BRANCH_CAP: usize = 256;

/// Roots closer than this are one branch.
const ROOT_DEDUP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub lambda: C64,
    pub x: Vec<C64>,
    pub residual: f64,
    /// Some coordinate was a free parameter and was pinned to 0 or 1.
    pub free: bool,
    /// Root index taken at each step after the pivot coordinate.
    pub branch: Vec<usize>,
}

fn check_len(t: &CubicTensor, x: &[C64]) -> Result<()> {
    if x.len() != t.dim() {
        return Err(Error::DimMismatch(x.len(), t.dim()));
    }
    Ok(())
}

/// `(T·x^(m−1))_k = Σ t_{k,i2,…,im} · x_{i2} ⋯ x_{im}` over all trailing indices.
pub fn apply_power(t: &CubicTensor, x: &[C64]) -> Result<Vec<C64>> {
    check_len(t, x)?;
    Ok((0..t.dim()).map(|k| component(t, x, k, t.dim())).collect())
}

/// Same as [`apply_power`] with trailing indices restricted to `0..=k`, which
/// loses nothing when `T` is lower triangular.
pub fn apply_power_truncated(t: &CubicTensor, x: &[C64]) -> Result<Vec<C64>> {
    check_len(t, x)?;
    if !t.is_lower_triangular() {
        return Err(Error::NotLowerTriangular);
    }
    Ok((0..t.dim()).map(|k| component(t, x, k, k + 1)).collect())
}

/// Trailing indices run over `0..bound` in lexicographic order.
fn component(t: &CubicTensor, x: &[C64], k: usize, bound: usize) -> C64 {
    let m = t.order();
    let mut idx = vec![0usize; m];
    idx[0] = k;
    let mut acc = C64::new(0.0, 0.0);
    loop {
        let mut prod = t.get(&idx);
        for &p in &idx[1..] {
            prod *= x[p];
        }
        acc += prod;
        if !advance_bounded(&mut idx[1..], bound) {
            return acc;
        }
    }
}

fn advance_bounded(idx: &mut [usize], bound: usize) -> bool {
    if idx.is_empty() {
        return false;
    }
    advance(idx, bound);
    idx.iter().any(|&p| p != 0)
}

/// `maxabs(T·x^(m−1) − λ·x^[m−1])`.
pub fn verify_eigenpair(t: &CubicTensor, lambda: C64, x: &[C64]) -> Result<f64> {
    check_len(t, x)?;
    if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::ZeroVector);
    }
    let ax = apply_power(t, x)?;
    let p = (t.order() - 1) as i32;
    Ok(ax.iter().zip(x).map(|(a, xi)| (a - lambda * xi.powi(p)).norm()).fold(0.0, f64::max))
}

/// Size of the terms of `T·x^(m−1) − λ·x^[m−1]`:
/// `max(1, maxabs(T), |λ|) · max(1, maxabs(x))^(m−1)`.
pub fn eigen_scale(t: &CubicTensor, lambda: C64, x: &[C64]) -> f64 {
    let xs = x.iter().fold(1f64, |m, z| m.max(z.norm()));
    1f64.max(t.maxabs()).max(lambda.norm()) * xs.powi(t.order() as i32 - 1)
}

/// `(t_{1…1}, …, t_{n…n})`.
pub fn diagonal_eigenvalues(t: &CubicTensor) -> Result<Vec<C64>> {
    if !t.is_lower_triangular() {
        return Err(Error::NotLowerTriangular);
    }
    Ok((0..t.dim()).map(|i| t.get(&vec![i; t.order()])).collect())
}

/// Eigenpairs with eigenvalue `t_{i…i}` (`i` 0-based).
///
/// Sets `x_p = 0` for `p < i` and `x_i = 1`; each later `x_k` solves the
/// degree-`(m−1)` polynomial from row `k` of the eigen equation. Distinct
/// roots open separate branches, explored depth first up to `branch_cap`
/// leaves. An identically zero polynomial leaves `x_k` free, explored as 0
/// and 1. Only pairs whose residual is at most `tol · eigen_scale` are kept.
pub fn triangular_eigenpairs(t: &CubicTensor, i: usize, tol: f64, branch_cap: usize) -> Result<Vec<Eigenpair>> {
    if !t.is_lower_triangular() {
        return Err(Error::NotLowerTriangular);
    }
    let n = t.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i + 1, dim: n });
    }
    let lambda = t.get(&vec![i; t.order()]);
    let mut x = vec![C64::new(0.0, 0.0); n];
    x[i] = C64::new(1.0, 0.0);
    let mut search = Search { t, i, lambda, tol, cap: branch_cap, leaves: 0, dead_at: None, out: Vec::new() };
    search.descend(&mut x, i + 1, &mut Vec::new(), false)?;
    if search.leaves == 0 {
        if let Some(k) = search.dead_at {
            return Err(Error::DegeneratePolynomial { k: k + 1 });
        }
    }
    Ok(search.out)
}

struct Search<'a> {
    t: &'a CubicTensor,
    i: usize,
    lambda: C64,
    tol: f64,
    cap: usize,
    leaves: usize,
    dead_at: Option<usize>,
    out: Vec<Eigenpair>,
}

impl Search<'_> {
    fn descend(&mut self, x: &mut Vec<C64>, k: usize, path: &mut Vec<usize>, free: bool) -> Result<()> {
        if self.leaves >= self.cap {
            return Ok(());
        }
        let n = self.t.dim();
        if k == n {
            self.leaves += 1;
            let residual = verify_eigenpair(self.t, self.lambda, x)?;
            if residual <= self.tol * eigen_scale(self.t, self.lambda, x) {
                self.out.push(Eigenpair { lambda: self.lambda, x: x.clone(), residual, free, branch: path.clone() });
            }
            return Ok(());
        }
        let mut coeffs = self.row_polynomial(x, k);
        let bound = self.tol * eigen_scale(self.t, self.lambda, x);
        for c in &mut coeffs {
            if c.norm() <= bound {
                *c = C64::new(0.0, 0.0);
            }
        }
        let zero = C64::new(0.0, 0.0);
        let (values, now_free) = match coeffs.iter().position(|&c| c != zero) {
            None => (vec![zero, C64::new(1.0, 0.0)], true),
            Some(p) if p == coeffs.len() - 1 => {
                self.dead_at.get_or_insert(k);
                return Ok(());
            }
            Some(_) => (dedup(poly_roots(&coeffs)?.roots), false),
        };
        for (b, v) in values.into_iter().enumerate() {
            x[k] = v;
            path.push(b);
            self.descend(x, k + 1, path, free || now_free)?;
            path.pop();
        }
        x[k] = zero;
        Ok(())
    }

    /// Coefficients (highest degree first) of row `k` as a polynomial in
    /// `x_k`, with `λ` moved to the left side.
    fn row_polynomial(&self, x: &[C64], k: usize) -> Vec<C64> {
        let m = self.t.order();
        let deg = m - 1;
        let mut by_degree = vec![C64::new(0.0, 0.0); deg + 1];
        // trailing indices range over i..=k; anything below i multiplies x_p = 0
        let width = k + 1 - self.i;
        let mut tail = vec![0usize; deg];
        let mut idx = vec![0usize; m];
        idx[0] = k;
        loop {
            let mut d = 0;
            let mut prod = C64::new(1.0, 0.0);
            for (p, &o) in tail.iter().enumerate() {
                let q = self.i + o;
                idx[p + 1] = q;
                if q == k {
                    d += 1;
                } else {
                    prod *= x[q];
                }
            }
            by_degree[d] += self.t.get(&idx) * prod;
            advance(&mut tail, width);
            if tail.iter().all(|&o| o == 0) {
                break;
            }
        }
        by_degree[deg] -= self.lambda;
        by_degree.reverse();
        by_degree
    }
}

fn dedup(roots: Vec<C64>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for r in roots {
        if out.iter().all(|o| (o - r).norm() > ROOT_DEDUP * 1f64.max(r.norm())) {
            out.push(r);
        }
    }
    out
}
