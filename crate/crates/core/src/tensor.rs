//! Dense cubic tensors, slice matrices, and structural predicates.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense order-`m`, dimension-`n` complex tensor.
///
/// Entry `(i1, …, im)` (0-based) lives at offset `Σ_p i_p · n^(m−1−p)`, so the
/// last index runs fastest. Real tensors are stored with zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicTensor {
    order: usize,
    dim: usize,
    data: Vec<C64>,
}

impl CubicTensor {
    pub fn new(order: usize, dim: usize, entries: Vec<C64>) -> Result<Self> {
        let expected = checked_len(order, dim)?;
        if entries.len() != expected {
            return Err(Error::LengthMismatch { expected, got: entries.len() });
        }
        if let Some(offset) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry { offset });
        }
        Ok(Self { order, dim, data: entries })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(order: usize, dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(order, dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(order: usize, dim: usize) -> Self {
        let len = checked_len(order, dim).expect("tensor shape");
        Self { order, dim, data: vec![C64::new(0.0, 0.0); len] }
    }

    /// Builds a tensor by evaluating `f` on every multi-index in canonical order.
    ///
    /// Panics if `f` returns a non-finite value.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let mut t = Self::zeros(order, dim);
        let mut idx = vec![0usize; order];
        for off in 0..t.data.len() {
            let v = f(&idx);
            assert!(v.re.is_finite() && v.im.is_finite(), "non-finite entry at {idx:?}");
            t.data[off] = v;
            advance(&mut idx, dim);
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn get3(&self, i: usize, j: usize, k: usize) -> C64 {
        debug_assert_eq!(self.order, 3);
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub(crate) fn set3(&mut self, i: usize, j: usize, k: usize, v: C64) {
        debug_assert_eq!(self.order, 3);
        let n = self.dim;
        self.data[(i * n + j) * n + k] = v;
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn maxabs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Entrywise `max |self − other|`.
    pub fn max_abs_diff(&self, other: &CubicTensor) -> Result<f64> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn scaled(&self, c: f64) -> CubicTensor {
        CubicTensor { order: self.order, dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// Iterates over all multi-indices in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let mut idx = vec![0usize; self.order];
        (0..self.data.len()).map(move |_| {
            let cur = idx.clone();
            advance(&mut idx, self.dim);
            cur
        })
    }

    fn require_order3(&self) -> Result<()> {
        if self.order != 3 {
            return Err(Error::OrderMismatch { expected: 3, got: self.order });
        }
        Ok(())
    }

    /// Matrix obtained by fixing one index of an order-3 tensor.
    ///
    /// `mode` is 1, 2 or 3 and names the fixed position; `index` is 0-based.
    /// The remaining two indices keep their relative order as (row, column).
    pub fn slice(&self, mode: usize, index: usize) -> Result<SliceMatrix> {
        self.require_order3()?;
        if index >= self.dim {
            return Err(Error::IndexOutOfRange { index: index + 1, dim: self.dim });
        }
        let n = self.dim;
        let get = |a: usize, b: usize| match mode {
            1 => Ok(self.get3(index, a, b)),
            2 => Ok(self.get3(a, index, b)),
            3 => Ok(self.get3(a, b, index)),
            _ => Err(Error::IndexOutOfRange { index: mode, dim: 3 }),
        };
        let mut m = SliceMatrix::zeros(n);
        for a in 0..n {
            for b in 0..n {
                m.set(a, b, get(a, b)?);
            }
        }
        Ok(m)
    }

    /// Inverse of taking every mode-3 slice.
    pub fn from_mode3_slices(slices: &[SliceMatrix]) -> Result<CubicTensor> {
        let n = slices.len();
        if n == 0 {
            return Err(Error::InvalidShape { order: 3, dim: 0 });
        }
        if let Some(bad) = slices.iter().find(|s| s.dim() != n) {
            return Err(Error::DimMismatch(bad.dim(), n));
        }
        Ok(CubicTensor::from_fn(3, n, |ix| slices[ix[2]].get(ix[0], ix[1])))
    }

    /// Largest deviation from the six Hermitian relations
    /// `a_ijk = a_jki = a_kij = conj(a_jik) = conj(a_ikj) = conj(a_kji)`.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.order != 3 {
            return f64::INFINITY;
        }
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.get3(i, j, k);
                    for b in [self.get3(j, k, i), self.get3(k, i, j)] {
                        dev = dev.max((a - b).norm());
                    }
                    for b in [self.get3(j, i, k), self.get3(i, k, j), self.get3(k, j, i)] {
                        dev = dev.max((a - b.conj()).norm());
                    }
                }
            }
        }
        dev
    }

    pub fn is_hermitian3(&self, tol: f64) -> bool {
        self.order == 3 && self.hermitian_deviation() <= tol
    }

    /// Zero pattern: `t_{i1…im} = 0` whenever some trailing index exceeds `i1`.
    pub fn is_lower_triangular(&self) -> bool {
        self.indices()
            .zip(&self.data)
            .all(|(ix, z)| ix[1..].iter().all(|&t| t <= ix[0]) || *z == C64::new(0.0, 0.0))
    }

    /// Lower triangular and invariant under permutations of the trailing indices.
    pub fn is_lower_sub_symmetric(&self) -> bool {
        if !self.is_lower_triangular() {
            return false;
        }
        // Invariance under all trailing permutations is equivalent to equality
        // with the entry whose trailing indices are sorted.
        let mut sorted = vec![0usize; self.order];
        self.indices().zip(&self.data).all(|(ix, z)| {
            sorted.copy_from_slice(&ix);
            sorted[1..].sort_unstable();
            self.get(&sorted) == *z
        })
    }

    /// Every mode-1 slice is Hermitian within `tol`.
    pub fn is_sub_hermitian3(&self, tol: f64) -> bool {
        self.order == 3 && self.sub_hermitian_deviation() <= tol
    }

    pub fn sub_hermitian_deviation(&self) -> f64 {
        if self.order != 3 {
            return f64::INFINITY;
        }
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    dev = dev.max((self.get3(i, j, k) - self.get3(i, k, j).conj()).norm());
                }
            }
        }
        dev
    }

    /// `b_ijk = 0` whenever `j > i` or `k > i`, and every mode-1 slice Hermitian.
    pub fn is_lower_tri_sub_hermitian3(&self, tol: f64) -> bool {
        self.order == 3 && self.is_lower_triangular() && self.is_sub_hermitian3(tol)
    }
}

/// Conjugate-symmetry tolerance used when none is given: `1e-12 · maxabs(T)`.
pub fn default_hermitian_tol(t: &CubicTensor) -> f64 {
    1e-12 * t.maxabs()
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    if order < 2 || dim < 1 {
        return Err(Error::InvalidShape { order, dim });
    }
    u32::try_from(order)
        .ok()
        .and_then(|o| dim.checked_pow(o))
        .ok_or(Error::Overflow)
}

/// Odometer increment, last index fastest.
pub(crate) fn advance(idx: &mut [usize], dim: usize) {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < dim {
            return;
        }
        idx[p] = 0;
    }
}

/// A validated third-order Hermitian tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTensor3(CubicTensor);

impl HermitianTensor3 {
    pub fn new(t: CubicTensor, tol: f64) -> Result<Self> {
        if t.order() != 3 {
            return Err(Error::OrderMismatch { expected: 3, got: t.order() });
        }
        if !t.is_hermitian3(tol) {
            return Err(Error::NotHermitian);
        }
        Ok(Self(t))
    }

    /// Validates with [`default_hermitian_tol`].
    pub fn from_tensor(t: CubicTensor) -> Result<Self> {
        let tol = default_hermitian_tol(&t);
        Self::new(t, tol)
    }

    pub(crate) fn new_unchecked(t: CubicTensor) -> Self {
        debug_assert_eq!(t.order(), 3);
        Self(t)
    }

    pub fn as_tensor(&self) -> &CubicTensor {
        &self.0
    }

    pub fn into_tensor(self) -> CubicTensor {
        self.0
    }
}

impl Deref for HermitianTensor3 {
    type Target = CubicTensor;

    fn deref(&self) -> &CubicTensor {
        &self.0
    }
}

/// A third-order lower triangular sub-Hermitian tensor: the factor `L` of
/// `S = g(L)`.
///
/// Slice `L^k = L(:,:,k)` is lower triangular with its first `k` rows zero
/// (0-based), and column `i` of `L^j` is the conjugate of column `j` of `L^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriFactor3(CubicTensor);

impl TriFactor3 {
    pub fn new(t: CubicTensor, tol: f64) -> Result<Self> {
        if t.order() != 3 {
            return Err(Error::OrderMismatch { expected: 3, got: t.order() });
        }
        if !t.is_lower_tri_sub_hermitian3(tol) {
            return Err(Error::NotTriFactor);
        }
        Ok(Self(t))
    }

    pub fn from_tensor(t: CubicTensor) -> Result<Self> {
        let tol = default_hermitian_tol(&t);
        Self::new(t, tol)
    }

    pub(crate) fn new_unchecked(t: CubicTensor) -> Self {
        Self(t)
    }

    pub fn as_tensor(&self) -> &CubicTensor {
        &self.0
    }

    pub fn into_tensor(self) -> CubicTensor {
        self.0
    }

    /// Largest violation of the three structural invariants. The zero pattern
    /// is exact, so any violation there is reported as infinity.
    pub fn structure_deviation(t: &CubicTensor) -> f64 {
        if t.order() != 3 || !t.is_lower_triangular() {
            return f64::INFINITY;
        }
        let n = t.dim();
        let mut dev = t.sub_hermitian_deviation();
        // column a of L^b against the conjugate of column b of L^a
        for a in 0..n {
            for b in 0..n {
                for r in 0..n {
                    dev = dev.max((t.get3(r, a, b) - t.get3(r, b, a).conj()).norm());
                }
            }
        }
        dev
    }
}

impl Deref for TriFactor3 {
    type Target = CubicTensor;

    fn deref(&self) -> &CubicTensor {
        &self.0
    }
}

/// Dense square complex matrix, used for tensor slices and small kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMatrix {
    n: usize,
    data: Vec<C64>,
}

impl SliceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from row-major rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn maxabs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn conj_transpose(&self) -> SliceMatrix {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &SliceMatrix) -> SliceMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for r in 0..n {
                let a = self.get(i, r);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(r, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> SliceMatrix {
        Self { n: self.n, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn max_abs_diff(&self, other: &SliceMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == C64::new(0.0, 0.0)))
    }
}

/// Structural class whose independent entries are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorClass {
    General,
    Symmetric,
    LowerTriangular,
    LowerTriangularSubSymmetric,
}

impl TensorClass {
    pub const ALL: [TensorClass; 4] = [
        TensorClass::General,
        TensorClass::Symmetric,
        TensorClass::LowerTriangular,
        TensorClass::LowerTriangularSubSymmetric,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            TensorClass::General => "t",
            TensorClass::Symmetric => "s",
            TensorClass::LowerTriangular => "l",
            TensorClass::LowerTriangularSubSymmetric => "ls",
        }
    }
}

impl fmt::Display for TensorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for TensorClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "t" | "general" => Ok(TensorClass::General),
            "s" | "symmetric" => Ok(TensorClass::Symmetric),
            "l" | "lower-triangular" => Ok(TensorClass::LowerTriangular),
            "ls" | "lower-triangular-sub-symmetric" => Ok(TensorClass::LowerTriangularSubSymmetric),
            other => Err(format!("unknown tensor class `{other}` (expected t, s, l or ls)")),
        }
    }
}
