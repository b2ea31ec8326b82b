//! Triangular decomposition `S = g(L)` of third-order Hermitian tensors.
//!
//! `L` is built one index `k` at a time. Step `k` fixes every entry
//! `l_{x,y,k}` with `x ≥ y ≥ k` (together with its sub-Hermitian partner
//! `l_{x,k,y} = conj(l_{x,y,k})`) from the equations `s_{i,j,k}`, `i ≥ j ≥ k`:
//! a cubic for `l_kkk`, linear equations for `l_ikk`, and for each `j > k` a
//! quadratic for `l_jjk` followed by linear equations for `l_ijk`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, PivotKind, Result};
use crate::kernels::{
    cholesky_psd, hermitian_eigenvalues, solve_pivot_cubic, solve_pivot_linear, solve_pivot_quadratic, PivotCubic,
    PivotQuadratic,
};
use crate::multilinear::cubic_power;
use crate::tensor::{CubicTensor, HermitianTensor3, TriFactor3};

/// Relative imaginary part below which a candidate root counts as real.
const REAL_EPS: f64 = 1e-8;

/// How to pick among several residual-feasible roots of a pivot equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootPolicy {
    /// Real before complex, nonnegative before negative, then largest
    /// magnitude, then smallest `(Re, Im)`.
    #[default]
    Classical,
    /// Smallest in `(Re, Im)` order.
    First,
    /// Smallest magnitude, then smallest `(Re, Im)`.
    MinMagnitude,
}

impl RootPolicy {
    pub fn name(self) -> &'static str {
        match self {
            RootPolicy::Classical => "classical",
            RootPolicy::First => "first",
            RootPolicy::MinMagnitude => "min-magnitude",
        }
    }
}

impl fmt::Display for RootPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RootPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classical" => Ok(RootPolicy::Classical),
            "first" => Ok(RootPolicy::First),
            "min-magnitude" => Ok(RootPolicy::MinMagnitude),
            other => Err(format!("unknown root policy `{other}` (expected classical, first or min-magnitude)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precondition {
    ZeroFirstSlice,
    #[serde(rename = "ScaledPSD")]
    ScaledPsd,
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionStatus {
    pub status: Precondition,
    pub detail: String,
}

/// Classifies the first slice `S¹ = (s_1jk)`.
///
/// With `scale = maxabs(S)`: `ZeroFirstSlice` when `maxabs(S¹) ≤ tol·scale`;
/// `ScaledPsd` when `|s_111| > tol·scale` and every eigenvalue of
/// `(conj(s_111)/|s_111|)·S¹` is at least `−tol·scale`; `Violated` otherwise.
pub fn check_precondition(s: &HermitianTensor3, tol: f64) -> PreconditionStatus {
    let scale = s.maxabs();
    let bound = tol * scale;
    let s1 = s.slice(1, 0).expect("order-3 tensor");
    if s1.maxabs() <= bound {
        return PreconditionStatus {
            status: Precondition::ZeroFirstSlice,
            detail: format!("first slice is zero (maxabs {:e})", s1.maxabs()),
        };
    }
    let corner = s.get3(0, 0, 0);
    if corner.norm() <= bound {
        return PreconditionStatus {
            status: Precondition::Violated,
            detail: format!("s_111 = 0 but the first slice is not (maxabs {:e})", s1.maxabs()),
        };
    }
    let phase = corner.conj() / corner.norm();
    match hermitian_eigenvalues(&s1.scale(phase), 1e-8) {
        Ok(eig) => {
            let min = eig[0];
            if min >= -bound {
                PreconditionStatus {
                    status: Precondition::ScaledPsd,
                    detail: format!("conj(s_111)·S¹ is positive semi-definite (min eigenvalue {min:e})"),
                }
            } else {
                PreconditionStatus {
                    status: Precondition::Violated,
                    detail: format!("conj(s_111)·S¹ has negative eigenvalue {min:e}"),
                }
            }
        }
        Err(e) => PreconditionStatus { status: Precondition::Violated, detail: format!("first slice: {e}") },
    }
}

/// One solved pivot. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootLogEntry {
    pub k: usize,
    pub j: usize,
    pub i: usize,
    pub kind: PivotKind,
    pub n_candidates: usize,
    pub chosen: [f64; 2],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    #[serde(rename = "residual")]
    pub residual_maxabs: f64,
    pub precondition: Precondition,
    pub policy: RootPolicy,
    pub root_log: Vec<RootLogEntry>,
}

impl DecompositionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Polynomial in `t` and `conj(t)`, `p[a][b]` multiplying `t^a · conj(t)^b`.
type Poly = [[C64; 4]; 4];

/// A factor of degree at most one: `c0 + c1·t + c2·conj(t)`.
type Linear = [C64; 3];

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn mul(p: &Poly, f: &Linear) -> Poly {
    let mut out = [[zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let c = p[a][b];
            if c == zero() {
                continue;
            }
            out[a][b] += c * f[0];
            if a < 3 {
                out[a + 1][b] += c * f[1];
            }
            if b < 3 {
                out[a][b + 1] += c * f[2];
            }
        }
    }
    out
}

/// Collects `Σ_{r,s,t} l_irs · conj(l_jrt) · l_kst` as a polynomial in the
/// unknown entry at `u = (x, y, k)`; its partner `(x, k, y)` stands for
/// `conj(t)`. Entries not yet solved are zero in `l` and drop out.
fn collapse(l: &CubicTensor, target: (usize, usize, usize), u: (usize, usize, usize)) -> Poly {
    let (i, j, k) = target;
    let partner = (u.0, u.2, u.1);
    let n = l.dim();
    let factor = |p: (usize, usize, usize), conj: bool| -> Linear {
        let f = if p == u {
            [zero(), C64::new(1.0, 0.0), zero()]
        } else if p == partner {
            [zero(), zero(), C64::new(1.0, 0.0)]
        } else {
            [l.get3(p.0, p.1, p.2), zero(), zero()]
        };
        if conj {
            [f[0].conj(), f[2].conj(), f[1].conj()]
        } else {
            f
        }
    };
    let mut total = [[zero(); 4]; 4];
    for r in 0..n {
        for s in 0..=k {
            for t in 0..=k {
                let mut p = [[zero(); 4]; 4];
                p[0][0] = C64::new(1.0, 0.0);
                p = mul(&p, &factor((i, r, s), false));
                p = mul(&p, &factor((j, r, t), true));
                p = mul(&p, &factor((k, s, t), false));
                for a in 0..4 {
                    for b in 0..4 {
                        total[a][b] += p[a][b];
                    }
                }
            }
        }
    }
    total
}

fn only_monomials(p: &Poly, allowed: &[(usize, usize)]) -> bool {
    (0..4).all(|a| (0..4).all(|b| allowed.contains(&(a, b)) || p[a][b] == zero()))
}

fn is_real(t: C64) -> bool {
    t.im.abs() <= REAL_EPS * 1f64.max(t.norm())
}

/// Index of the chosen candidate in `roots` (sorted by `(Re, Im)`) and a
/// short reason.
fn select(policy: RootPolicy, roots: &[C64]) -> (usize, String) {
    if roots.len() == 1 {
        return (0, "unique".into());
    }
    match policy {
        RootPolicy::First => (0, "first in (re, im) order".into()),
        RootPolicy::MinMagnitude => {
            let mut best = 0;
            for (idx, z) in roots.iter().enumerate() {
                if z.norm() < roots[best].norm() {
                    best = idx;
                }
            }
            (best, "smallest magnitude".into())
        }
        RootPolicy::Classical => {
            let key = |z: C64| (is_real(z), is_real(z) && z.re >= 0.0);
            let mut best = 0;
            for (idx, &z) in roots.iter().enumerate().skip(1) {
                let (kz, kb) = (key(z), key(roots[best]));
                if kz > kb || (kz == kb && z.norm() > roots[best].norm()) {
                    best = idx;
                }
            }
            let z = roots[best];
            let class = match key(z) {
                (true, true) => "real nonnegative",
                (true, false) => "real negative",
                _ => "complex",
            };
            (best, format!("{class}, largest magnitude"))
        }
    }
}

fn set_pair(l: &mut CubicTensor, (x, y, k): (usize, usize, usize), v: C64) {
    if y == k {
        l.set3(x, y, k, C64::new(v.re, 0.0));
    } else {
        l.set3(x, y, k, v);
        l.set3(x, k, y, v.conj());
    }
}

struct Builder<'a> {
    s: &'a CubicTensor,
    l: CubicTensor,
    tol: f64,
    policy: RootPolicy,
    log: Vec<RootLogEntry>,
}

impl Builder<'_> {
    fn record(&mut self, (i, j, k): (usize, usize, usize), kind: PivotKind, n: usize, v: C64, reason: String) {
        self.log.push(RootLogEntry { k: k + 1, j: j + 1, i: i + 1, kind, n_candidates: n, chosen: [v.re, v.im], reason });
    }

    fn first_slice(&mut self) -> Result<()> {
        let n = self.l.dim();
        let s0 = self.s.get3(0, 0, 0).re;
        let l0 = s0.signum() * s0.abs().cbrt();
        let m = self.s.slice(1, 0)?.scale(C64::new(1.0 / l0, 0.0));
        let mut lo = cholesky_psd(&m, self.tol).map_err(|e| {
            let col = match e {
                Error::NotPsd { pivot } => pivot,
                _ => 1,
            };
            Error::PivotFailure { k: 1, j: col, i: col, kind: PivotKind::Cholesky, source: Box::new(e) }
        })?;
        if l0 < 0.0 {
            for x in 0..n {
                lo.set(x, 0, -lo.get(x, 0));
            }
        }
        for x in 0..n {
            for y in 0..=x {
                set_pair(&mut self.l, (x, y, 0), lo.get(x, y));
            }
        }
        self.l.set3(0, 0, 0, C64::new(l0, 0.0));
        self.record((0, 0, 0), PivotKind::Cubic, 1, C64::new(l0, 0.0), "closed form".into());
        for y in 1..n {
            self.record((y, y, 0), PivotKind::Cholesky, 1, lo.get(y, y), "cholesky".into());
        }
        Ok(())
    }

    fn fail(pos: (usize, usize, usize), kind: PivotKind) -> impl FnOnce(Error) -> Error {
        move |e| Error::PivotFailure { k: pos.2 + 1, j: pos.1 + 1, i: pos.0 + 1, kind, source: Box::new(e) }
    }

    fn cubic(&mut self, k: usize) -> Result<()> {
        let pos = (k, k, k);
        let p = collapse(&self.l, pos, pos);
        debug_assert!(only_monomials(&p, &[(2, 1), (1, 0), (0, 1), (0, 0)]));
        debug_assert_eq!(p[2][1], C64::new(1.0, 0.0));
        let eq = PivotCubic { a: p[1][0], b: p[0][1], c: p[0][0], s: self.s.get3(k, k, k).re };
        let found = solve_pivot_cubic(&eq, self.tol).map_err(Self::fail(pos, PivotKind::Cubic))?;
        let real: Vec<C64> = found.roots.iter().filter(|&&z| is_real(z)).map(|z| C64::new(z.re, 0.0)).collect();
        if real.is_empty() {
            return Err(Self::fail(pos, PivotKind::Cubic)(Error::NoRootFound));
        }
        let (idx, reason) = select(self.policy, &real);
        set_pair(&mut self.l, pos, real[idx]);
        self.record(pos, PivotKind::Cubic, found.len(), real[idx], reason);
        Ok(())
    }

    fn quadratic(&mut self, j: usize, k: usize) -> Result<()> {
        let pos = (j, j, k);
        let p = collapse(&self.l, pos, pos);
        debug_assert!(only_monomials(&p, &[(1, 1), (1, 0), (0, 1), (0, 0)]));
        let eq = PivotQuadratic { q: p[1][1], a: p[1][0], b: p[0][1], d: p[0][0], s: self.s.get3(j, j, k) };
        let found = solve_pivot_quadratic(&eq, self.tol).map_err(Self::fail(pos, PivotKind::Quadratic))?;
        let (idx, reason) = select(self.policy, &found.roots);
        let v = found.roots[idx];
        set_pair(&mut self.l, pos, v);
        self.record(pos, PivotKind::Quadratic, found.len(), v, reason);
        Ok(())
    }

    fn linear(&mut self, pos: (usize, usize, usize)) -> Result<()> {
        let p = collapse(&self.l, pos, pos);
        debug_assert!(only_monomials(&p, &[(1, 0), (0, 0)]));
        let rhs = self.s.get3(pos.0, pos.1, pos.2) - p[0][0];
        let v = solve_pivot_linear(p[1][0], rhs, self.tol).map_err(Self::fail(pos, PivotKind::Linear))?;
        set_pair(&mut self.l, pos, v);
        let v = self.l.get3(pos.0, pos.1, pos.2);
        self.record(pos, PivotKind::Linear, 1, v, "unique".into());
        Ok(())
    }

    fn step(&mut self, k: usize) -> Result<()> {
        let n = self.l.dim();
        self.cubic(k)?;
        for i in k + 1..n {
            self.linear((i, k, k))?;
        }
        for j in k + 1..n {
            self.quadratic(j, k)?;
            for i in j + 1..n {
                self.linear((i, j, k))?;
            }
        }
        Ok(())
    }
}

/// Computes a lower triangular sub-Hermitian `L` with `g(L) = S`.
///
/// `S` is normalized to `maxabs = 1` first and `L` rescaled by
/// `maxabs(S)^(1/3)` at the end. Every pivot solved is logged in the report
/// together with the final residual `maxabs(S − g(L))`.
pub fn decompose(s: &HermitianTensor3, tol: f64, policy: RootPolicy) -> Result<(TriFactor3, DecompositionReport)> {
    let pre = check_precondition(s, tol);
    if pre.status == Precondition::Violated {
        return Err(Error::PreconditionViolated(pre.detail));
    }
    let n = s.dim();
    let sigma = s.maxabs();
    let normalized = if sigma > 0.0 { s.scaled(1.0 / sigma) } else { s.as_tensor().clone() };
    let mut b = Builder { s: &normalized, l: CubicTensor::zeros(3, n), tol, policy, log: Vec::new() };
    if pre.status == Precondition::ScaledPsd {
        b.first_slice()?;
    } else {
        b.record((0, 0, 0), PivotKind::Cholesky, 1, zero(), "zero first slice".into());
    }
    for k in 1..n {
        b.step(k)?;
    }
    let Builder { mut l, mut log, .. } = b;
    if sigma > 0.0 {
        let c = sigma.cbrt();
        l = l.scaled(c);
        for e in &mut log {
            e.chosen = [e.chosen[0] * c, e.chosen[1] * c];
        }
    }
    if TriFactor3::structure_deviation(&l) != 0.0 {
        return Err(Error::NotTriFactor);
    }
    let l = TriFactor3::new_unchecked(l);
    let residual_maxabs = residual(s, &l)?;
    let status = pre.status;
    Ok((l, DecompositionReport { residual_maxabs, precondition: status, policy, root_log: log }))
}

/// `g(L)`.
pub fn reconstruct(l: &TriFactor3) -> Result<HermitianTensor3> {
    cubic_power(l.as_tensor())
}

/// `maxabs(S − g(L))`.
pub fn residual(s: &HermitianTensor3, l: &TriFactor3) -> Result<f64> {
    if s.dim() != l.dim() {
        return Err(Error::DimMismatch(l.dim(), s.dim()));
    }
    reconstruct(l)?.max_abs_diff(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(order_dim: usize, f: impl FnMut(&[usize]) -> C64) -> HermitianTensor3 {
        HermitianTensor3::from_tensor(CubicTensor::from_fn(3, order_dim, f)).unwrap()
    }

    #[test]
    fn scalar_closed_form() {
        let s = herm(1, |_| C64::new(8.0, 0.0));
        let (l, report) = decompose(&s, 1e-10, RootPolicy::Classical).unwrap();
        assert_eq!(l.get3(0, 0, 0), C64::new(2.0, 0.0));
        assert_eq!(report.residual_maxabs, 0.0);
        assert_eq!(report.precondition, Precondition::ScaledPsd);

        let s = herm(1, |_| C64::new(-27.0, 0.0));
        let (l, _) = decompose(&s, 1e-10, RootPolicy::Classical).unwrap();
        assert_eq!(l.get3(0, 0, 0), C64::new(-3.0, 0.0));

        let s = herm(1, |_| zero());
        let (l, report) = decompose(&s, 1e-10, RootPolicy::Classical).unwrap();
        assert_eq!(l.get3(0, 0, 0), zero());
        assert_eq!(report.precondition, Precondition::ZeroFirstSlice);
    }

    #[test]
    fn diagonal_gives_cube_roots() {
        let d = [8.0, 27.0, 1.0, 0.125];
        let s = herm(4, |ix| if ix[0] == ix[1] && ix[1] == ix[2] { C64::new(d[ix[0]], 0.0) } else { zero() });
        let (l, report) = decompose(&s, 1e-10, RootPolicy::Classical).unwrap();
        for (i, di) in d.iter().enumerate() {
            assert!((l.get3(i, i, i).re - di.cbrt()).abs() < 1e-14);
        }
        assert!(report.residual_maxabs < 1e-13);
    }

    #[test]
    fn precondition_examples() {
        let z = herm(2, |_| zero());
        assert_eq!(check_precondition(&z, 1e-10).status, Precondition::ZeroFirstSlice);
        // s_221 = 1 closes to the orbit of (2,2,1)
        let t = herm(2, |ix| {
            let mut v = ix.to_vec();
            v.sort_unstable();
            if v == [0, 1, 1] {
                C64::new(1.0, 0.0)
            } else {
                zero()
            }
        });
        assert_eq!(check_precondition(&t, 1e-10).status, Precondition::Violated);
        assert!(matches!(decompose(&t, 1e-10, RootPolicy::Classical), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn policies_parse_and_print() {
        for p in [RootPolicy::Classical, RootPolicy::First, RootPolicy::MinMagnitude] {
            assert_eq!(p.to_string().parse::<RootPolicy>().unwrap(), p);
        }
        assert!("largest".parse::<RootPolicy>().is_err());
    }

    #[test]
    fn selection_rules() {
        let roots = [C64::new(-3.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 5.0), C64::new(2.0, 0.0)];
        assert_eq!(select(RootPolicy::Classical, &roots).0, 3);
        assert_eq!(select(RootPolicy::First, &roots).0, 0);
        assert_eq!(select(RootPolicy::MinMagnitude, &roots).0, 1);
        let neg = [C64::new(-3.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 5.0)];
        assert_eq!(select(RootPolicy::Classical, &neg).0, 0);
    }

    #[test]
    fn residual_examples() {
        let s = herm(2, |_| zero());
        let mut l = CubicTensor::zeros(3, 2);
        l.set3(0, 0, 0, C64::new(1.0, 0.0));
        let l = TriFactor3::from_tensor(l).unwrap();
        assert_eq!(residual(&s, &l).unwrap(), 1.0);
    }
}
