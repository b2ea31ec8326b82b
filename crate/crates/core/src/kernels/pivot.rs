//! Conjugate-coupled scalar equations.
//!
//! The unknown `t` appears together with `conj(t)`, so none of these is an
//! analytic polynomial. Each is solved as two real equations in `(Re t, Im t)`:
//! first a reduction to real `t`, then damped Newton from a fixed inventory of
//! starting points.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::newton::{newton_2d, NEWTON_MAX_ITER};
use super::roots::{poly_roots, solve_real_cubic, solve_real_quadratic, RootSet};
use crate::error::{Error, Result};

/// Candidates closer than `DEDUP_RADIUS · scale` are merged.
pub const DEDUP_RADIUS: f64 = 1e-8;

/// Number of pseudo-random Newton starts added to every pivot solve.
pub const RANDOM_STARTS: usize = 8;

const START_SEED: u64 = 0x7c40_1e5d_3a2b_9f01;

/// `t·|t|² + a·t + b·conj(t) + c = s`, with `s` real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotCubic {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub s: f64,
}

impl PivotCubic {
    pub fn residual(&self, t: C64) -> C64 {
        t * t.norm_sqr() + self.a * t + self.b * t.conj() + self.c - self.s
    }

    pub fn scale(&self) -> f64 {
        1f64.max(self.a.norm()).max(self.b.norm()).max(self.c.norm()).max(self.s.abs())
    }

    fn split(&self, p: [f64; 2]) -> [f64; 2] {
        let r = self.residual(C64::new(p[0], p[1]));
        [r.re, r.im]
    }

    fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let (x, y) = (p[0], p[1]);
        let sum = self.a + self.b;
        let diff = self.a - self.b;
        [
            [3.0 * x * x + y * y + sum.re, 2.0 * x * y - diff.im],
            [2.0 * x * y + sum.im, x * x + 3.0 * y * y + diff.re],
        ]
    }
}

/// `q·|t|² + a·t + b·conj(t) + d = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotQuadratic {
    pub q: C64,
    pub a: C64,
    pub b: C64,
    pub d: C64,
    pub s: C64,
}

impl PivotQuadratic {
    pub fn residual(&self, t: C64) -> C64 {
        self.q * t.norm_sqr() + self.a * t + self.b * t.conj() + self.d - self.s
    }

    pub fn scale(&self) -> f64 {
        [self.q, self.a, self.b, self.d, self.s].iter().fold(1f64, |m, z| m.max(z.norm()))
    }

    fn split(&self, p: [f64; 2]) -> [f64; 2] {
        let r = self.residual(C64::new(p[0], p[1]));
        [r.re, r.im]
    }

    fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let (x, y) = (p[0], p[1]);
        let sum = self.a + self.b;
        let diff = self.a - self.b;
        [
            [2.0 * self.q.re * x + sum.re, 2.0 * self.q.re * y - diff.im],
            [2.0 * self.q.im * x + sum.im, 2.0 * self.q.im * y + diff.re],
        ]
    }
}

fn random_starts(radius: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    (0..RANDOM_STARTS)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = radius * rng.gen::<f64>().sqrt();
            C64::from_polar(r, theta)
        })
        .collect()
}

/// Collects accepted candidates in arrival order, merging near-duplicates,
/// and returns them sorted by `(Re, Im)`.
struct Candidates {
    radius: f64,
    set: RootSet,
}

impl Candidates {
    fn new(scale: f64) -> Self {
        Self { radius: DEDUP_RADIUS * scale, set: RootSet::default() }
    }

    fn offer(&mut self, t: C64, residual: f64) {
        if !self.set.roots.iter().any(|r| (r - t).norm() <= self.radius) {
            self.set.push(t, residual);
        }
    }

    fn finish(mut self) -> Result<RootSet> {
        if self.set.is_empty() {
            return Err(Error::NoRootFound);
        }
        self.set.sort();
        Ok(self.set)
    }
}

fn newton_from(
    starts: &[C64],
    bound: f64,
    out: &mut Candidates,
    residual: impl Fn(C64) -> C64,
    split: impl Fn([f64; 2]) -> [f64; 2],
    jacobian: impl Fn([f64; 2]) -> [[f64; 2]; 2],
) {
    for s in starts {
        let run = newton_2d(&split, &jacobian, [s.re, s.im], bound, NEWTON_MAX_ITER);
        if run.converged {
            let t = C64::new(run.point[0], run.point[1]);
            let r = residual(t).norm();
            if r <= bound {
                out.offer(t, r);
            }
        }
    }
}

fn mul_poly(x: &[C64], y: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn add_poly(x: &[C64], y: &[C64]) -> Vec<C64> {
    let n = x.len().max(y.len());
    let at = |p: &[C64], k: usize| if k < p.len() { p[k] } else { C64::new(0.0, 0.0) };
    (0..n).map(|k| at(x, k) + at(y, k)).collect()
}

/// Roots of a polynomial given lowest degree first; empty when it is
/// identically zero or the iteration fails.
fn roots_ascending(mut p: Vec<C64>) -> Vec<C64> {
    let size = p.iter().fold(0f64, |m, z| m.max(z.norm()));
    while p.last().is_some_and(|z| z.norm() <= 1e-14 * size) {
        p.pop();
    }
    if p.len() < 2 {
        return Vec::new();
    }
    p.reverse();
    poly_roots(&p).map(|r| r.roots).unwrap_or_default()
}

/// Writing `u = conj(t)`, the cubic reads `t²u + a·t + b·u + c' = 0` with
/// `c' = c − s`. Solving for `u = −(a·t + c')/(t² + b)` and substituting
/// into the conjugate equation leaves
/// `t·(a·t + c')² − ā·(a·t + c')·(t² + b) + (b̄·t + c̄')·(t² + b)² = 0`,
/// whose roots contain every isolated solution with `t² ≠ −b`.
fn cubic_eliminant_roots(p: &PivotCubic) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let cp = p.c - p.s;
    let lin = [cp, p.a];
    let quad = [p.b, zero, one];
    let first = mul_poly(&[zero, one], &mul_poly(&lin, &lin));
    let second = mul_poly(&[-p.a.conj()], &mul_poly(&lin, &quad));
    let third = mul_poly(&[cp.conj(), p.b.conj()], &mul_poly(&quad, &quad));
    roots_ascending(add_poly(&add_poly(&first, &second), &third))
}

/// Same elimination for `q·t·u + a·t + b·u + d' = 0`, `d' = d − s`:
/// `(b̄q − q̄a)·t² + (|b|² + d̄'q − q̄d' − |a|²)·t + (d̄'b − ād') = 0`.
fn quadratic_eliminant_roots(p: &PivotQuadratic) -> Vec<C64> {
    let dp = p.d - p.s;
    let (q, a, b) = (p.q, p.a, p.b);
    roots_ascending(vec![
        dp.conj() * b - a.conj() * dp,
        b.norm_sqr() + dp.conj() * q - q.conj() * dp - a.norm_sqr(),
        b.conj() * q - q.conj() * a,
    ])
}

/// Solves `α·t = rhs`.
///
/// With `scale = max(1, |rhs|)`: returns `rhs/α` when `|α| > tol·scale`, zero
/// when both sides are negligible (the unknown is free), and
/// `InconsistentDegenerate` when only `α` is.
pub fn solve_pivot_linear(alpha: C64, rhs: C64, tol: f64) -> Result<C64> {
    let bound = tol * 1f64.max(rhs.norm());
    if alpha.norm() > bound {
        Ok(rhs / alpha)
    } else if rhs.norm() <= bound {
        Ok(C64::new(0.0, 0.0))
    } else {
        Err(Error::InconsistentDegenerate { residual: rhs.norm() })
    }
}

/// All solutions of a [`PivotCubic`] with `|residual| ≤ tol·scale`.
///
/// Starts: every root of the real reduction `x³ + Re(a+b)·x + Re(c−s) = 0`,
/// the three roots of `t³ + (a+b)·t + (c−s) = 0` ignoring the conjugation,
/// the roots of the eliminant obtained by treating `conj(t)` as a second
/// unknown, and [`RANDOM_STARTS`] fixed pseudo-random points.
pub fn solve_pivot_cubic(p: &PivotCubic, tol: f64) -> Result<RootSet> {
    let scale = p.scale();
    let bound = tol * scale;
    let mut out = Candidates::new(scale);
    let sum = p.a + p.b;
    let constant = p.c - p.s;

    let mut starts = Vec::new();
    let real = solve_real_cubic(1.0, 0.0, sum.re, constant.re)?;
    for &x in &real.roots {
        if x.im == 0.0 {
            let r = p.residual(x).norm();
            if r <= bound {
                out.offer(x, r);
            }
        }
        starts.push(x);
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if let Ok(naive) = poly_roots(&[one, zero, sum, constant]) {
        starts.extend(naive.roots);
    }
    starts.extend(cubic_eliminant_roots(p));
    let radius = 2.0 * 1f64.max(constant.norm().cbrt()).max(p.a.norm().sqrt()).max(p.b.norm().sqrt());
    starts.extend(random_starts(radius));

    newton_from(&starts, bound, &mut out, |t| p.residual(t), |x| p.split(x), |x| p.jacobian(x));
    out.finish()
}

/// All solutions of a [`PivotQuadratic`] with `|residual| ≤ tol·scale`.
///
/// Newton starts mirror [`solve_pivot_cubic`]: real reduction, the roots
/// ignoring the conjugation, the eliminant roots, zero and the pseudo-random
/// points. A quadratic coefficient below `tol·scale` is treated as zero. When `q`,
/// `a` and `b` are all negligible the equation only checks `d = s` and the
/// unknown is free, returned as zero.
pub fn solve_pivot_quadratic(p: &PivotQuadratic, tol: f64) -> Result<RootSet> {
    let scale = p.scale();
    let bound = tol * scale;
    let zero = C64::new(0.0, 0.0);
    let mut p = *p;
    if p.q.norm() <= bound {
        p.q = zero;
        if p.a.norm() <= bound && p.b.norm() <= bound {
            let r = (p.d - p.s).norm();
            if r <= bound {
                let mut set = RootSet::default();
                set.push(zero, r);
                return Ok(set);
            }
            return Err(Error::InconsistentDegenerate { residual: r });
        }
    }
    let mut out = Candidates::new(scale);
    let sum = p.a + p.b;
    let constant = p.d - p.s;

    let mut starts = Vec::new();
    if let Ok(real) = solve_real_quadratic(p.q.re, sum.re, constant.re) {
        for &x in &real.roots {
            if x.im == 0.0 {
                let r = p.residual(x).norm();
                if r <= bound {
                    out.offer(x, r);
                }
            }
            starts.push(x);
        }
    }
    if let Ok(naive) = poly_roots(&[p.q, sum, constant]) {
        starts.extend(naive.roots);
    }
    starts.extend(quadratic_eliminant_roots(&p));
    let lin = p.a.norm().max(p.b.norm());
    let radius = if p.q != zero {
        2.0 * 1f64.max((constant.norm() / p.q.norm()).sqrt()).max(lin / p.q.norm())
    } else {
        2.0 * 1f64.max(constant.norm() / lin)
    };
    starts.push(zero);
    starts.extend(random_starts(radius));

    newton_from(&starts, bound, &mut out, |t| p.residual(t), |x| p.split(x), |x| p.jacobian(x));
    out.finish()
}
