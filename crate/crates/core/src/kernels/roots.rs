use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Roots of an equation together with `|equation(root)|` for each.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<C64>,
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        self.roots.iter().copied().zip(self.residuals.iter().copied())
    }

    pub(crate) fn push(&mut self, root: C64, residual: f64) {
        self.roots.push(root);
        self.residuals.push(residual);
    }

    /// Sorts by `(Re, Im)`.
    pub(crate) fn sort(&mut self) {
        let mut pairs: Vec<(C64, f64)> = self.iter().collect();
        pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        self.roots = pairs.iter().map(|p| p.0).collect();
        self.residuals = pairs.iter().map(|p| p.1).collect();
    }
}

fn real_poly_eval(coeffs: &[f64], z: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn real_newton_polish(coeffs: &[f64], x: f64) -> f64 {
    let deg = coeffs.len() - 1;
    let eval = |x: f64| {
        let mut p = 0.0;
        let mut dp = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            if i < deg {
                dp = dp * x + c * (deg - i) as f64;
            }
            p = p * x + c;
        }
        (p, dp)
    };
    let mut best = x;
    let mut best_r = eval(x).0.abs();
    for _ in 0..4 {
        let (p, dp) = eval(best);
        if dp == 0.0 || best_r == 0.0 {
            break;
        }
        let cand = best - p / dp;
        let r = eval(cand).0.abs();
        if r < best_r {
            best = cand;
            best_r = r;
        } else {
            break;
        }
    }
    best
}

/// All roots of `a2·t² + a1·t + a0`, falling back to the linear equation when
/// `a2 = 0`.
pub fn solve_real_quadratic(a2: f64, a1: f64, a0: f64) -> Result<RootSet> {
    let coeffs = [a2, a1, a0];
    let mut out = RootSet::default();
    if a2 == 0.0 {
        if a1 == 0.0 {
            return Err(if a0 == 0.0 { Error::AllZeroCoefficients } else { Error::NoRootFound });
        }
        let r = C64::new(-a0 / a1, 0.0);
        out.push(r, real_poly_eval(&coeffs, r).norm());
        return Ok(out);
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc >= 0.0 {
        // q shares the sign of -a1 so the two roots never cancel
        let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a2, a0 / q) };
        for r in [r1, r2] {
            let z = C64::new(r, 0.0);
            out.push(z, real_poly_eval(&coeffs, z).norm());
        }
    } else {
        let re = -a1 / (2.0 * a2);
        let im = ((-disc).sqrt() / (2.0 * a2)).abs();
        for z in [C64::new(re, im), C64::new(re, -im)] {
            out.push(z, real_poly_eval(&coeffs, z).norm());
        }
    }
    out.sort();
    Ok(out)
}

/// All three roots of `a3·t³ + a2·t² + a1·t + a0`.
///
/// One real root comes from the closed form (trigonometric when all three are
/// real), is polished with Newton and deflated; the remaining quadratic gives
/// the other two. Real roots carry an imaginary part of exactly zero.
pub fn solve_real_cubic(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<RootSet> {
    if a3 == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
    let monic = [1.0, b, c, d];

    // depressed cubic y³ + p·y + q with x = y − b/3
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let x = if disc > 0.0 {
        let a = -q.signum() * (q.abs() / 2.0 + disc.sqrt()).cbrt();
        (if a == 0.0 { 0.0 } else { a - p / (3.0 * a) }) - shift
    } else if p == 0.0 {
        -shift
    } else {
        // three real roots; deflate by the one of largest magnitude
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .max_by(|u, v| u.abs().total_cmp(&v.abs()))
            .unwrap()
    };
    let r = real_newton_polish(&monic, x);

    // x³ + b x² + c x + d = (x − r)(x² + e x + f)
    let e = b + r;
    let f = if r.abs() > 1.0 && r != 0.0 { -d / r } else { c + e * r };
    let quad = solve_real_quadratic(1.0, e, f)?;

    let coeffs = [a3, a2, a1, a0];
    let mut out = RootSet::default();
    let rz = C64::new(r, 0.0);
    out.push(rz, real_poly_eval(&coeffs, rz).norm());
    for z in quad.roots {
        let z = if z.im == 0.0 { C64::new(real_newton_polish(&monic, z.re), 0.0) } else { z };
        out.push(z, real_poly_eval(&coeffs, z).norm());
    }
    out.sort();
    Ok(out)
}

const DK_MAX_SWEEPS: usize = 500;

fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn poly_eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |c_i| |z|^i`, the magnitude against which a residual at `z` is judged.
fn eval_scale(coeffs: &[C64], z: C64) -> f64 {
    let r = z.norm();
    coeffs.iter().fold(0.0, |acc, c| acc * r + c.norm())
}

/// All roots of a complex polynomial given highest degree first.
///
/// Durand–Kerner simultaneous iteration from powers of `0.4 + 0.9i`, followed
/// by a guarded Newton polish. Exact trailing zero coefficients are split off
/// as exact zero roots. Every root satisfies `|p(z)| ≤ 1e-9 · Σ|c_i||z|^i`, or
/// the call fails with `NonConvergence`.
pub fn poly_roots(coeffs: &[C64]) -> Result<RootSet> {
    let zero = C64::new(0.0, 0.0);
    let first = coeffs.iter().position(|&c| c != zero).ok_or(Error::AllZeroCoefficients)?;
    let trimmed = &coeffs[first..];
    let zeros_at_origin = trimmed.iter().rev().take_while(|&&c| c == zero).count();
    let core = &trimmed[..trimmed.len() - zeros_at_origin];

    let mut out = RootSet::default();
    for _ in 0..zeros_at_origin {
        out.push(zero, 0.0);
    }
    let deg = core.len() - 1;
    if deg == 0 {
        out.sort();
        return Ok(out);
    }
    let lead = core[0];
    let monic: Vec<C64> = core.iter().map(|c| c / lead).collect();

    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..deg).map(|k| seed.powu(k as u32)).collect();
    if deg == 1 {
        z[0] = -monic[1];
    } else {
        for _ in 0..DK_MAX_SWEEPS {
            let mut max_step: f64 = 0.0;
            for i in 0..deg {
                let mut denom = C64::new(1.0, 0.0);
                for j in 0..deg {
                    if j != i {
                        denom *= z[i] - z[j];
                    }
                }
                if denom == zero {
                    // coincident iterates: nudge apart deterministically
                    let bump = C64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                    z[i] += bump;
                    max_step = f64::INFINITY;
                    continue;
                }
                let step = poly_eval(&monic, z[i]) / denom;
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
            if max_step <= 1e-15 {
                break;
            }
        }
    }

    for zi in z.iter_mut() {
        let mut best = *zi;
        let mut best_r = poly_eval(&monic, best).norm();
        for _ in 0..3 {
            let (p, dp) = poly_eval_with_derivative(&monic, best);
            if dp == zero || best_r == 0.0 {
                break;
            }
            let cand = best - p / dp;
            let r = poly_eval(&monic, cand).norm();
            if r < best_r {
                best = cand;
                best_r = r;
            } else {
                break;
            }
        }
        *zi = best;
    }

    for &zi in &z {
        let res = poly_eval(core, zi).norm();
        if !(res <= 1e-9 * eval_scale(core, zi)) {
            return Err(Error::NonConvergence);
        }
        out.push(zi, res);
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_roots(rs: &RootSet, expected: &[C64], tol: f64) {
        assert_eq!(rs.len(), expected.len(), "{rs:?}");
        let mut used = vec![false; rs.len()];
        for e in expected {
            let hit = rs
                .roots
                .iter()
                .enumerate()
                .position(|(i, r)| !used[i] && (r - e).norm() <= tol)
                .unwrap_or_else(|| panic!("missing root {e} in {rs:?}"));
            used[hit] = true;
        }
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cube_roots_of_8() -> [C64; 3] {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        [c(2.0, 0.0), w * 2.0, w * w * 2.0]
    }

    #[test]
    fn quadratic_cases() {
        assert_roots(&solve_real_quadratic(1.0, -3.0, 2.0).unwrap(), &[c(1.0, 0.0), c(2.0, 0.0)], 1e-15);
        assert_roots(&solve_real_quadratic(1.0, 0.0, 1.0).unwrap(), &[c(0.0, 1.0), c(0.0, -1.0)], 1e-15);
        assert_roots(&solve_real_quadratic(0.0, 2.0, -4.0).unwrap(), &[c(2.0, 0.0)], 0.0);
        assert!(matches!(solve_real_quadratic(0.0, 0.0, 0.0), Err(Error::AllZeroCoefficients)));
        assert!(matches!(solve_real_quadratic(0.0, 0.0, 1.0), Err(Error::NoRootFound)));
    }

    #[test]
    fn cubic_cases() {
        assert_roots(&solve_real_cubic(1.0, 0.0, 0.0, -8.0).unwrap(), &cube_roots_of_8(), 1e-14);
        let r = solve_real_cubic(1.0, -6.0, 11.0, -6.0).unwrap();
        assert_roots(&r, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-13);
        assert!(r.roots.iter().all(|z| z.im == 0.0));
        assert_roots(&solve_real_cubic(1.0, 0.0, 1.0, 0.0).unwrap(), &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)], 1e-15);
        assert!(matches!(solve_real_cubic(0.0, 1.0, 1.0, 1.0), Err(Error::DegenerateLeadingCoefficient)));
    }

    #[test]
    fn cubic_triple_and_double_roots() {
        // (x − 1)³
        let r = solve_real_cubic(1.0, -3.0, 3.0, -1.0).unwrap();
        assert!(r.residuals.iter().all(|&e| e <= 1e-12));
        // (x − 2)²(x + 1)
        let r = solve_real_cubic(1.0, -3.0, 0.0, 4.0).unwrap();
        assert!(r.residuals.iter().all(|&e| e <= 1e-12));
        assert!(r.roots.iter().any(|z| (z - c(-1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn poly_roots_cases() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_roots(&poly_roots(&[one, zero, -one]).unwrap(), &[one, -one], 1e-14);
        // (t − i)² = t² − 2it − 1
        assert_roots(&poly_roots(&[one, c(0.0, -2.0), -one]).unwrap(), &[c(0.0, 1.0), c(0.0, 1.0)], 1e-7);
        assert_roots(&poly_roots(&[one, zero, zero, c(-8.0, 0.0)]).unwrap(), &cube_roots_of_8(), 1e-13);
        // leading zeros trimmed, trailing zeros give exact zero roots
        let r = poly_roots(&[zero, one, c(-2.0, 0.0), zero]).unwrap();
        assert_roots(&r, &[zero, c(2.0, 0.0)], 1e-14);
        assert!(r.roots.contains(&zero));
        assert!(matches!(poly_roots(&[zero, zero]), Err(Error::AllZeroCoefficients)));
        assert!(poly_roots(&[c(3.0, 0.0)]).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn real_cubic_residuals_within_bound(
            a3 in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
            a2 in -5.0..5.0f64, a1 in -5.0..5.0f64, a0 in -5.0..5.0f64,
        ) {
            let rs = solve_real_cubic(a3, a2, a1, a0).unwrap();
            prop_assert_eq!(rs.len(), 3);
            let scale = 1f64.max(a3.abs()).max(a2.abs()).max(a1.abs()).max(a0.abs());
            for (z, res) in rs.iter() {
                let r = z.norm().max(1.0);
                prop_assert!(res <= 1e-9 * scale * r * r * r, "root {} residual {}", z, res);
            }
            // Vieta: sum of roots
            let sum: C64 = rs.roots.iter().sum();
            prop_assert!((sum.re + a2 / a3).abs() <= 1e-6 * (1.0 + (a2 / a3).abs()));
        }

        #[test]
        fn poly_roots_recover_planted_roots(
            parts in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..6)
        ) {
            let planted: Vec<C64> = parts.iter().map(|&(a, b)| c(a, b)).collect();
            let mut coeffs = vec![c(1.0, 0.0)];
            for &r in &planted {
                let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
                for (i, &a) in coeffs.iter().enumerate() {
                    next[i] += a;
                    next[i + 1] -= a * r;
                }
                coeffs = next;
            }
            let rs = poly_roots(&coeffs).unwrap();
            prop_assert_eq!(rs.len(), planted.len());
            for (z, res) in rs.iter() {
                prop_assert!(res <= 1e-9 * eval_scale(&coeffs, z));
            }
        }
    }

    #[test]
    fn quadratic_residual_is_reported() {
        let r = solve_real_quadratic(1.0, 0.0, -2.0).unwrap();
        for (z, res) in r.iter() {
            assert_abs_diff_eq!(z.re.abs(), 2f64.sqrt(), epsilon = 1e-15);
            assert!(res < 1e-15);
        }
    }
}
