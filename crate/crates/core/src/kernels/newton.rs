/// Default iteration cap for [`newton_2d`].
pub const NEWTON_MAX_ITER: usize = 100;

const MAX_HALVINGS: usize = 40;

/// Outcome of a 2-D Newton run. `converged` is false when the residual never
/// reached the tolerance; callers aggregating over many starts just skip those.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Newton2d {
    pub point: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton iteration for a system of two real equations.
///
/// Each step solves `J·d = −F`; when `J` is numerically rank-deficient the
/// minimum-norm least-squares step `−J⁺F` is taken instead, which lets the
/// iteration land on curves of solutions. The step is halved until the
/// residual norm decreases. Convergence is `‖F‖ ≤ tol`.
pub fn newton_2d<F, J>(residual: F, jacobian: J, start: [f64; 2], tol: f64, max_iter: usize) -> Newton2d
where
    F: Fn([f64; 2]) -> [f64; 2],
    J: Fn([f64; 2]) -> [[f64; 2]; 2],
{
    let mut x = start;
    let mut f = residual(x);
    let mut r = norm(f);
    let fail = |x, r, it| Newton2d { point: x, residual: r, iterations: it, converged: false };
    if !r.is_finite() {
        return fail(x, r, 0);
    }
    for it in 0..max_iter {
        if r <= tol {
            return Newton2d { point: x, residual: r, iterations: it, converged: true };
        }
        let j = jacobian(x);
        let fro2 = j[0][0].powi(2) + j[0][1].powi(2) + j[1][0].powi(2) + j[1][1].powi(2);
        if !(fro2 > 0.0) || !fro2.is_finite() {
            return fail(x, r, it);
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let step = if det.abs() > 1e-12 * fro2 {
            [(-j[1][1] * f[0] + j[0][1] * f[1]) / det, (j[1][0] * f[0] - j[0][0] * f[1]) / det]
        } else {
            // rank one: J⁺ = Jᵀ / ‖J‖_F²
            [-(j[0][0] * f[0] + j[1][0] * f[1]) / fro2, -(j[0][1] * f[0] + j[1][1] * f[1]) / fro2]
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = [x[0] + lambda * step[0], x[1] + lambda * step[1]];
            let fc = residual(cand);
            let rc = norm(fc);
            if rc < r {
                x = cand;
                f = fc;
                r = rc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Newton2d { point: x, residual: r, iterations: it + 1, converged: r <= tol };
        }
    }
    Newton2d { point: x, residual: r, iterations: max_iter, converged: r <= tol }
}
