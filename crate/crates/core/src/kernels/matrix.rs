use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensor::SliceMatrix;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Lower triangular `Lo` with `Lo·Loᴴ = M` for a Hermitian positive
/// semi-definite `M`.
///
/// With `scale = maxabs(M)`, a pivot in `[−tol·scale, tol·scale]` is treated
/// as zero: its column is left zero, and the part of `M` that column would
/// have had to produce must itself be below `tol·scale`.
pub fn cholesky_psd(m: &SliceMatrix, tol: f64) -> Result<SliceMatrix> {
    let n = m.dim();
    let scale = m.maxabs();
    let bound = tol * scale;
    if m.hermitian_deviation() > tol * scale.max(1.0) {
        return Err(Error::NotHermitian);
    }
    let mut lo = SliceMatrix::zeros(n);
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= lo.get(j, k).norm_sqr();
        }
        if d < -bound {
            return Err(Error::NotPsd { pivot: j + 1 });
        }
        let zero_pivot = d <= bound;
        let root = d.max(0.0).sqrt();
        if !zero_pivot {
            lo.set(j, j, C64::new(root, 0.0));
        }
        for i in j + 1..n {
            let mut r = m.get(i, j);
            for k in 0..j {
                r -= lo.get(i, k) * lo.get(j, k).conj();
            }
            if zero_pivot {
                if r.norm() > bound {
                    return Err(Error::NotPsd { pivot: j + 1 });
                }
            } else {
                lo.set(i, j, r / root);
            }
        }
    }
    Ok(lo)
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations.
///
/// `tol` bounds the accepted Hermitian deviation relative to
/// `max(1, maxabs(M))`. Sweeps stop once the off-diagonal Frobenius norm is
/// below `1e-12 · ‖M‖_F`.
pub fn hermitian_eigenvalues(m: &SliceMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = m.dim();
    if m.hermitian_deviation() > tol * m.maxabs().max(1.0) {
        return Err(Error::NotHermitian);
    }
    // work on the exact Hermitian part
    let mut a = SliceMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(m.get(i, i).re, 0.0)
        } else {
            (m.get(i, j) + m.get(j, i).conj()) * 0.5
        }
    });
    let fro = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j).norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-12 * fro;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Applies `A ← Uᴴ A U` with `U = D·R`: `D` rotates the phase of `a_pq`
/// onto the real axis, `R` is the real Jacobi rotation that annihilates it.
fn rotate(a: &mut SliceMatrix, p: usize, q: usize) {
    let beta = a.get(p, q);
    let mag = beta.norm();
    if mag == 0.0 {
        return;
    }
    let phase = beta / mag;
    let (app, aqq) = (a.get(p, p).re, a.get(q, q).re);
    let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;
    let n = a.dim();
    for r in 0..n {
        let (x, y) = (a.get(r, p), a.get(r, q));
        a.set(r, p, x * upp + y * uqp);
        a.set(r, q, x * upq + y * uqq);
    }
    for col in 0..n {
        let (x, y) = (a.get(p, col), a.get(q, col));
        a.set(p, col, upp.conj() * x + uqp.conj() * y);
        a.set(q, col, upq.conj() * x + uqq.conj() * y);
    }
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));
}

/// Numerical rank of the matrix whose columns are `vectors`, by Gaussian
/// elimination with partial pivoting. Pivots at or below `tol · maxabs`
/// count as zero.
pub fn column_rank(vectors: &[Vec<f64>], tol: f64) -> Result<usize> {
    let Some(first) = vectors.first() else { return Ok(0) };
    let rows = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != rows) {
        return Err(Error::DimMismatch(bad.len(), rows));
    }
    let cols = vectors.len();
    let mut a: Vec<Vec<f64>> = (0..rows).map(|r| vectors.iter().map(|v| v[r]).collect()).collect();
    let maxabs = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = tol * maxabs;
    if maxabs == 0.0 {
        return Ok(0);
    }
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, val) = (rank..rows)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if val <= threshold {
            continue;
        }
        a.swap(rank, piv);
        for r in rank + 1..rows {
            let f = a[r][col] / a[rank][col];
            if f != 0.0 {
                for c in col..cols {
                    a[r][c] -= f * a[rank][c];
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::poly_roots;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> SliceMatrix {
        SliceMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn cholesky_examples() {
        let m = SliceMatrix::from_real_rows(&[&[4.0, 2.0], &[2.0, 5.0]]);
        let lo = cholesky_psd(&m, 1e-10).unwrap();
        assert_eq!(lo, SliceMatrix::from_real_rows(&[&[2.0, 0.0], &[1.0, 2.0]]));

        let m = SliceMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]]);
        let lo = cholesky_psd(&m, 1e-10).unwrap();
        assert_eq!(lo, SliceMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]));
        assert!(lo.matmul(&lo.conj_transpose()).max_abs_diff(&m) < 1e-15);

        let m = SliceMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(cholesky_psd(&m, 1e-10), Err(Error::NotPsd { pivot: 2 })));

        // zero pivot with a nonzero column below
        let m = SliceMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(cholesky_psd(&m, 1e-10), Err(Error::NotPsd { pivot: 1 })));
    }

    #[test]
    fn cholesky_round_trip_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let r = random_matrix(n, &mut rng);
            let m = r.conj_transpose().matmul(&r);
            let lo = cholesky_psd(&m, 1e-10).unwrap();
            assert!(lo.is_lower_triangular());
            let scale = m.maxabs().max(1.0);
            assert!(lo.matmul(&lo.conj_transpose()).max_abs_diff(&m) <= 1e-9 * scale);
        }
    }

    #[test]
    fn cholesky_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            // rank-2 PSD matrix of size 4
            let v: Vec<Vec<C64>> =
                (0..2).map(|_| (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
            let m = SliceMatrix::from_fn(4, |i, j| v.iter().map(|x| x[i] * x[j].conj()).sum());
            let lo = cholesky_psd(&m, 1e-10).unwrap();
            assert!(lo.matmul(&lo.conj_transpose()).max_abs_diff(&m) <= 1e-9 * m.maxabs().max(1.0));
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let e = hermitian_eigenvalues(&SliceMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]), 1e-10).unwrap();
        assert_eq!(e, vec![2.0, 3.0]);
        let e = hermitian_eigenvalues(&SliceMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-10).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);

        // λ² − (4/3)λ + 1/12 = 0
        let h = SliceMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0 / 3.0]]);
        let e = hermitian_eigenvalues(&h, 1e-10).unwrap();
        let disc = (16.0f64 / 9.0 - 4.0 / 12.0).sqrt();
        assert!((e[0] - (4.0 / 3.0 - disc) / 2.0).abs() < 1e-15);
        assert!((e[1] - (4.0 / 3.0 + disc) / 2.0).abs() < 1e-15);
        assert!(e[0] > 0.0);

        let bad = SliceMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eigenvalues(&bad, 1e-10), Err(Error::NotHermitian)));
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..300 {
            let n = 1 + trial % 3;
            let r = random_matrix(n, &mut rng);
            let h = SliceMatrix::from_fn(n, |i, j| (r.get(i, j) + r.get(j, i).conj()) * 0.5);
            let eig = hermitian_eigenvalues(&h, 1e-10).unwrap();
            // det(λI − H) coefficients, highest first
            let coeffs: Vec<C64> = match n {
                1 => vec![c(1.0, 0.0), -h.get(0, 0)],
                2 => {
                    let tr = h.get(0, 0) + h.get(1, 1);
                    let det = h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0);
                    vec![c(1.0, 0.0), -tr, det]
                }
                _ => {
                    let g = |i, j| h.get(i, j);
                    let tr = g(0, 0) + g(1, 1) + g(2, 2);
                    let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0)
                        + g(1, 1) * g(2, 2)
                        - g(1, 2) * g(2, 1);
                    let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                        - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
                    vec![c(1.0, 0.0), -tr, minors, -det]
                }
            };
            let mut roots: Vec<f64> = poly_roots(&coeffs).unwrap().roots.iter().map(|z| z.re).collect();
            roots.sort_by(f64::total_cmp);
            for (a, b) in eig.iter().zip(&roots) {
                assert!((a - b).abs() <= 1e-8, "{eig:?} vs {roots:?}");
            }
        }
    }

    #[test]
    fn eigenvalues_preserve_trace_for_larger_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in [5, 8, 16, 32] {
            let r = random_matrix(n, &mut rng);
            let h = SliceMatrix::from_fn(n, |i, j| (r.get(i, j) + r.get(j, i).conj()) * 0.5);
            let eig = hermitian_eigenvalues(&h, 1e-10).unwrap();
            let tr: f64 = (0..n).map(|i| h.get(i, i).re).sum();
            assert!((eig.iter().sum::<f64>() - tr).abs() < 1e-10);
            let fro2: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| h.get(i, j).norm_sqr()).sum();
            assert!((eig.iter().map(|x| x * x).sum::<f64>() - fro2).abs() < 1e-9 * fro2);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(column_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-10).unwrap(), 2);
        assert_eq!(column_rank(&[vec![1.0, 1.0], vec![2.0, 2.0]], 1e-10).unwrap(), 1);
        assert_eq!(column_rank(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], 1e-10).unwrap(), 2);
        assert_eq!(column_rank(&[vec![0.0, 0.0]], 1e-10).unwrap(), 0);
        assert_eq!(column_rank(&[], 1e-10).unwrap(), 0);
        assert!(column_rank(&[vec![1.0], vec![1.0, 2.0]], 1e-10).is_err());
    }
}
