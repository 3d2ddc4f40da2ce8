//! Dense symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Sized for the Laplacians this crate produces (d up to a few hundred); no
//! external BLAS/LAPACK. Deterministic: plain sweeps in a fixed order.

use ndarray::{Array1, Array2, ArrayView2};

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns)
/// of a symmetric matrix. Symmetry is the caller's responsibility; only the
/// upper triangle drives the rotations.
pub fn symmetric_eigen(a: ArrayView2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.to_owned();
    let mut v = Array2::eye(n);
    if n < 2 {
        return (m.diag().to_owned(), v);
    }

    let off = |m: &Array2<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        s
    };
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        if off(&m) <= 1e-28 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // 2x2 rotation zeroing m[p,q]
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let mut vals = Array1::zeros(n);
    let mut vecs = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vals[dst] = m[(src, src)];
        for k in 0..n {
            vecs[(k, dst)] = v[(k, src)];
        }
    }
    (vals, vecs)
}

/// Moore-Penrose pseudoinverse of a symmetric matrix, zeroing eigenvalues
/// below `rel_tol` times the largest magnitude.
pub fn symmetric_pinv(a: ArrayView2<f64>, rel_tol: f64) -> Array2<f64> {
    let (vals, vecs) = symmetric_eigen(a);
    let n = vals.len();
    let cutoff = rel_tol * vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut out = Array2::zeros((n, n));
    for e in 0..n {
        if vals[e].abs() <= cutoff {
            continue;
        }
        let inv = 1.0 / vals[e];
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += inv * vecs[(i, e)] * vecs[(j, e)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn two_vertex_laplacian_spectrum() {
        let l = arr2(&[[1.0, -1.0], [-1.0, 1.0]]);
        let (vals, vecs) = symmetric_eigen(l.view());
        assert!(vals[0].abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        // second eigenvector spans (1,-1)/sqrt(2)
        assert!((vecs[(0, 1)].abs() - 1.0 / 2.0f64.sqrt()).abs() < 1e-10);
        assert!((vecs[(0, 1)] + vecs[(1, 1)]).abs() < 1e-10);
    }

    #[test]
    fn path_graph_spectrum() {
        // path on 3 vertices, unit weights: eigenvalues 0, 1, 3
        let l = arr2(&[
            [1.0, -1.0, 0.0],
            [-1.0, 2.0, -1.0],
            [0.0, -1.0, 1.0],
        ]);
        let (vals, _) = symmetric_eigen(l.view());
        assert!(vals[0].abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let a = arr2(&[
            [2.0, -0.3, 0.5, 0.0],
            [-0.3, 1.0, 0.2, -0.7],
            [0.5, 0.2, 3.0, 0.1],
            [0.0, -0.7, 0.1, 0.5],
        ]);
        let (vals, vecs) = symmetric_eigen(a.view());
        let n = 4;
        // A v_e = lambda_e v_e
        for e in 0..n {
            for i in 0..n {
                let mut av = 0.0;
                for j in 0..n {
                    av += a[(i, j)] * vecs[(j, e)];
                }
                assert!((av - vals[e] * vecs[(i, e)]).abs() < 1e-9);
            }
        }
        // V^T V = I
        for e in 0..n {
            for f in 0..n {
                let dot: f64 = (0..n).map(|k| vecs[(k, e)] * vecs[(k, f)]).sum();
                let expect = if e == f { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pinv_inverts_on_the_range() {
        let l = arr2(&[[1.0, -1.0], [-1.0, 1.0]]);
        let pinv = symmetric_pinv(l.view(), 1e-9);
        // L * L+ * L = L
        let prod = l.dot(&pinv).dot(&l);
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod[(i, j)] - l[(i, j)]).abs() < 1e-10);
            }
        }
        // kernel stays kernel: pinv of [[1,1],[1,1]]-direction is zero
        assert!((pinv[(0, 0)] + pinv[(0, 1)]).abs() < 1e-12);
    }
}
