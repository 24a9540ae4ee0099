//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so a sweep
//! over all pivots reduces the off-diagonal mass exactly as in the real
//! symmetric case. Platform Gram blocks are at most a few dozen rows, where
//! this is both fast and accurate to a few ulps of `‖A‖_F`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// Symmetry tolerance accepted by [`min_eigenvalue`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the eigenvector for `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
}

fn check_hermitian(g: &HermitianMatrix) -> Result<()> {
    let defect = g.symmetry_defect();
    let scale = g.frobenius_norm().max(1.0);
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// `k = 1` and `k = 2` use closed forms; the 2×2 case is
/// `(a + d − √((a − d)² + 4|b|²)) / 2`.
pub fn min_eigenvalue(g: &HermitianMatrix) -> Result<f64> {
    check_hermitian(g)?;
    Ok(min_eigenvalue_unchecked(g))
}

/// [`min_eigenvalue`] without the symmetry check, for Gram blocks that are
/// Hermitian by construction.
pub fn min_eigenvalue_unchecked(g: &HermitianMatrix) -> f64 {
    match g.dim() {
        0 => f64::INFINITY,
        1 => g.get(0, 0).re,
        2 => min_eigenvalue_2x2(g.get(0, 0).re, g.get(1, 1).re, g.get(0, 1).norm()),
        _ => {
            let values = jacobi(g, false).0;
            values.into_iter().fold(f64::INFINITY, f64::min)
        }
    }
}

/// `λ_min` of `[[a, b], [b̄, d]]` with `|b| = b_abs`.
#[inline]
pub fn min_eigenvalue_2x2(a: f64, d: f64, b_abs: f64) -> f64 {
    let diff = a - d;
    0.5 * (a + d - (diff * diff + 4.0 * b_abs * b_abs).sqrt())
}

/// Full eigendecomposition, ascending.
pub fn eigh(g: &HermitianMatrix) -> Result<Eigen> {
    check_hermitian(g)?;
    let (values, vecs) = jacobi(g, true);
    let n = g.dim();
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Ok(Eigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|r| vecs[r * n + i]).collect())
            .collect(),
    })
}

/// Returns unsorted eigenvalues and, optionally, the row-major unitary whose
/// columns are the eigenvectors.
fn jacobi(g: &HermitianMatrix, want_vectors: bool) -> (Vec<f64>, Option<Vec<Complex64>>) {
    let n = g.dim();
    let mut a: Vec<Complex64> = g.data().to_vec();
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let mut v = want_vectors.then(|| {
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }
        v
    });

    let scale = g.frobenius_norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    let threshold = (f64::EPSILON * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / beta;
                let theta = (aqq - app) / (2.0 * beta);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let u00 = Complex64::new(cos, 0.0);
                let u01 = Complex64::new(sin, 0.0);
                let u10 = -phase.conj() * sin;
                let u11 = phase.conj() * cos;

                // A ← A U (columns p, q)
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * u00 + arq * u10;
                    a[r * n + q] = arp * u01 + arq * u11;
                }
                // A ← Uᴴ A (rows p, q)
                for c in 0..n {
                    let apc = a[p * n + c];
                    let aqc = a[q * n + c];
                    a[p * n + c] = u00.conj() * apc + u10.conj() * aqc;
                    a[q * n + c] = u01.conj() * apc + u11.conj() * aqc;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(app - t * beta, 0.0);
                a[q * n + q] = Complex64::new(aqq + t * beta, 0.0);

                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = vrp * u00 + vrq * u10;
                        v[r * n + q] = vrp * u01 + vrq * u11;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i].re).collect(), v)
}
