//! Orthonormalization helpers shared by the constructors and the UTF projection.

use num_complex::Complex64;

use crate::eigen::min_eigenvalue_unchecked;
use crate::matrix::MeasurementMatrix;

/// Modified Gram-Schmidt with one reorthogonalization pass. Vectors that
/// collapse to zero are left as zero.
pub fn orthonormalize(vectors: &mut [Vec<Complex64>]) {
    for i in 0..vectors.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let (head, tail) = vectors.split_at_mut(i);
                let q = &head[j];
                let v = &mut tail[0];
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = vectors[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in vectors[i].iter_mut() {
                *z /= norm;
            }
        }
    }
}

/// Smallest eigenvalue of `CCᴴ`, i.e. the squared smallest singular value.
pub fn min_row_gram_eigenvalue(c: &MeasurementMatrix) -> f64 {
    min_eigenvalue_unchecked(&c.frame_operator())
}

/// Replaces `C` by its polar factor `(CCᴴ)^{-1/2} C` using the Newton-Schulz
/// iteration `Y ← (3Y − (YYᴴ)Y) / 2`. Returns the final `‖YYᴴ − I‖_F`.
///
/// The input is first scaled by its Frobenius norm so every singular value
/// lies in `(0, 1]`, inside the iteration's convergence region.
pub fn polar_factor(c: &mut MeasurementMatrix, tol: f64, max_iter: usize) -> f64 {
    let m = c.rows();
    let n = c.cols();
    let fro = c.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if fro == 0.0 {
        return f64::INFINITY;
    }
    // Near-tight inputs converge quadratically without rescaling.
    let mut defect = crate::matrix::tightness_defect(c);
    if defect >= 0.5 {
        for z in c.data_mut() {
            *z /= fro;
        }
    }
    let mut s = vec![Complex64::new(0.0, 0.0); m * m];
    let mut next = vec![Complex64::new(0.0, 0.0); m * n];
    for _ in 0..max_iter {
        let data = c.data();
        defect = 0.0;
        for a in 0..m {
            for b in a..m {
                let ra = &data[a * n..(a + 1) * n];
                let rb = &data[b * n..(b + 1) * n];
                let v: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                s[a * m + b] = v;
                s[b * m + a] = v.conj();
                let d = if a == b { v - 1.0 } else { v };
                defect += if a == b { d.norm_sqr() } else { 2.0 * d.norm_sqr() };
            }
        }
        defect = defect.sqrt();
        if defect <= tol {
            break;
        }
        for a in 0..m {
            for col in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..m {
                    acc += s[a * m + b] * data[b * n + col];
                }
                next[a * n + col] = 1.5 * data[a * n + col] - 0.5 * acc;
            }
        }
        c.data_mut().copy_from_slice(&next);
    }
    defect
}
