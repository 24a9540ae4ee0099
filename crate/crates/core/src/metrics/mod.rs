//! Frame metrics, SNR criteria and analytic bounds.

mod bounds;
pub(crate) mod report;
mod snr;

pub use bounds::{
    bound_sheet, lemma1_bounds, lemma2_bound, theorem3_bounds, theorem3_bounds_with, BoundSheet, EtfFields, Lemma1Bounds,
    Theorem3Bounds,
};
pub use report::{num as format_number, FrameReport, KRecord, ReportOptions, BOUND_SHEET_CSV_HEADER, FRAME_REPORT_CSV_HEADER};
pub use snr::{
    average_min_snr, average_min_snr_closed_k2, average_min_snr_with, sampled_min_snr,
    signal_energy, worst_case_min_snr, worst_case_min_snr_with, EvalOptions, SampledEstimate, WorstCase,
    DEFAULT_BUDGET,
};

use num_complex::Complex64;

use crate::eigen::min_eigenvalue_2x2;
use crate::error::{Error, Result};
use crate::matrix::{column_norms, HermitianMatrix, MeasurementMatrix};

/// Column norms may differ by at most this much for a frame to count as uniform.
pub const UNIFORM_TOLERANCE: f64 = 1e-8;

fn normalized_gram(gram: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = gram.dim();
    let norms: Vec<f64> = (0..n).map(|i| gram.get(i, i).re.max(0.0).sqrt()).collect();
    if let Some(index) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroColumn { index });
    }
    let mut out = HermitianMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, gram.get(i, j) / (norms[i] * norms[j]));
        }
    }
    Ok(out)
}

/// `μ_C = max_{i≠j} |⟨c_i, c_j⟩| / (‖c_i‖‖c_j‖)`.
pub fn coherence(c: &MeasurementMatrix) -> Result<f64> {
    coherence_from_gram(&c.gram())
}

pub(crate) fn coherence_from_gram(gram: &HermitianMatrix) -> Result<f64> {
    let g = normalized_gram(gram)?;
    let n = g.dim();
    let mut mu: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            mu = mu.max(g.get(i, j).norm());
        }
    }
    Ok(mu.min(1.0))
}

/// `Σ_{i<j} |⟨c_i, c_j⟩|`, unnormalized.
pub fn sum_coherence(c: &MeasurementMatrix) -> f64 {
    sum_coherence_from_gram(&c.gram())
}

pub(crate) fn sum_coherence_from_gram(g: &HermitianMatrix) -> f64 {
    let n = g.dim();
    let mut acc = 0.0;
    for j in 1..n {
        for i in 0..j {
            acc += g.get(i, j).norm();
        }
    }
    acc
}

/// `Σ_{i,j} |⟨c_i, c_j⟩|²`, diagonal included.
pub fn frame_potential(c: &MeasurementMatrix) -> f64 {
    c.gram().data().iter().map(|z| z.norm_sqr()).sum()
}

/// `√(1 − cos²α)` between the lines spanned by `u` and `v`.
pub fn chordal_distance(u: &[Complex64], v: &[Complex64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let uu = u.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let vv = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if uu == 0.0 {
        return Err(Error::ZeroColumn { index: 0 });
    }
    if vv == 0.0 {
        return Err(Error::ZeroColumn { index: 1 });
    }
    let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    Ok(((uu * vv - ip.norm_sqr()) / (uu * vv)).max(0.0).sqrt())
}

/// Fails with [`Error::NonUniformFrame`] unless all column norms agree to
/// [`UNIFORM_TOLERANCE`]; returns the common squared norm.
pub fn require_uniform(c: &MeasurementMatrix) -> Result<f64> {
    let norms = column_norms(c);
    let max = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - min > UNIFORM_TOLERANCE {
        return Err(Error::NonUniformFrame { spread: max - min });
    }
    if min == 0.0 {
        return Err(Error::ZeroColumn {
            index: norms.iter().position(|&x| x == 0.0).unwrap_or(0),
        });
    }
    Ok(norms.iter().map(|x| x * x).sum::<f64>() / norms.len() as f64)
}

/// Two-column restricted isometry constant of the column-normalized matrix.
///
/// Every pair Gram of the normalized matrix is `[[1, ρ], [ρ̄, 1]]` with
/// eigenvalues `1 ± |ρ|`, so the constant is the largest deviation from one
/// over all pairs; for a uniform frame this coincides with the coherence.
pub fn rip2_constant(c: &MeasurementMatrix) -> Result<f64> {
    require_uniform(c)?;
    let g = normalized_gram(&c.gram())?;
    let n = g.dim();
    let mut delta: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, d, b) = (g.get(i, i).re, g.get(j, j).re, g.get(i, j).norm());
            let lo = min_eigenvalue_2x2(a, d, b);
            let hi = a + d - lo;
            delta = delta.max(1.0 - lo).max(hi - 1.0);
        }
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{orthonormal_columns_padded, partial_dft_frame, simplex_etf};

    fn dft24() -> MeasurementMatrix {
        partial_dft_frame(2, 4, &[0, 1]).unwrap()
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(coherence(&MeasurementMatrix::identity(3)).unwrap(), 0.0);
        assert!((coherence(&simplex_etf(2)).unwrap() - 0.5).abs() < 1e-12);
        assert!((coherence(&dft24()).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coherence_zero_column_names_index() {
        let c = orthonormal_columns_padded(2, 3).unwrap();
        assert_eq!(coherence(&c), Err(Error::ZeroColumn { index: 2 }));
    }

    #[test]
    fn sum_coherence_examples() {
        assert_eq!(sum_coherence(&MeasurementMatrix::identity(3)), 0.0);
        assert!((sum_coherence(&simplex_etf(2)) - 1.0).abs() < 1e-12);
        assert!((sum_coherence(&dft24()) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frame_potential_examples() {
        assert!((frame_potential(&MeasurementMatrix::identity(5)) - 5.0).abs() < 1e-15);
        assert!((frame_potential(&simplex_etf(2)) - 2.0).abs() < 1e-12);
        assert!((frame_potential(&dft24()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rip2_examples() {
        assert_eq!(rip2_constant(&MeasurementMatrix::identity(3)).unwrap(), 0.0);
        assert!((rip2_constant(&simplex_etf(2)).unwrap() - 0.5).abs() < 1e-12);
        assert!((rip2_constant(&dft24()).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            rip2_constant(&orthonormal_columns_padded(2, 3).unwrap()),
            Err(Error::NonUniformFrame { .. })
        ));
    }

    #[test]
    fn chordal_distance_examples() {
        let e = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        assert_eq!(chordal_distance(&e(&[1.0, 2.0]), &e(&[-2.0, -4.0])).unwrap(), 0.0);
        assert_eq!(chordal_distance(&e(&[1.0, 0.0]), &e(&[0.0, 3.0])).unwrap(), 1.0);
        let mb = simplex_etf(2);
        let d = chordal_distance(&mb.column(0), &mb.column(1)).unwrap();
        assert!((d - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((d - bound_sheet(2, 3).unwrap().simplex_bound).abs() < 1e-12);
        assert!(matches!(
            chordal_distance(&e(&[0.0, 0.0]), &e(&[1.0, 0.0])),
            Err(Error::ZeroColumn { index: 0 })
        ));
    }
}
