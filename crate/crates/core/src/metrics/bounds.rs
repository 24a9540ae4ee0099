//! Closed-form coherence bounds and the SNR sandwich bounds.

use crate::error::{Error, Result};
use crate::matrix::MeasurementMatrix;
use crate::metrics::snr::scan_platforms;
use crate::metrics::{coherence_from_gram, require_uniform, sum_coherence_from_gram, EvalOptions};

/// Equiangular-frame quantities, defined for `m < N`.
///
/// The necessary conditions `N ≤ min{m(m+1)/2, (N−m)(N−m+1)/2}` (real) and
/// `N ≤ min{m², (N−m)²}` (complex) cover `1 < m < N − 1`; the simplex case
/// `N = m + 1` is always feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtfFields {
    /// Angle `α` between frame vectors of an equiangular tight frame, radians.
    pub angle: f64,
    pub feasible_real: bool,
    pub feasible_complex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSheet {
    pub m: usize,
    pub n: usize,
    /// `√((N − m)/(m(N − 1)))`, the least achievable coherence.
    pub welch_bound: f64,
    /// `√(N(m − 1)/(m(N − 1)))`, the largest achievable least chordal distance.
    pub simplex_bound: f64,
    pub etf: Option<EtfFields>,
    /// Gamma-function packing bound. Informational: it can exceed the true
    /// optimum (it gives `cos(π/6)` for `(2, 3)` where `0.5` is achieved).
    pub secondary_coherence_bound: Option<f64>,
}

impl BoundSheet {
    pub fn etf_fields(&self) -> Result<EtfFields> {
        self.etf.ok_or_else(|| {
            Error::InvalidDims(format!(
                "equiangular fields need m < N, got m={}, N={}",
                self.m, self.n
            ))
        })
    }
}

pub fn bound_sheet(m: usize, n: usize) -> Result<BoundSheet> {
    if m == 0 || m > n {
        return Err(Error::InvalidDims(format!("need 1 <= m <= N, got m={m}, N={n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let (welch_bound, simplex_bound) = if n == 1 {
        (0.0, 1.0)
    } else {
        (
            ((nf - mf) / (mf * (nf - 1.0))).sqrt(),
            ((nf * (mf - 1.0)) / (mf * (nf - 1.0))).sqrt(),
        )
    };
    let etf = (m < n).then(|| {
        let gap = n - m;
        let simplex = n == m + 1;
        let general = 1 < m && m + 1 < n;
        EtfFields {
            angle: (((mf - 1.0) / mf) * (nf / (nf - 1.0))).sqrt().min(1.0).asin(),
            feasible_real: simplex || (general && n <= (m * (m + 1) / 2).min(gap * (gap + 1) / 2)),
            feasible_complex: simplex || (general && n <= (m * m).min(gap * gap)),
        }
    });
    let secondary_coherence_bound = (m >= 2).then(|| {
        let ratio = libm::tgamma((mf + 1.0) / 2.0) / libm::tgamma(mf / 2.0);
        let inner = (mf - 1.0) / (nf * std::f64::consts::PI.sqrt()) * ratio;
        (std::f64::consts::PI * inner.powf(1.0 / (mf - 1.0))).cos()
    });
    Ok(BoundSheet {
        m,
        n,
        welch_bound,
        simplex_bound,
        etf,
        secondary_coherence_bound,
    })
}

/// Sandwich on the worst-case criterion for `k ≥ 2`:
/// `r(1 − C(k,2)μ + Δ*) ≤ min_T λ_min ≤ r(1 − μ)` with `r` the common squared
/// column norm (`m/N` for a uniform tight frame), `μ = μ_C`, and
/// `Δ* = min_T Σ_{i<j∈T} (μ − |cos α_ij|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Bounds {
    pub lower: f64,
    /// `max(lower, 0)`; the Gram block is positive semidefinite anyway.
    pub lower_clamped: f64,
    pub upper: f64,
    pub coherence: f64,
    pub delta_star: f64,
}

pub fn theorem3_bounds(c: &MeasurementMatrix, k: usize) -> Result<Theorem3Bounds> {
    theorem3_bounds_with(c, k, &EvalOptions::default())
}

pub fn theorem3_bounds_with(c: &MeasurementMatrix, k: usize, opts: &EvalOptions) -> Result<Theorem3Bounds> {
    let n = c.cols();
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let r = require_uniform(c)?;
    let gram = c.gram();
    let mu = coherence_from_gram(&gram)?;
    let pairs = (k * (k - 1) / 2) as f64;
    let (delta_star, _, _, _) = scan_platforms(n, k, opts.budget, |idx| {
        let mut acc = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                acc += mu - gram.get(i, j).norm() / r;
            }
        }
        acc
    })?;
    let lower = r * (1.0 - pairs * mu + delta_star);
    Ok(Theorem3Bounds {
        lower,
        lower_clamped: lower.max(0.0),
        upper: r * (1.0 - mu),
        coherence: mu,
        delta_star,
    })
}

/// Bounds on the sum-coherence of a uniform tight frame,
/// `ab|(N/m − 1) − 2(N − 1)μ²| ≤ Σ_{i<j}|⟨c_i,c_j⟩| ≤ ab(N − 1)μ²` with
/// `a = (m/N)²/(1 − 2m/N)` and `b = N(N − 2)/2`.
///
/// The derivation divides by `1 − 2m/N`, so for `m/N ≥ 1/2` the values are
/// reported with `applicable = false`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Bounds {
    pub lower: f64,
    pub upper: f64,
    pub applicable: bool,
    pub a: f64,
    pub b: f64,
    pub sum_coherence: f64,
}

pub fn lemma1_bounds(c: &MeasurementMatrix) -> Result<Lemma1Bounds> {
    require_uniform(c)?;
    let (mf, nf) = (c.rows() as f64, c.cols() as f64);
    let ratio = mf / nf;
    let denom = 1.0 - 2.0 * ratio;
    if denom.abs() < 1e-9 {
        return Err(Error::SingularA);
    }
    let gram = c.gram();
    let mu = coherence_from_gram(&gram)?;
    let a = ratio * ratio / denom;
    let b = nf * (nf - 2.0) / 2.0;
    Ok(Lemma1Bounds {
        lower: a * b * ((nf / mf - 1.0) - 2.0 * (nf - 1.0) * mu * mu).abs(),
        upper: a * b * (nf - 1.0) * mu * mu,
        applicable: ratio < 0.5 - 1e-9,
        a,
        b,
        sum_coherence: sum_coherence_from_gram(&gram),
    })
}

/// `r(1 − (k(k − 1)/2) μ_C)`, a lower bound on the average criterion.
pub fn lemma2_bound(c: &MeasurementMatrix, k: usize) -> Result<f64> {
    let n = c.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let r = require_uniform(c)?;
    let mu = coherence_from_gram(&c.gram())?;
    Ok(r * (1.0 - (k * (k - 1)) as f64 / 2.0 * mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{orthonormal_columns_padded, partial_dft_frame, simplex_etf};
    use crate::metrics::{average_min_snr, coherence, sum_coherence, worst_case_min_snr};

    #[test]
    fn sheet_2_3() {
        let s = bound_sheet(2, 3).unwrap();
        assert!((s.welch_bound - 0.5).abs() < 1e-15);
        assert!((s.simplex_bound - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let e = s.etf_fields().unwrap();
        assert!(e.feasible_real && e.feasible_complex);
        assert!((e.angle.cos() - 0.5).abs() < 1e-12);
        assert!((s.secondary_coherence_bound.unwrap() - (std::f64::consts::PI / 6.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn sheet_3_6() {
        let s = bound_sheet(3, 6).unwrap();
        assert!((s.welch_bound - 0.2f64.sqrt()).abs() < 1e-15);
        let e = s.etf_fields().unwrap();
        assert!(e.feasible_real);
        assert!(e.feasible_complex);
        assert!((e.angle.cos() - s.welch_bound).abs() < 1e-12);
    }

    #[test]
    fn sheet_square() {
        let s = bound_sheet(4, 4).unwrap();
        assert_eq!(s.welch_bound, 0.0);
        assert_eq!(s.simplex_bound, 1.0);
        assert!(matches!(s.etf_fields(), Err(Error::InvalidDims(_))));
        assert!(matches!(bound_sheet(5, 3), Err(Error::InvalidDims(_))));
    }

    #[test]
    fn sheet_feasibility_flags() {
        // 7 ≤ min{6, 10} fails for real, 7 ≤ min{9, 16} holds for complex.
        let e = bound_sheet(3, 7).unwrap().etf_fields().unwrap();
        assert!(!e.feasible_real);
        assert!(e.feasible_complex);
    }

    #[test]
    fn simplex_welch_identity() {
        for n in 4..=64 {
            for m in 2..n - 1 {
                let s = bound_sheet(m, n).unwrap();
                assert!((s.simplex_bound.powi(2) + s.welch_bound.powi(2) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theorem3_equiangular_3_6() {
        let c = crate::design::icosahedral_lines();
        let b = theorem3_bounds(&c, 3).unwrap();
        let w = 0.2f64.sqrt();
        assert!(b.delta_star.abs() < 1e-12);
        assert!((b.lower - 0.5 * (1.0 - 3.0 * w)).abs() < 1e-12);
        assert!((b.lower + 0.17082).abs() < 1e-5);
        assert!((b.upper - 0.27639).abs() < 1e-5);
        assert_eq!(b.lower_clamped, 0.0);
    }

    #[test]
    fn theorem3_orthonormal() {
        let c = MeasurementMatrix::identity(4);
        let b = theorem3_bounds(&c, 3).unwrap();
        assert_eq!(b.lower, 1.0);
        assert_eq!(b.upper, 1.0);
    }

    #[test]
    fn theorem3_rejects_non_uniform_and_k1() {
        assert!(matches!(
            theorem3_bounds(&orthonormal_columns_padded(2, 3).unwrap(), 3),
            Err(Error::NonUniformFrame { .. })
        ));
        assert!(matches!(theorem3_bounds(&simplex_etf(3), 1), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn theorem3_k2_is_exact() {
        let c = partial_dft_frame(3, 8, &[0, 1, 3]).unwrap();
        let b = theorem3_bounds(&c, 2).unwrap();
        let w = worst_case_min_snr(&c, 2).unwrap().value;
        assert!((b.lower - w).abs() < 1e-12);
        assert!((b.upper - w).abs() < 1e-12);
    }

    #[test]
    fn lemma1_regimes() {
        let c = partial_dft_frame(2, 8, &[0, 1]).unwrap();
        let l = lemma1_bounds(&c).unwrap();
        assert!(l.applicable);
        assert!((l.a - 0.125).abs() < 1e-15);
        assert_eq!(l.b, 24.0);
        assert!(l.sum_coherence <= l.upper);

        let l = lemma1_bounds(&simplex_etf(2)).unwrap();
        assert!(!l.applicable);
        assert!((l.upper + 1.0).abs() < 1e-12);
        assert!((l.sum_coherence - 1.0).abs() < 1e-12);

        assert_eq!(lemma1_bounds(&partial_dft_frame(2, 4, &[0, 1]).unwrap()), Err(Error::SingularA));
    }

    #[test]
    fn lemma2_examples() {
        let c = partial_dft_frame(2, 4, &[0, 1]).unwrap();
        let b = lemma2_bound(&c, 2).unwrap();
        assert!((b - 0.5 * (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!(b <= average_min_snr(&c, 2).unwrap());

        assert_eq!(lemma2_bound(&MeasurementMatrix::identity(3), 3).unwrap(), 1.0);

        let ico = crate::design::icosahedral_lines();
        let b = lemma2_bound(&ico, 2).unwrap();
        assert!((b - 0.5 * (1.0 - 0.2f64.sqrt())).abs() < 1e-12);
        assert!((average_min_snr(&ico, 2).unwrap() - b).abs() < 1e-12);
        assert!((coherence(&ico).unwrap() - 0.2f64.sqrt()).abs() < 1e-12);
        assert!(sum_coherence(&ico) > 0.0);
    }
}
