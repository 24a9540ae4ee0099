use num_complex::Complex64;

use super::{DesignConfig, DesignResult, UTF_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{min_row_gram_eigenvalue, polar_factor};
use crate::matrix::{column_norm_spread, column_norms, tightness_defect, MeasurementMatrix};
use crate::metrics::{bound_sheet, coherence};

/// Both defects the projection drives to zero.
const PROJECTION_TARGET: f64 = 1e-14;
/// Give up after this many rounds without a 10% improvement.
const STALL_ROUNDS: usize = 200;

/// Tight within [`UTF_TOLERANCE`] and every column norm within it of `√(m/N)`.
pub fn is_uniform_tight(c: &MeasurementMatrix) -> bool {
    let target = (c.rows() as f64 / c.cols() as f64).sqrt();
    tightness_defect(c) <= UTF_TOLERANCE && column_norms(c).iter().all(|x| (x - target).abs() <= UTF_TOLERANCE)
}

pub(crate) fn welch_gap(c: &MeasurementMatrix) -> f64 {
    let welch = bound_sheet(c.rows(), c.cols()).map(|b| b.welch_bound).unwrap_or(0.0);
    coherence(c).map(|mu| mu - welch).unwrap_or(f64::NAN)
}

fn normalize_columns(c: &mut MeasurementMatrix, target: f64) {
    let (m, n) = (c.rows(), c.cols());
    let norms = column_norms(c);
    for (j, &norm) in norms.iter().enumerate() {
        if norm > 0.0 {
            let s = target / norm;
            for r in 0..m {
                let v = c.get(r, j) * s;
                c.set(r, j, v);
            }
        } else {
            c.set(j % m, j, Complex64::new(target, 0.0));
        }
    }
    debug_assert_eq!(n, c.cols());
}

/// Alternating projection onto uniform tight frames: rescale every column to
/// `√(m/N)`, then replace the matrix by its polar factor so that `CCᴴ = I`.
/// The returned matrix is always exactly the output of a polar step, so it is
/// tight to rounding; `achieved_objective` is the remaining column-norm spread.
///
/// Stops at `config.max_iterations` rounds with `converged = false` and the
/// best iterate when the spread does not reach [`UTF_TOLERANCE`].
pub fn project_to_utf(c0: &MeasurementMatrix, config: &DesignConfig) -> Result<DesignResult> {
    let (m, n) = (c0.rows(), c0.cols());
    let scale = c0.data().iter().map(|z| z.norm_sqr()).sum::<f64>();
    if scale == 0.0 || min_row_gram_eigenvalue(c0) <= 1e-12 * scale {
        return Err(Error::RankDeficient);
    }
    if tightness_defect(c0) <= PROJECTION_TARGET && column_norm_spread(c0) <= PROJECTION_TARGET && is_uniform_tight(c0)
    {
        return Ok(DesignResult {
            matrix: c0.clone(),
            achieved_objective: column_norm_spread(c0),
            welch_gap: welch_gap(c0),
            iterations_used: 0,
            converged: true,
            restart_index: 0,
        });
    }
    let target = (m as f64 / n as f64).sqrt();
    let mut c = c0.clone();
    polar_factor(&mut c, PROJECTION_TARGET, 200);
    let mut best = c.clone();
    let mut best_spread = column_norm_spread(&c);
    let mut last_improvement = 0;
    let mut mark = best_spread;
    let mut iterations = 0;
    while iterations < config.max_iterations && best_spread > PROJECTION_TARGET {
        iterations += 1;
        normalize_columns(&mut c, target);
        polar_factor(&mut c, PROJECTION_TARGET, 200);
        let spread = column_norm_spread(&c);
        if spread < best_spread {
            best_spread = spread;
            best.clone_from(&c);
        }
        if best_spread < 0.9 * mark {
            mark = best_spread;
            last_improvement = iterations;
        } else if iterations - last_improvement > STALL_ROUNDS {
            break;
        }
    }
    let converged = is_uniform_tight(&best);
    Ok(DesignResult {
        welch_gap: welch_gap(&best),
        achieved_objective: best_spread,
        matrix: best,
        iterations_used: iterations,
        converged,
        restart_index: 0,
    })
}
