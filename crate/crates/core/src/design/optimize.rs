//! Smoothed descent over real uniform tight frames.
//!
//! Coherence: minimize `F_p = (Σ_{i<j} |g_ij|^p)^{1/p}` with `g_ij` the
//! normalized inner products, doubling `p` per stage so `F_p` approaches the
//! maximum. Sum-coherence: minimize `Σ_{i<j} √(h_ij² + ε²)` with `h_ij` the
//! raw inner products, shrinking `ε` per stage. Every trial point is pushed
//! back onto the uniform tight frames by alternating projection; a step is
//! accepted only if it lowers the current stage objective, otherwise the
//! step length decays.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::utf::welch_gap;
use super::{is_uniform_tight, DesignConfig, DesignResult, Target};
use crate::error::{Error, Result};
use crate::matrix::MeasurementMatrix;
use crate::metrics::bound_sheet;

/// Real `m × N` frame stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RealFrame {
    pub m: usize,
    pub n: usize,
    pub data: Vec<f64>,
}

impl RealFrame {
    fn random<R: Rng>(m: usize, n: usize, rng: &mut R) -> Self {
        Self {
            m,
            n,
            data: (0..m * n).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    fn to_matrix(&self) -> MeasurementMatrix {
        MeasurementMatrix::from_fn(self.m, self.n, |r, c| Complex64::new(self.data[c * self.m + r], 0.0))
            .expect("frame dimensions are valid")
    }

    fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn col_norms(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.col(j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    fn spread(&self) -> f64 {
        let norms = self.col_norms();
        let max = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    fn normalize_columns(&mut self, target: f64) {
        let m = self.m;
        for j in 0..self.n {
            let col = &mut self.data[j * m..(j + 1) * m];
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.iter_mut().for_each(|x| *x *= target / norm);
            } else {
                col[j % m] = target;
            }
        }
    }

    /// Newton-Schulz polar step `Y ← (3Y − (YYᵀ)Y)/2`; returns `‖YYᵀ − I‖_F`.
    fn polar(&mut self, tol: f64, max_iter: usize) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut s = vec![0.0; m * m];
        let mut defect = f64::INFINITY;
        let mut rescaled = false;
        for _ in 0..max_iter {
            s.iter_mut().for_each(|x| *x = 0.0);
            for j in 0..n {
                let c = &self.data[j * m..(j + 1) * m];
                for a in 0..m {
                    let ca = c[a];
                    for b in a..m {
                        s[a * m + b] += ca * c[b];
                    }
                }
            }
            defect = 0.0;
            for a in 0..m {
                for b in a..m {
                    let v = s[a * m + b];
                    s[b * m + a] = v;
                    let d = if a == b { v - 1.0 } else { v };
                    defect += if a == b { d * d } else { 2.0 * d * d };
                }
            }
            defect = defect.sqrt();
            if defect <= tol {
                break;
            }
            if defect >= 0.5 && !rescaled {
                let f = self.fro_norm();
                self.data.iter_mut().for_each(|x| *x /= f);
                rescaled = true;
                continue;
            }
            let mut tmp = vec![0.0; m];
            for j in 0..n {
                let c = &mut self.data[j * m..(j + 1) * m];
                for a in 0..m {
                    tmp[a] = (0..m).map(|b| s[a * m + b] * c[b]).sum();
                }
                for a in 0..m {
                    c[a] = 1.5 * c[a] - 0.5 * tmp[a];
                }
            }
        }
        defect
    }

    /// Alternating projection onto uniform tight frames, ending on a polar step.
    fn project_utf(&mut self, tol: f64, max_rounds: usize) {
        let target = (self.m as f64 / self.n as f64).sqrt();
        self.polar(1e-14, 200);
        for _ in 0..max_rounds {
            if self.spread() <= tol {
                break;
            }
            self.normalize_columns(target);
            self.polar(1e-14, 200);
        }
    }

    /// Inner products `c_iᵀ c_j`, row-major `N × N`.
    fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            let ci = self.col(i);
            for j in i..n {
                let v: f64 = ci.iter().zip(self.col(j)).map(|(a, b)| a * b).sum();
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }

    fn coherence(&self) -> f64 {
        let g = self.gram();
        let n = self.n;
        let mut mu: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                mu = mu.max(g[i * n + j].abs() / (g[i * n + i] * g[j * n + j]).sqrt());
            }
        }
        mu
    }

    fn sum_coherence(&self) -> f64 {
        let g = self.gram();
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += g[i * n + j].abs();
            }
        }
        acc
    }
}

/// `F_p` over normalized inner products and its gradient with respect to the
/// entries of `C` (column-major).
pub(crate) fn smoothed_coherence(frame: &RealFrame, p: f64) -> (f64, Vec<f64>) {
    let (m, n) = (frame.m, frame.n);
    let g = frame.gram();
    let norms: Vec<f64> = (0..n).map(|i| g[i * n + i].sqrt()).collect();
    let mut cos = vec![0.0; n * n];
    let mut max: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = g[i * n + j] / (norms[i] * norms[j]);
            cos[i * n + j] = v;
            cos[j * n + i] = v;
            max = max.max(v.abs());
        }
    }
    let mut grad = vec![0.0; m * n];
    if max == 0.0 {
        return (0.0, grad);
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += (cos[i * n + j].abs() / max).powf(p);
        }
    }
    let value = max * acc.powf(1.0 / p);
    // ∂F/∂g_ij = sign(g_ij) (|g_ij| / F)^{p−1}
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = cos[i * n + j];
                w[i * n + j] = v.signum() * (v.abs() / value).powf(p - 1.0);
            }
        }
    }
    for i in 0..n {
        // ∂F/∂u_i = Σ_j w_ij u_j, then project off u_i and divide by ‖c_i‖.
        let mut du = vec![0.0; m];
        for j in 0..n {
            let wij = w[i * n + j];
            if wij != 0.0 {
                let cj = frame.col(j);
                for r in 0..m {
                    du[r] += wij * cj[r] / norms[j];
                }
            }
        }
        let ci = frame.col(i);
        let radial: f64 = du.iter().zip(ci).map(|(a, b)| a * b / norms[i]).sum();
        for r in 0..m {
            grad[i * m + r] = (du[r] - radial * ci[r] / norms[i]) / norms[i];
        }
    }
    (value, grad)
}

/// `Σ_{i<j} √(h_ij² + ε²)` over raw inner products and its gradient.
pub(crate) fn smoothed_sum_coherence(frame: &RealFrame, eps: f64) -> (f64, Vec<f64>) {
    let (m, n) = (frame.m, frame.n);
    let g = frame.gram();
    let mut value = 0.0;
    let mut grad = vec![0.0; m * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let h = g[i * n + j];
            let s = (h * h + eps * eps).sqrt();
            value += s;
            let w = h / s;
            for r in 0..m {
                let (ci, cj) = (frame.data[i * m + r], frame.data[j * m + r]);
                grad[i * m + r] += w * cj;
                grad[j * m + r] += w * ci;
            }
        }
    }
    (value, grad)
}

struct RestartOutcome {
    frame: RealFrame,
    objective: f64,
    iterations: usize,
}

fn true_objective(frame: &RealFrame, target: Target) -> f64 {
    match target {
        Target::Coherence => frame.coherence(),
        Target::SumCoherence => frame.sum_coherence(),
    }
}

fn run_restart(m: usize, n: usize, config: &DesignConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut frame = RealFrame::random(m, n, &mut rng);
    frame.project_utf(1e-12, 2000);

    let stages = (config.smoothing_p_final / config.smoothing_p).log2().floor() as usize + 1;
    let per_stage = (config.max_iterations / stages).max(1);
    let scale = (m as f64 / n as f64).max(f64::MIN_POSITIVE);

    let mut best = frame.clone();
    let mut best_obj = true_objective(&frame, config.target);
    let mut iterations = 0;

    for stage in 0..stages {
        let p = config.smoothing_p * 2f64.powi(stage as i32);
        // ε shrinks by the same factor p grows.
        let eps = scale * 0.1 / 2f64.powi(stage as i32);
        let eval = |f: &RealFrame| match config.target {
            Target::Coherence => smoothed_coherence(f, p),
            Target::SumCoherence => smoothed_sum_coherence(f, eps),
        };
        let mut step = config.step_size;
        let (mut value, mut grad) = eval(&frame);
        for _ in 0..per_stage {
            if step < config.convergence_tol {
                break;
            }
            iterations += 1;
            let gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gnorm == 0.0 {
                break;
            }
            let mult = step * frame.fro_norm() / gnorm;
            let mut trial = frame.clone();
            trial.data.iter_mut().zip(&grad).for_each(|(x, d)| *x -= mult * d);
            trial.project_utf(1e-10, 8);
            let (tv, tg) = eval(&trial);
            if tv < value {
                frame = trial;
                value = tv;
                grad = tg;
                let obj = true_objective(&frame, config.target);
                if obj < best_obj {
                    best_obj = obj;
                    best.clone_from(&frame);
                }
            } else {
                step *= config.step_decay;
            }
        }
    }
    best.project_utf(1e-15, 5000);
    let objective = true_objective(&best, config.target);
    RestartOutcome {
        frame: best,
        objective,
        iterations,
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m < 2 || m > n {
        return Err(Error::InvalidDims(format!("need 1 < m <= N, got m={m}, N={n}")));
    }
    Ok(())
}

fn optimize(m: usize, n: usize, config: &DesignConfig, target: Target) -> Result<DesignResult> {
    check_dims(m, n)?;
    config.validate()?;
    if m == n {
        let matrix = MeasurementMatrix::identity(m);
        return Ok(DesignResult {
            welch_gap: welch_gap(&matrix),
            matrix,
            achieved_objective: 0.0,
            iterations_used: 0,
            converged: true,
            restart_index: 0,
        });
    }
    let config = DesignConfig { target, ..*config };
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(m, n, &config, r))
        .collect();
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.objective < outcomes[best].objective {
            best = i;
        }
    }
    let iterations_used = outcomes.iter().map(|o| o.iterations).sum();
    let winner = &outcomes[best];
    let matrix = winner.frame.to_matrix();
    let converged = is_uniform_tight(&matrix);
    Ok(DesignResult {
        welch_gap: welch_gap(&matrix),
        achieved_objective: winner.objective,
        matrix,
        iterations_used,
        converged,
        restart_index: best,
    })
}

/// Searches real uniform tight frames for minimum coherence (Grassmannian
/// line packing). Best of `config.restarts` seeded starts; `config.target`
/// is ignored.
pub fn minimize_coherence(m: usize, n: usize, config: &DesignConfig) -> Result<DesignResult> {
    let result = optimize(m, n, config, Target::Coherence)?;
    debug_assert!(
        result.achieved_objective >= bound_sheet(m, n).map(|b| b.welch_bound).unwrap_or(0.0) - 1e-9,
        "coherence below the Welch bound"
    );
    Ok(result)
}

/// Heuristic search for a real uniform tight frame of small sum-coherence.
/// No optimality certificate.
pub fn minimize_sum_coherence(m: usize, n: usize, config: &DesignConfig) -> Result<DesignResult> {
    optimize(m, n, config, Target::SumCoherence)
}
