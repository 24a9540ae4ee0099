//! Measurement-matrix constructors and optimizers.
//!
//! Analytic constructors build known uniform tight frames directly. The
//! optimizers search over real uniform tight frames: each step moves the
//! columns along the gradient of a smoothed objective and then restores the
//! frame constraints with [`project_to_utf`]'s alternating projection.

mod constructors;
mod optimize;
mod utf;

pub use constructors::{
    icosahedral_lines, import_packing, orthonormal_columns_padded, partial_dft_frame, random_right_orthogonal,
    simplex_etf, ImportedPacking,
};
pub use optimize::{minimize_coherence, minimize_sum_coherence};
pub use utf::{is_uniform_tight, project_to_utf};

use crate::matrix::MeasurementMatrix;

/// Tolerance on tightness defect and column-norm spread for a design to
/// count as a uniform tight frame.
pub const UTF_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Coherence,
    SumCoherence,
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coherence" => Ok(Target::Coherence),
            "sum_coherence" | "sum-coherence" => Ok(Target::SumCoherence),
            other => Err(format!("unknown target `{other}` (expected coherence or sum_coherence)")),
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Target::Coherence => "coherence",
            Target::SumCoherence => "sum_coherence",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConfig {
    pub seed: u64,
    /// Iteration cap per restart, shared across smoothing stages.
    pub max_iterations: usize,
    pub restarts: usize,
    /// Initial exponent of the p-norm relaxation of the maximum (≥ 2).
    pub smoothing_p: f64,
    /// Final exponent; `p` doubles per stage from `smoothing_p` up to this.
    pub smoothing_p_final: f64,
    /// Step length relative to `‖C‖_F`.
    pub step_size: f64,
    /// Multiplicative decay applied after a rejected step, in `(0, 1]`.
    pub step_decay: f64,
    /// A stage ends once the step length falls below this.
    pub convergence_tol: f64,
    pub target: Target,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iterations: 3000,
            restarts: 8,
            smoothing_p: 4.0,
            smoothing_p_final: 512.0,
            step_size: 0.05,
            step_decay: 0.5,
            convergence_tol: 1e-7,
            target: Target::Coherence,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |msg: &str| Err(crate::Error::Domain(format!("invalid design config: {msg}")));
        if self.max_iterations == 0 || self.restarts == 0 {
            return bad("max_iterations and restarts must be positive");
        }
        if !(self.smoothing_p >= 2.0) || self.smoothing_p_final < self.smoothing_p {
            return bad("need 2 <= smoothing_p <= smoothing_p_final");
        }
        if !(self.step_size > 0.0) || !(self.convergence_tol > 0.0) {
            return bad("step_size and convergence_tol must be positive");
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return bad("step_decay must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub matrix: MeasurementMatrix,
    /// Coherence, sum-coherence or column-norm spread depending on the routine.
    pub achieved_objective: f64,
    /// Achieved coherence minus the Welch bound.
    pub welch_gap: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub restart_index: usize,
}

impl DesignResult {
    /// `key=value` summary lines.
    pub fn summary(&self) -> String {
        use crate::metrics::report::num;
        format!(
            "m={}\nN={}\nachieved_objective={}\nwelch_gap={}\niterations_used={}\nconverged={}\nrestart_index={}\n",
            self.matrix.rows(),
            self.matrix.cols(),
            num(self.achieved_objective),
            num(self.welch_gap),
            self.iterations_used,
            self.converged,
            self.restart_index
        )
    }
}
