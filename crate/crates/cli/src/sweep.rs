//! Designed-versus-random comparison sweeps.
//!
//! Each sweep point fixes `(m, N, k)`. The designed frame's worst-case
//! objective `min_T λ_min(C_Tᴴ C_T)` is compared with the same objective
//! over `baseline_trials` seeded random right-orthogonal matrices. Values are
//! reported in dB (`10·log₁₀`), with `-inf` for zero.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

use cmdesign::design::{
    import_packing, minimize_coherence, minimize_sum_coherence, partial_dft_frame, random_right_orthogonal,
    simplex_etf,
};
use cmdesign::metrics::{bound_sheet, coherence, format_number, worst_case_min_snr_with, EvalOptions};
use cmdesign::{DesignConfig, MeasurementMatrix, Target};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::CliError;

pub const SWEEP_CSV_HEADER: &str =
    "varied_param,designed_value_db,baseline_mean_db,baseline_std_db,welch_bound_db_reference";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepMode {
    #[value(name = "vary_k", alias = "vary-k")]
    VaryK,
    #[value(name = "vary_m", alias = "vary-m")]
    VaryM,
    #[value(name = "vary_N", alias = "vary-n", alias = "vary_n")]
    VaryN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DesignSource {
    Optimize,
    /// Frames read from `<import_dir>/m{m}_N{N}.txt`.
    Import,
    /// Simplex for `N = m + 1`, identity for `m = N`, otherwise the first
    /// `m` rows of the DFT.
    Analytic,
}

impl std::str::FromStr for DesignSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub from: usize,
    pub to: usize,
    pub step: usize,
    pub baseline_trials: usize,
    pub design_source: DesignSource,
    pub import_dir: Option<PathBuf>,
    pub config: DesignConfig,
    pub allow_nonconverged: bool,
    pub budget: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub varied: usize,
    /// Linear worst-case objective of the designed frame.
    pub designed: f64,
    /// Coherence of the designed frame (NaN with a zero column).
    pub designed_coherence: f64,
    /// Linear mean of the baseline objectives.
    pub baseline_mean: f64,
    /// Sample standard deviation of the per-realization dB values.
    pub baseline_std_db: f64,
    /// Linear reference value, see [`reference_value`].
    pub reference: f64,
}

/// `10·log₁₀ x`, `-∞` for `x ≤ 0`.
pub fn db(x: f64) -> f64 {
    if x > 0.0 {
        10.0 * x.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Best worst-case objective permitted by the Welch bound: `m/N` for `k = 1`
/// and `(m/N)(1 − μ_W)` for `k ≥ 2`.
pub fn reference_value(m: usize, n: usize, k: usize) -> Result<f64, CliError> {
    let ratio = m as f64 / n as f64;
    if k <= 1 {
        return Ok(ratio);
    }
    Ok(ratio * (1.0 - bound_sheet(m, n)?.welch_bound))
}

impl SweepSpec {
    pub fn points(&self) -> Result<Vec<SweepPoint>, CliError> {
        if self.step == 0 || self.from > self.to {
            return Err(CliError::usage("sweep range must be nonempty with step >= 1"));
        }
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| CliError::usage(format!("--{name} is required for {:?}", self.mode)))
        };
        let mut points = Vec::new();
        for v in (self.from..=self.to).step_by(self.step) {
            let p = match self.mode {
                SweepMode::VaryK => SweepPoint {
                    m: need(self.m, "m")?,
                    n: need(self.n, "N")?,
                    k: v,
                },
                SweepMode::VaryM => SweepPoint {
                    m: v,
                    n: need(self.n, "N")?,
                    k: need(self.k, "k")?,
                },
                SweepMode::VaryN => SweepPoint {
                    m: need(self.m, "m")?,
                    n: v,
                    k: need(self.k, "k")?,
                },
            };
            if p.m == 0 || p.m > p.n || p.k == 0 || p.k > p.n {
                return Err(CliError::usage(format!(
                    "sweep point m={}, N={}, k={} needs 1 <= m <= N and 1 <= k <= N",
                    p.m, p.n, p.k
                )));
            }
            points.push(p);
        }
        Ok(points)
    }

    fn varied(&self, p: &SweepPoint) -> usize {
        match self.mode {
            SweepMode::VaryK => p.k,
            SweepMode::VaryM => p.m,
            SweepMode::VaryN => p.n,
        }
    }

    fn design(&self, m: usize, n: usize) -> Result<MeasurementMatrix, CliError> {
        match self.design_source {
            DesignSource::Optimize => {
                let r = match self.config.target {
                    Target::Coherence => minimize_coherence(m, n, &self.config)?,
                    Target::SumCoherence => minimize_sum_coherence(m, n, &self.config)?,
                };
                if !r.converged && !self.allow_nonconverged {
                    return Err(CliError::optimizer(format!(
                        "design for m={m}, N={n} did not converge to a uniform tight frame"
                    )));
                }
                Ok(r.matrix)
            }
            DesignSource::Import => {
                let dir = self
                    .import_dir
                    .as_deref()
                    .ok_or_else(|| CliError::usage("--import-dir is required with --source import"))?;
                Ok(import_packing(&import_path(dir, m, n), Some((m, n)))?.matrix)
            }
            DesignSource::Analytic => {
                if m == n {
                    Ok(MeasurementMatrix::identity(m))
                } else if n == m + 1 {
                    Ok(simplex_etf(m))
                } else {
                    Ok(partial_dft_frame(m, n, &(0..m).collect::<Vec<_>>())?)
                }
            }
        }
    }
}

pub fn import_path(dir: &Path, m: usize, n: usize) -> PathBuf {
    dir.join(format!("m{m}_N{n}.txt"))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    if spec.baseline_trials == 0 {
        return Err(CliError::usage("--baseline-trials must be positive"));
    }
    let points = spec.points()?;
    let opts = EvalOptions { budget: spec.budget };
    let mut designs: HashMap<(usize, usize), MeasurementMatrix> = HashMap::new();
    let mut rows = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        if let Entry::Vacant(slot) = designs.entry((p.m, p.n)) {
            slot.insert(spec.design(p.m, p.n)?);
        }
        let frame = &designs[&(p.m, p.n)];
        let designed = worst_case_min_snr_with(frame, p.k, &opts)?.value;

        let mut rng = ChaCha8Rng::seed_from_u64(spec.config.seed);
        rng.set_stream(index as u64);
        let seeds: Vec<u64> = (0..spec.baseline_trials).map(|_| rng.next_u64()).collect();
        let baseline = seeds
            .par_iter()
            .map(|&s| Ok(worst_case_min_snr_with(&random_right_orthogonal(p.m, p.n, s)?, p.k, &opts)?.value))
            .collect::<Result<Vec<f64>, CliError>>()?;
        let (baseline_mean, _) = mean_std(&baseline);
        let dbs: Vec<f64> = baseline.iter().map(|&x| db(x)).collect();
        let (_, baseline_std_db) = mean_std(&dbs);
        rows.push(SweepRow {
            point: *p,
            varied: spec.varied(p),
            designed,
            designed_coherence: coherence(frame).unwrap_or(f64::NAN),
            baseline_mean,
            baseline_std_db,
            reference: reference_value(p.m, p.n, p.k)?,
        });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out += &format!(
            "{},{},{},{},{}\n",
            r.varied,
            format_number(db(r.designed)),
            format_number(db(r.baseline_mean)),
            format_number(r.baseline_std_db),
            format_number(db(r.reference))
        );
    }
    out
}
