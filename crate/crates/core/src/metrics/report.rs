//! Bundled evaluation of one matrix, with key-value and CSV serializations.
//!
//! `FRAME_REPORT_CSV_HEADER` fixes the CSV column order; one row is emitted
//! per requested `k`. Optional values are written as empty fields.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::{column_norm_spread, tightness_defect, MeasurementMatrix, TIGHTNESS_TOLERANCE};
use crate::metrics::bounds::{theorem3_bounds_with, BoundSheet};
use crate::metrics::snr::{platform_min_eig, scan_platforms, worst_case_from};
use crate::metrics::{
    coherence_from_gram, frame_potential, lemma2_bound, sampled_min_snr, sum_coherence_from_gram, EvalOptions,
    DEFAULT_BUDGET,
};
use crate::platform::{SparseVector, SupportSet};

pub const FRAME_REPORT_CSV_HEADER: &str = "m,N,k,tight,tightness_defect,column_norm_spread,coherence,\
sum_coherence,frame_potential,exact,samples,worst_case_min_snr,worst_case_platform,average_min_snr,\
theorem3_lower,theorem3_lower_clamped,theorem3_upper,lemma2_lower";

pub const BOUND_SHEET_CSV_HEADER: &str =
    "m,N,welch_bound,simplex_bound,etf_angle,etf_feasible_real,etf_feasible_complex,secondary_coherence_bound";

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub budget: u128,
    pub tolerance: f64,
    /// When set, platform counts above the budget fall back to this many
    /// sampled platforms (seeded) instead of failing.
    pub sample: Option<(usize, u64)>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            tolerance: TIGHTNESS_TOLERANCE,
            sample: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KRecord {
    pub k: usize,
    /// False when the values come from sampled platforms.
    pub exact: bool,
    pub samples: Option<usize>,
    pub worst_case_min_snr: f64,
    pub worst_case_platform: SupportSet,
    /// Only computed for exact records.
    pub worst_case_signal: Option<SparseVector>,
    pub average_min_snr: f64,
    pub theorem3_lower: Option<f64>,
    pub theorem3_lower_clamped: Option<f64>,
    pub theorem3_upper: Option<f64>,
    pub lemma2_lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub m: usize,
    pub n: usize,
    pub tight: bool,
    pub tightness_defect: f64,
    pub column_norm_spread: f64,
    /// `None` when some column is zero.
    pub coherence: Option<f64>,
    pub sum_coherence: f64,
    pub frame_potential: f64,
    pub records: Vec<KRecord>,
}

impl FrameReport {
    pub fn build(c: &MeasurementMatrix, ks: &[usize], opts: &ReportOptions) -> Result<Self> {
        let gram = c.gram();
        let n = c.cols();
        let defect = tightness_defect(c);
        let coherence = coherence_from_gram(&gram).ok();
        let eval = EvalOptions { budget: opts.budget };
        let mut records = Vec::with_capacity(ks.len());
        for &k in ks {
            if k == 0 || k > n {
                return Err(Error::InvalidK { k, n });
            }
            let exact = scan_platforms(n, k, opts.budget, |idx| platform_min_eig(&gram, idx));
            let mut record = match (exact, opts.sample) {
                (Ok((min, platform, sum, count)), _) => {
                    let wc = worst_case_from(c, min, platform)?;
                    KRecord {
                        k,
                        exact: true,
                        samples: None,
                        worst_case_min_snr: wc.value,
                        worst_case_platform: wc.platform,
                        worst_case_signal: Some(wc.signal),
                        average_min_snr: sum / count as f64,
                        theorem3_lower: None,
                        theorem3_lower_clamped: None,
                        theorem3_upper: None,
                        lemma2_lower: None,
                    }
                }
                (Err(Error::BudgetExceeded { .. }), Some((samples, seed))) => {
                    let est = sampled_min_snr(c, k, samples, seed)?;
                    KRecord {
                        k,
                        exact: false,
                        samples: Some(est.samples),
                        worst_case_min_snr: est.worst,
                        worst_case_platform: est.worst_platform,
                        worst_case_signal: None,
                        average_min_snr: est.mean,
                        theorem3_lower: None,
                        theorem3_lower_clamped: None,
                        theorem3_upper: None,
                        lemma2_lower: None,
                    }
                }
                (Err(e), _) => return Err(e),
            };
            if k >= 2 && record.exact {
                if let Ok(t3) = theorem3_bounds_with(c, k, &eval) {
                    record.theorem3_lower = Some(t3.lower);
                    record.theorem3_lower_clamped = Some(t3.lower_clamped);
                    record.theorem3_upper = Some(t3.upper);
                }
            }
            record.lemma2_lower = lemma2_bound(c, k).ok();
            records.push(record);
        }
        Ok(Self {
            m: c.rows(),
            n,
            tight: defect <= opts.tolerance,
            tightness_defect: defect,
            column_norm_spread: column_norm_spread(c),
            coherence,
            sum_coherence: sum_coherence_from_gram(&gram),
            frame_potential: frame_potential(c),
            records,
        })
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                [
                    self.m.to_string(),
                    self.n.to_string(),
                    r.k.to_string(),
                    self.tight.to_string(),
                    num(self.tightness_defect),
                    num(self.column_norm_spread),
                    opt(self.coherence),
                    num(self.sum_coherence),
                    num(self.frame_potential),
                    r.exact.to_string(),
                    r.samples.map(|s| s.to_string()).unwrap_or_default(),
                    num(r.worst_case_min_snr),
                    quote(&platform_field(&r.worst_case_platform)),
                    num(r.average_min_snr),
                    opt(r.theorem3_lower),
                    opt(r.theorem3_lower_clamped),
                    opt(r.theorem3_upper),
                    opt(r.lemma2_lower),
                ]
                .join(",")
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(FRAME_REPORT_CSV_HEADER);
        out.push('\n');
        for row in self.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    /// `key=value` lines; per-k entries are prefixed `k<k>.`.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "m={}", self.m);
        let _ = writeln!(out, "N={}", self.n);
        let _ = writeln!(out, "tight={}", self.tight);
        let _ = writeln!(out, "tightness_defect={}", num(self.tightness_defect));
        let _ = writeln!(out, "column_norm_spread={}", num(self.column_norm_spread));
        let _ = writeln!(out, "coherence={}", opt(self.coherence));
        let _ = writeln!(out, "sum_coherence={}", num(self.sum_coherence));
        let _ = writeln!(out, "frame_potential={}", num(self.frame_potential));
        for r in &self.records {
            let p = format!("k{}.", r.k);
            let _ = writeln!(out, "{p}exact={}", r.exact);
            if let Some(s) = r.samples {
                let _ = writeln!(out, "{p}samples={s}");
            }
            let _ = writeln!(out, "{p}worst_case_min_snr={}", num(r.worst_case_min_snr));
            let _ = writeln!(out, "{p}worst_case_platform={}", platform_field(&r.worst_case_platform));
            if let Some(sig) = &r.worst_case_signal {
                let vals: Vec<String> = sig
                    .values
                    .iter()
                    .map(|z| if z.im == 0.0 { num(z.re) } else { format!("{}{:+}i", num(z.re), z.im) })
                    .collect();
                let _ = writeln!(out, "{p}worst_case_signal={}", vals.join(" "));
            }
            let _ = writeln!(out, "{p}average_min_snr={}", num(r.average_min_snr));
            let _ = writeln!(out, "{p}theorem3_lower={}", opt(r.theorem3_lower));
            let _ = writeln!(out, "{p}theorem3_lower_clamped={}", opt(r.theorem3_lower_clamped));
            let _ = writeln!(out, "{p}theorem3_upper={}", opt(r.theorem3_upper));
            let _ = writeln!(out, "{p}lemma2_lower={}", opt(r.lemma2_lower));
        }
        out
    }
}

impl BoundSheet {
    pub fn csv_row(&self) -> String {
        let etf = self.etf;
        [
            self.m.to_string(),
            self.n.to_string(),
            num(self.welch_bound),
            num(self.simplex_bound),
            etf.map(|e| num(e.angle)).unwrap_or_else(|| "n/a".into()),
            etf.map(|e| e.feasible_real.to_string()).unwrap_or_else(|| "n/a".into()),
            etf.map(|e| e.feasible_complex.to_string()).unwrap_or_else(|| "n/a".into()),
            opt(self.secondary_coherence_bound),
        ]
        .join(",")
    }

    pub fn to_key_value(&self) -> String {
        let etf = self.etf;
        let na = || "n/a".to_string();
        format!(
            "m={}\nN={}\nwelch_bound={}\nsimplex_bound={}\netf_angle={}\netf_feasible_real={}\n\
             etf_feasible_complex={}\nsecondary_coherence_bound={}\n",
            self.m,
            self.n,
            num(self.welch_bound),
            num(self.simplex_bound),
            etf.map(|e| num(e.angle)).unwrap_or_else(na),
            etf.map(|e| e.feasible_real.to_string()).unwrap_or_else(na),
            etf.map(|e| e.feasible_complex.to_string()).unwrap_or_else(na),
            self.secondary_coherence_bound.map(num).unwrap_or_else(na),
        )
    }
}

/// Shortest round-trip decimal; deterministic across platforms.
pub fn num(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x}")
    } else {
        // Debug switches to exponent form for tiny and huge magnitudes.
        format!("{x:?}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn platform_field(t: &SupportSet) -> String {
    t.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{orthonormal_columns_padded, simplex_etf};
    use crate::metrics::bound_sheet;

    #[test]
    fn simplex_report_rows() {
        let r = FrameReport::build(&simplex_etf(2), &[1, 2], &ReportOptions::default()).unwrap();
        assert!(r.tight);
        assert_eq!(r.records.len(), 2);
        assert!((r.records[0].worst_case_min_snr - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.records[1].worst_case_min_snr - 1.0 / 3.0).abs() < 1e-12);
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], FRAME_REPORT_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        let ncols = FRAME_REPORT_CSV_HEADER.split(',').count();
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), ncols);
        }
        assert!(lines[2].starts_with("2,3,2,true,"));
    }

    #[test]
    fn non_tight_is_flagged() {
        let c = MeasurementMatrix::from_real(2, 3, &[1.0; 6]).unwrap();
        let r = FrameReport::build(&c, &[1], &ReportOptions::default()).unwrap();
        assert!(!r.tight);
        assert!(r.to_key_value().contains("tight=false"));
        assert!(r.csv_rows()[0].starts_with("2,3,1,false,"));
    }

    #[test]
    fn zero_column_leaves_coherence_empty() {
        let c = orthonormal_columns_padded(2, 3).unwrap();
        let r = FrameReport::build(&c, &[1, 2], &ReportOptions::default()).unwrap();
        assert_eq!(r.coherence, None);
        assert_eq!(r.records[0].worst_case_min_snr, 0.0);
        assert!(r.records[1].theorem3_lower.is_none());
    }

    #[test]
    fn budget_fallback_to_sampling() {
        let c = simplex_etf(5);
        let strict = ReportOptions {
            budget: 3,
            ..Default::default()
        };
        assert!(matches!(
            FrameReport::build(&c, &[2], &strict),
            Err(Error::BudgetExceeded { .. })
        ));
        let sampled = ReportOptions {
            sample: Some((200, 1)),
            ..strict
        };
        let r = FrameReport::build(&c, &[2], &sampled).unwrap();
        assert!(!r.records[0].exact);
        assert_eq!(r.records[0].samples, Some(200));
        assert!(r.records[0].worst_case_signal.is_none());
    }

    #[test]
    fn bound_sheet_rows() {
        assert!(bound_sheet(4, 4).unwrap().csv_row().starts_with("4,4,0,1,n/a,n/a,n/a,"));
        let kv = bound_sheet(3, 6).unwrap().to_key_value();
        assert!(kv.contains("etf_feasible_real=true"));
        let welch: f64 = kv
            .lines()
            .find_map(|l| l.strip_prefix("welch_bound="))
            .unwrap()
            .parse()
            .unwrap();
        assert!((welch - 0.2f64.sqrt()).abs() < 1e-15);
    }
}
