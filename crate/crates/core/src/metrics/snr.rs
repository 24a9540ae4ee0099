//! Worst-case and average minimum-eigenvalue criteria over all k-platforms.
//!
//! Platforms are scanned in fixed-size rank chunks. Chunks run in parallel
//! but the chunk partition never depends on the thread count, the minimum
//! keeps the lowest-rank platform on ties, and chunk sums are combined by a
//! fixed pairwise tree, so results are bit-identical for any pool size.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::{eigh, min_eigenvalue_2x2, min_eigenvalue_unchecked};
use crate::error::{Error, Result};
use crate::matrix::{gram_submatrix, HermitianMatrix, MeasurementMatrix};
use crate::platform::{binomial, enumerate_platform_range, platform_chunks, SparseVector, SupportSet};

pub const DEFAULT_BUDGET: u128 = 10_000_000;
const CHUNK: u128 = 4096;

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Largest `C(N, k)` evaluated exactly.
    pub budget: u128,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
        }
    }
}

/// The worst platform, its minimum eigenvalue and the unit signal achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub value: f64,
    pub platform: SupportSet,
    pub signal: SparseVector,
}

#[inline]
pub(crate) fn platform_min_eig(gram: &HermitianMatrix, idx: &[usize]) -> f64 {
    match idx {
        [i] => gram.get(*i, *i).re,
        [i, j] => min_eigenvalue_2x2(gram.get(*i, *i).re, gram.get(*j, *j).re, gram.get(*i, *j).norm()),
        _ => min_eigenvalue_unchecked(&gram.principal(idx)),
    }
}

/// Reduces chunk partial sums by a balanced pairwise tree in chunk order.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

pub(crate) fn check_budget(n: usize, k: usize, budget: u128) -> Result<u128> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let count = binomial(n, k);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    Ok(count)
}

struct ChunkScan {
    min: f64,
    argmin: Vec<usize>,
    sum: f64,
}

/// Maps every platform through `f` and returns the chunked min/argmin/sum.
/// Values this close to the running minimum count as ties, which go to the
/// lexicographically first platform.
fn tie_margin(min: f64) -> f64 {
    if min.is_finite() {
        1e-12 * min.abs().max(1.0)
    } else {
        0.0
    }
}

pub(crate) fn scan_platforms<F>(n: usize, k: usize, budget: u128, f: F) -> Result<(f64, SupportSet, f64, u128)>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    let count = check_budget(n, k, budget)?;
    let chunks = platform_chunks(n, k, CHUNK);
    let scans: Vec<ChunkScan> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut scan = ChunkScan {
                min: f64::INFINITY,
                argmin: Vec::new(),
                sum: 0.0,
            };
            for t in enumerate_platform_range(n, k, start, end).expect("k validated") {
                let v = f(t.indices());
                scan.sum += v;
                if v < scan.min - tie_margin(scan.min) || scan.argmin.is_empty() {
                    scan.min = v;
                    scan.argmin = t.indices().to_vec();
                }
            }
            scan
        })
        .collect();
    let mut best = &scans[0];
    for s in &scans[1..] {
        if s.min < best.min - tie_margin(best.min) {
            best = s;
        }
    }
    let sums: Vec<f64> = scans.iter().map(|s| s.sum).collect();
    let platform = SupportSet::new(best.argmin.clone(), n)?;
    Ok((best.min, platform, pairwise_sum(&sums), count))
}

/// `min_T λ_min(C_Tᴴ C_T)` over every `T ∈ Ω_k`, with its witnesses.
pub fn worst_case_min_snr(c: &MeasurementMatrix, k: usize) -> Result<WorstCase> {
    worst_case_min_snr_with(c, k, &EvalOptions::default())
}

pub fn worst_case_min_snr_with(c: &MeasurementMatrix, k: usize, opts: &EvalOptions) -> Result<WorstCase> {
    let gram = c.gram();
    let (value, platform, _, _) = scan_platforms(c.cols(), k, opts.budget, |idx| platform_min_eig(&gram, idx))?;
    worst_case_from(c, value, platform)
}

pub(crate) fn worst_case_from(c: &MeasurementMatrix, value: f64, platform: SupportSet) -> Result<WorstCase> {
    let block = gram_submatrix(c, &platform)?;
    let e = eigh(&block)?;
    let mut v = e.vectors[0].clone();
    // fix the global phase so the largest-modulus coordinate is real positive
    if let Some(pivot) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            for z in v.iter_mut() {
                *z *= phase;
            }
        }
    }
    let signal = SparseVector::new(platform.clone(), v)?;
    Ok(WorstCase {
        value,
        platform,
        signal,
    })
}

/// Exact uniform mean of `λ_min(C_Tᴴ C_T)` over `Ω_k`.
pub fn average_min_snr(c: &MeasurementMatrix, k: usize) -> Result<f64> {
    average_min_snr_with(c, k, &EvalOptions::default())
}

pub fn average_min_snr_with(c: &MeasurementMatrix, k: usize, opts: &EvalOptions) -> Result<f64> {
    let gram = c.gram();
    let (_, _, sum, count) = scan_platforms(c.cols(), k, opts.budget, |idx| platform_min_eig(&gram, idx))?;
    Ok(sum / count as f64)
}

/// Closed form of the pair average,
/// `(1/(N(N−1))) Σ_{i<j} (‖c_i‖² + ‖c_j‖² − f(i,j))` with
/// `f(i,j) = √((‖c_i‖² − ‖c_j‖²)² + 4|⟨c_i,c_j⟩|²)`.
pub fn average_min_snr_closed_k2(c: &MeasurementMatrix) -> f64 {
    let n = c.cols();
    if n < 2 {
        return f64::NAN;
    }
    let g = c.gram();
    let sq: Vec<f64> = (0..n).map(|i| g.get(i, i).re).collect();
    let total_sq: f64 = sq.iter().sum();
    let mut f_sum = 0.0;
    for j in 1..n {
        for i in 0..j {
            let d = sq[i] - sq[j];
            f_sum += (d * d + 4.0 * g.get(i, j).norm_sqr()).sqrt();
        }
    }
    let nn = n as f64;
    ((nn - 1.0) * total_sq - f_sum) / (nn * (nn - 1.0))
}

/// Monte Carlo estimate over uniformly drawn platforms, for sizes above the
/// exact-enumeration budget. Never exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledEstimate {
    pub worst: f64,
    pub worst_platform: SupportSet,
    pub mean: f64,
    pub samples: usize,
}

pub fn sampled_min_snr(c: &MeasurementMatrix, k: usize, samples: usize, seed: u64) -> Result<SampledEstimate> {
    let n = c.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let gram = c.gram();
    const BLOCK: usize = 1024;
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<(f64, Vec<usize>, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut best = (f64::INFINITY, Vec::new(), 0.0);
            for _ in 0..count {
                let mut idx = sample(&mut rng, n, k).into_vec();
                idx.sort_unstable();
                let v = platform_min_eig(&gram, &idx);
                best.2 += v;
                if v < best.0 || best.1.is_empty() {
                    best.0 = v;
                    best.1 = idx;
                }
            }
            best
        })
        .collect();
    let mut worst = &parts[0];
    for p in &parts[1..] {
        if p.0 < worst.0 {
            worst = p;
        }
    }
    let sums: Vec<f64> = parts.iter().map(|p| p.2).collect();
    Ok(SampledEstimate {
        worst: worst.0,
        worst_platform: SupportSet::new(worst.1.clone(), n)?,
        mean: pairwise_sum(&sums) / samples as f64,
        samples,
    })
}

/// `‖C · embed(θ)‖²`.
pub fn signal_energy(c: &MeasurementMatrix, theta: &SparseVector) -> Result<f64> {
    let y: Vec<Complex64> = c.apply(&theta.embed(c.cols()))?;
    Ok(y.iter().map(|z| z.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{orthonormal_columns_padded, partial_dft_frame, random_right_orthogonal, simplex_etf};
    use crate::eigen::min_eigenvalue;
    use crate::metrics::coherence;
    use crate::platform::enumerate_platforms;

    /// Independent brute force: explicit Gram blocks and the Jacobi solver for every k.
    fn brute(c: &MeasurementMatrix, k: usize) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut sum = 0.0;
        let mut count = 0.0;
        for t in enumerate_platforms(c.cols(), k).unwrap() {
            let e = eigh(&gram_submatrix(c, &t).unwrap()).unwrap().values[0];
            min = min.min(e);
            sum += e;
            count += 1.0;
        }
        (min, sum / count)
    }

    #[test]
    fn k1_utf_is_m_over_n() {
        let c = partial_dft_frame(8, 50, &(0..8).collect::<Vec<_>>()).unwrap();
        let w = worst_case_min_snr(&c, 1).unwrap();
        assert!((w.value - 0.16).abs() < 1e-12);
    }

    #[test]
    fn mercedes_benz_pairs() {
        let mb = simplex_etf(2);
        let w = worst_case_min_snr(&mb, 2).unwrap();
        assert!((w.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(w.platform.indices(), &[0, 1]);
        assert!((average_min_snr(&mb, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((average_min_snr_closed_k2(&mb) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_column_is_worst_single_platform() {
        let c = orthonormal_columns_padded(2, 3).unwrap();
        let w = worst_case_min_snr(&c, 1).unwrap();
        assert_eq!(w.value, 0.0);
        assert_eq!(w.platform.indices(), &[2]);
        assert!((average_min_snr(&c, 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((average_min_snr_closed_k2(&c) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn partial_dft_pair_average() {
        let c = partial_dft_frame(2, 4, &[0, 1]).unwrap();
        let want = 0.5 - (2.0 / 12.0) * 2f64.sqrt();
        assert!((average_min_snr(&c, 2).unwrap() - want).abs() < 1e-12);
        assert!((average_min_snr_closed_k2(&c) - want).abs() < 1e-12);
        assert!((brute(&c, 2).1 - want).abs() < 1e-12);
        assert!((want - 0.26430).abs() < 1e-5);
    }

    #[test]
    fn signal_witness_attains_value() {
        for (m, n, seed) in [(3, 7, 1u64), (4, 9, 2), (2, 6, 3)] {
            let c = random_right_orthogonal(m, n, seed).unwrap();
            for k in 1..=4.min(n) {
                let w = worst_case_min_snr(&c, k).unwrap();
                assert!((w.signal.norm() - 1.0).abs() < 1e-12);
                assert!((signal_energy(&c, &w.signal).unwrap() - w.value).abs() < 1e-8);
                let (bmin, bavg) = brute(&c, k);
                assert!((w.value - bmin).abs() < 1e-12);
                assert!((average_min_snr(&c, k).unwrap() - bavg).abs() < 1e-12);
                assert!(w.value <= average_min_snr(&c, k).unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn budget_and_k_errors() {
        let c = simplex_etf(3);
        assert_eq!(
            worst_case_min_snr_with(&c, 2, &EvalOptions { budget: 5 }),
            Err(Error::BudgetExceeded { count: 6, budget: 5 })
        );
        assert!(matches!(average_min_snr(&c, 0), Err(Error::InvalidK { .. })));
        assert!(matches!(worst_case_min_snr(&c, 5), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        let c = MeasurementMatrix::identity(4);
        let w = worst_case_min_snr(&c, 3).unwrap();
        assert_eq!(w.platform.indices(), &[0, 1, 2]);
    }

    #[test]
    fn theorem2_pair_value_on_uniform_frames() {
        let c = partial_dft_frame(3, 7, &[1, 2, 4]).unwrap();
        let mu = coherence(&c).unwrap();
        let w = worst_case_min_snr(&c, 2).unwrap();
        assert!((w.value - (3.0 / 7.0) * (1.0 - mu)).abs() < 1e-12);
        let g = gram_submatrix(&c, &w.platform).unwrap();
        assert!((min_eigenvalue(&g).unwrap() - w.value).abs() < 1e-15);
    }

    #[test]
    fn sampled_estimate_is_deterministic_and_bounded() {
        let c = random_right_orthogonal(4, 12, 9).unwrap();
        let a = sampled_min_snr(&c, 3, 5000, 11).unwrap();
        let b = sampled_min_snr(&c, 3, 5000, 11).unwrap();
        assert_eq!(a, b);
        let exact = worst_case_min_snr(&c, 3).unwrap().value;
        assert!(a.worst >= exact - 1e-15);
        let avg = average_min_snr(&c, 3).unwrap();
        assert!((a.mean - avg).abs() < 0.05 * avg.max(1e-3));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = random_right_orthogonal(4, 16, 5).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (worst_case_min_snr(&c, 4).unwrap(), average_min_snr(&c, 4).unwrap()))
        };
        let (w1, a1) = run(1);
        let (w4, a4) = run(4);
        assert_eq!(w1, w4);
        assert_eq!(a1.to_bits(), a4.to_bits());
    }
}
