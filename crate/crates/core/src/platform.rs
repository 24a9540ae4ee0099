//! k-platforms (index sets of size k) and their lexicographic enumeration.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A strictly increasing set of `k` column indices in `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.len() > n {
            return Err(Error::InvalidK {
                k: indices.len(),
                n,
            });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "support indices must be strictly increasing: {indices:?}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

impl std::fmt::Display for SupportSet {
    /// `{0,3,7}`
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Coefficients `θ_T` on a platform; zero entries are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub support: SupportSet,
    pub values: Vec<Complex64>,
}

impl SparseVector {
    pub fn new(support: SupportSet, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != support.k() {
            return Err(Error::DimensionMismatch {
                expected: support.k(),
                got: values.len(),
            });
        }
        Ok(Self { support, values })
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Dense length-`n` coefficient vector.
    pub fn embed(&self, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (&i, &v) in self.support.indices().iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

/// `C(n, k)` in `u128`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over `Ω_k`, optionally restricted to a rank range.
#[derive(Debug, Clone)]
pub struct Platforms {
    n: usize,
    current: Option<Vec<usize>>,
    remaining: u128,
}

impl Platforms {
    fn advance(&mut self) {
        let Some(cur) = self.current.as_mut() else {
            return;
        };
        let k = cur.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for j in (i + 1)..k {
                    cur[j] = cur[j - 1] + 1;
                }
                return;
            }
        }
        self.current = None;
    }
}

impl Iterator for Platforms {
    type Item = SupportSet;

    fn next(&mut self) -> Option<SupportSet> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current.clone()?;
        self.remaining -= 1;
        self.advance();
        Some(SupportSet { indices: out })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(())
}

/// All `C(n, k)` platforms in lexicographic order.
pub fn enumerate_platforms(n: usize, k: usize) -> Result<Platforms> {
    enumerate_platform_range(n, k, 0, binomial(n, k))
}

/// Platforms with lexicographic ranks in `[start, end)`, so disjoint chunks
/// of `Ω_k` can be consumed independently.
pub fn enumerate_platform_range(n: usize, k: usize, start: u128, end: u128) -> Result<Platforms> {
    check_k(n, k)?;
    let total = binomial(n, k);
    let end = end.min(total);
    if start >= end {
        return Ok(Platforms {
            n,
            current: None,
            remaining: 0,
        });
    }
    Ok(Platforms {
        n,
        current: Some(unrank(n, k, start)),
        remaining: end - start,
    })
}

/// The platform with lexicographic rank `rank`.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let left = k - slot - 1;
        loop {
            // number of completions when position `slot` takes value `next`
            let count = binomial(n - next - 1, left);
            if rank < count {
                break;
            }
            rank -= count;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Splits `Ω_k` into consecutive rank ranges of at most `chunk` platforms.
pub fn platform_chunks(n: usize, k: usize, chunk: u128) -> Vec<(u128, u128)> {
    let total = binomial(n, k);
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        out.push((start, end));
        start = end;
    }
    out
}
