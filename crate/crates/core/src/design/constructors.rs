use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::read_frame;
use crate::linalg::orthonormalize;
use crate::matrix::{column_norms, tightness_defect, MeasurementMatrix, TIGHTNESS_TOLERANCE};

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::InvalidDims(format!("need 1 <= m <= N, got m={m}, N={n}")));
    }
    Ok(())
}

/// A real matrix with i.i.d. `N(0, 1/m)` entries whose rows are then
/// orthonormalized (the row space is Haar distributed).
pub fn random_right_orthogonal(m: usize, n: usize, seed: u64) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let mut rows: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(scale * rng.sample::<f64, _>(StandardNormal), 0.0))
                .collect()
        })
        .collect();
    orthonormalize(&mut rows);
    MeasurementMatrix::from_fn(m, n, |r, c| rows[r][c])
}

/// `[I_m | 0]`.
pub fn orthonormal_columns_padded(m: usize, n: usize) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    MeasurementMatrix::from_fn(m, n, |r, c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0))
}

/// The `m + 1` vertices of a regular simplex as an `m × (m + 1)` uniform
/// tight frame. Rows are the Helmert basis of the complement of the all-ones
/// vector, so `CCᵀ = I` and `CᵀC = I − 11ᵀ/(m + 1)`.
pub fn simplex_etf(m: usize) -> MeasurementMatrix {
    let n = m + 1;
    MeasurementMatrix::from_fn(m, n, |r, c| {
        let r1 = (r + 1) as f64;
        let norm = (r1 * (r1 + 1.0)).sqrt();
        let v = if c <= r {
            1.0
        } else if c == r + 1 {
            -r1
        } else {
            0.0
        };
        Complex64::new(v / norm, 0.0)
    })
    .expect("simplex dimensions are valid")
}

/// Rows `rows` of the `N`-point Fourier matrix, scaled by `1/√N`.
pub fn partial_dft_frame(m: usize, n: usize, rows: &[usize]) -> Result<MeasurementMatrix> {
    check_dims(m, n)?;
    if rows.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: rows.len(),
        });
    }
    let mut seen = HashSet::new();
    for &r in rows {
        if r >= n {
            return Err(Error::IndexOutOfRange { index: r, len: n });
        }
        if !seen.insert(r) {
            return Err(Error::DuplicateRows(r));
        }
    }
    let scale = 1.0 / (n as f64).sqrt();
    MeasurementMatrix::from_fn(m, n, |i, j| {
        let phase = (rows[i] * j) % n;
        if phase == 0 {
            Complex64::new(scale, 0.0)
        } else {
            Complex64::from_polar(scale, -2.0 * PI * phase as f64 / n as f64)
        }
    })
}

/// The six diagonals of the icosahedron: the real equiangular tight frame of
/// six lines in `R³` with `|cos α| = 1/√5`.
pub fn icosahedral_lines() -> MeasurementMatrix {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let vecs: [[f64; 3]; 6] = [
        [0.0, 1.0, phi],
        [0.0, -1.0, phi],
        [1.0, phi, 0.0],
        [-1.0, phi, 0.0],
        [phi, 0.0, 1.0],
        [phi, 0.0, -1.0],
    ];
    let scale = (0.5 / (1.0 + phi * phi)).sqrt();
    MeasurementMatrix::from_fn(3, 6, |r, c| Complex64::new(vecs[c][r] * scale, 0.0))
        .expect("fixed dimensions")
}

/// An imported packing rescaled to column norms `√(m/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedPacking {
    pub matrix: MeasurementMatrix,
    pub tightness_defect: f64,
    /// Catalog packings need not be tight; this only reports it.
    pub tight: bool,
}

/// Reads a frame file (either layout) and rescales every column to `√(m/N)`.
/// With `expected = Some((m, N))` the file must have those dimensions.
pub fn import_packing(path: &Path, expected: Option<(usize, usize)>) -> Result<ImportedPacking> {
    let raw = read_frame(path)?.into_matrix();
    if let Some((m, n)) = expected {
        if raw.rows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: raw.rows(),
            });
        }
        if raw.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: raw.cols(),
            });
        }
    }
    let target = (raw.rows() as f64 / raw.cols() as f64).sqrt();
    let norms = column_norms(&raw);
    if let Some(index) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroColumn { index });
    }
    let matrix = MeasurementMatrix::from_fn(raw.rows(), raw.cols(), |r, c| raw.get(r, c) * (target / norms[c]))?;
    let defect = tightness_defect(&matrix);
    Ok(ImportedPacking {
        matrix,
        tightness_defect: defect,
        tight: defect <= TIGHTNESS_TOLERANCE,
    })
}
