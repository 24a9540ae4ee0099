//! Dense complex matrices used throughout: the measurement matrix, the
//! sparsity basis and small Hermitian Gram blocks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::platform::SupportSet;

/// Default tolerance on `‖CCᴴ − I‖_F` for a matrix to count as tight.
pub const TIGHTNESS_TOLERANCE: f64 = 1e-9;

/// Whether a matrix carries genuinely complex entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// An `m × N` complex matrix stored row-major.
///
/// Columns are the frame vectors `c_i`; rows are the measurement functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl MeasurementMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols < rows {
            return Err(Error::InvalidDims(format!(
                "need 1 <= m <= N, got m={rows}, N={cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Builds a matrix from a list of columns, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        for col in columns {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
        }
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("identity dimensions are valid")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn field(&self) -> Field {
        if self.data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn is_real(&self) -> bool {
        self.field() == Field::Real
    }

    /// `⟨c_i, c_j⟩ = c_iᴴ c_j`.
    pub fn column_inner(&self, i: usize, j: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.rows {
            acc += self.get(r, i).conj() * self.get(r, j);
        }
        acc
    }

    /// The full `N × N` Gram matrix `CᴴC`.
    pub fn gram(&self) -> HermitianMatrix {
        let n = self.cols;
        let mut g = HermitianMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = self.column_inner(i, j);
                if i == j {
                    g.set(i, i, Complex64::new(v.re, 0.0));
                } else {
                    g.set(i, j, v);
                    g.set(j, i, v.conj());
                }
            }
        }
        g
    }

    /// `CCᴴ` as an `m × m` Hermitian matrix.
    pub fn frame_operator(&self) -> HermitianMatrix {
        let m = self.rows;
        let mut s = HermitianMatrix::zeros(m);
        for a in 0..m {
            for b in a..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..self.cols {
                    acc += self.get(a, c) * self.get(b, c).conj();
                }
                if a == b {
                    s.set(a, a, Complex64::new(acc.re, 0.0));
                } else {
                    s.set(a, b, acc);
                    s.set(b, a, acc.conj());
                }
            }
        }
        s
    }

    /// `C x` for a length-`N` vector.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// Matrix with columns permuted so that column `j` of the result is
    /// column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: perm.len(),
            });
        }
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, perm[c]))
    }
}

/// The `k × k` Gram block `C_Tᴴ C_T` for a platform `T`.
pub fn gram_submatrix(c: &MeasurementMatrix, t: &SupportSet) -> Result<HermitianMatrix> {
    let idx = t.indices();
    if let Some(&bad) = idx.iter().find(|&&i| i >= c.cols()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: c.cols(),
        });
    }
    let k = idx.len();
    let mut g = HermitianMatrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let v = c.column_inner(idx[a], idx[b]);
            if a == b {
                g.set(a, a, Complex64::new(v.re, 0.0));
            } else {
                g.set(a, b, v);
                g.set(b, a, v.conj());
            }
        }
    }
    Ok(g)
}

/// `‖CCᴴ − I‖_F`.
pub fn tightness_defect(c: &MeasurementMatrix) -> f64 {
    let s = c.frame_operator();
    let m = s.dim();
    let mut acc = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut v = s.get(a, b);
            if a == b {
                v -= 1.0;
            }
            acc += v.norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn column_norms(c: &MeasurementMatrix) -> Vec<f64> {
    (0..c.cols())
        .map(|j| {
            (0..c.rows())
                .map(|r| c.get(r, j).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `max_i ‖c_i‖ − min_i ‖c_i‖`.
pub fn column_norm_spread(c: &MeasurementMatrix) -> f64 {
    let norms = column_norms(c);
    let max = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// An orthonormal basis `Ψ` of the signal space; signals are `s = Ψθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityBasis {
    dim: usize,
    data: Vec<Complex64>,
}

impl SparsityBasis {
    pub const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let basis = Self { dim, data };
        let defect = basis.orthonormality_defect();
        if defect > Self::ORTHONORMAL_TOLERANCE {
            return Err(Error::Domain(format!(
                "basis columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(basis)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            data: MeasurementMatrix::identity(dim).data,
        }
    }

    /// The permutation basis with `Ψ e_j = e_{perm[j]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for (j, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, len: n });
            }
            data[p * n + j] = Complex64::new(1.0, 0.0);
        }
        Self::new(n, data)
    }

    /// A Haar-like random orthonormal basis from Gram-Schmidt on a Gaussian matrix.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        crate::linalg::orthonormalize(&mut cols);
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[r * dim + j] = *v;
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// `‖ΨᴴΨ − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut v: Complex64 = (0..n).map(|r| self.get(r, a).conj() * self.get(r, b)).sum();
                if a == b {
                    v -= 1.0;
                }
                acc += v.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `s = Ψθ`.
    pub fn synthesize(&self, theta: &[Complex64]) -> Result<Vec<Complex64>> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: theta.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * theta[c]).sum())
            .collect())
    }
}

/// `Φ = CΨᴴ`, so that `ΦΨ = C` and `ΦΦᴴ = CCᴴ`.
pub fn apply_basis(c: &MeasurementMatrix, psi: &SparsityBasis) -> Result<MeasurementMatrix> {
    if psi.dim() != c.cols() {
        return Err(Error::DimensionMismatch {
            expected: c.cols(),
            got: psi.dim(),
        });
    }
    let n = c.cols();
    MeasurementMatrix::from_fn(c.rows(), n, |r, j| {
        (0..n).map(|l| c.get(r, l) * psi.get(j, l).conj()).sum()
    })
}

/// A small dense Hermitian matrix, stored row-major with both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Wraps row-major data without checking symmetry; see [`Self::symmetry_defect`].
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.n + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Largest `|G_ab − conj(G_ba)|` over all entries.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.n {
            for b in a..self.n {
                worst = worst.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        worst
    }

    /// The principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> HermitianMatrix {
        let k = idx.len();
        let mut out = HermitianMatrix::zeros(k);
        for a in 0..k {
            for b in 0..k {
                out.set(a, b, self.get(idx[a], idx[b]));
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }
}
