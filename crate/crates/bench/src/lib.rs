//! Fixed inputs shared by the benchmarks.

use cmdesign::design::{project_to_utf, random_right_orthogonal};
use cmdesign::{DesignConfig, HermitianMatrix, MeasurementMatrix};
use num_complex::Complex64;

/// A seeded uniform tight frame.
pub fn utf(m: usize, n: usize, seed: u64) -> MeasurementMatrix {
    let start = random_right_orthogonal(m, n, seed).expect("valid dimensions");
    project_to_utf(&start, &DesignConfig::default())
        .expect("full-rank start")
        .matrix
}

/// A dense complex Hermitian matrix with a fixed deterministic pattern.
pub fn hermitian(k: usize) -> HermitianMatrix {
    let mut g = HermitianMatrix::zeros(k);
    for i in 0..k {
        g.set(i, i, Complex64::new(1.0 + i as f64 * 0.1, 0.0));
        for j in (i + 1)..k {
            let v = Complex64::new(((i * 7 + j * 3) as f64).sin() * 0.2, ((i + 2 * j) as f64).cos() * 0.1);
            g.set(i, j, v);
            g.set(j, i, v.conj());
        }
    }
    g
}
