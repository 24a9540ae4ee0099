//! Design and evaluation of compressive measurement matrices for detecting
//! sparse signals in white Gaussian noise.
//!
//! A measurement matrix `C` (`m × N`, `m ≤ N`) is scored by the smallest
//! eigenvalue of `C_Tᴴ C_T` over `k`-column platforms `T`, in the worst case
//! and on average. [`design`] builds uniform tight frames that make those
//! criteria large, [`metrics`] evaluates them and the related bounds, and
//! [`detect`] ties them to detection probability.

pub mod design;
pub mod detect;
pub mod eigen;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod platform;

pub use error::{Error, Result};
pub use matrix::{HermitianMatrix, MeasurementMatrix, SparsityBasis};
pub use platform::{SparseVector, SupportSet};
pub use design::{DesignConfig, DesignResult, Target};
pub use detect::{DetectionResult, DetectionSetup};
pub use metrics::{BoundSheet, FrameReport, WorstCase};
