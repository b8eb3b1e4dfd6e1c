//! Characters of the compact classical groups, closed-form Cauchy kernels
//! `Σ_λ z^{|λ|} χ_λ(g) χ_λ(h)`, a brute-force truncated-series oracle for
//! them, Haar samplers, and goodness-of-fit tests for uniformity built on
//! the kernels.

pub mod error;
pub mod findiff;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod parallel;
pub mod partitions;
pub mod sampling;
pub mod spectrum;
pub mod sum;
pub mod uniformity;
pub mod weyl;

pub use error::{Error, Result};
pub use kernels::{KernelParams, SoEvenNormalization};
pub use partitions::Partition;
pub use sampling::{Rotation3, RngStream};
pub use spectrum::{GroupTag, HalfSpectrum, UnitarySpectrum};
