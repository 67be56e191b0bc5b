//! Loewner chains with complex first coefficient, Becker extensions and the
//! univalence / quasiconformal-extension criteria built on them.
//!
//! The modules map onto the pipeline:
//!
//! * [`series`] truncated complex power series (Cauchy products, principal powers);
//! * [`functions`] normalized test functions `f(0) = 0, f'(0) = 1` and the Bazilevič integral;
//! * [`disks`] the disk families `U(k)` and `U(α, k)`;
//! * [`criteria`] grid sweeps of the univalence / extension criteria;
//! * [`chains`] five explicit Loewner chains and their verification;
//! * [`extension`] Becker's extension and its Beltrami coefficient;
//! * [`oracle`] one-sided numerical univalence falsification.

pub mod chains;
pub mod criteria;
pub mod disks;
mod error;
pub mod extension;
pub mod functions;
pub mod oracle;
mod quadrature;
pub mod report;
pub mod sampling;
pub mod series;

pub use chains::{ChainPoint, ChainReport, ChainVariant, LoewnerChain, NormalizedChain};
pub use criteria::{CriterionKind, CriterionReport, GridSpec, Subject};
pub use disks::DiskSpec;
pub use error::{Error, Result};
pub use extension::{BeckerExtension, BeltramiSample, DilatationReport};
pub use functions::{AnalyticFunction, Derivatives, FunctionKind};
pub use oracle::{HolomorphicMap, UnivalenceVerdict};
pub use series::PowerSeries;

pub use num_complex::Complex64;

/// Shorthand for `Complex64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
