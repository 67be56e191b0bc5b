//! Shared fixtures for the benchmarks.

use loewner_core::criteria::{CriterionKind, GridSpec, Subject};
use loewner_core::functions::bazilevic_construct;
use loewner_core::{AnalyticFunction, Complex64, LoewnerChain, PowerSeries};

/// A dense series with unit constant term and geometrically decaying tail.
pub fn decaying_series(order: usize) -> PowerSeries {
    let coeffs = (0..=order)
        .map(|n| Complex64::from_polar(0.6f64.powi(n as i32), 0.7 * n as f64))
        .collect();
    PowerSeries::new(coeffs).expect("finite coefficients")
}

/// The spirallike Koebe function of angle 0.5 with its disk criterion.
pub fn spiral_instance() -> (CriterionKind, Subject) {
    (
        CriterionKind::SpiralUk { alpha: 0.5 },
        Subject::Function(AnalyticFunction::spiral_koebe(0.5).expect("valid angle")),
    )
}

pub fn default_grid() -> GridSpec {
    GridSpec::default()
}

pub fn exponential_chain() -> LoewnerChain {
    let f = AnalyticFunction::spiral_koebe(0.5).expect("valid angle");
    LoewnerChain::exponential(f, Complex64::from_polar(1.0, -0.5)).expect("Re c > 0")
}

pub fn bazilevic_function() -> AnalyticFunction {
    let h = PowerSeries::from_real(&[1.0, 0.3]).expect("finite");
    bazilevic_construct(&AnalyticFunction::identity(), &h, 1.0, 0.5, 64).expect("valid type")
}
