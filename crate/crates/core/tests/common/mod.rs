#![allow(dead_code)]

use loewner_core::functions::bazilevic_construct;
use loewner_core::{c64, AnalyticFunction, Complex64, LoewnerChain, PowerSeries};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One chain of each variant whose hypotheses hold, so every chain condition
/// and every dilatation bound is expected to pass.
pub fn hypothesis_chains() -> Vec<LoewnerChain> {
    let spiral = AnalyticFunction::spiral_koebe(0.5).unwrap();
    let h = PowerSeries::from_real(&[1.0, 0.3]).unwrap();
    let bazilevic = bazilevic_construct(&AnalyticFunction::identity(), &h, 1.0, 0.5, 64).unwrap();
    vec![
        LoewnerChain::convex_combination(AnalyticFunction::half_plane(), c64(0.5, 0.45)).unwrap(),
        LoewnerChain::spirallike_standard(spiral.clone(), 0.5).unwrap(),
        LoewnerChain::exponential(spiral, Complex64::from_polar(1.0, -0.5)).unwrap(),
        LoewnerChain::sheil_small(bazilevic, 1.0, 0.5).unwrap(),
        LoewnerChain::bazilevic_integral(
            AnalyticFunction::koebe(),
            PowerSeries::one(64),
            1.0,
            0.0,
            64,
        )
        .unwrap(),
    ]
}

/// The five variants on simple closed-form subjects (used where only the
/// Beltrami identity matters, not the dilatation bound).
pub fn catalog_chains() -> Vec<LoewnerChain> {
    let spiral = AnalyticFunction::spiral_koebe(0.5).unwrap();
    vec![
        LoewnerChain::convex_combination(AnalyticFunction::half_plane(), c64(0.5, 0.45)).unwrap(),
        LoewnerChain::spirallike_standard(spiral.clone(), 0.5).unwrap(),
        LoewnerChain::exponential(spiral, Complex64::from_polar(1.0, -0.5)).unwrap(),
        LoewnerChain::sheil_small(AnalyticFunction::half_plane(), 1.0, 0.5).unwrap(),
        LoewnerChain::bazilevic_integral(
            AnalyticFunction::koebe(),
            PowerSeries::one(64),
            1.0,
            0.0,
            64,
        )
        .unwrap(),
    ]
}

pub fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    Complex64::from_polar(
        r_max * rng.gen::<f64>().sqrt(),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}
