use std::f64::consts::TAU;

use loewner_core::chains::ChainVariant;
use loewner_core::criteria::{evaluate_criterion, CriterionKind, GridSpec, Subject};
use loewner_core::extension::DEFAULT_RADII;
use loewner_core::functions::bazilevic_construct;
use loewner_core::{c64, AnalyticFunction, BeckerExtension, Complex64, LoewnerChain, PowerSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{catalog_chains, random_point};

/// Exterior samples with `r` log-uniform in `[1.01, 20]`, keeping clear of
/// the rays through boundary singularities of the chain at time `log r`.
fn exterior_samples(ext: &BeckerExtension, rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = (rng.gen_range(1.01f64.ln()..20f64.ln())).exp();
        let theta = rng.gen_range(0.0..TAU);
        let near = ext.chain().singular_angles(r.ln()).iter().any(|&a| {
            let d = (theta - a).rem_euclid(TAU);
            d.min(TAU - d) < 0.05
        });
        if !near {
            out.push((r, theta));
        }
    }
    out
}

#[test]
fn finite_difference_beltrami_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for ch in catalog_chains() {
        let label = ch.label();
        let ext = BeckerExtension::new(ch);
        let mut worst = 0.0f64;
        for (r, theta) in exterior_samples(&ext, &mut rng, 200) {
            let closed = ext.beltrami_closed(r, theta).unwrap();
            let fd = ext.beltrami_fd(r, theta, 1e-4).unwrap();
            worst = worst.max((fd - closed).norm());
        }
        assert!(worst <= 1e-6, "{label}: {worst}");
    }
}

#[test]
fn exponential_identity_has_constant_modulus() {
    for alpha in [0.2, 0.5, 1.0] {
        let ch = LoewnerChain::exponential(
            AnalyticFunction::identity(),
            Complex64::from_polar(1.0, -alpha),
        )
        .unwrap();
        let rep = BeckerExtension::new(ch)
            .dilatation_report(&DEFAULT_RADII, 180)
            .unwrap();
        let expected = (0.5 * alpha).tan();
        for s in &rep.samples {
            assert!(
                (s.modulus - expected).abs() <= 1e-10,
                "alpha {alpha}: {}",
                s.modulus
            );
        }
        assert!(rep.excluded.is_empty());
    }
}

#[test]
fn extension_is_conformal_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for ch in catalog_chains() {
        let label = ch.label();
        let ext = BeckerExtension::new(ch);
        for _ in 0..50 {
            let z = random_point(&mut rng, 0.6);
            let fzbar = ext.interior_fzbar(z, 1e-5).unwrap();
            assert!(fzbar.norm() < 1e-7, "{label} at {z}: {}", fzbar.norm());
        }
    }
}

#[test]
fn extension_is_continuous_across_the_circle() {
    for ch in catalog_chains() {
        let label = ch.label();
        let ext = BeckerExtension::new(ch).with_boundary_radius(0.9).unwrap();
        for j in 0..16 {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / 16.0);
            let inner = ext.eval(u * (1.0 - 1e-9)).unwrap();
            let outer = ext.eval(u * (1.0 + 1e-9)).unwrap();
            assert!(
                (inner - outer).norm() < 1e-6 * (1.0 + inner.norm()),
                "{label}"
            );
        }
    }
}

fn quasiconformal_instances() -> Vec<(CriterionKind, Subject)> {
    let spiral = AnalyticFunction::spiral_koebe(0.5).unwrap();
    let h = PowerSeries::from_real(&[1.0, 0.3]).unwrap();
    let bazilevic = bazilevic_construct(&AnalyticFunction::identity(), &h, 1.0, 0.5, 64).unwrap();
    vec![
        (
            CriterionKind::StarlikeTilted { alpha: 0.5 },
            Subject::Function(spiral.clone()),
        ),
        (
            CriterionKind::StarlikeTilted { alpha: 0.0 },
            Subject::Function(AnalyticFunction::koebe()),
        ),
        (
            CriterionKind::SpiralUk { alpha: 0.5 },
            Subject::Function(spiral),
        ),
        (
            CriterionKind::Bazilevic1 {
                alpha: 1.0,
                beta: 0.5,
            },
            Subject::Function(bazilevic),
        ),
        (
            CriterionKind::Bazilevic2 {
                alpha: 1.0,
                beta: 0.0,
            },
            Subject::Pair {
                g: AnalyticFunction::koebe(),
                h: PowerSeries::one(64),
            },
        ),
        (
            CriterionKind::Bazilevic2 {
                alpha: 1.0,
                beta: 0.2,
            },
            Subject::Pair {
                g: AnalyticFunction::identity(),
                h: PowerSeries::from_real(&[1.0, 0.4]).unwrap().truncate(64),
            },
        ),
    ]
}

#[test]
fn dilatation_never_exceeds_the_criterion_bound() {
    for (kind, subject) in quasiconformal_instances() {
        for rho in [0.5, 0.9] {
            let grid = GridSpec::up_to(rho, 256, Some(8)).unwrap();
            let crit = evaluate_criterion(&kind, &subject, &grid).unwrap();
            let k = crit.min_dilatation.unwrap();
            let ch = LoewnerChain::for_criterion(&kind, &subject, 64)
                .unwrap()
                .unwrap();
            let rep = BeckerExtension::new(ch)
                .with_boundary_radius(rho)
                .unwrap()
                .dilatation_report(&DEFAULT_RADII, 256)
                .unwrap();
            assert!(
                rep.sup_modulus <= k + 1e-9,
                "{} on {} at rho {rho}: sup |mu| {} > k {k}",
                kind.name(),
                subject.label(),
                rep.sup_modulus
            );
        }
    }
}

#[test]
fn spirallike_chain_bound_uses_the_rotated_point() {
    let ch = LoewnerChain::spirallike_standard(AnalyticFunction::spiral_koebe(0.4).unwrap(), 0.4)
        .unwrap();
    assert!(matches!(
        ch.variant(),
        ChainVariant::SpirallikeStandard { .. }
    ));
    let ext = BeckerExtension::new(ch).with_boundary_radius(0.7).unwrap();
    for j in 0..32 {
        let theta = TAU * j as f64 / 32.0;
        for r in [1.5, 4.0] {
            // For the matching spiral Koebe function the pointwise minimal k is |ζ| = ρ everywhere.
            let mu = ext.beltrami_closed(r, theta).unwrap();
            assert!((mu.norm() - 0.7).abs() <= 1e-12, "{}", mu.norm());
        }
    }
    assert!(ext.beltrami_closed(0.5, 0.0).is_err());
    assert!(BeckerExtension::new(
        LoewnerChain::exponential(AnalyticFunction::identity(), c64(1.0, 0.0)).unwrap()
    )
    .with_boundary_radius(1.5)
    .is_err());
}
