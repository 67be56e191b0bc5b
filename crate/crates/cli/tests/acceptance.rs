//! End-to-end acceptance suite. Each criterion prints one `[PASS]` or
//! `[FAIL]` line with the measured quantity and its pinned tolerance; the
//! test fails if any criterion does.
//!
//! Run with `cargo test -p loewner-cli --test acceptance -- --nocapture` to
//! see the lines.

use std::f64::consts::TAU;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use loewner_core::chains::{normalize_chain, verify_chain, DEFAULT_TIMES};
use loewner_core::criteria::{
    convex_combination, evaluate_criterion, CriterionKind, GridSpec, Subject,
};
use loewner_core::extension::DEFAULT_RADII;
use loewner_core::functions::bazilevic_construct;
use loewner_core::oracle::{injectivity_falsifier, univalence_scan, winding_count, MapFn};
use loewner_core::{c64, AnalyticFunction, BeckerExtension, Complex64, LoewnerChain, PowerSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BELTRAMI_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-4;
const BELTRAMI_SAMPLES: usize = 200;
const BELTRAMI_BUDGET: Duration = Duration::from_secs(10);
const FLOOR_TOL: f64 = 1e-10;
const KOEBE_TOL: f64 = 1e-10;
const BAZILEVIC_TOL: f64 = 1e-10;
const BAZILEVIC_DEGREE: usize = 30;
const CHAIN_BUDGET: Duration = Duration::from_secs(30);
const NORMALIZATION_TOL: f64 = 1e-10;
const ORACLE_RADIUS: f64 = 0.95;
const ORACLE_SAMPLES: usize = 10_000;
const BOUND_TOL: f64 = 1e-9;
const SERIES_ORDER: usize = 16;
const CONVOLUTION_TOL: f64 = 1e-14;
const RECIPROCAL_TOL: f64 = 1e-12;
const POWER_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn spiral() -> AnalyticFunction {
    AnalyticFunction::spiral_koebe(0.5).unwrap()
}

fn bazilevic_subject() -> AnalyticFunction {
    let h = PowerSeries::from_real(&[1.0, 0.3]).unwrap();
    bazilevic_construct(&AnalyticFunction::identity(), &h, 1.0, 0.5, 64).unwrap()
}

fn bazilevic_integral_chain() -> LoewnerChain {
    LoewnerChain::bazilevic_integral(
        AnalyticFunction::koebe(),
        PowerSeries::one(64),
        1.0,
        0.0,
        64,
    )
    .unwrap()
}

/// The five variants on the subjects named for the Beltrami identity.
fn beltrami_chains() -> Vec<LoewnerChain> {
    vec![
        LoewnerChain::convex_combination(AnalyticFunction::half_plane(), c64(0.5, 0.45)).unwrap(),
        LoewnerChain::spirallike_standard(spiral(), 0.5).unwrap(),
        LoewnerChain::exponential(spiral(), Complex64::from_polar(1.0, -0.5)).unwrap(),
        LoewnerChain::sheil_small(AnalyticFunction::half_plane(), 1.0, 0.5).unwrap(),
        bazilevic_integral_chain(),
    ]
}

/// The five variants on subjects that satisfy every chain hypothesis.
fn hypothesis_chains() -> Vec<LoewnerChain> {
    vec![
        LoewnerChain::convex_combination(AnalyticFunction::half_plane(), c64(0.5, 0.45)).unwrap(),
        LoewnerChain::spirallike_standard(spiral(), 0.5).unwrap(),
        LoewnerChain::exponential(spiral(), Complex64::from_polar(1.0, -0.5)).unwrap(),
        LoewnerChain::sheil_small(bazilevic_subject(), 1.0, 0.5).unwrap(),
        bazilevic_integral_chain(),
    ]
}

fn beltrami_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for ch in beltrami_chains() {
        let ext = BeckerExtension::new(ch);
        let mut taken = 0;
        while taken < BELTRAMI_SAMPLES {
            let r = rng.gen_range(1.01f64.ln()..20f64.ln()).exp();
            let theta = rng.gen_range(0.0..TAU);
            let near_singularity = ext.chain().singular_angles(r.ln()).iter().any(|&a| {
                let d = (theta - a).rem_euclid(TAU);
                d.min(TAU - d) < 0.05
            });
            if near_singularity {
                continue;
            }
            let closed = ext.beltrami_closed(r, theta).map_err(err)?;
            let fd = ext.beltrami_fd(r, theta, FD_STEP).map_err(err)?;
            let diff = (fd - closed).norm();
            ensure(diff <= BELTRAMI_TOL, || {
                format!(
                    "{} at r = {r}, theta = {theta}: |mu_fd - mu| = {diff:e}",
                    ext.chain().label()
                )
            })?;
            worst = worst.max(diff);
            taken += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < BELTRAMI_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max |mu_fd - mu| = {worst:.2e} <= {BELTRAMI_TOL:e} over 5 x {BELTRAMI_SAMPLES} samples in {elapsed:.2?}"
    ))
}

fn dilatation_floor() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.2f64, 0.5, 1.0] {
        let ch = LoewnerChain::exponential(
            AnalyticFunction::identity(),
            Complex64::from_polar(1.0, -alpha),
        )
        .map_err(err)?;
        let rep = BeckerExtension::new(ch)
            .dilatation_report(&DEFAULT_RADII, 360)
            .map_err(err)?;
        let expected = (alpha / 2.0).tan();
        ensure(!rep.samples.is_empty(), || "no samples".into())?;
        for s in &rep.samples {
            worst = worst.max((s.modulus - expected).abs());
        }
    }
    ensure(worst <= FLOOR_TOL, || {
        format!("max ||mu| - tan(alpha/2)| = {worst:e}")
    })?;
    Ok(format!(
        "max ||mu| - tan(alpha/2)| = {worst:.2e} <= {FLOOR_TOL:e}"
    ))
}

fn koebe_minimal_dilatation() -> Outcome {
    let base = GridSpec::default();
    let mut worst = 0.0f64;
    for r in [0.5, 0.9, 0.99] {
        let grid = GridSpec::up_to(r, base.angles_per_circle(), base.refinement()).map_err(err)?;
        let rep = evaluate_criterion(
            &CriterionKind::StarlikeTilted { alpha: 0.0 },
            &Subject::Function(AnalyticFunction::koebe()),
            &grid,
        )
        .map_err(err)?;
        let k = rep.min_dilatation.ok_or("no min_dilatation")?;
        worst = worst.max((k - r).abs());
    }
    ensure(worst <= KOEBE_TOL, || format!("max |k - r| = {worst:e}"))?;
    Ok(format!("max |k - r| = {worst:.2e} <= {KOEBE_TOL:e}"))
}

fn bazilevic_constructor() -> Outcome {
    let f = bazilevic_construct(
        &AnalyticFunction::koebe(),
        &PowerSeries::one(BAZILEVIC_DEGREE),
        1.0,
        0.0,
        BAZILEVIC_DEGREE,
    )
    .map_err(err)?;
    let s = f.taylor_series(BAZILEVIC_DEGREE).map_err(err)?;
    let one = c64(1.0, 0.0);
    let worst = (1..=BAZILEVIC_DEGREE)
        .map(|n| (s.coeff(n) - one).norm())
        .fold(s.coeff(0).norm(), f64::max);
    ensure(worst <= BAZILEVIC_TOL, || {
        format!("max |c_n - 1| = {worst:e}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let (alpha, beta) = (rng.gen_range(0.05..4.0), rng.gen_range(-3.0..3.0));
        let f = bazilevic_construct(
            &AnalyticFunction::identity(),
            &PowerSeries::one(BAZILEVIC_DEGREE),
            alpha,
            beta,
            BAZILEVIC_DEGREE,
        )
        .map_err(err)?;
        let s = f.taylor_series(BAZILEVIC_DEGREE).map_err(err)?;
        let exact =
            (0..=BAZILEVIC_DEGREE).all(|n| s.coeff(n) == if n == 1 { one } else { c64(0.0, 0.0) });
        ensure(exact, || {
            format!(
                "g = z with (alpha, beta) = ({alpha}, {beta}) gave {:?}",
                s.coeffs()
            )
        })?;
    }
    Ok(format!(
        "Koebe -> z/(1-z): max |c_n - 1| = {worst:.2e} <= {BAZILEVIC_TOL:e} to degree {BAZILEVIC_DEGREE}; g = z gives f = z exactly for 5 random (alpha, beta)"
    ))
}

fn chain_verification() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut least_margin = f64::INFINITY;
    for ch in hypothesis_chains() {
        let rep = verify_chain(&ch, &grid, &DEFAULT_TIMES, None).map_err(err)?;
        ensure(rep.herglotz_margin > 0.0, || {
            format!("{}: herglotz margin {}", ch.label(), rep.herglotz_margin)
        })?;
        ensure(rep.a1_monotone, || {
            format!("{}: |a1| not monotone", ch.label())
        })?;
        ensure(rep.subordination_violations.is_empty(), || {
            format!(
                "{}: {} subordination violations",
                ch.label(),
                rep.subordination_violations.len()
            )
        })?;
        least_margin = least_margin.min(rep.herglotz_margin);
    }
    let negative =
        LoewnerChain::convex_combination(AnalyticFunction::koebe(), c64(0.5, 0.0)).map_err(err)?;
    let rep = verify_chain(&negative, &grid, &DEFAULT_TIMES, None).map_err(err)?;
    let (z, t, p) = rep.herglotz_witness;
    ensure(p.re < 0.0, || format!("negative instance: witness p = {p}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < CHAIN_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "5 chains pass (least herglotz margin {least_margin:.3e}); convex combination on Koebe has Re p({z:.4}, {t}) = {:.3e} < 0; {elapsed:.2?}",
        p.re
    ))
}

fn normalization() -> Outcome {
    let mut worst = 0.0f64;
    for ch in hypothesis_chains() {
        for t in [0.0f64, 0.5, 1.0, 2.0] {
            let n = normalize_chain(&ch, t).map_err(err)?;
            let d = n.derivative_at_origin().map_err(err)?;
            let e = (d - t.exp()).norm();
            ensure(e <= NORMALIZATION_TOL, || {
                format!("{} at t = {t}: |h'(0) - e^t| = {e:e}", ch.label())
            })?;
            worst = worst.max(e);
        }
    }
    Ok(format!(
        "max |h'(0, t) - e^t| = {worst:.2e} <= {NORMALIZATION_TOL:e}"
    ))
}

fn univalence_oracle() -> Outcome {
    let grid = GridSpec::up_to(ORACLE_RADIUS, 128, None).map_err(err)?;
    for j in 0..20 {
        let rho = if j % 2 == 0 {
            1.0
        } else {
            ((j + 1) as f64 / 21.0).sqrt()
        };
        let phi = TAU * (0.618_033_988_75 * j as f64).fract();
        let alpha = (Complex64::from_polar(rho, phi) + 1.0) * 0.5;
        let (g, _) =
            convex_combination(&AnalyticFunction::half_plane(), alpha, &grid).map_err(err)?;
        let v = univalence_scan(&g, ORACLE_RADIUS, ORACLE_SAMPLES, 2048, 3).map_err(err)?;
        ensure(!v.falsified, || {
            format!("alpha = {alpha} falsified: {:?}", v.witness)
        })?;
    }

    let bad = AnalyticFunction::polynomial(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.5, 0.0)])
        .map_err(err)?;
    let v = univalence_scan(&bad, 0.9, 2000, 2048, 1).map_err(err)?;
    ensure(v.falsified, || "z + 1.5 z^2 not falsified".into())?;

    let square = MapFn(|z: Complex64| (z * z, 2.0 * z));
    let v = injectivity_falsifier(&square, 0.9, 4000, None, None, 0).map_err(err)?;
    let w = v.witness.ok_or("z^2 not falsified")?;
    ensure((w.z1 + w.z2).norm() < 1e-8, || {
        format!("z^2 witness not symmetric: {} {}", w.z1, w.z2)
    })?;

    let koebe = AnalyticFunction::koebe();
    let counts = [
        winding_count(&koebe, c64(0.0, 0.0), 0.5, 2048).map_err(err)?,
        winding_count(&koebe, c64(-10.0, 0.0), 0.5, 2048).map_err(err)?,
        winding_count(&square, c64(0.25, 0.0), 0.9, 2048).map_err(err)?,
    ];
    ensure(counts == [1, 0, 2], || format!("winding counts {counts:?}"))?;
    Ok(format!(
        "20 convex combinations not falsified at r = {ORACLE_RADIUS} ({ORACLE_SAMPLES} samples); z + 1.5z^2 falsified; z^2 witness {:.4} / {:.4}; counts {counts:?}",
        w.z1, w.z2
    ))
}

fn bound_transfer() -> Outcome {
    let instances = vec![
        (
            CriterionKind::StarlikeTilted { alpha: 0.5 },
            Subject::Function(spiral()),
        ),
        (
            CriterionKind::StarlikeTilted { alpha: 0.0 },
            Subject::Function(AnalyticFunction::koebe()),
        ),
        (
            CriterionKind::SpiralUk { alpha: 0.5 },
            Subject::Function(spiral()),
        ),
        (
            CriterionKind::Bazilevic1 {
                alpha: 1.0,
                beta: 0.5,
            },
            Subject::Function(bazilevic_subject()),
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
    ];
    let mut tightest = f64::NEG_INFINITY;
    for (kind, subject) in &instances {
        for rho in [0.5, 0.9] {
            let grid = GridSpec::up_to(rho, 256, Some(8)).map_err(err)?;
            let crit = evaluate_criterion(kind, subject, &grid).map_err(err)?;
            ensure(crit.passed, || {
                format!("{} on {} fails its criterion", kind.name(), subject.label())
            })?;
            let k = crit.min_dilatation.ok_or("no min_dilatation")?;
            let ch = LoewnerChain::for_criterion(kind, subject, 64)
                .map_err(err)?
                .ok_or("no chain for a disk criterion")?;
            let rep = BeckerExtension::new(ch)
                .with_boundary_radius(rho)
                .and_then(|e| e.dilatation_report(&DEFAULT_RADII, 256))
                .map_err(err)?;
            ensure(rep.sup_modulus <= k + BOUND_TOL, || {
                format!(
                    "{} on {} at rho = {rho}: sup |mu| = {} > k = {k}",
                    kind.name(),
                    subject.label(),
                    rep.sup_modulus
                )
            })?;
            tightest = tightest.max(rep.sup_modulus - k);
        }
    }
    Ok(format!(
        "{} instances x 2 radii: max (sup |mu| - k) = {tightest:.2e} <= {BOUND_TOL:e}",
        instances.len()
    ))
}

/// Uniform coefficients in the unit square, or, with `unit`, a series with
/// `c_0 = 1` and `|c_n| < 2^-n`, which has no zeros on the closed disk.
fn random_series(rng: &mut ChaCha8Rng, unit: bool) -> PowerSeries {
    let coeffs = (0..=SERIES_ORDER)
        .map(|n| {
            if !unit {
                return c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            if n == 0 {
                return c64(1.0, 0.0);
            }
            let r = 0.5f64.powi(n as i32) * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..TAU))
        })
        .collect();
    PowerSeries::new(coeffs).unwrap()
}

fn max_diff(a: &PowerSeries, b: &PowerSeries) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn series_engine() -> Outcome {
    let n = SERIES_ORDER;
    let one = PowerSeries::one(n);
    let z = PowerSeries::variable(n);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut conv, mut recip, mut pow_rt, mut additive) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    let lhs = one
        .add(&z)
        .and_then(|a| a.multiply(&one.sub(&z)?))
        .map_err(err)?;
    let mut expected = vec![c64(0.0, 0.0); n + 1];
    expected[0] = c64(1.0, 0.0);
    expected[2] = c64(-1.0, 0.0);
    ensure(lhs.coeffs() == expected.as_slice(), || {
        "(1+z)(1-z) != 1 - z^2".into()
    })?;
    let geometric = one.sub(&z).and_then(|a| a.reciprocal()).map_err(err)?;
    ensure(
        geometric.coeffs().iter().all(|c| *c == c64(1.0, 0.0)),
        || "1/(1-z) is not geometric".into(),
    )?;
    let binomial = one
        .sub(&z)
        .and_then(|a| a.pow_principal(c64(-2.0, 0.0)))
        .map_err(err)?;
    let binomial_err = (0..=n)
        .map(|k| (binomial.coeff(k) - (k as f64 + 1.0)).norm())
        .fold(0.0, f64::max);
    ensure(binomial_err <= 1e-12, || {
        format!("(1-z)^-2 off by {binomial_err:e}")
    })?;

    for _ in 0..20 {
        let (a, b) = (
            random_series(&mut rng, false),
            random_series(&mut rng, false),
        );
        let product = a.multiply(&b).map_err(err)?;
        ensure(a.multiply(&one).map_err(err)? == a, || "a * 1 != a".into())?;
        for k in 0..=n {
            let mut direct = c64(0.0, 0.0);
            for j in 0..=k {
                direct += a.coeff(j) * b.coeff(k - j);
            }
            conv = conv.max((product.coeff(k) - direct).norm());
        }

        let u = random_series(&mut rng, true);
        let back = u.multiply(&u.reciprocal().map_err(err)?).map_err(err)?;
        recip = recip.max(max_diff(&back, &one));

        let gamma = c64(2.0, 1.0);
        let round = u
            .pow_principal(gamma.inv())
            .and_then(|v| v.pow_principal(gamma))
            .map_err(err)?;
        pow_rt = pow_rt.max(max_diff(&round, &u));

        let (g1, g2) = (
            c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        );
        let joint = u.pow_principal(g1 + g2).map_err(err)?;
        let split = u
            .pow_principal(g1)
            .and_then(|p| p.multiply(&u.pow_principal(g2)?))
            .map_err(err)?;
        additive = additive.max(
            max_diff(&joint, &split)
                / (1.0 + joint.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)),
        );
    }
    ensure(conv <= CONVOLUTION_TOL, || {
        format!("convolution error {conv:e}")
    })?;
    ensure(recip <= RECIPROCAL_TOL, || {
        format!("reciprocal round trip {recip:e}")
    })?;
    ensure(pow_rt <= POWER_TOL, || {
        format!("power round trip {pow_rt:e}")
    })?;
    ensure(additive <= POWER_TOL, || {
        format!("exponent additivity {additive:e}")
    })?;
    Ok(format!(
        "N = {n}: convolution {conv:.1e} <= {CONVOLUTION_TOL:e}, reciprocal {recip:.1e} <= {RECIPROCAL_TOL:e}, power round trip {pow_rt:.1e} and additivity {additive:.1e} <= {POWER_TOL:e}"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let spec = dir.path().join("spiral.spec");
    fs::write(
        &spec,
        "function = spiral-koebe:0.5\nkind = spiral\nalpha = 0.5\n",
    )
    .map_err(err)?;
    let run = |name: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_loewner"))
            .args([
                "check",
                spec.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .map_err(err)?;
        ensure(o.status.code() == Some(0), || {
            format!(
                "check exited with {:?}: {}",
                o.status.code(),
                String::from_utf8_lossy(&o.stderr)
            )
        })?;
        let report = fs::read(out.join("spiral.report")).map_err(err)?;
        Ok((o.stdout, report))
    };
    let (first, second) = (run("first")?, run("second")?);
    ensure(first == second, || "reports differ between runs".into())?;
    Ok(format!(
        "two check runs produced identical {}-byte reports",
        first.1.len()
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("Beltrami identity", beltrami_identity),
        ("dilatation floor", dilatation_floor),
        ("Koebe minimal dilatation", koebe_minimal_dilatation),
        ("Bazilevic constructor", bazilevic_constructor),
        ("chain verification", chain_verification),
        ("normalization", normalization),
        ("univalence oracle", univalence_oracle),
        ("bound transfer", bound_transfer),
        ("series engine", series_engine),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] AC-{} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                println!("[FAIL] AC-{} {name}: {why} ({elapsed:.2?})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
