//! One-sided numerical univalence tests.
//!
//! Nothing here certifies univalence: a verdict either carries a witness
//! pair `z₁ ≠ z₂` with `f(z₁) ≈ f(z₂)`, or says that no such pair was found.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chains::LoewnerChain;
use crate::error::{Error, Result};
use crate::functions::AnalyticFunction;
use crate::report::{fmt_complex, Document};
use crate::sampling::disk_points;

/// Default number of contour points for winding counts.
pub const DEFAULT_CONTOUR_POINTS: usize = 2048;
/// Ceiling for the contour refinement of [`univalence_scan`].
pub const MAX_CONTOUR_POINTS: usize = 1 << 16;
/// A winding integral further than this from an integer is rejected.
const WINDING_RESIDUAL: f64 = 1e-6;
/// Required ratio between the distance to the target and the local chord.
const CONTOUR_CLEARANCE: f64 = 10.0;
const NEWTON_ITERATIONS: usize = 60;

/// A map that can be evaluated together with its derivative.
pub trait HolomorphicMap: Sync {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)>;
}

impl HolomorphicMap for AnalyticFunction {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let d = self.eval_derivatives(z)?;
        Ok((d.value, d.first))
    }
}

/// Wraps a closure returning `(f(z), f'(z))`.
pub struct MapFn<F>(pub F);

impl<F> HolomorphicMap for MapFn<F>
where
    F: Fn(Complex64) -> (Complex64, Complex64) + Sync,
{
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((self.0)(z))
    }
}

/// `z ↦ f(z, t)` for a fixed chain time.
pub struct ChainSlice<'a> {
    chain: &'a LoewnerChain,
    t: f64,
}

impl<'a> ChainSlice<'a> {
    pub fn new(chain: &'a LoewnerChain, t: f64) -> Self {
        Self { chain, t }
    }
}

impl HolomorphicMap for ChainSlice<'_> {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let p = self.chain.eval(z, self.t)?;
        Ok((p.value, p.dz))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Injectivity,
    Winding,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Injectivity => "injectivity",
            Method::Winding => "winding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub z1: Complex64,
    pub z2: Complex64,
    /// `|f(z₁) - f(z₂)|`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnivalenceVerdict {
    pub falsified: bool,
    pub witness: Option<Witness>,
    pub method: Method,
    pub radius: f64,
    pub samples: usize,
    pub sep_tol: f64,
    pub img_tol: f64,
    /// Largest contour used by the winding stage (0 if it did not run).
    pub contour_points: usize,
    /// Largest winding count seen (0 if the winding stage did not run).
    pub max_count: i64,
    /// Targets whose winding count could not be trusted.
    pub inconclusive: usize,
}

impl UnivalenceVerdict {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::new();
        doc.section("univalence")
            .flag("falsified", self.falsified)
            .text("method", self.method.name())
            .real("radius", self.radius)
            .integer("samples", self.samples)
            .real("sep_tol", self.sep_tol)
            .real("img_tol", self.img_tol)
            .integer("contour_points", self.contour_points)
            .text("max_count", self.max_count.to_string())
            .integer("inconclusive", self.inconclusive);
        if let Some(w) = self.witness {
            doc.complex("witness_z1", w.z1)
                .complex("witness_z2", w.z2)
                .real("witness_gap", w.gap);
        }
        doc
    }
}

fn contour_points(r: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect()
}

/// Samples of `f` and `f'` on the circle `|z| = r`, reusable for many targets.
#[derive(Debug, Clone)]
pub struct ContourSamples {
    radius: f64,
    z: Vec<Complex64>,
    f: Vec<Complex64>,
    df: Vec<Complex64>,
    /// Squared local chord `max(|f_{j+1} - f_j|, |f_j - f_{j-1}|)²`.
    chord2: Vec<f64>,
}

impl ContourSamples {
    pub fn new<M: HolomorphicMap + ?Sized>(map: &M, r: f64, m: usize) -> Result<Self> {
        if !(r > 0.0) || m < 8 {
            return Err(Error::Parameter(format!(
                "contour needs r > 0 and at least 8 points (r = {r}, m = {m})"
            )));
        }
        let vals: Vec<(Complex64, Complex64)> = contour_points(r, m)
            .par_iter()
            .map(|&z| map.eval(z))
            .collect::<Result<_>>()?;
        Self::from_values(r, vals)
    }

    /// Wraps precomputed `(f, f')` at the `m` equispaced points of `|z| = r`,
    /// starting at `z = r`.
    pub(crate) fn from_values(r: f64, vals: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if !(r > 0.0) || vals.len() < 8 {
            return Err(Error::Parameter(format!(
                "contour needs r > 0 and at least 8 points (r = {r}, m = {})",
                vals.len()
            )));
        }
        let z = contour_points(r, vals.len());
        let (f, df): (Vec<Complex64>, Vec<Complex64>) = vals.into_iter().unzip();
        let m = f.len();
        let chord2 = (0..m)
            .map(|j| {
                let prev = f[(j + m - 1) % m];
                let next = f[(j + 1) % m];
                (next - f[j]).norm_sqr().max((f[j] - prev).norm_sqr())
            })
            .collect();
        Ok(Self {
            radius: r,
            z,
            f,
            df,
            chord2,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Checks that `w` stays at least ten local chords away from the image curve.
    fn clearance(&self, w: Complex64) -> Result<()> {
        let limit = CONTOUR_CLEARANCE * CONTOUR_CLEARANCE;
        let mut worst: Option<(f64, usize)> = None;
        for (j, (f, c2)) in self.f.iter().zip(&self.chord2).enumerate() {
            let ratio2 = (f - w).norm_sqr() / c2;
            if !(ratio2 > limit) && worst.is_none_or(|(r, _)| ratio2 < r) {
                worst = Some((ratio2, j));
            }
        }
        match worst {
            None => Ok(()),
            Some((_, j)) => Err(Error::ContourTooClose {
                radius: self.radius,
                target: w,
                distance: (self.f[j] - w).norm(),
                resolution: self.chord2[j].sqrt(),
            }),
        }
    }

    /// `(1/2πi) ∮ z^k f'(z) / (f(z) - w) dz` for `k = 0..=k_max`, i.e. the
    /// power sums of the preimages of `w` inside the contour.
    pub fn power_sums(&self, w: Complex64, k_max: usize) -> Vec<Complex64> {
        let m = self.z.len() as f64;
        let mut sums = vec![Complex64::new(0.0, 0.0); k_max + 1];
        for ((z, f), df) in self.z.iter().zip(&self.f).zip(&self.df) {
            let mut term = z * df / (f - w);
            for s in sums.iter_mut() {
                *s += term;
                term *= z;
            }
        }
        sums.iter().map(|s| s / m).collect()
    }

    /// Number of solutions of `f(z) = w` in `|z| < r`.
    pub fn count(&self, w: Complex64) -> Result<i64> {
        self.clearance(w)?;
        let value = self.power_sums(w, 0)[0];
        let n = value.re.round();
        let residual = (value - n).norm();
        if residual > WINDING_RESIDUAL || !residual.is_finite() {
            return Err(Error::NonIntegerWinding { value, residual });
        }
        Ok(n as i64)
    }
}

/// Argument-principle count of solutions of `f(z) = w` in `|z| < r`
/// from an `m`-point trapezoid rule.
pub fn winding_count<M: HolomorphicMap + ?Sized>(
    map: &M,
    w: Complex64,
    r: f64,
    m: usize,
) -> Result<i64> {
    ContourSamples::new(map, r, m)?.count(w)
}

/// Doubles `m` from `m_start` until two successive counts agree (or `m_max`
/// is reached with a usable count). Returns the count and the final `m`.
pub fn winding_count_adaptive<M: HolomorphicMap + ?Sized>(
    map: &M,
    w: Complex64,
    r: f64,
    m_start: usize,
    m_max: usize,
) -> Result<(i64, usize)> {
    let mut m = m_start.max(8);
    let mut previous: Option<i64> = None;
    loop {
        let outcome = winding_count(map, w, r, m);
        match (outcome, previous) {
            (Ok(n), Some(p)) if n == p => return Ok((n, m)),
            (Ok(n), _) if 2 * m > m_max => return Ok((n, m)),
            (Ok(n), _) => previous = Some(n),
            (Err(e), _) if 2 * m > m_max => return Err(e),
            (Err(_), _) => previous = None,
        }
        m *= 2;
    }
}

fn newton<M: HolomorphicMap + ?Sized>(
    map: &M,
    w: Complex64,
    start: Complex64,
    r: f64,
    avoid: Option<Complex64>,
    sep_tol: f64,
    img_tol: f64,
) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..NEWTON_ITERATIONS {
        let (f, df) = map.eval(z).ok()?;
        if (f - w).norm() < 0.25 * img_tol {
            break;
        }
        if df.norm() == 0.0 {
            return None;
        }
        let step = (f - w) / df;
        z -= step;
        if !(z.norm() <= r) || avoid.is_some_and(|a| (z - a).norm() < 0.5 * sep_tol) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    Some(z)
}

fn verify_pair<M: HolomorphicMap + ?Sized>(
    map: &M,
    z1: Complex64,
    z2: Complex64,
    sep_tol: f64,
    img_tol: f64,
) -> Option<Witness> {
    if (z1 - z2).norm() <= sep_tol {
        return None;
    }
    let f1 = map.eval(z1).ok()?.0;
    let f2 = map.eval(z2).ok()?.0;
    let gap = (f1 - f2).norm();
    (gap < img_tol).then_some(Witness { z1, z2, gap })
}

/// Scans `n_points` quasi-uniform points of `|z| <= r` for a pair with
/// distinct preimages and (after Newton refinement) equal images.
///
/// Candidate pairs come from a multi-level spatial hash on the image
/// values, where each point is matched within `|f'(z)| × spacing`.
pub fn injectivity_falsifier<M: HolomorphicMap + ?Sized>(
    map: &M,
    r: f64,
    n_points: usize,
    sep_tol: Option<f64>,
    img_tol: Option<f64>,
    seed: u64,
) -> Result<UnivalenceVerdict> {
    if !(r > 0.0 && r < 1.0) || n_points < 2 {
        return Err(Error::Parameter(format!(
            "injectivity scan needs 0 < r < 1 and two or more points (r = {r}, n = {n_points})"
        )));
    }
    let pts = disk_points(n_points, r, seed);
    let vals: Vec<(Complex64, Complex64)> = pts
        .par_iter()
        .map(|&z| map.eval(z))
        .collect::<Result<_>>()?;
    let sep_tol = sep_tol.unwrap_or(1e-3 * r);

    let (mut lo, mut hi) = (vals[0].0, vals[0].0);
    for (f, _) in &vals {
        lo = Complex64::new(lo.re.min(f.re), lo.im.min(f.im));
        hi = Complex64::new(hi.re.max(f.re), hi.im.max(f.im));
    }
    let diameter = (hi - lo).norm();
    let img_tol = img_tol.unwrap_or(1e-9 * diameter);

    let spacing = r * (std::f64::consts::PI / n_points as f64).sqrt();
    let mut radius: Vec<f64> = vals.iter().map(|(_, d)| d.norm() * spacing).collect();
    let base = radius
        .iter()
        .copied()
        .filter(|d| *d > 0.0 && d.is_finite())
        .fold(f64::INFINITY, f64::min);
    let base = if base.is_finite() {
        base
    } else {
        diameter.max(1.0) * 1e-12
    };
    for d in radius.iter_mut() {
        if !(*d >= base) || !d.is_finite() {
            *d = base;
        }
    }
    let level: Vec<i32> = radius
        .iter()
        .map(|d| (d / base).log2().floor() as i32)
        .collect();
    let mut levels: Vec<i32> = level.clone();
    levels.sort_unstable();
    levels.dedup();

    let cell = |l: i32| base * 2f64.powi(l + 1);
    let key =
        |f: Complex64, size: f64| ((f.re / size).floor() as i64, (f.im / size).floor() as i64);
    let tables: Vec<HashMap<(i64, i64), Vec<usize>>> = levels
        .iter()
        .map(|&l| {
            let size = cell(l);
            let mut table: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
            for (i, (f, _)) in vals.iter().enumerate() {
                if level[i] == l {
                    table.entry(key(*f, size)).or_default().push(i);
                }
            }
            table
        })
        .collect();

    // A pair whose image offset matches the first-order prediction from both
    // ends is the ordinary neighbourhood of a regular point; Newton would only
    // recover the trivial root.
    let locally_linear = |i: usize, j: usize| {
        let dz = pts[j] - pts[i];
        let df = vals[j].0 - vals[i].0;
        [vals[i].1, vals[j].1].iter().all(|d| {
            let lin = d * dz;
            (df - lin).norm() <= 0.5 * lin.norm()
        })
    };
    let mut pairs: Vec<(usize, usize)> = (0..n_points)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            let fi = vals[i].0;
            for (li, &l) in levels.iter().enumerate() {
                if l < level[i] {
                    continue;
                }
                let size = cell(l);
                let (cx, cy) = key(fi, size);
                for dx in -2..=2 {
                    for dy in -2..=2 {
                        if let Some(bucket) = tables[li].get(&(cx + dx, cy + dy)) {
                            for &j in bucket {
                                if j != i
                                    && (fi - vals[j].0).norm() < radius[i] + radius[j]
                                    && (pts[i] - pts[j]).norm() > sep_tol
                                    && !locally_linear(i, j)
                                {
                                    found.push((i.min(j), i.max(j)));
                                }
                            }
                        }
                    }
                }
            }
            found.into_iter()
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();

    let witnesses: Vec<Option<Witness>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            for (a, b) in [(i, j), (j, i)] {
                if let Some(zeta) =
                    newton(map, vals[a].0, pts[b], r, Some(pts[a]), sep_tol, img_tol)
                {
                    if let Some(w) = verify_pair(map, pts[a], zeta, sep_tol, img_tol) {
                        return Some(w);
                    }
                }
            }
            None
        })
        .collect();
    let witness = witnesses.into_iter().flatten().next();
    Ok(UnivalenceVerdict {
        falsified: witness.is_some(),
        witness,
        method: Method::Injectivity,
        radius: r,
        samples: n_points,
        sep_tol,
        img_tol,
        contour_points: 0,
        max_count: 0,
        inconclusive: 0,
    })
}

/// Roots of `xⁿ - e₁xⁿ⁻¹ + e₂xⁿ⁻² - ...` recovered from power sums `s₁..sₙ`
/// (Newton's identities, then Durand–Kerner).
fn roots_from_power_sums(sums: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * sums[i];
        }
        e[k] = acc / k as f64;
    }
    // monic coefficients, highest degree first
    let coeffs: Vec<Complex64> = (0..=n)
        .map(|k| if k % 2 == 0 { e[k] } else { -e[k] })
        .collect();
    let poly = |x: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * 0.5).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = poly(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

fn winding_witness<M: HolomorphicMap + ?Sized>(
    map: &M,
    contour: &ContourSamples,
    w: Complex64,
    count: i64,
    sep_tol: f64,
    img_tol: f64,
) -> Option<Witness> {
    let n = usize::try_from(count).ok()?.min(12);
    let sums = contour.power_sums(w, n);
    let roots: Vec<Complex64> = roots_from_power_sums(&sums, n)
        .into_iter()
        .map(|z| newton(map, w, z, contour.radius(), None, sep_tol, img_tol).unwrap_or(z))
        .collect();
    let mut best: Option<Witness> = None;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if let Some(wit) = verify_pair(map, roots[i], roots[j], sep_tol, img_tol) {
                if best.is_none_or(|b| (wit.z1 - wit.z2).norm() > (b.z1 - b.z2).norm()) {
                    best = Some(wit);
                }
            }
        }
    }
    best
}

/// Injectivity scan followed by winding counts of `image_samples` targets
/// `w = f(z)`, `|z| <= 0.9 r`; a count above 1 falsifies univalence.
///
/// Targets whose count is untrustworthy at `m` contour points are retried
/// with `2m, 4m, …` points up to [`MAX_CONTOUR_POINTS`].
pub fn univalence_scan<M: HolomorphicMap + ?Sized>(
    map: &M,
    r: f64,
    image_samples: usize,
    m: usize,
    seed: u64,
) -> Result<UnivalenceVerdict> {
    let inj = injectivity_falsifier(map, r, image_samples, None, None, seed)?;
    if inj.falsified {
        return Ok(inj);
    }
    let sources = disk_points(image_samples, 0.9 * r, seed.wrapping_add(1));
    let targets: Vec<Complex64> = sources
        .par_iter()
        .map(|&z| map.eval(z).map(|v| v.0))
        .collect::<Result<_>>()?;
    // (count, index of the contour that produced it)
    let mut counts: Vec<Option<(i64, usize)>> = vec![None; targets.len()];
    let mut contours: Vec<ContourSamples> = Vec::new();
    let mut points = m;
    loop {
        let pending: Vec<usize> = (0..targets.len())
            .filter(|&i| counts[i].is_none())
            .collect();
        if pending.is_empty() || (!contours.is_empty() && points > MAX_CONTOUR_POINTS.max(m)) {
            break;
        }
        let contour = ContourSamples::new(map, r, points)?;
        let level = contours.len();
        let found: Vec<Option<i64>> = pending
            .par_iter()
            .map(|&i| contour.count(targets[i]).ok())
            .collect();
        for (&i, n) in pending.iter().zip(found) {
            counts[i] = n.map(|n| (n, level));
        }
        contours.push(contour);
        points *= 2;
    }
    let max_count = counts.iter().flatten().map(|c| c.0).max().unwrap_or(0);
    let inconclusive = counts.iter().filter(|c| c.is_none()).count();
    let mut verdict = UnivalenceVerdict {
        method: Method::Winding,
        contour_points: contours.last().map_or(m, ContourSamples::len),
        max_count,
        inconclusive,
        ..inj
    };
    if let Some(idx) = counts.iter().position(|c| c.is_some_and(|c| c.0 > 1)) {
        let (n, level) = counts[idx].unwrap_or((2, 0));
        verdict.falsified = true;
        verdict.witness = winding_witness(
            map,
            &contours[level],
            targets[idx],
            n,
            verdict.sep_tol,
            verdict.img_tol,
        )
        .or(Some(Witness {
            z1: sources[idx],
            z2: sources[idx],
            gap: 0.0,
        }));
    }
    Ok(verdict)
}

/// Human-readable witness description.
pub fn describe_witness(w: &Witness) -> String {
    format!(
        "f({}) ≈ f({}) (gap {:e})",
        fmt_complex(w.z1),
        fmt_complex(w.z2),
        w.gap
    )
}
