//! Grid sweeps of the univalence and quasiconformal-extension criteria.
//!
//! Every criterion is a pointwise condition on some quantity built from
//! `f` (or from `g` and `h`). Half-plane criteria ask for a positive real
//! part; disk criteria ask for membership in `U(k)` or `U(α, k)` and report
//! the smallest `k` that works on the grid. Only finitely many radii below 1
//! are sampled, so `min_dilatation` is a lower bound for the supremum over
//! the whole disk; it can only grow as `r_max` grows.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::disks::min_k;
use crate::error::{Error, Result};
use crate::functions::AnalyticFunction;
use crate::report::{fmt_complex, Document};
use crate::series::PowerSeries;

const DEFAULT_RADII: [f64; 12] = [
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995,
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    radii: Vec<f64>,
    angles_per_circle: usize,
    refinement: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radii: DEFAULT_RADII.to_vec(),
            angles_per_circle: 512,
            refinement: Some(8),
        }
    }
}

impl GridSpec {
    pub fn new(
        radii: Vec<f64>,
        angles_per_circle: usize,
        refinement: Option<usize>,
    ) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Parameter("grid needs at least one radius".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::Parameter("grid radii must lie in (0, 1)".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "grid radii must be strictly ascending".into(),
            ));
        }
        if angles_per_circle < 8 {
            return Err(Error::Parameter(
                "at least 8 angles per circle are required".into(),
            ));
        }
        if refinement == Some(0) {
            return Err(Error::Parameter(
                "refinement factor must be positive".into(),
            ));
        }
        Ok(Self {
            radii,
            angles_per_circle,
            refinement,
        })
    }

    /// The default radii up to `r_max`, with `r_max` itself appended when it
    /// is not already one of them.
    pub fn up_to(r_max: f64, angles_per_circle: usize, refinement: Option<usize>) -> Result<Self> {
        let mut radii: Vec<f64> = DEFAULT_RADII
            .iter()
            .copied()
            .filter(|r| *r < r_max)
            .collect();
        radii.push(r_max);
        Self::new(radii, angles_per_circle, refinement)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles_per_circle(&self) -> usize {
        self.angles_per_circle
    }

    pub fn refinement(&self) -> Option<usize> {
        self.refinement
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("grid radii are never empty")
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angles_per_circle as f64
    }

    /// The unrefined grid: the origin, then each circle in order.
    pub fn points(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        for &r in &self.radii {
            pts.extend(
                (0..self.angles_per_circle).map(|j| Complex64::from_polar(r, self.angle(j))),
            );
        }
        pts
    }

    pub(crate) fn describe(&self, doc: &mut Document) {
        doc.reals("grid_radii", &self.radii)
            .integer("grid_angles", self.angles_per_circle)
            .integer("grid_refinement", self.refinement.unwrap_or(1));
    }
}

/// What a criterion is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub enum Subject {
    Function(AnalyticFunction),
    /// The pair `(g, h)` of a Bazilevič integral.
    Pair {
        g: AnalyticFunction,
        h: PowerSeries,
    },
}

impl Subject {
    pub fn label(&self) -> String {
        match self {
            Subject::Function(f) => f.label(),
            Subject::Pair { g, h } => format!("g={}, h=series(order {})", g.label(), h.order()),
        }
    }

    fn function(&self, kind: &CriterionKind) -> Result<&AnalyticFunction> {
        match self {
            Subject::Function(f) => Ok(f),
            Subject::Pair { .. } => Err(Error::Parameter(format!(
                "{} needs a single function, not a (g, h) pair",
                kind.name()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionKind {
    /// `Re(1 + z f''/f') > 0`
    Convexity,
    /// `Re(e^{iα} z f'/f) > 0`
    Spirallike { alpha: f64 },
    /// `z f'/f ∈ U(α, k)`
    StarlikeTilted { alpha: f64 },
    /// `e^{iα} z f'/f ∈ U(k)` with `k >= |tan(α/2)|`
    SpiralUk { alpha: f64 },
    /// `1 + z f''/f' + (α + iβ - 1) z f'/f ∈ U(k)`
    Bazilevic1 { alpha: f64, beta: f64 },
    /// `h ∈ U(k)` and `iβ + α z g'/g ∈ U(k)`
    Bazilevic2 { alpha: f64, beta: f64 },
    /// `Re(1 + z f''/f' + (α + iβ - 1) z f'/f) > 0`
    SheilSmallHalfPlane { alpha: f64, beta: f64 },
}

impl CriterionKind {
    pub fn name(&self) -> &'static str {
        match self {
            CriterionKind::Convexity => "convexity",
            CriterionKind::Spirallike { .. } => "spirallike",
            CriterionKind::StarlikeTilted { .. } => "starlike-tilted",
            CriterionKind::SpiralUk { .. } => "spiral-uk",
            CriterionKind::Bazilevic1 { .. } => "bazilevic1",
            CriterionKind::Bazilevic2 { .. } => "bazilevic2",
            CriterionKind::SheilSmallHalfPlane { .. } => "sheil-small",
        }
    }

    pub fn is_disk(&self) -> bool {
        matches!(
            self,
            CriterionKind::StarlikeTilted { .. }
                | CriterionKind::SpiralUk { .. }
                | CriterionKind::Bazilevic1 { .. }
                | CriterionKind::Bazilevic2 { .. }
        )
    }

    /// `|tan(α/2)|` for the spiral disk criterion, 0 otherwise.
    pub fn floor(&self) -> f64 {
        match self {
            CriterionKind::SpiralUk { alpha } => (alpha / 2.0).tan().abs(),
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CriterionKind::Convexity => Ok(()),
            CriterionKind::Spirallike { alpha }
            | CriterionKind::StarlikeTilted { alpha }
            | CriterionKind::SpiralUk { alpha } => {
                if alpha.abs() < FRAC_PI_2 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("α = {alpha} outside (-π/2, π/2)")))
                }
            }
            CriterionKind::Bazilevic1 { alpha, beta }
            | CriterionKind::Bazilevic2 { alpha, beta }
            | CriterionKind::SheilSmallHalfPlane { alpha, beta } => {
                if alpha > 0.0 && beta.is_finite() && alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!(
                        "Bazilevič type needs α > 0 and finite β (α = {alpha}, β = {beta})"
                    )))
                }
            }
        }
    }

    fn parameters(&self, doc: &mut Document) {
        match *self {
            CriterionKind::Convexity => {}
            CriterionKind::Spirallike { alpha }
            | CriterionKind::StarlikeTilted { alpha }
            | CriterionKind::SpiralUk { alpha } => {
                doc.real("alpha", alpha);
            }
            CriterionKind::Bazilevic1 { alpha, beta }
            | CriterionKind::Bazilevic2 { alpha, beta }
            | CriterionKind::SheilSmallHalfPlane { alpha, beta } => {
                doc.real("alpha", alpha).real("beta", beta);
            }
        }
    }
}

/// Pointwise outcome: the quantity tested and its score, which is the real
/// part (half-plane kinds) or the minimal `k` (disk kinds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pointwise {
    pub quantity: Complex64,
    pub score: f64,
}

pub fn pointwise(kind: &CriterionKind, subject: &Subject, z: Complex64) -> Result<Pointwise> {
    let bazilevic_quantity = |alpha: f64, beta: f64| -> Result<Complex64> {
        let f = subject.function(kind)?;
        let gamma = Complex64::new(alpha, beta);
        Ok(f.convexity_quantity(z)? + (gamma - 1.0) * f.log_derivative(z)?)
    };
    let half = |q: Complex64| Pointwise {
        quantity: q,
        score: q.re,
    };
    let disk = |q: Complex64, alpha: f64| Pointwise {
        quantity: q,
        score: min_k(q, alpha),
    };
    Ok(match *kind {
        CriterionKind::Convexity => half(subject.function(kind)?.convexity_quantity(z)?),
        CriterionKind::Spirallike { alpha } => {
            half(Complex64::from_polar(1.0, alpha) * subject.function(kind)?.log_derivative(z)?)
        }
        CriterionKind::StarlikeTilted { alpha } => {
            disk(subject.function(kind)?.log_derivative(z)?, alpha)
        }
        CriterionKind::SpiralUk { alpha } => disk(
            Complex64::from_polar(1.0, alpha) * subject.function(kind)?.log_derivative(z)?,
            0.0,
        ),
        CriterionKind::Bazilevic1 { alpha, beta } => disk(bazilevic_quantity(alpha, beta)?, 0.0),
        CriterionKind::SheilSmallHalfPlane { alpha, beta } => {
            half(bazilevic_quantity(alpha, beta)?)
        }
        CriterionKind::Bazilevic2 { alpha, beta } => {
            let Subject::Pair { g, h } = subject else {
                return Err(Error::Parameter("bazilevic2 needs a (g, h) pair".into()));
            };
            let hv = h.evaluate(z)?;
            let h0 = Complex64::new(0.0, beta) + alpha * g.log_derivative(z)?;
            let (kh, k0) = (min_k(hv, 0.0), min_k(h0, 0.0));
            if kh >= k0 {
                Pointwise {
                    quantity: hv,
                    score: kh,
                }
            } else {
                Pointwise {
                    quantity: h0,
                    score: k0,
                }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub subject: String,
    pub grid: GridSpec,
    /// Smallest slack of the defining inequality (`1 - min_dilatation` for
    /// disk kinds).
    pub margin: f64,
    pub worst_point: Complex64,
    pub worst_quantity: Complex64,
    /// Floored supremum of the pointwise minimal `k`; `None` for half-plane kinds.
    pub min_dilatation: Option<f64>,
    /// Supremum before any floor.
    pub raw_dilatation: Option<f64>,
    pub floor_applied: bool,
    pub passed: bool,
    pub points_evaluated: usize,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::new();
        doc.section("criterion").text("kind", self.kind.name());
        self.kind.parameters(&mut doc);
        doc.text("subject", self.subject.clone());
        self.grid.describe(&mut doc);
        doc.real("r_max", self.grid.r_max())
            .integer("points_evaluated", self.points_evaluated)
            .real("margin", self.margin)
            .complex("worst_point", self.worst_point)
            .complex("worst_quantity", self.worst_quantity);
        if let (Some(k), Some(raw)) = (self.min_dilatation, self.raw_dilatation) {
            doc.real("min_dilatation", k)
                .real("raw_dilatation", raw)
                .flag("floor_applied", self.floor_applied);
        }
        doc.flag("passed", self.passed)
            .text("warnings", self.warnings.join("; "));
        doc
    }
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    score: f64,
    z: Complex64,
    quantity: Complex64,
}

/// `true` when `cand` beats `best`; ties keep the earlier point.
fn better(is_disk: bool, cand: f64, best: f64) -> bool {
    if cand.is_nan() {
        return !best.is_nan();
    }
    if is_disk {
        cand > best
    } else {
        cand < best
    }
}

fn sweep_circle(
    kind: &CriterionKind,
    subject: &Subject,
    grid: &GridSpec,
    r: f64,
) -> Result<(Extremum, usize)> {
    let disk = kind.is_disk();
    let n = grid.angles_per_circle;
    let mut best: Option<(usize, Extremum)> = None;
    for j in 0..n {
        let z = Complex64::from_polar(r, grid.angle(j));
        let p = pointwise(kind, subject, z)?;
        if best.is_none_or(|(_, b)| better(disk, p.score, b.score)) {
            best = Some((
                j,
                Extremum {
                    score: p.score,
                    z,
                    quantity: p.quantity,
                },
            ));
        }
    }
    let (j, mut ext) = best.expect("at least 8 angles per circle");
    let mut count = n;
    if let Some(factor) = grid.refinement.filter(|f| *f > 1) {
        let step = 2.0 * PI / n as f64;
        for m in 1..=factor {
            for sign in [-1.0, 1.0] {
                let theta = grid.angle(j) + sign * step * m as f64 / factor as f64;
                let z = Complex64::from_polar(r, theta);
                let p = pointwise(kind, subject, z)?;
                count += 1;
                if better(disk, p.score, ext.score) {
                    ext = Extremum {
                        score: p.score,
                        z,
                        quantity: p.quantity,
                    };
                }
            }
        }
    }
    Ok((ext, count))
}

/// Sweeps `kind` over `grid`. Circles are evaluated in parallel and reduced
/// in grid order, so the report does not depend on scheduling.
pub fn evaluate_criterion(
    kind: &CriterionKind,
    subject: &Subject,
    grid: &GridSpec,
) -> Result<CriterionReport> {
    kind.validate()?;
    let disk = kind.is_disk();
    let origin = Complex64::new(0.0, 0.0);
    let p0 = pointwise(kind, subject, origin)?;
    let circles: Vec<(Extremum, usize)> = grid
        .radii
        .par_iter()
        .map(|&r| sweep_circle(kind, subject, grid, r))
        .collect::<Result<_>>()?;
    let mut ext = Extremum {
        score: p0.score,
        z: origin,
        quantity: p0.quantity,
    };
    let mut count = 1;
    for (e, n) in circles {
        count += n;
        if better(disk, e.score, ext.score) {
            ext = e;
        }
    }

    let mut warnings = vec![format!(
        "sampled |z| <= {}; the supremum over the disk may be larger",
        grid.r_max()
    )];
    let (margin, min_dil, raw, floor_applied, passed) = if disk {
        let floor = kind.floor();
        let floored = ext.score.max(floor);
        let applied = floor > ext.score;
        if applied {
            warnings.push(format!(
                "floor |tan(α/2)| = {floor} applied to min_dilatation"
            ));
        }
        (
            1.0 - floored,
            Some(floored),
            Some(ext.score),
            applied,
            floored < 1.0,
        )
    } else {
        (ext.score, None, None, false, ext.score > 0.0)
    };
    if !passed {
        warnings.push(format!(
            "criterion fails at z = {} (quantity {})",
            fmt_complex(ext.z),
            fmt_complex(ext.quantity)
        ));
    }
    Ok(CriterionReport {
        kind: *kind,
        subject: subject.label(),
        grid: grid.clone(),
        margin,
        worst_point: ext.z,
        worst_quantity: ext.quantity,
        min_dilatation: min_dil,
        raw_dilatation: raw,
        floor_applied,
        passed,
        points_evaluated: count,
        warnings,
    })
}

/// `α f + (1 - α) z f'`, univalent whenever `f` is convex and `|2α - 1| <= 1`.
/// A non-convex `f` still produces the function, together with a warning.
pub fn convex_combination(
    f: &AnalyticFunction,
    alpha: Complex64,
    grid: &GridSpec,
) -> Result<(AnalyticFunction, Vec<String>)> {
    if !((2.0 * alpha - 1.0).norm() <= 1.0 + 1e-12) {
        return Err(Error::Parameter(format!(
            "convex combination needs |2α - 1| <= 1, α = {}",
            fmt_complex(alpha)
        )));
    }
    if (alpha - 1.0).norm() == 0.0 {
        return Ok((f.clone(), Vec::new()));
    }
    let combined = f.convex_combination_unchecked(alpha)?;
    let mut warnings = Vec::new();
    match evaluate_criterion(
        &CriterionKind::Convexity,
        &Subject::Function(f.clone()),
        grid,
    ) {
        Ok(rep) if rep.passed => {}
        Ok(rep) => warnings.push(format!(
            "{} is not convex (Re(1 + z f''/f') = {} at z = {}); univalence is not guaranteed",
            f.label(),
            rep.margin,
            fmt_complex(rep.worst_point)
        )),
        Err(e) => warnings.push(format!(
            "convexity of {} could not be checked: {e}",
            f.label()
        )),
    }
    Ok((combined, warnings))
}
