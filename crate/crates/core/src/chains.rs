//! Five explicit Loewner chains, their numerical verification, and the
//! normalization that turns a chain with complex `a₁(t)` into a standard one.
//!
//! Each chain carries closed forms for `f(z,t)`, `∂f/∂t`, `∂f/∂z`, the
//! Herglotz field `p = ḟ / (z f')` and a continuous branch of `log a₁(t)`.
//! Throughout, `s = e^t - 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::criteria::{evaluate_criterion, CriterionKind, GridSpec, Subject};
use crate::disks::{min_k, DiskSpec};
use crate::error::{Error, Result};
use crate::functions::{bazilevic_construct, AnalyticFunction, Derivatives, Local, Region};
use crate::oracle::ContourSamples;
use crate::report::{fmt_complex, Document};
use crate::series::{horner, PowerSeries};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default sample times.
pub const DEFAULT_TIMES: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];

/// Step of the finite-difference cross-check of `∂f/∂t` (with one Richardson step).
const TIME_STEP: f64 = 1e-5;
/// `|a₁(T)|` above which a chain is considered escaped.
const ESCAPE_MODULUS: f64 = 1e6;
const SUBORDINATION_ANGLES: usize = 32;
const SUBORDINATION_CONTOURS: usize = 3;
const SUBORDINATION_POINTS: usize = 4096;
const SUBORDINATION_MAX_RADIUS: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub enum ChainVariant {
    /// `α f + e^t (1 - α) z f'` for convex `f`.
    ConvexCombination {
        f: AnalyticFunction,
        alpha: Complex64,
    },
    /// `e^{(1 - ia)t} f(e^{iat} z)` with `a = tan α`, for α-spirallike `f`.
    SpirallikeStandard { f: AnalyticFunction, alpha: f64 },
    /// `e^{ct} f`.
    Exponential { f: AnalyticFunction, c: Complex64 },
    /// `f (1 + s z f'/f)^{1/(α+iβ)}`.
    SheilSmall {
        f: AnalyticFunction,
        alpha: f64,
        beta: f64,
    },
    /// `[(f/z)^γ + s γ (g/z)^α]^{1/γ} z`, `γ = α + iβ`, where `f` is the
    /// Bazilevič integral of `(g, h)`.
    BazilevicIntegral {
        g: AnalyticFunction,
        h: PowerSeries,
        alpha: f64,
        beta: f64,
        order: usize,
    },
}

impl ChainVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ChainVariant::ConvexCombination { .. } => "convex-combination",
            ChainVariant::SpirallikeStandard { .. } => "spirallike-standard",
            ChainVariant::Exponential { .. } => "exponential",
            ChainVariant::SheilSmall { .. } => "sheil-small",
            ChainVariant::BazilevicIntegral { .. } => "bazilevic-integral",
        }
    }

    fn describe(&self, doc: &mut Document) {
        doc.text("variant", self.name());
        match self {
            ChainVariant::ConvexCombination { f, alpha } => {
                doc.text("function", f.label()).complex("alpha", *alpha);
            }
            ChainVariant::SpirallikeStandard { f, alpha } => {
                doc.text("function", f.label()).real("alpha", *alpha);
            }
            ChainVariant::Exponential { f, c } => {
                doc.text("function", f.label()).complex("c", *c);
            }
            ChainVariant::SheilSmall { f, alpha, beta } => {
                doc.text("function", f.label())
                    .real("alpha", *alpha)
                    .real("beta", *beta);
            }
            ChainVariant::BazilevicIntegral {
                g,
                h,
                alpha,
                beta,
                order,
            } => {
                let hc: Vec<String> = h.coeffs().iter().map(|c| fmt_complex(*c)).collect();
                doc.text("g", g.label())
                    .text("h", hc.join(", "))
                    .real("alpha", *alpha)
                    .real("beta", *beta)
                    .integer("order", *order);
            }
        }
    }
}

/// `f(z,t)`, `∂f/∂t`, `∂f/∂z` and `p(z,t)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainPoint {
    pub value: Complex64,
    pub dt: Complex64,
    pub dz: Complex64,
    pub p: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerChain {
    variant: ChainVariant,
    subject: AnalyticFunction,
    warnings: Vec<String>,
}

impl LoewnerChain {
    /// Validates the variant's parameters and wires up `f(·, 0)`.
    pub fn new(variant: ChainVariant) -> Result<Self> {
        let mut warnings = Vec::new();
        let subject = match &variant {
            ChainVariant::ConvexCombination { f, alpha } => {
                if (ONE - alpha).norm() == 0.0 || !((alpha / (ONE - alpha)).re > 0.0) {
                    return Err(Error::Parameter(format!(
                        "convex-combination chain needs Re(α/(1-α)) > 0, α = {}",
                        fmt_complex(*alpha)
                    )));
                }
                f.convex_combination_unchecked(*alpha)?
            }
            ChainVariant::SpirallikeStandard { f, alpha } => {
                if !(alpha.abs() < FRAC_PI_2) {
                    return Err(Error::Parameter(format!(
                        "spiral angle {alpha} outside (-π/2, π/2)"
                    )));
                }
                f.clone()
            }
            ChainVariant::Exponential { f, c } => {
                if !(c.re > 0.0) || !c.is_finite() {
                    return Err(Error::Parameter(format!(
                        "exponential chain needs Re c > 0, c = {}",
                        fmt_complex(*c)
                    )));
                }
                f.clone()
            }
            ChainVariant::SheilSmall { f, alpha, beta } => {
                check_type(*alpha, *beta)?;
                f.clone()
            }
            ChainVariant::BazilevicIntegral {
                g,
                h,
                alpha,
                beta,
                order,
            } => {
                check_type(*alpha, *beta)?;
                let grid = GridSpec::up_to(0.99, 128, None)?;
                match evaluate_criterion(
                    &CriterionKind::Spirallike { alpha: 0.0 },
                    &Subject::Function(g.clone()),
                    &grid,
                ) {
                    Ok(rep) if rep.passed => {}
                    Ok(rep) => warnings.push(format!(
                        "g = {} fails the starlikeness check (Re zg'/g = {} at z = {})",
                        g.label(),
                        rep.margin,
                        fmt_complex(rep.worst_point)
                    )),
                    Err(e) => warnings.push(format!("starlikeness of g could not be checked: {e}")),
                }
                bazilevic_construct(g, h, *alpha, *beta, *order)?
            }
        };
        Ok(Self {
            variant,
            subject,
            warnings,
        })
    }

    pub fn convex_combination(f: AnalyticFunction, alpha: Complex64) -> Result<Self> {
        Self::new(ChainVariant::ConvexCombination { f, alpha })
    }

    pub fn spirallike_standard(f: AnalyticFunction, alpha: f64) -> Result<Self> {
        Self::new(ChainVariant::SpirallikeStandard { f, alpha })
    }

    pub fn exponential(f: AnalyticFunction, c: Complex64) -> Result<Self> {
        Self::new(ChainVariant::Exponential { f, c })
    }

    pub fn sheil_small(f: AnalyticFunction, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(ChainVariant::SheilSmall { f, alpha, beta })
    }

    pub fn bazilevic_integral(
        g: AnalyticFunction,
        h: PowerSeries,
        alpha: f64,
        beta: f64,
        order: usize,
    ) -> Result<Self> {
        Self::new(ChainVariant::BazilevicIntegral {
            g,
            h,
            alpha,
            beta,
            order,
        })
    }

    /// The chain whose Herglotz field the criterion controls: the standard
    /// spiral chain for tilted starlikeness, `e^{ct} f` for the spiral disk
    /// criterion, and the Bazilevič chains for the Bazilevič criteria.
    /// Convexity has no canonical chain without a choice of `α`.
    pub fn for_criterion(
        kind: &CriterionKind,
        subject: &Subject,
        order: usize,
    ) -> Result<Option<Self>> {
        let f = || match subject {
            Subject::Function(f) => Ok(f.clone()),
            Subject::Pair { .. } => Err(Error::Parameter(format!(
                "{} needs a single function",
                kind.name()
            ))),
        };
        let chain = match *kind {
            CriterionKind::Convexity => return Ok(None),
            CriterionKind::Spirallike { alpha } | CriterionKind::StarlikeTilted { alpha } => {
                Self::spirallike_standard(f()?, alpha)?
            }
            CriterionKind::SpiralUk { alpha } => {
                Self::exponential(f()?, Complex64::from_polar(1.0, -alpha))?
            }
            CriterionKind::Bazilevic1 { alpha, beta }
            | CriterionKind::SheilSmallHalfPlane { alpha, beta } => {
                Self::sheil_small(f()?, alpha, beta)?
            }
            CriterionKind::Bazilevic2 { alpha, beta } => match subject {
                Subject::Pair { g, h } => {
                    Self::bazilevic_integral(g.clone(), h.clone(), alpha, beta, order)?
                }
                Subject::Function(_) => {
                    return Err(Error::Parameter("bazilevic2 needs a (g, h) pair".into()));
                }
            },
        };
        Ok(Some(chain))
    }

    pub fn variant(&self) -> &ChainVariant {
        &self.variant
    }

    /// The function `f(·, 0)` the chain starts from.
    pub fn subject(&self) -> &AnalyticFunction {
        &self.subject
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn label(&self) -> String {
        let name = self.variant.name();
        match &self.variant {
            ChainVariant::ConvexCombination { f, alpha } => {
                format!("{name}({}, alpha={})", f.label(), fmt_complex(*alpha))
            }
            ChainVariant::SpirallikeStandard { f, alpha } => {
                format!("{name}({}, alpha={alpha})", f.label())
            }
            ChainVariant::Exponential { f, c } => {
                format!("{name}({}, c={})", f.label(), fmt_complex(*c))
            }
            ChainVariant::SheilSmall { f, alpha, beta } => {
                format!("{name}({}, alpha={alpha}, beta={beta})", f.label())
            }
            ChainVariant::BazilevicIntegral { g, alpha, beta, .. } => {
                format!("{name}(g={}, alpha={alpha}, beta={beta})", g.label())
            }
        }
    }

    /// Closed-form values at `|z| < 1`, `t >= 0`.
    pub fn eval(&self, z: Complex64, t: f64) -> Result<ChainPoint> {
        check_time(t)?;
        self.eval_in(z, t, Region::Open)
    }

    /// Like [`eval`](Self::eval) but admits `|z| = 1`.
    pub fn eval_on_closure(&self, z: Complex64, t: f64) -> Result<ChainPoint> {
        check_time(t)?;
        self.eval_in(z, t, Region::Closed)
    }

    /// Continuous branch of `log a₁(t)` with `Im log a₁(0)` in `(-π, π]`.
    pub fn log_a1(&self, t: f64) -> Complex64 {
        match &self.variant {
            ChainVariant::ConvexCombination { alpha, .. } => {
                let w = alpha / (ONE - alpha);
                (ONE - alpha).ln() + (w + t.exp()).ln()
            }
            ChainVariant::SpirallikeStandard { .. } => Complex64::new(t, 0.0),
            ChainVariant::Exponential { c, .. } => c * t,
            ChainVariant::SheilSmall { alpha, beta, .. } => t / Complex64::new(*alpha, *beta),
            ChainVariant::BazilevicIntegral { alpha, beta, .. } => {
                let gamma = Complex64::new(*alpha, *beta);
                (ONE + t.exp_m1() * gamma).ln() / gamma
            }
        }
    }

    pub fn a1(&self, t: f64) -> Complex64 {
        self.log_a1(t).exp()
    }

    /// A time `T` with `|a₁(T)| > 10⁶`.
    pub fn escape_time(&self) -> Result<f64> {
        let target = ESCAPE_MODULUS.ln();
        let mut hi = 1.0;
        let mut guard = 0;
        while self.log_a1(hi).re <= target {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::Bracket(format!(
                    "|a₁(t)| stays bounded for {}",
                    self.label()
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.log_a1(mid).re > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Boundary angles where `f(e^{iθ}, t)` is not finitely evaluable.
    pub fn singular_angles(&self, t: f64) -> Vec<f64> {
        let base = self.subject_singularities();
        match &self.variant {
            ChainVariant::SpirallikeStandard { alpha, .. } => {
                let shift = alpha.tan() * t;
                base.into_iter()
                    .map(|a| (a - shift).rem_euclid(2.0 * PI))
                    .collect()
            }
            _ => base,
        }
    }

    fn subject_singularities(&self) -> Vec<f64> {
        match &self.variant {
            ChainVariant::ConvexCombination { f, .. }
            | ChainVariant::SpirallikeStandard { f, .. }
            | ChainVariant::Exponential { f, .. }
            | ChainVariant::SheilSmall { f, .. } => f.singular_directions(),
            ChainVariant::BazilevicIntegral { g, .. } => g.singular_directions(),
        }
    }

    pub(crate) fn eval_in(&self, z: Complex64, t: f64, region: Region) -> Result<ChainPoint> {
        self.at(&self.spatial(z, region)?, t)
    }

    /// Everything about `f(z, ·)` that does not depend on time.
    pub(crate) fn spatial(&self, z: Complex64, region: Region) -> Result<Spatial> {
        let data = match &self.variant {
            ChainVariant::ConvexCombination { f, .. } | ChainVariant::Exponential { f, .. } => {
                SpatialData::Local(f.local(z, region)?)
            }
            ChainVariant::SpirallikeStandard { .. } => SpatialData::Rotating,
            ChainVariant::SheilSmall { f, .. } => {
                let l = f.local(z, region)?;
                SpatialData::SheilSmall {
                    l,
                    lg: l.log_derivative(z, region)?,
                    c: l.convexity(z, region)?,
                }
            }
            ChainVariant::BazilevicIntegral { alpha, beta, .. } => {
                let bz = self
                    .subject
                    .as_bazilevic()
                    .expect("bazilevic-integral chain is built on a Bazilevič function");
                let lg = bz.g().local(z, region)?.log_derivative(z, region)?;
                SpatialData::Bazilevic {
                    q0: bz.bracket(z, region)?,
                    gf: bz.g_factor(z, region)?,
                    hv: horner(bz.h().coeffs(), z),
                    h0: Complex64::new(0.0, *beta) + *alpha * lg,
                }
            }
        };
        Ok(Spatial { z, region, data })
    }

    pub(crate) fn at(&self, sp: &Spatial, t: f64) -> Result<ChainPoint> {
        let (z, region) = (sp.z, sp.region);
        let point = match (&self.variant, &sp.data) {
            (ChainVariant::ConvexCombination { alpha, .. }, SpatialData::Local(l)) => {
                let c = ONE + z * l.second / l.first;
                let beta = ONE - alpha;
                let e = t.exp();
                let w = alpha / beta;
                let dt = e * beta * z * l.first;
                ChainPoint {
                    value: alpha * l.value + dt,
                    dt,
                    dz: alpha * l.first + e * beta * (l.first + z * l.second),
                    p: (w / e + c).inv(),
                }
            }
            (ChainVariant::SpirallikeStandard { f, alpha }, _) => {
                let a = alpha.tan();
                let ia = Complex64::new(0.0, a);
                let zeta = Complex64::from_polar(1.0, a * t) * z;
                let l = f.local(zeta, region)?;
                let e = ((ONE - ia) * t).exp();
                ChainPoint {
                    value: e * l.value,
                    dt: e * ((ONE - ia) * l.value + ia * zeta * l.first),
                    dz: t.exp() * l.first,
                    p: ia + (ONE - ia) * l.over_z / l.first,
                }
            }
            (ChainVariant::Exponential { c, .. }, SpatialData::Local(l)) => {
                let e = (c * t).exp();
                let value = e * l.value;
                ChainPoint {
                    value,
                    dt: c * value,
                    dz: e * l.first,
                    p: c * l.over_z / l.first,
                }
            }
            (
                ChainVariant::SheilSmall { alpha, beta, .. },
                SpatialData::SheilSmall { l, lg, c },
            ) => {
                let (lg, c) = (*lg, *c);
                let gamma = Complex64::new(*alpha, *beta);
                let s = t.exp_m1();
                let b = ONE + s * lg;
                if b.norm() == 0.0 {
                    return Err(region_error(z, region));
                }
                let pw = (b.ln() / gamma).exp();
                let e = t.exp();
                ChainPoint {
                    value: l.value * pw,
                    dt: e / gamma * z * l.first * pw / b,
                    dz: l.first * (pw / b) * (b + s / gamma * (c - lg)),
                    p: (gamma / e + (-(-t).exp_m1()) * (c + (gamma - 1.0) * lg)).inv(),
                }
            }
            (
                ChainVariant::BazilevicIntegral { alpha, beta, .. },
                SpatialData::Bazilevic { q0, gf, hv, h0 },
            ) => {
                let (q0, gf, hv, h0) = (*q0, *gf, *hv, *h0);
                let gamma = Complex64::new(*alpha, *beta);
                let s = t.exp_m1();
                let bt = q0 + s * gamma * gf;
                if q0.norm() == 0.0 || bt.norm() == 0.0 {
                    return Err(region_error(z, region));
                }
                let log_bt = q0.ln() + (bt / q0).ln();
                let inv_gamma = gamma.inv();
                let pw = (log_bt * (inv_gamma - 1.0)).exp();
                let denom = hv + s * h0;
                ChainPoint {
                    value: z * (log_bt * inv_gamma).exp(),
                    dt: z * t.exp() * gf * pw,
                    dz: pw * gf * denom,
                    p: t.exp() / denom,
                }
            }
            _ => unreachable!("spatial data is built by the same chain"),
        };
        // On the closed disk p may blow up where f' vanishes while the
        // chain values themselves stay finite.
        let p_ok = region == Region::Closed || point.p.is_finite();
        if point.value.is_finite() && point.dt.is_finite() && point.dz.is_finite() && p_ok {
            Ok(point)
        } else {
            Err(region_error(z, region))
        }
    }
}

pub(crate) struct Spatial {
    z: Complex64,
    region: Region,
    data: SpatialData,
}

enum SpatialData {
    Local(Local),
    /// The spirallike chain reads `f` at a point that rotates with time.
    Rotating,
    SheilSmall {
        l: Local,
        lg: Complex64,
        c: Complex64,
    },
    Bazilevic {
        q0: Complex64,
        gf: Complex64,
        hv: Complex64,
        h0: Complex64,
    },
}

fn region_error(z: Complex64, region: Region) -> Error {
    if region == Region::Closed && z.norm() >= 1.0 - 1e-9 {
        Error::BoundarySingularity(z)
    } else {
        Error::Singularity(z)
    }
}

fn check_type(alpha: f64, beta: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "Bazilevič type needs α > 0 and finite β (α = {alpha}, β = {beta})"
        )))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "chain time {t} must be finite and >= 0"
        )))
    }
}

/// A sampled boundary point of `f_s` that no tested contour of `f_t` covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationWitness {
    pub s: f64,
    pub t: f64,
    pub theta: f64,
    pub target: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub chain: String,
    pub variant: ChainVariant,
    pub times: Vec<f64>,
    pub grid: GridSpec,
    pub herglotz_margin: f64,
    /// `(z, t, p)` where `Re p` is smallest.
    pub herglotz_witness: (Complex64, f64, Complex64),
    pub disk: Option<DiskSpec>,
    pub disk_dilatation: Option<f64>,
    pub disk_witness: Option<(Complex64, f64, Complex64)>,
    pub a1_monotone: bool,
    pub escape_time: f64,
    /// `sup |f(z,t)/a₁(t)|` over the sweep; only finiteness is asserted.
    pub sup_f_over_a1: f64,
    /// `max |ḟ - z f' p| / (1 + |ḟ|)`.
    pub loewner_residual: f64,
    /// `max |ḟ - ḟ_fd| / (1 + |ḟ|)` with a central difference in `t`.
    pub consistency_residual: f64,
    pub subordination_checked: usize,
    pub subordination_inconclusive: usize,
    pub subordination_violations: Vec<SubordinationWitness>,
    pub warnings: Vec<String>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.herglotz_margin > 0.0
            && self.a1_monotone
            && self.sup_f_over_a1.is_finite()
            && self.subordination_violations.is_empty()
            && match (self.disk, self.disk_dilatation) {
                (Some(d), Some(k)) => k <= d.k(),
                _ => true,
            }
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::new();
        doc.section("chain").text("chain", self.chain.clone());
        self.variant.describe(&mut doc);
        doc.reals("times", &self.times);
        self.grid.describe(&mut doc);
        let (wz, wt, wp) = self.herglotz_witness;
        doc.real("herglotz_margin", self.herglotz_margin)
            .complex("herglotz_witness_z", wz)
            .real("herglotz_witness_t", wt)
            .complex("herglotz_witness_p", wp);
        if let (Some(d), Some(k)) = (self.disk, self.disk_dilatation) {
            doc.real("disk_alpha", d.alpha())
                .real("disk_k", d.k())
                .real("disk_dilatation", k);
            if let Some((z, t, p)) = self.disk_witness {
                doc.complex("disk_witness_z", z)
                    .real("disk_witness_t", t)
                    .complex("disk_witness_p", p);
            }
        }
        doc.flag("a1_monotone", self.a1_monotone)
            .real("escape_time", self.escape_time)
            .real("sup_f_over_a1", self.sup_f_over_a1)
            .real("loewner_residual", self.loewner_residual)
            .real("consistency_residual", self.consistency_residual)
            .integer("subordination_checked", self.subordination_checked)
            .integer(
                "subordination_inconclusive",
                self.subordination_inconclusive,
            )
            .integer(
                "subordination_violations",
                self.subordination_violations.len(),
            );
        for (i, v) in self.subordination_violations.iter().enumerate() {
            doc.text(
                &format!("subordination_witness_{i}"),
                format!(
                    "s={} t={} theta={} w={}",
                    v.s,
                    v.t,
                    v.theta,
                    fmt_complex(v.target)
                ),
            );
        }
        doc.flag("passed", self.passed())
            .text("warnings", self.warnings.join("; "));
        doc
    }
}

struct SweepSample {
    z: Complex64,
    t: f64,
    p: Complex64,
    disk_k: f64,
    f_over_a1: f64,
    loewner: f64,
    consistency: f64,
}

fn time_derivative_fd(ch: &LoewnerChain, sp: &Spatial, t: f64) -> Result<Complex64> {
    // The closed forms are analytic in t, so the stencil may dip below t = 0.
    let f = |tt: f64| ch.at(sp, tt).map(|p| p.value);
    let central = |h: f64| -> Result<Complex64> { Ok((f(t + h)? - f(t - h)?) / (2.0 * h)) };
    Ok((4.0 * central(0.5 * TIME_STEP)? - central(TIME_STEP)?) / 3.0)
}

/// Checks the chain conditions on `grid × times`: positivity of `Re p`
/// (or `p ∈ U(α, k)` when a disk is given), growth of `|a₁|`, boundedness
/// of `f/a₁`, the Loewner equation itself, and a one-sided subordination
/// falsifier based on winding numbers.
pub fn verify_chain(
    ch: &LoewnerChain,
    grid: &GridSpec,
    times: &[f64],
    disk: Option<&DiskSpec>,
) -> Result<ChainReport> {
    if times.is_empty() {
        return Err(Error::Parameter(
            "verify_chain needs at least one time".into(),
        ));
    }
    let mut times: Vec<f64> = times.to_vec();
    for &t in &times {
        check_time(t)?;
    }
    times.sort_by(f64::total_cmp);
    times.dedup();

    let points = grid.points();
    let per_point: Vec<Vec<SweepSample>> = points
        .par_iter()
        .map(|&z| {
            let sp = ch.spatial(z, Region::Open)?;
            times
                .iter()
                .map(|&t| {
                    let cp = ch.at(&sp, t)?;
                    let fd = time_derivative_fd(ch, &sp, t)?;
                    let scale = 1.0 + cp.dt.norm();
                    Ok(SweepSample {
                        z,
                        t,
                        p: cp.p,
                        disk_k: disk.map_or(0.0, |d| min_k(cp.p, d.alpha())),
                        f_over_a1: (cp.value / ch.a1(t)).norm(),
                        loewner: (cp.dt - z * cp.dz * cp.p).norm() / scale,
                        consistency: (cp.dt - fd).norm() / scale,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // Reduce in time-major order so ties resolve to the earliest time.
    let samples: Vec<&SweepSample> = (0..times.len())
        .flat_map(|ti| per_point.iter().map(move |row| &row[ti]))
        .collect();

    let mut herglotz = (f64::INFINITY, (Complex64::new(0.0, 0.0), 0.0, ONE));
    let mut disk_sup = (f64::NEG_INFINITY, None);
    let (mut sup_ratio, mut loewner, mut consistency) = (0.0f64, 0.0f64, 0.0f64);
    for s in &samples {
        if s.p.re < herglotz.0 {
            herglotz = (s.p.re, (s.z, s.t, s.p));
        }
        if disk.is_some() && s.disk_k > disk_sup.0 {
            disk_sup = (s.disk_k, Some((s.z, s.t, s.p)));
        }
        sup_ratio = sup_ratio.max(s.f_over_a1);
        loewner = loewner.max(s.loewner);
        consistency = consistency.max(s.consistency);
    }

    let (t_lo, t_hi) = (times[0], times[times.len() - 1]);
    let mut fine: Vec<f64> = (0..=64)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / 64.0)
        .collect();
    fine.extend(times.iter().copied());
    fine.sort_by(f64::total_cmp);
    fine.dedup();
    let a1_monotone = fine
        .windows(2)
        .all(|w| ch.log_a1(w[1]).re > ch.log_a1(w[0]).re);

    let (checked, inconclusive, violations) = subordination(ch, grid, &times)?;

    let mut warnings = ch.warnings().to_vec();
    if !sup_ratio.is_finite() {
        warnings.push("f/a₁ is unbounded on the sweep".into());
    }
    Ok(ChainReport {
        chain: ch.label(),
        variant: ch.variant().clone(),
        times,
        grid: grid.clone(),
        herglotz_margin: herglotz.0,
        herglotz_witness: herglotz.1,
        disk: disk.copied(),
        disk_dilatation: disk.map(|_| disk_sup.0),
        disk_witness: disk_sup.1,
        a1_monotone,
        escape_time: ch.escape_time()?,
        sup_f_over_a1: sup_ratio,
        loewner_residual: loewner,
        consistency_residual: consistency,
        subordination_checked: checked,
        subordination_inconclusive: inconclusive,
        subordination_violations: violations,
        warnings,
    })
}

/// For `s < t`, `f_s = f_t ∘ ω` with `|ω(z)| <= |z|`, so every
/// `w = f_s(r e^{iθ})` has a preimage under `f_t` in `|z| < r'` for any
/// `r' > r`. A point is a violation when every usable contour gives count 0.
fn subordination(
    ch: &LoewnerChain,
    grid: &GridSpec,
    times: &[f64],
) -> Result<(usize, usize, Vec<SubordinationWitness>)> {
    let r_sub = grid.r_max().min(SUBORDINATION_MAX_RADIUS);
    let radii: Vec<f64> = (1..=SUBORDINATION_CONTOURS)
        .map(|j| r_sub + (1.0 - r_sub) * j as f64 / (SUBORDINATION_CONTOURS + 1) as f64)
        .collect();
    let mut checked = 0;
    let mut inconclusive = 0;
    let mut violations = Vec::new();
    let grids: Vec<Vec<Spatial>> = radii
        .par_iter()
        .map(|&r| {
            (0..SUBORDINATION_POINTS)
                .map(|j| {
                    let z =
                        Complex64::from_polar(r, 2.0 * PI * j as f64 / SUBORDINATION_POINTS as f64);
                    ch.spatial(z, Region::Open)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for pair in times.windows(2) {
        let (s, t) = (pair[0], pair[1]);
        let contours: Vec<ContourSamples> = radii
            .par_iter()
            .zip(&grids)
            .map(|(&r, sps)| {
                let vals: Vec<(Complex64, Complex64)> = sps
                    .iter()
                    .map(|sp| ch.at(sp, t).map(|p| (p.value, p.dz)))
                    .collect::<Result<_>>()?;
                ContourSamples::from_values(r, vals)
            })
            .collect::<Result<_>>()?;
        let targets: Vec<(f64, Complex64)> = (0..SUBORDINATION_ANGLES)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / SUBORDINATION_ANGLES as f64;
                let w = ch
                    .eval_in(Complex64::from_polar(r_sub, theta), s, Region::Open)?
                    .value;
                Ok((theta, w))
            })
            .collect::<Result<_>>()?;
        let outcomes: Vec<Option<bool>> = targets
            .par_iter()
            .map(|&(_, w)| {
                let mut any_valid = false;
                for c in &contours {
                    if let Ok(n) = c.count(w) {
                        any_valid = true;
                        if n >= 1 {
                            return Some(true);
                        }
                    }
                }
                if any_valid {
                    Some(false)
                } else {
                    None
                }
            })
            .collect();
        for (&(theta, w), outcome) in targets.iter().zip(outcomes) {
            checked += 1;
            match outcome {
                Some(true) => {}
                Some(false) => violations.push(SubordinationWitness {
                    s,
                    t,
                    theta,
                    target: w,
                }),
                None => inconclusive += 1,
            }
        }
    }
    Ok((checked, inconclusive, violations))
}

/// A chain rotated and reparametrized so that `h'(0, t) = e^t`:
/// `h(z, t) = f(e^{iλ} z, s) / |a₁(0)|` with `|a₁(s)| = |a₁(0)| e^t` and
/// `λ = -arg a₁(s)` (continuous branch).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedChain {
    chain: LoewnerChain,
    pub t: f64,
    pub s: f64,
    pub lambda: f64,
    pub scale: f64,
}

impl NormalizedChain {
    pub fn eval(&self, z: Complex64) -> Result<Derivatives> {
        let rot = Complex64::from_polar(1.0, self.lambda);
        let zz = rot * z;
        let p = self.chain.eval_in(zz, self.s, Region::Open)?;
        let second = {
            let h = 1e-4;
            let d = |w: Complex64| self.chain.eval_in(w, self.s, Region::Open).map(|p| p.dz);
            if zz.norm() + h < 1.0 {
                (d(zz + h)? - d(zz - h)?) / (2.0 * h)
            } else {
                Complex64::new(f64::NAN, f64::NAN)
            }
        };
        Ok(Derivatives {
            value: p.value / self.scale,
            first: rot * p.dz / self.scale,
            second: rot * rot * second / self.scale,
        })
    }

    /// `h'(0, t)`, which equals `e^t`.
    pub fn derivative_at_origin(&self) -> Result<Complex64> {
        Ok(self.eval(Complex64::new(0.0, 0.0))?.first)
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::new();
        doc.section("normalization")
            .text("chain", self.chain.label())
            .real("t", self.t)
            .real("s", self.s)
            .real("lambda", self.lambda)
            .real("a1_modulus_at_0", self.scale);
        if let Ok(d) = self.derivative_at_origin() {
            doc.complex("h_prime_at_0", d).real("exp_t", self.t.exp());
        }
        doc
    }
}

/// Solves `|a₁(s)| = |a₁(0)| e^t` by bracketing and bisection.
pub fn normalize_chain(ch: &LoewnerChain, t: f64) -> Result<NormalizedChain> {
    check_time(t)?;
    let base = ch.log_a1(0.0).re;
    let target = base + t;
    let b = |s: f64| ch.log_a1(s).re;
    let mut hi = 1.0f64;
    let mut guard = 0;
    while b(hi) < target {
        hi *= 2.0;
        guard += 1;
        if guard > 200 || !b(hi).is_finite() {
            return Err(Error::Bracket(format!(
                "|a₁| does not reach e^{t}|a₁(0)| for {}",
                ch.label()
            )));
        }
    }
    let mut lo = 0.0f64;
    if b(lo) > target {
        return Err(Error::Bracket(format!(
            "|a₁| is not increasing for {}",
            ch.label()
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if b(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    let s = if (b(lo) - target).abs() <= (b(hi) - target).abs() {
        lo
    } else {
        hi
    };
    Ok(NormalizedChain {
        chain: ch.clone(),
        t,
        s,
        lambda: -ch.log_a1(s).im,
        scale: base.exp(),
    })
}
