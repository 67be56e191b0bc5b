//! Normalized analytic functions on the unit disk (`f(0) = 0`, `f'(0) = 1`).
//!
//! Catalog members carry closed forms, so they can also be evaluated on the
//! unit circle away from their poles; that is what the Becker extension
//! needs. Series-backed members are evaluated through [`PowerSeries`].

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::series::{horner, horner_jet, PowerSeries};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Slack allowed on `|z| <= 1` for boundary evaluation.
const CLOSURE_SLACK: f64 = 1e-12;
/// Distance to a catalog pole below which evaluation is refused.
const POLE_GUARD: f64 = 1e-12;
/// Relative tolerance of the Bazilevič bracket quadrature.
const BRACKET_TOL: f64 = 1e-14;

/// Where a point is allowed to lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Region {
    Open,
    Closed,
}

impl Region {
    pub(crate) fn check(self, z: Complex64) -> Result<()> {
        let r = z.norm();
        let ok = match self {
            Region::Open => r < 1.0,
            Region::Closed => r <= 1.0 + CLOSURE_SLACK,
        };
        if ok && z.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(z))
        }
    }

    fn singular(self, z: Complex64) -> Error {
        match self {
            Region::Open => Error::Singularity(z),
            Region::Closed if z.norm() >= 1.0 - 1e-9 => Error::BoundarySingularity(z),
            Region::Closed => Error::Singularity(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: Complex64,
    pub first: Complex64,
    pub second: Complex64,
}

/// Everything the criteria and chains read off a function at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Local {
    pub value: Complex64,
    pub first: Complex64,
    pub second: Complex64,
    /// `f(z)/z`, equal to 1 at the origin.
    pub over_z: Complex64,
}

impl Local {
    fn finite(self, z: Complex64, region: Region) -> Result<Self> {
        if self.value.is_finite()
            && self.first.is_finite()
            && self.second.is_finite()
            && self.over_z.is_finite()
        {
            Ok(self)
        } else {
            Err(region.singular(z))
        }
    }

    /// `z f'/f`, computed as `f' / (f/z)` so the origin needs no special case.
    pub(crate) fn log_derivative(&self, z: Complex64, region: Region) -> Result<Complex64> {
        if self.over_z.norm() == 0.0 {
            return Err(region.singular(z));
        }
        let l = self.first / self.over_z;
        if l.is_finite() {
            Ok(l)
        } else {
            Err(region.singular(z))
        }
    }

    /// `1 + z f''/f'`.
    pub(crate) fn convexity(&self, z: Complex64, region: Region) -> Result<Complex64> {
        if self.first.norm() == 0.0 {
            return Err(region.singular(z));
        }
        let c = ONE + z * self.second / self.first;
        if c.is_finite() {
            Ok(c)
        } else {
            Err(region.singular(z))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Identity,
    /// `z / (1 - z)²`
    Koebe,
    /// `z / (1 - z)`
    HalfPlane,
    /// `z (1 - z)^(-2 e^{-iα} cos α)`, the extremal α-spirallike function.
    SpiralKoebe {
        alpha: f64,
    },
    /// Coefficients `a₀..a_n` with `a₀ = 0`, `a₁ = 1`.
    Polynomial(Vec<Complex64>),
    SeriesBacked(PowerSeries),
    BazilevicBuilt(Box<Bazilevic>),
    /// `α f + (1 - α) z f'` for a base function with a third derivative.
    ConvexCombination {
        base: Box<AnalyticFunction>,
        alpha: Complex64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    kind: FunctionKind,
}

impl AnalyticFunction {
    pub fn identity() -> Self {
        Self {
            kind: FunctionKind::Identity,
        }
    }

    pub fn koebe() -> Self {
        Self {
            kind: FunctionKind::Koebe,
        }
    }

    pub fn half_plane() -> Self {
        Self {
            kind: FunctionKind::HalfPlane,
        }
    }

    pub fn spiral_koebe(alpha: f64) -> Result<Self> {
        if !(alpha.abs() < FRAC_PI_2) {
            return Err(Error::Parameter(format!(
                "spiral angle {alpha} outside (-π/2, π/2)"
            )));
        }
        Ok(Self {
            kind: FunctionKind::SpiralKoebe { alpha },
        })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        check_normalized(&coeffs)?;
        Ok(Self {
            kind: FunctionKind::Polynomial(coeffs),
        })
    }

    pub fn from_series(series: PowerSeries) -> Result<Self> {
        check_normalized(series.coeffs())?;
        Ok(Self {
            kind: FunctionKind::SeriesBacked(series),
        })
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            FunctionKind::Identity => "identity".into(),
            FunctionKind::Koebe => "koebe".into(),
            FunctionKind::HalfPlane => "half-plane".into(),
            FunctionKind::SpiralKoebe { alpha } => format!("spiral-koebe:{alpha}"),
            FunctionKind::Polynomial(c) => format!("polynomial(degree {})", c.len() - 1),
            FunctionKind::SeriesBacked(s) => format!("series(order {})", s.order()),
            FunctionKind::BazilevicBuilt(b) => format!(
                "bazilevic(g={}, alpha={}, beta={}, order={})",
                b.g.label(),
                b.alpha,
                b.beta,
                b.order()
            ),
            FunctionKind::ConvexCombination { base, alpha } => {
                format!("convex-combination({}, alpha={})", base.label(), alpha)
            }
        }
    }

    /// Boundary angles where the closed form has a pole or branch point.
    pub fn singular_directions(&self) -> Vec<f64> {
        match &self.kind {
            FunctionKind::Koebe | FunctionKind::HalfPlane | FunctionKind::SpiralKoebe { .. } => {
                vec![0.0]
            }
            FunctionKind::Identity
            | FunctionKind::Polynomial(_)
            | FunctionKind::SeriesBacked(_) => Vec::new(),
            FunctionKind::BazilevicBuilt(b) => b.g.singular_directions(),
            FunctionKind::ConvexCombination { base, .. } => base.singular_directions(),
        }
    }

    /// `(f(z), f'(z), f''(z))` for `|z| < 1`.
    pub fn eval_derivatives(&self, z: Complex64) -> Result<Derivatives> {
        let l = self.local(z, Region::Open)?;
        Ok(Derivatives {
            value: l.value,
            first: l.first,
            second: l.second,
        })
    }

    /// Like [`eval_derivatives`](Self::eval_derivatives) but also accepts
    /// `|z| = 1`, failing with a boundary-singularity error at poles.
    pub fn eval_on_closure(&self, z: Complex64) -> Result<Derivatives> {
        let l = self.local(z, Region::Closed)?;
        Ok(Derivatives {
            value: l.value,
            first: l.first,
            second: l.second,
        })
    }

    /// `z f'(z) / f(z)`, with the value 1 at the origin.
    pub fn log_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.local(z, Region::Open)?.log_derivative(z, Region::Open)
    }

    /// `1 + z f''(z) / f'(z)`.
    pub fn convexity_quantity(&self, z: Complex64) -> Result<Complex64> {
        self.local(z, Region::Open)?.convexity(z, Region::Open)
    }

    /// Taylor coefficients `a₀..a_order`.
    pub fn taylor_series(&self, order: usize) -> Result<PowerSeries> {
        match &self.kind {
            FunctionKind::Identity => Ok(PowerSeries::variable(order)),
            FunctionKind::Koebe => {
                PowerSeries::new((0..=order).map(|n| Complex64::new(n as f64, 0.0)).collect())
            }
            FunctionKind::HalfPlane => PowerSeries::new(
                (0..=order)
                    .map(|n| if n == 0 { ZERO } else { ONE })
                    .collect(),
            ),
            FunctionKind::SpiralKoebe { alpha } => {
                let b = spiral_b(*alpha);
                let base = PowerSeries::new(vec![ONE, -ONE])?.truncate(order);
                Ok(base.pow_principal(-2.0 * b)?.shift_up())
            }
            FunctionKind::Polynomial(c) => Ok(PowerSeries::new(c.clone())?.truncate(order)),
            FunctionKind::SeriesBacked(s) => Ok(s.truncate(order)),
            FunctionKind::BazilevicBuilt(b) => {
                if order > b.series.order() {
                    return Err(Error::Parameter(format!(
                        "Bazilevič function was built to order {}, {order} requested",
                        b.series.order()
                    )));
                }
                Ok(b.series.truncate(order))
            }
            FunctionKind::ConvexCombination { base, alpha } => {
                let s = base.taylor_series(order)?;
                PowerSeries::new(
                    s.coeffs()
                        .iter()
                        .enumerate()
                        .map(|(n, a)| a * (alpha + (ONE - alpha) * n as f64))
                        .collect(),
                )
            }
        }
    }

    pub(crate) fn local(&self, z: Complex64, region: Region) -> Result<Local> {
        region.check(z)?;
        let local = match &self.kind {
            FunctionKind::Identity => Local {
                value: z,
                first: ONE,
                second: ZERO,
                over_z: ONE,
            },
            FunctionKind::Koebe | FunctionKind::HalfPlane | FunctionKind::SpiralKoebe { .. } => {
                let j = self.jet3(z, region)?;
                Local {
                    value: j[0],
                    first: j[1],
                    second: j[2],
                    over_z: catalog_over_z(&self.kind, z),
                }
            }
            FunctionKind::Polynomial(c) => poly_local(c, z),
            FunctionKind::SeriesBacked(s) => poly_local(s.coeffs(), z),
            FunctionKind::BazilevicBuilt(b) => b.local(z, region)?,
            FunctionKind::ConvexCombination { base, alpha } => {
                let j = base.jet3(z, region)?;
                let over = base.local(z, region)?.over_z;
                let beta = ONE - alpha;
                Local {
                    value: alpha * j[0] + beta * z * j[1],
                    first: j[1] + beta * z * j[2],
                    second: (2.0 - alpha) * j[2] + beta * z * j[3],
                    over_z: alpha * over + beta * j[1],
                }
            }
        };
        local.finite(z, region)
    }

    /// `f, f', f'', f'''`; only for kinds with closed forms or polynomials.
    pub(crate) fn jet3(&self, z: Complex64, region: Region) -> Result<[Complex64; 4]> {
        region.check(z)?;
        let w = ONE - z;
        let pole = || -> Result<()> {
            if w.norm() < POLE_GUARD {
                Err(region.singular(z))
            } else {
                Ok(())
            }
        };
        let j = match &self.kind {
            FunctionKind::Identity => [z, ONE, ZERO, ZERO],
            FunctionKind::Koebe => {
                pole()?;
                let wi = w.inv();
                let w2 = wi * wi;
                let w3 = w2 * wi;
                [
                    z * w2,
                    (ONE + z) * w3,
                    (4.0 + 2.0 * z) * w3 * wi,
                    (18.0 + 6.0 * z) * w3 * w2,
                ]
            }
            FunctionKind::HalfPlane => {
                pole()?;
                let wi = w.inv();
                let w2 = wi * wi;
                [z * wi, w2, 2.0 * w2 * wi, 6.0 * w2 * w2]
            }
            FunctionKind::SpiralKoebe { alpha } => {
                pole()?;
                let b = spiral_b(*alpha);
                let eps = Complex64::from_polar(1.0, -2.0 * alpha);
                let m = 2.0 * b + 1.0;
                let p = (-2.0 * b * w.ln()).exp();
                let wi = w.inv();
                let lin = ONE + eps * z;
                [
                    z * p,
                    p * lin * wi,
                    m * lin * p * wi * wi + eps * p * wi,
                    m * (m + 1.0) * lin * p * wi * wi * wi + 2.0 * m * eps * p * wi * wi,
                ]
            }
            FunctionKind::Polynomial(c) => {
                let mut out = [ZERO; 4];
                horner_jet(c, z, &mut out);
                out
            }
            FunctionKind::SeriesBacked(s) => {
                let mut out = [ZERO; 4];
                horner_jet(s.coeffs(), z, &mut out);
                out
            }
            FunctionKind::BazilevicBuilt(_) | FunctionKind::ConvexCombination { .. } => {
                return Err(Error::Unsupported(format!(
                    "third derivative of {}",
                    self.label()
                )))
            }
        };
        if j.iter().all(|v| v.is_finite()) {
            Ok(j)
        } else {
            Err(region.singular(z))
        }
    }

    pub(crate) fn has_third_derivative(&self) -> bool {
        !matches!(
            self.kind,
            FunctionKind::BazilevicBuilt(_) | FunctionKind::ConvexCombination { .. }
        )
    }

    pub(crate) fn convex_combination_unchecked(&self, alpha: Complex64) -> Result<Self> {
        if !self.has_third_derivative() {
            return Err(Error::Unsupported(format!(
                "convex combination of {}",
                self.label()
            )));
        }
        Ok(Self {
            kind: FunctionKind::ConvexCombination {
                base: Box::new(self.clone()),
                alpha,
            },
        })
    }

    pub(crate) fn as_bazilevic(&self) -> Option<&Bazilevic> {
        match &self.kind {
            FunctionKind::BazilevicBuilt(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_normalized(coeffs: &[Complex64]) -> Result<()> {
    if coeffs.len() < 2 || coeffs[0].norm() > 1e-12 || (coeffs[1] - ONE).norm() > 1e-12 {
        return Err(Error::Parameter(
            "coefficients must start 0, 1 (f(0) = 0, f'(0) = 1)".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Parameter("non-finite coefficient".into()));
    }
    Ok(())
}

/// `e^{-iα} cos α`.
fn spiral_b(alpha: f64) -> Complex64 {
    Complex64::from_polar(alpha.cos(), -alpha)
}

fn catalog_over_z(kind: &FunctionKind, z: Complex64) -> Complex64 {
    let w = ONE - z;
    match kind {
        FunctionKind::Koebe => (w * w).inv(),
        FunctionKind::HalfPlane => w.inv(),
        FunctionKind::SpiralKoebe { alpha } => (-2.0 * spiral_b(*alpha) * w.ln()).exp(),
        _ => unreachable!("catalog_over_z called for a non-catalog kind"),
    }
}

fn poly_local(coeffs: &[Complex64], z: Complex64) -> Local {
    let mut j = [ZERO; 3];
    horner_jet(coeffs, z, &mut j);
    Local {
        value: j[0],
        first: j[1],
        second: j[2],
        over_z: horner(&coeffs[1..], z),
    }
}

/// A Bazilevič function of type `(α, β)`:
///
/// `f(z) = [(α+iβ) ∫₀ᶻ g(ζ)^α h(ζ) ζ^{iβ-1} dζ]^{1/(α+iβ)}`.
///
/// With `γ = α + iβ` and `q = (g/z)^α h` the bracket equals `z^γ Q(z)` where
/// `Q(z) = γ Σ qₙ zⁿ/(n+γ)`, so `f = z Q^{1/γ}` and every fractional power
/// acts on a series with constant term 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Bazilevic {
    g: AnalyticFunction,
    h: PowerSeries,
    alpha: f64,
    beta: f64,
    gamma: Complex64,
    q: PowerSeries,
    core: PowerSeries,
    series: PowerSeries,
    series_radius: f64,
}

impl Bazilevic {
    pub fn g(&self) -> &AnalyticFunction {
        &self.g
    }

    pub fn h(&self) -> &PowerSeries {
        &self.h
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Series of `(g/z)^α h`.
    pub fn integrand_series(&self) -> &PowerSeries {
        &self.q
    }

    /// Series of `(f/z)^γ`.
    pub fn core_series(&self) -> &PowerSeries {
        &self.core
    }

    /// `(g(z)/z)^α`, principal branch (`|arg g/z| < π` for starlike `g`).
    pub(crate) fn g_factor(&self, z: Complex64, region: Region) -> Result<Complex64> {
        let over = self.g.local(z, region)?.over_z;
        if over.norm() == 0.0 {
            return Err(region.singular(z));
        }
        Ok((self.alpha * over.ln()).exp())
    }

    /// `Q(z) = (f(z)/z)^γ`. Inside `series_radius` this is the core series;
    /// further out the series covers `[0, ρ]` of the radial integral and
    /// adaptive quadrature the rest:
    /// `Q(z) = ρ^γ Q(ρz) + γ ∫_ρ^1 u^{γ-1} q(zu) du`.
    pub(crate) fn bracket(&self, z: Complex64, region: Region) -> Result<Complex64> {
        region.check(z)?;
        let r = z.norm();
        if r <= self.series_radius {
            return Ok(horner(self.core.coeffs(), z));
        }
        let rho = self.series_radius / r;
        let head = (self.gamma * rho.ln()).exp() * horner(self.core.coeffs(), z * rho);
        let gm1 = self.gamma - 1.0;
        let tail = quadrature::integrate(
            |u| {
                let zu = z * u;
                let g = self.g_factor(zu, region)?;
                let h = horner(self.h.coeffs(), zu);
                Ok((gm1 * u.ln()).exp() * g * h)
            },
            rho,
            1.0,
            BRACKET_TOL,
        )?;
        Ok(head + self.gamma * tail)
    }

    fn local(&self, z: Complex64, region: Region) -> Result<Local> {
        if z.norm() <= self.series_radius {
            let mut j = [ZERO; 3];
            horner_jet(self.series.coeffs(), z, &mut j);
            return Ok(Local {
                value: j[0],
                first: j[1],
                second: j[2],
                over_z: horner(&self.series.coeffs()[1..], z),
            });
        }
        let gf = self.g_factor(z, region)?;
        let mut hj = [ZERO; 2];
        horner_jet(self.h.coeffs(), z, &mut hj);
        let b = self.bracket(z, region)?;
        if b.norm() == 0.0 {
            return Err(region.singular(z));
        }
        let log_b = b.ln();
        let inv_gamma = self.gamma.inv();
        let over_z = (log_b * inv_gamma).exp();
        let first = gf * hj[0] * (log_b * (inv_gamma - 1.0)).exp();
        let l = gf * hj[0] / b;
        let lg = self.g.local(z, region)?.log_derivative(z, region)?;
        let c = ONE + self.alpha * (lg - 1.0) + z * hj[1] / hj[0] + (ONE - self.gamma) * (l - 1.0);
        Ok(Local {
            value: z * over_z,
            first,
            second: first * (c - 1.0) / z,
            over_z,
        })
    }
}

/// Builds the Bazilevič function of type `(α, β)` from a starlike `g` and a
/// series `h` with `h(0) = 1`, truncating every series at `order`.
pub fn bazilevic_construct(
    g: &AnalyticFunction,
    h: &PowerSeries,
    alpha: f64,
    beta: f64,
    order: usize,
) -> Result<AnalyticFunction> {
    if !(alpha > 0.0) || !beta.is_finite() || !alpha.is_finite() {
        return Err(Error::Parameter(format!(
            "Bazilevič type needs alpha > 0 and finite beta (alpha = {alpha}, beta = {beta})"
        )));
    }
    if order < 1 {
        return Err(Error::Parameter("order must be at least 1".into()));
    }
    if (h.coeff(0) - ONE).norm() > 1e-12 {
        return Err(Error::Normalization(h.coeff(0)));
    }
    let gamma = Complex64::new(alpha, beta);
    let h = h.truncate(order);
    let g_over_z = g.taylor_series(order + 1)?.shift_down()?.truncate(order);
    let q = g_over_z
        .pow_principal(Complex64::new(alpha, 0.0))?
        .multiply(&h)?;
    let core = PowerSeries::new(
        q.coeffs()
            .iter()
            .enumerate()
            .map(|(n, qn)| gamma * qn / (gamma + n as f64))
            .collect(),
    )?;
    let series = core.pow_principal(gamma.inv())?.shift_up();
    let series_radius = 0.5f64.min(10f64.powf(-14.0 / order as f64));
    Ok(AnalyticFunction {
        kind: FunctionKind::BazilevicBuilt(Box::new(Bazilevic {
            g: g.clone(),
            h,
            alpha,
            beta,
            gamma,
            q,
            core,
            series,
            series_radius,
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    fn catalog() -> Vec<AnalyticFunction> {
        vec![
            AnalyticFunction::identity(),
            AnalyticFunction::koebe(),
            AnalyticFunction::half_plane(),
            AnalyticFunction::spiral_koebe(0.5).unwrap(),
            AnalyticFunction::spiral_koebe(-1.1).unwrap(),
            AnalyticFunction::polynomial(vec![ZERO, ONE, c64(0.2, -0.1), c64(0.05, 0.0)]).unwrap(),
        ]
    }

    /// Taylor coefficients by the trapezoid rule on |z| = 0.5 (Cauchy integral).
    fn cauchy_coeffs(f: &AnalyticFunction, n_max: usize) -> Vec<Complex64> {
        let m = 256;
        let r = 0.5;
        let samples: Vec<Complex64> = (0..m)
            .map(|j| {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                f.eval_derivatives(z).unwrap().value
            })
            .collect();
        (0..=n_max)
            .map(|n| {
                let s: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * PI * (n * j) as f64 / m as f64)
                    })
                    .sum();
                s / (m as f64 * r.powi(n as i32))
            })
            .collect()
    }

    #[test]
    fn identity_values() {
        let d = AnalyticFunction::identity()
            .eval_derivatives(c64(0.3, 0.2))
            .unwrap();
        assert_eq!(d.value, c64(0.3, 0.2));
        assert_eq!(d.first, ONE);
        assert_eq!(d.second, ZERO);
    }

    #[test]
    fn koebe_at_half() {
        let d = AnalyticFunction::koebe()
            .eval_derivatives(c64(0.5, 0.0))
            .unwrap();
        assert!((d.value - 2.0).norm() < 1e-14);
        assert!((d.first - 12.0).norm() < 1e-12);
        assert!((d.second - 80.0).norm() < 1e-11);
        // central differences of the first derivative, step 1e-5
        let h = 1e-5;
        let k = AnalyticFunction::koebe();
        let fd = (k.eval_derivatives(c64(0.5 + h, 0.0)).unwrap().first
            - k.eval_derivatives(c64(0.5 - h, 0.0)).unwrap().first)
            / (2.0 * h);
        assert!((fd - 80.0).norm() < 1e-4);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in catalog() {
            for &z in &[c64(0.3, 0.4), c64(-0.7, 0.1), c64(0.0, -0.85)] {
                let d = f.eval_derivatives(z).unwrap();
                let jp = f.eval_derivatives(z + h).unwrap();
                let jm = f.eval_derivatives(z - h).unwrap();
                let d1 = (jp.value - jm.value) / (2.0 * h);
                let d2 = (jp.first - jm.first) / (2.0 * h);
                assert!((d1 - d.first).norm() < 1e-6 * (1.0 + d.first.norm()), "{f}");
                assert!(
                    (d2 - d.second).norm() < 1e-6 * (1.0 + d.second.norm()),
                    "{f}"
                );
                if f.has_third_derivative() {
                    let j = f.jet3(z, Region::Open).unwrap();
                    let jp = f.jet3(z + h, Region::Open).unwrap();
                    let jm = f.jet3(z - h, Region::Open).unwrap();
                    let d3 = (jp[2] - jm[2]) / (2.0 * h);
                    assert!((d3 - j[3]).norm() < 1e-6 * (1.0 + j[3].norm()), "{f}");
                }
            }
        }
    }

    #[test]
    fn normalization_at_origin() {
        for f in catalog() {
            let d = f.eval_derivatives(ZERO).unwrap();
            let a2 = f.taylor_series(4).unwrap().coeff(2);
            assert!(d.value.norm() < 1e-15);
            assert!((d.first - ONE).norm() < 1e-14);
            assert!((d.second - 2.0 * a2).norm() < 1e-12, "{f}");
            assert!((f.log_derivative(ZERO).unwrap() - ONE).norm() < 1e-14);
            assert!((f.convexity_quantity(ZERO).unwrap() - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn taylor_series_match_cauchy_integrals() {
        for f in catalog() {
            let s = f.taylor_series(12).unwrap();
            let c = cauchy_coeffs(&f, 12);
            for n in 0..=12 {
                assert!((s.coeff(n) - c[n]).norm() < 1e-10, "{f} coefficient {n}");
            }
        }
    }

    #[test]
    fn log_derivative_closed_forms() {
        let k = AnalyticFunction::koebe();
        assert!((k.log_derivative(c64(0.5, 0.0)).unwrap() - 3.0).norm() < 1e-13);
        assert_eq!(
            AnalyticFunction::identity()
                .log_derivative(c64(0.4, 0.4))
                .unwrap(),
            ONE
        );
        let hp = AnalyticFunction::half_plane();
        assert!((hp.convexity_quantity(c64(0.5, 0.0)).unwrap() - 3.0).norm() < 1e-13);
    }

    #[test]
    fn quantities_match_finite_difference_reconstruction() {
        let h = 1e-6;
        for f in catalog() {
            for i in 0..100 {
                let r = 0.9 * ((i % 10) as f64 + 0.5) / 10.0;
                let z = Complex64::from_polar(r, 2.0 * PI * (i / 10) as f64 / 10.0 + 0.1);
                let v = f.eval_derivatives(z).unwrap();
                let vp = f.eval_derivatives(z + h).unwrap();
                let vm = f.eval_derivatives(z - h).unwrap();
                let d1 = (vp.value - vm.value) / (2.0 * h);
                let d2 = (vp.first - vm.first) / (2.0 * h);
                let l = z * d1 / v.value;
                let c = 1.0 + z * d2 / v.first;
                let scale_l = 1.0 + l.norm();
                let scale_c = 1.0 + c.norm();
                assert!(
                    (f.log_derivative(z).unwrap() - l).norm() < 1e-7 * scale_l,
                    "{f} at {z}"
                );
                assert!(
                    (f.convexity_quantity(z).unwrap() - c).norm() < 1e-7 * scale_c,
                    "{f} at {z}"
                );
            }
        }
    }

    #[test]
    fn spiral_koebe_is_spirallike_on_grid() {
        for &alpha in &[0.5, -0.3, 1.2] {
            let f = AnalyticFunction::spiral_koebe(alpha).unwrap();
            let rot = Complex64::from_polar(1.0, alpha);
            for ri in 1..=99 {
                let r = ri as f64 / 100.0;
                for j in 0..64 {
                    let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 64.0);
                    assert!((rot * f.log_derivative(z).unwrap()).re > 0.0);
                }
            }
        }
        assert!(AnalyticFunction::spiral_koebe(PI / 2.0).is_err());
    }

    #[test]
    fn domain_and_boundary() {
        let k = AnalyticFunction::koebe();
        assert!(matches!(
            k.eval_derivatives(c64(1.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            k.eval_on_closure(c64(1.0, 0.0)),
            Err(Error::BoundarySingularity(_))
        ));
        let v = k.eval_on_closure(c64(-1.0, 0.0)).unwrap();
        assert!((v.value + 0.25).norm() < 1e-15);
    }

    #[test]
    fn bazilevic_identity_core() {
        for &(a, b) in &[(0.5, 0.0), (1.0, 1.0), (2.0, -0.7), (0.3, 2.5), (3.0, 0.2)] {
            let f = bazilevic_construct(
                &AnalyticFunction::identity(),
                &PowerSeries::one(20),
                a,
                b,
                20,
            )
            .unwrap();
            let s = f.taylor_series(20).unwrap();
            assert!((s.coeff(1) - ONE).norm() < 1e-15);
            for n in 2..=20 {
                assert!(s.coeff(n).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bazilevic_koebe_is_half_plane() {
        let f = bazilevic_construct(
            &AnalyticFunction::koebe(),
            &PowerSeries::one(30),
            1.0,
            0.0,
            30,
        )
        .unwrap();
        let s = f.taylor_series(30).unwrap();
        for n in 1..=30 {
            assert!((s.coeff(n) - ONE).norm() < 1e-10, "coefficient {n}");
        }
        // beyond the series radius the quadrature path takes over
        let hp = AnalyticFunction::half_plane();
        for &z in &[c64(0.6, 0.3), c64(-0.9, 0.0), c64(0.0, 0.99)] {
            let a = f.eval_derivatives(z).unwrap();
            let b = hp.eval_derivatives(z).unwrap();
            assert!((a.value - b.value).norm() < 1e-12 * b.value.norm());
            assert!((a.first - b.first).norm() < 1e-11 * b.first.norm());
            assert!((a.second - b.second).norm() < 1e-10 * b.second.norm());
        }
        let u = Complex64::from_polar(1.0, 2.0);
        let a = f.eval_on_closure(u).unwrap();
        let b = hp.eval_on_closure(u).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
    }

    /// Composite Simpson rule of ∫₀ᶻ (1+ζ)/(1-ζ) dζ along the segment.
    fn simpson_half_plane_integral(z: Complex64) -> Complex64 {
        let n = 2000;
        let h = 1.0 / n as f64;
        let f = |t: f64| {
            let zeta = z * t;
            (ONE + zeta) / (ONE - zeta) * z
        };
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn bazilevic_against_quadrature() {
        let order = 64;
        let h = PowerSeries::new(
            (0..=order)
                .map(|n| if n == 0 { ONE } else { c64(2.0, 0.0) })
                .collect(),
        )
        .unwrap();
        let f = bazilevic_construct(&AnalyticFunction::identity(), &h, 1.0, 0.0, order).unwrap();
        let s = f.taylor_series(10).unwrap();
        assert!((s.coeff(1) - ONE).norm() < 1e-14);
        for n in 2..=10 {
            assert!((s.coeff(n) - 2.0 / n as f64).norm() < 1e-13);
        }
        for &z in &[c64(0.3, 0.1), c64(-0.4, 0.2), c64(0.0, 0.45)] {
            let v = f.eval_derivatives(z).unwrap().value;
            assert!((v - simpson_half_plane_integral(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn bazilevic_defining_relation() {
        let h = PowerSeries::new(vec![ONE, c64(0.3, 0.1), c64(-0.05, 0.0)]).unwrap();
        let gamma = c64(1.5, 0.7);
        let f =
            bazilevic_construct(&AnalyticFunction::koebe(), &h, gamma.re, gamma.im, 24).unwrap();
        let b = f.as_bazilevic().unwrap();
        let over_z = f
            .taylor_series(24)
            .unwrap()
            .shift_down()
            .unwrap()
            .truncate(23);
        let core = over_z.pow_principal(gamma).unwrap();
        // d/dz (z^γ Q)/γ = z^{γ-1} (Q + z Q'/γ) must reproduce z^{γ-1} q
        let lhs = core
            .add(&core.derivative().shift_up().scale(gamma.inv()))
            .unwrap();
        let q = b.integrand_series().truncate(23);
        for n in 0..23 {
            assert!((lhs.coeff(n) - q.coeff(n)).norm() < 1e-9, "coefficient {n}");
        }
    }

    #[test]
    fn bazilevic_rejects_bad_input() {
        let g = AnalyticFunction::identity();
        assert!(bazilevic_construct(&g, &PowerSeries::one(4), 0.0, 0.0, 4).is_err());
        let h = PowerSeries::from_real(&[2.0, 1.0]).unwrap();
        assert!(matches!(
            bazilevic_construct(&g, &h, 1.0, 0.0, 4),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn polynomial_normalization_enforced() {
        assert!(AnalyticFunction::polynomial(vec![ZERO, c64(2.0, 0.0)]).is_err());
        assert!(AnalyticFunction::polynomial(vec![ONE, ONE]).is_err());
    }
}
