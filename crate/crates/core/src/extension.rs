//! Becker's extension of a Loewner chain to the plane,
//!
//! `ĥ(z) = f(ρ z/|z|, log |z|)` for `|z| >= 1` and `ĥ(z) = f(ρ z, 0)` inside,
//!
//! where `ρ` is the boundary radius (1 for the classical construction; a
//! smaller `ρ` extends the dilated chain `f(ρz, t)` instead, which lets the
//! samples line up with a criterion grid at `|z| = ρ`).
//!
//! With `u = e^{iθ}` and `t = log r`, `∂_r ĥ = ḟ/r` and `∂_θ ĥ = iρu f'`;
//! inserting `ḟ = ρu f' p` into the polar Wirtinger derivatives gives
//! `μ = e^{2iθ} (p - 1)/(p + 1)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chains::LoewnerChain;
use crate::error::{Error, Result};
use crate::functions::Region;
use crate::report::{fmt_complex, Document};

pub const DEFAULT_RADII: [f64; 6] = [1.01, 1.1, 1.5, 2.0, 5.0, 20.0];
pub const DEFAULT_ANGLES: usize = 720;
pub const DEFAULT_EXCLUSION: f64 = 1e-3;
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeltramiSample {
    pub r: f64,
    pub theta: f64,
    /// `ĥ(r e^{iθ})`
    pub value: Complex64,
    /// Finite-difference estimate, filled only where requested.
    pub mu_fd: Option<Complex64>,
    pub mu_closed: Complex64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatationReport {
    pub chain: String,
    pub boundary_radius: f64,
    pub radii: Vec<f64>,
    pub angles: usize,
    pub sup_modulus: f64,
    pub worst: BeltramiSample,
    /// `|μ_fd - μ_closed|` at the worst sample.
    pub fd_discrepancy: f64,
    pub samples: Vec<BeltramiSample>,
    /// `(r, θ)` pairs skipped because θ is near a singular direction.
    pub excluded: Vec<(f64, f64)>,
}

impl DilatationReport {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::new();
        doc.section("extension")
            .text("chain", self.chain.clone())
            .real("boundary_radius", self.boundary_radius)
            .reals("radii", &self.radii)
            .integer("angles", self.angles)
            .integer("samples", self.samples.len())
            .integer("excluded_samples", self.excluded.len())
            .real("sup_mu", self.sup_modulus)
            .real("worst_r", self.worst.r)
            .real("worst_theta", self.worst.theta)
            .complex("worst_mu_closed", self.worst.mu_closed)
            .real("fd_discrepancy", self.fd_discrepancy);
        if let Some(fd) = self.worst.mu_fd {
            doc.complex("worst_mu_fd", fd);
        }
        let mut rays: Vec<f64> = self.excluded.iter().map(|e| e.1).collect();
        rays.sort_by(f64::total_cmp);
        rays.dedup();
        doc.reals("excluded_rays", &rays);
        doc
    }

    /// CSV with columns `r, theta, re_h, im_h, re_mu, im_mu, abs_mu`, one row
    /// per `(radius, angle)` pair. Excluded rays keep their row with the
    /// value columns left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,theta,re_h,im_h,re_mu,im_mu,abs_mu")?;
        let mut kept = self.samples.iter().peekable();
        let mut skipped = self.excluded.iter().peekable();
        for &r in &self.radii {
            for j in 0..self.angles {
                let theta = ray_angle(j, self.angles);
                if skipped.peek() == Some(&&(r, theta)) {
                    skipped.next();
                    writeln!(out, "{r},{theta},,,,,")?;
                } else if let Some(s) = kept.next() {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        s.r,
                        s.theta,
                        s.value.re,
                        s.value.im,
                        s.mu_closed.re,
                        s.mu_closed.im,
                        s.modulus
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn ray_angle(j: usize, angles: usize) -> f64 {
    2.0 * PI * j as f64 / angles as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeckerExtension {
    chain: LoewnerChain,
    boundary_radius: f64,
    exclusion_window: f64,
}

impl BeckerExtension {
    pub fn new(chain: LoewnerChain) -> Self {
        Self {
            chain,
            boundary_radius: 1.0,
            exclusion_window: DEFAULT_EXCLUSION,
        }
    }

    pub fn with_boundary_radius(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Parameter(format!(
                "boundary radius {rho} outside (0, 1]"
            )));
        }
        self.boundary_radius = rho;
        Ok(self)
    }

    pub fn with_exclusion_window(mut self, window: f64) -> Result<Self> {
        if !(window >= 0.0) {
            return Err(Error::Parameter(format!(
                "exclusion window {window} must be >= 0"
            )));
        }
        self.exclusion_window = window;
        Ok(self)
    }

    pub fn chain(&self) -> &LoewnerChain {
        &self.chain
    }

    pub fn boundary_radius(&self) -> f64 {
        self.boundary_radius
    }

    /// Whether the ray at angle `θ` passes near a singular direction of the
    /// boundary values at time `t`. Only relevant when `ρ = 1`.
    pub fn is_excluded(&self, theta: f64, t: f64) -> bool {
        if self.boundary_radius < 1.0 {
            return false;
        }
        self.chain.singular_angles(t).iter().any(|&a| {
            let d = (theta - a).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) <= self.exclusion_window
        })
    }

    /// `ĥ(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if r < 1.0 {
            return Ok(self
                .chain
                .eval_in(z * self.boundary_radius, 0.0, Region::Open)?
                .value);
        }
        let u = z / r;
        Ok(self
            .chain
            .eval_on_closure(u * self.boundary_radius, r.ln())?
            .value)
    }

    fn polar(&self, r: f64, theta: f64) -> Result<Complex64> {
        self.eval(Complex64::from_polar(r, theta))
    }

    /// `μ` from the Herglotz field: `e^{2iθ}(p - 1)/(p + 1)` at `p(ρe^{iθ}, log r)`.
    pub fn beltrami_closed(&self, r: f64, theta: f64) -> Result<Complex64> {
        if !(r >= 1.0) {
            return Err(Error::Parameter(format!(
                "exterior sample needs r >= 1, found {r}"
            )));
        }
        let u = Complex64::from_polar(self.boundary_radius, theta);
        let p = self.chain.eval_on_closure(u, r.ln())?.p;
        if !p.is_finite() {
            return Err(Error::BoundarySingularity(u));
        }
        let den = p + 1.0;
        if den.norm() == 0.0 {
            return Err(Error::DegenerateDerivative(u));
        }
        Ok(Complex64::from_polar(1.0, 2.0 * theta) * (p - 1.0) / den)
    }

    /// `μ = f_z̄ / f_z` from central differences of `ĥ` in `r` and `θ`, with
    /// one Richardson step. The angular step is `step / r`.
    pub fn beltrami_fd(&self, r: f64, theta: f64, step: f64) -> Result<Complex64> {
        if !(step > 0.0) || !(r > 1.0 + 2.0 * step) {
            return Err(Error::Parameter(format!(
                "finite-difference stencil needs r > 1 + 2·step (r = {r}, step = {step})"
            )));
        }
        let central = |h: f64| -> Result<(Complex64, Complex64)> {
            let dr = (self.polar(r + h, theta)? - self.polar(r - h, theta)?) / (2.0 * h);
            let ht = h / r;
            let dth = (self.polar(r, theta + ht)? - self.polar(r, theta - ht)?) / (2.0 * ht);
            Ok((dr, dth))
        };
        let (dr1, dt1) = central(step)?;
        let (dr2, dt2) = central(0.5 * step)?;
        let dr = (4.0 * dr2 - dr1) / 3.0;
        let dth = (4.0 * dt2 - dt1) / 3.0;
        let i = Complex64::new(0.0, 1.0);
        let fz = Complex64::from_polar(0.5, -theta) * (dr - i / r * dth);
        let fzbar = Complex64::from_polar(0.5, theta) * (dr + i / r * dth);
        if fz.norm() == 0.0 {
            return Err(Error::DegenerateDerivative(Complex64::from_polar(r, theta)));
        }
        Ok(fzbar / fz)
    }

    /// `|f_z̄|` of `ĥ` at an interior point, from Cartesian central differences.
    pub fn interior_fzbar(&self, z: Complex64, step: f64) -> Result<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let dx = (self.eval(z + step)? - self.eval(z - step)?) / (2.0 * step);
        let dy = (self.eval(z + i * step)? - self.eval(z - i * step)?) / (2.0 * step);
        Ok(0.5 * (dx + i * dy))
    }

    pub fn sample(&self, r: f64, theta: f64, with_fd: bool) -> Result<BeltramiSample> {
        let mu = self.beltrami_closed(r, theta)?;
        let mu_fd = if with_fd {
            Some(self.beltrami_fd(r, theta, DEFAULT_STEP)?)
        } else {
            None
        };
        Ok(BeltramiSample {
            r,
            theta,
            value: self.polar(r, theta)?,
            mu_fd,
            mu_closed: mu,
            modulus: mu.norm(),
        })
    }

    /// `sup |μ_closed|` over `radii × angles`, skipping excluded rays, with a
    /// finite-difference cross-check at the worst sample.
    pub fn dilatation_report(&self, radii: &[f64], angles: usize) -> Result<DilatationReport> {
        if radii.is_empty() || angles == 0 {
            return Err(Error::Parameter(
                "dilatation report needs radii and angles".into(),
            ));
        }
        if radii.iter().any(|r| !(*r >= 1.0)) {
            return Err(Error::Parameter("exterior radii must be >= 1".into()));
        }
        let jobs: Vec<(f64, f64)> = radii
            .iter()
            .flat_map(|&r| (0..angles).map(move |j| (r, ray_angle(j, angles))))
            .collect();
        let (excluded, kept): (Vec<_>, Vec<_>) = jobs
            .into_iter()
            .partition(|&(r, theta)| self.is_excluded(theta, r.ln()));
        let samples: Vec<BeltramiSample> = kept
            .par_iter()
            .map(|&(r, theta)| self.sample(r, theta, false))
            .collect::<Result<_>>()?;
        let mut worst_idx = None;
        for (i, s) in samples.iter().enumerate() {
            if worst_idx.is_none_or(|w: usize| s.modulus > samples[w].modulus) {
                worst_idx = Some(i);
            }
        }
        let Some(wi) = worst_idx else {
            return Err(Error::Parameter("every sample was excluded".into()));
        };
        let mut samples = samples;
        let worst_base = samples[wi];
        let step = DEFAULT_STEP.min(0.25 * (worst_base.r - 1.0));
        let fd = if worst_base.r > 1.0 + 2.0 * step && step > 0.0 {
            self.beltrami_fd(worst_base.r, worst_base.theta, step).ok()
        } else {
            None
        };
        samples[wi].mu_fd = fd;
        let worst = samples[wi];
        Ok(DilatationReport {
            chain: self.chain.label(),
            boundary_radius: self.boundary_radius,
            radii: radii.to_vec(),
            angles,
            sup_modulus: worst.modulus,
            worst,
            fd_discrepancy: fd.map_or(f64::NAN, |m| (m - worst.mu_closed).norm()),
            samples,
            excluded,
        })
    }
}

/// Formats `μ` for messages.
pub fn describe_sample(s: &BeltramiSample) -> String {
    format!(
        "r={} θ={} μ={} |μ|={}",
        s.r,
        s.theta,
        fmt_complex(s.mu_closed),
        s.modulus
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::functions::AnalyticFunction;

    fn identity_chain(c: Complex64) -> LoewnerChain {
        LoewnerChain::exponential(AnalyticFunction::identity(), c).unwrap()
    }

    #[test]
    fn identity_extension_is_identity() {
        let ext = BeckerExtension::new(identity_chain(c64(1.0, 0.0)));
        for &z in &[c64(0.3, 0.2), c64(-2.0, 1.0), c64(0.0, 7.5)] {
            assert!((ext.eval(z).unwrap() - z).norm() < 1e-13 * (1.0 + z.norm()));
        }
        assert!(ext.beltrami_fd(1.7, 0.4, 1e-4).unwrap().norm() < 1e-8);
        assert_eq!(ext.beltrami_closed(1.7, 0.4).unwrap().norm(), 0.0);
    }

    #[test]
    fn koebe_exponential_values_and_continuity() {
        let ext = BeckerExtension::new(
            LoewnerChain::exponential(AnalyticFunction::koebe(), c64(1.0, 0.0)).unwrap(),
        );
        assert!((ext.eval(c64(-2.0, 0.0)).unwrap() - c64(-0.5, 0.0)).norm() < 1e-14);
        for &eps in &[1e-3, 1e-5, 1e-7] {
            let out = ext.eval(Complex64::from_polar(1.0 + eps, PI)).unwrap();
            let inn = ext.eval(Complex64::from_polar(1.0 - eps, PI)).unwrap();
            assert!((out - inn).norm() < 2.0 * eps);
        }
    }

    #[test]
    fn tilted_identity_has_half_angle_dilatation() {
        let alpha: f64 = 0.6;
        let ext = BeckerExtension::new(identity_chain(Complex64::from_polar(1.0, -alpha)));
        let mu = ext.beltrami_fd(2.0, 1.0, 1e-4).unwrap();
        assert!((mu.norm() - (alpha / 2.0).tan()).abs() < 1e-6);
        let mu = ext.beltrami_closed(2.0, 1.0).unwrap();
        assert!((mu.norm() - (alpha / 2.0).tan()).abs() < 1e-14);
    }

    #[test]
    fn excluded_rays_are_listed() {
        let ext = BeckerExtension::new(
            LoewnerChain::exponential(AnalyticFunction::koebe(), c64(1.0, 0.0)).unwrap(),
        );
        let rep = ext.dilatation_report(&[1.5, 2.0], 360).unwrap();
        assert_eq!(rep.excluded.len(), 2);
        assert!(rep.excluded.iter().all(|e| e.1 == 0.0));
        assert_eq!(rep.samples.len(), 718);
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + 720);
        assert_eq!(csv.lines().filter(|l| l.ends_with(",,,,,")).count(), 2);
    }
}
