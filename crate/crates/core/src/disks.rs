//! The disk families `U(k) = {w : |(w-1)/(w+1)| <= k}` and their tilted
//! versions `U(α, k)`, hyperbolic disks about 1 in `Re(e^{iα} w) > 0`.
//!
//! Membership and the minimal `k` are computed from the Möbius form
//! `|w - 1| <= k |w + e^{-2iα}|`. Expanding both sides shows that the
//! boundary of this set is the circle with center `(1 + k² e^{-2iα})/(1-k²)`
//! and radius `2k cos α/(1-k²)`; the unit tests sweep that circle.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSpec {
    alpha: f64,
    k: f64,
}

impl DiskSpec {
    pub fn new(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha.abs() < FRAC_PI_2) {
            return Err(Error::Parameter(format!(
                "tilt {alpha} outside (-π/2, π/2)"
            )));
        }
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Parameter(format!(
                "dilatation bound {k} outside [0, 1)"
            )));
        }
        Ok(Self { alpha, k })
    }

    /// `U(k)`, the untilted disk.
    pub fn untilted(k: f64) -> Result<Self> {
        Self::new(0.0, k)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn contains(&self, w: Complex64) -> bool {
        membership(w, self)
    }

    /// `(center, radius)` of the disk.
    pub fn params(&self) -> (Complex64, f64) {
        let k2 = self.k * self.k;
        let denom = 1.0 - k2;
        let center = (1.0 + Complex64::from_polar(k2, -2.0 * self.alpha)) / denom;
        (center, 2.0 * self.k * self.alpha.cos() / denom)
    }
}

pub fn membership(w: Complex64, d: &DiskSpec) -> bool {
    (w - 1.0).norm() <= d.k * (w + Complex64::from_polar(1.0, -2.0 * d.alpha)).norm()
}

/// Smallest `k` with `w ∈ U(α, k)`; `+∞` at the excluded point `-e^{-2iα}`.
/// Values `>= 1` mean `w` lies in no disk of the family.
pub fn min_k(w: Complex64, alpha: f64) -> f64 {
    let den = (w + Complex64::from_polar(1.0, -2.0 * alpha)).norm();
    if den == 0.0 {
        f64::INFINITY
    } else {
        (w - 1.0).norm() / den
    }
}

/// Center and radius for `(α, k)`; `k >= 1` is a domain error.
pub fn disk_params(alpha: f64, k: f64) -> Result<(Complex64, f64)> {
    if !(0.0..1.0).contains(&k) || !k.is_finite() {
        return Err(Error::Parameter(format!(
            "disk parameters need 0 <= k < 1, found {k}"
        )));
    }
    Ok(DiskSpec { alpha, k }.params())
}
