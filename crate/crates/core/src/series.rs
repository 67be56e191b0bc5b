//! Truncated power series over the complex numbers.
//!
//! A [`PowerSeries`] of order `N` stores `c₀..c_N`. Binary operations require
//! equal orders and keep that order; callers [`truncate`](PowerSeries::truncate)
//! first when mixing.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// Tolerance for treating a computed constant term as exactly one.
const UNIT_CONSTANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from `c₀..c_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parameter("a power series needs at least c₀".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("non-finite coefficient {c}")));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// The identity series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `cₙ`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Re-truncates to `order`, padding with zeros when growing.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// Multiplicative inverse; requires `c₀ ≠ 0`.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::SingularSeries);
        }
        let inv0 = a0.inv();
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[0] = inv0;
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * b[k - j];
            }
            b[k] = -acc * inv0;
        }
        Ok(Self { coeffs: b })
    }

    /// Term-wise derivative; the order is kept and the top coefficient becomes 0.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            out[k - 1] = self.coeffs[k] * k as f64;
        }
        Self { coeffs: out }
    }

    /// Term-wise antiderivative vanishing at 0; `c_N` falls off the end.
    pub fn integrate(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            out[k] = self.coeffs[k - 1] / k as f64;
        }
        Self { coeffs: out }
    }

    /// Multiplication by `z` (top coefficient dropped).
    pub fn shift_up(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[1..].copy_from_slice(&self.coeffs[..n]);
        Self { coeffs: out }
    }

    /// Division by `z`; requires `c₀ = 0`. The new top coefficient is 0.
    pub fn shift_down(&self) -> Result<Self> {
        if self.coeffs[0].norm() != 0.0 {
            return Err(Error::Parameter(format!(
                "cannot divide by z: constant term {}",
                self.coeffs[0]
            )));
        }
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[..n].copy_from_slice(&self.coeffs[1..]);
        Ok(Self { coeffs: out })
    }

    fn unit_normalized(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if (c0 - 1.0).norm() > UNIT_CONSTANT_TOL {
            return Err(Error::Normalization(c0));
        }
        Ok(self.scale(c0.inv()))
    }

    /// Principal logarithm of a unit-constant-term series, via
    /// `(log a)' = a'/a` written as a recurrence.
    pub fn log(&self) -> Result<Self> {
        let a = self.unit_normalized()?;
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            let mut acc = a.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= b[j] * a.coeffs[k - j] * j as f64;
            }
            b[k] = acc / k as f64;
        }
        Ok(Self { coeffs: b })
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0].norm() != 0.0 {
            return Err(Error::Parameter(format!(
                "exp needs a zero constant term, found {}",
                self.coeffs[0]
            )));
        }
        let n = self.order();
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Ok(Self { coeffs: e })
    }

    /// `exp(γ · log a)` for `a(0) = 1`; the branch with value 1 at the origin.
    pub fn pow_principal(&self, gamma: Complex64) -> Result<Self> {
        self.log()?.scale(gamma).exp()
    }

    /// Horner evaluation; the series is only meaningful inside the unit disk.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain(z));
        }
        Ok(horner(&self.coeffs, z))
    }

    /// Value and first two derivatives at `z`, `|z| < 1`.
    pub fn evaluate_jet(&self, z: Complex64) -> Result<[Complex64; 3]> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain(z));
        }
        let mut out = [Complex64::new(0.0, 0.0); 3];
        horner_jet(&self.coeffs, z, &mut out);
        Ok(out)
    }
}

/// Plain Horner sum of `Σ cₙ zⁿ`, highest degree first.
pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Value and derivatives `out[k] = p⁽ᵏ⁾(z)` by repeated synthetic division.
pub(crate) fn horner_jet(coeffs: &[Complex64], z: Complex64, out: &mut [Complex64]) {
    for o in out.iter_mut() {
        *o = Complex64::new(0.0, 0.0);
    }
    let m = out.len();
    for c in coeffs.iter().rev() {
        for k in (1..m).rev() {
            out[k] = out[k] * z + out[k - 1];
        }
        out[0] = out[0] * z + c;
    }
    let mut fact = 1.0;
    for (k, o) in out.iter_mut().enumerate().skip(2) {
        fact *= k as f64;
        *o *= fact;
    }
}
