//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands on a real interval.

use num_complex::Complex64;

use crate::error::Result;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_PANELS: usize = 400;
const ROUNDING: f64 = 50.0 * f64::EPSILON;
const INITIAL_PANELS: usize = 4;

/// `(kronrod, |kronrod - gauss|)` on `[a, b]`.
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Ok((kron * half, ((kron - gauss) * half).norm()))
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
}

/// Integral of `f` over `[a, b]` to a relative tolerance `rel_tol`.
///
/// Panels are split globally, always bisecting the one with the largest error
/// estimate, until the summed estimate is below tolerance or the rounding floor.
pub(crate) fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(MAX_PANELS + 1);
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            lo + width
        };
        let (value, err) = gk15(&f, lo, hi)?;
        panels.push(Panel { lo, hi, value, err });
    }
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let magnitude: f64 = panels.iter().map(|p| p.value.norm()).sum();
        let tol = (rel_tol * total.norm()).max(ROUNDING * magnitude);
        if err <= tol || panels.len() >= MAX_PANELS {
            return Ok(total);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.lo + panel.hi);
        if !(mid > panel.lo && mid < panel.hi) {
            return Ok(total);
        }
        let (v1, e1) = gk15(&f, panel.lo, mid)?;
        let (v2, e2) = gk15(&f, mid, panel.hi)?;
        panels.push(Panel {
            lo: panel.lo,
            hi: mid,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            lo: mid,
            hi: panel.hi,
            value: v2,
            err: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| Ok(Complex64::new(x * x * x, x)), 0.0, 2.0, 1e-14).unwrap();
        assert!((v - Complex64::new(4.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn near_singular_integrand() {
        // ∫₀¹ dx / (1 - e^{iθ} x)² = 1 / (1 - e^{iθ})
        let w = Complex64::from_polar(1.0, 0.05);
        let v = integrate(
            |x| Ok((Complex64::new(1.0, 0.0) - w * x).powi(-2)),
            0.0,
            1.0,
            1e-14,
        )
        .unwrap();
        let exact = (Complex64::new(1.0, 0.0) - w).inv();
        assert!((v - exact).norm() / exact.norm() < 1e-12);
    }
}
