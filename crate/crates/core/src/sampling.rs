//! Low-discrepancy point sets in the disk.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Radical inverse of `index` in `base` (van der Corput sequence).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    acc
}

/// The `(2, 3)` Halton point number `index`.
pub fn halton2(index: u64) -> (f64, f64) {
    (radical_inverse(index, 2), radical_inverse(index, 3))
}

/// `n` quasi-uniform points in `|z| <= r`. The radius uses the square-root
/// map so the density is uniform in area; `seed` offsets the sequence.
pub fn disk_points(n: usize, r: f64, seed: u64) -> Vec<Complex64> {
    let start = seed.wrapping_mul(0x9E37_79B9).wrapping_add(1) % (1 << 40);
    (0..n as u64)
        .map(|i| {
            let (u, v) = halton2(start + i);
            Complex64::from_polar(r * u.sqrt(), 2.0 * PI * v)
        })
        .collect()
}
