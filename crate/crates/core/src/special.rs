//! Gamma function and unit-sphere volumes.

use crate::math::{exp, ln, powf, sin, sqrt, PI};

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (about 15 significant digits
/// for moderate arguments), with reflection for `x < 1/2`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin(PI * x) * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (k, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + k as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        sqrt(2.0 * PI) * powf(t, x + 0.5) * exp(-t) * acc
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    ln(gamma(x))
}

/// Volume of the unit round sphere `S^m`, `2 π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn unit_sphere_volume(m: usize) -> f64 {
    let h = (m as f64 + 1.0) * 0.5;
    2.0 * powf(PI, h) / gamma(h)
}
