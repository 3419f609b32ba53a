//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval is split into `initial_panels` equal panels, then the panel
//! with the largest error estimate is bisected until the summed estimate
//! meets `max(abs_tol, rel_tol * |value|)` or the evaluation budget runs out.
//! A panel whose estimate has reached its round-off floor is retired rather
//! than bisected further. So is a pair of children whose estimates did not
//! improve on their parent while already within a few thousand ulps of
//! `∫|f|`: that is evaluation noise, which bisection cannot remove.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights on the odd Kronrod nodes, last entry is the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub initial_panels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_evals: 1_000_000,
            initial_panels: 1,
        }
    }
}

impl QuadSettings {
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Value, absolute-error estimate and number of integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error: self.abs_error * factor.abs(),
            evaluations: self.evaluations,
        }
    }

    /// Sum of two independent results; errors add.
    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

// Children are treated as noise-limited below this many ulps of `∫|f|`.
const NOISE_ULPS: f64 = 1e4;

/// One 15-point Kronrod panel. Returns (value, error, at_roundoff_floor, ∫|f|).
fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, bool, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = (WGK[7] * fc).abs();
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let raw = ((kron - gauss) * half).abs();
    let floor = 50.0 * f64::EPSILON * res_abs * half.abs();
    let mass = res_abs * half.abs();
    if raw <= floor {
        (value, floor, true, mass)
    } else {
        (value, raw, false, mass)
    }
}

/// Integrate `f` over `[a, b]`.
///
/// Fails with [`Error::Accuracy`] (carrying the best estimate) when the
/// budget is exhausted, and with [`Error::Domain`] when the integrand
/// returns a non-finite value.
pub fn integrate<F>(mut f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult::default());
    }
    let panels = settings.initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 2);
    let mut retired_value = 0.0;
    let mut retired_error = 0.0;
    let mut active_value = 0.0;
    let mut active_error = 0.0;
    let mut evals = 0usize;

    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        let (v, e, done, _) = kronrod_panel(&mut f, lo, hi);
        evals += 15;
        if done {
            retired_value += v;
            retired_error += e;
        } else {
            active_value += v;
            active_error += e;
            heap.push(Panel { a: lo, b: hi, value: v, error: e });
        }
    }

    loop {
        let value = retired_value + active_value;
        let error = retired_error + active_error;
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval"));
        }
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        let result = QuadratureResult { value, abs_error: error, evaluations: evals };
        // Retired panels cannot improve, so only the active part is compared.
        // Once round-off alone exceeds the target, the active part just has
        // to meet the target by itself.
        let allowance = if retired_error < target { target - retired_error } else { target };
        if active_error <= allowance || heap.is_empty() {
            return Ok(result);
        }
        if evals + 30 > settings.max_evals {
            return Err(Error::Accuracy { best: result });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split in floating point.
            retired_value += worst.value;
            retired_error += worst.error;
            active_value -= worst.value;
            active_error -= worst.error;
            continue;
        }
        active_value -= worst.value;
        active_error -= worst.error;
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        evals += 30;
        let noisy = left.1 + right.1 >= worst.error
            && left.1 + right.1 <= NOISE_ULPS * f64::EPSILON * (left.3 + right.3);
        for ((v, e, done, _), lo, hi) in [(left, worst.a, mid), (right, mid, worst.b)] {
            if done || noisy {
                retired_value += v;
                retired_error += e;
            } else {
                active_value += v;
                active_error += e;
                heap.push(Panel { a: lo, b: hi, value: v, error: e });
            }
        }
        // Re-sum occasionally to stop cancellation drift in the running totals.
        if evals % 30_000 < 30 {
            active_value = heap.iter().map(|p| p.value).sum();
            active_error = heap.iter().map(|p| p.error).sum();
        }
    }
}
