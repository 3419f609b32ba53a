//! Radially symmetric counterexample families and their closed-form
//! integrals.
//!
//! Each family is a conformal factor (or exponent) of the form
//! `trivial + χ(r) F(r²)` where `χ` is a smooth cutoff and `F` is the
//! family's profile in `s = r²`. Derivatives are analytic throughout: with
//! `p(r) = F(r²)` we have `p' = 2 r F'` and `p'' = 2 F' + 4 r² F''`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geomcore::{
    total_scalar_curvature, BaseMetric, ConformalMetricSpec, ConformalMode, RadialJet, RadialProfile,
};
use crate::math::{cos, exp, powf, powi, sin, sqrt, PI};
use crate::quad::{integrate, QuadSettings, QuadratureResult};
use crate::special::{gamma, unit_sphere_volume};

/// Smooth monotone step: `1` on `[0, r0]`, `0` from `r0 + eps/2` on.
///
/// Built from `s(x) = σ(x) / (σ(x) + σ(1-x))` with `σ(x) = e^{-1/x}` for
/// `x > 0`, composed as `s((r0 + eps/2 - r) / (eps/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCutoff {
    pub r0: f64,
    pub eps: f64,
}

fn sigma(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let s = exp(-1.0 / x);
    let x2 = x * x;
    (s, s / x2, s * (1.0 - 2.0 * x) / (x2 * x2))
}

/// Smooth step and its first two derivatives in `x`.
fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, a1, a2) = sigma(x);
    let (b, b1, b2) = sigma(1.0 - x);
    // d/dx σ(1-x) = -σ'(1-x), d²/dx² = σ''(1-x)
    let (b1, b2) = (-b1, b2);
    let d = a + b;
    let d1 = a1 + b1;
    let d2 = a2 + b2;
    let num1 = a1 * d - a * d1;
    let s = a / d;
    let s1 = num1 / (d * d);
    let s2 = (a2 * d - a * d2) / (d * d) - 2.0 * d1 * num1 / (d * d * d);
    (s, s1, s2)
}

impl RadialCutoff {
    pub fn new(r0: f64, eps: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::Domain("cutoff radius r0 must be positive"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain("cutoff width eps must be positive"));
        }
        Ok(Self { r0, eps })
    }

    /// Radius from which the cutoff is identically zero.
    pub fn outer_radius(&self) -> f64 {
        self.r0 + 0.5 * self.eps
    }

    pub fn jet(&self, r: f64) -> RadialJet {
        let half = 0.5 * self.eps;
        let x = (self.outer_radius() - r) / half;
        let (s, s1, s2) = smoothstep(x);
        RadialJet { value: s, d1: -s1 / half, d2: s2 / (half * half) }
    }

    /// Value (`order = 0`) or radial derivative of order 1 or 2.
    pub fn eval(&self, r: f64, order: u8) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain("radius must be non-negative"));
        }
        let j = self.jet(r);
        match order {
            0 => Ok(j.value),
            1 => Ok(j.d1),
            2 => Ok(j.d2),
            k => Err(Error::UnsupportedDerivative(k)),
        }
    }
}

/// The counterexample families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `e^{2 f_i} g` with `f_i = α/i - r²` near the origin.
    Below,
    /// `u_i = χ i^{l-1} e^{-i r²} + 1`, `l = (n+2)/4`.
    Integral,
    /// `u_i = χ i^{-1} sin(i r²) + 1`: converges in C⁰, not C¹.
    C10,
    /// The C10 bump placed in a flat torus.
    ClosedTorus,
    /// `u_i = χ_i i^{-2} sin(i r²) + 1` with `r_i = i^{2/(n+2)}`: converges in C¹, not C².
    C21,
    /// `g_i = e^{u_i} g` on the plane with `u_i = e^{-i r²} sin(-i r²/2)`.
    TwoDim,
    /// `u_i = i^{-1} sin(i r²) + 1` on the ball of radius `√(π/2)`.
    Boundary,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Below,
        FamilyKind::Integral,
        FamilyKind::C10,
        FamilyKind::ClosedTorus,
        FamilyKind::C21,
        FamilyKind::TwoDim,
        FamilyKind::Boundary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Below => "below",
            FamilyKind::Integral => "integral",
            FamilyKind::C10 => "c10",
            FamilyKind::ClosedTorus => "torus",
            FamilyKind::C21 => "c21",
            FamilyKind::TwoDim => "twodim",
            FamilyKind::Boundary => "boundary",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    pub fn mode(self) -> ConformalMode {
        match self {
            FamilyKind::Below => ConformalMode::Exp2Phi,
            FamilyKind::TwoDim => ConformalMode::ExpU,
            _ => ConformalMode::PowerLaw,
        }
    }
}

/// User-facing parameters; `eps = None` means `r0 / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub n: usize,
    pub i: f64,
    pub r0: f64,
    pub alpha: f64,
    pub eps: Option<f64>,
    pub side: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self { n: 3, i: 10.0, r0: 1.0, alpha: 1.0, eps: None, side: 2.0 }
    }
}

/// One member `g_i` of a family, immutable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleFamily {
    kind: FamilyKind,
    params: FamilyParams,
    r0: f64,
    cutoff: Option<RadialCutoff>,
}

/// Radius of the Boundary family's ball.
pub fn boundary_radius() -> f64 {
    sqrt(0.5 * PI)
}

impl ExampleFamily {
    pub fn new(kind: FamilyKind, params: FamilyParams) -> Result<Self> {
        let FamilyParams { n, i, r0, alpha, eps, side } = params;
        if !(i > 0.0 && i.is_finite()) {
            return Err(Error::Domain("sequence index i must be positive"));
        }
        match kind {
            FamilyKind::TwoDim if n != 2 => {
                return Err(Error::UnsupportedDimension { n, reason: "the two-dimensional family needs n = 2" })
            }
            FamilyKind::Below if n < 2 => {
                return Err(Error::UnsupportedDimension { n, reason: "dimension must be at least 2" })
            }
            FamilyKind::Integral | FamilyKind::C10 | FamilyKind::ClosedTorus | FamilyKind::C21 | FamilyKind::Boundary
                if n < 3 =>
            {
                return Err(Error::UnsupportedDimension { n, reason: "power-law families need n >= 3" })
            }
            _ => {}
        }
        let (r0, cutoff) = match kind {
            FamilyKind::Below => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::Domain("alpha must be positive"));
                }
                let inner = sqrt(alpha / i);
                let outer = sqrt(2.0 * alpha / i);
                (inner, Some(RadialCutoff::new(inner, 2.0 * (outer - inner))?))
            }
            FamilyKind::TwoDim => (0.0, None),
            FamilyKind::Boundary => (boundary_radius(), None),
            FamilyKind::C21 => {
                let ri = powf(i, 2.0 / (n as f64 + 2.0));
                (ri, Some(RadialCutoff::new(ri, eps.unwrap_or(0.25 * ri))?))
            }
            FamilyKind::Integral | FamilyKind::C10 | FamilyKind::ClosedTorus => {
                (r0, Some(RadialCutoff::new(r0, eps.unwrap_or(0.25 * r0))?))
            }
        };
        if kind == FamilyKind::ClosedTorus {
            if !(side > 0.0 && side.is_finite()) {
                return Err(Error::Domain("torus side must be positive"));
            }
            let outer = cutoff.map(|c| c.outer_radius()).unwrap_or(r0);
            if outer >= 0.5 * side {
                return Err(Error::Geometry("bump support must fit inside half the torus side"));
            }
        }
        Ok(Self { kind, params, r0, cutoff })
    }

    /// Same family and parameters with a different index `i`.
    pub fn with_index(&self, i: f64) -> Result<Self> {
        Self::new(self.kind, FamilyParams { i, ..self.params })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }
    pub fn n(&self) -> usize {
        self.params.n
    }
    pub fn i(&self) -> f64 {
        self.params.i
    }
    pub fn params(&self) -> FamilyParams {
        self.params
    }
    /// Effective plateau radius (`r_i` for C21, `√(α/i)` for Below).
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn cutoff(&self) -> Option<RadialCutoff> {
        self.cutoff
    }

    pub fn mode(&self) -> ConformalMode {
        self.kind.mode()
    }

    /// The Integral family's exponent `l = (n+2)/4`.
    pub fn exponent_l(&self) -> f64 {
        (self.params.n as f64 + 2.0) / 4.0
    }

    pub fn base(&self) -> BaseMetric {
        match self.kind {
            FamilyKind::ClosedTorus => BaseMetric::FlatTorus { side: self.params.side },
            FamilyKind::Boundary => BaseMetric::EuclideanBall { r_max: self.r0 },
            _ => BaseMetric::EuclideanBall { r_max: f64::INFINITY },
        }
    }

    pub fn spec(&self) -> Result<ConformalMetricSpec<&Self>> {
        ConformalMetricSpec::new(self.params.n, self.base(), self.mode(), self)
    }

    /// Radius of the region where the metric differs from the base (or the
    /// domain radius for the Boundary family, the decay radius for TwoDim).
    pub fn extent(&self) -> f64 {
        match self.kind {
            FamilyKind::Boundary => self.r0,
            FamilyKind::TwoDim => self.decay_radius(1e-16).unwrap_or(0.0),
            _ => self.cutoff.map(|c| c.outer_radius()).unwrap_or(self.r0),
        }
    }

    /// `F(s), F'(s), F''(s)` for `s = r²`.
    fn profile(&self, s: f64) -> (f64, f64, f64) {
        let i = self.params.i;
        match self.kind {
            FamilyKind::Below => (self.params.alpha / i - s, -1.0, 0.0),
            FamilyKind::Integral => {
                let l = self.exponent_l();
                let e = exp(-i * s);
                let c = powf(i, l - 1.0);
                (c * e, -c * i * e, c * i * i * e)
            }
            FamilyKind::C10 | FamilyKind::ClosedTorus | FamilyKind::Boundary => {
                let (sn, cs) = (sin(i * s), cos(i * s));
                (sn / i, cs, -i * sn)
            }
            FamilyKind::C21 => {
                let (sn, cs) = (sin(i * s), cos(i * s));
                (sn / (i * i), cs / i, -sn)
            }
            FamilyKind::TwoDim => {
                let (a, b) = (-i, -0.5 * i);
                let e = exp(a * s);
                let (sn, cs) = (sin(b * s), cos(b * s));
                (e * sn, e * (a * sn + b * cs), e * ((a * a - b * b) * sn + 2.0 * a * b * cs))
            }
        }
    }

    /// Conformal factor (power-law kinds) or exponent (exponential kinds)
    /// and its radial derivatives.
    pub fn factor_eval(&self, r: f64, order: u8) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain("radius must be non-negative"));
        }
        let j = self.jet(r);
        match order {
            0 => Ok(j.value),
            1 => Ok(j.d1),
            2 => Ok(j.d2),
            k => Err(Error::UnsupportedDerivative(k)),
        }
    }

    /// `|∇u_i|²` at radius `r` (product rule through the cutoff).
    pub fn gradient_sq(&self, r: f64) -> f64 {
        let d = self.jet(r).d1;
        d * d
    }
}

impl RadialProfile for ExampleFamily {
    fn jet(&self, r: f64) -> RadialJet {
        let trivial = self.mode().trivial_value();
        let c = match self.cutoff {
            Some(c) => {
                if r >= c.outer_radius() {
                    return RadialJet { value: trivial, d1: 0.0, d2: 0.0 };
                }
                c.jet(r)
            }
            None => RadialJet { value: 1.0, d1: 0.0, d2: 0.0 },
        };
        let (f, f1, f2) = self.profile(r * r);
        let p = f;
        let p1 = 2.0 * r * f1;
        let p2 = 2.0 * f1 + 4.0 * r * r * f2;
        RadialJet {
            value: trivial + c.value * p,
            d1: c.d1 * p + c.value * p1,
            d2: c.d2 * p + 2.0 * c.d1 * p1 + c.value * p2,
        }
    }

    fn support_radius(&self) -> Option<f64> {
        self.cutoff.map(|c| c.outer_radius())
    }

    fn decay_radius(&self, threshold: f64) -> Option<f64> {
        match self.kind {
            FamilyKind::TwoDim => Some(sqrt(-crate::math::ln(threshold) / self.params.i)),
            _ => self.support_radius(),
        }
    }

    fn transition(&self) -> Option<(f64, f64)> {
        self.cutoff.map(|c| (c.r0, c.outer_radius()))
    }

    fn oscillations(&self, r_max: f64) -> f64 {
        let i = self.params.i;
        match self.kind {
            FamilyKind::C10 | FamilyKind::ClosedTorus | FamilyKind::Boundary | FamilyKind::C21 => {
                i * r_max * r_max / (2.0 * PI)
            }
            FamilyKind::TwoDim => i * r_max * r_max / (4.0 * PI),
            _ => 0.0,
        }
    }
}

/// `|∇u_i|²` at `r` (alias kept next to the family for discoverability).
pub fn gradient_sq_integrand(family: &ExampleFamily, r: f64) -> f64 {
    family.gradient_sq(r)
}

// ---------------------------------------------------------------------------
// Gaussian moments
// ---------------------------------------------------------------------------

/// `I_1 = ∫_0^{r0} r e^{-2 i r²} dr = (1 - e^{-2 i r0²}) / (4 i)`.
pub fn first_moment(i: f64, r0: f64) -> f64 {
    -libm::expm1(-2.0 * i * r0 * r0) / (4.0 * i)
}

/// `I_0 = ∫_0^{r0} e^{-2 i r²} dr` by adaptive quadrature.
pub fn ground_moment(i: f64, r0: f64) -> Result<f64> {
    let quad = QuadSettings { abs_tol: 1e-15, ..QuadSettings::default() };
    Ok(integrate(|r| exp(-2.0 * i * r * r), 0.0, r0, &quad)?.value)
}

/// `√((π/2) I_1)`, a lower bound for `I_0` (the quarter-disc inside the square).
pub fn ground_moment_lower_bound(i: f64, r0: f64) -> f64 {
    sqrt(0.5 * PI * first_moment(i, r0))
}

/// `I_k = ∫_0^{r0} r^k e^{-2 i r²} dr` through the integration-by-parts
/// recurrence `I_k = -r0^{k-1} e^{-2 i r0²} / (4i) + (k-1)/(4i) I_{k-2}`,
/// grounded at `I_1` (odd `k`) or `I_0` (even `k`).
pub fn gaussian_moment_k(k: usize, i: f64, r0: f64) -> Result<f64> {
    if !(i > 0.0 && r0 > 0.0) {
        return Err(Error::Domain("gaussian moment needs i > 0 and r0 > 0"));
    }
    let e = exp(-2.0 * i * r0 * r0);
    let (mut kk, mut acc) = if k % 2 == 1 { (1, first_moment(i, r0)) } else { (0, ground_moment(i, r0)?) };
    while kk < k {
        kk += 2;
        acc = -powi(r0, kk as i32 - 1) * e / (4.0 * i) + (kk as f64 - 1.0) / (4.0 * i) * acc;
    }
    Ok(acc)
}

/// `I_{n+1} = ∫_0^{r0} r^{n+1} e^{-2 i r²} dr`.
pub fn gaussian_moment(n: usize, i: f64, r0: f64) -> Result<f64> {
    gaussian_moment_k(n + 1, i, r0)
}

/// Large-`i` limit of the Integral family's total scalar curvature,
/// `16 (n-1)/(n-2) Vol(S^{n-1}) Γ((n+2)/2) / 2^{(n+4)/2}`.
pub fn integral_family_limit(n: usize) -> f64 {
    let nf = n as f64;
    16.0 * (nf - 1.0) / (nf - 2.0) * unit_sphere_volume(n - 1) * gamma(0.5 * (nf + 2.0)) / powf(2.0, 0.5 * (nf + 4.0))
}

// ---------------------------------------------------------------------------
// Oscillatory Gaussian integrals for the planar family
// ---------------------------------------------------------------------------

/// `∫_0^∞ r^{1,3} e^{a r²} {cos, sin}(b r²) dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ijkl {
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
}

/// Closed forms for `a < 0`: `I = -a / (2(a²+b²))`, `J = b / (2(a²+b²))`,
/// `K = -(a I + b J)/(a²+b²)`, `L = -(a J - b I)/(a²+b²)`.
///
/// With `c = a + ib`, `I + iJ = -1/(2c)` and `K + iL = -(I + iJ)/c`.
pub fn oscillatory_ijkl(a: f64, b: f64) -> Result<Ijkl> {
    if !(a < 0.0) || !b.is_finite() {
        return Err(Error::Domain("oscillatory Gaussian integrals diverge unless a < 0"));
    }
    let m = a * a + b * b;
    let i = -a / (2.0 * m);
    let j = b / (2.0 * m);
    let k = -(a * i + b * j) / m;
    let l = -(a * j - b * i) / m;
    Ok(Ijkl { i, j, k, l })
}

/// The planar family's total as the closed-form expression
/// `2π · 8 a³ b / (a² + b²)²` with `a = -i`, `b = a/2` (equal to `128π/25`).
pub fn twodim_total(i: f64) -> f64 {
    let a = -i;
    let b = 0.5 * a;
    let m = a * a + b * b;
    2.0 * PI * 8.0 * a * a * a * b / (m * m)
}

/// The planar family's total assembled from the moments:
/// `-2π (4bI + 4aJ + 4(a²-b²) L + 8ab K)`, which is `-∫ Δu dA`.
pub fn twodim_total_from_moments(i: f64) -> Result<f64> {
    let a = -i;
    let b = 0.5 * a;
    let m = oscillatory_ijkl(a, b)?;
    Ok(-2.0 * PI * (4.0 * b * m.i + 4.0 * a * m.j + 4.0 * (a * a - b * b) * m.l + 8.0 * a * b * m.k))
}

// ---------------------------------------------------------------------------
// Lower bounds and thresholds
// ---------------------------------------------------------------------------

/// Closed-form lower bound on the total scalar curvature valid for large `i`.
///
/// - C10, ClosedTorus, Boundary (interior part): `4(n-1)/((n+2)(n-2)) Vol(S^{n-1}) r0^{n+2}`
/// - C21: `4(n-1)/((n+2)(n-2)) Vol(S^{n-1})`
/// - Integral: half of [`integral_family_limit`]
/// - TwoDim: `0`
pub fn family_total_lower_bound(family: &ExampleFamily) -> Result<f64> {
    let n = family.n();
    let nf = n as f64;
    let c = 4.0 * (nf - 1.0) / ((nf + 2.0) * (nf - 2.0));
    match family.kind() {
        FamilyKind::C10 | FamilyKind::ClosedTorus | FamilyKind::Boundary => {
            Ok(c * unit_sphere_volume(n - 1) * powi(family.r0(), n as i32 + 2))
        }
        FamilyKind::C21 => Ok(c * unit_sphere_volume(n - 1)),
        FamilyKind::Integral => Ok(0.5 * integral_family_limit(n)),
        FamilyKind::TwoDim => Ok(0.0),
        FamilyKind::Below => Err(Error::Unsupported("the Below family has no total-curvature bound")),
    }
}

/// `i_start, i_start·ratio, ...` up to `i_max` inclusive.
pub fn geometric_sweep(i_start: f64, ratio: f64, i_max: f64) -> Result<Vec<f64>> {
    if !(i_start > 0.0 && ratio > 1.0 && i_max >= i_start) {
        return Err(Error::Domain("geometric sweep needs i_start > 0, ratio > 1, i_max >= i_start"));
    }
    let mut out = Vec::new();
    let mut i = i_start;
    while i <= i_max * (1.0 + 1e-12) {
        out.push(i);
        i *= ratio;
    }
    Ok(out)
}

/// Result of a threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub i0: f64,
    pub bound: f64,
    pub samples: Vec<(f64, QuadratureResult)>,
}

/// Smallest tested `i` from which the computed total stays strictly above
/// `bound` for every tested index up to the end of the sweep.
pub fn find_threshold_i0(
    template: &ExampleFamily,
    bound: f64,
    sweep: &[f64],
    quad: &QuadSettings,
) -> Result<ThresholdReport> {
    if sweep.is_empty() {
        return Err(Error::Domain("empty sweep"));
    }
    let mut samples = Vec::with_capacity(sweep.len());
    for &i in sweep {
        let fam = template.with_index(i)?;
        let total = total_scalar_curvature(&fam.spec()?, quad)?;
        samples.push((i, total));
    }
    let mut i0 = None;
    for (i, t) in samples.iter().rev() {
        if t.value > bound {
            i0 = Some(*i);
        } else {
            break;
        }
    }
    match i0 {
        Some(i0) => Ok(ThresholdReport { i0, bound, samples }),
        None => Err(Error::ThresholdNotFound { i_max: sweep[sweep.len() - 1] }),
    }
}

/// Scalar curvature of the C10 family where `r² = (2k-1)π/(2i)`, inside the
/// plateau: `(-1)^{k+1} 8(n-1)(2k-1)π/(n-2) · (1 + (-1)^{k+1}/i)^{-(n+2)/(n-2)}`.
pub fn c10_peak_curvature(n: usize, i: f64, k: u32) -> f64 {
    let nf = n as f64;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 8.0 * (nf - 1.0) * (2.0 * k as f64 - 1.0) * PI / (nf - 2.0)
        * powf(1.0 + sign / i, -(nf + 2.0) / (nf - 2.0))
}

// ---------------------------------------------------------------------------
// Boundary family
// ---------------------------------------------------------------------------

/// `(sin(iπ/2), cos(iπ/2))`, exact for integer `i`.
fn quarter_turn_trig(i: f64) -> (f64, f64) {
    if crate::math::floor(i) == i && i.abs() < 1e15 {
        match (i as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        (sin(0.5 * PI * i), cos(0.5 * PI * i))
    }
}

/// `∫_{∂B_{r0}} u_i ∂_r u_i dσ` for the Boundary family, `r0 = √(π/2)`:
/// `[2 i^{-1} r0 sin(iπ/2) cos(iπ/2) + 2 r0 cos(iπ/2)] · Area(∂B_{r0})`.
pub fn boundary_term(n: usize, i: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, reason: "power-law families need n >= 3" });
    }
    let r0 = boundary_radius();
    let (s, c) = quarter_turn_trig(i);
    let bracket = 2.0 * r0 * s * c / i + 2.0 * r0 * c;
    Ok(bracket * unit_sphere_volume(n - 1) * powi(r0, n as i32 - 1))
}

/// One row of the boundary-term audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAuditRow {
    pub i: f64,
    pub boundary_term: f64,
    /// `4(n-1)/(n-2) ∫_B |∇u|²`
    pub interior_energy: f64,
    /// interior energy minus `4(n-1)/(n-2)` times the boundary term
    pub total_with_boundary: f64,
    /// `∫_B R dvol` by direct quadrature
    pub direct_total: f64,
    /// `|direct - with_boundary|` within the quadrature error
    pub consistent: bool,
    /// whether the boundary term vanishes
    pub boundary_vanishes: bool,
}

/// Audit of the Boundary family: boundary term, interior energy, and the
/// direct total over the ball for each `i`.
pub fn boundary_audit(n: usize, indices: &[f64], quad: &QuadSettings) -> Result<Vec<BoundaryAuditRow>> {
    let nf = n as f64;
    let c = 4.0 * (nf - 1.0) / (nf - 2.0);
    let vol = unit_sphere_volume(n - 1);
    let r0 = boundary_radius();
    indices
        .iter()
        .map(|&i| {
            let fam = ExampleFamily::new(FamilyKind::Boundary, FamilyParams { n, i, ..FamilyParams::default() })?;
            let bt = boundary_term(n, i)?;
            let q = quad.with_panels(quad.initial_panels.max(crate::math::ceil(2.0 * fam.oscillations(r0)) as usize));
            let energy = integrate(|r| fam.gradient_sq(r) * powi(r, n as i32 - 1), 0.0, r0, &q)?.scaled(c * vol);
            let direct = total_scalar_curvature(&fam.spec()?, quad)?;
            let with_boundary = energy.value - c * bt;
            let tol = 10.0 * (energy.abs_error + direct.abs_error) + 1e-9 * direct.value.abs().max(1.0);
            Ok(BoundaryAuditRow {
                i,
                boundary_term: bt,
                interior_energy: energy.value,
                total_with_boundary: with_boundary,
                direct_total: direct.value,
                consistent: (direct.value - with_boundary).abs() <= tol,
                boundary_vanishes: bt.abs() <= 1e-12,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Flat-torus realisation
// ---------------------------------------------------------------------------

/// Grid quadrature on the flat torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusTotal {
    pub total: f64,
    /// `sup |u^{4/(n-2)} - 1|` over the grid nodes.
    pub c0_distance: f64,
    pub points: usize,
}

/// Total scalar curvature of the ClosedTorus family by summing
/// `R dvol` over a uniform `res^n` grid of the torus, bump centred at the
/// middle node and distances taken periodically.
pub fn torus_example_total(family: &ExampleFamily, res: usize) -> Result<TorusTotal> {
    if family.kind() != FamilyKind::ClosedTorus {
        return Err(Error::Unsupported("torus quadrature is defined for the ClosedTorus family"));
    }
    if res < 4 {
        return Err(Error::Config("torus grid needs at least 4 points per axis"));
    }
    let n = family.n();
    let side = family.params().side;
    let h = side / res as f64;
    let centre = 0.5 * side;
    let spec = family.spec()?;
    let support = family.extent();
    let power = 4.0 / (n as f64 - 2.0);
    let points = res.pow(n as u32);
    let mut total = 0.0;
    let mut c0: f64 = 0.0;
    let mut idx = alloc::vec![0usize; n];
    for _ in 0..points {
        let mut r2 = 0.0;
        for &k in &idx {
            let mut d = k as f64 * h - centre;
            d -= side * libm::round(d / side);
            r2 += d * d;
        }
        let r = sqrt(r2);
        if r < support {
            let rs = spec.scalar_curvature_at(r)?;
            let vf = spec.volume_factor_at(r)?;
            total += rs * vf;
            c0 = c0.max((powf(family.jet(r).value, power) - 1.0).abs());
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < res {
                break;
            }
            *d = 0;
        }
    }
    Ok(TorusTotal { total: total * powi(h, n as i32), c0_distance: c0, points })
}

/// Expressions exactly as printed in the source derivation, kept so reports
/// can show where they disagree with the computed values.
pub mod printed {
    use super::*;

    /// `(1 - e^{-2 i r0²}) / (2i)`.
    pub fn first_moment(i: f64, r0: f64) -> f64 {
        -libm::expm1(-2.0 * i * r0 * r0) / (2.0 * i)
    }

    /// `√((π/2)(1/(2i) - e^{-2 i r0²}/(2i)))`.
    pub fn ground_moment_bound(i: f64, r0: f64) -> f64 {
        sqrt(0.5 * PI * first_moment(i, r0))
    }

    /// `J = -b / (2(a²+b²))`.
    pub fn j_moment(a: f64, b: f64) -> f64 {
        -b / (2.0 * (a * a + b * b))
    }

    /// Large-`i` bound for the Integral family:
    /// odd `n = 2m+1`: `8 (n-1)/(n-2) Vol(S^{n-1}) (√π/2) ∏_{s=0}^{m} (2s+1)/2`,
    /// even `n = 2m`: `4 (n-1)/(n-2) Vol(S^{n-1}) ∏_{s=1}^{m} s`.
    pub fn integral_bound(n: usize) -> f64 {
        let nf = n as f64;
        let pre = (nf - 1.0) / (nf - 2.0) * unit_sphere_volume(n - 1);
        if n % 2 == 1 {
            let m = (n - 1) / 2;
            let prod: f64 = (0..=m).map(|s| (2.0 * s as f64 + 1.0) / 2.0).product();
            8.0 * pre * 0.5 * sqrt(PI) * prod
        } else {
            let m = n / 2;
            let prod: f64 = (1..=m).map(|s| s as f64).product();
            4.0 * pre * prod
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(kind: FamilyKind, n: usize, i: f64) -> ExampleFamily {
        ExampleFamily::new(kind, FamilyParams { n, i, ..FamilyParams::default() }).unwrap()
    }

    #[test]
    fn cutoff_plateaus_and_midpoint() {
        let c = RadialCutoff::new(1.0, 0.5).unwrap();
        assert_eq!(c.eval(0.0, 0).unwrap(), 1.0);
        assert_eq!(c.eval(1.0, 0).unwrap(), 1.0);
        assert_eq!(c.eval(1.0 + 0.5, 0).unwrap(), 0.0);
        assert_eq!(c.eval(1.25, 1).unwrap(), 0.0);
        assert_eq!(c.eval(1.125, 0).unwrap(), 0.5);
        assert!(matches!(c.eval(0.5, 3), Err(Error::UnsupportedDerivative(3))));
        assert!(c.eval(-0.1, 0).is_err());
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        // five-point differences, h = 1e-5
        let c = RadialCutoff::new(1.0, 0.4).unwrap();
        let h = 1e-5;
        let fd = |f: &dyn Fn(f64) -> f64, r: f64| {
            (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h)
        };
        for k in 1..40 {
            let r = 1.0 + 0.2 * k as f64 / 40.0;
            let j = c.jet(r);
            let d1 = fd(&|x| c.jet(x).value, r);
            let d2 = fd(&|x| c.jet(x).d1, r);
            assert!((d1 - j.d1).abs() <= 1e-6 * (j.d1.abs() + 1e-6), "r={r}");
            assert!((d2 - j.d2).abs() <= 1e-6 * (j.d2.abs() + 1e-4), "r={r}");
        }
    }

    #[test]
    fn c10_origin_jet() {
        let f = fam(FamilyKind::C10, 3, 4.0);
        let j = f.jet(0.0);
        assert_eq!(j.value, 1.0);
        assert_eq!(j.d1, 0.0);
        assert!((j.laplacian(3, 0.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn beyond_support_is_trivial() {
        for kind in [FamilyKind::Integral, FamilyKind::C10, FamilyKind::C21] {
            let f = fam(kind, 3, 5.0);
            let j = f.jet(f.extent() + 0.1);
            assert_eq!((j.value, j.d1, j.d2), (1.0, 0.0, 0.0));
        }
        let b = ExampleFamily::new(FamilyKind::Below, FamilyParams { n: 3, i: 2.0, ..Default::default() }).unwrap();
        assert_eq!(b.jet(5.0).value, 0.0);
        assert_eq!(fam(FamilyKind::TwoDim, 2, 1.0).jet(0.0).value, 0.0);
    }

    #[test]
    fn closed_form_gradients() {
        // C10 plateau: 2 r² (1 + cos 2ir²)
        let f = fam(FamilyKind::C10, 3, 7.0);
        for r in [0.1, 0.4, 0.9] {
            let want = 2.0 * r * r * (1.0 + cos(2.0 * 7.0 * r * r));
            assert!((gradient_sq_integrand(&f, r) - want).abs() < 1e-12);
        }
        // zero where 2ir² = π
        let r = sqrt(PI / 14.0);
        assert!(gradient_sq_integrand(&f, r).abs() < 1e-24);
        // Integral n = 3, i = 2, r = 1 inside a plateau of radius 2
        let g = ExampleFamily::new(FamilyKind::Integral, FamilyParams { n: 3, i: 2.0, r0: 2.0, ..Default::default() })
            .unwrap();
        let want = 4.0 * powf(2.0, 2.5) * exp(-4.0);
        assert!((gradient_sq_integrand(&g, 1.0) - want).abs() < 1e-14);
        assert!((want - 0.414_43).abs() < 1e-5);
        // C21 plateau: 2 i^{-2} r² (1 + cos 2ir²)
        let h = fam(FamilyKind::C21, 3, 9.0);
        let r = 0.7;
        let want = 2.0 / 81.0 * r * r * (1.0 + cos(18.0 * r * r));
        assert!((gradient_sq_integrand(&h, r) - want).abs() < 1e-14);
    }

    #[test]
    fn family_invariants() {
        assert!(ExampleFamily::new(FamilyKind::C10, FamilyParams { n: 2, ..Default::default() }).is_err());
        assert!(ExampleFamily::new(FamilyKind::TwoDim, FamilyParams { n: 3, ..Default::default() }).is_err());
        let c21 = fam(FamilyKind::C21, 3, 32.0);
        assert!((c21.r0() - 4.0).abs() < 1e-12);
        assert!((fam(FamilyKind::Boundary, 3, 2.0).r0() - sqrt(PI / 2.0)).abs() < 1e-15);
        let bad = FamilyParams { r0: 0.9, side: 2.0, ..Default::default() };
        assert!(matches!(ExampleFamily::new(FamilyKind::ClosedTorus, bad), Err(Error::Geometry(_))));
        assert!((fam(FamilyKind::Integral, 3, 2.0).exponent_l() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn first_moment_value() {
        let i1 = first_moment(1.0, 1.0);
        assert!((i1 - (1.0 - exp(-2.0)) / 4.0).abs() < 1e-16);
        assert!((printed::first_moment(1.0, 1.0) - 0.432_332).abs() < 1e-6);
        assert!((printed::first_moment(1.0, 1.0) - 2.0 * i1).abs() < 1e-15);
    }

    #[test]
    fn ground_moment_against_erf() {
        for (i, r0) in [(1.0, 1.0), (10.0, 0.5), (3.0, 2.0)] {
            let want = 0.5 * sqrt(PI / (2.0 * i)) * crate::math::erf(sqrt(2.0 * i) * r0);
            assert!((ground_moment(i, r0).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn ground_bound_direction() {
        let i0 = ground_moment(1.0, 1.0).unwrap();
        assert!(i0 >= ground_moment_lower_bound(1.0, 1.0));
        // The printed expression is larger than I_0 itself.
        assert!(printed::ground_moment_bound(1.0, 1.0) > i0);
    }

    #[test]
    fn ijkl_closed_forms() {
        let m = oscillatory_ijkl(-1.0, -0.5).unwrap();
        assert!((m.i - 0.4).abs() < 1e-15);
        assert!((m.j + 0.2).abs() < 1e-15);
        let z = oscillatory_ijkl(-2.0, 0.0).unwrap();
        assert!((z.i - 0.25).abs() < 1e-15 && z.j == 0.0);
        assert!(oscillatory_ijkl(0.0, 1.0).is_err());
        assert!((printed::j_moment(-1.0, -0.5) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn twodim_closed_form_is_index_free() {
        let v = 128.0 * PI / 25.0;
        for i in [1.0, 7.0, 33.3, 100.0] {
            assert!(((twodim_total(i) - v) / v).abs() < 1e-12);
            assert!(twodim_total_from_moments(i).unwrap().abs() < 1e-12);
        }
        assert!((v - 16.084_954).abs() < 1e-6);
    }

    #[test]
    fn lower_bounds() {
        let b = family_total_lower_bound(&fam(FamilyKind::C10, 3, 10.0)).unwrap();
        assert!((b - 32.0 * PI / 5.0).abs() < 1e-12);
        let b = family_total_lower_bound(&fam(FamilyKind::C21, 4, 10.0)).unwrap();
        assert!((b - 2.0 * PI * PI).abs() < 1e-12);
        assert!((printed::integral_bound(3) - 24.0 * powf(PI, 1.5)).abs() < 1e-10);
        assert!((printed::integral_bound(3) - 133.64).abs() < 0.01);
        let below = ExampleFamily::new(FamilyKind::Below, FamilyParams::default()).unwrap();
        assert!(matches!(family_total_lower_bound(&below), Err(Error::Unsupported(_))));
    }

    #[test]
    fn integral_limit_matches_gamma_moment() {
        // i^{(n+2)/2} I_{n+1}(i, ∞) = Γ((n+2)/2) / 2^{(n+4)/2}
        for n in 3..7usize {
            let i = 400.0;
            let m = gaussian_moment(n, i, 1.0).unwrap() * powf(i, 0.5 * (n as f64 + 2.0));
            let nf = n as f64;
            let lim = 16.0 * (nf - 1.0) / (nf - 2.0) * unit_sphere_volume(n - 1) * m;
            assert!(((lim - integral_family_limit(n)) / lim).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn boundary_terms() {
        let r0 = boundary_radius();
        let area = unit_sphere_volume(2) * r0 * r0;
        assert!((boundary_term(3, 2.0).unwrap() + 2.0 * r0 * area).abs() < 1e-12);
        assert!((boundary_term(3, 4.0).unwrap() - 2.0 * r0 * area).abs() < 1e-12);
        for i in [3.0, 5.0, 7.0, 9.0] {
            assert_eq!(boundary_term(3, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn c10_peak_values() {
        // odd k reproduces (-1)^{k+1} 8(n-1)(2k-1)π/(n-2) (1/i + 1)^{-(n+2)/(n-2)}
        let (n, i) = (3usize, 50.0);
        for k in [1u32, 3, 5] {
            let printed = 8.0 * 2.0 * (2.0 * k as f64 - 1.0) * PI * powf(1.0 / i + 1.0, -5.0);
            assert!((c10_peak_curvature(n, i, k) - printed).abs() < 1e-10);
        }
        let f = fam(FamilyKind::C10, 3, i);
        let spec = f.spec().unwrap();
        for k in 1u32..=6 {
            let r = sqrt((2.0 * k as f64 - 1.0) * PI / (2.0 * i));
            let direct = spec.scalar_curvature_at(r).unwrap();
            let want = c10_peak_curvature(n, i, k);
            assert!(((direct - want) / want).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn sweep_helper() {
        let s = geometric_sweep(2.0, 2.0, 16.0).unwrap();
        assert_eq!(s, alloc::vec![2.0, 4.0, 8.0, 16.0]);
        assert!(geometric_sweep(2.0, 1.0, 16.0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(FamilyKind::from_name(k.name()), Some(k));
        }
    }
}
