//! Scalar curvature under conformal change on a flat base, conformal volume
//! factors and total scalar curvature of radially symmetric metrics.
//!
//! Two conformal conventions are supported: `g = u^{4/(n-2)} g_0` (power law,
//! `n >= 3`) and `g = e^{2φ} g_0`. The two-dimensional convention `e^{u} g_0`
//! is the exponential one with `φ = u/2` and is exposed as
//! [`ConformalMode::ExpU`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, powf, powi};
use crate::quad::{integrate, QuadSettings, QuadratureResult};
pub use crate::special::unit_sphere_volume;

/// Value, squared gradient norm and Laplacian of a scalar at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointJet {
    pub value: f64,
    pub grad_sq: f64,
    pub laplacian: f64,
}

impl PointJet {
    pub fn new(value: f64, grad_sq: f64, laplacian: f64) -> Self {
        Self { value, grad_sq, laplacian }
    }

    fn check_finite(&self) -> Result<()> {
        if self.value.is_finite() && self.grad_sq.is_finite() && self.laplacian.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain("non-finite derivative data"))
        }
    }

    /// Jet of `a * self`.
    pub fn scale(self, a: f64) -> Self {
        Self {
            value: a * self.value,
            grad_sq: a * a * self.grad_sq,
            laplacian: a * self.laplacian,
        }
    }
}

/// Value and first two radial derivatives of a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadialJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl RadialJet {
    /// Flat Laplacian in dimension `n`: `f'' + (n-1) f'/r`, with the
    /// `r -> 0` limit `n f''(0)`.
    pub fn laplacian(&self, n: usize, r: f64) -> f64 {
        if r < 1e-300 {
            n as f64 * self.d2
        } else {
            self.d2 + (n as f64 - 1.0) * self.d1 / r
        }
    }

    pub fn point_jet(&self, n: usize, r: f64) -> PointJet {
        PointJet {
            value: self.value,
            grad_sq: self.d1 * self.d1,
            laplacian: self.laplacian(n, r),
        }
    }
}

/// A scalar function of the radius with analytic derivatives.
pub trait RadialProfile {
    /// Value and radial derivatives at `r >= 0`.
    fn jet(&self, r: f64) -> RadialJet;

    /// Radius beyond which the profile is exactly constant.
    fn support_radius(&self) -> Option<f64>;

    /// For profiles without compact support: a radius beyond which the
    /// deviation from the trivial value is below `threshold`.
    fn decay_radius(&self, _threshold: f64) -> Option<f64> {
        None
    }

    /// Interval where a cutoff switches off, used to split quadrature and to
    /// refine sampling.
    fn transition(&self) -> Option<(f64, f64)> {
        None
    }

    /// Approximate number of oscillations on `[0, r_max]`; seeds the
    /// quadrature panel count.
    fn oscillations(&self, _r_max: f64) -> f64 {
        0.0
    }
}

impl<T: RadialProfile + ?Sized> RadialProfile for &T {
    fn jet(&self, r: f64) -> RadialJet {
        (**self).jet(r)
    }
    fn support_radius(&self) -> Option<f64> {
        (**self).support_radius()
    }
    fn decay_radius(&self, threshold: f64) -> Option<f64> {
        (**self).decay_radius(threshold)
    }
    fn transition(&self) -> Option<(f64, f64)> {
        (**self).transition()
    }
    fn oscillations(&self, r_max: f64) -> f64 {
        (**self).oscillations(r_max)
    }
}

/// Which conformal convention a factor is used with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConformalMode {
    /// `g = u^{4/(n-2)} g_0`, needs `n >= 3` and `u > 0`.
    PowerLaw,
    /// `g = e^{2φ} g_0`.
    Exp2Phi,
    /// `g = e^{u} g_0`, i.e. `φ = u/2`.
    ExpU,
}

impl ConformalMode {
    /// Value of the factor that leaves the base metric unchanged.
    pub fn trivial_value(self) -> f64 {
        match self {
            ConformalMode::PowerLaw => 1.0,
            ConformalMode::Exp2Phi | ConformalMode::ExpU => 0.0,
        }
    }
}

/// Flat base metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseMetric {
    /// Euclidean ball of radius `r_max` (`f64::INFINITY` for all of `R^n`).
    EuclideanBall { r_max: f64 },
    /// Flat torus `R^n / (side Z)^n`; radial factors are centred in it.
    FlatTorus { side: f64 },
}

/// A conformal metric `factor ⋆ g_0` over a flat base.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMetricSpec<P> {
    pub n: usize,
    pub base: BaseMetric,
    pub mode: ConformalMode,
    pub factor: P,
}

impl<P: RadialProfile> ConformalMetricSpec<P> {
    pub fn new(n: usize, base: BaseMetric, mode: ConformalMode, factor: P) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { n, reason: "dimension must be at least 2" });
        }
        if mode == ConformalMode::PowerLaw && n < 3 {
            return Err(Error::UnsupportedDimension { n, reason: "power-law conformal factor needs n >= 3" });
        }
        match base {
            BaseMetric::EuclideanBall { r_max } if !(r_max > 0.0) => {
                return Err(Error::Domain("ball radius must be positive"));
            }
            BaseMetric::FlatTorus { side } => {
                if !(side > 0.0 && side.is_finite()) {
                    return Err(Error::Domain("torus side must be positive and finite"));
                }
                match factor.support_radius() {
                    Some(s) if s < 0.5 * side => {}
                    _ => return Err(Error::Geometry("factor support must lie inside half the torus side")),
                }
            }
            _ => {}
        }
        Ok(Self { n, base, mode, factor })
    }

    /// Jet of the exponent `φ` with `g = e^{2φ} g_0` (exponential modes only).
    fn phi_jet(&self, r: f64) -> PointJet {
        let jet = self.factor.jet(r).point_jet(self.n, r);
        match self.mode {
            ConformalMode::ExpU => jet.scale(0.5),
            _ => jet,
        }
    }

    /// Scalar curvature at radius `r`.
    pub fn scalar_curvature_at(&self, r: f64) -> Result<f64> {
        match self.mode {
            ConformalMode::PowerLaw => {
                let u = self.factor.jet(r).point_jet(self.n, r);
                scalar_curvature_powerlaw(self.n, &u, 0.0)
            }
            _ => scalar_curvature_exponential(self.n, &self.phi_jet(r), 0.0),
        }
    }

    /// `dvol_g / dvol_{g_0}` at radius `r`.
    pub fn volume_factor_at(&self, r: f64) -> Result<f64> {
        conformal_volume_factor(self.factor.jet(r).value, self.mode, self.n)
    }

    /// Upper radius of integration and a bound on what lies beyond it.
    fn integration_extent(&self) -> Result<(f64, f64)> {
        let domain = match self.base {
            BaseMetric::EuclideanBall { r_max } => r_max,
            BaseMetric::FlatTorus { side } => 0.5 * side,
        };
        if let Some(s) = self.factor.support_radius() {
            return Ok((s.min(domain), 0.0));
        }
        if domain.is_finite() {
            return Ok((domain, 0.0));
        }
        let r = self
            .factor
            .decay_radius(1e-16)
            .ok_or(Error::Domain("profile has neither compact support nor a decay radius"))?;
        if self.n != 2 {
            return Err(Error::Unsupported("tail bound for non-compact profiles is only available for n = 2"));
        }
        // In 2-D, R dvol = -Δ(2φ) dA, so the tail equals the flux 2π r (2φ)'(r).
        let d1 = self.factor.jet(r).d1;
        let dphi2 = match self.mode {
            ConformalMode::ExpU => d1,
            _ => 2.0 * d1,
        };
        Ok((r, 2.0 * crate::math::PI * r * dphi2.abs()))
    }

    fn panels(&self, upper: f64, quad: &QuadSettings) -> usize {
        let osc = self.factor.oscillations(upper);
        quad.initial_panels.max(crate::math::ceil(4.0 * osc).min(200_000.0) as usize)
    }

    /// `∫ integrand(r) dr` over `[0, upper]`, split at the cutoff transition.
    fn radial_integral<F: FnMut(f64) -> f64>(&self, mut f: F, upper: f64, quad: &QuadSettings) -> Result<QuadratureResult> {
        let mut cuts: Vec<f64> = Vec::with_capacity(4);
        cuts.push(0.0);
        if let Some((a, b)) = self.factor.transition() {
            for c in [a, b] {
                if c > 0.0 && c < upper {
                    cuts.push(c);
                }
            }
        }
        cuts.push(upper);
        let panels = self.panels(upper, quad);
        let mut total = QuadratureResult::default();
        for w in cuts.windows(2) {
            let share = crate::math::ceil((w[1] - w[0]) / upper * panels as f64).max(1.0) as usize;
            let piece = integrate(&mut f, w[0], w[1], &quad.with_panels(share))?;
            total = total.plus(piece);
        }
        Ok(total)
    }

    /// Pointwise samples of the scalar curvature.
    pub fn sample_scalar_curvature(&self, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
        radii.iter().map(|&r| Ok((r, self.scalar_curvature_at(r)?))).collect()
    }
}

/// Scalar curvature of `e^{2φ} g` from the jet of `φ` (flat-base derivatives)
/// and the base scalar curvature.
pub fn scalar_curvature_exponential(n: usize, phi: &PointJet, base_r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { n, reason: "dimension must be at least 2" });
    }
    phi.check_finite()?;
    if !base_r.is_finite() {
        return Err(Error::Domain("non-finite base curvature"));
    }
    let nf = n as f64;
    let w = exp(-2.0 * phi.value);
    Ok(w * (base_r - 2.0 * (nf - 1.0) * phi.laplacian - (nf - 2.0) * (nf - 1.0) * phi.grad_sq))
}

/// Scalar curvature of `u^{4/(n-2)} g` from the jet of `u`.
pub fn scalar_curvature_powerlaw(n: usize, u: &PointJet, base_r: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, reason: "power-law conformal factor needs n >= 3" });
    }
    u.check_finite()?;
    if !(u.value > 0.0) {
        return Err(Error::Domain("power-law conformal factor must be positive"));
    }
    let nf = n as f64;
    let c = 4.0 * (nf - 1.0) / (nf - 2.0);
    Ok(powf(u.value, -(nf + 2.0) / (nf - 2.0)) * (-c * u.laplacian + base_r * u.value))
}

/// `dvol_g / dvol_{g_0}` for a factor value in the given mode.
pub fn conformal_volume_factor(value: f64, mode: ConformalMode, n: usize) -> Result<f64> {
    let nf = n as f64;
    match mode {
        ConformalMode::PowerLaw => {
            if n < 3 {
                return Err(Error::UnsupportedDimension { n, reason: "power-law conformal factor needs n >= 3" });
            }
            if !(value > 0.0) {
                return Err(Error::Domain("power-law conformal factor must be positive"));
            }
            Ok(powf(value, 2.0 * nf / (nf - 2.0)))
        }
        ConformalMode::Exp2Phi => Ok(exp(nf * value)),
        ConformalMode::ExpU => Ok(exp(0.5 * nf * value)),
    }
}

/// `∫ R(g) dvol_g` by radial quadrature,
/// `Vol(S^{n-1}) ∫ R(r) volfactor(r) r^{n-1} dr`.
///
/// Compactly supported factors are integrated exactly up to their support.
/// A two-dimensional factor without compact support is truncated where it
/// drops below `1e-16` and the boundary flux there is added to the error.
pub fn total_scalar_curvature<P: RadialProfile>(spec: &ConformalMetricSpec<P>, quad: &QuadSettings) -> Result<QuadratureResult> {
    let (upper, tail) = spec.integration_extent()?;
    let n = spec.n;
    let mut failure = None;
    let res = spec.radial_integral(
        |r| {
            let rs = spec.scalar_curvature_at(r);
            let vf = spec.volume_factor_at(r);
            match (rs, vf) {
                (Ok(rs), Ok(vf)) => rs * vf * powi(r, n as i32 - 1),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        upper,
        quad,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut res = res?.scaled(unit_sphere_volume(n - 1));
    res.abs_error += tail;
    Ok(res)
}

/// Total scalar curvature through the energy form
/// `4(n-1)/(n-2) ∫|∇u|² dvol_0 + R_0 ∫ u^{(2n-4)/(n-2)} dvol_0`.
///
/// Requires power-law mode and `u - 1` vanishing on the domain boundary.
pub fn total_scalar_via_energy<P: RadialProfile>(
    spec: &ConformalMetricSpec<P>,
    base_r: f64,
    quad: &QuadSettings,
) -> Result<QuadratureResult> {
    if spec.mode != ConformalMode::PowerLaw {
        return Err(Error::Unsupported("energy form is stated for power-law factors"));
    }
    let support = spec
        .factor
        .support_radius()
        .ok_or(Error::Domain("energy identity needs u - 1 compactly supported"))?;
    let domain_volume = match spec.base {
        BaseMetric::EuclideanBall { r_max } => {
            if support > r_max {
                return Err(Error::Domain("energy identity needs u - 1 to vanish on the boundary"));
            }
            unit_sphere_volume(spec.n - 1) * powi(r_max, spec.n as i32) / spec.n as f64
        }
        BaseMetric::FlatTorus { side } => powi(side, spec.n as i32),
    };
    let n = spec.n;
    let nf = n as f64;
    let vol = unit_sphere_volume(n - 1);
    let c = 4.0 * (nf - 1.0) / (nf - 2.0);
    let grad = spec
        .radial_integral(
            |r| {
                let j = spec.factor.jet(r);
                j.d1 * j.d1 * powi(r, n as i32 - 1)
            },
            support,
            quad,
        )?
        .scaled(c * vol);
    if base_r == 0.0 {
        return Ok(grad);
    }
    if !domain_volume.is_finite() {
        return Err(Error::Domain("base curvature term diverges on an infinite domain"));
    }
    let p = (2.0 * nf - 4.0) / (nf - 2.0);
    let excess = spec
        .radial_integral(|r| (powf(spec.factor.jet(r).value, p) - 1.0) * powi(r, n as i32 - 1), support, quad)?
        .scaled(vol);
    let mut potential = excess;
    potential.value += domain_volume;
    Ok(grad.plus(potential.scaled(base_r)))
}

/// Total scalar curvature of `M × S^k` with the unit round sphere, given the
/// total scalar curvature and volume of `M`.
pub fn product_total_scalar(total_m: f64, vol_m: f64, n_sphere: usize) -> Result<f64> {
    if n_sphere < 1 {
        return Err(Error::Domain("sphere dimension must be at least 1"));
    }
    if !(total_m.is_finite() && vol_m.is_finite()) {
        return Err(Error::Domain("non-finite input"));
    }
    let k = n_sphere as f64;
    let vs = unit_sphere_volume(n_sphere);
    Ok(vs * total_m + vol_m * vs * k * (k - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    struct Constant(f64);
    impl RadialProfile for Constant {
        fn jet(&self, _r: f64) -> RadialJet {
            RadialJet { value: self.0, d1: 0.0, d2: 0.0 }
        }
        fn support_radius(&self) -> Option<f64> {
            Some(0.0)
        }
    }

    #[test]
    fn identity_factor_has_zero_curvature() {
        let zero = PointJet::default();
        assert_eq!(scalar_curvature_exponential(3, &zero, 0.0).unwrap(), 0.0);
        let one = PointJet::new(1.0, 0.0, 0.0);
        assert_eq!(scalar_curvature_powerlaw(3, &one, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn below_family_origin_value() {
        // φ = α/i - r², α = i = 1, n = 3: Δφ = -6, |dφ|² = 0 at the origin.
        let phi = PointJet::new(1.0, 0.0, -6.0);
        let r = scalar_curvature_exponential(3, &phi, 0.0).unwrap();
        assert!((r - 24.0 * (-2.0f64).exp()).abs() < 1e-14);
        assert!((r - 3.2479).abs() < 5e-4);
    }

    #[test]
    fn powerlaw_errors() {
        let u = PointJet::new(-1.0, 0.0, 0.0);
        assert!(matches!(scalar_curvature_powerlaw(3, &u, 0.0), Err(Error::Domain(_))));
        let u = PointJet::new(1.0, 0.0, 0.0);
        assert!(matches!(scalar_curvature_powerlaw(2, &u, 0.0), Err(Error::UnsupportedDimension { .. })));
        let bad = PointJet::new(1.0, f64::NAN, 0.0);
        assert!(scalar_curvature_exponential(3, &bad, 0.0).is_err());
    }

    #[test]
    fn volume_factors() {
        assert_eq!(conformal_volume_factor(1.0, ConformalMode::PowerLaw, 3).unwrap(), 1.0);
        assert!((conformal_volume_factor(2.0, ConformalMode::PowerLaw, 4).unwrap() - 16.0).abs() < 1e-12);
        assert!((conformal_volume_factor(1.0, ConformalMode::ExpU, 2).unwrap() - core::f64::consts::E).abs() < 1e-15);
        assert!(conformal_volume_factor(0.0, ConformalMode::PowerLaw, 3).is_err());
    }

    #[test]
    fn product_total() {
        assert_eq!(product_total_scalar(0.0, 0.0, 2).unwrap(), 0.0);
        assert!((product_total_scalar(0.0, 1.0, 2).unwrap() - 8.0 * PI).abs() < 1e-12);
        let a = product_total_scalar(1.0, 2.0, 3).unwrap();
        let b = product_total_scalar(2.0, 2.0, 3).unwrap();
        assert!((b - a - unit_sphere_volume(3)).abs() < 1e-12);
        assert!(product_total_scalar(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn trivial_factor_totals_vanish() {
        let quad = QuadSettings::default();
        let ball = BaseMetric::EuclideanBall { r_max: f64::INFINITY };
        let spec = ConformalMetricSpec::new(3, ball, ConformalMode::PowerLaw, Constant(1.0)).unwrap();
        assert_eq!(total_scalar_curvature(&spec, &quad).unwrap().value, 0.0);
        assert_eq!(total_scalar_via_energy(&spec, 0.0, &quad).unwrap().value, 0.0);
    }

    #[test]
    fn spec_invariants() {
        let ball = BaseMetric::EuclideanBall { r_max: 1.0 };
        assert!(ConformalMetricSpec::new(2, ball, ConformalMode::PowerLaw, Constant(1.0)).is_err());
        assert!(ConformalMetricSpec::new(2, ball, ConformalMode::ExpU, Constant(0.0)).is_ok());
    }
}
