//! How far a conformal metric is from its flat base: sup-norms of `h = g_i - g`
//! and its first two derivatives, and `W^{1,p}` norms.
//!
//! The base is flat, so components are taken in an orthonormal base frame.
//! For `h = w(r) δ` with `w = m - 1` and `m` the metric factor:
//! `|h| = √n |w|`, `|∇h| = √n |w'|`, `|∇²h| = √n √(w''² + (n-1)(w'/r)²)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geomcore::{BaseMetric, ConformalMetricSpec, ConformalMode, RadialJet, RadialProfile};
use crate::math::{ceil, exp, ln, powf, powi, sqrt};
use crate::quad::{integrate, QuadSettings, QuadratureResult};
use crate::radial::ExampleFamily;
use crate::special::unit_sphere_volume;

/// Hard cap on the number of radial samples.
pub const MAX_SAMPLES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// `(p, ‖h‖_{W^{1,p}})` in the order requested.
    pub w1p: Vec<(f64, f64)>,
    pub sample_count: usize,
    /// Sampling hit [`MAX_SAMPLES`]; sup-norms may be underestimated.
    pub capped: bool,
}

impl NormReport {
    pub fn w1p_at(&self, p: f64) -> Option<f64> {
        self.w1p.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }
}

/// `w = m - 1` and its radial derivatives, where `g = m g_0`.
pub fn metric_deviation<P: RadialProfile>(spec: &ConformalMetricSpec<P>, r: f64) -> RadialJet {
    let j = spec.factor.jet(r);
    let nf = spec.n as f64;
    match spec.mode {
        ConformalMode::PowerLaw => {
            let q = 4.0 / (nf - 2.0);
            let u = j.value;
            let m = powf(u, q);
            let m1 = q * powf(u, q - 1.0) * j.d1;
            let m2 = q * (q - 1.0) * powf(u, q - 2.0) * j.d1 * j.d1 + q * powf(u, q - 1.0) * j.d2;
            RadialJet { value: m - 1.0, d1: m1, d2: m2 }
        }
        ConformalMode::Exp2Phi | ConformalMode::ExpU => {
            let c = if spec.mode == ConformalMode::Exp2Phi { 2.0 } else { 1.0 };
            let m = exp(c * j.value);
            RadialJet {
                value: libm::expm1(c * j.value),
                d1: c * j.d1 * m,
                d2: (c * j.d2 + c * c * j.d1 * j.d1) * m,
            }
        }
    }
}

/// `(|h|, |∇h|, |∇²h|)` at radius `r`.
pub fn pointwise_norms<P: RadialProfile>(spec: &ConformalMetricSpec<P>, r: f64) -> (f64, f64, f64) {
    let w = metric_deviation(spec, r);
    let nf = spec.n as f64;
    let sn = sqrt(nf);
    let tangential = if r > 0.0 { w.d1 / r } else { w.d2 };
    let hess = sqrt(w.d2 * w.d2 + (nf - 1.0) * tangential * tangential);
    (sn * w.value.abs(), sn * w.d1.abs(), sn * hess)
}

/// Radius containing everything that differs from the base.
fn norm_extent<P: RadialProfile>(spec: &ConformalMetricSpec<P>) -> Result<f64> {
    let domain = match spec.base {
        BaseMetric::EuclideanBall { r_max } => r_max,
        BaseMetric::FlatTorus { side } => 0.5 * side,
    };
    if let Some(s) = spec.factor.support_radius() {
        return Ok(s.min(domain));
    }
    if domain.is_finite() {
        return Ok(domain);
    }
    spec.factor
        .decay_radius(1e-16)
        .ok_or(Error::Domain("profile has neither compact support nor a decay radius"))
}

/// Sup-norms on a dense radial grid and `W^{1,p}` norms by radial quadrature.
///
/// The grid has `max(samples, 64 · oscillations)` points across the
/// extent, capped at [`MAX_SAMPLES`], and ten times that density on the
/// cutoff annulus.
pub fn metric_difference_norms<P: RadialProfile>(
    spec: &ConformalMetricSpec<P>,
    p_list: &[f64],
    samples: usize,
) -> Result<NormReport> {
    if p_list.iter().any(|&p| !(p > 1.0 && p.is_finite())) {
        return Err(Error::Domain("Sobolev exponent p must be > 1"));
    }
    if samples < 2 {
        return Err(Error::Config("need at least two radial samples"));
    }
    let extent = norm_extent(spec)?;
    let mut c0: f64 = 0.0;
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    let mut count = 0usize;
    let mut visit = |r: f64| {
        let (a, b, c) = pointwise_norms(spec, r);
        c0 = c0.max(a);
        c1 = c1.max(a + b);
        c2 = c2.max(a + b + c);
        count += 1;
    };

    let osc = spec.factor.oscillations(extent);
    let wanted = ceil((samples as f64).max(64.0 * osc));
    let capped = wanted > MAX_SAMPLES as f64;
    let m = if capped { MAX_SAMPLES } else { wanted as usize };
    for k in 0..=m {
        visit(extent * k as f64 / m as f64);
    }
    if let Some((a, b)) = spec.factor.transition() {
        let b = b.min(extent);
        if b > a {
            let dense = (ceil(10.0 * m as f64 * (b - a) / extent) as usize).clamp(2, MAX_SAMPLES);
            for k in 0..=dense {
                visit(a + (b - a) * k as f64 / dense as f64);
            }
        }
    }

    let n = spec.n;
    let vol = unit_sphere_volume(n - 1);
    let quad = QuadSettings { abs_tol: 0.0, rel_tol: 1e-9, ..QuadSettings::default() };
    let panels = (ceil(4.0 * osc) as usize).clamp(1, 200_000);
    let mut cuts = alloc::vec![0.0];
    if let Some((a, b)) = spec.factor.transition() {
        for c in [a, b] {
            if c > 0.0 && c < extent {
                cuts.push(c);
            }
        }
    }
    cuts.push(extent);
    let mut w1p = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let mut acc = QuadratureResult::default();
        for w in cuts.windows(2) {
            let share = ceil((w[1] - w[0]) / extent * panels as f64).max(1.0) as usize;
            let piece = integrate(
                |r| {
                    let (a, b, _) = pointwise_norms(spec, r);
                    (powf(a, p) + powf(b, p)) * powi(r, n as i32 - 1)
                },
                w[0],
                w[1],
                &quad.with_panels(share),
            );
            let piece = match piece {
                Ok(v) => v,
                // A zero integrand cannot meet a purely relative target.
                Err(Error::Accuracy { best }) if best.value == 0.0 => best,
                Err(e) => return Err(e),
            };
            acc = acc.plus(piece);
        }
        w1p.push((p, powf(vol * acc.value.max(0.0), 1.0 / p)));
    }

    Ok(NormReport { c0, c1, c2, w1p, sample_count: count, capped })
}

/// Trend of one norm across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Every value is numerically zero.
    Zero,
    /// Decays like a positive power of `1/i`.
    Vanishing,
    /// Stays away from zero (or grows).
    BoundedBelow,
    /// Neither pattern is clear.
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Zero => "zero",
            Verdict::Vanishing => "vanishing",
            Verdict::BoundedBelow => "bounded-below",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Whether the sequence converges in this norm.
    pub fn converges(self) -> bool {
        matches!(self, Verdict::Zero | Verdict::Vanishing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trend {
    /// `-slope` of the least-squares fit of `log value` against `log i`.
    pub rate: f64,
    pub verdict: Verdict,
    pub min: f64,
}

pub const ZERO_LEVEL: f64 = 1e-13;
pub const VANISHING_RATE: f64 = 0.25;
pub const BOUNDED_RATE: f64 = 0.1;

/// Classify `(i, value)` pairs.
pub fn classify_trend(points: &[(f64, f64)]) -> Trend {
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if points.iter().all(|p| p.1.abs() <= ZERO_LEVEL) {
        return Trend { rate: f64::INFINITY, verdict: Verdict::Zero, min };
    }
    if points.iter().any(|p| p.1 <= ZERO_LEVEL) {
        return Trend { rate: f64::NAN, verdict: Verdict::Inconclusive, min };
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| ln(p.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| ln(p.1)).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let rate = -sxy / sxx;
    let non_increasing = points.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    let verdict = if rate >= VANISHING_RATE && non_increasing {
        Verdict::Vanishing
    } else if rate <= BOUNDED_RATE {
        Verdict::BoundedBelow
    } else {
        Verdict::Inconclusive
    };
    Trend { rate, verdict, min }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<(f64, NormReport)>,
    pub c0: Trend,
    pub c1: Trend,
    pub c2: Trend,
    /// One trend per requested `p`.
    pub w1p: Vec<(f64, Trend)>,
}

/// Trends from precomputed norm reports, sorted by `i`.
pub fn classify_reports(mut rows: Vec<(f64, NormReport)>) -> Result<ConvergenceReport> {
    if rows.len() < 3 {
        return Err(Error::Config("classification needs at least three sweep points"));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let col = |f: &dyn Fn(&NormReport) -> f64| -> Vec<(f64, f64)> { rows.iter().map(|(i, r)| (*i, f(r))).collect() };
    let c0 = classify_trend(&col(&|r| r.c0));
    let c1 = classify_trend(&col(&|r| r.c1));
    let c2 = classify_trend(&col(&|r| r.c2));
    let ps: Vec<f64> = rows[0].1.w1p.iter().map(|(p, _)| *p).collect();
    let w1p = ps
        .iter()
        .map(|&p| (p, classify_trend(&col(&|r| r.w1p_at(p).unwrap_or(f64::NAN)))))
        .collect();
    Ok(ConvergenceReport { rows, c0, c1, c2, w1p })
}

/// Compute norms for each `i` in the sweep and classify their trends.
pub fn convergence_classification(
    family: &ExampleFamily,
    i_sweep: &[f64],
    p_list: &[f64],
    samples: usize,
) -> Result<ConvergenceReport> {
    if i_sweep.len() < 3 {
        return Err(Error::Config("classification needs at least three sweep points"));
    }
    let rows = i_sweep
        .iter()
        .map(|&i| {
            let f = family.with_index(i)?;
            Ok((i, metric_difference_norms(&f.spec()?, p_list, samples)?))
        })
        .collect::<Result<Vec<_>>>()?;
    classify_reports(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{FamilyKind, FamilyParams};

    struct Constant(f64);
    impl RadialProfile for Constant {
        fn jet(&self, _r: f64) -> RadialJet {
            RadialJet { value: self.0, d1: 0.0, d2: 0.0 }
        }
        fn support_radius(&self) -> Option<f64> {
            Some(1.0)
        }
    }

    fn c10(i: f64) -> ExampleFamily {
        ExampleFamily::new(FamilyKind::C10, FamilyParams { n: 3, i, ..Default::default() }).unwrap()
    }

    #[test]
    fn identical_metrics_have_zero_norms() {
        let ball = BaseMetric::EuclideanBall { r_max: f64::INFINITY };
        let spec = ConformalMetricSpec::new(3, ball, ConformalMode::PowerLaw, Constant(1.0)).unwrap();
        let rep = metric_difference_norms(&spec, &[2.0, 4.0], 100).unwrap();
        assert_eq!((rep.c0, rep.c1, rep.c2), (0.0, 0.0, 0.0));
        assert!(rep.w1p.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn p_must_exceed_one() {
        let f = c10(10.0);
        assert!(matches!(metric_difference_norms(&f.spec().unwrap(), &[1.0], 100), Err(Error::Domain(_))));
        assert!(metric_difference_norms(&f.spec().unwrap(), &[0.5], 100).is_err());
    }

    #[test]
    fn c10_plateau_sup_norm() {
        // On the plateau w = (1 + sin(i r²)/i)^4 - 1, maximal where sin = 1.
        let i = 40.0;
        let f = c10(i);
        let rep = metric_difference_norms(&f.spec().unwrap(), &[4.0], 10_000).unwrap();
        let want = sqrt(3.0) * (powi(1.0 + 1.0 / i, 4) - 1.0);
        assert!((rep.c0 - want).abs() < 1e-6 * want);
        assert!(rep.c0 <= rep.c1 && rep.c1 <= rep.c2);
    }

    #[test]
    fn hessian_norm_at_origin_is_isotropic() {
        let f = c10(10.0);
        let spec = f.spec().unwrap();
        let (_, _, h0) = pointwise_norms(&spec, 0.0);
        let (_, _, h1) = pointwise_norms(&spec, 1e-6);
        assert!((h0 - h1).abs() < 1e-4 * h0);
    }

    #[test]
    fn trend_rules() {
        let pts: Vec<(f64, f64)> = [10.0, 40.0, 160.0].iter().map(|&i| (i, 1.0 / i)).collect();
        let t = classify_trend(&pts);
        assert_eq!(t.verdict, Verdict::Vanishing);
        assert!((t.rate - 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = [10.0, 40.0, 160.0].iter().map(|&i| (i, 2.0 + 1.0 / i)).collect();
        assert_eq!(classify_trend(&flat).verdict, Verdict::BoundedBelow);
        let zero = [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        assert_eq!(classify_trend(&zero).verdict, Verdict::Zero);
        let bumpy = [(1.0, 1.0), (2.0, 0.1), (4.0, 0.2)];
        assert_ne!(classify_trend(&bumpy).verdict, Verdict::Vanishing);
    }

    #[test]
    fn constant_family_converges() {
        let ball = BaseMetric::EuclideanBall { r_max: f64::INFINITY };
        let spec = ConformalMetricSpec::new(3, ball, ConformalMode::PowerLaw, Constant(1.0)).unwrap();
        let rows = [2.0, 4.0, 8.0]
            .iter()
            .map(|&i| (i, metric_difference_norms(&spec, &[3.0], 50).unwrap()))
            .collect();
        let rep = classify_reports(rows).unwrap();
        for t in [&rep.c0, &rep.c1, &rep.c2] {
            assert_eq!(t.verdict, Verdict::Zero);
            assert!(t.verdict.converges());
        }
    }

    #[test]
    fn short_sweep_rejected() {
        assert!(convergence_classification(&c10(10.0), &[10.0, 20.0], &[4.0], 100).is_err());
    }
}
