use std::f64::consts::PI;

use curvlab_core::geomcore::*;
use curvlab_core::quad::QuadSettings;
use curvlab_core::radial::*;
use curvlab_core::Error;

fn fam(kind: FamilyKind, n: usize, i: f64) -> ExampleFamily {
    ExampleFamily::new(kind, FamilyParams { n, i, ..FamilyParams::default() }).unwrap()
}

/// Five-point central differences of `f` at `x`: (f', f'').
fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    (d1, d2)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-3)
}

#[test]
fn identity_factor_has_zero_curvature() {
    let zero = PointJet::new(0.0, 0.0, 0.0);
    assert_eq!(scalar_curvature_exponential(3, &zero, 0.0).unwrap(), 0.0);
    let one = PointJet::new(1.0, 0.0, 0.0);
    assert_eq!(scalar_curvature_powerlaw(4, &one, 0.0).unwrap(), 0.0);
}

#[test]
fn below_family_at_origin() {
    // phi = alpha/i - r^2 near 0: laplacian -2n, gradient 0.
    let want = 24.0 * (-2.0f64).exp();
    let f = ExampleFamily::new(FamilyKind::Below, FamilyParams { n: 3, i: 1.0, alpha: 1.0, ..FamilyParams::default() }).unwrap();
    let spec = f.spec().unwrap();
    let got = spec.scalar_curvature_at(0.0).unwrap();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    assert!((got - 3.2479).abs() < 5e-4);
    // finite-difference cross-check of the Laplacian at a point off the axis
    let phi = |r: f64| f.jet(r).value;
    let r = 0.3;
    let (d1, d2) = fd(phi, r, 1e-3);
    let lap_fd = d2 + 2.0 * d1 / r;
    let jet = f.jet(r).point_jet(3, r);
    assert!((jet.laplacian - lap_fd).abs() < 1e-7);
    assert!((jet.laplacian + 6.0).abs() < 1e-12);
}

#[test]
fn two_dimensional_exponential_reduces_to_minus_e_minus_u_laplacian() {
    // u = sin x sin y: Δu = -2u, |∇u|² = cos²x sin²y + sin²x cos²y
    for &(x, y) in &[(0.3, 1.1), (2.0, -0.7), (1.5, 2.5)] {
        let u: f64 = f64::sin(x) * f64::sin(y);
        let lap = -2.0 * u;
        let grad = (x.cos() * y.sin()).powi(2) + (x.sin() * y.cos()).powi(2);
        let phi = PointJet::new(0.5 * u, 0.25 * grad, 0.5 * lap);
        let r = scalar_curvature_exponential(2, &phi, 0.0).unwrap();
        // finite-difference Laplacian of u
        let h = 1e-3;
        let f = |a: f64, b: f64| a.sin() * b.sin();
        let lap_fd = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
        assert!((r + (-u).exp() * lap_fd).abs() < 1e-6);
        assert!((r + (-u).exp() * lap).abs() < 1e-14);
    }
}

#[test]
fn powerlaw_rejects_low_dimension_and_nonpositive_factor() {
    let j = PointJet::new(1.0, 0.0, 0.0);
    assert!(matches!(scalar_curvature_powerlaw(2, &j, 0.0), Err(Error::UnsupportedDimension { n: 2, .. })));
    assert!(matches!(scalar_curvature_powerlaw(3, &PointJet::new(0.0, 0.0, 0.0), 0.0), Err(Error::Domain(_))));
    assert!(matches!(
        ExampleFamily::new(FamilyKind::C10, FamilyParams { n: 2, ..FamilyParams::default() }),
        Err(Error::UnsupportedDimension { n: 2, .. })
    ));
}

#[test]
fn volume_factors() {
    assert_eq!(conformal_volume_factor(1.0, ConformalMode::PowerLaw, 3).unwrap(), 1.0);
    assert!((conformal_volume_factor(2.0, ConformalMode::PowerLaw, 4).unwrap() - 16.0).abs() < 1e-12);
    assert!((conformal_volume_factor(1.0, ConformalMode::ExpU, 2).unwrap() - std::f64::consts::E).abs() < 1e-15);
    assert!((conformal_volume_factor(0.5, ConformalMode::Exp2Phi, 3).unwrap() - 1.5f64.exp()).abs() < 1e-14);
}

#[test]
fn integral_family_curvature_at_origin() {
    for n in 3..=6 {
        for i in [2.0, 10.0, 100.0] {
            let f = fam(FamilyKind::Integral, n, i);
            let nf = n as f64;
            let l = (nf + 2.0) / 4.0;
            let printed = 8.0 * nf * (nf - 1.0) / (nf - 2.0)
                * i.powf(l)
                * (i.powf(-1.0 + l) + 1.0).powf(-(nf + 2.0) / (nf - 2.0));
            let got = f.spec().unwrap().scalar_curvature_at(0.0).unwrap();
            assert!(close(got, printed, 1e-12), "n={n} i={i}: {got} vs {printed}");
        }
    }
}

#[test]
fn c10_peak_curvature_matches_pointwise_evaluation() {
    for n in [3usize, 4, 5] {
        let i = 400.0;
        let f = fam(FamilyKind::C10, n, i);
        let spec = f.spec().unwrap();
        for k in 1..=4u32 {
            let r = ((2.0 * k as f64 - 1.0) * PI / (2.0 * i)).sqrt();
            let got = spec.scalar_curvature_at(r).unwrap();
            let want = c10_peak_curvature(n, i, k);
            assert!(close(got, want, 1e-10), "n={n} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn family_jets_match_finite_differences() {
    let cases = [
        (FamilyKind::Below, 3, 4.0),
        (FamilyKind::Integral, 3, 2.0),
        (FamilyKind::Integral, 6, 5.0),
        (FamilyKind::C10, 3, 4.0),
        (FamilyKind::C21, 4, 3.0),
        (FamilyKind::TwoDim, 2, 3.0),
        (FamilyKind::Boundary, 3, 5.0),
    ];
    for (kind, n, i) in cases {
        let f = fam(kind, n, i);
        let ext = f.extent();
        for k in 1..40 {
            let r = ext * k as f64 / 40.0;
            let j = f.jet(r);
            let (d1, d2) = fd(|x| f.jet(x).value, r, 1e-4 * ext.max(1e-2));
            let scale = j.d1.abs().max(j.d2.abs()).max(1.0);
            assert!((j.d1 - d1).abs() <= 1e-6 * scale, "{kind:?} r={r}: d1 {} vs {d1}", j.d1);
            assert!((j.d2 - d2).abs() <= 1e-6 * scale, "{kind:?} r={r}: d2 {} vs {d2}", j.d2);
        }
    }
}

#[test]
fn cutoff_profile() {
    let c = RadialCutoff::new(1.0, 0.5).unwrap();
    assert_eq!(c.eval(0.0, 0).unwrap(), 1.0);
    assert_eq!(c.eval(1.5, 0).unwrap(), 0.0);
    assert_eq!(c.eval(1.25, 0).unwrap(), 0.0);
    assert!((c.eval(1.125, 0).unwrap() - 0.5).abs() < 1e-15);
    for r in [1.0, 1.25] {
        for order in [1u8, 2] {
            assert_eq!(c.eval(r, order).unwrap(), 0.0);
        }
    }
    assert!(matches!(c.eval(1.0, 3), Err(Error::UnsupportedDerivative(3))));
    assert!(matches!(c.eval(-1.0, 0), Err(Error::Domain(_))));
}

#[test]
fn c10_values_at_the_origin() {
    let f = fam(FamilyKind::C10, 3, 4.0);
    assert_eq!(f.factor_eval(0.0, 0).unwrap(), 1.0);
    assert_eq!(f.factor_eval(0.0, 1).unwrap(), 0.0);
    let lap = f.jet(0.0).laplacian(3, 0.0);
    assert!((lap - 6.0).abs() < 1e-12);
    assert_eq!(fam(FamilyKind::TwoDim, 2, 1.0).factor_eval(0.0, 0).unwrap(), 0.0);
    // beyond the support
    let support = f.support_radius().unwrap();
    assert_eq!(f.factor_eval(support + 0.1, 0).unwrap(), 1.0);
    assert_eq!(fam(FamilyKind::Below, 3, 4.0).factor_eval(5.0, 0).unwrap(), 0.0);
}

#[test]
fn gradient_integrand_values() {
    assert_eq!(fam(FamilyKind::C10, 3, 4.0).gradient_sq(0.0), 0.0);
    // 2 i r² = π on the plateau: |∇u|² = 4 r² cos²(i r²) ... which vanishes when i r² = π/2
    let i = 50.0;
    let r = (PI / (2.0 * i)).sqrt();
    assert!(fam(FamilyKind::C10, 3, i).gradient_sq(r) < 1e-24);
    // Integral family, n = 3, i = 2, r = 1 inside the plateau of a wider cutoff.
    let f = ExampleFamily::new(
        FamilyKind::Integral,
        FamilyParams { n: 3, i: 2.0, r0: 2.0, ..FamilyParams::default() },
    )
    .unwrap();
    let l = 1.25;
    let want = 4.0 * 2f64.powf(2.0 * l) * (-4.0f64).exp();
    assert!((f.gradient_sq(1.0) - want).abs() < 1e-14);
    assert!((want - 0.41443).abs() < 1e-5);
}

#[test]
fn twodim_total_by_quadrature_is_i_independent() {
    let q = QuadSettings::default();
    let values: Vec<f64> = [1.0, 3.0, 10.0, 50.0]
        .iter()
        .map(|&i| total_scalar_curvature(&fam(FamilyKind::TwoDim, 2, i).spec().unwrap(), &q).unwrap().value)
        .collect();
    for v in &values {
        assert!((v - values[0]).abs() < 1e-9);
    }
}

#[test]
fn divergence_identity_for_c10_and_integral() {
    let q = QuadSettings::default();
    let c10 = fam(FamilyKind::C10, 3, 50.0);
    let c10 = c10.spec().unwrap();
    let a = total_scalar_curvature(&c10, &q).unwrap().value;
    let b = total_scalar_via_energy(&c10, 0.0, &q).unwrap().value;
    assert!(((a - b) / b).abs() < 1e-6);
    let odd = fam(FamilyKind::Integral, 5, 100.0);
    let odd = odd.spec().unwrap();
    let a = total_scalar_curvature(&odd, &q).unwrap().value;
    let b = total_scalar_via_energy(&odd, 0.0, &q).unwrap().value;
    assert!(((a - b) / b).abs() < 1e-6);
}

#[test]
fn c10_total_exceeds_its_bound() {
    let f = fam(FamilyKind::C10, 3, 100.0);
    let total = total_scalar_curvature(&f.spec().unwrap(), &QuadSettings::default()).unwrap().value;
    let bound = family_total_lower_bound(&f).unwrap();
    assert!((bound - 32.0 * PI / 5.0).abs() < 1e-12);
    assert!(total >= bound);
}

#[test]
fn product_and_sphere_volumes() {
    assert_eq!(product_total_scalar(0.0, 0.0, 2).unwrap(), 0.0);
    assert!((product_total_scalar(0.0, 1.0, 2).unwrap() - 8.0 * PI).abs() < 1e-12);
    let a = product_total_scalar(1.0, 2.0, 3).unwrap();
    let b = product_total_scalar(3.0, 2.0, 3).unwrap();
    assert!(((b - a) / 2.0 - unit_sphere_volume(3)).abs() < 1e-12);
    for (m, want) in [(1, 2.0 * PI), (2, 4.0 * PI), (3, 2.0 * PI * PI)] {
        assert!(close(unit_sphere_volume(m), want, 1e-14), "m={m}");
    }
}

#[test]
fn torus_base_rejects_large_support() {
    let f = ExampleFamily::new(FamilyKind::ClosedTorus, FamilyParams { n: 3, r0: 0.9, side: 2.0, ..FamilyParams::default() });
    assert!(matches!(f, Err(Error::Geometry(_))));
}
