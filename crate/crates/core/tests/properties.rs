use proptest::prelude::*;

use curvlab_core::flows::{interpolate, PeriodicGrid};
use curvlab_core::geomcore::*;
use curvlab_core::norms::{classify_trend, Verdict};
use curvlab_core::quad::{integrate, QuadSettings};
use curvlab_core::radial::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_is_a_monotone_step(r0 in 0.1f64..3.0, eps in 0.01f64..2.0, a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let c = RadialCutoff::new(r0, eps).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (vl, vh) = (c.eval(lo, 0).unwrap(), c.eval(hi, 0).unwrap());
        prop_assert!((0.0..=1.0).contains(&vl) && (0.0..=1.0).contains(&vh));
        prop_assert!(vh <= vl + 1e-15);
        prop_assert!(c.eval(lo, 1).unwrap() <= 1e-12);
    }

    #[test]
    fn constant_factors_rescale_base_curvature(c in 0.1f64..5.0, base in -3.0f64..3.0, n in 3usize..8) {
        let phi = PointJet::new(c.ln(), 0.0, 0.0);
        let e = scalar_curvature_exponential(n, &phi, base).unwrap();
        prop_assert!((e - base / (c * c)).abs() <= 1e-12 * (1.0 + e.abs()));
        let u = PointJet::new(c, 0.0, 0.0);
        let p = scalar_curvature_powerlaw(n, &u, base).unwrap();
        let want = base * c.powf(-4.0 / (n as f64 - 2.0));
        prop_assert!((p - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    /// `u^{4/(n-2)} = e^{2φ}` with `φ = (2/(n-2)) ln u`.
    #[test]
    fn powerlaw_and_exponential_agree(
        u in 0.2f64..4.0, gu in 0.0f64..3.0, lap in -10.0f64..10.0, base in -2.0f64..2.0, n in 3usize..7,
    ) {
        let k = 2.0 / (n as f64 - 2.0);
        let gsq = gu * gu;
        let phi = PointJet::new(k * u.ln(), k * k * gsq / (u * u), k * (lap / u - gsq / (u * u)));
        let a = scalar_curvature_powerlaw(n, &PointJet::new(u, gsq, lap), base).unwrap();
        let b = scalar_curvature_exponential(n, &phi, base).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn gaussian_moments_are_positive_and_decrease_in_i(n in 1usize..7, i in 0.5f64..50.0, r0 in 0.2f64..2.0) {
        let a = gaussian_moment(n, i, r0).unwrap();
        let b = gaussian_moment(n, 2.0 * i, r0).unwrap();
        prop_assert!(a > 0.0 && b > 0.0 && b < a);
    }

    #[test]
    fn oscillatory_moments_are_a_complex_reciprocal(a in -5.0f64..-0.1, b in -5.0f64..5.0) {
        let m = oscillatory_ijkl(a, b).unwrap();
        // (I + iJ)(a + ib) = -1/2
        prop_assert!((m.i * a - m.j * b + 0.5).abs() < 1e-12);
        prop_assert!((m.i * b + m.j * a).abs() < 1e-12);
        // (K + iL)(a + ib) = -(I + iJ)
        prop_assert!((m.k * a - m.l * b + m.i).abs() < 1e-12);
        prop_assert!((m.k * b + m.l * a + m.j).abs() < 1e-12);
    }

    #[test]
    fn twodim_closed_form_is_i_independent(i in 0.01f64..1e4) {
        let want = 128.0 * std::f64::consts::PI / 25.0;
        prop_assert!((twodim_total(i) - want).abs() < 1e-11 * want);
    }

    #[test]
    fn trend_verdict_is_scale_invariant(rate in -2.0f64..2.0, scale in 1e-3f64..1e3) {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&i: &f64| (i, i.powf(-rate))).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(i, v)| (i, scale * v)).collect();
        let (a, b) = (classify_trend(&pts), classify_trend(&scaled));
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.rate - rate).abs() < 1e-9);
        if rate >= 0.25 {
            prop_assert_eq!(a.verdict, Verdict::Vanishing);
        }
    }

    #[test]
    fn geometric_sweep_is_increasing_and_bounded(start in 0.5f64..10.0, ratio in 1.05f64..3.0, span in 1.0f64..100.0) {
        let s = geometric_sweep(start, ratio, start * span).unwrap();
        prop_assert_eq!(s[0], start);
        prop_assert!(s.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(*s.last().unwrap() <= start * span * (1.0 + 1e-12));
        prop_assert!(s.last().unwrap() * ratio > start * span);
    }

    #[test]
    fn quadrature_is_exact_for_cubics(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c3 in -5.0f64..5.0, b in 0.1f64..4.0) {
        let r = integrate(|x| c0 + c1 * x + c3 * x * x * x, 0.0, b, &QuadSettings::default()).unwrap();
        let want = c0 * b + 0.5 * c1 * b * b + 0.25 * c3 * b.powi(4);
        prop_assert!((r.value - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn interpolation_is_periodic(x in 0.0f64..1.0, y in 0.0f64..1.0, kx in -3i32..3, ky in -3i32..3) {
        let grid = PeriodicGrid::new(2, 16, 1.0).unwrap();
        let f: Vec<f64> = (0..grid.len()).map(|p| {
            let c = grid.coords(p);
            (2.0 * std::f64::consts::PI * c[0]).sin() * (2.0 * std::f64::consts::PI * c[1]).cos()
        }).collect();
        let a = interpolate(&grid, &f, [x, y, 0.0]);
        let b = interpolate(&grid, &f, [x + kx as f64, y + ky as f64, 0.0]);
        prop_assert!((a - b).abs() < 1e-12);
    }
}
