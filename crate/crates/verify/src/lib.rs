//! Acceptance criteria with pinned tolerances, shared by `curvlab verify`
//! and this crate's `acceptance` test target.
//!
//! Every criterion runs its computation from scratch and reports a single
//! PASS/FAIL line with the measured quantities. Tolerances can be
//! overridden per run as `criterion-id.name=value`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use curvlab_core::flows::{
    cfl_limit, conformal_cfl_limit, conformal_ricci_flow_2d_step, curvature_from_grid, deturck_consistency,
    evolution_identity_residual, perturbed_metric, ricci_heat_step, FlowState, MetricTensorField, PeriodicGrid,
    Perturbation, ScalarField,
};
use curvlab_core::geomcore::{
    scalar_curvature_powerlaw, total_scalar_curvature, total_scalar_via_energy, PointJet, RadialProfile,
};
use curvlab_core::norms::{convergence_classification, Verdict};
use curvlab_core::quad::{integrate, QuadSettings};
use curvlab_core::radial::{
    boundary_audit, family_total_lower_bound, find_threshold_i0, first_moment, gaussian_moment, gaussian_moment_k,
    geometric_sweep, twodim_total, twodim_total_from_moments, ExampleFamily, FamilyKind, FamilyParams, RadialCutoff,
};
use curvlab_core::{Error, Result};

/// What a criterion reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

type Check = fn(&Tolerances) -> Result<Outcome>;

pub struct Criterion {
    pub id: &'static str,
    pub tags: &'static [&'static str],
    pub summary: &'static str,
    /// Pinned tolerances, by name.
    pub tolerances: &'static [(&'static str, f64)],
    check: Check,
}

impl std::fmt::Debug for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Criterion").field("id", &self.id).field("tags", &self.tags).finish()
    }
}

/// `(criterion id, tolerance name) -> value`
pub type Overrides = BTreeMap<(String, String), f64>;

/// Effective tolerances of one criterion.
pub struct Tolerances<'a> {
    criterion: &'a Criterion,
    overrides: &'a Overrides,
}

impl Tolerances<'_> {
    pub fn get(&self, name: &str) -> f64 {
        let pinned = self
            .criterion
            .tolerances
            .iter()
            .find(|(k, _)| *k == name)
            .unwrap_or_else(|| panic!("criterion {} has no tolerance {name}", self.criterion.id))
            .1;
        self.overrides.get(&(self.criterion.id.to_string(), name.to_string())).copied().unwrap_or(pinned)
    }
}

/// Outcome of running one criterion.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub index: usize,
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl RunResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {:<22} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.id,
            self.seconds,
            self.detail
        )
    }
}

pub fn registry() -> &'static [Criterion] {
    &REGISTRY
}

pub fn find(id: &str) -> Option<&'static Criterion> {
    REGISTRY.iter().find(|c| c.id == id)
}

/// Criteria whose id or one of whose tags contains `filter`.
pub fn select(filter: Option<&str>) -> Vec<&'static Criterion> {
    REGISTRY
        .iter()
        .filter(|c| match filter {
            None => true,
            Some(f) => c.id.contains(f) || c.tags.iter().any(|t| t.contains(f)),
        })
        .collect()
}

pub fn parse_overrides(items: &[String]) -> std::result::Result<Overrides, String> {
    let mut out = Overrides::new();
    for item in items {
        let bad = || format!("tolerance override {item:?} is not `criterion.name=value`");
        let (key, value) = item.split_once('=').ok_or_else(bad)?;
        let (id, name) = key.trim().split_once('.').ok_or_else(bad)?;
        let v: f64 = value.trim().parse().map_err(|_| bad())?;
        out.insert((id.to_string(), name.to_string()), v);
    }
    Ok(out)
}

/// Reject overrides that name no pinned tolerance.
pub fn check_overrides(overrides: &Overrides) -> std::result::Result<(), String> {
    for (id, name) in overrides.keys() {
        let known = find(id).is_some_and(|c| c.tolerances.iter().any(|(k, _)| k == name));
        if !known {
            return Err(format!("unknown tolerance {id}.{name}"));
        }
    }
    Ok(())
}

pub fn run(c: &'static Criterion, overrides: &Overrides) -> RunResult {
    let index = REGISTRY.iter().position(|x| std::ptr::eq(x, c)).map_or(0, |k| k + 1);
    let start = Instant::now();
    let tol = Tolerances { criterion: c, overrides };
    let (passed, detail) = match (c.check)(&tol) {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    RunResult { index, id: c.id, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

static REGISTRY: [Criterion; 10] = [
    Criterion {
        id: "twodim-exact",
        tags: &["integrals", "radial"],
        summary: "planar family total equals 128π/25 by closed form and by quadrature, independent of i",
        tolerances: &[("rel", 1e-6)],
        check: twodim_exact,
    },
    Criterion {
        id: "integral-recurrence",
        tags: &["integrals", "radial"],
        summary: "Gaussian moment recurrence against quadrature; first moment in closed form",
        tolerances: &[("abs", 1e-10), ("first_rel", 4.0 * f64::EPSILON)],
        check: integral_recurrence,
    },
    Criterion {
        id: "divergence-identity",
        tags: &["integrals", "geomcore"],
        summary: "direct total against the energy form for C10, Integral, C21",
        tolerances: &[("rel", 1e-6)],
        check: divergence_identity,
    },
    Criterion {
        id: "lower-bound-thresholds",
        tags: &["integrals", "radial"],
        summary: "C10 and C21 totals stay above their closed-form bounds from some i0 <= 200",
        tolerances: &[("i0_max", 200.0)],
        check: lower_bound_thresholds,
    },
    Criterion {
        id: "convergence-modes",
        tags: &["norms"],
        summary: "C10 is C0 but not C1, C21 is C1 but not C2, Integral is not C0",
        tolerances: &[("rate_min", 0.8), ("c1_floor", 0.5)],
        check: convergence_modes,
    },
    Criterion {
        id: "gauss-bonnet",
        tags: &["flows"],
        summary: "2-D conformal Ricci flow keeps ∫R dvol at 0 on the torus",
        tolerances: &[("abs", 1e-3)],
        check: gauss_bonnet,
    },
    Criterion {
        id: "evolution-identity",
        tags: &["flows"],
        summary: "d/dt ∫R e^{-f} against its predicted value; n|Ric|² >= R² pointwise",
        tolerances: &[("n2_max", 0.05), ("n3_max", 0.10), ("order_min", 1.0), ("cs_scale", 1e-8)],
        check: evolution_identity,
    },
    Criterion {
        id: "deturck-consistency",
        tags: &["flows"],
        summary: "pulled-back Ricci–DeTurck solution solves Ricci flow",
        tolerances: &[("max", 0.10)],
        check: deturck,
    },
    Criterion {
        id: "oracle-hygiene",
        tags: &["geomcore", "radial", "flows"],
        summary: "analytic derivatives against finite differences; grid curvature order",
        tolerances: &[("fd_rel", 1e-6), ("order_min", 3.5)],
        check: oracle_hygiene,
    },
    Criterion {
        id: "boundary-audit",
        tags: &["integrals", "radial"],
        summary: "boundary family: boundary term, energy and direct total for i = 2..9",
        tolerances: &[],
        check: boundary_audit_check,
    },
];

fn fam(kind: FamilyKind, n: usize, i: f64) -> Result<ExampleFamily> {
    ExampleFamily::new(kind, FamilyParams { n, i, ..FamilyParams::default() })
}

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    hi - lo
}

// 1 ------------------------------------------------------------------------

fn twodim_exact(tol: &Tolerances) -> Result<Outcome> {
    let rel = tol.get("rel");
    let want = 128.0 * PI / 25.0;
    let q = QuadSettings::default();
    let (mut closed, mut moments, mut quad) = (Vec::new(), Vec::new(), Vec::new());
    for i in [1.0, 3.0, 10.0, 50.0] {
        closed.push(twodim_total(i));
        moments.push(twodim_total_from_moments(i)?);
        quad.push(total_scalar_curvature(&fam(FamilyKind::TwoDim, 2, i)?.spec()?, &q)?.value);
    }
    let worst = |v: &[f64]| v.iter().map(|&x| rel_err(x, want)).fold(0.0, f64::max);
    let (ea, eb) = (worst(&closed), worst(&quad));
    let (sa, sb) = (spread(&closed) / want, spread(&quad) / want);
    let passed = ea <= rel && eb <= rel && sa <= rel && sb <= rel;
    Ok(Outcome::new(
        passed,
        format!(
            "closed form rel err {ea:.1e} (i-spread {sa:.1e}); quadrature of -Δu = {:.3e}, rel err {eb:.1e} \
             (i-spread {sb:.1e}); moment assembly = {:.3e}",
            quad[1], moments[1]
        ),
    ))
}

// 2 ------------------------------------------------------------------------

fn integral_recurrence(tol: &Tolerances) -> Result<Outcome> {
    let abs = tol.get("abs");
    let first_rel = tol.get("first_rel");
    let q = QuadSettings { abs_tol: 1e-14, ..QuadSettings::default() };
    let mut worst: f64 = 0.0;
    for n in 1..=6usize {
        for i in [1.0, 10.0] {
            for r0 in [0.5, 1.0] {
                let rec = gaussian_moment(n, i, r0)?;
                let direct = integrate(|r| r.powi(n as i32 + 1) * (-2.0 * i * r * r).exp(), 0.0, r0, &q)?;
                worst = worst.max((rec - direct.value).abs());
            }
        }
    }
    let mut first_worst: f64 = 0.0;
    let mut same = true;
    for i in [1.0, 10.0] {
        for r0 in [0.5, 1.0] {
            let closed = first_moment(i, r0);
            same &= gaussian_moment_k(1, i, r0)? == closed;
            let direct = integrate(|r| r * (-2.0 * i * r * r).exp(), 0.0, r0, &q)?.value;
            first_worst = first_worst.max(rel_err(closed, direct));
        }
    }
    Ok(Outcome::new(
        worst <= abs && first_worst <= first_rel && same,
        format!(
            "recurrence max abs err {worst:.1e}; first moment rel err {first_worst:.1e}, recurrence base case {}",
            if same { "identical" } else { "differs" }
        ),
    ))
}

// 3 ------------------------------------------------------------------------

fn divergence_identity(tol: &Tolerances) -> Result<Outcome> {
    let rel = tol.get("rel");
    let q = QuadSettings::default();
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for kind in [FamilyKind::C10, FamilyKind::Integral, FamilyKind::C21] {
        for n in 3..=5 {
            for i in [10.0, 100.0] {
                let f = fam(kind, n, i)?;
                let s = f.spec()?;
                let a = total_scalar_curvature(&s, &q)?.value;
                let b = total_scalar_via_energy(&s, 0.0, &q)?.value;
                let e = rel_err(a, b);
                if e > worst {
                    worst = e;
                    at = format!("{} n={n} i={i}", kind.name());
                }
            }
        }
    }
    Ok(Outcome::new(worst <= rel, format!("max rel diff {worst:.1e} over 18 cases (at {at})")))
}

// 4 ------------------------------------------------------------------------

fn lower_bound_thresholds(tol: &Tolerances) -> Result<Outcome> {
    let i0_max = tol.get("i0_max");
    let sweep = geometric_sweep(2.0, 1.25, 800.0)?;
    let c10 = fam(FamilyKind::C10, 3, 2.0)?;
    let b10 = family_total_lower_bound(&c10)?;
    let r10 = find_threshold_i0(&c10, b10, &sweep, &QuadSettings::default())?;
    // the oscillatory C21 integrand needs a relative target at large i
    let fine = QuadSettings { max_evals: 20_000_000, ..QuadSettings::default() }.with_rel_tol(1e-8);
    let c21 = fam(FamilyKind::C21, 3, 2.0)?;
    let b21 = family_total_lower_bound(&c21)?;
    let r21 = find_threshold_i0(&c21, b21, &sweep, &fine)?;
    let last = |r: &curvlab_core::radial::ThresholdReport| r.samples.last().map_or(f64::NAN, |s| s.1.value);
    Ok(Outcome::new(
        r10.i0 <= i0_max && r21.i0 <= i0_max,
        format!(
            "C10 bound {b10:.4}: i0 = {:.2}, total(800) = {:.4}; C21 bound {b21:.4}: i0 = {:.2}, total(800) = {:.4}; {} indices in [2, 800]",
            r10.i0,
            last(&r10),
            r21.i0,
            last(&r21),
            sweep.len()
        ),
    ))
}

// 5 ------------------------------------------------------------------------

fn convergence_modes(tol: &Tolerances) -> Result<Outcome> {
    let rate_min = tol.get("rate_min");
    let c1_floor = tol.get("c1_floor");
    let sweep = [10.0, 20.0, 40.0, 80.0, 160.0];
    let ps = [4.0, 8.0];
    let c10 = convergence_classification(&fam(FamilyKind::C10, 3, 10.0)?, &sweep, &ps, 10_000)?;
    let c10_c1_min = c10.rows.iter().filter(|(i, _)| *i >= 20.0).map(|(_, r)| r.c1).fold(f64::INFINITY, f64::min);
    let ok10 = c10.c0.verdict == Verdict::Vanishing
        && c10.c0.rate >= rate_min
        && c10.c1.verdict == Verdict::BoundedBelow
        && c10_c1_min >= c1_floor;
    let c21 = convergence_classification(&fam(FamilyKind::C21, 3, 10.0)?, &sweep, &ps, 10_000)?;
    let ok21 = c21.c1.verdict == Verdict::Vanishing && c21.c2.verdict == Verdict::BoundedBelow;
    let mut ok_int = true;
    let mut int_detail = Vec::new();
    for n in [3usize, 4, 5] {
        let rep = convergence_classification(&fam(FamilyKind::Integral, n, 10.0)?, &sweep, &ps, 10_000)?;
        ok_int &= rep.c0.verdict == Verdict::BoundedBelow;
        int_detail.push(format!("n={n} {} (min {:.2})", rep.c0.verdict.name(), rep.c0.min));
    }
    Ok(Outcome::new(
        ok10 && ok21 && ok_int,
        format!(
            "C10 c0 {} rate {:.2}, c1 {} min(i>=20) {:.2}; C21 c1 {} rate {:.2}, c2 {}; Integral c0 {}",
            c10.c0.verdict.name(),
            c10.c0.rate,
            c10.c1.verdict.name(),
            c10_c1_min,
            c21.c1.verdict.name(),
            c21.c1.rate,
            c21.c2.verdict.name(),
            int_detail.join(", ")
        ),
    ))
}

// 6 ------------------------------------------------------------------------

fn conformal_metric(u: &ScalarField) -> MetricTensorField {
    let mut g = MetricTensorField::zeros(u.grid);
    for (p, &v) in u.data.iter().enumerate() {
        let e = v.exp();
        g.set(p, &[[e, 0.0, 0.0], [0.0, e, 0.0], [0.0, 0.0, e]]);
    }
    g
}

fn grid_total(g: &MetricTensorField) -> Result<f64> {
    let c = curvature_from_grid(g)?;
    let sum: f64 = (0..g.grid.len()).map(|p| c.scalar.data[p] * c.sqrt_det[p]).sum();
    Ok(sum * g.grid.cell_volume())
}

fn gauss_bonnet(tol: &Tolerances) -> Result<Outcome> {
    let abs = tol.get("abs");
    let grid = PeriodicGrid::new(2, 64, 1.0)?;
    let w = 2.0 * PI;
    let mut u = ScalarField::from_fn(grid, |x| 0.1 * ((w * x[1]).cos() + (w * x[0]).sin()));
    let t_end = 0.05;
    let mut t = 0.0;
    let mut worst = grid_total(&conformal_metric(&u))?.abs();
    let mut steps = 0;
    while t_end - t > 1e-14 {
        let dt = conformal_cfl_limit(&u).min(t_end - t);
        u = conformal_ricci_flow_2d_step(&u, dt)?;
        t += dt;
        steps += 1;
        worst = worst.max(grid_total(&conformal_metric(&u))?.abs());
    }
    Ok(Outcome::new(worst <= abs, format!("max |∫R dvol| = {worst:.2e} over {steps} steps to t = {t}")))
}

// 7 ------------------------------------------------------------------------

/// Smallest `n|Ric|² - R²` relative to `1 + max |Ric|²`.
fn cauchy_schwarz_margin(g: &MetricTensorField) -> Result<f64> {
    let n = g.grid.n() as f64;
    let c = curvature_from_grid(g)?;
    let scale = 1.0 + c.ricci_sq.iter().fold(0.0f64, |m, v| m.max(*v));
    let min = (0..g.grid.len())
        .map(|p| n * c.ricci_sq[p] - c.scalar.data[p] * c.scalar.data[p])
        .fold(f64::INFINITY, f64::min);
    Ok(min / scale)
}

/// Step the coupled flow to `t_end`, tracking the Cauchy–Schwarz margin.
fn advance_checked(s: &FlowState, t_end: f64, margin: &mut f64) -> Result<FlowState> {
    let mut cur = s.clone();
    while t_end - cur.t > 1e-14 {
        let dt = cfl_limit(&cur.g)?.min(t_end - cur.t);
        cur = ricci_heat_step(&cur, dt)?;
        *margin = margin.min(cauchy_schwarz_margin(&cur.g)?);
    }
    cur.t = t_end;
    Ok(cur)
}

struct IdentityRun {
    residuals: [f64; 3],
    orders: [f64; 2],
    margin: f64,
}

fn identity_run(n: usize, res: usize, amplitude: f64) -> Result<IdentityRun> {
    let grid = PeriodicGrid::new(n, res, 1.0)?;
    let f = ScalarField::from_fn(grid, |x| 0.1 * (2.0 * PI * x[1]).cos());
    let s0 = FlowState::new(perturbed_metric(grid, amplitude, Perturbation::Conformal)).with_weight(f);
    let mut margin = cauchy_schwarz_margin(&s0.g)?;
    let t0 = 0.005;
    let dts = [4e-3, 2e-3, 1e-3];
    let s = advance_checked(&s0, t0, &mut margin)?;
    // cover the widest difference window as well
    advance_checked(&s, t0 + dts[0], &mut margin)?;
    let mut residuals = [0.0; 3];
    for (k, &dt) in dts.iter().enumerate() {
        residuals[k] = evolution_identity_residual(&s, dt)?.residual;
    }
    let order = |a: f64, b: f64| (a / b).log2();
    Ok(IdentityRun { residuals, orders: [order(residuals[0], residuals[1]), order(residuals[1], residuals[2])], margin })
}

fn evolution_identity(tol: &Tolerances) -> Result<Outcome> {
    let order_min = tol.get("order_min");
    let cs_scale = tol.get("cs_scale");
    let mut passed = true;
    let mut parts = Vec::new();
    for (n, res, amp, max) in [(2usize, 64usize, 0.05, tol.get("n2_max")), (3, 32, 0.02, tol.get("n3_max"))] {
        let r = identity_run(n, res, amp)?;
        let ok = r.residuals.iter().all(|&x| x <= max)
            && r.orders.iter().all(|&o| o >= order_min)
            && r.margin >= -cs_scale;
        passed &= ok;
        parts.push(format!(
            "n={n}: residuals {:.2e}/{:.2e}/{:.2e} at dt 4e-3/2e-3/1e-3, orders {:.2}/{:.2}, CS margin {:.1e}",
            r.residuals[0], r.residuals[1], r.residuals[2], r.orders[0], r.orders[1], r.margin
        ));
    }
    Ok(Outcome::new(passed, parts.join("; ")))
}

// 8 ------------------------------------------------------------------------

fn deturck(tol: &Tolerances) -> Result<Outcome> {
    let max = tol.get("max");
    let grid = PeriodicGrid::new(2, 64, 1.0)?;
    let s0 = FlowState::new(perturbed_metric(grid, 0.05, Perturbation::Anisotropic));
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for t in [0.005, 0.01] {
        let r = deturck_consistency(&s0, t, 0.001)?;
        worst = worst.max(r.residual);
        parts.push(format!("t={t}: {:.2e} (min det DΦ {:.4})", r.residual, r.min_jacobian_det));
    }
    Ok(Outcome::new(worst <= max, format!("L² relative residual {}", parts.join(", "))))
}

// 9 ------------------------------------------------------------------------

fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    (d1, d2)
}

/// Worst `|analytic - fd| / max(1, |d1|, |d2|)` over interior sample radii.
fn jet_mismatch(jet: impl Fn(f64) -> (f64, f64, f64), extent: f64) -> f64 {
    let h = 1e-4 * extent.max(1e-2);
    (1..40)
        .map(|k| {
            let r = extent * k as f64 / 40.0;
            let (_, a1, a2) = jet(r);
            let (d1, d2) = fd(|x| jet(x).0, r, h);
            let scale = a1.abs().max(a2.abs()).max(1.0);
            ((a1 - d1).abs() / scale).max((a2 - d2).abs() / scale)
        })
        .fold(0.0, f64::max)
}

fn curvature_orders() -> Result<(f64, f64)> {
    let k = 2.0 * PI;
    let mut errs2 = Vec::new();
    for res in [16usize, 32, 64] {
        let grid = PeriodicGrid::new(2, res, 1.0)?;
        let u = |x: [f64; 3]| 0.1 * (k * x[0]).sin();
        let g = MetricTensorField::conformal(grid, |x| u(x).exp());
        let c = curvature_from_grid(&g)?;
        let err = (0..grid.len())
            .map(|p| {
                let x = grid.coords(p);
                // R = -e^{-u} Δu
                (c.scalar.data[p] - (-u(x)).exp() * 0.1 * k * k * (k * x[0]).sin()).abs()
            })
            .fold(0.0, f64::max);
        errs2.push(err);
    }
    let a = 0.1;
    let jet = |x: [f64; 3]| {
        let (sx, cx, sy, cy) = ((k * x[0]).sin(), (k * x[0]).cos(), (k * x[1]).sin(), (k * x[1]).cos());
        PointJet::new(1.0 + a * sx * sy, a * a * k * k * (cx * cx * sy * sy + sx * sx * cy * cy), -2.0 * a * k * k * sx * sy)
    };
    let mut errs3 = Vec::new();
    for res in [16usize, 32] {
        let grid = PeriodicGrid::new(3, res, 1.0)?;
        let g = MetricTensorField::conformal(grid, |x| jet(x).value.powi(4));
        let c = curvature_from_grid(&g)?;
        let mut err: f64 = 0.0;
        for p in 0..grid.len() {
            err = err.max((c.scalar.data[p] - scalar_curvature_powerlaw(3, &jet(grid.coords(p)), 0.0)?).abs());
        }
        errs3.push(err);
    }
    let o2 = errs2.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    let o3 = (errs3[0] / errs3[1]).log2();
    Ok((o2, o3))
}

fn oracle_hygiene(tol: &Tolerances) -> Result<Outcome> {
    let fd_rel = tol.get("fd_rel");
    let order_min = tol.get("order_min");
    let cases = [
        (FamilyKind::Below, 3, 4.0),
        (FamilyKind::Below, 2, 9.0),
        (FamilyKind::Integral, 3, 2.0),
        (FamilyKind::Integral, 6, 5.0),
        (FamilyKind::C10, 3, 4.0),
        (FamilyKind::C21, 4, 3.0),
        (FamilyKind::TwoDim, 2, 3.0),
        (FamilyKind::Boundary, 3, 5.0),
    ];
    let mut worst: f64 = 0.0;
    let torus = ExampleFamily::new(FamilyKind::ClosedTorus, FamilyParams { n: 3, i: 4.0, r0: 0.5, ..FamilyParams::default() })?;
    for f in cases.iter().map(|&(kind, n, i)| fam(kind, n, i)).chain([Ok(torus)]) {
        let f = f?;
        worst = worst.max(jet_mismatch(
            |r| {
                let j = f.jet(r);
                (j.value, j.d1, j.d2)
            },
            f.extent(),
        ));
    }
    for (r0, eps) in [(1.0, 0.25), (0.5, 0.5), (2.0, 0.1)] {
        let c = RadialCutoff::new(r0, eps)?;
        worst = worst.max(jet_mismatch(
            |r| {
                let j = c.jet(r);
                (j.value, j.d1, j.d2)
            },
            c.outer_radius() * 1.1,
        ));
    }
    let (o2, o3) = curvature_orders()?;
    Ok(Outcome::new(
        worst <= fd_rel && o2 >= order_min && o3 >= order_min,
        format!("max derivative mismatch {worst:.1e} over 9 families and 3 cutoffs; curvature order 2-D {o2:.2}, 3-D {o3:.2}"),
    ))
}

// 10 -----------------------------------------------------------------------

fn boundary_audit_check(_: &Tolerances) -> Result<Outcome> {
    let idx: Vec<f64> = (2..=9).map(f64::from).collect();
    let rows = boundary_audit(3, &idx, &QuadSettings::default())?;
    if rows.len() != idx.len() {
        return Err(Error::Config("audit returned the wrong number of rows"));
    }
    let consistent = rows.iter().all(|r| r.consistent && r.boundary_vanishes == (r.boundary_term.abs() <= 1e-12));
    let terms: Vec<String> = rows.iter().map(|r| format!("{}:{:+.4}", r.i, r.boundary_term)).collect();
    let nonzero: Vec<String> = rows.iter().filter(|r| !r.boundary_vanishes).map(|r| r.i.to_string()).collect();
    let flag = if nonzero.is_empty() {
        "boundary term vanishes for every i".to_string()
    } else {
        format!("FLAG: boundary term is nonzero for i = {} (claimed to vanish)", nonzero.join(","))
    };
    let min_total = rows.iter().map(|r| r.direct_total).fold(f64::INFINITY, f64::min);
    Ok(Outcome::new(
        consistent,
        format!(
            "boundary terms {}; direct total = energy - boundary for all rows: {consistent}; min total {min_total:.4}; {flag}",
            terms.join(" ")
        ),
    ))
}
