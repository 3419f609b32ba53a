//! The subcommands. Each resolves its parameters (flags over config file
//! over defaults), validates them, computes, and writes its artifacts.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use curvlab_core::flows::{
    cfl_limit, conformal_cfl_limit, conformal_ricci_flow_2d_step, curvature_from_grid, identity_rhs, perturbed_metric,
    rde_step, ricci_heat_step, weighted_total, FlowState, MetricTensorField, PeriodicGrid, Perturbation, ScalarField,
};
use curvlab_core::geomcore::{total_scalar_curvature, ConformalMode};
use curvlab_core::norms::{classify_reports, metric_difference_norms, NormReport};
use curvlab_core::quad::{integrate, QuadSettings};
use curvlab_core::radial::{
    boundary_audit, family_total_lower_bound, first_moment, gaussian_moment, geometric_sweep, ground_moment,
    ground_moment_lower_bound, integral_family_limit, oscillatory_ijkl, printed, twodim_total,
    twodim_total_from_moments, ExampleFamily, FamilyKind, FamilyParams,
};
use curvlab_core::Error;

use crate::cli::{ExampleArgs, FamilyArgs, FlowArgs, IntegralsArgs, QuadArgs, SweepArgs, VerifyArgs};
use crate::config::{parse_list, ConfigFile};
use crate::criteria;
use crate::csvio::{Cell, Table};
use crate::error::CliError;
use crate::report::*;
use crate::snapshot::Snapshot;
use crate::svg::Plot;

/// Largest 3-D grid accepted without `--allow-large-grid`.
pub const MAX_DEFAULT_RES_3D: usize = 48;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(format!("writing {}", p.display()), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("writing stdout", e))
        }
    }
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialise");
    text.push('\n');
    write_output(path, text.as_bytes())
}

fn quad_settings(q: &QuadArgs, cfg: &ConfigFile) -> Result<QuadSettings, CliError> {
    let d = QuadSettings::default();
    let s = QuadSettings {
        abs_tol: cfg.pick(q.abs_tol, "abs-tol")?.unwrap_or(d.abs_tol),
        rel_tol: cfg.pick(q.rel_tol, "rel-tol")?.unwrap_or(d.rel_tol),
        max_evals: cfg.pick(q.max_evals, "max-evals")?.unwrap_or(d.max_evals),
        ..d
    };
    if !(s.abs_tol >= 0.0 && s.rel_tol >= 0.0 && s.abs_tol + s.rel_tol > 0.0) {
        return Err(invalid("quadrature tolerances must be non-negative and not both zero"));
    }
    if s.max_evals < 15 {
        return Err(invalid("--max-evals must allow at least one panel (15 evaluations)"));
    }
    Ok(s)
}

fn parse_family(name: &str) -> Result<FamilyKind, CliError> {
    FamilyKind::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = FamilyKind::ALL.iter().map(|k| k.name()).collect();
        invalid(format!("unknown family {name:?}; expected one of {}", names.join(", ")))
    })
}

/// Family kind and parameters; `i` is filled in by the caller.
fn family_params(a: &FamilyArgs, cfg: &ConfigFile) -> Result<(FamilyKind, FamilyParams), CliError> {
    let name: String = cfg.pick(a.family.clone(), "family")?.ok_or_else(|| invalid("--family is required"))?;
    let kind = parse_family(&name)?;
    let d = FamilyParams::default();
    let n = cfg.pick(a.n, "n")?.unwrap_or(if kind == FamilyKind::TwoDim { 2 } else { 3 });
    let params = FamilyParams {
        n,
        i: d.i,
        r0: cfg.pick(a.r0, "r0")?.unwrap_or(d.r0),
        alpha: cfg.pick(a.alpha, "alpha")?.unwrap_or(d.alpha),
        eps: cfg.pick(a.eps, "eps")?,
        side: cfg.pick(a.side, "side")?.unwrap_or(d.side),
    };
    if !(params.r0 > 0.0 && params.r0.is_finite()) {
        return Err(invalid("--r0 must be positive"));
    }
    Ok((kind, params))
}

fn family_json(f: &ExampleFamily) -> FamilyJson {
    let p = f.params();
    let mode = match f.mode() {
        ConformalMode::PowerLaw => "u^(4/(n-2)) g0",
        ConformalMode::Exp2Phi => "e^(2 phi) g0",
        ConformalMode::ExpU => "e^u g0",
    };
    FamilyJson {
        name: f.kind().name(),
        n: p.n,
        i: p.i,
        r0: f.r0(),
        eps: f.cutoff().map(|c| c.eps),
        alpha: p.alpha,
        side: p.side,
        mode: mode.to_string(),
    }
}

/// The bound if the family has one.
fn optional_bound(f: &ExampleFamily) -> Result<Option<f64>, CliError> {
    match family_total_lower_bound(f) {
        Ok(b) => Ok(Some(b)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// example
// ---------------------------------------------------------------------------

pub fn example(a: &ExampleArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let (kind, mut params) = family_params(&a.family, cfg)?;
    params.i = cfg.pick(a.i, "i")?.unwrap_or(FamilyParams::default().i);
    let samples = cfg.pick(a.samples, "samples")?.unwrap_or(201);
    let out: Option<PathBuf> = cfg.pick(a.out.clone(), "out")?;
    let svg: Option<PathBuf> = cfg.pick(a.svg.clone(), "svg")?;
    let quad = quad_settings(&a.quad, cfg)?;
    cfg.finish("example")?;
    if samples < 2 {
        return Err(invalid("--samples must be at least 2"));
    }

    let fam = ExampleFamily::new(kind, params)?;
    let spec = fam.spec()?;
    let total = total_scalar_curvature(&spec, &quad)?;
    let lower_bound = optional_bound(&fam)?;
    let mut notes = Vec::new();
    let (closed, from_moments) = match kind {
        FamilyKind::TwoDim => {
            let c = twodim_total(params.i);
            let m = twodim_total_from_moments(params.i)?;
            if (total.value - c).abs() > 1e-6 * c {
                notes.push(format!(
                    "quadrature of -Δu gives {:.6e}, moment assembly gives {:.6e}, the closed-form expression gives {c:.9}; \
                     u decays so ∫ Δu dA vanishes",
                    total.value, m
                ));
            }
            (Some(c), Some(m))
        }
        FamilyKind::Integral => {
            notes.push(format!("large-i limit of the total: {:.9}", integral_family_limit(params.n)));
            (None, None)
        }
        _ => (None, None),
    };
    if let Some(b) = lower_bound {
        if total.value < b {
            notes.push(format!("total {:.6} is below the large-i bound {b:.6} at this i", total.value));
        }
    }
    let extent = fam.extent();
    let radii: Vec<f64> = (0..samples).map(|k| extent * k as f64 / (samples - 1) as f64).collect();
    let pts = spec.sample_scalar_curvature(&radii)?;

    let report = ExampleReport {
        schema_version: SCHEMA_VERSION,
        command: "example",
        family: family_json(&fam),
        total: total.value,
        error_estimate: total.abs_error,
        evaluations: total.evaluations,
        lower_bound,
        closed_form_total: closed,
        closed_form_from_moments: from_moments,
        notes,
        samples: pts.iter().map(|&(r, s)| CurvatureSample { r, scalar_curvature: s }).collect(),
    };
    if let Some(path) = svg {
        let title = format!("R(r) for {} (n = {}, i = {})", kind.name(), params.n, params.i);
        let plot = Plot::new(&title, "r", "R").series(&format!("i = {}", params.i), pts);
        write_output(Some(&path), plot.render().as_bytes())?;
    }
    write_json(out.as_deref(), &report)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Header of the sweep CSV for the given exponents.
pub fn sweep_header(ps: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = ["i", "total", "total_error", "c0", "c1", "c2"].iter().map(|s| s.to_string()).collect();
    h.extend(ps.iter().map(|p| format!("w1p@{p}")));
    h.push("bound".into());
    h.push("verdict".into());
    h
}

fn sweep_indices(a: &SweepArgs, cfg: &ConfigFile) -> Result<Vec<f64>, CliError> {
    let list: Option<String> = cfg.pick(a.i_list.clone(), "i-list")?;
    let start = cfg.pick(a.i_start, "i-start")?;
    let ratio = cfg.pick(a.i_ratio, "i-ratio")?;
    let max = cfg.pick(a.i_max, "i-max")?;
    let idx = match (list, start) {
        (Some(_), Some(_)) => return Err(invalid("give either --i-list or --i-start, not both")),
        (Some(l), None) => parse_list::<f64>(&l, "--i-list")?,
        (None, Some(s)) => {
            let r = ratio.ok_or_else(|| invalid("--i-start needs --i-ratio"))?;
            let m = max.ok_or_else(|| invalid("--i-start needs --i-max"))?;
            geometric_sweep(s, r, m)?
        }
        (None, None) => Vec::new(),
    };
    if idx.len() < 2 {
        return Err(invalid(format!("a sweep needs at least 2 indices, got {}", idx.len())));
    }
    if idx.iter().any(|&i| !(i > 0.0 && i.is_finite())) {
        return Err(invalid("sweep indices must be positive"));
    }
    Ok(idx)
}

pub fn sweep(a: &SweepArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let (kind, params) = family_params(&a.family, cfg)?;
    let indices = sweep_indices(a, cfg)?;
    let ps: Vec<f64> = match cfg.pick(a.p.clone(), "p")? {
        Some(s) => parse_list(&s, "--p")?,
        None => vec![4.0],
    };
    let samples = cfg.pick(a.samples, "samples")?.unwrap_or(10_000);
    let csv: Option<PathBuf> = cfg.pick(a.csv.clone(), "csv")?;
    let json: Option<PathBuf> = cfg.pick(a.json.clone(), "json")?;
    let svg: Option<PathBuf> = cfg.pick(a.svg.clone(), "svg")?;
    let quad = quad_settings(&a.quad, cfg)?;
    cfg.finish("sweep")?;

    let template = ExampleFamily::new(kind, FamilyParams { i: indices[0], ..params })?;
    let mut table = Table::new(sweep_header(&ps));
    let mut rows: Vec<(f64, NormReport)> = Vec::new();
    let mut totals = Vec::new();
    let mut bound = None;
    for &i in &indices {
        let fam = template.with_index(i)?;
        let spec = fam.spec()?;
        let total = total_scalar_curvature(&spec, &quad).map_err(|e| CliError::from(e).context(format!("i = {i}")))?;
        let norms = metric_difference_norms(&spec, &ps, samples)?;
        bound = optional_bound(&fam)?;
        let verdict = match bound {
            Some(b) if total.value >= b => "above-bound",
            Some(_) => "below-bound",
            None => "no-bound",
        };
        let mut row = vec![Cell::Num(i), total.value.into(), total.abs_error.into(), norms.c0.into(), norms.c1.into(), norms.c2.into()];
        row.extend(ps.iter().map(|&p| Cell::opt(norms.w1p_at(p))));
        row.push(Cell::opt(bound));
        row.push(verdict.into());
        table.push(row);
        totals.push((i, total.value));
        rows.push((i, norms));
    }

    let threshold_i0 = bound.and_then(|b| {
        let mut sorted = totals.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let fail = sorted.iter().rposition(|&(_, t)| t < b);
        match fail {
            None => Some(sorted[0].0),
            Some(k) if k + 1 < sorted.len() => Some(sorted[k + 1].0),
            Some(_) => None,
        }
    });
    let trends = if rows.len() >= 3 {
        let rep = classify_reports(rows.clone())?;
        Some(TrendsJson {
            c0: (&rep.c0).into(),
            c1: (&rep.c1).into(),
            c2: (&rep.c2).into(),
            w1p: rep.w1p.iter().map(|(p, t)| (*p, t.into())).collect(),
        })
    } else {
        None
    };
    match &trends {
        Some(t) => eprintln!(
            "trends: c0 {} (rate {:.3}), c1 {} (rate {:.3}), c2 {} (rate {:.3})",
            t.c0.verdict, t.c0.rate, t.c1.verdict, t.c1.rate, t.c2.verdict, t.c2.rate
        ),
        None => eprintln!("trends: need at least 3 indices to classify"),
    }

    if let Some(path) = svg {
        let col = |f: fn(&NormReport) -> f64| rows.iter().map(|(i, r)| (*i, f(r))).collect::<Vec<_>>();
        let mut plot = Plot::new(&format!("norms of g_i - g for {}", kind.name()), "i", "norm")
            .series("C0", col(|r| r.c0))
            .series("C1", col(|r| r.c1))
            .series("C2", col(|r| r.c2));
        plot.log_log = true;
        write_output(Some(&path), plot.render().as_bytes())?;
    }
    if let Some(path) = json {
        let summary = SweepSummary {
            schema_version: SCHEMA_VERSION,
            command: "sweep",
            family: family_json(&template),
            indices: indices.clone(),
            bound,
            threshold_i0,
            trends,
        };
        write_json(Some(&path), &summary)?;
    }
    write_output(csv.as_deref(), table.to_csv_string().as_bytes())
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// Ricci flow with the weight following `∂f = Δf`.
    Ricci,
    /// Ricci–DeTurck flow, weight carried unchanged.
    DeTurck,
    /// `∂u = e^{-u} Δu` for `g = e^u δ` in two dimensions.
    Conformal2d,
}

fn parse_mode(s: &str) -> Result<FlowMode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "ricci" => Ok(FlowMode::Ricci),
        "deturck" | "rde" => Ok(FlowMode::DeTurck),
        "conformal2d" | "conformal" => Ok(FlowMode::Conformal2d),
        _ => Err(invalid(format!("unknown flow kind {s:?}; expected ricci, deturck or conformal2d"))),
    }
}

pub fn parse_perturbation(s: &str) -> Result<Perturbation, CliError> {
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "conformal" => Ok(Perturbation::Conformal),
        "anisotropic" => Ok(Perturbation::Anisotropic),
        "high" => Ok(Perturbation::HighFrequency(4)),
        _ => match lower.strip_prefix("high:").map(str::parse::<u32>) {
            Some(Ok(k)) if k > 0 => Ok(Perturbation::HighFrequency(k)),
            _ => Err(invalid(format!("unknown perturbation {s:?}; expected conformal, anisotropic or high:K"))),
        },
    }
}

/// Time-series columns of `curvlab flow`.
pub const FLOW_COLUMNS: [&str; 11] = [
    "step",
    "t",
    "dt",
    "total",
    "weighted_total",
    "sup_metric_deviation",
    "sup_ricci",
    "cauchy_schwarz_min",
    "identity_lhs",
    "identity_rhs",
    "identity_residual",
];

fn conformal_metric(u: &ScalarField) -> MetricTensorField {
    let mut g = MetricTensorField::zeros(u.grid);
    for (p, &v) in u.data.iter().enumerate() {
        let e = v.exp();
        g.set(p, &[[e, 0.0, 0.0], [0.0, e, 0.0], [0.0, 0.0, e]]);
    }
    g
}

struct Sample {
    t: f64,
    total: f64,
    weighted: f64,
    rhs: Option<f64>,
}

fn observe(s: &FlowState, with_identity: bool) -> Result<(Sample, [f64; 3]), CliError> {
    let grid = s.grid();
    let n = grid.n();
    let curv = curvature_from_grid(&s.g)?;
    let total: f64 = (0..grid.len()).map(|p| curv.scalar.data[p] * curv.sqrt_det[p]).sum::<f64>() * grid.cell_volume();
    let weighted = if s.f.is_some() { weighted_total(s)? } else { total };
    let mut dev: f64 = 0.0;
    for p in 0..grid.len() {
        let m = s.g.at(p);
        for a in 0..n {
            for b in 0..n {
                dev = dev.max((m[a][b] - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    let sup_ric = curv.ricci_sq.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt();
    let cs = (0..grid.len())
        .map(|p| n as f64 * curv.ricci_sq[p] - curv.scalar.data[p] * curv.scalar.data[p])
        .fold(f64::INFINITY, f64::min);
    let rhs = if with_identity { Some(identity_rhs(s)?) } else { None };
    Ok((Sample { t: s.t, total, weighted, rhs }, [dev, sup_ric, cs]))
}

pub fn flow(a: &FlowArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let mode = parse_mode(&cfg.pick(a.kind.clone(), "kind")?.unwrap_or_else(|| "ricci".into()))?;
    let n = cfg.pick(a.n, "n")?.unwrap_or(2);
    let res = cfg.pick(a.res, "res")?.unwrap_or(32);
    let side = cfg.pick(a.side, "side")?.unwrap_or(1.0);
    let pert = parse_perturbation(&cfg.pick(a.perturbation.clone(), "perturbation")?.unwrap_or_else(|| "conformal".into()))?;
    let amplitude = cfg.pick(a.amplitude, "amplitude")?.unwrap_or(0.05);
    let wamp = cfg.pick(a.weight_amplitude, "weight-amplitude")?.unwrap_or(0.1);
    let t_end = cfg.pick(a.t_end, "t-end")?.unwrap_or(0.01);
    let fixed_dt = cfg.pick(a.dt, "dt")?;
    let every = cfg.pick(a.every, "every")?.unwrap_or(1);
    let allow_large = a.allow_large_grid || cfg.get::<bool>("allow-large-grid")?.unwrap_or(false);
    let csv: Option<PathBuf> = cfg.pick(a.csv.clone(), "csv")?;
    let snapshot: Option<PathBuf> = cfg.pick(a.snapshot.clone(), "snapshot")?;
    cfg.finish("flow")?;

    if n == 3 && res > MAX_DEFAULT_RES_3D && !allow_large {
        return Err(invalid(format!(
            "3-D grids are capped at res {MAX_DEFAULT_RES_3D} (got {res}); pass --allow-large-grid to override"
        )));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid("--t-end must be a non-negative time"));
    }
    if every == 0 {
        return Err(invalid("--every must be at least 1"));
    }
    if !(amplitude.is_finite() && wamp.is_finite()) {
        return Err(invalid("amplitudes must be finite"));
    }
    if let Some(dt) = fixed_dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("--dt must be positive"));
        }
    }
    let grid = PeriodicGrid::new(n, res, side)?;
    let w = 2.0 * PI / side;
    let weight = ScalarField::from_fn(grid, |x| wamp * (w * x[1]).cos());

    // the scalar flow keeps u; the tensor flows keep the full state
    let mut u = match (mode, pert) {
        (FlowMode::Conformal2d, _) if n != 2 => {
            return Err(invalid("the conformal2d flow needs n = 2"));
        }
        (FlowMode::Conformal2d, Perturbation::Conformal) => {
            Some(ScalarField::from_fn(grid, |x| amplitude * ((w * x[1]).cos() + (w * x[0]).sin())))
        }
        (FlowMode::Conformal2d, Perturbation::HighFrequency(k)) => {
            let wk = w * k as f64;
            Some(ScalarField::from_fn(grid, |x| amplitude * (wk * x[0]).sin() * (wk * x[1]).sin()))
        }
        (FlowMode::Conformal2d, Perturbation::Anisotropic) => {
            return Err(invalid("the conformal2d flow needs a conformal perturbation"));
        }
        _ => None,
    };
    let mut state = match &u {
        Some(u) => FlowState::new(conformal_metric(u)),
        None => FlowState::new(perturbed_metric(grid, amplitude, pert)).with_weight(weight.clone()),
    };
    state.g.check_positive_definite()?;
    let with_identity = mode == FlowMode::Ricci;

    let header: Vec<String> = FLOW_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut table = Table::new(header);
    let mut prev: Option<Sample> = None;
    let mut record = |step: usize, dt: f64, s: &FlowState, table: &mut Table| -> Result<(), CliError> {
        let (cur, [dev, ric, cs]) = observe(s, with_identity)?;
        let (lhs, rhs, resid) = match (&prev, cur.rhs) {
            (Some(p), Some(r1)) => {
                let lhs = (cur.weighted - p.weighted) / (cur.t - p.t);
                let rhs = 0.5 * (p.rhs.unwrap_or(r1) + r1);
                let diff = (lhs - rhs).abs();
                (Some(lhs), Some(rhs), Some(if diff == 0.0 { 0.0 } else { diff / rhs.abs() }))
            }
            _ => (None, None, None),
        };
        table.push(vec![
            Cell::Int(step as i64),
            cur.t.into(),
            Cell::opt((step > 0).then_some(dt)),
            cur.total.into(),
            cur.weighted.into(),
            dev.into(),
            ric.into(),
            cs.into(),
            Cell::opt(lhs),
            Cell::opt(rhs),
            Cell::opt(resid),
        ]);
        prev = Some(cur);
        Ok(())
    };

    record(0, 0.0, &state, &mut table)?;
    let mut step = 0usize;
    let mut max_abs_total: f64 = table.rows[0][3].as_f64().unwrap_or(0.0).abs();
    while t_end - state.t > 1e-14 * t_end.max(1.0) {
        let t = state.t;
        let at = |e: Error| CliError::from(e).context(format!("flow failed at t = {t:e}"));
        let limit = match &u {
            Some(u) => conformal_cfl_limit(u),
            None => cfl_limit(&state.g).map_err(at)?,
        };
        let dt = fixed_dt.unwrap_or(limit).min(t_end - t);
        match (&mut u, mode) {
            (Some(uu), _) => {
                *uu = conformal_ricci_flow_2d_step(uu, dt).map_err(at)?;
                state = FlowState { t: t + dt, ..FlowState::new(conformal_metric(uu)) };
            }
            (None, FlowMode::Ricci) => state = ricci_heat_step(&state, dt).map_err(at)?,
            (None, _) => state = rde_step(&state, dt).map_err(at)?,
        }
        step += 1;
        let done = t_end - state.t <= 1e-14 * t_end.max(1.0);
        if step % every == 0 || done {
            record(step, dt, &state, &mut table)?;
            max_abs_total = max_abs_total.max(table.rows.last().unwrap()[3].as_f64().unwrap_or(0.0).abs());
        }
    }
    if n == 2 {
        eprintln!("steps: {step}, t = {:e}, max |∫R dvol| = {max_abs_total:.3e} (Gauss–Bonnet value 0)", state.t);
    } else {
        eprintln!("steps: {step}, t = {:e}, metric positive definite throughout", state.t);
    }
    if let Some(path) = snapshot {
        let mut buf = Vec::new();
        Snapshot::from_metric(&state.g, state.t).write_to(&mut buf)?;
        write_output(Some(&path), &buf)?;
    }
    write_output(csv.as_deref(), table.to_csv_string().as_bytes())
}

// ---------------------------------------------------------------------------
// integrals
// ---------------------------------------------------------------------------

pub fn integrals(a: &IntegralsArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let n = cfg.pick(a.n, "n")?.unwrap_or(3);
    let i = cfg.pick(a.i, "i")?.unwrap_or(10.0);
    let r0 = cfg.pick(a.r0, "r0")?.unwrap_or(1.0);
    let ca = cfg.pick(a.a, "a")?.unwrap_or(-1.0);
    let cb = cfg.pick(a.b, "b")?.unwrap_or(-0.5);
    let audit: Vec<f64> = match cfg.pick(a.audit.clone(), "audit")? {
        Some(s) => parse_list(&s, "--audit")?,
        None => (2..=9).map(f64::from).collect(),
    };
    let out: Option<PathBuf> = cfg.pick(a.out.clone(), "out")?;
    cfg.finish("integrals")?;
    if n < 1 {
        return Err(invalid("--n must be at least 1"));
    }
    if !(i > 0.0 && i.is_finite() && r0 > 0.0 && r0.is_finite()) {
        return Err(invalid("--i and --r0 must be positive"));
    }

    let quad = QuadSettings { abs_tol: 1e-14, ..QuadSettings::default() };
    let direct = integrate(|r| r.powi(n as i32 + 1) * (-2.0 * i * r * r).exp(), 0.0, r0, &quad)?;
    let moments = MomentsJson {
        first_moment: first_moment(i, r0),
        first_moment_printed: printed::first_moment(i, r0),
        ground_moment: ground_moment(i, r0)?,
        ground_moment_lower_bound: ground_moment_lower_bound(i, r0),
        ground_moment_bound_printed: printed::ground_moment_bound(i, r0),
        gaussian_moment: gaussian_moment(n, i, r0)?,
        gaussian_moment_quadrature: direct.value,
    };
    let m = oscillatory_ijkl(ca, cb)?;
    let ijkl = IjklJson { a: ca, b: cb, i: m.i, j: m.j, k: m.k, l: m.l, j_printed: printed::j_moment(ca, cb) };
    let power = n >= 3;
    let bound_for = |kind| -> Result<Option<f64>, CliError> {
        if !power {
            return Ok(None);
        }
        let f = ExampleFamily::new(kind, FamilyParams { n, i, r0, ..FamilyParams::default() })?;
        optional_bound(&f)
    };
    let bounds = BoundsJson {
        c10: bound_for(FamilyKind::C10)?,
        c21: bound_for(FamilyKind::C21)?,
        integral_limit: power.then(|| integral_family_limit(n)),
        integral_lower_bound: bound_for(FamilyKind::Integral)?,
        integral_bound_printed: power.then(|| printed::integral_bound(n)),
        twodim_closed_form: twodim_total(i),
        twodim_from_moments: twodim_total_from_moments(i)?,
    };
    let rows = if power && !audit.is_empty() { boundary_audit(n, &audit, &QuadSettings::default())? } else { Vec::new() };

    let mut notes = Vec::new();
    if moments.ground_moment_bound_printed > moments.ground_moment {
        notes.push("the printed ground-moment bound exceeds the integral it bounds".to_string());
    }
    if (ijkl.j - ijkl.j_printed).abs() > 1e-12 * ijkl.j.abs().max(1.0) {
        notes.push(format!("printed J = {} differs from the computed J = {}", ijkl.j_printed, ijkl.j));
    }
    if (bounds.twodim_closed_form - bounds.twodim_from_moments).abs() > 1e-6 * bounds.twodim_closed_form {
        notes.push("the planar closed form and its moment assembly disagree; the latter is -∫Δu dA = 0".to_string());
    }
    let nonzero: Vec<String> = rows.iter().filter(|r| !r.boundary_vanishes).map(|r| r.i.to_string()).collect();
    if !nonzero.is_empty() {
        notes.push(format!("boundary term is nonzero for i = {}", nonzero.join(", ")));
    }
    if rows.iter().any(|r| !r.consistent) {
        notes.push("boundary audit: direct total and energy form disagree for some i".to_string());
    }

    let report = IntegralsReport {
        schema_version: SCHEMA_VERSION,
        command: "integrals",
        n,
        i,
        r0,
        moments,
        ijkl,
        bounds,
        boundary_audit: rows.iter().map(AuditRowJson::from).collect(),
        notes,
    };
    write_json(out.as_deref(), &report)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn verify(a: &VerifyArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let filter: Option<String> = cfg.pick(a.filter.clone(), "filter")?;
    let mut tol = Vec::new();
    if let Some(s) = cfg.raw("tol") {
        tol.extend(s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()));
    }
    tol.extend(a.tol.iter().cloned());
    cfg.finish("verify")?;

    let overrides = criteria::parse_overrides(&tol).map_err(CliError::Validation)?;
    let selected = criteria::select(filter.as_deref());
    if selected.is_empty() {
        return Err(invalid(format!("no criterion matches filter {:?}", filter.unwrap_or_default())));
    }
    criteria::check_overrides(&overrides).map_err(CliError::Validation)?;
    let mut out = std::io::stdout().lock();
    if a.list {
        for c in &selected {
            let _ = writeln!(out, "{:<24} [{}] {}", c.id, c.tags.join(","), c.summary);
            for (k, v) in c.tolerances {
                let _ = writeln!(out, "    {}.{k} = {v:e}", c.id);
            }
        }
        return Ok(());
    }
    let mut failed = 0;
    for c in &selected {
        let r = criteria::run(c, &overrides);
        let _ = writeln!(out, "{}", r.line());
        let _ = out.flush();
        if !r.passed {
            failed += 1;
        }
    }
    let _ = writeln!(out, "{} of {} criteria passed", selected.len() - failed, selected.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::CriteriaFailed { failed, total: selected.len() })
    }
}
