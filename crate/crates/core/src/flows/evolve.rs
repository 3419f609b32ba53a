//! Right-hand sides and RK4 steps for the grid flows.

use alloc::vec::Vec;

use super::curvature::{pointwise, MetricDerivatives};
use super::stencil::{d1, d2};
use super::{inverse, is_positive_definite, map_points, max_eigenvalue, FlowState, MetricTensorField, ScalarField};
use crate::error::{Error, Result};
use crate::math::{exp, sqrt};

/// Stability factor in `dt <= CFL * h² / max(1, sup λ_max(g^{-1}))`.
pub const CFL: f64 = 0.1;

/// Which system a multi-step run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    /// `∂g = -2 Ric`
    Ricci,
    /// `∂g = -2 Ric - L_X g`
    RicciDeTurck,
    /// Ricci flow together with `∂f = Δ_g f`
    RicciHeat,
}

/// Largest stable step for the metric `g`.
pub fn cfl_limit(g: &MetricTensorField) -> Result<f64> {
    let n = g.grid.n();
    let mut worst: f64 = 1.0;
    for p in 0..g.grid.len() {
        let m = g.at(p);
        if !is_positive_definite(n, &m) {
            return Err(Error::NotPositiveDefinite { index: p });
        }
        let (gi, _) = inverse(n, &m).ok_or(Error::NotPositiveDefinite { index: p })?;
        worst = worst.max(max_eigenvalue(n, &gi));
    }
    let h = g.grid.h();
    Ok(CFL * h * h / worst)
}

/// Largest stable step for `∂u = e^{-u} Δu`.
pub fn conformal_cfl_limit(u: &ScalarField) -> f64 {
    let h = u.grid.h();
    let worst = u.data.iter().map(|&v| exp(-v)).fold(1.0, f64::max);
    CFL * h * h / worst
}

pub(crate) fn check_dt(dt: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain("time step must be positive"));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    Ok(())
}

/// Classical RK4 on a flat state vector.
pub(crate) fn rk4<F>(y: &[f64], dt: f64, mut rhs: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(y, k)| y + a * k).collect() };
    let k1 = rhs(y)?;
    let k2 = rhs(&axpy(0.5 * dt, &k1))?;
    let k3 = rhs(&axpy(0.5 * dt, &k2))?;
    let k4 = rhs(&axpy(dt, &k3))?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// `-2 Ric(g)` in the field layout of `g`.
pub fn ricci_rhs(g: &MetricTensorField) -> Result<Vec<f64>> {
    let der = MetricDerivatives::new(g);
    let pts = pointwise(g, &der)?;
    let mut out = MetricTensorField::zeros(g.grid);
    for (p, pc) in pts.iter().enumerate() {
        let mut m = pc.ric;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= -2.0;
            }
        }
        out.set(p, &m);
    }
    Ok(out.data)
}

/// `-2 Ric(g) - L_X g` with `X` the Bianchi field against a flat background.
///
/// `(L_X g)_ab = X^c ∂_c g_ab + g_cb ∂_a X^c + g_ac ∂_b X^c`.
pub fn rde_rhs(g: &MetricTensorField, background: &MetricTensorField) -> Result<Vec<f64>> {
    Ok(rde_rhs_and_field(g, background)?.0)
}

/// The RDE right-hand side together with the Bianchi field it used.
pub(crate) fn rde_rhs_and_field(
    g: &MetricTensorField,
    background: &MetricTensorField,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if !background.is_constant(1e-12) {
        return Err(Error::Unsupported("the background metric must be constant on the grid"));
    }
    let grid = g.grid;
    let n = grid.n();
    let der = MetricDerivatives::new(g);
    let pts = pointwise(g, &der)?;
    let xs: Vec<Vec<f64>> = (0..n).map(|c| pts.iter().map(|pc| pc.x[c]).collect()).collect();
    // dx[c][a] = ∂_a X^c
    let dx: Vec<Vec<Vec<f64>>> = xs.iter().map(|x| (0..n).map(|a| d1(&grid, x, a)).collect()).collect();
    let rows = map_points(grid.len(), |p| {
        let gm = g.at(p);
        let dg = der.first(p);
        let pc = &pts[p];
        let mut m = [[0.0; 3]; 3];
        for a in 0..n {
            for b in a..n {
                let mut lie = 0.0;
                for c in 0..n {
                    lie += pc.x[c] * dg[c][a][b] + gm[c][b] * dx[c][a][p] + gm[a][c] * dx[c][b][p];
                }
                m[a][b] = -2.0 * pc.ric[a][b] - lie;
                m[b][a] = m[a][b];
            }
        }
        m
    });
    let mut out = MetricTensorField::zeros(grid);
    for (p, m) in rows.iter().enumerate() {
        out.set(p, m);
    }
    Ok((out.data, xs))
}

/// `Δ_g f = |g|^{-1/2} ∂_a (|g|^{1/2} g^{ab} ∂_b f)`.
pub fn laplace_beltrami(g: &MetricTensorField, f: &[f64]) -> Result<Vec<f64>> {
    let grid = g.grid;
    let n = grid.n();
    let df: Vec<Vec<f64>> = (0..n).map(|k| d1(&grid, f, k)).collect();
    let geo = map_points(grid.len(), |p| {
        let m = g.at(p);
        if !is_positive_definite(n, &m) {
            return None;
        }
        inverse(n, &m).map(|(gi, det)| (gi, sqrt(det)))
    });
    let mut flux = alloc::vec![alloc::vec![0.0; grid.len()]; n];
    let mut sd = alloc::vec![0.0; grid.len()];
    for (p, v) in geo.into_iter().enumerate() {
        let (gi, s) = v.ok_or(Error::NotPositiveDefinite { index: p })?;
        sd[p] = s;
        for a in 0..n {
            flux[a][p] = s * (0..n).map(|b| gi[a][b] * df[b][p]).sum::<f64>();
        }
    }
    let mut div = alloc::vec![0.0; grid.len()];
    for (a, fa) in flux.iter().enumerate() {
        for (d, v) in div.iter_mut().zip(d1(&grid, fa, a)) {
            *d += v;
        }
    }
    Ok(div.iter().zip(&sd).map(|(d, s)| d / s).collect())
}

pub(crate) fn with_data(g: &MetricTensorField, data: Vec<f64>) -> MetricTensorField {
    MetricTensorField { grid: g.grid, data }
}

fn finish(s: &FlowState, g: MetricTensorField, f: Option<ScalarField>, dt: f64) -> Result<FlowState> {
    g.check_positive_definite()?;
    if let Some(f) = &f {
        if !f.is_finite() {
            return Err(Error::Domain("weight function became non-finite"));
        }
    }
    Ok(FlowState { t: s.t + dt, g, f, background: s.background.clone(), lambda: s.lambda })
}

/// One RK4 step of `∂g = -2 Ric(g)`; the weight, if any, is carried unchanged.
pub fn ricci_flow_step(s: &FlowState, dt: f64) -> Result<FlowState> {
    check_dt(dt, cfl_limit(&s.g)?)?;
    let data = rk4(&s.g.data, dt, |y| ricci_rhs(&with_data(&s.g, y.to_vec())))?;
    finish(s, with_data(&s.g, data), s.f.clone(), dt)
}

/// One RK4 step of the Ricci–DeTurck flow against `s.background`.
pub fn rde_step(s: &FlowState, dt: f64) -> Result<FlowState> {
    check_dt(dt, cfl_limit(&s.g)?)?;
    let data = rk4(&s.g.data, dt, |y| rde_rhs(&with_data(&s.g, y.to_vec()), &s.background))?;
    finish(s, with_data(&s.g, data), s.f.clone(), dt)
}

/// One RK4 step of Ricci flow coupled with `∂f = Δ_{g_t} f`.
pub fn ricci_heat_step(s: &FlowState, dt: f64) -> Result<FlowState> {
    let f = s.f.as_ref().ok_or(Error::Config("coupled heat flow needs a weight function"))?;
    check_dt(dt, cfl_limit(&s.g)?)?;
    let m = s.g.data.len();
    let mut y = s.g.data.clone();
    y.extend_from_slice(&f.data);
    let out = rk4(&y, dt, |y| {
        let g = with_data(&s.g, y[..m].to_vec());
        let mut r = ricci_rhs(&g)?;
        r.extend(laplace_beltrami(&g, &y[m..])?);
        Ok(r)
    })?;
    let g = with_data(&s.g, out[..m].to_vec());
    let f = ScalarField { grid: f.grid, data: out[m..].to_vec() };
    finish(s, g, Some(f), dt)
}

/// One RK4 step of `∂f = Δ_g f` with the metric frozen at `s.g`.
pub fn heat_flow_step(f: &ScalarField, s: &FlowState, dt: f64) -> Result<ScalarField> {
    if f.grid != s.g.grid {
        return Err(Error::Config("weight and metric live on different grids"));
    }
    check_dt(dt, cfl_limit(&s.g)?)?;
    let data = rk4(&f.data, dt, |y| laplace_beltrami(&s.g, y))?;
    Ok(ScalarField { grid: f.grid, data })
}

/// One RK4 step of `∂u = e^{-u} Δu`, Ricci flow of `e^u δ` on the flat 2-torus.
pub fn conformal_ricci_flow_2d_step(u: &ScalarField, dt: f64) -> Result<ScalarField> {
    let grid = u.grid;
    if grid.n() != 2 {
        return Err(Error::UnsupportedDimension { n: grid.n(), reason: "the scalar conformal flow is two-dimensional" });
    }
    check_dt(dt, conformal_cfl_limit(u))?;
    let data = rk4(&u.data, dt, |y| {
        let (a, b) = (d2(&grid, y, 0), d2(&grid, y, 1));
        Ok(y.iter().zip(a.iter().zip(&b)).map(|(v, (a, b))| exp(-v) * (a + b)).collect())
    })?;
    let out = ScalarField { grid, data };
    if !out.is_finite() {
        return Err(Error::Domain("conformal exponent became non-finite"));
    }
    Ok(out)
}

/// Advance to `t_end`, with steps of `fixed_dt` (checked against the
/// stability limit) or the stability limit itself.
pub fn evolve_to(s: &FlowState, t_end: f64, kind: FlowKind, fixed_dt: Option<f64>) -> Result<FlowState> {
    if !(t_end >= s.t) {
        return Err(Error::Domain("target time lies before the current time"));
    }
    let mut cur = s.clone();
    while t_end - cur.t > 1e-14 * t_end.abs().max(1.0) {
        let limit = cfl_limit(&cur.g)?;
        let dt = fixed_dt.unwrap_or(limit).min(t_end - cur.t);
        let next = match kind {
            FlowKind::Ricci => ricci_flow_step(&cur, dt),
            FlowKind::RicciDeTurck => rde_step(&cur, dt),
            FlowKind::RicciHeat => ricci_heat_step(&cur, dt),
        };
        cur = next?;
    }
    cur.t = t_end;
    Ok(cur)
}
