//! Weighted total scalar curvature and the identities checked along flows.

use super::curvature::{curvature_from_grid, Curvature};
use super::evolve::{cfl_limit, laplace_beltrami, ricci_heat_step};
use super::stencil::d1;
use super::{inverse, FlowState, MetricTensorField};
use crate::error::{Error, Result};
use crate::math::{exp, powf};

fn weight(s: &FlowState, p: usize) -> f64 {
    s.f.as_ref().map_or(1.0, |f| exp(-f.data[p]))
}

fn weighted_sum(s: &FlowState, curv: &Curvature) -> f64 {
    let acc: f64 = (0..s.grid().len()).map(|p| curv.scalar.data[p] * weight(s, p) * curv.sqrt_det[p]).sum();
    acc * s.grid().cell_volume()
}

/// `∫ R e^{-f} dvol_g` by grid quadrature (`f ≡ 0` when absent).
pub fn weighted_total(s: &FlowState) -> Result<f64> {
    Ok(weighted_sum(s, &curvature_from_grid(&s.g)?))
}

/// Time derivative of [`weighted_total`] predicted along Ricci flow coupled
/// with `∂f = Δf`:
/// `∫ (2|Ric|² - R²) e^{-f} dvol + ∫ R (|∇f|² - 2Δf) e^{-f} dvol`.
pub fn identity_rhs(s: &FlowState) -> Result<f64> {
    let f = s.f.as_ref().ok_or(Error::Config("the evolution identity needs a weight function"))?;
    let grid = s.grid();
    let n = grid.n();
    let curv = curvature_from_grid(&s.g)?;
    let lap = laplace_beltrami(&s.g, &f.data)?;
    let df: alloc::vec::Vec<alloc::vec::Vec<f64>> = (0..n).map(|k| d1(&grid, &f.data, k)).collect();
    let mut acc = 0.0;
    for p in 0..grid.len() {
        let (gi, _) = inverse(n, &s.g.at(p)).ok_or(Error::NotPositiveDefinite { index: p })?;
        let mut grad_sq = 0.0;
        for a in 0..n {
            for b in 0..n {
                grad_sq += gi[a][b] * df[a][p] * df[b][p];
            }
        }
        let r = curv.scalar.data[p];
        let density = 2.0 * curv.ricci_sq[p] - r * r + r * (grad_sq - 2.0 * lap[p]);
        acc += density * exp(-f.data[p]) * curv.sqrt_det[p];
    }
    Ok(acc * grid.cell_volume())
}

/// One evaluation of the evolution identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub t: f64,
    pub dt: f64,
    /// `(W(t + dt) - W(t)) / dt`
    pub lhs: f64,
    /// predicted derivative at `t + dt/2`
    pub rhs: f64,
    /// `|lhs - rhs| / |rhs|`, zero when both sides agree exactly
    pub residual: f64,
}

fn advance(s: &FlowState, t_end: f64) -> Result<FlowState> {
    let mut cur = s.clone();
    while t_end - cur.t > 1e-14 * t_end.abs().max(1.0) {
        let dt = cfl_limit(&cur.g)?.min(t_end - cur.t);
        cur = ricci_heat_step(&cur, dt)?;
    }
    cur.t = t_end;
    Ok(cur)
}

/// Compare a centred difference quotient of `W(t) = ∫ R e^{-f} dvol` over
/// `[t, t + dt]` against the predicted derivative at the midpoint. The
/// state is advanced by the coupled Ricci/heat flow in stable substeps.
pub fn evolution_identity_residual(s: &FlowState, dt: f64) -> Result<IdentityReport> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain("difference interval must be positive"));
    }
    if s.f.is_none() {
        return Err(Error::Config("the evolution identity needs a weight function"));
    }
    let w0 = weighted_total(s)?;
    let mid = advance(s, s.t + 0.5 * dt)?;
    let rhs = identity_rhs(&mid)?;
    let end = advance(&mid, s.t + dt)?;
    let lhs = (weighted_total(&end)? - w0) / dt;
    let diff = (lhs - rhs).abs();
    let residual = if diff == 0.0 { 0.0 } else { diff / rhs.abs() };
    Ok(IdentityReport { t: s.t, dt, lhs, rhs, residual })
}

/// `min (n |Ric|² - R²)` over the grid; non-negative up to round-off.
pub fn cauchy_schwarz_check(g: &MetricTensorField) -> Result<f64> {
    let n = g.grid.n() as f64;
    let curv = curvature_from_grid(g)?;
    Ok((0..g.grid.len())
        .map(|p| n * curv.ricci_sq[p] - curv.scalar.data[p] * curv.scalar.data[p])
        .fold(f64::INFINITY, f64::min))
}

/// `total0 (1 - 2λt)^{n/2 - 1}`, the total scalar curvature along a
/// shrinking or expanding soliton.
pub fn soliton_total_scaling(total0: f64, lambda: f64, t: f64, n: usize) -> Result<f64> {
    let base = 1.0 - 2.0 * lambda * t;
    if !(base > 0.0) {
        return Err(Error::Domain("soliton reaches extinction before time t"));
    }
    Ok(total0 * powf(base, 0.5 * n as f64 - 1.0))
}
