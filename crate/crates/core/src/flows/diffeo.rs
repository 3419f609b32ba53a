//! DeTurck diffeomorphisms by particle advection, and pullbacks.
//!
//! One particle starts at every grid node. Its displacement is kept
//! unwrapped so that the Jacobian is a finite difference of a periodic
//! field; positions are wrapped only when they are read.

use alloc::vec::Vec;

use super::curvature::{bianchi_vector, curvature_from_grid};
use super::evolve::{cfl_limit, check_dt, rde_rhs_and_field, rk4, with_data};
use super::stencil::{d1, interpolate};
use super::{determinant, map_points, FlowState, Mat3, MetricTensorField, PeriodicGrid, ScalarField};
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Sampled `Φ_t`: `Φ_t(x_p) = x_p + disp(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeoTrack {
    pub grid: PeriodicGrid,
    /// `disp[k][p]`, component `k` of the displacement of particle `p`.
    pub disp: Vec<Vec<f64>>,
}

impl DiffeoTrack {
    pub fn identity(grid: PeriodicGrid) -> Self {
        Self { grid, disp: alloc::vec![alloc::vec![0.0; grid.len()]; grid.n()] }
    }

    /// Unwrapped image of node `p`.
    pub fn image(&self, p: usize) -> [f64; 3] {
        let mut x = self.grid.coords(p);
        for (k, d) in self.disp.iter().enumerate() {
            x[k] += d[p];
        }
        x
    }

    /// Image of node `p` wrapped into `[0, side)^n`.
    pub fn position(&self, p: usize) -> [f64; 3] {
        let side = self.grid.side();
        let mut x = self.image(p);
        for v in x.iter_mut().take(self.grid.n()) {
            *v -= side * libm::floor(*v / side);
        }
        x
    }

    /// `J[c][a] = ∂Φ^c / ∂x^a` at every node.
    pub fn jacobians(&self) -> Vec<Mat3> {
        let n = self.grid.n();
        let dd: Vec<Vec<Vec<f64>>> =
            self.disp.iter().map(|d| (0..n).map(|a| d1(&self.grid, d, a)).collect()).collect();
        (0..self.grid.len())
            .map(|p| {
                let mut j = [[0.0; 3]; 3];
                for c in 0..n {
                    for a in 0..n {
                        j[c][a] = dd[c][a][p] + if c == a { 1.0 } else { 0.0 };
                    }
                }
                j
            })
            .collect()
    }

    pub fn min_jacobian_det(&self) -> f64 {
        let n = self.grid.n();
        self.jacobians().iter().map(|j| determinant(n, j)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_displacement(&self) -> f64 {
        (0..self.grid.len())
            .map(|p| sqrt(self.disp.iter().map(|d| d[p] * d[p]).sum()))
            .fold(0.0, f64::max)
    }

    fn flat(&self) -> Vec<f64> {
        self.disp.concat()
    }

    fn from_flat(grid: PeriodicGrid, y: &[f64]) -> Self {
        let len = grid.len();
        Self { grid, disp: (0..grid.n()).map(|k| y[k * len..(k + 1) * len].to_vec()).collect() }
    }
}

/// Velocity of every particle: `X` interpolated at its current image.
fn advect(grid: &PeriodicGrid, field: &[Vec<f64>], disp: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let len = grid.len();
    let vel = map_points(len, |p| {
        let mut x = grid.coords(p);
        for (k, xk) in x.iter_mut().enumerate().take(n) {
            *xk += disp[k * len + p];
        }
        let mut v = [0.0; 3];
        for (k, vk) in v.iter_mut().enumerate().take(n) {
            *vk = interpolate(grid, &field[k], x);
        }
        v
    });
    let mut out = alloc::vec![0.0; n * len];
    for (p, v) in vel.iter().enumerate() {
        for k in 0..n {
            out[k * len + p] = v[k];
        }
    }
    out
}

/// One RK4 step of `∂_t Φ = X ∘ Φ` with the Bianchi field of `s.g` held fixed.
pub fn deturck_diffeo_step(track: &DiffeoTrack, s: &FlowState, dt: f64) -> Result<DiffeoTrack> {
    if track.grid != s.g.grid {
        return Err(Error::Config("track and metric live on different grids"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain("time step must be positive"));
    }
    let field = bianchi_vector(&s.g, &s.background)?;
    let y = rk4(&track.flat(), dt, |y| Ok(advect(&track.grid, &field, y)))?;
    Ok(DiffeoTrack::from_flat(track.grid, &y))
}

/// One joint RK4 step of the Ricci–DeTurck flow and its diffeomorphism ODE.
pub fn rde_diffeo_step(s: &FlowState, track: &DiffeoTrack, dt: f64) -> Result<(FlowState, DiffeoTrack)> {
    if track.grid != s.g.grid {
        return Err(Error::Config("track and metric live on different grids"));
    }
    check_dt(dt, cfl_limit(&s.g)?)?;
    let m = s.g.data.len();
    let mut y = s.g.data.clone();
    y.extend(track.flat());
    let out = rk4(&y, dt, |y| {
        let g = with_data(&s.g, y[..m].to_vec());
        let (mut rhs, field) = rde_rhs_and_field(&g, &s.background)?;
        rhs.extend(advect(&s.g.grid, &field, &y[m..]));
        Ok(rhs)
    })?;
    let g = with_data(&s.g, out[..m].to_vec());
    g.check_positive_definite()?;
    let next = FlowState { t: s.t + dt, g, f: s.f.clone(), background: s.background.clone(), lambda: s.lambda };
    Ok((next, DiffeoTrack::from_flat(s.g.grid, &out[m..])))
}

/// `(Φ* g, f ∘ Φ)`: `(Φ* g)_ab(x) = J_ca J_db g_cd(Φ(x))`, values at `Φ(x)`
/// by periodic cubic interpolation.
pub fn pullback_state(s: &FlowState, track: &DiffeoTrack) -> Result<FlowState> {
    let grid = s.g.grid;
    let n = grid.n();
    let jac = track.jacobians();
    let comps: Vec<&[f64]> = (0..s.g.components()).map(|c| s.g.component(c)).collect();
    let mut g = MetricTensorField::zeros(grid);
    for p in 0..grid.len() {
        let j = &jac[p];
        if !(determinant(n, j) > 0.0) {
            return Err(Error::Geometry("DeTurck diffeomorphism lost orientation"));
        }
        let x = track.position(p);
        let mut at = [[0.0; 3]; 3];
        for (c, &(a, b)) in super::component_pairs(n).iter().enumerate() {
            let v = interpolate(&grid, comps[c], x);
            at[a][b] = v;
            at[b][a] = v;
        }
        let mut out = [[0.0; 3]; 3];
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    for d in 0..n {
                        acc += j[c][a] * j[d][b] * at[c][d];
                    }
                }
                out[a][b] = acc;
            }
        }
        g.set(p, &out);
    }
    let f = s.f.as_ref().map(|f| ScalarField {
        grid,
        data: (0..grid.len()).map(|p| interpolate(&grid, &f.data, track.position(p))).collect(),
    });
    Ok(FlowState { t: s.t, g, f, background: s.background.clone(), lambda: s.lambda })
}

/// Outcome of the pullback consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeTurckReport {
    pub t: f64,
    /// `‖∂_t Φ*g - (-2 Ric(Φ*g))‖_{L²} / ‖2 Ric(Φ*g)‖_{L²}`
    pub residual: f64,
    pub min_jacobian_det: f64,
    pub max_displacement: f64,
}

fn advance_joint(s: &FlowState, track: &DiffeoTrack, t_end: f64) -> Result<(FlowState, DiffeoTrack)> {
    let (mut s, mut tr) = (s.clone(), track.clone());
    while t_end - s.t > 1e-14 * t_end.abs().max(1.0) {
        let dt = cfl_limit(&s.g)?.min(t_end - s.t);
        let (a, b) = rde_diffeo_step(&s, &tr, dt)?;
        s = a;
        tr = b;
    }
    s.t = t_end;
    Ok((s, tr))
}

/// Evolve the RDE with its diffeomorphisms from `s0` (taken as `Φ = id`)
/// and test whether `Φ_t* g_t` solves Ricci flow at time `t`, using a
/// centred difference of width `2 delta` in time.
pub fn deturck_consistency(s0: &FlowState, t: f64, delta: f64) -> Result<DeTurckReport> {
    if !(delta > 0.0 && t - delta >= s0.t) {
        return Err(Error::Domain("need 0 < delta and t - delta after the start time"));
    }
    let grid = s0.g.grid;
    let n = grid.n();
    let id = DiffeoTrack::identity(grid);
    let (s1, tr1) = advance_joint(s0, &id, t - delta)?;
    let (s2, tr2) = advance_joint(&s1, &tr1, t)?;
    let (s3, tr3) = advance_joint(&s2, &tr2, t + delta)?;
    let before = pullback_state(&s1, &tr1)?.g;
    let here = pullback_state(&s2, &tr2)?.g;
    let after = pullback_state(&s3, &tr3)?.g;
    let ric = curvature_from_grid(&here)?.ricci;
    let mut num = 0.0;
    let mut den = 0.0;
    for (c, &(a, b)) in super::component_pairs(n).iter().enumerate() {
        let w = if a == b { 1.0 } else { 2.0 };
        let len = grid.len();
        for p in 0..len {
            let k = c * len + p;
            let dgdt = (after.data[k] - before.data[k]) / (2.0 * delta);
            let target = -2.0 * ric.data[k];
            num += w * (dgdt - target) * (dgdt - target);
            den += w * target * target;
        }
    }
    Ok(DeTurckReport {
        t,
        residual: sqrt(num / den),
        min_jacobian_det: tr2.min_jacobian_det(),
        max_displacement: tr2.max_displacement(),
    })
}
