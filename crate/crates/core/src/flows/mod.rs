//! Ricci, Ricci–DeTurck and heat flow on flat periodic grids in two and
//! three dimensions.
//!
//! Spatial derivatives are fourth-order central differences with periodic
//! wrap, time stepping is classical RK4 with
//! `dt <= 0.1 h² / max(1, sup λ_max(g^{-1}))`.

mod curvature;
mod diffeo;
mod evolve;
mod identities;
mod stencil;

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt, PI};

pub use curvature::{bianchi_vector, curvature_from_grid, ricci_at_point, Curvature, MetricDerivatives};
pub use diffeo::{
    deturck_consistency, deturck_diffeo_step, pullback_state, rde_diffeo_step, DeTurckReport, DiffeoTrack,
};
pub use evolve::{
    cfl_limit, conformal_cfl_limit, conformal_ricci_flow_2d_step, evolve_to, heat_flow_step, laplace_beltrami,
    rde_rhs, rde_step, ricci_flow_step, ricci_heat_step, ricci_rhs, FlowKind,
};
pub use identities::{
    cauchy_schwarz_check, evolution_identity_residual, identity_rhs, soliton_total_scaling, weighted_total,
    IdentityReport,
};
pub use stencil::{d1, d2, interpolate, mixed};

/// Dense symmetric matrix; only the leading `n × n` block is used.
pub type Mat3 = [[f64; 3]; 3];

/// Uniform periodic grid on `[0, side)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    n: usize,
    res: usize,
    side: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, res: usize, side: f64) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::UnsupportedDimension { n, reason: "grid flows run in dimension 2 or 3" });
        }
        if res < 16 || res % 2 != 0 {
            return Err(Error::Config("grid resolution must be even and at least 16"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Domain("torus side must be positive"));
        }
        Ok(Self { n, res, side })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn res(&self) -> usize {
        self.res
    }
    pub fn side(&self) -> f64 {
        self.side
    }
    pub fn h(&self) -> f64 {
        self.side / self.res as f64
    }
    /// Number of grid points, `res^n`.
    pub fn len(&self) -> usize {
        self.res.pow(self.n as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Volume of one cell, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        crate::math::powi(self.h(), self.n as i32)
    }

    pub(crate) fn stride(&self, axis: usize) -> usize {
        self.res.pow(axis as u32)
    }

    /// Integer coordinates of point `p` (unused axes are zero).
    pub fn multi_index(&self, p: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut q = p;
        for slot in out.iter_mut().take(self.n) {
            *slot = q % self.res;
            q /= self.res;
        }
        out
    }

    pub fn flat_index(&self, ix: [usize; 3]) -> usize {
        (0..self.n).map(|k| (ix[k] % self.res) * self.stride(k)).sum()
    }

    /// Physical coordinates of point `p`.
    pub fn coords(&self, p: usize) -> [f64; 3] {
        let ix = self.multi_index(p);
        let h = self.h();
        [ix[0] as f64 * h, ix[1] as f64 * h, ix[2] as f64 * h]
    }

    /// Index of the point `offset` steps from `p` along `axis`, wrapping.
    #[inline]
    pub(crate) fn shift(&self, p: usize, axis: usize, offset: isize) -> usize {
        let stride = self.stride(axis);
        let c = (p / stride) % self.res;
        let c2 = (c as isize + offset).rem_euclid(self.res as isize) as usize;
        p + c2 * stride - c * stride
    }
}

/// Symmetric-component index pairs `(a, b)` with `a <= b`.
pub fn component_pairs(n: usize) -> &'static [(usize, usize)] {
    match n {
        2 => &[(0, 0), (0, 1), (1, 1)],
        _ => &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)],
    }
}

/// Position of `(a, b)` in [`component_pairs`].
#[inline]
pub fn component_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    match n {
        2 => a + b,
        _ => match (a, b) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        },
    }
}

/// A real function on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: PeriodicGrid,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        Self { grid, data: alloc::vec![value; grid.len()] }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self { grid, data: (0..grid.len()).map(|p| f(grid.coords(p))).collect() }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Symmetric 2-tensor per grid point, stored component-major: component
/// `c` (see [`component_pairs`]) of point `p` lives at `c * len + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensorField {
    pub grid: PeriodicGrid,
    pub data: Vec<f64>,
}

impl MetricTensorField {
    pub fn components(&self) -> usize {
        component_pairs(self.grid.n).len()
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, data: alloc::vec![0.0; component_pairs(grid.n).len() * grid.len()] }
    }

    pub fn flat(grid: PeriodicGrid) -> Self {
        Self::constant(grid, identity())
    }

    pub fn constant(grid: PeriodicGrid, m: Mat3) -> Self {
        Self::from_fn(grid, |_| m)
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn([f64; 3]) -> Mat3) -> Self {
        let len = grid.len();
        let pairs = component_pairs(grid.n);
        let mut data = alloc::vec![0.0; pairs.len() * len];
        for p in 0..len {
            let m = f(grid.coords(p));
            for (c, &(a, b)) in pairs.iter().enumerate() {
                data[c * len + p] = 0.5 * (m[a][b] + m[b][a]);
            }
        }
        Self { grid, data }
    }

    /// `m(x) δ` for a scalar factor.
    pub fn conformal(grid: PeriodicGrid, factor: impl Fn([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, |x| scaled_identity(factor(x)))
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    #[inline]
    pub fn get(&self, p: usize, a: usize, b: usize) -> f64 {
        self.data[component_index(self.grid.n, a, b) * self.grid.len() + p]
    }

    pub fn at(&self, p: usize) -> Mat3 {
        let len = self.grid.len();
        let mut m = [[0.0; 3]; 3];
        for (c, &(a, b)) in component_pairs(self.grid.n).iter().enumerate() {
            let v = self.data[c * len + p];
            m[a][b] = v;
            m[b][a] = v;
        }
        m
    }

    pub fn set(&mut self, p: usize, m: &Mat3) {
        let len = self.grid.len();
        for (c, &(a, b)) in component_pairs(self.grid.n).iter().enumerate() {
            self.data[c * len + p] = m[a][b];
        }
    }

    /// First point where a leading principal minor is not positive.
    pub fn check_positive_definite(&self) -> Result<()> {
        for p in 0..self.grid.len() {
            if !is_positive_definite(self.grid.n, &self.at(p)) {
                return Err(Error::NotPositiveDefinite { index: p });
            }
        }
        Ok(())
    }

    /// `max |g_ab - other_ab|` over points and components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Whether the field is the same matrix at every point.
    pub fn is_constant(&self, tol: f64) -> bool {
        let len = self.grid.len();
        (0..self.components()).all(|c| {
            let s = &self.data[c * len..(c + 1) * len];
            s.iter().all(|v| (v - s[0]).abs() <= tol)
        })
    }
}

/// Time, metric, optional weight and background of a flow.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub g: MetricTensorField,
    pub f: Option<ScalarField>,
    pub background: Arc<MetricTensorField>,
    pub lambda: Option<f64>,
}

impl FlowState {
    /// State at `t = 0` with a flat identity background.
    pub fn new(g: MetricTensorField) -> Self {
        let background = Arc::new(MetricTensorField::flat(g.grid));
        Self { t: 0.0, g, f: None, background, lambda: None }
    }

    pub fn with_weight(mut self, f: ScalarField) -> Self {
        self.f = Some(f);
        self
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.g.grid
    }
}

/// Shapes of smooth periodic initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// `e^{u} δ` with `u = A (cos(2π y/L) + sin(2π x/L))`.
    Conformal,
    /// `δ + A M(x)` with a non-conformal, off-diagonal `M`.
    Anisotropic,
    /// `e^{u} δ` with `u = A sin(2π k x/L) sin(2π k y/L)` (`k` = wave number).
    HighFrequency(u32),
}

/// Initial metric for a flow run.
pub fn perturbed_metric(grid: PeriodicGrid, amplitude: f64, kind: Perturbation) -> MetricTensorField {
    let w = 2.0 * PI / grid.side();
    let n = grid.n();
    match kind {
        Perturbation::Conformal => MetricTensorField::conformal(grid, |x| {
            crate::math::exp(amplitude * (cos(w * x[1]) + sin(w * x[0])))
        }),
        Perturbation::HighFrequency(k) => {
            let wk = w * k as f64;
            MetricTensorField::conformal(grid, |x| crate::math::exp(amplitude * sin(wk * x[0]) * sin(wk * x[1])))
        }
        Perturbation::Anisotropic => MetricTensorField::from_fn(grid, |x| {
            let mut m = identity_n(n);
            let z = if n == 3 { x[2] } else { 0.0 };
            m[0][0] += amplitude * sin(w * x[1]);
            m[1][1] += amplitude * cos(w * (x[0] + z));
            m[0][1] += 0.5 * amplitude * sin(w * (x[0] + x[1]));
            m[1][0] = m[0][1];
            if n == 3 {
                m[2][2] += amplitude * sin(w * (x[0] - x[1]));
                m[1][2] += 0.5 * amplitude * cos(w * x[2]);
                m[2][1] = m[1][2];
            }
            m
        }),
    }
}

// ---------------------------------------------------------------------------
// Small dense linear algebra
// ---------------------------------------------------------------------------

pub fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn identity_n(n: usize) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (k, row) in m.iter_mut().enumerate().take(n) {
        row[k] = 1.0;
    }
    m
}

fn scaled_identity(s: f64) -> Mat3 {
    [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]]
}

pub fn determinant(n: usize, m: &Mat3) -> f64 {
    match n {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Inverse and determinant; `None` for a singular matrix.
pub fn inverse(n: usize, m: &Mat3) -> Option<(Mat3, f64)> {
    let det = determinant(n, m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    match n {
        2 => {
            inv[0][0] = m[1][1] / det;
            inv[1][1] = m[0][0] / det;
            inv[0][1] = -m[0][1] / det;
            inv[1][0] = -m[1][0] / det;
        }
        _ => {
            for i in 0..3 {
                for j in 0..3 {
                    let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
                    let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / det;
                }
            }
        }
    }
    Some((inv, det))
}

/// Leading principal minors all positive.
pub fn is_positive_definite(n: usize, m: &Mat3) -> bool {
    if !(m[0][0] > 0.0) {
        return false;
    }
    let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(d2 > 0.0) {
        return false;
    }
    n == 2 || determinant(3, m) > 0.0
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(n: usize, m: &Mat3) -> f64 {
    if n == 2 {
        let tr = m[0][0] + m[1][1];
        let diff = m[0][0] - m[1][1];
        return 0.5 * tr + 0.5 * sqrt(diff * diff + 4.0 * m[0][1] * m[0][1]);
    }
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        return m[0][0].max(m[1][1]).max(m[2][2]);
    }
    let (a, b, c) = (m[0][0] - q, m[1][1] - q, m[2][2] - q);
    let p2 = a * a + b * b + c * c + 2.0 * p1;
    let p = sqrt(p2 / 6.0);
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let r = (0.5 * determinant(3, &b)).clamp(-1.0, 1.0);
    let phi = libm::acos(r) / 3.0;
    q + 2.0 * p * cos(phi)
}

/// `(0..len).map(f).collect()`, in parallel with the `parallel` feature.
#[cfg(feature = "parallel")]
pub(crate) fn map_points<T: Send, F: Fn(usize) -> T + Sync + Send>(len: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_points<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(PeriodicGrid::new(2, 15, 1.0).is_err());
        assert!(PeriodicGrid::new(2, 18, 1.0).is_ok());
        assert!(PeriodicGrid::new(2, 17, 1.0).is_err());
        assert!(PeriodicGrid::new(4, 16, 1.0).is_err());
        assert!(PeriodicGrid::new(3, 16, 0.0).is_err());
        let g = PeriodicGrid::new(3, 16, 2.0).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.h(), 0.125);
        let p = g.flat_index([3, 5, 7]);
        assert_eq!(g.multi_index(p), [3, 5, 7]);
        assert_eq!(g.multi_index(g.shift(p, 1, -6)), [3, 15, 7]);
        assert_eq!(g.multi_index(g.shift(p, 2, 10)), [3, 5, 1]);
    }

    #[test]
    fn component_layout() {
        for n in [2, 3] {
            for (c, &(a, b)) in component_pairs(n).iter().enumerate() {
                assert_eq!(component_index(n, a, b), c);
                assert_eq!(component_index(n, b, a), c);
            }
        }
    }

    #[test]
    fn inverse_and_eigen() {
        let m = [[2.0, 0.5, 0.1], [0.5, 1.5, 0.2], [0.1, 0.2, 1.0]];
        let (inv, det) = inverse(3, &m).unwrap();
        assert!((det - determinant(3, &m)).abs() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        // λ_max via power iteration
        let mut v = [1.0, 1.0, 1.0];
        for _ in 0..500 {
            let w: Vec<f64> = (0..3).map(|i| (0..3).map(|k| m[i][k] * v[k]).sum()).collect();
            let nrm = sqrt(w.iter().map(|x| x * x).sum());
            v = [w[0] / nrm, w[1] / nrm, w[2] / nrm];
        }
        let rq: f64 = (0..3).map(|i| v[i] * (0..3).map(|k| m[i][k] * v[k]).sum::<f64>()).sum();
        assert!((max_eigenvalue(3, &m) - rq).abs() < 1e-12);
        assert!(is_positive_definite(3, &m));
        assert!(!is_positive_definite(2, &[[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0; 3]]));
    }
}
