//! Christoffel symbols, Ricci and scalar curvature, and the Bianchi vector
//! field from grid derivatives of the metric.

use alloc::vec::Vec;

use super::stencil::{d1, mixed};
use super::{component_index, component_pairs, inverse, is_positive_definite, map_points, Mat3};
use super::{MetricTensorField, PeriodicGrid, ScalarField};
use crate::error::{Error, Result};

/// First and second partial derivatives of every metric component.
#[derive(Debug, Clone)]
pub struct MetricDerivatives {
    grid: PeriodicGrid,
    /// `dg[c * n + k] = ∂_k g_c`
    dg: Vec<Vec<f64>>,
    /// `ddg[c * m + component_index(k, l)] = ∂_k ∂_l g_c`, `m` = number of pairs
    ddg: Vec<Vec<f64>>,
}

impl MetricDerivatives {
    pub fn new(g: &MetricTensorField) -> Self {
        let grid = g.grid;
        let n = grid.n();
        let pairs = component_pairs(n);
        let mut dg = Vec::with_capacity(pairs.len() * n);
        let mut ddg = Vec::with_capacity(pairs.len() * pairs.len());
        for c in 0..pairs.len() {
            let comp = g.component(c);
            let firsts: Vec<Vec<f64>> = (0..n).map(|k| d1(&grid, comp, k)).collect();
            for &(k, l) in pairs {
                if k == l {
                    ddg.push(mixed(&grid, comp, k, k));
                } else {
                    ddg.push(d1(&grid, &firsts[k], l));
                }
            }
            dg.extend(firsts);
        }
        Self { grid, dg, ddg }
    }

    /// `(∂_k g_ab)[k][a][b]` at point `p`.
    pub fn first(&self, p: usize) -> [Mat3; 3] {
        let n = self.grid.n();
        let mut out = [[[0.0; 3]; 3]; 3];
        for (c, &(a, b)) in component_pairs(n).iter().enumerate() {
            for (k, slot) in out.iter_mut().enumerate().take(n) {
                let v = self.dg[c * n + k][p];
                slot[a][b] = v;
                slot[b][a] = v;
            }
        }
        out
    }

    /// `(∂_k ∂_l g_ab)[k][l][a][b]` at point `p`.
    pub fn second(&self, p: usize) -> [[Mat3; 3]; 3] {
        let n = self.grid.n();
        let pairs = component_pairs(n);
        let m = pairs.len();
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        for (c, &(a, b)) in pairs.iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    let v = self.ddg[c * m + component_index(n, k, l)][p];
                    out[k][l][a][b] = v;
                    out[k][l][b][a] = v;
                }
            }
        }
        out
    }
}

/// Ricci tensor, scalar curvature, inverse metric and determinant at one
/// point from the metric and its partial derivatives. `None` if `g` is not
/// positive definite.
///
/// `R_ij = ∂_k Γ^k_ij - ∂_j Γ^k_ik + Γ^k_kp Γ^p_ij - Γ^k_jp Γ^p_ik`.
pub fn ricci_at_point(n: usize, g: &Mat3, dg: &[Mat3; 3], ddg: &[[Mat3; 3]; 3]) -> Option<(Mat3, f64, Mat3, f64)> {
    if !is_positive_definite(n, g) {
        return None;
    }
    let (gi, det) = inverse(n, g)?;
    // Γ^k_ij
    let mut gam = [[[0.0; 3]; 3]; 3];
    // ∂_l Γ^k_ij as dgam[l][k][i][j]
    let mut dgam = [[[[0.0; 3]; 3]; 3]; 3];
    // ∂_l g^{km}
    let mut dgi = [[[0.0; 3]; 3]; 3];
    for l in 0..n {
        for k in 0..n {
            for m in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s -= gi[k][a] * dg[l][a][b] * gi[b][m];
                    }
                }
                dgi[l][k][m] = s;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut lower = [0.0; 3];
            for (m, lm) in lower.iter_mut().enumerate().take(n) {
                *lm = 0.5 * (dg[i][m][j] + dg[j][m][i] - dg[m][i][j]);
            }
            for k in 0..n {
                gam[k][i][j] = (0..n).map(|m| gi[k][m] * lower[m]).sum();
            }
            for l in 0..n {
                let mut dlower = [0.0; 3];
                for (m, dl) in dlower.iter_mut().enumerate().take(n) {
                    *dl = 0.5 * (ddg[l][i][m][j] + ddg[l][j][m][i] - ddg[l][m][i][j]);
                }
                for k in 0..n {
                    dgam[l][k][i][j] = (0..n).map(|m| dgi[l][k][m] * lower[m] + gi[k][m] * dlower[m]).sum();
                }
            }
        }
    }
    let mut ric = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += dgam[k][k][i][j] - dgam[j][k][i][k];
                for p in 0..n {
                    s += gam[k][k][p] * gam[p][i][j] - gam[k][j][p] * gam[p][i][k];
                }
            }
            ric[i][j] = s;
        }
    }
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            r += gi[i][j] * ric[i][j];
        }
    }
    Some((ric, r, gi, det))
}

/// `X^i = g^{ij} g^{pq} (-∂_p g_qj + ½ ∂_j g_pq)` at a point (flat constant background).
pub(crate) fn bianchi_at_point(n: usize, gi: &Mat3, dg: &[Mat3; 3]) -> [f64; 3] {
    let mut lower = [0.0; 3];
    for (j, lj) in lower.iter_mut().enumerate().take(n) {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += gi[p][q] * (-dg[p][q][j] + 0.5 * dg[j][p][q]);
            }
        }
        *lj = s;
    }
    let mut x = [0.0; 3];
    for i in 0..n {
        x[i] = (0..n).map(|j| gi[i][j] * lower[j]).sum();
    }
    x
}

/// Curvature quantities on the whole grid.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub ricci: MetricTensorField,
    pub scalar: ScalarField,
    /// `|Ric|² = g^{ia} g^{jb} R_ij R_ab`
    pub ricci_sq: Vec<f64>,
    /// `√det g`
    pub sqrt_det: Vec<f64>,
}

pub(crate) struct PointCurvature {
    pub ric: Mat3,
    pub r: f64,
    pub ricci_sq: f64,
    pub sqrt_det: f64,
    pub x: [f64; 3],
}

/// Pointwise curvature and Bianchi field for every grid point.
pub(crate) fn pointwise(g: &MetricTensorField, der: &MetricDerivatives) -> Result<Vec<PointCurvature>> {
    let n = g.grid.n();
    let out = map_points(g.grid.len(), |p| {
        let gm = g.at(p);
        let dg = der.first(p);
        let ddg = der.second(p);
        let (ric, r, gi, det) = ricci_at_point(n, &gm, &dg, &ddg)?;
        let mut sq = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        sq += gi[i][a] * gi[j][b] * ric[i][j] * ric[a][b];
                    }
                }
            }
        }
        let x = bianchi_at_point(n, &gi, &dg);
        Some(PointCurvature { ric, r, ricci_sq: sq, sqrt_det: crate::math::sqrt(det), x })
    });
    out.into_iter()
        .enumerate()
        .map(|(p, v)| v.ok_or(Error::NotPositiveDefinite { index: p }))
        .collect()
}

/// Ricci tensor and scalar curvature of a grid metric.
pub fn curvature_from_grid(g: &MetricTensorField) -> Result<Curvature> {
    let der = MetricDerivatives::new(g);
    let pts = pointwise(g, &der)?;
    let grid = g.grid;
    let mut ricci = MetricTensorField::zeros(grid);
    for (p, pc) in pts.iter().enumerate() {
        ricci.set(p, &pc.ric);
    }
    Ok(Curvature {
        ricci,
        scalar: ScalarField { grid, data: pts.iter().map(|c| c.r).collect() },
        ricci_sq: pts.iter().map(|c| c.ricci_sq).collect(),
        sqrt_det: pts.iter().map(|c| c.sqrt_det).collect(),
    })
}

/// The Bianchi vector field `X_ḡ(h)` of `g = ḡ + h` against a flat,
/// spatially constant background `ḡ`, one array per component.
pub fn bianchi_vector(g: &MetricTensorField, background: &MetricTensorField) -> Result<Vec<Vec<f64>>> {
    if background.grid != g.grid {
        return Err(Error::Config("background lives on a different grid"));
    }
    if !background.is_constant(1e-12) {
        return Err(Error::Unsupported("the background metric must be constant on the grid"));
    }
    let n = g.grid.n();
    let der = MetricDerivatives::new(g);
    let xs = map_points(g.grid.len(), |p| {
        let gm = g.at(p);
        if !is_positive_definite(n, &gm) {
            return None;
        }
        let (gi, _) = inverse(n, &gm)?;
        Some(bianchi_at_point(n, &gi, &der.first(p)))
    });
    let mut out = alloc::vec![Vec::with_capacity(g.grid.len()); n];
    for (p, x) in xs.into_iter().enumerate() {
        let x = x.ok_or(Error::NotPositiveDefinite { index: p })?;
        for (k, col) in out.iter_mut().enumerate() {
            col.push(x[k]);
        }
    }
    Ok(out)
}
