//! Periodic fourth-order finite differences and cubic interpolation.

use alloc::vec::Vec;

use super::{map_points, PeriodicGrid};

/// `∂_axis f` with `(-f₊₂ + 8f₊₁ - 8f₋₁ + f₋₂) / 12h`.
pub fn d1(grid: &PeriodicGrid, f: &[f64], axis: usize) -> Vec<f64> {
    let s = 1.0 / (12.0 * grid.h());
    map_points(grid.len(), |p| {
        let m2 = f[grid.shift(p, axis, -2)];
        let m1 = f[grid.shift(p, axis, -1)];
        let p1 = f[grid.shift(p, axis, 1)];
        let p2 = f[grid.shift(p, axis, 2)];
        (-p2 + 8.0 * p1 - 8.0 * m1 + m2) * s
    })
}

/// `∂²_axis f` with `(-f₊₂ + 16f₊₁ - 30f + 16f₋₁ - f₋₂) / 12h²`.
pub fn d2(grid: &PeriodicGrid, f: &[f64], axis: usize) -> Vec<f64> {
    let h = grid.h();
    let s = 1.0 / (12.0 * h * h);
    map_points(grid.len(), |p| {
        let m2 = f[grid.shift(p, axis, -2)];
        let m1 = f[grid.shift(p, axis, -1)];
        let p1 = f[grid.shift(p, axis, 1)];
        let p2 = f[grid.shift(p, axis, 2)];
        (-p2 + 16.0 * p1 - 30.0 * f[p] + 16.0 * m1 - m2) * s
    })
}

/// `∂_a ∂_b f`: the pure stencil on the diagonal, `d1 ∘ d1` off it.
pub fn mixed(grid: &PeriodicGrid, f: &[f64], a: usize, b: usize) -> Vec<f64> {
    if a == b {
        d2(grid, f, a)
    } else {
        d1(grid, &d1(grid, f, a), b)
    }
}

/// Four-point Lagrange weights for nodes `-1, 0, 1, 2` at offset `t ∈ [0,1)`.
#[inline]
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Periodic tensor-product cubic interpolation of nodal values at `x`.
pub fn interpolate(grid: &PeriodicGrid, f: &[f64], x: [f64; 3]) -> f64 {
    let n = grid.n();
    let res = grid.res() as isize;
    let h = grid.h();
    let mut base = [0isize; 3];
    let mut w = [[0.0; 4]; 3];
    for k in 0..n {
        let s = x[k] / h;
        let fl = libm::floor(s);
        base[k] = fl as isize;
        w[k] = lagrange4(s - fl);
    }
    let wrap = |i: isize| i.rem_euclid(res) as usize;
    let mut acc = 0.0;
    if n == 2 {
        for (j, wj) in w[1].iter().enumerate() {
            let row = wrap(base[1] + j as isize - 1) * grid.res();
            let mut inner = 0.0;
            for (i, wi) in w[0].iter().enumerate() {
                inner += wi * f[row + wrap(base[0] + i as isize - 1)];
            }
            acc += wj * inner;
        }
    } else {
        let r = grid.res();
        for (l, wl) in w[2].iter().enumerate() {
            let plane = wrap(base[2] + l as isize - 1) * r * r;
            let mut mid = 0.0;
            for (j, wj) in w[1].iter().enumerate() {
                let row = plane + wrap(base[1] + j as isize - 1) * r;
                let mut inner = 0.0;
                for (i, wi) in w[0].iter().enumerate() {
                    inner += wi * f[row + wrap(base[0] + i as isize - 1)];
                }
                mid += wj * inner;
            }
            acc += wl * mid;
        }
    }
    acc
}
