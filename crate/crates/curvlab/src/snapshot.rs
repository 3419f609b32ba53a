//! Raw binary metric snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `CVLSNAP1` |
//! | 4     | `n` (u32) |
//! | 4     | `res` (u32) |
//! | 8     | `side` (f64) |
//! | 8     | `t` (f64) |
//! | ...   | `res^n` points in row-major order (last axis fastest), each the upper-triangle components `g_ab`, `a <= b`, as f64 |
//!
//! Points are ordered by the grid's flat index, which runs the first axis
//! fastest; row-major here means the reader sees `x` varying slowest.

use std::io::{Read, Write};

use curvlab_core::flows::{component_pairs, MetricTensorField, PeriodicGrid};

use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"CVLSNAP1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub res: usize,
    pub side: f64,
    pub t: f64,
    /// `res^n × n(n+1)/2` values in file order.
    pub values: Vec<f64>,
}

/// Grid points in file order: `x` slowest, last axis fastest.
fn file_order(grid: &PeriodicGrid) -> impl Iterator<Item = usize> + '_ {
    let (n, res) = (grid.n(), grid.res());
    (0..grid.len()).map(move |k| {
        let mut ix = [0usize; 3];
        let mut rem = k;
        for axis in (0..n).rev() {
            ix[axis] = rem % res;
            rem /= res;
        }
        grid.flat_index(ix)
    })
}

impl Snapshot {
    pub fn from_metric(g: &MetricTensorField, t: f64) -> Self {
        let grid = g.grid;
        let n = grid.n();
        let pairs = component_pairs(n);
        let mut values = Vec::with_capacity(grid.len() * pairs.len());
        for p in file_order(&grid) {
            values.extend(pairs.iter().map(|&(a, b)| g.get(p, a, b)));
        }
        Self { n, res: grid.res(), side: grid.side(), t, values }
    }

    pub fn to_metric(&self) -> Result<MetricTensorField, CliError> {
        let grid = PeriodicGrid::new(self.n, self.res, self.side)?;
        let pairs = component_pairs(self.n);
        let mut g = MetricTensorField::zeros(grid);
        let order: Vec<usize> = file_order(&grid).collect();
        for (k, &p) in order.iter().enumerate() {
            let mut m = [[0.0; 3]; 3];
            for (c, &(a, b)) in pairs.iter().enumerate() {
                let v = self.values[k * pairs.len() + c];
                m[a][b] = v;
                m[b][a] = v;
            }
            g.set(p, &m);
        }
        Ok(g)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        let wrap = |e| CliError::io("writing snapshot", e);
        let mut buf = Vec::with_capacity(32 + 8 * self.values.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(self.n as u32).to_le_bytes());
        buf.extend_from_slice(&(self.res as u32).to_le_bytes());
        buf.extend_from_slice(&self.side.to_le_bytes());
        buf.extend_from_slice(&self.t.to_le_bytes());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf).map_err(wrap)?;
        out.flush().map_err(wrap)
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self, CliError> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes).map_err(|e| CliError::io("reading snapshot", e))?;
        let bad = |m: &str| CliError::Validation(format!("malformed snapshot: {m}"));
        if bytes.len() < 32 || &bytes[..8] != MAGIC {
            return Err(bad("missing CVLSNAP1 header"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let (n, res, side, t) = (u32_at(8), u32_at(12), f64_at(16), f64_at(24));
        if !(2..=3).contains(&n) || res == 0 {
            return Err(bad("unsupported n or res"));
        }
        let count = res.pow(n as u32) * n * (n + 1) / 2;
        if bytes.len() != 32 + 8 * count {
            return Err(bad("payload length does not match the header"));
        }
        let values = (0..count).map(|k| f64_at(32 + 8 * k)).collect();
        Ok(Self { n, res, side, t, values })
    }
}
