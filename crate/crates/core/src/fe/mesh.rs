use crate::error::{Result, RomError};

/// Structured triangulation of the unit square.
///
/// Every cell `[i h, (i+1) h] x [j h, (j+1) h]` is split along its
/// lower-left to upper-right diagonal into two counter-clockwise triangles.
#[derive(Debug, Clone)]
pub struct TriMesh {
    n: usize,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Builds the `n x n` cell mesh with `2 n^2` triangles.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(RomError::InvalidArgument("mesh needs at least one cell per side".into()));
        }
        let h = 1.0 / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                nodes.push([i as f64 * h, j as f64 * h]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                // lower-right, then upper-left
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Ok(Self { n, nodes, triangles })
    }

    /// Cells per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Signed area of triangle `t` (positive for counter-clockwise).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.nodes[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Index of the triangle containing `p`, with points on shared edges
    /// assigned deterministically.
    pub fn locate(&self, p: [f64; 2]) -> Option<usize> {
        if !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]) {
            return None;
        }
        let n = self.n;
        let fx = p[0] * n as f64;
        let fy = p[1] * n as f64;
        let i = (fx.floor() as usize).min(n - 1);
        let j = (fy.floor() as usize).min(n - 1);
        let (lx, ly) = (fx - i as f64, fy - j as f64);
        let cell = 2 * (j * n + i);
        Some(if ly <= lx { cell } else { cell + 1 })
    }
}
