use super::mesh::TriMesh;
use super::quadrature::TriangleRule;
use crate::error::{check_dim, Result, RomError};

/// Number of local nodes of a quadratic triangle.
pub const LOCAL_NODES: usize = 6;

/// Quadratic Lagrange shape functions at reference point `(s, t)`.
///
/// Local ordering: the three vertices, then the midpoints of edges
/// 0-1, 1-2 and 2-0.
pub fn shape_values(s: f64, t: f64) -> [f64; LOCAL_NODES] {
    let l = [1.0 - s - t, s, t];
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Reference-coordinate gradients `[d/ds, d/dt]` of [`shape_values`].
pub fn shape_gradients(s: f64, t: f64) -> [[f64; 2]; LOCAL_NODES] {
    let l = [1.0 - s - t, s, t];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let vert = |a: usize| [(4.0 * l[a] - 1.0) * dl[a][0], (4.0 * l[a] - 1.0) * dl[a][1]];
    let edge = |a: usize, b: usize| {
        [4.0 * (l[b] * dl[a][0] + l[a] * dl[b][0]), 4.0 * (l[b] * dl[a][1] + l[a] * dl[b][1])]
    };
    [vert(0), vert(1), vert(2), edge(0, 1), edge(1, 2), edge(2, 0)]
}

/// Affine map data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: [f64; 2],
    /// Columns are the edge vectors `x1 - x0` and `x2 - x0`.
    pub jacobian: [[f64; 2]; 2],
    /// Inverse transpose of the Jacobian; maps reference gradients to physical ones.
    pub inv_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    fn new(p: [[f64; 2]; 3]) -> Self {
        let j = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        Self { origin: p[0], jacobian: j, inv_t, det }
    }

    pub fn map(&self, s: f64, t: f64) -> [f64; 2] {
        let j = &self.jacobian;
        [self.origin[0] + j[0][0] * s + j[0][1] * t, self.origin[1] + j[1][0] * s + j[1][1] * t]
    }

    pub fn inverse_map(&self, p: [f64; 2]) -> [f64; 2] {
        let (dx, dy) = (p[0] - self.origin[0], p[1] - self.origin[1]);
        // J^{-1} = inv_t^T
        let it = &self.inv_t;
        [it[0][0] * dx + it[1][0] * dy, it[0][1] * dx + it[1][1] * dy]
    }

    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let it = &self.inv_t;
        [it[0][0] * g[0] + it[0][1] * g[1], it[1][0] * g[0] + it[1][1] * g[1]]
    }
}

/// Shape data tabulated at the points of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub values: Vec<[f64; LOCAL_NODES]>,
    pub gradients: Vec<[[f64; 2]; LOCAL_NODES]>,
}

impl Tabulation {
    pub fn new(rule: &TriangleRule) -> Self {
        Self {
            values: rule.points().iter().map(|p| shape_values(p[0], p[1])).collect(),
            gradients: rule.points().iter().map(|p| shape_gradients(p[0], p[1])).collect(),
        }
    }
}

/// Vector-valued continuous quadratic Lagrange space on a [`TriMesh`].
///
/// Scalar nodes are the points of the `(2n+1) x (2n+1)` lattice of spacing
/// `h/2`; the x-component coefficients come first, then the y-component.
#[derive(Debug, Clone)]
pub struct VelocitySpace {
    mesh: TriMesh,
    dofmap: Vec<[usize; LOCAL_NODES]>,
    geometry: Vec<ElementGeometry>,
    rule: TriangleRule,
    tab: Tabulation,
}

impl VelocitySpace {
    /// Space with the default degree-4 rule.
    pub fn new(mesh: TriMesh) -> Self {
        Self::with_rule(mesh, TriangleRule::degree4())
    }

    pub fn with_rule(mesh: TriMesh, rule: TriangleRule) -> Self {
        let side = 2 * mesh.n() + 1;
        let n = mesh.n();
        let lattice = |v: usize| (2 * (v % (n + 1)), 2 * (v / (n + 1)));
        let dofmap = mesh
            .triangles()
            .iter()
            .map(|tri| {
                let c = tri.map(lattice);
                let mid = |a: usize, b: usize| ((c[a].0 + c[b].0) / 2, (c[a].1 + c[b].1) / 2);
                let m = [c[0], c[1], c[2], mid(0, 1), mid(1, 2), mid(2, 0)];
                m.map(|(i, j)| j * side + i)
            })
            .collect();
        let geometry = mesh
            .triangles()
            .iter()
            .map(|tri| ElementGeometry::new(tri.map(|v| mesh.nodes()[v])))
            .collect();
        let tab = Tabulation::new(&rule);
        Self { mesh, dofmap, geometry, rule, tab }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// Scalar DOFs per component, `(2n+1)^2`.
    pub fn scalar_dofs(&self) -> usize {
        let side = 2 * self.mesh.n() + 1;
        side * side
    }

    /// Total DOFs, two components.
    pub fn dofs(&self) -> usize {
        2 * self.scalar_dofs()
    }

    pub fn dofmap(&self) -> &[[usize; LOCAL_NODES]] {
        &self.dofmap
    }

    pub fn geometry(&self) -> &[ElementGeometry] {
        &self.geometry
    }

    pub fn rule(&self) -> &TriangleRule {
        &self.rule
    }

    pub fn tabulation(&self) -> &Tabulation {
        &self.tab
    }

    pub fn element_count(&self) -> usize {
        self.dofmap.len()
    }

    /// Coordinates of scalar node `k`.
    pub fn node_coords(&self, k: usize) -> [f64; 2] {
        let side = 2 * self.mesh.n() + 1;
        let hh = 0.5 * self.mesh.h();
        [(k % side) as f64 * hh, (k / side) as f64 * hh]
    }

    /// Nodal interpolant of the vector function `g`.
    pub fn interpolate(&self, g: impl Fn([f64; 2]) -> [f64; 2]) -> Result<FeField> {
        let ns = self.scalar_dofs();
        let mut values = vec![0.0; 2 * ns];
        for k in 0..ns {
            let p = self.node_coords(k);
            let v = g(p);
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(RomError::Evaluation { what: "interpolated function", x: p[0], y: p[1] });
            }
            values[k] = v[0];
            values[ns + k] = v[1];
        }
        Ok(FeField::from_vec(values))
    }

    /// Value and physical gradient (`grad[c][d] = d u_c / d x_d`) of `u` at `p`.
    pub fn evaluate(&self, u: &FeField, p: [f64; 2]) -> Result<([f64; 2], [[f64; 2]; 2])> {
        check_dim(self.dofs(), u.len())?;
        let e = self
            .mesh
            .locate(p)
            .ok_or_else(|| RomError::InvalidArgument(format!("point ({}, {}) outside domain", p[0], p[1])))?;
        let geo = &self.geometry[e];
        let [s, t] = geo.inverse_map(p);
        let phi = shape_values(s, t);
        let dphi = shape_gradients(s, t);
        let ns = self.scalar_dofs();
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for (a, &k) in self.dofmap[e].iter().enumerate() {
            let g = geo.physical_gradient(dphi[a]);
            for c in 0..2 {
                let coef = u.values()[c * ns + k];
                val[c] += coef * phi[a];
                grad[c][0] += coef * g[0];
                grad[c][1] += coef * g[1];
            }
        }
        Ok((val, grad))
    }
}

/// Coefficient vector of a field in a [`VelocitySpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeField {
    values: Vec<f64>,
}

impl FeField {
    pub fn from_vec(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
