//! Structured triangulation of an axis-aligned rectangle.
//!
//! Nodes are numbered row-major (`j * (nx + 1) + i`), and each cell
//! `(i, j)` is split along its SW-NE diagonal into the counterclockwise
//! triangles `(sw, se, ne)` and `(sw, ne, nw)`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("cell counts must be at least 1 (got nx = {nx}, ny = {ny})")]
    NoCells { nx: usize, ny: usize },
    #[error("degenerate rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    DegenerateRect {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    /// The square `[-1, 1]^2`.
    pub const UNIT_SQUARE: Rect = Rect {
        xmin: -1.0,
        xmax: 1.0,
        ymin: -1.0,
        ymax: 1.0,
    };

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }
}

impl Default for Rect {
    fn default() -> Self {
        Rect::UNIT_SQUARE
    }
}

/// Area and constant P1 basis gradients of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn from_vertices(p: [[f64; 2]; 3]) -> ElementGeometry {
        let [p1, p2, p3] = p;
        let twice = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]);
        let inv = 1.0 / twice;
        ElementGeometry {
            area: 0.5 * twice,
            grads: [
                [(p2[1] - p3[1]) * inv, (p3[0] - p2[0]) * inv],
                [(p3[1] - p1[1]) * inv, (p1[0] - p3[0]) * inv],
                [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
            ],
        }
    }

    /// Gradient of the P1 interpolant with the given vertex values.
    pub fn gradient_of(&self, vals: [f64; 3]) -> [f64; 2] {
        let g = &self.grads;
        [
            vals[0] * g[0][0] + vals[1] * g[1][0] + vals[2] * g[2][0],
            vals[0] * g[0][1] + vals[1] * g[1][1] + vals[2] * g[2][1],
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 3]>,
    /// Sorted indices of nodes lying on the rectangle boundary.
    pub boundary_nodes: Vec<usize>,
    /// Largest element diameter.
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub rect: Rect,
}

impl TriMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.elements[e];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn element_geometry(&self, e: usize) -> ElementGeometry {
        ElementGeometry::from_vertices(self.vertices(e))
    }

    pub fn geometries(&self) -> Vec<ElementGeometry> {
        (0..self.n_elements()).map(|e| self.element_geometry(e)).collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary_nodes.binary_search(&node).is_ok()
    }

    /// Index of the node closest to `(x, y)`; ties go to the lowest index.
    pub fn nearest_node(&self, x: f64, y: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.nodes.iter().enumerate() {
            let d = (p[0] - x).powi(2) + (p[1] - y).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

pub fn build_rect_mesh(nx: usize, ny: usize, rect: Rect) -> Result<TriMesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::NoCells { nx, ny });
    }
    let w = rect.xmax - rect.xmin;
    let hgt = rect.ymax - rect.ymin;
    if !(w > 0.0 && hgt > 0.0 && w.is_finite() && hgt.is_finite()) {
        return Err(MeshError::DegenerateRect {
            xmin: rect.xmin,
            xmax: rect.xmax,
            ymin: rect.ymin,
            ymax: rect.ymax,
        });
    }
    let hx = w / nx as f64;
    let hy = hgt / ny as f64;
    let coord = |k: usize, n: usize, lo: f64, hi: f64, step: f64| {
        if k == n {
            hi
        } else {
            lo + k as f64 * step
        }
    };

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary_nodes = Vec::new();
    for j in 0..=ny {
        let y = coord(j, ny, rect.ymin, rect.ymax, hy);
        for i in 0..=nx {
            let x = coord(i, nx, rect.xmin, rect.xmax, hx);
            if i == 0 || i == nx || j == 0 || j == ny {
                boundary_nodes.push(nodes.len());
            }
            nodes.push([x, y]);
        }
    }

    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let sw = idx(i, j);
            let se = idx(i + 1, j);
            let ne = idx(i + 1, j + 1);
            let nw = idx(i, j + 1);
            elements.push([sw, se, ne]);
            elements.push([sw, ne, nw]);
        }
    }

    let mut mesh = TriMesh {
        nodes,
        elements,
        boundary_nodes,
        h: 0.0,
        nx,
        ny,
        rect,
    };
    mesh.h = (0..mesh.n_elements())
        .map(|e| {
            let [a, b, c] = mesh.vertices(e);
            let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            d(a, b).max(d(b, c)).max(d(c, a))
        })
        .fold(0.0, f64::max);
    Ok(mesh)
}
