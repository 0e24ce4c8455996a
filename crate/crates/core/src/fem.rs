//! P1 finite-element operators under homogeneous Neumann conditions.
//!
//! All element integrals are closed-form for piecewise-linear functions with
//! elementwise-constant coefficients. Element contributions are computed
//! (possibly in parallel) and then scattered into the global matrix in
//! element order, so the assembled values do not depend on the policy.

use crate::dynamics::{Attractant, FieldState, Params};
use crate::exec::ExecPolicy;
use crate::mesh::{ElementGeometry, TriMesh};
use crate::sparse::{solve_cg, SolveError, SolverOptions, SparseMatrix};

/// Matrices shared by every time step on one mesh.
#[derive(Debug, Clone)]
pub struct AssembledOperators {
    pub mass: SparseMatrix,
    /// Unit-coefficient stiffness.
    pub stiffness: SparseMatrix,
    pub lumped_mass: Vec<f64>,
    pub geometry: Vec<ElementGeometry>,
}

impl AssembledOperators {
    pub fn new(mesh: &TriMesh, exec: ExecPolicy) -> AssembledOperators {
        let geometry = element_geometries(mesh, exec);
        let mass = assemble_mass_with(mesh, &geometry, exec);
        let stiffness = assemble_stiffness_with(mesh, &geometry, |_| 1.0, exec);
        let lumped_mass = lumped_mass(mesh, &geometry);
        AssembledOperators {
            mass,
            stiffness,
            lumped_mass,
            geometry,
        }
    }

    pub fn n(&self) -> usize {
        self.lumped_mass.len()
    }

    /// `|Omega|` as seen by the mesh.
    pub fn domain_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }
}

pub fn element_geometries(mesh: &TriMesh, exec: ExecPolicy) -> Vec<ElementGeometry> {
    exec.map_indexed(mesh.n_elements(), |e| mesh.element_geometry(e))
}

/// Zero matrix whose pattern is node adjacency plus the diagonal.
pub fn fem_pattern(mesh: &TriMesh) -> SparseMatrix {
    let mut rows = vec![Vec::with_capacity(7); mesh.n_nodes()];
    for (i, row) in rows.iter_mut().enumerate() {
        row.push(i);
    }
    for el in &mesh.elements {
        for &i in el {
            for &j in el {
                if i != j {
                    rows[i].push(j);
                }
            }
        }
    }
    SparseMatrix::from_pattern(mesh.n_nodes(), &rows)
}

fn scatter(mesh: &TriMesh, blocks: &[[[f64; 3]; 3]]) -> SparseMatrix {
    let mut m = fem_pattern(mesh);
    for (el, block) in mesh.elements.iter().zip(blocks) {
        for (a, &i) in el.iter().enumerate() {
            for (b, &j) in el.iter().enumerate() {
                m.add_at(i, j, block[a][b]);
            }
        }
    }
    m
}

pub fn local_mass(area: f64) -> [[f64; 3]; 3] {
    let d = area / 6.0;
    let o = area / 12.0;
    [[d, o, o], [o, d, o], [o, o, d]]
}

pub fn local_stiffness(g: &ElementGeometry, coeff: f64) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let gg = g.grads[i][0] * g.grads[j][0] + g.grads[i][1] * g.grads[j][1];
            k[i][j] = coeff * g.area * gg;
        }
    }
    k
}

/// `M_ij = integral of phi_i phi_j`.
pub fn assemble_mass(mesh: &TriMesh) -> SparseMatrix {
    let exec = ExecPolicy::default();
    assemble_mass_with(mesh, &element_geometries(mesh, exec), exec)
}

pub fn assemble_mass_with(mesh: &TriMesh, geometry: &[ElementGeometry], exec: ExecPolicy) -> SparseMatrix {
    let blocks = exec.map_indexed(mesh.n_elements(), |e| local_mass(geometry[e].area));
    scatter(mesh, &blocks)
}

/// `A_ij = sum_e coeff(e) |e| grad phi_j . grad phi_i`.
pub fn assemble_stiffness(mesh: &TriMesh, coeff: &[f64]) -> SparseMatrix {
    assert_eq!(coeff.len(), mesh.n_elements(), "one coefficient per element");
    let exec = ExecPolicy::default();
    assemble_stiffness_with(mesh, &element_geometries(mesh, exec), |e| coeff[e], exec)
}

pub fn assemble_stiffness_with<C>(mesh: &TriMesh, geometry: &[ElementGeometry], coeff: C, exec: ExecPolicy) -> SparseMatrix
where
    C: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = exec.map_indexed(mesh.n_elements(), |e| local_stiffness(&geometry[e], coeff(e)));
    scatter(mesh, &blocks)
}

/// Row sums of the consistent mass matrix: a third of each adjacent area.
pub fn lumped_mass(mesh: &TriMesh, geometry: &[ElementGeometry]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_nodes()];
    for (el, g) in mesh.elements.iter().zip(geometry) {
        for &i in el {
            out[i] += g.area / 3.0;
        }
    }
    out
}

/// Chemotaxis load `r_i = sum_e chi_bar(e) |e| grad s_h . grad phi_i`.
///
/// `s` is the attractant of the active model (`v` for model 1, `u` for
/// model 2) and `chi_bar` the vertex average of the nodal sensitivity. The
/// weak form of `-div(chi grad s)` under zero boundary flux is `+r`, so the
/// `w` equation adds `r` to its right-hand side; for `chi > 0` this moves
/// `w` up the attractant gradient. Entries sum to zero up to rounding.
pub fn assemble_chemotaxis_rhs(mesh: &TriMesh, geometry: &[ElementGeometry], p: &Params, state: &FieldState) -> Vec<f64> {
    chemotaxis_rhs_with(mesh, geometry, p, state, ExecPolicy::default())
}

pub fn chemotaxis_rhs_with(
    mesh: &TriMesh,
    geometry: &[ElementGeometry],
    p: &Params,
    state: &FieldState,
    exec: ExecPolicy,
) -> Vec<f64> {
    let s: &[f64] = match p.attractant() {
        Attractant::Mesopredator => &state.v,
        Attractant::Resource => &state.u,
    };
    let chi: Vec<f64> = (0..state.len())
        .map(|i| p.sensitivity(state.u[i], state.v[i], state.w[i]))
        .collect();
    let locals = exec.map_indexed(mesh.n_elements(), |e| {
        let el = mesh.elements[e];
        let g = &geometry[e];
        let chi_bar = (chi[el[0]] + chi[el[1]] + chi[el[2]]) / 3.0;
        if chi_bar == 0.0 {
            return [0.0; 3];
        }
        let grad = g.gradient_of([s[el[0]], s[el[1]], s[el[2]]]);
        let scale = chi_bar * g.area;
        [0, 1, 2].map(|k| scale * (grad[0] * g.grads[k][0] + grad[1] * g.grads[k][1]))
    });
    let mut r = vec![0.0; mesh.n_nodes()];
    for (el, loc) in mesh.elements.iter().zip(&locals) {
        for k in 0..3 {
            r[el[k]] += loc[k];
        }
    }
    r
}

/// Symmetric 7-point rule, exact for degree-5 polynomials. Entries are
/// barycentric coordinates and weights summing to one.
pub const QUAD7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_770;
    const B1: f64 = 0.470_142_064_105_115;
    const W1: f64 = 0.132_394_152_788_506;
    const A2: f64 = 0.797_426_985_353_087;
    const B2: f64 = 0.101_286_507_323_456;
    const W2: f64 = 0.125_939_180_544_827;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

fn quad_points(p: [[f64; 2]; 3]) -> impl Iterator<Item = ([f64; 3], [f64; 2], f64)> {
    QUAD7.into_iter().map(move |(l, w)| {
        let x = l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0];
        let y = l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1];
        (l, [x, y], w)
    })
}

/// `b_i = integral of f phi_i`, by quadrature.
pub fn load_vector<F: Fn(f64, f64) -> f64>(mesh: &TriMesh, geometry: &[ElementGeometry], f: F) -> Vec<f64> {
    let mut b = vec![0.0; mesh.n_nodes()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let area = geometry[e].area;
        for (l, xy, w) in quad_points(mesh.vertices(e)) {
            let fw = f(xy[0], xy[1]) * w * area;
            for k in 0..3 {
                b[el[k]] += fw * l[k];
            }
        }
    }
    b
}

/// `||u_h - exact||_{L2}` by quadrature.
pub fn l2_error<F: Fn(f64, f64) -> f64>(mesh: &TriMesh, geometry: &[ElementGeometry], uh: &[f64], exact: F) -> f64 {
    let mut s = 0.0;
    for (e, el) in mesh.elements.iter().enumerate() {
        let area = geometry[e].area;
        for (l, xy, w) in quad_points(mesh.vertices(e)) {
            let approx = l[0] * uh[el[0]] + l[1] * uh[el[1]] + l[2] * uh[el[2]];
            let d = approx - exact(xy[0], xy[1]);
            s += d * d * w * area;
        }
    }
    s.sqrt()
}

/// One level of the manufactured-solution study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLevel {
    pub cells: usize,
    pub h: f64,
    pub l2_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsReport {
    pub mu: f64,
    pub levels: Vec<MmsLevel>,
}

impl MmsReport {
    /// Observed orders `log2(e_k / e_{k+1})` between successive levels.
    pub fn orders(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| (w[0].l2_error / w[1].l2_error).ln() / (w[0].h / w[1].h).ln())
            .collect()
    }
}

/// Solves `-Lap u + mu u = f` on `[-1, 1]^2` with zero normal flux for the
/// exact solution `cos(pi x) cos(pi y)` on meshes `start, 2 start, ...`.
pub fn mms_study(start_cells: usize, levels: usize, mu: f64, exec: ExecPolicy) -> Result<MmsReport, SolveError> {
    use std::f64::consts::PI;
    let exact = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos();
    let forcing = |x: f64, y: f64| (2.0 * PI * PI + mu) * exact(x, y);
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let n = start_cells << k;
        let mesh = crate::mesh::build_rect_mesh(n, n, crate::mesh::Rect::UNIT_SQUARE).expect("valid mesh");
        let ops = AssembledOperators::new(&mesh, exec);
        let a = ops.stiffness.linear_combination(1.0, &ops.mass, mu);
        let b = load_vector(&mesh, &ops.geometry, forcing);
        let opts = SolverOptions {
            tol: 1e-12,
            max_iter: None,
            exec,
        };
        let (uh, rep) = solve_cg(&a, &b, &opts)?;
        out.push(MmsLevel {
            cells: n,
            h: mesh.h,
            l2_error: l2_error(&mesh, &ops.geometry, &uh, exact),
            iterations: rep.iterations,
        });
    }
    Ok(MmsReport { mu, levels: out })
}
