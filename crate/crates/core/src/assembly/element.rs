//! Element matrices of the stretched piezoelectric weak forms.

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::basis::LagrangeRule;
use crate::geometry::{DampingProfile, SubregionMesh};
use crate::linalg::{SparseComplexMatrix, TripletBuilder};
use crate::model::MaterialSet;

/// Which bilinear forms enter the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Forms {
    pub stiffness: bool,
    pub mass: bool,
    pub coupling: bool,
    pub dielectric: bool,
}

impl Forms {
    pub const ALL: Self = Self {
        stiffness: true,
        mass: true,
        coupling: true,
        dielectric: true,
    };
    pub const STIFFNESS: Self = Self {
        stiffness: true,
        mass: false,
        coupling: false,
        dielectric: false,
    };
    pub const MASS: Self = Self {
        stiffness: false,
        mass: true,
        coupling: false,
        dielectric: false,
    };
}

/// Tensor-product quadrature data shared by all elements of one mesh.
struct Reference {
    rules: [LagrangeRule; 3],
    npe: usize,
}

impl Reference {
    fn new(order: [usize; 3]) -> Self {
        let rules = order.map(LagrangeRule::new);
        let npe = order.iter().map(|p| p + 1).product();
        Self { rules, npe }
    }

    fn local(&self, a: usize) -> [usize; 3] {
        let n1 = self.rules[0].order + 1;
        let n2 = self.rules[1].order + 1;
        [a % n1, (a / n1) % n2, a / (n1 * n2)]
    }
}

/// Dense element matrix in local numbering: displacement `3a + i`, then
/// potential `3·npe + a` when `with_potential`.
#[allow(clippy::too_many_arguments)]
fn element_matrix(
    mesh: &SubregionMesh,
    reference: &Reference,
    e: usize,
    mat: &MaterialSet,
    omega: f64,
    profile: &DampingProfile,
    forms: Forms,
    with_potential: bool,
) -> Vec<C> {
    let npe = reference.npe;
    let ndof = if with_potential { 4 * npe } else { 3 * npe };
    let mut ke = vec![C::new(0.0, 0.0); ndof * ndof];
    let (lo, hi) = mesh.element_box(e);
    let h = [0, 1, 2].map(|d| hi[d] - lo[d]);
    let det = h[0] * h[1] * h[2] / 8.0;
    let [r1, r2, r3] = &reference.rules;
    let locals: Vec<[usize; 3]> = (0..npe).map(|a| reference.local(a)).collect();
    let mut n = vec![0.0; npe];
    let mut g = vec![[C::new(0.0, 0.0); 3]; npe];
    let w2rho = omega * omega * mat.rho;
    let eps = mat.eps.unwrap_or([[0.0; 3]; 3]);
    for q3 in 0..r3.points.len() {
        for q2 in 0..r2.points.len() {
            for q1 in 0..r1.points.len() {
                let q = [q1, q2, q3];
                let xi = [r1.points[q1], r2.points[q2], r3.points[q3]];
                let x = [0, 1, 2].map(|d| lo[d] + 0.5 * (xi[d] + 1.0) * h[d]);
                let alpha = profile.stretch(x).0;
                let w = C::from(r1.weights[q1] * r2.weights[q2] * r3.weights[q3] * det)
                    * alpha[0]
                    * alpha[1]
                    * alpha[2];
                for (a, la) in locals.iter().enumerate() {
                    let v = [0, 1, 2].map(|d| reference.rules[d].values[q[d]][la[d]]);
                    let dv = [0, 1, 2].map(|d| reference.rules[d].derivs[q[d]][la[d]] * 2.0 / h[d]);
                    n[a] = v[0] * v[1] * v[2];
                    g[a] = [
                        C::from(dv[0] * v[1] * v[2]) / alpha[0],
                        C::from(v[0] * dv[1] * v[2]) / alpha[1],
                        C::from(v[0] * v[1] * dv[2]) / alpha[2],
                    ];
                }
                for a in 0..npe {
                    for b in 0..npe {
                        let ga = &g[a];
                        let gb = &g[b];
                        let mut p = [[C::new(0.0, 0.0); 3]; 3];
                        for j in 0..3 {
                            for k in 0..3 {
                                p[j][k] = ga[j] * gb[k] * w;
                            }
                        }
                        if forms.stiffness {
                            for i in 0..3 {
                                for l in 0..3 {
                                    let mut acc = C::new(0.0, 0.0);
                                    for j in 0..3 {
                                        for k in 0..3 {
                                            let c = mat.c[i][j][k][l];
                                            if c != 0.0 {
                                                acc += p[j][k] * c;
                                            }
                                        }
                                    }
                                    ke[(3 * a + i) * ndof + 3 * b + l] += acc;
                                }
                            }
                        }
                        if forms.mass {
                            let m = w * (w2rho * n[a] * n[b]);
                            for i in 0..3 {
                                ke[(3 * a + i) * ndof + 3 * b + i] -= m;
                            }
                        }
                        if with_potential {
                            let pb = 3 * npe + b;
                            if forms.coupling {
                                // row (a, i), column potential b: e_kij ∂_k N_b ∂_j N_a
                                for i in 0..3 {
                                    let mut acc = C::new(0.0, 0.0);
                                    for j in 0..3 {
                                        for k in 0..3 {
                                            let ekij = mat.e[k][i][j];
                                            if ekij != 0.0 {
                                                acc += p[j][k] * ekij;
                                            }
                                        }
                                    }
                                    ke[(3 * a + i) * ndof + pb] += acc;
                                    ke[pb * ndof + 3 * a + i] += acc;
                                }
                            }
                            if forms.dielectric {
                                let pa = 3 * npe + a;
                                let mut acc = C::new(0.0, 0.0);
                                for i in 0..3 {
                                    for k in 0..3 {
                                        if eps[i][k] != 0.0 {
                                            acc += p[i][k] * eps[i][k];
                                        }
                                    }
                                }
                                ke[pa * ndof + pb] -= acc;
                            }
                        }
                    }
                }
            }
        }
    }
    ke
}

/// Assembles the operator over every nodal DOF of `mesh` without any
/// boundary elimination: displacement `3·node + i`, then potential
/// `3·n_nodes + node` for piezoelectric subregions.
pub fn assemble_full(
    mesh: &SubregionMesh,
    mat: &MaterialSet,
    omega: f64,
    profile: &DampingProfile,
    forms: Forms,
) -> Result<SparseComplexMatrix> {
    let with_potential = mesh.piezoelectric;
    let nn = mesh.n_nodes();
    let dim = if with_potential { 4 * nn } else { 3 * nn };
    let reference = Reference::new(mesh.order);
    let npe = reference.npe;
    let ndof = if with_potential { 4 * npe } else { 3 * npe };
    let blocks: Vec<(Vec<usize>, Vec<C>)> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|e| {
            let mut nodes = Vec::with_capacity(npe);
            mesh.element_nodes(e, &mut nodes);
            let mut map = Vec::with_capacity(ndof);
            for &node in &nodes {
                map.extend((0..3).map(|i| 3 * node + i));
            }
            if with_potential {
                map.extend(nodes.iter().map(|&node| 3 * nn + node));
            }
            let ke = element_matrix(
                mesh,
                &reference,
                e,
                mat,
                omega,
                profile,
                forms,
                with_potential,
            );
            (map, ke)
        })
        .collect();
    let mut builder = TripletBuilder::with_capacity(dim, blocks.len() * ndof * ndof);
    for (map, ke) in &blocks {
        for (r, &gr) in map.iter().enumerate() {
            for (c, &gc) in map.iter().enumerate() {
                let v = ke[r * ndof + c];
                if v != C::new(0.0, 0.0) {
                    builder.add(gr, gc, v);
                }
            }
        }
    }
    let k = builder.build(true);
    if !k.all_finite() {
        return Err(Error::NonFinite("subregion operator"));
    }
    Ok(k)
}
