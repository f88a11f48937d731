//! Tensor-product hexahedral meshes for the four subregion types.

use super::GeometrySpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubregionKind {
    /// Left PML column with its bottom corner.
    Left,
    /// Substrate unit cell with the bottom PML strip below it.
    Cell,
    Electrode,
    /// Right PML column with its bottom corner.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Top,
    Right,
    Bottom,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "l",
            Side::Top => "t",
            Side::Right => "r",
            Side::Bottom => "b",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    X1Min,
    X1Max,
    X2Min,
    X2Max,
    X3Min,
    X3Max,
}

/// Free-DOF numbering: all free displacement DOFs (node-major, three
/// components) first, then all free potential DOFs.
#[derive(Clone, Debug)]
pub struct DofMap {
    u: Vec<Option<usize>>,
    phi: Vec<Option<usize>>,
    n_u_free: usize,
    n_free: usize,
}

impl DofMap {
    /// Component 0..3 is displacement, 3 is potential.
    pub fn free(&self, node: usize, comp: usize) -> Option<usize> {
        if comp < 3 {
            self.u[3 * node + comp]
        } else {
            self.phi.get(node).copied().flatten()
        }
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn n_u_free(&self) -> usize {
        self.n_u_free
    }

    pub fn has_potential(&self) -> bool {
        !self.phi.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct SubregionMesh {
    pub kind: SubregionKind,
    /// Node coordinates along each axis, scaled length units.
    pub axes: [Vec<f64>; 3],
    pub order: [usize; 3],
    pub piezoelectric: bool,
    pub exterior_faces: Vec<Face>,
    exterior: Vec<bool>,
    contact: Vec<bool>,
    dofs: DofMap,
}

impl SubregionMesh {
    fn new(
        kind: SubregionKind,
        axes: [Vec<f64>; 3],
        order: [usize; 3],
        exterior_faces: Vec<Face>,
        contact_x1: Option<(usize, usize)>,
    ) -> Self {
        let piezoelectric = kind != SubregionKind::Electrode;
        let n = [axes[0].len(), axes[1].len(), axes[2].len()];
        let nn = n[0] * n[1] * n[2];
        let mut exterior = vec![false; nn];
        let mut contact = vec![false; nn];
        for i3 in 0..n[2] {
            for i2 in 0..n[1] {
                for i1 in 0..n[0] {
                    let id = i1 + n[0] * (i2 + n[1] * i3);
                    exterior[id] = exterior_faces.iter().any(|f| match f {
                        Face::X1Min => i1 == 0,
                        Face::X1Max => i1 == n[0] - 1,
                        Face::X2Min => i2 == 0,
                        Face::X2Max => i2 == n[1] - 1,
                        Face::X3Min => i3 == 0,
                        Face::X3Max => i3 == n[2] - 1,
                    });
                    if let Some((lo, hi)) = contact_x1 {
                        contact[id] = i3 == n[2] - 1 && (lo..=hi).contains(&i1);
                    }
                }
            }
        }
        let mut u = vec![None; 3 * nn];
        let mut next = 0;
        for node in 0..nn {
            if !exterior[node] {
                for c in 0..3 {
                    u[3 * node + c] = Some(next);
                    next += 1;
                }
            }
        }
        let n_u_free = next;
        let mut phi = Vec::new();
        if piezoelectric {
            phi = vec![None; nn];
            for node in 0..nn {
                if !exterior[node] && !contact[node] {
                    phi[node] = Some(next);
                    next += 1;
                }
            }
        }
        Self {
            kind,
            axes,
            order,
            piezoelectric,
            exterior_faces,
            exterior,
            contact,
            dofs: DofMap {
                u,
                phi,
                n_u_free,
                n_free: next,
            },
        }
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.axes[0].len(), self.axes[1].len(), self.axes[2].len()]
    }

    pub fn n_nodes(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn node_id(&self, i1: usize, i2: usize, i3: usize) -> usize {
        let n = self.counts();
        i1 + n[0] * (i2 + n[1] * i3)
    }

    pub fn node_indices(&self, node: usize) -> [usize; 3] {
        let n = self.counts();
        [node % n[0], (node / n[0]) % n[1], node / (n[0] * n[1])]
    }

    pub fn coords(&self, node: usize) -> [f64; 3] {
        let [i1, i2, i3] = self.node_indices(node);
        [self.axes[0][i1], self.axes[1][i2], self.axes[2][i3]]
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    /// Displacement plus, for piezoelectric subregions, potential.
    pub fn components(&self) -> usize {
        if self.piezoelectric {
            4
        } else {
            3
        }
    }

    pub fn is_exterior(&self, node: usize) -> bool {
        self.exterior[node]
    }

    pub fn is_contact(&self, node: usize) -> bool {
        self.contact[node]
    }

    pub fn has_contact(&self) -> bool {
        self.contact.iter().any(|&c| c)
    }

    pub fn element_counts(&self) -> [usize; 3] {
        let n = self.counts();
        [0, 1, 2].map(|d| (n[d] - 1) / self.order[d])
    }

    pub fn n_elements(&self) -> usize {
        self.element_counts().iter().product()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.order.iter().map(|p| p + 1).product()
    }

    /// Node ids of element `e`, local index `a1 + (p1+1)(a2 + (p2+1)a3)`.
    pub fn element_nodes(&self, e: usize, out: &mut Vec<usize>) {
        let ne = self.element_counts();
        let [p1, p2, p3] = self.order;
        let (e1, e2, e3) = (e % ne[0], (e / ne[0]) % ne[1], e / (ne[0] * ne[1]));
        out.clear();
        for a3 in 0..=p3 {
            for a2 in 0..=p2 {
                for a1 in 0..=p1 {
                    out.push(self.node_id(e1 * p1 + a1, e2 * p2 + a2, e3 * p3 + a3));
                }
            }
        }
    }

    /// Lower and upper corners of element `e`.
    pub fn element_box(&self, e: usize) -> ([f64; 3], [f64; 3]) {
        let ne = self.element_counts();
        let idx = [e % ne[0], (e / ne[0]) % ne[1], e / (ne[0] * ne[1])];
        let lo = [0, 1, 2].map(|d| self.axes[d][idx[d] * self.order[d]]);
        let hi = [0, 1, 2].map(|d| self.axes[d][(idx[d] + 1) * self.order[d]]);
        (lo, hi)
    }

    /// Interface nodes of `side` in ascending (x3, x2, x1) order.
    pub fn interface_nodes(&self, side: Side) -> Result<Vec<usize>> {
        let n = self.counts();
        let select: Box<dyn Fn(usize) -> bool> = match (self.kind, side) {
            (SubregionKind::Cell, Side::Left) | (SubregionKind::Right, Side::Left) => {
                Box::new(move |node| self.node_indices(node)[0] == 0)
            }
            (SubregionKind::Cell, Side::Right) | (SubregionKind::Left, Side::Right) => {
                Box::new(move |node| self.node_indices(node)[0] == n[0] - 1)
            }
            (SubregionKind::Cell, Side::Top) => Box::new(move |node| self.contact[node]),
            (SubregionKind::Electrode, Side::Bottom) => {
                Box::new(move |node| self.node_indices(node)[2] == 0)
            }
            _ => return Err(Error::InvalidSide(side.name())),
        };
        Ok((0..self.n_nodes()).filter(|&node| select(node)).collect())
    }

    /// Free DOF indices on `side`, node by node, components in order.
    pub fn interface_dofs(&self, side: Side) -> Result<Vec<usize>> {
        let comps = if side == Side::Top || side == Side::Bottom {
            3
        } else {
            self.components()
        };
        let mut out = Vec::new();
        for node in self.interface_nodes(side)? {
            for c in 0..comps {
                if let Some(i) = self.dofs.free(node, c) {
                    out.push(i);
                }
            }
        }
        Ok(out)
    }

    /// Coordinate of every free DOF along direction `d`.
    pub fn dof_coordinates(&self, d: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dofs.n_free];
        for node in 0..self.n_nodes() {
            for c in 0..self.components() {
                if let Some(i) = self.dofs.free(node, c) {
                    x[i] = self.coords(node)[d];
                }
            }
        }
        x
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Substrate x3 axis: bottom PML nodes, then substrate nodes above them.
fn vertical_axis(g: &GeometrySpec, unit: f64) -> Vec<f64> {
    let h = g.depth * unit;
    let d = g.pml_thickness * unit;
    let mut z = linspace(-h - d, -h, g.pml_nodes);
    z.extend(linspace(-h, 0.0, g.substrate_nodes[2]).into_iter().skip(1));
    z
}

/// Unit-cell substrate mesh (with its bottom PML strip) and the electrode
/// mesh centred on its top face. `unit` converts µm to mesh units.
pub fn build_unit_cell(g: &GeometrySpec, unit: f64) -> Result<(SubregionMesh, SubregionMesh)> {
    g.validate()?;
    let x1 = linspace(0.0, g.pitch * unit, g.substrate_nodes[0]);
    let x2 = linspace(0.0, g.width * unit, g.substrate_nodes[1]);
    let k = g.electrode_offset()?;
    let footprint = (k, k + g.electrode_nodes[0] - 1);
    let cell = SubregionMesh::new(
        SubregionKind::Cell,
        [x1.clone(), x2.clone(), vertical_axis(g, unit)],
        g.order,
        vec![Face::X3Min],
        Some(footprint),
    );
    let e1 = x1[footprint.0..=footprint.1].to_vec();
    let e3 = linspace(0.0, g.electrode_height * unit, g.electrode_nodes[2]);
    let electrode = SubregionMesh::new(
        SubregionKind::Electrode,
        [e1, x2, e3],
        g.order,
        vec![],
        None,
    );
    Ok((cell, electrode))
}

/// Left or right PML column for a device of `cells` unit blocks.
pub fn build_side_block(
    side: Side,
    g: &GeometrySpec,
    cells: usize,
    unit: f64,
) -> Result<SubregionMesh> {
    g.validate()?;
    let d = g.pml_thickness * unit;
    let (kind, x1, faces) = match side {
        Side::Left => (
            SubregionKind::Left,
            linspace(-d, 0.0, g.pml_nodes),
            vec![Face::X1Min, Face::X3Min],
        ),
        Side::Right => {
            let x = cells as f64 * g.pitch * unit;
            (
                SubregionKind::Right,
                linspace(x, x + d, g.pml_nodes),
                vec![Face::X1Max, Face::X3Min],
            )
        }
        other => return Err(Error::InvalidSide(other.name())),
    };
    let x2 = linspace(0.0, g.width * unit, g.substrate_nodes[1]);
    let order = g.order;
    Ok(SubregionMesh::new(
        kind,
        [x1, x2, vertical_axis(g, unit)],
        order,
        faces,
        None,
    ))
}
