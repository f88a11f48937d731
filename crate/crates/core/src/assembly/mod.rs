//! Finite element assembly of subregion operators and Dirichlet lifts.

pub mod element;

use std::sync::OnceLock;

use num_complex::Complex64 as C;

pub use element::{assemble_full, Forms};

use crate::error::{Error, Result};
use crate::geometry::{DampingProfile, SubregionKind, SubregionMesh};
use crate::linalg::{
    sparse_factorize, CMat, FactorizationHandle, SparseComplexMatrix, TripletBuilder,
};
use crate::model::MaterialSet;

/// Complex symmetric operator of one subregion over its free DOFs, with
/// the load produced by a unit potential on the electrode contact.
#[derive(Debug)]
pub struct SubregionSystem {
    pub kind: SubregionKind,
    pub k: SparseComplexMatrix,
    unit_lift: Option<Vec<C>>,
    factor: OnceLock<FactorizationHandle>,
}

impl SubregionSystem {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Factorization of `K`, built on first use.
    pub fn factorization(&self) -> Result<&FactorizationHandle> {
        if let Some(f) = self.factor.get() {
            return Ok(f);
        }
        let f = sparse_factorize(&self.k)?;
        Ok(self.factor.get_or_init(|| f))
    }

    pub fn solve(&self, b: &[C]) -> Result<Vec<C>> {
        Ok(self.factorization()?.solve(b))
    }

    pub fn solve_columns(&self, b: &CMat) -> Result<CMat> {
        Ok(self.factorization()?.solve_columns(b))
    }

    pub fn has_contact(&self) -> bool {
        self.unit_lift.is_some()
    }

    /// Load vector `F = −K_fc·g` for the lift `g = φ0` on the contact.
    pub fn lift(&self, phi0: f64) -> Result<Vec<C>> {
        let unit = self.unit_lift.as_ref().ok_or(Error::MissingContact)?;
        Ok(unit.iter().map(|v| v * phi0).collect())
    }
}

/// Full-numbering index of every nodal DOF, and its free index if any.
fn full_to_free(mesh: &SubregionMesh) -> Vec<Option<usize>> {
    let nn = mesh.n_nodes();
    let dofs = mesh.dofs();
    let mut map: Vec<Option<usize>> = (0..3 * nn).map(|g| dofs.free(g / 3, g % 3)).collect();
    if mesh.piezoelectric {
        map.extend((0..nn).map(|node| dofs.free(node, 3)));
    }
    map
}

/// Eliminates Dirichlet DOFs from a fully numbered operator.
pub fn reduce(mesh: &SubregionMesh, full: &SparseComplexMatrix) -> SubregionSystem {
    let nn = mesh.n_nodes();
    let map = full_to_free(mesh);
    let n_free = mesh.dofs().n_free();
    let mut builder = TripletBuilder::with_capacity(n_free, full.nnz());
    let contact = mesh.has_contact();
    let mut lift = vec![C::new(0.0, 0.0); n_free];
    for (r, c, v) in full.iter() {
        let Some(fr) = map[r] else { continue };
        match map[c] {
            Some(fc) => builder.add(fr, fc, v),
            None => {
                if c >= 3 * nn && mesh.is_contact(c - 3 * nn) && !mesh.is_exterior(c - 3 * nn) {
                    lift[fr] -= v;
                }
            }
        }
    }
    SubregionSystem {
        kind: mesh.kind,
        k: builder.build(true),
        unit_lift: contact.then_some(lift),
        factor: OnceLock::new(),
    }
}

/// Operator of a piezoelectric subregion (unit cell or side block).
pub fn assemble_piezo(
    mesh: &SubregionMesh,
    mat: &MaterialSet,
    omega: f64,
    profile: &DampingProfile,
) -> Result<SubregionSystem> {
    if !mesh.piezoelectric {
        return Err(Error::Config(
            "piezoelectric assembly on an electrode mesh".into(),
        ));
    }
    let full = assemble_full(mesh, mat, omega, profile, Forms::ALL)?;
    Ok(reduce(mesh, &full))
}

/// Elastic operator `K_uu − M_uu` of an electrode.
pub fn assemble_electrode(
    mesh: &SubregionMesh,
    mat: &MaterialSet,
    omega: f64,
) -> Result<SubregionSystem> {
    if mesh.piezoelectric {
        return Err(Error::Config(
            "electrode assembly on a piezoelectric mesh".into(),
        ));
    }
    let full = assemble_full(mesh, mat, omega, &DampingProfile::none(), Forms::ALL)?;
    Ok(reduce(mesh, &full))
}

/// Load vector for potential `phi0` on the contact of `system`.
pub fn dirichlet_lift(system: &SubregionSystem, phi0: f64) -> Result<Vec<C>> {
    system.lift(phi0)
}
