//! Structured meshes of the four subregion types and PML damping.

pub mod basis;
pub mod damping;
pub mod mesh;

use serde::{Deserialize, Serialize};

pub use damping::{damping, stretch, DampingProfile, DampingShape, PmlRegion, StretchFactors};
pub use mesh::{
    build_side_block, build_unit_cell, DofMap, Face, Side, SubregionKind, SubregionMesh,
};

use crate::error::{Error, Result};

/// Device dimensions (µm), node counts and element orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    /// Unit-block length along the periodic direction x1.
    pub pitch: f64,
    /// Extent along x2.
    pub width: f64,
    /// Substrate depth along x3, excluding the bottom PML.
    pub depth: f64,
    pub electrode_width: f64,
    pub electrode_height: f64,
    pub pml_thickness: f64,
    /// Substrate node counts (x1, x2, x3), bottom PML excluded.
    pub substrate_nodes: [usize; 3],
    pub electrode_nodes: [usize; 3],
    /// Node count across every PML layer.
    pub pml_nodes: usize,
    /// Lagrange order per direction.
    pub order: [usize; 3],
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            pitch: 1.0,
            width: 0.1,
            depth: 10.0,
            electrode_width: 0.5,
            electrode_height: 0.15,
            pml_thickness: 2.0,
            substrate_nodes: [17, 2, 17],
            electrode_nodes: [9, 2, 5],
            pml_nodes: 5,
            order: [2, 1, 2],
        }
    }
}

impl GeometrySpec {
    /// Small geometry with the given substrate and electrode grids, sized
    /// so the electrode spans half the pitch.
    pub fn small(
        substrate_nodes: [usize; 3],
        electrode_nodes: [usize; 3],
        pml_nodes: usize,
        order: [usize; 3],
    ) -> Self {
        let cells = (substrate_nodes[0] - 1) as f64;
        let electrode_cells = (electrode_nodes[0] - 1) as f64;
        let pitch = 1.0;
        Self {
            pitch,
            width: 0.1,
            depth: 2.0,
            electrode_width: pitch * electrode_cells / cells,
            electrode_height: 0.15,
            pml_thickness: 1.0,
            substrate_nodes,
            electrode_nodes,
            pml_nodes,
            order,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("pitch", self.pitch),
            ("width", self.width),
            ("depth", self.depth),
            ("electrode_width", self.electrode_width),
            ("electrode_height", self.electrode_height),
            ("pml_thickness", self.pml_thickness),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        for (d, &p) in self.order.iter().enumerate() {
            if !(1..=3).contains(&p) {
                return Err(Error::Resolution(format!(
                    "element order {p} in direction {} not in 1..=3",
                    d + 1
                )));
            }
        }
        for d in 0..3 {
            tiles(self.substrate_nodes[d], self.order[d], "substrate")?;
            tiles(self.electrode_nodes[d], self.order[d], "electrode")?;
        }
        tiles(self.pml_nodes, self.order[0], "PML (x1)")?;
        tiles(self.pml_nodes, self.order[2], "PML (x3)")?;
        if self.electrode_nodes[1] != self.substrate_nodes[1] {
            return Err(Error::Resolution(format!(
                "electrode has {} nodes along x2 but the substrate has {}",
                self.electrode_nodes[1], self.substrate_nodes[1]
            )));
        }
        self.electrode_offset().map(|_| ())
    }

    /// Index of the first substrate x1 node under the electrode.
    pub fn electrode_offset(&self) -> Result<usize> {
        let h = self.pitch / (self.substrate_nodes[0] - 1) as f64;
        let he = self.electrode_width / (self.electrode_nodes[0] - 1) as f64;
        if (h - he).abs() > 1e-9 * h {
            return Err(Error::Resolution(format!(
                "electrode x1 spacing {he} µm differs from substrate spacing {h} µm"
            )));
        }
        let k = 0.5 * (self.pitch - self.electrode_width) / h;
        let kr = k.round();
        if (k - kr).abs() > 1e-9 || kr < 1.0 {
            return Err(Error::Resolution(
                "centred electrode must start on a substrate node strictly inside the cell".into(),
            ));
        }
        Ok(kr as usize)
    }
}

fn tiles(count: usize, order: usize, what: &str) -> Result<()> {
    if count < 2 || !(count - 1).is_multiple_of(order) {
        return Err(Error::Resolution(format!(
            "{what}: {count} nodes cannot be tiled by order-{order} elements"
        )));
    }
    Ok(())
}
