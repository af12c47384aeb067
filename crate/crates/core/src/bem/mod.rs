//! Boundary elements for closed homogeneous bodies.
//!
//! Surfaces are flat triangle meshes; tangential E- and H-type surface
//! currents are expanded in RWG edge functions and the operators are
//! tested in the Galerkin sense. See [`assembly`] for the block layout.

pub mod assembly;
pub mod energy;
pub mod force;
pub mod integrals;
pub mod mesh;

pub use assembly::{assemble_grs, assemble_mr, KernelMatrix, Layout, QuadratureLevels, Representation, System};
pub use energy::{
    energy_term, free_energy, hamiltonian_energy_term, region_energy_term, surface_energy_term, EnergyResult,
    RegionEnergy, Route,
};
pub use force::{force_fd, force_fd_term, force_trace, force_trace_total, self_force_trace};
pub use mesh::{make_box_mesh, make_plate_mesh, make_sphere_mesh, parse_mesh, read_mesh, BodyMesh, Panel};
