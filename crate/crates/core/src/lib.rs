//! Semiclassical dynamics of a single ion in Paul, Penning and combined
//! quadrupole traps.
//!
//! The ion's axial and radial motion is restricted to a product of SU(1,1)
//! coherent states labelled by two points of the unit disk. The classical
//! Hamiltonian is the coherent-state expectation of the quantum one
//! ([`husimi`]), and the variational equations of motion ([`dynamics`]) are
//! Hamilton's equations for the disk Poisson bracket ([`su11`]). A truncated
//! Fock-space model ([`fock`]) provides the quantum reference.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod husimi;
pub mod ode;
pub mod su11;
pub mod trap;

pub use dynamics::{
    eom_rhs, integrate, monodromy, stability_scan, IntegratorConfig, IntegratorScheme, MonodromyReport, Sampling,
    ScanCell, StabilityMap, StabilityVerdict, TdvpModel, TrajectoryState,
};
pub use error::{Error, Result};
pub use husimi::{
    h2k_polynomial, husimi_coefficients, husimi_gradient, husimi_value, AnharmonicSpec, HusimiCoefficients,
};
pub use su11::{
    expect_generators, poisson_bracket, symplectic_form, xi_eta, CsPoint, GeneratorExpectations, Wirtinger, XiEta,
};
pub use trap::{
    alpha_beta, bargmann_indices, mathieu_parameters, potential_coefficient, stiffness, AxialSector,
    DimensionlessScheme, MathieuParameters, Mode, ReducedTrap, StiffnessSample, TrapConfig, TrapKind, TrapParams,
};

pub use num_complex::Complex64;
