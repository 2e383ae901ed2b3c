//! Kinetic building blocks: macroscopic states, Juttner moments and quadrature.

pub mod moments;
pub mod quadrature;
pub mod state;

pub use moments::{
    equilibrium_moment, half_space_flux, interface_equilibrium, juttner_moments, landau_recovery, moment_matrix, Dim,
    MomentTensor,
};
pub use quadrature::{AngularQuadrature, Half, Juttner, Node, QuadratureLadder, QuadratureOrder};
pub use state::{
    characteristic_speeds, conserved_from_primitive, conserved_jacobian, euler_flux, momentum_slot,
    primitive_from_conserved, spectral_radius, Axis, Conserved, Primitive, SOUND_SPEED_SQ,
};
