//! Interface fluxes: the genuine BGK flux, the slope-free BGK-type flux and KFVS.

pub mod kinetics;
pub mod relax;
pub mod schemes;
pub mod time;

pub use kinetics::{slope_coefficients, CenterKinetics, Deviation, InterfaceKinetics, PsiPoly, SideKinetics};
pub use relax::relaxation_flux;
pub use schemes::{
    bgk_interface_flux, bgk_type_flux, collision_time, euler_interface_kinetics, kfvs_flux, CollisionParams,
    InterfaceData, Scheme,
};
