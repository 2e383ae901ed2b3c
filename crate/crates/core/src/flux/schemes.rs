//! The three interface flux functions and the collision-time model.

use super::kinetics::{slope_coefficients, CenterKinetics, Deviation, InterfaceKinetics, SideKinetics};
use super::relax::relaxation_flux;
use crate::error::Result;
use crate::kinetic::{half_space_flux, interface_equilibrium, AngularQuadrature, Conserved, Dim, Half, Primitive};
use serde::{Deserialize, Serialize};

/// Flux function used at cell interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Genuine BGK flux with space and time Taylor terms.
    Bgk,
    /// Relaxation flux without slope terms.
    #[serde(alias = "bgktype", alias = "bgk_type")]
    BgkType,
    /// Kinetic flux vector splitting (free transport only).
    Kfvs,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bgk" => Ok(Scheme::Bgk),
            "bgk-type" | "bgktype" | "bgk_type" => Ok(Scheme::BgkType),
            "kfvs" => Ok(Scheme::Kfvs),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// Parameters of tau = tau_m + C2 dt^alpha |pL - pR| / (pL + pR).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionParams {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    /// Shear viscosity; when set, tau_m = 5 mu / (4 p) instead of C1 dt^alpha.
    pub viscosity: Option<f64>,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams { c1: 0.001, c2: 1.5, alpha: 1.0, viscosity: None }
    }
}

/// Collision time at an interface from the two trace pressures.
pub fn collision_time(p_left: f64, p_right: f64, dt: f64, params: &CollisionParams) -> f64 {
    let scale = dt.powf(params.alpha);
    let base = match params.viscosity {
        Some(mu) => 5.0 * mu / (2.0 * (p_left + p_right)),
        None => params.c1 * scale,
    };
    base + params.c2 * scale * (p_left - p_right).abs() / (p_left + p_right)
}

/// Reconstructed data at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceData {
    pub left: Primitive,
    pub right: Primitive,
    /// (dW/dx, dW/dy) of the cell on the left.
    pub left_slopes: [Conserved; 2],
    pub right_slopes: [Conserved; 2],
    /// (dW/dx, dW/dy) of the equilibrium across the interface.
    pub center_slopes: [Conserved; 2],
}

impl InterfaceData {
    /// Data with all slopes zero.
    pub fn flat(left: Primitive, right: Primitive) -> Self {
        InterfaceData {
            left,
            right,
            left_slopes: [[0.0; 4]; 2],
            right_slopes: [[0.0; 4]; 2],
            center_slopes: [[0.0; 4]; 2],
        }
    }
}

pub(crate) fn recovery_dim(quad: &AngularQuadrature) -> Dim {
    if quad.is_planar() {
        Dim::Two
    } else {
        Dim::One
    }
}

/// KFVS: upwinded half-space moments of the two trace equilibria.
pub fn kfvs_flux(quad: &AngularQuadrature, left: &Primitive, right: &Primitive) -> Conserved {
    let a = half_space_flux(left, quad, Half::Positive);
    let b = half_space_flux(right, quad, Half::Negative);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Relaxation flux with flat initial data and a flat equilibrium.
pub fn bgk_type_flux(
    quad: &AngularQuadrature,
    left: &Primitive,
    right: &Primitive,
    tau: f64,
    dt: f64,
) -> Result<Conserved> {
    let g0 = interface_equilibrium(left, right, quad, recovery_dim(quad))?;
    let flat = |s: &Primitive| SideKinetics { state: *s, a: [0.0; 4], b: [0.0; 4], deviation: Deviation::default() };
    let kin = InterfaceKinetics {
        left: flat(left),
        right: flat(right),
        center: CenterKinetics { state: g0, a: [0.0; 4], b: [0.0; 4], big_a: [0.0; 4] },
    };
    Ok(relaxation_flux::<1>(quad, &kin, tau, dt)[0])
}

/// Kinetic description of an Euler interface; `g0` may be supplied when already known.
pub fn euler_interface_kinetics(
    quad: &AngularQuadrature,
    data: &InterfaceData,
    g0: Option<Primitive>,
) -> Result<InterfaceKinetics> {
    let g0 = match g0 {
        Some(g) => g,
        None => interface_equilibrium(&data.left, &data.right, quad, recovery_dim(quad))?,
    };
    let side = |s: &Primitive, sl: &[Conserved; 2]| -> Result<SideKinetics> {
        let (a, b, big_a) = slope_coefficients(s, &sl[0], &sl[1])?;
        Ok(SideKinetics { state: *s, a, b, deviation: Deviation::from_taylor(&big_a, &a, &b) })
    };
    let (a0, b0, big_a0) = slope_coefficients(&g0, &data.center_slopes[0], &data.center_slopes[1])?;
    Ok(InterfaceKinetics {
        left: side(&data.left, &data.left_slopes)?,
        right: side(&data.right, &data.right_slopes)?,
        center: CenterKinetics { state: g0, a: a0, b: b0, big_a: big_a0 },
    })
}

/// Genuine BGK flux from the analytic interface solution.
pub fn bgk_interface_flux(
    quad: &AngularQuadrature,
    data: &InterfaceData,
    g0: Option<Primitive>,
    tau: f64,
    dt: f64,
) -> Result<Conserved> {
    let kin = euler_interface_kinetics(quad, data, g0)?;
    Ok(relaxation_flux::<1>(quad, &kin, tau, dt)[0])
}
