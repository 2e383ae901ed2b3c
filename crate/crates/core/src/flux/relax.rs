//! Step-averaged moments of the interface distribution f-hat.
//!
//! f-hat = (1 - e^{-nu t}) g0 + ((t + 1/nu) e^{-nu t} - 1/nu) (a0 v1 + b0 v2) g0
//!       + (t - (1 - e^{-nu t}) / nu) A0 g0
//!       + H[v_k] e^{-nu_L t} g_L (1 - tau phi_L / (U_L.p) - (a_L v1 + b_L v2) t)
//!       + H[-v_k] e^{-nu_R t} g_R (1 - tau phi_R / (U_R.p) - (a_R v1 + b_R v2) t)
//!
//! with nu = (U.p) / (p^0 tau) evaluated for each Juttner state.

use super::kinetics::{split_poly, InterfaceKinetics, SideKinetics};
use super::time::StepRelaxation;
use crate::kinetic::quadrature::psi_angular;
use crate::kinetic::{AngularQuadrature, Half, Juttner, Node};

/// Step-averaged flux blocks (1/dt) \int\int Psi p^k w^a f-hat dXi dt for a = 0..B.
///
/// Block 0 is the ordinary conservative flux; blocks 1 and 2 carry the extra
/// factor v^a = p^a / p^0 used by the moment system of the viscous solver.
pub fn relaxation_flux<const B: usize>(
    quad: &AngularQuadrature,
    kin: &InterfaceKinetics,
    tau: f64,
    dt: f64,
) -> [[f64; 4]; B] {
    let k = quad.axis().index();
    let mut out = [[0.0; 4]; B];

    let c = &kin.center;
    let jc = Juttner::new(&c.state);
    let relax = StepRelaxation::new(tau, dt);
    for node in quad.nodes(Half::Full) {
        let w = &node.w;
        let d = jc.doppler(w);
        let inv_d = 1.0 / d;
        let r = jc.radial_inv(inv_d);
        let tw = relax.weights(d, inv_d);
        let (sa0, sa1) = split_poly(&c.a, w);
        let (sb0, sb1) = split_poly(&c.b, w);
        let (ta0, ta1) = split_poly(&c.big_a, w);
        let s0 = w[1] * sa0 + w[2] * sb0;
        let s1 = w[1] * sa1 + w[2] * sb1;
        let b0 = tw.eq + tw.eq_space * s0 + tw.eq_time * ta0;
        let b1 = tw.eq_space * s1 + tw.eq_time * ta1;
        accumulate(&mut out, node, k, &r, b0, b1);
    }
    side(&mut out, quad.nodes(Half::Positive), k, &kin.left, tau, dt);
    side(&mut out, quad.nodes(Half::Negative), k, &kin.right, tau, dt);
    out
}

#[inline(always)]
fn side<const B: usize>(out: &mut [[f64; 4]; B], nodes: &[Node], k: usize, s: &SideKinetics, tau: f64, dt: f64) {
    let js = Juttner::new(&s.state);
    let has_dev = !s.deviation.is_zero();
    let relax = StepRelaxation::new(tau, dt);
    for node in nodes {
        let w = &node.w;
        let d = js.doppler(w);
        let inv_d = 1.0 / d;
        let r = js.radial_inv(inv_d);
        let tw = relax.weights(d, inv_d);
        let (sa0, sa1) = split_poly(&s.a, w);
        let (sb0, sb1) = split_poly(&s.b, w);
        let s0 = w[1] * sa0 + w[2] * sb0;
        let s1 = w[1] * sa1 + w[2] * sb1;
        let (q1, q2) = if has_dev { s.deviation.split(w) } else { (0.0, 0.0) };
        let (b0, b1) = if has_dev {
            let damp = tw.init * tau * inv_d;
            (tw.init - damp * q1 - tw.init_space * s0, -damp * q2 - tw.init_space * s1)
        } else {
            (tw.init - tw.init_space * s0, -tw.init_space * s1)
        };
        accumulate(out, node, k, &r, b0, b1);
    }
}

/// Add Psi p^k w^a g (b0 + |p| b1) for one node, using the radial closure.
#[inline(always)]
pub(crate) fn accumulate<const B: usize>(
    out: &mut [[f64; 4]; B],
    node: &Node,
    k: usize,
    r: &[f64; 3],
    b0: f64,
    b1: f64,
) {
    let w = &node.w;
    let base = node.weight * w[k];
    let lo = b0 * r[0] + b1 * r[1];
    let hi = b0 * r[1] + b1 * r[2];
    let psi = psi_angular(w);
    for (a, blk) in out.iter_mut().enumerate() {
        let c = base * w[a];
        blk[0] += c * lo;
        let ch = c * hi;
        blk[1] += ch * psi[1];
        blk[2] += ch * psi[2];
        blk[3] += ch;
    }
}
