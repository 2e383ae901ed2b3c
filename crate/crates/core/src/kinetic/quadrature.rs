//! Angular quadrature on the unit sphere of momentum directions.
//!
//! The polar axis is always the interface normal, so the split into
//! p^k > 0 and p^k < 0 falls on a panel boundary and both half-space
//! integrals keep spectral accuracy.

use super::state::{Axis, Primitive};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Node counts: Gauss-Legendre points per half of the polar cosine and
/// trapezoid points over the full azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureOrder {
    pub per_half: usize,
    pub azimuthal: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        QuadratureOrder { per_half: 16, azimuthal: 32 }
    }
}

/// Rules of increasing resolution picked by flow speed.
///
/// A Juttner distribution at speed v concentrates in a cone of width about
/// 1/gamma, so a fixed angular rule loses accuracy as v approaches 1.
/// Each level doubles both node counts of the previous one.
#[derive(Debug, Clone)]
pub struct QuadratureLadder {
    rules: Vec<AngularQuadrature>,
}

/// Speeds above which the next finer rule is used.
const LADDER_SPEEDS: [f64; 3] = [0.7, 0.9, 0.97];

impl QuadratureLadder {
    pub fn new(build: impl Fn(QuadratureOrder) -> AngularQuadrature, order: QuadratureOrder) -> Self {
        let rules = (0..=LADDER_SPEEDS.len())
            .map(|l| {
                let f = 1 << l;
                build(QuadratureOrder { per_half: order.per_half * f, azimuthal: order.azimuthal * f })
            })
            .collect();
        QuadratureLadder { rules }
    }

    /// The coarsest rule.
    pub fn base(&self) -> &AngularQuadrature {
        &self.rules[0]
    }

    /// Rule for a state moving at `speed`.
    pub fn for_speed(&self, speed: f64) -> &AngularQuadrature {
        let level = LADDER_SPEEDS.iter().filter(|&&v| speed > v).count();
        &self.rules[level]
    }
}

/// A momentum direction w (with w^0 = 1) and its solid-angle weight.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub w: [f64; 4],
    pub weight: f64,
}

/// Which part of momentum space to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Positive,
    Negative,
    Full,
}

#[derive(Debug, Clone)]
pub struct AngularQuadrature {
    axis: Axis,
    planar: bool,
    nodes: Vec<Node>,
    split: usize,
}

impl AngularQuadrature {
    /// Rule for states whose velocity is parallel to x: the azimuth is
    /// integrated analytically and only the polar cosine is sampled.
    pub fn collinear(order: QuadratureOrder) -> Self {
        let (x, wt) = gauss_legendre(order.per_half);
        let mut nodes = Vec::with_capacity(2 * order.per_half);
        for sign in [1.0, -1.0] {
            for (xi, w) in x.iter().zip(&wt) {
                let c = sign * 0.5 * (xi + 1.0);
                nodes.push(Node { w: [1.0, c, 0.0, 0.0], weight: PI * w });
            }
        }
        AngularQuadrature { axis: Axis::X, planar: false, nodes, split: order.per_half }
    }

    /// Full two-angle rule with the polar axis along `axis`.
    pub fn planar(axis: Axis, order: QuadratureOrder) -> Self {
        let (x, wt) = gauss_legendre(order.per_half);
        let m = order.azimuthal;
        assert!(m >= 2 && m.is_multiple_of(2), "azimuthal order must be even, got {m}");
        let dphi = 2.0 * PI / m as f64;
        let mut nodes = Vec::with_capacity(2 * order.per_half * m);
        for sign in [1.0, -1.0] {
            for (xi, wx) in x.iter().zip(&wt) {
                let c = sign * 0.5 * (xi + 1.0);
                let s = (1.0 - c * c).sqrt();
                // Integrands never contain odd powers of the out-of-plane
                // component, so only the half circle with w^3 > 0 is kept.
                for j in 0..m {
                    let phi = -PI + (j as f64 + 0.5) * dphi;
                    let (sp, cp) = phi.sin_cos();
                    let fold = if cp.abs() < 1e-12 {
                        1.0
                    } else if cp > 0.0 {
                        2.0
                    } else {
                        continue;
                    };
                    let w = match axis {
                        Axis::X => [1.0, c, s * sp, s * cp],
                        Axis::Y => [1.0, s * sp, c, s * cp],
                    };
                    nodes.push(Node { w, weight: 0.5 * fold * wx * dphi });
                }
            }
        }
        AngularQuadrature { axis, planar: true, split: nodes.len() / 2, nodes }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Whether transverse directions are resolved.
    pub fn is_planar(&self) -> bool {
        self.planar
    }

    pub fn nodes(&self, half: Half) -> &[Node] {
        match half {
            Half::Positive => &self.nodes[..self.split],
            Half::Negative => &self.nodes[self.split..],
            Half::Full => &self.nodes,
        }
    }
}

/// Precomputed constants of a Juttner distribution for fast radial closure.
///
/// For a direction w with D = U^0 - w.U, the radial integral
/// R_m = \int |p|^m g |p| d|p| equals n (m+1)! T^(m-1) / (8 pi D^(m+2)).
#[derive(Debug, Clone, Copy)]
pub struct Juttner {
    pub u: [f64; 4],
    k1: f64,
    k2: f64,
    k3: f64,
}

impl Juttner {
    pub fn new(s: &Primitive) -> Self {
        let n = s.n;
        let t = s.t;
        Juttner { u: s.four_velocity(), k1: n / (4.0 * PI), k2: 3.0 * n * t / (4.0 * PI), k3: 3.0 * n * t * t / PI }
    }

    /// D = (U . p) / |p| for direction w.
    #[inline(always)]
    pub fn doppler(&self, w: &[f64; 4]) -> f64 {
        self.u[0] - w[1] * self.u[1] - w[2] * self.u[2]
    }

    /// Radial moments (R_1, R_2, R_3) for the given D.
    #[inline(always)]
    pub fn radial(&self, d: f64) -> [f64; 3] {
        self.radial_inv(1.0 / d)
    }

    /// Radial moments given 1/D.
    #[inline(always)]
    pub fn radial_inv(&self, r: f64) -> [f64; 3] {
        let r3 = r * r * r;
        let r4 = r3 * r;
        [self.k1 * r3, self.k2 * r4, self.k3 * r4 * r]
    }
}

/// Angular part of Psi = (1, p^1, p^2, p^0); the first entry carries |p|^0, the rest |p|^1.
#[inline(always)]
pub fn psi_angular(w: &[f64; 4]) -> [f64; 4] {
    [1.0, w[1], w[2], 1.0]
}
