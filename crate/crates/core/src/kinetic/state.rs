//! Macroscopic state of an ultra-relativistic gas (c = k = 1, p = nT, e = 3p, h = 4T).

use crate::error::{Error, Result};

/// Isentropic sound speed squared of the massless gas.
pub const SOUND_SPEED_SQ: f64 = 1.0 / 3.0;

/// Spatial direction of a flux or a slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Contravariant index of the axis (1 for x, 2 for y).
    pub fn index(self) -> usize {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// Primitive variables: particle density, three-velocity and temperature.
///
/// One-dimensional states keep `u[1] == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub n: f64,
    pub u: [f64; 2],
    pub t: f64,
}

impl Primitive {
    /// Build a state, rejecting non-positive density or temperature and |u| >= 1.
    pub fn new(n: f64, u: [f64; 2], t: f64) -> Result<Self> {
        let p = Primitive { n, u, t };
        p.validate()?;
        Ok(p)
    }

    pub fn from_pressure(n: f64, u: [f64; 2], p: f64) -> Result<Self> {
        Primitive::new(n, u, p / n)
    }

    /// State given by the spatial components of the four-velocity instead of the three-velocity.
    pub fn from_four_velocity(n: f64, big_u: [f64; 2], p: f64) -> Result<Self> {
        let g = (1.0 + big_u[0] * big_u[0] + big_u[1] * big_u[1]).sqrt();
        Primitive::new(n, [big_u[0] / g, big_u[1] / g], p / n)
    }

    pub fn validate(&self) -> Result<()> {
        let v2 = self.speed_sq();
        if !(self.n > 0.0 && self.n.is_finite()) {
            return Err(Error::non_physical(format!("density {}", self.n)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::non_physical(format!("temperature {}", self.t)));
        }
        if !(v2 < 1.0) {
            return Err(Error::non_physical(format!("speed^2 {v2}")));
        }
        Ok(())
    }

    pub fn speed_sq(&self) -> f64 {
        self.u[0] * self.u[0] + self.u[1] * self.u[1]
    }

    pub fn pressure(&self) -> f64 {
        self.n * self.t
    }

    /// Specific enthalpy h = 4T.
    pub fn enthalpy(&self) -> f64 {
        4.0 * self.t
    }

    pub fn energy_density(&self) -> f64 {
        3.0 * self.n * self.t
    }

    pub fn lorentz(&self) -> f64 {
        1.0 / (1.0 - self.speed_sq()).sqrt()
    }

    /// Contravariant four-velocity (U^0, U^1, U^2, U^3).
    pub fn four_velocity(&self) -> [f64; 4] {
        let g = self.lorentz();
        [g, g * self.u[0], g * self.u[1], 0.0]
    }

    pub fn velocity(&self, axis: Axis) -> f64 {
        self.u[axis.index() - 1]
    }

    /// Mirror the velocity component normal to `axis`.
    pub fn reflected(&self, axis: Axis) -> Primitive {
        let mut r = *self;
        r.u[axis.index() - 1] = -r.u[axis.index() - 1];
        r
    }
}

/// Conserved vector W = (N^0, T^01, T^02, T^00).
pub type Conserved = [f64; 4];

/// Slot of the conserved vector holding the momentum along `axis`.
pub fn momentum_slot(axis: Axis) -> usize {
    axis.index()
}

pub fn conserved_from_primitive(s: &Primitive) -> Conserved {
    let [u0, u1, u2, _] = s.four_velocity();
    let nh = s.n * s.enthalpy();
    [s.n * u0, nh * u0 * u1, nh * u0 * u2, nh * u0 * u0 - s.pressure()]
}

/// Invert [`conserved_from_primitive`] in closed form.
pub fn primitive_from_conserved(w: &Conserved) -> Result<Primitive> {
    let [n0, m1, m2, e] = *w;
    let m2sum = m1 * m1 + m2 * m2;
    if !(n0 > 0.0 && e > 0.0) || !w.iter().all(|x| x.is_finite()) {
        return Err(Error::non_physical(format!("conserved {w:?}")));
    }
    let disc = 4.0 * e * e - 3.0 * m2sum;
    if disc < 0.0 || m2sum >= e * e {
        return Err(Error::non_physical(format!("momentum exceeds energy in {w:?}")));
    }
    let p = (disc.sqrt() - e) / 3.0;
    if !(p > 0.0) {
        return Err(Error::non_physical(format!("pressure {p} from {w:?}")));
    }
    let scale = (4.0 * p * (p + e)).sqrt();
    let big_u = [m1 / scale, m2 / scale];
    let g = (1.0 + big_u[0] * big_u[0] + big_u[1] * big_u[1]).sqrt();
    let n = n0 / g;
    Primitive::new(n, [big_u[0] / g, big_u[1] / g], p / n)
}

/// Euler flux along `axis`: (N^k, T^k1, T^k2, T^k0).
pub fn euler_flux(s: &Primitive, axis: Axis) -> Conserved {
    let big_u = s.four_velocity();
    let k = axis.index();
    let nh = s.n * s.enthalpy();
    let p = s.pressure();
    let uk = big_u[k];
    [
        s.n * uk,
        nh * uk * big_u[1] + if k == 1 { p } else { 0.0 },
        nh * uk * big_u[2] + if k == 2 { p } else { 0.0 },
        nh * uk * big_u[0],
    ]
}

/// Jacobian dW/dV with V = (n, u1, u2, T); row = conserved slot.
pub fn conserved_jacobian(s: &Primitive) -> [[f64; 4]; 4] {
    let g2 = 1.0 / (1.0 - s.speed_sq());
    let g = g2.sqrt();
    let g4 = g2 * g2;
    let (n, t) = (s.n, s.t);
    let u = s.u;
    let mut j = [[0.0; 4]; 4];
    j[0][0] = g;
    j[0][1] = n * g2 * g * u[0];
    j[0][2] = n * g2 * g * u[1];
    for a in 0..2 {
        let row = 1 + a;
        j[row][0] = 4.0 * t * g2 * u[a];
        j[row][3] = 4.0 * n * g2 * u[a];
        for b in 0..2 {
            let delta = if a == b { g2 } else { 0.0 };
            j[row][1 + b] = 4.0 * n * t * (2.0 * g4 * u[a] * u[b] + delta);
        }
    }
    j[3][0] = 4.0 * t * g2 - t;
    j[3][3] = 4.0 * n * g2 - n;
    j[3][1] = 8.0 * n * t * g4 * u[0];
    j[3][2] = 8.0 * n * t * g4 * u[1];
    j
}

/// Characteristic speeds along `axis`, ordered (lambda-, u_k, u_k, lambda+).
pub fn characteristic_speeds(s: &Primitive, axis: Axis) -> [f64; 4] {
    let c2 = SOUND_SPEED_SQ;
    let c = c2.sqrt();
    let uk = s.velocity(axis);
    let v2 = s.speed_sq();
    let radicand = ((1.0 - v2) * (1.0 - uk * uk - (v2 - uk * uk) * c2)).max(0.0);
    let denom = 1.0 - v2 * c2;
    let lm = (uk * (1.0 - c2) - c * radicand.sqrt()) / denom;
    let lp = (uk * (1.0 - c2) + c * radicand.sqrt()) / denom;
    [lm, uk, uk, lp]
}

/// Largest characteristic speed magnitude along `axis`.
pub fn spectral_radius(s: &Primitive, axis: Axis) -> f64 {
    let l = characteristic_speeds(s, axis);
    l[0].abs().max(l[3].abs())
}
