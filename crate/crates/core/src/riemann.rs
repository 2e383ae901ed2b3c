//! Exact Riemann solver for the one-dimensional ultra-relativistic Euler equations.
//!
//! Because e = 3p, pressure and velocity decouple from the density: the star
//! pressure follows from rapidity jumps alone and n is carried along.

use crate::error::{Error, Result};
use crate::kinetic::Primitive;

const CS: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)
const RAREFACTION_K: f64 = 0.433_012_701_892_219_3; // sqrt(3)/4

/// One of the two nonlinear waves of the fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

/// The self-similar solution of a Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFan {
    pub left: Primitive,
    pub right: Primitive,
    pub p_star: f64,
    pub u_star: f64,
    pub n_star_left: f64,
    pub n_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

fn add_velocity(a: f64, b: f64) -> f64 {
    (a + b) / (1.0 + a * b)
}

/// Velocity of the state behind the wave facing `sign` (-1 left, +1 right) at pressure p.
fn star_velocity(s: &Primitive, p: f64, sign: f64) -> f64 {
    let pa = s.pressure();
    let u = s.u[0];
    if p <= pa {
        (u.atanh() - sign * RAREFACTION_K * (pa / p).ln()).tanh()
    } else {
        add_velocity(u, sign * shock_relative_velocity(pa, p))
    }
}

/// Relative speed of the two states across a shock with e = 3p.
fn shock_relative_velocity(pa: f64, pb: f64) -> f64 {
    3f64.sqrt() * (pb - pa).abs() / ((3.0 * pa + pb) * (3.0 * pb + pa)).sqrt()
}

/// Post-shock density from the Taub adiabat.
fn shock_density(na: f64, pa: f64, pb: f64) -> f64 {
    na * (pb * (3.0 * pb + pa) / (pa * (3.0 * pa + pb))).sqrt()
}

fn shock_speed(na: f64, ua: f64, nb: f64, ub: f64, pa: f64, pb: f64, sign: f64) -> f64 {
    let ga = 1.0 / (1.0 - ua * ua).sqrt();
    let ha = 4.0 * pa / na;
    let hb = 4.0 * pb / nb;
    let j2 = -(pb - pa) / (hb / nb - ha / na);
    if !(j2 > 0.0) || !j2.is_finite() {
        // vanishing strength: the shock moves with the characteristic
        let _ = ub;
        return add_velocity(ua, sign * CS);
    }
    let j = j2.sqrt();
    let r = na * na * ga * ga;
    (r * ua + sign * j * (j2 + r * (1.0 - ua * ua)).sqrt()) / (r + j2)
}

fn wave(s: &Primitive, p_star: f64, u_star: f64, n_star: f64, sign: f64) -> Wave {
    let pa = s.pressure();
    let u = s.u[0];
    if p_star > pa * (1.0 + 1e-14) {
        Wave::Shock { speed: shock_speed(s.n, u, n_star, u_star, pa, p_star, sign) }
    } else {
        Wave::Rarefaction { head: add_velocity(u, sign * CS), tail: add_velocity(u_star, sign * CS) }
    }
}

fn star_density(s: &Primitive, p: f64) -> f64 {
    let pa = s.pressure();
    if p > pa {
        shock_density(s.n, pa, p)
    } else {
        s.n * (p / pa).powf(0.75)
    }
}

/// Solve the Riemann problem between two states (x-velocities only).
pub fn solve_riemann(left: &Primitive, right: &Primitive) -> Result<RiemannFan> {
    left.validate()?;
    right.validate()?;
    let f = |p: f64| star_velocity(left, p, -1.0) - star_velocity(right, p, 1.0);
    // f decreases monotonically in p; bracket the root
    let mut lo = left.pressure().min(right.pressure());
    let mut hi = left.pressure().max(right.pressure());
    while f(lo) < 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoConvergence("vacuum forms between the states".into()));
        }
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoConvergence("no pressure bracket".into()));
        }
    }
    while (hi - lo) > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton with a finite-difference slope, kept inside the bracket
    let mut p = 0.5 * (lo + hi);
    for _ in 0..60 {
        let fp = f(p);
        if fp.abs() < 1e-14 {
            break;
        }
        if fp > 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let h = 1e-7 * p;
        let d = (f(p + h) - f(p - h)) / (2.0 * h);
        let mut next = p - fp / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - p).abs() < 1e-16 * p {
            p = next;
            break;
        }
        p = next;
    }
    let residual = f(p).abs();
    if residual > 1e-12 {
        return Err(Error::NoConvergence(format!("star pressure residual {residual}")));
    }
    let u_star = 0.5 * (star_velocity(left, p, -1.0) + star_velocity(right, p, 1.0));
    let n_star_left = star_density(left, p);
    let n_star_right = star_density(right, p);
    Ok(RiemannFan {
        left: *left,
        right: *right,
        p_star: p,
        u_star,
        n_star_left,
        n_star_right,
        left_wave: wave(left, p, u_star, n_star_left, -1.0),
        right_wave: wave(right, p, u_star, n_star_right, 1.0),
    })
}

impl RiemannFan {
    /// State at similarity coordinate xi = (x - x0) / t.
    pub fn sample(&self, xi: f64) -> Primitive {
        let star = |n: f64| Primitive { n, u: [self.u_star, 0.0], t: self.p_star / n };
        if xi < self.u_star {
            match self.left_wave {
                Wave::Shock { speed } => {
                    if xi < speed {
                        self.left
                    } else {
                        star(self.n_star_left)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi <= head {
                        self.left
                    } else if xi >= tail {
                        star(self.n_star_left)
                    } else {
                        self.fan(&self.left, xi, -1.0)
                    }
                }
            }
        } else {
            match self.right_wave {
                Wave::Shock { speed } => {
                    if xi > speed {
                        self.right
                    } else {
                        star(self.n_star_right)
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi >= head {
                        self.right
                    } else if xi <= tail {
                        star(self.n_star_right)
                    } else {
                        self.fan(&self.right, xi, 1.0)
                    }
                }
            }
        }
    }

    fn fan(&self, s: &Primitive, xi: f64, sign: f64) -> Primitive {
        // characteristic u -+ c through the origin
        let u = add_velocity(xi, -sign * CS);
        let pa = s.pressure();
        let p = pa * ((u.atanh() - s.u[0].atanh()) / (sign * RAREFACTION_K)).exp();
        let n = s.n * (p / pa).powf(0.75);
        Primitive { n, u: [u, 0.0], t: p / n }
    }
}
