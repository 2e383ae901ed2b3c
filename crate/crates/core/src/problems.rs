//! Built-in test problems with their initial data, boundaries and exact solutions.

use crate::error::{Error, Result};
use crate::flux::CollisionParams;
use crate::grid::{Boundaries, Boundary, Grid};
use crate::kinetic::Primitive;
use crate::riemann::solve_riemann;
use std::f64::consts::PI;
use std::sync::Arc;

pub type InitialField = Arc<dyn Fn(f64, f64) -> Primitive + Send + Sync>;
pub type ExactField = Arc<dyn Fn(f64, f64, f64) -> Primitive + Send + Sync>;

/// First derivatives of the primitive vector (n, u1, u2, T) in t, x and y.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivatives {
    pub t: [f64; 4],
    pub x: [f64; 4],
    pub y: [f64; 4],
}

pub type DerivativeField = Arc<dyn Fn(f64, f64, f64) -> Derivatives + Send + Sync>;

/// Everything needed to set up a run.
#[derive(Clone)]
pub struct Problem {
    pub name: &'static str,
    pub grid: Grid,
    pub boundaries: Boundaries,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: InitialField,
    pub exact: Option<ExactField>,
    /// Derivatives used to bootstrap the viscous solver.
    pub derivatives: Option<DerivativeField>,
    pub collision: CollisionParams,
    pub viscous: bool,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("viscous", &self.viscous)
            .finish()
    }
}

pub const PROBLEM_NAMES: &[&str] = &[
    "sine1d",
    "riemann1",
    "riemann2",
    "riemann3",
    "perturbed",
    "blast",
    "sine2d",
    "implosion",
    "cylindrical",
    "jet",
    "boost",
    "heat",
];

fn state(n: f64, u: [f64; 2], p: f64) -> Primitive {
    Primitive::from_pressure(n, u, p).expect("built-in state is physical")
}

/// 1D Riemann data give the spatial four-velocity U^1.
fn four(n: f64, big_u: f64, p: f64) -> Primitive {
    Primitive::from_four_velocity(n, [big_u, 0.0], p).expect("built-in state is physical")
}

fn accuracy_collisions() -> CollisionParams {
    CollisionParams { c1: 1.0, c2: 1.0, alpha: 2.0, viscosity: None }
}

fn fd_derivatives(exact: ExactField) -> DerivativeField {
    Arc::new(move |x, y, t| {
        let v = |s: Primitive| [s.n, s.u[0], s.u[1], s.t];
        let d = |a: Primitive, b: Primitive, h: f64| -> [f64; 4] {
            let (va, vb) = (v(a), v(b));
            std::array::from_fn(|k| (vb[k] - va[k]) / (2.0 * h))
        };
        let h = 1e-5;
        Derivatives {
            t: d(exact(x, y, t - h), exact(x, y, t + h), h),
            x: d(exact(x - h, y, t), exact(x + h, y, t), h),
            y: d(exact(x, y - h, t), exact(x, y + h, t), h),
        }
    })
}

fn riemann_problem(name: &'static str, left: Primitive, right: Primitive) -> Problem {
    let fan = solve_riemann(&left, &right).expect("built-in Riemann data are solvable");
    Problem {
        name,
        grid: Grid::line(400, (0.0, 1.0)),
        boundaries: Boundaries::all(Boundary::Outflow),
        t_start: 0.0,
        t_end: 0.5,
        initial: Arc::new(move |x, _| if x < 0.5 { left } else { right }),
        exact: Some(Arc::new(move |x, _, t| {
            if t <= 0.0 {
                if x < 0.5 {
                    left
                } else {
                    right
                }
            } else {
                fan.sample((x - 0.5) / t)
            }
        })),
        derivatives: None,
        collision: CollisionParams::default(),
        viscous: false,
    }
}

/// Look up a problem by name at its default resolution.
pub fn problem(name: &str) -> Result<Problem> {
    let p = match name {
        "sine1d" => {
            let exact: ExactField =
                Arc::new(|x, _, t| state(1.0 + 0.5 * (2.0 * PI * (x - 0.2 * t)).sin(), [0.2, 0.0], 1.0));
            let e = exact.clone();
            Problem {
                name: "sine1d",
                grid: Grid::line(100, (0.0, 1.0)),
                boundaries: Boundaries::all(Boundary::Periodic),
                t_start: 0.0,
                t_end: 0.2,
                initial: Arc::new(move |x, y| e(x, y, 0.0)),
                exact: Some(exact),
                derivatives: None,
                collision: accuracy_collisions(),
                viscous: false,
            }
        }
        "riemann1" => riemann_problem("riemann1", four(1.0, 1.0, 3.0), four(1.0, -0.5, 2.0)),
        "riemann2" => riemann_problem("riemann2", four(5.0, 0.0, 10.0), four(1.0, 0.0, 0.5)),
        "riemann3" => riemann_problem("riemann3", four(1.0, -0.5, 2.0), four(1.0, 0.5, 2.0)),
        "perturbed" => Problem {
            name: "perturbed",
            grid: Grid::line(400, (0.0, 1.0)),
            boundaries: Boundaries::all(Boundary::Outflow),
            t_start: 0.0,
            t_end: 0.5,
            initial: Arc::new(|x, _| {
                if x < 0.5 {
                    state(1.0, [0.0, 0.0], 1.0)
                } else {
                    state(0.125 - 0.0875 * (50.0 * (x - 0.5)).sin(), [0.0, 0.0], 0.1)
                }
            }),
            exact: None,
            derivatives: None,
            collision: CollisionParams::default(),
            viscous: false,
        },
        "blast" => Problem {
            name: "blast",
            grid: Grid::line(700, (0.0, 1.0)),
            boundaries: Boundaries::all(Boundary::Reflective),
            t_start: 0.0,
            t_end: 0.75,
            initial: Arc::new(|x, _| {
                let p = if x < 0.1 {
                    100.0
                } else if x < 0.9 {
                    0.06
                } else {
                    10.0
                };
                state(1.0, [0.0, 0.0], p)
            }),
            exact: None,
            derivatives: None,
            collision: CollisionParams::default(),
            viscous: false,
        },
        "sine2d" => {
            let exact: ExactField =
                Arc::new(|x, y, t| state(1.0 + 0.5 * (2.0 * PI * (x + y - 0.4 * t)).sin(), [0.2, 0.2], 1.0));
            let e = exact.clone();
            Problem {
                name: "sine2d",
                grid: Grid::plane(50, 50, (0.0, 1.0), (0.0, 1.0)),
                boundaries: Boundaries::all(Boundary::Periodic),
                t_start: 0.0,
                t_end: 0.1,
                initial: Arc::new(move |x, y| e(x, y, 0.0)),
                exact: Some(exact),
                derivatives: None,
                collision: accuracy_collisions(),
                viscous: false,
            }
        }
        "implosion" => Problem {
            name: "implosion",
            grid: Grid::plane(400, 400, (0.0, 2.0), (0.0, 2.0)),
            boundaries: Boundaries::all(Boundary::Reflective),
            t_start: 0.0,
            t_end: 3.0,
            initial: Arc::new(|x, y| {
                if (x - 1.0).abs() < 0.25 && (y - 1.0).abs() < 0.25 {
                    state(4.0, [0.0, 0.0], 10.0)
                } else {
                    state(1.0, [0.0, 0.0], 1.0)
                }
            }),
            exact: None,
            derivatives: None,
            collision: CollisionParams::default(),
            viscous: false,
        },
        "cylindrical" => Problem {
            name: "cylindrical",
            grid: Grid::plane(200, 200, (0.0, 1.0), (0.0, 1.0)),
            boundaries: Boundaries::all(Boundary::Outflow),
            t_start: 0.0,
            t_end: 0.2,
            initial: Arc::new(|x, y| {
                if (x - 0.5).hypot(y - 0.5) < 0.2 {
                    state(2.0, [0.0, 0.0], 10.0)
                } else {
                    state(1.0, [0.0, 0.0], 0.3)
                }
            }),
            exact: None,
            derivatives: None,
            collision: CollisionParams::default(),
            viscous: false,
        },
        "jet" => {
            let beam = state(0.01, [0.99, 0.0], 10.0);
            Problem {
                name: "jet",
                grid: Grid::plane(600, 350, (0.0, 12.0), (-3.5, 3.5)),
                boundaries: Boundaries {
                    left: Boundary::Inflow { state: beam, half_width: 0.5 },
                    ..Boundaries::all(Boundary::Outflow)
                },
                t_start: 0.0,
                t_end: 8.0,
                initial: Arc::new(|_, _| state(1.0, [0.0, 0.0], 10.0)),
                exact: None,
                derivatives: None,
                collision: CollisionParams { c1: 1.0, c2: 1.0, alpha: 1.0, viscosity: None },
                viscous: false,
            }
        }
        "boost" => {
            let mu = 5e-4;
            let c1 = 1.0 - 4.0 * mu / 3.0;
            let exact: ExactField = Arc::new(move |x, _, t| {
                let tau = (t * t - x * x).sqrt();
                let p = c1 * tau.powf(-4.0 / 3.0) + 4.0 * mu / (3.0 * tau);
                state(1.0 / tau, [x / t, 0.0], p)
            });
            let e = exact.clone();
            Problem {
                name: "boost",
                grid: Grid::line(20, (-0.5, 0.5)),
                boundaries: Boundaries::all(Boundary::Exact),
                t_start: 1.0,
                t_end: 1.2,
                initial: Arc::new(move |x, y| e(x, y, 1.0)),
                derivatives: Some(fd_derivatives(exact.clone())),
                exact: Some(exact),
                collision: CollisionParams { viscosity: Some(mu), ..CollisionParams::default() },
                viscous: true,
            }
        }
        "heat" => {
            let (t0, t1, p) = (0.1, 1.0002 * 0.1, 0.8);
            let exact: ExactField = Arc::new(move |_, y, _| {
                let t = t0 * t1 / (t1 - (t1 - t0) * y);
                state(p / t, [0.2, 0.0], p)
            });
            let tm = 0.5 * (t0 + t1);
            Problem {
                name: "heat",
                grid: Grid::plane(4, 40, (0.0, 1.0), (0.0, 1.0)),
                boundaries: Boundaries {
                    left: Boundary::Periodic,
                    right: Boundary::Periodic,
                    bottom: Boundary::Isothermal { temperature: t0 },
                    top: Boundary::Isothermal { temperature: t1 },
                },
                t_start: 0.0,
                t_end: 40.0,
                initial: Arc::new(move |_, _| state(p / tm, [0.2, 0.0], p)),
                exact: Some(exact),
                derivatives: Some(Arc::new(|_, _, _| Derivatives::default())),
                collision: CollisionParams { viscosity: Some(5e-3), ..CollisionParams::default() },
                viscous: true,
            }
        }
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(p)
}

impl Problem {
    /// Same problem on a different mesh.
    pub fn with_resolution(mut self, nx: usize, ny: Option<usize>) -> Self {
        self.grid.nx = nx;
        if self.grid.two_d {
            self.grid.ny = ny.unwrap_or(nx);
        }
        self
    }

    pub fn with_end_time(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PROBLEM_NAMES {
            let p = problem(name).unwrap();
            assert_eq!(&p.name, name);
            let (x, y) = p.grid.center(0, 0);
            (p.initial)(x, y).validate().unwrap();
        }
        assert!(matches!(problem("nope"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn boost_exact_solution_satisfies_its_ode() {
        let p = problem("boost").unwrap();
        let e = p.exact.unwrap();
        let mu = 5e-4;
        let (t, h) = (1.1, 1e-5);
        let dp = (e(0.0, 0.0, t + h).pressure() - e(0.0, 0.0, t - h).pressure()) / (2.0 * h);
        let pr = e(0.0, 0.0, t).pressure();
        assert!((dp + 4.0 / (3.0 * t) * (pr - mu / (3.0 * t))).abs() < 1e-8);
        assert!((e(0.0, 0.0, 1.0).pressure() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn riemann_one_uses_four_velocity() {
        let p = problem("riemann1").unwrap();
        let l = (p.initial)(0.1, 0.0);
        assert!((l.u[0] - 0.5f64.sqrt()).abs() < 1e-14);
    }
}
