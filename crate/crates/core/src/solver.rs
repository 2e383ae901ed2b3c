//! Unsplit finite-volume driver for the Euler equations.

use crate::error::{Error, Result};
use crate::flux::{
    bgk_interface_flux, bgk_type_flux, collision_time, kfvs_flux, CollisionParams, InterfaceData, Scheme,
};
use crate::grid::{fill_ghosts, Boundary, GhostRequest, Grid, GHOST};
use crate::kinetic::{
    conserved_from_primitive, interface_equilibrium, primitive_from_conserved, spectral_radius, AngularQuadrature,
    Axis, Conserved, Primitive, QuadratureLadder, QuadratureOrder,
};
use crate::navier_stokes::NavierStokesSolver;
use crate::problems::{ExactField, Problem};
use crate::reconstruction::{limited_slope, Limiter};
use serde::{Deserialize, Serialize};

/// Numerical options shared by the Euler and viscous solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub limiter: Limiter,
    pub cfl: f64,
    pub collision: CollisionParams,
    pub quadrature: QuadratureOrder,
    /// Initialise with cell averages (Gauss points) instead of centre values.
    pub cell_averages: bool,
}

impl SolverConfig {
    /// Defaults with the problem's own collision constants.
    pub fn for_problem(p: &Problem) -> Self {
        SolverConfig {
            scheme: Scheme::Bgk,
            limiter: Limiter::VanLeer,
            cfl: 0.4,
            collision: p.collision,
            quadrature: QuadratureOrder::default(),
            cell_averages: false,
        }
    }
}

/// Summary of the current solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub time: f64,
    pub steps: usize,
    /// Sum of W times the cell volume over interior cells.
    pub totals: Conserved,
    pub min_density: f64,
    pub max_density: f64,
    pub max_speed: f64,
}

/// Quadratures for each face orientation.
pub(crate) fn face_quadratures(grid: &Grid, order: QuadratureOrder) -> [QuadratureLadder; 2] {
    if grid.two_d {
        [
            QuadratureLadder::new(|o| AngularQuadrature::planar(Axis::X, o), order),
            QuadratureLadder::new(|o| AngularQuadrature::planar(Axis::Y, o), order),
        ]
    } else {
        let q = QuadratureLadder::new(AngularQuadrature::collinear, order);
        [q.clone(), q]
    }
}

/// Speed that selects the rule at an interface between two states.
pub(crate) fn face_speed(l: &Primitive, r: &Primitive) -> f64 {
    l.speed_sq().max(r.speed_sq()).sqrt()
}

fn lerp(a: &Conserved, b: &Conserved, s: f64) -> Conserved {
    std::array::from_fn(|k| a[k] + s * b[k])
}

/// Ghost value of a primitive field for boundaries not handled by [`fill_ghosts`].
pub(crate) fn ghost_primitive(
    grid: &Grid,
    req: GhostRequest<'_>,
    mirror: Primitive,
    exact: Option<&ExactField>,
    t: f64,
) -> Primitive {
    match *req.boundary {
        Boundary::Reflective => mirror.reflected(req.axis),
        Boundary::Inflow { state, half_width } => {
            let (_, y) = grid.center(req.ghost.0, req.ghost.1);
            if y.abs() < half_width {
                state
            } else {
                mirror.reflected(req.axis)
            }
        }
        Boundary::Exact => {
            let (x, y) = grid.center(req.ghost.0, req.ghost.1);
            match exact {
                Some(e) => e(x, y, t),
                None => mirror,
            }
        }
        Boundary::Isothermal { temperature } => {
            let mut g = mirror.reflected(req.axis);
            let p = mirror.pressure();
            let t_g = 2.0 * temperature - mirror.t;
            g.t = if t_g > 0.0 { t_g } else { temperature * temperature / mirror.t };
            g.n = p / g.t;
            g
        }
        Boundary::Periodic | Boundary::Outflow => mirror,
    }
}

/// Cell averages of the conserved variables by 3x3 Gauss quadrature of a pointwise field.
pub(crate) fn average_conserved(grid: &Grid, i: isize, j: isize, f: &dyn Fn(f64, f64) -> Primitive) -> Conserved {
    let (x, y) = grid.center(i, j);
    let g = (0.6f64).sqrt() / 2.0;
    let pts = [(-g, 5.0 / 18.0), (0.0, 8.0 / 18.0), (g, 5.0 / 18.0)];
    let mut out = [0.0; 4];
    let ys: &[(f64, f64)] = if grid.two_d { &pts } else { &[(0.0, 1.0)] };
    for &(sx, wx) in &pts {
        for &(sy, wy) in ys {
            let w = conserved_from_primitive(&f(x + sx * grid.dx(), y + sy * grid.dy()));
            for k in 0..4 {
                out[k] += wx * wy * w[k];
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Face {
    left: Primitive,
    right: Primitive,
    g0: Primitive,
    w0: Conserved,
    tau: f64,
}

/// Explicit solver for the ultra-relativistic Euler equations.
pub struct EulerSolver {
    problem: Problem,
    config: SolverConfig,
    grid: Grid,
    quads: [QuadratureLadder; 2],
    w: Vec<Conserved>,
    prim: Vec<Primitive>,
    slopes: Vec<[Conserved; 2]>,
    time: f64,
    steps: usize,
}

impl EulerSolver {
    pub fn new(problem: Problem, config: SolverConfig) -> Result<Self> {
        let grid = problem.grid;
        if grid.nx < 4 || (grid.two_d && grid.ny < 4) {
            return Err(Error::Config(format!("grid {}x{} is too small", grid.nx, grid.ny)));
        }
        let quads = face_quadratures(&grid, config.quadrature);
        let rest = Primitive::new(1.0, [0.0, 0.0], 1.0)?;
        let mut w = vec![[0.0; 4]; grid.len()];
        let mut prim = vec![rest; grid.len()];
        for (i, j) in grid.interior() {
            let k = grid.idx(i, j);
            w[k] = if config.cell_averages {
                average_conserved(&grid, i, j, &|x, y| (problem.initial)(x, y))
            } else {
                let (x, y) = grid.center(i, j);
                conserved_from_primitive(&(problem.initial)(x, y))
            };
            prim[k] = primitive_from_conserved(&w[k]).map_err(|e| e.at_cell(i, j))?;
        }
        let time = problem.t_start;
        Ok(EulerSolver {
            slopes: vec![[[0.0; 4]; 2]; grid.len()],
            problem,
            config,
            grid,
            quads,
            w,
            prim,
            time,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn primitive(&self, i: isize, j: isize) -> Primitive {
        self.prim[self.grid.idx(i, j)]
    }

    pub fn conserved(&self, i: isize, j: isize) -> Conserved {
        self.w[self.grid.idx(i, j)]
    }

    /// Interior primitives in row-major order.
    pub fn primitives(&self) -> Vec<Primitive> {
        self.grid.interior().map(|(i, j)| self.primitive(i, j)).collect()
    }

    pub fn totals(&self) -> Conserved {
        let v = self.grid.cell_volume();
        let mut out = [0.0; 4];
        for (i, j) in self.grid.interior() {
            let w = self.conserved(i, j);
            for k in 0..4 {
                out[k] += w[k] * v;
            }
        }
        out
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let mut d = Diagnostics {
            time: self.time,
            steps: self.steps,
            totals: self.totals(),
            min_density: f64::INFINITY,
            max_density: 0.0,
            max_speed: 0.0,
        };
        for s in self.primitives() {
            d.min_density = d.min_density.min(s.n);
            d.max_density = d.max_density.max(s.n);
            d.max_speed = d.max_speed.max(s.speed_sq().sqrt());
        }
        d
    }

    /// CFL-limited step from the cell-centred spectral radii.
    pub fn cfl_timestep(&self) -> f64 {
        let h = if self.grid.two_d { self.grid.dx().min(self.grid.dy()) } else { self.grid.dx() };
        let mut rho: f64 = 0.0;
        for (i, j) in self.grid.interior() {
            let s = self.primitive(i, j);
            for &axis in self.grid.axes() {
                rho = rho.max(spectral_radius(&s, axis));
            }
        }
        self.config.cfl * h / rho
    }

    /// Advance to `t_end`, clipping the last step to land on it exactly.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.time < t_end {
            let dt = self.cfl_timestep();
            let last = self.time + dt >= t_end * (1.0 - 1e-14);
            let dt = if last { t_end - self.time } else { dt };
            self.step(dt)?;
            if last {
                self.time = t_end;
            }
        }
        Ok(())
    }

    fn fill_ghosts(&mut self) {
        let grid = self.grid;
        let exact = self.problem.exact.clone();
        let t = self.time;
        fill_ghosts(&grid, &mut self.prim, &self.problem.boundaries, |req, m| {
            ghost_primitive(&grid, req, m, exact.as_ref(), t)
        });
        let g = GHOST as isize;
        let (nx, ny) = (grid.nx as isize, if grid.two_d { grid.ny as isize } else { 1 });
        let jr = if grid.two_d { -g..ny + g } else { 0..1 };
        for j in jr {
            for i in -g..nx + g {
                let inside = (0..nx).contains(&i) && (0..ny).contains(&j);
                if !inside {
                    let k = grid.idx(i, j);
                    self.w[k] = conserved_from_primitive(&self.prim[k]);
                }
            }
        }
    }

    /// Limited slopes on interior cells and the first ghost layer.
    fn compute_slopes(&mut self) -> Result<()> {
        let grid = self.grid;
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let jr = if grid.two_d { -1..ny + 1 } else { 0..1 };
        for j in jr {
            for i in -1..nx + 1 {
                let k = grid.idx(i, j);
                let mut s = [[0.0; 4]; 2];
                for &axis in grid.axes() {
                    let (il, jl) = grid.shift(i, j, axis, -1);
                    let (ir, jr) = grid.shift(i, j, axis, 1);
                    let stencil = [&self.w[grid.idx(il, jl)], &self.w[k], &self.w[grid.idx(ir, jr)]];
                    s[axis.index() - 1] = limited_slope(
                        stencil,
                        &self.prim[k],
                        axis,
                        grid.spacing(axis),
                        self.config.limiter,
                        grid.dim(),
                    )
                    .map_err(|e| e.at_cell(i, j))?;
                }
                // Drop to first order where a trace would be unphysical.
                let physical = grid.axes().iter().all(|&axis| {
                    let a = axis.index() - 1;
                    let h = 0.5 * grid.spacing(axis);
                    primitive_from_conserved(&lerp(&self.w[k], &s[a], h)).is_ok()
                        && primitive_from_conserved(&lerp(&self.w[k], &s[a], -h)).is_ok()
                });
                self.slopes[k] = if physical { s } else { [[0.0; 4]; 2] };
            }
        }
        Ok(())
    }

    fn face(&self, i: isize, j: isize, axis: Axis, dt: f64) -> Result<Face> {
        let grid = &self.grid;
        let a = axis.index() - 1;
        let h = 0.5 * grid.spacing(axis);
        let (ir, jr) = grid.shift(i, j, axis, 1);
        let (kl, kr) = (grid.idx(i, j), grid.idx(ir, jr));
        let left = primitive_from_conserved(&lerp(&self.w[kl], &self.slopes[kl][a], h)).map_err(|e| e.at_cell(i, j))?;
        let right =
            primitive_from_conserved(&lerp(&self.w[kr], &self.slopes[kr][a], -h)).map_err(|e| e.at_cell(ir, jr))?;
        let quad = self.quads[a].for_speed(face_speed(&left, &right));
        let g0 = interface_equilibrium(&left, &right, quad, grid.dim()).map_err(|e| e.at_cell(i, j))?;
        let tau = collision_time(left.pressure(), right.pressure(), dt, &self.config.collision);
        Ok(Face { left, right, g0, w0: conserved_from_primitive(&g0), tau })
    }

    /// Faces normal to `axis`, stored at the index of the cell on their low side.
    fn faces(&self, axis: Axis, dt: f64) -> Result<Vec<Option<Face>>> {
        let grid = &self.grid;
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let mut out = vec![None; grid.len()];
        let (ir, jr) = match (axis, grid.two_d) {
            (Axis::X, false) => (-1..nx, 0..1),
            (Axis::X, true) => (-1..nx, -1..ny + 1),
            (Axis::Y, _) => (-1..nx + 1, -1..ny),
        };
        for j in jr {
            for i in ir.clone() {
                out[grid.idx(i, j)] = Some(self.face(i, j, axis, dt)?);
            }
        }
        Ok(out)
    }

    fn face_flux(&self, faces: &[Option<Face>], i: isize, j: isize, axis: Axis, dt: f64) -> Result<Conserved> {
        let grid = &self.grid;
        let a = axis.index() - 1;
        let f = faces[grid.idx(i, j)].expect("face computed");
        let quad = self.quads[a].for_speed(face_speed(&f.left, &f.right));
        match self.config.scheme {
            Scheme::Kfvs => Ok(kfvs_flux(quad, &f.left, &f.right)),
            Scheme::BgkType => bgk_type_flux(quad, &f.left, &f.right, f.tau, dt),
            Scheme::Bgk => {
                let (ir, jr) = grid.shift(i, j, axis, 1);
                let (kl, kr) = (grid.idx(i, j), grid.idx(ir, jr));
                let mut center = [[0.0; 4]; 2];
                center[a] = std::array::from_fn(|k| (self.w[kr][k] - self.w[kl][k]) / grid.spacing(axis));
                if grid.two_d {
                    let t = axis.other();
                    let (il, jl) = grid.shift(i, j, t, -1);
                    let (iu, ju) = grid.shift(i, j, t, 1);
                    let lo = faces[grid.idx(il, jl)].expect("neighbour face").w0;
                    let hi = faces[grid.idx(iu, ju)].expect("neighbour face").w0;
                    center[t.index() - 1] = std::array::from_fn(|k| (hi[k] - lo[k]) / (2.0 * grid.spacing(t)));
                }
                let data = InterfaceData {
                    left: f.left,
                    right: f.right,
                    left_slopes: self.slopes[kl],
                    right_slopes: self.slopes[kr],
                    center_slopes: center,
                };
                bgk_interface_flux(quad, &data, Some(f.g0), f.tau, dt)
            }
        }
        .map_err(|e| e.at_cell(i, j))
    }

    /// Flux-difference increment of the interior cells over one step of size `dt`.
    fn increment(&mut self, dt: f64) -> Result<Vec<Conserved>> {
        self.fill_ghosts();
        self.compute_slopes()?;
        let grid = self.grid;
        let (nx, ny) = (grid.nx as isize, if grid.two_d { grid.ny as isize } else { 1 });
        let mut dw = vec![[0.0; 4]; grid.len()];
        for &axis in grid.axes() {
            let faces = self.faces(axis, dt)?;
            let r = dt / grid.spacing(axis);
            let (ir, jr) = match axis {
                Axis::X => (-1..nx, 0..ny),
                Axis::Y => (0..nx, -1..ny),
            };
            for j in jr {
                for i in ir.clone() {
                    let f = self.face_flux(&faces, i, j, axis, dt)?;
                    let (i2, j2) = grid.shift(i, j, axis, 1);
                    let lo_inside = (0..nx).contains(&i) && (0..ny).contains(&j);
                    let hi_inside = (0..nx).contains(&i2) && (0..ny).contains(&j2);
                    for k in 0..4 {
                        if lo_inside {
                            dw[grid.idx(i, j)][k] -= r * f[k];
                        }
                        if hi_inside {
                            dw[grid.idx(i2, j2)][k] += r * f[k];
                        }
                    }
                }
            }
        }
        Ok(dw)
    }

    /// Set interior W to `base + dw` (or their average with the current W) and recover primitives.
    fn commit(&mut self, base: Option<&[Conserved]>, dw: &[Conserved], t_new: f64) -> Result<()> {
        let grid = self.grid;
        for (i, j) in grid.interior() {
            let k = grid.idx(i, j);
            for c in 0..4 {
                self.w[k][c] = match base {
                    None => self.w[k][c] + dw[k][c],
                    Some(b) => 0.5 * (b[k][c] + self.w[k][c] + dw[k][c]),
                };
            }
            if !grid.two_d {
                self.w[k][2] = 0.0;
            }
            self.prim[k] = primitive_from_conserved(&self.w[k]).map_err(|e| with_time(e.at_cell(i, j), t_new))?;
        }
        Ok(())
    }

    /// One time step. The genuine BGK flux is second order in time by itself; the
    /// reference fluxes are advanced with the two-stage SSP Runge-Kutta method.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let t0 = self.time;
        if self.config.scheme == Scheme::Bgk {
            let dw = self.increment(dt)?;
            self.commit(None, &dw, t0 + dt)?;
        } else {
            let w0 = self.w.clone();
            let dw = self.increment(dt)?;
            self.commit(None, &dw, t0 + dt)?;
            self.time = t0 + dt;
            let dw = self.increment(dt);
            self.time = t0;
            self.commit(Some(&w0), &dw?, t0 + dt)?;
        }
        self.time = t0 + dt;
        self.steps += 1;
        Ok(())
    }
}

/// Which equations a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Euler,
    #[serde(alias = "navier-stokes")]
    Ns,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Mode::Euler),
            "ns" | "navier-stokes" => Ok(Mode::Ns),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// A running simulation of either kind.
pub enum Simulation {
    Euler(EulerSolver),
    NavierStokes(NavierStokesSolver),
}

impl Simulation {
    pub fn new(problem: Problem, config: SolverConfig, mode: Mode) -> Result<Self> {
        Ok(match mode {
            Mode::Euler => Simulation::Euler(EulerSolver::new(problem, config)?),
            Mode::Ns => Simulation::NavierStokes(NavierStokesSolver::new(problem, config)?),
        })
    }

    /// Mode implied by the problem.
    pub fn for_problem(problem: Problem, config: SolverConfig) -> Result<Self> {
        let mode = if problem.viscous { Mode::Ns } else { Mode::Euler };
        Simulation::new(problem, config, mode)
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Simulation::Euler(s) => s.grid(),
            Simulation::NavierStokes(s) => s.grid(),
        }
    }

    pub fn problem(&self) -> &Problem {
        match self {
            Simulation::Euler(s) => s.problem(),
            Simulation::NavierStokes(s) => s.problem(),
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Simulation::Euler(s) => s.time(),
            Simulation::NavierStokes(s) => s.time(),
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            Simulation::Euler(s) => s.steps(),
            Simulation::NavierStokes(s) => s.steps(),
        }
    }

    pub fn primitive(&self, i: isize, j: isize) -> Primitive {
        match self {
            Simulation::Euler(s) => s.primitive(i, j),
            Simulation::NavierStokes(s) => s.primitive(i, j),
        }
    }

    pub fn primitives(&self) -> Vec<Primitive> {
        match self {
            Simulation::Euler(s) => s.primitives(),
            Simulation::NavierStokes(s) => s.primitives(),
        }
    }

    pub fn totals(&self) -> Conserved {
        match self {
            Simulation::Euler(s) => s.totals(),
            Simulation::NavierStokes(s) => s.totals(),
        }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        match self {
            Simulation::Euler(s) => s.diagnostics(),
            Simulation::NavierStokes(s) => s.diagnostics(),
        }
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        match self {
            Simulation::Euler(s) => s.step(dt),
            Simulation::NavierStokes(s) => s.step(dt),
        }
    }

    pub fn cfl_timestep(&self) -> f64 {
        match self {
            Simulation::Euler(s) => s.cfl_timestep(),
            Simulation::NavierStokes(s) => s.cfl_timestep(),
        }
    }

    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        match self {
            Simulation::Euler(s) => s.advance_to(t_end),
            Simulation::NavierStokes(s) => s.advance_to(t_end),
        }
    }
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::NonPhysicalState { cell, reason } => {
            Error::NonPhysicalState { cell, reason: format!("{reason} (t = {t})") }
        }
        other => other,
    }
}
