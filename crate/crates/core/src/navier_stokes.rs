//! Moment scheme for the ultra-relativistic Navier-Stokes equations.
//!
//! Every cell carries the moments N^a and T^ab (a, b = 0, 1, 2) of its
//! distribution. They are advanced by the step-averaged fluxes of
//! Psi p^k p^a / p^0 through the cell faces plus the collision source, and
//! the macroscopic state is recovered in the Landau frame afterwards.
//! Taylor coefficients in time come from a three-level extrapolation of the
//! primitive history; the first step is bootstrapped with given derivatives.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::flux::kinetics::{solve_m0, split_poly};
use crate::flux::relax::accumulate;
use crate::flux::time::time_weights;
use crate::flux::{
    collision_time, relaxation_flux, slope_coefficients, CenterKinetics, Deviation, InterfaceKinetics, SideKinetics,
};
use crate::grid::{fill_ghosts, Grid};
use crate::kinetic::moments::{accumulate_tensor, symmetrise};
use crate::kinetic::{
    conserved_from_primitive, conserved_jacobian, landau_recovery, primitive_from_conserved, spectral_radius,
    AngularQuadrature, Axis, Conserved, Half, Juttner, MomentTensor, Primitive, QuadratureLadder,
};
use crate::problems::{Derivatives, Problem};
use crate::reconstruction::limited_slope;
use crate::solver::{face_quadratures, face_speed, ghost_primitive, Diagnostics, SolverConfig};
use nalgebra::{Matrix4, Vector4};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Time derivative at the newest of three levels from the quadratic through them.
///
/// `t` and `h` are ordered oldest first.
pub fn extrapolate_time_derivative(t: [f64; 3], h: [f64; 3]) -> Result<f64> {
    let d2 = t[0] - t[2];
    let d1 = t[1] - t[2];
    let den = d2 * d1 * d1 - d1 * d2 * d2;
    let scale = d1.abs().max(d2.abs());
    if d1 == 0.0 || d2 == 0.0 || den.abs() <= 1e-14 * scale.powi(3) {
        return Err(Error::DegenerateStencil(format!("time levels {t:?}")));
    }
    let num = h[0] * d1 * d1 - h[1] * d2 * d2 - h[2] * (d1 * d1 - d2 * d2);
    Ok(num / den)
}

/// Shear tensor sigma^{mu nu} = grad^<mu U^nu> and the vector
/// X^mu = grad^mu T - T / (n h) grad^mu p for a state and its derivatives.
pub fn shear_and_heat(s: &Primitive, d: &Derivatives) -> ([[f64; 4]; 4], [f64; 4]) {
    let u = s.four_velocity();
    let g = u[0];
    // partial_beta of (n, u1, u2, T) for beta = t, x, y, z
    let rows = [d.t, d.x, d.y, [0.0; 4]];
    let mut du = [[0.0; 4]; 4];
    let mut dt_ = [0.0; 4];
    let mut dp = [0.0; 4];
    for (b, r) in rows.iter().enumerate() {
        let dg = g * g * g * (s.u[0] * r[1] + s.u[1] * r[2]);
        du[b] = [dg, g * r[1] + s.u[0] * dg, g * r[2] + s.u[1] * dg, 0.0];
        dt_[b] = r[3];
        dp[b] = s.t * r[0] + s.n * r[3];
    }
    let delta = |m: usize, v: usize| (if m == v { METRIC[m] } else { 0.0 }) - u[m] * u[v];
    let mut grad = [[0.0; 4]; 4];
    for m in 0..4 {
        for v in 0..4 {
            grad[m][v] = (0..4).map(|b| delta(m, b) * du[b][v]).sum();
        }
    }
    let theta: f64 = (0..4).map(|b| du[b][b]).sum();
    let mut sigma = [[0.0; 4]; 4];
    for m in 0..4 {
        for v in 0..4 {
            sigma[m][v] = 0.5 * (grad[m][v] + grad[v][m]) - theta / 3.0 * delta(m, v);
        }
    }
    let h = s.enthalpy();
    let mut x = [0.0; 4];
    for m in 0..4 {
        x[m] = (0..4).map(|b| delta(m, b) * (dt_[b] - s.t / (s.n * h) * dp[b])).sum();
    }
    (sigma, x)
}

/// First-order Chapman-Enskog deviation
/// phi = -(p_a p_b / T) sigma^ab + (p_a / T^2)(U.p - h) X^a.
///
/// For the collinear quadrature the transverse quadratic terms are replaced by
/// their azimuthal average so that the rule stays exact.
pub fn chapman_enskog_deviation(s: &Primitive, d: &Derivatives, collinear: bool) -> Deviation {
    let (sigma, x) = shear_and_heat(s, d);
    let u = s.four_velocity();
    let t = s.t;
    let h = s.enthalpy();
    let mut c = [[0.0; 5]; 4];
    for m in 0..4 {
        for v in 0..4 {
            c[m][v] = -METRIC[m] * METRIC[v] * sigma[m][v] / t + METRIC[m] * x[m] * METRIC[v] * u[v] / (t * t);
        }
        c[m][4] = -h * METRIC[m] * x[m] / (t * t);
    }
    if collinear {
        let tr = 0.5 * (c[2][2] + c[3][3]);
        c[0][0] += tr;
        c[1][1] -= tr;
        for r in c.iter_mut().take(4).skip(2) {
            *r = [0.0; 5];
        }
        for r in c.iter_mut() {
            r[2] = 0.0;
            r[3] = 0.0;
        }
    }
    Deviation(c)
}

/// Moments of g (1 - tau phi / (U.p)) over part of momentum space.
pub fn deviated_moments(
    s: &Primitive,
    dev: &Deviation,
    tau: f64,
    quad: &AngularQuadrature,
    half: Half,
) -> MomentTensor {
    let j = Juttner::new(s);
    let mut m = MomentTensor::default();
    for node in quad.nodes(half) {
        let d = j.doppler(&node.w);
        let r = j.radial(d);
        let (q1, q2) = dev.split(&node.w);
        let (b0, b1) = (1.0 - tau * q1 / d, -tau * q2 / d);
        let lo = b0 * r[0] + b1 * r[1];
        let hi = b0 * r[1] + b1 * r[2];
        accumulate_tensor(&mut m, &node.w, node.weight * lo, node.weight * hi);
    }
    symmetrise(&mut m);
    m
}

/// Moment tensor from the blocks (N^a, T^1a, T^2a, T^0a); overlapping entries
/// are taken from the lowest block.
fn from_blocks(b: &[[f64; 4]; 3], two_d: bool) -> MomentTensor {
    let mut m = MomentTensor::default();
    m.n[0] = b[0][0];
    m.t[0][1] = b[0][1];
    m.t[0][2] = b[0][2];
    m.t[0][0] = b[0][3];
    m.n[1] = b[1][0];
    m.t[1][1] = b[1][1];
    if two_d {
        m.t[1][2] = b[1][2];
        m.n[2] = b[2][0];
        m.t[2][2] = b[2][2];
    }
    symmetrise(&mut m);
    m
}

fn lerp(a: &Conserved, b: &Conserved, s: f64) -> Conserved {
    std::array::from_fn(|k| a[k] + s * b[k])
}

fn matvec(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| m[i][j] * v[j]).sum())
}

#[derive(Debug, Clone, Copy)]
struct Face {
    left: SideKinetics,
    right: SideKinetics,
    g0: Primitive,
    w0: Conserved,
    tau: f64,
}

/// Explicit moment solver for viscous, heat-conducting flow.
pub struct NavierStokesSolver {
    problem: Problem,
    config: SolverConfig,
    grid: Grid,
    quads: [QuadratureLadder; 2],
    moments: Vec<MomentTensor>,
    prim: Vec<Primitive>,
    /// Earlier ghost-filled primitive levels, oldest first.
    history: VecDeque<(f64, Vec<Primitive>)>,
    time: f64,
    steps: usize,
    overlap: f64,
}

impl NavierStokesSolver {
    pub fn new(problem: Problem, config: SolverConfig) -> Result<Self> {
        let grid = problem.grid;
        if grid.nx < 4 || (grid.two_d && grid.ny < 4) {
            return Err(Error::Config(format!("grid {}x{} is too small", grid.nx, grid.ny)));
        }
        let derivs = problem.derivatives.clone().ok_or(Error::MissingInitialDerivatives)?;
        let mu = config.collision.viscosity.ok_or_else(|| Error::Config("viscous solver needs a viscosity".into()))?;
        let quads = face_quadratures(&grid, config.quadrature);
        let rest = Primitive::new(1.0, [0.0, 0.0], 1.0)?;
        let mut prim = vec![rest; grid.len()];
        let mut moments = vec![MomentTensor::default(); grid.len()];
        let collinear = !grid.two_d;
        for (i, j) in grid.interior() {
            let k = grid.idx(i, j);
            let (x, y) = grid.center(i, j);
            let s = (problem.initial)(x, y);
            s.validate().map_err(|e| e.at_cell(i, j))?;
            let tau = 5.0 * mu / (4.0 * s.pressure());
            let dev = chapman_enskog_deviation(&s, &derivs(x, y, problem.t_start), collinear);
            moments[k] = deviated_moments(&s, &dev, tau, quads[0].for_speed(s.speed_sq().sqrt()), Half::Full);
            prim[k] = landau_recovery(&moments[k], grid.dim()).map_err(|e| e.at_cell(i, j))?;
        }
        let time = problem.t_start;
        Ok(NavierStokesSolver {
            problem,
            config,
            grid,
            quads,
            moments,
            prim,
            history: VecDeque::new(),
            time,
            steps: 0,
            overlap: 0.0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
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

    pub fn moments(&self, i: isize, j: isize) -> MomentTensor {
        self.moments[self.grid.idx(i, j)]
    }

    pub fn primitives(&self) -> Vec<Primitive> {
        self.grid.interior().map(|(i, j)| self.primitive(i, j)).collect()
    }

    /// Largest relative disagreement between moment blocks on their shared
    /// entries (T^01, T^02, T^12) during the last step.
    pub fn overlap_mismatch(&self) -> f64 {
        self.overlap
    }

    pub fn totals(&self) -> Conserved {
        let v = self.grid.cell_volume();
        let mut out = [0.0; 4];
        for (i, j) in self.grid.interior() {
            let w = self.moments(i, j).conserved();
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

    /// One step. The first call also produces the half-step level that starts
    /// the time extrapolation, using the problem's derivatives at t0.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let t = self.time;
        let prim = self.filled(&self.prim, t);
        let bootstrap = self.history.len() < 2;
        let vt = if bootstrap {
            let derivs = self.problem.derivatives.clone().ok_or(Error::MissingInitialDerivatives)?;
            let vt: Vec<[f64; 4]> = (0..self.grid.len())
                .map(|k| {
                    let (i, j) = self.grid.position(k);
                    let (x, y) = self.grid.center(i, j);
                    derivs(x, y, t).t
                })
                .collect();
            let levels = Levels::Start(&vt);
            let (_, half, _) = self.advance_from(&prim, levels, &self.moments, t, 0.5 * dt)?;
            let half = self.filled(&half, t + 0.5 * dt);
            self.history = VecDeque::from(vec![(t, prim.clone()), (t + 0.5 * dt, half)]);
            vt
        } else {
            let vt = self.extrapolated(&self.history[0], &self.history[1], (t, &prim))?;
            self.history.pop_front();
            self.history.push_back((t, prim.clone()));
            vt
        };
        let levels = if bootstrap { Levels::Start(&vt) } else { Levels::History(&vt) };
        let (moments, new_prim, overlap) = self.advance_from(&prim, levels, &self.moments, t, dt)?;
        self.moments = moments;
        self.prim = new_prim;
        self.overlap = overlap;
        self.time = t + dt;
        self.steps += 1;
        Ok(())
    }

    fn filled(&self, prim: &[Primitive], t: f64) -> Vec<Primitive> {
        let grid = self.grid;
        let mut out = prim.to_vec();
        let exact = self.problem.exact.clone();
        fill_ghosts(&grid, &mut out, &self.problem.boundaries, |req, m| {
            ghost_primitive(&grid, req, m, exact.as_ref(), t)
        });
        out
    }

    /// Primitive time derivatives at the newest of three ghost-filled levels.
    fn extrapolated(
        &self,
        a: &(f64, Vec<Primitive>),
        b: &(f64, Vec<Primitive>),
        c: (f64, &[Primitive]),
    ) -> Result<Vec<[f64; 4]>> {
        let times = [a.0, b.0, c.0];
        let mut out = vec![[0.0; 4]; c.1.len()];
        for k in 0..c.1.len() {
            let (x, y, z) = (prim_vector(&a.1[k]), prim_vector(&b.1[k]), prim_vector(&c.1[k]));
            for q in 0..4 {
                out[k][q] = extrapolate_time_derivative(times, [x[q], y[q], z[q]])?;
            }
        }
        Ok(out)
    }

    /// Slopes, primitive gradients and conserved time derivatives on interior
    /// cells and one ghost layer.
    fn cell_data(&self, prim: &[Primitive], vt: &[[f64; 4]]) -> Result<CellData> {
        let grid = self.grid;
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let weq: Vec<Conserved> = prim.iter().map(conserved_from_primitive).collect();
        let mut slopes = vec![[[0.0; 4]; 2]; grid.len()];
        let mut grads = vec![Derivatives::default(); grid.len()];
        let mut wt = vec![[0.0; 4]; grid.len()];
        let jr = if grid.two_d { -1..ny + 1 } else { 0..1 };
        for j in jr {
            for i in -1..nx + 1 {
                let k = grid.idx(i, j);
                let mut s = [[0.0; 4]; 2];
                for &axis in grid.axes() {
                    let (il, jl) = grid.shift(i, j, axis, -1);
                    let (ir, jr) = grid.shift(i, j, axis, 1);
                    let stencil = [&weq[grid.idx(il, jl)], &weq[k], &weq[grid.idx(ir, jr)]];
                    s[axis.index() - 1] =
                        limited_slope(stencil, &prim[k], axis, grid.spacing(axis), self.config.limiter, grid.dim())
                            .map_err(|e| e.at_cell(i, j))?;
                }
                let physical = grid.axes().iter().all(|&axis| {
                    let a = axis.index() - 1;
                    let h = 0.5 * grid.spacing(axis);
                    primitive_from_conserved(&lerp(&weq[k], &s[a], h)).is_ok()
                        && primitive_from_conserved(&lerp(&weq[k], &s[a], -h)).is_ok()
                });
                slopes[k] = if physical { s } else { [[0.0; 4]; 2] };
                let jac = conserved_jacobian(&prim[k]);
                let lu = Matrix4::from_fn(|r, c| jac[r][c]).lu();
                let solve = |w: &Conserved| -> Result<[f64; 4]> {
                    lu.solve(&Vector4::from(*w))
                        .map(|v| v.into())
                        .ok_or_else(|| Error::non_physical("singular primitive Jacobian").at_cell(i, j))
                };
                grads[k] = Derivatives { t: vt[k], x: solve(&slopes[k][0])?, y: solve(&slopes[k][1])? };
                wt[k] = matvec(&jac, &vt[k]);
            }
        }
        Ok(CellData { weq, slopes, grads, wt })
    }

    /// Flux-difference increments of the three moment blocks over one step.
    fn flux_increments(&self, cd: &CellData, dt: f64) -> Result<Vec<[[f64; 4]; 3]>> {
        let grid = self.grid;
        let two_d = grid.two_d;
        let collinear = !two_d;
        let (nx, ny) = (grid.nx as isize, if two_d { grid.ny as isize } else { 1 });
        let CellData { weq, slopes, grads, wt } = cd;
        let mut blocks = vec![[[0.0; 4]; 3]; grid.len()];
        for &axis in grid.axes() {
            let a = axis.index() - 1;
            let ladder = &self.quads[a];
            let h = 0.5 * grid.spacing(axis);
            let (ir, jr) = match (axis, two_d) {
                (Axis::X, false) => (-1..nx, 0..1),
                (Axis::X, true) => (-1..nx, -1..ny + 1),
                (Axis::Y, _) => (-1..nx + 1, -1..ny),
            };
            let mut faces: Vec<Option<Face>> = vec![None; grid.len()];
            for j in jr {
                for i in ir.clone() {
                    let (i2, j2) = grid.shift(i, j, axis, 1);
                    let (kl, kr) = (grid.idx(i, j), grid.idx(i2, j2));
                    let trace = |k: usize, sgn: f64, ci: isize, cj: isize| -> Result<SideKinetics> {
                        let w = lerp(&weq[k], &slopes[k][a], sgn * h);
                        let s = primitive_from_conserved(&w).map_err(|e| e.at_cell(ci, cj))?;
                        let (ca, cb, _) = slope_coefficients(&s, &slopes[k][0], &slopes[k][1])?;
                        let deviation = chapman_enskog_deviation(&s, &grads[k], collinear);
                        Ok(SideKinetics { state: s, a: ca, b: cb, deviation })
                    };
                    let left = trace(kl, 1.0, i, j)?;
                    let right = trace(kr, -1.0, i2, j2)?;
                    let tau = collision_time(left.state.pressure(), right.state.pressure(), dt, &self.config.collision);
                    let quad = ladder.for_speed(face_speed(&left.state, &right.state));
                    let mut m = deviated_moments(&left.state, &left.deviation, tau, quad, Half::Positive);
                    m.add(&deviated_moments(&right.state, &right.deviation, tau, quad, Half::Negative));
                    let g0 = landau_recovery(&m, grid.dim()).map_err(|e| e.at_cell(i, j))?;
                    faces[kl] = Some(Face { left, right, g0, w0: conserved_from_primitive(&g0), tau });
                }
            }
            let r = dt / grid.spacing(axis);
            let (ir, jr) = match axis {
                Axis::X => (-1..nx, 0..ny),
                Axis::Y => (0..nx, -1..ny),
            };
            for j in jr {
                for i in ir.clone() {
                    let (i2, j2) = grid.shift(i, j, axis, 1);
                    let (kl, kr) = (grid.idx(i, j), grid.idx(i2, j2));
                    let f = faces[kl].expect("face computed");
                    let mut center = [[0.0; 4]; 2];
                    center[a] = std::array::from_fn(|q| (weq[kr][q] - weq[kl][q]) / grid.spacing(axis));
                    if two_d {
                        let t = axis.other();
                        let (il, jl) = grid.shift(i, j, t, -1);
                        let (iu, ju) = grid.shift(i, j, t, 1);
                        let lo = faces[grid.idx(il, jl)].expect("neighbour face").w0;
                        let hi = faces[grid.idx(iu, ju)].expect("neighbour face").w0;
                        center[t.index() - 1] = std::array::from_fn(|q| (hi[q] - lo[q]) / (2.0 * grid.spacing(t)));
                    }
                    let (a0, b0, _) = slope_coefficients(&f.g0, &center[0], &center[1]).map_err(|e| e.at_cell(i, j))?;
                    let wt0: Conserved = std::array::from_fn(|q| 0.5 * (wt[kl][q] + wt[kr][q]));
                    let big_a = solve_m0(&f.g0, &wt0).map_err(|e| e.at_cell(i, j))?;
                    let kin = InterfaceKinetics {
                        left: f.left,
                        right: f.right,
                        center: CenterKinetics { state: f.g0, a: a0, b: b0, big_a },
                    };
                    let quad = ladder.for_speed(face_speed(&f.left.state, &f.right.state));
                    let flux = relaxation_flux::<3>(quad, &kin, f.tau, dt);
                    let lo_inside = (0..nx).contains(&i) && (0..ny).contains(&j);
                    let hi_inside = (0..nx).contains(&i2) && (0..ny).contains(&j2);
                    for (b, fb) in flux.iter().enumerate() {
                        for q in 0..4 {
                            if lo_inside {
                                blocks[kl][b][q] -= r * fb[q];
                            }
                            if hi_inside {
                                blocks[kr][b][q] += r * fb[q];
                            }
                        }
                    }
                }
            }
        }
        Ok(blocks)
    }

    /// Collision sources of the interior cells integrated over a step of size `dt`.
    fn sources(&self, prim: &[Primitive], cd: &CellData, dt: f64) -> Result<Vec<[[f64; 4]; 3]>> {
        let grid = self.grid;
        let mu = self.config.collision.viscosity.unwrap_or(0.0);
        let mut out = vec![[[0.0; 4]; 3]; grid.len()];
        for (i, j) in grid.interior() {
            let k = grid.idx(i, j);
            let s = &prim[k];
            let tau = 5.0 * mu / (4.0 * s.pressure());
            out[k] = collision_source(
                self.quads[0].for_speed(s.speed_sq().sqrt()),
                !grid.two_d,
                s,
                &cd.slopes[k],
                &cd.grads[k],
                &cd.wt[k],
                tau,
                dt,
            )
            .map_err(|e| e.at_cell(i, j))?;
        }
        Ok(out)
    }

    /// Moments `old + flux + source` and their Landau-frame primitives, with the
    /// largest relative mismatch between the blocks' shared entries.
    fn assemble(
        &self,
        old: &[MomentTensor],
        flux: &[[[f64; 4]; 3]],
        src: &[[[f64; 4]; 3]],
        t_new: f64,
    ) -> Result<(Vec<MomentTensor>, Vec<Primitive>, f64)> {
        let grid = self.grid;
        let two_d = grid.two_d;
        let mut new_m = old.to_vec();
        let mut new_p = self.prim.clone();
        let mut overlap: f64 = 0.0;
        for (i, j) in grid.interior() {
            let k = grid.idx(i, j);
            let m0 = &old[k];
            let mut b = [m0.block(0), m0.block(1), m0.block(2)];
            for a in 0..3 {
                for q in 0..4 {
                    b[a][q] += flux[k][a][q] + src[k][a][q];
                }
            }
            let scale = b[0][3].abs();
            overlap = overlap.max((b[1][3] - b[0][1]).abs() / scale);
            if two_d {
                overlap = overlap.max((b[2][3] - b[0][2]).abs() / scale).max((b[2][1] - b[1][2]).abs() / scale);
            }
            let m = from_blocks(&b, two_d);
            new_p[k] = landau_recovery(&m, grid.dim()).map_err(|e| with_time(e.at_cell(i, j), t_new))?;
            new_m[k] = m;
        }
        Ok((new_m, new_p, overlap))
    }

    /// Advance `moments` by `dt` from the ghost-filled level `prim` at time `t`.
    ///
    /// The source is averaged between its values at the start and at the
    /// predicted end of the step, which keeps the update second order in time.
    fn advance_from(
        &self,
        prim: &[Primitive],
        levels: Levels<'_>,
        moments: &[MomentTensor],
        t: f64,
        dt: f64,
    ) -> Result<(Vec<MomentTensor>, Vec<Primitive>, f64)> {
        let vt = match levels {
            Levels::Start(v) | Levels::History(v) => v,
        };
        let cd = self.cell_data(prim, vt)?;
        let flux = self.flux_increments(&cd, dt)?;
        let s0 = self.sources(prim, &cd, dt)?;
        let (_, predicted, _) = self.assemble(moments, &flux, &s0, t + dt)?;
        let predicted = self.filled(&predicted, t + dt);
        let vt1 = match levels {
            // quadratic through V(t), V'(t) and V(t + dt)
            Levels::Start(v) => (0..prim.len())
                .map(|k| {
                    let (a, b) = (prim_vector(&prim[k]), prim_vector(&predicted[k]));
                    std::array::from_fn(|q| 2.0 * (b[q] - a[q]) / dt - v[k][q])
                })
                .collect(),
            Levels::History(_) => {
                let last = self.history.back().expect("history level");
                let before = &self.history[self.history.len() - 2];
                debug_assert_eq!(last.0, t);
                self.extrapolated(before, last, (t + dt, &predicted))?
            }
        };
        let cd1 = self.cell_data(&predicted, &vt1)?;
        let s1 = self.sources(&predicted, &cd1, dt)?;
        let src: Vec<[[f64; 4]; 3]> = s0
            .iter()
            .zip(&s1)
            .map(|(a, b)| std::array::from_fn(|i| std::array::from_fn(|q| 0.5 * (a[i][q] + b[i][q]))))
            .collect();
        self.assemble(moments, &flux, &src, t + dt)
    }
}

/// Collision source of one cell over a step of size `dt` for the moment blocks 1
/// and 2; block 0 (the conserved moments) has none.
///
/// The cell distribution is relaxed from its Chapman-Enskog deviation towards
/// the Juttner state with spatial coefficients from `slopes` and time
/// coefficient from `wt`.
#[allow(clippy::too_many_arguments)]
pub fn collision_source(
    quad: &AngularQuadrature,
    collinear: bool,
    s: &Primitive,
    slopes: &[Conserved; 2],
    grads: &Derivatives,
    wt: &Conserved,
    tau: f64,
    dt: f64,
) -> Result<[[f64; 4]; 3]> {
    let (a, b, _) = slope_coefficients(s, &slopes[0], &slopes[1])?;
    let big_a = solve_m0(s, wt)?;
    let dev = chapman_enskog_deviation(s, grads, collinear);
    let j = Juttner::new(s);
    let mut out = [[0.0; 4]; 3];
    for node in quad.nodes(Half::Full) {
        let w = &node.w;
        let d = j.doppler(w);
        let r = j.radial(d);
        let tw = time_weights(d, tau, dt);
        let (sa0, sa1) = split_poly(&a, w);
        let (sb0, sb1) = split_poly(&b, w);
        let (ta0, ta1) = split_poly(&big_a, w);
        let (q1, q2) = dev.split(w);
        let b0 = dt * (tw.eq * (ta0 + w[1] * sa0 + w[2] * sb0) + tw.init * q1);
        let b1 = dt * (tw.eq * (ta1 + w[1] * sa1 + w[2] * sb1) + tw.init * q2);
        for (k, blk) in out.iter_mut().enumerate().skip(1) {
            let mut one = [[0.0; 4]; 1];
            accumulate(&mut one, node, k, &r, b0, b1);
            *blk = std::array::from_fn(|q| blk[q] + one[0][q]);
        }
    }
    Ok(out)
}

/// Where the primitive time derivatives of a step come from.
#[derive(Clone, Copy)]
enum Levels<'a> {
    /// Given derivatives at the start of the run.
    Start(&'a [[f64; 4]]),
    /// Extrapolated from the stored history.
    History(&'a [[f64; 4]]),
}

struct CellData {
    weq: Vec<Conserved>,
    slopes: Vec<[Conserved; 2]>,
    grads: Vec<Derivatives>,
    wt: Vec<Conserved>,
}

fn prim_vector(s: &Primitive) -> [f64; 4] {
    [s.n, s.u[0], s.u[1], s.t]
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::NonPhysicalState { cell, reason } => {
            Error::NonPhysicalState { cell, reason: format!("{reason} (t = {t})") }
        }
        other => other,
    }
}
