//! Error norms, convergence tables, profile files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kinetic::{Conserved, Primitive};
use crate::solver::{Diagnostics, Simulation};
use serde::Serialize;

/// A scalar extracted from the primitive state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Density,
    Velocity1,
    Velocity2,
    Pressure,
    Temperature,
}

impl Quantity {
    pub fn of(self, s: &Primitive) -> f64 {
        match self {
            Quantity::Density => s.n,
            Quantity::Velocity1 => s.u[0],
            Quantity::Velocity2 => s.u[1],
            Quantity::Pressure => s.pressure(),
            Quantity::Temperature => s.t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
}

/// Volume-weighted mean absolute and root-mean-square differences between
/// cell values and a sampler evaluated at the cell centres.
pub fn error_norms(grid: &Grid, values: &[f64], exact: impl Fn(f64, f64) -> f64) -> Norms {
    let v = grid.cell_volume();
    let (mut s1, mut s2, mut vol) = (0.0, 0.0, 0.0);
    for ((i, j), &u) in grid.interior().zip(values) {
        let (x, y) = grid.center(i, j);
        let e = u - exact(x, y);
        s1 += e.abs() * v;
        s2 += e * e * v;
        vol += v;
    }
    Norms { l1: s1 / vol, l2: (s2 / vol).sqrt() }
}

/// Norms of one quantity of a simulation against its problem's exact solution.
pub fn solution_norms(sim: &Simulation, q: Quantity) -> Result<Norms> {
    let exact = sim
        .problem()
        .exact
        .clone()
        .ok_or_else(|| Error::Config(format!("problem `{}` has no exact solution", sim.problem().name)))?;
    let t = sim.time();
    let values: Vec<f64> = sim.primitives().iter().map(|s| q.of(s)).collect();
    Ok(error_norms(sim.grid(), &values, |x, y| q.of(&exact(x, y, t))))
}

/// Observed order between consecutive rows, log(e_i / e_{i+1}) / log(N_{i+1} / N_i).
pub fn convergence_orders(rows: &[(usize, f64)]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in rows.windows(2) {
        let (n0, e0) = w[0];
        let (n1, e1) = w[1];
        out.push(Some((e0 / e1).ln() / (n1 as f64 / n0 as f64).ln()));
    }
    out.truncate(rows.len());
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub l1: f64,
    pub l1_order: Option<f64>,
    pub l2: f64,
    pub l2_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(results: &[(usize, Norms)]) -> Self {
        let o1 = convergence_orders(&results.iter().map(|(n, e)| (*n, e.l1)).collect::<Vec<_>>());
        let o2 = convergence_orders(&results.iter().map(|(n, e)| (*n, e.l2)).collect::<Vec<_>>());
        let rows = results
            .iter()
            .zip(o1.into_iter().zip(o2))
            .map(|((n, e), (l1_order, l2_order))| ConvergenceRow { n: *n, l1: e.l1, l1_order, l2: e.l2, l2_order })
            .collect();
        ConvergenceTable { rows }
    }
}

impl std::fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let order = |o: Option<f64>| o.map_or_else(|| "--".to_string(), |v| format!("{v:.4}"));
        writeln!(f, "{:>6}  {:>12}  {:>8}  {:>12}  {:>8}", "N", "l1 error", "l1 order", "l2 error", "l2 order")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6}  {:>12.4e}  {:>8}  {:>12.4e}  {:>8}",
                r.n,
                r.l1,
                order(r.l1_order),
                r.l2,
                order(r.l2_order)
            )?;
        }
        Ok(())
    }
}

/// Column names of a profile file.
pub fn profile_header(two_d: bool) -> &'static [&'static str] {
    if two_d {
        &["x", "y", "n", "u1", "u2", "p", "T"]
    } else {
        &["x", "n", "u1", "p"]
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Io { path: path.display().to_string(), source: std::io::Error::other(e) }
}

/// Write cell-centre values with 17 significant digits.
pub fn write_profile(path: &Path, grid: &Grid, cells: &[Primitive]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_profile_to(file, grid, cells).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Profile rows to any writer.
pub fn write_profile_to<W: std::io::Write>(out: W, grid: &Grid, cells: &[Primitive]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(profile_header(grid.two_d))?;
    for ((i, j), s) in grid.interior().zip(cells) {
        let (x, y) = grid.center(i, j);
        let rec: Vec<f64> = if grid.two_d {
            vec![x, y, s.n, s.u[0], s.u[1], s.pressure(), s.t]
        } else {
            vec![x, s.n, s.u[0], s.pressure()]
        };
        w.write_record(rec.into_iter().map(fmt17))?;
    }
    w.flush()
}

/// Write the schlieren scalar ln n of a 2D field.
pub fn write_schlieren(path: &Path, grid: &Grid, cells: &[Primitive]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["x", "y", "ln_n"]).map_err(csv_err(path))?;
    for ((i, j), s) in grid.interior().zip(cells) {
        let (x, y) = grid.center(i, j);
        w.write_record([fmt17(x), fmt17(y), fmt17(s.n.ln())]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// A profile read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Profile {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
        let columns: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err(path))?;
            let row = rec
                .iter()
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            rows.push(row);
        }
        Ok(Profile { columns, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Norms of `b - a` for every data column shared by two profiles.
///
/// Rows are matched one to one when the files have the same length; otherwise
/// `b` is taken as a finer 1D profile and sampled at the positions of `a`.
pub fn compare_profiles(a: &Profile, b: &Profile) -> Result<Vec<(String, Norms)>> {
    if a.rows.is_empty() || b.rows.is_empty() {
        return Err(Error::Config("empty profile".into()));
    }
    let (ax, bx) = (a.column("x"), b.column("x"));
    let same = a.rows.len() == b.rows.len();
    if !same && (a.column("y").is_some() || ax.is_none() || bx.is_none()) {
        return Err(Error::Config("profiles of different length must both be 1D with an x column".into()));
    }
    let partner: Vec<usize> = if same {
        (0..a.rows.len()).collect()
    } else {
        let (ax, bx) = (ax.unwrap(), bx.unwrap());
        a.rows
            .iter()
            .map(|r| {
                let x = r[ax];
                let pos = b.rows.partition_point(|s| s[bx] < x);
                let cands = [pos.saturating_sub(1), pos.min(b.rows.len() - 1)];
                *cands
                    .iter()
                    .min_by(|&&p, &&q| (b.rows[p][bx] - x).abs().total_cmp(&(b.rows[q][bx] - x).abs()))
                    .unwrap()
            })
            .collect()
    };
    let mut out = Vec::new();
    for (ca, name) in a.columns.iter().enumerate() {
        if name == "x" || name == "y" {
            continue;
        }
        let Some(cb) = b.column(name) else { continue };
        let (mut s1, mut s2) = (0.0, 0.0);
        for (ra, &k) in a.rows.iter().zip(&partner) {
            let e = b.rows[k][cb] - ra[ca];
            s1 += e.abs();
            s2 += e * e;
        }
        let m = a.rows.len() as f64;
        out.push((name.clone(), Norms { l1: s1 / m, l2: (s2 / m).sqrt() }));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub profile: Option<String>,
    pub schlieren: Option<String>,
}

/// Summary written next to the profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub steps: usize,
    pub final_time: f64,
    pub wall_time_seconds: f64,
    pub initial_totals: Conserved,
    pub final_totals: Conserved,
    /// |final - initial| / |initial| per component (absolute where the initial total is zero).
    pub conservation_drift: Conserved,
    pub diagnostics: Diagnostics,
    pub snapshots: Vec<Snapshot>,
}

pub struct RunOutcome {
    pub simulation: Simulation,
    pub manifest: Manifest,
    pub files: Vec<PathBuf>,
}

/// Relative componentwise change of the conserved totals.
pub fn conservation_drift(initial: &Conserved, now: &Conserved) -> Conserved {
    std::array::from_fn(|k| {
        let d = (now[k] - initial[k]).abs();
        if initial[k] != 0.0 {
            d / initial[k].abs()
        } else {
            d
        }
    })
}

/// Run a configuration to its end time, writing snapshots when an output
/// directory is set.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut sim = Simulation::new(cfg.problem()?, cfg.solver, cfg.mode)?;
    let initial = sim.totals();
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut files = Vec::new();
    let mut snapshots = Vec::new();
    for (k, &t) in cfg.snapshots.iter().enumerate() {
        sim.advance_to(t)?;
        let mut snap = Snapshot { time: sim.time(), profile: None, schlieren: None };
        if let Some(dir) = &cfg.out {
            let cells = sim.primitives();
            let name = format!("profile_{k:03}.csv");
            let path = dir.join(&name);
            write_profile(&path, sim.grid(), &cells)?;
            files.push(path);
            snap.profile = Some(name);
            if sim.grid().two_d {
                let name = format!("schlieren_{k:03}.csv");
                let path = dir.join(&name);
                write_schlieren(&path, sim.grid(), &cells)?;
                files.push(path);
                snap.schlieren = Some(name);
            }
        }
        snapshots.push(snap);
    }
    let final_totals = sim.totals();
    let manifest = Manifest {
        config: cfg.clone(),
        steps: sim.steps(),
        final_time: sim.time(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        initial_totals: initial,
        final_totals,
        conservation_drift: conservation_drift(&initial, &final_totals),
        diagnostics: sim.diagnostics(),
        snapshots,
    };
    if let Some(dir) = &cfg.out {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(io_err(&path))?;
        files.push(path);
    }
    Ok(RunOutcome { simulation: sim, manifest, files })
}

/// Cell-centre samples of a problem's exact solution at time `t`.
pub fn exact_cells(p: &crate::problems::Problem, t: f64) -> Result<Vec<Primitive>> {
    let exact = p.exact.clone().ok_or_else(|| Error::Config(format!("problem `{}` has no exact solution", p.name)))?;
    Ok(p.grid
        .interior()
        .map(|(i, j)| {
            let (x, y) = p.grid.center(i, j);
            exact(x, y, t)
        })
        .collect())
}
