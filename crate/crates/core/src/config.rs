//! Run configuration: built-in defaults, an optional TOML file and command-line flags.
//!
//! Later sources win: flags override the file, which overrides the defaults
//! of the chosen problem.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flux::Scheme;
use crate::problems::{problem, Problem};
use crate::reconstruction::Limiter;
use crate::solver::{Mode, SolverConfig};
use serde::{Deserialize, Serialize};

/// Optional settings; every field may come from a file or from a flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// Problem name (see `urbgk run --help` for the list).
    #[arg(long)]
    pub problem: Option<String>,
    /// Interface flux: bgk, bgktype or kfvs.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Equations to solve: euler or ns.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Slope limiter: vanleer or none.
    #[arg(long)]
    pub limiter: Option<Limiter>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Shear viscosity of the viscous solver.
    #[arg(long)]
    pub mu: Option<f64>,
    /// End time.
    #[arg(long)]
    pub tend: Option<f64>,
    /// Directory for profiles and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra output times before the end time, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
}

impl ConfigOverrides {
    /// Fields set in `other` replace those in `self`.
    pub fn merged(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            problem: other.problem.or(self.problem),
            scheme: other.scheme.or(self.scheme),
            mode: other.mode.or(self.mode),
            nx: other.nx.or(self.nx),
            ny: other.ny.or(self.ny),
            cfl: other.cfl.or(self.cfl),
            limiter: other.limiter.or(self.limiter),
            c1: other.c1.or(self.c1),
            c2: other.c2.or(self.c2),
            alpha: other.alpha.or(self.alpha),
            mu: other.mu.or(self.mu),
            tend: other.tend.or(self.tend),
            out: other.out.or(self.out),
            snapshots: other.snapshots.or(self.snapshots),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: String,
    pub mode: Mode,
    pub nx: usize,
    pub ny: Option<usize>,
    pub t_end: f64,
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    /// Output times, ascending, ending with `t_end`.
    pub snapshots: Vec<f64>,
}

/// Output times used when none are requested.
fn default_snapshots(name: &str) -> Vec<f64> {
    match name {
        "jet" => vec![5.0, 6.0, 7.0],
        _ => Vec::new(),
    }
}

impl RunConfig {
    /// Resolve defaults, then the file (if any), then the flags.
    pub fn resolve(file: Option<&Path>, flags: ConfigOverrides) -> Result<Self> {
        let base = match file {
            Some(p) => ConfigOverrides::from_file(p)?,
            None => ConfigOverrides::default(),
        };
        Self::from_overrides(base.merged(flags))
    }

    pub fn from_overrides(o: ConfigOverrides) -> Result<Self> {
        let name = o.problem.ok_or_else(|| Error::Config("missing key `problem`".into()))?;
        let p = problem(&name)?;
        let mut solver = SolverConfig::for_problem(&p);
        if let Some(s) = o.scheme {
            solver.scheme = s;
        }
        if let Some(l) = o.limiter {
            solver.limiter = l;
        }
        if let Some(c) = o.cfl {
            solver.cfl = c;
        }
        if let Some(v) = o.c1 {
            solver.collision.c1 = v;
        }
        if let Some(v) = o.c2 {
            solver.collision.c2 = v;
        }
        if let Some(v) = o.alpha {
            solver.collision.alpha = v;
        }
        if let Some(v) = o.mu {
            solver.collision.viscosity = Some(v);
        }
        let mode = o.mode.unwrap_or(if p.viscous { Mode::Ns } else { Mode::Euler });
        let t_end = o.tend.unwrap_or(p.t_end);
        let mut snapshots: Vec<f64> = o.snapshots.unwrap_or_else(|| default_snapshots(&name));
        snapshots.retain(|&t| t > p.t_start && t < t_end);
        snapshots.sort_by(f64::total_cmp);
        snapshots.dedup();
        snapshots.push(t_end);
        let cfg = RunConfig {
            nx: o.nx.unwrap_or(p.grid.nx),
            ny: if p.grid.two_d { Some(o.ny.or(o.nx).unwrap_or(p.grid.ny)) } else { None },
            problem: name,
            mode,
            t_end,
            solver,
            out: o.out,
            snapshots,
        };
        cfg.validate(&p)?;
        Ok(cfg)
    }

    fn validate(&self, p: &Problem) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("`{key}`: {msg}")));
        if !(self.solver.cfl > 0.0 && self.solver.cfl < 1.0) {
            return bad("cfl", format!("{} is outside (0, 1)", self.solver.cfl));
        }
        if self.nx < 4 {
            return bad("nx", format!("{} cells, need at least 4", self.nx));
        }
        if let Some(ny) = self.ny {
            if ny < 4 {
                return bad("ny", format!("{ny} cells, need at least 4"));
            }
        }
        let c = &self.solver.collision;
        for (key, v) in [("c1", c.c1), ("c2", c.c2), ("alpha", c.alpha), ("mu", c.viscosity.unwrap_or(0.0))] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(key, format!("{v} must be a finite non-negative number"));
            }
        }
        if !(self.t_end > p.t_start) || !self.t_end.is_finite() {
            return bad("tend", format!("{} must exceed the start time {}", self.t_end, p.t_start));
        }
        if self.mode == Mode::Ns {
            if c.viscosity.is_none() {
                return bad("mu", "the viscous solver needs a viscosity".into());
            }
            if p.derivatives.is_none() {
                return Err(Error::MissingInitialDerivatives);
            }
        }
        Ok(())
    }

    /// The registry problem on this run's mesh and time interval.
    pub fn problem(&self) -> Result<Problem> {
        Ok(problem(&self.problem)?.with_resolution(self.nx, self.ny).with_end_time(self.t_end))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(args: &[&str]) -> ConfigOverrides {
        use clap::Parser;
        #[derive(Parser)]
        struct Wrap {
            #[command(flatten)]
            o: ConfigOverrides,
        }
        let mut argv = vec!["test"];
        argv.extend_from_slice(args);
        Wrap::try_parse_from(argv).unwrap().o
    }

    #[test]
    fn riemann_defaults() {
        let c = RunConfig::from_overrides(flags(&[
            "--problem",
            "riemann1",
            "--scheme",
            "bgk",
            "--nx",
            "400",
            "--tend",
            "0.5",
        ]))
        .unwrap();
        assert_eq!(c.solver.cfl, 0.4);
        assert_eq!((c.solver.collision.c1, c.solver.collision.c2, c.solver.collision.alpha), (0.001, 1.5, 1.0));
        assert_eq!(c.solver.scheme, Scheme::Bgk);
        assert_eq!(c.snapshots, vec![0.5]);
    }

    #[test]
    fn cfl_bounds() {
        let e = RunConfig::from_overrides(flags(&["--problem", "riemann1", "--cfl", "1.5"])).unwrap_err();
        assert!(e.to_string().contains("cfl"), "{e}");
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigOverrides::from_toml("problem = \"sine1d\"\nnx = 100\nscheme = \"kfvs\"\n").unwrap();
        let c = RunConfig::from_overrides(file.merged(flags(&["--nx", "200"]))).unwrap();
        assert_eq!(c.nx, 200);
        assert_eq!(c.solver.scheme, Scheme::Kfvs);
    }

    #[test]
    fn spelled_values_parse() {
        let file =
            ConfigOverrides::from_toml("problem = \"sine2d\"\nscheme = \"bgktype\"\nlimiter = \"vanleer\"").unwrap();
        assert_eq!(file.scheme, Some(Scheme::BgkType));
        assert_eq!(file.limiter, Some(Limiter::VanLeer));
        let e = ConfigOverrides::from_toml("problem = \"sine2d\"\ncfll = 0.3").unwrap_err();
        assert!(e.to_string().contains("cfll"), "{e}");
    }

    #[test]
    fn small_mesh_and_unknown_problem() {
        assert!(RunConfig::from_overrides(flags(&["--problem", "sine1d", "--nx", "3"])).is_err());
        assert!(matches!(RunConfig::from_overrides(flags(&["--problem", "nope"])), Err(Error::UnknownProblem(_))));
    }
}
