//! Closed-form time integrals of the relaxation factors over one step.

/// Step-averaged weights of the interface distribution, each integral divided by dt.
///
/// With nu = D / tau and x = nu dt:
/// * `eq`         = (1/dt) \int (1 - e^{-nu t}) dt
/// * `eq_space`   = (1/dt) \int ((t + 1/nu) e^{-nu t} - 1/nu) dt
/// * `eq_time`    = (1/dt) \int (t - (1 - e^{-nu t}) / nu) dt
/// * `init`       = (1/dt) \int e^{-nu t} dt
/// * `init_space` = (1/dt) \int t e^{-nu t} dt
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWeights {
    pub eq: f64,
    pub eq_space: f64,
    pub eq_time: f64,
    pub init: f64,
    pub init_space: f64,
}

/// Series threshold; below it the exponential forms cancel catastrophically.
const SERIES_BELOW: f64 = 0.5;
/// Above this e^{-x} is below round-off relative to 1/x.
const EXP_NEGLIGIBLE: f64 = 40.0;

#[inline(always)]
fn series(x: f64) -> (f64, f64, f64) {
    // E_k(x) = sum_j (-x)^j / (j + k)!
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    let mut e3 = 0.0;
    let mut term = 1.0; // (-x)^j / j!
    let mut j = 0.0;
    while j < 18.0 {
        let a1 = term / (j + 1.0);
        let a2 = a1 / (j + 2.0);
        let a3 = a2 / (j + 3.0);
        e1 += a1;
        e2 += a2;
        e3 += a3;
        term *= -x / (j + 1.0);
        j += 1.0;
    }
    (e1, e2, e3)
}

/// Weights for relaxation rate D / tau; `tau == 0` gives the equilibrium limit.
#[inline(always)]
pub fn time_weights(d: f64, tau: f64, dt: f64) -> TimeWeights {
    StepRelaxation::new(tau, dt).weights(d, 1.0 / d)
}

/// Per-interface constants of [`time_weights`], hoisted out of the node loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepRelaxation {
    dt: f64,
    dt_over_tau: f64,
    tau_over_dt: f64,
    equilibrium: bool,
}

impl StepRelaxation {
    pub(crate) fn new(tau: f64, dt: f64) -> Self {
        StepRelaxation { dt, dt_over_tau: dt / tau, tau_over_dt: tau / dt, equilibrium: tau <= 0.0 }
    }

    /// Weights for a direction with Doppler factor `d`; `inv_d` must equal 1/d.
    #[inline(always)]
    pub(crate) fn weights(&self, d: f64, inv_d: f64) -> TimeWeights {
        let dt = self.dt;
        if self.equilibrium {
            return TimeWeights { eq: 1.0, eq_space: 0.0, eq_time: 0.5 * dt, init: 0.0, init_space: 0.0 };
        }
        let x = d * self.dt_over_tau;
        if x < SERIES_BELOW {
            let (e1, e2, e3) = series(x);
            TimeWeights {
                eq: x * e2,
                eq_space: dt * (e1 - 2.0 * e2),
                eq_time: dt * x * e3,
                init: e1,
                init_space: dt * (e1 - e2),
            }
        } else {
            let ix = self.tau_over_dt * inv_d;
            let em = if x > EXP_NEGLIGIBLE { 0.0 } else { (-x).exp() };
            let e1 = (1.0 - em) * ix;
            let e2 = (1.0 - e1) * ix;
            TimeWeights {
                eq: 1.0 - e1,
                eq_space: dt * (e1 - 2.0 * e2),
                eq_time: dt * (0.5 - e2),
                init: e1,
                init_space: dt * (e1 - e2),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(nu: f64, dt: f64) -> TimeWeights {
        // composite Simpson on the defining integrals
        let m = 20000;
        let h = dt / m as f64;
        let mut acc = [0.0; 5];
        for i in 0..=m {
            let t = i as f64 * h;
            let c = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let e = (-nu * t).exp();
            let f = [1.0 - e, (t + 1.0 / nu) * e - 1.0 / nu, t - (1.0 - e) / nu, e, t * e];
            for k in 0..5 {
                acc[k] += c * f[k];
            }
        }
        let s = h / 3.0 / dt;
        TimeWeights {
            eq: acc[0] * s,
            eq_space: acc[1] * s,
            eq_time: acc[2] * s,
            init: acc[3] * s,
            init_space: acc[4] * s,
        }
    }

    #[test]
    fn matches_direct_integration() {
        let dt = 0.01;
        for x in [1e-6, 1e-3, 0.3, 0.49, 0.51, 2.0, 30.0, 100.0] {
            let nu = x / dt;
            let a = time_weights(1.0, 1.0 / nu, dt);
            let b = direct(nu, dt);
            let pairs = [
                (a.eq, b.eq, 1.0),
                (a.eq_space, b.eq_space, dt),
                (a.eq_time, b.eq_time, dt),
                (a.init, b.init, 1.0),
                (a.init_space, b.init_space, dt),
            ];
            for (k, (u, v, scale)) in pairs.iter().enumerate() {
                assert!((u - v).abs() < 1e-10 * scale, "x={x} k={k}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn continuous_across_series_threshold() {
        let below = time_weights(1.0, 1.0 / (SERIES_BELOW - 1e-15), 1.0);
        let above = time_weights(1.0, 1.0 / (SERIES_BELOW + 1e-15), 1.0);
        assert!((below.eq_time - above.eq_time).abs() < 1e-13, "{below:?} {above:?}");
        assert!((below.eq_space - above.eq_space).abs() < 1e-13);
    }

    #[test]
    fn limits() {
        let free = time_weights(1.0, 1e12, 1.0);
        assert!((free.init - 1.0).abs() < 1e-10 && (free.init_space - 0.5).abs() < 1e-10);
        assert!(free.eq.abs() < 1e-10);
        let eq = time_weights(1.0, 0.0, 1.0);
        assert_eq!(eq.eq, 1.0);
        assert_eq!(eq.eq_time, 0.5);
        let stiff = time_weights(1.0, 1e-12, 1.0);
        assert!((stiff.eq - 1.0).abs() < 1e-10 && (stiff.eq_time - 0.5).abs() < 1e-10);
    }
}
