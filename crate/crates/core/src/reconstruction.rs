//! Piecewise-linear reconstruction with van Leer limiting in characteristic variables.

use crate::error::{Error, Result};
use crate::kinetic::{characteristic_speeds, euler_flux, primitive_from_conserved, Axis, Conserved, Dim, Primitive};
use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limiter {
    /// Unlimited central differences.
    None,
    /// Van Leer limiter applied to characteristic increments.
    #[serde(alias = "vanleer", alias = "van_leer")]
    VanLeer,
}

impl std::str::FromStr for Limiter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Limiter::None),
            "van-leer" | "vanleer" | "van_leer" => Ok(Limiter::VanLeer),
            other => Err(format!("unknown limiter `{other}`")),
        }
    }
}

/// Van Leer's harmonic slope; zero at extrema.
pub fn van_leer(dm: f64, dp: f64) -> f64 {
    if dm * dp <= 0.0 {
        0.0
    } else {
        2.0 * dm * dp / (dm + dp)
    }
}

/// Condition number above which characteristic limiting falls back to componentwise.
const MAX_CONDITION: f64 = 1e8;

/// Slope dW/dk of the centre cell of a three-cell stencil along `axis`.
pub fn limited_slope(
    stencil: [&Conserved; 3],
    center: &Primitive,
    axis: Axis,
    h: f64,
    limiter: Limiter,
    dim: Dim,
) -> Result<Conserved> {
    let [wl, wc, wr] = stencil;
    match limiter {
        Limiter::None => Ok(std::array::from_fn(|i| (wr[i] - wl[i]) / (2.0 * h))),
        Limiter::VanLeer => match dim {
            Dim::One => characteristic::<3>(stencil, center, axis, h, [0, 1, 3]),
            Dim::Two => characteristic::<4>(stencil, center, axis, h, [0, 1, 2, 3]),
        }
        .or_else(|e| match e {
            Error::DegenerateStencil(_) => Ok(componentwise(wl, wc, wr, h)),
            other => Err(other),
        }),
    }
}

fn componentwise(wl: &Conserved, wc: &Conserved, wr: &Conserved, h: f64) -> Conserved {
    std::array::from_fn(|i| van_leer(wc[i] - wl[i], wr[i] - wc[i]) / h)
}

/// Finite-difference flux Jacobian on the active slots.
pub fn flux_jacobian<const N: usize>(w: &Conserved, axis: Axis, slots: [usize; N]) -> Result<SMatrix<f64, N, N>> {
    let mut jac = SMatrix::<f64, N, N>::zeros();
    for (c, &sc) in slots.iter().enumerate() {
        let h = 1e-6 * (1.0 + w[sc].abs());
        let mut wp = *w;
        let mut wm = *w;
        wp[sc] += h;
        wm[sc] -= h;
        let fp = euler_flux(&primitive_from_conserved(&wp)?, axis);
        let fm = euler_flux(&primitive_from_conserved(&wm)?, axis);
        for (r, &sr) in slots.iter().enumerate() {
            jac[(r, c)] = (fp[sr] - fm[sr]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Orthonormal-ish basis of the approximate null space of `b`, assumed of dimension `m`.
fn null_space<const N: usize>(mut b: SMatrix<f64, N, N>, m: usize) -> Vec<SVector<f64, N>> {
    let rank = N - m;
    let mut col: [usize; N] = std::array::from_fn(|i| i);
    for s in 0..rank {
        let (mut pi, mut pj, mut best) = (s, s, -1.0);
        for i in s..N {
            for j in s..N {
                if b[(i, j)].abs() > best {
                    best = b[(i, j)].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        b.swap_rows(s, pi);
        b.swap_columns(s, pj);
        col.swap(s, pj);
        let piv = b[(s, s)];
        for j in 0..N {
            b[(s, j)] /= piv;
        }
        for i in 0..N {
            if i != s {
                let f = b[(i, s)];
                if f != 0.0 {
                    for j in 0..N {
                        b[(i, j)] -= f * b[(s, j)];
                    }
                }
            }
        }
    }
    (rank..N)
        .map(|f| {
            let mut v = SVector::<f64, N>::zeros();
            v[col[f]] = 1.0;
            for s in 0..rank {
                v[col[s]] = -b[(s, f)];
            }
            v.normalize()
        })
        .collect()
}

/// Right eigenvectors (columns) of the flux Jacobian, ordered like the characteristic speeds.
pub fn right_eigenvectors<const N: usize>(jac: &SMatrix<f64, N, N>, speeds: &[f64; N]) -> SMatrix<f64, N, N> {
    let mut r = SMatrix::<f64, N, N>::zeros();
    let mut c = 0;
    while c < N {
        let mut m = 1;
        while c + m < N && speeds[c + m] == speeds[c] {
            m += 1;
        }
        let b = jac - SMatrix::<f64, N, N>::identity() * speeds[c];
        for (k, v) in null_space(b, m).into_iter().enumerate() {
            r.set_column(c + k, &v);
        }
        c += m;
    }
    r
}

fn characteristic<const N: usize>(
    stencil: [&Conserved; 3],
    center: &Primitive,
    axis: Axis,
    h: f64,
    slots: [usize; N],
) -> Result<Conserved> {
    let [wl, wc, wr] = stencil;
    let jac = flux_jacobian::<N>(wc, axis, slots)?;
    let all = characteristic_speeds(center, axis);
    let speeds: [f64; N] =
        if N == 3 { std::array::from_fn(|i| all[[0, 1, 3][i]]) } else { std::array::from_fn(|i| all[i]) };
    let r = right_eigenvectors(&jac, &speeds);
    let l = r.try_inverse().ok_or_else(|| Error::DegenerateStencil("singular eigenvector matrix".into()))?;
    let cond = r.norm() * l.norm();
    if !(cond < MAX_CONDITION) {
        return Err(Error::DegenerateStencil(format!("condition number {cond:e}")));
    }
    let pick = |w: &Conserved| SVector::<f64, N>::from_fn(|i, _| w[slots[i]]);
    let dm = l * (pick(wc) - pick(wl));
    let dp = l * (pick(wr) - pick(wc));
    let lim = SVector::<f64, N>::from_fn(|i, _| van_leer(dm[i], dp[i]) / h);
    let s = r * lim;
    let mut out = [0.0; 4];
    for (i, &sl) in slots.iter().enumerate() {
        out[sl] = s[i];
    }
    Ok(out)
}
