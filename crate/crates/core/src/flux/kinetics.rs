//! Taylor coefficients of the interface distributions.

use crate::error::{Error, Result};
use crate::kinetic::{moment_matrix, Conserved, Primitive};
use nalgebra::{Matrix4, Vector4};

/// Linear form in Psi: a(p) = a[0] + a[1] p^1 + a[2] p^2 + a[3] p^0.
pub type PsiPoly = [f64; 4];

/// Split a(p) for direction w into the |p|^0 and |p|^1 parts.
#[inline(always)]
pub fn split_poly(a: &PsiPoly, w: &[f64; 4]) -> (f64, f64) {
    (a[0], a[1] * w[1] + a[2] * w[2] + a[3])
}

/// Non-equilibrium deviation of a distribution, f = g (1 - tau phi / (U.p)), with
/// phi(p) = sum_mu p^mu (sum_nu c[mu][nu] p^nu + c[mu][4]).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Deviation(pub [[f64; 5]; 4]);

impl Deviation {
    /// The Euler form phi = p^0 A(p) + p^1 a(p) + p^2 b(p).
    pub fn from_taylor(big_a: &PsiPoly, a: &PsiPoly, b: &PsiPoly) -> Self {
        let row = |c: &PsiPoly| [c[3], c[1], c[2], 0.0, c[0]];
        Deviation([row(big_a), row(a), row(b), [0.0; 5]])
    }

    /// (q1, q2) with phi(|p| w) = |p| q1 + |p|^2 q2.
    #[inline(always)]
    pub fn split(&self, w: &[f64; 4]) -> (f64, f64) {
        let c = &self.0;
        let mut q1 = 0.0;
        let mut q2 = 0.0;
        for mu in 0..4 {
            let r = &c[mu];
            q1 += w[mu] * r[4];
            q2 += w[mu] * (r[0] + r[1] * w[1] + r[2] * w[2] + r[3] * w[3]);
        }
        (q1, q2)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|&x| x == 0.0))
    }
}

/// One side of an interface: Juttner state, spatial Taylor coefficients and deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideKinetics {
    pub state: Primitive,
    pub a: PsiPoly,
    pub b: PsiPoly,
    pub deviation: Deviation,
}

/// The interface equilibrium and its space and time Taylor coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterKinetics {
    pub state: Primitive,
    pub a: PsiPoly,
    pub b: PsiPoly,
    pub big_a: PsiPoly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceKinetics {
    pub left: SideKinetics,
    pub right: SideKinetics,
    pub center: CenterKinetics,
}

fn mat(m: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

/// Taylor coefficients solving M0 a = Wx, M0 b = Wy and M0 A = -(M1 a + M2 b).
pub fn slope_coefficients(s: &Primitive, wx: &Conserved, wy: &Conserved) -> Result<(PsiPoly, PsiPoly, PsiPoly)> {
    let chol = mat(&moment_matrix(s, 0)).cholesky().ok_or_else(|| Error::SingularMomentMatrix(format!("{s:?}")))?;
    let a = chol.solve(&Vector4::from(*wx));
    let b = chol.solve(&Vector4::from(*wy));
    let rhs = -(mat(&moment_matrix(s, 1)) * a + mat(&moment_matrix(s, 2)) * b);
    let big_a = chol.solve(&rhs);
    Ok((a.into(), b.into(), big_a.into()))
}

/// Solve M0 c = rhs for a single right-hand side.
pub fn solve_m0(s: &Primitive, rhs: &Conserved) -> Result<PsiPoly> {
    let chol = mat(&moment_matrix(s, 0)).cholesky().ok_or_else(|| Error::SingularMomentMatrix(format!("{s:?}")))?;
    Ok(chol.solve(&Vector4::from(*rhs)).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::{conserved_from_primitive, conserved_jacobian, euler_flux, Axis};

    #[test]
    fn deviation_matches_direct_evaluation() {
        let big_a = [0.1, -0.2, 0.3, 0.4];
        let a = [1.0, 2.0, -1.0, 0.5];
        let b = [-0.3, 0.2, 0.7, -0.1];
        let d = Deviation::from_taylor(&big_a, &a, &b);
        let w = [1.0, 0.3, -0.5, (1.0f64 - 0.09 - 0.25).sqrt()];
        let pm = 2.3;
        let p = w.map(|x| pm * x);
        let poly = |c: &PsiPoly| c[0] + c[1] * p[1] + c[2] * p[2] + c[3] * p[0];
        let direct = p[0] * poly(&big_a) + p[1] * poly(&a) + p[2] * poly(&b);
        let (q1, q2) = d.split(&w);
        assert!((pm * q1 + pm * pm * q2 - direct).abs() < 1e-12);
    }

    #[test]
    fn compatibility_reproduces_euler_time_derivative() {
        // For a smooth Euler flow, <A> equals the moment time derivative -dF/dx.
        let s = Primitive::new(1.2, [0.3, 0.0], 0.9).unwrap();
        let ds = [0.4, -0.1, 0.0, 0.2];
        let wx: Conserved = {
            let j = conserved_jacobian(&s);
            let mut out = [0.0; 4];
            for r in 0..4 {
                for c in 0..4 {
                    out[r] += j[r][c] * ds[c];
                }
            }
            out
        };
        let (_, _, big_a) = slope_coefficients(&s, &wx, &[0.0; 4]).unwrap();
        let m0 = moment_matrix(&s, 0);
        let mut wt = [0.0; 4];
        for r in 0..4 {
            for c in 0..4 {
                wt[r] += m0[r][c] * big_a[c];
            }
        }
        // -dF/dx by finite differences along the primitive direction
        let h = 1e-6;
        let shift = |e: f64| Primitive::new(s.n + e * ds[0], [s.u[0] + e * ds[1], 0.0], s.t + e * ds[3]).unwrap();
        let fp = euler_flux(&shift(h), Axis::X);
        let fm = euler_flux(&shift(-h), Axis::X);
        for r in 0..4 {
            let dfdx = (fp[r] - fm[r]) / (2.0 * h);
            assert!((wt[r] + dfdx).abs() < 1e-7, "slot {r}: {} vs {}", wt[r], -dfdx);
        }
        let _ = conserved_from_primitive(&s);
    }
}
