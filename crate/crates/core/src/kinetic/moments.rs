//! Moments of the Juttner distribution, closed-form and by quadrature,
//! and recovery of the equilibrium from a moment tensor.

use super::quadrature::{psi_angular, AngularQuadrature, Half, Juttner};
use super::state::{Conserved, Primitive};
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix3, SymmetricEigen};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Contravariant index carried by each entry of Psi = (1, p^1, p^2, p^0).
const PSI_INDEX: [Option<usize>; 4] = [None, Some(1), Some(2), Some(0)];

fn metric(a: usize, b: usize) -> f64 {
    if a == b {
        METRIC[a]
    } else {
        0.0
    }
}

/// Closed-form equilibrium moment \int p^a p^b ... g dXi for one, two or three indices.
pub fn equilibrium_moment(s: &Primitive, idx: &[usize]) -> f64 {
    let u = s.four_velocity();
    let (n, t) = (s.n, s.t);
    match *idx {
        [] => panic!("zeroth moment diverges for a massless gas"),
        [a] => n * u[a],
        [a, b] => 4.0 * n * t * u[a] * u[b] - n * t * metric(a, b),
        [a, b, c] => {
            24.0 * n * t * t * u[a] * u[b] * u[c]
                - 4.0 * n * t * t * (metric(a, b) * u[c] + metric(a, c) * u[b] + metric(b, c) * u[a])
        }
        _ => panic!("moments above rank three are not needed"),
    }
}

/// M_k = \int p^k g Psi Psi^T dXi with k = 0 (time), 1 (x) or 2 (y).
pub fn moment_matrix(s: &Primitive, k: usize) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let idx: Vec<usize> = [Some(k), PSI_INDEX[i], PSI_INDEX[j]].into_iter().flatten().collect();
            m[i][j] = equilibrium_moment(s, &idx);
            m[j][i] = m[i][j];
        }
    }
    m
}

/// \int Psi p^k g dXi over a half space, k being the quadrature axis.
pub fn half_space_flux(s: &Primitive, quad: &AngularQuadrature, half: Half) -> Conserved {
    let j = Juttner::new(s);
    let k = quad.axis().index();
    let mut f = [0.0; 4];
    for node in quad.nodes(half) {
        let r = j.radial(j.doppler(&node.w));
        let psi = psi_angular(&node.w);
        let c = node.weight * node.w[k];
        f[0] += c * r[0];
        for i in 1..4 {
            f[i] += c * psi[i] * r[1];
        }
    }
    f
}

/// Particle current N^a and energy-momentum tensor T^ab restricted to indices 0, 1, 2.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentTensor {
    pub n: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl MomentTensor {
    pub fn equilibrium(s: &Primitive) -> Self {
        let mut m = MomentTensor::default();
        for a in 0..3 {
            m.n[a] = equilibrium_moment(s, &[a]);
            for b in 0..3 {
                m.t[a][b] = equilibrium_moment(s, &[a, b]);
            }
        }
        m
    }

    pub fn add(&mut self, other: &MomentTensor) {
        for a in 0..3 {
            self.n[a] += other.n[a];
            for b in 0..3 {
                self.t[a][b] += other.t[a][b];
            }
        }
    }

    /// The conserved vector (N^0, T^01, T^02, T^00).
    pub fn conserved(&self) -> Conserved {
        [self.n[0], self.t[0][1], self.t[0][2], self.t[0][0]]
    }

    /// Block alpha = (N^a, T^1a, T^2a, T^0a).
    pub fn block(&self, a: usize) -> [f64; 4] {
        [self.n[a], self.t[1][a], self.t[2][a], self.t[0][a]]
    }
}

/// Moments of a Juttner distribution over part of momentum space.
pub fn juttner_moments(s: &Primitive, quad: &AngularQuadrature, half: Half) -> MomentTensor {
    let j = Juttner::new(s);
    let mut m = MomentTensor::default();
    for node in quad.nodes(half) {
        let r = j.radial(j.doppler(&node.w));
        accumulate_tensor(&mut m, &node.w, node.weight * r[0], node.weight * r[1]);
    }
    m
}

/// Add c1 w^a to N^a and c2 w^a w^b to T^ab.
#[inline(always)]
pub(crate) fn accumulate_tensor(m: &mut MomentTensor, w: &[f64; 4], c1: f64, c2: f64) {
    for a in 0..3 {
        m.n[a] += c1 * w[a];
        let ca = c2 * w[a];
        for b in a..3 {
            m.t[a][b] += ca * w[b];
        }
    }
}

/// Symmetrise a tensor filled on its upper triangle.
pub(crate) fn symmetrise(m: &mut MomentTensor) {
    for a in 0..3 {
        for b in 0..a {
            m.t[a][b] = m.t[b][a];
        }
    }
}

/// Spatial dimension used by the recovery (1 ignores y entirely).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn count(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Find the Juttner state whose (N^a, T^ab) Landau frame matches `m`.
///
/// Solves T U = e G U for the covariant velocity. With the Cholesky factor
/// T = L L^T the problem becomes the symmetric eigenproblem of L^-1 G L^-T,
/// whose single positive eigenvalue is 1/e.
pub fn landau_recovery(m: &MomentTensor, dim: Dim) -> Result<Primitive> {
    match dim {
        Dim::One => {
            let t = Matrix2::new(m.t[0][0], m.t[0][1], m.t[1][0], m.t[1][1]);
            let g = Matrix2::new(1.0, 0.0, 0.0, -1.0);
            let (e, u) = landau_eigen(t, g)?;
            finish_recovery(m, e, [u[0], u[1], 0.0])
        }
        Dim::Two => {
            let t = Matrix3::from_fn(|a, b| m.t[a][b]);
            let g = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0));
            let (e, u) = landau_eigen(t, g)?;
            finish_recovery(m, e, [u[0], u[1], u[2]])
        }
    }
}

fn landau_eigen<D>(t: nalgebra::OMatrix<f64, D, D>, g: nalgebra::OMatrix<f64, D, D>) -> Result<(f64, Vec<f64>)>
where
    D: nalgebra::DimName + nalgebra::DimSub<nalgebra::U1>,
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<D, D>
        + nalgebra::allocator::Allocator<D>
        + nalgebra::allocator::Allocator<<D as nalgebra::DimSub<nalgebra::U1>>::Output>,
{
    let chol =
        t.clone().cholesky().ok_or_else(|| Error::non_physical("energy-momentum tensor is not positive definite"))?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| Error::non_physical("singular energy-momentum tensor"))?;
    let s = &l_inv * g * l_inv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let mut best: Option<(f64, usize)> = None;
    let mut positive = 0;
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu > 0.0 {
            positive += 1;
            if best.is_none_or(|(b, _)| mu > b) {
                best = Some((mu, i));
            }
        }
    }
    let (mu, i) = match (best, positive) {
        (Some(b), 1) => b,
        _ => return Err(Error::non_physical(format!("{positive} timelike eigenvectors in Landau frame"))),
    };
    let y = eig.eigenvectors.column(i).into_owned();
    let u = l_inv.transpose() * y;
    Ok((1.0 / mu, u.iter().copied().collect()))
}

fn finish_recovery(m: &MomentTensor, e: f64, u_cov: [f64; 3]) -> Result<Primitive> {
    let norm2 = u_cov[0] * u_cov[0] - u_cov[1] * u_cov[1] - u_cov[2] * u_cov[2];
    if !(norm2 > 0.0) || !(e > 0.0) {
        return Err(Error::non_physical("Landau velocity is not timelike"));
    }
    let scale = u_cov[0].signum() / norm2.sqrt();
    let u_low = u_cov.map(|x| x * scale);
    // U^0 = U_0, U^i = -U_i
    let n = u_low[0] * m.n[0] + u_low[1] * m.n[1] + u_low[2] * m.n[2];
    if !(n > 0.0) {
        return Err(Error::non_physical(format!("Landau density {n}")));
    }
    let g = u_low[0];
    Primitive::new(n, [-u_low[1] / g, -u_low[2] / g], e / (3.0 * n))
}

/// Juttner state matching the combined moments of two half-space distributions.
pub fn interface_equilibrium(
    left: &Primitive,
    right: &Primitive,
    quad: &AngularQuadrature,
    dim: Dim,
) -> Result<Primitive> {
    let mut m = juttner_moments(left, quad, Half::Positive);
    m.add(&juttner_moments(right, quad, Half::Negative));
    symmetrise(&mut m);
    landau_recovery(&m, dim)
}
