//! Coefficient matrices of the plasma (MHD) and vacuum (Maxwell) systems.
//!
//! Unknown orderings are `U = (p, v1, v2, v3, H1, H2, H3, S)` and
//! `V = (Hv1, Hv2, Hv3, E1, E2, E3)`.

use nalgebra::{DMatrix, SMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{EquilibriumState, Vec3};

pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Mat6 = SMatrix<f64, 6, 6>;

/// Levi-Civita symbol on indices `0..3`.
fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlasmaMatrices {
    pub a0: Mat8,
    /// `A1, A2, A3` of the symmetric MHD system at the basic state.
    pub a: [Mat8; 3],
    /// Constant-coefficient matrices: `A1 - kappa A0`, `A2`, `A3`.
    pub a_hat: [Mat8; 3],
}

/// `A0 = diag(1/(rho a^2), rho, rho, rho, 1, 1, 1, 1)`.
pub fn plasma_a0(rho: f64, a: f64) -> Mat8 {
    let mut m = Mat8::identity();
    m[(0, 0)] = 1.0 / (rho * a * a);
    for k in 1..4 {
        m[(k, k)] = rho;
    }
    m
}

/// Flux matrix of the symmetric MHD system in direction `j` (0-based).
pub fn plasma_flux(j: usize, rho: f64, a: f64, v: &Vec3, h: &Vec3) -> Mat8 {
    let mut m = Mat8::zeros();
    m[(0, 0)] = v[j] / (rho * a * a);
    m[(0, 1 + j)] = 1.0;
    m[(1 + j, 0)] = 1.0;
    for k in 0..3 {
        m[(1 + k, 1 + k)] = rho * v[j];
        m[(4 + k, 4 + k)] = v[j];
        for l in 0..3 {
            // momentum k against field l: -H_j d_kl + d_jk H_l
            let c = -h[j] * kron(k, l) + kron(j, k) * h[l];
            m[(1 + k, 4 + l)] = c;
            m[(4 + l, 1 + k)] = c;
        }
    }
    m[(7, 7)] = v[j];
    m
}

pub fn build_plasma_matrices(state: &EquilibriumState) -> PlasmaMatrices {
    let a0 = plasma_a0(state.rho, state.a);
    let a: [Mat8; 3] = std::array::from_fn(|j| plasma_flux(j, state.rho, state.a, &state.v, &state.h));
    let a_hat = [a[0] - a0 * state.kappa, a[1], a[2]];
    PlasmaMatrices { a0, a, a_hat }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumMatrices {
    /// `B1, B2, B3` with `eps dV/dt + sum B_j dV/dx_j = 0` equivalent to the curl equations.
    pub b: [Mat6; 3],
    /// `eps kappa I - B1`, the normal matrix in the flipped vacuum coordinates.
    pub b1_hat: Mat6,
}

/// Curl block `b_j` with `(b_j)_{ik} = e_{ijk}`, so that `sum_j b_j dE/dx_j = curl E`.
pub fn curl_block(j: usize) -> SMatrix<f64, 3, 3> {
    SMatrix::<f64, 3, 3>::from_fn(|i, k| levi_civita(i, j, k))
}

pub fn maxwell_flux(j: usize) -> Mat6 {
    let b = curl_block(j);
    let mut m = Mat6::zeros();
    for r in 0..3 {
        for c in 0..3 {
            m[(r, 3 + c)] = b[(r, c)];
            m[(3 + c, r)] = b[(r, c)];
        }
    }
    m
}

pub fn build_vacuum_matrices(state: &EquilibriumState) -> VacuumMatrices {
    let b: [Mat6; 3] = std::array::from_fn(maxwell_flux);
    let b1_hat = Mat6::identity() * (state.epsilon * state.kappa) - b[0];
    VacuumMatrices { b, b1_hat }
}

/// The `nu`-family of symmetric forms of the Maxwell system.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryMatrices {
    pub nu: Vec3,
    pub b0: Mat6,
    pub b: [Mat6; 3],
}

pub fn build_secondary_symmetrizer(nu: Vec3) -> Result<SecondaryMatrices> {
    let norm = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
    if norm >= 1.0 {
        return Err(Error::HyperbolicityViolated(format!(
            "secondary symmetrizer needs |nu| < 1, got {norm}"
        )));
    }
    let [n1, n2, n3] = nu;
    #[rustfmt::skip]
    let b0 = Mat6::from_row_slice(&[
        1.0, 0.0, 0.0, 0.0,  n3, -n2,
        0.0, 1.0, 0.0, -n3, 0.0,  n1,
        0.0, 0.0, 1.0,  n2, -n1, 0.0,
        0.0, -n3,  n2, 1.0, 0.0, 0.0,
         n3, 0.0, -n1, 0.0, 1.0, 0.0,
        -n2,  n1, 0.0, 0.0, 0.0, 1.0,
    ]);
    #[rustfmt::skip]
    let b1 = Mat6::from_row_slice(&[
         n1,  n2,  n3, 0.0, 0.0, 0.0,
         n2, -n1, 0.0, 0.0, 0.0, -1.0,
         n3, 0.0, -n1, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0,  n1,  n2,  n3,
        0.0, 0.0, 1.0,  n2, -n1, 0.0,
        0.0, -1.0, 0.0, n3, 0.0, -n1,
    ]);
    #[rustfmt::skip]
    let b2 = Mat6::from_row_slice(&[
        -n2,  n1, 0.0, 0.0, 0.0, 1.0,
         n1,  n2,  n3, 0.0, 0.0, 0.0,
        0.0,  n3, -n2, -1.0, 0.0, 0.0,
        0.0, 0.0, -1.0, -n2,  n1, 0.0,
        0.0, 0.0, 0.0,  n1,  n2,  n3,
        1.0, 0.0, 0.0, 0.0,  n3, -n2,
    ]);
    #[rustfmt::skip]
    let b3 = Mat6::from_row_slice(&[
        -n3, 0.0,  n1, 0.0, -1.0, 0.0,
        0.0, -n3,  n2, 1.0, 0.0, 0.0,
         n1,  n2,  n3, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, -n3, 0.0,  n1,
        -1.0, 0.0, 0.0, 0.0, -n3,  n2,
        0.0, 0.0, 0.0,  n1,  n2,  n3,
    ]);
    Ok(SecondaryMatrices { nu, b0, b: [b1, b2, b3] })
}

/// Boundary matrix of the vacuum system on a curved interface `x1 = phi(t, x2, x3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    pub dt_phi: f64,
    pub d2_phi: f64,
    pub d3_phi: f64,
    pub epsilon: f64,
    pub matrix: Mat6,
}

impl BoundaryMatrix {
    pub fn new(dt_phi: f64, d2_phi: f64, d3_phi: f64, epsilon: f64) -> Self {
        let b: [Mat6; 3] = std::array::from_fn(maxwell_flux);
        let matrix = Mat6::identity() * (epsilon * dt_phi) - b[0] + b[1] * d2_phi + b[2] * d3_phi;
        BoundaryMatrix {
            dt_phi,
            d2_phi,
            d3_phi,
            epsilon,
            matrix,
        }
    }

    /// `eps phi_t + r (x2), eps phi_t - r (x2), eps phi_t (x2)` with `r = sqrt(1 + phi_2^2 + phi_3^2)`,
    /// sorted descending.
    pub fn closed_form_eigenvalues(&self) -> [f64; 6] {
        let c = self.epsilon * self.dt_phi;
        let r = (1.0 + self.d2_phi * self.d2_phi + self.d3_phi * self.d3_phi).sqrt();
        [c + r, c + r, c, c, c - r, c - r]
    }

    /// Numerical spectrum, sorted descending.
    pub fn eigenvalues(&self) -> [f64; 6] {
        sorted_eigenvalues(&self.matrix)
    }
}

/// Eigenvalues of a symmetric 6x6 matrix in descending order.
pub fn sorted_eigenvalues(m: &Mat6) -> [f64; 6] {
    let eig = SymmetricEigen::new(*m);
    let mut out: [f64; 6] = std::array::from_fn(|i| eig.eigenvalues[i]);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Numbers of positive, negative and zero eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

pub fn inertia<const N: usize>(m: &SMatrix<f64, N, N>, tol: f64) -> Inertia {
    let dm = DMatrix::from_column_slice(N, N, m.as_slice());
    let eig = SymmetricEigen::new(dm);
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for &l in eig.eigenvalues.iter() {
        if l > tol {
            out.positive += 1;
        } else if l < -tol {
            out.negative += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

/// Plane wave `(Hbar, Ebar) exp(i (k.x - omega t))` for the vacuum fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub omega: f64,
    pub k: Vec3,
    pub h_bar: [Complex64; 3],
    pub e_bar: [Complex64; 3],
}

impl PlaneWave {
    /// Transverse Maxwell wave: `Hbar = k x Ebar / (eps omega)` with `k . Ebar = 0` and
    /// `eps omega = |k|`. `e_dir` is projected onto the plane orthogonal to `k`.
    pub fn transverse(k: Vec3, e_dir: [Complex64; 3], epsilon: f64) -> Self {
        let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let kc: [Complex64; 3] = k.map(|x| Complex64::new(x, 0.0));
        let dot = kc[0] * e_dir[0] + kc[1] * e_dir[1] + kc[2] * e_dir[2];
        let e_bar: [Complex64; 3] = std::array::from_fn(|i| e_dir[i] - kc[i] * dot / (kn * kn));
        let omega = kn / epsilon;
        let cross = [
            kc[1] * e_bar[2] - kc[2] * e_bar[1],
            kc[2] * e_bar[0] - kc[0] * e_bar[2],
            kc[0] * e_bar[1] - kc[1] * e_bar[0],
        ];
        let h_bar = cross.map(|c| c / (epsilon * omega));
        PlaneWave {
            omega,
            k,
            h_bar,
            e_bar,
        }
    }
}

/// `|(-i eps omega B0 + i sum k_j B_j) (Hbar, Ebar)|` for the secondary system at `nu`.
pub fn plane_wave_residual(wave: &PlaneWave, nu: Vec3, epsilon: f64) -> Result<f64> {
    let sec = build_secondary_symmetrizer(nu)?;
    let i = Complex64::i();
    let amp: [Complex64; 6] = [
        wave.h_bar[0],
        wave.h_bar[1],
        wave.h_bar[2],
        wave.e_bar[0],
        wave.e_bar[1],
        wave.e_bar[2],
    ];
    let mut sq = 0.0;
    for r in 0..6 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, x) in amp.iter().enumerate() {
            let sym = -epsilon * wave.omega * sec.b0[(r, c)]
                + wave.k[0] * sec.b[0][(r, c)]
                + wave.k[1] * sec.b[1][(r, c)]
                + wave.k[2] * sec.b[2][(r, c)];
            acc += i * sym * x;
        }
        sq += acc.norm_sqr();
    }
    Ok(sq.sqrt())
}

/// All matrices for a state, as arrays of rows.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub a0: Vec<Vec<f64>>,
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
    pub a3: Vec<Vec<f64>>,
    pub a1_hat: Vec<Vec<f64>>,
    pub a2_hat: Vec<Vec<f64>>,
    pub a3_hat: Vec<Vec<f64>>,
    pub b1: Vec<Vec<f64>>,
    pub b2: Vec<Vec<f64>>,
    pub b3: Vec<Vec<f64>>,
    pub b1_hat: Vec<Vec<f64>>,
    pub nu: Vec3,
    pub sb0: Vec<Vec<f64>>,
    pub sb1: Vec<Vec<f64>>,
    pub sb2: Vec<Vec<f64>>,
    pub sb3: Vec<Vec<f64>>,
    pub boundary: Vec<Vec<f64>>,
    pub boundary_eigenvalues: [f64; 6],
}

pub fn rows<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> Vec<Vec<f64>> {
    (0..R).map(|r| (0..C).map(|c| m[(r, c)]).collect()).collect()
}

pub fn dump_matrices(state: &EquilibriumState) -> Result<MatrixDump> {
    let p = build_plasma_matrices(state);
    let v = build_vacuum_matrices(state);
    let sec = build_secondary_symmetrizer(state.nu())?;
    // planar interface moving with speed kappa
    let bm = BoundaryMatrix::new(state.kappa, 0.0, 0.0, state.epsilon);
    Ok(MatrixDump {
        a0: rows(&p.a0),
        a1: rows(&p.a[0]),
        a2: rows(&p.a[1]),
        a3: rows(&p.a[2]),
        a1_hat: rows(&p.a_hat[0]),
        a2_hat: rows(&p.a_hat[1]),
        a3_hat: rows(&p.a_hat[2]),
        b1: rows(&v.b[0]),
        b2: rows(&v.b[1]),
        b3: rows(&v.b[2]),
        b1_hat: rows(&v.b1_hat),
        nu: sec.nu,
        sb0: rows(&sec.b0),
        sb1: rows(&sec.b[0]),
        sb2: rows(&sec.b[1]),
        sb3: rows(&sec.b[2]),
        boundary: rows(&bm.matrix),
        boundary_eigenvalues: bm.eigenvalues(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn normalized_a0_is_identity() {
        let s = EquilibriumState::pcase(0.2, 1.0, 1.0, 0.0, 1e-6);
        assert_eq!(build_plasma_matrices(&s).a0, Mat8::identity());
    }

    /// General MHD flux matrices against their entrywise displays.
    #[test]
    fn flux_matrices_match_displays() {
        let (rho, a) = (1.3, 0.7);
        let v = [0.2, -0.4, 0.9];
        let h = [0.5, 1.1, -0.6];
        let r = rho * a * a;
        let [v1, v2, v3] = v;
        let [h1, h2, h3] = h;
        #[rustfmt::skip]
        let a1 = Mat8::from_row_slice(&[
            v1 / r, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            1.0, rho * v1, 0.0, 0.0, 0.0, h2, h3, 0.0,
            0.0, 0.0, rho * v1, 0.0, 0.0, -h1, 0.0, 0.0,
            0.0, 0.0, 0.0, rho * v1, 0.0, 0.0, -h1, 0.0,
            0.0, 0.0, 0.0, 0.0, v1, 0.0, 0.0, 0.0,
            0.0, h2, -h1, 0.0, 0.0, v1, 0.0, 0.0,
            0.0, h3, 0.0, -h1, 0.0, 0.0, v1, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v1,
        ]);
        #[rustfmt::skip]
        let a2 = Mat8::from_row_slice(&[
            v2 / r, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            0.0, rho * v2, 0.0, 0.0, -h2, 0.0, 0.0, 0.0,
            1.0, 0.0, rho * v2, 0.0, h1, 0.0, h3, 0.0,
            0.0, 0.0, 0.0, rho * v2, 0.0, 0.0, -h2, 0.0,
            0.0, -h2, h1, 0.0, v2, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, v2, 0.0, 0.0,
            0.0, 0.0, h3, -h2, 0.0, 0.0, v2, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v2,
        ]);
        #[rustfmt::skip]
        let a3 = Mat8::from_row_slice(&[
            v3 / r, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
            0.0, rho * v3, 0.0, 0.0, -h3, 0.0, 0.0, 0.0,
            0.0, 0.0, rho * v3, 0.0, 0.0, -h3, 0.0, 0.0,
            1.0, 0.0, 0.0, rho * v3, h1, h2, 0.0, 0.0,
            0.0, -h3, 0.0, h1, v3, 0.0, 0.0, 0.0,
            0.0, 0.0, -h3, h2, 0.0, v3, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v3, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, v3,
        ]);
        assert_eq!(plasma_flux(0, rho, a, &v, &h), a1);
        assert_eq!(plasma_flux(1, rho, a, &v, &h), a2);
        assert_eq!(plasma_flux(2, rho, a, &v, &h), a3);
    }

    #[test]
    fn constant_coefficient_a1_display() {
        let mut s = EquilibriumState::pcase(0.2, 1.0, 0.8, 0.0, 1e-6);
        s.h = [0.0, 0.3, 0.8];
        s.hv = [0.0, 1.0, 0.1];
        s.v = [-0.05, 0.4, 0.1];
        s.kappa = -0.05;
        let m = build_plasma_matrices(&s);
        let mut expected = Mat8::zeros();
        expected[(0, 1)] = 1.0;
        expected[(1, 0)] = 1.0;
        expected[(1, 5)] = 0.3;
        expected[(5, 1)] = 0.3;
        expected[(1, 6)] = 0.8;
        expected[(6, 1)] = 0.8;
        assert!((m.a_hat[0] - expected).abs().max() < 1e-15);
    }

    #[test]
    fn a1_hat_nonzero_eigenvalues() {
        let s = EquilibriumState::pcase(0.2, 1.0, 1.0, 0.0, 1e-6);
        let m = build_plasma_matrices(&s);
        let eig = SymmetricEigen::new(m.a_hat[0]);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        assert!((ev[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((ev[7] - 2f64.sqrt()).abs() < 1e-12);
        assert!(ev[1..7].iter().all(|x| x.abs() < 1e-12));
        assert_eq!(
            inertia(&m.a_hat[0], 1e-10),
            Inertia { positive: 1, negative: 1, zero: 6 }
        );
    }

    #[test]
    fn printed_b_blocks() {
        // b2 and b3 as printed; b1 printed with the opposite sign of the curl (see below).
        #[rustfmt::skip]
        let b2 = SMatrix::<f64, 3, 3>::from_row_slice(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        #[rustfmt::skip]
        let b3 = SMatrix::<f64, 3, 3>::from_row_slice(&[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        #[rustfmt::skip]
        let b1_printed = SMatrix::<f64, 3, 3>::from_row_slice(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
        assert_eq!(curl_block(1), b2);
        assert_eq!(curl_block(2), b3);
        assert_eq!(curl_block(0), -b1_printed);
    }

    #[test]
    fn b1_hat_and_boundary_display() {
        let s = EquilibriumState {
            v: [-0.1, 0.0, 0.0],
            kappa: -0.1,
            e: [0.5, 0.0, 1e-7],
            ..EquilibriumState::pcase(0.5, 1.0, 1.0, 0.0, 1e-6)
        };
        let v = build_vacuum_matrices(&s);
        for i in 0..6 {
            assert_eq!(v.b1_hat[(i, i)], -1e-7);
        }
        // printed constant-coefficient display: (2,6) = 1, (3,5) = -1 (1-based)
        assert_eq!(v.b1_hat[(1, 5)], 1.0);
        assert_eq!(v.b1_hat[(2, 4)], -1.0);
        assert_eq!(v.b1_hat[(4, 2)], -1.0);
        assert_eq!(v.b1_hat[(5, 1)], 1.0);
        assert!(v.b1_hat.determinant().abs() > 0.0);

        let (e, pt, p2, p3) = (0.3, -0.7, 0.4, -1.2);
        let c = e * pt;
        #[rustfmt::skip]
        let printed = Mat6::from_row_slice(&[
            c, 0.0, 0.0, 0.0, -p3, p2,
            0.0, c, 0.0, p3, 0.0, 1.0,
            0.0, 0.0, c, -p2, -1.0, 0.0,
            0.0, p3, -p2, c, 0.0, 0.0,
            -p3, 0.0, -1.0, 0.0, c, 0.0,
            p2, 1.0, 0.0, 0.0, 0.0, c,
        ]);
        assert_eq!(BoundaryMatrix::new(pt, p2, p3, e).matrix, printed);
    }

    #[test]
    fn secondary_reduces_to_maxwell() {
        let sec = build_secondary_symmetrizer([0.0; 3]).unwrap();
        assert_eq!(sec.b0, Mat6::identity());
        for j in 0..3 {
            assert_eq!(sec.b[j], maxwell_flux(j));
        }
    }

    #[test]
    fn secondary_b0_spectrum() {
        let sec = build_secondary_symmetrizer([0.3, 0.0, 0.0]).unwrap();
        let ev = sorted_eigenvalues(&sec.b0);
        let expected = [1.3, 1.3, 1.0, 1.0, 0.7, 0.7];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            build_secondary_symmetrizer([1.0, 0.0, 0.0]),
            Err(Error::HyperbolicityViolated(_))
        ));
    }

    #[test]
    fn curl_of_linear_field() {
        // E = (x2, 0, 0): only dE1/dx2 = 1 is nonzero; (curl E)_3 = -1.
        let mut grad = [[0.0f64; 6]; 3];
        grad[1][3] = 1.0;
        let mut out = [0.0; 6];
        for (j, g) in grad.iter().enumerate() {
            let b = maxwell_flux(j);
            for r in 0..6 {
                out[r] += (0..6).map(|c| b[(r, c)] * g[c]).sum::<f64>();
            }
        }
        assert_eq!(out, [0.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn plane_wave_examples() {
        let eps = 1e-3;
        let wave = PlaneWave {
            omega: 1.0 / eps,
            k: [0.0, 1.0, 0.0],
            h_bar: [c(0.0), c(0.0), c(-1.0)],
            e_bar: [c(1.0), c(0.0), c(0.0)],
        };
        assert!(plane_wave_residual(&wave, [0.0; 3], eps).unwrap() <= 1e-12);
        assert!(plane_wave_residual(&wave, [0.3, 0.0, 0.0], eps).unwrap() <= 1e-12);

        let bad = PlaneWave {
            e_bar: [c(0.0), c(1.0), c(0.0)],
            ..wave
        };
        assert!(plane_wave_residual(&bad, [0.3, 0.0, 0.0], eps).unwrap() > 1e-3);
    }

    #[test]
    fn dump_contains_everything() {
        let s = EquilibriumState::pcase(0.2, 1.0, 1.0, 0.1, 1e-6);
        let d = dump_matrices(&s).unwrap();
        assert_eq!(d.a0.len(), 8);
        assert_eq!(d.sb0.len(), 6);
        assert_eq!(d.a1_hat[1][6], 1.0);
    }
}
