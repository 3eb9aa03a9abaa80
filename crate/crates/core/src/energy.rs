//! Energy method for the constant-coefficient problem.
//!
//! The interface terms of the energy identity are rewritten as a quadratic form
//! in the tangential derivatives
//! `Z = (d_t U, d_t V, d_2 U, d_2 V, d_3 U, d_3 V)` (42 coordinates). The form
//! `A0_stack + mu Q0` being positive definite is a sufficient stability condition.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{build_secondary_symmetrizer, plasma_a0};
use crate::poly::Poly;
use crate::state::{CaseFlag, EquilibriumState, CONSTRAINT_TOL};

pub const ENERGY_DIM: usize = 42;

/// Eigenvalues within this distance of zero are not trusted for a verdict.
pub const EIG_TOL: f64 = 1e-9;

/// Tangential differentiation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dir {
    T,
    X2,
    X3,
}

impl Dir {
    pub const ALL: [Dir; 3] = [Dir::T, Dir::X2, Dir::X3];

    fn index(self) -> usize {
        match self {
            Dir::T => 0,
            Dir::X2 => 1,
            Dir::X3 => 2,
        }
    }
}

/// Unknowns of the coupled system: plasma `U` then vacuum `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    P,
    V1,
    V2,
    V3,
    H1,
    H2,
    H3,
    S,
    Hv1,
    Hv2,
    Hv3,
    E1,
    E2,
    E3,
}

/// A coordinate of `Z`: derivative direction and field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coord {
    pub dir: Dir,
    pub field: Field,
}

impl Coord {
    pub fn new(dir: Dir, field: Field) -> Self {
        Coord { dir, field }
    }

    pub fn index(self) -> usize {
        14 * self.dir.index() + self.field as usize
    }
}

/// Resolution of the interface-function derivatives through boundary traces:
/// `d_beta phi = a[beta][0] H1 + a[beta][1] Hv1` for `beta` in `(t, 2, 3)`, where
/// the `t` row excludes the `v1` trace contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResolution {
    pub mu_hat: f64,
    pub a_coeffs: [[f64; 2]; 3],
}

pub fn boundary_resolution(state: &EquilibriumState) -> Result<BoundaryResolution> {
    let d = state.noncollinearity();
    if d.abs() <= CONSTRAINT_TOL {
        return Err(Error::CollinearFields(d));
    }
    let (h2, h3) = (state.h[1], state.h[2]);
    let (k2, k3) = (state.hv[1], state.hv[2]);
    let (v2, v3) = (state.v[1], state.v[2]);
    let a2 = [k3 / d, -h3 / d];
    let a3 = [-k2 / d, h2 / d];
    let at = [-v2 * a2[0] - v3 * a3[0], -v2 * a2[1] - v3 * a3[1]];
    Ok(BoundaryResolution {
        mu_hat: state.mu_hat(),
        a_coeffs: [at, a2, a3],
    })
}

/// Bilinear term `coeff * Z_a * Z_b` of `(Q0 Z, Z) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coeff: f64,
    a: Coord,
    b: Coord,
}

/// Normal derivative of a trace field expressed through tangential derivatives.
fn normal_derivative(field: Field, state: &EquilibriumState) -> Vec<(f64, Coord)> {
    use Dir::*;
    use Field::*;
    let c = Coord::new;
    match field {
        E1 => vec![(1.0, c(X2, E2)), (1.0, c(X3, E3))],
        H1 => vec![(-1.0, c(X2, H2)), (-1.0, c(X3, H3))],
        Hv1 => vec![(1.0, c(X2, Hv2)), (1.0, c(X3, Hv3))],
        V1 => {
            let r = 1.0 / (state.rho * state.a * state.a);
            vec![
                (-r, c(T, P)),
                (-r * state.v[1], c(X2, P)),
                (-1.0, c(X2, V2)),
                (-r * state.v[2], c(X3, P)),
                (-1.0, c(X3, V3)),
            ]
        }
        other => panic!("no normal-derivative rule for {other:?}"),
    }
}

/// Rewrite the interface integral of `coeff * f * d_k E1` as a volume integral
/// of tangential-derivative products.
fn push_trace_term(terms: &mut Vec<Term>, coeff: f64, f: Field, k: Dir, state: &EquilibriumState) {
    use Field::*;
    if coeff == 0.0 {
        return;
    }
    match k {
        Dir::T => {
            // uses div E = 0: d_t E1 at the boundary is traded for d_2, d_3 of E2, E3
            terms.push(Term { coeff, a: Coord::new(Dir::X2, f), b: Coord::new(Dir::T, E2) });
            terms.push(Term { coeff, a: Coord::new(Dir::X3, f), b: Coord::new(Dir::T, E3) });
            for (c, z) in normal_derivative(f, state) {
                terms.push(Term { coeff: -coeff * c, a: z, b: Coord::new(Dir::T, E1) });
            }
        }
        Dir::X2 | Dir::X3 => {
            for (c, z) in normal_derivative(E1, state) {
                terms.push(Term { coeff: coeff * c, a: Coord::new(k, f), b: z });
            }
            for (c, z) in normal_derivative(f, state) {
                terms.push(Term { coeff: -coeff * c, a: z, b: Coord::new(k, E1) });
            }
        }
    }
}

fn interface_terms(state: &EquilibriumState, res: &BoundaryResolution) -> Vec<Term> {
    let mut terms = Vec::new();
    push_trace_term(&mut terms, 1.0, Field::V1, Dir::T, state);
    for (beta, dir) in Dir::ALL.into_iter().enumerate() {
        push_trace_term(&mut terms, res.a_coeffs[beta][0], Field::H1, dir, state);
        push_trace_term(&mut terms, res.a_coeffs[beta][1], Field::Hv1, dir, state);
    }
    terms
}

/// The symmetric matrix `Q0` with `(Q0 Z, Z)` equal to twice the interface terms.
pub fn q0_matrix(state: &EquilibriumState) -> Result<DMatrix<f64>> {
    let res = boundary_resolution(state)?;
    let mut q = DMatrix::<f64>::zeros(ENERGY_DIM, ENERGY_DIM);
    for t in interface_terms(state, &res) {
        let (i, j) = (t.a.index(), t.b.index());
        q[(i, j)] += t.coeff;
        q[(j, i)] += t.coeff;
    }
    Ok(q)
}

/// `blockdiag(A0, SB0, A0, SB0, A0, SB0)` with `SB0` at `nu = eps v`.
pub fn symmetrizer_stack(state: &EquilibriumState) -> Result<DMatrix<f64>> {
    let a0 = plasma_a0(state.rho, state.a);
    let b0 = build_secondary_symmetrizer(state.nu())?.b0;
    let mut m = DMatrix::<f64>::zeros(ENERGY_DIM, ENERGY_DIM);
    for blk in 0..3 {
        let o = 14 * blk;
        m.view_mut((o, o), (8, 8)).copy_from(&a0);
        m.view_mut((o + 8, o + 8), (6, 6)).copy_from(&b0);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyForm {
    pub dimension: usize,
    pub mu_hat: f64,
    pub matrix: DMatrix<f64>,
    pub min_eig: f64,
}

impl EnergyForm {
    pub fn from_matrix(matrix: DMatrix<f64>, mu_hat: f64) -> Self {
        let min_eig = min_eigenvalue(&matrix);
        EnergyForm {
            dimension: matrix.nrows(),
            mu_hat,
            matrix,
            min_eig,
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `M = A0_stack + mu Q0`.
pub fn assemble_energy_form(state: &EquilibriumState) -> Result<EnergyForm> {
    let mu = state.mu_hat();
    let m = symmetrizer_stack(state)? + q0_matrix(state)? * mu;
    Ok(EnergyForm::from_matrix(m, mu))
}

/// The form with the `O(eps)` terms dropped: `nu = 0` and `mu = E1`.
pub fn leading_order_form(state: &EquilibriumState) -> Result<EnergyForm> {
    let base = symmetrizer_stack(&EquilibriumState { epsilon: 0.0, ..*state })?;
    let m = base + q0_matrix(state)? * state.e[0];
    Ok(EnergyForm::from_matrix(m, state.e[0]))
}

/// Characteristic polynomial of the particular-case energy form, as four factors in `y = (1 - x)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PCasePolynomial {
    pub e1: f64,
    pub hv2: f64,
    pub h3: f64,
    pub v3: f64,
    /// Ascending coefficients of each factor in `y`.
    pub factors: [Vec<f64>; 4],
}

impl PCasePolynomial {
    pub fn new(e1: f64, hv2: f64, h3: f64, v3: f64) -> Self {
        let e2 = e1 * e1;
        let (k2, h3s, v3s) = (hv2 * hv2, h3 * h3, v3 * v3);
        let f1 = vec![-2.0 * e2 / k2, 1.0];
        let f2 = vec![-e2 * (1.0 + v3s / h3s), 1.0];
        // (y - e2)(y - c) - w (y - d)
        let c = 2.0 * e2 * (k2 + h3s) / (k2 * h3s);
        let d = 2.0 * e2 / k2;
        let w = v3s * e2 / h3s;
        let f3 = vec![e2 * c + w * d, -(e2 + c) - w, 1.0];
        // y (y - g) - u (y - h)
        let g = 2.0 * e2 * (1.0 + v3s) / h3s;
        let u = e2 * (3.0 + v3s);
        let h = 2.0 * e2 / h3s;
        let f4 = vec![u * h, -g - u, 1.0];
        PCasePolynomial {
            e1,
            hv2,
            h3,
            v3,
            factors: [f1, f2, f3, f4],
        }
    }

    /// `Q(y)`, the product of the four factors.
    pub fn q_poly(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::from_real(&[1.0]), |acc, f| acc.mul(&Poly::from_real(f)))
    }

    /// All six roots of `Q(y)`.
    pub fn q_roots(&self) -> Vec<Complex64> {
        self.factors
            .iter()
            .flat_map(|f| Poly::from_real(f).roots())
            .collect()
    }

    /// `P(x) = Q((1 - x)^2)`, ascending coefficients in `x`.
    pub fn px(&self) -> Poly {
        let y = Poly::from_real(&[1.0, -2.0, 1.0]);
        self.q_poly().compose(&y)
    }

    /// `1 - max Re y`: positive iff every root of `P(x)` is positive.
    pub fn root_margin(&self) -> f64 {
        1.0 - self
            .q_roots()
            .iter()
            .map(|y| y.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn pcase_characteristic_poly(state: &EquilibriumState) -> Result<PCasePolynomial> {
    if state.classify() != CaseFlag::PCase {
        return Err(Error::NotPCase);
    }
    Ok(PCasePolynomial::new(state.e[0], state.hv[1], state.h[2], state.v[2]))
}

/// The four particular-case inequalities, each written as `margin > 0`.
pub fn posdef_margins(e1: f64, hv2: f64, h3: f64, v3: f64) -> [f64; 4] {
    let e2 = e1 * e1;
    let (k2, h3s, v3s) = (hv2 * hv2, h3 * h3, v3 * v3);
    [
        k2 / 2.0 - e2,
        1.0 - e2 * (1.0 + v3s / h3s),
        2.0 * e2 * e2 * (k2 + h3s + v3s) / (h3s * k2)
            - e2 * (1.0 + 2.0 * (h3s + k2) / (h3s * k2) + v3s / h3s)
            + 1.0,
        2.0 * e2 * e2 * (3.0 + v3s) / h3s - e2 * (3.0 + v3s + 2.0 * (1.0 + v3s) / h3s) + 1.0,
    ]
}

/// Upper bound on `E1^2` for the static particular case.
pub fn static_threshold(hv2: f64, h3: f64) -> f64 {
    let (k2, h3s) = (hv2 * hv2, h3 * h3);
    (1.0f64 / 3.0).min(k2 * h3s / (2.0 * (k2 + h3s)))
}

/// `threshold - E1^2`, positive iff the static closed form holds.
pub fn static_margin(e1: f64, hv2: f64, h3: f64) -> f64 {
    static_threshold(hv2, h3) - e1 * e1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityVerdict {
    Sufficient,
    NotSufficient,
    /// Smallest eigenvalue within `EIG_TOL` of zero.
    Indeterminate,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: StabilityVerdict,
    pub case: CaseFlag,
    pub witness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eig: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_margin: Option<f64>,
}

pub fn check_sufficient_stability(state: &EquilibriumState) -> StabilityReport {
    let case = state.classify();
    if case == CaseFlag::Collinear || state.is_collinear() {
        return StabilityReport {
            verdict: StabilityVerdict::Inapplicable,
            case,
            witness: format!(
                "tangential magnetic fields are collinear (H2*Hv3 - H3*Hv2 = {:e})",
                state.noncollinearity()
            ),
            min_eig: None,
            inequalities: None,
            closed_form_margin: None,
        };
    }
    let min_eig = match assemble_energy_form(state) {
        Ok(f) => Some(f.min_eig),
        Err(_) => None,
    };

    if case == CaseFlag::PCase {
        let (e1, hv2, h3, v3) = (state.e[0], state.hv[1], state.h[2], state.v[2]);
        let m = posdef_margins(e1, hv2, h3, v3);
        let failed = m.iter().position(|&x| x <= 0.0);
        let closed_form_margin = (v3 == 0.0).then(|| static_margin(e1, hv2, h3));
        let (verdict, witness) = match failed {
            None => {
                let least = m.iter().copied().fold(f64::INFINITY, f64::min);
                (
                    StabilityVerdict::Sufficient,
                    format!("all four inequalities hold; smallest margin {least:e}"),
                )
            }
            Some(i) => (
                StabilityVerdict::NotSufficient,
                format!("inequality {} fails with margin {:e}", i + 1, m[i]),
            ),
        };
        return StabilityReport {
            verdict,
            case,
            witness,
            min_eig,
            inequalities: Some(m),
            closed_form_margin,
        };
    }

    let Some(min_eig) = min_eig else {
        return StabilityReport {
            verdict: StabilityVerdict::Inapplicable,
            case,
            witness: "secondary symmetrizer not positive definite".into(),
            min_eig: None,
            inequalities: None,
            closed_form_margin: None,
        };
    };
    let verdict = if min_eig > EIG_TOL {
        StabilityVerdict::Sufficient
    } else if min_eig < -EIG_TOL {
        StabilityVerdict::NotSufficient
    } else {
        StabilityVerdict::Indeterminate
    };
    StabilityReport {
        verdict,
        case,
        witness: format!("smallest eigenvalue of the energy form is {min_eig:e}"),
        min_eig: Some(min_eig),
        inequalities: None,
        closed_form_margin: None,
    }
}
