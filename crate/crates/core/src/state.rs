//! The unperturbed piecewise-constant flow and its case classification.
//!
//! Plasma occupies `x1 > kappa t`, vacuum `x1 < kappa t`. All quantities are
//! dimensionless; density and sound speed default to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for the interface equalities and zero tests.
pub const CONSTRAINT_TOL: f64 = 1e-12;

pub type Vec3 = [f64; 3];

/// Constant plasma state `(p, v, H, S)` and vacuum state `(Hv, E)` about which
/// the interface problem is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateInput")]
pub struct EquilibriumState {
    pub p: f64,
    pub v: Vec3,
    #[serde(rename = "H")]
    pub h: Vec3,
    #[serde(rename = "S")]
    pub s: f64,
    /// Vacuum magnetic field.
    #[serde(rename = "Hv")]
    pub hv: Vec3,
    /// Vacuum electric field.
    #[serde(rename = "E")]
    pub e: Vec3,
    /// Interface speed.
    pub kappa: f64,
    /// Ratio of the reference sound speed to the speed of light.
    pub epsilon: f64,
    pub rho: f64,
    pub a: f64,
}

/// Which analytically tractable family a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseFlag {
    GeneralNonCollinear,
    UnflFamily,
    PCase,
    VacuumFieldAlongX3,
    Collinear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ElectricInput {
    Normal(f64),
    Components(Vec<Option<f64>>),
}

/// Wire form of a state: `rho`/`a` default to one, and the tangential
/// electric components forced by the interface conditions may be omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateInput {
    p: f64,
    v: Vec3,
    #[serde(rename = "H")]
    h: Vec3,
    #[serde(rename = "Hv")]
    hv: Vec3,
    #[serde(rename = "E")]
    e: ElectricInput,
    #[serde(rename = "S", default)]
    s: f64,
    kappa: f64,
    epsilon: f64,
    #[serde(default = "one")]
    rho: f64,
    #[serde(default = "one")]
    a: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<StateInput> for EquilibriumState {
    type Error = Error;

    fn try_from(raw: StateInput) -> Result<Self> {
        let forced = forced_tangential_e(raw.kappa, raw.epsilon, &raw.hv);
        let e = match raw.e {
            ElectricInput::Normal(e1) => [e1, forced[0], forced[1]],
            ElectricInput::Components(c) => {
                if c.is_empty() || c.len() > 3 {
                    return Err(Error::Input(format!(
                        "E must have 1 to 3 components, got {}",
                        c.len()
                    )));
                }
                let e1 = c[0].ok_or_else(|| Error::Input("E1 is required".into()))?;
                let e2 = c.get(1).copied().flatten().unwrap_or(forced[0]);
                let e3 = c.get(2).copied().flatten().unwrap_or(forced[1]);
                [e1, e2, e3]
            }
        };
        Ok(EquilibriumState {
            p: raw.p,
            v: raw.v,
            h: raw.h,
            s: raw.s,
            hv: raw.hv,
            e,
            kappa: raw.kappa,
            epsilon: raw.epsilon,
            rho: raw.rho,
            a: raw.a,
        })
    }
}

/// `(E2, E3)` required on the interface: `E2 = eps kappa Hv3`, `E3 = -eps kappa Hv2`.
fn forced_tangential_e(kappa: f64, epsilon: f64, hv: &Vec3) -> [f64; 2] {
    [epsilon * kappa * hv[2], -epsilon * kappa * hv[1]]
}

fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl EquilibriumState {
    /// Static particular-case state with `v = (0, 0, v3)`, `H = (0, 0, h3)`,
    /// `Hv = (0, hv2, 0)`, `E = (e1, 0, 0)` and `kappa = 0`.
    pub fn pcase(e1: f64, hv2: f64, h3: f64, v3: f64, epsilon: f64) -> Self {
        EquilibriumState {
            p: 1.0,
            v: [0.0, 0.0, v3],
            h: [0.0, 0.0, h3],
            s: 0.0,
            hv: [0.0, hv2, 0.0],
            e: [e1, 0.0, 0.0],
            kappa: 0.0,
            epsilon,
            rho: 1.0,
            a: 1.0,
        }
    }

    /// Parse a state from its JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    /// Check every admissibility condition and return the state unchanged.
    pub fn validate(&self) -> Result<Self> {
        let scalars = [
            ("p", self.p),
            ("S", self.s),
            ("kappa", self.kappa),
            ("epsilon", self.epsilon),
            ("rho", self.rho),
            ("a", self.a),
        ];
        for (name, x) in scalars {
            if !x.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        let vectors = [("v", self.v), ("H", self.h), ("Hv", self.hv), ("E", self.e)];
        for (name, x) in vectors {
            if x.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }

        if self.rho <= 0.0 {
            return Err(Error::HyperbolicityViolated(format!(
                "density rho = {} must be positive",
                self.rho
            )));
        }
        if self.a <= 0.0 {
            return Err(Error::HyperbolicityViolated(format!(
                "sound speed a = {} must be positive",
                self.a
            )));
        }

        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        let nu = self.epsilon * norm(&self.v);
        if nu >= 1.0 {
            return Err(Error::EpsilonOutOfRange(format!(
                "epsilon * |v| = {nu} must be below 1"
            )));
        }

        if self.kappa > 0.0 {
            return Err(Error::ExpansionViolated(self.kappa));
        }

        let forced = forced_tangential_e(self.kappa, self.epsilon, &self.hv);
        let equalities = [
            ("v1", self.kappa, self.v[0]),
            ("H1", 0.0, self.h[0]),
            ("Hv1", 0.0, self.hv[0]),
            ("E2", forced[0], self.e[1]),
            ("E3", forced[1], self.e[2]),
        ];
        for (component, expected, actual) in equalities {
            if (actual - expected).abs() > CONSTRAINT_TOL {
                return Err(Error::InterfaceConstraintViolated {
                    component,
                    expected,
                    actual,
                });
            }
        }
        Ok(*self)
    }

    /// `H2 Hv3 - H3 Hv2`; nonzero when the tangential fields are not parallel.
    pub fn noncollinearity(&self) -> f64 {
        self.h[1] * self.hv[2] - self.h[2] * self.hv[1]
    }

    pub fn is_collinear(&self) -> bool {
        self.noncollinearity().abs() <= CONSTRAINT_TOL
    }

    /// `v1 = v2 = H2 = 0`.
    pub fn is_unfl(&self) -> bool {
        is_zero(self.v[0]) && is_zero(self.v[1]) && is_zero(self.h[1])
    }

    pub fn is_static(&self) -> bool {
        is_zero(self.v[2]) && self.is_unfl()
    }

    /// Secondary symmetrizer parameter `nu = eps v`.
    pub fn nu(&self) -> Vec3 {
        let e = self.epsilon;
        [e * self.v[0], e * self.v[1], e * self.v[2]]
    }

    /// `mu = E1 + eps v2 Hv3 - eps v3 Hv2`, the coefficient of the interface energy term.
    pub fn mu_hat(&self) -> f64 {
        self.e[0] + self.epsilon * (self.v[1] * self.hv[2] - self.v[2] * self.hv[1])
    }

    /// Most specific family the state belongs to. Assumes a validated state.
    pub fn classify(&self) -> CaseFlag {
        let unfl = self.is_unfl();
        if unfl
            && is_zero(self.hv[2])
            && !is_zero(self.h[2])
            && !is_zero(self.hv[1])
        {
            CaseFlag::PCase
        } else if unfl && is_zero(self.hv[1]) && !is_zero(self.hv[2]) {
            CaseFlag::VacuumFieldAlongX3
        } else if self.is_collinear() {
            CaseFlag::Collinear
        } else if unfl {
            CaseFlag::UnflFamily
        } else {
            CaseFlag::GeneralNonCollinear
        }
    }
}

/// Validate a raw state; idempotent on valid input.
pub fn validate_equilibrium(raw: &EquilibriumState) -> Result<EquilibriumState> {
    raw.validate()
}

pub fn classify_case(state: &EquilibriumState) -> CaseFlag {
    state.classify()
}

fn is_zero(x: f64) -> bool {
    x.abs() <= CONSTRAINT_TOL
}
