//! Normal modes `exp(tau t + i gamma' x' + xi x1)` and the Lopatinski determinant.
//!
//! Square roots are principal (`Re sqrt >= 0`), so `xi = -sqrt(..)` decays into
//! the domain whenever it is off the imaginary axis. Candidate frequencies come
//! from the polynomial obtained by squaring away the roots and are then checked
//! and refined on the unsquared equation.

use std::f64::consts::{FRAC_PI_2, TAU as TWO_PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy::{posdef_margins, StabilityVerdict};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::state::{CaseFlag, EquilibriumState, CONSTRAINT_TOL};

pub const TAU_TOL: f64 = 1e-8;
pub const R_TOL: f64 = 1e-9;
pub const XI_TOL: f64 = 1e-10;
pub const DEFAULT_PSI_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Growth-rate threshold: roots with `Re tau <= tau_tol` are neutral.
    pub tau_tol: f64,
    /// Relative residual accepted on the unsquared equation.
    pub r_tol: f64,
    /// Required decay margin of `xi_p`, `xi_v`.
    pub xi_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_tol: TAU_TOL,
            r_tol: R_TOL,
            xi_tol: XI_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_tol", self.tau_tol), ("r_tol", self.r_tol), ("xi_tol", self.xi_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Which determinant equation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `Hv2 = 0`, wave vector along `x2`.
    H2hatZero,
    /// Particular case, wave vector along `x2`.
    PCase2D,
    /// Static particular case, wave vector `(cos psi, sin psi)`.
    StaticGeneralAngle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem {
    pub state: EquilibriumState,
    pub psi: f64,
    pub variant: Variant,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl ModeProblem {
    pub fn new(state: EquilibriumState, psi: f64, variant: Variant) -> Result<Self> {
        if !psi.is_finite() {
            return Err(Error::NonFinite("psi"));
        }
        if !state.is_unfl() {
            return Err(Error::UnsupportedCase(
                "normal modes need v1 = v2 = H2 = 0".into(),
            ));
        }
        match variant {
            Variant::H2hatZero => {
                if state.hv[1].abs() > CONSTRAINT_TOL {
                    return Err(Error::UnsupportedCase("H2hatZero needs Hv2 = 0".into()));
                }
            }
            Variant::PCase2D => {
                if state.hv[2].abs() > CONSTRAINT_TOL || state.hv[1].abs() <= CONSTRAINT_TOL {
                    return Err(Error::UnsupportedCase(
                        "PCase2D needs Hv3 = 0 and Hv2 != 0".into(),
                    ));
                }
            }
            Variant::StaticGeneralAngle => {
                if state.hv[2].abs() > CONSTRAINT_TOL || state.hv[1].abs() <= CONSTRAINT_TOL {
                    return Err(Error::UnsupportedCase(
                        "StaticGeneralAngle needs Hv3 = 0 and Hv2 != 0".into(),
                    ));
                }
                if state.v[2].abs() > CONSTRAINT_TOL {
                    return Err(Error::UnsupportedCase(
                        "general wave-vector angle is implemented for the static case v3 = 0 only".into(),
                    ));
                }
            }
        }
        Ok(ModeProblem { state, psi, variant })
    }

    /// Most general variant available for this state and angle.
    pub fn auto(state: EquilibriumState, psi: f64) -> Result<Self> {
        let variant = if state.hv[1].abs() <= CONSTRAINT_TOL {
            Variant::H2hatZero
        } else if state.v[2].abs() <= CONSTRAINT_TOL {
            Variant::StaticGeneralAngle
        } else if psi == 0.0 {
            Variant::PCase2D
        } else {
            return Err(Error::UnsupportedCase(
                "v3 != 0 is only supported for psi = 0".into(),
            ));
        };
        ModeProblem::new(state, psi, variant)
    }

    fn k(&self) -> f64 {
        1.0 / (1.0 + self.state.h[2] * self.state.h[2])
    }

    /// Polynomial in `tau` whose roots contain every root of the determinant equation.
    pub fn polynomial(&self) -> Poly {
        let s = &self.state;
        let eps2 = s.epsilon * s.epsilon;
        let t = Poly::x();
        let t2 = t.mul(&t);
        let t4 = t2.mul(&t2);
        let sv2 = Poly::from_real(&[1.0, 0.0, eps2]);
        match self.variant {
            Variant::H2hatZero => {
                let w = Poly::new(vec![c(s.e[0]), Complex64::new(0.0, s.epsilon * s.hv[2])]);
                let w2 = w.mul(&w);
                let sk2 = Poly::from_real(&[1.0, 0.0, self.k()]);
                t4.mul(&sv2).sub(&w2.mul(&w2).mul(&sk2))
            }
            Variant::PCase2D => {
                let k2 = s.hv[1] * s.hv[1];
                let g = Poly::from_real(&[s.e[0] * s.e[0] - k2, 0.0, -k2 * eps2]);
                let sk2 = Poly::from_real(&[1.0, 0.0, self.k()]);
                t4.mul(&sv2).sub(&g.mul(&g).mul(&sk2))
            }
            Variant::StaticGeneralAngle => {
                let (sn, cs) = self.psi.sin_cos();
                let (e1, k2, h3) = (s.e[0], s.hv[1], s.h[2]);
                let a = Poly::from_real(&[h3 * h3 * sn * sn, 0.0, 1.0]);
                let cc = Poly::new(vec![
                    c(e1 * e1 - k2 * k2 * cs * cs),
                    Complex64::new(0.0, -2.0 * s.epsilon * e1 * k2 * sn),
                    c(-k2 * k2 * eps2),
                ]);
                let d = Poly::from_real(&[sn * sn * h3 * h3, 0.0, 1.0 + h3 * h3]);
                let lhs = a.mul(&a).mul(&sv2).mul(&d);
                let rhs = cc.mul(&cc).mul(&d.add(&t4));
                lhs.sub(&rhs)
            }
        }
    }

    /// `(xi_p, xi_v)` for this variant.
    pub fn xi(&self, tau: Complex64) -> Result<(Complex64, Complex64)> {
        match self.variant {
            Variant::StaticGeneralAngle => dispersion_xi(tau, &self.state, self.psi),
            _ => {
                let xp = -(c(1.0) + tau * tau * self.k()).sqrt();
                let xv = -(c(1.0) + tau * tau * self.state.epsilon.powi(2)).sqrt();
                Ok((xp, xv))
            }
        }
    }

    /// The two sides of the equation, each written with `sqrt` in place of `-xi`,
    /// and their derivatives in `tau`.
    fn sides(&self, tau: Complex64) -> Result<Sides> {
        let s = &self.state;
        let eps = s.epsilon;
        let eps2 = eps * eps;
        let (xp, xv) = self.xi(tau)?;
        let (sp, sv) = (-xp, -xv);
        let sv_d = tau * eps2 / sv;
        let t2 = tau * tau;
        Ok(match self.variant {
            Variant::H2hatZero => {
                let k = self.k();
                let w = c(s.e[0]) + Complex64::new(0.0, eps * s.hv[2]) * tau;
                let w_d = Complex64::new(0.0, eps * s.hv[2]);
                let sp_d = tau * k / sp;
                Sides {
                    lhs: t2 * sv,
                    rhs: w * w * sp,
                    lhs_d: tau * 2.0 * sv + t2 * sv_d,
                    rhs_d: w * w_d * 2.0 * sp + w * w * sp_d,
                }
            }
            Variant::PCase2D => {
                let k = self.k();
                let k2 = s.hv[1] * s.hv[1];
                let g = c(s.e[0] * s.e[0] - k2) - t2 * (k2 * eps2);
                let g_d = -tau * (2.0 * k2 * eps2);
                let sp_d = tau * k / sp;
                Sides {
                    lhs: t2 * sv,
                    rhs: g * sp,
                    lhs_d: tau * 2.0 * sv + t2 * sv_d,
                    rhs_d: g_d * sp + g * sp_d,
                }
            }
            Variant::StaticGeneralAngle => {
                let (sn, cs) = self.psi.sin_cos();
                let (e1, k2, h3) = (s.e[0], s.hv[1], s.h[2]);
                let h3s = h3 * h3;
                let a = t2 + h3s * sn * sn;
                let cc = c(e1 * e1 - k2 * k2 * cs * cs)
                    - t2 * (k2 * k2 * eps2)
                    - Complex64::new(0.0, 2.0 * eps * e1 * k2 * sn) * tau;
                let cc_d = -tau * (2.0 * k2 * k2 * eps2) - Complex64::new(0.0, 2.0 * eps * e1 * k2 * sn);
                let d = t2 * (1.0 + h3s) + sn * sn * h3s;
                let d_d = tau * (2.0 * (1.0 + h3s));
                let t4 = t2 * t2;
                let frac_d = (t2 * tau * 4.0 * d - t4 * d_d) / (d * d);
                let sp_d = frac_d / (sp * 2.0);
                Sides {
                    lhs: a * sv,
                    rhs: cc * sp,
                    lhs_d: tau * 2.0 * sv + a * sv_d,
                    rhs_d: cc_d * sp + cc * sp_d,
                }
            }
        })
    }
}

struct Sides {
    lhs: Complex64,
    rhs: Complex64,
    lhs_d: Complex64,
    rhs_d: Complex64,
}

impl Sides {
    fn residual(&self) -> Complex64 {
        self.lhs - self.rhs
    }

    fn relative(&self) -> f64 {
        let scale = self.lhs.norm() + self.rhs.norm();
        if scale == 0.0 {
            0.0
        } else {
            self.residual().norm() / scale
        }
    }
}

/// Normal wavenumbers for the static particular case at wave-vector angle `psi`.
pub fn dispersion_xi(tau: Complex64, state: &EquilibriumState, psi: f64) -> Result<(Complex64, Complex64)> {
    let h3s = state.h[2] * state.h[2];
    let sn2 = psi.sin().powi(2);
    let t2 = tau * tau;
    let den = t2 * (1.0 + h3s) + sn2 * h3s;
    let scale = (1.0 + h3s) * t2.norm() + sn2 * h3s;
    if den.norm() <= f64::EPSILON * scale || scale == 0.0 {
        return Err(Error::DegenerateDenominator {
            re: tau.re,
            im: tau.im,
        });
    }
    let xp = -(c(1.0) + t2 * t2 / den).sqrt();
    let xv = -(c(1.0) + t2 * state.epsilon.powi(2)).sqrt();
    Ok((xp, xv))
}

/// Left side minus right side of the determinant equation at `tau`.
pub fn lopatinski_residual(tau: Complex64, problem: &ModeProblem) -> Result<Complex64> {
    Ok(problem.sides(tau)?.residual())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchFlags {
    pub growing: bool,
    pub xi_p_decays: bool,
    pub xi_v_decays: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRoot {
    pub tau: Complex64,
    pub xi_p: Complex64,
    pub xi_v: Complex64,
    pub residual: Complex64,
    pub psi: f64,
    pub valid: BranchFlags,
}

impl ModeRoot {
    pub fn is_valid(&self) -> bool {
        self.valid.growing && self.valid.xi_p_decays && self.valid.xi_v_decays
    }
}

const NEWTON_MAX_ITER: usize = 60;
/// Candidates whose unrefined relative residual exceeds this are spurious sign branches.
const CANDIDATE_GATE: f64 = 1e-3;

fn newton(problem: &ModeProblem, mut tau: Complex64) -> Option<Complex64> {
    for _ in 0..NEWTON_MAX_ITER {
        let s = problem.sides(tau).ok()?;
        let d = s.lhs_d - s.rhs_d;
        if d.norm() == 0.0 || !d.is_finite() {
            return Some(tau);
        }
        let step = s.residual() / d;
        tau -= step;
        if !tau.is_finite() {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * tau.norm().max(1e-300) {
            break;
        }
    }
    Some(tau)
}

/// Roots of the unsquared equation with `Re tau > tau_tol` and decaying branches,
/// sorted by decreasing growth rate.
pub fn find_unstable_roots(problem: &ModeProblem, tol: &Tolerances) -> Vec<ModeRoot> {
    let mut out: Vec<ModeRoot> = Vec::new();
    for cand in problem.polynomial().roots() {
        if cand.re.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !cand.is_finite() {
            continue;
        }
        match problem.sides(cand) {
            Ok(s) if s.relative() <= CANDIDATE_GATE => {}
            _ => continue,
        }
        let Some(tau) = newton(problem, cand) else {
            continue;
        };
        let Some(root) = certify(problem, tau, tol) else {
            continue;
        };
        let dup = out
            .iter()
            .any(|r| (r.tau - root.tau).norm() <= 1e-8 * root.tau.norm().max(1.0));
        if !dup {
            out.push(root);
        }
    }
    out.sort_by(|a, b| b.tau.re.total_cmp(&a.tau.re));
    out
}

/// A certified root at `tau`, or `None` if any condition fails.
pub fn certify(problem: &ModeProblem, tau: Complex64, tol: &Tolerances) -> Option<ModeRoot> {
    let s = problem.sides(tau).ok()?;
    if s.relative() >= tol.r_tol {
        return None;
    }
    let (xi_p, xi_v) = problem.xi(tau).ok()?;
    let valid = BranchFlags {
        growing: tau.re > tol.tau_tol,
        xi_p_decays: xi_p.re < -tol.xi_tol,
        xi_v_decays: xi_v.re < -tol.xi_tol,
    };
    let root = ModeRoot {
        tau,
        xi_p,
        xi_v,
        residual: s.residual(),
        psi: problem.psi,
        valid,
    };
    root.is_valid().then_some(root)
}

/// Wave-vector angles: `pi/2`, `0`, then `k * step` for `k = 1, 2, ...` below `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiGrid {
    pub step: f64,
}

impl Default for PsiGrid {
    fn default() -> Self {
        PsiGrid {
            step: DEFAULT_PSI_STEP,
        }
    }
}

impl PsiGrid {
    pub fn new(step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && step < TWO_PI) {
            return Err(Error::InvalidSpec(format!(
                "psi step must lie in (0, 2 pi), got {step}"
            )));
        }
        Ok(PsiGrid { step })
    }

    pub fn angles(&self) -> Vec<f64> {
        let mut out = vec![FRAC_PI_2, 0.0];
        let mut k = 1u64;
        loop {
            let psi = k as f64 * self.step;
            if psi >= TWO_PI {
                break;
            }
            out.push(psi);
            k += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    Unstable { root: ModeRoot },
    NoGrowingMode,
    SufficientlyStable,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Unstable { .. } => "Unstable",
            Verdict::NoGrowingMode => "NoGrowingMode",
            Verdict::SufficientlyStable => "SufficientlyStable",
        }
    }

    pub fn is_unstable(&self) -> bool {
        matches!(self, Verdict::Unstable { .. })
    }

    pub fn growth_rate(&self) -> f64 {
        match self {
            Verdict::Unstable { root } => root.tau.re,
            _ => 0.0,
        }
    }
}

/// Energy-method verdict restricted to what normal-mode scans need.
fn sufficient(state: &EquilibriumState) -> StabilityVerdict {
    if state.classify() == CaseFlag::PCase {
        let m = posdef_margins(state.e[0], state.hv[1], state.h[2], state.v[2]);
        if m.iter().all(|&x| x > 0.0) {
            StabilityVerdict::Sufficient
        } else {
            StabilityVerdict::NotSufficient
        }
    } else {
        crate::energy::check_sufficient_stability(state).verdict
    }
}

/// Unstable if some angle of the grid admits a growing mode (first hit wins);
/// otherwise the energy-method verdict decides between the two stable labels.
pub fn classify_point(state: &EquilibriumState, grid: &PsiGrid, tol: &Tolerances) -> Result<Verdict> {
    if !state.is_unfl() {
        return Err(Error::UnsupportedCase(
            "normal-mode classification needs v1 = v2 = H2 = 0".into(),
        ));
    }
    if state.hv[1].abs() <= CONSTRAINT_TOL {
        let p = ModeProblem::new(*state, 0.0, Variant::H2hatZero)?;
        if let Some(root) = find_unstable_roots(&p, tol).into_iter().next() {
            return Ok(Verdict::Unstable { root });
        }
    } else {
        if state.hv[2].abs() > CONSTRAINT_TOL || state.v[2].abs() > CONSTRAINT_TOL {
            return Err(Error::UnsupportedCase(
                "angle scans are implemented for the static particular case (Hv3 = 0, v3 = 0)".into(),
            ));
        }
        for psi in grid.angles() {
            let p = ModeProblem::new(*state, psi, Variant::StaticGeneralAngle)?;
            if let Some(root) = find_unstable_roots(&p, tol).into_iter().next() {
                return Ok(Verdict::Unstable { root });
            }
        }
    }
    Ok(match sufficient(state) {
        StabilityVerdict::Sufficient => Verdict::SufficientlyStable,
        _ => Verdict::NoGrowingMode,
    })
}
