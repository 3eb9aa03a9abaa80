use num_complex::Complex64;
use proptest::prelude::*;

use pvstab::energy::{
    assemble_energy_form, check_sufficient_stability, q0_matrix, static_threshold, StabilityVerdict,
};
use pvstab::matrices::{build_plasma_matrices, inertia, BoundaryMatrix, Inertia};
use pvstab::poly::Poly;
use pvstab::spectral::{certify, find_unstable_roots, lopatinski_residual, ModeProblem, Tolerances, Variant};
use pvstab::EquilibriumState;

fn static_problem(e1: f64, hv2: f64, h3: f64, eps: f64, psi: f64) -> ModeProblem {
    ModeProblem::new(EquilibriumState::pcase(e1, hv2, h3, 0.0, eps), psi, Variant::StaticGeneralAngle).unwrap()
}

fn newton_fd(p: &ModeProblem, mut tau: Complex64) -> Option<Complex64> {
    for _ in 0..80 {
        let f = lopatinski_residual(tau, p).ok()?;
        let h = 1e-7 * tau.norm().max(1.0);
        let df = (lopatinski_residual(tau + h, p).ok()? - f) / h;
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        tau -= step;
        if !tau.is_finite() || tau.norm() > 1e6 {
            return None;
        }
        if step.norm() < 1e-14 * tau.norm().max(1.0) {
            return Some(tau);
        }
    }
    Some(tau)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a1_hat_inertia(
        p in 0.1f64..3.0, kappa in -2.0f64..0.0, v2 in -2.0f64..2.0, v3 in -2.0f64..2.0,
        h2 in -2.0f64..2.0, h3 in -2.0f64..2.0, rho in 0.2f64..3.0, a in 0.2f64..3.0,
    ) {
        let s = EquilibriumState {
            p, v: [kappa, v2, v3], h: [0.0, h2, h3], s: 0.0, hv: [0.0, 1.0, 0.0],
            e: [0.0; 3], kappa, epsilon: 0.1, rho, a,
        };
        let pm = build_plasma_matrices(&s);
        prop_assert_eq!(inertia(&pm.a_hat[0], 1e-10), Inertia { positive: 1, negative: 1, zero: 6 });
    }

    #[test]
    fn boundary_matrix_closed_form(
        dt in -5.0f64..5.0, d2 in -5.0f64..5.0, d3 in -5.0f64..5.0, eps in 1e-8f64..1.0,
    ) {
        let bm = BoundaryMatrix::new(dt, d2, d3, eps);
        let num = bm.eigenvalues();
        let cf = bm.closed_form_eigenvalues();
        for k in 0..6 {
            prop_assert!((num[k] - cf[k]).abs() <= 1e-10 * (1.0 + cf[k].abs()));
        }
    }

    #[test]
    fn q0_symmetric(e1 in -1.0f64..1.0, hv2 in 0.1f64..2.0, h3 in 0.1f64..2.0, v3 in -1.0f64..1.0) {
        let q = q0_matrix(&EquilibriumState::pcase(e1, hv2, h3, v3, 1e-3)).unwrap();
        prop_assert_eq!(q.clone(), q.transpose());
    }

    #[test]
    fn static_sufficiency_is_monotone_in_e1(hv2 in 0.05f64..2.0, h3 in 0.05f64..2.0, e1 in 0.0f64..1.0, t in 0.0f64..1.0) {
        let verdict = |x: f64| check_sufficient_stability(&EquilibriumState::pcase(x, hv2, h3, 0.0, 1e-6)).verdict;
        if verdict(e1) == StabilityVerdict::Sufficient {
            prop_assert_eq!(verdict(t * e1), StabilityVerdict::Sufficient);
        }
        let thr = static_threshold(hv2, h3);
        prop_assert_eq!(verdict(e1) == StabilityVerdict::Sufficient, e1 * e1 < thr);
    }

    #[test]
    fn mu_hat_tends_to_e1(e1 in -1.0f64..1.0, hv2 in 0.1f64..2.0, h3 in 0.1f64..2.0, v3 in -1.0f64..1.0) {
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
            let s = EquilibriumState::pcase(e1, hv2, h3, v3, eps);
            let err = (s.mu_hat() - e1).abs();
            prop_assert!(err <= 10.0 * eps * (1.0 + e1.abs()) * (1.0 + v3.abs()));
            prop_assert!(err <= prev);
            prev = err;
            let f = assemble_energy_form(&s).unwrap();
            prop_assert!((f.mu_hat - s.mu_hat()).abs() <= 1e-15);
        }
    }

    #[test]
    fn mirrored_angle_gives_conjugate_roots(
        e1 in 0.0f64..2.0, hv2 in 0.05f64..2.0, h3 in 0.2f64..1.5, psi in 0.0f64..std::f64::consts::PI,
    ) {
        let tol = Tolerances::default();
        let a = find_unstable_roots(&static_problem(e1, hv2, h3, 1e-3, psi), &tol);
        let b = find_unstable_roots(&static_problem(e1, hv2, h3, 1e-3, -psi), &tol);
        prop_assert_eq!(a.len(), b.len());
        for r in &a {
            let partner = b.iter().any(|q| (q.tau - r.tau.conj()).norm() <= 1e-7 * r.tau.norm().max(1.0));
            prop_assert!(partner, "no conjugate partner for {}", r.tau);
        }
    }

    #[test]
    fn roots_of_random_polynomials(re in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..10)) {
        let want: Vec<Complex64> = re.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let p = want.iter().fold(Poly::from_real(&[1.0]), |acc, &r| {
            acc.mul(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]))
        });
        for r in p.roots() {
            prop_assert!(p.eval(r).norm() <= 1e-8 * (1.0 + r.norm()).powi(want.len() as i32) * 10.0);
        }
    }
}

/// Every growing mode found by brute-force Newton starts over a grid in the
/// right half plane must also be returned by the polynomial solver.
#[test]
fn squaring_loses_no_roots() {
    let tol = Tolerances::default();
    let points = [
        (1.0, 0.5, 1.0, 0.0),
        (0.8, 0.3, 0.5, 0.7),
        (1.2, 1.0, 0.25, 1.3),
        (0.6, 0.5, 2.0 / 3.0, 2.0),
        (1.5, 1.4, 1.0, 0.4),
    ];
    let mut seen = 0;
    for &(e1, hv2, h3, psi) in &points {
        let p = static_problem(e1, hv2, h3, 0.2, psi);
        let found = find_unstable_roots(&p, &tol);
        for i in 0..24 {
            for j in 0..24 {
                let start = Complex64::new(0.05 + 3.0 * i as f64 / 23.0, -3.0 + 6.0 * j as f64 / 23.0);
                let Some(tau) = newton_fd(&p, start) else { continue };
                let Some(root) = certify(&p, tau, &tol) else { continue };
                if root.tau.re <= 1e-6 {
                    continue;
                }
                seen += 1;
                assert!(
                    found.iter().any(|r| (r.tau - root.tau).norm() <= 1e-6 * root.tau.norm().max(1.0)),
                    "brute-force root {} at {:?} missing from {:?}",
                    root.tau,
                    (e1, hv2, h3, psi),
                    found.iter().map(|r| r.tau).collect::<Vec<_>>()
                );
            }
        }
    }
    assert!(seen > 0, "brute force found no growing modes at all");
}

#[test]
fn pcase_v3_roots_match_brute_force() {
    let tol = Tolerances::default();
    let s = EquilibriumState::pcase(1.0, 0.6, 0.8, 0.5, 0.1);
    let p = ModeProblem::new(s, 0.0, Variant::PCase2D).unwrap();
    let found = find_unstable_roots(&p, &tol);
    assert!(!found.is_empty());
    for i in 0..20 {
        for j in 0..20 {
            let start = Complex64::new(0.05 + 3.0 * i as f64 / 19.0, -3.0 + 6.0 * j as f64 / 19.0);
            let Some(tau) = newton_fd(&p, start) else { continue };
            let Some(root) = certify(&p, tau, &tol) else { continue };
            assert!(found.iter().any(|r| (r.tau - root.tau).norm() <= 1e-6 * root.tau.norm().max(1.0)));
        }
    }
}
