use std::f64::consts::PI;

use strata_core::combinatorics::{enumerate_strata, stratum_id};
use strata_core::realization::*;
use strata_core::*;

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn modulus(json: &str) -> Modulus {
    serde_json::from_str(json).unwrap()
}

#[test]
fn quadratic_targets() {
    let tol = Tolerances::default();
    let lp = realize_modulus(&modulus(r#"{"tau":{"k":1,"ell":1},"eta_R":3.141592653589793}"#), &tol).unwrap();
    assert!((lp.poly.coeffs()[0] - 1.0).abs() < 1e-12);
    assert!(lp.residual < 1e-8);
    let nodes = realize_modulus(&modulus(r#"{"tau":{"k":1,"ell":0,"fixed":[1]},"eta_I":[1.5707963267948966]}"#), &tol).unwrap();
    assert!((nodes.poly.coeffs()[0] + 4.0).abs() < 1e-12);
}

#[test]
fn quadratic_zoom_law() {
    // eta scales by r^{-k} under the zoom; at k = 1, a = pi / eta
    let tol = Tolerances::default();
    for eta in [0.25, 1.0, 3.0, 10.0] {
        let m = modulus(&format!(r#"{{"tau":{{"k":1,"ell":1}},"eta_R":{eta}}}"#));
        let a = PI / eta;
        let r = realize_modulus(&m, &tol).unwrap();
        assert!((r.poly.coeffs()[0] - a * a).abs() < 1e-10 * a * a);
    }
}

#[test]
fn invalid_problems_are_rejected() {
    let tol = Tolerances::default();
    assert!(serde_json::from_str::<Modulus>(r#"{"tau":{"k":1,"ell":0,"fixed":[1]}}"#).is_err());
    assert!(serde_json::from_str::<Modulus>(r#"{"tau":{"k":1,"ell":0,"fixed":[1]},"eta_I":[-1.0]}"#).is_err());
    let target = modulus(r#"{"tau":{"k":1,"ell":1},"eta_R":1.0}"#);
    let wrong = Field::from_eps(&[-1.0]).unwrap();
    assert!(matches!(
        RealizationProblem::new(target, wrong, tol),
        Err(StrataError::InvalidInput(_))
    ));
}

#[test]
fn round_trips_through_k3() {
    let tol = Tolerances::default();
    for k in 1..=3 {
        for (i, tau) in enumerate_strata(k).iter().enumerate() {
            let p = random_seed_for_stratum(tau, 77 + i as u64, &tol).unwrap();
            let target = extract_modulus(&p, &tol).unwrap();
            let r = realize_modulus(&target, &tol).unwrap();
            let d = sup_diff(r.poly.coeffs(), p.coeffs());
            assert!(d < 1e-6, "{}: {d:e}", stratum_id(tau));
            assert!(r.residual <= tol.solver_tol);
            assert_eq!(extract(&r.poly, &tol).unwrap().tau, *tau);
        }
    }
}

#[test]
fn distinct_seeds_agree() {
    let tol = Tolerances::default();
    for tau in enumerate_strata(4).iter().take(3) {
        let p = random_seed_for_stratum(tau, 5, &tol).unwrap();
        let target = extract_modulus(&p, &tol).unwrap();
        let mut found = Vec::new();
        for s in [11u64, 12] {
            let seed = random_seed_for_stratum(tau, s, &tol).unwrap();
            assert_ne!(seed.coeffs(), p.coeffs());
            let r = realize(&RealizationProblem::new(target.clone(), seed, tol).unwrap()).unwrap();
            found.push(r.poly);
        }
        let d = sup_diff(found[0].coeffs(), found[1].coeffs());
        assert!(d < 1e-6, "{}: {d:e}", stratum_id(tau));
        assert!(sup_diff(found[0].coeffs(), p.coeffs()) < 1e-6);
    }
}

#[test]
fn quadratic_jacobian_signs() {
    let tol = Tolerances::default();
    for a in [0.5f64, 2.0] {
        let lp = modulus_jacobian(&Field::from_eps(&[a * a]).unwrap(), &tol).unwrap();
        let want = -PI / (2.0 * a.powi(3));
        assert!((lp.matrix[(0, 0)] - want).abs() < 1e-6 * want.abs());
        let nodes = modulus_jacobian(&Field::from_eps(&[-a * a]).unwrap(), &tol).unwrap();
        assert!((nodes.matrix[(0, 0)] + want).abs() < 1e-6 * want.abs());
    }
}

#[test]
fn quartic_jacobians_are_nonsingular() {
    let tol = Tolerances::default();
    let strata = enumerate_strata(3);
    let mut worst = f64::INFINITY;
    for s in 0..100u64 {
        let tau = &strata[s as usize % strata.len()];
        let p = random_seed_for_stratum(tau, 1000 + s, &tol).unwrap();
        let j = modulus_jacobian(&p, &tol).unwrap();
        worst = worst.min(j.min_singular_value);
    }
    assert!(worst > 1e-5, "{worst:e}");
}

#[test]
fn constructed_seeds_match_their_strata() {
    let tol = Tolerances::default();
    for k in 1..=5 {
        for tau in enumerate_strata(k) {
            let p = seed_for_stratum(&tau, &tol).unwrap();
            assert_eq!(extract(&p, &tol).unwrap().tau, tau);
        }
    }
}
