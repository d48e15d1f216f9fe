use num_complex::Complex64;
use proptest::prelude::*;
use strata_core::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn evaluation_examples() {
    let p = Field::from_eps(&[1.0]).unwrap();
    assert_eq!(p.eval(c(0.0, 0.0)), c(1.0, 0.0));
    let q = Field::from_eps(&[-1.0]).unwrap();
    assert_eq!(q.eval(c(1.0, 0.0)), c(0.0, 0.0));
    let r = Field::from_eps(&[1.0, 0.0, 1.0]).unwrap();
    assert!((r.eval(c(0.0, 1.0)) - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn quadratic_singular_points() {
    let tol = Tolerances::default();
    let centers = find_roots(&Field::from_eps(&[1.0]).unwrap(), &tol).unwrap();
    assert_eq!(centers.len(), 2);
    for r in &centers {
        assert_eq!(r.kind, PointKind::Center);
        assert!((r.eigenvalue - r.location * 2.0).norm() < 1e-12);
        assert!((r.location.im.abs() - 1.0).abs() < 1e-12);
    }
    let nodes = find_roots(&Field::from_eps(&[-1.0]).unwrap(), &tol).unwrap();
    assert!(nodes.iter().all(|r| r.kind == PointKind::RadialNode && r.is_real));
}

#[test]
fn degenerate_quartic_has_parabolic_origin() {
    let tol = Tolerances::default();
    let roots = find_roots(&Field::from_eps(&[1.0, 0.0, 0.0]).unwrap(), &tol).unwrap();
    let parabolic: Vec<_> = roots.iter().filter(|r| r.kind == PointKind::Parabolic).collect();
    assert_eq!(parabolic.len(), 1);
    assert_eq!(parabolic[0].multiplicity, 2);
    assert!(parabolic[0].location.norm() < 1e-7);
    assert_eq!(roots.iter().filter(|r| r.multiplicity == 1).count(), 2);
}

#[test]
fn eigenvalue_classes() {
    assert_eq!(classify_eigenvalue(c(2.0, 0.0), 1e-9).unwrap(), PointKind::RadialNode);
    assert_eq!(classify_eigenvalue(c(0.0, 3.0), 1e-9).unwrap(), PointKind::Center);
    assert_eq!(classify_eigenvalue(c(1.0, 1.0), 1e-9).unwrap(), PointKind::StrongFocus);
}

#[test]
fn residue_sum_examples() {
    let tol = Tolerances::default();
    for eps in [vec![1.0], vec![-1.0], vec![1.0, 1.0, 1.0]] {
        let p = Field::from_eps(&eps).unwrap();
        assert!(residue_sum(&p, &tol).unwrap().norm() < 1e-10);
    }
    let roots = find_roots(&Field::from_eps(&[1.0]).unwrap(), &tol).unwrap();
    for r in roots {
        // 1 / (2z) at z = +-i
        assert!((r.residue - 1.0 / (r.location * 2.0)).norm() < 1e-14);
    }
}

#[test]
fn genericity_examples() {
    let tol = Tolerances::default();
    let g = |eps: &[f64]| is_generic_real(&Field::from_eps(eps).unwrap(), &tol).unwrap().generic;
    assert!(!g(&[1.0]));
    assert!(g(&[-1.0]));
    assert!(!g(&[1.0, 0.0, 0.0]));
}

#[test]
fn normal_form_examples() {
    let (p, change) = normalize::<f64>(&[2.0, 4.0, 2.0]).unwrap();
    assert_eq!(p.k(), 1);
    assert!(p.coeffs()[0].abs() < 1e-15);
    assert!((change.shift + 1.0).abs() < 1e-15);
    assert!(!change.time_reversed);

    let (q, change) = normalize::<f64>(&[1.0, 0.0, 0.5, -0.25]).unwrap();
    assert_eq!(q.coeffs(), &[0.5, -0.25]);
    assert_eq!(change, AffineChange::identity());

    let (r, change) = normalize::<f64>(&[-1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(change.time_reversed);
    assert_eq!(r.k(), 2);
    assert!((r.coeffs()[1].abs() - 1.0).abs() < 1e-12);
}

/// Random separated roots closed under conjugation, with their sum removed.
fn root_sets() -> impl Strategy<Value = Vec<Complex64>> {
    (0usize..=3, 0usize..=2)
        .prop_filter("degree at least two", |(r, p)| r + 2 * p >= 2)
        .prop_flat_map(|(r, p)| {
            (
                prop::collection::vec(-2.0f64..2.0, r),
                prop::collection::vec((-2.0f64..2.0, 0.2f64..2.0), p),
            )
        })
        .prop_map(|(real, pairs)| {
            let mut v: Vec<Complex64> = real.into_iter().map(|x| c(x, 0.0)).collect();
            for (a, b) in pairs {
                v.push(c(a, b));
                v.push(c(a, -b));
            }
            v
        })
        .prop_filter("separated roots", |v| {
            v.iter()
                .enumerate()
                .all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() > 0.1))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn residues_sum_to_zero(roots in root_sets()) {
        let (p, _) = RealPolyField::from_roots(&roots).unwrap();
        let tol = Tolerances::default();
        let found = find_roots(&p, &tol).unwrap();
        let s: Complex64 = found.iter().map(|r| r.residue).sum();
        prop_assert!(s.norm() < 1e-10, "sum {s}");
        for r in &found {
            prop_assert!((r.residue * r.eigenvalue - 1.0).norm() < 1e-10);
            if r.is_real {
                prop_assert_eq!(r.location.im, 0.0);
            } else {
                let twin = found.iter().find(|q| (q.location - r.location.conj()).norm() < 1e-9);
                prop_assert!(twin.is_some());
                prop_assert!((twin.unwrap().eigenvalue - r.eigenvalue.conj()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn normalize_is_idempotent(raw in prop::collection::vec(-3.0f64..3.0, 3..7), lead in prop_oneof![0.5f64..3.0, -3.0f64..-0.5]) {
        let mut coeffs = vec![lead];
        coeffs.extend(raw);
        let (p, _) = normalize(&coeffs).unwrap();
        let mut again = vec![1.0, 0.0];
        again.extend_from_slice(p.coeffs());
        let (q, change) = normalize(&again).unwrap();
        prop_assert!(!change.time_reversed);
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn scaling_moves_roots(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, r in 0.25f64..4.0) {
        let p = Field::from_eps(&[c1, c0]).unwrap();
        let q = p.scaled(r);
        let z = c(0.3, -0.7);
        // P_r(r z) = r^{k+1} P(z)
        let lhs = q.eval(z * r);
        let rhs = p.eval(z) * r.powi(3);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
}
