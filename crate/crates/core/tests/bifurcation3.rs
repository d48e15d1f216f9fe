use num_rational::Ratio;
use proptest::prelude::*;
use strata_core::bifurcation3::*;
use strata_core::*;

fn tag(e2: f64, e1: f64, e0: f64) -> String {
    classify_k3(e2, e1, e0, &Tolerances::default()).unwrap().tag()
}

#[test]
fn exact_discriminant() {
    let q = |n: i64, d: i64| Ratio::new(n, d);
    assert_eq!(discriminant(q(1, 1), q(0, 1), q(1, 4)), q(0, 1));
    assert_eq!(discriminant(q(0, 1), q(0, 1), q(0, 1)), q(0, 1));
    assert_eq!(discriminant(q(0, 1), q(0, 1), q(1, 1)), q(256, 1));
    assert_eq!(discriminant(q(2, 1), q(0, 1), q(1, 1)), q(0, 1));
    // (z - 1)^2 (z^2 + 2z + 3)
    assert_eq!(discriminant(0i64, -4, 3), 0);
    assert_eq!(discriminant(0i64, 1, 1), 256 - 27);
    assert_eq!(discriminant(1.0f64, 0.0, -1.0), -400.0);
}

#[test]
fn labelled_examples() {
    assert_eq!(tag(1.0, 0.0, -1.0), "homoclinic-pair-m2");
    assert_eq!(tag(2.0, 0.0, 1.0), "nonreal-parabolic-pair");
    assert_eq!(tag(1.0, 0.0, 0.0), "higher-codim");
    assert_eq!(tag(0.0, -4.0, 3.0), "real-parabolic");
    assert_eq!(tag(3.0, 0.0, 1.0), "homoclinic-pair-m0");
    let generic = classify_k3(0.0, 1.0, 1.0, &Tolerances::default()).unwrap();
    assert_eq!(generic.kind, K3Kind::Generic);
    assert!(generic.delta > 0.0);
    assert!(generic.tag().starts_with("generic(k3-"));
}

#[test]
fn sweep_along_the_symmetric_axis() {
    let tol = Tolerances::default();
    let spec = SampleSpec::Sweep {
        e2: 1.0,
        e1: 0.0,
        lo: -1.0,
        hi: 1.0,
        n: 200,
    };
    let pts = sample_diagram(&spec, &tol).unwrap();
    let seq = label_sequence(&pts);
    assert_eq!(
        seq,
        [
            "homoclinic-pair-m2",
            "higher-codim",
            "homoclinic-pair-m0",
            "nonreal-parabolic-pair",
            "generic(k3-2)"
        ]
    );
    let at = |e0: f64| pts.iter().find(|p| p.eps[2] == e0).unwrap().label.clone();
    assert_eq!(at(0.0), "higher-codim");
    assert_eq!(at(0.25), "nonreal-parabolic-pair");
    let m0 = pts.iter().find(|p| p.label == "generic(k3-2)").unwrap();
    assert_eq!(m0.m, 0);
}

#[test]
fn discriminant_sign_matches_root_structure() {
    let tol = Tolerances::default();
    let spec = SampleSpec::Random {
        lo: -2.0,
        hi: 2.0,
        n: 2000,
        seed: 3,
    };
    for [e2, e1, e0] in spec.points() {
        let p = Field::new(3, vec![e2, e1, e0]).unwrap();
        let roots = find_roots(&p, &tol).unwrap();
        let d = discriminant(e2, e1, e0);
        let real = roots.iter().filter(|r| r.is_real).count();
        if d > 0.0 {
            assert!(real == 0 || real == 4, "{:?}", [e2, e1, e0]);
        } else {
            assert_eq!(real, 2, "{:?}", [e2, e1, e0]);
        }
    }
}

#[test]
fn labelled_cloud_json_lines() {
    let tol = Tolerances::default();
    let pts = sample_diagram(&SampleSpec::Grid { lo: -1.0, hi: 1.0, n: 3 }, &tol).unwrap();
    assert_eq!(pts.len(), 27);
    let line = serde_json::to_value(&pts[0]).unwrap();
    for key in ["eps", "label", "m", "delta"] {
        assert!(line.get(key).is_some(), "{key}");
    }
    let sphere = SampleSpec::Sphere { n_theta: 6, n_phi: 8 }.points();
    assert!(sphere.iter().all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_survive_the_zoom(e2 in -2.0f64..2.0, e1 in -2.0f64..2.0, e0 in -2.0f64..2.0, r in 0.5f64..2.0) {
        let tol = Tolerances::default();
        let a = classify_k3(e2, e1, e0, &tol).unwrap();
        let b = classify_k3(e2 * r * r, e1 * r.powi(3), e0 * r.powi(4), &tol).unwrap();
        prop_assert_eq!(a.tag(), b.tag());
        prop_assert_eq!(a.m, b.m);
    }

    #[test]
    fn symmetric_axis_is_never_generic_with_centers(e2 in 0.1f64..2.0, e0 in 0.01f64..2.0) {
        // z^2 real and negative for both roots: two symmetric center pairs
        prop_assume!(e2 * e2 - 4.0 * e0 > 1e-3);
        let t = tag(e2, 0.0, e0);
        prop_assert!(!t.starts_with("generic"), "{t}");
    }
}
