use strata_core::combinatorics::{attachment_classes, enumerate_strata};
use strata_core::portrait::{render_portrait, PortraitSpec};
use strata_core::realization::seed_for_stratum;
use strata_core::selfcheck::{self, SelfcheckConfig};
use strata_core::*;

#[test]
fn k3_portraits_differ_and_carry_their_trees() {
    let tol = Tolerances::default();
    let mut seen = Vec::new();
    for tau in enumerate_strata(3) {
        let p = seed_for_stratum(&tau, &tol).unwrap();
        let r = find_roots(&p, &tol).unwrap().iter().fold(0.0f64, |m, z| m.max(z.location.norm()));
        let w = 1.5 * r + 0.5;
        let svg = render_portrait(&PortraitSpec::new(p, [-w, w, -w, w]), &tol).unwrap();
        assert_eq!(svg.matches("class=\"separatrix\"").count(), 6);
        assert!(!svg.contains("class=\"warning\""));
        // a tree edge joins the landing points of consecutive separatrices
        let d = attachment_classes(&tau).unwrap();
        let landing = d.classes.iter().filter(|c| !c.is_empty()).count();
        if landing >= 2 {
            assert!(svg.contains("class=\"tree\""));
        }
        assert!(!seen.contains(&svg));
        seen.push(svg);
    }
}

#[test]
fn loop_portrait_has_two_centers_and_no_tree() {
    let tol = Tolerances::default();
    let spec = PortraitSpec::new(Field::from_eps(&[1.0]).unwrap(), [-2.0, 2.0, -2.0, 2.0]);
    let svg = render_portrait(&spec, &tol).unwrap();
    assert_eq!(svg.matches("class=\"root center\"").count(), 2);
    assert_eq!(svg.matches("class=\"tree\"").count(), 0);
}

#[test]
fn portrait_spec_is_validated_and_parsed() {
    let tol = Tolerances::default();
    let mut spec = PortraitSpec::new(Field::from_eps(&[-1.0]).unwrap(), [1.0, -1.0, -1.0, 1.0]);
    assert!(render_portrait(&spec, &tol).is_err());
    spec.window = [-1.0, 1.0, -1.0, 1.0];
    spec.density = 0;
    assert!(render_portrait(&spec, &tol).is_err());
    let parsed: PortraitSpec = serde_json::from_str(r#"{"poly":{"k":1,"coeffs":[-1.0]},"density":3}"#).unwrap();
    assert_eq!(parsed.window, [-2.5, 2.5, -2.5, 2.5]);
    assert!(parsed.tree_overlay);
}

#[test]
fn selfcheck_filter_runs_only_the_group() {
    let report = selfcheck::run(&SelfcheckConfig::default(), Some("combinatorics"));
    let ids: Vec<usize> = report.checks.iter().map(|c| c.id).collect();
    assert_eq!(ids, vec![1, 2, 3]);
    assert!(report.passed);
    let json = serde_json::to_string(&report).unwrap();
    assert!(!json.contains("elapsed"));
}

#[test]
fn loose_solver_tolerance_breaks_only_the_round_trip() {
    let cfg = SelfcheckConfig {
        tol: Tolerances::with_solver_tol(1e-1),
        ..SelfcheckConfig::default()
    };
    let report = selfcheck::run(&cfg, Some("residue-identity,round-trip-realization"));
    assert_eq!(report.checks.len(), 2);
    assert!(report.checks[0].passed);
    assert!(!report.checks[1].passed);
    assert!(!report.passed);
}

#[test]
fn corpus_covers_every_small_k() {
    let corpus = selfcheck::regression_corpus();
    assert!(corpus.len() >= 20);
    for k in 1..=4 {
        assert!(corpus.iter().filter(|(_, p)| p.k() == k).count() >= 4);
    }
}
