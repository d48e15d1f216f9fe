use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use strata_core::combinatorics::attachment_classes;
use strata_core::invariants::{period_quadrature, trace_separatrices};
use strata_core::selfcheck::oracle::flow_transversal_time;
use strata_core::selfcheck::regression_corpus;
use strata_core::*;

fn from_roots(r: &[(f64, f64)]) -> Field {
    let mut v = Vec::new();
    for &(a, b) in r {
        v.push(Complex64::new(a, b));
        if b != 0.0 {
            v.push(Complex64::new(a, -b));
        }
    }
    RealPolyField::from_roots(&v).unwrap().0
}

/// Zones named by the ends they join: `(j, tau(j))` for arcs, `(r, -r)` for
/// fixed points, both as circle positions.
fn zones(tau: &NonXInvolution) -> Vec<(usize, usize)> {
    let k = tau.k();
    let mut out = Vec::new();
    for j in 1..=tau.domain_len() {
        let t = tau.apply(j);
        if t == j {
            out.push((j, 2 * k - j + 1));
        } else if j < t {
            out.push((j, t));
        }
    }
    out
}

#[test]
fn flow_oracle_matches_residues() {
    let tol = Tolerances::default();
    for (name, p) in regression_corpus() {
        let ex = extract(&p, &tol).unwrap();
        for (a, b) in zones(&ex.tau) {
            let eta = ex.zone_time(a, b, &tol).unwrap();
            let m = flow_transversal_time(&ex, a, b).unwrap();
            assert!(
                (m.eta - eta).norm() <= 1e-5 * (1.0 + eta.norm()),
                "{name} zone ({a}, {b}): residues {eta}, flow {}",
                m.eta
            );
        }
    }
}

#[test]
fn node_pair_times() {
    let tol = Tolerances::default();
    for a in [0.5, 1.0, 2.0] {
        let p = Field::from_eps(&[-a * a]).unwrap();
        let m = extract_modulus(&p, &tol).unwrap();
        assert_eq!(m.eta_i.len(), 1);
        assert!((m.eta_i[0] - PI / a).abs() < 1e-12 * PI / a);
        let eta = transversal_time(&p, 1, &tol).unwrap();
        assert!(eta.re.abs() < 1e-14 && (eta.im - PI / a).abs() < 1e-12);
    }
}

#[test]
fn real_periods() {
    let tol = Tolerances::default();
    let cases = [(vec![1.0], PI), (vec![4.0], PI / 2.0), (vec![5.0, 0.0, 4.0], PI / 6.0)];
    for (eps, want) in cases {
        let p = Field::from_eps(&eps).unwrap();
        let r = period_r(&p, &tol).unwrap();
        assert!((r - want).abs() < 1e-12, "{eps:?}: {r}");
        let roots = find_roots(&p, &tol).unwrap();
        let q = period_quadrature(&p, &roots).unwrap();
        assert!((q - want).abs() < 1e-8 * want);
    }
}

#[test]
fn quadratic_strata() {
    let tol = Tolerances::default();
    let nodes = extract(&Field::from_eps(&[-1.0]).unwrap(), &tol).unwrap();
    assert_eq!(nodes.tau.fixed_points(), vec![1]);
    assert_eq!(nodes.tau.m(), 2);
    let lp = extract(&Field::from_eps(&[1.0]).unwrap(), &tol).unwrap();
    assert_eq!(lp.tau.ell(), 1);
    assert_eq!(lp.tau.m(), 0);
    let m = lp.modulus(&tol).unwrap();
    assert!((m.eta_r.unwrap() - PI).abs() < 1e-12);
    assert!(m.eta_h.is_empty() && m.eta_i.is_empty());
}

#[test]
fn separatrices_of_two_nodes_follow_the_axis() {
    let tol = Tolerances::default();
    let p = Field::from_eps(&[-1.0]).unwrap();
    let ex = extract(&p, &tol).unwrap();
    let land = |j: usize| ex.roots[ex.traces[j].landing.unwrap()].location;
    assert!((land(0) - 1.0).norm() < 1e-12);
    assert!((land(1) + 1.0).norm() < 1e-12);
    for t in &ex.traces {
        assert!(t.points.iter().all(|z| z.im.abs() < 1e-9));
    }
}

#[test]
fn traces_are_conjugation_symmetric() {
    let tol = Tolerances::default();
    for (name, p) in regression_corpus() {
        let k = p.k();
        let roots = find_roots(&p, &tol).unwrap();
        let traces = trace_separatrices(&p, &roots, &tol).unwrap();
        assert_eq!(traces.len(), 2 * k);
        let r = strata_core::invariants::escape_radius(&p);
        for (j, t) in traces.iter().enumerate() {
            assert!(t.points[0].norm() >= r * (1.0 - 1e-12), "{name}");
            if let Some(i) = t.landing {
                let last = *t.points.last().unwrap();
                let z = roots[i].location;
                assert!((last - z).norm() <= 2.0 * tol.landing * (1.0 + z.norm()), "{name}: s_{j}");
            }
            let mirror = &traces[(2 * k - j) % (2 * k)];
            assert_eq!(t.points.len(), mirror.points.len());
            for (a, b) in t.points.iter().zip(&mirror.points) {
                assert!((a - b.conj()).norm() < 1e-6, "{name}: s_{j}");
            }
        }
    }
}

#[test]
fn landing_classes_match_the_combinatorics() {
    let tol = Tolerances::default();
    for (name, p) in regression_corpus() {
        let ex = extract(&p, &tol).unwrap();
        let want = attachment_classes(&ex.tau).unwrap();
        assert_eq!(ex.descriptor, want, "{name}");
        let k = p.k();
        let mut got: Vec<Vec<usize>> = Vec::new();
        for i in 0..ex.roots.len() {
            let class: Vec<usize> = (0..2 * k).filter(|&j| ex.traces[j].landing == Some(i)).collect();
            if !class.is_empty() {
                got.push(class);
            }
        }
        got.sort();
        // singular points reached by no separatrix carry empty classes
        let mut expected: Vec<Vec<usize>> = want.classes.iter().filter(|c| !c.is_empty()).cloned().collect();
        expected.sort();
        assert_eq!(got, expected, "{name}");
    }
}

#[test]
fn modulus_laws_on_the_corpus() {
    let tol = Tolerances::default();
    for (name, p) in regression_corpus() {
        let ex = extract(&p, &tol).unwrap();
        let m = ex.modulus(&tol).unwrap();
        let tau = &ex.tau;
        assert_eq!(m.real_dimension(), p.k(), "{name}");
        assert_eq!(m.imaginary_count(), tau.m() + tau.ell() as usize - 1, "{name}");
        assert_eq!(2 * m.eta_h.len() + m.eta_i.len() + tau.ell() as usize, p.k(), "{name}");
        assert!(m.eta_h.iter().all(|e| e.im > 0.0));
        assert!(m.eta_i.iter().all(|&e| e > 0.0));
        assert!(m.eta_r.map_or(true, |r| r > 0.0));
        let n = 2 * p.k();
        let mirror = |c: usize| (n - c + 1) % n;
        for (a, b) in zones(tau) {
            let up = ex.zone_time(a, b, &tol).unwrap();
            let down = ex.zone_time(mirror(b), mirror(a), &tol).unwrap();
            assert!((down + up.conj()).norm() < 1e-8 * (1.0 + up.norm()), "{name}");
        }
        let back = Modulus::from_real_coords(tau, &m.real_coords()).unwrap();
        assert_eq!(back, m);
    }
}

#[test]
fn coordinate_order() {
    let tol = Tolerances::default();
    // two arcs, (1 4) and (2 3), plus no fixed point
    let p = from_roots(&[(-0.7, 0.0), (0.2, 1.3), (0.6, 0.4)]);
    let ex = extract(&p, &tol).unwrap();
    let m = ex.modulus(&tol).unwrap();
    let links = strata_core::invariants::odd_link_ends(&ex.tau);
    assert_eq!(links.len(), m.eta_h.len());
    assert!(links.windows(2).all(|w| w[0] < w[1]));
    for (eta, &q) in m.eta_h.iter().zip(&links) {
        let t = ex.tau.apply(q);
        let (a, b) = (q.min(t), q.max(t));
        let direct = ex.zone_time(a, b, &tol).unwrap();
        assert!((direct - eta).norm() < 1e-12);
    }
}

#[test]
fn finer_tracing_changes_nothing() {
    let coarse = Tolerances {
        trace_rtol: 1e-8,
        ..Tolerances::default()
    };
    let fine = Tolerances::default();
    for (name, p) in regression_corpus() {
        let a = extract_modulus(&p, &coarse).unwrap();
        let b = extract_modulus(&p, &fine).unwrap();
        assert_eq!(a.tau, b.tau, "{name}");
        let d = a
            .real_coords()
            .iter()
            .zip(b.real_coords())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d < 1e-12, "{name}: {d}");
    }
}

#[test]
fn non_generic_fields_are_refused() {
    let tol = Tolerances::default();
    // centers at +-i force homoclinic loops
    let centers = from_roots(&[(0.0, 1.0), (1.0, 0.0), (-1.0, 0.0)]);
    assert!(matches!(extract_modulus(&centers, &tol), Err(StrataError::NotGeneric(_))));
    let double = Field::from_eps(&[1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(extract_modulus(&double, &tol), Err(StrataError::NotGeneric(_))));
    let imaginary_pair = from_roots(&[(-1.0, 0.0), (1.0, 0.0), (0.0, 2.0)]);
    assert!(extract_modulus(&imaginary_pair, &tol).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `P_r(z) = r^{k+1} P(z / r)` has the same invariant and times scaled by
    /// `r^{-k}`.
    #[test]
    fn zoom_rescales_times(idx in 0usize..21, r in 0.5f64..2.0) {
        let tol = Tolerances::default();
        let (_, p) = regression_corpus().swap_remove(idx);
        let a = extract_modulus(&p, &tol).unwrap();
        let b = extract_modulus(&p.scaled(r), &tol).unwrap();
        prop_assert_eq!(&a.tau, &b.tau);
        let f = r.powi(-(p.k() as i32));
        for (x, y) in a.real_coords().iter().zip(b.real_coords()) {
            prop_assert!((x * f - y).abs() < 1e-9 * (1.0 + y.abs()));
        }
    }
}
