//! The self-check suite: the ten acceptance criteria as library calls, so
//! that the CLI and the test harness run the same code.

pub mod oracle;

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bifurcation3::{discriminant, label_point, label_sequence, sample_diagram, weighted_scale, SampleSpec};
use crate::combinatorics::*;
use crate::config::Tolerances;
use crate::genericity::is_generic_real;
use crate::invariants::{extract, extract_modulus, period_quadrature, period_r};
use crate::poly::{normalize, RealPolyField};
use crate::portrait::{render_portrait, PortraitSpec};
use crate::realization::{random_seed_for_stratum, realize, seed_for_stratum, RealizationProblem};
use crate::roots::{find_roots, residue_sum};
use crate::unfold::unfold_parabolic;

#[derive(Clone, Debug)]
pub struct SelfcheckConfig {
    pub tol: Tolerances,
    pub seed: u64,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            seed: 2024,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
    pub passed: bool,
    pub measured: Value,
    pub failures: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub solver_tol: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type CheckFn = fn(&SelfcheckConfig) -> (Value, Vec<String>);

/// `(id, name, group, check)`.
pub const CHECKS: [(usize, &str, &str, CheckFn); 10] = [
    (1, "stratum-counts", "combinatorics", check_counts),
    (2, "successor-recurrence", "combinatorics", check_successors),
    (3, "dyck-bijections", "combinatorics", check_bijections),
    (4, "residue-identity", "poly", check_residues),
    (5, "analytic-oracles", "invariants", check_oracles),
    (6, "symmetry-laws", "invariants", check_symmetry),
    (7, "round-trip-realization", "realization", check_round_trip),
    (8, "k3-classifier", "bifurcation3", check_k3),
    (9, "unfolding-completeness", "poly", check_unfolding),
    (10, "determinism", "determinism", check_determinism),
];

fn selected(filter: Option<&str>, id: usize, name: &str, group: &str) -> bool {
    match filter {
        None => true,
        Some(f) => f
            .split(',')
            .map(str::trim)
            .any(|f| f == group || f == name || f == id.to_string()),
    }
}

pub fn run_check(id: usize, cfg: &SelfcheckConfig) -> Option<CheckResult> {
    let &(id, name, group, f) = CHECKS.iter().find(|c| c.0 == id)?;
    let t0 = Instant::now();
    let (measured, failures) = f(cfg);
    Some(CheckResult {
        id,
        name,
        group,
        passed: failures.is_empty(),
        measured,
        failures,
        elapsed: t0.elapsed(),
    })
}

/// Runs the checks whose id, name or group matches one of the
/// comma-separated entries of `filter` (all checks when `None`).
pub fn run(cfg: &SelfcheckConfig, filter: Option<&str>) -> Report {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .filter(|c| selected(filter, c.0, c.1, c.2))
        .filter_map(|c| run_check(c.0, cfg))
        .collect();
    Report {
        seed: cfg.seed,
        solver_tol: cfg.tol.solver_tol,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn field_from_roots(spec: &[(f64, f64)]) -> RealPolyField<f64> {
    let mut v = Vec::new();
    for &(a, b) in spec {
        v.push(Complex64::new(a, b));
        if b != 0.0 {
            v.push(Complex64::new(a, -b));
        }
    }
    RealPolyField::from_roots(&v).expect("conjugation-closed corpus").0
}

/// Hand-built generic fields for k = 1..4; `(a, b)` with `b != 0` stands for
/// the pair `a +- ib`.
pub fn regression_corpus() -> Vec<(String, RealPolyField<f64>)> {
    let specs: Vec<(&str, Vec<(f64, f64)>)> = vec![
        ("two-nodes", vec![(-1.0, 0.0), (1.0, 0.0)]),
        ("two-nodes-half", vec![(-0.5, 0.0), (0.5, 0.0)]),
        ("two-nodes-two", vec![(-2.0, 0.0), (2.0, 0.0)]),
        ("center-pair", vec![(0.0, 1.0)]),
        ("center-pair-two", vec![(0.0, 2.0)]),
        ("cubic-three-real", vec![(-1.0, 0.0), (0.3, 0.0), (1.0, 0.0)]),
        ("cubic-spread", vec![(-1.5, 0.0), (0.2, 0.0), (1.1, 0.0)]),
        ("cubic-focus-a", vec![(0.5, 0.0), (-0.25, 1.0)]),
        ("cubic-focus-b", vec![(0.8, 0.0), (-0.1, 0.7)]),
        ("cubic-focus-c", vec![(-0.6, 0.0), (0.3, 1.2)]),
        ("quartic-four-real", vec![(-1.5, 0.0), (-0.4, 0.0), (0.6, 0.0), (1.3, 0.0)]),
        ("quartic-two-real", vec![(-1.0, 0.0), (1.2, 0.0), (-0.1, 2.0)]),
        ("quartic-loop", vec![(0.3, 1.0), (-0.3, 0.6)]),
        ("quartic-two-real-b", vec![(-1.0, 0.0), (0.5, 0.0), (0.2, 0.8)]),
        ("quartic-two-real-c", vec![(-0.3, 0.0), (1.4, 0.0), (-0.6, 1.1)]),
        ("quartic-loop-b", vec![(0.7, 0.5), (-0.5, 1.3)]),
        ("quintic-five-real", vec![(-2.0, 0.0), (-0.8, 0.0), (0.1, 0.0), (0.9, 0.0), (1.8, 0.0)]),
        ("quintic-three-real", vec![(-1.2, 0.0), (0.4, 0.0), (1.5, 0.0), (-0.3, 0.9)]),
        ("quintic-one-real", vec![(-0.7, 0.0), (0.2, 1.3), (0.6, 0.4)]),
        ("quintic-one-real-b", vec![(1.0, 0.0), (-0.9, 0.5), (0.4, 1.1)]),
        ("quintic-three-real-b", vec![(-1.4, 0.0), (-0.2, 0.0), (1.1, 0.0), (0.5, 0.7)]),
    ];
    specs
        .into_iter()
        .map(|(n, r)| (n.to_string(), field_from_roots(&r)))
        .collect()
}

fn check_counts(_: &SelfcheckConfig) -> (Value, Vec<String>) {
    let mut fails = Vec::new();
    let mut sizes = Vec::new();
    for k in 1..=10usize {
        let n = enumerate_strata(k).len() as u128;
        let want = 2 * binomial((k - 1) as u64, ((k - 1) / 2) as u64);
        if n != want {
            fails.push(format!("k = {k}: {n} strata, expected {want}"));
        }
        sizes.push(n);
    }
    for k in 1..=8usize {
        let strata = enumerate_strata(k);
        for m in (0..=k + 1).filter(|m| (m + k + 1) % 2 == 0) {
            let got = strata.iter().filter(|t| t.m() == m).count() as u128;
            match count_dkm(k as u64, m as u64) {
                Ok(want) if want == got => {}
                Ok(want) => fails.push(format!("D({k},{m}) = {want}, enumerated {got}")),
                Err(e) => fails.push(e.to_string()),
            }
        }
    }
    (json!({ "sizes": sizes }), fails)
}

fn check_successors(_: &SelfcheckConfig) -> (Value, Vec<String>) {
    let mut fails = Vec::new();
    let mut images = Vec::new();
    for k in 1..=8usize {
        let mut image = Vec::new();
        for t in enumerate_strata(k).iter().filter(|t| t.m() > 0) {
            match successor_strata(t) {
                Ok([a, b]) => {
                    image.push(a);
                    image.push(b);
                }
                Err(e) => fails.push(format!("{t}: {e}")),
            }
        }
        let d = count_d(k as u64).unwrap_or(0);
        let want = if k % 2 == 0 {
            2 * d
        } else {
            2 * (d - catalan(((k - 1) / 2) as u64))
        };
        if image.len() as u128 != want || count_d(k as u64 + 1).ok() != Some(want) {
            fails.push(format!("k = {k}: {} successors, recurrence gives {want}", image.len()));
        }
        let set: BTreeSet<_> = image.iter().cloned().collect();
        if set.len() != image.len() {
            fails.push(format!("k = {k}: successor map is not injective"));
        }
        let next: BTreeSet<_> = enumerate_strata(k + 1).into_iter().collect();
        if set != next {
            fails.push(format!("k = {k}: successor image differs from level {}", k + 1));
        }
        images.push(image.len());
    }
    (json!({ "successor_counts": images }), fails)
}

fn check_bijections(_: &SelfcheckConfig) -> (Value, Vec<String>) {
    let mut fails = Vec::new();
    let mut sizes = Vec::new();
    for k in 1..=8usize {
        let strata: Vec<_> = enumerate_strata(k).into_iter().filter(|t| t.ell() == 0).collect();
        let mut image = BTreeSet::new();
        for t in &strata {
            match involution_to_dispersed(t) {
                Ok(p) => {
                    if dispersed_to_involution(&p).as_ref() != Ok(t) {
                        fails.push(format!("{t}: inverse does not recover the involution"));
                    }
                    image.insert(p.steps().to_vec());
                }
                Err(e) => fails.push(format!("{t}: {e}")),
            }
        }
        let all: BTreeSet<_> = all_dispersed(k).into_iter().map(|p| p.steps().to_vec()).collect();
        if image != all || image.len() != strata.len() {
            fails.push(format!("k = {k}: involutions do not biject onto dispersed paths"));
        }
        sizes.push(all.len());
    }
    for n in 0..=8usize {
        let mut image = BTreeSet::new();
        let dispersed = all_dispersed(n);
        for p in &dispersed {
            let q = dispersed_to_plain(p);
            if plain_to_dispersed(&q).as_ref() != Ok(p) {
                fails.push(format!("n = {n}: plain path does not map back"));
            }
            image.insert(q);
        }
        let all: BTreeSet<_> = all_plain(n).into_iter().collect();
        if image != all || image.len() != dispersed.len() {
            fails.push(format!("n = {n}: dispersed paths do not biject onto plain paths"));
        }
    }
    (json!({ "dispersed_counts": sizes }), fails)
}

fn random_generic(rng: &mut ChaCha8Rng, k: usize, tol: &Tolerances) -> RealPolyField<f64> {
    loop {
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let p = RealPolyField::new(k, c).expect("finite");
        if matches!(is_generic_real(&p, tol), Ok(g) if g.generic) {
            return p;
        }
    }
}

fn check_residues(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let mut fails = Vec::new();
    let mut worst = Vec::new();
    for k in 1..=6usize {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
        let mut max = 0.0f64;
        for _ in 0..1000 {
            let p = random_generic(&mut rng, k, &cfg.tol);
            match residue_sum(&p, &cfg.tol) {
                Ok(s) => max = max.max(s.norm()),
                Err(e) => fails.push(format!("k = {k}: {e}")),
            }
        }
        if max > 1e-10 {
            fails.push(format!("k = {k}: |sum of residues| reached {max:e}"));
        }
        worst.push(max);
    }
    (json!({ "max_abs_residue_sum": worst }), fails)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check_oracles(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let tol = &cfg.tol;
    let pi = std::f64::consts::PI;
    let mut fails = Vec::new();
    let mut errs = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let loop_field = RealPolyField::from_eps(&[a * a]).unwrap();
        match period_r(&loop_field, tol) {
            Ok(r) => {
                errs.push(rel(r, pi / a));
                if rel(r, pi / a) > 1e-8 {
                    fails.push(format!("eta_R(z^2 + {}) = {r}", a * a));
                }
            }
            Err(e) => fails.push(e.to_string()),
        }
        let nodes = RealPolyField::from_eps(&[-a * a]).unwrap();
        match extract_modulus(&nodes, tol) {
            Ok(m) if m.eta_i.len() == 1 => {
                errs.push(rel(m.eta_i[0], pi / a));
                if rel(m.eta_i[0], pi / a) > 1e-8 {
                    fails.push(format!("eta(z^2 - {}) = i {}", a * a, m.eta_i[0]));
                }
            }
            Ok(m) => fails.push(format!("unexpected modulus shape for z^2 - a^2: {}", m.tau)),
            Err(e) => fails.push(e.to_string()),
        }
    }
    let p = RealPolyField::from_eps(&[5.0, 0.0, 4.0]).unwrap();
    let mut agreement = f64::NAN;
    match (find_roots(&p, tol), period_r(&p, tol)) {
        (Ok(roots), Ok(by_residue)) => match period_quadrature(&p, &roots) {
            Ok(by_quad) => {
                agreement = rel(by_quad, by_residue);
                if agreement > 1e-6 {
                    fails.push(format!("residue {by_residue} vs quadrature {by_quad}"));
                }
                if rel(by_residue, pi / 6.0) > 1e-8 {
                    fails.push(format!("eta_R((z^2+1)(z^2+4)) = {by_residue}"));
                }
            }
            Err(e) => fails.push(e.to_string()),
        },
        (Err(e), _) | (_, Err(e)) => fails.push(e.to_string()),
    }
    let max = errs.iter().fold(0.0f64, |a, &b| a.max(b));
    (json!({ "max_rel_error": max, "quadrature_agreement": agreement }), fails)
}

fn check_symmetry(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let tol = &cfg.tol;
    let mut fails = Vec::new();
    let mut worst_law = 0.0f64;
    let mut worst_flow = 0.0f64;
    let corpus = regression_corpus();
    let ks: BTreeSet<usize> = corpus.iter().map(|(_, p)| p.k()).collect();
    for (name, p) in &corpus {
        let ex = match extract(p, tol) {
            Ok(ex) => ex,
            Err(e) => {
                fails.push(format!("{name}: {e}"));
                continue;
            }
        };
        let m = match ex.modulus(tol) {
            Ok(m) => m,
            Err(e) => {
                fails.push(format!("{name}: {e}"));
                continue;
            }
        };
        let k = p.k();
        let n = 2 * k;
        let tau = &ex.tau;
        if m.real_dimension() != k {
            fails.push(format!("{name}: dimension {} != {k}", m.real_dimension()));
        }
        let want = tau.m() + tau.ell() as usize - 1;
        if m.imaginary_count() != want {
            fails.push(format!("{name}: {} imaginary times, expected {want}", m.imaginary_count()));
        }
        if tau.ell() == 0 && tau.fixed_points().len() != tau.m() - 1 {
            fails.push(format!("{name}: zones meeting the real axis"));
        }
        let mirror = |c: usize| (n - c + 1) % n;
        for j in 1..=tau.domain_len() {
            let t = tau.apply(j);
            let (a, b) = if t == j {
                (j, 2 * k - j + 1)
            } else if j < t {
                (j, t)
            } else {
                continue;
            };
            let (Ok(upper), Ok(lower)) = (ex.zone_time(a, b, tol), ex.zone_time(mirror(b), mirror(a), tol)) else {
                fails.push(format!("{name}: zone ({a}, {b}) failed"));
                continue;
            };
            let law = (lower + upper.conj()).norm() / upper.norm().max(1.0);
            worst_law = worst_law.max(law);
            if law > 1e-8 {
                fails.push(format!("{name}: eta = {upper}, mirror eta = {lower}"));
            }
            match oracle::flow_transversal_time(&ex, a, b) {
                Ok(f) => {
                    let d = (f.eta - upper).norm() / upper.norm();
                    worst_flow = worst_flow.max(d);
                    if d > 1e-5 {
                        fails.push(format!("{name}: flow oracle {} vs {upper}", f.eta));
                    }
                }
                Err(e) => fails.push(format!("{name}: flow oracle: {e}")),
            }
        }
    }
    if corpus.len() < 20 || ks != (1..=4).collect() {
        fails.push("corpus too small".into());
    }
    (
        json!({ "corpus": corpus.len(), "max_conjugate_law": worst_law, "max_flow_oracle": worst_flow }),
        fails,
    )
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn check_round_trip(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let tol = &cfg.tol;
    let mut jobs: Vec<NonXInvolution> = (1..=3).flat_map(enumerate_strata).collect();
    jobs.extend(enumerate_strata(4));
    let results: Vec<(String, std::result::Result<(f64, f64), String>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, tau)| {
            let run = || -> crate::Result<(f64, f64)> {
                let p = random_seed_for_stratum(tau, cfg.seed.wrapping_add(i as u64), tol)?;
                let target = extract_modulus(&p, tol)?;
                let first = seed_for_stratum(tau, tol)?;
                let r1 = realize(&RealizationProblem::new(target.clone(), first, *tol)?)?;
                let second = random_seed_for_stratum(tau, cfg.seed.wrapping_add(1000 + i as u64), tol)?;
                let r2 = realize(&RealizationProblem::new(target, second, *tol)?)?;
                Ok((sup_diff(r1.poly.coeffs(), p.coeffs()), sup_diff(r1.poly.coeffs(), r2.poly.coeffs())))
            };
            (stratum_id(tau), run().map_err(|e| e.to_string()))
        })
        .collect();
    let mut fails = Vec::new();
    let (mut worst, mut worst_unique) = (0.0f64, 0.0f64);
    for (id, r) in &results {
        match r {
            Ok((d, u)) => {
                worst = worst.max(*d);
                worst_unique = worst_unique.max(*u);
                if !(*d < 1e-6) {
                    fails.push(format!("{id}: round trip error {d:e}"));
                }
                if !(*u < 1e-6) {
                    fails.push(format!("{id}: seeds disagree by {u:e}"));
                }
            }
            Err(e) => fails.push(format!("{id}: {e}")),
        }
    }
    (
        json!({ "strata": results.len(), "max_round_trip": worst, "max_seed_disagreement": worst_unique }),
        fails,
    )
}

fn check_k3(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let tol = &cfg.tol;
    let mut fails = Vec::new();
    let spec = SampleSpec::Random {
        lo: -2.0,
        hi: 2.0,
        n: 10_000,
        seed: cfg.seed,
    };
    let points = spec.points();
    let equivalence: Vec<Option<String>> = points
        .par_iter()
        .map(|&[e2, e1, e0]| {
            let p = RealPolyField::new(3, vec![e2, e1, e0]).ok()?;
            let rho = weighted_scale(e2, e1, e0);
            let in_band = discriminant(e2, e1, e0).abs() <= tol.discriminant_band * rho.powi(12);
            let roots = match find_roots(&p, tol) {
                Ok(r) => r,
                Err(e) => return Some(e.to_string()),
            };
            let multiple = roots.iter().any(|r| r.multiplicity > 1);
            if in_band != multiple {
                return Some(format!("{:?}: band {in_band}, multiple root {multiple}", [e2, e1, e0]));
            }
            if !multiple {
                let real = roots.iter().filter(|r| r.is_real).count();
                let d = discriminant(e2, e1, e0);
                let ok = (d > 0.0 && (real == 4 || real == 0)) || (d < 0.0 && real == 2);
                if !ok {
                    return Some(format!("{:?}: delta {d:e} with {real} real roots", [e2, e1, e0]));
                }
            }
            None
        })
        .collect();
    let equivalence_failures = equivalence.iter().flatten().count();
    fails.extend(equivalence.into_iter().flatten().take(5));

    let labels = match sample_diagram(&spec, tol) {
        Ok(l) => l,
        Err(e) => {
            fails.push(e.to_string());
            Vec::new()
        }
    };
    let strata: BTreeSet<String> = labels
        .iter()
        .filter(|l| l.label.starts_with("generic"))
        .map(|l| l.label.clone())
        .collect();
    let expected: BTreeSet<String> = enumerate_strata(3)
        .iter()
        .map(|t| format!("generic({})", stratum_id(t)))
        .collect();
    if strata != expected {
        fails.push(format!("strata met in the sample: {strata:?}"));
    }

    let sweep = SampleSpec::Sweep {
        e2: 1.0,
        e1: 0.0,
        lo: -1.0,
        hi: 1.0,
        n: 200,
    };
    let loop_stratum = NonXInvolution::new(3, 1, vec![2, 1]).expect("k = 3 loop stratum");
    let want = vec![
        "homoclinic-pair-m2".to_string(),
        "higher-codim".to_string(),
        "homoclinic-pair-m0".to_string(),
        "nonreal-parabolic-pair".to_string(),
        format!("generic({})", stratum_id(&loop_stratum)),
    ];
    let mut sequence = Vec::new();
    match sample_diagram(&sweep, tol) {
        Ok(pts) => {
            sequence = label_sequence(&pts);
            if sequence != want {
                fails.push(format!("sweep labels {sequence:?}"));
            }
            let quarter = pts.iter().find(|p| p.eps[2] == 0.25).map(|p| p.label.clone());
            if quarter.as_deref() != Some("nonreal-parabolic-pair") {
                fails.push(format!("label at e0 = 1/4 is {quarter:?}"));
            }
        }
        Err(e) => fails.push(e.to_string()),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa5a5);
    let pairs: Vec<([f64; 3], f64)> = (0..100)
        .map(|_| {
            let e = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            (e, rng.gen_range(0.5..2.0))
        })
        .collect();
    let scaling: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(e, r)| {
            let s = [e[0] * r * r, e[1] * r.powi(3), e[2] * r.powi(4)];
            match (label_point(e, tol), label_point(s, tol)) {
                (Ok(a), Ok(b)) if a.label == b.label => None,
                (Ok(a), Ok(b)) => Some(format!("{e:?} -> {}, scaled by {r} -> {}", a.label, b.label)),
                (Err(x), _) | (_, Err(x)) => Some(x.to_string()),
            }
        })
        .collect();
    let scaling_failures = scaling.iter().flatten().count();
    fails.extend(scaling.into_iter().flatten().take(5));
    (
        json!({
            "equivalence_failures": equivalence_failures,
            "strata_seen": strata.len(),
            "sweep": sequence,
            "scaling_failures": scaling_failures,
        }),
        fails,
    )
}

fn check_unfolding(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let tol = &cfg.tol;
    let mut fails = Vec::new();
    let mut measured = Vec::new();
    // (z^2 + 1)^2 and (z^2 + 1)(z - 1), the latter recentred first
    let cases: Vec<(&str, Vec<f64>)> = vec![
        ("(z^2+1)^2", vec![1.0, 0.0, 2.0, 0.0, 1.0]),
        ("(z^2+1)(z-1)", vec![1.0, -1.0, 1.0, -1.0]),
    ];
    for (name, raw) in cases {
        let run = || -> crate::Result<(usize, usize, f64)> {
            let (p, change) = normalize(&raw)?;
            // i in the original coordinate, pulled to the normalized one
            let z0 = (Complex64::new(0.0, 1.0) - change.shift) / change.scale;
            let fam = unfold_parabolic(&p, z0, tol)?;
            Ok((p.k(), fam.jacobian_rank()?, fam.min_scaled_singular_value()?))
        };
        match run() {
            Ok((k, rank, smin)) => {
                measured.push(json!({ "case": name, "k": k, "rank": rank, "min_singular_value": smin }));
                if rank != k || !(smin > 1e-6) {
                    fails.push(format!("{name}: rank {rank} of {k}, min singular value {smin:e}"));
                }
            }
            Err(e) => fails.push(format!("{name}: {e}")),
        }
    }
    (Value::Array(measured), fails)
}

/// Byte strings whose stability the determinism check asserts.
pub fn determinism_artifacts(cfg: &SelfcheckConfig) -> crate::Result<Vec<String>> {
    let tol = &cfg.tol;
    let mut out = Vec::new();
    for (_, p) in regression_corpus().iter().step_by(4) {
        let m = extract_modulus(p, tol)?;
        out.push(serde_json::to_string(&m).expect("modulus serializes"));
        let spec = PortraitSpec::new(p.clone(), [-2.5, 2.5, -2.5, 2.5]);
        out.push(render_portrait(&spec, tol)?);
    }
    let grid = sample_diagram(&SampleSpec::Grid { lo: -2.0, hi: 2.0, n: 6 }, tol)?;
    let lines: Vec<String> = grid
        .iter()
        .map(|l| serde_json::to_string(l).expect("label serializes"))
        .collect();
    out.push(lines.join("\n"));
    let report = run(cfg, Some("combinatorics"));
    out.push(serde_json::to_string(&report).expect("report serializes"));
    Ok(out)
}

fn digest(parts: &[String]) -> String {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    parts.hash(&mut h);
    format!("{:016x}", h.finish())
}

fn check_determinism(cfg: &SelfcheckConfig) -> (Value, Vec<String>) {
    let mut fails = Vec::new();
    let first = determinism_artifacts(cfg);
    // a different thread count must not change anything
    let second = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .map_err(|e| e.to_string())
        .and_then(|pool| pool.install(|| determinism_artifacts(cfg)).map_err(|e| e.to_string()));
    match (first, second) {
        (Ok(a), Ok(b)) => {
            if a != b {
                let diff = a.iter().zip(&b).filter(|(x, y)| x != y).count();
                fails.push(format!("{diff} artifacts differ between runs"));
            }
            let bytes: usize = a.iter().map(|s| s.len()).sum();
            (json!({ "artifacts": a.len(), "bytes": bytes, "digest": digest(&a) }), fails)
        }
        (Err(e), _) => {
            fails.push(e.to_string());
            (Value::Null, fails)
        }
        (_, Err(e)) => {
            fails.push(e);
            (Value::Null, fails)
        }
    }
}
