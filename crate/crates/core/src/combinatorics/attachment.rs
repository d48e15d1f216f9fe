//! Landing classes of the separatrices and the plane forest they span.
//!
//! Separatrix `s_j` (`0 <= j < 2k`) leaves `infinity` in direction
//! `exp(i pi j / k)`; ends are indexed by circle positions as in
//! [`super::involution`]. When `m > 0` the permutation
//! `sigma(j) = tau(j + 1)` on circle positions sends a separatrix to the next
//! one landing at the same point. When `m = 0` the real axis is a homoclinic
//! loop, `s_0` and `s_k` do not land, and `sigma(j) = tau(j + 1)` acts on
//! `{1, ..., k - 1}` with the end `k` identified with the end `1`.

use serde::Serialize;

use crate::error::{Result, StrataError};

use super::involution::NonXInvolution;

/// A rooted plane tree; children are listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlaneTree {
    pub children: Vec<PlaneTree>,
}

impl PlaneTree {
    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|c| 1 + c.edge_count()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratumDescriptor {
    pub tau: NonXInvolution,
    pub m: usize,
    /// Separatrix labels grouped by landing point, each sorted, classes
    /// sorted by their smallest label.
    pub classes: Vec<Vec<usize>>,
    /// Whether the class lands on the real axis.
    pub real: Vec<bool>,
    /// One tree per real point, from the rightmost to the leftmost; a single
    /// tree over the upper points when `m = 0`.
    pub upper_forest: Vec<PlaneTree>,
}

impl StratumDescriptor {
    /// Class index of separatrix `j`, if `s_j` lands.
    pub fn class_of(&self, j: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&j))
    }
}

fn orbits(labels: &[usize], next: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for &start in labels {
        if seen.contains(&start) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut j = start;
        loop {
            if !seen.insert(j) {
                break;
            }
            orbit.push(j);
            j = next(j);
        }
        orbit.sort();
        out.push(orbit);
    }
    out.sort();
    out
}

pub fn attachment_classes(tau: &NonXInvolution) -> Result<StratumDescriptor> {
    let k = tau.k();
    let n = 2 * k;
    let conj = |j: usize| (n - j) % n;

    if k == 1 && tau.ell() == 1 {
        // z^2 + a^2: both separatrices lie on the real loop, the two centers
        // receive none
        return Ok(StratumDescriptor {
            tau: tau.clone(),
            m: 0,
            classes: vec![vec![], vec![]],
            real: vec![false, false],
            upper_forest: vec![PlaneTree { children: vec![] }],
        });
    }

    let classes = if tau.ell() == 0 {
        let labels: Vec<usize> = (0..n).collect();
        orbits(&labels, |j| tau.on_circle((j + 1) % n))
    } else {
        let upper: Vec<usize> = (1..k).collect();
        let sigma = |j: usize| {
            let nxt = if j + 1 == k { 1 } else { j + 1 };
            tau.apply(nxt)
        };
        let mut up = orbits(&upper, sigma);
        let mirrored: Vec<Vec<usize>> = up
            .iter()
            .map(|c| {
                let mut m: Vec<usize> = c.iter().map(|&j| conj(j)).collect();
                m.sort();
                m
            })
            .collect();
        up.extend(mirrored);
        up.sort();
        up
    };
    if classes.len() != k + 1 {
        return Err(StrataError::invalid(format!(
            "{} landing classes instead of {}",
            classes.len(),
            k + 1
        )));
    }
    let class_of = |j: usize| classes.iter().position(|c| c.contains(&j));
    let real: Vec<bool> = classes
        .iter()
        .map(|c| {
            let mut m: Vec<usize> = c.iter().map(|&j| conj(j)).collect();
            m.sort();
            &m == c
        })
        .collect();

    // upper edges: one per arc (a, b), joining the landings of the two
    // separatrices bounding end b
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (_, b) in tau.arcs() {
        let u = class_of(b - 1).expect("landing separatrix");
        let v = class_of(b).expect("landing separatrix");
        edges.push((u, v, b));
    }
    let m = tau.m();
    let roots: Vec<usize> = if m > 0 {
        // real points from right to left, chained by the symmetric zones
        let mut chain = vec![class_of(0).expect("s_0 lands when m > 0")];
        for r in tau.fixed_points() {
            let u = class_of(r - 1).expect("landing separatrix");
            let v = class_of(r).expect("landing separatrix");
            let last = *chain.last().unwrap();
            let nxt = if u == last { v } else if v == last { u } else {
                return Err(StrataError::invalid("symmetric zones do not chain the real points"));
            };
            chain.push(nxt);
        }
        chain
    } else {
        vec![class_of(1).expect("s_1 lands")]
    };

    fn grow(v: usize, parent: Option<usize>, edges: &[(usize, usize, usize)], seen: &mut Vec<bool>) -> Result<PlaneTree> {
        seen[v] = true;
        let mut nbrs: Vec<(usize, usize)> = edges
            .iter()
            .filter_map(|&(a, b, lbl)| {
                if a == v {
                    Some((lbl, b))
                } else if b == v {
                    Some((lbl, a))
                } else {
                    None
                }
            })
            .filter(|&(_, w)| Some(w) != parent)
            .collect();
        nbrs.sort();
        let mut children = Vec::new();
        for (_, w) in nbrs {
            if seen[w] {
                return Err(StrataError::invalid("upper graph has a cycle"));
            }
            children.push(grow(w, Some(v), edges, seen)?);
        }
        Ok(PlaneTree { children })
    }
    let mut seen = vec![false; classes.len()];
    let mut forest = Vec::new();
    for &r in &roots {
        forest.push(grow(r, None, &edges, &mut seen)?);
    }
    let upper_count = real.iter().filter(|&&r| !r).count() / 2;
    let covered = seen.iter().filter(|&&s| s).count();
    let expected = if m > 0 { m + upper_count } else { upper_count };
    if covered != expected {
        return Err(StrataError::invalid("upper forest does not span the upper points"));
    }
    Ok(StratumDescriptor {
        tau: tau.clone(),
        m,
        classes,
        real,
        upper_forest: forest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::involution::enumerate_strata;

    #[test]
    fn k2_all_fixed() {
        let t = NonXInvolution::new(2, 0, vec![1, 2]).unwrap();
        let d = attachment_classes(&t).unwrap();
        assert_eq!(d.classes, vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(d.real, vec![true, true, true]);
        assert_eq!(d.upper_forest.len(), 3);
    }

    #[test]
    fn k1_cases() {
        let t = NonXInvolution::new(1, 0, vec![1]).unwrap();
        let d = attachment_classes(&t).unwrap();
        assert_eq!(d.classes, vec![vec![0], vec![1]]);
        let t = NonXInvolution::new(1, 1, vec![]).unwrap();
        let d = attachment_classes(&t).unwrap();
        assert_eq!(d.classes.len(), 2);
        assert!(d.classes.iter().all(|c| c.is_empty()));
    }

    #[test]
    fn k3_real_loop() {
        let t = NonXInvolution::new(3, 1, vec![2, 1]).unwrap();
        let d = attachment_classes(&t).unwrap();
        assert_eq!(d.classes, vec![vec![1], vec![2], vec![4], vec![5]]);
        assert_eq!(d.real.iter().filter(|&&r| !r).count(), 4);
        assert_eq!(d.upper_forest.len(), 1);
        assert_eq!(d.upper_forest[0].edge_count(), 1);
    }

    #[test]
    fn classes_are_conjugation_closed() {
        for k in 1..=7 {
            for t in enumerate_strata(k) {
                let d = attachment_classes(&t).unwrap();
                assert_eq!(d.classes.len(), k + 1);
                for c in &d.classes {
                    let mut m: Vec<usize> = c.iter().map(|&j| (2 * k - j) % (2 * k)).collect();
                    m.sort();
                    assert!(d.classes.contains(&m));
                }
                assert_eq!(d.real.iter().filter(|&&r| r).count(), t.m());
            }
        }
    }
}
