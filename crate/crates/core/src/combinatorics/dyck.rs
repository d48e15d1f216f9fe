//! Dispersed Dyck paths and the two bijections used to count strata.

use serde::{Deserialize, Serialize};

use crate::error::{Result, StrataError};

use super::involution::NonXInvolution;

/// Lattice step. The derived order (`Down < Flat < Up`) is the canonical
/// path order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Down,
    Flat,
    Up,
}

impl Step {
    pub fn dy(self) -> i64 {
        match self {
            Step::Down => -1,
            Step::Flat => 0,
            Step::Up => 1,
        }
    }

    fn flipped(self) -> Step {
        match self {
            Step::Down => Step::Up,
            Step::Flat => Step::Flat,
            Step::Up => Step::Down,
        }
    }
}

/// Nonnegative path from height 0 to height 0 whose flat steps all sit at
/// height 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DispersedDyckPath {
    steps: Vec<Step>,
}

impl DispersedDyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let mut h = 0i64;
        for (i, s) in steps.iter().enumerate() {
            if *s == Step::Flat && h != 0 {
                return Err(StrataError::invalid(format!("flat step {i} at positive height")));
            }
            h += s.dy();
            if h < 0 {
                return Err(StrataError::invalid(format!("path goes below zero at step {i}")));
            }
        }
        if h != 0 {
            return Err(StrataError::invalid("path does not return to height 0"));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn flat_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == Step::Flat).count()
    }
}

/// Step `j` is up if `tau(j) > j`, down if `tau(j) < j` and flat if fixed.
pub(crate) fn involution_steps(pairing: &[usize]) -> Vec<Step> {
    pairing
        .iter()
        .enumerate()
        .map(|(i, &t)| match t.cmp(&(i + 1)) {
            std::cmp::Ordering::Greater => Step::Up,
            std::cmp::Ordering::Less => Step::Down,
            std::cmp::Ordering::Equal => Step::Flat,
        })
        .collect()
}

pub fn involution_to_dispersed(tau: &NonXInvolution) -> Result<DispersedDyckPath> {
    if tau.ell() != 0 {
        return Err(StrataError::invalid("dispersed paths encode ell = 0 invariants"));
    }
    DispersedDyckPath::new(tau.path_steps())
}

/// Inverse of [`involution_to_dispersed`]: up steps open links that the
/// matching down steps close, flats are fixed points.
pub fn dispersed_to_involution(path: &DispersedDyckPath) -> Result<NonXInvolution> {
    let n = path.len();
    let mut pairing = vec![0usize; n];
    let mut open = Vec::new();
    for (i, s) in path.steps().iter().enumerate() {
        match s {
            Step::Up => open.push(i + 1),
            Step::Down => {
                let a = open.pop().expect("valid path");
                pairing[a - 1] = i + 1;
                pairing[i] = a;
            }
            Step::Flat => pairing[i] = i + 1,
        }
    }
    NonXInvolution::new(n, 0, pairing)
}

/// Sends a dispersed path of length `n` to a `+-1` path ending at height 0
/// (`n` even) or -1 (`n` odd). Odd-numbered flats become down steps and flip
/// the excursions that follow; even-numbered flats become up steps and end
/// the flip.
pub fn dispersed_to_plain(path: &DispersedDyckPath) -> Vec<Step> {
    let mut reflected = false;
    path.steps()
        .iter()
        .map(|&s| match s {
            Step::Flat => {
                reflected = !reflected;
                if reflected {
                    Step::Down
                } else {
                    Step::Up
                }
            }
            other if reflected => other.flipped(),
            other => other,
        })
        .collect()
}

pub fn plain_to_dispersed(steps: &[Step]) -> Result<DispersedDyckPath> {
    let mut h = 0i64;
    let mut out = Vec::with_capacity(steps.len());
    for &s in steps {
        if s == Step::Flat {
            return Err(StrataError::invalid("plain paths have no flat steps"));
        }
        let next = h + s.dy();
        let step = if (h == 0 && s == Step::Down) || (h == -1 && s == Step::Up) {
            Step::Flat
        } else if h < 0 {
            s.flipped()
        } else {
            s
        };
        out.push(step);
        h = next;
    }
    let end = if steps.len() % 2 == 0 { 0 } else { -1 };
    if h != end {
        return Err(StrataError::invalid(format!("plain path must end at height {end}")));
    }
    DispersedDyckPath::new(out)
}

/// All dispersed paths of length `n`, sorted.
pub fn all_dispersed(n: usize) -> Vec<DispersedDyckPath> {
    fn rec(n: usize, h: i64, cur: &mut Vec<Step>, out: &mut Vec<DispersedDyckPath>) {
        let left = (n - cur.len()) as i64;
        if left == 0 {
            if h == 0 {
                out.push(DispersedDyckPath { steps: cur.clone() });
            }
            return;
        }
        if h > left {
            return;
        }
        for s in [Step::Down, Step::Flat, Step::Up] {
            let ok = match s {
                Step::Down => h > 0,
                Step::Flat => h == 0,
                Step::Up => h + 1 <= left - 1,
            };
            if ok {
                cur.push(s);
                rec(n, h + s.dy(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut Vec::new(), &mut out);
    out
}

/// All `+-1` paths of length `n` from 0 to 0 (`n` even) or -1 (`n` odd).
pub fn all_plain(n: usize) -> Vec<Vec<Step>> {
    let end = if n % 2 == 0 { 0 } else { -1 };
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let steps: Vec<Step> = (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 1 { Step::Up } else { Step::Down })
            .collect();
        if steps.iter().map(|s| s.dy()).sum::<i64>() == end {
            out.push(steps);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Step::*;

    #[test]
    fn step_rule_examples() {
        let t = NonXInvolution::new(3, 0, vec![1, 2, 3]).unwrap();
        assert_eq!(involution_to_dispersed(&t).unwrap().steps(), &[Flat, Flat, Flat]);
        let t = NonXInvolution::new(3, 0, vec![2, 1, 3]).unwrap();
        assert_eq!(involution_to_dispersed(&t).unwrap().steps(), &[Up, Down, Flat]);
    }

    #[test]
    fn rejects_raised_flats() {
        assert!(DispersedDyckPath::new(vec![Up, Flat, Down]).is_err());
        assert!(DispersedDyckPath::new(vec![Down, Up]).is_err());
        assert!(DispersedDyckPath::new(vec![Up]).is_err());
    }

    #[test]
    fn plain_examples() {
        let p = DispersedDyckPath::new(vec![Flat]).unwrap();
        assert_eq!(dispersed_to_plain(&p), vec![Down]);
        let p = DispersedDyckPath::new(vec![Up, Down]).unwrap();
        assert_eq!(dispersed_to_plain(&p), vec![Up, Down]);
        let p = DispersedDyckPath::new(vec![Flat, Up, Down, Flat]).unwrap();
        assert_eq!(dispersed_to_plain(&p), vec![Down, Down, Up, Up]);
        assert_eq!(plain_to_dispersed(&[Down, Down, Up, Up]).unwrap(), p);
    }

    #[test]
    fn length_four_image_is_everything() {
        let mut img: Vec<Vec<Step>> = all_dispersed(4).iter().map(dispersed_to_plain).collect();
        img.sort();
        let mut all = all_plain(4);
        all.sort();
        assert_eq!(all.len(), 6);
        assert_eq!(img, all);
    }
}
