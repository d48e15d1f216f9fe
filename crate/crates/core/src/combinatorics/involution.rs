//! Non-crossing involutions on the ends at infinity.
//!
//! End labels: the `2k` ends are `e_{+-1}, ..., e_{+-k}`. On the circle they
//! sit at positions `c(j) = j` for `j > 0` and `c(j) = 2k + j + 1` (mod `2k`)
//! for `j < 0`, so `e_{-1}` is at position 0, `e_1` at 1, ..., `e_k` at `k`,
//! `e_{-k}` at `k + 1`, ..., `e_{-2}` at `2k - 1`. Position `c` is the end
//! between the separatrices `s_{c-1}` and `s_c`, where `s_j` leaves in
//! direction `exp(i pi j / k)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StrataError};

use super::dyck::{involution_steps, Step};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NonXInvolution {
    k: usize,
    ell: u8,
    /// `pairing[j - 1] = tau(j)` on `{1, ..., k - ell}`.
    pairing: Vec<usize>,
}

/// Circle position of the signed end label `j`.
pub fn circle_position(k: usize, j: i64) -> usize {
    debug_assert!(j != 0 && j.unsigned_abs() as usize <= k);
    if j > 0 {
        j as usize
    } else {
        ((2 * k) as i64 + j + 1).rem_euclid((2 * k) as i64) as usize
    }
}

/// Signed end label at circle position `c`.
pub fn end_label(k: usize, c: usize) -> i64 {
    let c = c % (2 * k);
    if (1..=k).contains(&c) {
        c as i64
    } else if c == 0 {
        -1
    } else {
        c as i64 - (2 * k) as i64 - 1
    }
}

fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (lo, hi) = if a.0 < a.1 { a } else { (a.1, a.0) };
    let inside = |x: usize| x > lo && x < hi;
    if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
        return false;
    }
    inside(b.0) != inside(b.1)
}

impl NonXInvolution {
    /// Validates and builds the invariant from `tau(1), ..., tau(k - ell)`.
    pub fn new(k: usize, ell: u8, pairing: Vec<usize>) -> Result<Self> {
        let t = Self { k, ell, pairing };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let k = self.k;
        if k == 0 {
            return Err(StrataError::invalid("k must be at least 1"));
        }
        if self.ell > 1 {
            return Err(StrataError::invalid("ell must be 0 or 1"));
        }
        let n = k - self.ell as usize;
        if self.pairing.len() != n {
            return Err(StrataError::invalid(format!(
                "pairing must act on {{1..{n}}}"
            )));
        }
        for (i, &t) in self.pairing.iter().enumerate() {
            let j = i + 1;
            if t == 0 || t > n || self.pairing[t - 1] != j {
                return Err(StrataError::invalid(format!("pairing is not an involution at {j}")));
            }
        }
        if self.ell == 1 {
            if k % 2 == 0 {
                return Err(StrataError::invalid("a real homoclinic loop needs odd k"));
            }
            if self.pairing.iter().enumerate().any(|(i, &t)| t == i + 1) {
                return Err(StrataError::invalid("with ell = 1 the pairing has no fixed points"));
            }
        }
        let chords = self.chords();
        for a in 0..chords.len() {
            for b in (a + 1)..chords.len() {
                if chords_cross(chords[a], chords[b]) {
                    return Err(StrataError::invalid(format!(
                        "links {:?} and {:?} cross",
                        chords[a], chords[b]
                    )));
                }
            }
        }
        Ok(())
    }

    /// All links of the extended involution as pairs of circle positions.
    fn chords(&self) -> Vec<(usize, usize)> {
        let k = self.k;
        let mut out = Vec::new();
        for (i, &t) in self.pairing.iter().enumerate() {
            let j = i + 1;
            if t == j {
                out.push((circle_position(k, j as i64), circle_position(k, -(j as i64))));
            } else if j < t {
                out.push((circle_position(k, j as i64), circle_position(k, t as i64)));
                out.push((
                    circle_position(k, -(j as i64)),
                    circle_position(k, -(t as i64)),
                ));
            }
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> u8 {
        self.ell
    }

    pub fn domain_len(&self) -> usize {
        self.k - self.ell as usize
    }

    /// `tau(j)` for `1 <= j <= k - ell`.
    pub fn apply(&self, j: usize) -> usize {
        self.pairing[j - 1]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.domain_len()).filter(|&j| self.apply(j) == j).collect()
    }

    /// Links `(a, b)` with `a < b`, sorted by `a`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (1..=self.domain_len())
            .filter_map(|j| {
                let t = self.apply(j);
                (j < t).then_some((j, t))
            })
            .collect()
    }

    /// Number of real singular points.
    pub fn m(&self) -> usize {
        self.fixed_points().len() + 1 - self.ell as usize
    }

    /// Extended involution on signed labels `+-1, ..., +-(k - ell)`.
    pub fn extended(&self, j: i64) -> i64 {
        let a = j.unsigned_abs() as usize;
        let t = self.apply(a) as i64;
        let img = if t == a as i64 { -(a as i64) } else { t };
        if j > 0 {
            img
        } else {
            -img
        }
    }

    /// Extended involution acting on circle positions; only meaningful for
    /// `ell = 0`, where every end is linked.
    pub fn on_circle(&self, c: usize) -> usize {
        assert_eq!(self.ell, 0, "circle involution needs ell = 0");
        circle_position(self.k, self.extended(end_label(self.k, c)))
    }

    /// Dispersed Dyck path (for `ell = 0`) or Dyck path on `{1..k-1}` (for
    /// `ell = 1`) encoding the pairing.
    pub fn path_steps(&self) -> Vec<Step> {
        involution_steps(&self.pairing)
    }

    fn order_key(&self) -> (Vec<Step>, u8) {
        (self.path_steps(), self.ell)
    }
}

impl PartialOrd for NonXInvolution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NonXInvolution {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

impl fmt::Display for NonXInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.arcs().iter().map(|(a, b)| format!("({a} {b})")).collect();
        let fixed = self.fixed_points();
        if !fixed.is_empty() {
            let list: Vec<String> = fixed.iter().map(|j| j.to_string()).collect();
            parts.push(format!("fix {}", list.join(",")));
        }
        if self.ell == 1 {
            parts.push("ell=1".into());
        }
        if parts.is_empty() {
            parts.push("empty".into());
        }
        write!(f, "k={} {{{}}}", self.k, parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct InvolutionJson {
    k: usize,
    ell: u8,
    #[serde(default)]
    pairs: Vec<[usize; 2]>,
    #[serde(default)]
    fixed: Vec<usize>,
}

impl Serialize for NonXInvolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InvolutionJson {
            k: self.k,
            ell: self.ell,
            pairs: self.arcs().into_iter().map(|(a, b)| [a, b]).collect(),
            fixed: self.fixed_points(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NonXInvolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = InvolutionJson::deserialize(d)?;
        let n = raw.k.saturating_sub(raw.ell as usize);
        let mut pairing = vec![0usize; n];
        let mut put = |j: usize, t: usize| -> std::result::Result<(), D::Error> {
            if j == 0 || j > n || pairing[j - 1] != 0 {
                return Err(serde::de::Error::custom(format!("end {j} listed twice or out of range")));
            }
            pairing[j - 1] = t;
            Ok(())
        };
        for [a, b] in &raw.pairs {
            put(*a, *b)?;
            put(*b, *a)?;
        }
        for &f in &raw.fixed {
            put(f, f)?;
        }
        NonXInvolution::new(raw.k, raw.ell, pairing).map_err(serde::de::Error::custom)
    }
}

fn all_involutions(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match cur.iter().position(|&t| t == 0) {
            None => out.push(cur.clone()),
            Some(i) => {
                cur[i] = i + 1;
                rec(cur, out);
                cur[i] = 0;
                for j in (i + 1)..cur.len() {
                    if cur[j] == 0 {
                        cur[i] = j + 1;
                        cur[j] = i + 1;
                        rec(cur, out);
                        cur[i] = 0;
                        cur[j] = 0;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0; n], &mut out);
    out
}

/// Every admissible invariant at codimension `k`, in canonical order.
pub fn enumerate_strata(k: usize) -> Vec<NonXInvolution> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for p in all_involutions(k) {
        if let Ok(t) = NonXInvolution::new(k, 0, p) {
            out.push(t);
        }
    }
    if k % 2 == 1 {
        for p in all_involutions(k - 1) {
            if let Ok(t) = NonXInvolution::new(k, 1, p) {
                out.push(t);
            }
        }
    }
    out.sort();
    out
}

/// Position of `tau` in the canonical order at its `k`.
pub fn stratum_index(tau: &NonXInvolution) -> usize {
    enumerate_strata(tau.k())
        .iter()
        .position(|t| t == tau)
        .expect("admissible invariants are enumerated")
}

/// Stable identifier `k<k>-<index>`.
pub fn stratum_id(tau: &NonXInvolution) -> String {
    format!("k{}-{}", tau.k(), stratum_index(tau))
}
