//! Closed-form stratum counts.

use crate::error::{Result, StrataError};

pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r as u128 {
        acc = acc * (n as u128 - r as u128 + i) / i;
    }
    acc
}

pub fn catalan(n: u64) -> u128 {
    binomial(2 * n, n) / (n as u128 + 1)
}

/// Number of dispersed Dyck paths of length `n`.
pub fn dispersed_count(n: u64) -> u128 {
    binomial(n, n / 2)
}

/// Number of generic strata at codimension `k`.
pub fn count_d(k: u64) -> Result<u128> {
    if k == 0 {
        return Err(StrataError::invalid("k must be at least 1"));
    }
    Ok(2 * binomial(k - 1, (k - 1) / 2))
}

/// Number of generic strata with exactly `m` real singular points: ordered
/// forests of `m` plane trees with `(k - m + 1) / 2` edges in total, or
/// `C((k - 1) / 2)` plane trees when `m = 0`.
pub fn count_dkm(k: u64, m: u64) -> Result<u128> {
    if k == 0 {
        return Err(StrataError::invalid("k must be at least 1"));
    }
    if (m + k + 1) % 2 != 0 {
        return Err(StrataError::invalid(format!(
            "m = {m} has the wrong parity for k = {k}"
        )));
    }
    if m == 0 {
        return Ok(catalan((k - 1) / 2));
    }
    if m > k + 1 {
        return Ok(0);
    }
    let edges = ((k + 1 - m) / 2) as usize;
    // coefficient of x^edges in C(x)^m
    let cat: Vec<u128> = (0..=edges as u64).map(catalan).collect();
    let mut poly = vec![0u128; edges + 1];
    poly[0] = 1;
    for _ in 0..m {
        let mut next = vec![0u128; edges + 1];
        for (i, &a) in poly.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &c) in cat.iter().enumerate().take(edges + 1 - i) {
                next[i + j] += a * c;
            }
        }
        poly = next;
    }
    Ok(poly[edges])
}
