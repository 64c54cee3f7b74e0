//! Direct eigenvalues of the truncated operator, by Sturm bisection.

use super::{fixed_word_prefix, Substitution};
use crate::error::{Error, Result};

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and unit off-diagonals.
fn count_below(d: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &di) in d.iter().enumerate() {
        q = di - x - if i == 0 { 0.0 } else { 1.0 / q };
        if q == 0.0 {
            q = -f64::EPSILON;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Sorted eigenvalues of the N×N Dirichlet truncation of H on the fixed word.
pub fn tridiagonal_oracle(sub: &Substitution, kappa: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Invalid("oracle needs N ≥ 2".into()));
    }
    let word = fixed_word_prefix(sub, n)?;
    let d: Vec<f64> = word
        .chars()
        .map(|c| if c == 'a' { kappa } else { 0.0 })
        .collect();
    let lo0 = d.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
    let hi0 = d.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (mut lo, mut hi) = (lo0, hi0);
        while hi - lo > 1e-11 {
            let mid = 0.5 * (lo + hi);
            if count_below(&d, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Normalised eigenvector of the truncated operator for a computed eigenvalue, by inverse iteration.
pub fn oracle_eigenvector(
    sub: &Substitution,
    kappa: f64,
    n: usize,
    eigenvalue: f64,
) -> Result<Vec<f64>> {
    let word = fixed_word_prefix(sub, n)?;
    let d: Vec<f64> = word
        .chars()
        .map(|c| if c == 'a' { kappa } else { 0.0 })
        .collect();
    let shift = eigenvalue + 1e-9;
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
        .collect();
    for _ in 0..4 {
        // Thomas algorithm for (H − shift)·y = x with unit off-diagonals.
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        let mut b = d[0] - shift;
        c[0] = 1.0 / b;
        r[0] = x[0] / b;
        for i in 1..n {
            b = d[i] - shift - c[i - 1];
            if b == 0.0 {
                b = 1e-300;
            }
            c[i] = 1.0 / b;
            r[i] = (x[i] - r[i - 1]) / b;
        }
        for i in (0..n - 1).rev() {
            r[i] -= c[i] * r[i + 1];
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = r.into_iter().map(|v| v / norm).collect();
    }
    Ok(x)
}

/// Squared mass of a unit vector on the first and last `sites` entries.
pub fn edge_weight(v: &[f64], sites: usize) -> f64 {
    let k = sites.min(v.len() / 2);
    let head: f64 = v[..k].iter().map(|x| x * x).sum();
    let tail: f64 = v[v.len() - k..].iter().map(|x| x * x).sum();
    head.max(tail)
}
