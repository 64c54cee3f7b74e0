//! Small dense complex linear algebra.

use num_complex::Complex64 as C64;

pub fn solve3(h: &[[C64; 3]; 3], b: &[C64; 3]) -> Option<[C64; 3]> {
    let mut a: Vec<C64> = h.iter().flatten().copied().collect();
    let mut rhs = b.to_vec();
    let x = solve(&mut a, &mut rhs, 3)?;
    Some([x[0], x[1], x[2]])
}

/// Gaussian elimination with partial pivoting on a row-major n×n system.
pub fn solve(a: &mut [C64], b: &mut [C64], n: usize) -> Option<Vec<C64>> {
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))?;
        if a[piv * n + col].norm() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let inv = a[col * n + col].inv();
        for r in col + 1..n {
            let f = a[r * n + col] * inv;
            if f == C64::default() {
                continue;
            }
            for k in col..n {
                let t = a[col * n + k];
                a[r * n + k] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![C64::default(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Least-squares solution of the row-major m×n system `a·x ≈ b` (m ≥ n)
/// by Householder QR. Columns whose pivot falls below `rcond` times the
/// largest pivot are dropped (their component is set to zero).
pub fn lstsq(a: &mut [C64], b: &mut [C64], m: usize, n: usize, rcond: f64) -> Vec<C64> {
    assert!(m >= n && a.len() == m * n && b.len() == m);
    let mut diag = vec![C64::default(); n];
    for k in 0..n {
        let norm = (k..m).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = C64::default();
            continue;
        }
        let akk = a[k * n + k];
        let phase = if akk.norm() > 0.0 {
            akk / akk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        // v = x − alpha·e1, stored in place of column k.
        a[k * n + k] -= alpha;
        let vnorm2: f64 = (k..m).map(|i| a[i * n + k].norm_sqr()).sum();
        if vnorm2 > 0.0 {
            for j in k + 1..n {
                let s: C64 = (k..m).map(|i| a[i * n + k].conj() * a[i * n + j]).sum();
                let f = s * 2.0 / vnorm2;
                for i in k..m {
                    let v = a[i * n + k];
                    a[i * n + j] -= f * v;
                }
            }
            let s: C64 = (k..m).map(|i| a[i * n + k].conj() * b[i]).sum();
            let f = s * 2.0 / vnorm2;
            for i in k..m {
                let v = a[i * n + k];
                b[i] -= f * v;
            }
        }
        diag[k] = alpha;
    }
    let big = diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let mut x = vec![C64::default(); n];
    for r in (0..n).rev() {
        if diag[r].norm() <= rcond * big || big == 0.0 {
            continue;
        }
        let mut s = b[r];
        for k in r + 1..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / diag[r];
    }
    x
}

/// Roots of the monic-normalized polynomial with coefficients `coef[0] + coef[1] t + …`,
/// by Durand–Kerner iteration.
pub fn poly_roots(coef: &[C64]) -> Vec<C64> {
    let mut coef = coef.to_vec();
    while coef.len() > 1 && coef.last().is_some_and(|c| c.norm() == 0.0) {
        coef.pop();
    }
    let deg = coef.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coef[deg];
    let monic: Vec<C64> = coef.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..deg).map(|k| seed.powu(k as u32) * radius).collect();
    let eval = |t: C64| {
        monic
            .iter()
            .rev()
            .fold(C64::default(), |acc, c| acc * t + c)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Eigenvalues of a complex 2×2 matrix.
pub fn eig2(m: [[C64; 2]; 2]) -> (C64, C64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det * 4.0).sqrt();
    let (p, q) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    // Recompute the smaller root from the product to avoid cancellation.
    if p.norm() >= q.norm() {
        let q = if p.norm() > 0.0 { det / p } else { q };
        (p, q)
    } else {
        let p = if q.norm() > 0.0 { det / q } else { p };
        (q, p)
    }
}

/// Eigenvalues of a complex 3×3 matrix from its characteristic polynomial.
pub fn eig3(m: &[[C64; 3]; 3]) -> Vec<C64> {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    poly_roots(&[-det, minors, -tr, C64::new(1.0, 0.0)])
}

pub fn matmul3(a: &[[C64; 3]; 3], b: &[[C64; 3]; 3]) -> [[C64; 3]; 3] {
    let mut out = [[C64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn identity3() -> [[C64; 3]; 3] {
    let one = C64::new(1.0, 0.0);
    let z = C64::default();
    [[one, z, z], [z, one, z], [z, z, one]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn solves_and_least_squares() {
        let h = [
            [r(2.0), r(1.0), r(0.0)],
            [r(1.0), r(3.0), r(1.0)],
            [r(0.0), r(1.0), r(4.0)],
        ];
        let x = solve3(&h, &[r(3.0), r(5.0), r(5.0)]).unwrap();
        for v in x {
            assert!((v - r(1.0)).norm() < 1e-14);
        }
        // Overdetermined consistent system.
        let mut a = vec![r(1.0), r(0.0), r(0.0), C64::i(), r(1.0), r(1.0)];
        let mut b = vec![r(2.0), C64::new(0.0, 3.0), r(5.0)];
        let x = lstsq(&mut a, &mut b, 3, 2, 1e-12);
        assert!((x[0] - r(2.0)).norm() < 1e-13 && (x[1] - r(3.0)).norm() < 1e-13);
    }

    #[test]
    fn polynomial_roots() {
        let mut z = poly_roots(&[r(-6.0), r(11.0), r(-6.0), r(1.0)]);
        z.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (a, b) in z.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - r(b)).norm() < 1e-12);
        }
        let (p, q) = eig2([[r(5.0), r(2.0)], [r(-2.0), r(-1.0)]]);
        assert!((p.re - (2.0 + 5f64.sqrt())).abs() < 1e-13);
        assert!((q.re - (2.0 - 5f64.sqrt())).abs() < 1e-13);
    }
}
