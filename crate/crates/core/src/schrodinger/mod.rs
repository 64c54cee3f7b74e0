//! Discrete Schrödinger operators with substitution potentials.
//!
//! The transfer matrices over the two letters are
//! M(a) = [[E−κ, −1], [1, 0]] and M(b) = [[E, −1], [1, 0]], and the trace
//! triple (tr M(a), tr M(b), tr M(ab)) lies on the PT surface D = 4 + κ².
//! Substituting inside the word acts on that triple by a trace map.

mod oracle;
mod spectrum;

pub use oracle::{edge_weight, oracle_eigenvector, tridiagonal_oracle};
pub use spectrum::{
    box_dimension, dyadic_scales, spectrum_estimate, BoxDimension, SchrodingerConfig,
    SpectrumEstimate,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::class_matrix::ClassMatrix;
use crate::dynamics::{nielsen_action, Automorphism};
use crate::error::{Error, Result};
use crate::surfaces::{SurfaceParams, SurfacePoint, C64};

pub type Mat2 = [[C64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Substitution {
    pub rule_a: String,
    pub rule_b: String,
    /// Column L counts the a's and b's in the image of L.
    pub abelianization: ClassMatrix,
    pub lambda_plus: f64,
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a->{}, b->{}", self.rule_a, self.rule_b)
    }
}

fn counts(rule: &str) -> (i64, i64) {
    let a = rule.chars().filter(|&c| c == 'a').count() as i64;
    (a, rule.len() as i64 - a)
}

pub fn build_substitution(rule_a: &str, rule_b: &str) -> Result<Substitution> {
    for (l, r) in [('a', rule_a), ('b', rule_b)] {
        if r.is_empty() {
            return Err(Error::Substitution(format!("rule for {l} is empty")));
        }
        if let Some(c) = r.chars().find(|c| !matches!(c, 'a' | 'b')) {
            return Err(Error::Substitution(format!(
                "rule for {l} contains {c:?}; only a and b are allowed"
            )));
        }
    }
    let (aa, ab) = counts(rule_a);
    let (ba, bb) = counts(rule_b);
    let m = ClassMatrix::new(aa, ba, ab, bb);
    if m.det().abs() != 1 {
        return Err(Error::Substitution(format!(
            "abelianization {m} has determinant {}; an invertible substitution needs ±1",
            m.det()
        )));
    }
    let primitive = (1..=4).any(|k| m.try_pow(k).map(|p| p.is_positive()).unwrap_or(false));
    if !primitive {
        return Err(Error::Substitution(format!(
            "{rule_a}, {rule_b} is not primitive: no power of {m} up to 4 is positive"
        )));
    }
    let (tr, det) = (m.trace() as f64, m.det() as f64);
    let lambda_plus = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
    Ok(Substitution {
        rule_a: rule_a.into(),
        rule_b: rule_b.into(),
        abelianization: m,
        lambda_plus,
    })
}

pub fn fibonacci() -> Substitution {
    build_substitution("b", "ba").expect("Fibonacci substitution is valid")
}

impl Substitution {
    /// Parses `fib`, or `A,B` / `A:B` for the rules a→A, b→B.
    pub fn parse(s: &str) -> Result<Substitution> {
        if s.eq_ignore_ascii_case("fib") || s.eq_ignore_ascii_case("fibonacci") {
            return Ok(fibonacci());
        }
        let (a, b) = s
            .split_once([',', ':'])
            .ok_or_else(|| Error::Substitution(format!("expected `fib` or `A,B`, got {s:?}")))?;
        build_substitution(a.trim(), b.trim())
    }

    pub fn image(&self, word: &str) -> String {
        word.chars()
            .map(|c| {
                if c == 'a' {
                    self.rule_a.as_str()
                } else {
                    self.rule_b.as_str()
                }
            })
            .collect()
    }
}

pub fn fixed_word_prefix(sub: &Substitution, n: usize) -> Result<String> {
    let seed = if sub.rule_b.starts_with('b') {
        "b"
    } else if sub.rule_a.starts_with('a') {
        "a"
    } else {
        return Err(Error::Substitution(format!(
            "no rule of {sub} starts with its own letter"
        )));
    };
    let mut w = seed.to_string();
    while w.len() < n {
        let next = sub.image(&w);
        if next.len() <= w.len() {
            return Err(Error::Substitution(format!(
                "{sub} does not grow from {seed}"
            )));
        }
        w = next;
    }
    w.truncate(n.max(1));
    Ok(w)
}

pub fn letter_matrix(kappa: C64, e: C64, letter: char) -> Mat2 {
    let one = C64::new(1.0, 0.0);
    let d = if letter == 'a' { e - kappa } else { e };
    [[d, -one], [one, C64::default()]]
}

pub fn mat_mul(p: &Mat2, q: &Mat2) -> Mat2 {
    [
        [
            p[0][0] * q[0][0] + p[0][1] * q[1][0],
            p[0][0] * q[0][1] + p[0][1] * q[1][1],
        ],
        [
            p[1][0] * q[0][0] + p[1][1] * q[1][0],
            p[1][0] * q[0][1] + p[1][1] * q[1][1],
        ],
    ]
}

/// M(u₁…uₙ) = M(uₙ)⋯M(u₁).
pub fn transfer_matrix(kappa: C64, e: C64, word: &str) -> Mat2 {
    let one = C64::new(1.0, 0.0);
    let mut p = [[one, C64::default()], [C64::default(), one]];
    for c in word.chars() {
        p = mat_mul(&letter_matrix(kappa, e, c), &p);
    }
    p
}

pub fn trace(m: &Mat2) -> C64 {
    m[0][0] + m[1][1]
}

pub fn curve_params(kappa: C64) -> SurfaceParams {
    SurfaceParams::pt(kappa * kappa + 4.0)
}

pub fn schrodinger_curve(kappa: C64, e: C64) -> SurfacePoint {
    SurfacePoint::new(e - kappa, e, e * (e - kappa) - 2.0)
}

/// The automorphism of D = 4 + κ² sending the trace triple of (a, b) to that of (ι(a), ι(b)).
pub fn trace_map(sub: &Substitution, kappa: C64) -> Result<Automorphism> {
    let inv = sub.abelianization.inverse()?;
    let mut f = nielsen_action(&inv)?.automorphism(&curve_params(kappa))?;
    f.label = format!("trace map of {sub}");
    Ok(f)
}

/// (tr M(ι(a)), tr M(ι(b)), tr M(ι(ab))) computed from transfer matrices.
pub fn substituted_traces(sub: &Substitution, kappa: C64, e: C64) -> SurfacePoint {
    let t = |w: &str| trace(&transfer_matrix(kappa, e, w));
    SurfacePoint::new(t(&sub.rule_a), t(&sub.rule_b), t(&sub.image("ab")))
}

/// (1/n)·log‖M(u₁…uₙ)‖ along the fixed word, renormalising the running product.
pub fn lyapunov(sub: &Substitution, kappa: f64, e: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Invalid("lyapunov needs n ≥ 1".into()));
    }
    let word = fixed_word_prefix(sub, n)?;
    let mut p = [[1.0, 0.0], [0.0, 1.0f64]];
    let mut log_scale = 0.0;
    for c in word.chars() {
        let d = if c == 'a' { e - kappa } else { e };
        p = [
            [d * p[0][0] - p[1][0], d * p[0][1] - p[1][1]],
            [p[0][0], p[0][1]],
        ];
        let s = p.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if s > 1e100 {
            p = p.map(|r| r.map(|v| v / s));
            log_scale += s.ln();
        }
    }
    let fro = p.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    Ok(((fro.ln() + log_scale) / n as f64).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn fibonacci_rules() {
        let f = fibonacci();
        assert_eq!(f.abelianization, ClassMatrix::new(0, 1, 1, 1));
        assert!((f.lambda_plus - 1.618033988749895).abs() < 1e-12);
        assert!(build_substitution("a", "b").is_err());
        let alt = build_substitution("ab", "a").unwrap();
        assert!((alt.lambda_plus - 1.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn fixed_word() {
        let f = fibonacci();
        assert_eq!(
            fixed_word_prefix(&f, 26).unwrap(),
            "babbababbabbababbababbabba"
        );
        assert_eq!(fixed_word_prefix(&f, 1).unwrap(), "b");
        assert!(fixed_word_prefix(&f, 13)
            .unwrap()
            .starts_with(&fixed_word_prefix(&f, 5).unwrap()));
        let no_seed = build_substitution("b", "ab").unwrap();
        assert!(fixed_word_prefix(&no_seed, 4).is_err());
    }

    #[test]
    fn transfer_examples() {
        let m = transfer_matrix(c(0.3), c(1.7), "b");
        assert_eq!(m, [[c(1.7), c(-1.0)], [c(1.0), c(0.0)]]);
        let m = transfer_matrix(c(0.0), c(0.0), "bb");
        assert_eq!(m, [[c(-1.0), c(0.0)], [c(0.0), c(-1.0)]]);
        let (k, e) = (c(0.7), c(-1.3));
        let t = trace(&transfer_matrix(k, e, "ab"));
        assert!((t - (e * (e - k) - 2.0)).norm() < 1e-14);
    }

    #[test]
    fn curve_examples() {
        let p = schrodinger_curve(c(2.0), c(1.0));
        assert_eq!(p, SurfacePoint::real(-1.0, 1.0, -3.0));
        assert_eq!(crate::surfaces::residual(&curve_params(c(2.0)), &p), c(0.0));
        let p = schrodinger_curve(c(0.0), c(0.0));
        assert_eq!(p, SurfacePoint::real(0.0, 0.0, -2.0));
    }

    #[test]
    fn fibonacci_trace_map_identity() {
        let f = fibonacci();
        let (k, e) = (c(1.0), c(0.5));
        let tm = trace_map(&f, k).unwrap();
        let lhs = tm.apply(&schrodinger_curve(k, e));
        let rhs = substituted_traces(&f, k, e);
        assert!(lhs.max_dist(&rhs) < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn lyapunov_constant_cocycles() {
        let f = fibonacci();
        assert!(lyapunov(&f, 0.0, 1.0, 5000).unwrap() < 5e-3);
        let target = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((lyapunov(&f, 0.0, 3.0, 20000).unwrap() - target).abs() < 1e-3);
    }
}
