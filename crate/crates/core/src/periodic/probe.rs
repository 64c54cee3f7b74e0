//! One-sidedness of real saddles.
//!
//! A half of W^u(p) either escapes entirely or meets K⁺ in a set
//! accumulating at p. Each half is sampled on one fundamental domain of the
//! local unstable manifold and G⁺ is minimised there: a half crossing K⁺
//! drives the minimum towards zero, an escaping half keeps it comparable to
//! the maximum.

use serde::{Deserialize, Serialize};

use super::{PeriodicPoint, TangentBlock};
use crate::dynamics::Automorphism;
use crate::error::{Error, Result};
use crate::surfaces::{gradient, residual, SurfaceParams, SurfacePoint, C64};
use crate::words::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Outer end of the sampled fundamental domain.
    pub reach: f64,
    pub samples: usize,
    pub zoom_rounds: usize,
    pub n_max: usize,
    /// A half escapes when min G / max G exceeds `threshold / λ`.
    pub threshold: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            reach: 1e-3,
            samples: 400,
            zoom_rounds: 4,
            n_max: 400,
            threshold: 1e-2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfProbe {
    pub sign: i8,
    pub min_green: f64,
    pub max_green: f64,
    pub escapes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedReport {
    pub point: SurfacePoint,
    /// The word actually iterated; orientation-reversing words are squared.
    pub word: GroupWord,
    pub period: usize,
    pub unstable_multiplier: f64,
    pub u_one_sided: Option<bool>,
    pub s_one_sided: Option<bool>,
    pub inconclusive: bool,
    pub u_halves: Vec<HalfProbe>,
    pub s_halves: Vec<HalfProbe>,
}

fn project(params: &SurfaceParams, mut q: SurfacePoint) -> SurfacePoint {
    for _ in 0..4 {
        let g = gradient(params, &q);
        let r = residual(params, &q);
        let n2: f64 = g.iter().map(|c| c.norm_sqr()).sum();
        if n2 == 0.0 {
            break;
        }
        let c = q.coords();
        q = SurfacePoint::from_coords([0, 1, 2].map(|i| c[i] - r * g[i].conj() / n2));
    }
    q
}

/// Real eigenvector of the tangent block for eigenvalue `mu`.
fn eigvec(b: &TangentBlock, mu: f64) -> [f64; 3] {
    let m = b.m.map(|r| r.map(|c| c.re));
    let (a, bb, c, d) = (m[0][0] - mu, m[0][1], m[1][0], m[1][1] - mu);
    let w = if a.abs() + bb.abs() >= c.abs() + d.abs() {
        [-bb, a]
    } else {
        [-d, c]
    };
    let v = b
        .lift([C64::new(w[0], 0.0), C64::new(w[1], 0.0)])
        .map(|z| z.re);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

fn probe_half(
    params: &SurfaceParams,
    green: &Automorphism,
    p: &SurfacePoint,
    v: [f64; 3],
    sign: i8,
    span: f64,
    opts: &ProbeOptions,
) -> HalfProbe {
    let at = |t: f64| {
        let s = sign as f64 * t;
        let c = p.coords();
        project(
            params,
            SurfacePoint::from_coords([0, 1, 2].map(|i| c[i] + v[i] * s)),
        )
    };
    let g = |t: f64| green.green(&at(t), opts.n_max).value;
    let hi = opts.reach.ln();
    let lo = hi - span.ln();
    let n = opts.samples.max(8);
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&s| g(s.exp())).collect();
    let max_green = vals.iter().copied().fold(0.0, f64::max);
    let (mut best, mut min_green) = vals
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, x))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let mut centre = grid[best];
    let mut width = (hi - lo) / n as f64;
    for _ in 0..opts.zoom_rounds {
        let m = 40;
        for j in 0..=m {
            let s = centre - width + 2.0 * width * j as f64 / m as f64;
            let x = g(s.exp());
            if x < min_green {
                min_green = x;
                best = j;
            }
        }
        centre = centre - width + 2.0 * width * best as f64 / m as f64;
        width /= m as f64 / 2.0;
    }
    let escapes = max_green > 0.0 && min_green / max_green > opts.threshold / green.lambda;
    HalfProbe {
        sign,
        min_green,
        max_green,
        escapes,
    }
}

/// Probes both halves of the real unstable and stable manifolds of a real saddle.
pub fn one_sided_probe(
    params: &SurfaceParams,
    w: &GroupWord,
    point: &PeriodicPoint,
    opts: &ProbeOptions,
) -> Result<OneSidedReport> {
    if !params.is_real() || !point.is_real {
        return Err(Error::Invalid(
            "one-sided probe needs a real surface and a real point".into(),
        ));
    }
    let word = if w.reverses_orientation() {
        w.pow(2)
    } else {
        w.clone()
    };
    let f = Automorphism::hyperbolic(params, &word)?;
    let p = point.point;
    let period = super::minimal_period(&f, &p, point.period.max(1) * 2, 1e-7);
    let g = f.power(period);
    let (_, jac) = g.apply_with_jacobian(&p);
    let block = TangentBlock::new(params, &p, &jac).ok_or(Error::SingularPoint)?;
    let (a, b) = crate::linalg::eig2(block.m);
    let mut report = OneSidedReport {
        point: p,
        word,
        period,
        unstable_multiplier: a.re,
        u_one_sided: None,
        s_one_sided: None,
        inconclusive: true,
        u_halves: Vec::new(),
        s_halves: Vec::new(),
    };
    if a.im.abs() > 1e-9 * a.norm() || a.norm() < 1.0 + 1e-3 {
        return Ok(report);
    }
    let mu = a.re;
    // A negative multiplier swaps the halves; use the square so each half is invariant.
    let span = if mu > 0.0 { mu.abs() } else { mu * mu };
    let vu = eigvec(&block, a.re);
    let vs = eigvec(&block, b.re);
    let inv = f.inverse();
    report.u_halves = [1, -1]
        .map(|s| probe_half(params, &f, &p, vu, s, span, opts))
        .to_vec();
    report.s_halves = [1, -1]
        .map(|s| probe_half(params, &inv, &p, vs, s, span, opts))
        .to_vec();
    let exactly_one = |h: &[HalfProbe]| h.iter().filter(|x| x.escapes).count() == 1;
    report.u_one_sided = Some(exactly_one(&report.u_halves));
    report.s_one_sided = Some(exactly_one(&report.s_halves));
    report.inconclusive = false;
    Ok(report)
}
