//! Point dynamics of the involutions and of trace maps.
//!
//! Every map here is a composition of the three Vieta involutions and of
//! coordinate swaps, stored as a list of [`Step`]s in application order.
//! Words and Nielsen moves both compile to that form, so orbits, Green
//! functions and Jacobians are written once.

mod nielsen;
mod raster;
mod sampling;

pub use nielsen::{nielsen_action, NielsenMap, NielsenMove};
pub use raster::{
    pgm_bytes, render_complex_slice, render_real_chart, write_pgm, EscapeRaster, RasterMeta,
    RealWindow, Sheet, SliceSpec, BOUNDED, OFF_SURFACE,
};
pub use sampling::{sample_real_seeds, SeedSample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surfaces::{gradient, residual, SurfaceParams, SurfacePoint, C64};
use crate::words::{classify_word, reduce, GroupWord, IsometryKind, Letter};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e3;
pub const MEMBERSHIP_BUDGET: usize = 10_000;
pub const RASTER_BUDGET: usize = 200;

/// Above this modulus orbits are continued on coordinate log-magnitudes.
const LOG_SWITCH: f64 = 1e100;
/// Log-norm at which a Green function estimate is taken.
const GREEN_DEPTH: f64 = 1e15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// The involution in one coordinate.
    Flip(Letter),
    /// Exchange two coordinates.
    Swap(usize, usize),
}

/// A polynomial automorphism of one surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    pub params: SurfaceParams,
    /// Steps in application order.
    pub steps: Vec<Step>,
    /// Dynamical degree.
    pub lambda: f64,
    pub label: String,
}

pub fn apply_generator(params: &SurfaceParams, letter: Letter, p: &SurfacePoint) -> SurfacePoint {
    let mut c = p.coords();
    flip(params, letter, &mut c);
    SurfacePoint::from_coords(c)
}

#[inline]
fn flip(params: &SurfaceParams, letter: Letter, c: &mut [C64; 3]) {
    let s = params.convention.sigma();
    let k = letter.index();
    let (i, j) = others(k);
    let shift = match letter {
        Letter::X => params.a,
        Letter::Y => params.b,
        Letter::Z => params.c,
    };
    c[k] = shift + c[i] * c[j] * s - c[k];
}

#[inline]
fn others(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Applies a word, last letter first.
pub fn apply_word(params: &SurfaceParams, w: &GroupWord, p: &SurfacePoint) -> SurfacePoint {
    let mut c = p.coords();
    for &l in w.letters.iter().rev() {
        flip(params, l, &mut c);
    }
    SurfacePoint::from_coords(c)
}

fn logaddexp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn log_norm_of_logs(l: &[f64; 3]) -> f64 {
    0.5 * logaddexp(logaddexp(2.0 * l[0], 2.0 * l[1]), 2.0 * l[2])
}

impl Automorphism {
    pub fn from_word(params: &SurfaceParams, w: &GroupWord) -> Result<Self> {
        params.validate()?;
        let w = reduce(w);
        let class = classify_word(&w)?;
        Ok(Automorphism {
            params: *params,
            steps: w.letters.iter().rev().map(|&l| Step::Flip(l)).collect(),
            lambda: class.lambda,
            label: w.to_string(),
        })
    }

    /// Like [`Automorphism::from_word`], but rejects words that are not hyperbolic.
    pub fn hyperbolic(params: &SurfaceParams, w: &GroupWord) -> Result<Self> {
        let class = classify_word(w)?;
        if class.kind != IsometryKind::Hyperbolic {
            return Err(Error::NotHyperbolic {
                matrix: w.to_string(),
                kind: class.kind.to_string(),
            });
        }
        Self::from_word(params, w)
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            params: self.params,
            steps: self.steps.iter().rev().copied().collect(),
            lambda: self.lambda,
            label: format!("({})^-1", self.label),
        }
    }

    /// The map applied `n` times.
    pub fn power(&self, n: usize) -> Automorphism {
        Automorphism {
            params: self.params,
            steps: self.steps.repeat(n),
            lambda: self.lambda.powi(n as i32),
            label: format!("({})^{n}", self.label),
        }
    }

    #[inline]
    pub fn apply(&self, p: &SurfacePoint) -> SurfacePoint {
        let mut c = p.coords();
        self.apply_coords(&mut c);
        SurfacePoint::from_coords(c)
    }

    #[inline]
    fn apply_coords(&self, c: &mut [C64; 3]) {
        for s in &self.steps {
            match *s {
                Step::Flip(l) => flip(&self.params, l, c),
                Step::Swap(i, j) => c.swap(i, j),
            }
        }
    }

    /// Image of `p` together with the 3×3 Jacobian of the map at `p`.
    pub fn apply_with_jacobian(&self, p: &SurfacePoint) -> (SurfacePoint, [[C64; 3]; 3]) {
        let sigma = self.params.convention.sigma();
        let mut c = p.coords();
        let mut jac = crate::linalg::identity3();
        for s in &self.steps {
            match *s {
                Step::Flip(l) => {
                    let k = l.index();
                    let (i, j) = others(k);
                    // Row k becomes σ·c_j·row_i + σ·c_i·row_j − row_k.
                    let (ci, cj) = (c[i] * sigma, c[j] * sigma);
                    for col in 0..3 {
                        jac[k][col] = cj * jac[i][col] + ci * jac[j][col] - jac[k][col];
                    }
                    flip(&self.params, l, &mut c);
                }
                Step::Swap(i, j) => {
                    c.swap(i, j);
                    jac.swap(i, j);
                }
            }
        }
        (SurfacePoint::from_coords(c), jac)
    }

    fn apply_logs(&self, l: &mut [f64; 3]) {
        for s in &self.steps {
            match *s {
                Step::Flip(letter) => {
                    let k = letter.index();
                    let (i, j) = others(k);
                    let prod = l[i] + l[j];
                    // The two roots in coordinate k multiply to about c_i² + c_j²
                    // and add to about ±c_i·c_j.
                    l[k] = if l[k] < prod - std::f64::consts::LN_2 {
                        prod
                    } else {
                        logaddexp(2.0 * l[i], 2.0 * l[j]) - l[k]
                    };
                }
                Step::Swap(i, j) => l.swap(i, j),
            }
        }
    }

    /// One application of the map, switching to log-magnitudes once any
    /// coordinate passes the overflow guard.
    fn advance(&self, state: &mut OrbitState) {
        match state {
            OrbitState::Linear(c) => {
                for (n, s) in self.steps.iter().enumerate() {
                    match *s {
                        Step::Flip(l) => flip(&self.params, l, c),
                        Step::Swap(i, j) => c.swap(i, j),
                    }
                    if c.iter().any(|v| v.re.abs() + v.im.abs() > LOG_SWITCH)
                        || c.iter().any(|v| !v.is_finite())
                    {
                        let mut l = c.map(|v| v.norm().ln().max(-700.0));
                        let rest = Automorphism {
                            steps: self.steps[n + 1..].to_vec(),
                            ..self.clone()
                        };
                        rest.apply_logs(&mut l);
                        *state = OrbitState::Log(l);
                        return;
                    }
                }
            }
            OrbitState::Log(l) => self.apply_logs(l),
        }
    }

    pub fn orbit(&self, p: &SurfacePoint, opts: &OrbitOptions) -> OrbitRecord {
        let mut tracker = EscapeTracker::new(opts.escape_radius);
        let mut state = OrbitState::Linear(p.coords());
        let r0 = residual(&self.params, p);
        let mut drift = 0.0f64;
        let mut samples = opts.keep_samples.then(|| vec![*p]);
        tracker.push(state.log_norm());
        for k in 1..=opts.max_iter {
            self.advance(&mut state);
            if let OrbitState::Linear(c) = &state {
                let q = SurfacePoint::from_coords(*c);
                if opts.track_drift {
                    drift = drift
                        .max((residual(&self.params, &q) - r0).norm() / (1.0 + q.norm().powi(2)));
                }
                if let Some(s) = samples.as_mut() {
                    s.push(q);
                }
            }
            if tracker.push(state.log_norm()) {
                return OrbitRecord {
                    escaped: true,
                    escape_time: Some(k),
                    final_log_norm: state.log_norm(),
                    samples,
                    max_residual_drift: drift,
                };
            }
        }
        OrbitRecord {
            escaped: false,
            escape_time: None,
            final_log_norm: state.log_norm(),
            samples,
            max_residual_drift: drift,
        }
    }

    /// Escape time alone, for rasters and spectrum scans.
    pub fn escape_time(
        &self,
        p: &SurfacePoint,
        max_iter: usize,
        escape_radius: f64,
    ) -> Option<usize> {
        let mut tracker = EscapeTracker::new(escape_radius);
        let mut state = OrbitState::Linear(p.coords());
        tracker.push(state.log_norm());
        for k in 1..=max_iter {
            self.advance(&mut state);
            if tracker.push(state.log_norm()) {
                return Some(k);
            }
        }
        None
    }

    /// Log-norms `log‖fᵏ(p)‖` for k = 0..=n, continued through the log regime.
    pub fn log_norms(&self, p: &SurfacePoint, n: usize) -> Vec<f64> {
        let mut state = OrbitState::Linear(p.coords());
        let mut out = Vec::with_capacity(n + 1);
        out.push(state.log_norm());
        for _ in 0..n {
            self.advance(&mut state);
            out.push(state.log_norm());
        }
        out
    }

    pub fn green(&self, p: &SurfacePoint, n_max: usize) -> GreenEstimate {
        let opts = OrbitOptions {
            max_iter: n_max,
            ..OrbitOptions::default()
        };
        let record = self.orbit(p, &opts);
        if !record.escaped {
            return GreenEstimate {
                value: 0.0,
                iterations_used: n_max,
                lambda: self.lambda,
            };
        }
        let mut state = OrbitState::Linear(p.coords());
        let mut n = 0;
        while n < n_max.max(record.escape_time.unwrap_or(0)) {
            self.advance(&mut state);
            n += 1;
            if state.log_norm() >= GREEN_DEPTH {
                break;
            }
        }
        let ln = state.log_norm().max(0.0);
        let value = if ln > 0.0 {
            (ln.ln() - n as f64 * self.lambda.ln()).exp()
        } else {
            0.0
        };
        GreenEstimate {
            value,
            iterations_used: n,
            lambda: self.lambda,
        }
    }

    /// Growth rate of `log log‖fⁿ(p)‖`, from its last increment.
    pub fn escape_rate(&self, p: &SurfacePoint, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(Error::Invalid("escape rate needs n ≥ 2".into()));
        }
        let norms = self.log_norms(p, n);
        let (a, b) = (norms[n - 1], norms[n]);
        if !(a > 0.0 && b > a) || b < LOG_SWITCH.ln() {
            return Err(Error::BoundedAtBudget(n));
        }
        Ok(b.ln() - a.ln())
    }

    /// |f*Ω / Ω| at `p`, for the invariant area form Ω = dx∧dy / (∂F/∂z).
    ///
    /// The chart at `p` and at `f(p)` is the one whose omitted coordinate has
    /// the largest gradient component.
    pub fn area_ratio(&self, p: &SurfacePoint) -> Result<f64> {
        let (q, jac) = self.apply_with_jacobian(p);
        let gp = gradient(&self.params, p);
        let gq = gradient(&self.params, &q);
        let scale = |pt: &SurfacePoint| 1e-12 * (1.0 + pt.norm().powi(2));
        let pick = |g: &[C64; 3]| {
            (0..3)
                .max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm()))
                .unwrap()
        };
        let (i, j) = (pick(&gp), pick(&gq));
        if gp[i].norm() < scale(p) || gq[j].norm() < scale(&q) {
            return Err(Error::SingularPoint);
        }
        // Chart coordinates in cyclic order: omit x → (y,z), omit y → (z,x), omit z → (x,y).
        let chart = |k: usize| ((k + 1) % 3, (k + 2) % 3);
        let (u1, u2) = chart(i);
        let (w1, w2) = chart(j);
        let lift = |u: usize| {
            let mut v = [C64::default(); 3];
            v[u] = C64::new(1.0, 0.0);
            v[i] = -gp[u] / gp[i];
            v
        };
        let push = |v: [C64; 3], row: usize| (0..3).map(|k| jac[row][k] * v[k]).sum::<C64>();
        let (e1, e2) = (lift(u1), lift(u2));
        let det = push(e1, w1) * push(e2, w2) - push(e2, w1) * push(e1, w2);
        Ok(det.norm() * gp[i].norm() / gq[j].norm())
    }
}

#[derive(Clone, Debug)]
enum OrbitState {
    Linear([C64; 3]),
    Log([f64; 3]),
}

impl OrbitState {
    fn log_norm(&self) -> f64 {
        match self {
            OrbitState::Linear(c) => 0.5 * c.iter().map(|v| v.norm_sqr()).sum::<f64>().ln(),
            OrbitState::Log(l) => log_norm_of_logs(l),
        }
    }
}

/// Escape is declared once the norm exceeds the radius and has increased at
/// each of the last three steps (or at every step so far, early on).
struct EscapeTracker {
    log_radius: f64,
    history: [f64; 4],
    len: usize,
}

impl EscapeTracker {
    fn new(radius: f64) -> Self {
        EscapeTracker {
            log_radius: radius.ln(),
            history: [0.0; 4],
            len: 0,
        }
    }

    fn push(&mut self, log_norm: f64) -> bool {
        let log_norm = if log_norm.is_nan() {
            f64::INFINITY
        } else {
            log_norm
        };
        self.history.rotate_left(1);
        self.history[3] = log_norm;
        self.len += 1;
        if log_norm <= self.log_radius || self.len < 2 {
            return false;
        }
        let k = (self.len - 1).min(3);
        (4 - k..4).all(|i| self.history[i] > self.history[i - 1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub max_iter: usize,
    pub escape_radius: f64,
    pub keep_samples: bool,
    pub track_drift: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            max_iter: MEMBERSHIP_BUDGET,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            keep_samples: false,
            track_drift: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub escaped: bool,
    pub escape_time: Option<usize>,
    pub final_log_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SurfacePoint>>,
    pub max_residual_drift: f64,
}

impl OrbitRecord {
    /// Bounded for the whole budget. This is evidence, not proof, of boundedness.
    pub fn bounded_at_budget(&self) -> bool {
        !self.escaped
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEstimate {
    pub value: f64,
    pub iterations_used: usize,
    pub lambda: f64,
}

pub fn orbit(
    params: &SurfaceParams,
    w: &GroupWord,
    p: &SurfacePoint,
    max_iter: usize,
    escape_radius: f64,
) -> Result<OrbitRecord> {
    if max_iter == 0 {
        return Err(Error::Invalid("max_iter must be at least 1".into()));
    }
    let f = Automorphism::from_word(params, w)?;
    Ok(f.orbit(
        p,
        &OrbitOptions {
            max_iter,
            escape_radius,
            ..OrbitOptions::default()
        },
    ))
}

pub fn green_plus(
    params: &SurfaceParams,
    w: &GroupWord,
    p: &SurfacePoint,
    n_max: usize,
) -> Result<GreenEstimate> {
    Ok(Automorphism::hyperbolic(params, w)?.green(p, n_max))
}

pub fn green_minus(
    params: &SurfaceParams,
    w: &GroupWord,
    p: &SurfacePoint,
    n_max: usize,
) -> Result<GreenEstimate> {
    green_plus(params, &w.inverse(), p, n_max)
}

pub fn escape_rate(
    params: &SurfaceParams,
    w: &GroupWord,
    p: &SurfacePoint,
    n: usize,
) -> Result<f64> {
    Automorphism::from_word(params, w)?.escape_rate(p, n)
}

pub fn area_ratio(params: &SurfaceParams, w: &GroupWord, p: &SurfacePoint) -> Result<f64> {
    Automorphism::from_word(params, w)?.area_ratio(p)
}
