//! Spectra from trace-map escape, and box-counting dimension.
//!
//! G⁺∘s is harmonic off Σ_κ, vanishes on it and grows like log|E|, so it is
//! a multiple of the Green function of Σ_κ and is strictly concave on every
//! real gap. A grid energy where the sampled G⁺∘s dips below the mean of its
//! two neighbours therefore has spectrum within one grid step; those
//! energies, together with the ones bounded for the whole budget, are the
//! bounded flags.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{curve_params, schrodinger_curve, trace_map, Substitution};
use crate::error::{Error, Result};
use crate::surfaces::C64;

/// Iterations allowed past the escape time to reach the Green-function depth.
const GREEN_EXTRA: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerConfig {
    pub kappa: f64,
    pub window: (f64, f64),
    pub grid: usize,
    pub budget: usize,
    pub escape_radius: f64,
}

impl Default for SchrodingerConfig {
    fn default() -> Self {
        SchrodingerConfig {
            kappa: 1.0,
            window: (-3.0, 3.0),
            grid: 2001,
            budget: 1000,
            escape_radius: 1e4,
        }
    }
}

impl SchrodingerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::Invalid(format!(
                "grid must be at least 2, got {}",
                self.grid
            )));
        }
        if self.budget < 1 {
            return Err(Error::Invalid("budget must be at least 1".into()));
        }
        let (lo, hi) = self.window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid(format!("bad energy window {lo}:{hi}")));
        }
        if !(self.escape_radius > 2.0) {
            return Err(Error::Invalid("escape radius must exceed 2".into()));
        }
        Ok(())
    }

    pub fn energies(&self) -> Vec<f64> {
        let (lo, hi) = self.window;
        let n = self.grid;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.window.1 - self.window.0) / (self.grid - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub kappa: f64,
    pub energies: Vec<f64>,
    /// Trace-map escape time of s(E); `None` if bounded for the whole budget.
    pub escape_times: Vec<Option<usize>>,
    /// G⁺(s(E)), zero when bounded at budget.
    pub green: Vec<f64>,
    pub bounded_flags: Vec<bool>,
    pub intervals: Vec<(f64, f64)>,
    pub gaps: Vec<(f64, f64)>,
    pub dimension: Option<BoxDimension>,
}

impl SpectrumEstimate {
    /// Gaps with bands on both sides.
    pub fn interior_gaps(&self) -> &[(f64, f64)] {
        let lo = usize::from(self.gaps.first().is_some_and(|g| g.0 <= self.energies[0]));
        let hi = self.gaps.len()
            - usize::from(
                self.gaps
                    .last()
                    .is_some_and(|g| g.1 >= *self.energies.last().unwrap()),
            );
        &self.gaps[lo..hi.max(lo)]
    }

    /// Energies whose orbit stayed below the escape radius for the whole budget.
    pub fn bounded_at_budget(&self) -> Vec<bool> {
        self.escape_times.iter().map(|t| t.is_none()).collect()
    }

    pub fn bounded_energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.energies
            .iter()
            .zip(&self.bounded_flags)
            .filter(|(_, &b)| b)
            .map(|(&e, _)| e)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// Fills unflagged runs of at most `max_fill` points that lie between flagged points.
fn fill_small_gaps(flags: &mut [bool], max_fill: usize) {
    let n = flags.len();
    let mut i = 0;
    while i < n {
        if flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && !flags[i] {
            i += 1;
        }
        if start > 0 && i < n && i - start <= max_fill {
            flags[start..i].iter_mut().for_each(|f| *f = true);
        }
    }
}

fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < flags.len() {
        if flags[i] {
            let s = i;
            while i < flags.len() && flags[i] {
                i += 1;
            }
            out.push((s, i - 1));
        } else {
            i += 1;
        }
    }
    out
}

/// Energies certified to have spectrum within one grid step.
fn certified(green: &[f64]) -> Vec<bool> {
    let n = green.len();
    (0..n)
        .map(|i| {
            green[i] == 0.0
                || (i > 0
                    && i + 1 < n
                    && green[i] < 0.5 * (green[i - 1] + green[i + 1]) * (1.0 - 1e-9))
        })
        .collect()
}

pub fn spectrum_estimate(
    sub: &Substitution,
    config: &SchrodingerConfig,
) -> Result<SpectrumEstimate> {
    config.validate()?;
    let kappa = C64::new(config.kappa, 0.0);
    let f = trace_map(sub, kappa)?;
    debug_assert_eq!(f.params, curve_params(kappa));
    let energies = config.energies();
    let samples: Vec<(Option<usize>, f64)> = energies
        .par_iter()
        .map(|&e| {
            let p = schrodinger_curve(kappa, C64::new(e, 0.0));
            match f.escape_time(&p, config.budget, config.escape_radius) {
                None => (None, 0.0),
                Some(t) => (Some(t), f.green(&p, t + GREEN_EXTRA).value),
            }
        })
        .collect();
    let (escape_times, green): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
    let mut bounded_flags = certified(&green);
    fill_small_gaps(&mut bounded_flags, 1);
    let h = config.step();
    let (lo, hi) = config.window;
    let intervals: Vec<(f64, f64)> = runs(&bounded_flags)
        .into_iter()
        .map(|(s, e)| {
            (
                (energies[s] - h / 2.0).max(lo),
                (energies[e] + h / 2.0).min(hi),
            )
        })
        .collect();
    let mut gaps = Vec::new();
    let mut cursor = lo;
    for &(a, b) in &intervals {
        if a > cursor {
            gaps.push((cursor, a));
        }
        cursor = b;
    }
    if cursor < hi {
        gaps.push((cursor, hi));
    }
    let scales = dyadic_scales(hi - lo, h);
    let dimension = if intervals.is_empty() || scales.len() < 4 {
        None
    } else {
        box_dimension(&intervals, &scales).ok()
    };
    Ok(SpectrumEstimate {
        kappa: config.kappa,
        energies,
        escape_times,
        green,
        bounded_flags,
        intervals,
        gaps,
        dimension,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub value: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub scales: usize,
}

/// Scales width/2^j from width/8 down to eight grid steps.
pub fn dyadic_scales(width: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = width / 8.0;
    while s >= 8.0 * step {
        out.push(s);
        s /= 2.0;
    }
    out
}

fn cover_count(intervals: &[(f64, f64)], eps: f64) -> usize {
    let mut boxes: Vec<(i64, i64)> = intervals
        .iter()
        .map(|&(a, b)| ((a / eps).floor() as i64, (b / eps).floor() as i64))
        .collect();
    boxes.sort_unstable();
    let mut count = 0;
    let mut last = i64::MIN;
    for (s, e) in boxes {
        let s = s.max(last + 1);
        if e >= s {
            count += (e - s + 1) as usize;
            last = e;
        }
    }
    count
}

/// Least-squares slope of log N(ε) against log(1/ε). Points are zero-length intervals.
pub fn box_dimension(intervals: &[(f64, f64)], scales: &[f64]) -> Result<BoxDimension> {
    if intervals.is_empty() {
        return Err(Error::Empty("box dimension of an empty set".into()));
    }
    if scales.len() < 2 {
        return Err(Error::Invalid(
            "box dimension needs at least two scales".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .map(|&e| ((1.0 / e).ln(), (cover_count(intervals, e) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BoxDimension {
        value: slope.clamp(0.0, 1.0),
        residual,
        scales: pts.len(),
    })
}
