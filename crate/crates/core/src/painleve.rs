//! Painlevé VI parameters and monodromy reports.
//!
//! θ gives boundary traces 2cos(πθ) and hence a surface. Loops around
//! 0, 1 and ∞ act as squared Dehn twists, fixed here as
//! l0 ↦ yxyx, l1 ↦ zyzy, linf ↦ xzxz.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{render_real_chart, RealWindow, Sheet, BOUNDED};
use crate::error::{Error, Result};
use crate::periodic::{real_confinement_report, ConfinementReport, SeedPlan};
use crate::surfaces::{
    classify_real_topology, params_from_traces, RealTopology, SurfaceParams, C64,
};
use crate::words::{classify_word, GroupWord, IsometryKind};

pub const LOOP_CONVENTION: &str = "l0 -> yxyx, l1 -> zyzy, linf -> xzxz";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PainleveTheta {
    pub theta_alpha: C64,
    pub theta_beta: C64,
    pub theta_gamma: C64,
    pub theta_delta: C64,
}

impl PainleveTheta {
    pub fn new(t: [C64; 4]) -> Self {
        PainleveTheta {
            theta_alpha: t[0],
            theta_beta: t[1],
            theta_gamma: t[2],
            theta_delta: t[3],
        }
    }

    pub fn real(t: [f64; 4]) -> Self {
        Self::new(t.map(|v| C64::new(v, 0.0)))
    }

    pub fn components(&self) -> [C64; 4] {
        [
            self.theta_alpha,
            self.theta_beta,
            self.theta_gamma,
            self.theta_delta,
        ]
    }
}

impl FromStr for PainleveTheta {
    type Err = Error;

    /// Four comma-separated numbers, each `re` or `re+imi`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Invalid(format!(
                "theta needs four components, got {s:?}"
            )));
        }
        let mut t = [C64::default(); 4];
        for (slot, p) in t.iter_mut().zip(&parts) {
            *slot = p
                .parse::<C64>()
                .map_err(|_| Error::Invalid(format!("bad theta component {p:?}")))?;
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("theta must be finite".into()));
        }
        Ok(Self::new(t))
    }
}

/// At an integral real part n the trace is exactly (−1)ⁿ·2cosh(π·Im θ).
pub fn theta_to_traces(t: &PainleveTheta) -> [C64; 4] {
    use std::f64::consts::PI;
    t.components().map(|v| {
        let n = v.re.round();
        if (v.re - n).abs() < 1e-12 {
            let sign = if n.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
            C64::new(2.0 * sign * (PI * v.im).cosh(), 0.0)
        } else {
            2.0 * (v * PI).cos()
        }
    })
}

pub fn painleve_params(t: &PainleveTheta) -> SurfaceParams {
    let [a, b, c, d] = theta_to_traces(t);
    params_from_traces(a, b, c, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularMeasureConditions {
    pub holds: bool,
    /// Rounded real parts.
    pub n: [i64; 4],
    pub integral: bool,
    pub odd_sum: bool,
}

pub fn singular_measure_conditions(t: &PainleveTheta) -> SingularMeasureConditions {
    let re = t.components().map(|v| v.re);
    let n = re.map(|x| x.round() as i64);
    let integral = re.iter().zip(&n).all(|(x, &k)| (x - k as f64).abs() < 1e-9);
    let odd_sum = n.iter().sum::<i64>().rem_euclid(2) == 1;
    SingularMeasureConditions {
        holds: integral && odd_sum,
        n,
        integral,
        odd_sum,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loop {
    L0,
    L1,
    Linf,
}

impl Loop {
    pub fn word(self) -> GroupWord {
        let s = match self {
            Loop::L0 => "yxyx",
            Loop::L1 => "zyzy",
            Loop::Linf => "xzxz",
        };
        s.parse().expect("loop words are valid")
    }

    /// l0 → l1 → linf → l0.
    pub fn next(self) -> Loop {
        match self {
            Loop::L0 => Loop::L1,
            Loop::L1 => Loop::Linf,
            Loop::Linf => Loop::L0,
        }
    }
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loop::L0 => "l0",
            Loop::L1 => "l1",
            Loop::Linf => "linf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopWord(pub Vec<Loop>);

impl LoopWord {
    pub fn to_group_word(&self) -> GroupWord {
        self.0
            .iter()
            .fold(GroupWord::identity(), |w, l| w.concat(&l.word()))
    }

    pub fn relabel(&self) -> LoopWord {
        LoopWord(self.0.iter().map(|l| l.next()).collect())
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for LoopWord {
    type Err = Error;

    /// Concatenated loop names such as `l0l1linf`; dots and spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !matches!(c, '.' | ' ' | '*' | '·'))
            .collect::<String>()
            .to_lowercase();
        let mut rest = cleaned.as_str();
        let mut out = Vec::new();
        while !rest.is_empty() {
            let (l, n) = if rest.starts_with("linf") {
                (Loop::Linf, 4)
            } else if rest.starts_with("l0") {
                (Loop::L0, 2)
            } else if rest.starts_with("l1") {
                (Loop::L1, 2)
            } else {
                return Err(Error::Invalid(format!(
                    "cannot read loop word {s:?} at {rest:?}"
                )));
            };
            out.push(l);
            rest = &rest[n..];
        }
        if out.is_empty() {
            return Err(Error::Invalid("empty loop word".into()));
        }
        Ok(LoopWord(out))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterDimension {
    pub value: f64,
    pub residual: f64,
    /// Box sides in pixels.
    pub box_sides: [usize; 2],
    pub marked_pixels: usize,
    /// Forward and backward iterates each marked pixel survived.
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub n_max: usize,
    pub seeds: SeedPlan,
    pub tol: f64,
    pub raster: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 3,
            seeds: SeedPlan::default(),
            tol: 1e-6,
            raster: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub convention: String,
    pub theta: PainleveTheta,
    pub loops: String,
    pub word: GroupWord,
    pub kind: IsometryKind,
    pub lambda: f64,
    pub entropy: f64,
    pub traces: [C64; 4],
    pub params: SurfaceParams,
    pub conditions: SingularMeasureConditions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<RealTopology>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confinement: Option<ConfinementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_real: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<RealWindow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<RasterDimension>,
    pub notes: Vec<String>,
}

/// Box-counting slope of row-major pixel masks of equal shape, with box
/// sides 1, 2, 4, … pixels up to an eighth of the raster.
pub fn mask_box_dimension(
    masks: &[Vec<bool>],
    width: usize,
    height: usize,
    depth: usize,
) -> Result<RasterDimension> {
    let marked_pixels: usize = masks.iter().map(|m| m.iter().filter(|&&b| b).count()).sum();
    if marked_pixels == 0 {
        return Err(Error::Empty("no marked pixels".into()));
    }
    let mut sides = Vec::new();
    let mut s = 1;
    while 8 * s <= width.min(height) {
        sides.push(s);
        s *= 2;
    }
    if sides.len() < 3 {
        return Err(Error::Invalid(format!(
            "a {width}x{height} raster is too small for box counting"
        )));
    }
    let pts: Vec<(f64, f64)> = sides
        .iter()
        .map(|&side| {
            let bw = width.div_ceil(side);
            let mut count = 0usize;
            for m in masks {
                let mut hit = vec![false; bw * height.div_ceil(side)];
                for (i, _) in m.iter().enumerate().filter(|(_, &b)| b) {
                    hit[(i / width / side) * bw + (i % width) / side] = true;
                }
                count += hit.iter().filter(|&&h| h).count();
            }
            (-(side as f64).ln(), (count as f64).ln())
        })
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
    Ok(RasterDimension {
        value: slope,
        residual,
        box_sides: [sides[0], *sides.last().unwrap()],
        marked_pixels,
        depth,
    })
}

/// Estimate of the bounded set on both sheets: pixels surviving `depth`
/// forward and backward iterates, with λ^(−depth) below the pixel size.
pub fn bounded_set_dimension(
    params: &SurfaceParams,
    w: &GroupWord,
    lambda: f64,
    window: RealWindow,
    size: usize,
    escape_radius: f64,
) -> Result<RasterDimension> {
    let pixel = (window.x_max - window.x_min) / size as f64;
    let depth = ((1.0 / pixel).ln() / lambda.ln()).ceil().max(1.0) as usize + 1;
    let inv = w.inverse();
    let mut masks = Vec::new();
    for sheet in [Sheet::Upper, Sheet::Lower] {
        let fwd = render_real_chart(params, w, window, sheet, size, size, depth, escape_radius)?;
        let bwd = render_real_chart(
            params,
            &inv,
            window,
            sheet,
            size,
            size,
            depth,
            escape_radius,
        )?;
        masks.push(
            fwd.values
                .iter()
                .zip(&bwd.values)
                .map(|(&a, &b)| a == BOUNDED && b == BOUNDED)
                .collect(),
        );
    }
    mask_box_dimension(&masks, size, size, depth)
}

/// Square real window for rasters, sized by the parameters.
fn bounded_window(params: &SurfaceParams) -> RealWindow {
    let r = params
        .abc()
        .iter()
        .map(|v| v.norm())
        .fold(params.d.norm().sqrt(), f64::max);
    RealWindow::square(-(2.0 + r), 2.0 + r)
}

pub fn monodromy_report(
    t: &PainleveTheta,
    loops: &LoopWord,
    opts: &ReportOptions,
) -> Result<MonodromyReport> {
    let word = loops.to_group_word();
    let class = classify_word(&word)?;
    let traces = theta_to_traces(t);
    let params = painleve_params(t);
    let conditions = singular_measure_conditions(t);
    let mut report = MonodromyReport {
        convention: LOOP_CONVENTION.into(),
        theta: *t,
        loops: loops.to_string(),
        word: word.clone(),
        kind: class.kind,
        lambda: class.lambda,
        entropy: class.lambda.ln(),
        traces,
        params,
        conditions,
        topology: None,
        confinement: None,
        fraction_real: None,
        window: None,
        dimension: None,
        notes: Vec::new(),
    };
    if class.kind != IsometryKind::Hyperbolic {
        report.notes.push(format!(
            "{} loop word has zero entropy; no dynamics computed",
            class.kind
        ));
        return Ok(report);
    }
    if !conditions.holds {
        report
            .notes
            .push("integrality or odd-sum condition fails; no confinement run".into());
        return Ok(report);
    }
    report.topology = Some(classify_real_topology(&params)?);
    let window = bounded_window(&params);
    let plan = SeedPlan {
        half_width: opts.seeds.half_width.max(window.x_max),
        ..opts.seeds
    };
    let conf = real_confinement_report(&params, &word, opts.n_max, &plan, opts.tol)?;
    let (found, real) = conf
        .rows
        .iter()
        .fold((0, 0), |(f, r), row| (f + row.found, r + row.real));
    report.fraction_real = (found > 0).then(|| real as f64 / found as f64);
    report.confinement = Some(conf);
    report.window = Some(window);
    match bounded_set_dimension(
        &params,
        &word,
        class.lambda,
        window,
        opts.raster,
        2.0 * window.x_max,
    ) {
        Ok(d) => report.dimension = Some(d),
        Err(e) => report.notes.push(format!("no raster dimension: {e}")),
    }
    if params.abc_vanish() && (params.d.re - 4.0).abs() < 1e-12 {
        report.notes.push(
            "Cayley cubic: the compact real piece is bounded for every mapping class, so the raster dimension is 2".into(),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [C64; 4], b: [f64; 4]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn traces_of_examples() {
        assert!(close(
            theta_to_traces(&PainleveTheta::real([0.0; 4])),
            [2.0; 4]
        ));
        assert!(close(
            theta_to_traces(&PainleveTheta::real([1.0; 4])),
            [-2.0; 4]
        ));
        assert!(close(
            theta_to_traces(&PainleveTheta::real([0.5; 4])),
            [0.0; 4]
        ));
    }

    #[test]
    fn conditions_examples() {
        assert!(singular_measure_conditions(&PainleveTheta::real([1.0, 0.0, 0.0, 0.0])).holds);
        assert!(!singular_measure_conditions(&PainleveTheta::real([1.0, 1.0, 0.0, 0.0])).holds);
        let t: PainleveTheta = "1+0.5i,0,0,0".parse().unwrap();
        let c = singular_measure_conditions(&t);
        assert!(c.holds);
        assert_eq!(c.n, [1, 0, 0, 0]);
        assert!(!singular_measure_conditions(&PainleveTheta::real([1.5, 0.0, 0.0, 0.0])).holds);
        assert!(singular_measure_conditions(&PainleveTheta::real([-1.0, -2.0, 0.0, 0.0])).holds);
    }

    #[test]
    fn cayley_parameters() {
        let p = painleve_params(&PainleveTheta::real([1.0, 0.0, 0.0, 0.0]));
        assert!(p.abc_vanish());
        assert!((p.d - 4.0).norm() < 1e-12);
    }

    #[test]
    fn loop_words() {
        let l: LoopWord = "l0l1".parse().unwrap();
        assert_eq!(l.to_group_word().to_string(), "yxyxzyzy");
        assert_eq!(
            "linf l0".parse::<LoopWord>().unwrap().0,
            [Loop::Linf, Loop::L0]
        );
        assert!("l2".parse::<LoopWord>().is_err());
        assert_eq!(l.relabel().relabel().relabel(), l);
    }

    #[test]
    fn single_loop_short_circuits() {
        let t = PainleveTheta::real([1.0, 0.0, 0.0, 0.0]);
        let r = monodromy_report(&t, &"l0".parse().unwrap(), &ReportOptions::default()).unwrap();
        assert_eq!(r.kind, IsometryKind::Parabolic);
        assert_eq!(r.entropy, 0.0);
        assert!(r.confinement.is_none() && r.dimension.is_none());
    }
}
