use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use chardyn::dynamics::{
    green_minus, green_plus, pgm_bytes, render_complex_slice, render_real_chart, sample_real_seeds,
    Automorphism, EscapeRaster, OrbitOptions, RealWindow, Sheet, BOUNDED, OFF_SURFACE,
};
use chardyn::export;
use chardyn::painleve::{monodromy_report, LoopWord, PainleveTheta, ReportOptions};
use chardyn::periodic::{
    cayley_census, find_periodic, one_sided_probe, real_confinement_report, seeds, OneSided,
    PointKind, ProbeOptions, SearchOptions, SeedPlan,
};
use chardyn::schrodinger::{
    box_dimension, lyapunov, spectrum_estimate, SchrodingerConfig, Substitution,
};
use chardyn::surfaces::params_from_traces;
use chardyn::words::{classify_word, reduce, stability_data, word_to_matrix};
use chardyn::{Error, GroupWord, SurfaceParams, SurfacePoint, C64};

use crate::args::*;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

type Res<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// The resolved run configuration, echoed into every artifact. The worker
/// count is left out: artifacts must not depend on it.
#[derive(Serialize)]
struct RunConfig<'a, P: Serialize> {
    command: &'a str,
    params: &'a P,
    outputs: &'a Outputs,
    seed: u64,
    version: &'static str,
}

struct Ctx {
    config: Value,
    outputs: Outputs,
}

impl Ctx {
    fn new<P: Serialize>(cli: &Cli, params: &P, outputs: &Outputs) -> Res<Ctx> {
        let rc = RunConfig {
            command: cli.command.name(),
            params,
            outputs,
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION"),
        };
        let config = serde_json::to_value(&rc).map_err(|e| invalid(e.to_string()))?;
        Ok(Ctx {
            config,
            outputs: outputs.clone(),
        })
    }

    fn document(&self, body: Value) -> Value {
        let mut doc = serde_json::Map::new();
        doc.insert("config".into(), self.config.clone());
        match body {
            Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("result".into(), other);
            }
        }
        Value::Object(doc)
    }

    fn report(&self, body: Value) -> Res<()> {
        let text = pretty(&self.document(body))?;
        match &self.outputs.report {
            Some(p) => write_file(p, text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|e| invalid(format!("stdout: {e}")))
            }
        }
    }

    /// Writes the main artifact to --out with a JSON sidecar next to it.
    fn artifact(&self, bytes: &[u8], summary: Value) -> Res<()> {
        if let Some(p) = &self.outputs.out {
            write_file(p, bytes)?;
            write_file(&sidecar(p), pretty(&self.document(summary))?.as_bytes())?;
        }
        Ok(())
    }
}

fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn pretty(v: &Value) -> Res<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_file(p: &Path, bytes: &[u8]) -> Res<()> {
    fs::write(p, bytes).map_err(|e| invalid(format!("cannot write {}: {e}", p.display())))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Res<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(buf)
}

fn parse_c64(s: &str, what: &str) -> Res<C64> {
    let v: C64 = s
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: cannot read {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("{what} must be finite")));
    }
    Ok(v)
}

fn parse_list(s: &str, n: usize, what: &str) -> Res<Vec<C64>> {
    let v: Vec<C64> = s
        .split(',')
        .map(|p| parse_c64(p, what))
        .collect::<Res<_>>()?;
    if v.len() != n {
        return Err(invalid(format!(
            "{what} needs {n} comma-separated entries, got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn parse_word(s: &str) -> Res<GroupWord> {
    Ok(s.parse::<GroupWord>()?)
}

fn parse_point(s: &str) -> Res<SurfacePoint> {
    let v = parse_list(s, 3, "point")?;
    Ok(SurfacePoint::new(v[0], v[1], v[2]))
}

fn parse_range(s: &str, what: &str) -> Res<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("{what}: expected lo:hi, got {s:?}")))?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: bad number {a:?}")))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{what}: bad number {b:?}")))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("{what}: need finite lo < hi, got {s:?}")));
    }
    Ok((lo, hi))
}

fn parse_window(s: &str) -> Res<RealWindow> {
    let (x, y) = match s.split_once(',') {
        Some((x, y)) => (parse_range(x, "window")?, parse_range(y, "window")?),
        None => {
            let r = parse_range(s, "window")?;
            (r, r)
        }
    };
    Ok(RealWindow {
        x_min: x.0,
        x_max: x.1,
        y_min: y.0,
        y_max: y.1,
    })
}

fn parse_grid(s: &str) -> Res<(usize, usize)> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| invalid(format!("grid: bad size {t:?}")))
    };
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (num(w)?, num(h)?),
        None => (num(s)?, num(s)?),
    };
    if w == 0 || h == 0 {
        return Err(invalid("grid must be at least 1x1"));
    }
    Ok((w, h))
}

fn surface(a: &SurfaceArgs) -> Res<SurfaceParams> {
    if let Some(t) = &a.traces {
        let v = parse_list(t, 4, "traces")?;
        let p = params_from_traces(v[0], v[1], v[2], v[3]);
        p.validate()?;
        return Ok(p);
    }
    let [pa, pb, pc, pd] =
        [(&a.a, "A"), (&a.b, "B"), (&a.c, "C"), (&a.d, "D")].map(|(s, w)| parse_c64(s, w));
    let (pa, pb, pc, pd) = (pa?, pb?, pc?, pd?);
    let abc_zero = [pa, pb, pc].iter().all(|v| *v == C64::default());
    let conv = a.convention.unwrap_or(if abc_zero {
        ConventionArg::Pt
    } else {
        ConventionArg::Fam
    });
    let p = match conv {
        ConventionArg::Pt if !abc_zero => {
            return Err(invalid("the pt convention needs A = B = C = 0"))
        }
        ConventionArg::Pt => SurfaceParams::pt(pd),
        ConventionArg::Fam => SurfaceParams::fam(pa, pb, pc, pd),
    };
    p.validate()?;
    Ok(p)
}

fn seed_plan(s: &SeedArgs, seed: u64) -> Res<SeedPlan> {
    if !(s.half_width > 0.0) || !(s.complex_spread >= 0.0) {
        return Err(invalid(
            "seed half-width must be positive and spread non-negative",
        ));
    }
    Ok(SeedPlan {
        half_width: s.half_width,
        real_grid: s.real_grid,
        complex: s.complex,
        complex_spread: s.complex_spread,
        rng_seed: seed,
    })
}

pub fn run(cli: &Cli) -> Res<()> {
    match &cli.command {
        Command::Classify(a) => classify(cli, a),
        Command::Orbit(a) => orbit(cli, a),
        Command::Green(a) => green(cli, a),
        Command::RenderSlice(a) => render_slice(cli, a),
        Command::RenderReal(a) => render_real(cli, a),
        Command::Periodic(a) => periodic(cli, a),
        Command::CayleyCensus(a) => census(cli, a),
        Command::Spectrum(a) => spectrum(cli, a),
        Command::Lyapunov(a) => lyapunov_cmd(cli, a),
        Command::Dimension(a) => dimension(cli, a),
        Command::Painleve(a) => painleve(cli, a),
    }
}

fn classify(cli: &Cli, a: &ClassifyArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let w = parse_word(&a.word)?;
    let class = classify_word(&w)?;
    let mut body = json!({
        "word": w,
        "reduced": reduce(&w),
        "matrix": word_to_matrix(&w),
        "kind": class.kind,
        "lambda": class.lambda,
        "entropy": class.lambda.ln(),
        "orientation_reversing": w.reverses_orientation(),
    });
    if let Some(s) = class.slope {
        body["slope"] = json!(s);
    }
    if let Ok(st) = stability_data(&w) {
        body["stable"] = json!(st.stable);
        body["ind_f"] = json!(st.ind_f);
        body["ind_finv"] = json!(st.ind_finv);
    }
    ctx.report(body)
}

fn orbit(cli: &Cli, a: &OrbitArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let params = surface(&a.surface)?;
    let w = parse_word(&a.word)?;
    if a.max_iter == 0 {
        return Err(invalid("max-iter must be at least 1"));
    }
    match (&a.point, a.random) {
        (Some(_), Some(_)) => Err(invalid("give either --point or --random, not both")),
        (None, None) => Err(invalid("give a starting --point or a --random sample size")),
        (Some(p), None) => {
            let p = parse_point(p)?;
            let f = Automorphism::from_word(&params, &w)?;
            let rec = f.orbit(
                &p,
                &OrbitOptions {
                    max_iter: a.max_iter,
                    escape_radius: a.escape_radius,
                    keep_samples: true,
                    track_drift: true,
                },
            );
            let samples = rec.samples.clone().unwrap_or_default();
            let summary = json!({
                "escaped": rec.escaped,
                "escape_time": rec.escape_time,
                "final_log_norm": rec.final_log_norm,
                "max_residual_drift": rec.max_residual_drift,
                "samples": samples.len(),
            });
            ctx.artifact(
                &csv_bytes(|b| export::write_orbit_csv(&samples, b))?,
                summary.clone(),
            )?;
            ctx.report(summary)
        }
        (None, Some(n)) => {
            let s = sample_real_seeds(
                &params,
                &w,
                n,
                a.half_width,
                a.max_iter,
                a.escape_radius,
                cli.seed,
            )?;
            let escaped = s.iter().filter(|p| p.escape_time.is_some()).count();
            let compact = s.iter().filter(|p| p.max_abs() <= 2.0).count();
            let compact_bounded = s
                .iter()
                .filter(|p| p.max_abs() <= 2.0 && p.escape_time.is_none())
                .count();
            let summary = json!({
                "samples": s.len(),
                "escaped": escaped,
                "bounded_at_budget": s.len() - escaped,
                "in_cube_2": compact,
                "in_cube_2_bounded": compact_bounded,
            });
            ctx.artifact(
                &csv_bytes(|b| export::write_samples_csv(&s, b))?,
                summary.clone(),
            )?;
            ctx.report(summary)
        }
    }
}

fn green(cli: &Cli, a: &GreenArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let params = surface(&a.surface)?;
    let w = parse_word(&a.word)?;
    let p = parse_point(&a.point)?;
    let g = if a.minus {
        green_minus(&params, &w, &p, a.n_max)?
    } else {
        green_plus(&params, &w, &p, a.n_max)?
    };
    ctx.report(json!({ "direction": if a.minus { "minus" } else { "plus" }, "green": g }))
}

fn raster_summary(r: &EscapeRaster) -> Value {
    json!({
        "width": r.width,
        "height": r.height,
        "metadata": r.metadata,
        "window": r.window,
        "bounded": r.count(BOUNDED),
        "off_surface": r.count(OFF_SURFACE),
        "encoding": "P5 16-bit big-endian: 0 off-surface, k+1 escape at step k, 65535 bounded",
    })
}

fn write_raster(ctx: &Ctx, r: &EscapeRaster) -> Res<()> {
    if ctx.outputs.out.is_none() {
        return Err(invalid("rasters need --out"));
    }
    let summary = raster_summary(r);
    ctx.artifact(&pgm_bytes(r), summary.clone())?;
    if ctx.outputs.report.is_some() {
        ctx.report(summary)?;
    }
    Ok(())
}

fn render_slice(cli: &Cli, a: &RenderSliceArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let params = surface(&a.surface)?;
    let w = parse_word(&a.word)?;
    let (width, height) = parse_grid(&a.raster.grid)?;
    let z0 = parse_c64(&a.z0, "z0")?;
    let r = render_complex_slice(
        &params,
        &w,
        z0,
        parse_window(&a.raster.window)?,
        width,
        height,
        a.raster.budget,
        a.raster.escape_radius,
    )?;
    write_raster(&ctx, &r)
}

fn render_real(cli: &Cli, a: &RenderRealArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let params = surface(&a.surface)?;
    let w = parse_word(&a.word)?;
    let (width, height) = parse_grid(&a.raster.grid)?;
    let sheet = match a.sheet {
        SheetArg::Upper => Sheet::Upper,
        SheetArg::Lower => Sheet::Lower,
    };
    let r = render_real_chart(
        &params,
        &w,
        parse_window(&a.raster.window)?,
        sheet,
        width,
        height,
        a.raster.budget,
        a.raster.escape_radius,
    )?;
    write_raster(&ctx, &r)
}

fn periodic(cli: &Cli, a: &PeriodicArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let params = surface(&a.surface)?;
    let w = parse_word(&a.word)?;
    let plan = seed_plan(&a.seeds, cli.seed)?;
    if a.confinement {
        let rep = real_confinement_report(&params, &w, a.n, &plan, a.tol)?;
        return ctx.report(to_json(&rep));
    }
    let mut search = find_periodic(
        &params,
        &w,
        a.n,
        &seeds(&params, &plan),
        &SearchOptions::default(),
    )?;
    let mut probes = Vec::new();
    if a.probe && params.is_real() {
        for orbit in search.orbits.iter_mut() {
            for p in orbit.iter_mut() {
                if !p.is_real || p.singular || p.kind != PointKind::Saddle {
                    continue;
                }
                let r = one_sided_probe(&params, &w, p, &ProbeOptions::default())?;
                p.one_sided = OneSided {
                    u: r.u_one_sided,
                    s: r.s_one_sided,
                };
                probes.push(r);
            }
        }
    }
    let pts: Vec<_> = search.points().collect();
    let summary = json!({
        "n": a.n,
        "points": pts.len(),
        "orbits": search.orbits.len(),
        "real": pts.iter().filter(|p| p.is_real).count(),
        "singular": pts.iter().filter(|p| p.singular).count(),
        "seeds": search.seeds,
        "one_sided_both": probes.iter().filter(|r| r.u_one_sided == Some(true) && r.s_one_sided == Some(true)).count(),
        "caveat": "multi-start search; completeness is not certified",
    });
    ctx.artifact(
        &csv_bytes(|b| export::write_periodic_csv(&search.orbits, b))?,
        summary.clone(),
    )?;
    ctx.report(summary)
}

fn census(cli: &Cli, a: &CensusArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let w = parse_word(&a.word)?;
    let c = cayley_census(&word_to_matrix(&w), a.n)?;
    let summary = json!({
        "matrix": c.matrix,
        "n": c.n,
        "branches": c.branches,
        "points": c.points.len(),
        "smooth_points": c.smooth_points().len(),
    });
    ctx.artifact(
        &csv_bytes(|b| export::write_points_csv(&c.points, b))?,
        summary.clone(),
    )?;
    ctx.report(to_json(&c))
}

fn substitution(s: &str) -> Res<Substitution> {
    Ok(Substitution::parse(s)?)
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let sub = substitution(&a.sub)?;
    let cfg = SchrodingerConfig {
        kappa: a.kappa,
        window: parse_range(&a.window, "window")?,
        grid: a.grid,
        budget: a.budget,
        escape_radius: a.escape_radius,
    };
    let s = spectrum_estimate(&sub, &cfg)?;
    let lyap = if a.lyapunov > 0 {
        use rayon::prelude::*;
        Some(
            s.energies
                .par_iter()
                .map(|&e| lyapunov(&sub, a.kappa, e, a.lyapunov))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let h = cfg.step();
    let summary = json!({
        "substitution": sub.to_string(),
        "kappa": a.kappa,
        "step": h,
        "intervals": s.intervals,
        "gaps": s.gaps,
        "interior_gaps": s.interior_gaps().len(),
        "gaps_wider_than_2_steps": s.interior_gaps().iter().filter(|g| g.1 - g.0 > 2.0 * h).count(),
        "total_length": s.total_length(),
        "dimension": s.dimension,
    });
    ctx.artifact(
        &csv_bytes(|b| export::write_spectrum_csv(&s, lyap.as_deref(), b))?,
        summary.clone(),
    )?;
    ctx.report(summary)
}

fn lyapunov_cmd(cli: &Cli, a: &LyapunovArgs) -> Res<()> {
    use rayon::prelude::*;
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let sub = substitution(&a.sub)?;
    let energies: Vec<f64> = match a.e {
        Some(e) => vec![e],
        None => {
            let (lo, hi) = parse_range(&a.window, "window")?;
            if a.grid < 2 {
                return Err(invalid("grid must be at least 2"));
            }
            (0..a.grid)
                .map(|i| lo + (hi - lo) * i as f64 / (a.grid - 1) as f64)
                .collect()
        }
    };
    let gammas = energies
        .par_iter()
        .map(|&e| lyapunov(&sub, a.kappa, e, a.n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut buf = b"E,lyapunov\n".to_vec();
    for (e, g) in energies.iter().zip(&gammas) {
        buf.extend_from_slice(format!("{e},{g}\n").as_bytes());
    }
    let summary = if let [g] = gammas[..] {
        json!({ "E": energies[0], "lyapunov": g })
    } else {
        json!({
            "energies": energies.len(),
            "min": gammas.iter().copied().fold(f64::INFINITY, f64::min),
            "max": gammas.iter().copied().fold(0.0, f64::max),
        })
    };
    ctx.artifact(&buf, summary.clone())?;
    ctx.report(summary)
}

fn dimension(cli: &Cli, a: &DimensionArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let sub = substitution(&a.sub)?;
    let cfg = SchrodingerConfig {
        kappa: a.kappa,
        window: parse_range(&a.window, "window")?,
        grid: a.grid,
        budget: a.budget,
        escape_radius: a.escape_radius,
    };
    let s = spectrum_estimate(&sub, &cfg)?;
    let width = cfg.window.1 - cfg.window.0;
    let mut scales = Vec::new();
    let mut eps = width * a.max_fraction;
    while eps >= a.min_steps * cfg.step() && scales.len() < 64 {
        scales.push(eps);
        eps /= 2.0;
    }
    let d = box_dimension(&s.intervals, &scales)?;
    ctx.report(json!({
        "substitution": sub.to_string(),
        "kappa": a.kappa,
        "scales": scales,
        "decades": scales.first().zip(scales.last()).map(|(a, b)| (a / b).log10()),
        "dimension": d,
        "intervals": s.intervals.len(),
    }))
}

fn painleve(cli: &Cli, a: &PainleveArgs) -> Res<()> {
    let ctx = Ctx::new(cli, a, &a.outputs)?;
    let theta: PainleveTheta = a.theta.parse()?;
    let loops: LoopWord = a.loops.parse()?;
    let opts = ReportOptions {
        n_max: a.n_max,
        seeds: seed_plan(&a.seeds, cli.seed)?,
        raster: a.raster,
        ..ReportOptions::default()
    };
    let r = monodromy_report(&theta, &loops, &opts)?;
    ctx.report(to_json(&r))
}
