//! Periodic points: multi-start search, multipliers, the exact Cayley
//! census, saddle measures, one-sidedness probes and real confinement.

mod census;
mod probe;

pub use census::{cayley_census, CayleyCensus, CensusBranch, TorusPoint};
pub use probe::{one_sided_probe, HalfProbe, OneSidedReport, ProbeOptions};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Automorphism;
use crate::error::{Error, Result};
use crate::linalg::{eig2, eig3, lstsq};
use crate::surfaces::{
    classify_real_topology, gradient, residual, SurfaceParams, SurfacePoint, C64,
};
use crate::words::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Saddle,
    Elliptic,
    ParabolicLike,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSided {
    pub u: Option<bool>,
    pub s: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub point: SurfacePoint,
    /// Minimal period.
    pub period: usize,
    /// Eigenvalues of the differential of f^period on the tangent plane,
    /// largest modulus first. At singular points of the surface these are
    /// the extreme eigenvalues of the full 3×3 differential.
    pub multipliers: [C64; 2],
    pub kind: PointKind,
    pub is_real: bool,
    pub singular: bool,
    pub one_sided: OneSided,
}

impl PeriodicPoint {
    /// |μ_u|^(1/period), comparable with the dynamical degree.
    pub fn unstable_rate(&self) -> f64 {
        self.multipliers[0].norm().powf(1.0 / self.period as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Residual required of the shooting equations.
    pub tol: f64,
    /// Max-norm distance under which two solutions are the same point.
    pub dedup_tol: f64,
    pub max_newton: usize,
    /// Seeds whose first n iterates leave this ball are discarded.
    pub seed_radius: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: 1e-10,
            dedup_tol: 1e-6,
            max_newton: 60,
            seed_radius: 50.0,
        }
    }
}

/// Seed layout: a real (x, y) grid on both sheets of the real surface and
/// complex points near it, all placed on the surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub half_width: f64,
    pub real_grid: usize,
    pub complex: usize,
    pub complex_spread: f64,
    pub rng_seed: u64,
}

impl Default for SeedPlan {
    fn default() -> Self {
        SeedPlan {
            half_width: 3.0,
            real_grid: 60,
            complex: 2000,
            complex_spread: 1.0,
            rng_seed: 7,
        }
    }
}

/// Solve the defining equation for z given (x, y); both roots.
fn z_roots(params: &SurfaceParams, x: C64, y: C64) -> [C64; 2] {
    let sigma = params.convention.sigma();
    let beta = -x * y * sigma - params.c;
    let gamma = x * x + y * y - params.a * x - params.b * y - params.d;
    let root = (beta * beta - gamma * 4.0).sqrt();
    [(-beta + root) / 2.0, (-beta - root) / 2.0]
}

pub fn seeds(params: &SurfaceParams, plan: &SeedPlan) -> Vec<SurfacePoint> {
    let mut out = Vec::new();
    let n = plan.real_grid.max(2);
    let h = plan.half_width;
    if params.is_real() {
        for i in 0..n {
            for j in 0..n {
                // Offset the grid slightly so seeds avoid symmetry lines.
                let x = -h + (i as f64 + 0.37) * 2.0 * h / n as f64;
                let y = -h + (j as f64 + 0.61) * 2.0 * h / n as f64;
                for z in z_roots(params, C64::new(x, 0.0), C64::new(y, 0.0)) {
                    if z.im == 0.0 {
                        out.push(SurfacePoint::new(C64::new(x, 0.0), C64::new(y, 0.0), z));
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.rng_seed);
    let s = plan.complex_spread;
    for _ in 0..plan.complex {
        let x = C64::new(rng.gen_range(-h..h), rng.gen_range(-s..s));
        let y = C64::new(rng.gen_range(-h..h), rng.gen_range(-s..s));
        let zs = z_roots(params, x, y);
        out.push(SurfacePoint::new(x, y, zs[rng.gen_range(0..2)]));
    }
    out
}

/// Multiple shooting: nodes p_0..p_{n−1} with f(p_i) = p_{i+1} (cyclically)
/// and each node on the surface, solved by damped Gauss–Newton.
fn shoot(
    f: &Automorphism,
    n: usize,
    start: &SurfacePoint,
    opts: &SearchOptions,
) -> Option<Vec<SurfacePoint>> {
    let mut nodes = Vec::with_capacity(n);
    let mut p = *start;
    for _ in 0..n {
        if !p.is_finite() || p.norm() > opts.seed_radius {
            return None;
        }
        nodes.push(p);
        p = f.apply(&p);
    }
    shoot_nodes(f, nodes, opts)
}

fn shoot_nodes(
    f: &Automorphism,
    mut nodes: Vec<SurfacePoint>,
    opts: &SearchOptions,
) -> Option<Vec<SurfacePoint>> {
    let n = nodes.len();
    let rows = 4 * n;
    let cols = 3 * n;
    let eval = |nodes: &[SurfacePoint]| -> Vec<C64> {
        let mut r = Vec::with_capacity(rows);
        for i in 0..n {
            let img = f.apply(&nodes[i]);
            let next = nodes[(i + 1) % n];
            r.extend([img.x - next.x, img.y - next.y, img.z - next.z]);
        }
        for node in nodes {
            r.push(residual(&f.params, node));
        }
        r
    };
    let norm = |r: &[C64]| r.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let mut r = eval(&nodes);
    let mut cost = norm(&r);
    for _ in 0..opts.max_newton {
        let scale = 1.0 + nodes.iter().map(|q| q.norm().powi(2)).fold(0.0, f64::max);
        if cost.sqrt() < 1e-14 * scale {
            break;
        }
        let mut a = vec![C64::default(); rows * cols];
        for i in 0..n {
            let (_, jac) = f.apply_with_jacobian(&nodes[i]);
            let next = (i + 1) % n;
            for r3 in 0..3 {
                for c3 in 0..3 {
                    a[(3 * i + r3) * cols + 3 * i + c3] += jac[r3][c3];
                }
                a[(3 * i + r3) * cols + 3 * next + r3] -= C64::new(1.0, 0.0);
            }
            let g = gradient(&f.params, &nodes[i]);
            for c3 in 0..3 {
                a[(3 * n + i) * cols + 3 * i + c3] = g[c3];
            }
        }
        let mut rhs: Vec<C64> = r.iter().map(|v| -v).collect();
        let delta = lstsq(&mut a, &mut rhs, rows, cols, 1e-13);
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<SurfacePoint> = nodes
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    SurfacePoint::new(
                        q.x + delta[3 * i] * step,
                        q.y + delta[3 * i + 1] * step,
                        q.z + delta[3 * i + 2] * step,
                    )
                })
                .collect();
            let tr = eval(&trial);
            let tc = norm(&tr);
            if tc.is_finite() && tc < cost {
                nodes = trial;
                r = tr;
                cost = tc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
        if nodes.iter().any(|q| q.norm() > opts.seed_radius * 4.0) {
            return None;
        }
    }
    let scale = 1.0 + nodes.iter().map(|q| q.norm().powi(2)).fold(0.0, f64::max);
    (cost.sqrt() < opts.tol * scale).then_some(nodes)
}

fn lex_key(p: &SurfacePoint) -> [f64; 6] {
    [p.x.re, p.x.im, p.y.re, p.y.im, p.z.re, p.z.im]
}

fn lex_cmp(a: &SurfacePoint, b: &SurfacePoint) -> std::cmp::Ordering {
    let (ka, kb) = (lex_key(a), lex_key(b));
    for i in 0..6 {
        match ka[i].total_cmp(&kb[i]) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Sorted, tolerance-deduplicated copy of a point list.
pub fn dedup_points(mut pts: Vec<SurfacePoint>, tol: f64) -> Vec<SurfacePoint> {
    pts.sort_by(|a, b| a.x.re.total_cmp(&b.x.re));
    let mut kept: Vec<SurfacePoint> = Vec::new();
    for p in pts {
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| q.x.re > p.x.re - tol)
            .any(|q| q.max_dist(&p) < tol);
        if !dup {
            kept.push(p);
        }
    }
    kept.sort_by(lex_cmp);
    kept
}

fn minimal_period(f: &Automorphism, p: &SurfacePoint, n: usize, tol: f64) -> usize {
    let mut q = *p;
    for d in 1..=n {
        q = f.apply(&q);
        if n % d == 0 && q.max_dist(p) < tol * (1.0 + p.norm()) {
            return d;
        }
    }
    n
}

/// The differential restricted to the tangent plane, in the chart that drops
/// the coordinate with the largest gradient component. `None` at singular points.
pub(crate) struct TangentBlock {
    pub k: usize,
    pub u: [usize; 2],
    pub g: [C64; 3],
    pub m: [[C64; 2]; 2],
}

impl TangentBlock {
    pub(crate) fn new(
        params: &SurfaceParams,
        p: &SurfacePoint,
        jac: &[[C64; 3]; 3],
    ) -> Option<Self> {
        let g = gradient(params, p);
        let k = (0..3)
            .max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm()))
            .unwrap();
        if g[k].norm() < 1e-6 * (1.0 + p.norm().powi(2)) {
            return None;
        }
        let u = [(k + 1) % 3, (k + 2) % 3];
        let mut block = TangentBlock {
            k,
            u,
            g,
            m: [[C64::default(); 2]; 2],
        };
        for c in 0..2 {
            let v = block.lift([1 - c, c].map(|e| C64::new(e as f64, 0.0)));
            for r in 0..2 {
                block.m[r][c] = (0..3).map(|j| jac[u[r]][j] * v[j]).sum();
            }
        }
        Some(block)
    }

    /// Tangent vector with chart components `w`.
    pub(crate) fn lift(&self, w: [C64; 2]) -> [C64; 3] {
        let mut v = [C64::default(); 3];
        v[self.u[0]] = w[0];
        v[self.u[1]] = w[1];
        v[self.k] = -(self.g[self.u[0]] * w[0] + self.g[self.u[1]] * w[1]) / self.g[self.k];
        v
    }
}

fn tangent_multipliers(
    params: &SurfaceParams,
    p: &SurfacePoint,
    jac: &[[C64; 3]; 3],
) -> ([C64; 2], bool) {
    match TangentBlock::new(params, p, jac) {
        Some(b) => {
            let (x, y) = eig2(b.m);
            ([x, y], false)
        }
        None => {
            let mut ev = eig3(jac);
            ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            ([ev[0], ev[2]], true)
        }
    }
}

fn kind_of(m: &[C64; 2]) -> PointKind {
    let (a, b) = (m[0].norm(), m[1].norm());
    let eps = 1e-6;
    if a > 1.0 + eps && b < 1.0 - eps {
        PointKind::Saddle
    } else if (a - 1.0).abs() <= eps
        && (b - 1.0).abs() <= eps
        && (m[0] - 1.0).norm() > eps
        && (m[0] + 1.0).norm() > eps
    {
        PointKind::Elliptic
    } else {
        PointKind::ParabolicLike
    }
}

/// Full diagnostics for a point already known to satisfy fⁿ(p) = p.
pub fn describe_periodic(f: &Automorphism, p: &SurfacePoint, n: usize) -> PeriodicPoint {
    let period = minimal_period(f, p, n, 1e-7);
    let (_, jac) = f.power(period).apply_with_jacobian(p);
    let (multipliers, singular) = tangent_multipliers(&f.params, p, &jac);
    PeriodicPoint {
        point: *p,
        period,
        multipliers,
        kind: kind_of(&multipliers),
        is_real: p.is_real(1e-8),
        singular,
        one_sided: OneSided::default(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStats {
    pub tried: usize,
    pub discarded: usize,
    pub converged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSearch {
    pub word: GroupWord,
    pub params: SurfaceParams,
    pub n: usize,
    /// Each orbit in dynamical order, starting from its lexicographically
    /// smallest point. Together they are every point with fⁿ(p) = p found.
    pub orbits: Vec<Vec<PeriodicPoint>>,
    pub seeds: SeedStats,
}

impl PeriodicSearch {
    pub fn points(&self) -> impl Iterator<Item = &PeriodicPoint> {
        self.orbits.iter().flatten()
    }

    pub fn representatives(&self) -> impl Iterator<Item = &PeriodicPoint> {
        self.orbits.iter().filter_map(|o| o.first())
    }

    pub fn len(&self) -> usize {
        self.orbits.iter().map(|o| o.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

/// Every point with fⁿ(p) = p reachable from the given seeds.
pub fn find_periodic(
    params: &SurfaceParams,
    w: &GroupWord,
    n: usize,
    seed_points: &[SurfacePoint],
    opts: &SearchOptions,
) -> Result<PeriodicSearch> {
    if n == 0 {
        return Err(Error::Invalid("period must be at least 1".into()));
    }
    let f = Automorphism::hyperbolic(params, w)?;
    let solutions: Vec<Option<Vec<SurfacePoint>>> = seed_points
        .par_iter()
        .map(|s| shoot(&f, n, s, opts))
        .collect();
    let discarded = seed_points
        .iter()
        .filter(|s| !s.is_finite() || s.norm() > opts.seed_radius)
        .count();
    let converged = solutions.iter().filter(|s| s.is_some()).count();
    let fn_ = f.power(n);
    let raw: Vec<SurfacePoint> = solutions
        .into_iter()
        .flatten()
        .flatten()
        .map(|p| snap_singular(params, &fn_, p))
        .collect();
    let points = dedup_points(raw, opts.dedup_tol);
    let orbits = group_orbits(&f, points, n, opts.dedup_tol);
    Ok(PeriodicSearch {
        word: w.clone(),
        params: *params,
        n,
        orbits,
        seeds: SeedStats {
            tried: seed_points.len(),
            discarded,
            converged,
        },
    })
}

/// Newton converges only linearly at a singular point of the surface, so
/// solutions near one are replaced by the singular point itself when it is periodic.
fn snap_singular(params: &SurfaceParams, fn_: &Automorphism, p: SurfacePoint) -> SurfacePoint {
    let g = gradient(params, &p)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if g > 1e-3 * (1.0 + p.norm()) {
        return p;
    }
    match crate::surfaces::newton_gradient(params, p) {
        Some(q)
            if q.max_dist(&p) < 1e-3 && fn_.apply(&q).max_dist(&q) < 1e-9 * (1.0 + q.norm()) =>
        {
            q
        }
        _ => p,
    }
}

fn group_orbits(
    f: &Automorphism,
    points: Vec<SurfacePoint>,
    n: usize,
    tol: f64,
) -> Vec<Vec<PeriodicPoint>> {
    let mut used = vec![false; points.len()];
    let mut orbits = Vec::new();
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        let first = describe_periodic(f, &points[i], n);
        used[i] = true;
        let mut orbit = vec![first.clone()];
        let mut q = points[i];
        for _ in 1..first.period {
            q = f.apply(&q);
            // Snap to the stored copy when present so orbit members are the refined points.
            let hit = points.iter().position(|p| p.max_dist(&q) < tol);
            let member = match hit {
                Some(j) => {
                    used[j] = true;
                    points[j]
                }
                None => q,
            };
            orbit.push(describe_periodic(f, &member, n));
        }
        orbits.push(orbit);
    }
    orbits
}

/// Refines a single guess to a point with fⁿ(p) = p.
pub fn refine_periodic(
    params: &SurfaceParams,
    w: &GroupWord,
    n: usize,
    guess: &SurfacePoint,
) -> Result<PeriodicPoint> {
    let f = Automorphism::from_word(params, w)?;
    let opts = SearchOptions {
        max_newton: 100,
        ..SearchOptions::default()
    };
    let nodes = shoot(&f, n.max(1), guess, &opts)
        .ok_or_else(|| Error::Numerical(format!("no period-{n} point near {guess}")))?;
    Ok(describe_periodic(&f, &nodes[0], n))
}

/// Follows a period-n point along the straight parameter path from `from`
/// to `to`, refining at each of `steps` stations. Returns the end point.
pub fn continue_periodic(
    from: &SurfaceParams,
    to: &SurfaceParams,
    w: &GroupWord,
    n: usize,
    start: &SurfacePoint,
    steps: usize,
) -> Result<PeriodicPoint> {
    let f0 = Automorphism::from_word(from, w)?;
    let opts = SearchOptions {
        max_newton: 100,
        ..SearchOptions::default()
    };
    let steps = steps.max(1);
    let mut nodes: Vec<SurfacePoint> = (0..n)
        .scan(*start, |q, _| {
            let cur = *q;
            *q = f0.apply(q);
            Some(cur)
        })
        .collect();
    let mut f = f0;
    for i in 1..=steps {
        let t = i as f64 / steps as f64;
        let lerp = |a: C64, b: C64| a + (b - a) * t;
        let params = SurfaceParams {
            a: lerp(from.a, to.a),
            b: lerp(from.b, to.b),
            c: lerp(from.c, to.c),
            d: lerp(from.d, to.d),
            ..*to
        };
        f = Automorphism::from_word(&params, w)?;
        nodes = shoot_nodes(&f, nodes, &opts)
            .ok_or_else(|| Error::Numerical(format!("continuation lost the point at t = {t}")))?;
    }
    Ok(describe_periodic(&f, &nodes[0], n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub support: Vec<SurfacePoint>,
    pub weights: Vec<f64>,
    pub period: usize,
}

/// Uniform probability on all points with fⁿ(p) = p found by the default search.
pub fn empirical_measure(
    params: &SurfaceParams,
    w: &GroupWord,
    n: usize,
) -> Result<EmpiricalMeasure> {
    let search = find_periodic(
        params,
        w,
        n,
        &seeds(params, &SeedPlan::default()),
        &SearchOptions::default(),
    )?;
    let support: Vec<SurfacePoint> = search.points().map(|p| p.point).collect();
    if support.is_empty() {
        return Err(Error::Empty(format!(
            "no period-{n} points found for {w} on {params}"
        )));
    }
    let weights = vec![1.0 / support.len() as f64; support.len()];
    Ok(EmpiricalMeasure {
        support,
        weights,
        period: n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfinementRow {
    pub n: usize,
    pub found: usize,
    pub real: usize,
    pub fraction_real: Option<f64>,
    /// Smallest |μ_u|^(1/period) among points of minimal period n.
    pub min_unstable_rate: Option<f64>,
    pub seeds: SeedStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfinementReport {
    pub word: GroupWord,
    pub params: SurfaceParams,
    pub lambda: f64,
    pub connected: bool,
    pub rows: Vec<ConfinementRow>,
    pub all_real: bool,
    pub min_unstable_rate: Option<f64>,
    /// In the connected case: every found point is real with rate ≥ λ − tol.
    pub bound_holds: Option<bool>,
    pub caveat: String,
}

pub fn real_confinement_report(
    params: &SurfaceParams,
    w: &GroupWord,
    n_max: usize,
    plan: &SeedPlan,
    tol: f64,
) -> Result<ConfinementReport> {
    let f = Automorphism::hyperbolic(params, w)?;
    let connected = classify_real_topology(params)?.is_connected();
    let pts = seeds(params, plan);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let search = find_periodic(params, w, n, &pts, &SearchOptions::default())?;
        let own: Vec<&PeriodicPoint> = search.points().filter(|p| p.period == n).collect();
        let real = own.iter().filter(|p| p.is_real).count();
        let min_rate = own
            .iter()
            .filter(|p| !p.singular)
            .map(|p| p.unstable_rate())
            .min_by(f64::total_cmp);
        rows.push(ConfinementRow {
            n,
            found: own.len(),
            real,
            fraction_real: (!own.is_empty()).then(|| real as f64 / own.len() as f64),
            min_unstable_rate: min_rate,
            seeds: search.seeds,
        });
    }
    let all_real = rows.iter().all(|r| r.real == r.found);
    let min_unstable_rate = rows
        .iter()
        .filter_map(|r| r.min_unstable_rate)
        .min_by(f64::total_cmp);
    let bound_holds =
        connected.then(|| all_real && min_unstable_rate.is_none_or(|m| m >= f.lambda - tol));
    Ok(ConfinementReport {
        word: w.clone(),
        params: *params,
        lambda: f.lambda,
        connected,
        rows,
        all_real,
        min_unstable_rate,
        bound_holds,
        caveat: "multi-start search; completeness is not certified".into(),
    })
}
