//! The cubic surfaces x²+y²+z²+xyz = Ax+By+Cz+D and the Cayley model.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::class_matrix::ClassMatrix;
use crate::error::{Error, Result};
use crate::words::{GroupWord, Letter};

pub type C64 = Complex64;

const fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Sign convention. `Fam` is the general family; `PT` is the
/// punctured-torus form x²+y²+z² = xyz + D, only defined for A=B=C=0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    Fam,
    PT,
}

impl Convention {
    /// Sign σ in the involution x ↦ A + σ·yz − x.
    pub fn sigma(self) -> f64 {
        match self {
            Convention::Fam => -1.0,
            Convention::PT => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    #[serde(rename = "A")]
    pub a: C64,
    #[serde(rename = "B")]
    pub b: C64,
    #[serde(rename = "C")]
    pub c: C64,
    #[serde(rename = "D")]
    pub d: C64,
    pub convention: Convention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_traces: Option<[C64; 4]>,
}

impl SurfaceParams {
    pub fn fam(a: C64, b: C64, c: C64, d: C64) -> Self {
        SurfaceParams {
            a,
            b,
            c,
            d,
            convention: Convention::Fam,
            boundary_traces: None,
        }
    }

    pub fn fam_real(a: f64, b: f64, cc: f64, d: f64) -> Self {
        Self::fam(c(a), c(b), c(cc), c(d))
    }

    pub fn pt(d: C64) -> Self {
        SurfaceParams {
            a: C64::default(),
            b: C64::default(),
            c: C64::default(),
            d,
            convention: Convention::PT,
            boundary_traces: None,
        }
    }

    pub fn pt_real(d: f64) -> Self {
        Self::pt(c(d))
    }

    pub fn abc(&self) -> [C64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn abc_vanish(&self) -> bool {
        self.abc().iter().all(|v| *v == C64::default())
    }

    pub fn is_real(&self) -> bool {
        self.abc().iter().chain([&self.d]).all(|v| v.im == 0.0)
            && self
                .boundary_traces
                .is_none_or(|t| t.iter().all(|v| v.im == 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.convention == Convention::PT && !self.abc_vanish() {
            return Err(Error::Invalid(
                "the PT convention requires A = B = C = 0".into(),
            ));
        }
        let finite = self.abc().iter().chain([&self.d]).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Invalid("surface parameters must be finite".into()));
        }
        Ok(())
    }

    /// Same surface written in the Fam convention (points are negated when
    /// converting from PT).
    pub fn to_fam(&self) -> SurfaceParams {
        SurfaceParams {
            convention: Convention::Fam,
            ..*self
        }
    }
}

impl fmt::Display for SurfaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.convention {
            Convention::PT => write!(f, "PT D={}", self.d),
            Convention::Fam => write!(f, "Fam ({}, {}, {}, {})", self.a, self.b, self.c, self.d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl SurfacePoint {
    pub fn new(x: C64, y: C64, z: C64) -> Self {
        SurfacePoint { x, y, z }
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        SurfacePoint::new(c(x), c(y), c(z))
    }

    pub fn coords(&self) -> [C64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_coords(v: [C64; 3]) -> Self {
        SurfacePoint::new(v[0], v[1], v[2])
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }

    pub fn max_dist(&self, o: &SurfacePoint) -> f64 {
        (self.x - o.x)
            .norm()
            .max((self.y - o.y).norm())
            .max((self.z - o.z).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coords()
            .iter()
            .all(|v| v.im.abs() <= tol * (1.0 + v.re.abs()))
    }

    pub fn neg(&self) -> SurfacePoint {
        SurfacePoint::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub fn params_from_traces(a: C64, b: C64, cc: C64, d: C64) -> SurfaceParams {
    let mut p = SurfaceParams::fam(
        a * b + cc * d,
        a * d + b * cc,
        a * cc + b * d,
        c(4.0) - a * a - b * b - cc * cc - d * d - a * b * cc * d,
    );
    p.boundary_traces = Some([a, b, cc, d]);
    p
}

pub fn residual(params: &SurfaceParams, p: &SurfacePoint) -> C64 {
    let SurfacePoint { x, y, z } = *p;
    let quad = x * x + y * y + z * z;
    match params.convention {
        Convention::Fam => quad + x * y * z - params.a * x - params.b * y - params.c * z - params.d,
        Convention::PT => quad - x * y * z - params.d,
    }
}

/// Residual scaled by `1 + |p|²`, the quantity compared against membership tolerances.
pub fn relative_residual(params: &SurfaceParams, p: &SurfacePoint) -> f64 {
    residual(params, p).norm() / (1.0 + p.norm().powi(2))
}

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

pub fn on_surface(params: &SurfaceParams, p: &SurfacePoint, tol: f64) -> bool {
    relative_residual(params, p) < tol
}

pub fn convert_convention(
    params: &SurfaceParams,
    p: &SurfacePoint,
) -> Result<(SurfaceParams, SurfacePoint)> {
    if !params.abc_vanish() {
        return Err(Error::Invalid(
            "convention change needs A = B = C = 0".into(),
        ));
    }
    let convention = match params.convention {
        Convention::Fam => Convention::PT,
        Convention::PT => Convention::Fam,
    };
    Ok((
        SurfaceParams {
            convention,
            ..*params
        },
        p.neg(),
    ))
}

/// Gradient of the defining polynomial.
pub fn gradient(params: &SurfaceParams, p: &SurfacePoint) -> [C64; 3] {
    let SurfacePoint { x, y, z } = *p;
    let s = params.convention.sigma();
    // Fam: 2x + yz − A; PT: 2x − yz.
    [
        c(2.0) * x - s * y * z - params.a,
        c(2.0) * y - s * x * z - params.b,
        c(2.0) * z - s * x * y - params.c,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub half_width: f64,
    pub per_axis: usize,
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox {
            half_width: 4.0,
            per_axis: 5,
        }
    }
}

fn known_singular_points(params: &SurfaceParams) -> Option<Vec<SurfacePoint>> {
    if !params.abc_vanish() || params.d.im != 0.0 {
        return None;
    }
    let sign = match params.convention {
        Convention::Fam => -1.0,
        Convention::PT => 1.0,
    };
    if params.d.re == 0.0 {
        return Some(vec![SurfacePoint::default()]);
    }
    if params.d.re == 4.0 {
        let pts = [
            (1.0, 1.0, 1.0),
            (1.0, -1.0, -1.0),
            (-1.0, 1.0, -1.0),
            (-1.0, -1.0, 1.0),
        ];
        return Some(
            pts.iter()
                .map(|&(x, y, z)| {
                    SurfacePoint::real(2.0 * sign * x, 2.0 * sign * y, 2.0 * sign * z)
                })
                .collect(),
        );
    }
    None
}

/// Singular points of the surface: common zeros of the gradient lying on it.
///
/// The reference surfaces D = 0 and D = 4 (A=B=C=0) are answered exactly;
/// otherwise Newton's method on the gradient system runs from a grid of
/// complex seeds and the survivors are filtered by the residual.
pub fn singular_points(params: &SurfaceParams, search: SearchBox, tol: f64) -> Vec<SurfacePoint> {
    if let Some(pts) = known_singular_points(params) {
        return pts;
    }
    let n = search.per_axis.max(2);
    let step = 2.0 * search.half_width / (n - 1) as f64;
    let axis: Vec<f64> = (0..n)
        .map(|i| -search.half_width + i as f64 * step)
        .collect();
    let mut found: Vec<SurfacePoint> = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                let seed = SurfacePoint::new(
                    C64::new(x, 0.3 * y),
                    C64::new(y, -0.2 * z),
                    C64::new(z, 0.1 * x),
                );
                let Some(p) = newton_gradient(params, seed) else {
                    continue;
                };
                if residual(params, &p).norm() > tol * (1.0 + p.norm().powi(2)) {
                    continue;
                }
                if !found.iter().any(|q| q.max_dist(&p) < tol.sqrt()) {
                    found.push(p);
                }
            }
        }
    }
    found
}

pub(crate) fn newton_gradient(params: &SurfaceParams, mut p: SurfacePoint) -> Option<SurfacePoint> {
    let s = params.convention.sigma();
    for _ in 0..60 {
        let g = gradient(params, &p);
        if g.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-14 {
            return Some(p);
        }
        let SurfacePoint { x, y, z } = p;
        let two = c(2.0);
        let h = [
            [two, -s * z, -s * y],
            [-s * z, two, -s * x],
            [-s * y, -s * x, two],
        ];
        let delta = crate::linalg::solve3(&h, &g)?;
        p = SurfacePoint::new(x - delta[0], y - delta[1], z - delta[2]);
        if !p.is_finite() || p.norm() > 1e6 {
            return None;
        }
    }
    let g = gradient(params, &p);
    (g.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-9).then_some(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyLabel {
    FourDisks,
    FourDisksAndPoint,
    FourDisksAndSphere,
    CayleySingular,
    ConnectedFourPunctured,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTopology {
    pub label: TopologyLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RealTopology {
    /// The real surface is connected: the Cayley cubic and the four-punctured sphere.
    pub fn is_connected(&self) -> bool {
        matches!(
            self.label,
            TopologyLabel::CayleySingular | TopologyLabel::ConnectedFourPunctured
        )
    }
}

/// Topology of the real locus.
///
/// With A=B=C=0 the label is a function of D alone; otherwise the boundary
/// traces decide: connected when none lies in (−2,2) and abcd < 0.
pub fn classify_real_topology(params: &SurfaceParams) -> Result<RealTopology> {
    if !params.is_real() {
        return Err(Error::Invalid("real topology needs real parameters".into()));
    }
    if params.abc_vanish() {
        let d = params.d.re;
        let label = if d < 0.0 {
            TopologyLabel::FourDisks
        } else if d == 0.0 {
            TopologyLabel::FourDisksAndPoint
        } else if d < 4.0 {
            TopologyLabel::FourDisksAndSphere
        } else if d == 4.0 {
            TopologyLabel::CayleySingular
        } else {
            TopologyLabel::ConnectedFourPunctured
        };
        return Ok(RealTopology { label, note: None });
    }
    let Some(t) = params.boundary_traces else {
        return Err(Error::Invalid(
            "real topology needs A = B = C = 0 or known boundary traces".into(),
        ));
    };
    let re: Vec<f64> = t.iter().map(|v| v.re).collect();
    let inside: Vec<f64> = re.iter().copied().filter(|v| v.abs() < 2.0).collect();
    let product: f64 = re.iter().product();
    if inside.is_empty() && product < 0.0 {
        return Ok(RealTopology {
            label: TopologyLabel::ConnectedFourPunctured,
            note: None,
        });
    }
    let note = if !inside.is_empty() {
        format!("traces {inside:?} lie in (-2, 2)")
    } else {
        format!("abcd = {product} is not negative")
    };
    Ok(RealTopology {
        label: TopologyLabel::Other,
        note: Some(note),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyCoord {
    pub u: C64,
    pub v: C64,
}

impl CayleyCoord {
    pub fn new(u: C64, v: C64) -> Result<Self> {
        if u == C64::default() || v == C64::default() {
            return Err(Error::Invalid("Cayley coordinates must be nonzero".into()));
        }
        Ok(CayleyCoord { u, v })
    }

    /// Point of the real torus `(e^{2πi t1}, e^{2πi t2})`.
    pub fn from_angles(t1: f64, t2: f64) -> Self {
        let tau = std::f64::consts::TAU;
        CayleyCoord {
            u: C64::from_polar(1.0, tau * t1),
            v: C64::from_polar(1.0, tau * t2),
        }
    }

    /// The involution η(u,v) = (1/u, 1/v).
    pub fn eta(&self) -> CayleyCoord {
        CayleyCoord {
            u: self.u.inv(),
            v: self.v.inv(),
        }
    }
}

/// π_C(u,v) = (u+1/u, v+1/v, uv+1/(uv)), a point of the PT surface with D = 4.
pub fn cayley_project(cc: &CayleyCoord) -> SurfacePoint {
    let uv = cc.u * cc.v;
    SurfacePoint::new(cc.u + cc.u.inv(), cc.v + cc.v.inv(), uv + uv.inv())
}

/// π_C of a point of the real torus, evaluated in real arithmetic so the
/// result has exactly zero imaginary parts.
pub fn torus_point(t1: f64, t2: f64) -> SurfacePoint {
    let tau = std::f64::consts::TAU;
    SurfacePoint::real(
        2.0 * (tau * t1).cos(),
        2.0 * (tau * t2).cos(),
        2.0 * (tau * (t1 + t2)).cos(),
    )
}

pub fn cayley_params() -> SurfaceParams {
    SurfaceParams::pt_real(4.0)
}

pub fn monomial_apply(m: &ClassMatrix, cc: &CayleyCoord) -> CayleyCoord {
    let pw = |z: C64, k: i64| z.powi(k as i32);
    CayleyCoord {
        u: pw(cc.u, m.m11) * pw(cc.v, m.m12),
        v: pw(cc.u, m.m21) * pw(cc.v, m.m22),
    }
}

/// Monomial lift of each PT involution through π_C:
/// `s_L ∘ π_C = π_C ∘ (monomial action of N_L)`.
pub fn cayley_letter_matrix(l: Letter) -> ClassMatrix {
    match l {
        Letter::X => ClassMatrix::new(1, 2, 0, -1),
        Letter::Y => ClassMatrix::new(-1, 0, 2, 1),
        Letter::Z => ClassMatrix::new(1, 0, 0, -1),
    }
}

/// Monomial matrix through which a word acts on the Cayley torus.
pub fn cayley_matrix(w: &GroupWord) -> Result<ClassMatrix> {
    w.letters.iter().try_fold(ClassMatrix::IDENTITY, |acc, l| {
        acc.try_mul(&cayley_letter_matrix(*l))
    })
}

/// Images of a point under the sign changes of two coordinates and the
/// coordinate permutations, which preserve every surface with A=B=C=0.
pub fn extra_symmetries(p: &SurfacePoint) -> Vec<SurfacePoint> {
    let signs = [
        (1.0, 1.0, 1.0),
        (1.0, -1.0, -1.0),
        (-1.0, 1.0, -1.0),
        (-1.0, -1.0, 1.0),
    ];
    let [x, y, z] = p.coords();
    let perms = [
        [x, y, z],
        [x, z, y],
        [y, x, z],
        [y, z, x],
        [z, x, y],
        [z, y, x],
    ];
    let mut out = Vec::with_capacity(24);
    for q in perms {
        for (a, b, cc) in signs {
            out.push(SurfacePoint::new(q[0] * a, q[1] * b, q[2] * cc));
        }
    }
    out
}
