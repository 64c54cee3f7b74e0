//! Exact periodic points on the Cayley cubic.
//!
//! On D = 4 a word acts through π_C by a monomial map with integer matrix
//! M, so f^n fixes π_C(t) exactly when Mⁿt ≡ ±t on the torus R²/Z².

use serde::{Deserialize, Serialize};

use crate::class_matrix::ClassMatrix;
use crate::error::{Error, Result};
use crate::surfaces::SurfacePoint;
use crate::words::{classify, IsometryKind};

/// A torus point with rational coordinates `num / den`, reduced mod 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    pub num: [i64; 2],
    pub den: i64,
}

impl TorusPoint {
    fn new(n1: i128, n2: i128, den: i128) -> Self {
        let r1 = n1.rem_euclid(den);
        let r2 = n2.rem_euclid(den);
        let g = gcd(gcd(r1, r2), den);
        TorusPoint {
            num: [(r1 / g) as i64, (r2 / g) as i64],
            den: (den / g) as i64,
        }
    }

    /// Representative of the class under t ↦ −t.
    fn canonical(&self) -> TorusPoint {
        let neg = TorusPoint::new(
            -(self.num[0] as i128),
            -(self.num[1] as i128),
            self.den as i128,
        );
        (*self).min(neg)
    }

    /// Fixed by t ↦ −t: the preimages of the four singular points.
    pub fn is_two_torsion(&self) -> bool {
        self.den <= 2
    }

    pub fn angles(&self) -> (f64, f64) {
        (
            self.num[0] as f64 / self.den as f64,
            self.num[1] as f64 / self.den as f64,
        )
    }

    /// Image on the PT surface D = 4, computed with real cosines.
    pub fn project(&self) -> SurfacePoint {
        let (a, b) = self.angles();
        crate::surfaces::torus_point(a, b)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusBranch {
    pub sign: i8,
    /// |det(Mⁿ ∓ I)|, the number of torus solutions; `None` if singular.
    pub count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyCensus {
    pub matrix: ClassMatrix,
    pub n: u32,
    pub branches: Vec<CensusBranch>,
    /// Distinct solutions modulo t ~ −t, sorted.
    pub torus_points: Vec<TorusPoint>,
    pub points: Vec<SurfacePoint>,
}

impl CayleyCensus {
    pub fn smooth_points(&self) -> Vec<SurfacePoint> {
        self.torus_points
            .iter()
            .filter(|t| !t.is_two_torsion())
            .map(|t| t.project())
            .collect()
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return if a >= 0 { (a, 1, 0) } else { (-a, -1, 0) };
    }
    let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

/// Appends every t ∈ R²/Z² with a·t ∈ Z², for nonsingular `a`.
///
/// A column Hermite form a·U = [[g, 0], [h, det/g]] gives coset
/// representatives k of Z²/aZ² on a g × |det/g| box, and t = a⁻¹·k.
fn solve_branch(a: [[i128; 2]; 2], out: &mut Vec<TorusPoint>) {
    let [[p, q], [r, s]] = a;
    let det = p * s - q * r;
    let (g, _, _) = ext_gcd(p, q);
    let rows = g.abs();
    let cols = (det / g).abs();
    let sgn = det.signum();
    for k1 in 0..rows {
        for k2 in 0..cols {
            // t = adj(a)·k / det, with the denominator made positive.
            let n1 = (s * k1 - q * k2) * sgn;
            let n2 = (-r * k1 + p * k2) * sgn;
            out.push(TorusPoint::new(n1, n2, det.abs()));
        }
    }
}

/// All torus points with Mⁿt ≡ ±t, modulo t ~ −t, and their images on the Cayley cubic.
pub fn cayley_census(m: &ClassMatrix, n: u32) -> Result<CayleyCensus> {
    if classify(m).kind != IsometryKind::Hyperbolic {
        return Err(Error::NotHyperbolic {
            matrix: m.to_string(),
            kind: classify(m).kind.to_string(),
        });
    }
    if n == 0 || n > 12 {
        return Err(Error::Invalid(format!(
            "census period must be in 1..=12, got {n}"
        )));
    }
    let mn = m.try_pow(n)?;
    let mut raw = Vec::new();
    let mut branches = Vec::new();
    for sign in [1i8, -1] {
        let s = sign as i128;
        let a = [
            [mn.m11 as i128 - s, mn.m12 as i128],
            [mn.m21 as i128, mn.m22 as i128 - s],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det == 0 {
            branches.push(CensusBranch {
                sign,
                count: None,
                note: Some(format!(
                    "M^{n} {} I is singular; branch skipped",
                    if sign > 0 { "-" } else { "+" }
                )),
            });
            continue;
        }
        let before = raw.len();
        solve_branch(a, &mut raw);
        debug_assert_eq!((raw.len() - before) as i128, det.abs());
        branches.push(CensusBranch {
            sign,
            count: Some(det.unsigned_abs() as u64),
            note: None,
        });
    }
    let mut torus_points: Vec<TorusPoint> = raw.iter().map(|t| t.canonical()).collect();
    torus_points.sort();
    torus_points.dedup();
    let points = torus_points.iter().map(|t| t.project()).collect();
    Ok(CayleyCensus {
        matrix: *m,
        n,
        branches,
        torus_points,
        points,
    })
}
