//! Escape-time rasters on complex slices and real charts.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Automorphism;
use crate::error::{Error, Result};
use crate::surfaces::{SurfaceParams, SurfacePoint, C64};
use crate::words::GroupWord;

/// Pixel value for points that never left the escape radius.
pub const BOUNDED: i32 = -1;
/// Pixel value for real-chart pixels with no real point on the chosen sheet.
pub const OFF_SURFACE: i32 = -2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl RealWindow {
    pub fn square(lo: f64, hi: f64) -> Self {
        RealWindow {
            x_min: lo,
            x_max: hi,
            y_min: lo,
            y_max: hi,
        }
    }

    /// Pixel-center coordinates; row 0 is the top edge.
    fn sample(&self, col: usize, row: usize, width: usize, height: usize) -> (f64, f64) {
        let x = self.x_min + (col as f64 + 0.5) * (self.x_max - self.x_min) / width as f64;
        let y = self.y_max - (row as f64 + 0.5) * (self.y_max - self.y_min) / height as f64;
        (x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SliceSpec {
    /// Fixed z = z0; pixels sample the conic parameter t = re + i·im, the
    /// intercept of a line y = m·x + t with m the asymptote slope.
    Complex { z0: C64, asymptote_slope: C64 },
    /// Real (x, y) chart; z is the chosen root of the defining quadratic.
    Real { sheet: Sheet },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterMeta {
    pub word: GroupWord,
    pub params: SurfaceParams,
    pub slice: SliceSpec,
    pub budget: usize,
    pub escape_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeRaster {
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the top; escape time, [`BOUNDED`] or [`OFF_SURFACE`].
    pub values: Vec<i32>,
    pub window: RealWindow,
    pub metadata: RasterMeta,
}

impl EscapeRaster {
    pub fn get(&self, col: usize, row: usize) -> i32 {
        self.values[row * self.width + col]
    }

    pub fn count(&self, value: i32) -> usize {
        self.values.iter().filter(|&&v| v == value).count()
    }

    /// Pixel centers of bounded pixels, for box counting.
    pub fn bounded_points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                if self.get(col, row) == BOUNDED {
                    out.push(self.window.sample(col, row, self.width, self.height));
                }
            }
        }
        out
    }
}

fn render<F>(width: usize, height: usize, window: RealWindow, pixel: F) -> Result<Vec<i32>>
where
    F: Fn(f64, f64) -> i32 + Sync,
{
    if width == 0 || height == 0 {
        return Err(Error::Invalid("raster dimensions must be positive".into()));
    }
    if !(window.x_max > window.x_min && window.y_max > window.y_min) {
        return Err(Error::Invalid("raster window is empty".into()));
    }
    let rows: Vec<Vec<i32>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|col| {
                    let (a, b) = window.sample(col, row, width, height);
                    pixel(a, b)
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

fn escape_value(f: &Automorphism, p: &SurfacePoint, budget: usize, radius: f64) -> i32 {
    match f.escape_time(p, budget, radius) {
        Some(k) => k.min(i32::MAX as usize) as i32,
        None => BOUNDED,
    }
}

/// Rational parametrization of the conic x² + y² + c·xy = r by the lines
/// y = m·x + t parallel to an asymptote (1, m). Each such line meets the
/// conic once more, and large |t| goes to large points.
struct Conic {
    c: C64,
    r: C64,
    m: C64,
}

impl Conic {
    fn new(c: C64, r: C64) -> Self {
        let m = (-c + (c * c - 4.0).sqrt()) / 2.0;
        Conic { c, r, m }
    }

    fn point(&self, t: C64) -> [C64; 2] {
        let x = (self.r - t * t) / (t * (self.m * 2.0 + self.c));
        [x, self.m * x + t]
    }
}

/// Escape times on the slice z = z0, parametrized by a complex t.
pub fn render_complex_slice(
    params: &SurfaceParams,
    w: &GroupWord,
    z0: C64,
    window: RealWindow,
    width: usize,
    height: usize,
    budget: usize,
    escape_radius: f64,
) -> Result<EscapeRaster> {
    if !params.abc_vanish() {
        return Err(Error::Invalid("complex slices need A = B = C = 0".into()));
    }
    let f = Automorphism::from_word(params, w)?;
    // Fam: x² + y² + z0·xy = D − z0²; PT flips the sign of the cross term.
    let c = -z0 * params.convention.sigma();
    let r = params.d - z0 * z0;
    let scale = 1.0 + params.d.norm() + z0.norm_sqr();
    if r.norm() < 1e-12 * scale {
        return Err(Error::DegenerateConic(format!(
            "D − z0² vanishes at z0 = {z0}"
        )));
    }
    if (c * c - 4.0).norm() < 1e-12 {
        return Err(Error::DegenerateConic(format!(
            "quadratic form is degenerate at z0 = {z0}"
        )));
    }
    let conic = Conic::new(c, r);
    let values = render(width, height, window, |a, b| {
        let [x, y] = conic.point(C64::new(a, b));
        let p = SurfacePoint::new(x, y, z0);
        if !p.is_finite() {
            return 0;
        }
        escape_value(&f, &p, budget, escape_radius)
    })?;
    Ok(EscapeRaster {
        width,
        height,
        values,
        window,
        metadata: RasterMeta {
            word: w.clone(),
            params: *params,
            slice: SliceSpec::Complex {
                z0,
                asymptote_slope: conic.m,
            },
            budget,
            escape_radius,
        },
    })
}

/// Escape times on one sheet of the real surface over an (x, y) window.
pub fn render_real_chart(
    params: &SurfaceParams,
    w: &GroupWord,
    window: RealWindow,
    sheet: Sheet,
    width: usize,
    height: usize,
    budget: usize,
    escape_radius: f64,
) -> Result<EscapeRaster> {
    if !params.is_real() {
        return Err(Error::Invalid("real charts need real parameters".into()));
    }
    let f = Automorphism::from_word(params, w)?;
    let sigma = params.convention.sigma();
    let (pa, pb, pc, pd) = (params.a.re, params.b.re, params.c.re, params.d.re);
    let values = render(width, height, window, |x, y| {
        match real_sheet_z(sigma, pa, pb, pc, pd, x, y, sheet) {
            Some(z) => escape_value(&f, &SurfacePoint::real(x, y, z), budget, escape_radius),
            None => OFF_SURFACE,
        }
    })?;
    Ok(EscapeRaster {
        width,
        height,
        values,
        window,
        metadata: RasterMeta {
            word: w.clone(),
            params: *params,
            slice: SliceSpec::Real { sheet },
            budget,
            escape_radius,
        },
    })
}

/// Real root in z of z² + β z + γ = 0 on the chosen sheet, where the
/// defining equation is read as a quadratic in z.
#[allow(clippy::too_many_arguments)]
pub(crate) fn real_sheet_z(
    sigma: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    x: f64,
    y: f64,
    sheet: Sheet,
) -> Option<f64> {
    let beta = -sigma * x * y - c;
    let gamma = x * x + y * y - a * x - b * y - d;
    let disc = beta * beta - 4.0 * gamma;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    Some(match sheet {
        Sheet::Upper => (-beta + root) / 2.0,
        Sheet::Lower => (-beta - root) / 2.0,
    })
}

/// PGM (P5, 16-bit big-endian): off-surface 0, escape at step k as k+1
/// (clamped), bounded 65535.
pub fn pgm_bytes(r: &EscapeRaster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", r.width, r.height).into_bytes();
    out.reserve(2 * r.values.len());
    for &v in &r.values {
        let level: u16 = match v {
            OFF_SURFACE => 0,
            BOUNDED => u16::MAX,
            k => (k as i64 + 1).clamp(1, 65534) as u16,
        };
        out.extend_from_slice(&level.to_be_bytes());
    }
    out
}

pub fn write_pgm<W: Write>(r: &EscapeRaster, mut out: W) -> std::io::Result<()> {
    out.write_all(&pgm_bytes(r))
}
