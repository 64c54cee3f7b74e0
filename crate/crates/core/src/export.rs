//! CSV tables with header rows.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always give equal bytes.

use std::io::Write;

use crate::dynamics::SeedSample;
use crate::periodic::{PeriodicPoint, PointKind};
use crate::schrodinger::SpectrumEstimate;
use crate::surfaces::SurfacePoint;

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<usize>) -> String {
    v.map(|t| t.to_string()).unwrap_or_default()
}

/// Columns n, x, y, z (real and imaginary parts), log-norm.
pub fn write_orbit_csv<W: Write>(samples: &[SurfacePoint], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record([
        "n", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "log_norm",
    ])
    .map_err(io)?;
    for (n, p) in samples.iter().enumerate() {
        let c = p.coords();
        let mut row = vec![n.to_string()];
        row.extend(c.iter().flat_map(|v| [num(v.re), num(v.im)]));
        row.push(num(p.norm().max(1.0).ln()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
}

pub fn write_points_csv<W: Write>(points: &[SurfacePoint], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["x_re", "x_im", "y_re", "y_im", "z_re", "z_im"])
        .map_err(io)?;
    for p in points {
        let row: Vec<String> = p
            .coords()
            .iter()
            .flat_map(|v| [num(v.re), num(v.im)])
            .collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
}

/// One row per periodic point, tagged with its orbit index.
pub fn write_periodic_csv<W: Write>(orbits: &[Vec<PeriodicPoint>], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record([
        "orbit",
        "period",
        "x_re",
        "x_im",
        "y_re",
        "y_im",
        "z_re",
        "z_im",
        "mu_u_re",
        "mu_u_im",
        "mu_s_re",
        "mu_s_im",
        "kind",
        "real",
        "singular",
        "u_one_sided",
        "s_one_sided",
    ])
    .map_err(io)?;
    let flag = |b: Option<bool>| b.map(|v| v.to_string()).unwrap_or_default();
    for (k, orbit) in orbits.iter().enumerate() {
        for p in orbit {
            let mut row = vec![k.to_string(), p.period.to_string()];
            row.extend(p.point.coords().iter().flat_map(|v| [num(v.re), num(v.im)]));
            row.extend(p.multipliers.iter().flat_map(|v| [num(v.re), num(v.im)]));
            let kind = match p.kind {
                PointKind::Saddle => "saddle",
                PointKind::Elliptic => "elliptic",
                PointKind::ParabolicLike => "parabolic",
            };
            row.extend([
                kind.to_string(),
                p.is_real.to_string(),
                p.singular.to_string(),
            ]);
            row.extend([flag(p.one_sided.u), flag(p.one_sided.s)]);
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush()
}

/// Columns E, bounded, escape_time, green and, when given, lyapunov.
pub fn write_spectrum_csv<W: Write>(
    s: &SpectrumEstimate,
    lyapunov: Option<&[f64]>,
    out: W,
) -> std::io::Result<()> {
    let mut w = writer(out);
    let mut header = vec!["E", "bounded", "escape_time", "green"];
    if lyapunov.is_some() {
        header.push("lyapunov");
    }
    w.write_record(&header).map_err(io)?;
    for i in 0..s.energies.len() {
        let mut row = vec![
            num(s.energies[i]),
            u8::from(s.bounded_flags[i]).to_string(),
            opt(s.escape_times[i]),
            num(s.green[i]),
        ];
        if let Some(l) = lyapunov {
            row.push(num(l[i]));
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
}

pub fn write_samples_csv<W: Write>(samples: &[SeedSample], out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["x", "y", "z", "escape_time"]).map_err(io)?;
    for s in samples {
        w.write_record([num(s.x), num(s.y), num(s.z), opt(s.escape_time)])
            .map_err(io)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_table() {
        let mut buf = Vec::new();
        write_points_csv(&[SurfacePoint::real(1.0, -0.5, 2.0)], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x_re,x_im,y_re,y_im,z_re,z_im\n1,0,-0.5,0,2,0\n"
        );
    }
}
