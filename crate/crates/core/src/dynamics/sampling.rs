//! Random real seeds on the surface and their escape times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raster::real_sheet_z;
use super::{Automorphism, Sheet};
use crate::error::{Error, Result};
use crate::surfaces::{SurfaceParams, SurfacePoint};
use crate::words::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `None` when bounded for the whole budget.
    pub escape_time: Option<usize>,
}

impl SeedSample {
    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

/// `count` real points drawn uniformly in (x, y) over the square of the given
/// half-width, on a uniformly chosen sheet, and their forward escape times.
/// Seeds are drawn sequentially, so the result does not depend on the thread count.
pub fn sample_real_seeds(
    params: &SurfaceParams,
    w: &GroupWord,
    count: usize,
    half_width: f64,
    budget: usize,
    escape_radius: f64,
    rng_seed: u64,
) -> Result<Vec<SeedSample>> {
    if !params.is_real() {
        return Err(Error::Invalid("real sampling needs real parameters".into()));
    }
    if !(half_width > 0.0) {
        return Err(Error::Invalid(format!(
            "half width must be positive, got {half_width}"
        )));
    }
    let f = Automorphism::from_word(params, w)?;
    let sigma = params.convention.sigma();
    let (a, b, c, d) = (params.a.re, params.b.re, params.c.re, params.d.re);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds = Vec::with_capacity(count);
    let max_attempts = count.saturating_mul(1000).max(1000);
    let mut attempts = 0;
    while seeds.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Empty(format!(
                "only {} real points in {max_attempts} draws",
                seeds.len()
            )));
        }
        let x = rng.gen_range(-half_width..half_width);
        let y = rng.gen_range(-half_width..half_width);
        let sheet = if rng.gen::<bool>() {
            Sheet::Upper
        } else {
            Sheet::Lower
        };
        if let Some(z) = real_sheet_z(sigma, a, b, c, d, x, y, sheet) {
            seeds.push((x, y, z));
        }
    }
    Ok(seeds
        .par_iter()
        .map(|&(x, y, z)| SeedSample {
            x,
            y,
            z,
            escape_time: f.escape_time(&SurfacePoint::real(x, y, z), budget, escape_radius),
        })
        .collect())
}
