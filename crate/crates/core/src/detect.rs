//! Rank-based location of the latitudinal band where the latent field peaks.
//!
//! For every meridian and every posterior draw the field is evaluated on a
//! regular latitude grid and ranked (`L` at the maximum, `1` at the minimum).
//! A latitude is in the band for that draw when `1 − φ/L < w`, with `w` the
//! band width relative to the meridian length; the band probability is the
//! fraction of draws for which this holds.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{assemble_basis, BasisConfig};
use crate::grid::GeodesicGrid;
use crate::model::PosteriorSamples;
use crate::predict::validate_setup;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectConfig {
    pub width_km: f64,
    pub meridian_length_km: f64,
    /// Latitudes per meridian, `L`.
    pub lat_count: usize,
    /// Meridians, `M`.
    pub meridian_count: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            width_km: 1000.0,
            meridian_length_km: 20000.0,
            lat_count: 1000,
            meridian_count: 360,
        }
    }
}

impl DetectConfig {
    /// Relative band width `w`.
    pub fn relative_width(&self) -> f64 {
        self.width_km / self.meridian_length_km
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.relative_width();
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidArgument("relative band width must be in (0, 1)"));
        }
        if self.lat_count < 2 || self.meridian_count < 1 {
            return Err(Error::InvalidArgument("need L >= 2 latitudes and M >= 1 meridians"));
        }
        Ok(())
    }

    /// Regular latitudes from 90 to −90, both poles included.
    pub fn latitudes(&self) -> Vec<f64> {
        let step = 180.0 / (self.lat_count - 1) as f64;
        (0..self.lat_count).map(|l| 90.0 - l as f64 * step).collect()
    }

    /// Equally spaced meridians starting at −180.
    pub fn longitudes(&self) -> Vec<f64> {
        let step = 360.0 / self.meridian_count as f64;
        (0..self.meridian_count).map(|m| -180.0 + m as f64 * step).collect()
    }
}

/// Ranks `1..=L`; equal values get ranks in index order (lower index, lower rank).
pub fn rank_vector(values: &[f64]) -> Result<Vec<usize>> {
    if let Some(p) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(p));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    Ok(ranks)
}

/// Whether rank `phi` of `lat_count` falls in the band, `1 − φ/L < w`.
pub fn in_band(phi: usize, lat_count: usize, w: f64) -> bool {
    1.0 - (phi as f64) / (lat_count as f64) < w
}

/// Number of ranks that satisfy [`in_band`]; these are always the top ranks.
pub fn band_rank_count(lat_count: usize, w: f64) -> usize {
    (1..=lat_count).filter(|&phi| in_band(phi, lat_count, w)).count()
}

/// Band probabilities, row-major `M x L` (meridian-major).
#[derive(Debug, Clone, PartialEq)]
pub struct BandProbabilityMap {
    pub latitudes: Vec<f64>,
    pub longitudes: Vec<f64>,
    pub probability: Vec<f64>,
}

impl BandProbabilityMap {
    pub fn meridian(&self, m: usize) -> &[f64] {
        let l = self.latitudes.len();
        &self.probability[m * l..(m + 1) * l]
    }
}

/// Marks the `top` largest entries of `values` (ties: higher index ranks higher).
fn mark_top(values: &[f64], top: usize, order: &mut Vec<usize>, hits: &mut [u32]) {
    if top == 0 {
        return;
    }
    let l = values.len();
    order.clear();
    order.extend(0..l);
    let cmp = |a: &usize, b: &usize| values[*a].total_cmp(&values[*b]).then(a.cmp(b));
    if top < l {
        order.select_nth_unstable_by(l - top, cmp);
    }
    for &i in &order[l - top..] {
        hits[i] += 1;
    }
}

/// Posterior probability that each (meridian, latitude) lies in the band.
pub fn band_probability(
    samples: &PosteriorSamples,
    grid: &GeodesicGrid,
    basis: BasisConfig,
    cfg: &DetectConfig,
) -> Result<BandProbabilityMap> {
    cfg.validate()?;
    validate_setup(samples, grid, &basis, None)?;
    let latitudes = cfg.latitudes();
    let longitudes = cfg.longitudes();
    let l = cfg.lat_count;
    let top = band_rank_count(l, cfg.relative_width());
    let draws = samples.draws();
    let mut probability = Vec::with_capacity(cfg.meridian_count * l);
    let mut field = vec![0.0; l];
    let mut order = Vec::with_capacity(l);
    let mut hits = vec![0u32; l];
    for &lon in &longitudes {
        let locs: Vec<(f64, f64)> = latitudes.iter().map(|&lat| (lat, lon)).collect();
        let b = assemble_basis(&locs, grid, &basis)?;
        hits.iter_mut().for_each(|h| *h = 0);
        for g in 0..draws {
            let beta = samples.beta(g);
            for (i, f) in field.iter_mut().enumerate() {
                let (c, v) = b.row(i);
                *f = samples.alpha[g] + c.iter().zip(v).map(|(&c, &v)| v * beta[c]).sum::<f64>();
            }
            if let Some(p) = field.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(p));
            }
            mark_top(&field, top, &mut order, &mut hits);
        }
        probability.extend(hits.iter().map(|&h| h as f64 / draws as f64));
    }
    Ok(BandProbabilityMap {
        latitudes,
        longitudes,
        probability,
    })
}
