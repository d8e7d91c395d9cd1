//! Posterior predictive sampling of the latent field.
//!
//! Draw `g` of the field at new locations is `α^g + B̃ β^g`, where `B̃` is the
//! basis evaluated there (composite sampling over the stored draws). The
//! observation noise is left out unless explicitly requested.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::basis::{assemble_basis, BasisConfig};
use crate::grid::GeodesicGrid;
use crate::model::PosteriorSamples;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Locations to predict at, with the setup the samples must match.
#[derive(Debug, Clone)]
pub struct PredictionRequest<'a> {
    pub locations: &'a [(f64, f64)],
    pub samples: &'a PosteriorSamples,
    pub grid: &'a GeodesicGrid,
    pub basis: BasisConfig,
    /// When set, the stored structure scaling must match it.
    pub expected_kappa: Option<f64>,
}

impl PredictionRequest<'_> {
    /// Checks that grid, basis and samples describe the same fit.
    pub fn validate(&self) -> Result<()> {
        validate_setup(self.samples, self.grid, &self.basis, self.expected_kappa)
    }

    fn basis_matrix(&self) -> Result<SparseMatrix> {
        self.validate()?;
        assemble_basis(self.locations, self.grid, &self.basis)
    }
}

pub(crate) fn validate_setup(
    samples: &PosteriorSamples,
    grid: &GeodesicGrid,
    basis: &BasisConfig,
    expected_kappa: Option<f64>,
) -> Result<()> {
    let m = &samples.meta;
    let mismatch = |field, expected: f64, found: f64| {
        Err(Error::MetadataMismatch {
            field,
            expected,
            found,
        })
    };
    if m.grid_level != basis.grid_level {
        return mismatch("grid level", basis.grid_level as f64, m.grid_level as f64);
    }
    if m.grid_level != grid.level() {
        return mismatch("grid level", grid.level() as f64, m.grid_level as f64);
    }
    if m.degree != basis.degree {
        return mismatch("degree", basis.degree as f64, m.degree as f64);
    }
    if m.normalize_rows != basis.normalize_rows {
        return mismatch(
            "row normalization",
            basis.normalize_rows as u8 as f64,
            m.normalize_rows as u8 as f64,
        );
    }
    if m.knots != grid.knot_count() || samples.beta.len() != samples.draws() * m.knots {
        return mismatch("knot count", grid.knot_count() as f64, m.knots as f64);
    }
    if let Some(k) = expected_kappa {
        if (k - m.kappa).abs() > 1e-12 * k.abs().max(1.0) {
            return mismatch("kappa", k, m.kappa);
        }
    }
    Ok(())
}

fn field_value(row: (&[usize], &[f64]), alpha: f64, beta: &[f64]) -> f64 {
    alpha + row.0.iter().zip(row.1).map(|(&c, &v)| v * beta[c]).sum::<f64>()
}

/// Latent-field draws at the requested locations, row-major `G x m`.
pub fn posterior_predictive(req: &PredictionRequest<'_>) -> Result<Vec<f64>> {
    let b = req.basis_matrix()?;
    let s = req.samples;
    let m = b.rows();
    let mut out = Vec::with_capacity(s.draws() * m);
    for g in 0..s.draws() {
        let beta = s.beta(g);
        out.extend((0..m).map(|i| field_value(b.row(i), s.alpha[g], beta)));
    }
    Ok(out)
}

/// Observation-level draws: the latent field plus `N(0, 1/τ_ε^g)` noise.
pub fn posterior_predictive_observations<R: Rng + ?Sized>(
    req: &PredictionRequest<'_>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut out = posterior_predictive(req)?;
    let m = req.locations.len();
    if m == 0 {
        return Ok(out);
    }
    for (g, chunk) in out.chunks_mut(m).enumerate() {
        let sd = 1.0 / libm::sqrt(req.samples.tau_eps[g]);
        for v in chunk {
            *v += sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(out)
}

/// Pointwise posterior mean and standard deviation (divisor `G`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoments {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

/// Streams over the draws with Welford updates; memory is `O(m)`.
pub fn field_moments(req: &PredictionRequest<'_>) -> Result<FieldMoments> {
    let b = req.basis_matrix()?;
    let s = req.samples;
    let m = b.rows();
    let mut mean = vec![0.0; m];
    let mut m2 = vec![0.0; m];
    for g in 0..s.draws() {
        let beta = s.beta(g);
        let count = (g + 1) as f64;
        for i in 0..m {
            let v = field_value(b.row(i), s.alpha[g], beta);
            let delta = v - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (v - mean[i]);
        }
    }
    let g = s.draws().max(1) as f64;
    let sd = m2.iter().map(|&q| libm::sqrt(q / g)).collect();
    Ok(FieldMoments { mean, sd })
}

/// Regular global latitude/longitude raster, rows from north to south.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RasterSpec {
    pub rows: usize,
    pub cols: usize,
}

impl RasterSpec {
    /// Cell centroids in row-major order.
    pub fn centroids(&self) -> Vec<(f64, f64)> {
        let dlat = 180.0 / self.rows as f64;
        let dlon = 360.0 / self.cols as f64;
        (0..self.rows)
            .flat_map(|r| {
                (0..self.cols).map(move |c| {
                    (90.0 - (r as f64 + 0.5) * dlat, -180.0 + (c as f64 + 0.5) * dlon)
                })
            })
            .collect()
    }
}

/// Posterior mean and sd rasters of the latent field, row-major.
pub fn mean_sd_raster(
    samples: &PosteriorSamples,
    grid: &GeodesicGrid,
    basis: BasisConfig,
    raster: RasterSpec,
) -> Result<FieldMoments> {
    if raster.rows == 0 || raster.cols == 0 {
        return Err(Error::InvalidArgument("raster must have at least one cell"));
    }
    let locations = raster.centroids();
    field_moments(&PredictionRequest {
        locations: &locations,
        samples,
        grid,
        basis,
        expected_kappa: None,
    })
}
