//! Synthetic rasters with a known truth.
//!
//! The default truth is a zonal band whose centre latitude oscillates with
//! longitude, a stand-in for a water-vapour maximum near the equator:
//!
//! `f(lat, lon) = base + amplitude · exp(−(lat − c(lon))² / (2 width²))`,
//! `c(lon) = center_lat + wobble · sin(wavenumber · lon + phase)`.
//!
//! Observations are the truth plus Gaussian noise, with a fraction of the
//! cells masked out either at random or in rectangular blocks.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::raster::{RasterData, RasterHeader};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    /// Zonal band, degrees throughout; `wavenumber` in cycles per 360°.
    Band {
        base: f64,
        amplitude: f64,
        center_lat: f64,
        wobble: f64,
        wavenumber: f64,
        phase: f64,
        width: f64,
    },
    Constant(f64),
}

impl Truth {
    pub fn band_center(&self, lon: f64) -> Option<f64> {
        match *self {
            Truth::Band {
                center_lat,
                wobble,
                wavenumber,
                phase,
                ..
            } => Some(center_lat + wobble * (wavenumber * lon.to_radians() + phase).sin()),
            Truth::Constant(_) => None,
        }
    }

    pub fn eval(&self, lat: f64, lon: f64) -> f64 {
        match *self {
            Truth::Band {
                base,
                amplitude,
                width,
                ..
            } => {
                let c = self.band_center(lon).unwrap_or(0.0);
                let d = (lat - c) / width;
                base + amplitude * (-0.5 * d * d).exp()
            }
            Truth::Constant(v) => v,
        }
    }
}

impl Default for Truth {
    fn default() -> Self {
        Truth::Band {
            base: 10.0,
            amplitude: 30.0,
            center_lat: 5.0,
            wobble: 8.0,
            wavenumber: 2.0,
            phase: 0.0,
            width: 15.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskPattern {
    #[default]
    Random,
    /// Rectangles of about a quarter of the rows by an eighth of the columns.
    Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub truth: Truth,
    pub noise_sd: f64,
    /// In `[0, 1)`.
    pub mask_fraction: f64,
    pub mask_pattern: MaskPattern,
    pub rows: usize,
    pub cols: usize,
    pub units: String,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            truth: Truth::default(),
            noise_sd: 2.0,
            mask_fraction: 0.3,
            mask_pattern: MaskPattern::Random,
            rows: 36,
            cols: 72,
            units: "kg/m2".into(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err("noise sd must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.mask_fraction) {
            return Err("mask fraction must be in [0, 1)");
        }
        if self.rows == 0 || self.cols == 0 {
            return Err("raster must have at least one cell");
        }
        Ok(())
    }
}

/// Noisy, masked observations and the noise-free truth on the same raster.
///
/// The mask and the noise come from separate ChaCha20 streams of `seed`.
pub fn synth_generate(spec: &SynthSpec, seed: u64) -> (RasterData, RasterData) {
    let header = RasterHeader::global(spec.rows, spec.cols, &spec.units);
    let n = spec.rows * spec.cols;
    let truth_values: Vec<f64> = header
        .centroids()
        .iter()
        .map(|&(lat, lon)| spec.truth.eval(lat, lon))
        .collect();

    let mut mask_rng = ChaCha20Rng::seed_from_u64(seed);
    mask_rng.set_stream(0);
    let target = (spec.mask_fraction * n as f64).round() as usize;
    let mut missing = vec![false; n];
    match spec.mask_pattern {
        MaskPattern::Random => {
            for i in index::sample(&mut mask_rng, n, target.min(n)) {
                missing[i] = true;
            }
        }
        MaskPattern::Block => {
            let h = (spec.rows / 4).max(1);
            let w = (spec.cols / 8).max(1);
            let mut count = 0;
            while count < target {
                let r0 = mask_rng.random_range(0..spec.rows);
                let c0 = mask_rng.random_range(0..spec.cols);
                for r in r0..(r0 + h).min(spec.rows) {
                    for c in c0..c0 + w {
                        let i = r * spec.cols + c % spec.cols;
                        if !missing[i] && count < target {
                            missing[i] = true;
                            count += 1;
                        }
                    }
                }
            }
        }
    }

    let mut noise_rng = ChaCha20Rng::seed_from_u64(seed);
    noise_rng.set_stream(1);
    let values = truth_values
        .iter()
        .zip(&missing)
        .map(|(&t, &m)| {
            let e: f64 = noise_rng.sample(StandardNormal);
            if m {
                f64::NAN
            } else {
                t + spec.noise_sd * e
            }
        })
        .collect();

    let obs = RasterData {
        header: header.clone(),
        values,
        missing,
    };
    let truth = RasterData {
        header,
        missing: vec![false; n],
        values: truth_values,
    };
    (obs, truth)
}
