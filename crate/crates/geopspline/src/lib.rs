//! File formats, synthetic data and the command-line interface around
//! [`geopspline_core`].
//!
//! * [`raster`]: self-describing raster CSV (one-line JSON header, row-major values);
//! * [`samples`]: posterior-draw files with metadata;
//! * [`formats`]: location lists, sparse matrices and result tables;
//! * [`synth`]: synthetic fields standing in for real satellite rasters;
//! * [`cli`]: the `geopspline` command.

pub mod cli;
mod error;
pub mod formats;
pub mod raster;
pub mod samples;
pub mod synth;

pub use error::FormatError;
pub use geopspline_core as core;
