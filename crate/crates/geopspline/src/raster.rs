//! Raster CSV files.
//!
//! The first line is a JSON object describing the grid:
//!
//! ```text
//! {"rows":360,"cols":720,"lat0":89.75,"lon0":-179.75,"dlat":-0.5,"dlon":0.5,"missing":"NaN","units":"kg/m2"}
//! ```
//!
//! `lat0`/`lon0` are the centroid of the first cell, `dlat`/`dlon` the steps
//! between rows and columns. Then come `rows` lines of `cols` comma-separated
//! values, row-major. A cell is missing when its field is empty, equals the
//! missing token, or is a literal `NaN`. Values apply at cell centroids.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use geopspline_core::model::Observations;

use crate::FormatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    pub rows: usize,
    pub cols: usize,
    pub lat0: f64,
    pub lon0: f64,
    pub dlat: f64,
    pub dlon: f64,
    #[serde(default = "default_missing")]
    pub missing: String,
    #[serde(default)]
    pub units: String,
}

fn default_missing() -> String {
    "NaN".into()
}

impl RasterHeader {
    /// Global raster, rows from north to south, columns from −180 eastwards.
    pub fn global(rows: usize, cols: usize, units: &str) -> Self {
        let dlat = 180.0 / rows as f64;
        let dlon = 360.0 / cols as f64;
        Self {
            rows,
            cols,
            lat0: 90.0 - dlat / 2.0,
            lon0: -180.0 + dlon / 2.0,
            dlat: -dlat,
            dlon,
            missing: default_missing(),
            units: units.into(),
        }
    }

    pub fn centroid(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.lat0 + row as f64 * self.dlat,
            self.lon0 + col as f64 * self.dlon,
        )
    }

    pub fn centroids(&self) -> Vec<(f64, f64)> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| self.centroid(r, c)))
            .collect()
    }

    fn validate(&self) -> Result<(), FormatError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(FormatError::Header("rows and cols must be positive".into()));
        }
        if !(self.lat0.is_finite() && self.lon0.is_finite() && self.dlat.is_finite() && self.dlon.is_finite()) {
            return Err(FormatError::Header("non-finite origin or step".into()));
        }
        for (r, c) in [(0, 0), (self.rows - 1, self.cols - 1)] {
            let (lat, lon) = self.centroid(r, c);
            if !((-90.0..=90.0).contains(&lat) && (-180.0..180.0).contains(&lon)) {
                return Err(FormatError::CoordinateOutOfRange { lat, lon });
            }
        }
        Ok(())
    }
}

/// A raster of point values with a missing-value mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterData {
    pub header: RasterHeader,
    /// Row-major; missing cells hold NaN.
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
}

impl RasterData {
    pub fn new(header: RasterHeader, values: Vec<f64>) -> Self {
        let missing = values.iter().map(|v| v.is_nan()).collect();
        Self {
            header,
            values,
            missing,
        }
    }

    pub fn missing_fraction(&self) -> f64 {
        self.missing.iter().filter(|&&m| m).count() as f64 / self.missing.len().max(1) as f64
    }

    pub fn to_observations(&self) -> Observations {
        Observations {
            locations: self.header.centroids(),
            values: self.values.clone(),
            missing: self.missing.clone(),
        }
    }
}

pub fn read_raster(path: &Path) -> Result<RasterData, FormatError> {
    let file = fs::File::open(path)?;
    parse_raster(BufReader::new(file))
}

pub fn parse_raster(reader: impl BufRead) -> Result<RasterData, FormatError> {
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| FormatError::Header("empty file".into()))??;
    let header: RasterHeader =
        serde_json::from_str(first.trim()).map_err(|e| FormatError::Header(e.to_string()))?;
    header.validate()?;
    let mut values = Vec::with_capacity(header.rows * header.cols);
    let mut missing = Vec::with_capacity(header.rows * header.cols);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line_no = i + 2;
        if rows == header.rows {
            if line.trim().is_empty() {
                continue;
            }
            return Err(FormatError::Header(format!(
                "line {line_no}: more than {} data rows",
                header.rows
            )));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.cols {
            return Err(FormatError::ShortRow {
                line: line_no,
                expected: header.cols,
                found: fields.len(),
            });
        }
        for (c, f) in fields.iter().enumerate() {
            let f = f.trim();
            if f.is_empty() || f == header.missing || f.eq_ignore_ascii_case("nan") {
                values.push(f64::NAN);
                missing.push(true);
            } else {
                let v: f64 = f.parse().map_err(|_| FormatError::BadValue {
                    line: line_no,
                    column: c + 1,
                    text: f.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(FormatError::BadValue {
                        line: line_no,
                        column: c + 1,
                        text: f.to_string(),
                    });
                }
                values.push(v);
                missing.push(false);
            }
        }
        rows += 1;
    }
    if rows != header.rows {
        return Err(FormatError::MissingRows {
            expected: header.rows,
            found: rows,
        });
    }
    Ok(RasterData {
        header,
        values,
        missing,
    })
}

pub fn write_raster(path: &Path, raster: &RasterData) -> Result<(), FormatError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    format_raster(&mut out, raster)?;
    out.flush()?;
    Ok(())
}

pub fn format_raster(out: &mut impl Write, raster: &RasterData) -> Result<(), FormatError> {
    let h = &raster.header;
    writeln!(
        out,
        "{}",
        serde_json::to_string(h).map_err(|e| FormatError::Header(e.to_string()))?
    )?;
    for r in 0..h.rows {
        for c in 0..h.cols {
            if c > 0 {
                out.write_all(b",")?;
            }
            let i = r * h.cols + c;
            if raster.missing[i] {
                out.write_all(h.missing.as_bytes())?;
            } else {
                write!(out, "{}", raster.values[i])?;
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
