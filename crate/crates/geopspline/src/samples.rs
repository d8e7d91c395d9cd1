//! Posterior samples as CSV.
//!
//! ```text
//! # geopspline-samples v1 {"nu":3,"degree":3,"normalize_rows":true,"kappa":0.41,...}
//! alpha,tau_beta,tau_eps,beta_0,beta_1,...
//! 12.5,3.1,0.9,0.02,-0.11,...
//! ```
//!
//! One row per stored draw. Values are written with the shortest
//! representation that parses back to the same `f64`, so a file read and
//! rewritten is unchanged.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use geopspline_core::model::{Hyperparameters, PosteriorSamples, SampleMetadata};

use crate::FormatError;

const MAGIC: &str = "# geopspline-samples v1 ";

#[derive(Serialize, Deserialize)]
struct MetaJson {
    nu: u32,
    degree: u32,
    normalize_rows: bool,
    kappa: f64,
    knots: usize,
    n_obs: usize,
    seed: u64,
    burnin: usize,
    thin: usize,
    hyper_a: f64,
    hyper_b: f64,
    tau_alpha: f64,
}

impl From<&SampleMetadata> for MetaJson {
    fn from(m: &SampleMetadata) -> Self {
        Self {
            nu: m.grid_level,
            degree: m.degree,
            normalize_rows: m.normalize_rows,
            kappa: m.kappa,
            knots: m.knots,
            n_obs: m.n_obs,
            seed: m.seed,
            burnin: m.burnin,
            thin: m.thin,
            hyper_a: m.hyper.hyper_a,
            hyper_b: m.hyper.hyper_b,
            tau_alpha: m.hyper.tau_alpha,
        }
    }
}

impl From<MetaJson> for SampleMetadata {
    fn from(m: MetaJson) -> Self {
        Self {
            grid_level: m.nu,
            degree: m.degree,
            normalize_rows: m.normalize_rows,
            kappa: m.kappa,
            knots: m.knots,
            n_obs: m.n_obs,
            seed: m.seed,
            burnin: m.burnin,
            thin: m.thin,
            hyper: Hyperparameters {
                hyper_a: m.hyper_a,
                hyper_b: m.hyper_b,
                tau_alpha: m.tau_alpha,
            },
        }
    }
}

pub fn write_samples(path: &Path, samples: &PosteriorSamples) -> Result<(), FormatError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    format_samples(&mut out, samples)?;
    out.flush()?;
    Ok(())
}

pub fn format_samples(out: &mut impl Write, s: &PosteriorSamples) -> Result<(), FormatError> {
    let meta = serde_json::to_string(&MetaJson::from(&s.meta))
        .map_err(|e| FormatError::Header(e.to_string()))?;
    writeln!(out, "{MAGIC}{meta}")?;
    out.write_all(b"alpha,tau_beta,tau_eps")?;
    for k in 0..s.knots() {
        write!(out, ",beta_{k}")?;
    }
    out.write_all(b"\n")?;
    for g in 0..s.draws() {
        write!(out, "{},{},{}", s.alpha[g], s.tau_beta[g], s.tau_eps[g])?;
        for b in s.beta(g) {
            write!(out, ",{b}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_samples(path: &Path) -> Result<PosteriorSamples, FormatError> {
    parse_samples(BufReader::new(fs::File::open(path)?))
}

pub fn parse_samples(reader: impl BufRead) -> Result<PosteriorSamples, FormatError> {
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| FormatError::Header("empty samples file".into()))??;
    let json = first
        .strip_prefix(MAGIC)
        .ok_or_else(|| FormatError::Header("not a geopspline samples file".into()))?;
    let meta: SampleMetadata = serde_json::from_str::<MetaJson>(json)
        .map_err(|e| FormatError::Header(e.to_string()))?
        .into();
    let columns = lines
        .next()
        .ok_or_else(|| FormatError::Header("missing column header".into()))??;
    let width = 3 + meta.knots;
    if columns.split(',').count() != width {
        return Err(FormatError::Header(format!(
            "expected {width} columns for {} knots",
            meta.knots
        )));
    }
    let mut s = PosteriorSamples {
        meta,
        alpha: Vec::new(),
        tau_beta: Vec::new(),
        tau_eps: Vec::new(),
        beta: Vec::new(),
    };
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line_no = i + 3;
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0;
        for (c, f) in line.split(',').enumerate() {
            let v: f64 = f.trim().parse().map_err(|_| FormatError::BadValue {
                line: line_no,
                column: c + 1,
                text: f.to_string(),
            })?;
            match c {
                0 => s.alpha.push(v),
                1 => s.tau_beta.push(v),
                2 => s.tau_eps.push(v),
                c if c < width => s.beta.push(v),
                _ => {}
            }
            count += 1;
        }
        if count != width {
            return Err(FormatError::ShortRow {
                line: line_no,
                expected: width,
                found: count,
            });
        }
    }
    if s.alpha.is_empty() {
        return Err(FormatError::MissingRows {
            expected: 1,
            found: 0,
        });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> PosteriorSamples {
        PosteriorSamples {
            meta: SampleMetadata {
                grid_level: 0,
                degree: 3,
                normalize_rows: true,
                kappa: 0.123456789,
                knots: 12,
                n_obs: 30,
                seed: 7,
                burnin: 5,
                thin: 2,
                hyper: Hyperparameters::default(),
            },
            alpha: vec![1.5, -0.1],
            tau_beta: vec![3.0, 1e-7],
            tau_eps: vec![0.25, 4.0],
            beta: (0..24).map(|i| (i as f64).sin() / 3.0).collect(),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let s = toy();
        let mut a = Vec::new();
        format_samples(&mut a, &s).unwrap();
        let back = parse_samples(a.as_slice()).unwrap();
        assert_eq!(back, s);
        let mut b = Vec::new();
        format_samples(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_foreign_and_short_files() {
        assert!(matches!(parse_samples("alpha\n1\n".as_bytes()), Err(FormatError::Header(_))));
        let mut a = Vec::new();
        format_samples(&mut a, &toy()).unwrap();
        let text = String::from_utf8(a).unwrap();
        let cut = text.rfind(',').unwrap();
        let truncated = format!("{}\n", &text[..cut]);
        assert!(matches!(
            parse_samples(truncated.as_bytes()),
            Err(FormatError::ShortRow { line: 4, .. })
        ));
    }
}
