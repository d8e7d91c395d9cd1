//! The `geopspline` command.
//!
//! Output paths that are not given explicitly go to `$GEOPSPLINE_OUTPUT_DIR`
//! (or the current directory when unset).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use geopspline_core::basis::{assemble_basis, BasisConfig};
use geopspline_core::detect::{band_probability, DetectConfig};
use geopspline_core::geom::EARTH_RADIUS_KM;
use geopspline_core::grid::GeodesicGrid;
use geopspline_core::model::{gibbs_fit_with_progress, GibbsConfig, Hyperparameters, ModelSpec};
use geopspline_core::penalty::{
    coefficient_of_variation, geometric_mean, icar_structure, marginal_variance_diag,
    planar_structure, scale_structure,
};
use geopspline_core::predict::{field_moments, PredictionRequest};

use crate::formats::{
    read_locations, write_band_probability, write_point_values, write_sparse, write_variances,
};
use crate::raster::{read_raster, write_raster, RasterData, RasterHeader};
use crate::samples::{read_samples, write_samples};
use crate::synth::{synth_generate, MaskPattern, SynthSpec, Truth};

pub const OUTPUT_DIR_ENV: &str = "GEOPSPLINE_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "geopspline", version, about = "Geodesic P-spline smoothing on the sphere")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Knot, edge and face counts and knot spacing of a geodesic grid.
    GridInfo(GridInfoArgs),
    /// Evaluates the basis matrix at a set of locations.
    BuildBasis(BuildBasisArgs),
    /// Marginal variances of an intrinsic GMRF structure, per knot.
    PenaltyVariances(PenaltyArgs),
    /// Fits the model to a raster with the Gibbs sampler.
    Fit(FitArgs),
    /// Posterior mean and sd of the latent field.
    Predict(PredictArgs),
    /// Probability that each location lies in the band of highest values.
    Itcz(ItczArgs),
    /// Writes a synthetic raster and its noise-free truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct GridInfoArgs {
    /// Subdivision level.
    #[arg(long)]
    nu: u32,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BuildBasisArgs {
    #[arg(long)]
    nu: u32,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Locations CSV (`lat,lon`) or raster CSV (observed cells are used).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Keep raw Bernstein values instead of normalizing rows to sum to one.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PenaltyKind {
    Geodesic,
    Naive,
    Circular,
}

#[derive(Debug, Args)]
struct PenaltyArgs {
    #[arg(long, value_enum)]
    kind: PenaltyKind,
    /// Subdivision level (geodesic).
    #[arg(long)]
    nu: Option<u32>,
    /// Latitude rows of the lattice (naive, circular).
    #[arg(long)]
    lat: Option<usize>,
    /// Longitude columns of the lattice (naive, circular).
    #[arg(long)]
    lon: Option<usize>,
    /// Scale the structure so the geometric mean variance is one.
    #[arg(long)]
    scaled: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Raster CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    nu: u32,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    #[arg(long, default_value_t = 5000)]
    draws: usize,
    #[arg(long, default_value_t = 500)]
    burnin: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    hyper_a: f64,
    #[arg(long, default_value_t = 5e-5)]
    hyper_b: f64,
    /// Prior precision of the intercept.
    #[arg(long, default_value_t = 1e-6)]
    tau_alpha: f64,
    #[arg(long)]
    no_normalize: bool,
    /// Samples file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Suppress progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    samples: PathBuf,
    /// Global raster of centroids, e.g. `360x720`.
    #[arg(long, conflicts_with = "locations", required_unless_present = "locations")]
    raster: Option<String>,
    /// Locations CSV (`lat,lon`).
    #[arg(long)]
    locations: Option<PathBuf>,
    #[arg(long)]
    output_mean: Option<PathBuf>,
    #[arg(long)]
    output_sd: Option<PathBuf>,
    /// Expected subdivision level; must match the samples.
    #[arg(long)]
    nu: Option<u32>,
    /// Expected basis degree; must match the samples.
    #[arg(long)]
    degree: Option<u32>,
    /// Report the sd of a new observation instead of the latent field.
    #[arg(long)]
    with_noise: bool,
}

#[derive(Debug, Args)]
struct ItczArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 1000.0)]
    width_km: f64,
    /// Length of a meridian, pole to pole.
    #[arg(long, default_value_t = 20000.0)]
    meridian_km: f64,
    /// Latitudes per meridian.
    #[arg(long = "L", default_value_t = 1000)]
    lat_count: usize,
    /// Number of meridians.
    #[arg(long = "M", default_value_t = 360)]
    meridian_count: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MaskArg {
    Random,
    Block,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 36)]
    rows: usize,
    #[arg(long, default_value_t = 72)]
    cols: usize,
    #[arg(long, default_value_t = 2.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0.3)]
    mask_fraction: f64,
    #[arg(long, value_enum, default_value_t = MaskArg::Random)]
    mask_pattern: MaskArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Band level away from the band.
    #[arg(long, default_value_t = 10.0)]
    base: f64,
    #[arg(long, default_value_t = 30.0)]
    amplitude: f64,
    /// Mean latitude of the band centre.
    #[arg(long, default_value_t = 5.0)]
    center_lat: f64,
    /// Amplitude in degrees of the centre's oscillation with longitude.
    #[arg(long, default_value_t = 8.0)]
    wobble: f64,
    /// Oscillations per 360 degrees of longitude.
    #[arg(long, default_value_t = 2.0)]
    wavenumber: f64,
    /// Band width (Gaussian sd) in degrees of latitude.
    #[arg(long, default_value_t = 15.0)]
    width: f64,
    /// Use a constant truth instead of the band.
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, default_value = "kg/m2")]
    units: String,
    /// Observations raster.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Noise-free truth raster.
    #[arg(long)]
    truth_output: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs the command.
///
/// Returns the process exit status: 0 on success, 2 for usage errors, 1 for
/// anything else.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GridInfo(a) => grid_info(a),
        Command::BuildBasis(a) => build_basis(a),
        Command::PenaltyVariances(a) => penalty_variances(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Itcz(a) => itcz(a),
        Command::Synth(a) => synth(a),
    }
}

fn output_path(given: Option<PathBuf>, default_name: &str) -> PathBuf {
    given.unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name)
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

#[derive(Serialize)]
struct GridInfo {
    nu: u32,
    vertices: usize,
    edges: usize,
    faces: usize,
    euler_characteristic: i64,
    degree_histogram: Vec<(usize, usize)>,
    spacing_km_min: f64,
    spacing_km_max: f64,
    spacing_km_mean: f64,
}

fn grid_info(a: GridInfoArgs) -> Result<()> {
    let grid = GeodesicGrid::new(a.nu)?;
    let mesh = grid.icosphere();
    let spacing: Vec<f64> = grid.edge_angles().iter().map(|t| t * EARTH_RADIUS_KM).collect();
    let info = GridInfo {
        nu: a.nu,
        vertices: mesh.vertex_count(),
        edges: mesh.edge_count(),
        faces: mesh.face_count(),
        euler_characteristic: mesh.euler_characteristic(),
        degree_histogram: grid.degree_histogram(),
        spacing_km_min: spacing.iter().copied().fold(f64::INFINITY, f64::min),
        spacing_km_max: spacing.iter().copied().fold(0.0, f64::max),
        spacing_km_mean: spacing.iter().sum::<f64>() / spacing.len() as f64,
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&info)?);
    } else {
        println!("nu={}", info.nu);
        println!("V={}", info.vertices);
        println!("E={}", info.edges);
        println!("F={}", info.faces);
        println!("euler={}", info.euler_characteristic);
        for (d, c) in &info.degree_histogram {
            println!("degree {d}: {c}");
        }
        println!(
            "spacing km: min={:.3} max={:.3} mean={:.3}",
            info.spacing_km_min, info.spacing_km_max, info.spacing_km_mean
        );
    }
    Ok(())
}

/// Locations from a raster (observed cells) or a plain `lat,lon` CSV.
fn read_input_locations(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let r = read_raster(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(r.to_observations().observed().0)
    } else {
        Ok(read_locations(path).with_context(|| format!("reading {}", path.display()))?)
    }
}

fn build_basis(a: BuildBasisArgs) -> Result<()> {
    let grid = GeodesicGrid::new(a.nu)?;
    let mut cfg = BasisConfig::new(a.degree, a.nu)?;
    cfg.normalize_rows = !a.no_normalize;
    let locs = read_input_locations(&a.input)?;
    let b = assemble_basis(&locs, &grid, &cfg)?;
    let path = output_path(a.output, "basis.txt");
    let mut out = create(&path)?;
    write_sparse(&mut out, &b)?;
    out.flush()?;
    println!("basis {}x{} nnz={} -> {}", b.rows(), b.cols(), b.nnz(), path.display());
    Ok(())
}

fn lattice_centroids(rows: usize, cols: usize) -> Vec<(f64, f64)> {
    let dlat = 180.0 / rows as f64;
    let dlon = 360.0 / cols as f64;
    (0..rows)
        .flat_map(|l| {
            (0..cols).map(move |q| (90.0 - (l as f64 + 0.5) * dlat, -180.0 + (q as f64 + 0.5) * dlon))
        })
        .collect()
}

fn penalty_variances(a: PenaltyArgs) -> Result<()> {
    let (structure, coords) = match a.kind {
        PenaltyKind::Geodesic => {
            let Some(nu) = a.nu else {
                bail!("--kind geodesic needs --nu");
            };
            let grid = GeodesicGrid::new(nu)?;
            let coords = grid.knots().iter().map(|k| k.to_lat_lon()).collect();
            (icar_structure(&grid), coords)
        }
        PenaltyKind::Naive | PenaltyKind::Circular => {
            let (Some(rows), Some(cols)) = (a.lat, a.lon) else {
                bail!("lattice kinds need --lat and --lon");
            };
            let circular = matches!(a.kind, PenaltyKind::Circular);
            (planar_structure(rows, cols, circular)?, lattice_centroids(rows, cols))
        }
    };
    let structure = if a.scaled {
        scale_structure(&structure)?
    } else {
        structure
    };
    let var = marginal_variance_diag(&structure)?;
    let path = output_path(a.output, "penalty_variances.csv");
    let mut out = create(&path)?;
    write_variances(&mut out, &coords, &var)?;
    out.flush()?;
    println!(
        "K={} geometric_mean={} cv={} -> {}",
        var.len(),
        geometric_mean(&var),
        coefficient_of_variation(&var),
        path.display()
    );
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let raster = read_raster(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let obs = raster.to_observations();
    let grid = GeodesicGrid::new(a.nu)?;
    let mut cfg = BasisConfig::new(a.degree, a.nu)?;
    cfg.normalize_rows = !a.no_normalize;
    let hyper = Hyperparameters {
        hyper_a: a.hyper_a,
        hyper_b: a.hyper_b,
        tau_alpha: a.tau_alpha,
    };
    let (spec, y) = ModelSpec::from_observations(&grid, cfg, &obs, hyper)?;
    if y.is_empty() {
        bail!("the raster has no observed cells");
    }
    if !a.quiet {
        eprintln!(
            "n={} observed ({:.1}% missing), K={} knots, {} without data",
            y.len(),
            100.0 * raster.missing_fraction(),
            spec.knots(),
            spec.zero_coverage_knots().len()
        );
    }
    let gibbs = GibbsConfig {
        draws: a.draws,
        burnin: a.burnin,
        thin: a.thin,
        seed: a.seed,
        ..Default::default()
    };
    let total = a.burnin + a.draws * a.thin;
    let step = (total / 20).max(1);
    let quiet = a.quiet;
    let samples = gibbs_fit_with_progress(&y, &spec, &gibbs, |it| {
        if !quiet && ((it + 1) % step == 0 || it + 1 == total) {
            eprintln!("iteration {}/{}", it + 1, total);
        }
    })?;
    let path = output_path(a.output, "samples.csv");
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_samples(&path, &samples).with_context(|| format!("writing {}", path.display()))?;
    let sum = samples.summary();
    println!(
        "alpha={:.6} tau_beta={:.6} noise_sd={:.6} draws={} -> {}",
        sum.alpha.mean,
        sum.tau_beta.mean,
        samples.noise_sd_mean(),
        samples.draws(),
        path.display()
    );
    Ok(())
}

fn parse_raster_dims(s: &str) -> Result<(usize, usize)> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .with_context(|| format!("raster size {s:?} is not ROWSxCOLS"))?;
    let rows: usize = r.trim().parse().with_context(|| format!("bad row count in {s:?}"))?;
    let cols: usize = c.trim().parse().with_context(|| format!("bad column count in {s:?}"))?;
    if rows == 0 || cols == 0 {
        bail!("raster size {s:?} has no cells");
    }
    Ok((rows, cols))
}

fn predict(a: PredictArgs) -> Result<()> {
    let samples = read_samples(&a.samples).with_context(|| format!("reading {}", a.samples.display()))?;
    let meta = samples.meta;
    let nu = a.nu.unwrap_or(meta.grid_level);
    let degree = a.degree.unwrap_or(meta.degree);
    let grid = GeodesicGrid::new(nu)?;
    let mut cfg = BasisConfig::new(degree, nu)?;
    cfg.normalize_rows = meta.normalize_rows;

    let raster_header = a
        .raster
        .as_deref()
        .map(|s| parse_raster_dims(s).map(|(r, c)| RasterHeader::global(r, c, "")))
        .transpose()?;
    let locations = match (&raster_header, &a.locations) {
        (Some(h), _) => h.centroids(),
        (None, Some(p)) => read_locations(p).with_context(|| format!("reading {}", p.display()))?,
        (None, None) => bail!("one of --raster or --locations is required"),
    };
    let req = PredictionRequest {
        locations: &locations,
        samples: &samples,
        grid: &grid,
        basis: cfg,
        expected_kappa: None,
    };
    req.validate().context("samples do not match the requested grid and basis")?;
    let mut moments = field_moments(&req)?;
    if a.with_noise {
        let noise_var = samples.tau_eps.iter().map(|t| 1.0 / t).sum::<f64>() / samples.draws() as f64;
        moments.sd.iter_mut().for_each(|s| *s = (*s * *s + noise_var).sqrt());
    }
    let mean_path = output_path(a.output_mean, "mean.csv");
    let sd_path = output_path(a.output_sd, "sd.csv");
    for (path, values) in [(&mean_path, moments.mean), (&sd_path, moments.sd)] {
        match &raster_header {
            Some(h) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                write_raster(path, &RasterData::new(h.clone(), values))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => {
                let mut out = create(path)?;
                write_point_values(&mut out, &locations, &values)?;
                out.flush()?;
            }
        }
    }
    println!(
        "{} locations, {} draws -> {}, {}",
        locations.len(),
        samples.draws(),
        mean_path.display(),
        sd_path.display()
    );
    Ok(())
}

fn itcz(a: ItczArgs) -> Result<()> {
    let samples = read_samples(&a.samples).with_context(|| format!("reading {}", a.samples.display()))?;
    let meta = samples.meta;
    let grid = GeodesicGrid::new(meta.grid_level)?;
    let mut cfg = BasisConfig::new(meta.degree, meta.grid_level)?;
    cfg.normalize_rows = meta.normalize_rows;
    let detect = DetectConfig {
        width_km: a.width_km,
        meridian_length_km: a.meridian_km,
        lat_count: a.lat_count,
        meridian_count: a.meridian_count,
    };
    let map = band_probability(&samples, &grid, cfg, &detect)?;
    let path = output_path(a.output, "itcz.csv");
    let mut out = create(&path)?;
    write_band_probability(&mut out, &map)?;
    out.flush()?;
    println!(
        "{} meridians x {} latitudes, w={} -> {}",
        detect.meridian_count,
        detect.lat_count,
        detect.relative_width(),
        path.display()
    );
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let truth = match a.constant {
        Some(v) => Truth::Constant(v),
        None => Truth::Band {
            base: a.base,
            amplitude: a.amplitude,
            center_lat: a.center_lat,
            wobble: a.wobble,
            wavenumber: a.wavenumber,
            phase: 0.0,
            width: a.width,
        },
    };
    let spec = SynthSpec {
        truth,
        noise_sd: a.noise_sd,
        mask_fraction: a.mask_fraction,
        mask_pattern: match a.mask_pattern {
            MaskArg::Random => MaskPattern::Random,
            MaskArg::Block => MaskPattern::Block,
        },
        rows: a.rows,
        cols: a.cols,
        units: a.units,
    };
    if let Err(msg) = spec.validate() {
        bail!(msg);
    }
    let (obs, truth) = synth_generate(&spec, a.seed);
    let obs_path = output_path(a.output, "synth.csv");
    let truth_path = output_path(a.truth_output, "synth_truth.csv");
    for (path, r) in [(&obs_path, &obs), (&truth_path, &truth)] {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        write_raster(path, r).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{}x{} raster, {:.1}% missing -> {}, truth -> {}",
        spec.rows,
        spec.cols,
        100.0 * obs.missing_fraction(),
        obs_path.display(),
        truth_path.display()
    );
    Ok(())
}
