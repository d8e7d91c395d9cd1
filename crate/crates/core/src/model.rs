//! The hierarchical model and its Gibbs sampler.
//!
//! ```text
//! y | α, β, τ_ε  ~ N(α1 + Bβ, τ_ε⁻¹ I)
//! α             ~ N(0, τ_α⁻¹)              (τ_α fixed)
//! β | τ_β       ~ ICAR(τ_β R*)             subject to 1ᵀBβ = 0
//! τ_β, τ_ε      ~ Ga(a, b)                 (shape a, rate b)
//! ```
//!
//! Each iteration updates α, β, τ_β and τ_ε in that order. The β update
//! draws from the Gaussian with precision `τ_ε BᵀB + τ_β R*` and information
//! `τ_ε Bᵀ(y − α1)`, then conditions on `aᵀβ = 0` with `a = Bᵀ1`.
//!
//! Randomness comes from `ChaCha20Rng::seed_from_u64(seed)` on stream 0;
//! independent chains of the same seed use [`GibbsConfig::stream`].

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::basis::{assemble_basis, BasisConfig};
use crate::cholesky::{SparseFactor, SymbolicCholesky};
use crate::gmrf::{dot, sample_gaussian, Kriging};
use crate::grid::GeodesicGrid;
use crate::penalty::{icar_structure, scale_structure, StructureMatrix};
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Prior settings shared by both precisions, plus the fixed intercept precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub hyper_a: f64,
    pub hyper_b: f64,
    pub tau_alpha: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            hyper_a: 1.0,
            hyper_b: 5e-5,
            tau_alpha: 1e-6,
        }
    }
}

/// Point observations with a missing-value mask.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observations {
    /// `(latitude, longitude)` in degrees.
    pub locations: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
}

impl Observations {
    /// Observed locations and values, missing entries dropped.
    pub fn observed(&self) -> (Vec<(f64, f64)>, Vec<f64>) {
        self.locations
            .iter()
            .zip(&self.values)
            .zip(&self.missing)
            .filter(|(_, &m)| !m)
            .map(|((&l, &v), _)| (l, v))
            .unzip()
    }

    pub fn missing_fraction(&self) -> f64 {
        if self.missing.is_empty() {
            return 0.0;
        }
        self.missing.iter().filter(|&&m| m).count() as f64 / self.missing.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    basis: SparseMatrix,
    basis_config: BasisConfig,
    structure: StructureMatrix,
    hyper: Hyperparameters,
}

impl ModelSpec {
    pub fn new(
        basis: SparseMatrix,
        basis_config: BasisConfig,
        structure: StructureMatrix,
        hyper: Hyperparameters,
    ) -> Result<Self> {
        if !structure.scaled {
            return Err(Error::InvalidArgument("structure matrix must be scaled"));
        }
        if !(hyper.hyper_a > 0.0 && hyper.hyper_b > 0.0 && hyper.tau_alpha > 0.0) {
            return Err(Error::InvalidArgument("hyperparameters must be positive"));
        }
        if basis.cols() != structure.dim() {
            return Err(Error::DimensionMismatch("basis columns vs structure size"));
        }
        Ok(Self {
            basis,
            basis_config,
            structure,
            hyper,
        })
    }

    /// Builds B at the observed locations and the scaled geodesic ICAR
    /// structure; returns the spec with the observed values.
    pub fn from_observations(
        grid: &GeodesicGrid,
        basis_config: BasisConfig,
        obs: &Observations,
        hyper: Hyperparameters,
    ) -> Result<(Self, Vec<f64>)> {
        let (locations, y) = obs.observed();
        let basis = assemble_basis(&locations, grid, &basis_config)?;
        let structure = scale_structure(&icar_structure(grid))?;
        Ok((Self::new(basis, basis_config, structure, hyper)?, y))
    }

    pub fn basis(&self) -> &SparseMatrix {
        &self.basis
    }

    pub fn basis_config(&self) -> &BasisConfig {
        &self.basis_config
    }

    pub fn structure(&self) -> &StructureMatrix {
        &self.structure
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    pub fn knots(&self) -> usize {
        self.basis.cols()
    }

    /// Knots whose basis column has no data; they are informed by the prior only.
    pub fn zero_coverage_knots(&self) -> Vec<usize> {
        let mut covered = vec![false; self.knots()];
        for (_, c, v) in self.basis.triplets() {
            if v != 0.0 {
                covered[c] = true;
            }
        }
        (0..self.knots()).filter(|&k| !covered[k]).collect()
    }

    /// `a = Bᵀ1`, the constraint vector of `1ᵀBβ = 0`.
    pub fn constraint_vector(&self) -> Vec<f64> {
        self.basis.transpose_mul_vec(&vec![1.0; self.n()])
    }

    fn check_y(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n() {
            return Err(Error::DimensionMismatch("observation count vs basis rows"));
        }
        Ok(())
    }
}

/// Gamma distribution in shape/rate form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Gamma::new(self.shape, 1.0 / self.rate)
            .expect("positive gamma parameters")
            .sample(rng)
    }
}

/// Precision `Q = τ_ε BᵀB + τ_β R*` and information `b = τ_ε Bᵀ(y − α1)` of β.
pub fn full_conditional_beta(
    y: &[f64],
    alpha: f64,
    tau_beta: f64,
    tau_eps: f64,
    spec: &ModelSpec,
) -> Result<(SparseMatrix, Vec<f64>)> {
    spec.check_y(y)?;
    if !(tau_beta > 0.0 && tau_eps > 0.0) {
        return Err(Error::InvalidArgument("precisions must be positive"));
    }
    let mut btb = spec.basis.gram();
    btb.scale(tau_eps);
    let mut r = spec.structure.matrix.clone();
    r.scale(tau_beta);
    let q = btb.add(&r)?;
    let centered: Vec<f64> = y.iter().map(|v| v - alpha).collect();
    let mut b = spec.basis.transpose_mul_vec(&centered);
    b.iter_mut().for_each(|v| *v *= tau_eps);
    Ok((q, b))
}

/// Mean and variance of α given the rest.
pub fn full_conditional_alpha(y: &[f64], beta: &[f64], tau_eps: f64, spec: &ModelSpec) -> (f64, f64) {
    let fitted = spec.basis.mul_vec(beta);
    let resid: f64 = y.iter().zip(&fitted).map(|(y, f)| y - f).sum();
    alpha_conditional(resid, y.len(), tau_eps, spec.hyper.tau_alpha)
}

fn alpha_conditional(resid_sum: f64, n: usize, tau_eps: f64, tau_alpha: f64) -> (f64, f64) {
    let var = 1.0 / (tau_alpha + n as f64 * tau_eps);
    (var * tau_eps * resid_sum, var)
}

/// `Ga(a + (K−1)/2, b + βᵀR*β/2)`.
pub fn full_conditional_tau_beta(beta: &[f64], spec: &ModelSpec) -> GammaParams {
    let k = spec.knots() as f64;
    GammaParams {
        shape: spec.hyper.hyper_a + 0.5 * (k - 1.0),
        rate: spec.hyper.hyper_b + 0.5 * spec.structure.matrix.quadratic_form(beta),
    }
}

/// `Ga(a + n/2, b + ‖y − α1 − Bβ‖²/2)`.
pub fn full_conditional_tau_eps(y: &[f64], alpha: f64, beta: &[f64], spec: &ModelSpec) -> GammaParams {
    let fitted = spec.basis.mul_vec(beta);
    GammaParams {
        shape: spec.hyper.hyper_a + 0.5 * y.len() as f64,
        rate: spec.hyper.hyper_b + 0.5 * sum_sq_resid(y, alpha, &fitted),
    }
}

fn sum_sq_resid(y: &[f64], alpha: f64, fitted: &[f64]) -> f64 {
    y.iter()
        .zip(fitted)
        .map(|(y, f)| {
            let e = y - alpha - f;
            e * e
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Stored draws `G`.
    pub draws: usize,
    pub burnin: usize,
    /// Keep every `thin`-th post-burn-in iteration.
    pub thin: usize,
    pub seed: u64,
    /// ChaCha stream, for independent chains sharing a seed.
    pub stream: u64,
    /// Hold τ_β at this value instead of sampling it.
    pub fixed_tau_beta: Option<f64>,
    /// Hold τ_ε at this value instead of sampling it.
    pub fixed_tau_eps: Option<f64>,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            draws: 5000,
            burnin: 500,
            thin: 1,
            seed: 0,
            stream: 0,
            fixed_tau_beta: None,
            fixed_tau_eps: None,
        }
    }
}

/// Metadata stored with the draws; prediction checks it against its own setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMetadata {
    pub grid_level: u32,
    pub degree: u32,
    pub normalize_rows: bool,
    pub kappa: f64,
    pub knots: usize,
    pub n_obs: usize,
    pub seed: u64,
    pub burnin: usize,
    pub thin: usize,
    pub hyper: Hyperparameters,
}

/// Stored posterior draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub meta: SampleMetadata,
    pub alpha: Vec<f64>,
    pub tau_beta: Vec<f64>,
    pub tau_eps: Vec<f64>,
    /// Row-major `G x K`.
    pub beta: Vec<f64>,
}

/// Posterior mean and central 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub q025: f64,
    pub q975: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut s = values.to_vec();
        s.sort_unstable_by(f64::total_cmp);
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q025: quantile_sorted(&s, 0.025),
            q975: quantile_sorted(&s, 0.975),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub alpha: Summary,
    pub tau_beta: Summary,
    pub tau_eps: Summary,
    pub beta: Vec<Summary>,
}

impl PosteriorSamples {
    pub fn draws(&self) -> usize {
        self.alpha.len()
    }

    pub fn knots(&self) -> usize {
        self.meta.knots
    }

    pub fn beta(&self, g: usize) -> &[f64] {
        let k = self.meta.knots;
        &self.beta[g * k..(g + 1) * k]
    }

    pub fn summary(&self) -> PosteriorSummary {
        let k = self.knots();
        let g = self.draws();
        let mut column = vec![0.0; g];
        let beta = (0..k)
            .map(|j| {
                for (d, c) in column.iter_mut().enumerate() {
                    *c = self.beta[d * k + j];
                }
                Summary::of(&column)
            })
            .collect();
        PosteriorSummary {
            alpha: Summary::of(&self.alpha),
            tau_beta: Summary::of(&self.tau_beta),
            tau_eps: Summary::of(&self.tau_eps),
            beta,
        }
    }

    /// Posterior mean of `τ_ε^{-1/2}`, the noise standard deviation.
    pub fn noise_sd_mean(&self) -> f64 {
        self.tau_eps.iter().map(|t| 1.0 / libm::sqrt(*t)).sum::<f64>() / self.draws() as f64
    }
}

/// Current values of all parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub tau_beta: f64,
    pub tau_eps: f64,
}

/// A Gibbs sampler bound to one model and data vector.
///
/// The sparsity pattern of the β precision is analysed once; each iteration
/// only refactorizes numerically.
#[derive(Debug)]
pub struct GibbsSampler<'a> {
    spec: &'a ModelSpec,
    y: &'a [f64],
    q: SparseMatrix,
    btb_vals: Vec<f64>,
    r_vals: Vec<f64>,
    bty: Vec<f64>,
    a: Vec<f64>,
    y_sum: f64,
    factor: SparseFactor,
    fitted: Vec<f64>,
    pub state: GibbsState,
    fixed_tau_beta: Option<f64>,
    fixed_tau_eps: Option<f64>,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(
        spec: &'a ModelSpec,
        y: &'a [f64],
        fixed_tau_beta: Option<f64>,
        fixed_tau_eps: Option<f64>,
    ) -> Result<Self> {
        spec.check_y(y)?;
        if y.is_empty() {
            return Err(Error::InvalidArgument("no observations"));
        }
        if let Some(p) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(p));
        }
        for t in [fixed_tau_beta, fixed_tau_eps].into_iter().flatten() {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument("fixed precision must be positive"));
            }
        }
        let btb = spec.basis.gram();
        let r = &spec.structure.matrix;
        let mut q = SparseMatrix::from_triplets(
            btb.rows(),
            btb.cols(),
            btb.triplets().chain(r.triplets()).map(|(i, j, _)| (i, j, 0.0)),
        )?;
        let (btb_vals, r_vals): (Vec<f64>, Vec<f64>) = q
            .triplets()
            .map(|(i, j, _)| (btb.get(i, j), r.get(i, j)))
            .unzip();

        let n = y.len() as f64;
        let y_sum: f64 = y.iter().sum();
        let mean = y_sum / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let state = GibbsState {
            alpha: mean,
            beta: vec![0.0; spec.knots()],
            tau_beta: fixed_tau_beta.unwrap_or(1.0),
            tau_eps: fixed_tau_eps.unwrap_or(if var > 0.0 { 1.0 / var } else { 1.0 }),
        };
        fill_precision(&mut q, &btb_vals, &r_vals, state.tau_beta, state.tau_eps);
        let symbolic = SymbolicCholesky::analyze(&q, Default::default())?;
        let factor = SparseFactor::new(symbolic, &q)?;
        Ok(Self {
            spec,
            y,
            bty: spec.basis.transpose_mul_vec(y),
            a: spec.constraint_vector(),
            q,
            btb_vals,
            r_vals,
            y_sum,
            factor,
            fitted: vec![0.0; y.len()],
            state,
            fixed_tau_beta,
            fixed_tau_eps,
        })
    }

    /// One sweep α → β → τ_β → τ_ε.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, iteration: usize) -> Result<()> {
        let spec = self.spec;
        let hyper = spec.hyper;
        let n = self.y.len();

        // α | β, τ_ε ; 1ᵀBβ = aᵀβ
        let (mean, var) = alpha_conditional(
            self.y_sum - dot(&self.a, &self.state.beta),
            n,
            self.state.tau_eps,
            hyper.tau_alpha,
        );
        let z: f64 = rng.sample(StandardNormal);
        self.state.alpha = mean + libm::sqrt(var) * z;
        check_finite(self.state.alpha, iteration, "alpha")?;

        // β | α, τ_β, τ_ε, subject to aᵀβ = 0
        let (tb, te) = (self.state.tau_beta, self.state.tau_eps);
        fill_precision(&mut self.q, &self.btb_vals, &self.r_vals, tb, te);
        self.factor.refactorize(&self.q)?;
        let b: Vec<f64> = self
            .bty
            .iter()
            .zip(&self.a)
            .map(|(bty, a)| te * (bty - self.state.alpha * a))
            .collect();
        let mut beta = sample_gaussian(&b, &self.factor, rng);
        let kriging = Kriging::new(&self.a, &self.factor)?;
        kriging.apply(&mut beta);
        let residual = kriging.residual(&beta);
        debug_assert!(residual <= kriging.tolerance(&beta).max(1e-12));
        if !(residual < 1e-6 * n as f64) {
            return Err(Error::ConstraintViolation {
                iteration,
                residual,
            });
        }
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDraw {
                iteration,
                parameter: "beta",
            });
        }
        self.state.beta = beta;

        // τ_β | β
        if let Some(t) = self.fixed_tau_beta {
            self.state.tau_beta = t;
        } else {
            self.state.tau_beta = full_conditional_tau_beta(&self.state.beta, spec).sample(rng);
            check_positive(self.state.tau_beta, iteration, "tau_beta")?;
        }

        // τ_ε | α, β
        if let Some(t) = self.fixed_tau_eps {
            self.state.tau_eps = t;
        } else {
            self.fitted = spec.basis.mul_vec(&self.state.beta);
            let rate = hyper.hyper_b + 0.5 * sum_sq_resid(self.y, self.state.alpha, &self.fitted);
            let params = GammaParams {
                shape: hyper.hyper_a + 0.5 * n as f64,
                rate,
            };
            self.state.tau_eps = params.sample(rng);
            check_positive(self.state.tau_eps, iteration, "tau_eps")?;
        }
        Ok(())
    }

    pub fn factor(&self) -> &SparseFactor {
        &self.factor
    }
}

fn fill_precision(q: &mut SparseMatrix, btb: &[f64], r: &[f64], tau_beta: f64, tau_eps: f64) {
    for ((q, b), r) in q.values_mut().iter_mut().zip(btb).zip(r) {
        *q = tau_eps * b + tau_beta * r;
    }
}

fn check_finite(v: f64, iteration: usize, parameter: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteDraw {
            iteration,
            parameter,
        })
    }
}

fn check_positive(v: f64, iteration: usize, parameter: &'static str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::NonFiniteDraw {
            iteration,
            parameter,
        })
    }
}

/// Runs the sampler: `burnin` discarded sweeps, then `draws * thin` sweeps
/// keeping every `thin`-th.
pub fn gibbs_fit(y: &[f64], spec: &ModelSpec, cfg: &GibbsConfig) -> Result<PosteriorSamples> {
    gibbs_fit_with_progress(y, spec, cfg, |_| {})
}

/// As [`gibbs_fit`], calling `progress(iteration)` after every sweep.
pub fn gibbs_fit_with_progress(
    y: &[f64],
    spec: &ModelSpec,
    cfg: &GibbsConfig,
    mut progress: impl FnMut(usize),
) -> Result<PosteriorSamples> {
    if cfg.draws == 0 {
        return Err(Error::InvalidArgument("at least one draw is required"));
    }
    if cfg.thin == 0 {
        return Err(Error::InvalidArgument("thinning must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);
    let mut sampler = GibbsSampler::new(spec, y, cfg.fixed_tau_beta, cfg.fixed_tau_eps)?;
    let k = spec.knots();
    let mut out = PosteriorSamples {
        meta: SampleMetadata {
            grid_level: spec.basis_config.grid_level,
            degree: spec.basis_config.degree,
            normalize_rows: spec.basis_config.normalize_rows,
            kappa: spec.structure.kappa,
            knots: k,
            n_obs: y.len(),
            seed: cfg.seed,
            burnin: cfg.burnin,
            thin: cfg.thin,
            hyper: spec.hyper,
        },
        alpha: Vec::with_capacity(cfg.draws),
        tau_beta: Vec::with_capacity(cfg.draws),
        tau_eps: Vec::with_capacity(cfg.draws),
        beta: Vec::with_capacity(cfg.draws * k),
    };
    let total = cfg.burnin + cfg.draws * cfg.thin;
    for it in 0..total {
        sampler.step(&mut rng, it)?;
        if it >= cfg.burnin && (it - cfg.burnin + 1) % cfg.thin == 0 {
            let s = &sampler.state;
            out.alpha.push(s.alpha);
            out.tau_beta.push(s.tau_beta);
            out.tau_eps.push(s.tau_eps);
            out.beta.extend_from_slice(&s.beta);
        }
        progress(it);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::assemble_basis_points;
    use crate::geom::Vec3;

    fn toy_spec(n: usize) -> (ModelSpec, Vec<f64>) {
        let grid = GeodesicGrid::new(0).unwrap();
        let cfg = BasisConfig {
            degree: 1,
            normalize_rows: true,
            grid_level: 0,
        };
        let points: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = i as f64 + 0.5;
                let z = 1.0 - 2.0 * t / n as f64;
                let r = libm::sqrt(1.0 - z * z);
                let phi = 2.399963229728653 * t;
                Vec3::new(r * libm::cos(phi), r * libm::sin(phi), z)
            })
            .collect();
        let b = assemble_basis_points(&points, &grid, &cfg).unwrap();
        let r = scale_structure(&icar_structure(&grid)).unwrap();
        let y = points.iter().map(|p| 2.0 + p.z + 0.3 * p.x).collect();
        (ModelSpec::new(b, cfg, r, Hyperparameters::default()).unwrap(), y)
    }

    #[test]
    fn unscaled_structure_rejected() {
        let grid = GeodesicGrid::new(0).unwrap();
        let cfg = BasisConfig::new(1, 0).unwrap();
        let b = assemble_basis(&[(0.0, 0.0)], &grid, &cfg).unwrap();
        let r = icar_structure(&grid);
        assert!(ModelSpec::new(b, cfg, r, Hyperparameters::default()).is_err());
    }

    #[test]
    fn tau_conditionals_at_null_space() {
        let (spec, _) = toy_spec(20);
        let h = spec.hyper;
        let zero = full_conditional_tau_beta(&[0.0; 12], &spec);
        assert_eq!(zero, GammaParams { shape: h.hyper_a + 5.5, rate: h.hyper_b });
        let flat = full_conditional_tau_beta(&[3.0; 12], &spec);
        assert_eq!(flat.shape, zero.shape);
        assert!((flat.rate - h.hyper_b).abs() < 1e-12);
    }

    #[test]
    fn tau_eps_perfect_fit() {
        let (spec, _) = toy_spec(20);
        let beta = [0.0; 12];
        let y = vec![1.5; 20];
        let g = full_conditional_tau_eps(&y, 1.5, &beta, &spec);
        assert_eq!(g.shape, spec.hyper.hyper_a + 10.0);
        assert_eq!(g.rate, spec.hyper.hyper_b);
    }

    #[test]
    fn alpha_conditional_limits() {
        let (spec, y) = toy_spec(20);
        let (m, v) = full_conditional_alpha(&y, &[0.0; 12], 4.0, &spec);
        let ybar = y.iter().sum::<f64>() / 20.0;
        assert!((m - ybar).abs() < 1e-6);
        assert!((v - 1.0 / (1e-6 + 80.0)).abs() < 1e-15);
        // y = Bβ exactly
        let beta: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        let y2 = spec.basis().mul_vec(&beta);
        let (m2, _) = full_conditional_alpha(&y2, &beta, 4.0, &spec);
        assert!(m2.abs() < 1e-12);
    }

    #[test]
    fn centered_data_gives_zero_information() {
        let (spec, _) = toy_spec(20);
        let y = vec![3.0; 20];
        let (_, b) = full_conditional_beta(&y, 3.0, 1.0, 1.0, &spec).unwrap();
        assert!(b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let (spec, y) = toy_spec(20);
        let cfg = GibbsConfig {
            draws: 0,
            ..Default::default()
        };
        assert!(gibbs_fit(&y, &spec, &cfg).is_err());
        assert!(gibbs_fit(&[], &spec, &GibbsConfig::default()).is_err());
    }

    #[test]
    fn draws_satisfy_constraint_and_are_deterministic() {
        let (spec, y) = toy_spec(30);
        let cfg = GibbsConfig {
            draws: 50,
            burnin: 10,
            seed: 11,
            ..Default::default()
        };
        let s1 = gibbs_fit(&y, &spec, &cfg).unwrap();
        let s2 = gibbs_fit(&y, &spec, &cfg).unwrap();
        assert_eq!(s1, s2);
        let a = spec.constraint_vector();
        for g in 0..s1.draws() {
            assert!(dot(&a, s1.beta(g)).abs() < 1e-6 * 30.0);
            assert!(s1.tau_beta[g] > 0.0 && s1.tau_eps[g] > 0.0);
        }
        let other = gibbs_fit(&y, &spec, &GibbsConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(s1.alpha, other.alpha);
    }

    #[test]
    fn thinning_keeps_requested_count() {
        let (spec, y) = toy_spec(30);
        let cfg = GibbsConfig {
            draws: 7,
            burnin: 3,
            thin: 4,
            seed: 1,
            ..Default::default()
        };
        let mut calls = 0;
        let s = gibbs_fit_with_progress(&y, &spec, &cfg, |_| calls += 1).unwrap();
        assert_eq!(s.draws(), 7);
        assert_eq!(s.beta.len(), 7 * 12);
        assert_eq!(calls, 3 + 28);
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.5), 2.0);
        assert_eq!(quantile_sorted(&s, 0.025), 0.1);
        let sum = Summary::of(&[4.0, 0.0, 2.0, 1.0, 3.0]);
        assert_eq!(sum.mean, 2.0);
    }
}
