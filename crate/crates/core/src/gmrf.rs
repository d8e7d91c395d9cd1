//! Exact sampling of Gaussian Markov random fields in canonical form.
//!
//! A field with precision `Q` and information vector `b` has mean `Q⁻¹b`.
//! With `P Q Pᵀ = L Lᵀ`, a draw is `Pᵀ L⁻ᵀ (L⁻¹ P b + z)` with `z` standard
//! normal: one forward and one backward triangular solve. A single linear
//! constraint `aᵀx = 0` is imposed afterwards by conditioning by kriging.
//!
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat) driven by
//! whatever generator the caller passes; the sampler never seeds on its own.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cholesky::SparseFactor;
use crate::{Error, Result};

/// Draws `x ~ N(Q⁻¹ b, Q⁻¹)` for the factorized precision `Q`.
pub fn sample_gaussian<R: Rng + ?Sized>(b: &[f64], factor: &SparseFactor, rng: &mut R) -> Vec<f64> {
    assert_eq!(b.len(), factor.dim(), "sample_gaussian dimension");
    let mut w = factor.permute(b);
    factor.solve_lower_in_place(&mut w);
    for v in &mut w {
        *v += rng.sample::<f64, _>(StandardNormal);
    }
    factor.solve_upper_in_place(&mut w);
    factor.unpermute(&w)
}

/// Precomputed pieces for conditioning on `aᵀx = 0` under one precision matrix.
#[derive(Debug, Clone)]
pub struct Kriging {
    a: Vec<f64>,
    q_inv_a: Vec<f64>,
    a_q_inv_a: f64,
}

impl Kriging {
    pub fn new(a: &[f64], factor: &SparseFactor) -> Result<Self> {
        if a.len() != factor.dim() {
            return Err(Error::DimensionMismatch("constraint vector length"));
        }
        if a.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidArgument("constraint vector is zero"));
        }
        let q_inv_a = factor.solve(a);
        let a_q_inv_a = dot(a, &q_inv_a);
        if !(a_q_inv_a > 0.0) {
            return Err(Error::ConstraintBreakdown(a_q_inv_a));
        }
        Ok(Self {
            a: a.to_vec(),
            q_inv_a,
            a_q_inv_a,
        })
    }

    /// `x ← x − Q⁻¹a (aᵀQ⁻¹a)⁻¹ aᵀx`.
    pub fn apply(&self, x: &mut [f64]) {
        let t = dot(&self.a, x) / self.a_q_inv_a;
        for (x, c) in x.iter_mut().zip(&self.q_inv_a) {
            *x -= c * t;
        }
    }

    /// `|aᵀx|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        dot(&self.a, x).abs()
    }

    /// Tolerance `1e-9 ‖a‖ ‖x‖` on the constraint residual.
    pub fn tolerance(&self, x: &[f64]) -> f64 {
        1e-9 * libm::sqrt(dot(&self.a, &self.a)) * libm::sqrt(dot(x, x))
    }
}

/// Corrects a draw from `N(μ, Q⁻¹)` so that `aᵀx* = 0` while keeping the
/// conditional law of `x` given `aᵀx = 0`.
pub fn constrain(x: &[f64], a: &[f64], factor: &SparseFactor) -> Result<Vec<f64>> {
    if x.len() != a.len() {
        return Err(Error::DimensionMismatch("constraint vector length"));
    }
    let k = Kriging::new(a, factor)?;
    let mut out = x.to_vec();
    k.apply(&mut out);
    Ok(out)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
