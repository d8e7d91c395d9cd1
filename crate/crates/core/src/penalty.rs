//! Intrinsic CAR structure matrices and their scaling.
//!
//! Every structure here is the graph Laplacian `R = D − A` of a connected
//! graph: diagonal entries are vertex degrees, off-diagonals are `−1` between
//! neighbours. `R` has rank `K − 1` with the constant vector spanning its null
//! space, so marginal variances use the Moore–Penrose inverse `R⁻`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cholesky::{SparseFactor, SymbolicCholesky};
use crate::grid::GeodesicGrid;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Largest dimension for which [`marginal_variance_diag`] uses the dense route.
pub const DENSE_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    /// ICAR on the geodesic grid adjacency.
    GeodesicIcar,
    /// Four-neighbour ICAR on a latitude/longitude lattice.
    PlanarNaive,
    /// Lattice whose longitude direction wraps around (circular first-order walk).
    CircularLon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    pub matrix: SparseMatrix,
    pub kind: StructureKind,
    pub scaled: bool,
    /// Factor applied to the unscaled structure; 1 when unscaled.
    pub kappa: f64,
}

impl StructureMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `−(τ/2) βᵀRβ`, the log-density up to a constant.
    pub fn log_density_kernel(&self, beta: &[f64], tau: f64) -> f64 {
        -0.5 * tau * self.matrix.quadratic_form(beta)
    }
}

/// Laplacian of an undirected graph given as neighbour lists.
pub fn laplacian(adjacency: &[Vec<u32>]) -> SparseMatrix {
    let n = adjacency.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for (i, nbrs) in adjacency.iter().enumerate() {
        let mut row: Vec<(usize, f64)> = nbrs.iter().map(|&j| (j as usize, -1.0)).collect();
        row.push((i, nbrs.len() as f64));
        row.sort_unstable_by_key(|&(c, _)| c);
        for (c, v) in row {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    SparseMatrix::from_csr(n, n, row_ptr, col_idx, values).expect("valid laplacian")
}

/// ICAR structure on the geodesic grid; diagonals are 5 at the twelve
/// icosahedron vertices and 6 elsewhere.
pub fn icar_structure(grid: &GeodesicGrid) -> StructureMatrix {
    StructureMatrix {
        matrix: laplacian(grid.adjacency()),
        kind: StructureKind::GeodesicIcar,
        scaled: false,
        kappa: 1.0,
    }
}

/// First-order random-walk structure on a path (`circular = false`) or cycle.
pub fn rw1_structure(n: usize, circular: bool) -> SparseMatrix {
    let adjacency: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut nb = Vec::new();
            if i > 0 {
                nb.push(i as u32 - 1);
            } else if circular {
                nb.push(n as u32 - 1);
            }
            if i + 1 < n {
                nb.push(i as u32 + 1);
            } else if circular {
                nb.push(0);
            }
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();
    laplacian(&adjacency)
}

/// Kronecker-sum lattice structure `I_L ⊗ R_lon + R_lat ⊗ I_Q`.
///
/// Knot `l * q_count + q` sits at latitude row `l` and longitude column `q`.
pub fn planar_structure(
    lat_count: usize,
    lon_count: usize,
    circular_longitude: bool,
) -> Result<StructureMatrix> {
    if lat_count < 3 || lon_count < 3 {
        return Err(Error::InvalidArgument("lattice dimensions must be at least 3"));
    }
    let r_lon = rw1_structure(lon_count, circular_longitude);
    let r_lat = rw1_structure(lat_count, false);
    let matrix = SparseMatrix::identity(lat_count)
        .kron(&r_lon)
        .add(&r_lat.kron(&SparseMatrix::identity(lon_count)))?;
    Ok(StructureMatrix {
        matrix,
        kind: if circular_longitude {
            StructureKind::CircularLon
        } else {
            StructureKind::PlanarNaive
        },
        scaled: false,
        kappa: 1.0,
    })
}

fn check_null_space(r: &SparseMatrix) -> Result<()> {
    if r.rows() != r.cols() || r.rows() < 2 {
        return Err(Error::DimensionMismatch("structure must be square with K >= 2"));
    }
    let tol = 1e-10 * r.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if r.row_sums().iter().any(|s| s.abs() > tol) {
        return Err(Error::InvalidArgument("structure rows do not sum to zero"));
    }
    Ok(())
}

/// Diagonal of the generalized inverse `R⁻` (Moore–Penrose, i.e. the
/// sum-to-zero identification). Dense for `K ≤ DENSE_LIMIT`, sparse otherwise.
pub fn marginal_variance_diag(r: &StructureMatrix) -> Result<Vec<f64>> {
    if r.dim() <= DENSE_LIMIT {
        marginal_variance_dense(&r.matrix)
    } else {
        marginal_variance_sparse(&r.matrix)
    }
}

/// Dense route: `R⁻ = (R + 11ᵀ/K)⁻¹ − 11ᵀ/K`.
///
/// The rank-one completion replaces the zero eigenvalue of the constant
/// direction by one, so a second zero eigenvalue shows up as a failed pivot.
pub fn marginal_variance_dense(r: &SparseMatrix) -> Result<Vec<f64>> {
    check_null_space(r)?;
    let k = r.rows();
    let inv_k = 1.0 / k as f64;
    let mut m = vec![inv_k; k * k];
    for (i, j, v) in r.triplets() {
        m[i * k + j] += v;
    }
    // in-place lower Cholesky
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for j in 0..k {
        let mut d = m[j * k + j];
        for p in 0..j {
            d -= m[j * k + p] * m[j * k + p];
        }
        if !(d > 1e-10 * scale) {
            return Err(Error::RankDeficient);
        }
        let d = libm::sqrt(d);
        m[j * k + j] = d;
        for i in j + 1..k {
            let mut v = m[i * k + j];
            for p in 0..j {
                v -= m[i * k + p] * m[j * k + p];
            }
            m[i * k + j] = v / d;
        }
    }
    // diag(M⁻¹)_i = ‖L⁻¹ e_i‖²
    let mut out = vec![0.0; k];
    let mut x = vec![0.0; k];
    for i in 0..k {
        x[i..].iter_mut().for_each(|v| *v = 0.0);
        x[i] = 1.0;
        let mut sum = 0.0;
        for row in i..k {
            let mut v = x[row];
            for p in i..row {
                v -= m[row * k + p] * x[p];
            }
            v /= m[row * k + row];
            x[row] = v;
            sum += v * v;
        }
        out[i] = sum - inv_k;
    }
    Ok(out)
}

/// Sparse route: invert `R` with its last coefficient fixed at zero,
/// `Σ₀ = [R₀⁻¹ 0; 0 0]`, then project onto the sum-to-zero subspace,
/// `diag(PΣ₀P)_i = Σ₀,ii − 2(Σ₀1)_i/K + (1ᵀΣ₀1)/K²`.
pub fn marginal_variance_sparse(r: &SparseMatrix) -> Result<Vec<f64>> {
    check_null_space(r)?;
    let k = r.rows();
    let last = k - 1;
    let reduced = SparseMatrix::from_triplets(
        last,
        last,
        r.triplets().filter(|&(i, j, _)| i < last && j < last),
    )?;
    let symbolic = SymbolicCholesky::analyze(&reduced, Default::default())?;
    let factor = SparseFactor::new(symbolic, &reduced).map_err(|e| match e {
        Error::NonPositivePivot { .. } => Error::RankDeficient,
        other => other,
    })?;
    let mut row_sums = factor.solve(&vec![1.0; last]);
    row_sums.push(0.0);
    let total: f64 = row_sums.iter().sum();
    let mut diag = factor.inverse_diagonal();
    diag.push(0.0);
    let kf = k as f64;
    Ok(diag
        .iter()
        .zip(&row_sums)
        .map(|(&d, &s)| d - 2.0 * s / kf + total / (kf * kf))
        .collect())
}

/// Geometric mean of positive values.
pub fn geometric_mean(values: &[f64]) -> f64 {
    let s: f64 = values.iter().map(|&v| libm::log(v)).sum();
    libm::exp(s / values.len() as f64)
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    libm::sqrt(var) / mean
}

/// Returns `κR` with `κ` the geometric mean of `diag(R⁻)`, so the scaled
/// structure has unit geometric-mean marginal variance.
pub fn scale_structure(r: &StructureMatrix) -> Result<StructureMatrix> {
    let diag = marginal_variance_diag(r)?;
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::NonPositiveVariance { index, value });
    }
    let kappa = geometric_mean(&diag);
    let mut matrix = r.matrix.clone();
    matrix.scale(kappa);
    Ok(StructureMatrix {
        matrix,
        kind: r.kind,
        scaled: true,
        kappa: r.kappa * kappa,
    })
}
