//! B-spline bases on the geodesic grid.
//!
//! A point projected onto the icomesh lies in one planar triangle, so only
//! the three splines centred at that triangle's knots are non-zero there.
//! Their values are the Bernstein-polynomial sums
//!
//! | degree | entry for knot `j` |
//! |--------|--------------------|
//! | 1      | `b_j`              |
//! | 2      | `b_j² + b_j`       |
//! | 3      | `b_j³ + b_j² + b_j`|
//!
//! in the barycentric coordinates `b_j`. For degrees 2 and 3 these entries do
//! not sum to one, so rows are divided by their sum unless
//! [`BasisConfig::normalize_rows`] is switched off.

use alloc::vec::Vec;

pub use crate::geom::barycentric;
use crate::geom::Vec3;
use crate::grid::GeodesicGrid;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisConfig {
    pub degree: u32,
    pub normalize_rows: bool,
    pub grid_level: u32,
}

impl BasisConfig {
    pub fn new(degree: u32, grid_level: u32) -> Result<Self> {
        let cfg = Self {
            degree,
            normalize_rows: true,
            grid_level,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.degree) {
            return Err(Error::InvalidDegree(self.degree));
        }
        Ok(())
    }
}

/// Raw (unnormalized) non-zero basis entries for the given barycentric coordinates.
pub fn bernstein_entries(bary: [f64; 3], degree: u32) -> Result<[f64; 3]> {
    let f: fn(f64) -> f64 = match degree {
        1 => |b| b,
        2 => |b| b * b + b,
        3 => |b| b * b * b + b * b + b,
        d => return Err(Error::InvalidDegree(d)),
    };
    Ok(bary.map(f))
}

/// The three structural non-zeros of one basis row as `(column, value)`, by column.
pub fn basis_row(point: Vec3, grid: &GeodesicGrid, cfg: &BasisConfig) -> Result<[(usize, f64); 3]> {
    cfg.validate()?;
    if cfg.grid_level != grid.level() {
        return Err(Error::DimensionMismatch("basis grid level differs from grid"));
    }
    let loc = grid.locate(point)?;
    let mut e = bernstein_entries(loc.barycentric, cfg.degree)?;
    if cfg.normalize_rows {
        let s: f64 = e.iter().sum();
        e = e.map(|x| x / s);
    }
    let mut row = [
        (loc.vertex_ids[0], e[0]),
        (loc.vertex_ids[1], e[1]),
        (loc.vertex_ids[2], e[2]),
    ];
    row.sort_unstable_by_key(|&(c, _)| c);
    Ok(row)
}

/// Basis matrix (n x K) for points on the unit sphere.
pub fn assemble_basis_points(
    points: &[Vec3],
    grid: &GeodesicGrid,
    cfg: &BasisConfig,
) -> Result<SparseMatrix> {
    let n = points.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(3 * n);
    let mut values = Vec::with_capacity(3 * n);
    row_ptr.push(0);
    for &p in points {
        for (c, v) in basis_row(p, grid, cfg)? {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    SparseMatrix::from_csr(n, grid.knot_count(), row_ptr, col_idx, values)
}

/// Basis matrix (n x K) for `(latitude, longitude)` pairs in degrees.
pub fn assemble_basis(
    locations: &[(f64, f64)],
    grid: &GeodesicGrid,
    cfg: &BasisConfig,
) -> Result<SparseMatrix> {
    let points = lat_lon_to_points(locations)?;
    assemble_basis_points(&points, grid, cfg)
}

/// Validates coordinate ranges and converts to unit vectors.
pub fn lat_lon_to_points(locations: &[(f64, f64)]) -> Result<Vec<Vec3>> {
    locations
        .iter()
        .enumerate()
        .map(|(row, &(lat, lon))| {
            if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) {
                Ok(Vec3::from_lat_lon(lat, lon))
            } else {
                Err(Error::CoordinateOutOfRange { row, lat, lon })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bernstein_table_values() {
        assert_eq!(bernstein_entries([1.0, 0.0, 0.0], 3).unwrap(), [3.0, 0.0, 0.0]);
        let t = 1.0 / 3.0;
        assert_eq!(bernstein_entries([t, t, t], 1).unwrap(), [t, t, t]);
        assert_eq!(bernstein_entries([0.5, 0.5, 0.0], 2).unwrap(), [0.75, 0.75, 0.0]);
        assert_eq!(bernstein_entries([0.2, 0.3, 0.5], 4), Err(Error::InvalidDegree(4)));
        assert_eq!(bernstein_entries([0.2, 0.3, 0.5], 0), Err(Error::InvalidDegree(0)));
    }

    #[test]
    fn knot_rows() {
        let grid = GeodesicGrid::new(2).unwrap();
        for d in 1..=3 {
            let cfg = BasisConfig::new(d, 2).unwrap();
            for k in [0usize, 7, 50, 161] {
                let row = basis_row(grid.knots()[k], &grid, &cfg).unwrap();
                for (c, v) in row {
                    let want = if c == k { 1.0 } else { 0.0 };
                    assert!(close(v, want, 1e-12), "d={d} k={k} c={c} v={v}");
                }
            }
        }
    }

    #[test]
    fn raw_cubic_at_knot_is_three() {
        let grid = GeodesicGrid::new(1).unwrap();
        let cfg = BasisConfig {
            degree: 3,
            normalize_rows: false,
            grid_level: 1,
        };
        let row = basis_row(grid.knots()[5], &grid, &cfg).unwrap();
        let at = row.iter().find(|&&(c, _)| c == 5).unwrap().1;
        assert!(close(at, 3.0, 1e-12));
    }

    #[test]
    fn level_mismatch_rejected() {
        let grid = GeodesicGrid::new(1).unwrap();
        let cfg = BasisConfig::new(1, 2).unwrap();
        assert!(basis_row(grid.knots()[0], &grid, &cfg).is_err());
    }

    #[test]
    fn assemble_shapes_and_errors() {
        let grid = GeodesicGrid::new(1).unwrap();
        let cfg = BasisConfig::new(2, 1).unwrap();
        let empty = assemble_basis(&[], &grid, &cfg).unwrap();
        assert_eq!((empty.rows(), empty.cols(), empty.nnz()), (0, 42, 0));

        let b = assemble_basis(&[(10.0, 20.0), (10.0, 20.0), (-45.0, 170.0)], &grid, &cfg).unwrap();
        assert_eq!(b.nnz(), 9);
        assert_eq!(b.row(0), b.row(1));

        let err = assemble_basis(&[(0.0, 0.0), (91.0, 0.0)], &grid, &cfg).unwrap_err();
        assert_eq!(
            err,
            Error::CoordinateOutOfRange {
                row: 1,
                lat: 91.0,
                lon: 0.0
            }
        );
    }

    #[test]
    fn flat_field_reproduced() {
        let grid = GeodesicGrid::new(2).unwrap();
        let cfg = BasisConfig::new(3, 2).unwrap();
        let locs: Vec<(f64, f64)> = (0..200)
            .map(|i| (-89.0 + 0.89 * i as f64, -179.0 + 1.79 * i as f64))
            .collect();
        let b = assemble_basis(&locs, &grid, &cfg).unwrap();
        let beta = alloc::vec![2.5; grid.knot_count()];
        for v in b.mul_vec(&beta) {
            assert!(close(v, 2.5, 1e-12));
        }
    }
}
