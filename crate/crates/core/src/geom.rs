//! Small fixed-size vector helpers and spherical coordinates.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Mean Earth radius in kilometres, used only for reporting distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self / n)
    }

    pub fn midpoint(self, o: Self) -> Self {
        (self + o) * 0.5
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit vector for a latitude/longitude pair in degrees.
    pub fn from_lat_lon(lat_deg: f64, lon_deg: f64) -> Self {
        let lat = lat_deg.to_radians();
        let lon = lon_deg.to_radians();
        let c = libm::cos(lat);
        Self::new(c * libm::cos(lon), c * libm::sin(lon), libm::sin(lat))
    }

    /// Latitude and longitude in degrees; longitude in (-180, 180].
    pub fn to_lat_lon(self) -> (f64, f64) {
        let r = self.norm();
        let lat = libm::asin((self.z / r).clamp(-1.0, 1.0)).to_degrees();
        let lon = libm::atan2(self.y, self.x).to_degrees();
        (lat, lon)
    }

    /// Great-circle angle between two directions, in radians.
    pub fn angle_to(self, o: Self) -> f64 {
        // atan2 form stays accurate for nearly parallel vectors
        libm::atan2(self.cross(o).norm(), self.dot(o))
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Barycentric coordinates of `v` with respect to the planar triangle `(v1, v2, v3)`.
///
/// Fails when the triangle area is not above `1e-14`.
pub fn barycentric(v: [f64; 2], v1: [f64; 2], v2: [f64; 2], v3: [f64; 2]) -> Result<[f64; 3]> {
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let twice_area = cross(v1, v2, v3);
    if !(twice_area.abs() * 0.5 > 1e-14) {
        return Err(Error::DegenerateTriangle(twice_area.abs() * 0.5));
    }
    let b1 = cross(v, v2, v3) / twice_area;
    let b2 = cross(v, v3, v1) / twice_area;
    Ok([b1, b2, 1.0 - b1 - b2])
}
