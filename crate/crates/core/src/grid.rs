//! Geodesic discrete global grids.
//!
//! A regular icosahedron with a vertex at the north pole is split
//! recursively: every triangle is replaced by four, inserting edge midpoints.
//! The planar result (vertices on the faces of the icosahedron) is the
//! *icomesh*; radially projecting its vertices onto the unit sphere gives the
//! *icosphere*. Both share vertex numbering and faces, and the mesh vertices
//! serve as spline knots.
//!
//! Faces are stored so that the children of face `i` at one level are faces
//! `4i..4i+4` at the next one. Consequently the base icosahedron face of a
//! level-`ν` face `j` is `j >> 2ν`, and [`GeodesicGrid::locate`] can descend
//! the hierarchy using only barycentric coordinates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geom::{barycentric, Vec3};
use crate::{Error, Result};

/// Vertex budget applied by [`subdivide`]: level 10 (10 485 762 vertices).
pub const DEFAULT_VERTEX_BUDGET: usize = 10 * (1 << 20) + 2;

const NORM_TOL: f64 = 1e-9;
const BARY_TOL: f64 = 1e-12;

/// Number of vertices after `level` subdivisions of the icosahedron.
pub const fn vertex_count_at(level: u32) -> usize {
    10 * (1usize << (2 * level)) + 2
}

/// A triangle mesh with its subdivision level.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
    pub level: u32,
}

impl TriangleMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Undirected edges as sorted `(min, max)` pairs, in ascending order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }
}

/// The regular icosahedron inscribed in the unit sphere.
///
/// Vertex 0 is the north pole `(0, 0, 1)`, vertices 1..=5 form the upper ring
/// (the first at longitude 0, in the x-z plane), 6..=10 the lower ring offset
/// by 36 degrees, and vertex 11 is the south pole. Faces are oriented
/// counter-clockwise seen from outside.
pub fn build_icosahedron() -> TriangleMesh {
    let z = 1.0 / libm::sqrt(5.0);
    let r = 2.0 * z;
    let mut vertices = Vec::with_capacity(12);
    vertices.push(Vec3::new(0.0, 0.0, 1.0));
    for k in 0..5 {
        let lon = (72.0 * k as f64).to_radians();
        vertices.push(Vec3::new(r * libm::cos(lon), r * libm::sin(lon), z));
    }
    for k in 0..5 {
        let lon = (36.0 + 72.0 * k as f64).to_radians();
        vertices.push(Vec3::new(r * libm::cos(lon), r * libm::sin(lon), -z));
    }
    vertices.push(Vec3::new(0.0, 0.0, -1.0));
    // The first ring vertex is exactly in the x-z plane.
    vertices[1].y = 0.0;

    let up = |k: u32| 1 + k % 5;
    let lo = |k: u32| 6 + k % 5;
    let mut faces = Vec::with_capacity(20);
    for k in 0..5 {
        faces.push([0, up(k), up(k + 1)]);
    }
    for k in 0..5 {
        faces.push([up(k), lo(k), up(k + 1)]);
        faces.push([up(k + 1), lo(k), lo(k + 1)]);
    }
    for k in 0..5 {
        faces.push([11, lo(k + 1), lo(k)]);
    }
    for f in &mut faces {
        let [a, b, c] = f.map(|i| vertices[i as usize]);
        if (b - a).cross(c - a).dot(a) < 0.0 {
            f.swap(1, 2);
        }
    }
    TriangleMesh {
        vertices,
        faces,
        level: 0,
    }
}

/// Splits every face into four, `iterations` times, with the default vertex budget.
pub fn subdivide(mesh: &TriangleMesh, iterations: u32) -> Result<TriangleMesh> {
    subdivide_with_budget(mesh, iterations, DEFAULT_VERTEX_BUDGET)
}

/// Splits every face into four, `iterations` times.
///
/// New vertices are planar edge midpoints, shared between the two faces of
/// the edge (keyed by the vertex index pair, never by coordinates). Existing
/// vertices keep their indices.
pub fn subdivide_with_budget(
    mesh: &TriangleMesh,
    iterations: u32,
    budget: usize,
) -> Result<TriangleMesh> {
    let (mut v, mut e, mut f) = (mesh.vertex_count(), mesh.edge_count(), mesh.face_count());
    for it in 1..=iterations {
        v += e;
        e = 2 * e + 3 * f;
        f *= 4;
        if v > budget {
            return Err(Error::VertexBudget {
                level: mesh.level + it,
                vertices: v,
                budget,
            });
        }
    }

    let mut out = mesh.clone();
    for _ in 0..iterations {
        let mut midpoints: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut faces = Vec::with_capacity(out.faces.len() * 4);
        let vertices = &mut out.vertices;
        let mut mid = |a: u32, b: u32| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = vertices[a as usize].midpoint(vertices[b as usize]);
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        for &[a, b, c] in &out.faces {
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            faces.push([a, ab, ca]);
            faces.push([ab, b, bc]);
            faces.push([ca, bc, c]);
            faces.push([ab, bc, ca]);
        }
        out.faces = faces;
        out.level += 1;
    }
    Ok(out)
}

/// Divides every vertex by its Euclidean norm.
pub fn normalize_to_sphere(icomesh: &TriangleMesh) -> Result<TriangleMesh> {
    let vertices = icomesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| v.normalized().ok_or(Error::ZeroNormVertex(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TriangleMesh {
        vertices,
        faces: icomesh.faces.clone(),
        level: icomesh.level,
    })
}

/// Plane and 2-d frame of one icosahedron face.
#[derive(Debug, Clone, Copy)]
struct FaceFrame {
    normal: Vec3,
    offset: f64,
    origin: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl FaceFrame {
    fn new(a: Vec3, b: Vec3, c: Vec3) -> Self {
        let normal = (b - a).cross(c - a).normalized().expect("non-degenerate face");
        let e1 = (b - a).normalized().expect("non-degenerate face");
        Self {
            normal,
            offset: normal.dot(a),
            origin: a,
            e1,
            e2: normal.cross(e1),
        }
    }

    fn to_plane(&self, p: Vec3) -> [f64; 2] {
        let d = p - self.origin;
        [d.dot(self.e1), d.dot(self.e2)]
    }

    /// Central projection of a direction onto the face plane.
    fn gnomonic(&self, p: Vec3) -> Option<Vec3> {
        let d = self.normal.dot(p);
        (d > 0.0).then(|| p * (self.offset / d))
    }
}

/// Where a point falls in the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleLocation {
    /// Icosahedron face, 0..20.
    pub base_face: usize,
    /// Face index at the grid level.
    pub subtriangle: usize,
    /// Knot indices of the subtriangle, in face order.
    pub vertex_ids: [usize; 3],
    /// Non-negative weights summing to one, matching `vertex_ids`.
    pub barycentric: [f64; 3],
}

/// Paired icomesh/icosphere at a given level with adjacency and point location.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct GeodesicGrid {
    icomesh: TriangleMesh,
    icosphere: TriangleMesh,
    adjacency: Vec<Vec<u32>>,
    base_faces: [[u32; 3]; 20],
    frames: [FaceFrame; 20],
}

impl GeodesicGrid {
    /// Builds the grid at level `nu` (`10 * 4^nu + 2` knots).
    pub fn new(nu: u32) -> Result<Self> {
        Self::with_budget(nu, DEFAULT_VERTEX_BUDGET)
    }

    pub fn with_budget(nu: u32, budget: usize) -> Result<Self> {
        let base = build_icosahedron();
        let frames = core::array::from_fn(|f| {
            let [a, b, c] = base.faces[f].map(|i| base.vertices[i as usize]);
            FaceFrame::new(a, b, c)
        });
        let icomesh = subdivide_with_budget(&base, nu, budget)?;
        let icosphere = normalize_to_sphere(&icomesh)?;
        let mut adjacency = vec![Vec::new(); icomesh.vertex_count()];
        for (a, b) in icomesh.edges() {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for n in &mut adjacency {
            n.sort_unstable();
        }
        let base_faces = core::array::from_fn(|f| base.faces[f]);
        Ok(Self {
            icomesh,
            icosphere,
            adjacency,
            base_faces,
            frames,
        })
    }

    pub fn level(&self) -> u32 {
        self.icomesh.level
    }

    /// Number of knots `K`.
    pub fn knot_count(&self) -> usize {
        self.icosphere.vertex_count()
    }

    pub fn icomesh(&self) -> &TriangleMesh {
        &self.icomesh
    }

    pub fn icosphere(&self) -> &TriangleMesh {
        &self.icosphere
    }

    /// Sorted neighbour lists per knot.
    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    /// Knot positions on the unit sphere.
    pub fn knots(&self) -> &[Vec3] {
        &self.icosphere.vertices
    }

    /// Icosahedron face containing the level-`ν` face `subtriangle`.
    pub fn base_face_of(&self, subtriangle: usize) -> usize {
        subtriangle >> (2 * self.level())
    }

    /// Level-`ν` faces inside icosahedron face `base_face`.
    pub fn subtriangles_of(&self, base_face: usize) -> core::ops::Range<usize> {
        let per = 1usize << (2 * self.level());
        base_face * per..(base_face + 1) * per
    }

    /// Histogram of knot degrees as `(degree, count)` in ascending degree.
    pub fn degree_histogram(&self) -> Vec<(usize, usize)> {
        let mut h: BTreeMap<usize, usize> = BTreeMap::new();
        for n in &self.adjacency {
            *h.entry(n.len()).or_default() += 1;
        }
        h.into_iter().collect()
    }

    /// Great-circle lengths (radians) of every icosphere edge.
    pub fn edge_angles(&self) -> Vec<f64> {
        let v = &self.icosphere.vertices;
        self.icomesh
            .edges()
            .into_iter()
            .map(|(a, b)| v[a as usize].angle_to(v[b as usize]))
            .collect()
    }

    /// Locates a point of the unit sphere.
    ///
    /// The point is centrally projected onto the first icosahedron face (in
    /// index order) whose planar barycentric coordinates are all
    /// non-negative, then the four-way hierarchy is descended to the level-`ν`
    /// triangle containing the projection. Points on shared edges go to the
    /// lowest face index and the lowest child index.
    pub fn locate(&self, point: Vec3) -> Result<TriangleLocation> {
        let norm = point.norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotUnitVector(norm));
        }
        let base = self.icomesh.vertices.as_slice();
        let mut found = None;
        for (f, frame) in self.frames.iter().enumerate() {
            let Some(q) = frame.gnomonic(point) else {
                continue;
            };
            let [a, b, c] = self.base_face_vertices(f).map(|i| frame.to_plane(base[i]));
            let w = barycentric(frame.to_plane(q), a, b, c)?;
            if w.iter().all(|&x| x >= -BARY_TOL) {
                found = Some((f, q, w));
                break;
            }
        }
        let (base_face, q, mut w) = found.ok_or(Error::PointNotLocated)?;

        let mut local = 0usize;
        for _ in 0..self.level() {
            let child = if w[0] >= 0.5 {
                w = [2.0 * w[0] - 1.0, 2.0 * w[1], 2.0 * w[2]];
                0
            } else if w[1] >= 0.5 {
                w = [2.0 * w[0], 2.0 * w[1] - 1.0, 2.0 * w[2]];
                1
            } else if w[2] >= 0.5 {
                w = [2.0 * w[0], 2.0 * w[1], 2.0 * w[2] - 1.0];
                2
            } else {
                w = [1.0 - 2.0 * w[2], 1.0 - 2.0 * w[0], 1.0 - 2.0 * w[1]];
                3
            };
            local = 4 * local + child;
        }
        let subtriangle = self.subtriangles_of(base_face).start + local;
        let vertex_ids = self.icomesh.faces[subtriangle].map(|i| i as usize);

        // Recompute against the actual planar vertices to avoid drift from the descent.
        let frame = &self.frames[base_face];
        let [a, b, c] = vertex_ids.map(|i| frame.to_plane(base[i]));
        let w = barycentric(frame.to_plane(q), a, b, c)?;
        Ok(TriangleLocation {
            base_face,
            subtriangle,
            vertex_ids,
            barycentric: clamp_barycentric(w),
        })
    }

    /// Locates a latitude/longitude pair given in degrees.
    pub fn locate_lat_lon(&self, lat: f64, lon: f64) -> Result<TriangleLocation> {
        self.locate(Vec3::from_lat_lon(lat, lon))
    }

    /// Planar (icomesh) position of a location, the point the basis is evaluated at.
    pub fn planar_point(&self, loc: &TriangleLocation) -> Vec3 {
        let v = &self.icomesh.vertices;
        let [a, b, c] = loc.vertex_ids.map(|i| v[i]);
        let [w1, w2, w3] = loc.barycentric;
        a * w1 + b * w2 + c * w3
    }

    fn base_face_vertices(&self, f: usize) -> [usize; 3] {
        // Level-0 vertices keep their indices through subdivision.
        self.base_faces[f].map(|i| i as usize)
    }
}

/// Clamps tiny negative weights to zero and renormalizes to unit sum.
fn clamp_barycentric(w: [f64; 3]) -> [f64; 3] {
    let c = w.map(|x| if x < 0.0 { 0.0 } else { x });
    let s: f64 = c.iter().sum();
    c.map(|x| x / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron_counts_and_anchor() {
        let m = build_icosahedron();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (12, 30, 20));
        assert_eq!(m.vertices[0], Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(m.vertices[1].y, 0.0);
        for v in &m.vertices {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
        for f in &m.faces {
            let [a, b, c] = f.map(|i| m.vertices[i as usize]);
            assert!((b - a).cross(c - a).dot(a + b + c) > 0.0);
        }
    }

    #[test]
    fn icosahedron_is_five_regular() {
        let g = GeodesicGrid::new(0).unwrap();
        assert!(g.adjacency().iter().all(|n| n.len() == 5));
    }

    #[test]
    fn zero_iterations_is_identity() {
        let m = build_icosahedron();
        assert_eq!(subdivide(&m, 0).unwrap(), m);
    }

    #[test]
    fn one_iteration_counts() {
        let m = subdivide(&build_icosahedron(), 1).unwrap();
        assert_eq!(m.vertex_count(), 42);
        assert_eq!(m.face_count(), 80);
        assert_eq!(m.level, 1);
    }

    #[test]
    fn budget_is_enforced() {
        let m = build_icosahedron();
        let err = subdivide_with_budget(&m, 3, 100).unwrap_err();
        assert_eq!(
            err,
            Error::VertexBudget {
                level: 2,
                vertices: 162,
                budget: 100
            }
        );
    }

    #[test]
    fn normalize_keeps_unit_and_maps_midpoints() {
        let m = subdivide(&build_icosahedron(), 1).unwrap();
        let s = normalize_to_sphere(&m).unwrap();
        let (v, w) = (s.vertices[0], s.vertices[1]);
        let mid = (v + w).normalized().unwrap();
        // vertex 12 is the midpoint of edge (0, 1)
        assert!((s.vertices[12] - mid).norm() < 1e-15);
        assert_eq!(s.vertices[0], Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn normalize_rejects_zero_vertex() {
        let mut m = build_icosahedron();
        m.vertices[3] = Vec3::default();
        assert_eq!(normalize_to_sphere(&m), Err(Error::ZeroNormVertex(3)));
    }

    #[test]
    fn locate_rejects_non_unit() {
        let g = GeodesicGrid::new(1).unwrap();
        assert!(matches!(
            g.locate(Vec3::new(0.0, 0.0, 1.1)),
            Err(Error::NotUnitVector(_))
        ));
    }

    #[test]
    fn pole_goes_to_lowest_face() {
        let g = GeodesicGrid::new(2).unwrap();
        let loc = g.locate(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(loc.base_face, 0);
        assert_eq!(loc.subtriangle, 0);
        assert_eq!(loc.vertex_ids[0], 0);
        assert_eq!(loc.barycentric, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn children_are_nested() {
        let g = GeodesicGrid::new(2).unwrap();
        let parent = GeodesicGrid::new(1).unwrap();
        for (i, f) in parent.icomesh().faces.iter().enumerate() {
            // the corner children share the parent's corners
            assert_eq!(g.icomesh().faces[4 * i][0], f[0]);
            assert_eq!(g.icomesh().faces[4 * i + 1][1], f[1]);
            assert_eq!(g.icomesh().faces[4 * i + 2][2], f[2]);
        }
    }
}
