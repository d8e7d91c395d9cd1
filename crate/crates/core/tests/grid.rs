use geopspline_core::geom::Vec3;
use geopspline_core::grid::{build_icosahedron, vertex_count_at, GeodesicGrid};
use geopspline_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

fn random_unit(rng: &mut ChaCha20Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

/// Whether the ray through `p` passes through the flat triangle `abc`
/// (outward orientation), tested with triple products.
fn in_cone(p: Vec3, a: Vec3, b: Vec3, c: Vec3, tol: f64) -> bool {
    a.cross(b).dot(p) >= -tol && b.cross(c).dot(p) >= -tol && c.cross(a).dot(p) >= -tol
}

#[test]
fn grid_laws_up_to_level_six() {
    for nu in 0..=6u32 {
        let grid = GeodesicGrid::new(nu).unwrap();
        let mesh = grid.icomesh();
        let v = 10 * 4usize.pow(nu) + 2;
        assert_eq!(mesh.vertex_count(), v, "nu={nu}");
        assert_eq!(vertex_count_at(nu), v);
        assert_eq!(mesh.face_count(), 20 * 4usize.pow(nu));
        assert_eq!(mesh.edge_count(), 30 * 4usize.pow(nu));
        assert_eq!(mesh.euler_characteristic(), 2);
        let hist = grid.degree_histogram();
        if nu == 0 {
            assert_eq!(hist, vec![(5, 12)]);
        } else {
            assert_eq!(hist, vec![(5, 12), (6, v - 12)]);
        }
    }
    assert_eq!(GeodesicGrid::new(5).unwrap().knot_count(), 10242);
}

#[test]
fn icosahedron_is_regular_and_outward() {
    let ico = build_icosahedron();
    let edges = ico.edges();
    assert_eq!(edges.len(), 30);
    let len0 = (ico.vertices[edges[0].0 as usize] - ico.vertices[edges[0].1 as usize]).norm();
    for (a, b) in edges {
        let l = (ico.vertices[a as usize] - ico.vertices[b as usize]).norm();
        assert!((l - len0).abs() < 1e-12);
    }
    for v in &ico.vertices {
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }
    for f in &ico.faces {
        let [a, b, c] = f.map(|i| ico.vertices[i as usize]);
        let n = (b - a).cross(c - a);
        assert!(n.dot(a + b + c) > 0.0);
    }
}

#[test]
fn icosphere_vertices_are_unit_and_match_icomesh_directions() {
    let grid = GeodesicGrid::new(3).unwrap();
    let plane = &grid.icomesh().vertices;
    for (p, s) in plane.iter().zip(&grid.icosphere().vertices) {
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert!((p.normalized().unwrap() - *s).norm() < 1e-14);
    }
    assert_eq!(grid.icomesh().faces, grid.icosphere().faces);
}

#[test]
fn spacing_shrinks_by_half_per_level() {
    let mean = |nu| {
        let a = GeodesicGrid::new(nu).unwrap().edge_angles();
        a.iter().sum::<f64>() / a.len() as f64
    };
    let ratios: Vec<f64> = (1..5).map(|nu| mean(nu) / mean(nu - 1)).collect();
    for r in ratios.iter().skip(1) {
        assert!((r - 0.5).abs() < 0.02, "{ratios:?}");
    }
}

#[test]
fn located_points_project_back_onto_themselves() {
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    for nu in [0, 2, 4] {
        let grid = GeodesicGrid::new(nu).unwrap();
        let v = &grid.icomesh().vertices;
        for _ in 0..1000 {
            let p = random_unit(&mut rng);
            let loc = grid.locate(p).unwrap();
            let w = loc.barycentric;
            assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let q = grid.planar_point(&loc);
            assert!((q.normalized().unwrap() - p).norm() < 1e-10, "nu={nu}");
            let [a, b, c] = loc.vertex_ids.map(|i| v[i]);
            assert!(in_cone(p, a, b, c, 1e-12));
            assert_eq!(grid.base_face_of(loc.subtriangle), loc.base_face);
            assert!(grid.subtriangles_of(loc.base_face).contains(&loc.subtriangle));
        }
    }
}

#[test]
fn location_is_total() {
    let grid = GeodesicGrid::new(4).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    for _ in 0..100_000 {
        let p = random_unit(&mut rng);
        grid.locate(p).unwrap();
    }
    // knots, edge midpoints and the poles sit on shared boundaries
    for k in grid.icosphere().vertices.iter() {
        let loc = grid.locate(*k).unwrap();
        assert!(loc.barycentric.iter().any(|&w| (w - 1.0).abs() < 1e-9));
    }
    for lat in [-90.0, 90.0] {
        for lon in [-180.0, 0.0, 37.0, 180.0] {
            grid.locate_lat_lon(lat, lon).unwrap();
        }
    }
}

#[test]
fn face_centroids_locate_to_their_face() {
    let grid = GeodesicGrid::new(3).unwrap();
    let mesh = grid.icomesh();
    for (f, tri) in mesh.faces.iter().enumerate() {
        let [a, b, c] = tri.map(|i| mesh.vertices[i as usize]);
        let p = ((a + b + c) * (1.0 / 3.0)).normalized().unwrap();
        let loc = grid.locate(p).unwrap();
        assert_eq!(loc.subtriangle, f);
        for w in loc.barycentric {
            assert!((w - 1.0 / 3.0).abs() < 1e-9);
        }
    }
}

#[test]
fn rejects_points_off_the_sphere() {
    let grid = GeodesicGrid::new(1).unwrap();
    assert!(matches!(
        grid.locate(Vec3::new(0.0, 0.0, 2.0)),
        Err(Error::NotUnitVector(_))
    ));
}

#[test]
fn vertex_budget_is_enforced() {
    assert!(matches!(
        GeodesicGrid::with_budget(3, 100),
        Err(Error::VertexBudget { .. })
    ));
}
