use geopspline_core::basis::BasisConfig;
use geopspline_core::detect::{band_probability, band_rank_count, rank_vector, DetectConfig};
use geopspline_core::grid::GeodesicGrid;
use geopspline_core::model::{gibbs_fit, GibbsConfig, Hyperparameters, ModelSpec, Observations, PosteriorSamples};
use geopspline_core::predict::{
    field_moments, mean_sd_raster, posterior_predictive, posterior_predictive_observations,
    PredictionRequest, RasterSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// A short fit to a noisy band peaking at 10°S on a level-2 grid.
fn fitted(draws: usize) -> (GeodesicGrid, BasisConfig, PosteriorSamples) {
    let grid = GeodesicGrid::new(2).unwrap();
    let cfg = BasisConfig::new(3, 2).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let locations: Vec<(f64, f64)> = RasterSpec { rows: 18, cols: 36 }.centroids();
    let values: Vec<f64> = locations
        .iter()
        .map(|&(lat, _)| {
            let d: f64 = (lat + 10.0) / 20.0;
            5.0 + 20.0 * (-0.5 * d * d).exp() + 0.5 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let n = values.len();
    let obs = Observations {
        locations,
        values,
        missing: vec![false; n],
    };
    let (spec, y) = ModelSpec::from_observations(&grid, cfg, &obs, Hyperparameters::default()).unwrap();
    let gibbs = GibbsConfig {
        draws,
        burnin: 100,
        seed: 9,
        ..Default::default()
    };
    let s = gibbs_fit(&y, &spec, &gibbs).unwrap();
    (grid, cfg, s)
}

#[test]
fn band_mass_per_meridian_is_constant() {
    let (grid, cfg, s) = fitted(60);
    let det = DetectConfig {
        meridian_count: 12,
        ..Default::default()
    };
    assert_eq!(band_rank_count(1000, 0.05), 50);
    let map = band_probability(&s, &grid, cfg, &det).unwrap();
    assert_eq!(map.probability.len(), 12 * 1000);
    for m in 0..12 {
        let mass: f64 = map.meridian(m).iter().sum();
        assert!((mass - 50.0).abs() < 1e-9, "meridian {m}: {mass}");
        assert!(map.meridian(m).iter().all(|&p| (0.0..=1.0).contains(&p)));
    }
}

#[test]
fn band_probability_grows_with_width() {
    let (grid, cfg, s) = fitted(40);
    let mut last: Option<Vec<f64>> = None;
    for width in [200.0, 1000.0, 3000.0, 8000.0] {
        let det = DetectConfig {
            width_km: width,
            lat_count: 300,
            meridian_count: 8,
            ..Default::default()
        };
        let p = band_probability(&s, &grid, cfg, &det).unwrap().probability;
        if let Some(prev) = &last {
            assert!(prev.iter().zip(&p).all(|(a, b)| a <= b));
        }
        last = Some(p);
    }
}

#[test]
fn single_draw_gives_an_indicator() {
    let (grid, cfg, mut s) = fitted(5);
    let k = s.knots();
    s.alpha.truncate(1);
    s.tau_beta.truncate(1);
    s.tau_eps.truncate(1);
    s.beta.truncate(k);
    let det = DetectConfig {
        lat_count: 500,
        meridian_count: 6,
        ..Default::default()
    };
    let map = band_probability(&s, &grid, cfg, &det).unwrap();
    assert!(map.probability.iter().all(|&p| p == 0.0 || p == 1.0));
    // the indicator is exactly the top-rank set of the single field
    let lats = det.latitudes();
    let locs: Vec<(f64, f64)> = lats.iter().map(|&lat| (lat, map.longitudes[2])).collect();
    let field = posterior_predictive(&PredictionRequest {
        locations: &locs,
        samples: &s,
        grid: &grid,
        basis: cfg,
        expected_kappa: None,
    })
    .unwrap();
    let ranks = rank_vector(&field).unwrap();
    let top = band_rank_count(500, det.relative_width());
    for (l, &r) in ranks.iter().enumerate() {
        assert_eq!(map.meridian(2)[l] == 1.0, r > 500 - top, "latitude {}", lats[l]);
    }
}

#[test]
fn shared_meridians_agree_across_resolutions() {
    let (grid, cfg, s) = fitted(20);
    let coarse = DetectConfig {
        lat_count: 200,
        meridian_count: 4,
        ..Default::default()
    };
    let fine = DetectConfig {
        meridian_count: 8,
        ..coarse
    };
    let a = band_probability(&s, &grid, cfg, &coarse).unwrap();
    let b = band_probability(&s, &grid, cfg, &fine).unwrap();
    for m in 0..4 {
        assert_eq!(a.longitudes[m], b.longitudes[2 * m]);
        assert_eq!(a.meridian(m), b.meridian(2 * m));
    }
}

#[test]
fn band_sits_where_the_field_peaks() {
    let (grid, cfg, s) = fitted(100);
    let det = DetectConfig {
        meridian_count: 8,
        ..Default::default()
    };
    let map = band_probability(&s, &grid, cfg, &det).unwrap();
    for m in 0..8 {
        let centre: f64 = map
            .latitudes
            .iter()
            .zip(map.meridian(m))
            .map(|(lat, p)| lat * p)
            .sum::<f64>()
            / 50.0;
        assert!((centre + 10.0).abs() < 10.0, "meridian {m}: centre {centre}");
    }
}

#[test]
fn prediction_routes_agree() {
    let (grid, cfg, s) = fitted(80);
    let raster = RasterSpec { rows: 9, cols: 12 };
    let locs = raster.centroids();
    let req = PredictionRequest {
        locations: &locs,
        samples: &s,
        grid: &grid,
        basis: cfg,
        expected_kappa: Some(s.meta.kappa),
    };
    let draws = posterior_predictive(&req).unwrap();
    let mom = field_moments(&req).unwrap();
    let ras = mean_sd_raster(&s, &grid, cfg, raster).unwrap();
    let m = locs.len();
    for i in 0..m {
        let mean = (0..s.draws()).map(|g| draws[g * m + i]).sum::<f64>() / s.draws() as f64;
        assert!((mean - mom.mean[i]).abs() < 1e-9);
        assert_eq!(mom.mean[i], ras.mean[i]);
        assert_eq!(mom.sd[i], ras.sd[i]);
    }
    // the fit recovers the band's shape
    let north = mom.mean[0];
    let near_peak = mom.mean[4 * 12 + 3];
    assert!(near_peak > north + 10.0);
}

#[test]
fn observation_draws_add_the_noise_variance() {
    let (grid, cfg, s) = fitted(200);
    let locs = vec![(-10.0, 30.0); 500];
    let req = PredictionRequest {
        locations: &locs,
        samples: &s,
        grid: &grid,
        basis: cfg,
        expected_kappa: None,
    };
    let latent = posterior_predictive(&req).unwrap();
    let obs = posterior_predictive_observations(&req, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
    let diff: Vec<f64> = obs.iter().zip(&latent).map(|(o, l)| o - l).collect();
    let var = diff.iter().map(|d| d * d).sum::<f64>() / diff.len() as f64;
    let expect = s.tau_eps.iter().map(|t| 1.0 / t).sum::<f64>() / s.draws() as f64;
    // 10^5 draws of a near-Gaussian difference
    assert!((var / expect - 1.0).abs() < 0.03, "{var} vs {expect}");
}
