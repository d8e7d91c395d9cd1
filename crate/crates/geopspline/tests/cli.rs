use std::path::Path;
use std::process::{Command, Output};

fn geopspline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geopspline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn grid_info_reports_the_level_five_vertex_count() {
    let out = geopspline(&["grid-info", "--nu", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "V=10242"), "{text}");
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = geopspline(&["fit", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn full_pipeline_and_grid_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let steps: [&[&str]; 4] = [
        &["synth", "--rows", "36", "--cols", "72", "--seed", "3", "--output", &path(d, "obs.csv")],
        &["fit", "--input", &path(d, "obs.csv"), "--nu", "3", "--draws", "200", "--burnin", "50", "--output", &path(d, "s.csv"), "-q"],
        &["predict", "--samples", &path(d, "s.csv"), "--raster", "18x36", "--output-mean", &path(d, "mean.csv"), "--output-sd", &path(d, "sd.csv")],
        &["itcz", "--samples", &path(d, "s.csv"), "--M", "36", "--output", &path(d, "itcz.csv")],
    ];
    for args in steps {
        let out = geopspline(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let mean = std::fs::read_to_string(d.join("mean.csv")).unwrap();
    let raster = geopspline::raster::parse_raster(mean.as_bytes()).unwrap();
    assert_eq!((raster.header.rows, raster.header.cols), (18, 36));
    assert!(raster.values.iter().all(|v| v.is_finite()));
    let itcz = std::fs::read_to_string(d.join("itcz.csv")).unwrap();
    // header plus 36 meridians of 1000 latitudes
    assert_eq!(itcz.lines().count(), 1 + 36 * 1000);

    let out = geopspline(&["predict", "--samples", &path(d, "s.csv"), "--nu", "4", "--raster", "18x36", "--output-mean", &path(d, "m4.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("do not match"), "{err}");
}
