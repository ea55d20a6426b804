use std::path::Path;

use thz_link::experiments::{run_preset, ExperimentPreset, PresetName};
use thz_link::{validate_config, ConfigFile, Execution};

fn quick(trials: u64) -> ConfigFile {
    ConfigFile {
        trials: Some(trials),
        ..Default::default()
    }
}

fn column(table: &thz_link::experiments::CsvTable, name: &str) -> Vec<f64> {
    table.column(name).unwrap()
}

#[test]
fn fig4_outage_non_decreasing_in_threshold() {
    let preset = ExperimentPreset::builtin(PresetName::Fig4);
    let out = run_preset(&preset, &quick(20_000), Execution::Parallel, None).unwrap();
    let (s, g, op) = (
        column(&out.table, "sigma_s_m"),
        column(&out.table, "gamma_th_db"),
        column(&out.table, "op"),
    );
    assert!(
        g.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - g.iter().cloned().fold(f64::INFINITY, f64::min) >= 60.0
    );
    for i in 1..op.len() {
        if s[i] == s[i - 1] {
            assert!(g[i] > g[i - 1]);
            assert!(op[i] >= op[i - 1], "row {i}");
        }
    }
}

#[test]
fn fig3_more_jitter_lies_below() {
    let preset = ExperimentPreset::builtin(PresetName::Fig3);
    let out = run_preset(&preset, &quick(20_000), Execution::Parallel, None).unwrap();
    let (s, d, v) = (
        column(&out.table, "sigma_s_m"),
        column(&out.table, "d_m"),
        column(&out.table, "mean_sinr_db"),
    );
    let at = |sigma: f64, dist: f64| {
        (0..v.len())
            .find(|&i| s[i] == sigma && d[i] == dist)
            .map(|i| v[i])
            .unwrap()
    };
    for dist in [5.0, 25.0, 50.0] {
        assert!(at(0.05, dist) < at(0.01, dist), "d={dist}");
    }
}

#[test]
fn fig1_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let preset = ExperimentPreset::builtin(PresetName::Fig1);
    let a = run_preset(&preset, &quick(5_000), Execution::Parallel, Some(&dir.path().join("a"))).unwrap();
    let b = run_preset(
        &preset,
        &quick(5_000),
        Execution::Sequential,
        Some(&dir.path().join("b")),
    )
    .unwrap();
    assert_eq!(
        std::fs::read(a.csv_path.unwrap()).unwrap(),
        std::fs::read(b.csv_path.unwrap()).unwrap()
    );
}

#[test]
fn manifest_reproduces_csv() {
    let dir = tempfile::tempdir().unwrap();
    let preset = ExperimentPreset::builtin(PresetName::Fig2);
    let first = run_preset(&preset, &quick(3_000), Execution::Parallel, Some(&dir.path().join("a"))).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(first.manifest_path.unwrap()).unwrap()).unwrap();
    let config: ConfigFile = serde_json::from_value(manifest["config"].clone()).unwrap();
    let again = run_preset(&preset, &config, Execution::Parallel, Some(&dir.path().join("b"))).unwrap();
    assert_eq!(
        std::fs::read(first.csv_path.unwrap()).unwrap(),
        std::fs::read(again.csv_path.unwrap()).unwrap()
    );
    let names: Vec<&str> = manifest["assumptions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    for n in [
        "aperture_radius_m",
        "beam_radius_m",
        "noise_power",
        "tx_power_db",
        "distance_m",
    ] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
}

#[test]
fn row_counts_cover_every_point() {
    for (name, rows) in [
        (PresetName::Fig1, 4 * 2 * 10),
        (PresetName::Fig2, 4 * 2 * 10),
        (PresetName::Fig3, 10 * 3),
        (PresetName::Fig4, 31 * 3),
        (PresetName::Custom, 10),
    ] {
        let preset = ExperimentPreset::builtin(name);
        let out = run_preset(
            &preset,
            &ConfigFile {
                escalate_outage: Some(false),
                ..quick(1_000)
            },
            Execution::Parallel,
            None,
        )
        .unwrap();
        assert_eq!(out.rows, rows, "{name:?}");
    }
}

#[test]
fn validate_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"tx_gain_dbi": 55, "rx_gain_dbi": 55}"#).unwrap();
    let v = validate_config(&path).unwrap();
    assert!((v.resolved.tx_gain.linear - 316_227.766_016_837_94).abs() < 1e-6);
    assert_eq!(v.resolved.fading.omega, 1.0);
    assert_eq!(v.canonical.nakagami_omega, Some(1.0));

    // Round trip: the canonical echo resolves to the same config.
    let again = dir.path().join("again.json");
    std::fs::write(&again, serde_json::to_vec(&v.canonical).unwrap()).unwrap();
    assert_eq!(validate_config(&again).unwrap().resolved, v.resolved);

    std::fs::write(&path, r#"{"carriers": 7}"#).unwrap();
    let err = validate_config(&path).unwrap_err();
    match err {
        thz_link::Error::Config(issues) => assert!(issues.pointers().any(|p| p == "/carriers")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn relative_table_path_follows_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("kappa.csv"),
        "frequency_hz,kappa_per_m\n300e9,0.001\n400e9,0.003\n",
    )
    .unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"absorption": {"kind": "table_csv", "path": "kappa.csv"}}"#).unwrap();
    let v = validate_config(&path).unwrap();
    assert!((v.resolved.absorption.kappa(350e9).unwrap() - 0.002).abs() < 1e-15);
}

#[test]
fn shipped_docs_cover_every_field() {
    let docs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs");
    let table = std::fs::read_to_string(docs.join("config.md")).unwrap();
    let example = validate_config(docs.join("example.json")).unwrap();
    let defaults = serde_json::to_value(thz_link::SystemConfig::default().to_canonical()).unwrap();
    for key in defaults.as_object().unwrap().keys() {
        assert!(table.contains(&format!("| `{key}` |")), "{key} undocumented");
    }
    let with_adjacent = serde_json::to_value(&example.canonical).unwrap();
    assert_eq!(
        with_adjacent.as_object().unwrap().len(),
        defaults.as_object().unwrap().len() + 1
    );
    let mut as_defaults = example.resolved.clone();
    as_defaults.adjacent_power = None;
    assert_eq!(as_defaults, thz_link::SystemConfig::default());
}
