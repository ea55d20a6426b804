use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::output::{num, write_atomic, CsvTable};
use crate::config::{db_to_linear, defaults, ConfigFile, Level, SystemConfig};
use crate::engine::{run_outage_sweep, simulate, LinkModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::phase_noise::IciCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

impl PresetName {
    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig1 => "fig1",
            PresetName::Fig2 => "fig2",
            PresetName::Fig3 => "fig3",
            PresetName::Fig4 => "fig4",
            PresetName::Custom => "custom",
        }
    }
}

impl std::str::FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1" => PresetName::Fig1,
            "fig2" => PresetName::Fig2,
            "fig3" => PresetName::Fig3,
            "fig4" => PresetName::Fig4,
            "custom" => PresetName::Custom,
            other => return Err(Error::UnknownExperiment(other.to_string())),
        })
    }
}

/// What a preset varies. Curve variables come first, the swept axis last.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sweep {
    /// Per-carrier results for each (β, adjacent power) pair.
    Carriers {
        betas_hz: Vec<f64>,
        adjacent_powers_db: Vec<f64>,
    },
    /// Reference-carrier mean SINR against distance, one curve per jitter.
    Distance { jitters_m: Vec<f64>, distances_m: Vec<f64> },
    /// Reference-carrier outage against threshold, one curve per jitter.
    Threshold {
        jitters_m: Vec<f64>,
        thresholds_db: Vec<f64>,
    },
    /// The config as given.
    Single,
}

/// A parameter value a preset assumes, published with every run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption {
    pub name: &'static str,
    pub value: String,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub sweep: Sweep,
    /// Fixed parameters layered under the user's config.
    #[serde(skip)]
    pub base: ConfigFile,
}

const BETAS_HZ: [f64; 4] = [0.015e9, 0.15e9, 1.5e9, 3e9];
const ADJACENT_POWERS_DB: [f64; 2] = [5.0, 15.0];
const JITTERS_M: [f64; 3] = [0.01, 0.03, 0.05];

impl ExperimentPreset {
    pub fn builtin(name: PresetName) -> Self {
        let locked = ConfigFile {
            carriers: Some(defaults::CARRIERS),
            signal_bandwidth_hz: Some(defaults::SIGNAL_BANDWIDTH_HZ),
            guard_bandwidth_hz: Some(defaults::GUARD_BANDWIDTH_HZ),
            center_frequency_hz: Some(defaults::CENTER_FREQUENCY_HZ),
            tx_gain_dbi: Some(defaults::ANTENNA_GAIN_DBI),
            rx_gain_dbi: Some(defaults::ANTENNA_GAIN_DBI),
            nakagami_m: Some(defaults::NAKAGAMI_M),
            distance_m: Some(defaults::DISTANCE_M),
            ..Default::default()
        };
        let (sweep, base) = match name {
            PresetName::Fig1 | PresetName::Fig2 => (
                Sweep::Carriers {
                    betas_hz: BETAS_HZ.to_vec(),
                    adjacent_powers_db: ADJACENT_POWERS_DB.to_vec(),
                },
                locked,
            ),
            PresetName::Fig3 => (
                Sweep::Distance {
                    jitters_m: JITTERS_M.to_vec(),
                    distances_m: (1..=10).map(|i| 5.0 * f64::from(i)).collect(),
                },
                ConfigFile {
                    adjacent_power_db: Some(5.0),
                    lo_bandwidth_hz: Some(1.5e9),
                    ..locked
                },
            ),
            PresetName::Fig4 => (
                Sweep::Threshold {
                    jitters_m: JITTERS_M.to_vec(),
                    thresholds_db: (0..=30).map(|i| -30.0 + 2.0 * f64::from(i)).collect(),
                },
                ConfigFile {
                    adjacent_power_db: Some(5.0),
                    lo_bandwidth_hz: Some(1.5e9),
                    ..locked
                },
            ),
            PresetName::Custom => (Sweep::Single, ConfigFile::default()),
        };
        Self { name, sweep, base }
    }

    pub fn validate(&self) -> Result<()> {
        let strictly_increasing = |name: &'static str, xs: &[f64]| -> Result<()> {
            if xs.is_empty() {
                return Err(Error::arg(name, "sweep needs at least one value"));
            }
            if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !x.is_finite()) {
                return Err(Error::arg(name, "sweep values must be finite and strictly increasing"));
            }
            Ok(())
        };
        match &self.sweep {
            Sweep::Carriers {
                betas_hz,
                adjacent_powers_db,
            } => {
                strictly_increasing("betas_hz", betas_hz)?;
                strictly_increasing("adjacent_powers_db", adjacent_powers_db)
            }
            Sweep::Distance { jitters_m, distances_m } => {
                strictly_increasing("jitters_m", jitters_m)?;
                strictly_increasing("distances_m", distances_m)
            }
            Sweep::Threshold {
                jitters_m,
                thresholds_db,
            } => {
                strictly_increasing("jitters_m", jitters_m)?;
                strictly_increasing("thresholds_db", thresholds_db)
            }
            Sweep::Single => Ok(()),
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self.name {
            PresetName::Fig1 => &[
                "f_k_hz",
                "beta_hz",
                "p_adj_db",
                "mean_sinr_db",
                "ci_db",
                "mean_of_sinr_db",
            ],
            PresetName::Fig2 => &["f_k_hz", "beta_hz", "p_adj_db", "op", "ci"],
            PresetName::Fig3 => &["d_m", "sigma_s_m", "mean_sinr_db", "ci_db"],
            PresetName::Fig4 => &["gamma_th_db", "sigma_s_m", "op", "ci"],
            PresetName::Custom => &["f_k_hz", "mean_sinr_db", "ci_db", "op", "ci"],
        }
    }

    /// Rows the CSV must contain for a `carriers`-carrier grid.
    pub fn expected_rows(&self, carriers: usize) -> usize {
        match &self.sweep {
            Sweep::Carriers {
                betas_hz,
                adjacent_powers_db,
            } => betas_hz.len() * adjacent_powers_db.len() * carriers,
            Sweep::Distance { jitters_m, distances_m } => jitters_m.len() * distances_m.len(),
            Sweep::Threshold {
                jitters_m,
                thresholds_db,
            } => jitters_m.len() * thresholds_db.len(),
            Sweep::Single => carriers,
        }
    }

    /// The resolved config for this preset with `overrides` applied on top.
    pub fn resolve(&self, overrides: &ConfigFile) -> Result<SystemConfig> {
        self.base.overlay(overrides).resolve(None)
    }
}

/// Warnings for user overrides of the constants the figure presets lock.
pub fn locked_constant_warnings(name: PresetName, config: &SystemConfig) -> Vec<String> {
    if name == PresetName::Custom {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut check = |field: &str, got: f64, locked: f64| {
        if got != locked {
            out.push(format!(
                "{} overrides locked {field}: {got} (preset value {locked})",
                name.as_str()
            ));
        }
    };
    check("carriers", config.carriers as f64, defaults::CARRIERS as f64);
    check("tx_gain_dbi", config.tx_gain.db, defaults::ANTENNA_GAIN_DBI);
    check("rx_gain_dbi", config.rx_gain.db, defaults::ANTENNA_GAIN_DBI);
    check("nakagami_m", config.fading.m, defaults::NAKAGAMI_M);
    check(
        "center_frequency_hz",
        config.center_frequency_hz,
        defaults::CENTER_FREQUENCY_HZ,
    );
    out
}

fn assumptions(preset: &ExperimentPreset, config: &SystemConfig) -> Vec<Assumption> {
    let mut a = vec![
        Assumption {
            name: "aperture_radius_m",
            value: num(config.aperture_radius_m),
            note: "receive aperture radius",
        },
        Assumption {
            name: "beam_radius_m",
            value: num(config.beam_radius_m),
            note: "beam footprint radius at the receiver, held fixed across distance sweeps",
        },
        Assumption {
            name: "noise_power",
            value: num(config.noise_power),
            note: "all powers are dB over this noise power",
        },
        Assumption {
            name: "tx_power_db",
            value: format!("{:?}", config.tx_power.iter().map(|l| l.db).collect::<Vec<_>>()),
            note: "desired-carrier transmit power",
        },
        Assumption {
            name: "guard_bandwidth_hz",
            value: num(config.guard_bandwidth_hz),
            note: "5 MHz total guard band split evenly across carriers",
        },
        Assumption {
            name: "absorption",
            value: serde_json::to_string(&config.absorption).unwrap_or_default(),
            note: "molecular absorption coefficient provider",
        },
        Assumption {
            name: "ici",
            value: serde_json::to_string(&config.ici).unwrap_or_default(),
            note: "adjacent-carrier leakage model",
        },
    ];
    match preset.name {
        PresetName::Fig1 | PresetName::Fig2 => {
            a.push(Assumption {
                name: "jitter_m",
                value: num(config.jitter_m),
                note: "pointing jitter for the per-carrier sweeps",
            });
            a.push(Assumption {
                name: "betas_hz",
                value: "[1.5e7, 1.5e8, 1.5e9, 3e9]".into(),
                note: "LO bandwidth grid spanning beta below and above the carrier spacing",
            });
        }
        PresetName::Fig3 | PresetName::Fig4 => a.push(Assumption {
            name: "reference_carrier",
            value: config.reference_carrier.to_string(),
            note: "carrier whose SINR/outage is reported",
        }),
        PresetName::Custom => {}
    }
    if preset.name == PresetName::Fig2 {
        a.push(Assumption {
            name: "distance_m",
            value: num(config.distance_m),
            note: "distance inherited from the average-SINR setup",
        });
        a.push(Assumption {
            name: "spectral_efficiency",
            value: num(config.spectral_efficiency),
            note: "sets the outage threshold",
        });
    }
    a
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetOutput {
    #[serde(skip)]
    pub table: CsvTable,
    pub csv_path: Option<PathBuf>,
    pub manifest_path: Option<PathBuf>,
    pub rows: usize,
    pub warnings: Vec<String>,
    /// `(β, leaked fraction)` for every LO bandwidth the run evaluated.
    pub ici: Vec<(f64, f64)>,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'static str,
    version: &'static str,
    seed: u64,
    trials: u64,
    execution: String,
    wall_time_s: f64,
    csv: String,
    rows: usize,
    sweep: &'a Sweep,
    config: ConfigFile,
    resolved: &'a SystemConfig,
    assumptions: Vec<Assumption>,
    ici: &'a [(f64, f64)],
    warnings: &'a [String],
}

/// Runs `preset` with `overrides` on top of its fixed parameters. When `out_dir`
/// is given, writes `<name>.csv` and `<name>.manifest.json` there.
pub fn run_preset(
    preset: &ExperimentPreset,
    overrides: &ConfigFile,
    exec: Execution,
    out_dir: Option<&Path>,
) -> Result<PresetOutput> {
    preset.validate()?;
    let started = Instant::now();
    let config = preset.resolve(overrides)?;
    let mut warnings = locked_constant_warnings(preset.name, &config);
    for w in &warnings {
        log::warn!("{w}");
    }
    let grid = config.grid()?;
    let mut table = CsvTable::new(preset.header());
    let mut ici_log = Vec::new();

    match (&preset.sweep, preset.name) {
        (
            Sweep::Carriers {
                betas_hz,
                adjacent_powers_db,
            },
            name @ (PresetName::Fig1 | PresetName::Fig2),
        ) => {
            let gamma = config.threshold()?;
            for &beta in betas_hz {
                let at_beta = SystemConfig {
                    lo_bandwidth_hz: beta,
                    ..config.clone()
                };
                let ici = IciCoefficients::for_config(&at_beta, &grid, exec)?;
                ici_log.push((beta, ici.from_above[0]));
                for &p_adj in adjacent_powers_db {
                    let point = SystemConfig {
                        adjacent_power: Some(Level::from_db(p_adj)),
                        ..at_beta.clone()
                    };
                    let model = LinkModel::with_ici(&point, ici.clone())?;
                    log::info!("{}: beta={beta:e} Hz p_adj={p_adj} dB", name.as_str());
                    if name == PresetName::Fig1 {
                        let s = simulate(&model, &[], point.trials, exec)?;
                        for (p, f) in grid.centers.iter().enumerate() {
                            table.push(vec![
                                num(*f),
                                num(beta),
                                num(p_adj),
                                num(s.sinr[p].value_db()),
                                num(s.sinr[p].half_width_db()),
                                num(s.mean_sinr_db[p].value),
                            ]);
                        }
                    } else {
                        let r = run_outage_sweep(&model, &[gamma], exec)?;
                        warnings.extend(r.warnings);
                        for (p, f) in grid.centers.iter().enumerate() {
                            let e = r.estimates[0][p];
                            table.push(vec![num(*f), num(beta), num(p_adj), num(e.value), num(e.half_width)]);
                        }
                    }
                }
            }
        }
        (Sweep::Distance { jitters_m, distances_m }, PresetName::Fig3) => {
            let ici = IciCoefficients::for_config(&config, &grid, exec)?;
            ici_log.push((config.lo_bandwidth_hz, ici.from_above[0]));
            let p = grid.position(config.reference_carrier).expect("validated");
            for &jitter in jitters_m {
                for &d in distances_m {
                    log::info!("fig3: sigma_s={jitter} m d={d} m");
                    let point = SystemConfig {
                        jitter_m: jitter,
                        distance_m: d,
                        ..config.clone()
                    };
                    let model = LinkModel::with_ici(&point, ici.clone())?;
                    let s = simulate(&model, &[], point.trials, exec)?;
                    table.push(vec![
                        num(d),
                        num(jitter),
                        num(s.sinr[p].value_db()),
                        num(s.sinr[p].half_width_db()),
                    ]);
                }
            }
        }
        (
            Sweep::Threshold {
                jitters_m,
                thresholds_db,
            },
            PresetName::Fig4,
        ) => {
            let ici = IciCoefficients::for_config(&config, &grid, exec)?;
            ici_log.push((config.lo_bandwidth_hz, ici.from_above[0]));
            let p = grid.position(config.reference_carrier).expect("validated");
            let gammas: Vec<f64> = thresholds_db.iter().map(|&t| db_to_linear(t)).collect();
            for &jitter in jitters_m {
                log::info!("fig4: sigma_s={jitter} m");
                let point = SystemConfig {
                    jitter_m: jitter,
                    ..config.clone()
                };
                let model = LinkModel::with_ici(&point, ici.clone())?;
                let r = run_outage_sweep(&model, &gammas, exec)?;
                warnings.extend(r.warnings);
                for (ti, &t) in thresholds_db.iter().enumerate() {
                    let e = r.estimates[ti][p];
                    table.push(vec![num(t), num(jitter), num(e.value), num(e.half_width)]);
                }
            }
        }
        (Sweep::Single, PresetName::Custom) => {
            let ici = IciCoefficients::for_config(&config, &grid, exec)?;
            ici_log.push((config.lo_bandwidth_hz, ici.from_above[0]));
            let model = LinkModel::with_ici(&config, ici)?;
            let gamma = config.threshold()?;
            let s = simulate(&model, &[], config.trials, exec)?;
            let r = run_outage_sweep(&model, &[gamma], exec)?;
            warnings.extend(r.warnings);
            for (p, f) in grid.centers.iter().enumerate() {
                let e = r.estimates[0][p];
                table.push(vec![
                    num(*f),
                    num(s.sinr[p].value_db()),
                    num(s.sinr[p].half_width_db()),
                    num(e.value),
                    num(e.half_width),
                ]);
            }
        }
        (sweep, name) => {
            return Err(Error::arg(
                "preset",
                format!("sweep {sweep:?} does not fit experiment {}", name.as_str()),
            ))
        }
    }

    let rows = table.rows.len();
    let expected = preset.expected_rows(grid.len());
    if rows != expected {
        return Err(Error::arg(
            "preset",
            format!("produced {rows} rows, expected {expected}"),
        ));
    }
    let wall = started.elapsed().as_secs_f64();
    let (mut csv_path, mut manifest_path) = (None, None);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_file = dir.join(format!("{}.csv", preset.name.as_str()));
        write_atomic(&csv_file, &table.to_bytes()?)?;
        let manifest = Manifest {
            experiment: preset.name.as_str(),
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            trials: config.trials,
            execution: format!("{exec:?}"),
            wall_time_s: wall,
            csv: csv_file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            rows,
            sweep: &preset.sweep,
            config: config.to_canonical(),
            resolved: &config,
            assumptions: assumptions(preset, &config),
            ici: &ici_log,
            warnings: &warnings,
        };
        let manifest_file = dir.join(format!("{}.manifest.json", preset.name.as_str()));
        write_atomic(&manifest_file, &serde_json::to_vec_pretty(&manifest)?)?;
        csv_path = Some(csv_file);
        manifest_path = Some(manifest_file);
    }
    Ok(PresetOutput {
        table,
        csv_path,
        manifest_path,
        rows,
        warnings,
        ici: ici_log,
        wall_time_s: wall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ConfigFile {
        ConfigFile {
            trials: Some(2000),
            escalate_outage: Some(false),
            ..Default::default()
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!("fig3".parse::<PresetName>().unwrap(), PresetName::Fig3);
        assert!(matches!("fig5".parse::<PresetName>(), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn row_counts_match() {
        for name in [
            PresetName::Fig1,
            PresetName::Fig2,
            PresetName::Fig3,
            PresetName::Fig4,
            PresetName::Custom,
        ] {
            let preset = ExperimentPreset::builtin(name);
            let out = run_preset(&preset, &small(), Execution::Parallel, None).unwrap();
            assert_eq!(out.rows, preset.expected_rows(10), "{name:?}");
            assert_eq!(out.table.header, preset.header());
        }
    }

    #[test]
    fn locked_override_warns() {
        let preset = ExperimentPreset::builtin(PresetName::Fig3);
        let overrides = ConfigFile {
            nakagami_m: Some(2.0),
            ..small()
        };
        let out = run_preset(&preset, &overrides, Execution::Parallel, None).unwrap();
        assert!(out.warnings.iter().any(|w| w.contains("nakagami_m")));
    }

    #[test]
    fn non_monotone_sweep_rejected() {
        let mut preset = ExperimentPreset::builtin(PresetName::Fig3);
        preset.sweep = Sweep::Distance {
            jitters_m: vec![0.01],
            distances_m: vec![10.0, 5.0],
        };
        assert!(run_preset(&preset, &small(), Execution::Sequential, None).is_err());
    }

    #[test]
    fn writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let preset = ExperimentPreset::builtin(PresetName::Custom);
        let out = run_preset(&preset, &small(), Execution::Parallel, Some(dir.path())).unwrap();
        let csv = std::fs::read_to_string(out.csv_path.unwrap()).unwrap();
        assert!(csv.starts_with("f_k_hz,mean_sinr_db,ci_db,op,ci\n"));
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(out.manifest_path.unwrap()).unwrap()).unwrap();
        assert_eq!(manifest["seed"], serde_json::json!(defaults::SEED));
        assert!(manifest["assumptions"].as_array().unwrap().len() >= 5);
        // The canonical block re-validates.
        let canonical: ConfigFile = serde_json::from_value(manifest["config"].clone()).unwrap();
        assert!(canonical.resolve(None).is_ok());
    }
}
