//! Experiment parameterization: the JSON config document, its validation,
//! and the resolved [`SystemConfig`].
//!
//! Inputs use engineering units (Hz, dBi, dB over noise, m). Resolution
//! converts levels to linear once and keeps the dB value alongside, so the
//! canonical echo of a resolved config re-validates to an identical config.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::AbsorptionProvider;
use crate::error::{ConfigIssues, Error, Result};
use crate::fading::NakagamiParams;
use crate::grid::CarrierGrid;

pub mod defaults {
    pub const CARRIERS: usize = 10;
    pub const SIGNAL_BANDWIDTH_HZ: f64 = 2e9;
    /// 5 MHz of total guard band shared by 10 carriers.
    pub const GUARD_BANDWIDTH_HZ: f64 = 0.5e6;
    pub const CENTER_FREQUENCY_HZ: f64 = 335e9;
    pub const DISTANCE_M: f64 = 10.0;
    pub const ANTENNA_GAIN_DBI: f64 = 55.0;
    pub const TX_POWER_DB: f64 = 5.0;
    pub const NOISE_POWER: f64 = 1.0;
    pub const NAKAGAMI_M: f64 = 4.0;
    pub const NAKAGAMI_OMEGA: f64 = 1.0;
    pub const JITTER_M: f64 = 0.03;
    pub const APERTURE_RADIUS_M: f64 = 0.08;
    pub const BEAM_RADIUS_M: f64 = 0.1;
    pub const LO_BANDWIDTH_HZ: f64 = 1.5e9;
    pub const SPECTRAL_EFFICIENCY: f64 = 2.0;
    pub const TRIALS: u64 = 100_000;
    pub const SEED: u64 = 20_191_104;
    pub const KAPPA_PER_M: f64 = 0.003;
    pub const REFERENCE_CARRIER: i32 = 1;
    pub const EMPIRICAL_SAMPLES: usize = 1 << 18;
    pub const EMPIRICAL_AVERAGES: usize = 8;
}

/// How the outage threshold follows from the spectral efficiency `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// `2^(r-1)`.
    #[default]
    Paper,
    /// `2^r - 1`.
    Shannon,
}

impl std::str::FromStr for ThresholdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ThresholdMode::Paper),
            "shannon" => Ok(ThresholdMode::Shannon),
            other => Err(Error::arg(
                "threshold-mode",
                format!("expected paper|shannon, got {other:?}"),
            )),
        }
    }
}

pub fn threshold_from_rate(r: f64, mode: ThresholdMode) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::arg("spectral_efficiency", format!("must be positive, got {r}")));
    }
    Ok(match mode {
        ThresholdMode::Paper => (r - 1.0).exp2(),
        ThresholdMode::Shannon => r.exp2() - 1.0,
    })
}

/// Source of the adjacent-carrier leakage coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum IciModel {
    /// Lorentzian line shape convolved with the flat source band.
    Analytic,
    /// Time-domain synthesis with Wiener phase noise and an averaged periodogram.
    Empirical { samples: usize, averages: usize },
    /// A fixed leaked fraction for every adjacent pair.
    Fixed { adjacent: f64 },
}

/// A level kept in both dB and linear form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub db: f64,
    pub linear: f64,
}

impl Level {
    pub fn from_db(db: f64) -> Self {
        Self {
            db,
            linear: db_to_linear(db),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerSpec {
    Uniform(f64),
    PerCarrier(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AbsorptionSpec {
    Constant {
        kappa_per_m: f64,
    },
    Table {
        rows: Vec<(f64, f64)>,
    },
    /// Two-column CSV, resolved relative to the config file's directory.
    TableCsv {
        path: String,
    },
}

/// The config document as written by users. Every field is optional and
/// unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carriers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_bandwidth_hz: Option<f64>,
    /// Checked against `carriers · (signal + guard)` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_frequency_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_gain_dbi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_gain_dbi: Option<f64>,
    /// dB over the noise power; one value or one per carrier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_power_db: Option<PowerSpec>,
    /// When set, every interfering neighbor transmits at this level (dB over
    /// noise) instead of its own entry in `tx_power_db`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjacent_power_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nakagami_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nakagami_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aperture_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_efficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_mode: Option<ThresholdMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorption: Option<AbsorptionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ici: Option<IciModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_misalignment: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_fading: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_carrier: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escalate_outage: Option<bool>,
}

/// Fully resolved, validated parameters. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    pub carriers: usize,
    pub total_bandwidth_hz: f64,
    pub signal_bandwidth_hz: f64,
    pub guard_bandwidth_hz: f64,
    pub center_frequency_hz: f64,
    pub distance_m: f64,
    pub tx_gain: Level,
    pub rx_gain: Level,
    /// Per carrier, in frequency order.
    pub tx_power: Vec<Level>,
    pub adjacent_power: Option<Level>,
    pub noise_power: f64,
    pub fading: NakagamiParams,
    pub jitter_m: f64,
    pub aperture_radius_m: f64,
    pub beam_radius_m: f64,
    pub lo_bandwidth_hz: f64,
    pub spectral_efficiency: f64,
    pub threshold_mode: ThresholdMode,
    pub trials: u64,
    pub seed: u64,
    pub absorption: AbsorptionProvider,
    pub ici: IciModel,
    pub shared_misalignment: bool,
    pub shared_fading: bool,
    pub reference_carrier: i32,
    pub escalate_outage: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        ConfigFile::default().resolve(None).expect("defaults are valid")
    }
}

fn check_positive(issues: &mut ConfigIssues, pointer: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        issues.push(pointer, format!("must be positive and finite, got {v}"));
    }
}

fn check_non_negative(issues: &mut ConfigIssues, pointer: &str, v: f64) {
    if !(v >= 0.0 && v.is_finite()) {
        issues.push(pointer, format!("must be >= 0 and finite, got {v}"));
    }
}

fn check_finite(issues: &mut ConfigIssues, pointer: &str, v: f64) {
    if !v.is_finite() {
        issues.push(pointer, format!("must be finite, got {v}"));
    }
}

impl ConfigFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(&e.path().to_string());
            Error::config(pointer, e.inner().to_string())
        })
    }

    /// Applies defaults, converts units and checks every invariant. Relative
    /// table paths are resolved against `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<SystemConfig> {
        use defaults as d;
        let mut issues = ConfigIssues::default();

        let carriers = self.carriers.unwrap_or(d::CARRIERS);
        if carriers < 2 || !carriers.is_multiple_of(2) {
            issues.push("/carriers", format!("must be even and >= 2, got {carriers}"));
        }
        let signal = self.signal_bandwidth_hz.unwrap_or(d::SIGNAL_BANDWIDTH_HZ);
        check_positive(&mut issues, "/signal_bandwidth_hz", signal);
        let guard = self.guard_bandwidth_hz.unwrap_or(d::GUARD_BANDWIDTH_HZ);
        check_positive(&mut issues, "/guard_bandwidth_hz", guard);
        let total = carriers as f64 * (signal + guard);
        if let Some(w) = self.total_bandwidth_hz {
            if !((w - total).abs() <= 1e-9 * total) {
                issues.push(
                    "/total_bandwidth_hz",
                    format!("{w} differs from carriers·(signal+guard) = {total}"),
                );
            }
        }
        let center = self.center_frequency_hz.unwrap_or(d::CENTER_FREQUENCY_HZ);
        check_positive(&mut issues, "/center_frequency_hz", center);
        if center.is_finite() && total.is_finite() && center <= total / 2.0 {
            issues.push("/center_frequency_hz", "band would extend below 0 Hz");
        }
        let distance = self.distance_m.unwrap_or(d::DISTANCE_M);
        check_positive(&mut issues, "/distance_m", distance);
        let tx_gain = self.tx_gain_dbi.unwrap_or(d::ANTENNA_GAIN_DBI);
        check_finite(&mut issues, "/tx_gain_dbi", tx_gain);
        let rx_gain = self.rx_gain_dbi.unwrap_or(d::ANTENNA_GAIN_DBI);
        check_finite(&mut issues, "/rx_gain_dbi", rx_gain);

        let tx_power: Vec<f64> = match &self.tx_power_db {
            None => vec![d::TX_POWER_DB; carriers],
            Some(PowerSpec::Uniform(p)) => vec![*p; carriers],
            Some(PowerSpec::PerCarrier(ps)) => {
                if ps.len() != carriers {
                    issues.push("/tx_power_db", format!("expected {carriers} entries, got {}", ps.len()));
                }
                ps.clone()
            }
        };
        for (i, &p) in tx_power.iter().enumerate() {
            check_finite(&mut issues, &format!("/tx_power_db/{i}"), p);
        }
        if let Some(p) = self.adjacent_power_db {
            check_finite(&mut issues, "/adjacent_power_db", p);
        }
        let noise = self.noise_power.unwrap_or(d::NOISE_POWER);
        check_positive(&mut issues, "/noise_power", noise);

        let m = self.nakagami_m.unwrap_or(d::NAKAGAMI_M);
        if !(m >= 0.5 && m.is_finite()) {
            issues.push("/nakagami_m", format!("must be >= 0.5, got {m}"));
        }
        let omega = self.nakagami_omega.unwrap_or(d::NAKAGAMI_OMEGA);
        check_positive(&mut issues, "/nakagami_omega", omega);

        let jitter = self.jitter_m.unwrap_or(d::JITTER_M);
        check_non_negative(&mut issues, "/jitter_m", jitter);
        let aperture = self.aperture_radius_m.unwrap_or(d::APERTURE_RADIUS_M);
        check_positive(&mut issues, "/aperture_radius_m", aperture);
        let beam = self.beam_radius_m.unwrap_or(d::BEAM_RADIUS_M);
        check_positive(&mut issues, "/beam_radius_m", beam);
        let beta = self.lo_bandwidth_hz.unwrap_or(d::LO_BANDWIDTH_HZ);
        check_non_negative(&mut issues, "/lo_bandwidth_hz", beta);
        let r = self.spectral_efficiency.unwrap_or(d::SPECTRAL_EFFICIENCY);
        check_positive(&mut issues, "/spectral_efficiency", r);

        let trials = self.trials.unwrap_or(d::TRIALS);
        if trials == 0 {
            issues.push("/trials", "must be at least 1");
        }

        let absorption = match self.absorption.clone().unwrap_or(AbsorptionSpec::Constant {
            kappa_per_m: d::KAPPA_PER_M,
        }) {
            AbsorptionSpec::Constant { kappa_per_m } => AbsorptionProvider::constant(kappa_per_m),
            AbsorptionSpec::Table { rows } => AbsorptionProvider::table(rows),
            AbsorptionSpec::TableCsv { path } => {
                let p = Path::new(&path);
                let full = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                AbsorptionProvider::from_csv_path(full)
            }
        };
        let absorption = match absorption {
            Ok(a) => Some(a),
            Err(e) => {
                issues.push("/absorption", e.to_string());
                None
            }
        };

        let ici = self.ici.unwrap_or(IciModel::Analytic);
        match ici {
            IciModel::Analytic => {}
            IciModel::Empirical { samples, averages } => {
                if !samples.is_power_of_two() || samples < 1 << 14 {
                    issues.push(
                        "/ici/samples",
                        format!("must be a power of two >= 16384, got {samples}"),
                    );
                }
                if averages == 0 {
                    issues.push("/ici/averages", "must be at least 1");
                }
            }
            IciModel::Fixed { adjacent } => {
                if !(0.0..=1.0).contains(&adjacent) {
                    issues.push("/ici/adjacent", format!("must lie in [0, 1], got {adjacent}"));
                }
            }
        }

        let reference = self.reference_carrier.unwrap_or(d::REFERENCE_CARRIER);
        let half = (carriers / 2) as i32;
        if reference == 0 || reference.abs() > half {
            issues.push(
                "/reference_carrier",
                format!("{reference} is not a carrier index of a {carriers}-carrier grid"),
            );
        }

        issues.into_result()?;
        Ok(SystemConfig {
            carriers,
            total_bandwidth_hz: total,
            signal_bandwidth_hz: signal,
            guard_bandwidth_hz: guard,
            center_frequency_hz: center,
            distance_m: distance,
            tx_gain: Level::from_db(tx_gain),
            rx_gain: Level::from_db(rx_gain),
            tx_power: tx_power.into_iter().map(Level::from_db).collect(),
            adjacent_power: self.adjacent_power_db.map(Level::from_db),
            noise_power: noise,
            fading: NakagamiParams { m, omega },
            jitter_m: jitter,
            aperture_radius_m: aperture,
            beam_radius_m: beam,
            lo_bandwidth_hz: beta,
            spectral_efficiency: r,
            threshold_mode: self.threshold_mode.unwrap_or_default(),
            trials,
            seed: self.seed.unwrap_or(d::SEED),
            absorption: absorption.expect("checked above"),
            ici,
            shared_misalignment: self.shared_misalignment.unwrap_or(true),
            shared_fading: self.shared_fading.unwrap_or(false),
            reference_carrier: reference,
            escalate_outage: self.escalate_outage.unwrap_or(true),
        })
    }
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($field:ident),* $(,)?) => {
        ConfigFile { $($field: $top.$field.clone().or_else(|| $base.$field.clone()),)* }
    };
}

impl ConfigFile {
    /// Fields set in `top` win over the ones in `self`.
    pub fn overlay(&self, top: &ConfigFile) -> ConfigFile {
        overlay_fields!(
            self,
            top,
            carriers,
            signal_bandwidth_hz,
            guard_bandwidth_hz,
            total_bandwidth_hz,
            center_frequency_hz,
            distance_m,
            tx_gain_dbi,
            rx_gain_dbi,
            tx_power_db,
            adjacent_power_db,
            noise_power,
            nakagami_m,
            nakagami_omega,
            jitter_m,
            aperture_radius_m,
            beam_radius_m,
            lo_bandwidth_hz,
            spectral_efficiency,
            threshold_mode,
            trials,
            seed,
            absorption,
            ici,
            shared_misalignment,
            shared_fading,
            reference_carrier,
            escalate_outage,
        )
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file = Self::from_json_str(&text)?;
        // Pin relative table paths to the config's directory.
        if let (Some(AbsorptionSpec::TableCsv { path: table }), Some(dir)) = (&mut file.absorption, path.parent()) {
            if Path::new(table.as_str()).is_relative() {
                *table = dir.join(table.as_str()).to_string_lossy().into_owned();
            }
        }
        Ok(file)
    }
}

/// Converts a serde path (`a.b[2]`) to a JSON pointer (`/a/b/2`).
fn json_pointer(path: &str) -> String {
    if path == "." || path.is_empty() {
        return "/".to_string();
    }
    let mut out = String::new();
    for part in path.split('.') {
        let mut rest = part;
        while let Some(open) = rest.find('[') {
            if open > 0 {
                out.push('/');
                out.push_str(&rest[..open]);
            }
            let close = rest[open..].find(']').map_or(rest.len(), |c| open + c);
            out.push('/');
            out.push_str(&rest[open + 1..close]);
            rest = &rest[(close + 1).min(rest.len())..];
        }
        if !rest.is_empty() {
            out.push('/');
            out.push_str(rest);
        }
    }
    out
}

impl SystemConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        ConfigFile::from_json_str(text)?.resolve(None)
    }

    pub fn grid(&self) -> Result<CarrierGrid> {
        build_grid(self)
    }

    pub fn threshold(&self) -> Result<f64> {
        threshold_from_rate(self.spectral_efficiency, self.threshold_mode)
    }

    /// Transmit power of carrier position `p`, linear.
    pub fn power(&self, p: usize) -> f64 {
        self.tx_power[p].linear
    }

    /// Power used for carrier position `p` when it acts as an interferer.
    pub fn interferer_power(&self, p: usize) -> f64 {
        self.adjacent_power.map_or(self.tx_power[p].linear, |l| l.linear)
    }

    /// Canonical document: every field explicit, in input units.
    pub fn to_canonical(&self) -> ConfigFile {
        ConfigFile {
            carriers: Some(self.carriers),
            signal_bandwidth_hz: Some(self.signal_bandwidth_hz),
            guard_bandwidth_hz: Some(self.guard_bandwidth_hz),
            total_bandwidth_hz: Some(self.total_bandwidth_hz),
            center_frequency_hz: Some(self.center_frequency_hz),
            distance_m: Some(self.distance_m),
            tx_gain_dbi: Some(self.tx_gain.db),
            rx_gain_dbi: Some(self.rx_gain.db),
            tx_power_db: Some(PowerSpec::PerCarrier(self.tx_power.iter().map(|l| l.db).collect())),
            adjacent_power_db: self.adjacent_power.map(|l| l.db),
            noise_power: Some(self.noise_power),
            nakagami_m: Some(self.fading.m),
            nakagami_omega: Some(self.fading.omega),
            jitter_m: Some(self.jitter_m),
            aperture_radius_m: Some(self.aperture_radius_m),
            beam_radius_m: Some(self.beam_radius_m),
            lo_bandwidth_hz: Some(self.lo_bandwidth_hz),
            spectral_efficiency: Some(self.spectral_efficiency),
            threshold_mode: Some(self.threshold_mode),
            trials: Some(self.trials),
            seed: Some(self.seed),
            absorption: Some(match &self.absorption {
                AbsorptionProvider::Constant { kappa_per_m } => AbsorptionSpec::Constant {
                    kappa_per_m: *kappa_per_m,
                },
                AbsorptionProvider::Table { rows } => AbsorptionSpec::Table { rows: rows.clone() },
            }),
            ici: Some(self.ici),
            shared_misalignment: Some(self.shared_misalignment),
            shared_fading: Some(self.shared_fading),
            reference_carrier: Some(self.reference_carrier),
            escalate_outage: Some(self.escalate_outage),
        }
    }
}

pub fn build_grid(config: &SystemConfig) -> Result<CarrierGrid> {
    CarrierGrid::new(
        config.carriers,
        config.signal_bandwidth_hz,
        config.guard_bandwidth_hz,
        config.center_frequency_hz,
    )
}

/// Document returned by [`validate_config`]: the canonical input form plus
/// the resolved linear values.
#[derive(Debug, Clone, Serialize)]
pub struct ValidatedConfig {
    pub canonical: ConfigFile,
    pub resolved: SystemConfig,
}

pub fn validate_config(path: impl AsRef<Path>) -> Result<ValidatedConfig> {
    let path = path.as_ref();
    let resolved = ConfigFile::from_path(path)?.resolve(None)?;
    Ok(ValidatedConfig {
        canonical: resolved.to_canonical(),
        resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(threshold_from_rate(1.0, ThresholdMode::Paper).unwrap(), 1.0);
        assert_eq!(threshold_from_rate(3.0, ThresholdMode::Paper).unwrap(), 4.0);
        assert_eq!(threshold_from_rate(1.0, ThresholdMode::Shannon).unwrap(), 1.0);
        assert_eq!(threshold_from_rate(3.0, ThresholdMode::Shannon).unwrap(), 7.0);
        assert!(threshold_from_rate(0.0, ThresholdMode::Paper).is_err());
        assert!(threshold_from_rate(-1.0, ThresholdMode::Shannon).is_err());
    }

    #[test]
    fn defaults_resolve() {
        let c = SystemConfig::default();
        assert_eq!(c.carriers, 10);
        assert!((c.total_bandwidth_hz - 20.005e9).abs() < 1.0);
        assert!((c.tx_gain.linear - 316_227.766).abs() < 1e-3);
        assert_eq!(c.fading.omega, 1.0);
        assert_eq!(c.tx_power.len(), 10);
    }

    #[test]
    fn odd_carriers_named() {
        let err = SystemConfig::from_json_str(r#"{"carriers": 7}"#).unwrap_err();
        match err {
            Error::Config(issues) => assert!(issues.pointers().any(|p| p == "/carriers")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = SystemConfig::from_json_str(r#"{"carrier": 10}"#).unwrap_err();
        assert!(err.is_config_error());
        assert!(err.to_string().contains("carrier"));
    }

    #[test]
    fn type_errors_carry_pointer() {
        let err =
            SystemConfig::from_json_str(r#"{"absorption": {"kind": "constant", "kappa_per_m": "x"}}"#).unwrap_err();
        assert!(err.to_string().contains("/absorption"), "{err}");
        let err = SystemConfig::from_json_str(r#"{"tx_power_db": [1, 2, "a"]}"#).unwrap_err();
        assert!(err.to_string().contains("/tx_power_db"), "{err}");
    }

    #[test]
    fn several_issues_reported_together() {
        let err = SystemConfig::from_json_str(r#"{"distance_m": -1, "nakagami_m": 0.1, "trials": 0}"#).unwrap_err();
        let Error::Config(issues) = err else { panic!() };
        let ps: Vec<&str> = issues.pointers().collect();
        assert_eq!(ps, vec!["/distance_m", "/nakagami_m", "/trials"]);
    }

    #[test]
    fn total_bandwidth_checked() {
        assert!(SystemConfig::from_json_str(r#"{"total_bandwidth_hz": 20.005e9}"#).is_ok());
        assert!(SystemConfig::from_json_str(r#"{"total_bandwidth_hz": 20e9}"#).is_err());
    }

    #[test]
    fn per_carrier_power_length() {
        assert!(SystemConfig::from_json_str(r#"{"carriers": 2, "tx_power_db": [1, 2]}"#).is_ok());
        assert!(SystemConfig::from_json_str(r#"{"carriers": 4, "tx_power_db": [1, 2]}"#).is_err());
    }

    #[test]
    fn overlay_prefers_top() {
        let base = ConfigFile {
            carriers: Some(4),
            distance_m: Some(3.0),
            ..Default::default()
        };
        let top = ConfigFile {
            distance_m: Some(7.0),
            ..Default::default()
        };
        let merged = base.overlay(&top);
        assert_eq!(merged.carriers, Some(4));
        assert_eq!(merged.distance_m, Some(7.0));
    }

    #[test]
    fn pointer_conversion() {
        assert_eq!(json_pointer("a.b[2]"), "/a/b/2");
        assert_eq!(json_pointer("tx_power_db[0]"), "/tx_power_db/0");
        assert_eq!(json_pointer("."), "/");
    }
}
