//! Deterministic path gain: Friis spreading times molecular absorption.
//!
//! All gains here are amplitudes; received power scales with their square.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Source of the molecular absorption coefficient κ(f), in 1/m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AbsorptionProvider {
    Constant {
        kappa_per_m: f64,
    },
    /// `(frequency_hz, kappa_per_m)` rows, strictly increasing in frequency.
    /// Linearly interpolated; queries outside the rows are rejected.
    Table {
        rows: Vec<(f64, f64)>,
    },
}

impl AbsorptionProvider {
    pub fn constant(kappa_per_m: f64) -> Result<Self> {
        if !(kappa_per_m >= 0.0 && kappa_per_m.is_finite()) {
            return Err(Error::arg(
                "kappa_per_m",
                format!("must be finite and >= 0, got {kappa_per_m}"),
            ));
        }
        Ok(AbsorptionProvider::Constant { kappa_per_m })
    }

    pub fn table(rows: Vec<(f64, f64)>) -> Result<Self> {
        let p = AbsorptionProvider::Table { rows };
        p.validate()?;
        Ok(p)
    }

    /// Reads a two-column `frequency_hz,kappa_per_m` CSV with a header row.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "frequency_hz" || &headers[1] != "kappa_per_m" {
            return Err(Error::arg(
                "absorption table",
                format!(
                    "header must be `frequency_hz,kappa_per_m`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record.get(i).and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| {
                    Error::arg(
                        "absorption table",
                        format!("row {}: unparsable column {}", line + 2, i + 1),
                    )
                })
            };
            rows.push((parse(0)?, parse(1)?));
        }
        Self::table(rows)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AbsorptionProvider::Constant { kappa_per_m } => {
                Self::constant(*kappa_per_m)?;
            }
            AbsorptionProvider::Table { rows } => {
                if rows.len() < 2 {
                    return Err(Error::arg("absorption table", "needs at least 2 rows"));
                }
                for (i, &(f, k)) in rows.iter().enumerate() {
                    if !(k >= 0.0 && k.is_finite()) {
                        return Err(Error::arg(
                            "absorption table",
                            format!("row {i}: negative or non-finite kappa {k}"),
                        ));
                    }
                    if !f.is_finite() || (i > 0 && f <= rows[i - 1].0) {
                        return Err(Error::arg(
                            "absorption table",
                            format!("row {i}: frequencies must strictly increase"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// κ(f) in 1/m.
    pub fn kappa(&self, f: f64) -> Result<f64> {
        match self {
            AbsorptionProvider::Constant { kappa_per_m } => Ok(*kappa_per_m),
            AbsorptionProvider::Table { rows } => {
                let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
                if !(f >= lo && f <= hi) {
                    return Err(Error::OutOfTableRange {
                        frequency_hz: f,
                        lo_hz: lo,
                        hi_hz: hi,
                    });
                }
                let i = rows.partition_point(|r| r.0 <= f).clamp(1, rows.len() - 1);
                let ((f0, k0), (f1, k1)) = (rows[i - 1], rows[i]);
                Ok(k0 + (k1 - k0) * (f - f0) / (f1 - f0))
            }
        }
    }
}

/// Friis amplitude gain `sqrt(Gt·Gr)·c/(4π f d)`.
pub fn friis_amplitude(f: f64, d: f64, g_tx: f64, g_rx: f64) -> Result<f64> {
    for (name, v) in [("frequency", f), ("distance", d), ("tx gain", g_tx), ("rx gain", g_rx)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::arg("friis", format!("{name} must be positive, got {v}")));
        }
    }
    Ok((g_tx * g_rx).sqrt() * SPEED_OF_LIGHT / (4.0 * PI * f * d))
}

/// Beer–Lambert amplitude transmittance `exp(-κ(f)·d/2)`.
pub fn absorption_amplitude(provider: &AbsorptionProvider, f: f64, d: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::arg("distance", format!("must be positive, got {d}")));
    }
    Ok((-provider.kappa(f)? * d / 2.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterministicGain {
    pub h_fl: f64,
    pub h_al: f64,
    pub h_l: f64,
}

impl DeterministicGain {
    pub fn evaluate(provider: &AbsorptionProvider, f: f64, d: f64, g_tx: f64, g_rx: f64) -> Result<Self> {
        let h_fl = friis_amplitude(f, d, g_tx, g_rx)?;
        let h_al = absorption_amplitude(provider, f, d)?;
        Ok(Self {
            h_fl,
            h_al,
            h_l: h_fl * h_al,
        })
    }
}
