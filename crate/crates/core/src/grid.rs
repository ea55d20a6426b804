use serde::Serialize;

use crate::error::{Error, Result};

/// Carrier layout around the center frequency. Indices run
/// `-K/2, …, -1, 1, …, K/2`; there is no carrier at the center itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarrierGrid {
    pub indices: Vec<i32>,
    pub centers: Vec<f64>,
    pub band_lo: Vec<f64>,
    pub band_hi: Vec<f64>,
    pub signal_bandwidth: f64,
    pub guard_bandwidth: f64,
    pub center_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl CarrierGrid {
    pub fn new(carriers: usize, signal_bandwidth: f64, guard_bandwidth: f64, center_frequency: f64) -> Result<Self> {
        if carriers < 2 || !carriers.is_multiple_of(2) {
            return Err(Error::arg("carriers", format!("must be even and >= 2, got {carriers}")));
        }
        for (name, v) in [
            ("signal_bandwidth", signal_bandwidth),
            ("guard_bandwidth", guard_bandwidth),
            ("center_frequency", center_frequency),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(name, format!("must be positive, got {v}")));
            }
        }
        let half = (carriers / 2) as i32;
        let indices: Vec<i32> = (-half..=half).filter(|&k| k != 0).collect();
        let spacing = signal_bandwidth + guard_bandwidth;
        let centers: Vec<f64> = indices
            .iter()
            .map(|&k| center_frequency + f64::from(k.signum()) * (f64::from(k.abs()) - 0.5) * spacing)
            .collect();
        let band_lo = centers.iter().map(|c| c - signal_bandwidth / 2.0).collect();
        let band_hi = centers.iter().map(|c| c + signal_bandwidth / 2.0).collect();
        Ok(Self {
            indices,
            centers,
            band_lo,
            band_hi,
            signal_bandwidth,
            guard_bandwidth,
            center_frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Center-to-center spacing `W_sb + W_gb`.
    pub fn spacing(&self) -> f64 {
        self.signal_bandwidth + self.guard_bandwidth
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.len() as f64 * self.spacing()
    }

    pub fn half(&self) -> i32 {
        (self.len() / 2) as i32
    }

    /// Position of carrier `k` in the frequency-ordered vectors.
    pub fn position(&self, k: i32) -> Option<usize> {
        let half = self.half();
        match k {
            0 => None,
            k if k.abs() > half => None,
            k if k < 0 => Some((k + half) as usize),
            k => Some((k + half - 1) as usize),
        }
    }

    /// θ: 1 when `j` names a carrier of this grid.
    pub fn neighbor_indicator(&self, j: i32) -> u8 {
        u8::from(self.position(j).is_some())
    }

    /// The spectrally adjacent carrier on `side`, stepping over the missing
    /// index 0 so that carriers -1 and 1 neighbor each other.
    pub fn adjacent(&self, k: i32, side: Side) -> Option<i32> {
        self.position(k)?;
        let j = match (side, k) {
            (Side::Below, 1) => -1,
            (Side::Above, -1) => 1,
            (Side::Below, k) => k - 1,
            (Side::Above, k) => k + 1,
        };
        self.position(j).map(|_| j)
    }

    pub fn center_of(&self, k: i32) -> Option<f64> {
        self.position(k).map(|p| self.centers[p])
    }
}
