//! Pointing-error (misalignment) fading for a Gaussian beam on a circular
//! aperture with Rayleigh-distributed radial offset.
//!
//! With `v = sqrt(π)·a / (sqrt(2)·w_d)`:
//!
//! ```text
//! A0     = erf(v)²
//! w_eq²  = w_d² · sqrt(π)·erf(v) / (2v·exp(-v²))
//! h_p    = A0 · exp(-2 r² / w_eq²),   r ~ Rayleigh(σ_s)
//! f(x)   = γ² / A0^{γ²} · x^{γ²-1},    0 < x <= A0,   γ = w_eq / (2σ_s)
//! ```

use rand::Rng;
use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamGeometry {
    pub aperture_radius: f64,
    pub beam_radius: f64,
    pub jitter: f64,
    pub v: f64,
    pub a0: f64,
    pub w_eq: f64,
    /// `w_eq / (2σ_s)`; infinite when there is no jitter.
    pub gamma_ratio: f64,
}

pub fn derive_beam(aperture_radius: f64, beam_radius: f64, jitter: f64) -> Result<BeamGeometry> {
    if !(aperture_radius > 0.0 && aperture_radius.is_finite()) {
        return Err(Error::arg(
            "aperture_radius",
            format!("must be positive, got {aperture_radius}"),
        ));
    }
    if !(beam_radius > 0.0 && beam_radius.is_finite()) {
        return Err(Error::arg(
            "beam_radius",
            format!("must be positive, got {beam_radius}"),
        ));
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::arg("jitter", format!("must be >= 0, got {jitter}")));
    }
    let v = std::f64::consts::PI.sqrt() * aperture_radius / (std::f64::consts::SQRT_2 * beam_radius);
    let erf_v = erf(v);
    let w_eq2 = beam_radius * beam_radius * std::f64::consts::PI.sqrt() * erf_v / (2.0 * v * (-v * v).exp());
    let w_eq = w_eq2.sqrt();
    Ok(BeamGeometry {
        aperture_radius,
        beam_radius,
        jitter,
        v,
        a0: erf_v * erf_v,
        w_eq,
        gamma_ratio: if jitter > 0.0 {
            w_eq / (2.0 * jitter)
        } else {
            f64::INFINITY
        },
    })
}

impl BeamGeometry {
    pub fn gamma_sq(&self) -> f64 {
        self.gamma_ratio * self.gamma_ratio
    }

    /// Collected fraction at radial offset `r`.
    pub fn coefficient_at(&self, r: f64) -> f64 {
        self.a0 * (-2.0 * r * r / (self.w_eq * self.w_eq)).exp()
    }

    /// Maps a unit-scale Rayleigh radius (`σ = 1`) onto `h_p`. Sweeps over
    /// σ_s that share the unit radius see monotonically coupled draws.
    pub fn coefficient_from_unit_radius(&self, unit_radius: f64) -> f64 {
        self.coefficient_at(self.jitter * unit_radius)
    }

    /// `P[h_p <= x] = (x/A0)^{γ²}` on `[0, A0]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.a0 {
            1.0
        } else if self.jitter == 0.0 {
            0.0
        } else {
            (x / self.a0).powf(self.gamma_sq())
        }
    }

    /// `E[h_p^k] = γ² A0^k / (γ² + k)`.
    pub fn moment(&self, k: f64) -> f64 {
        if self.jitter == 0.0 {
            return self.a0.powf(k);
        }
        let g2 = self.gamma_sq();
        g2 * self.a0.powf(k) / (g2 + k)
    }
}

pub fn pdf_hp(x: f64, geom: &BeamGeometry) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::arg("x", format!("must be >= 0, got {x}")));
    }
    if geom.jitter <= 0.0 {
        return Err(Error::arg("jitter", "density is degenerate without jitter"));
    }
    if x == 0.0 || x > geom.a0 {
        return Ok(0.0);
    }
    let g2 = geom.gamma_sq();
    Ok((g2.ln() - g2 * geom.a0.ln() + (g2 - 1.0) * x.ln()).exp())
}

/// Unit-scale Rayleigh radius from one uniform draw.
pub(crate) fn unit_rayleigh_radius<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    // 1 - u lies in (0, 1], so the log is finite.
    (-2.0 * (1.0 - u).ln()).sqrt()
}

pub fn sample_hp<R: Rng + ?Sized>(geom: &BeamGeometry, rng: &mut R) -> f64 {
    geom.coefficient_from_unit_radius(unit_rayleigh_radius(rng))
}
