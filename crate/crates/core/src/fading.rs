//! Nakagami-m small-scale fading amplitude.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NakagamiParams {
    /// Shape, at least 0.5.
    pub m: f64,
    /// Spread `E[|h_f|²]`.
    pub omega: f64,
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m >= 0.5 && m.is_finite()) {
            return Err(Error::arg("nakagami m", format!("must be >= 0.5, got {m}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::arg("nakagami omega", format!("must be positive, got {omega}")));
        }
        Ok(Self { m, omega })
    }

    /// `E[|h_f|] = Γ(m+½)/Γ(m) · sqrt(Ω/m)`.
    pub fn mean_amplitude(&self) -> f64 {
        (ln_gamma(self.m + 0.5) - ln_gamma(self.m)).exp() * (self.omega / self.m).sqrt()
    }

    /// Density mode `sqrt((2m-1)Ω/(2m))`.
    pub fn mode(&self) -> f64 {
        ((2.0 * self.m - 1.0) * self.omega / (2.0 * self.m)).sqrt()
    }

    pub fn sampler(&self) -> NakagamiSampler {
        NakagamiSampler {
            power: Gamma::new(self.m, self.omega / self.m).expect("validated parameters"),
        }
    }
}

/// Draws `|h_f| = sqrt(G)` with `G ~ Gamma(m, Ω/m)`.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiSampler {
    power: Gamma<f64>,
}

impl NakagamiSampler {
    /// Fading power `|h_f|²`.
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng)
    }
}

impl Distribution<f64> for NakagamiSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_power(rng).sqrt()
    }
}

pub fn sample_nakagami<R: Rng + ?Sized>(params: &NakagamiParams, rng: &mut R) -> f64 {
    params.sampler().sample(rng)
}

pub fn pdf_nakagami(x: f64, params: &NakagamiParams) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::arg("x", format!("amplitude must be >= 0, got {x}")));
    }
    if x == 0.0 {
        // x^{2m-1} at the origin.
        return Ok(if params.m == 0.5 {
            (2.0 / (std::f64::consts::PI * params.omega)).sqrt()
        } else {
            0.0
        });
    }
    let NakagamiParams { m, omega } = *params;
    let ln = std::f64::consts::LN_2 + m * m.ln() + (2.0 * m - 1.0) * x.ln()
        - m * x * x / omega
        - ln_gamma(m)
        - m * omega.ln();
    Ok(ln.exp())
}

/// `P[|h_f| <= x]` via the regularized lower incomplete gamma function.
pub fn cdf_nakagami(x: f64, params: &NakagamiParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    gamma_lr(params.m, params.m * x * x / params.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_to_infinity, QuadSettings};
    use crate::rng::StreamFactory;
    use crate::stats::{ks_statistic, RunningStats};

    #[test]
    fn rejects_bad_params() {
        assert!(NakagamiParams::new(0.4, 1.0).is_err());
        assert!(NakagamiParams::new(1.0, 0.0).is_err());
        assert!(pdf_nakagami(-0.1, &NakagamiParams::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn pdf_normalises() {
        for m in [0.5, 1.0, 4.0, 10.0] {
            let p = NakagamiParams::new(m, 1.3).unwrap();
            let q = integrate_to_infinity(|x| pdf_nakagami(x, &p).unwrap(), 0.0, QuadSettings::abs(1e-9)).unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "m={m}: {}", q.value);
        }
    }

    #[test]
    fn m_one_is_rayleigh() {
        let p = NakagamiParams::new(1.0, 2.0).unwrap();
        for x in [0.1f64, 0.7, 1.5, 3.0] {
            let rayleigh = 2.0 * x / 2.0 * (-x * x / 2.0).exp();
            assert!((pdf_nakagami(x, &p).unwrap() - rayleigh).abs() < 1e-14);
        }
    }

    #[test]
    fn mode_is_stationary_point() {
        let p = NakagamiParams::new(4.0, 1.0).unwrap();
        let x = p.mode();
        let h = 1e-5;
        let d = (pdf_nakagami(x + h, &p).unwrap() - pdf_nakagami(x - h, &p).unwrap()) / (2.0 * h);
        assert!(d.abs() < 1e-6, "{d}");
        assert!(pdf_nakagami(x, &p).unwrap() > pdf_nakagami(x * 1.01, &p).unwrap());
        assert!(pdf_nakagami(x, &p).unwrap() > pdf_nakagami(x * 0.99, &p).unwrap());
    }

    #[test]
    fn mean_amplitude_m4() {
        // Γ(4.5)/Γ(4)·sqrt(1/4) = 11.631728/6 · 0.5
        let p = NakagamiParams::new(4.0, 1.0).unwrap();
        assert!((p.mean_amplitude() - 0.969_310_6).abs() < 1e-6);
    }

    #[test]
    fn sampler_moments_and_ks() {
        let p = NakagamiParams::new(4.0, 1.0).unwrap();
        let sampler = p.sampler();
        let mut rng = StreamFactory::new(3).trial(0);
        let xs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        let power: RunningStats = xs.iter().map(|x| x * x).collect();
        assert!((power.mean - 1.0).abs() < 3.0 * power.std_error());
        let mut sorted = xs.clone();
        assert!(ks_statistic(&mut sorted, |x| cdf_nakagami(x, &p)) < 0.01);
    }

    #[test]
    fn cdf_limits() {
        let p = NakagamiParams::new(2.0, 1.0).unwrap();
        assert_eq!(cdf_nakagami(0.0, &p), 0.0);
        assert!(cdf_nakagami(10.0, &p) > 1.0 - 1e-12);
    }
}
