//! Free-running LO phase noise and the inter-carrier leakage it causes.
//!
//! The phase is a discrete Wiener process sampled at the total bandwidth `W`
//! with increment variance `4πβ/W`; its line shape is Lorentzian with
//! half-width `β`. Leakage into the adjacent carrier is computed two ways:
//! analytically (Lorentzian ⊛ flat source band, integrated over the victim
//! band) and empirically (time-domain synthesis and an averaged Hann-windowed
//! periodogram).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::Serialize;

use crate::config::{IciModel, SystemConfig};
use crate::engine::ChannelRealization;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{CarrierGrid, Side};
use crate::quadrature::{integrate, QuadSettings};
use crate::rng::{Domain, StreamFactory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseNoiseParams {
    pub beta: f64,
    pub sample_rate: f64,
    pub sigma_eps2: f64,
}

impl PhaseNoiseParams {
    pub fn new(beta: f64, sample_rate: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::arg("beta", format!("must be >= 0, got {beta}")));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::arg(
                "sample_rate",
                format!("must be positive, got {sample_rate}"),
            ));
        }
        Ok(Self {
            beta,
            sample_rate,
            sigma_eps2: 4.0 * PI * beta / sample_rate,
        })
    }
}

/// `φ(0) = 0`, `φ(n) = φ(n-1) + ε(n)`, `ε ~ N(0, σ_ε²)`.
pub fn wiener_trace<R: Rng + ?Sized>(n: usize, params: &PhaseNoiseParams, rng: &mut R) -> Vec<f64> {
    let sigma = params.sigma_eps2.sqrt();
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(0.0);
    for _ in 1..n {
        let eps: f64 = StandardNormal.sample(rng);
        phase += sigma * eps;
        out.push(phase);
    }
    out
}

/// `S(f) = (β/π) / (β² + f²)`.
pub fn lorentzian_psd(f: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::arg("beta", format!("must be positive, got {beta}")));
    }
    Ok(beta / PI / (beta * beta + f * f))
}

/// Flat band of width `w` convolved with the Lorentzian, as a density.
fn spread_source(f: f64, w: f64, beta: f64) -> f64 {
    (((f + w / 2.0) / beta).atan() - ((f - w / 2.0) / beta).atan()) / (PI * w)
}

/// Fraction of a carrier's power leaked into the carrier `offset` positions
/// away.
pub fn ici_coeff_analytic(beta: f64, grid: &CarrierGrid, offset: u32) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::arg("beta", format!("must be >= 0, got {beta}")));
    }
    if offset == 0 {
        return Err(Error::arg("offset", "must be at least 1"));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    let w = grid.signal_bandwidth;
    let delta = f64::from(offset) * grid.spacing();
    let (lo, hi) = (delta - w / 2.0, delta + w / 2.0);
    // Most of the mass sits next to the near edge; split there for the
    // adaptive rule.
    let knee = (lo + 10.0 * beta).min(delta);
    let s = QuadSettings {
        abs_tol: 5e-9,
        rel_tol: 0.0,
        max_intervals: 4000,
    };
    let a = integrate(|f| spread_source(f, w, beta), lo, knee, s)?.value
        + integrate(|f| spread_source(f, w, beta), knee, hi, s)?.value;
    Ok(a.clamp(0.0, 1.0))
}

/// Power fractions measured from a synthesized phase-noisy carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageMeasurement {
    /// Mean of the fractions landing in the carriers directly above and below.
    pub adjacent: f64,
    pub adjacent_below: f64,
    pub adjacent_above: f64,
    /// Mean fraction landing two carriers away.
    pub second: f64,
    /// Everything outside the source's own signal band.
    pub out_of_band: f64,
    pub bin_hz: f64,
}

/// Estimates the leaked fractions of a unit-power flat-spectrum carrier under
/// Wiener phase noise. Realizations use independent streams and are summed in
/// a fixed order, so the result does not depend on the worker count.
pub fn measure_leakage(
    beta: f64,
    grid: &CarrierGrid,
    n_samples: usize,
    n_avg: usize,
    streams: &StreamFactory,
    exec: Execution,
) -> Result<LeakageMeasurement> {
    if !n_samples.is_power_of_two() || n_samples < 1 << 14 {
        return Err(Error::arg(
            "n_samples",
            format!("must be a power of two >= 16384, got {n_samples}"),
        ));
    }
    if n_avg == 0 {
        return Err(Error::arg("n_avg", "must be at least 1"));
    }
    let rate = grid.total_bandwidth();
    let bin = rate / n_samples as f64;
    let required = grid.guard_bandwidth / 4.0;
    if bin > required {
        let min = (rate / required).ceil() as usize;
        return Err(Error::InsufficientResolution {
            bin_hz: bin,
            required_hz: required,
            min_samples: min.next_power_of_two(),
        });
    }
    let params = PhaseNoiseParams::new(beta, rate)?;
    let n = n_samples;
    let freq = |b: usize| {
        if b < n / 2 {
            b as f64 * bin
        } else {
            (b as f64 - n as f64) * bin
        }
    };
    let half_band = grid.signal_bandwidth / 2.0;
    let source_bins: Vec<usize> = (0..n).filter(|&b| freq(b).abs() <= half_band).collect();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();

    let realization = |r: u64| -> Vec<f64> {
        let mut rng = streams.stream(Domain::Spectral, r);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for &b in &source_bins {
            let theta: f64 = rng.random::<f64>() * 2.0 * PI;
            x[b] = Complex64::from_polar(1.0, theta);
        }
        inverse.process(&mut x);
        let phase = wiener_trace(n, &params, &mut streams.stream(Domain::PhaseNoise, r));
        for ((xi, &p), &w) in x.iter_mut().zip(&phase).zip(&window) {
            *xi *= Complex64::from_polar(w, p);
        }
        forward.process(&mut x);
        x.iter().map(|c| c.norm_sqr()).collect()
    };
    let psd = exec
        .map_reduce(n_avg as u64, realization, |mut a, b| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        })?
        .expect("n_avg >= 1");

    let band_power = |center: f64| -> f64 {
        let bins: Vec<f64> = (0..n)
            .filter(|&b| (freq(b) - center).abs() <= half_band)
            .map(|b| psd[b])
            .collect();
        crate::exec::pairwise_sum(&bins)
    };
    let total = crate::exec::pairwise_sum(&psd);
    let spacing = grid.spacing();
    let own = band_power(0.0) / total;
    let below = band_power(-spacing) / total;
    let above = band_power(spacing) / total;
    let second = 0.5 * (band_power(-2.0 * spacing) + band_power(2.0 * spacing)) / total;
    Ok(LeakageMeasurement {
        adjacent: 0.5 * (below + above),
        adjacent_below: below,
        adjacent_above: above,
        second,
        out_of_band: (1.0 - own).max(0.0),
        bin_hz: bin,
    })
}

pub fn ici_coeff_empirical(
    beta: f64,
    grid: &CarrierGrid,
    n_samples: usize,
    n_avg: usize,
    streams: &StreamFactory,
    exec: Execution,
) -> Result<f64> {
    Ok(measure_leakage(beta, grid, n_samples, n_avg, streams, exec)?.adjacent)
}

/// Leaked fractions per victim carrier, indexed by grid position: `from_below[p]`
/// is the fraction of the lower neighbor's power landing in carrier `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IciCoefficients {
    pub from_below: Vec<f64>,
    pub from_above: Vec<f64>,
}

impl IciCoefficients {
    pub fn uniform(grid: &CarrierGrid, adjacent: f64) -> Self {
        let k = grid.len();
        let mut from_below = vec![adjacent; k];
        let mut from_above = vec![adjacent; k];
        from_below[0] = 0.0;
        from_above[k - 1] = 0.0;
        Self { from_below, from_above }
    }

    pub fn zero(grid: &CarrierGrid) -> Self {
        Self::uniform(grid, 0.0)
    }

    /// Coefficients for `config`'s LO bandwidth under its configured model.
    pub fn for_config(config: &SystemConfig, grid: &CarrierGrid, exec: Execution) -> Result<Self> {
        let beta = config.lo_bandwidth_hz;
        let a = match config.ici {
            IciModel::Analytic => ici_coeff_analytic(beta, grid, 1)?,
            IciModel::Fixed { adjacent } => adjacent,
            IciModel::Empirical { samples, averages } => {
                if beta == 0.0 {
                    0.0
                } else {
                    ici_coeff_empirical(beta, grid, samples, averages, &StreamFactory::new(config.seed), exec)?
                }
            }
        };
        Ok(Self::uniform(grid, a))
    }

    pub fn get(&self, p: usize, side: Side) -> f64 {
        match side {
            Side::Below => self.from_below[p],
            Side::Above => self.from_above[p],
        }
    }
}

/// `σ_ψ² = Σ_{j ∈ {k-1, k+1}} θ_j A_j |h_j|² P_j` for victim carrier `k`.
pub fn conditional_ici_variance(
    real: &ChannelRealization,
    k: i32,
    ici: &IciCoefficients,
    config: &SystemConfig,
    grid: &CarrierGrid,
) -> f64 {
    let Some(p) = grid.position(k) else {
        return 0.0;
    };
    [Side::Below, Side::Above]
        .into_iter()
        .filter_map(|side| {
            let j = grid.adjacent(k, side)?;
            let q = grid.position(j)?;
            Some(f64::from(grid.neighbor_indicator(j)) * ici.get(p, side) * real.h2[q] * config.interferer_power(q))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::RunningStats;

    fn reference_grid() -> CarrierGrid {
        CarrierGrid::new(10, 2e9, 0.5e6, 335e9).unwrap()
    }

    /// Closed form of the analytic leakage via the antiderivative of atan.
    fn leakage_closed_form(beta: f64, w: f64, delta: f64) -> f64 {
        let g = |u: f64| u * (u / beta).atan() - beta / 2.0 * (beta * beta + u * u).ln();
        // ∫_{lo}^{hi} [atan((f+w/2)/β) - atan((f-w/2)/β)] df
        let (lo, hi) = (delta - w / 2.0, delta + w / 2.0);
        let plus = g(hi + w / 2.0) - g(lo + w / 2.0);
        let minus = g(hi - w / 2.0) - g(lo - w / 2.0);
        (plus - minus) / (PI * w)
    }

    #[test]
    fn increment_variance() {
        let p = PhaseNoiseParams::new(1.5e9, 20.005e9).unwrap();
        assert!((p.sigma_eps2 - 0.942_2).abs() < 1e-4);
        assert_eq!(p.sigma_eps2, 4.0 * PI * 1.5e9 / 20.005e9);
    }

    #[test]
    fn zero_beta_trace_is_flat() {
        let p = PhaseNoiseParams::new(0.0, 20e9).unwrap();
        let mut rng = StreamFactory::new(1).trial(0);
        assert!(wiener_trace(1000, &p, &mut rng).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trace_variance_at_100() {
        let p = PhaseNoiseParams::new(1.5e9, 20.005e9).unwrap();
        let f = StreamFactory::new(5);
        let end: RunningStats = (0..20_000)
            .map(|i| wiener_trace(101, &p, &mut f.trial(i))[100])
            .collect();
        let expect = 100.0 * p.sigma_eps2;
        // SE of a Gaussian sample variance: σ²·sqrt(2/(n-1)).
        let se = expect * (2.0 / 19_999.0f64).sqrt();
        assert!(
            (end.variance() - expect).abs() < 3.0 * se,
            "{} vs {}",
            end.variance(),
            expect
        );
    }

    #[test]
    fn lorentzian_shape() {
        let b = 1e6;
        assert!((lorentzian_psd(0.0, b).unwrap() - 1.0 / (PI * b)).abs() < 1e-20);
        assert!((lorentzian_psd(b, b).unwrap() / lorentzian_psd(0.0, b).unwrap() - 0.5).abs() < 1e-15);
        assert!((lorentzian_psd(-b, b).unwrap() / lorentzian_psd(0.0, b).unwrap() - 0.5).abs() < 1e-15);
        assert!(lorentzian_psd(0.0, 0.0).is_err());
        // arctan antiderivative: (2/π)·atan(1e4) over ±1e4 β.
        let q = integrate(
            |f| lorentzian_psd(f, b).unwrap(),
            -1e4 * b,
            1e4 * b,
            QuadSettings::abs(1e-10),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-4);
        assert!((q.value - 2.0 / PI * 1e4f64.atan()).abs() < 1e-8);
    }

    #[test]
    fn analytic_matches_closed_form() {
        let g = reference_grid();
        for beta in [1e5, 1e6, 2e7, 2e8, 1.5e9, 5e9] {
            let a = ici_coeff_analytic(beta, &g, 1).unwrap();
            let c = leakage_closed_form(beta, g.signal_bandwidth, g.spacing());
            assert!((a - c).abs() < 1e-8, "beta={beta}: {a} vs {c}");
        }
    }

    #[test]
    fn analytic_limits_and_monotonicity() {
        let g = reference_grid();
        assert_eq!(ici_coeff_analytic(0.0, &g, 1).unwrap(), 0.0);
        assert!(ici_coeff_analytic(1.0, &g, 1).unwrap() < 1e-6);
        // Leakage rises up to β ≈ 0.707·W_ch and falls beyond it.
        let peak = 0.7 * g.spacing();
        let betas: Vec<f64> = (1..=10).map(|i| peak * i as f64 / 10.0).collect();
        let a: Vec<f64> = betas.iter().map(|&b| ici_coeff_analytic(b, &g, 1).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] < w[1]), "{a:?}");
        assert!(a.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!(ici_coeff_analytic(1e9, &g, 0).is_err());
    }

    #[test]
    fn analytic_peaks_below_carrier_spacing() {
        let g = reference_grid();
        let a = |r: f64| ici_coeff_analytic(r * g.spacing(), &g, 1).unwrap();
        assert!(a(0.707) > a(0.6) && a(0.707) > a(0.8));
        assert!(a(1.0) < a(0.707));
        assert!(a(1.5) < a(1.0));
        for r in [0.01, 0.5, 1.0, 5.0, 100.0] {
            assert!((0.0..=1.0).contains(&a(r)));
        }
    }

    #[test]
    fn empirical_rejects_coarse_resolution() {
        let g = reference_grid();
        let err = ici_coeff_empirical(1e8, &g, 1 << 16, 1, &StreamFactory::new(1), Execution::Sequential).unwrap_err();
        assert!(
            matches!(
                err,
                Error::InsufficientResolution {
                    min_samples: 262_144,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(ici_coeff_empirical(1e8, &g, 100_000, 1, &StreamFactory::new(1), Execution::Sequential).is_err());
    }

    #[test]
    fn empirical_zero_beta_floor() {
        let g = reference_grid();
        let m = measure_leakage(0.0, &g, 1 << 18, 1, &StreamFactory::new(2), Execution::Sequential).unwrap();
        assert!(m.adjacent < 1e-4, "{m:?}");
        assert!(m.out_of_band < 1e-4, "{m:?}");
    }

    #[test]
    fn conditional_variance_sums_neighbors() {
        let g = reference_grid();
        let config = SystemConfig::from_json_str(r#"{"tx_power_db": 0.0}"#).unwrap();
        let real = ChannelRealization::from_h2(vec![1.0; 10]);
        let ici = IciCoefficients::uniform(&g, 0.1);
        assert!((conditional_ici_variance(&real, 3, &ici, &config, &g) - 0.2).abs() < 1e-15);
        assert!((conditional_ici_variance(&real, 5, &ici, &config, &g) - 0.1).abs() < 1e-15);
        assert!((conditional_ici_variance(&real, -5, &ici, &config, &g) - 0.1).abs() < 1e-15);
        assert!((conditional_ici_variance(&real, 1, &ici, &config, &g) - 0.2).abs() < 1e-15);
        let none = IciCoefficients::zero(&g);
        assert_eq!(conditional_ici_variance(&real, 3, &none, &config, &g), 0.0);
    }
}
