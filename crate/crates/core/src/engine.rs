//! Monte Carlo estimation of per-carrier SINR and outage probability.
//!
//! Trial `t` always draws from stream `(seed, t)`: first the unit Rayleigh
//! radii of the pointing error, then the Nakagami fading powers. Changing
//! distance, jitter, LO bandwidth or powers therefore leaves every underlying
//! draw untouched, which makes sweeps comparisons under common random numbers.

use rand::Rng;
use serde::Serialize;

use crate::channel::DeterministicGain;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::exec::{block_count, block_range, Execution};
use crate::fading::{cdf_nakagami, NakagamiSampler};
use crate::grid::CarrierGrid;
use crate::misalignment::{derive_beam, unit_rayleigh_radius, BeamGeometry};
use crate::phase_noise::{conditional_ici_variance, IciCoefficients};
use crate::quadrature::{integrate, QuadSettings};
use crate::rng::StreamFactory;
use crate::stats::{MetricEstimate, RunningStats};

/// Smallest trial count accepted for average-SINR runs.
pub const MIN_TRIALS: u64 = 1_000;
/// Outage runs escalate to this many trials when an estimate falls below
/// [`ESCALATE_BELOW`].
pub const ESCALATED_TRIALS: u64 = 1_000_000;
pub const ESCALATE_BELOW: f64 = 1e-3;
/// Failures per estimate below which a warning is attached.
pub const MIN_FAILURES: f64 = 100.0;

/// One channel draw; all vectors are indexed by grid position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRealization {
    pub h_l: Vec<f64>,
    pub h_p: Vec<f64>,
    pub h_f_mag: Vec<f64>,
    /// `(h_l·h_p·|h_f|)²`.
    pub h2: Vec<f64>,
}

impl ChannelRealization {
    pub fn compose(h_l: Vec<f64>, h_p: Vec<f64>, h_f_mag: Vec<f64>) -> Self {
        let h2 = h_l
            .iter()
            .zip(&h_p)
            .zip(&h_f_mag)
            .map(|((l, p), f)| {
                let h = l * p * f;
                h * h
            })
            .collect();
        Self { h_l, h_p, h_f_mag, h2 }
    }

    /// A realization with unit path and pointing gains and the given `|h|²`.
    pub fn from_h2(h2: Vec<f64>) -> Self {
        let n = h2.len();
        let h_f_mag = h2.iter().map(|x| x.sqrt()).collect();
        Self::compose(vec![1.0; n], vec![1.0; n], h_f_mag)
    }
}

/// Everything needed to turn a random stream into SINR samples.
#[derive(Debug, Clone)]
pub struct LinkModel {
    pub config: SystemConfig,
    pub grid: CarrierGrid,
    pub gains: Vec<DeterministicGain>,
    pub beam: BeamGeometry,
    pub ici: IciCoefficients,
    fading: NakagamiSampler,
}

impl LinkModel {
    pub fn new(config: &SystemConfig, exec: Execution) -> Result<Self> {
        let grid = config.grid()?;
        let ici = IciCoefficients::for_config(config, &grid, exec)?;
        Self::with_ici(config, ici)
    }

    pub fn with_ici(config: &SystemConfig, ici: IciCoefficients) -> Result<Self> {
        let grid = config.grid()?;
        if ici.from_below.len() != grid.len() || ici.from_above.len() != grid.len() {
            return Err(Error::arg("ici", "coefficient count does not match the grid"));
        }
        let gains = grid
            .centers
            .iter()
            .map(|&f| {
                DeterministicGain::evaluate(
                    &config.absorption,
                    f,
                    config.distance_m,
                    config.tx_gain.linear,
                    config.rx_gain.linear,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let beam = derive_beam(config.aperture_radius_m, config.beam_radius_m, config.jitter_m)?;
        let fading = crate::fading::NakagamiParams::new(config.fading.m, config.fading.omega)?.sampler();
        Ok(Self {
            config: config.clone(),
            grid,
            gains,
            beam,
            ici,
            fading,
        })
    }

    pub fn carriers(&self) -> usize {
        self.grid.len()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let k = self.carriers();
        let n_radii = if self.config.shared_misalignment { 1 } else { k };
        let radii: Vec<f64> = (0..n_radii).map(|_| unit_rayleigh_radius(rng)).collect();
        let n_fades = if self.config.shared_fading { 1 } else { k };
        let fades: Vec<f64> = (0..n_fades).map(|_| self.fading.sample_power(rng).sqrt()).collect();
        let h_p = (0..k)
            .map(|p| self.beam.coefficient_from_unit_radius(radii[p.min(n_radii - 1)]))
            .collect();
        let h_f = (0..k).map(|p| fades[p.min(n_fades - 1)]).collect();
        ChannelRealization::compose(self.gains.iter().map(|g| g.h_l).collect(), h_p, h_f)
    }

    /// `ρ = |h_k|² P_k / (σ_ψ² + N_o)`.
    pub fn sinr(&self, real: &ChannelRealization, k: i32) -> f64 {
        let p = self.grid.position(k).expect("carrier index in grid");
        let ici = conditional_ici_variance(real, k, &self.ici, &self.config, &self.grid);
        real.h2[p] * self.config.power(p) / (ici + self.config.noise_power)
    }

    fn sinr_all(&self, real: &ChannelRealization, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.grid.indices.iter().map(|&k| self.sinr(real, k)));
    }

    /// SINR of every carrier in trial `t`.
    pub fn trial_sinr(&self, streams: &StreamFactory, t: u64) -> Vec<f64> {
        let real = self.draw(&mut streams.trial(t));
        let mut out = Vec::with_capacity(self.carriers());
        self.sinr_all(&real, &mut out);
        out
    }
}

pub fn draw_realization<R: Rng + ?Sized>(
    config: &SystemConfig,
    grid: &CarrierGrid,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if grid != &config.grid()? {
        return Err(Error::arg("grid", "grid was not built from this config"));
    }
    Ok(LinkModel::with_ici(config, IciCoefficients::zero(grid))?.draw(rng))
}

pub fn instantaneous_sinr(
    real: &ChannelRealization,
    k: i32,
    ici: &IciCoefficients,
    config: &SystemConfig,
    grid: &CarrierGrid,
) -> f64 {
    let p = grid.position(k).expect("carrier index in grid");
    real.h2[p] * config.power(p) / (conditional_ici_variance(real, k, ici, config, grid) + config.noise_power)
}

#[derive(Debug, Clone)]
struct Tally {
    sinr: Vec<RunningStats>,
    sinr_db: Vec<RunningStats>,
    /// `[threshold][carrier]` counts of `ρ < γ_th`.
    failures: Vec<Vec<u64>>,
}

impl Tally {
    fn new(carriers: usize, thresholds: usize) -> Self {
        Self {
            sinr: vec![RunningStats::default(); carriers],
            sinr_db: vec![RunningStats::default(); carriers],
            failures: vec![vec![0; carriers]; thresholds],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.sinr.iter_mut().zip(other.sinr) {
            *a = a.merge(b);
        }
        for (a, b) in self.sinr_db.iter_mut().zip(other.sinr_db) {
            *a = a.merge(b);
        }
        for (fa, fb) in self.failures.iter_mut().zip(other.failures) {
            fa.iter_mut().zip(fb).for_each(|(x, y)| *x += y);
        }
        self
    }
}

/// Results of one Monte Carlo run; carrier vectors follow grid order.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub trials: u64,
    pub seed: u64,
    pub sinr: Vec<MetricEstimate>,
    /// Mean of `10·log10 ρ`, for comparison with the dB of the mean.
    pub mean_sinr_db: Vec<MetricEstimate>,
    pub thresholds: Vec<f64>,
    /// `[threshold][carrier]`.
    pub outage: Vec<Vec<MetricEstimate>>,
}

/// Runs `trials` trials of `model` and tallies SINR and the outage events for
/// every threshold in one pass.
pub fn simulate(model: &LinkModel, thresholds: &[f64], trials: u64, exec: Execution) -> Result<RunSummary> {
    if trials == 0 {
        return Err(Error::arg("trials", "must be at least 1"));
    }
    let streams = StreamFactory::new(model.config.seed);
    let k = model.carriers();
    let tally = exec
        .map_reduce(
            block_count(trials),
            |b| {
                let mut tally = Tally::new(k, thresholds.len());
                let mut rho = Vec::with_capacity(k);
                for t in block_range(b, trials) {
                    let real = model.draw(&mut streams.trial(t));
                    model.sinr_all(&real, &mut rho);
                    for (p, &r) in rho.iter().enumerate() {
                        tally.sinr[p].push(r);
                        tally.sinr_db[p].push(10.0 * r.max(f64::MIN_POSITIVE).log10());
                        for (ti, &g) in thresholds.iter().enumerate() {
                            if r < g {
                                tally.failures[ti][p] += 1;
                            }
                        }
                    }
                }
                tally
            },
            Tally::merge,
        )?
        .expect("at least one block");
    let seed = model.config.seed;
    Ok(RunSummary {
        trials,
        seed,
        sinr: tally.sinr.iter().map(|s| MetricEstimate::mean(s, seed)).collect(),
        mean_sinr_db: tally.sinr_db.iter().map(|s| MetricEstimate::mean(s, seed)).collect(),
        thresholds: thresholds.to_vec(),
        outage: tally
            .failures
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&f| MetricEstimate::proportion(f, trials, seed))
                    .collect()
            })
            .collect(),
    })
}

/// Per-carrier mean SINR over `config.trials` trials.
pub fn run_average_sinr(config: &SystemConfig, exec: Execution) -> Result<Vec<MetricEstimate>> {
    if config.trials < MIN_TRIALS {
        return Err(Error::arg(
            "trials",
            format!("average SINR needs at least {MIN_TRIALS} trials"),
        ));
    }
    let model = LinkModel::new(config, exec)?;
    Ok(simulate(&model, &[], config.trials, exec)?.sinr)
}

#[derive(Debug, Clone, Serialize)]
pub struct OutageReport {
    pub trials: u64,
    pub thresholds: Vec<f64>,
    /// `[threshold][carrier]`.
    pub estimates: Vec<Vec<MetricEstimate>>,
    pub warnings: Vec<String>,
}

/// Outage probability for each threshold, escalating the trial count once
/// when an estimate is too small to resolve.
pub fn run_outage_sweep(model: &LinkModel, thresholds: &[f64], exec: Execution) -> Result<OutageReport> {
    if let Some(&g) = thresholds.iter().find(|&&g| !(g > 0.0)) {
        return Err(Error::arg("gamma_th", format!("threshold must be positive, got {g}")));
    }
    let mut trials = model.config.trials;
    let mut summary = simulate(model, thresholds, trials, exec)?;
    let small = |s: &RunSummary| s.outage.iter().flatten().any(|e| e.value < ESCALATE_BELOW);
    if model.config.escalate_outage && trials < ESCALATED_TRIALS && small(&summary) {
        log::info!("outage estimate below {ESCALATE_BELOW}; escalating to {ESCALATED_TRIALS} trials");
        trials = ESCALATED_TRIALS;
        summary = simulate(model, thresholds, trials, exec)?;
    }
    let mut warnings = Vec::new();
    for (ti, row) in summary.outage.iter().enumerate() {
        for (p, e) in row.iter().enumerate() {
            let failures = e.value * trials as f64;
            if failures < MIN_FAILURES {
                warnings.push(format!(
                    "carrier {} at gamma_th {:.6e}: {} failures in {} trials",
                    model.grid.indices[p], thresholds[ti], failures, trials
                ));
            }
        }
    }
    Ok(OutageReport {
        trials,
        thresholds: thresholds.to_vec(),
        estimates: summary.outage,
        warnings,
    })
}

pub fn run_outage(config: &SystemConfig, gamma_th: f64, exec: Execution) -> Result<OutageReport> {
    let model = LinkModel::new(config, exec)?;
    run_outage_sweep(&model, &[gamma_th], exec)
}

/// Outage probability without phase noise by quadrature:
/// `OP = ∫ F_{|h_f|}(t/x) f_{h_p}(x) dx` with `t = sqrt(γ_th N_o / P_k) / h_l`.
///
/// Integrated in the variable `u = (x/A0)^{γ²}` (the pointing-error CDF),
/// which maps the `x^{γ²-1}` endpoint singularity to a flat integrand.
pub fn semi_analytic_op_no_phn(config: &SystemConfig, gamma_th: f64) -> Result<Vec<f64>> {
    if config.lo_bandwidth_hz != 0.0 {
        return Err(Error::arg(
            "lo_bandwidth_hz",
            "the no-phase-noise oracle needs beta = 0",
        ));
    }
    if !(gamma_th > 0.0) {
        return Err(Error::arg(
            "gamma_th",
            format!("threshold must be positive, got {gamma_th}"),
        ));
    }
    let model = LinkModel::with_ici(config, IciCoefficients::zero(&config.grid()?))?;
    let beam = model.beam;
    let params = config.fading;
    model
        .gains
        .iter()
        .enumerate()
        .map(|(p, g)| {
            let t = (gamma_th * config.noise_power / config.power(p)).sqrt() / g.h_l;
            if config.jitter_m == 0.0 {
                return Ok(cdf_nakagami(t / beam.a0, &params));
            }
            let inv_g2 = 1.0 / beam.gamma_sq();
            let q = integrate(
                |u| {
                    if u <= 0.0 {
                        return 1.0;
                    }
                    cdf_nakagami(t / (beam.a0 * u.powf(inv_g2)), &params)
                },
                0.0,
                1.0,
                QuadSettings::abs(1e-7),
            )?;
            Ok(q.value.clamp(0.0, 1.0))
        })
        .collect()
}
