use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GainSpec, PartitionSpec, SchemeKind};
use super::HarnessError;
use crate::channel::{ChannelRealization, SubsetPartition};
use crate::codebook::Codebook;
use crate::protocol::{run_round, RoundSetup, RoundTrace, Scheme};
use crate::rates;

/// Random stream for round `round` of an experiment seeded with `seed`.
///
/// Stream 0 is reserved for the fading gains; round `r` uses stream `r + 1`,
/// so results do not depend on how rounds are scheduled across threads.
pub fn round_rng(seed: u64, round: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(round as u64 + 1);
    rng
}

fn gains_rng(seed: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Aggregated outcome of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rounds: usize,
    pub block_errors: usize,
    pub block_error_rate: f64,
    /// Rounds whose estimate was not the image of any packet.
    pub outside_image: usize,
    pub alpha: f64,
    pub empirical_sigma_eq: f64,
    /// Number of scalar samples behind `empirical_sigma_eq` (`n × rounds`).
    pub sigma_eq_samples: usize,
    pub analytic_sigma_eq: f64,
    /// Closed-form achievable rate for this configuration.
    pub rate_formula: f64,
    /// `l/n`.
    pub lattice_rate: f64,
    /// Distance to the cooperative capacity; non-fading only.
    pub gap: Option<f64>,
    pub gains: Vec<f64>,
    pub effective_gains: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<RoundTrace>>,
    /// Not persisted, so that result files stay bit-identical across runs.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String, HarnessError> {
        serde_json::to_string_pretty(self).map_err(|e| HarnessError::Serialization(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Serialization(format!("{}: {e}", path.display())))
    }

    /// Binomial standard error of the block error rate.
    pub fn block_error_std(&self) -> f64 {
        let p = self.block_error_rate;
        (p * (1.0 - p) / self.rounds as f64).sqrt()
    }
}

struct RoundSummary {
    success: bool,
    outside_image: bool,
    noise_energy: f64,
    trace: Option<RoundTrace>,
}

/// Runs `cfg.rounds` independent retrievals (in parallel on the current
/// rayon pool) and aggregates them.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let started = Instant::now();
    cfg.validate()?;
    let codebook = Codebook::new(
        cfg.dimension,
        cfg.nesting_ratio,
        cfg.power,
        cfg.packet_bits(),
    )?;

    let (channel, scheme) = match cfg.scheme {
        SchemeKind::Nonfading => (
            ChannelRealization::non_fading(cfg.servers)?,
            Scheme::NonFading,
        ),
        SchemeKind::Fading => {
            let f = cfg.fading.clone().unwrap_or_default();
            let channel = match &f.gains {
                GainSpec::Fixed { values } => ChannelRealization::with_gains(values.clone())?,
                GainSpec::Normal { mean, std_dev } => ChannelRealization::draw_fading(
                    cfg.servers,
                    *mean,
                    *std_dev,
                    &mut gains_rng(cfg.seed),
                )?,
            };
            let partition = match &f.partition {
                PartitionSpec::Alternating => SubsetPartition::alternating(cfg.servers)?,
                PartitionSpec::Explicit { first, second } => {
                    SubsetPartition::new(first.clone(), second.clone())?
                }
            };
            (
                channel,
                Scheme::Fading {
                    partition,
                    coefficients: f.coefficients,
                },
            )
        }
    };

    let (effective_gains, alpha, analytic_sigma_eq, rate_formula, gap) = match &scheme {
        Scheme::NonFading => {
            let alpha = match cfg.alpha {
                Some(a) => a,
                None => rates::alpha_opt_nonfading(cfg.servers, cfg.power)?,
            };
            (
                [1.0, 1.0],
                alpha,
                rates::sigma_eq_nonfading(alpha, cfg.servers, cfg.power)?,
                rates::rate_nonfading(cfg.servers, cfg.power)?,
                Some(rates::gap(cfg.servers, cfg.power)?),
            )
        }
        Scheme::Fading {
            partition,
            coefficients,
        } => {
            let h = partition.effective_gains(&channel)?;
            let alpha = match cfg.alpha {
                Some(a) => a,
                None => rates::alpha_opt_fading(cfg.power, h, *coefficients)?,
            };
            (
                h,
                alpha,
                rates::sigma_eq_fading(alpha, cfg.power, h, *coefficients)?,
                rates::rate_fading(cfg.power, h, *coefficients)?,
                None,
            )
        }
    };

    let setup = RoundSetup {
        codebook: &codebook,
        channel: &channel,
        scheme: &scheme,
        messages: cfg.messages,
        requested: cfg.requested,
        alpha: Some(alpha),
        noiseless: cfg.noiseless,
    };
    setup.validate()?;

    let summaries = (0..cfg.rounds)
        .into_par_iter()
        .map(|r| {
            let trace = run_round(&setup, &mut round_rng(cfg.seed, r))?;
            Ok(RoundSummary {
                success: trace.success,
                outside_image: trace.decoded.packet.is_none(),
                noise_energy: trace.equivalent_noise.iter().map(|z| z * z).sum(),
                trace: cfg.keep_traces.then_some(trace),
            })
        })
        .collect::<Result<Vec<_>, crate::Error>>()?;

    // reduce in round order so the floating-point sum is reproducible
    let mut block_errors = 0;
    let mut outside_image = 0;
    let mut energy = 0.0;
    let mut traces = cfg.keep_traces.then(Vec::new);
    for s in summaries {
        block_errors += usize::from(!s.success);
        outside_image += usize::from(s.outside_image);
        energy += s.noise_energy;
        if let (Some(all), Some(t)) = (traces.as_mut(), s.trace) {
            all.push(t);
        }
    }
    let samples = cfg.rounds * cfg.dimension;

    Ok(ExperimentResult {
        config: cfg.clone(),
        rounds: cfg.rounds,
        block_errors,
        block_error_rate: block_errors as f64 / cfg.rounds as f64,
        outside_image,
        alpha,
        empirical_sigma_eq: energy / samples as f64,
        sigma_eq_samples: samples,
        analytic_sigma_eq,
        rate_formula,
        lattice_rate: codebook.rate(),
        gap,
        gains: channel.gains().to_vec(),
        effective_gains,
        traces,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::FadingConfig;

    #[test]
    fn noiseless_has_no_errors() {
        let mut cfg = ExperimentConfig::nonfading(5, 4, 4, 2.0, 50, 3);
        cfg.noiseless = true;
        cfg.alpha = Some(1.0);
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.block_errors, 0);
        assert_eq!(res.block_error_rate, 0.0);
        assert_eq!(res.empirical_sigma_eq, 0.0);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let cfg = ExperimentConfig::nonfading(4, 8, 4, 10.0, 64, 99);
        let a = run_experiment(&cfg).unwrap().to_json().unwrap();
        let b = run_experiment(&cfg).unwrap().to_json().unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool
            .install(|| run_experiment(&cfg))
            .unwrap()
            .to_json()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn sigma_calibration() {
        let cfg = ExperimentConfig::nonfading(4, 50, 4, 10.0, 200, 5);
        let res = run_experiment(&cfg).unwrap();
        let rel = (res.empirical_sigma_eq - res.analytic_sigma_eq).abs() / res.analytic_sigma_eq;
        assert!(rel <= 0.05, "relative error {rel}");
        assert_eq!(res.sigma_eq_samples, 10_000);
    }

    #[test]
    fn fading_gains_drawn_once_from_seed() {
        let mut cfg = ExperimentConfig::nonfading(4, 4, 4, 10.0, 8, 5);
        cfg.scheme = SchemeKind::Fading;
        cfg.fading = Some(FadingConfig::default());
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.gains, b.gains);
        assert_eq!(a.gains.len(), 4);
        assert!(a.gap.is_none());
        cfg.seed = 6;
        assert_ne!(run_experiment(&cfg).unwrap().gains, a.gains);
    }

    #[test]
    fn traces_round_trip() {
        let mut cfg = ExperimentConfig::nonfading(2, 3, 3, 4.0, 5, 12);
        cfg.keep_traces = true;
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.traces.as_ref().unwrap().len(), 5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("result.json");
        res.save(&path).unwrap();
        let back = ExperimentResult::load(&path).unwrap();
        assert_eq!(back.to_json().unwrap(), res.to_json().unwrap());
        assert_eq!(
            ExperimentResult {
                wall_time_secs: 0.0,
                ..res
            },
            back
        );
    }
}
