use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::codebook::max_packet_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Nonfading,
    Fading,
}

/// Where the fading gains come from. Gains are drawn once per experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainSpec {
    Fixed { values: Vec<f64> },
    Normal { mean: f64, std_dev: f64 },
}

impl Default for GainSpec {
    fn default() -> Self {
        GainSpec::Normal {
            mean: 0.0,
            std_dev: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    /// Even-indexed servers against odd-indexed ones.
    #[default]
    Alternating,
    Explicit {
        first: Vec<usize>,
        second: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    #[serde(default)]
    pub gains: GainSpec,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default = "unit_coefficients")]
    pub coefficients: [i64; 2],
}

fn unit_coefficients() -> [i64; 2] {
    [1, 1]
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self {
            gains: GainSpec::default(),
            partition: PartitionSpec::default(),
            coefficients: unit_coefficients(),
        }
    }
}

/// Declarative description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    /// Number of servers `N`.
    pub servers: usize,
    /// Number of messages `M`.
    pub messages: usize,
    /// Lattice dimension `n`.
    pub dimension: usize,
    /// Nesting ratio `q`.
    pub nesting_ratio: u32,
    /// Packet length `l`; defaults to `floor(n log2 q)`.
    #[serde(default)]
    pub packet_bits: Option<usize>,
    /// Per-dimension transmit power `P`.
    pub power: f64,
    pub rounds: usize,
    #[serde(default)]
    pub noiseless: bool,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Requested message (0-based); uniform per round when absent.
    #[serde(default)]
    pub requested: Option<usize>,
    #[serde(default)]
    pub fading: Option<FadingConfig>,
    pub seed: u64,
    #[serde(default)]
    pub keep_traces: bool,
}

fn field(field: &'static str, message: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field,
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Non-fading defaults for quick programmatic use.
    pub fn nonfading(
        servers: usize,
        dimension: usize,
        nesting_ratio: u32,
        power: f64,
        rounds: usize,
        seed: u64,
    ) -> Self {
        Self {
            scheme: SchemeKind::Nonfading,
            servers,
            messages: 4,
            dimension,
            nesting_ratio,
            packet_bits: None,
            power,
            rounds,
            noiseless: false,
            alpha: None,
            requested: None,
            fading: None,
            seed,
            keep_traces: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| field("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn packet_bits(&self) -> usize {
        self.packet_bits
            .unwrap_or_else(|| max_packet_bits(self.dimension, self.nesting_ratio))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.servers < 2 {
            return Err(field(
                "servers",
                format!("need at least 2 servers, got {}", self.servers),
            ));
        }
        if self.messages == 0 {
            return Err(field("messages", "need at least one message"));
        }
        if self.dimension == 0 {
            return Err(field("dimension", "must be at least 1"));
        }
        if !(2..=256).contains(&self.nesting_ratio) {
            return Err(field(
                "nesting_ratio",
                format!("must be in 2..=256, got {}", self.nesting_ratio),
            ));
        }
        let max = max_packet_bits(self.dimension, self.nesting_ratio);
        if let Some(l) = self.packet_bits {
            if l == 0 || l > max {
                return Err(field(
                    "packet_bits",
                    format!("must be in 1..={max}, got {l}"),
                ));
            }
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(field(
                "power",
                format!("must be positive and finite, got {}", self.power),
            ));
        }
        if self.rounds == 0 {
            return Err(field("rounds", "must be at least 1"));
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(field("alpha", format!("must be finite, got {a}")));
            }
        }
        if let Some(i) = self.requested {
            if i >= self.messages {
                return Err(field(
                    "requested",
                    format!("index {i} out of range for {} messages", self.messages),
                ));
            }
        }
        match (self.scheme, &self.fading) {
            (SchemeKind::Nonfading, Some(_)) => {
                return Err(field("fading", "only valid with scheme \"fading\""));
            }
            (SchemeKind::Fading, None) => {
                return Err(field("fading", "required with scheme \"fading\""));
            }
            (SchemeKind::Fading, Some(f)) => {
                if f.coefficients.contains(&0) {
                    return Err(field("fading.coefficients", "entries must be non-zero"));
                }
                match &f.gains {
                    GainSpec::Fixed { values } => {
                        if values.len() != self.servers {
                            return Err(field(
                                "fading.gains.values",
                                format!("expected {} gains, got {}", self.servers, values.len()),
                            ));
                        }
                        if values.iter().any(|g| !g.is_finite()) {
                            return Err(field("fading.gains.values", "gains must be finite"));
                        }
                    }
                    GainSpec::Normal { mean, std_dev } => {
                        if !(mean.is_finite() && std_dev.is_finite() && *std_dev >= 0.0) {
                            return Err(field(
                                "fading.gains",
                                "need finite mean and non-negative std_dev",
                            ));
                        }
                    }
                }
                if let PartitionSpec::Explicit { first, second } = &f.partition {
                    crate::channel::SubsetPartition::new(first.clone(), second.clone())
                        .and_then(|p| p.validate_for(self.servers))
                        .map_err(|e| field("fading.partition", e.to_string()))?;
                }
            }
            (SchemeKind::Nonfading, None) => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::nonfading(4, 8, 4, 10.0, 10, 1)
    }

    #[test]
    fn defaults_parse() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"scheme":"nonfading","servers":4,"messages":3,"dimension":8,
                "nesting_ratio":4,"power":10.0,"rounds":5,"seed":42}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.packet_bits(), 16);
        assert!(!cfg.noiseless);
    }

    #[test]
    fn fading_parse() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"scheme":"fading","servers":3,"messages":3,"dimension":8,
                "nesting_ratio":4,"power":10.0,"rounds":5,"seed":42,
                "fading":{"gains":{"kind":"fixed","values":[1.0,0.5,0.5]},
                          "partition":{"kind":"explicit","first":[0],"second":[1,2]},
                          "coefficients":[1,1]}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
    }

    #[test]
    fn field_level_errors() {
        let check = |cfg: ExperimentConfig, name: &str| match cfg.validate() {
            Err(HarnessError::Config { field, .. }) => assert_eq!(field, name),
            other => panic!("expected config error on {name}, got {other:?}"),
        };
        check(
            ExperimentConfig {
                servers: 1,
                ..base()
            },
            "servers",
        );
        check(
            ExperimentConfig {
                power: -1.0,
                ..base()
            },
            "power",
        );
        check(
            ExperimentConfig {
                packet_bits: Some(17),
                ..base()
            },
            "packet_bits",
        );
        check(
            ExperimentConfig {
                nesting_ratio: 1,
                ..base()
            },
            "nesting_ratio",
        );
        check(
            ExperimentConfig {
                rounds: 0,
                ..base()
            },
            "rounds",
        );
        check(
            ExperimentConfig {
                requested: Some(4),
                ..base()
            },
            "requested",
        );
        check(
            ExperimentConfig {
                scheme: SchemeKind::Fading,
                ..base()
            },
            "fading",
        );
        let mut f = ExperimentConfig {
            scheme: SchemeKind::Fading,
            fading: Some(FadingConfig::default()),
            ..base()
        };
        f.fading.as_mut().unwrap().coefficients = [0, 1];
        check(f, "fading.coefficients");
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"scheme":"nonfading","servers":4,"messages":3,"dimension":8,
                "nesting_ratio":4,"power":10.0,"rounds":5,"seed":42,"colour":"red"}"#,
        );
        assert!(r.is_err());
    }
}
