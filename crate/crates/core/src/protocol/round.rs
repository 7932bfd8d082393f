use rand::Rng;
use serde::{Deserialize, Serialize};

use super::decode::{decode_fading, decode_nonfading, Decoded};
use super::query::{gen_queries_fading, Group, QueryPair};
use super::server::{Database, ServerState};
use crate::channel::{ChannelRealization, SubsetPartition};
use crate::codebook::Codebook;
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticePoint;
use crate::rates;

/// Which variant of the scheme a round runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Unit gains; servers `0, 2, ...` form the first group and `1, 3, ...`
    /// the second. With odd `N` the last server is neither queried nor heard.
    NonFading,
    /// Arbitrary gains, an explicit partition and integer coefficients `a`.
    Fading {
        partition: SubsetPartition,
        coefficients: [i64; 2],
    },
}

/// Everything a round needs besides its random stream.
#[derive(Debug, Clone, Copy)]
pub struct RoundSetup<'a> {
    pub codebook: &'a Codebook,
    pub channel: &'a ChannelRealization,
    pub scheme: &'a Scheme,
    pub messages: usize,
    /// Requested message; drawn uniformly per round when `None`.
    pub requested: Option<usize>,
    pub alpha: Option<f64>,
    pub noiseless: bool,
}

impl RoundSetup<'_> {
    pub fn validate(&self) -> Result<()> {
        let servers = self.channel.servers();
        if servers < 2 {
            return Err(invalid("servers", "the scheme needs two server groups"));
        }
        if self.messages == 0 {
            return Err(invalid("messages", "need at least one message"));
        }
        if let Some(i) = self.requested {
            if i >= self.messages {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.messages,
                });
            }
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(invalid("alpha", format!("must be finite, got {a}")));
            }
        }
        match self.scheme {
            Scheme::NonFading => {
                if self.channel.gains().iter().any(|&g| g != 1.0) {
                    return Err(invalid("gains", "the non-fading scheme needs unit gains"));
                }
            }
            Scheme::Fading {
                partition,
                coefficients,
            } => {
                partition.validate_for(servers)?;
                if coefficients.contains(&0) {
                    return Err(invalid(
                        "coefficients",
                        format!("entries must be non-zero, got {coefficients:?}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn partition(&self) -> Result<SubsetPartition> {
        match self.scheme {
            Scheme::NonFading => SubsetPartition::alternating(self.channel.servers()),
            Scheme::Fading { partition, .. } => Ok(partition.clone()),
        }
    }

    fn coefficients(&self) -> [i64; 2] {
        match self.scheme {
            Scheme::NonFading => [1, 1],
            Scheme::Fading { coefficients, .. } => *coefficients,
        }
    }
}

/// Full record of one retrieval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub requested: usize,
    pub database: Database,
    pub queries: QueryPair,
    /// Group of each server; `None` for a silent server.
    pub groups: Vec<Option<Group>>,
    pub answers: Vec<Option<LatticePoint>>,
    pub dithers: [LatticePoint; 2],
    pub transmissions: Vec<Option<LatticePoint>>,
    pub output: Vec<f64>,
    pub noise: Vec<f64>,
    pub decoded: Decoded,
    pub success: bool,
    /// The realized equivalent noise, computed from its definition (not from
    /// the decoder).
    pub equivalent_noise: Vec<f64>,
}

impl RoundTrace {
    /// Transmission of the given group (all members send the same point).
    pub fn group_transmission(&self, group: Group) -> Option<&LatticePoint> {
        self.groups
            .iter()
            .zip(&self.transmissions)
            .find(|(g, _)| **g == Some(group))
            .and_then(|(_, x)| x.as_ref())
    }

    /// The requested codeword `v = φ(s_i)`.
    pub fn requested_codeword(&self) -> &LatticePoint {
        &self.database.codewords()[self.requested]
    }
}

/// Runs one packet retrieval end to end.
pub fn run_round<R: Rng + ?Sized>(setup: &RoundSetup<'_>, rng: &mut R) -> Result<RoundTrace> {
    setup.validate()?;
    let codebook = setup.codebook;
    let channel = setup.channel;
    let servers = channel.servers();
    let partition = setup.partition()?;
    let coefficients = setup.coefficients();

    let requested = match setup.requested {
        Some(i) => i,
        None => rng.random_range(0..setup.messages),
    };
    let database = Database::random(setup.messages, codebook, rng)?;
    let queries = gen_queries_fading(setup.messages, requested, coefficients, rng)?;
    let dithers = [
        codebook.pair().sample_dither(rng),
        codebook.pair().sample_dither(rng),
    ];

    let groups: Vec<Option<Group>> = (0..servers)
        .map(|k| partition.group_of(k).and_then(Group::from_index))
        .collect();
    let mut answers = Vec::with_capacity(servers);
    let mut transmissions = Vec::with_capacity(servers);
    for group in &groups {
        match group {
            Some(g) => {
                let server = ServerState {
                    database: &database,
                    codebook,
                    dither: &dithers[g.index()],
                    group: *g,
                };
                let query = queries.query(*g);
                let answer = server.answer(query)?;
                transmissions.push(Some(super::encode_transmit(
                    &answer,
                    server.dither,
                    codebook,
                )?));
                answers.push(Some(answer));
            }
            None => {
                answers.push(None);
                transmissions.push(None);
            }
        }
    }

    let out = if setup.noiseless {
        channel.mac_output::<R>(&transmissions, None)?
    } else {
        channel.mac_output(&transmissions, Some(rng))?
    };

    let x1 = first_of(&groups, &transmissions, Group::First)?;
    let x2 = first_of(&groups, &transmissions, Group::Second)?;
    let selected = queries.selected_bit();
    let (decoded, equivalent_noise) = match setup.scheme {
        Scheme::NonFading => {
            let decoded = decode_nonfading(
                &out.y,
                [&dithers[0], &dithers[1]],
                servers,
                selected,
                codebook,
                setup.alpha,
            )?;
            let alpha = decoded.alpha;
            let scaled = alpha / rates::pairs(servers) as f64;
            let z_eq = (0..codebook.dim())
                .map(|k| scaled * out.noise[k] - (1.0 - alpha) * (x1[k] + x2[k]))
                .collect();
            (decoded, z_eq)
        }
        Scheme::Fading { .. } => {
            let h = partition.effective_gains(channel)?;
            let decoded = decode_fading(
                &out.y,
                [&dithers[0], &dithers[1]],
                coefficients,
                h,
                selected,
                codebook,
                setup.alpha,
            )?;
            let alpha = decoded.alpha;
            let psi = [
                alpha * h[0] - coefficients[0] as f64,
                alpha * h[1] - coefficients[1] as f64,
            ];
            let z_eq = (0..codebook.dim())
                .map(|k| psi[0] * x1[k] + psi[1] * x2[k] + alpha * out.noise[k])
                .collect();
            (decoded, z_eq)
        }
    };

    let success = decoded.packet.as_ref() == Some(&database.packets()[requested]);
    Ok(RoundTrace {
        requested,
        database,
        queries,
        groups,
        answers,
        dithers,
        transmissions,
        output: out.y,
        noise: out.noise,
        decoded,
        success,
        equivalent_noise,
    })
}

fn first_of<'a>(
    groups: &[Option<Group>],
    xs: &'a [Option<LatticePoint>],
    group: Group,
) -> Result<&'a LatticePoint> {
    groups
        .iter()
        .zip(xs)
        .find(|(g, _)| **g == Some(group))
        .and_then(|(_, x)| x.as_ref())
        .ok_or_else(|| Error::InvalidPartition(format!("no server in group {group:?}")))
}
