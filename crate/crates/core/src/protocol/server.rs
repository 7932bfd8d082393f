use rand::Rng;
use serde::{Deserialize, Serialize};

use super::query::{to_f64, Group, Rational};
use crate::codebook::{Codebook, Packet};
use crate::error::{check_dim, Result};
use crate::lattice::{sub, LatticePoint};

/// The replicated message store: one packet per message, together with its
/// codeword under the packet mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Database {
    packets: Vec<Packet>,
    codewords: Vec<LatticePoint>,
}

impl Database {
    pub fn new(packets: Vec<Packet>, codebook: &Codebook) -> Result<Self> {
        let codewords = packets
            .iter()
            .map(|p| codebook.phi(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { packets, codewords })
    }

    pub fn random<R: Rng + ?Sized>(
        messages: usize,
        codebook: &Codebook,
        rng: &mut R,
    ) -> Result<Self> {
        let packets = (0..messages)
            .map(|_| Packet::random(codebook.bits(), rng))
            .collect();
        Self::new(packets, codebook)
    }

    pub fn packets(&self) -> &[Packet] {
        &self.packets
    }

    pub fn codewords(&self) -> &[LatticePoint] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

/// `A = [Σ_m query_m · φ(s_m)] mod Λ_c`.
pub fn form_answer(query: &[Rational], db: &Database, codebook: &Codebook) -> Result<LatticePoint> {
    check_dim(db.len(), query.len())?;
    let mut acc = vec![0.0; codebook.dim()];
    for (coef, cw) in query.iter().zip(db.codewords()) {
        let c = to_f64(coef);
        if c != 0.0 {
            for (a, x) in acc.iter_mut().zip(cw.iter()) {
                *a += c * x;
            }
        }
    }
    codebook.pair().reduce(&acc)
}

/// `x = [A - d] mod Λ_c`.
pub fn encode_transmit(
    answer: &LatticePoint,
    dither: &LatticePoint,
    codebook: &Codebook,
) -> Result<LatticePoint> {
    check_dim(answer.dim(), dither.dim())?;
    codebook.pair().reduce(&sub(answer, dither))
}

/// One server's view of a round.
#[derive(Debug, Clone)]
pub struct ServerState<'a> {
    pub database: &'a Database,
    pub codebook: &'a Codebook,
    pub dither: &'a LatticePoint,
    pub group: Group,
}

impl ServerState<'_> {
    pub fn answer(&self, query: &[Rational]) -> Result<LatticePoint> {
        form_answer(query, self.database, self.codebook)
    }

    pub fn transmit(&self, query: &[Rational]) -> Result<LatticePoint> {
        encode_transmit(&self.answer(query)?, self.dither, self.codebook)
    }
}
