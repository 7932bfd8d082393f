//! The nested lattice code `Λ_f ∩ V_c` and the packet mapping.
//!
//! A packet of `l` bits is read as an integer `u < 2^l`, written in base `q`
//! as digits `(u_1, ..., u_n)` (least significant first), and sent to the
//! coset representative of `β·(u_1, ..., u_n)` inside the coarse cell.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::{LatticePoint, NestedLatticePair};

/// A fixed-length bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Packet(Vec<bool>);

impl Packet {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Packet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid("packet", format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Packet)
    }
}

impl Serialize for Packet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Packet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Largest `l` with `2^l ≤ q^n`, i.e. `floor(n·log2 q)` computed exactly.
pub fn max_packet_bits(dim: usize, ratio: u32) -> usize {
    let size = BigUint::from(ratio).pow(dim as u32);
    (size.bits() - 1) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pair: NestedLatticePair,
    power: f64,
    bits: usize,
}

impl Codebook {
    /// Builds the code with fine scale `β = √(12P)/q`, so the coarse cell has
    /// per-dimension second moment exactly `P`.
    pub fn new(dim: usize, ratio: u32, power: f64, bits: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be at least 1"));
        }
        if !(2..=256).contains(&ratio) {
            return Err(invalid(
                "ratio",
                format!("nesting ratio must be in 2..=256, got {ratio}"),
            ));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(invalid(
                "power",
                format!("must be positive and finite, got {power}"),
            ));
        }
        let max = max_packet_bits(dim, ratio);
        if bits == 0 || bits > max {
            return Err(invalid(
                "bits",
                format!("packet length must be in 1..={max} for n={dim}, q={ratio}, got {bits}"),
            ));
        }
        let fine_scale = (12.0 * power).sqrt() / f64::from(ratio);
        let pair = NestedLatticePair::new(dim, fine_scale, ratio)?;
        Ok(Self { pair, power, bits })
    }

    /// Same as [`Codebook::new`] with the largest injective packet length.
    pub fn with_max_bits(dim: usize, ratio: u32, power: f64) -> Result<Self> {
        Self::new(dim, ratio, power, max_packet_bits(dim, ratio))
    }

    pub fn pair(&self) -> &NestedLatticePair {
        &self.pair
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn ratio(&self) -> u32 {
        self.pair.ratio()
    }

    pub fn fine_scale(&self) -> f64 {
        self.pair.fine().scale()
    }

    /// Lattice rate `l/n` in bits per channel use.
    pub fn rate(&self) -> f64 {
        self.bits as f64 / self.dim() as f64
    }

    /// Number of codewords, `q^n`.
    pub fn size(&self) -> BigUint {
        BigUint::from(self.ratio()).pow(self.dim() as u32)
    }

    /// Centered representative of a base-`q` digit, in `[-q/2, q/2)`.
    fn centered(&self, digit: u32) -> i64 {
        let q = self.ratio();
        if 2 * digit >= q {
            i64::from(digit) - i64::from(q)
        } else {
            i64::from(digit)
        }
    }

    /// The packet mapping `φ`.
    pub fn phi(&self, packet: &Packet) -> Result<LatticePoint> {
        if packet.len() != self.bits {
            return Err(invalid(
                "packet",
                format!("expected {} bits, got {}", self.bits, packet.len()),
            ));
        }
        let digits: Vec<u8> = packet.bits().iter().map(|&b| u8::from(b)).collect();
        let value = BigUint::from_radix_be(&digits, 2).unwrap_or_default();
        let mut base_q = value.to_radix_le(self.ratio());
        base_q.resize(self.dim(), 0);
        let beta = self.fine_scale();
        Ok(base_q
            .into_iter()
            .map(|d| self.centered(u32::from(d)) as f64 * beta)
            .collect::<Vec<_>>()
            .into())
    }

    /// Inverse of [`Codebook::phi`]. Accepts any representative of the coset,
    /// since digits are recovered as `round(x/β) mod q`.
    pub fn phi_inv(&self, point: &[f64]) -> Result<Packet> {
        check_dim(self.dim(), point.len())?;
        if !self.pair.fine().contains(point) {
            return Err(Error::NotInFineLattice);
        }
        let q = i64::from(self.ratio());
        let beta = self.fine_scale();
        let digits: Vec<u8> = point
            .iter()
            .map(|&x| ((x / beta).round() as i64).rem_euclid(q) as u8)
            .collect();
        let value = BigUint::from_radix_le(&digits, self.ratio()).unwrap_or_default();
        if value.bits() as usize > self.bits {
            return Err(Error::OutsideImage);
        }
        let mut bits = value.to_radix_be(2);
        if value.bits() == 0 {
            bits.clear();
        }
        let mut out = vec![false; self.bits - bits.len()];
        out.extend(bits.into_iter().map(|b| b == 1));
        Ok(Packet(out))
    }

    /// Whether `point` is a codeword: a fine-lattice point inside the coarse cell.
    pub fn contains(&self, point: &[f64]) -> bool {
        self.pair.fine().contains(point) && self.pair.coarse().in_voronoi(point)
    }
}
