//! Scaled integer lattices and nested pairs.
//!
//! Every lattice here is `β·ℤⁿ`, so the closest lattice point is found by
//! coordinatewise rounding. Ties are broken toward `+∞`, which makes the
//! fundamental Voronoi cell the half-open box `[-β/2, β/2)ⁿ`.

mod identities;

pub use identities::{
    counterexample_eval, verify_identity, Identity, IdentityCheck, IDENTITY_TOLERANCE,
};

use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};

/// Relative tolerance used by membership tests.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// A point of `ℝⁿ` that is manipulated modulo a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<f64>);

impl LatticePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LatticePoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for LatticePoint {
    fn from(coords: Vec<f64>) -> Self {
        Self(coords)
    }
}

/// Round half up: the nearest integer, with exact halves sent toward `+∞`.
pub(crate) fn round_half_up(x: f64) -> f64 {
    let floor = x.floor();
    if x - floor >= 0.5 {
        floor + 1.0
    } else {
        floor
    }
}

/// The lattice `β·ℤⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledIntegerLattice {
    dim: usize,
    scale: f64,
}

impl ScaledIntegerLattice {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "lattice dimension must be at least 1"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(
                "scale",
                format!("must be a positive finite number, got {scale}"),
            ));
        }
        Ok(Self { dim, scale })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The lattice `|factor|·Λ` (as a point set `factor·Λ` equals `|factor|·Λ`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.scale * factor.abs())
    }

    /// Integer index of the closest lattice point along one coordinate.
    ///
    /// The residual is forced into `[-β/2, β/2)` so that `x - index·β` always
    /// lands in the half-open cell even when `x/β` rounds badly.
    fn index(&self, x: f64) -> f64 {
        let mut k = round_half_up(x / self.scale);
        let r = x - k * self.scale;
        let half = 0.5 * self.scale;
        if r >= half {
            k += 1.0;
        } else if r < -half {
            k -= 1.0;
        }
        k
    }

    /// Closest lattice point `Q_Λ(s)`.
    pub fn quantize(&self, s: &[f64]) -> Result<LatticePoint> {
        check_dim(self.dim, s.len())?;
        Ok(s.iter()
            .map(|&x| self.index(x) * self.scale)
            .collect::<Vec<_>>()
            .into())
    }

    /// Quantization error `[s] mod Λ = s - Q_Λ(s)`.
    pub fn modulo(&self, s: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, s.len())?;
        Ok(s.iter().map(|&x| x - self.index(x) * self.scale).collect())
    }

    /// Whether `s` lies in the fundamental Voronoi cell `[-β/2, β/2)ⁿ`.
    pub fn in_voronoi(&self, s: &[f64]) -> bool {
        let half = 0.5 * self.scale;
        s.len() == self.dim && s.iter().all(|&x| (-half..half).contains(&x))
    }

    /// Membership test: `p/β ∈ ℤⁿ` up to a relative tolerance.
    pub fn contains_within(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.dim
            && p.iter().all(|&x| {
                let t = x / self.scale;
                (t - t.round()).abs() <= tol * t.abs().max(1.0)
            })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.contains_within(p, MEMBERSHIP_TOLERANCE)
    }

    /// Largest coordinate of `[a - b] mod Λ` in absolute value.
    ///
    /// Zero exactly when `a` and `b` are in the same coset of `Λ`; this is
    /// the comparison to use for two reduced points, since float error can
    /// move a point across the boundary of the half-open cell.
    pub fn coset_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, b.len())?;
        Ok(a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = x - y;
                (d - self.index(d) * self.scale).abs()
            })
            .fold(0.0, f64::max))
    }
}

/// A self-similar nested pair `Λ_c = q·Λ_f ⊂ Λ_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedLatticePair {
    fine: ScaledIntegerLattice,
    coarse: ScaledIntegerLattice,
    ratio: u32,
}

impl NestedLatticePair {
    pub fn new(dim: usize, fine_scale: f64, ratio: u32) -> Result<Self> {
        if ratio < 2 {
            return Err(invalid(
                "ratio",
                format!("nesting ratio must be at least 2, got {ratio}"),
            ));
        }
        let fine = ScaledIntegerLattice::new(dim, fine_scale)?;
        let coarse = ScaledIntegerLattice::new(dim, f64::from(ratio) * fine_scale)?;
        Ok(Self {
            fine,
            coarse,
            ratio,
        })
    }

    pub fn fine(&self) -> &ScaledIntegerLattice {
        &self.fine
    }

    pub fn coarse(&self) -> &ScaledIntegerLattice {
        &self.coarse
    }

    pub fn ratio(&self) -> u32 {
        self.ratio
    }

    pub fn dim(&self) -> usize {
        self.fine.dim
    }

    /// Per-dimension second moment of the uniform law on the coarse cell, `(qβ)²/12`.
    pub fn second_moment(&self) -> f64 {
        self.coarse.scale * self.coarse.scale / 12.0
    }

    /// A dither uniform over the coarse Voronoi cell.
    pub fn sample_dither<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticePoint {
        let half = 0.5 * self.coarse.scale;
        (0..self.dim())
            .map(|_| rng.random_range(-half..half))
            .collect::<Vec<_>>()
            .into()
    }

    /// `[s] mod Λ_c`.
    pub fn reduce(&self, s: &[f64]) -> Result<LatticePoint> {
        self.coarse.modulo(s).map(LatticePoint::from)
    }
}

/// Coordinatewise `a + b`.
pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Coordinatewise `a - b`.
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn scale(c: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn five_z() -> ScaledIntegerLattice {
        ScaledIntegerLattice::new(1, 5.0).unwrap()
    }

    #[test]
    fn quantize_examples() {
        let lat = five_z();
        assert_eq!(lat.quantize(&[2.0]).unwrap().coords(), &[0.0]);
        assert_eq!(lat.quantize(&[3.0]).unwrap().coords(), &[5.0]);
        let any = ScaledIntegerLattice::new(3, 0.37).unwrap();
        assert_eq!(any.quantize(&[0.0; 3]).unwrap().coords(), &[0.0; 3]);
    }

    #[test]
    fn modulo_examples() {
        let lat = five_z();
        assert_eq!(lat.modulo(&[3.0]).unwrap(), vec![-2.0]);
        assert_eq!(lat.modulo(&[1.25]).unwrap(), vec![1.25]);
        assert_eq!(lat.modulo(&[-2.5]).unwrap(), vec![-2.5]);
    }

    #[test]
    fn tie_goes_up() {
        // |7.5 - 10| = |7.5 - 5|; the tie resolves to 10.
        let lat = five_z();
        assert_eq!((7.5f64 - 10.0).abs(), (7.5f64 - 5.0).abs());
        assert_eq!(lat.quantize(&[7.5]).unwrap().coords(), &[10.0]);
        assert_eq!(lat.modulo(&[7.5]).unwrap(), vec![-2.5]);
        assert_eq!(lat.modulo(&[2.5]).unwrap(), vec![-2.5]);
        assert!(lat.in_voronoi(&[-2.5]));
        assert!(!lat.in_voronoi(&[2.5]));
    }

    #[test]
    fn dimension_mismatch() {
        let lat = ScaledIntegerLattice::new(2, 1.0).unwrap();
        assert!(matches!(
            lat.quantize(&[1.0]),
            Err(crate::Error::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        ));
        assert!(lat.modulo(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn invalid_construction() {
        assert!(ScaledIntegerLattice::new(0, 1.0).is_err());
        assert!(ScaledIntegerLattice::new(1, 0.0).is_err());
        assert!(ScaledIntegerLattice::new(1, f64::NAN).is_err());
        assert!(NestedLatticePair::new(1, 1.0, 1).is_err());
        assert!(NestedLatticePair::new(1, 1.0, 0).is_err());
    }

    #[test]
    fn second_moment_normalization() {
        let pair = NestedLatticePair::new(1, 12f64.sqrt() / 2.0, 2).unwrap();
        assert!((pair.second_moment() - 1.0).abs() < 1e-12);
        let p: f64 = 5.0;
        let pair = NestedLatticePair::new(3, (12.0 * p).sqrt() / 4.0, 4).unwrap();
        assert!((pair.second_moment() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dither_moments() {
        let pair = NestedLatticePair::new(1, 0.75, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| pair.sample_dither(&mut rng)[0])
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let second = samples.iter().map(|x| x * x).sum::<f64>() / n;
        let sigma = pair.second_moment().sqrt();
        assert!(mean.abs() <= 3.0 * sigma / n.sqrt(), "mean {mean}");
        assert!(
            (second / pair.second_moment() - 1.0).abs() <= 0.02,
            "second moment {second}"
        );
        assert!(samples.iter().all(|&x| pair.coarse().in_voronoi(&[x])));
    }

    #[test]
    fn coset_distance_sees_through_boundary() {
        let lat = five_z();
        assert!(lat.coset_distance(&[-2.5], &[2.5]).unwrap() < 1e-12);
        assert!((lat.coset_distance(&[1.5], &[-1.0]).unwrap() - 2.5).abs() < 1e-12);
    }
}
