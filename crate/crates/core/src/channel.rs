//! Gaussian multiple-access channel with optional block fading.
//!
//! The noise variance is fixed to 1, so the per-dimension transmit power `P`
//! is also the per-server SNR.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::LatticePoint;

pub const NOISE_VARIANCE: f64 = 1.0;

/// Channel gains `h_k` for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    gains: Vec<f64>,
}

impl ChannelRealization {
    /// All gains equal to one.
    pub fn non_fading(servers: usize) -> Result<Self> {
        Self::with_gains(vec![1.0; servers])
    }

    pub fn with_gains(gains: Vec<f64>) -> Result<Self> {
        if gains.len() < 2 {
            return Err(invalid(
                "servers",
                format!("need at least 2 servers, got {}", gains.len()),
            ));
        }
        if let Some(g) = gains.iter().find(|g| !g.is_finite()) {
            return Err(invalid("gains", format!("gains must be finite, got {g}")));
        }
        Ok(Self { gains })
    }

    /// Draws one block of i.i.d. normal gains.
    pub fn draw_fading<R: Rng + ?Sized>(
        servers: usize,
        mean: f64,
        std_dev: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let dist = Normal::new(mean, std_dev)
            .map_err(|e| invalid("gains", format!("bad gain distribution: {e}")))?;
        Self::with_gains((0..servers).map(|_| dist.sample(rng)).collect())
    }

    pub fn servers(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn noise_variance(&self) -> f64 {
        NOISE_VARIANCE
    }

    /// `y = Σ h_k x_k + z`. Silent servers are `None`. Passing no `rng`
    /// selects the noiseless channel, where `z = 0`.
    pub fn mac_output<R: Rng + ?Sized>(
        &self,
        xs: &[Option<LatticePoint>],
        rng: Option<&mut R>,
    ) -> Result<ChannelOutput> {
        check_dim(self.servers(), xs.len())?;
        let dim = xs
            .iter()
            .flatten()
            .map(LatticePoint::dim)
            .next()
            .ok_or_else(|| invalid("xs", "no server transmits"))?;
        let mut y = vec![0.0; dim];
        for (x, &h) in xs.iter().zip(&self.gains) {
            if let Some(x) = x {
                check_dim(dim, x.dim())?;
                for (yi, xi) in y.iter_mut().zip(x.iter()) {
                    *yi += h * xi;
                }
            }
        }
        let noise: Vec<f64> = match rng {
            Some(rng) => (0..dim).map(|_| StandardNormal.sample(rng)).collect(),
            None => vec![0.0; dim],
        };
        for (yi, zi) in y.iter_mut().zip(&noise) {
            *yi += zi;
        }
        Ok(ChannelOutput { y, noise })
    }
}

/// Received vector together with the noise realization that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutput {
    pub y: Vec<f64>,
    pub noise: Vec<f64>,
}

/// Two disjoint, non-empty groups of servers (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPartition {
    first: Vec<usize>,
    second: Vec<usize>,
}

impl SubsetPartition {
    pub fn new(first: Vec<usize>, second: Vec<usize>) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::InvalidPartition(
                "both groups must be non-empty".into(),
            ));
        }
        let mut all: Vec<usize> = first.iter().chain(&second).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition(
                "groups must be disjoint and free of repeated servers".into(),
            ));
        }
        Ok(Self { first, second })
    }

    /// Servers `0, 2, 4, ...` against `1, 3, 5, ...`; with an odd count the
    /// last server belongs to neither group.
    pub fn alternating(servers: usize) -> Result<Self> {
        let pairs = servers / 2;
        Self::new(
            (0..pairs).map(|k| 2 * k).collect(),
            (0..pairs).map(|k| 2 * k + 1).collect(),
        )
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    pub fn second(&self) -> &[usize] {
        &self.second
    }

    /// Group of server `k`: `Some(0)`, `Some(1)`, or `None` when silent.
    pub fn group_of(&self, server: usize) -> Option<usize> {
        if self.first.contains(&server) {
            Some(0)
        } else if self.second.contains(&server) {
            Some(1)
        } else {
            None
        }
    }

    pub fn validate_for(&self, servers: usize) -> Result<()> {
        match self
            .first
            .iter()
            .chain(&self.second)
            .find(|&&k| k >= servers)
        {
            Some(k) => Err(Error::InvalidPartition(format!(
                "server {k} does not exist among {servers} servers"
            ))),
            None => Ok(()),
        }
    }

    /// `h̃ = (Σ_{S1} h_k, Σ_{S2} h_k)`.
    pub fn effective_gains(&self, ch: &ChannelRealization) -> Result<[f64; 2]> {
        self.validate_for(ch.servers())?;
        let sum = |set: &[usize]| set.iter().map(|&k| ch.gains[k]).sum::<f64>();
        Ok([sum(&self.first), sum(&self.second)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type NoRng = ChaCha8Rng;

    fn pt(v: &[f64]) -> Option<LatticePoint> {
        Some(LatticePoint::new(v.to_vec()))
    }

    #[test]
    fn noiseless_zero() {
        let ch = ChannelRealization::non_fading(3).unwrap();
        let out = ch
            .mac_output::<NoRng>(&[pt(&[0.0, 0.0]), pt(&[0.0, 0.0]), pt(&[0.0, 0.0])], None)
            .unwrap();
        assert_eq!(out.y, vec![0.0, 0.0]);
        assert_eq!(out.noise, vec![0.0, 0.0]);
    }

    #[test]
    fn noiseless_grouped_sum() {
        let ch = ChannelRealization::non_fading(4).unwrap();
        let x1 = [0.25, -1.5];
        let x2 = [1.0, 0.75];
        let out = ch
            .mac_output::<NoRng>(&[pt(&x1), pt(&x2), pt(&x1), pt(&x2)], None)
            .unwrap();
        assert_eq!(out.y, vec![2.0 * (x1[0] + x2[0]), 2.0 * (x1[1] + x2[1])]);
    }

    #[test]
    fn silent_server_contributes_nothing() {
        let ch = ChannelRealization::with_gains(vec![1.0, 2.0, 7.0]).unwrap();
        let out = ch
            .mac_output::<NoRng>(&[pt(&[1.0]), pt(&[1.0]), None], None)
            .unwrap();
        assert_eq!(out.y, vec![3.0]);
    }

    #[test]
    fn noiseless_is_linear() {
        let ch = ChannelRealization::with_gains(vec![0.3, -1.2]).unwrap();
        let a = ch
            .mac_output::<NoRng>(&[pt(&[1.0]), pt(&[2.0])], None)
            .unwrap()
            .y[0];
        let b = ch
            .mac_output::<NoRng>(&[pt(&[3.0]), pt(&[-1.0])], None)
            .unwrap()
            .y[0];
        let ab = ch
            .mac_output::<NoRng>(&[pt(&[4.0]), pt(&[1.0])], None)
            .unwrap()
            .y[0];
        assert!((a + b - ab).abs() < 1e-12);
    }

    #[test]
    fn mismatched_inputs() {
        let ch = ChannelRealization::non_fading(2).unwrap();
        assert!(ch.mac_output::<NoRng>(&[pt(&[1.0])], None).is_err());
        assert!(ch
            .mac_output::<NoRng>(&[pt(&[1.0]), pt(&[1.0, 2.0])], None)
            .is_err());
        assert!(ch.mac_output::<NoRng>(&[None, None], None).is_err());
        assert!(ChannelRealization::non_fading(1).is_err());
    }

    #[test]
    fn noise_variance_is_one() {
        let ch = ChannelRealization::non_fading(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = vec![0.0; 100_000];
        let out = ch
            .mac_output(&[pt(&zero), pt(&zero)], Some(&mut rng))
            .unwrap();
        let var = out.y.iter().map(|z| z * z).sum::<f64>() / out.y.len() as f64;
        assert!((var - 1.0).abs() < 0.02, "var {var}");
        assert_eq!(out.y, out.noise);
    }

    #[test]
    fn independent_streams_uncorrelated() {
        let ch = ChannelRealization::non_fading(2).unwrap();
        let zero = vec![0.0; 100_000];
        let mut r1 = ChaCha8Rng::seed_from_u64(100);
        let mut r2 = ChaCha8Rng::seed_from_u64(101);
        let a = ch
            .mac_output(&[pt(&zero), pt(&zero)], Some(&mut r1))
            .unwrap()
            .noise;
        let b = ch
            .mac_output(&[pt(&zero), pt(&zero)], Some(&mut r2))
            .unwrap()
            .noise;
        let corr = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64;
        assert!(corr.abs() < 0.01, "corr {corr}");
    }

    #[test]
    fn effective_gain_sums() {
        let ch = ChannelRealization::non_fading(2).unwrap();
        let part = SubsetPartition::new(vec![0], vec![1]).unwrap();
        assert_eq!(part.effective_gains(&ch).unwrap(), [1.0, 1.0]);

        let ch = ChannelRealization::with_gains(vec![0.5, 2.0, 1.0]).unwrap();
        let part = SubsetPartition::new(vec![0, 1], vec![2]).unwrap();
        assert_eq!(part.effective_gains(&ch).unwrap(), [2.5, 1.0]);
    }

    #[test]
    fn invalid_partitions() {
        assert!(SubsetPartition::new(vec![0, 1], vec![1]).is_err());
        assert!(SubsetPartition::new(vec![], vec![1]).is_err());
        assert!(SubsetPartition::new(vec![0, 0], vec![1]).is_err());
        let part = SubsetPartition::new(vec![0], vec![5]).unwrap();
        let ch = ChannelRealization::non_fading(3).unwrap();
        assert!(part.effective_gains(&ch).is_err());
    }

    #[test]
    fn alternating_drops_odd_server() {
        let part = SubsetPartition::alternating(5).unwrap();
        assert_eq!(part.first(), &[0, 2]);
        assert_eq!(part.second(), &[1, 3]);
        assert_eq!(part.group_of(4), None);
        assert!(SubsetPartition::alternating(1).is_err());
    }
}
