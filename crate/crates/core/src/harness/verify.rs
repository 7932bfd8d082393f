use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::lattice::{
    counterexample_eval, verify_identity, Identity, IdentityCheck, LatticePoint, NestedLatticePair,
    IDENTITY_TOLERANCE,
};

/// Dimensions cycled through by the randomized identity checks.
pub const FUZZ_DIMENSIONS: [usize; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Distributive,
    QuantizeModulo,
    IntegerScaling,
    RealScaling,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 4] = [
        IdentityKind::Distributive,
        IdentityKind::QuantizeModulo,
        IdentityKind::IntegerScaling,
        IdentityKind::RealScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Distributive => "distributive",
            IdentityKind::QuantizeModulo => "quantize_mod",
            IdentityKind::IntegerScaling => "int_scale",
            IdentityKind::RealScaling => "real_scale",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityStats {
    pub kind: IdentityKind,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<IdentityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub lhs: f64,
    pub rhs: f64,
    pub equal: bool,
}

impl CounterexampleReport {
    pub fn line(&self) -> String {
        format!("lhs={:?} rhs={:?} equal={}", self.lhs, self.rhs, self.equal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuiteReport {
    pub identities: Vec<IdentityStats>,
    pub counterexample: CounterexampleReport,
}

impl IdentitySuiteReport {
    /// True identities all held, and the false one was witnessed false.
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|s| s.failures == 0) && !self.counterexample.equal
    }
}

/// Random nested pair and a point with coordinates in `[-10qβ, 10qβ]`.
pub fn random_instance<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (NestedLatticePair, Vec<f64>) {
    let ratio = rng.random_range(2..=8u32);
    let beta = rng.random_range(0.25..4.0);
    let pair = NestedLatticePair::new(dim, beta, ratio).expect("valid random pair");
    let span = 10.0 * pair.coarse().scale();
    let s = (0..dim).map(|_| rng.random_range(-span..=span)).collect();
    (pair, s)
}

pub fn random_identity<R: Rng + ?Sized>(
    kind: IdentityKind,
    dim: usize,
    rng: &mut R,
) -> (NestedLatticePair, Identity) {
    let (pair, s) = random_instance(dim, rng);
    let span = 10.0 * pair.coarse().scale();
    let identity = match kind {
        IdentityKind::Distributive => {
            let t = (0..dim).map(|_| rng.random_range(-span..=span)).collect();
            Identity::Distributive { s, t }
        }
        IdentityKind::QuantizeModulo => Identity::QuantizeModulo { s },
        IdentityKind::IntegerScaling => Identity::IntegerScaling {
            a: rng.random_range(-10..=10),
            s,
        },
        IdentityKind::RealScaling => {
            let magnitude = rng.random_range(0.1..5.0);
            let factor = if rng.random() { magnitude } else { -magnitude };
            Identity::RealScaling { factor, s }
        }
    };
    (pair, identity)
}

/// Both sides of the false rule at `α = ½, A₁ = 2, A₂ = 1, d = 0` on `ℤ/5ℤ`.
pub fn reference_counterexample() -> Result<CounterexampleReport, HarnessError> {
    let pair = NestedLatticePair::new(1, 1.0, 5)?;
    let (lhs, rhs) = counterexample_eval(
        0.5,
        &LatticePoint::new(vec![2.0]),
        &LatticePoint::new(vec![1.0]),
        &[0.0],
        &pair,
    )?;
    let equal = pair.coarse().coset_distance(&lhs, &rhs)? <= IDENTITY_TOLERANCE;
    Ok(CounterexampleReport {
        lhs: lhs[0],
        rhs: rhs[0],
        equal,
    })
}

/// Checks every identity on `trials` random inputs.
pub fn run_identity_suite(trials: usize, seed: u64) -> Result<IdentitySuiteReport, HarnessError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut identities = Vec::new();
    for kind in IdentityKind::ALL {
        let mut stats = IdentityStats {
            kind,
            trials,
            failures: 0,
            first_failure: None,
        };
        for t in 0..trials {
            let dim = FUZZ_DIMENSIONS[t % FUZZ_DIMENSIONS.len()];
            let (pair, identity) = random_identity(kind, dim, &mut rng);
            let check = verify_identity(&identity, &pair)?;
            if !check.holds {
                stats.failures += 1;
                stats.first_failure.get_or_insert(check);
            }
        }
        identities.push(stats);
    }
    Ok(IdentitySuiteReport {
        identities,
        counterexample: reference_counterexample()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_line() {
        let r = reference_counterexample().unwrap();
        assert_eq!(r.line(), "lhs=1.5 rhs=-1.0 equal=false");
    }

    #[test]
    fn small_suite_passes() {
        let report = run_identity_suite(500, 1).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
