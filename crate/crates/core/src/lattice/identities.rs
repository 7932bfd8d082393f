//! Checkers for the algebraic rules of the modulo-lattice operation, and for
//! the rule that does *not* hold when a real scalar is pulled through a sum of
//! reduced points.

use serde::{Deserialize, Serialize};

use super::{add, scale, sub, LatticePoint, NestedLatticePair};
use crate::error::{check_dim, Error, Result};

/// Absolute tolerance for both sides of an identity to agree.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// One instance of a modulo-lattice identity. `Λ` is the coarse lattice of
/// the pair the identity is checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Identity {
    /// `[s + t] mod Λ = [[s] mod Λ + t] mod Λ`
    Distributive { s: Vec<f64>, t: Vec<f64> },
    /// `[Q_f(s)] mod Λ_c = [Q_f([s] mod Λ_c)] mod Λ_c`
    QuantizeModulo { s: Vec<f64> },
    /// `[a·s] mod Λ = [a·([s] mod Λ)] mod Λ` for integer `a`
    IntegerScaling { a: i64, s: Vec<f64> },
    /// `β·([s] mod Λ) = [β·s] mod βΛ` for real `β ≠ 0`
    RealScaling { factor: f64, s: Vec<f64> },
}

/// Outcome of [`verify_identity`]. Both sides are always reported so that a
/// failure carries its own witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Evaluates both sides of `identity` against `pair` and compares them.
///
/// Sides are compared as cosets, i.e. `holds` is true when
/// `[lhs - rhs] mod Λ` is within [`IDENTITY_TOLERANCE`] of zero (relative to
/// `|β|` for [`Identity::RealScaling`]).
pub fn verify_identity(identity: &Identity, pair: &NestedLatticePair) -> Result<IdentityCheck> {
    let coarse = pair.coarse();
    let fine = pair.fine();
    let (lhs, rhs, lattice, tol) = match identity {
        Identity::Distributive { s, t } => {
            check_dim(pair.dim(), t.len())?;
            let lhs = coarse.modulo(&add(s, t))?;
            let rhs = coarse.modulo(&add(&coarse.modulo(s)?, t))?;
            (lhs, rhs, *coarse, IDENTITY_TOLERANCE)
        }
        Identity::QuantizeModulo { s } => {
            let lhs = coarse.modulo(&fine.quantize(s)?)?;
            let reduced = coarse.modulo(s)?;
            let rhs = coarse.modulo(&fine.quantize(&reduced)?)?;
            (lhs, rhs, *coarse, IDENTITY_TOLERANCE)
        }
        Identity::IntegerScaling { a, s } => {
            let a = *a as f64;
            let lhs = coarse.modulo(&scale(a, s))?;
            let rhs = coarse.modulo(&scale(a, &coarse.modulo(s)?))?;
            (lhs, rhs, *coarse, IDENTITY_TOLERANCE)
        }
        Identity::RealScaling { factor, s } => {
            if *factor == 0.0 || !factor.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "factor",
                    reason: format!("real scaling needs a finite non-zero factor, got {factor}"),
                });
            }
            let scaled = coarse.scaled(*factor)?;
            let lhs = scale(*factor, &coarse.modulo(s)?);
            let rhs = scaled.modulo(&scale(*factor, s))?;
            (lhs, rhs, scaled, IDENTITY_TOLERANCE * factor.abs().max(1.0))
        }
    };
    let holds = lattice.coset_distance(&lhs, &rhs)? <= tol;
    Ok(IdentityCheck { holds, lhs, rhs })
}

/// Both sides of the equality that only holds for integer `alpha`:
///
/// ```text
/// lhs = [α([A1 - d] mod Λc + [A2 - d] mod Λc)] mod Λc
/// rhs = [α([A1 + A2] mod Λc - [2d] mod Λc)] mod Λc
/// ```
///
/// `a1` and `a2` must be fine-lattice points.
pub fn counterexample_eval(
    alpha: f64,
    a1: &LatticePoint,
    a2: &LatticePoint,
    d: &[f64],
    pair: &NestedLatticePair,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let coarse = pair.coarse();
    check_dim(pair.dim(), a1.dim())?;
    check_dim(pair.dim(), a2.dim())?;
    check_dim(pair.dim(), d.len())?;
    if !pair.fine().contains(a1) || !pair.fine().contains(a2) {
        return Err(Error::NotInFineLattice);
    }
    let lhs_inner = add(&coarse.modulo(&sub(a1, d))?, &coarse.modulo(&sub(a2, d))?);
    let lhs = coarse.modulo(&scale(alpha, &lhs_inner))?;
    let rhs_inner = sub(
        &coarse.modulo(&add(a1, a2))?,
        &coarse.modulo(&scale(2.0, d))?,
    );
    let rhs = coarse.modulo(&scale(alpha, &rhs_inner))?;
    Ok((lhs, rhs))
}
