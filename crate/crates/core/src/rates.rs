//! Closed-form rates, equivalent-noise variances and MMSE scalings.
//!
//! All logarithms are base 2, so rates are in bits per channel use. The
//! channel noise has unit variance.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `max(log2 x, 0)`.
pub fn log2_plus(x: f64) -> f64 {
    x.log2().max(0.0)
}

/// Number of server pairs, `⌊N/2⌋`.
pub fn pairs(servers: usize) -> usize {
    servers / 2
}

fn check_servers(servers: usize) -> Result<()> {
    if servers < 2 {
        return Err(invalid(
            "servers",
            format!("need at least 2 servers, got {servers}"),
        ));
    }
    Ok(())
}

fn check_power(power: f64) -> Result<()> {
    if !(power.is_finite() && power > 0.0) {
        return Err(invalid(
            "power",
            format!("must be positive and finite, got {power}"),
        ));
    }
    Ok(())
}

fn check_coefficients(a: [i64; 2]) -> Result<()> {
    if a.contains(&0) {
        return Err(invalid(
            "coefficients",
            format!("entries must be non-zero, got {a:?}"),
        ));
    }
    Ok(())
}

fn check_gains(h: [f64; 2]) -> Result<()> {
    if !h.iter().all(|g| g.is_finite()) {
        return Err(invalid(
            "effective_gains",
            format!("must be finite, got {h:?}"),
        ));
    }
    Ok(())
}

/// `½ log⁺(½ + ⌊N/2⌋² P)`.
pub fn rate_nonfading(servers: usize, power: f64) -> Result<f64> {
    check_servers(servers)?;
    check_power(power)?;
    let k = pairs(servers) as f64;
    Ok(0.5 * log2_plus(0.5 + k * k * power))
}

/// Effective noise variance after dividing the output by `⌊N/2⌋`.
pub fn scaled_noise_variance(servers: usize) -> Result<f64> {
    check_servers(servers)?;
    let k = pairs(servers) as f64;
    Ok(1.0 / (k * k))
}

/// `σ²(α) = 2(1-α)²P + α²⌊N/2⌋⁻²`.
pub fn sigma_eq_nonfading(alpha: f64, servers: usize, power: f64) -> Result<f64> {
    check_power(power)?;
    let noise = scaled_noise_variance(servers)?;
    Ok(2.0 * (1.0 - alpha).powi(2) * power + alpha * alpha * noise)
}

/// `2P / (2P + ⌊N/2⌋⁻²)`.
pub fn alpha_opt_nonfading(servers: usize, power: f64) -> Result<f64> {
    check_power(power)?;
    let noise = scaled_noise_variance(servers)?;
    Ok(2.0 * power / (2.0 * power + noise))
}

/// `2Pσ² / (2P + σ²)` with `σ² = ⌊N/2⌋⁻²`.
pub fn sigma_eq_opt_nonfading(servers: usize, power: f64) -> Result<f64> {
    check_power(power)?;
    let noise = scaled_noise_variance(servers)?;
    Ok(2.0 * power * noise / (2.0 * power + noise))
}

/// `½ log2(1 + N²P)`, the cooperative upper bound.
pub fn miso_capacity(servers: usize, power: f64) -> Result<f64> {
    check_servers(servers)?;
    check_power(power)?;
    let n = servers as f64;
    Ok(0.5 * (1.0 + n * n * power).log2())
}

/// `C_MISO - R`.
pub fn gap(servers: usize, power: f64) -> Result<f64> {
    Ok(miso_capacity(servers, power)? - rate_nonfading(servers, power)?)
}

/// Upper bound on [`gap`]: 1 bit for even `N`, 2 bits for odd `N`.
pub fn gap_bound(servers: usize) -> f64 {
    if servers.is_multiple_of(2) {
        1.0
    } else {
        2.0
    }
}

/// `(1 + N²P) / (2 + (N-1)²P)`; stays below 4 for every `N ≥ 2`, which is
/// what keeps the odd-`N` gap under 2 bits.
pub fn gap_bound_fraction(servers: usize, power: f64) -> Result<f64> {
    check_servers(servers)?;
    check_power(power)?;
    let n = servers as f64;
    Ok((1.0 + n * n * power) / (2.0 + (n - 1.0).powi(2) * power))
}

fn norm_sq(v: [f64; 2]) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

fn coeffs_f64(a: [i64; 2]) -> [f64; 2] {
    [a[0] as f64, a[1] as f64]
}

/// `σ²(α) = α² + P‖αh̃ - a‖²`.
pub fn sigma_eq_fading(alpha: f64, power: f64, h: [f64; 2], a: [i64; 2]) -> Result<f64> {
    check_power(power)?;
    check_gains(h)?;
    check_coefficients(a)?;
    let a = coeffs_f64(a);
    let residual = [alpha * h[0] - a[0], alpha * h[1] - a[1]];
    Ok(alpha * alpha + power * norm_sq(residual))
}

/// The minimizer of [`sigma_eq_fading`], `P(h̃·a) / (1 + P‖h̃‖²)`.
pub fn alpha_opt_fading(power: f64, h: [f64; 2], a: [i64; 2]) -> Result<f64> {
    check_power(power)?;
    check_gains(h)?;
    check_coefficients(a)?;
    let a = coeffs_f64(a);
    Ok(power * (h[0] * a[0] + h[1] * a[1]) / (1.0 + power * norm_sq(h)))
}

/// The three equivalent forms of the fading rate, before the `½ log⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingRateForms {
    /// `‖a‖²‖h̃‖² - (h̃ᵀa)²` written with vector inner products.
    pub inner_product: f64,
    /// The same with `h̃ᵀa` expanded as `a₁h̃₁ + a₂h̃₂`.
    pub expanded: f64,
    /// Cross term collapsed to `(a₁h̃₂ - a₂h̃₁)²`.
    pub cross_term: f64,
}

pub fn rate_fading_forms(power: f64, h: [f64; 2], a: [i64; 2]) -> Result<FadingRateForms> {
    check_power(power)?;
    check_gains(h)?;
    check_coefficients(a)?;
    let af = coeffs_f64(a);
    let numerator = 1.0 + power * norm_sq(h);
    let a_sq = norm_sq(af);

    let dot = h.iter().zip(&af).map(|(x, y)| x * y).sum::<f64>();
    let inner_product = numerator / (a_sq + power * (a_sq * norm_sq(h) - dot * dot));

    let expanded_dot = af[0] * h[0] + af[1] * h[1];
    let expanded =
        numerator / (a_sq + power * (a_sq * (h[0] * h[0] + h[1] * h[1]) - expanded_dot.powi(2)));

    let cross = af[0] * h[1] - af[1] * h[0];
    let cross_term = numerator / (a_sq + power * cross * cross);

    Ok(FadingRateForms {
        inner_product: 0.5 * log2_plus(inner_product),
        expanded: 0.5 * log2_plus(expanded),
        cross_term: 0.5 * log2_plus(cross_term),
    })
}

/// `½ log⁺((1 + P‖h̃‖²) / (‖a‖² + P(a₁h̃₂ - a₂h̃₁)²))`.
pub fn rate_fading(power: f64, h: [f64; 2], a: [i64; 2]) -> Result<f64> {
    rate_fading_forms(power, h, a).map(|f| f.cross_term)
}

/// `½ log⁺(P / σ²)`: the rate supported by an MLAN channel with the given
/// equivalent noise.
pub fn mlan_rate(power: f64, sigma_eq: f64) -> f64 {
    0.5 * log2_plus(power / sigma_eq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonfading_rate_values() {
        let r = rate_nonfading(2, 1.0).unwrap();
        assert!((r - 0.292_481_250_360_578).abs() < 1e-12, "{r}");
        assert_eq!(rate_nonfading(3, 1.0).unwrap(), r);
        assert_eq!(rate_nonfading(9, 1e-9).unwrap(), 0.0);
        assert!(rate_nonfading(1, 1.0).is_err());
        assert!(rate_nonfading(2, 0.0).is_err());
    }

    #[test]
    fn nonfading_alpha() {
        assert!((alpha_opt_nonfading(2, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((sigma_eq_opt_nonfading(2, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let a = alpha_opt_nonfading(2, 1.0).unwrap();
        assert!((sigma_eq_nonfading(a, 2, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        for n in 2..10 {
            let k = (n / 2) as f64;
            assert!((sigma_eq_nonfading(1.0, n, 3.0).unwrap() - 1.0 / (k * k)).abs() < 1e-15);
        }
    }

    #[test]
    fn capacity_and_gap() {
        let c = miso_capacity(2, 1.0).unwrap();
        assert!((c - 1.160_964_047_443_681).abs() < 1e-12, "{c}");
        let g = gap(2, 1.0).unwrap();
        assert!((g - 0.868_482_797_083_103).abs() < 1e-12, "{g}");
        assert_eq!(gap_bound(4), 1.0);
        assert_eq!(gap_bound(5), 2.0);
    }

    #[test]
    fn fading_values() {
        let r = rate_fading(1.0, [1.0, 1.0], [1, 1]).unwrap();
        assert!((r - 0.5 * 1.5f64.log2()).abs() < 1e-15);
        let alpha = alpha_opt_fading(1.0, [1.0, 1.0], [1, 1]).unwrap();
        assert!((alpha - 2.0 / 3.0).abs() < 1e-15);
        let s = sigma_eq_fading(alpha, 1.0, [1.0, 1.0], [1, 1]).unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-15);
        assert!((mlan_rate(1.0, s) - r).abs() < 1e-15);
        // deep fade on the second group clamps to zero
        assert_eq!(rate_fading(3.0, [1.0, 0.0], [1, 1]).unwrap(), 0.0);
        assert!(rate_fading(1.0, [1.0, 1.0], [1, 0]).is_err());
        assert!(alpha_opt_fading(1.0, [1.0, 1.0], [0, 0]).is_err());
    }

    #[test]
    fn aligned_coefficients_kill_cross_term() {
        let h = [1.0, 2.0];
        let best = rate_fading(10.0, h, [1, 2]).unwrap();
        let forms = rate_fading_forms(10.0, h, [1, 2]).unwrap();
        let expected = 0.5 * log2_plus((1.0 + 10.0 * 5.0) / 5.0);
        assert!((forms.cross_term - expected).abs() < 1e-15);
        assert!(best >= rate_fading(10.0, h, [2, 1]).unwrap());
        assert!(best >= rate_fading(10.0, h, [1, 1]).unwrap());
    }

    #[test]
    fn rate_monotone_in_servers_and_power() {
        let powers: Vec<f64> = (0..30).map(|k| 0.01 * 1.4f64.powi(k)).collect();
        for n in 2..20 {
            for w in powers.windows(2) {
                assert!(rate_nonfading(n, w[0]).unwrap() <= rate_nonfading(n, w[1]).unwrap());
            }
            for &p in &powers {
                assert!(rate_nonfading(n, p).unwrap() <= rate_nonfading(n + 1, p).unwrap());
            }
        }
    }
}
