use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, Packet};
use crate::error::{check_dim, Result};
use crate::lattice::LatticePoint;
use crate::rates;

/// Decoder output for one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    /// Scaling actually applied to the channel output.
    pub alpha: f64,
    /// `[α y + dither terms] mod Λ_c`, before sign correction and before
    /// quantization. Equals `[±v + z_eq] mod Λ_c`.
    pub mlan_output: Vec<f64>,
    /// `[Q_f(·)] mod Λ_c` of the sign-corrected MLAN output.
    pub estimate: LatticePoint,
    /// `None` when the estimate is not the image of any packet.
    pub packet: Option<Packet>,
}

/// Nearest fine point reduced into the coarse cell, and its packet if any.
pub fn lattice_decode(
    point: &[f64],
    codebook: &Codebook,
) -> Result<(LatticePoint, Option<Packet>)> {
    let pair = codebook.pair();
    let estimate = pair.reduce(&pair.fine().quantize(point)?)?;
    let packet = codebook.phi_inv(&estimate).ok();
    Ok((estimate, packet))
}

fn finish(
    mlan_output: Vec<f64>,
    alpha: f64,
    selected_bit: bool,
    codebook: &Codebook,
) -> Result<Decoded> {
    let corrected = if selected_bit {
        mlan_output.clone()
    } else {
        let neg: Vec<f64> = mlan_output.iter().map(|x| -x).collect();
        codebook.pair().coarse().modulo(&neg)?
    };
    let (estimate, packet) = lattice_decode(&corrected, codebook)?;
    Ok(Decoded {
        alpha,
        mlan_output,
        estimate,
        packet,
    })
}

/// Decodes the requested packet from `y = ⌊N/2⌋(x₁ + x₂) + z`.
///
/// Computes `[α′y + d₁ + d₂] mod Λ_c` with `α′ = α/⌊N/2⌋`, negates when
/// `b_i = 0`, then rounds to the fine lattice. `alpha` defaults to the MMSE
/// value for `(N, P)`.
pub fn decode_nonfading(
    y: &[f64],
    dithers: [&LatticePoint; 2],
    servers: usize,
    selected_bit: bool,
    codebook: &Codebook,
    alpha: Option<f64>,
) -> Result<Decoded> {
    let dim = codebook.dim();
    check_dim(dim, y.len())?;
    check_dim(dim, dithers[0].dim())?;
    check_dim(dim, dithers[1].dim())?;
    let alpha = match alpha {
        Some(a) => a,
        None => rates::alpha_opt_nonfading(servers, codebook.power())?,
    };
    let scaled = alpha / rates::pairs(servers) as f64;
    let pre: Vec<f64> = (0..dim)
        .map(|k| scaled * y[k] + dithers[0][k] + dithers[1][k])
        .collect();
    let mlan = codebook.pair().coarse().modulo(&pre)?;
    finish(mlan, alpha, selected_bit, codebook)
}

/// Decodes the requested packet from `y = h̃₁x₁ + h̃₂x₂ + z`.
///
/// Computes `[αy + a₁d₁ + a₂d₂] mod Λ_c`. `alpha` defaults to the minimizer
/// of `α² + P‖αh̃ - a‖²`.
pub fn decode_fading(
    y: &[f64],
    dithers: [&LatticePoint; 2],
    coefficients: [i64; 2],
    effective_gains: [f64; 2],
    selected_bit: bool,
    codebook: &Codebook,
    alpha: Option<f64>,
) -> Result<Decoded> {
    let dim = codebook.dim();
    check_dim(dim, y.len())?;
    check_dim(dim, dithers[0].dim())?;
    check_dim(dim, dithers[1].dim())?;
    let alpha = match alpha {
        Some(a) => a,
        None => rates::alpha_opt_fading(codebook.power(), effective_gains, coefficients)?,
    };
    let (a1, a2) = (coefficients[0] as f64, coefficients[1] as f64);
    let pre: Vec<f64> = (0..dim)
        .map(|k| alpha * y[k] + a1 * dithers[0][k] + a2 * dithers[1][k])
        .collect();
    let mlan = codebook.pair().coarse().modulo(&pre)?;
    finish(mlan, alpha, selected_bit, codebook)
}
