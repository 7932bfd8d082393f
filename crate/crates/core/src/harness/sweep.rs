use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::channel::{ChannelRealization, SubsetPartition};
use crate::rates;

/// Largest server count the exhaustive partition sweep accepts (`3^N` assignments).
pub const MAX_SWEEP_SERVERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub coefficients: [i64; 2],
    pub effective_gains: [f64; 2],
    pub rate: f64,
}

/// Enumerates every partition of the servers into two non-empty groups (plus
/// silent servers) and every coefficient pair with entries in
/// `±1..=±max_coefficient` (first entry positive), and returns the `top` highest fading rates.
pub fn fading_sweep(
    channel: &ChannelRealization,
    power: f64,
    max_coefficient: i64,
    top: usize,
) -> Result<Vec<SweepRow>, HarnessError> {
    let servers = channel.servers();
    if servers > MAX_SWEEP_SERVERS {
        return Err(HarnessError::Config {
            field: "servers",
            message: format!("sweep supports at most {MAX_SWEEP_SERVERS} servers, got {servers}"),
        });
    }
    if max_coefficient < 1 {
        return Err(HarnessError::Config {
            field: "max_coefficient",
            message: format!("must be at least 1, got {max_coefficient}"),
        });
    }
    let coefficients: Vec<i64> = (-max_coefficient..=max_coefficient)
        .filter(|&a| a != 0)
        .collect();
    let mut rows = Vec::new();
    let assignments = 3usize.pow(servers as u32);
    for code in 0..assignments {
        let (mut first, mut second) = (Vec::new(), Vec::new());
        let mut c = code;
        for k in 0..servers {
            match c % 3 {
                1 => first.push(k),
                2 => second.push(k),
                _ => {}
            }
            c /= 3;
        }
        // (S1, S2, a) and (S2, S1, a reversed) give the same rate
        if first.is_empty() || second.is_empty() || first[0] > second[0] {
            continue;
        }
        let partition = SubsetPartition::new(first, second)?;
        let h = partition.effective_gains(channel)?;
        // (a1, a2) and (-a1, -a2) give the same rate
        for &a1 in coefficients.iter().filter(|&&a| a > 0) {
            for &a2 in &coefficients {
                let rate = rates::rate_fading(power, h, [a1, a2])?;
                rows.push(SweepRow {
                    first: partition.first().to_vec(),
                    second: partition.second().to_vec(),
                    coefficients: [a1, a2],
                    effective_gains: h,
                    rate,
                });
            }
        }
    }
    rows.sort_by(|a, b| b.rate.total_cmp(&a.rate));
    rows.truncate(top);
    Ok(rows)
}
