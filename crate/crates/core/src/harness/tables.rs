use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::rates;

/// One row of a rate/gap table. Column names are fixed by the CSV header
/// `N,P,R,C_miso,gap,bound,ok`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    #[serde(rename = "N")]
    pub servers: usize,
    #[serde(rename = "P")]
    pub power: f64,
    #[serde(rename = "R")]
    pub rate: f64,
    #[serde(rename = "C_miso")]
    pub capacity: f64,
    pub gap: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `count` points spaced evenly in log scale from `start` to `end`, inclusive.
pub fn logspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.log10(), end.log10());
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|k| 10f64.powf(a + step * k as f64))
                .collect()
        }
    }
}

/// Server counts and powers on which the gap bound is checked.
pub fn gap_grid() -> (RangeInclusive<usize>, Vec<f64>) {
    (2..=20, logspace(0.01, 100.0, 50))
}

pub fn rates_table(
    servers: RangeInclusive<usize>,
    powers: &[f64],
) -> Result<Vec<RateRow>, HarnessError> {
    if servers.is_empty() || *servers.start() < 2 {
        return Err(HarnessError::Config {
            field: "servers",
            message: format!(
                "server range must be non-empty and start at 2 or more, got {servers:?}"
            ),
        });
    }
    if powers.is_empty() {
        return Err(HarnessError::Config {
            field: "powers",
            message: "no powers given".into(),
        });
    }
    let mut rows = Vec::new();
    for n in servers {
        for &p in powers {
            let rate = rates::rate_nonfading(n, p)?;
            let capacity = rates::miso_capacity(n, p)?;
            let gap = capacity - rate;
            let bound = rates::gap_bound(n);
            rows.push(RateRow {
                servers: n,
                power: p,
                rate,
                capacity,
                gap,
                bound,
                ok: gap <= bound,
            });
        }
    }
    Ok(rows)
}

/// Rate table on the full gap-bound grid.
pub fn gap_scan() -> Result<Vec<RateRow>, HarnessError> {
    let (servers, powers) = gap_grid();
    rates_table(servers, &powers)
}

pub fn write_csv<W: Write>(rows: &[RateRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| HarnessError::Serialization(e.to_string()))?;
    }
    w.flush()
        .map_err(|e| HarnessError::Serialization(e.to_string()))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<RateRow>, HarnessError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| HarnessError::Serialization(e.to_string()))
}
