//! SVG figures: rate against server count, gap against power, and measured
//! block error rate against power.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::experiment::ExperimentResult;
use super::tables::logspace;
use super::HarnessError;
use crate::rates;

fn plot_err<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Plot(e.to_string())
}

fn nice_max(v: f64) -> f64 {
    if v <= 0.0 {
        1.0
    } else {
        v * 1.1
    }
}

/// Achievable non-fading rate for `N = 2..=max_servers`, one curve per power.
pub fn plot_rate_vs_servers(
    path: &Path,
    powers: &[f64],
    max_servers: usize,
) -> Result<(), HarnessError> {
    let max_servers = max_servers.max(3);
    let mut curves = Vec::new();
    for &p in powers {
        let pts = (2..=max_servers)
            .map(|n| Ok((n as f64, rates::rate_nonfading(n, p)?)))
            .collect::<Result<Vec<_>, crate::Error>>()?;
        curves.push((p, pts));
    }
    let y_max = nice_max(
        curves
            .iter()
            .flat_map(|(_, c)| c.iter().map(|p| p.1))
            .fold(0.0, f64::max),
    );

    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(
            "Achievable PIR rate vs number of servers",
            ("sans-serif", 22),
        )
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(55)
        .build_cartesian_2d(2f64..max_servers as f64, 0f64..y_max)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("N (servers)")
        .y_desc("R (bits / channel use)")
        .draw()
        .map_err(plot_err)?;
    for (i, (p, pts)) in curves.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("P = {p}"))
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
        chart
            .draw_series(pts.into_iter().map(|xy| Circle::new(xy, 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

/// Gap to the cooperative capacity over `P ∈ [0.01, 100]`, one curve per `N`,
/// with the 1- and 2-bit bounds drawn as reference lines.
pub fn plot_gap_vs_power(path: &Path, servers: &[usize]) -> Result<(), HarnessError> {
    let powers = logspace(0.01, 100.0, 200);
    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Gap to MISO sum capacity vs power", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(55)
        .build_cartesian_2d((0.01f64..100.0).log_scale(), 0f64..2.2)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("P")
        .y_desc("C_MISO - R (bits)")
        .draw()
        .map_err(plot_err)?;
    for bound in [1.0, 2.0] {
        chart
            .draw_series(LineSeries::new(
                [(0.01, bound), (100.0, bound)],
                BLACK.mix(0.4).stroke_width(1),
            ))
            .map_err(plot_err)?;
    }
    for (i, &n) in servers.iter().enumerate() {
        let pts = powers
            .iter()
            .map(|&p| Ok((p, rates::gap(n, p)?)))
            .collect::<Result<Vec<_>, crate::Error>>()?;
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("N = {n}"))
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

/// Measured block error rate against power, one series per
/// `(scheme, N, n, q)` combination found in `results`.
pub fn plot_error_vs_power(path: &Path, results: &[ExperimentResult]) -> Result<(), HarnessError> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in results {
        let c = &r.config;
        let key = format!(
            "{:?} N={} n={} q={}",
            c.scheme, c.servers, c.dimension, c.nesting_ratio
        );
        series
            .entry(key)
            .or_default()
            .push((c.power, r.block_error_rate));
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let (mut lo, mut hi) = results
        .iter()
        .map(|r| r.config.power)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p), hi.max(p))
        });
    if !lo.is_finite() {
        (lo, hi) = (0.1, 10.0);
    }
    if hi <= lo {
        hi = lo * 10.0;
    }

    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Block error rate vs power", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(55)
        .build_cartesian_2d((lo * 0.8..hi * 1.25).log_scale(), 0f64..1.05)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("P")
        .y_desc("block error rate")
        .draw()
        .map_err(plot_err)?;
    for (i, (label, pts)) in series.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(label)
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
        chart
            .draw_series(pts.into_iter().map(|xy| Circle::new(xy, 4, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

/// Writes all three figures for a set of results into `out_dir` and returns
/// their paths.
pub fn plot_results(
    results: &[ExperimentResult],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let mut powers: Vec<f64> = results.iter().map(|r| r.config.power).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    if powers.is_empty() {
        powers = vec![1.0, 10.0, 100.0];
    }
    let mut servers: Vec<usize> = results.iter().map(|r| r.config.servers).collect();
    servers.sort_unstable();
    servers.dedup();
    if servers.is_empty() {
        servers = vec![2, 3, 4];
    }
    let max_servers = servers.iter().copied().max().unwrap_or(2).max(20);

    let rate = out_dir.join("rate_vs_servers.svg");
    let gap = out_dir.join("gap_vs_power.svg");
    let error = out_dir.join("error_rate_vs_power.svg");
    plot_rate_vs_servers(&rate, &powers, max_servers)?;
    plot_gap_vs_power(&gap, &servers)?;
    plot_error_vs_power(&error, results)?;
    Ok(vec![rate, gap, error])
}
