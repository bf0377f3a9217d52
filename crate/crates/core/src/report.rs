//! Output emission: CSV tables, the JSON run manifest, histograms and
//! simple SVG plots.

use crate::chain::{ChainConfig, StageSamples};
use crate::config_io;
use crate::error::{Error, Result};
use crate::metrics::{Histogram2d, MetricsReport};
use crate::receiver::NoisePoint;
use crate::sweep::SweepTable;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Environment variable selecting the default output directory.
pub const OUT_DIR_ENV: &str = "CVQKD_SIM_OUT";

/// Version string recorded in manifests.
pub fn version_string() -> String {
    format!("cvqkd-core {}", env!("CARGO_PKG_VERSION"))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    write_text(path, &table.to_csv())
}

/// Long-format histogram CSV: one row per bin with its edges and count.
pub fn hist2d_csv(hist: &Histogram2d) -> String {
    let mut out = String::from("x_lo,x_hi,y_lo,y_hi,count\n");
    let nx = hist.n_bins_x();
    for iy in 0..hist.n_bins_y() {
        for ix in 0..nx {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                hist.x_edges[ix],
                hist.x_edges[ix + 1],
                hist.y_edges[iy],
                hist.y_edges[iy + 1],
                hist.counts[iy * nx + ix]
            ));
        }
    }
    out
}

pub fn write_hist2d_csv(path: &Path, hist: &Histogram2d) -> Result<()> {
    write_text(path, &hist2d_csv(hist))
}

/// Noise-characterization CSV for LO-power sweeps.
pub fn noise_csv(points: &[NoisePoint]) -> String {
    let mut out =
        String::from("lo_power_dbm,lo_power_w,shot_variance_a2,thermal_variance_a2\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::units::watts_to_dbm(p.lo_power_w),
            p.lo_power_w,
            p.shot_variance_a2,
            p.thermal_variance_a2
        ));
    }
    out
}

/// Constellation CSV: one complex point per row.
pub fn constellation_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("re,im\n");
    for (re, im) in points {
        out.push_str(&format!("{re},{im}\n"));
    }
    out
}

/// Per-stage sample dump.
pub fn stage_samples_csv(samples: &StageSamples) -> String {
    let mut out = String::from(
        "index,drive_v_x,drive_v_p,tx_field_x,tx_field_p,rx_current_x,rx_current_p,adc_volts_x,adc_volts_p\n",
    );
    let n = samples
        .drive_v_x
        .len()
        .max(samples.tx_field_x.len())
        .max(samples.rx_current_x.len())
        .max(samples.adc_volts_x.len());
    let get = |v: &Vec<f64>, i: usize| -> String {
        v.get(i).map(|x| format!("{x}")).unwrap_or_default()
    };
    for i in 0..n {
        out.push_str(&format!(
            "{i},{},{},{},{},{},{},{},{}\n",
            get(&samples.drive_v_x, i),
            get(&samples.drive_v_p, i),
            get(&samples.tx_field_x, i),
            get(&samples.tx_field_p, i),
            get(&samples.rx_current_x, i),
            get(&samples.rx_current_p, i),
            get(&samples.adc_volts_x, i),
            get(&samples.adc_volts_p, i),
        ));
    }
    out
}

/// Run manifest: version, seed, command and the full config echo.
pub fn manifest_json(cfg: &ChainConfig, command: &str) -> String {
    let mut config = BTreeMap::new();
    for (key, value, _unit) in config_io::to_pairs(cfg) {
        config.insert(key, value);
    }
    let manifest = serde_json::json!({
        "version": version_string(),
        "command": command,
        "seed": cfg.source.seed,
        "config": config,
    });
    serde_json::to_string_pretty(&manifest).expect("manifest serialization")
}

pub fn write_manifest(path: &Path, cfg: &ChainConfig, command: &str) -> Result<()> {
    write_text(path, &manifest_json(cfg, command))
}

pub fn report_json(report: &MetricsReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization")
}

/// A minimal SVG line plot: one polyline per labelled series.
pub fn svg_lines(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_y: bool,
) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 60.0;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

    let transform = |y: f64| if log_y { y.max(1e-300).log10() } else { y };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, pts) in series {
        for &(x, y) in pts {
            let y = transform(y);
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_min = 0.0;
        x_max = 1.0;
    }
    if !y_min.is_finite() || y_max <= y_min {
        y_min = 0.0;
        y_max = 1.0;
    }
    let px = |x: f64| M + (x - x_min) / (x_max - x_min) * (W - 2.0 * M);
    let py = |y: f64| H - M - (transform(y) - y_min) / (y_max - y_min) * (H - 2.0 * M);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
        W / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M,
        W - M,
        H - M
    ));
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - M
    ));
    // Ticks.
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        let y_text = if log_y {
            format!("1e{yv:.1}")
        } else {
            format!("{yv:.3}")
        };
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{xv:.3}</text>\n",
            px(xv),
            H - M + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{y_text}</text>\n",
            M - 6.0,
            H - M - t * (H - 2.0 * M) + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{x_label}</text>\n",
        W / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        H / 2.0,
        H / 2.0
    ));
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>\n",
            W - M - 150.0,
            M + 18.0 * (i as f64 + 1.0)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::run_chain;
    use crate::source::SourceConfig;

    #[test]
    fn manifest_echoes_every_config_key() {
        let cfg = ChainConfig::default();
        let manifest = manifest_json(&cfg, "run");
        let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
        let config = parsed["config"].as_object().unwrap();
        for (key, value, _unit) in config_io::to_pairs(&cfg) {
            assert_eq!(
                config[&key].as_str().unwrap(),
                value,
                "manifest missing {key}"
            );
        }
        assert!(parsed["version"].as_str().unwrap().contains("cvqkd-core"));
        assert_eq!(parsed["seed"].as_u64().unwrap(), cfg.source.seed);
    }

    #[test]
    fn hist_csv_dimensions() {
        let cfg = ChainConfig {
            source: SourceConfig {
                n_symbols: 2000,
                ..Default::default()
            },
            hist_bins: 8,
            ..Default::default()
        };
        let run = run_chain(&cfg).unwrap();
        let csv = hist2d_csv(&run.report.hist_x);
        assert_eq!(csv.lines().count(), 1 + 64);
        let total: u64 = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 2000);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = svg_lines(
            "t",
            "x",
            "y",
            &[("a".into(), vec![(0.0, 1.0), (1.0, 2.0)])],
            false,
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
    }
}
