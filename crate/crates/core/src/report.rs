//! CSV tables, the run manifest and native SVG plots.
//!
//! Everything here is a pure function of its input, so identical aggregates
//! produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ScenarioConfig;
use crate::error::{Error, Result};
use crate::sim::AggregateResult;
use crate::wit::Scheme;

pub const TABLE1_HEADER: [&str; 4] = ["K", "d_E", "count", "mean_theta_mW"];
pub const FIG3_HEADER: [&str; 6] = ["N_I", "snr_dB", "scheme", "mean_rate_bpshz", "stderr", "trials"];

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Largest `d_E` seen in any row (at least 1), so every `K` lists the same ranks.
fn max_rank(agg: &AggregateResult) -> usize {
    agg.rank_rows
        .iter()
        .filter_map(|r| r.histogram.keys().next_back().copied())
        .max()
        .unwrap_or(1)
        .max(1)
}

/// One row per `(K, d_E)` with `d_E = 1..=max`; `mean_theta_mW` is the
/// per-`K` mean of `η Θ*/K`, repeated on each row of that `K`.
pub fn table1_csv(agg: &AggregateResult) -> Result<String> {
    let dmax = max_rank(agg);
    let mut rows = Vec::new();
    for r in &agg.rank_rows {
        for d in 1..=dmax {
            rows.push(vec![
                r.k.to_string(),
                d.to_string(),
                r.histogram.get(&d).copied().unwrap_or(0).to_string(),
                format!("{:.6}", r.mean_theta_mw),
            ]);
        }
    }
    csv_string(&TABLE1_HEADER, rows)
}

pub fn fig3_csv(agg: &AggregateResult) -> Result<String> {
    let rows = agg
        .rate_rows
        .iter()
        .map(|r| {
            vec![
                r.n_i.to_string(),
                r.snr_db.to_string(),
                r.scheme.as_str().to_string(),
                format!("{:.6}", r.mean_rate),
                format!("{:.6}", r.stderr),
                r.trials.to_string(),
            ]
        })
        .collect();
    csv_string(&FIG3_HEADER, rows)
}

/// Everything needed to rerun an experiment exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    /// Effective configuration in config-file syntax.
    pub config_text: String,
    pub config: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_values: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_i_values: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snr_grid_db: Vec<f64>,
    pub records: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub flagged: bool,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: &ScenarioConfig, trials: usize, agg: &AggregateResult) -> Self {
        Self {
            version: version_string(),
            command: command.to_string(),
            seed: config.rng_seed,
            trials,
            config_text: config.to_text(),
            config: config.clone(),
            k_values: Vec::new(),
            n_i_values: Vec::new(),
            snr_grid_db: Vec::new(),
            records: agg.records,
            failures: agg.failures.len(),
            failure_rate: agg.failure_rate(),
            flagged: agg.flagged(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

/// `v<crate version>`, plus `+<git describe>` when the source tree is a
/// git checkout and git is available.
pub fn version_string() -> String {
    let base = format!("v{}", env!("CARGO_PKG_VERSION"));
    let described = std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty());
    match described {
        Some(d) => format!("{base}+{d}"),
        None => base,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    RateVsSnr,
    RankHistogram,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

const W: f64 = 760.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
fn nice_step(span: f64, target: f64) -> f64 {
    if !(span > 0.0) {
        return 1.0;
    }
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    let f = if m <= 1.0 {
        1.0
    } else if m <= 2.0 {
        2.0
    } else if m <= 5.0 {
        5.0
    } else {
        10.0
    };
    f * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{v:.decimals$}")
}

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = if self.x1 > self.x0 { self.x1 - self.x0 } else { 1.0 };
        LEFT + (x - self.x0) / span * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - y / self.y1 * (H - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{title}</text>"#,
        (LEFT + W - RIGHT) / 2.0
    );
}

fn y_axis(out: &mut String, frame: &Frame, step: f64, label: &str) {
    let mut v = 0.0;
    while v <= frame.y1 + 1e-9 * step {
        let y = frame.py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/>"##,
            W - RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(v, step)
        );
        v += step;
    }
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="#000"/>"##,
        H - BOTTOM
    );
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#000"/>"##,
        H - BOTTOM,
        W - RIGHT,
        H - BOTTOM
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{label}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0
    );
}

fn x_label(out: &mut String, label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 15.0
    );
}

fn legend_entry(out: &mut String, i: usize, color: &str, dashed: bool, text: &str) {
    let x = W - RIGHT + 15.0;
    let y = TOP + 10.0 + 20.0 * i as f64;
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
        x + 28.0
    );
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{text}</text>"#, x + 34.0, y + 4.0);
}

fn rate_vs_snr(agg: &AggregateResult) -> Result<String> {
    if agg.rate_rows.is_empty() {
        return Err(Error::InvalidInput("no rate rows to plot".into()));
    }
    let mut snrs: Vec<f64> = agg.rate_rows.iter().map(|r| r.snr_db).collect();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    let mut n_is: Vec<usize> = agg.rate_rows.iter().map(|r| r.n_i).collect();
    n_is.sort_unstable();
    n_is.dedup();

    let top = agg
        .rate_rows
        .iter()
        .map(|r| r.mean_rate + r.stderr)
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let step = nice_step(top.max(1e-9), 6.0);
    let frame = Frame {
        x0: snrs[0],
        x1: *snrs.last().expect("non-empty"),
        y1: (top / step).ceil().max(1.0) * step,
    };

    let mut out = String::new();
    header(&mut out, "Average WIT rate versus SNR");
    y_axis(&mut out, &frame, step, "Average rate (bits/s/Hz)");
    for &s in &snrs {
        let x = frame.px(s);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#000"/>"##,
            H - BOTTOM,
            H - BOTTOM + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{s}</text>"#,
            H - BOTTOM + 18.0
        );
    }
    x_label(&mut out, "SNR (dB)");

    let mut legend = 0;
    for (ci, &n_i) in n_is.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        for scheme in [Scheme::MultiBeam, Scheme::SingleBeam] {
            let dashed = scheme == Scheme::SingleBeam;
            let mut rows: Vec<_> = agg
                .rate_rows
                .iter()
                .filter(|r| r.n_i == n_i && r.scheme == scheme && r.mean_rate.is_finite())
                .collect();
            rows.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
            if rows.is_empty() {
                continue;
            }
            let pts: Vec<String> = rows
                .iter()
                .map(|r| format!("{:.1},{:.1}", frame.px(r.snr_db), frame.py(r.mean_rate)))
                .collect();
            let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                pts.join(" ")
            );
            for r in &rows {
                let x = frame.px(r.snr_db);
                let (ylo, yhi) = (frame.py(r.mean_rate - r.stderr), frame.py(r.mean_rate + r.stderr));
                let _ = writeln!(
                    out,
                    r#"<path d="M{x:.1} {ylo:.1}V{yhi:.1}M{:.1} {ylo:.1}H{:.1}M{:.1} {yhi:.1}H{:.1}" stroke="{color}"/>"#,
                    x - 3.0,
                    x + 3.0,
                    x - 3.0,
                    x + 3.0
                );
                let y = frame.py(r.mean_rate);
                if dashed {
                    let _ = writeln!(
                        out,
                        r#"<rect x="{:.1}" y="{:.1}" width="6" height="6" fill="{color}"/>"#,
                        x - 3.0,
                        y - 3.0
                    );
                } else {
                    let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
                }
            }
            let name = if dashed { "single-beam" } else { "multi-beam" };
            legend_entry(&mut out, legend, color, dashed, &format!("N_I = {n_i}, {name}"));
            legend += 1;
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn rank_histogram(agg: &AggregateResult) -> Result<String> {
    if agg.rank_rows.is_empty() {
        return Err(Error::InvalidInput("no rank rows to plot".into()));
    }
    let dmax = max_rank(agg);
    let top = agg
        .rank_rows
        .iter()
        .flat_map(|r| r.histogram.values())
        .copied()
        .max()
        .unwrap_or(0) as f64;
    let step = nice_step(top.max(1.0), 6.0).max(1.0);
    let frame = Frame {
        x0: 0.0,
        x1: agg.rank_rows.len() as f64,
        y1: (top / step).ceil().max(1.0) * step,
    };

    let mut out = String::new();
    header(&mut out, "Number of energy beams");
    y_axis(&mut out, &frame, step, "Trials");
    x_label(&mut out, "Number of receivers K");
    let group_w = frame.px(1.0) - frame.px(0.0);
    let bar_w = 0.8 * group_w / dmax as f64;
    for (gi, row) in agg.rank_rows.iter().enumerate() {
        let gx = frame.px(gi as f64) + 0.1 * group_w;
        for d in 1..=dmax {
            let count = row.histogram.get(&d).copied().unwrap_or(0) as f64;
            let x = gx + (d - 1) as f64 * bar_w;
            let y = frame.py(count);
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                bar_w,
                H - BOTTOM - y,
                PALETTE[(d - 1) % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">K = {}</text>"#,
            frame.px(gi as f64 + 0.5),
            H - BOTTOM + 18.0,
            row.k
        );
    }
    for d in 1..=dmax {
        legend_entry(
            &mut out,
            d - 1,
            PALETTE[(d - 1) % PALETTE.len()],
            false,
            &format!("d_E = {d}"),
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn svg_plot(agg: &AggregateResult, kind: PlotKind) -> Result<String> {
    match kind {
        PlotKind::RateVsSnr => rate_vs_snr(agg),
        PlotKind::RankHistogram => rank_histogram(agg),
    }
}

/// Writes a plot of `agg` to `path`. An aggregate without the rows the plot
/// needs is an error.
pub fn emit_svg_plot(agg: &AggregateResult, kind: PlotKind, path: &Path) -> Result<()> {
    std::fs::write(path, svg_plot(agg, kind)?)?;
    Ok(())
}
