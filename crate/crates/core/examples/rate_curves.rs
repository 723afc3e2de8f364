//! Average information rate versus SNR with `P_E = P_I` and K = 20.
//!
//! Writes `fig3.csv` and `rate_vs_snr.svg` to the given directory.
//!
//!     cargo run --release --example rate_curves -- [trials] [out_dir]

use std::path::PathBuf;

use wetwit::channel::ScenarioConfig;
use wetwit::report::{emit_svg_plot, fig3_csv, PlotKind};
use wetwit::sim::run_fig3;
use wetwit::wit::Scheme;

fn main() -> wetwit::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "wetwit-out".into()));
    std::fs::create_dir_all(&out)?;

    let snr: Vec<f64> = (0..=6).map(|i| 10.0 * i as f64).collect();
    let agg = run_fig3(&ScenarioConfig::default(), &[1, 2, 4], &snr, trials, 0)?;
    for n_i in [1, 2, 4] {
        println!("N_I = {n_i}");
        for &s in &snr {
            let m = agg.rate_row(n_i, s, Scheme::MultiBeam).expect("row");
            let b = agg.rate_row(n_i, s, Scheme::SingleBeam).expect("row");
            println!("  {s:>4} dB  multi {:>7.3}  single {:>7.3}", m.mean_rate, b.mean_rate);
        }
    }
    std::fs::write(out.join("fig3.csv"), fig3_csv(&agg)?)?;
    emit_svg_plot(&agg, PlotKind::RateVsSnr, &out.join("rate_vs_snr.svg"))?;
    println!("{} failed records; outputs in {}", agg.failures.len(), out.display());
    Ok(())
}
