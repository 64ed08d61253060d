//! Runs the bundled fig2 config into a temporary directory and renders the
//! resulting CSV as an SVG chart.
//!
//! cargo run --release --example render_plot -- [output.svg]

use std::fs;
use std::path::PathBuf;

use catline::config::parse_config;
use catline::plot::{read_series, render_svg};
use catline::scenario::run_scenario;

fn main() -> catline::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "fig2.svg".into());
    let cfg_path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig2.toml");
    let cfg = parse_config(&fs::read_to_string(cfg_path)?)?;
    let dir = std::env::temp_dir().join("catline-render-plot");
    let report = run_scenario(&cfg, &dir)?;
    let series = read_series(&fs::read_to_string(&report.csv)?)?;
    fs::write(&out, render_svg(&series))?;
    println!("{} rows from {} -> {}", series.x.len(), report.csv.display(), out.display());
    Ok(())
}
