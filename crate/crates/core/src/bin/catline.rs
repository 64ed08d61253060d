use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catline::config::{parse_config, DimSetting, Scenario};
use catline::plot::{read_series, render_svg};
use catline::scenario::{exit_code, resolve_out_dir, run_scenario, EXIT_CONFIG};
use catline::Error;

#[derive(Parser)]
#[command(name = "catline", version, about = "Kerr-cat qubit scenarios and reservoir classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file.
    Run {
        /// stabilize, ramp, homogenize or classify
        scenario: String,
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: run.out_dir, then $CATLINE_OUT, then ./out)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        collisions: Option<usize>,
    },
    /// Render a CSV produced by `run` as an SVG chart.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenario,
            config,
            out,
            dim,
            seed,
            collisions,
        } => run(&scenario, &config, out, dim, seed, collisions),
        Command::Plot { csv, out } => plot(&csv, &out),
    };
    ExitCode::from(code as u8)
}

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn run(
    scenario: &str,
    path: &PathBuf,
    out: Option<PathBuf>,
    dim: Option<usize>,
    seed: Option<u64>,
    collisions: Option<usize>,
) -> i32 {
    let wanted: Scenario = match scenario.parse() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cfg.scenario != wanted {
        eprintln!("error: config is for scenario `{}`, not `{wanted}`", cfg.scenario);
        return EXIT_CONFIG;
    }
    if let Some(d) = dim {
        cfg.run.dim = DimSetting::Fixed(d);
    }
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    if let Some(n) = collisions {
        match cfg.collision.as_mut() {
            Some(c) => c.n_collisions = n,
            None => {
                eprintln!("error: --collisions needs a [collision] section");
                return EXIT_CONFIG;
            }
        }
    }
    let dir = resolve_out_dir(out.as_deref(), &cfg, std::env::var_os("CATLINE_OUT"));
    match run_scenario(&cfg, &dir) {
        Ok(rep) => {
            println!("wrote {}", rep.csv.display());
            if let Some(s) = &rep.summary {
                println!("wrote {}", s.display());
            }
            for l in &rep.lines {
                println!("{l}");
            }
            rep.exit_code
        }
        Err(e) => fail(&e),
    }
}

fn plot(csv: &PathBuf, out: &PathBuf) -> i32 {
    let text = match fs::read_to_string(csv) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", csv.display());
            return EXIT_CONFIG;
        }
    };
    let series = match read_series(&text) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if let Err(e) = fs::write(out, render_svg(&series)) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return EXIT_CONFIG;
    }
    println!("wrote {}", out.display());
    0
}
