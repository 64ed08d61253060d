//! Runs a configured scenario and writes its artifacts.
//!
//! Every artifact starts with a `#` header block carrying the tool version,
//! the seed, the resolved Fock dimension and the complete rendered config.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classifier::classify_reservoirs;
use crate::collision::{detect_steady_state, trailing_mean, CollisionEngine, CollisionTrace};
use crate::config::{render_config, InitialState, Scenario, ScenarioConfig};
use crate::dynamics::{evolve, Trajectory};
use crate::error::{Error, Result};
use crate::operators::DensityMatrix;
use crate::states::{cat_basis, fidelity, vacuum, CatBasis};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

pub const TRAJECTORY_COLUMNS: &str = "t,p_e,p_g,z,trace_err,min_eig";
pub const COLLISION_COLUMNS: &str = "k,reservoir_index,p_e,p_g,z";

/// Artifacts written by one scenario run.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub csv: PathBuf,
    pub summary: Option<PathBuf>,
    pub exit_code: i32,
    /// Human-readable result lines, also stored in the summary file.
    pub lines: Vec<String>,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NumericalFailure { .. } | Error::CollisionAborted { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Output directory: explicit flag, then `run.out_dir`, then `CATLINE_OUT`,
/// then `out`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ScenarioConfig, env: Option<OsString>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.run.out_dir {
        return PathBuf::from(p);
    }
    if let Some(p) = env.filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    PathBuf::from("out")
}

pub fn header_block(cfg: &ScenarioConfig) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# catline {VERSION}");
    let _ = writeln!(h, "# scenario: {}", cfg.scenario);
    let _ = writeln!(h, "# seed: {}", cfg.run.seed);
    let _ = writeln!(h, "# resolved_dim: {}", cfg.resolved_dim());
    let _ = writeln!(h, "# alpha: {}", fmt_num(cfg.alpha()));
    h.push_str("# config:\n");
    for line in render_config(cfg).lines() {
        if line.is_empty() {
            h.push_str("#\n");
        } else {
            let _ = writeln!(h, "#   {line}");
        }
    }
    h
}

/// Fixed 12-significant-digit scientific notation used in every artifact.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn trajectory_csv(cfg: &ScenarioConfig, tr: &Trajectory) -> String {
    let mut s = header_block(cfg);
    s.push_str(TRAJECTORY_COLUMNS);
    s.push('\n');
    for i in 0..tr.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_num(tr.times[i]),
            fmt_num(tr.p_e[i]),
            fmt_num(tr.p_g[i]),
            fmt_num(tr.z[i]),
            fmt_num(tr.trace_err[i]),
            fmt_num(tr.min_eig[i])
        );
    }
    s
}

pub fn collision_csv(cfg: &ScenarioConfig, tr: &CollisionTrace) -> String {
    let mut s = header_block(cfg);
    s.push_str(COLLISION_COLUMNS);
    s.push('\n');
    for i in 0..tr.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            tr.k[i],
            tr.reservoir_index[i],
            fmt_num(tr.p_e[i]),
            fmt_num(tr.p_g[i]),
            fmt_num(tr.z[i])
        );
    }
    s
}

fn initial_state(kind: InitialState, basis: &CatBasis) -> Result<DensityMatrix> {
    Ok(match kind {
        InitialState::CPlus => basis.c_plus().to_density(),
        InitialState::CMinus => basis.c_minus().to_density(),
        InitialState::Plus => basis.plus_state().to_density(),
        InitialState::Vacuum => vacuum(basis.dim())?,
    })
}

/// Runs `cfg`, writing `<scenario>.csv` (and `<scenario>_summary.toml` where
/// the scenario has a scalar result) into `out_dir`.
///
/// A collision run that fails numerically still writes the collisions it
/// completed before the error is returned.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioReport> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let name = cfg.scenario.name();
    let csv = out_dir.join(format!("{name}.csv"));
    let summary_path = out_dir.join(format!("{name}_summary.toml"));
    let sys = cfg.system_params()?;
    let dim = cfg.resolved_dim();
    let initial = cfg.run.initial.unwrap_or(InitialState::Plus);

    let mut lines = Vec::new();
    let mut exit = EXIT_OK;
    match cfg.scenario {
        Scenario::Stabilize | Scenario::Ramp => {
            let schedule = cfg.drive_schedule()?;
            let basis = cat_basis(cfg.alpha(), dim)?;
            let rho0 = initial_state(initial, &basis)?;
            let tr = evolve(
                &rho0,
                &sys,
                &schedule,
                cfg.run.t_final.unwrap_or_default(),
                cfg.run.dt.unwrap_or_default(),
                cfg.run.record_every,
            )?;
            fs::write(&csv, trajectory_csv(cfg, &tr))?;
            let z_final = *tr.z.last().unwrap_or(&f64::NAN);
            lines.push(format!("z_final = {}", fmt_num(z_final)));
            if cfg.scenario == Scenario::Ramp {
                let f = fidelity(&tr.final_state, basis.c_plus())?;
                lines.push(format!("fidelity_c_plus = {}", fmt_num(f)));
            }
        }
        Scenario::Homogenize => {
            let cp = cfg.collision_params()?;
            let engine = CollisionEngine::new(&sys, &cp, dim)?;
            let rho0 = initial_state(initial, engine.basis())?;
            let mut tr = match engine.run(&rho0) {
                Ok(t) => t,
                Err(Error::CollisionAborted {
                    completed,
                    trace,
                    source,
                }) => {
                    fs::write(&csv, collision_csv(cfg, &trace))?;
                    return Err(Error::CollisionAborted {
                        completed,
                        trace,
                        source,
                    });
                }
                Err(e) => return Err(e),
            };
            tr.steady_state = detect_steady_state(&tr, cfg.run.window, cfg.run.tol);
            fs::write(&csv, collision_csv(cfg, &tr))?;
            lines.push(format!("z_final = {}", fmt_num(*tr.z.last().unwrap_or(&f64::NAN))));
            match tr.steady_state {
                Some(ss) => {
                    lines.push("converged = true".into());
                    lines.push(format!("steady_state_index = {}", ss.index));
                    lines.push(format!("z_ss = {}", fmt_num(ss.z_ss)));
                }
                None => {
                    lines.push("converged = false".into());
                    lines.push(format!(
                        "z_ss = {}",
                        fmt_num(trailing_mean(&tr.z, cfg.run.window))
                    ));
                }
            }
        }
        Scenario::Classify => {
            let cp = cfg.collision_params()?;
            let out = match classify_reservoirs(&sys, &cp, dim, &cfg.detector()) {
                Ok(o) => o,
                Err(Error::CollisionAborted {
                    completed,
                    trace,
                    source,
                }) => {
                    fs::write(&csv, collision_csv(cfg, &trace))?;
                    return Err(Error::CollisionAborted {
                        completed,
                        trace,
                        source,
                    });
                }
                Err(e) => return Err(e),
            };
            fs::write(&csv, collision_csv(cfg, &out.trace))?;
            let d = out.decision;
            lines.push(format!("label = {}", d.label));
            lines.push(format!("z_ss = {}", fmt_num(d.z_ss)));
            lines.push(format!("converged = {}", d.converged));
            lines.push(format!("n_used = {}", d.n_used));
            if !d.converged {
                exit = EXIT_NOT_CONVERGED;
            }
        }
    }

    let summary = if cfg.scenario == Scenario::Stabilize {
        None
    } else {
        let mut s = header_block(cfg);
        let _ = writeln!(s, "scenario = \"{name}\"");
        for l in &lines {
            s.push_str(l);
            s.push('\n');
        }
        fs::write(&summary_path, s)?;
        Some(summary_path)
    };

    Ok(ScenarioReport {
        scenario: cfg.scenario,
        csv,
        summary,
        exit_code: exit,
        lines,
    })
}
