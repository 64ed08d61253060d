//! Acceptance criteria 1–10, one PASS/FAIL line each.
//!
//! Set `CATLINE_BLESS=1` to rewrite the golden CSVs instead of comparing.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use catline::classifier::{classify_reservoirs, Label};
use catline::collision::{detect_in_series, CollisionEngine};
use catline::config::{parse_config, ScenarioConfig};
use catline::dynamics::{
    evolve, evolve_with, kerr_cat_hamiltonian, parity_operator, DriveSchedule,
    MasterEquation, SystemParams, Trajectory,
};
use catline::operators::{annihilation, commutator, expectation, number, Operator, SpaceLayout};
use catline::scenario::run_scenario;
use catline::states::{cat, cat_basis, cat_normalization, coherent, required_dim, Parity};
use num_complex::Complex64;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> ScenarioConfig {
    let path = manifest().join("configs").join(name);
    parse_config(&fs::read_to_string(&path).unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Results shared between criteria.
#[derive(Default)]
struct Ctx {
    /// Largest |trace error| / max(t, 1) seen in any trajectory.
    trace_drift: f64,
    scenarios: usize,
    /// (golden name, produced CSV text)
    csvs: Vec<(String, String)>,
}

impl Ctx {
    fn track(&mut self, tr: &Trajectory) {
        for (t, e) in tr.times.iter().zip(&tr.trace_err) {
            self.trace_drift = self.trace_drift.max(e.abs() / t.max(1.0));
        }
        self.scenarios += 1;
    }
}

/// Columns of a catline CSV by name.
fn columns(text: &str) -> std::collections::HashMap<String, Vec<f64>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let mut cols: std::collections::HashMap<String, Vec<f64>> =
        header.iter().map(|h| (h.clone(), Vec::new())).collect();
    for l in lines {
        for (h, v) in header.iter().zip(l.split(',')) {
            cols.get_mut(h).unwrap().push(v.parse().unwrap());
        }
    }
    cols
}

fn run_config(ctx: &mut Ctx, file: &str, golden: Option<&str>) -> String {
    let cfg = config(file);
    let dir = tempfile::tempdir().unwrap();
    let rep = run_scenario(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(&rep.csv).unwrap();
    let cols = columns(&text);
    if let (Some(t), Some(e)) = (cols.get("t"), cols.get("trace_err")) {
        for (t, e) in t.iter().zip(e) {
            ctx.trace_drift = ctx.trace_drift.max(e.abs() / t.max(1.0));
        }
        ctx.scenarios += 1;
    }
    if let Some(g) = golden {
        ctx.csvs.push((g.to_string(), text.clone()));
    }
    text
}

fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn criterion_1() -> Outcome {
    let mut worst_comm = 0.0f64;
    let mut worst_number = 0.0f64;
    for d in 4..=40 {
        let a = annihilation(d).unwrap();
        let comm = commutator(&a, &a.dagger()).unwrap();
        let mut diag = vec![Complex64::new(1.0, 0.0); d];
        diag[d - 1] = Complex64::new(1.0 - d as f64, 0.0);
        let want = Operator::diagonal(&diag).unwrap();
        worst_comm = worst_comm.max(comm.sub(&want).unwrap().max_abs());
        let ada = a.dagger().mul(&a).unwrap();
        worst_number = worst_number.max(ada.sub(&number(d).unwrap()).unwrap().max_abs());
    }
    Outcome::new(
        worst_comm <= 1e-12 && worst_number <= 1e-12,
        format!("max |[a,a†] − diag(1,…,1,1−d)| = {worst_comm:.1e}, max |a†a − n| = {worst_number:.1e} (d = 4..40)"),
    )
}

fn criterion_2() -> Outcome {
    let mut off = 0.0f64;
    let mut norm_err = 0.0f64;
    let mut amp_err = 0.0f64;
    let mut purity = 0.0f64;
    for alpha in [0.5f64, 1.0, 2.0, 4.0] {
        let dim = required_dim(alpha);
        let basis = cat_basis(alpha, dim).unwrap();
        off = off.max(basis.c_plus().inner(basis.c_minus()).norm());
        for parity in [Parity::Even, Parity::Odd] {
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            // |α⟩ ± |−α⟩ truncated, from the series c_n = e^{−α²/2} αⁿ/√n!
            let mut c = (-alpha * alpha / 2.0).exp();
            let mut raw = Vec::with_capacity(dim);
            for n in 0..dim {
                if n > 0 {
                    c *= alpha / (n as f64).sqrt();
                }
                let minus = if n % 2 == 0 { 1.0 } else { -1.0 };
                raw.push(c + sign * minus * c);
            }
            let numerical = 1.0 / raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            let analytic = cat_normalization(alpha, parity);
            norm_err = norm_err.max((numerical - analytic).abs() / analytic);
            let k = cat(alpha, parity, dim).unwrap();
            for (n, r) in raw.iter().enumerate() {
                let got = k.amplitudes()[n];
                let wrong_parity = (n % 2 == 1) == (parity == Parity::Even);
                if wrong_parity {
                    purity = purity.max(got.norm());
                } else {
                    let want = analytic * r;
                    if want.abs() > 1e-6 {
                        amp_err = amp_err.max((got.re - want).abs() / want.abs());
                    }
                }
            }
        }
    }
    Outcome::new(
        off <= 1e-12 && norm_err <= 1e-8 && amp_err <= 1e-8 && purity <= 1e-14,
        format!(
            "|<C+|C->| = {off:.1e}, N± rel err = {norm_err:.1e}, amplitude rel err = {amp_err:.1e}, wrong-parity = {purity:.1e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [1.0f64, 2.0] {
        let mut p = SystemParams::fig4();
        p.delta_ar = 0.0;
        p.eps2 = p.kerr * alpha * alpha;
        let dim = required_dim(alpha);
        let h = kerr_cat_hamiltonian(&p, dim, None).unwrap();
        let e = p.eps2 * p.eps2 / p.kerr;
        for parity in [Parity::Even, Parity::Odd] {
            let c = cat(alpha, parity, dim).unwrap();
            let r = h.apply(c.amplitudes()).unwrap() + c.amplitudes() * Complex64::new(e, 0.0);
            worst = worst.max(r.norm() / e);
        }
    }
    Outcome::new(worst <= 1e-6, format!("max ‖H|C±⟩ + (ε₂²/K)|C±⟩‖/(ε₂²/K) = {worst:.1e}"))
}

fn criterion_4(ctx: &mut Ctx) -> Outcome {
    // amplitude damping: ⟨n⟩(t) = |α|² e^{−κ₁t}
    let k1 = 1.71e-6;
    let dim = required_dim(1.0);
    let layout = SpaceLayout::single(dim).unwrap();
    let eq = MasterEquation::new(Operator::zeros(layout), vec![(k1, annihilation(dim).unwrap())]).unwrap();
    let basis = cat_basis(1.0, dim).unwrap();
    let rho0 = coherent(Complex64::new(1.0, 0.0), dim).unwrap().to_density();
    let n_op = number(dim).unwrap();
    let mut worst = 0.0f64;
    eq.integrate(&rho0, 3.0 / k1, 1000.0, 10, |_, t, m| {
        let n: f64 = (0..dim).map(|i| m[(i, i)].re * n_op.get(i, i).re).sum();
        let want = (-k1 * t).exp();
        worst = worst.max((n - want).abs() / want);
        Ok(())
    })
    .unwrap();
    let damped = evolve_with(&eq, &basis, &rho0, 3.0 / k1, 1000.0, 100).unwrap();
    ctx.track(&damped);

    // order: fig4 row to t = 100 with dt = 50, 25 against dt = 12.5
    let p = SystemParams::fig4();
    let dim4 = required_dim(p.alpha());
    let b4 = cat_basis(p.alpha(), dim4).unwrap();
    let start = b4.logical_state(1.0, 0.5).to_density();
    let s = DriveSchedule::constant(p.eps2);
    let end = |dt: f64| evolve(&start, &p, &s, 100.0, dt, 1000).unwrap().final_state;
    let reference = end(12.5);
    let err = |dt: f64| (end(dt).matrix() - reference.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (e50, e25) = (err(50.0), err(25.0));
    let ratio = e50 / e25;
    Outcome::new(
        worst <= 1e-4 && ratio >= 12.0,
        format!("⟨n⟩ rel err over [0, 3/κ₁] = {worst:.1e}; RK4 error ratio dt 50→25 = {ratio:.1}"),
    )
}

fn criterion_5(ctx: &mut Ctx) -> Outcome {
    let mut p = SystemParams::fig4();
    p.kappa1 = 0.0;
    let dim = required_dim(p.alpha());
    let basis = cat_basis(p.alpha(), dim).unwrap();
    let rho0 = basis.logical_state(1.0, 0.3).to_density();
    let parity = parity_operator(dim).unwrap();
    let p0 = expectation(&rho0, &parity).unwrap().re;
    let t_final = 20.0 / SystemParams::fig4().kappa1;
    let tr = evolve(&rho0, &p, &DriveSchedule::constant(p.eps2), t_final, 50.0, 1000).unwrap();
    ctx.track(&tr);
    let p1 = expectation(&tr.final_state, &parity).unwrap().re;
    let drift = (p1 - p0).abs();
    Outcome::new(
        drift <= 1e-6 && ctx.trace_drift <= 1e-8,
        format!(
            "κ₁=0 parity drift over 20·T₁ = {drift:.1e}; max trace drift = {:.1e} per unit time over {} trajectories",
            ctx.trace_drift, ctx.scenarios
        ),
    )
}

fn criterion_6(ctx: &mut Ctx) -> Outcome {
    let z_half = |text: &str| {
        let c = columns(text);
        let t_end = *c["t"].last().unwrap();
        let z: Vec<f64> = c["t"]
            .iter()
            .zip(&c["z"])
            .filter(|(t, _)| **t >= 0.5 * t_end)
            .map(|(_, z)| *z)
            .collect();
        std_dev(&z)
    };
    let s2 = z_half(&run_config(ctx, "fig2.toml", Some("fig2")));
    let s3 = z_half(&run_config(ctx, "fig3.toml", Some("fig3")));
    let fig4 = columns(&run_config(ctx, "fig4.toml", Some("fig4")));
    let t_end = *fig4["t"].last().unwrap();
    let tail: Vec<f64> = fig4["t"]
        .iter()
        .zip(&fig4["z"])
        .filter(|(t, _)| **t >= 0.8 * t_end)
        .map(|(_, z)| *z)
        .collect();
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let half = (hi - lo) / 2.0;
    Outcome::new(
        s3 < s2 && half <= 0.02,
        format!(
            "std Z final half: fig3 {s3:.2e} < fig2 {s2:.2e}; fig4 band half-width over final 20% of 20·T₁ = {half:.2e} (Z ≈ {:.3})",
            (hi + lo) / 2.0
        ),
    )
}

fn criterion_7(ctx: &mut Ctx) -> Outcome {
    let cfg = config("ramp.toml");
    let s = cfg.drive_schedule().unwrap();
    let e0 = s.eps2_0;
    let endpoints = [
        s.value(0.0).abs() / e0,
        (s.value(s.tau_ramp) - e0 * (1.0 - (-1.0f64).exp())).abs() / e0,
        (s.value(1e3 * s.tau_ramp) - e0).abs() / e0,
    ];
    let endpoint_err = endpoints.iter().cloned().fold(0.0, f64::max);
    let sys = cfg.system_params().unwrap();
    let dim = cfg.resolved_dim();
    let basis = cat_basis(cfg.alpha(), dim).unwrap();
    let rho0 = catline::states::vacuum(dim).unwrap();
    let t_final = cfg.run.t_final.unwrap();
    let fid = |ctx: &mut Ctx, dt: f64| {
        let tr = evolve(&rho0, &sys, &s, t_final, dt, 10_000).unwrap();
        ctx.track(&tr);
        catline::states::fidelity(&tr.final_state, basis.c_plus()).unwrap()
    };
    let (f1, f2, f3) = (fid(ctx, 80.0), fid(ctx, 40.0), fid(ctx, 20.0));
    let agree = (f1 - f2).abs() <= 1e-4 && (f2 - f3).abs() <= 1e-4;
    Outcome::new(
        endpoint_err <= 1e-12 && agree && f3 >= 0.99,
        format!(
            "endpoint err {endpoint_err:.1e}; fidelity to |C+⟩ at dt 80/40/20 = {f1:.6}/{f2:.6}/{f3:.6}"
        ),
    )
}

struct Homog {
    z_ss: Option<(usize, f64)>,
    monotone_violation: f64,
}

fn homogenize(ctx: &mut Ctx, file: &str, golden: Option<&str>, sign: f64, dissipation: bool) -> Homog {
    let z = if dissipation {
        let mut cfg = config(file);
        cfg.collision.as_mut().unwrap().probe_dissipation = true;
        let dir = tempfile::tempdir().unwrap();
        let rep = run_scenario(&cfg, dir.path()).unwrap();
        columns(&fs::read_to_string(rep.csv).unwrap())["z"].clone()
    } else {
        columns(&run_config(ctx, file, golden))["z"].clone()
    };
    let burn = z.len() / 20;
    let mut violation = 0.0f64;
    for w in z[burn..].windows(2) {
        violation = violation.max(-(w[1] - w[0]) * sign);
    }
    Homog {
        z_ss: detect_in_series(&z, 200, 1e-3).map(|(i, v)| (i + 1, v)),
        monotone_violation: violation,
    }
}

fn criterion_8(ctx: &mut Ctx) -> (Outcome, Outcome) {
    let up = homogenize(ctx, "fig5a_scaled.toml", Some("fig5a_scaled"), 1.0, false);
    let down = homogenize(ctx, "fig5b_scaled.toml", None, -1.0, false);
    let ok_up = matches!(up.z_ss, Some((k, z)) if k <= 5000 && (0.95..=1.0).contains(&z));
    let ok_down = matches!(down.z_ss, Some((k, z)) if k <= 5000 && (-1.0..=-0.95).contains(&z));
    let mono = up.monotone_violation.max(down.monotone_violation);
    let main = Outcome::new(
        ok_up && ok_down && mono <= 1e-6,
        format!(
            "non-decaying probe: θ=0 (k, z_ss) = {:?}, θ=π (k, z_ss) = {:?}, worst monotonicity step = {mono:.1e}",
            up.z_ss, down.z_ss
        ),
    );
    let up_d = homogenize(ctx, "fig5a_scaled.toml", None, 1.0, true);
    let down_d = homogenize(ctx, "fig5b_scaled.toml", None, -1.0, true);
    let ok_d = matches!(up_d.z_ss, Some((_, z)) if (0.95..=1.0).contains(&z))
        && matches!(down_d.z_ss, Some((_, z)) if (-1.0..=-0.95).contains(&z));
    let variant = Outcome::new(
        ok_d,
        format!(
            "probe with losses on: θ=0 (k, z_ss) = {:?}, θ=π (k, z_ss) = {:?}",
            up_d.z_ss, down_d.z_ss
        ),
    );
    (main, variant)
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut check = |name: &str, cfg: ScenarioConfig, want: Label, bound: Option<f64>| {
        let out = classify_reservoirs(
            &cfg.system_params().unwrap(),
            &cfg.collision_params().unwrap(),
            cfg.resolved_dim(),
            &cfg.detector(),
        )
        .unwrap();
        let d = out.decision;
        let ok = d.label == want && bound.is_none_or(|b| d.z_ss.abs() <= b);
        pass &= ok;
        parts.push(format!("{name} → {} (z_ss {:+.4})", d.label, d.z_ss));
    };
    let single = |theta: f64| {
        let mut c = config("classify_08_02.toml");
        let col = c.collision.as_mut().unwrap();
        col.reservoirs.truncate(1);
        col.reservoirs[0].theta = theta;
        col.reservoirs[0].weight = 1.0;
        c
    };
    check("θ=0", single(0.0), Label::Zero, None);
    check("θ=π", single(PI), Label::One, None);
    check("(0.8,0.2)", config("classify_08_02.toml"), Label::Zero, None);
    check("(0.2,0.8)", config("classify_02_08.toml"), Label::One, None);
    check("(0.5,0.5)", config("classify_05_05.toml"), Label::Zero, Some(0.05));
    Outcome::new(pass, parts.join(", "))
}

fn criterion_10(ctx: &mut Ctx) -> Outcome {
    let bless = std::env::var_os("CATLINE_BLESS").is_some();
    let golden_dir = manifest().join("tests").join("golden");
    let mut mismatched = Vec::new();
    for (name, text) in &ctx.csvs {
        let path = golden_dir.join(format!("{name}.csv"));
        if bless {
            fs::create_dir_all(&golden_dir).unwrap();
            fs::write(&path, text).unwrap();
        } else if fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            mismatched.push(name.clone());
        }
    }

    // run 600 collisions in one go and as 250 + 350
    let cfg = config("fig5a_scaled.toml");
    let mut cp = cfg.collision_params().unwrap();
    cp.n_collisions = 600;
    cp.reservoirs = vec![
        catline::collision::ReservoirSpec::new(0.4, 0.2, 0.7),
        catline::collision::ReservoirSpec::new(2.6, 0.0, 0.3),
    ];
    let engine = CollisionEngine::new(&cfg.system_params().unwrap(), &cp, cfg.resolved_dim()).unwrap();
    let rho0 = engine.basis().plus_state().to_density();
    let whole = engine.run(&rho0).unwrap();
    let first = engine.run_range(&rho0, 0, 250).unwrap();
    let second = engine.run_range(&first.final_state, 250, 350).unwrap();
    let split_ok = whole.z[..250] == first.z[..]
        && whole.z[250..] == second.z[..]
        && whole.final_state == second.final_state;
    Outcome::new(
        mismatched.is_empty() && split_ok && ctx.csvs.len() == 4,
        format!(
            "{} golden CSVs{}; split run 250+350 bit-identical: {split_ok}",
            ctx.csvs.len(),
            if bless {
                " rewritten".to_string()
            } else if mismatched.is_empty() {
                " byte-identical".to_string()
            } else {
                format!(" differ: {mismatched:?}")
            }
        ),
    )
}

fn main() -> ExitCode {
    let mut ctx = Ctx::default();
    let mut results: Vec<(String, Outcome, Duration, Duration, bool)> = Vec::new();
    let mut timed = |id: &str, limit: f64, counted: bool, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        results.push((id.to_string(), out, start.elapsed(), Duration::from_secs_f64(limit), counted));
    };

    timed("1", 1.0, true, &mut criterion_1);
    timed("2", 5.0, true, &mut criterion_2);
    timed("3", 5.0, true, &mut criterion_3);
    timed("4", 30.0, true, &mut || criterion_4(&mut ctx));
    timed("6", 600.0, true, &mut || criterion_6(&mut ctx));
    timed("7", 300.0, true, &mut || criterion_7(&mut ctx));
    let mut variant = None;
    timed("8", 600.0, true, &mut || {
        let (main, v) = criterion_8(&mut ctx);
        variant = Some(v);
        main
    });
    timed("9", 900.0, true, &mut criterion_9);
    timed("10", 120.0, true, &mut || criterion_10(&mut ctx));
    timed("5", 600.0, true, &mut || criterion_5(&mut ctx));
    if let Some(v) = variant {
        results.push(("8 (dissipative probe)".into(), v, Duration::ZERO, Duration::from_secs(600), false));
    }

    results.sort_by_key(|(id, ..)| {
        let n: u32 = id.split_whitespace().next().unwrap().parse().unwrap();
        (n, id.len())
    });
    let mut failed = 0;
    for (id, out, took, limit, counted) in &results {
        let in_time = took <= limit;
        let pass = out.pass && in_time;
        let tag = match (pass, counted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (not counted, see notes)",
        };
        if !pass && *counted {
            failed += 1;
        }
        println!(
            "criterion {id}: {tag} [{:.1}s / {:.0}s] {}",
            took.as_secs_f64(),
            limit.as_secs_f64(),
            out.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

