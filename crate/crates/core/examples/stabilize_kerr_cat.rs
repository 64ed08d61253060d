//! Logical populations of an even cat under the three bundled parameter rows.
//!
//! cargo run --release --example stabilize_kerr_cat

use catline::dynamics::{evolve, DriveSchedule, SystemParams};
use catline::states::{cat_basis, required_dim};

fn main() -> catline::Result<()> {
    let rows = [
        ("fig2", SystemParams::fig2(), 5.0),
        ("fig3", SystemParams::fig3(), 1.0),
        ("fig4", SystemParams::fig4(), 50.0),
    ];
    let t_final = 1.0e5;
    for (name, p, dt) in rows {
        let dim = required_dim(p.alpha());
        let basis = cat_basis(p.alpha(), dim)?;
        let rho0 = basis.c_plus().to_density();
        let every = (t_final / dt / 10.0) as usize;
        let tr = evolve(&rho0, &p, &DriveSchedule::constant(p.eps2), t_final, dt, every)?;
        println!("{name}: alpha = {:.3}, dim = {dim}", p.alpha());
        for i in 0..tr.len() {
            println!(
                "  t = {:>9.0}  P_e = {:.4}  P_g = {:.4}  Z = {:+.4}",
                tr.times[i], tr.p_e[i], tr.p_g[i], tr.z[i]
            );
        }
    }
    Ok(())
}
