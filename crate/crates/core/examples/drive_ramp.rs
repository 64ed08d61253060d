//! Adiabatic preparation of the even cat by ramping the squeezing drive from
//! zero, eps2(t) = eps2_0 (1 - exp(-t^4/tau^4)), with tau K = 5 and eps2_0 = 4K.
//!
//! cargo run --release --example drive_ramp

use catline::dynamics::{evolve, DriveSchedule, SystemParams};
use catline::states::{cat_basis, fidelity, required_dim, vacuum};

fn main() -> catline::Result<()> {
    let kerr = 1.12e-6;
    let eps2_0 = 4.0 * kerr;
    let tau = 5.0 / kerr;
    let sys = SystemParams {
        kerr,
        eps2: eps2_0,
        delta_ar: 0.0,
        delta_ir: 0.0,
        kappa1: 0.0,
        kappa2: 0.0,
        omega_scale: catline::dynamics::DEFAULT_OMEGA_SCALE,
    };
    let schedule = DriveSchedule::ramp(eps2_0, tau)?;
    let dim = required_dim(2.0);
    let basis = cat_basis(2.0, dim)?;
    for frac in [0.0, 0.5, 1.0, 2.0] {
        println!("eps2({frac} tau) / eps2_0 = {:.6}", schedule.value(frac * tau) / eps2_0);
    }
    for dt in [80.0, 40.0] {
        let tr = evolve(&vacuum(dim)?, &sys, &schedule, 3.0 * tau, dt, 5000)?;
        let f = fidelity(&tr.final_state, basis.c_plus())?;
        println!("dt = {dt}: fidelity to |C+> after 3 tau = {f:.6}");
    }
    Ok(())
}
