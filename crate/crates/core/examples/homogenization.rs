//! A non-decaying cat probe, prepared in |+>, repeatedly colliding with fresh
//! reservoir qubits. Its logical magnetization relaxes to the reservoir's.
//!
//! cargo run --release --example homogenization

use std::f64::consts::PI;

use catline::collision::{
    detect_steady_state, CollisionEngine, CollisionParams, ReservoirSpec,
};
use catline::dynamics::SystemParams;
use catline::states::required_dim;

fn scaled_system() -> SystemParams {
    // eps2 = 4K with the full-size rates scaled by the same factor
    let s = 4.0 * 1.12e-6 / 2.70e-4;
    SystemParams {
        kerr: 1.12e-6,
        eps2: 4.48e-6,
        delta_ar: 5.80e-6 * s,
        delta_ir: 5.80e-6 * s,
        kappa1: 1.71e-6 * s,
        kappa2: 3.34e-4 * s,
        omega_scale: catline::dynamics::DEFAULT_OMEGA_SCALE,
    }
}

fn main() -> catline::Result<()> {
    let sys = scaled_system();
    let dim = required_dim(sys.alpha());
    for theta in [0.0, PI / 2.0, PI] {
        let params = CollisionParams {
            n_collisions: 1500,
            probe_dissipation: false,
            reservoirs: vec![ReservoirSpec::new(theta, 0.0, 1.0)],
            ..CollisionParams::default()
        };
        let engine = CollisionEngine::new(&sys, &params, dim)?;
        let probe = engine.basis().plus_state().to_density();
        let trace = engine.run(&probe)?;
        let b = engine.basis().bloch_vector(&trace.final_state)?;
        let ss = detect_steady_state(&trace, 200, 1e-3);
        println!(
            "theta = {theta:.4}: unit P_e = {:.4}, probe P_e = {:.4}, bloch = ({:+.3}, {:+.3}, {:+.3}), steady state {:?}",
            (theta / 2.0).cos().powi(2),
            trace.p_e.last().unwrap(),
            b.x,
            b.y,
            b.z,
            ss.map(|s| s.index)
        );
    }
    Ok(())
}
