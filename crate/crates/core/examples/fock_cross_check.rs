//! Compares the two-level reservoir model with a full second mode as the
//! reservoir unit, at a small cat amplitude with no detuning.
//!
//! cargo run --release --example fock_cross_check

use catline::collision::{CollisionEngine, CollisionParams, ReservoirModel, ReservoirSpec};
use catline::dynamics::SystemParams;
use catline::states::required_dim;

fn main() -> catline::Result<()> {
    let sys = SystemParams {
        kerr: 1.12e-6,
        eps2: 1.12e-6,
        delta_ar: 0.0,
        delta_ir: 0.0,
        kappa1: 0.0,
        kappa2: 0.0,
        omega_scale: catline::dynamics::DEFAULT_OMEGA_SCALE,
    };
    let dim = required_dim(1.0);
    for model in [ReservoirModel::Logical, ReservoirModel::Fock] {
        let params = CollisionParams {
            eps_x: 5e-3,
            tau: 100.0,
            dt: 10.0,
            n_collisions: 20,
            probe_dissipation: false,
            reservoirs: vec![ReservoirSpec::new(2.0, 0.4, 1.0)],
            model,
            ..CollisionParams::default()
        };
        let engine = CollisionEngine::new(&sys, &params, dim)?;
        let probe = engine.basis().plus_state().to_density();
        let tr = engine.run(&probe)?;
        let b = engine.basis().bloch_vector(&tr.final_state)?;
        println!("{model:?}: z after 20 collisions = {:+.10}, bloch = ({:+.6}, {:+.6}, {:+.6})", tr.z[19], b.x, b.y, b.z);
    }
    Ok(())
}
