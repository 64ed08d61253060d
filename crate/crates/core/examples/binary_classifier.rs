//! The steady-state sign rule applied to weighted mixtures of a theta = 0 and
//! a theta = pi reservoir.
//!
//! cargo run --release --example binary_classifier

use std::f64::consts::PI;

use catline::classifier::{classify_reservoirs, DetectorSettings};
use catline::collision::{CollisionParams, Mixing, ReservoirSpec};
use catline::dynamics::SystemParams;
use catline::states::required_dim;

fn main() -> catline::Result<()> {
    let s = 4.0 * 1.12e-6 / 2.70e-4;
    let sys = SystemParams {
        kerr: 1.12e-6,
        eps2: 4.48e-6,
        delta_ar: 5.80e-6 * s,
        delta_ir: 5.80e-6 * s,
        kappa1: 1.71e-6 * s,
        kappa2: 3.34e-4 * s,
        omega_scale: catline::dynamics::DEFAULT_OMEGA_SCALE,
    };
    let dim = required_dim(sys.alpha());
    let detector = DetectorSettings { window: 200, tol: 0.05 };
    for (w0, mixing) in [
        (1.0, Mixing::RoundRobin),
        (0.8, Mixing::RoundRobin),
        (0.5, Mixing::RoundRobin),
        (0.2, Mixing::RoundRobin),
        (0.0, Mixing::RoundRobin),
        (0.8, Mixing::SeededRandom),
    ] {
        let params = CollisionParams {
            probe_dissipation: false,
            mixing,
            seed: 11,
            reservoirs: vec![
                ReservoirSpec::new(0.0, 0.0, w0),
                ReservoirSpec::new(PI, 0.0, 1.0 - w0),
            ],
            ..CollisionParams::default()
        };
        let out = classify_reservoirs(&sys, &params, dim, &detector)?;
        let d = out.decision;
        println!(
            "P(theta=0) = {w0:.1} {mixing:?}: label {} (z_ss = {:+.4}, converged = {}, collisions = {})",
            d.label, d.z_ss, d.converged, d.n_used
        );
    }
    Ok(())
}
