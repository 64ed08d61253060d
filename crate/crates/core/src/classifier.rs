//! Binary classification of reservoir mixtures by the probe's steady-state
//! logical magnetization.

use std::fmt;

use crate::collision::{
    detect_steady_state, trailing_mean, CollisionEngine, CollisionParams, CollisionTrace,
    SteadyState,
};
use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Zero => 0,
            Label::One => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Label `0` when `z_ss ≥ 0`, else `1`.
pub fn classify(z_ss: f64) -> Result<Label> {
    if !z_ss.is_finite() || z_ss.abs() > 1.0 + 1e-6 {
        return Err(Error::param("z_ss", format!("{z_ss} is outside [-1, 1]")));
    }
    Ok(if z_ss >= 0.0 { Label::Zero } else { Label::One })
}

/// Trailing-window steady-state detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorSettings {
    pub window: usize,
    pub tol: f64,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            window: 200,
            tol: 1e-3,
        }
    }
}

impl DetectorSettings {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::param("window", "must be >= 1"));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::param("tol", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub label: Label,
    pub z_ss: f64,
    pub converged: bool,
    /// Collisions run before the decision.
    pub n_used: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub decision: Decision,
    pub trace: CollisionTrace,
}

/// Drives a probe prepared in `|+⟩` with the reservoir mixture in `params`
/// until the detector fires or `n_collisions` is exhausted. Without
/// convergence, `z_ss` is the mean over the trailing window.
pub fn classify_reservoirs(
    sys: &SystemParams,
    params: &CollisionParams,
    dim: usize,
    detector: &DetectorSettings,
) -> Result<Classification> {
    detector.validate()?;
    let engine = CollisionEngine::new(sys, params, dim)?;
    let probe = engine.basis().plus_state().to_density();
    let mut trace = engine.run_until(&probe, 0, params.n_collisions, |t| {
        // only the newest sample can complete a window
        let n = t.z.len();
        n >= detector.window && window_settled(&t.z[n - detector.window..], detector.tol)
    })?;
    let fired: Option<SteadyState> = detect_steady_state(&trace, detector.window, detector.tol);

    let decision = match fired {
        Some(ss) => {
            trace.steady_state = Some(ss);
            Decision {
                label: classify(ss.z_ss)?,
                z_ss: ss.z_ss,
                converged: true,
                n_used: ss.index,
            }
        }
        None => {
            let z_ss = trailing_mean(&trace.z, detector.window);
            Decision {
                label: classify(z_ss)?,
                z_ss,
                converged: false,
                n_used: trace.len(),
            }
        }
    };
    Ok(Classification { decision, trace })
}

fn window_settled(win: &[f64], tol: f64) -> bool {
    let last = win[win.len() - 1];
    win.iter().all(|v| (last - v).abs() < tol)
}
