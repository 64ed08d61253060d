//! Repeated-interaction (collision) reservoirs acting on a Kerr-cat probe.
//!
//! Each collision couples the probe to a fresh unit prepared in a logical
//! state, evolves the pair for a time `τ`, and discards the unit. Units are
//! drawn from a weighted mixture of reservoirs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    kerr_cat_hamiltonian, loss_channels, MasterEquation, SystemParams, POSITIVITY_FAILURE,
    TRACE_DRIFT_PER_TIME,
};
use crate::error::{Error, Result};
use crate::operators::{
    embed, min_eigenvalue, number, partial_trace, tensor, DensityMatrix, Matrix, Operator,
    SpaceLayout, Vector, C64, ONE,
};
use crate::states::{cat_basis, CatBasis};

/// One reservoir: units prepared at Bloch angles `(θ, φ)`, drawn with `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReservoirSpec {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl ReservoirSpec {
    pub fn new(theta: f64, phi: f64, weight: f64) -> Self {
        Self { theta, phi, weight }
    }
}

/// How units are drawn from a mixture of reservoirs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mixing {
    /// Deterministic largest-remainder interleaving that tracks the weights.
    RoundRobin,
    /// Independent draws from a seeded ChaCha8 stream.
    SeededRandom,
}

/// Representation of a reservoir unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReservoirModel {
    /// A two-level system whose basis states stand for `|C⁺⟩`, `|C⁻⟩`.
    Logical,
    /// A second truncated mode with the same dimension as the probe.
    Fock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionParams {
    pub eps_x: f64,
    pub tau: f64,
    /// Integration step inside a collision; the actual step is `τ/⌈τ/dt⌉`.
    pub dt: f64,
    pub n_collisions: usize,
    pub reservoirs: Vec<ReservoirSpec>,
    pub mixing: Mixing,
    pub seed: u64,
    pub model: ReservoirModel,
    /// Apply one- and two-photon loss to the probe during collisions.
    pub probe_dissipation: bool,
}

impl Default for CollisionParams {
    fn default() -> Self {
        Self {
            eps_x: 1e-3,
            tau: 113.01,
            dt: 113.01 / 6.0,
            n_collisions: 5000,
            reservoirs: vec![ReservoirSpec::new(0.0, 0.0, 1.0)],
            mixing: Mixing::RoundRobin,
            seed: 0,
            model: ReservoirModel::Logical,
            probe_dissipation: true,
        }
    }
}

impl CollisionParams {
    pub fn validate(&self) -> Result<()> {
        if !self.eps_x.is_finite() || self.eps_x < 0.0 {
            return Err(Error::param("eps_x", "must be finite and >= 0"));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::param("tau", "must be > 0"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", "must be > 0"));
        }
        if self.n_collisions == 0 {
            return Err(Error::param("n_collisions", "must be >= 1"));
        }
        if self.reservoirs.is_empty() {
            return Err(Error::param("reservoirs", "at least one reservoir is required"));
        }
        let mut sum = 0.0;
        for (i, r) in self.reservoirs.iter().enumerate() {
            if !r.theta.is_finite() || !r.phi.is_finite() {
                return Err(Error::param(format!("reservoirs[{i}]"), "angles must be finite"));
            }
            if !(0.0..=1.0).contains(&r.weight) {
                return Err(Error::param(
                    format!("reservoirs[{i}].weight"),
                    "must lie in [0, 1]",
                ));
            }
            sum += r.weight;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::param("weights", format!("weights must sum to 1 (got {sum})")));
        }
        Ok(())
    }

    pub fn unit_dim(&self, probe_dim: usize) -> usize {
        match self.model {
            ReservoirModel::Logical => 2,
            ReservoirModel::Fock => probe_dim,
        }
    }
}

/// Infinite sequence of reservoir indices.
#[derive(Clone, Debug)]
pub struct ReservoirSchedule {
    weights: Vec<f64>,
    mixing: Mixing,
    rng: ChaCha8Rng,
    counts: Vec<u64>,
    step: u64,
}

impl ReservoirSchedule {
    pub fn new(params: &CollisionParams) -> Self {
        let weights: Vec<f64> = params.reservoirs.iter().map(|r| r.weight).collect();
        Self {
            counts: vec![0; weights.len()],
            weights,
            mixing: params.mixing,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            step: 0,
        }
    }

    /// The schedule positioned after `start` draws.
    pub fn starting_at(params: &CollisionParams, start: usize) -> Self {
        let mut s = Self::new(params);
        for _ in 0..start {
            s.next_index();
        }
        s
    }

    pub fn next_index(&mut self) -> usize {
        self.step += 1;
        let pick = match self.mixing {
            Mixing::RoundRobin => {
                let k = self.step as f64;
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for (i, (&w, &c)) in self.weights.iter().zip(&self.counts).enumerate() {
                    let score = k * w - c as f64;
                    if score > best_score {
                        best = i;
                        best_score = score;
                    }
                }
                best
            }
            Mixing::SeededRandom => {
                let u: f64 = self.rng.gen();
                let mut acc = 0.0;
                let mut last = 0;
                let mut chosen = None;
                for (i, &w) in self.weights.iter().enumerate() {
                    if w <= 0.0 {
                        continue;
                    }
                    last = i;
                    acc += w;
                    if u < acc {
                        chosen = Some(i);
                        break;
                    }
                }
                chosen.unwrap_or(last)
            }
        };
        self.counts[pick] += 1;
        pick
    }
}

impl Iterator for ReservoirSchedule {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_index())
    }
}

/// First collision at which the detector fired and the window mean there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    pub index: usize,
    pub z_ss: f64,
}

/// Probe readout after each collision.
#[derive(Clone, Debug)]
pub struct CollisionTrace {
    /// 1-based collision numbers.
    pub k: Vec<usize>,
    pub reservoir_index: Vec<usize>,
    pub p_e: Vec<f64>,
    pub p_g: Vec<f64>,
    pub z: Vec<f64>,
    pub steady_state: Option<SteadyState>,
    pub final_state: DensityMatrix,
}

impl CollisionTrace {
    fn empty(initial: DensityMatrix) -> Self {
        Self {
            k: Vec::new(),
            reservoir_index: Vec::new(),
            p_e: Vec::new(),
            p_g: Vec::new(),
            z: Vec::new(),
            steady_state: None,
            final_state: initial,
        }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Appends `later`, which must continue this trace.
    pub fn extend(&mut self, later: CollisionTrace) {
        self.k.extend(later.k);
        self.reservoir_index.extend(later.reservoir_index);
        self.p_e.extend(later.p_e);
        self.p_g.extend(later.p_g);
        self.z.extend(later.z);
        self.final_state = later.final_state;
        self.steady_state = None;
    }
}

/// State of a unit drawn from `spec`.
pub fn prepare_unit(spec: &ReservoirSpec, model: ReservoirModel, basis: &CatBasis) -> DensityMatrix {
    match model {
        ReservoirModel::Logical => {
            let (s, c) = (0.5 * spec.theta).sin_cos();
            let v = Vector::from_vec(vec![C64::new(c, 0.0), C64::from_polar(s, -spec.phi)]);
            DensityMatrix::from_vector(SpaceLayout::single(2).expect("2 >= 2"), &v)
                .expect("unit vector")
        }
        ReservoirModel::Fock => basis.logical_state(spec.theta, spec.phi).to_density(),
    }
}

/// Probe–unit Hamiltonian `H_probe ⊗ I + I ⊗ H_unit + ε_x (|C⁺⟩⟨C⁻| ⊗ L + h.c.)`,
/// where `L` lowers the unit from its `C⁺` state to its `C⁻` state.
pub fn joint_hamiltonian(
    sys: &SystemParams,
    params: &CollisionParams,
    basis: &CatBasis,
) -> Result<Operator> {
    let d = basis.dim();
    let probe_h = kerr_cat_hamiltonian(sys, d, None)?;
    let flip = basis.c_plus().outer(basis.c_minus());
    let (unit_id, lower, unit_h) = match params.model {
        ReservoirModel::Logical => {
            let mut l = Matrix::zeros(2, 2);
            l[(1, 0)] = ONE;
            let l = Operator::new(SpaceLayout::single(2)?, l)?;
            (crate::operators::identity(2)?, l, None)
        }
        ReservoirModel::Fock => {
            let l = basis.c_minus().outer(basis.c_plus());
            let h = number(d)?.scale(C64::new(sys.delta_ir, 0.0));
            (crate::operators::identity(d)?, l, Some(h))
        }
    };
    let mut h = tensor(&[&probe_h, &unit_id])?;
    if let Some(u) = unit_h {
        h = h.add(&tensor(&[&crate::operators::identity(d)?, &u])?)?;
    }
    let coupling = tensor(&[&flip, &lower])?;
    let coupling = coupling.add(&coupling.dagger())?;
    h.add(&coupling.scale(C64::new(params.eps_x, 0.0)))
}

fn joint_dissipators(
    sys: &SystemParams,
    params: &CollisionParams,
    layout: &SpaceLayout,
) -> Result<Vec<(f64, Operator)>> {
    if !params.probe_dissipation {
        return Ok(Vec::new());
    }
    let d = layout.factors()[0];
    loss_channels(sys, d)?
        .into_iter()
        .map(|(rate, op)| Ok((rate, embed(&op, layout, 0)?)))
        .collect()
}

/// One collision: evolve `probe ⊗ unit` for `τ` under `h_joint` (plus probe
/// loss when enabled) and trace out the unit.
pub fn collide_once(
    probe: &DensityMatrix,
    unit: &DensityMatrix,
    h_joint: &Operator,
    sys: &SystemParams,
    params: &CollisionParams,
) -> Result<DensityMatrix> {
    let layout = h_joint.layout().clone();
    let eq = MasterEquation::new(h_joint.clone(), joint_dissipators(sys, params, &layout)?)?;
    let joint = probe.tensor(unit);
    let out = eq.propagate(&joint, 0.0, params.tau, params.dt)?;
    partial_trace(&out, 0)
}

/// Reusable collision machinery for one parameter set.
#[derive(Clone, Debug)]
pub struct CollisionEngine {
    sys: SystemParams,
    params: CollisionParams,
    basis: CatBasis,
    equation: MasterEquation,
    units: Vec<DensityMatrix>,
}

impl CollisionEngine {
    /// Builds the engine on a probe of Fock dimension `dim`.
    pub fn new(sys: &SystemParams, params: &CollisionParams, dim: usize) -> Result<Self> {
        sys.validate()?;
        params.validate()?;
        if sys.eps2 <= 0.0 {
            return Err(Error::param("eps2", "the cat basis needs eps2 > 0"));
        }
        let basis = cat_basis(sys.alpha(), dim)?;
        let h = joint_hamiltonian(sys, params, &basis)?;
        let layout = h.layout().clone();
        let equation = MasterEquation::new(h, joint_dissipators(sys, params, &layout)?)?;
        let steps = (params.tau / params.dt * (1.0 - 1e-12)).ceil().max(1.0);
        equation.check_step(params.tau / steps)?;
        let units = params
            .reservoirs
            .iter()
            .map(|r| prepare_unit(r, params.model, &basis))
            .collect();
        Ok(Self {
            sys: sys.clone(),
            params: params.clone(),
            basis,
            equation,
            units,
        })
    }

    pub fn basis(&self) -> &CatBasis {
        &self.basis
    }

    pub fn params(&self) -> &CollisionParams {
        &self.params
    }

    pub fn system(&self) -> &SystemParams {
        &self.sys
    }

    pub fn unit(&self, reservoir: usize) -> &DensityMatrix {
        &self.units[reservoir]
    }

    /// One collision of `probe` with a unit from reservoir `reservoir`.
    pub fn collide(&self, probe: &DensityMatrix, reservoir: usize) -> Result<DensityMatrix> {
        let unit = self.units.get(reservoir).ok_or(Error::IndexOutOfRange {
            index: reservoir,
            factors: self.units.len(),
        })?;
        let joint = probe.tensor(unit);
        let out = self.equation.propagate(&joint, 0.0, self.params.tau, self.params.dt)?;
        partial_trace(&out, 0)
    }

    /// Collisions `start+1 ..= start+count` from `probe`. Splitting a run into
    /// consecutive ranges reproduces the single run bit for bit.
    ///
    /// A numerical failure aborts with [`Error::CollisionAborted`], which
    /// carries the trace up to the last good collision.
    pub fn run_range(&self, probe: &DensityMatrix, start: usize, count: usize) -> Result<CollisionTrace> {
        self.run_until(probe, start, count, |_| false)
    }

    /// Like [`CollisionEngine::run_range`], stopping early after the first
    /// collision for which `stop` returns true.
    pub fn run_until<F>(
        &self,
        probe: &DensityMatrix,
        start: usize,
        count: usize,
        mut stop: F,
    ) -> Result<CollisionTrace>
    where
        F: FnMut(&CollisionTrace) -> bool,
    {
        if probe.layout().factors() != [self.basis.dim()] {
            return Err(Error::Shape(format!(
                "probe layout {:?} does not match dim {}",
                probe.layout().factors(),
                self.basis.dim()
            )));
        }
        let mut schedule = ReservoirSchedule::starting_at(&self.params, start);
        let mut trace = CollisionTrace::empty(probe.clone());
        for k in start + 1..=start + count {
            let r = schedule.next_index();
            let next = match self.collide(&trace.final_state, r).and_then(|s| self.check(s, k)) {
                Ok(s) => s,
                Err(source) => {
                    return Err(Error::CollisionAborted {
                        completed: k - 1,
                        trace: Box::new(trace),
                        source: Box::new(source),
                    });
                }
            };
            let (pe, pg) = self.basis.populations(&next)?;
            trace.k.push(k);
            trace.reservoir_index.push(r);
            trace.p_e.push(pe);
            trace.p_g.push(pg);
            trace.z.push(pe - pg);
            trace.final_state = next;
            if stop(&trace) {
                break;
            }
        }
        Ok(trace)
    }

    pub fn run(&self, probe: &DensityMatrix) -> Result<CollisionTrace> {
        self.run_range(probe, 0, self.params.n_collisions)
    }

    fn check(&self, rho: DensityMatrix, k: usize) -> Result<DensityMatrix> {
        let time = k as f64 * self.params.tau;
        let trace_err = rho.trace() - 1.0;
        if !trace_err.is_finite() || trace_err.abs() > TRACE_DRIFT_PER_TIME * time.max(1.0) {
            return Err(Error::NumericalFailure {
                time,
                reason: format!("probe trace drifted by {trace_err:e}"),
            });
        }
        let min_eig = min_eigenvalue(rho.matrix());
        if min_eig < POSITIVITY_FAILURE {
            return Err(Error::NumericalFailure {
                time,
                reason: format!("negative probe eigenvalue {min_eig:e}"),
            });
        }
        Ok(rho)
    }
}

/// Runs `params.n_collisions` collisions starting from `probe0`.
pub fn run_collisions(
    probe0: &DensityMatrix,
    sys: &SystemParams,
    params: &CollisionParams,
) -> Result<CollisionTrace> {
    CollisionEngine::new(sys, params, probe0.dim())?.run(probe0)
}

/// First index `i` (0-based) at which the last `window` samples all lie
/// within `tol` of `z[i]`; returns the index and the window mean.
pub fn detect_in_series(z: &[f64], window: usize, tol: f64) -> Option<(usize, f64)> {
    if window == 0 {
        return None;
    }
    for i in window - 1..z.len() {
        let win = &z[i + 1 - window..=i];
        if win.iter().all(|v| (z[i] - v).abs() < tol) {
            return Some((i, win.iter().sum::<f64>() / window as f64));
        }
    }
    None
}

/// Steady-state detection on a collision trace: fires at the first
/// collision `k` with `max_j |z(k) − z(k−j)| < tol` over the trailing window.
pub fn detect_steady_state(trace: &CollisionTrace, window: usize, tol: f64) -> Option<SteadyState> {
    detect_in_series(&trace.z, window, tol).map(|(i, z_ss)| SteadyState {
        index: trace.k[i],
        z_ss,
    })
}

/// Mean of the last `window` samples (all samples if fewer).
pub fn trailing_mean(z: &[f64], window: usize) -> f64 {
    let n = window.min(z.len()).max(1);
    let tail = &z[z.len().saturating_sub(n)..];
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}
