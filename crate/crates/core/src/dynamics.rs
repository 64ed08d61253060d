//! Kerr-cat Hamiltonian, the master equation with one- and two-photon loss,
//! and fixed-step trajectory integration.
//!
//! Every quantity is dimensionless in units of a scaling frequency `Ω`; time
//! is `Ω·t`. With `κ₁ = 1/T₁` in these units, `T₁Ω = 1/κ₁`.

use crate::error::{Error, Result};
use crate::generator::{Generator, Rk4};
use crate::operators::{
    annihilation, creation, hermitian_deviation, min_eigenvalue, DensityMatrix, Matrix,
    Operator, SpaceLayout, C64, I, ZERO,
};
use crate::states::{cat_basis, check_truncation, CatBasis};

/// Default scaling frequency `Ω` in rad/s (metadata only).
pub const DEFAULT_OMEGA_SCALE: f64 = 37.7e9;

/// Upper bound on `dt · ‖H_eff‖` accepted by the integrator.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Positivity breach that aborts an integration.
pub const POSITIVITY_FAILURE: f64 = -1e-4;

/// Allowed trace drift per unit of dimensionless time.
pub const TRACE_DRIFT_PER_TIME: f64 = 1e-8;

/// Physical parameters of the driven Kerr resonator, in units of `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub kerr: f64,
    pub eps2: f64,
    pub delta_ar: f64,
    pub delta_ir: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Scaling frequency in rad/s; never enters the dynamics.
    pub omega_scale: f64,
}

impl SystemParams {
    /// Table row of the strongly detuned, weakly driven resonator.
    pub fn fig2() -> Self {
        Self::table_row(2.25e-6, 3.34e-5, 1.00e-4)
    }

    /// Same detuning as [`SystemParams::fig2`] with a tenfold squeezing drive.
    pub fn fig3() -> Self {
        Self::table_row(2.25e-5, 3.34e-5, 1.00e-4)
    }

    /// The stable row: weak two-photon loss and small detuning.
    pub fn fig4() -> Self {
        Self::table_row(2.25e-6, 3.34e-6, 5.80e-6)
    }

    fn table_row(eps2: f64, kappa2: f64, delta: f64) -> Self {
        Self {
            kerr: 1.12e-6,
            eps2,
            delta_ar: delta,
            delta_ir: delta,
            kappa1: 1.71e-6,
            kappa2,
            omega_scale: DEFAULT_OMEGA_SCALE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("kerr", self.kerr),
            ("eps2", self.eps2),
            ("delta_ar", self.delta_ar),
            ("delta_ir", self.delta_ir),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("omega_scale", self.omega_scale),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.kerr <= 0.0 {
            return Err(Error::param("kerr", "must be > 0"));
        }
        for (name, v) in [("eps2", self.eps2), ("kappa1", self.kappa1), ("kappa2", self.kappa2)] {
            if v < 0.0 {
                return Err(Error::param(name, "must be >= 0"));
            }
        }
        if self.omega_scale <= 0.0 {
            return Err(Error::param("omega_scale", "must be > 0"));
        }
        Ok(())
    }

    /// Cat amplitude `α = √(ε₂/K)`.
    pub fn alpha(&self) -> f64 {
        (self.eps2 / self.kerr).sqrt()
    }

    /// `T₁` in dimensionless time, `1/κ₁`.
    pub fn t1(&self) -> f64 {
        1.0 / self.kappa1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriveKind {
    Constant,
    Ramp,
}

/// Time dependence of the squeezing drive `ε₂(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSchedule {
    pub kind: DriveKind,
    pub eps2_0: f64,
    pub tau_ramp: f64,
}

impl DriveSchedule {
    pub fn constant(eps2_0: f64) -> Self {
        Self {
            kind: DriveKind::Constant,
            eps2_0,
            tau_ramp: 0.0,
        }
    }

    pub fn ramp(eps2_0: f64, tau_ramp: f64) -> Result<Self> {
        let s = Self {
            kind: DriveKind::Ramp,
            eps2_0,
            tau_ramp,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps2_0.is_finite() || self.eps2_0 < 0.0 {
            return Err(Error::param("eps2", "drive target must be finite and >= 0"));
        }
        if self.kind == DriveKind::Ramp && !(self.tau_ramp > 0.0 && self.tau_ramp.is_finite()) {
            return Err(Error::param("tau_ramp", "must be > 0 for a ramp"));
        }
        Ok(())
    }

    /// `ε₂(t)`; the ramp is `ε₂⁰ (1 − exp(−t⁴/τ⁴))`.
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            DriveKind::Constant => self.eps2_0,
            DriveKind::Ramp => {
                let x = t / self.tau_ramp;
                let x2 = x * x;
                -self.eps2_0 * (-(x2 * x2)).exp_m1()
            }
        }
    }
}

pub fn drive_value(t: f64, schedule: &DriveSchedule) -> f64 {
    schedule.value(t)
}

/// `−(a†² + a²)`, the operator multiplying `ε₂`.
pub fn two_photon_drive(dim: usize) -> Result<Operator> {
    let a = annihilation(dim)?;
    let ad = creation(dim)?;
    let m = -(ad.matrix() * ad.matrix() + a.matrix() * a.matrix());
    Operator::new(SpaceLayout::single(dim)?, m)
}

/// `K a†²a² + Δ_ar a†a` (the undriven part of the Kerr-cat Hamiltonian).
pub(crate) fn kerr_detuning(params: &SystemParams, dim: usize) -> Result<Operator> {
    // a†²a² = n(n−1) on the diagonal
    let diag: Vec<C64> = (0..dim)
        .map(|n| {
            let n = n as f64;
            C64::new(params.kerr * n * (n - 1.0) + params.delta_ar * n, 0.0)
        })
        .collect();
    Operator::diagonal(&diag)
}

/// `H = K a†²a² − ε₂(a†² + a²) + Δ_ar a†a`.
pub fn kerr_cat_hamiltonian(
    params: &SystemParams,
    dim: usize,
    eps2_override: Option<f64>,
) -> Result<Operator> {
    params.validate()?;
    let eps2 = eps2_override.unwrap_or(params.eps2);
    if !eps2.is_finite() || eps2 < 0.0 {
        return Err(Error::param("eps2", "must be finite and >= 0"));
    }
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    check_truncation((eps2 / params.kerr).sqrt(), dim)?;
    kerr_detuning(params, dim)?.add(&two_photon_drive(dim)?.scale(C64::new(eps2, 0.0)))
}

/// Photon-number parity `diag(+1, −1, +1, …)`.
pub fn parity_operator(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let diag: Vec<C64> = (0..dim)
        .map(|n| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    Operator::diagonal(&diag)
}

/// One-photon (`a`, rate κ₁) and two-photon (`a²`, rate κ₂) loss channels.
pub fn loss_channels(params: &SystemParams, dim: usize) -> Result<Vec<(f64, Operator)>> {
    let a = annihilation(dim)?;
    let a2 = a.mul(&a)?;
    Ok(vec![(params.kappa1, a), (params.kappa2, a2)])
}

/// Right-hand side of the GKSL equation, evaluated with dense products:
/// `−i[H, ρ] + Σ κⱼ (oⱼρoⱼ† − ½{oⱼ†oⱼ, ρ})`.
pub fn gksl_rhs(
    rho: &DensityMatrix,
    hamiltonian: &Operator,
    dissipators: &[(f64, Operator)],
) -> Result<Operator> {
    check_layout(rho.layout(), hamiltonian.layout())?;
    let r = rho.matrix();
    let h = hamiltonian.matrix();
    let mut out = (h * r - r * h) * (-I);
    for (rate, op) in dissipators {
        check_rate(*rate)?;
        check_layout(rho.layout(), op.layout())?;
        let o = op.matrix();
        let od = o.adjoint();
        let odo = &od * o;
        out += (o * r * &od - (&odo * r + r * &odo) * C64::new(0.5, 0.0)) * C64::new(*rate, 0.0);
    }
    Ok(Operator::from_parts(rho.layout().clone(), out))
}

fn check_layout(a: &SpaceLayout, b: &SpaceLayout) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "layout {:?} does not match {:?}",
            a.factors(),
            b.factors()
        )));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::param("rate", format!("dissipation rate {rate} must be >= 0")));
    }
    Ok(())
}

/// A GKSL master equation `dρ/dt = −i[H₀ + ε₂(t)·H₁, ρ] + Σ κ D[o]ρ`,
/// compiled once and integrated with fixed-step RK4.
#[derive(Clone, Debug)]
pub struct MasterEquation {
    layout: SpaceLayout,
    hamiltonian: Operator,
    drive: Option<(Operator, DriveSchedule)>,
    dissipators: Vec<(f64, Operator)>,
    compiled: Generator,
}

impl MasterEquation {
    pub fn new(hamiltonian: Operator, dissipators: Vec<(f64, Operator)>) -> Result<Self> {
        Self::build(hamiltonian, None, dissipators)
    }

    /// Adds a time-dependent term `schedule.value(t) · drive` to the Hamiltonian.
    pub fn with_drive(self, drive: Operator, schedule: DriveSchedule) -> Result<Self> {
        schedule.validate()?;
        Self::build(self.hamiltonian, Some((drive, schedule)), self.dissipators)
    }

    fn build(
        hamiltonian: Operator,
        drive: Option<(Operator, DriveSchedule)>,
        dissipators: Vec<(f64, Operator)>,
    ) -> Result<Self> {
        let layout = hamiltonian.layout().clone();
        if hamiltonian.hermitian_deviation() > 1e-12 {
            return Err(Error::Shape("Hamiltonian is not Hermitian".into()));
        }
        if let Some((d, _)) = &drive {
            check_layout(&layout, d.layout())?;
        }
        for (rate, op) in &dissipators {
            check_rate(*rate)?;
            check_layout(&layout, op.layout())?;
        }
        let pairs: Vec<(f64, &Matrix)> = dissipators.iter().map(|(r, o)| (*r, o.matrix())).collect();
        let compiled = Generator::new(
            hamiltonian.matrix(),
            drive.as_ref().map(|(d, _)| d.matrix()),
            &pairs,
        );
        Ok(Self {
            layout,
            hamiltonian,
            drive,
            dissipators,
            compiled,
        })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    fn drive_amplitude(&self, t: f64) -> f64 {
        self.drive.as_ref().map_or(0.0, |(_, s)| s.value(t))
    }

    /// Bound on the generator scale: `‖H₀‖ + max ε₂ · ‖H₁‖ + ½ Σ κ ‖o†o‖`
    /// in the row-sum norm. The ramp is monotone, so its target bounds it.
    pub fn generator_norm(&self) -> f64 {
        let mut norm = self.hamiltonian.row_sum_norm();
        if let Some((d, s)) = &self.drive {
            norm += s.eps2_0.abs() * d.row_sum_norm();
        }
        for (rate, op) in &self.dissipators {
            let odo = op.dagger().mul(op).expect("same layout");
            norm += 0.5 * rate * odo.row_sum_norm();
        }
        norm
    }

    pub fn check_step(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", "must be > 0"));
        }
        let product = dt * self.generator_norm();
        if product > STABILITY_LIMIT {
            return Err(Error::StepSize {
                product,
                limit: STABILITY_LIMIT,
            });
        }
        Ok(())
    }

    /// `dρ/dt` at time `t` through the compiled kernel.
    pub fn rhs(&self, t: f64, rho: &DensityMatrix) -> Result<Operator> {
        check_layout(&self.layout, rho.layout())?;
        let n = self.layout.total_dim();
        let mut out = vec![ZERO; n * n];
        let mut rk = Rk4::new(n);
        rk.rhs(&self.compiled, self.drive_amplitude(t), rho.matrix().as_slice(), &mut out);
        Ok(Operator::from_parts(
            self.layout.clone(),
            Matrix::from_vec(n, n, out),
        ))
    }

    /// Integrates from `t0` over `duration` in equal steps no longer than
    /// `dt`, without recording. Used by the collision engine.
    pub fn propagate(&self, rho: &DensityMatrix, t0: f64, duration: f64, dt: f64) -> Result<DensityMatrix> {
        check_layout(&self.layout, rho.layout())?;
        let steps = step_count(duration, dt)?;
        let h = duration / steps as f64;
        self.check_step(h)?;
        let n = self.layout.total_dim();
        let mut state: Vec<C64> = rho.matrix().as_slice().to_vec();
        let mut rk = Rk4::new(n);
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            rk.step(&self.compiled, |s| self.drive_amplitude(s), t, h, &mut state);
        }
        Ok(DensityMatrix::from_parts(
            self.layout.clone(),
            Matrix::from_vec(n, n, state),
        ))
    }

    /// Integrates over `[0, t_final]`, calling `observe(step, t, ρ)` at step 0,
    /// every `record_every` steps and at the final step.
    pub fn integrate<F>(
        &self,
        rho0: &DensityMatrix,
        t_final: f64,
        dt: f64,
        record_every: usize,
        mut observe: F,
    ) -> Result<DensityMatrix>
    where
        F: FnMut(usize, f64, &Matrix) -> Result<()>,
    {
        check_layout(&self.layout, rho0.layout())?;
        if record_every == 0 {
            return Err(Error::param("record_every", "must be >= 1"));
        }
        let steps = step_count(t_final, dt)?;
        let h = t_final / steps as f64;
        self.check_step(h)?;
        let n = self.layout.total_dim();
        let mut state = rho0.matrix().clone();
        let mut rk = Rk4::new(n);
        observe(0, 0.0, &state)?;
        for k in 0..steps {
            let t = k as f64 * h;
            rk.step(&self.compiled, |s| self.drive_amplitude(s), t, h, state.as_mut_slice());
            let done = k + 1;
            if done % record_every == 0 || done == steps {
                observe(done, done as f64 * h, &state)?;
            }
        }
        Ok(DensityMatrix::from_parts(self.layout.clone(), state))
    }
}

fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::param("t_final", "must be > 0"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be > 0"));
    }
    let steps = (duration / dt * (1.0 - 1e-12)).ceil();
    Ok((steps as usize).max(1))
}

/// Observables recorded along an integration, plus the final state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_g: Vec<f64>,
    pub z: Vec<f64>,
    pub trace_err: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub final_state: DensityMatrix,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evolves `rho0` under the Kerr-cat master equation with drive `schedule`
/// and records logical populations against the cat basis at the target
/// amplitude `α = √(ε₂⁰/K)`.
///
/// `params.eps2` is superseded by `schedule.eps2_0`.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &SystemParams,
    schedule: &DriveSchedule,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    params.validate()?;
    schedule.validate()?;
    let dim = rho0.dim();
    if rho0.layout().factors().len() != 1 {
        return Err(Error::Shape("evolve expects a single-mode state".into()));
    }
    if schedule.eps2_0 <= 0.0 {
        return Err(Error::param("eps2", "stabilization needs a drive eps2 > 0"));
    }
    let alpha = (schedule.eps2_0 / params.kerr).sqrt();
    let basis = cat_basis(alpha, dim)?;
    let equation = MasterEquation::new(kerr_detuning(params, dim)?, loss_channels(params, dim)?)?
        .with_drive(two_photon_drive(dim)?, *schedule)?;
    evolve_with(&equation, &basis, rho0, t_final, dt, record_every)
}

/// [`evolve`] for an arbitrary single-mode master equation and readout basis.
pub fn evolve_with(
    equation: &MasterEquation,
    basis: &CatBasis,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    let p = basis.c_plus().amplitudes().clone();
    let m = basis.c_minus().amplitudes().clone();
    let mut tr = Trajectory {
        times: Vec::new(),
        p_e: Vec::new(),
        p_g: Vec::new(),
        z: Vec::new(),
        trace_err: Vec::new(),
        min_eig: Vec::new(),
        final_state: rho0.clone(),
    };
    let final_state = equation.integrate(rho0, t_final, dt, record_every, |_, t, rho| {
        let trace_err = rho.trace().re - 1.0;
        if !trace_err.is_finite() {
            return Err(Error::NumericalFailure {
                time: t,
                reason: "state became non-finite".into(),
            });
        }
        if trace_err.abs() > TRACE_DRIFT_PER_TIME * t.max(1.0) {
            return Err(Error::NumericalFailure {
                time: t,
                reason: format!("trace drifted by {trace_err:e}"),
            });
        }
        if hermitian_deviation(rho) > 1e-10 {
            return Err(Error::NumericalFailure {
                time: t,
                reason: "state lost Hermiticity".into(),
            });
        }
        let min_eig = min_eigenvalue(rho);
        if min_eig < POSITIVITY_FAILURE {
            return Err(Error::NumericalFailure {
                time: t,
                reason: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        let pe = p.dotc(&(rho * &p)).re;
        let pg = m.dotc(&(rho * &m)).re;
        tr.times.push(t);
        tr.p_e.push(pe);
        tr.p_g.push(pg);
        tr.z.push(pe - pg);
        tr.trace_err.push(trace_err);
        tr.min_eig.push(min_eig);
        Ok(())
    })?;
    tr.final_state = final_state;
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{commutator, expectation, number, ONE};
    use crate::states::{cat, required_dim, vacuum, Ket, Parity};

    #[test]
    fn undriven_hamiltonian_is_diagonal_kerr() {
        let mut p = SystemParams::fig4();
        p.eps2 = 0.0;
        p.delta_ar = 0.0;
        let h = kerr_cat_hamiltonian(&p, 12, None).unwrap();
        for i in 0..12usize {
            for j in 0..12 {
                let want = if i == j { p.kerr * (i * i.saturating_sub(1)) as f64 } else { 0.0 };
                assert!((h.get(i, j) - C64::new(want, 0.0)).norm() <= 1e-18);
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_guards_truncation() {
        let p = SystemParams::fig4();
        let dim = required_dim(p.alpha());
        assert!(kerr_cat_hamiltonian(&p, dim, None).unwrap().hermitian_deviation() <= 1e-12);
        assert!(matches!(
            kerr_cat_hamiltonian(&p, dim - 1, None),
            Err(Error::Truncation { .. })
        ));
        assert!((p.alpha() - 1.417).abs() < 5e-4);
    }

    #[test]
    fn cat_states_are_degenerate_eigenstates() {
        for alpha in [1.0f64, 2.0] {
            let mut p = SystemParams::fig4();
            p.delta_ar = 0.0;
            p.eps2 = p.kerr * alpha * alpha;
            let dim = required_dim(alpha);
            let h = kerr_cat_hamiltonian(&p, dim, None).unwrap();
            let energy = p.eps2 * p.eps2 / p.kerr;
            for parity in [Parity::Even, Parity::Odd] {
                let c = cat(alpha, parity, dim).unwrap();
                let hc = h.apply(c.amplitudes()).unwrap();
                let resid = (hc + c.amplitudes() * C64::new(energy, 0.0)).norm() / energy;
                assert!(resid <= 1e-6, "alpha {alpha} {parity:?}: {resid}");
            }
        }
    }

    #[test]
    fn drive_ramp_values() {
        let s = DriveSchedule::ramp(2.0, 5.0).unwrap();
        assert_eq!(drive_value(0.0, &s), 0.0);
        assert!((drive_value(5.0, &s) - 2.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((drive_value(5.0, &s) / 2.0 - 0.632121).abs() < 1e-6);
        assert_eq!(drive_value(100.0, &s), 2.0);
        assert_eq!(drive_value(3.0, &DriveSchedule::constant(0.7)), 0.7);
        assert!(DriveSchedule::ramp(1.0, 0.0).is_err());
        let mut last = 0.0;
        for k in 0..200 {
            let v = s.value(k as f64 * 0.1);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn rhs_examples() {
        let dim = 6;
        let zero_h = Operator::zeros(SpaceLayout::single(dim).unwrap());
        let rho = Ket::fock(1, dim).unwrap().to_density();
        assert_eq!(gksl_rhs(&rho, &zero_h, &[]).unwrap().max_abs(), 0.0);

        let a = annihilation(dim).unwrap();
        let k1 = 0.37;
        let d = gksl_rhs(&rho, &zero_h, &[(k1, a.clone())]).unwrap();
        let dn = d.mul(&number(dim).unwrap()).unwrap().trace();
        assert!((dn.re + k1).abs() < 1e-15);

        let a2 = a.mul(&a).unwrap();
        for n in [0, 1] {
            let r = Ket::fock(n, dim).unwrap().to_density();
            assert_eq!(gksl_rhs(&r, &zero_h, &[(0.9, a2.clone())]).unwrap().max_abs(), 0.0);
        }
        assert!(gksl_rhs(&rho, &zero_h, &[(-1.0, a.clone())]).is_err());
        assert!(gksl_rhs(&rho, &Operator::zeros(SpaceLayout::single(4).unwrap()), &[]).is_err());
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let p = SystemParams::fig2();
        let dim = required_dim(p.alpha());
        let basis = cat_basis(p.alpha(), dim).unwrap();
        let rho = basis.logical_state(0.7, 0.2).to_density();
        let h = kerr_cat_hamiltonian(&p, dim, None).unwrap();
        let d = gksl_rhs(&rho, &h, &loss_channels(&p, dim).unwrap()).unwrap();
        assert!(d.trace().norm() <= 1e-12);
        assert!(d.hermitian_deviation() <= 1e-15);

        let eq = MasterEquation::new(h, loss_channels(&p, dim).unwrap()).unwrap();
        let fast = eq.rhs(0.0, &rho).unwrap();
        assert!(fast.sub(&d).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn parity_operator_properties() {
        let pi = parity_operator(4).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| pi.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);

        let p = SystemParams::fig4();
        let dim = required_dim(p.alpha());
        let h = kerr_cat_hamiltonian(&p, dim, None).unwrap();
        let comm = commutator(&parity_operator(dim).unwrap(), &h).unwrap();
        assert!(comm.max_abs() <= 1e-12);

        let c = cat(p.alpha(), Parity::Even, dim).unwrap().to_density();
        let e = expectation(&c, &parity_operator(dim).unwrap()).unwrap();
        assert!((e - ONE).norm() <= 1e-10);
    }

    #[test]
    fn zero_generator_keeps_state_constant() {
        let dim = 5;
        let layout = SpaceLayout::single(dim).unwrap();
        let eq = MasterEquation::new(Operator::zeros(layout), vec![]).unwrap();
        let rho = Ket::fock(2, dim).unwrap().to_density();
        let out = eq.propagate(&rho, 0.0, 10.0, 1.0).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn step_guard_rejects_large_steps() {
        let p = SystemParams::fig4();
        let dim = required_dim(p.alpha());
        let rho = vacuum(dim).unwrap();
        let s = DriveSchedule::constant(p.eps2);
        let err = evolve(&rho, &p, &s, 1e5, 1e4, 1).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn evolve_records_consistent_observables() {
        let p = SystemParams::fig4();
        let dim = required_dim(p.alpha());
        let basis = cat_basis(p.alpha(), dim).unwrap();
        let rho = basis.plus_state().to_density();
        let s = DriveSchedule::constant(p.eps2);
        let tr = evolve(&rho, &p, &s, 2.0e4, 50.0, 40).unwrap();
        assert_eq!(tr.len(), 11);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        for k in 0..tr.len() {
            assert_eq!(tr.z[k], tr.p_e[k] - tr.p_g[k]);
            assert!((-1e-9..=1.0 + 1e-9).contains(&tr.p_e[k]));
            assert!(tr.min_eig[k] >= -1e-6);
        }
        assert!(tr.z[0].abs() < 1e-12);
    }

    #[test]
    fn evolve_needs_a_drive() {
        let p = SystemParams::fig4();
        let rho = vacuum(30).unwrap();
        assert!(evolve(&rho, &p, &DriveSchedule::constant(0.0), 10.0, 1.0, 1).is_err());
    }
}
