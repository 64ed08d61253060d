//! Coherent and cat states, the logical cat-qubit basis and Bloch readout.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, Matrix, Operator, SpaceLayout, Vector, C64, I, ONE};

/// Smallest Fock dimension accepted for a state of amplitude `|alpha|`.
///
/// `max(8, ⌈|α|² + 8|α| + 10⌉)`: large enough that `a|α⟩ = α|α⟩` and the
/// Kerr-cat eigenvalue relation both hold to 1e-6 after truncation.
pub fn required_dim(alpha_abs: f64) -> usize {
    let a = alpha_abs.abs();
    let rule = (a * a + 8.0 * a + 10.0).ceil() as usize;
    rule.max(8)
}

pub fn check_truncation(alpha_abs: f64, dim: usize) -> Result<()> {
    let required = required_dim(alpha_abs);
    if dim < required {
        return Err(Error::Truncation {
            alpha: alpha_abs,
            dim,
            required,
        });
    }
    Ok(())
}

/// A normalized pure state of a single truncated mode (or a logical qubit).
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vector,
}

impl Ket {
    pub fn new(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("ket norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; a zero vector is a degenerate state.
    pub fn normalized(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    /// Fock state `|n⟩`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if n >= dim {
            return Err(Error::IndexOutOfRange { index: n, factors: dim });
        }
        let mut v = Vector::zeros(dim);
        v[n] = ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let layout = SpaceLayout::single(self.dim()).expect("ket dim >= 2");
        DensityMatrix::from_vector(layout, &self.amplitudes).expect("ket is normalized")
    }

    /// `|self⟩⟨other|` as an operator on the mode.
    pub fn outer(&self, other: &Ket) -> Operator {
        let layout = SpaceLayout::single(self.dim()).expect("ket dim >= 2");
        Operator::new(layout, &self.amplitudes * other.amplitudes.adjoint())
            .expect("finite amplitudes")
    }
}

/// Truncated `e^{-|α|²/2} Σ αⁿ/√n! |n⟩` without renormalization.
pub(crate) fn coherent_amplitudes(alpha: C64, dim: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = amp;
    for n in 1..dim {
        amp = amp * alpha / (n as f64).sqrt();
        v[n] = amp;
    }
    v
}

/// Coherent state `|α⟩`, renormalized after truncation.
pub fn coherent(alpha: C64, dim: usize) -> Result<Ket> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    check_truncation(alpha.norm(), dim)?;
    Ket::normalized(coherent_amplitudes(alpha, dim))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Closed-form normalization `N± = 1/√(2(1 ± e^{−2α²}))` of the untruncated cat.
pub fn cat_normalization(alpha: f64, parity: Parity) -> f64 {
    1.0 / (2.0 * (1.0 + parity.sign() * (-2.0 * alpha * alpha).exp())).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::param("alpha", format!("must be a finite real >= 0, got {alpha}")));
    }
    Ok(())
}

/// Unnormalized truncated `|α⟩ ± |−α⟩`.
pub(crate) fn cat_unnormalized(alpha: f64, parity: Parity, dim: usize) -> Vector {
    let plus = coherent_amplitudes(C64::new(alpha, 0.0), dim);
    let minus = coherent_amplitudes(C64::new(-alpha, 0.0), dim);
    match parity {
        Parity::Even => plus + minus,
        Parity::Odd => plus - minus,
    }
}

/// Even or odd cat state `N±(|α⟩ ± |−α⟩)`, renormalized after truncation.
pub fn cat(alpha: f64, parity: Parity, dim: usize) -> Result<Ket> {
    check_alpha(alpha)?;
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    if parity == Parity::Odd && alpha == 0.0 {
        return Err(Error::DegenerateState("odd cat state is undefined at alpha = 0".into()));
    }
    check_truncation(alpha, dim)?;
    Ket::normalized(cat_unnormalized(alpha, parity, dim))
}

/// Logical cat-qubit basis: `|0̄⟩ = |C⁺⟩`, `|1̄⟩ = |C⁻⟩`, with logical Paulis
/// embedded in the Fock space as rank-2 operators.
#[derive(Clone, Debug)]
pub struct CatBasis {
    alpha: f64,
    dim: usize,
    c_plus: Ket,
    c_minus: Ket,
    sigma_x: Operator,
    sigma_y: Operator,
    sigma_z: Operator,
}

/// Cartesian Bloch coordinates in the cat basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn cat_basis(alpha: f64, dim: usize) -> Result<CatBasis> {
    let c_plus = cat(alpha, Parity::Even, dim)?;
    let c_minus = cat(alpha, Parity::Odd, dim)?;
    let pm = c_plus.outer(&c_minus);
    let mp = c_minus.outer(&c_plus);
    let sigma_x = pm.add(&mp)?;
    let sigma_y = pm.scale(-I).add(&mp.scale(I))?;
    let sigma_z = c_plus.outer(&c_plus).sub(&c_minus.outer(&c_minus))?;
    Ok(CatBasis {
        alpha,
        dim,
        c_plus,
        c_minus,
        sigma_x,
        sigma_y,
        sigma_z,
    })
}

impl CatBasis {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c_plus(&self) -> &Ket {
        &self.c_plus
    }

    pub fn c_minus(&self) -> &Ket {
        &self.c_minus
    }

    pub fn sigma_x(&self) -> &Operator {
        &self.sigma_x
    }

    pub fn sigma_y(&self) -> &Operator {
        &self.sigma_y
    }

    pub fn sigma_z(&self) -> &Operator {
        &self.sigma_z
    }

    /// Projector onto span{|C⁺⟩, |C⁻⟩}.
    pub fn projector(&self) -> Operator {
        self.c_plus
            .outer(&self.c_plus)
            .add(&self.c_minus.outer(&self.c_minus))
            .expect("same layout")
    }

    /// `cos(θ/2)|C⁺⟩ + sin(θ/2) e^{−iφ}|C⁻⟩`.
    pub fn logical_state(&self, theta: f64, phi: f64) -> Ket {
        let (s, c) = (0.5 * theta).sin_cos();
        let phase = C64::from_polar(1.0, -phi);
        let v = self.c_plus.amplitudes() * C64::new(c, 0.0)
            + self.c_minus.amplitudes() * (phase * s);
        Ket { amplitudes: v }
    }

    /// Equal superposition `(|C⁺⟩ + |C⁻⟩)/√2` with zero logical magnetization.
    pub fn plus_state(&self) -> Ket {
        let v = (self.c_plus.amplitudes() + self.c_minus.amplitudes())
            * C64::new(FRAC_1_SQRT_2, 0.0);
        Ket { amplitudes: v }
    }

    /// `(⟨C⁺|ρ|C⁺⟩, ⟨C⁻|ρ|C⁻⟩)`, the logical populations `(P_e, P_g)`.
    pub fn populations(&self, rho: &DensityMatrix) -> Result<(f64, f64)> {
        self.check(rho)?;
        Ok((
            quad(rho.matrix(), self.c_plus.amplitudes()).re,
            quad(rho.matrix(), self.c_minus.amplitudes()).re,
        ))
    }

    pub fn bloch_vector(&self, rho: &DensityMatrix) -> Result<BlochVector> {
        self.check(rho)?;
        let m = rho.matrix();
        let p = self.c_plus.amplitudes();
        let q = self.c_minus.amplitudes();
        let pe = quad(m, p).re;
        let pg = quad(m, q).re;
        // ⟨C⁺|ρ|C⁻⟩
        let w = p.dotc(&(m * q));
        Ok(BlochVector {
            x: 2.0 * w.re,
            y: -2.0 * w.im,
            z: pe - pg,
        })
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.layout().factors() != [self.dim] {
            return Err(Error::Shape(format!(
                "state layout {:?} is not the single mode of dim {}",
                rho.layout().factors(),
                self.dim
            )));
        }
        Ok(())
    }
}

fn quad(m: &Matrix, v: &Vector) -> C64 {
    v.dotc(&(m * v))
}

pub fn logical_state(basis: &CatBasis, theta: f64, phi: f64) -> Ket {
    basis.logical_state(theta, phi)
}

pub fn plus_state(basis: &CatBasis) -> Ket {
    basis.plus_state()
}

pub fn bloch_vector(rho: &DensityMatrix, basis: &CatBasis) -> Result<BlochVector> {
    basis.bloch_vector(rho)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DensityMatrix, ket: &Ket) -> Result<f64> {
    Ok(rho.overlap(ket.amplitudes())?.re)
}

/// Vacuum as a density matrix on a single mode.
pub fn vacuum(dim: usize) -> Result<DensityMatrix> {
    Ok(Ket::fock(0, dim)?.to_density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilation, expectation, number, ZERO};

    #[test]
    fn sizing_rule() {
        assert_eq!(required_dim(0.0), 10);
        assert_eq!(required_dim(2.0), 30);
        assert_eq!(required_dim(0.1), 11);
        assert!(matches!(
            coherent(C64::new(2.0, 0.0), 20),
            Err(Error::Truncation { required: 30, .. })
        ));
    }

    #[test]
    fn vacuum_coherent_state() {
        let k = coherent(ZERO, 12).unwrap();
        assert_eq!(k, Ket::fock(0, 12).unwrap());
    }

    #[test]
    fn coherent_photon_number() {
        let k = coherent(ONE, 20).unwrap();
        let n = expectation(&k.to_density(), &number(20).unwrap()).unwrap();
        assert!((n.re - 1.0).abs() < 1e-6, "{n}");
    }

    #[test]
    fn coherent_is_eigenvector_of_lowering() {
        let alpha = C64::new(2.0, 0.0);
        let k = coherent(alpha, 30).unwrap();
        let ak = annihilation(30).unwrap().apply(k.amplitudes()).unwrap();
        let resid = (ak - k.amplitudes() * alpha).norm();
        assert!(resid <= 1e-6, "{resid}");
    }

    #[test]
    fn cat_edge_cases() {
        let even0 = cat(0.0, Parity::Even, 10).unwrap();
        assert_eq!(even0, Ket::fock(0, 10).unwrap());
        assert!(matches!(cat(0.0, Parity::Odd, 10), Err(Error::DegenerateState(_))));
        assert!(matches!(cat(-1.0, Parity::Even, 30), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn cat_matches_closed_form_at_alpha_one() {
        let norm = cat_normalization(1.0, Parity::Even);
        assert!((norm - 0.663625).abs() < 1e-6);
        // closed form coefficients: N⁺ · 2 e^{-1/2} / √n! on even n
        let dim = required_dim(1.0);
        let k = cat(1.0, Parity::Even, dim).unwrap();
        let mut analytic = Vector::zeros(dim);
        let mut fact = 1.0f64;
        for n in 0..dim {
            if n > 0 {
                fact *= n as f64;
            }
            if n % 2 == 0 {
                analytic[n] = C64::new(norm * 2.0 * (-0.5f64).exp() / fact.sqrt(), 0.0);
            }
        }
        let overlap = analytic.dotc(k.amplitudes()).norm();
        assert!(overlap >= 1.0 - 1e-9, "{overlap}");
    }

    #[test]
    fn basis_paulis() {
        let b = cat_basis(2.0, 30).unwrap();
        assert!(b.c_plus().inner(b.c_minus()).norm() < 1e-12);

        let zc = b.sigma_z().apply(b.c_plus().amplitudes()).unwrap();
        assert!((zc - b.c_plus().amplitudes()).norm() < 1e-12);
        let xc = b.sigma_x().apply(b.c_plus().amplitudes()).unwrap();
        assert!((xc - b.c_minus().amplitudes()).norm() < 1e-12);

        let sq = |op: &Operator| op.mul(op).unwrap();
        let sum = sq(b.sigma_x()).add(&sq(b.sigma_y())).unwrap().add(&sq(b.sigma_z())).unwrap();
        let three_p = b.projector().scale(C64::new(3.0, 0.0));
        assert!(sum.sub(&three_p).unwrap().max_abs() < 1e-10);
        assert!(sq(b.sigma_z()).sub(&b.projector()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn logical_state_poles_and_equator() {
        let b = cat_basis(1.5, required_dim(1.5)).unwrap();
        let north = b.logical_state(0.0, 0.3);
        assert!((north.inner(b.c_plus()).norm() - 1.0).abs() < 1e-12);
        let south = b.logical_state(std::f64::consts::PI, 0.0);
        assert!((south.inner(b.c_minus()).norm() - 1.0).abs() < 1e-12);
        let eq = b.logical_state(std::f64::consts::FRAC_PI_2, 0.0);
        let v = b.bloch_vector(&eq.to_density()).unwrap();
        assert!(v.z.abs() < 1e-12 && (v.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_state_readout() {
        let b = cat_basis(2.0, 30).unwrap();
        let plus = b.plus_state().to_density();
        let v = b.bloch_vector(&plus).unwrap();
        assert!(v.z.abs() < 1e-12);
        assert!((v.x - 1.0).abs() < 1e-12);
        assert!(v.y.abs() < 1e-12);
        let coh = coherent(C64::new(2.0, 0.0), 30).unwrap();
        let overlap = b.plus_state().inner(&coh).norm_sqr();
        assert!(overlap >= 0.999, "{overlap}");
    }

    #[test]
    fn bloch_vectors_of_reference_states() {
        let b = cat_basis(1.0, required_dim(1.0)).unwrap();
        let north = b.bloch_vector(&b.c_plus().to_density()).unwrap();
        assert!((north.z - 1.0).abs() < 1e-12 && north.x.abs() < 1e-12 && north.y.abs() < 1e-12);

        let mixed = b.projector().scale(C64::new(0.5, 0.0));
        let mixed = DensityMatrix::new(mixed.layout().clone(), mixed.into_matrix()).unwrap();
        let v = b.bloch_vector(&mixed).unwrap();
        assert!(v.norm() < 1e-12);
        assert!((fidelity(&mixed, b.c_plus()).unwrap() - 0.5).abs() < 1e-12);

        let wrong = vacuum(b.dim() + 1).unwrap();
        assert!(b.bloch_vector(&wrong).is_err());
    }

    #[test]
    fn fidelity_of_pure_states() {
        let b = cat_basis(2.0, 30).unwrap();
        let psi = b.logical_state(1.1, 0.4);
        assert!((fidelity(&psi.to_density(), &psi).unwrap() - 1.0).abs() < 1e-12);
        let f = fidelity(&b.c_plus().to_density(), b.c_minus()).unwrap();
        assert!(f.abs() < 1e-12);
    }
}
