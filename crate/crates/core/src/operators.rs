//! Dense linear algebra on truncated Fock spaces and their tensor products.
//!
//! Composite spaces follow the Kronecker convention: the first factor is the
//! most significant index. The probe mode is always factor 0 and a reservoir
//! unit, when present, is factor 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity tolerance enforced on every constructed density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance enforced on every constructed density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as "positive" for a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// Ordered subsystem dimensions of a (possibly composite) Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    factors: Vec<usize>,
}

impl SpaceLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Shape("a layout needs at least one factor".into()));
        }
        if let Some(&dim) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension { dim });
        }
        Ok(Self { factors })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Layout of `self ⊗ other`.
    pub fn compose(&self, other: &SpaceLayout) -> SpaceLayout {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceLayout { factors }
    }

    fn check_same(&self, other: &SpaceLayout) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!(
                "layout {:?} does not match {:?}",
                self.factors, other.factors
            )));
        }
        Ok(())
    }
}

/// A linear operator on a truncated (composite) Fock space, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: SpaceLayout,
    matrix: Matrix,
}

impl Operator {
    pub fn new(layout: SpaceLayout, matrix: Matrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, layout needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("operator has non-finite entries".into()));
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn from_parts(layout: SpaceLayout, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(layout, Matrix::zeros(n, n))
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(layout, Matrix::identity(n, n))
    }

    /// Single-mode operator built from a diagonal.
    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let layout = SpaceLayout::single(values.len())?;
        let matrix = Matrix::from_diagonal(&Vector::from_column_slice(values));
        Self::new(layout, matrix)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Operator {
        Self::from_parts(self.layout.clone(), self.matrix.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self::from_parts(self.layout.clone(), &self.matrix * factor)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Self::from_parts(self.layout.clone(), &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Self::from_parts(self.layout.clone(), &self.matrix - &other.matrix))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Self::from_parts(self.layout.clone(), &self.matrix * &other.matrix))
    }

    pub fn apply(&self, vector: &Vector) -> Result<Vector> {
        if vector.len() != self.dim() {
            return Err(Error::Shape(format!(
                "vector of length {} for operator of dim {}",
                vector.len(),
                self.dim()
            )));
        }
        Ok(&self.matrix * vector)
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn row_sum_norm(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn hermitian_deviation(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_mode_dim(dim: usize) -> Result<SpaceLayout> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    SpaceLayout::single(dim)
}

/// Truncated ladder operator `a` with `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(dim: usize) -> Result<Operator> {
    let layout = check_mode_dim(dim)?;
    let mut m = Matrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator::from_parts(layout, m))
}

/// Truncated ladder operator `a†`; sends the top Fock state to zero.
pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.dagger())
}

/// Number operator `a†a = diag(0, 1, …, dim−1)`.
pub fn number(dim: usize) -> Result<Operator> {
    let layout = check_mode_dim(dim)?;
    let diag: Vec<C64> = (0..dim).map(|n| C64::new(n as f64, 0.0)).collect();
    Ok(Operator::from_parts(
        layout,
        Matrix::from_diagonal(&Vector::from_vec(diag)),
    ))
}

pub fn identity(dim: usize) -> Result<Operator> {
    Ok(Operator::identity(check_mode_dim(dim)?))
}

pub fn dagger(op: &Operator) -> Operator {
    op.dagger()
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.layout.check_same(&b.layout)?;
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Ok(Operator::from_parts(a.layout.clone(), m))
}

/// Kronecker product in operand order.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::Shape("tensor product of zero operators".into()))?;
    let mut layout = first.layout.clone();
    let mut matrix = first.matrix.clone();
    for op in rest {
        layout = layout.compose(&op.layout);
        matrix = matrix.kronecker(&op.matrix);
    }
    Ok(Operator::from_parts(layout, matrix))
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` placed at `index`.
pub fn embed(op: &Operator, layout: &SpaceLayout, index: usize) -> Result<Operator> {
    let factors = layout.factors();
    if index >= factors.len() {
        return Err(Error::IndexOutOfRange {
            index,
            factors: factors.len(),
        });
    }
    if op.dim() != factors[index] {
        return Err(Error::Shape(format!(
            "operator of dim {} cannot sit on factor {index} of dim {}",
            op.dim(),
            factors[index]
        )));
    }
    let left: usize = factors[..index].iter().product();
    let right: usize = factors[index + 1..].iter().product();
    let m = Matrix::identity(left, left)
        .kronecker(&op.matrix)
        .kronecker(&Matrix::identity(right, right));
    Ok(Operator::from_parts(layout.clone(), m))
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: Matrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(layout: SpaceLayout, matrix: Matrix) -> Result<Self> {
        let op = Operator::new(layout, matrix)?;
        let rho = Self {
            layout: op.layout,
            matrix: op.matrix,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(layout: SpaceLayout, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn from_vector(layout: SpaceLayout, psi: &Vector) -> Result<Self> {
        if psi.len() != layout.total_dim() {
            return Err(Error::Shape(format!(
                "vector of length {} for layout {:?}",
                psi.len(),
                layout.factors()
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        let m = psi * psi.adjoint();
        Ok(Self::from_parts(layout, symmetrized(m)))
    }

    pub fn validate(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_parts(self.layout.clone(), self.matrix.clone())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_parts(
            self.layout.compose(&other.layout),
            self.matrix.kronecker(&other.matrix),
        )
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &Vector) -> Result<C64> {
        if psi.len() != self.dim() {
            return Err(Error::Shape(format!(
                "vector of length {} for state of dim {}",
                psi.len(),
                self.dim()
            )));
        }
        Ok(psi.dotc(&(&self.matrix * psi)))
    }
}

/// Smallest eigenvalue of a Hermitian matrix, to absolute accuracy of order
/// `ε‖m‖`. The spectrum is shifted by `‖m‖_F` first: the Hermitian
/// eigensolver returns `-inf`/`NaN` on nearly pure states whose tiny entries
/// sit beside a zero diagonal.
pub(crate) fn min_eigenvalue(m: &Matrix) -> f64 {
    let shift = m.norm();
    let n = m.nrows();
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)].re += shift;
    }
    shifted
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        - shift
}

/// `(M + M†)/2`, exactly Hermitian.
pub(crate) fn symmetrized(m: Matrix) -> Matrix {
    let n = m.nrows();
    let mut out = m;
    for j in 0..n {
        out[(j, j)].im = 0.0;
        for i in 0..j {
            let v = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// Reduced state on factor `keep`, tracing out every other factor.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let factors = rho.layout.factors();
    if factors.len() < 2 {
        return Err(Error::Shape(
            "partial trace needs a composite layout".into(),
        ));
    }
    if keep >= factors.len() {
        return Err(Error::IndexOutOfRange {
            index: keep,
            factors: factors.len(),
        });
    }
    let left: usize = factors[..keep].iter().product();
    let kept = factors[keep];
    let right: usize = factors[keep + 1..].iter().product();
    let stride = kept * right;
    let mut out = Matrix::zeros(kept, kept);
    for j in 0..kept {
        for i in 0..kept {
            let mut acc = ZERO;
            for l in 0..left {
                for r in 0..right {
                    acc += rho.matrix[(l * stride + i * right + r, l * stride + j * right + r)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(SpaceLayout::single(kept)?, out))
}

/// `Tr[ρ · op]`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    rho.layout.check_same(&op.layout)?;
    // Tr[ρA] = Σ_ij ρ_ij A_ji
    let n = rho.dim();
    let mut acc = ZERO;
    for j in 0..n {
        for i in 0..n {
            acc += rho.matrix[(i, j)] * op.matrix[(j, i)];
        }
    }
    Ok(acc)
}
