//! Compiled GKSL generator and fixed-step RK4 stepper.
//!
//! Operators are stored densely everywhere else; here their exact nonzero
//! pattern is extracted once so each right-hand-side evaluation costs
//! `O(nnz · n)` instead of `O(n³)`. Summation order is fixed, so results are
//! bit-reproducible across runs.

use crate::operators::{Matrix, C64, ZERO};

/// Row-compressed copy of a dense matrix, dropping exact zeros only.
#[derive(Clone, Debug)]
pub(crate) struct SparseOp {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    pub(crate) fn from_dense(m: &Matrix) -> Self {
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != ZERO {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// `out = self · x` for column-major `x`.
    fn mul_into(&self, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        for c in 0..n {
            let xc = &x[c * n..(c + 1) * n];
            let oc = &mut out[c * n..(c + 1) * n];
            for (i, o) in oc.iter_mut().enumerate() {
                let mut acc = ZERO;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * xc[self.cols[p]];
                }
                *o = acc;
            }
        }
    }

    /// `out += scale · self · x`.
    fn mul_add_into(&self, scale: f64, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        for c in 0..n {
            let xc = &x[c * n..(c + 1) * n];
            let oc = &mut out[c * n..(c + 1) * n];
            for (i, o) in oc.iter_mut().enumerate() {
                let mut acc = ZERO;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * xc[self.cols[p]];
                }
                *o += acc * scale;
            }
        }
    }
}

/// `ρ ↦ −i[H(t), ρ] + Σ κ (oρo† − ½{o†o, ρ})` with `H(t) = H₀ + f(t)·H₁`.
#[derive(Clone, Debug)]
pub(crate) struct Generator {
    n: usize,
    /// `H₀ − (i/2) Σ κ o†o`
    effective: SparseOp,
    drive: Option<SparseOp>,
    jumps: Vec<(f64, SparseOp)>,
}

impl Generator {
    pub(crate) fn new(hamiltonian: &Matrix, drive: Option<&Matrix>, dissipators: &[(f64, &Matrix)]) -> Self {
        let n = hamiltonian.nrows();
        let mut effective = hamiltonian.clone();
        let mut jumps = Vec::new();
        for &(rate, op) in dissipators {
            if rate == 0.0 {
                continue;
            }
            effective -= (op.adjoint() * op) * C64::new(0.0, 0.5 * rate);
            jumps.push((rate, SparseOp::from_dense(op)));
        }
        Self {
            n,
            effective: SparseOp::from_dense(&effective),
            drive: drive.map(SparseOp::from_dense),
            jumps,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }

    /// Writes `dρ/dt` into `out`. `rho` must be exactly Hermitian; the
    /// result is exactly Hermitian.
    fn apply(&self, drive_amp: f64, rho: &[C64], out: &mut [C64], ws: &mut Workspace) {
        let n = self.n;
        let x = &mut ws.x;
        self.effective.mul_into(rho, x);
        if let Some(d) = &self.drive {
            if drive_amp != 0.0 {
                d.mul_add_into(drive_amp, rho, x);
            }
        }
        // −i H_eff ρ + i ρ H_eff†, with ρ H_eff† = (H_eff ρ)†
        for j in 0..n {
            for i in 0..n {
                let a = x[j * n + i];
                let b = x[i * n + j].conj();
                out[j * n + i] = C64::new(a.im - b.im, b.re - a.re);
            }
        }
        for (rate, op) in &self.jumps {
            // o ρ o† = o (o ρ)†
            op.mul_into(rho, &mut ws.y);
            for j in 0..n {
                for i in 0..n {
                    ws.x[j * n + i] = ws.y[i * n + j].conj();
                }
            }
            op.mul_add_into(*rate, &ws.x, out);
        }
        hermitize(n, out);
    }
}

fn hermitize(n: usize, m: &mut [C64]) {
    for j in 0..n {
        m[j * n + j].im = 0.0;
        for i in 0..j {
            let v = (m[j * n + i] + m[i * n + j].conj()) * 0.5;
            m[j * n + i] = v;
            m[i * n + j] = v.conj();
        }
    }
}

#[derive(Clone, Debug)]
struct Workspace {
    x: Vec<C64>,
    y: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            x: vec![ZERO; n * n],
            y: vec![ZERO; n * n],
        }
    }
}

/// Classic four-stage Runge–Kutta over a [`Generator`].
#[derive(Clone, Debug)]
pub(crate) struct Rk4 {
    n: usize,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    stage: Vec<C64>,
    ws: Workspace,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        let buf = || vec![ZERO; n * n];
        Self {
            n,
            k1: buf(),
            k2: buf(),
            k3: buf(),
            k4: buf(),
            stage: buf(),
            ws: Workspace::new(n),
        }
    }

    /// Single generator evaluation, reusing the stepper's scratch space.
    pub(crate) fn rhs(&mut self, gen: &Generator, drive_amp: f64, rho: &[C64], out: &mut [C64]) {
        gen.apply(drive_amp, rho, out, &mut self.ws);
    }

    /// Advances `rho` by `h`; `drive` gives the drive amplitude at a time.
    pub(crate) fn step(
        &mut self,
        gen: &Generator,
        drive: impl Fn(f64) -> f64,
        t: f64,
        h: f64,
        rho: &mut [C64],
    ) {
        debug_assert_eq!(gen.dim(), self.n);
        let half = 0.5 * h;
        let (f0, fm, f1) = (drive(t), drive(t + half), drive(t + h));

        gen.apply(f0, rho, &mut self.k1, &mut self.ws);
        axpy_into(rho, half, &self.k1, &mut self.stage);
        gen.apply(fm, &self.stage, &mut self.k2, &mut self.ws);
        axpy_into(rho, half, &self.k2, &mut self.stage);
        gen.apply(fm, &self.stage, &mut self.k3, &mut self.ws);
        axpy_into(rho, h, &self.k3, &mut self.stage);
        gen.apply(f1, &self.stage, &mut self.k4, &mut self.ws);

        let sixth = h / 6.0;
        for (((r, a), (b, c)), d) in rho
            .iter_mut()
            .zip(&self.k1)
            .zip(self.k2.iter().zip(&self.k3))
            .zip(&self.k4)
        {
            *r += (*a + (*b + *c) * 2.0 + *d) * sixth;
        }
    }
}

fn axpy_into(x: &[C64], h: f64, k: &[C64], out: &mut [C64]) {
    for ((o, a), b) in out.iter_mut().zip(x).zip(k) {
        *o = *a + *b * h;
    }
}
