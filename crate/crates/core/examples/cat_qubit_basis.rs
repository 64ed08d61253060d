//! Even and odd cat states, the logical Paulis, and Bloch readout of a few
//! reference states.
//!
//! cargo run --example cat_qubit_basis

use std::f64::consts::PI;

use catline::states::{cat_basis, cat_normalization, coherent, fidelity, required_dim, Parity};
use num_complex::Complex64;

fn main() -> catline::Result<()> {
    let alpha = 2.0;
    let dim = required_dim(alpha);
    let basis = cat_basis(alpha, dim)?;
    println!("alpha = {alpha}, Fock dimension {dim}");
    println!(
        "N+ = {:.9}, N- = {:.9}",
        cat_normalization(alpha, Parity::Even),
        cat_normalization(alpha, Parity::Odd)
    );
    println!("<C+|C-> = {:.2e}", basis.c_plus().inner(basis.c_minus()).norm());

    let states = [
        ("|C+>", basis.c_plus().clone()),
        ("|C->", basis.c_minus().clone()),
        ("|+>", basis.plus_state()),
        ("theta=pi/2, phi=pi/2", basis.logical_state(PI / 2.0, PI / 2.0)),
        ("theta=pi/3, phi=0", basis.logical_state(PI / 3.0, 0.0)),
    ];
    for (name, ket) in &states {
        let b = basis.bloch_vector(&ket.to_density())?;
        println!("{name:>22}: x = {:+.6}  y = {:+.6}  z = {:+.6}", b.x, b.y, b.z);
    }

    let coh = coherent(Complex64::new(alpha, 0.0), dim)?;
    let f = fidelity(&basis.plus_state().to_density(), &coh)?;
    println!("|<+|alpha>|^2 = {f:.6}");
    Ok(())
}
