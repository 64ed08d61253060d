//! Truncated ladder operators, the boundary-corrected commutator, and
//! composite-space bookkeeping (tensor, embed, partial trace).
//!
//! cargo run --example operator_algebra

use catline::operators::{
    annihilation, commutator, embed, expectation, number, partial_trace, tensor, DensityMatrix,
    SpaceLayout,
};
use catline::states::Ket;

fn main() -> catline::Result<()> {
    let d = 6;
    let a = annihilation(d)?;
    let comm = commutator(&a, &a.dagger())?;
    let diag: Vec<f64> = (0..d).map(|i| comm.get(i, i).re).collect();
    println!("[a, a†] on d = {d}: diag = {diag:?}");

    let n = number(d)?;
    let fock3 = Ket::fock(3, d)?.to_density();
    println!("<3|n|3> = {}", expectation(&fock3, &n)?.re);

    // |1⟩ ⊗ |0⟩ on a mode ⊗ qubit space
    let layout = SpaceLayout::new(vec![d, 2])?;
    let probe = Ket::fock(1, d)?.to_density();
    let qubit = Ket::fock(0, 2)?.to_density();
    let joint: DensityMatrix = probe.tensor(&qubit);
    let n_joint = embed(&n, &layout, 0)?;
    println!("<n ⊗ I> on |1,0> = {}", expectation(&joint, &n_joint)?.re);

    let back = partial_trace(&joint, 0)?;
    println!("partial trace recovers the probe: {}", back == probe);

    let big = tensor(&[&a, &a.dagger()])?;
    println!("a ⊗ a† acts on {:?} (dim {})", big.layout().factors(), big.dim());
    Ok(())
}
