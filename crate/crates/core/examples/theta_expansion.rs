//! 2^N expansion of classical photons acting on the meromorphic part of a line.

use softqed::algebra::{FourVector, LorentzIndex};
use softqed::chain::{ChainSpec, VertexSpec};
use softqed::decomposition::{classical_meromorphic_expansion, expansion_contracted_total, expansion_total};

fn main() -> softqed::Result<()> {
    let line = ChainSpec::new(1.0, 0.0, vec![VertexSpec::quantum(FourVector::real([0.3, 0.1, 0.05, -0.1]), LorentzIndex::new(1)?)])?;
    let p = FourVector::real([1.6, 0.1, -0.2, 0.3]);
    let photons = [
        (FourVector::real([0.2, 0.05, 0.0, 0.1]), LorentzIndex::new(0)?),
        (FourVector::real([0.1, 0.0, 0.05, 0.0]), LorentzIndex::new(3)?),
    ];
    let terms = classical_meromorphic_expansion(&line, &p, &photons)?;
    for t in &terms {
        println!("Θ = {}  sign {:+}  shift {:?}  ‖term‖ = {:.6e}", t.theta.label(), t.sign, t.shift.re(), t.value().norm_frobenius());
    }
    println!("‖total‖ = {:.6e}", expansion_total(&terms).norm_frobenius());
    println!("‖k-contracted total‖ = {:.6e}", expansion_contracted_total(&terms).norm_frobenius());
    Ok(())
}
