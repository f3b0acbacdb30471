//! Simple-pole decomposition of a two-vertex line and the residue of a
//! quantum-vertex line at its first pole.

use softqed::algebra::{FourVector, LorentzIndex};
use softqed::chain::{ChainSpec, VertexSpec};
use softqed::decomposition::{decomposition_residual, pole_terms, residue_limit, DominantSingularity, SignConvention};
use softqed::insertion::{evaluate_insertions, InsertionConfig};

fn main() -> softqed::Result<()> {
    let m = 1.0;
    let k1 = FourVector::real([0.3, 0.1, 0.05, -0.1]);
    let k2 = FourVector::real([0.2, -0.05, 0.1, 0.0]);
    let p = FourVector::real([1.5, 0.2, -0.1, 0.1]);
    let chain = ChainSpec::new(
        m,
        0.0,
        vec![VertexSpec::plain(k1, LorentzIndex::new(1)?), VertexSpec::plain(k2, LorentzIndex::new(3)?)],
    )?;
    for t in pole_terms(&chain, &p)? {
        println!("pole {}: p_i² − m² = {:.6}, ‖residue‖ = {:.6e}", t.index, t.pole_denominator.re, t.residue().norm_frobenius());
    }
    println!("completeness residual: {:.2e}", decomposition_residual(&chain, &p, SignConvention::AllPositive)?);

    let line = ChainSpec::new(m, 0.0, vec![VertexSpec::quantum(k1, LorentzIndex::new(1)?)])?;
    let p0 = FourVector::on_shell(m, [0.2, -0.1, 0.15]);
    let cfg = InsertionConfig { order: 32, tolerance: 1e-4, ..Default::default() };
    let lim = residue_limit(&p0, &FourVector::ZERO, m, |q| Ok(evaluate_insertions(&line, q, &cfg)?.value))?;
    let dom = DominantSingularity::new(&line, 0)?.residue(&p0)?;
    println!(
        "pole-0 residue: extrapolated vs dominant singularity differ by {:.2e} (relative)",
        softqed::algebra::DiracMatrix::relative_distance(&lim.value, &dom)
    );
    Ok(())
}
