//! Classical and quantum insertion operators on a one-vertex line.

use softqed::algebra::{FourVector, LorentzIndex};
use softqed::chain::{resolvent, ChainSpec, VertexSpec};
use softqed::insertion::{apply_c_hat, apply_q_tilde_all, contract_with, evaluate_insertions, InsertionConfig};

fn main() -> softqed::Result<()> {
    let m = 1.0;
    let p = FourVector::real([1.4, 0.2, -0.1, 0.15]);
    let k = FourVector::real([0.3, 0.1, 0.05, -0.1]);
    let cfg = InsertionConfig::default();

    // k^μ Ĉ_μ on a single propagator telescopes to R(p+k) − R(p)
    let bare = ChainSpec::bare(m)?;
    let mut contracted = softqed::algebra::DiracMatrix::zero();
    for mu in LorentzIndex::ALL {
        contracted += apply_c_hat(&bare, &p, &k, mu, &cfg)?.value.scale(k[mu.get()]);
    }
    let expected = resolvent(&(p + k), m)? - resolvent(&p, m)?;
    println!("telescoping residual: {:.2e}", (contracted - expected).norm_max());

    // Q̃ at a quantum vertex is gauge invariant
    let q_cfg = InsertionConfig { order: 48, ..cfg };
    let photon = FourVector::real([0.25, 0.05, 0.1, 0.0]);
    let chain = ChainSpec::new(m, 0.0, vec![VertexSpec::quantum(photon, LorentzIndex::new(2)?)])?;
    let q = apply_q_tilde_all(&chain, 0, &p, &q_cfg)?;
    let values = q.clone().map(|r| r.value);
    println!("k^μ Q̃_μ = {:.2e}", contract_with(&photon, &values).norm_max());
    for (mu, r) in q.iter().enumerate() {
        println!("  Q̃_{mu}: ‖·‖ = {:.6e}, quadrature error {:.1e}", r.value.norm_frobenius(), r.quadrature_error_estimate);
    }
    let general = evaluate_insertions(&chain, &p, &q_cfg)?;
    println!("general path agrees to {:.2e}", (general.value - values[2]).norm_max());
    Ok(())
}
