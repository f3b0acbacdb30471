//! Dirac matrices, slashed vectors and the Clifford relation.

use softqed::algebra::{gamma, minkowski, slash, DiracMatrix, FourVector, LorentzIndex, C64, METRIC};

fn main() {
    let mut worst: f64 = 0.0;
    for mu in LorentzIndex::ALL {
        for nu in LorentzIndex::ALL {
            let g = if mu == nu { 2.0 * METRIC[mu.get()] } else { 0.0 };
            let ac = gamma(mu).anticommutator(&gamma(nu));
            worst = worst.max((ac - DiracMatrix::scalar(C64::new(g, 0.0))).norm_max());
        }
    }
    println!("max |{{γ^μ, γ^ν}} − 2g^μν| = {worst:.1e}");

    let p = FourVector::real([2.0, 0.3, -0.4, 1.1]);
    let p2 = minkowski(&p, &p);
    let sq = slash(&p) * slash(&p);
    println!("p² = {:.6}, p̸p̸ = p²·1 to {:.1e}", p2.re, (sq - DiracMatrix::scalar(p2)).norm_max());
}
