//! Ward identity for a photon attached to a propagator, and the derivative
//! identity with its second-order finite-difference convergence.

use softqed::algebra::{FourVector, LorentzIndex};
use softqed::insertion::{derivative_convergence_order, derivative_identity_residual, ward_identity_residual};

fn main() -> softqed::Result<()> {
    let m = 1.0;
    let p = FourVector::real([1.4, 0.2, -0.1, 0.15]);
    let k = FourVector::real([0.3, 0.1, 0.05, -0.1]);
    println!("Ward residual: {:.2e}", ward_identity_residual(&p, &k, m)?);

    let mu = LorentzIndex::new(0)?;
    for h in [1e-2, 1e-3, 1e-4] {
        println!("derivative identity, h = {h:.0e}: residual {:.3e}", derivative_identity_residual(&p, mu, m, h)?);
    }
    println!("observed order: {:.4}", derivative_convergence_order(&p, mu, m, 1e-3)?);
    Ok(())
}
