//! Current of a closed loop, its conservation, and the logarithmic growth of
//! the photon number as the infrared cutoff is lowered.

use softqed::algebra::{minkowski, FourVector};
use softqed::current::{loop_current, photon_number, LoopPath, PhotonModeGrid};
use softqed::extrapolate::fit_line;

fn main() -> softqed::Result<()> {
    let t = 1e6;
    let path = LoopPath::new(vec![[0.0, 0.0, 0.0, 0.0], [t, 0.5 * t, 0.2 * t, 0.0], [2.0 * t, 0.1 * t, -0.3 * t, 0.2 * t]])?;
    let k = FourVector::real([0.01, 0.006, 0.0, 0.008]);
    let j = loop_current(&path, &k);
    println!("J(k) = {:?}", j.0);
    println!("|k·J| / ‖J‖₁ = {:.2e}", minkowski(&k, &j).norm() / j.norm_l1());

    let base = PhotonModeGrid::new(1e-3, 1.0, 32, 32)?;
    let ladder = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k_min in ladder {
        let n = photon_number(&path, &base.with_k_min(k_min)?);
        println!("k_min = {k_min:.0e}: ⟨J*·J⟩ = {n:.8e}");
        xs.push((1.0 / k_min).ln());
        ys.push(n);
    }
    let fit = fit_line(&xs, &ys)?;
    println!("fit a + b ln(1/k_min): a = {:.6e}, b = {:.6e}, max relative residual {:.2e}", fit.intercept, fit.slope, fit.max_relative_residual);
    Ok(())
}
