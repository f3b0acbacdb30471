//! Cross-edge classical action of a spatial triangle under η → 0.

use softqed::action::{classical_action_extrapolated, phase_factor, ActionConfig};
use softqed::current::LoopPath;

fn main() -> softqed::Result<()> {
    let path = LoopPath::new(vec![[0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.1, 0.3, 0.8, 0.0]])?;
    let cfg = ActionConfig::default();
    let r = classical_action_extrapolated(&path, &cfg)?;
    println!("η values: {:?}", r.etas);
    for p in &r.cross_pairs {
        let lim = p.limit.as_ref().expect("cross pairs converge");
        println!("edges ({}, {}): ∫∫δ = {:.8e} ± {:.1e}", p.e1, p.e2, lim.value, lim.error);
    }
    println!("Φ = {:.10e} ± {:.1e}, e^(iΦ) = {:.8}", r.value, r.error, phase_factor(r.value));
    println!("self pairs without a limit: {:?}", r.divergent_self_pairs());
    Ok(())
}
