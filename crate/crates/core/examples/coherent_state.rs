//! Coherent-state amplitudes of a loop and the truncated displacement
//! operator on a few of its modes.

use softqed::current::{coherent_state, LoopPath, PhotonModeGrid};
use softqed::fock::{truncated_u, truncated_u_for_modes, FockConfig};
use num_complex::Complex64 as C64;

fn main() -> softqed::Result<()> {
    let path = LoopPath::new(vec![[0.0, 0.0, 0.0, 0.0], [3.0, 1.0, 0.5, 0.0], [6.0, 0.2, -0.8, 0.4]])?;
    let grid = PhotonModeGrid::new(0.05, 1.0, 8, 8)?;
    let data = coherent_state(&path, &grid, 0.1);
    println!("photon number {:.6e}, norm factor {:.8}", data.photon_number, data.norm_factor);

    let mut strongest: Vec<usize> = (0..data.amplitudes.len()).collect();
    strongest.sort_by(|a, b| data.amplitudes[*b].alpha.norm().total_cmp(&data.amplitudes[*a].alpha.norm()));
    let modes = &strongest[..2];
    let u = truncated_u_for_modes(&data, modes, &FockConfig::default())?;
    println!("modes {modes:?}: {:#?}", u.report);

    let single = truncated_u(&[C64::from_polar(0.5, 0.7)], 0.0, &FockConfig::default())?;
    println!("|α| = 0.5, n_max = 12: unitarity defect {:.2e}", single.report.unitarity_defect);
    Ok(())
}
