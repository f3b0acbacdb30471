//! Independent checks of the η → 0 limit of the classical action.

use softqed::action::*;
use softqed::algebra::{minkowski, FourVector};
use softqed::current::LoopPath;
use softqed::error::Error;
use softqed::extrapolate::richardson;
use softqed::quadrature::{Adaptive, GaussLegendre};
use std::f64::consts::PI;

fn spatial_triangle() -> LoopPath {
    LoopPath::new(vec![
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.1, 0.3, 0.8, 0.0],
    ])
    .unwrap()
}

/// Adjacent edges meeting at a corner: f is homogeneous of degree two in
/// the distances from the corner, so ∫∫δ(f) = ∫₀^{π/2} dθ / (4|g(θ)|) with
/// g(θ) = (cos θ z_in + sin θ z_out)².
fn corner_oracle(z_in: &FourVector, z_out: &FourVector) -> f64 {
    GaussLegendre::new(200)
        .integrate(0.0, 0.5 * PI, |th| {
            let v = *z_in * th.cos() + *z_out * th.sin();
            Ok(0.25 / v.square().re.abs())
        })
        .unwrap()
}

#[test]
fn triangle_cross_action_matches_corner_oracle() {
    let l = spatial_triangle();
    let cfg = ActionConfig::default();
    let res = classical_action_extrapolated(&l, &cfg).unwrap();
    let z = l.edges();
    let mut oracle = 0.0;
    for e in 0..3 {
        let next = (e + 1) % 3;
        let pre = -cfg.charge.powi(2) / (8.0 * PI) * minkowski(&z[e], &z[next]).re;
        oracle += 2.0 * pre * corner_oracle(&z[e], &z[next]);
    }
    let rel = (res.value - oracle).abs() / oracle.abs();
    println!("Φ = {:.10e} ± {:.1e}, oracle {:.10e}, rel {rel:.2e}", res.value, res.error, oracle);
    assert!(rel < 1e-2);
    assert_eq!(res.divergent_self_pairs(), vec![0, 1, 2]);
}

/// ∫₀¹dτ′ Σ_{f(τ′,τ″)=0} 1/|∂f/∂τ″| with the roots in τ″ found explicitly.
fn root_locus_oracle(a1: FourVector, z1: FourVector, a2: FourVector, z2: FourVector) -> f64 {
    let adaptive = Adaptive::new(1e-12, 1e-10);
    adaptive
        .integrate(0.0, 1.0, |t| {
            let d = a1 + z1 * t - a2;
            let a = z2.square().re;
            let b = -2.0 * minkowski(&d, &z2).re;
            let c = d.square().re;
            let disc = b * b - 4.0 * a * c;
            if disc <= 0.0 {
                return Ok(0.0);
            }
            let mut sum = 0.0;
            for s in [-1.0, 1.0] {
                let r = (-b + s * disc.sqrt()) / (2.0 * a);
                if r > 0.0 && r < 1.0 {
                    sum += 1.0 / disc.sqrt();
                }
            }
            Ok(sum)
        })
        .unwrap()
        .value
}

#[test]
fn non_adjacent_pair_matches_root_locus_oracle() {
    let l = LoopPath::new(vec![
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.2, 1.0, 1.0, 0.0],
        [1.2, 0.0, 1.0, 0.0],
    ])
    .unwrap();
    let (a1, b1) = l.edge_points(0);
    let (a2, b2) = l.edge_points(2);
    let oracle = root_locus_oracle(a1, b1 - a1, a2, b2 - a2);
    let adaptive = Adaptive::new(1e-13, 1e-11);
    let ex = richardson(&[1e-1, 3e-2, 1e-2], |eta| pair_delta_integral(&l, 0, 2, eta, &adaptive))
        .unwrap();
    let rel = (ex.value - oracle).abs() / oracle;
    println!("pair = {:.10e} ± {:.1e}, oracle {oracle:.10e}, rel {rel:.2e}", ex.value, ex.error);
    assert!(rel < 1e-2);
}

#[test]
fn timelike_loop_action_does_not_converge() {
    // corners where the path turns back in time put light-like separations
    // next to the corner and the regulated integral grows like ln(1/η)
    let l = LoopPath::new(vec![
        [0.0, 0.0, 0.0, 0.0],
        [1.0, 0.5, 0.2, 0.0],
        [2.0, 0.1, -0.3, 0.2],
    ])
    .unwrap();
    assert!(matches!(
        classical_action_extrapolated(&l, &ActionConfig::default()),
        Err(Error::NonConvergent(_))
    ));
}
