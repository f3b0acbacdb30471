//! Classical action of a closed polygonal loop,
//!
//! ```text
//! Φ(L) = ((−ie)²/8π) ∮∮ dx′·dx″ δ((x′ − x″)²)
//! ```
//!
//! with δ replaced by the Lorentzian δ_η(s) = (η/π)/(s² + η²) and the limit
//! η → 0 taken by polynomial extrapolation. For an edge pair the integral
//! over τ″ is done in closed form; the one over τ′ adaptively. Φ is reported
//! as the real number entering the phase e^{iΦ}; with (−i)² = −1 its sign is
//! that of −(z′·z″)·∫∫δ.

use crate::algebra::{minkowski, FourVector, C64, I};
use crate::current::LoopPath;
use crate::error::{Error, Result};
use crate::extrapolate::{richardson, Extrapolated};
use crate::quadrature::{Adaptive, GaussLegendre};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct ActionConfig {
    /// Coupling e; Φ scales as e².
    pub charge: f64,
    /// η values in units of the squared loop scale.
    pub eta_factors: Vec<f64>,
    /// Extrapolation error above this fraction of |value| is non-convergence.
    pub convergence_tolerance: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for ActionConfig {
    fn default() -> Self {
        Self {
            charge: 0.302_822_120_878_852_1,
            eta_factors: vec![1e-1, 3e-2, 1e-2],
            convergence_tolerance: 1e-3,
            abs_tol: 1e-13,
            rel_tol: 1e-11,
        }
    }
}

/// (η/π)/(s² + η²)
pub fn lorentzian(s: f64, eta: f64) -> f64 {
    eta / (PI * (s * s + eta * eta))
}

fn ln1p(w: C64) -> C64 {
    if w.norm() < 1e-4 {
        w - w * w / 2.0 + w * w * w / 3.0 - w * w * w * w / 4.0
    } else {
        (w + 1.0).ln()
    }
}

/// ∫₀¹ dx/(Ax² + Bx + C − iη) for real A, B, C and η > 0.
fn inverse_quadratic_integral(a: f64, b: f64, c: f64, eta: f64) -> C64 {
    let cc = C64::new(c, -eta);
    let disc = (C64::new(b * b, 0.0) - cc * (4.0 * a)).sqrt();
    let sign = if (disc.conj() * b).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(disc * sign + b) * 0.5;
    if q.norm() == 0.0 {
        return cc.inv();
    }
    let den = q - cc * a / q;
    if den.norm() <= 1e-12 * q.norm() {
        // double root: fall back to quadrature
        let rule = GaussLegendre::new(64);
        return rule
            .integrate(0.0, 1.0, |x| Ok(C64::new(a * x * x + b * x + c, -eta).inv()))
            .expect("closed-form integrand");
    }
    (ln1p(-(a / q)) - ln1p(-(q / cc))) / den
}

/// ∫₀¹ dτ″ δ_η((x′ − a″ − τ″z″)²) in closed form.
pub fn inner_delta_integral(x1: &FourVector, a2: &FourVector, z2: &FourVector, eta: f64) -> f64 {
    let d = *x1 - *a2;
    let a = z2.square().re;
    let b = -2.0 * minkowski(&d, z2).re;
    let c = d.square().re;
    inverse_quadratic_integral(a, b, c, eta).im / PI
}

/// ∫₀¹∫₀¹ dτ′dτ″ δ_η((x′(τ′) − x″(τ″))²) for edges e1, e2 of the loop.
pub fn pair_delta_integral(
    path: &LoopPath,
    e1: usize,
    e2: usize,
    eta: f64,
    adaptive: &Adaptive,
) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("η must be positive, got {eta}")));
    }
    let (a1, b1) = path.edge_points(e1);
    let (a2, b2) = path.edge_points(e2);
    let (z1, z2) = (b1 - a1, b2 - a2);
    let est = adaptive.integrate(0.0, 1.0, |t| {
        Ok(inner_delta_integral(&(a1 + z1 * t), &a2, &z2, eta))
    })?;
    Ok(est.value)
}

/// −e²/(8π) (z₁·z₂)
pub fn pair_prefactor(path: &LoopPath, e1: usize, e2: usize, charge: f64) -> f64 {
    let edges = path.edges();
    -charge * charge / (8.0 * PI) * minkowski(&edges[e1], &edges[e2]).re
}

/// Φ at fixed η, summed over ordered edge pairs; self pairs only when
/// `exclude_self` is false.
pub fn classical_action(
    path: &LoopPath,
    eta: f64,
    exclude_self: bool,
    cfg: &ActionConfig,
) -> Result<f64> {
    let adaptive = Adaptive::new(cfg.abs_tol, cfg.rel_tol);
    let n = path.len();
    let mut total = 0.0;
    for e1 in 0..n {
        for e2 in e1..n {
            if e1 == e2 && exclude_self {
                continue;
            }
            let mult = if e1 == e2 { 1.0 } else { 2.0 };
            let pre = pair_prefactor(path, e1, e2, cfg.charge);
            if pre == 0.0 {
                continue;
            }
            total += mult * pre * pair_delta_integral(path, e1, e2, eta, &adaptive)?;
        }
    }
    Ok(total)
}

/// η → 0 limit of one unordered edge pair's δ-integral.
#[derive(Clone, Debug, PartialEq)]
pub struct PairLimit {
    pub e1: usize,
    pub e2: usize,
    /// Extrapolated ∫∫δ, or the reason it failed to converge.
    pub limit: std::result::Result<Extrapolated<f64>, String>,
    /// Ordered-pair weight times −e²(z₁·z₂)/(8π).
    pub prefactor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionResult {
    /// Cross-edge Φ (sum over e1 ≠ e2).
    pub value: f64,
    pub error: f64,
    pub etas: Vec<f64>,
    pub cross_pairs: Vec<PairLimit>,
    /// Self pairs, extrapolated separately; never added to `value`.
    pub self_pairs: Vec<PairLimit>,
}

impl ActionResult {
    /// Self pairs whose η → 0 limit did not converge.
    pub fn divergent_self_pairs(&self) -> Vec<usize> {
        self.self_pairs
            .iter()
            .filter(|p| p.limit.is_err())
            .map(|p| p.e1)
            .collect()
    }
}

fn pair_limit(
    path: &LoopPath,
    e1: usize,
    e2: usize,
    etas: &[f64],
    cfg: &ActionConfig,
    adaptive: &Adaptive,
) -> Result<PairLimit> {
    let mult = if e1 == e2 { 1.0 } else { 2.0 };
    let prefactor = mult * pair_prefactor(path, e1, e2, cfg.charge);
    let ex = richardson(etas, |eta| pair_delta_integral(path, e1, e2, eta, adaptive))?;
    let scale = ex.value.abs().max(ex.samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max));
    let limit = if ex.error <= cfg.convergence_tolerance * scale.max(f64::MIN_POSITIVE) {
        Ok(ex)
    } else {
        Err(format!(
            "edges ({e1}, {e2}): extrapolation error {:.3e} against value {:.3e}; samples {:?}",
            ex.error, ex.value, ex.samples
        ))
    };
    Ok(PairLimit {
        e1,
        e2,
        limit,
        prefactor,
    })
}

/// Cross-edge Φ extrapolated to η → 0, with self pairs probed separately.
///
/// Fails with [`Error::NonConvergent`] when any cross pair does not
/// converge; divergent self pairs are only reported.
pub fn classical_action_extrapolated(path: &LoopPath, cfg: &ActionConfig) -> Result<ActionResult> {
    let scale2 = path.scale().powi(2);
    let etas: Vec<f64> = cfg.eta_factors.iter().map(|f| f * scale2).collect();
    let adaptive = Adaptive::new(cfg.abs_tol, cfg.rel_tol);
    let n = path.len();
    let mut cross_pairs = Vec::new();
    let mut self_pairs = Vec::new();
    let (mut value, mut error) = (0.0, 0.0);
    for e1 in 0..n {
        self_pairs.push(pair_limit(path, e1, e1, &etas, cfg, &adaptive)?);
        for e2 in e1 + 1..n {
            let pl = pair_limit(path, e1, e2, &etas, cfg, &adaptive)?;
            match &pl.limit {
                Ok(ex) => {
                    value += pl.prefactor * ex.value;
                    error += (pl.prefactor * ex.error).abs();
                }
                Err(msg) => return Err(Error::NonConvergent(msg.clone())),
            }
            cross_pairs.push(pl);
        }
    }
    Ok(ActionResult {
        value,
        error,
        etas,
        cross_pairs,
        self_pairs,
    })
}

/// e^{iΦ}
pub fn phase_factor(phi: f64) -> C64 {
    (I * phi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spatial_triangle() -> LoopPath {
        LoopPath::new(vec![
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.1, 0.3, 0.8, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn closed_form_inner_integral_matches_quadrature() {
        let rule = GaussLegendre::new(200);
        for &(a, b, c, eta) in &[
            (-1.0, 0.4, -0.3, 0.1),
            (0.5, -1.2, 0.4, 0.05),
            (0.0, 0.7, -0.2, 0.2),
            (1e-12, 0.7, -0.2, 0.2),
            (0.0, 0.0, 0.3, 0.1),
        ] {
            let exact = inverse_quadratic_integral(a, b, c, eta).im / PI;
            let num: f64 = rule
                .integrate(0.0, 1.0, |x| Ok(lorentzian(a * x * x + b * x + c, eta)))
                .unwrap();
            assert!((exact - num).abs() < 1e-10, "{a} {b} {c}: {exact} vs {num}");
        }
    }

    #[test]
    fn zero_charge_gives_zero_action() {
        let cfg = ActionConfig {
            charge: 0.0,
            ..Default::default()
        };
        assert_eq!(classical_action(&spatial_triangle(), 0.01, true, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn action_is_quadratic_in_charge() {
        let l = spatial_triangle();
        let c1 = ActionConfig::default();
        let c2 = ActionConfig {
            charge: 2.0 * c1.charge,
            ..c1.clone()
        };
        let p1 = classical_action(&l, 0.03, true, &c1).unwrap();
        let p2 = classical_action(&l, 0.03, true, &c2).unwrap();
        assert!((p2 - 4.0 * p1).abs() <= 1e-14 * p2.abs());
    }

    #[test]
    fn self_pairs_are_flagged_divergent() {
        let res = classical_action_extrapolated(&spatial_triangle(), &ActionConfig::default())
            .unwrap();
        assert_eq!(res.divergent_self_pairs(), vec![0, 1, 2]);
        assert_eq!(res.cross_pairs.len(), 3);
        assert!(res.error < 1e-3 * res.value.abs());
    }
}
