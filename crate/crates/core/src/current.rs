//! Classical currents of closed polygonal spacetime loops and the
//! transverse photon phase-space pairing.
//!
//! J^μ(L, k) = ∮_L dx^μ e^{ik·x}; for an edge from x⁻ to x⁺ with z = x⁺ − x⁻
//! this is z^μ e^{ik·x⁻}(e^{ik·z} − 1)/(ik·z).

use crate::algebra::{minkowski, FourVector, C64, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use std::f64::consts::PI;

/// Below this |k·z| the segment factor switches to its Taylor series.
pub const SERIES_SWITCH: f64 = 1e-8;

/// From this |k·z| on, an edge uses (e^{ik·x⁺} − e^{ik·x⁻})/(ik·z).
pub const DIFFERENCE_SWITCH: f64 = 0.5;

/// Closed polygon x₁ → x₂ → ⋯ → x_V → x₁ with real vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    vertices: Vec<[f64; 4]>,
}

impl LoopPath {
    pub fn new(vertices: Vec<[f64; 4]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidLoop(format!(
                "a loop needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidLoop("non-finite vertex coordinate".into()));
        }
        let path = Self { vertices };
        for (e, z) in path.edges().iter().enumerate() {
            let euclid = z.euclidean_norm();
            let mink = z.square().re.abs().sqrt();
            if euclid < 1e-12 && mink < 1e-12 {
                return Err(Error::InvalidLoop(format!("edge {e} has zero length")));
            }
        }
        Ok(path)
    }

    pub fn vertices(&self) -> &[[f64; 4]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Start and end point of edge e.
    pub fn edge_points(&self, e: usize) -> (FourVector, FourVector) {
        let n = self.vertices.len();
        (
            FourVector::real(self.vertices[e % n]),
            FourVector::real(self.vertices[(e + 1) % n]),
        )
    }

    /// z_e = x_{e+1} − x_e.
    pub fn edges(&self) -> Vec<FourVector> {
        (0..self.vertices.len())
            .map(|e| {
                let (a, b) = self.edge_points(e);
                b - a
            })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }

    pub fn translated(&self, d: [f64; 4]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|x| [x[0] + d[0], x[1] + d[1], x[2] + d[2], x[3] + d[3]])
                .collect(),
        }
    }

    /// Spatial rotation x⃗ → R x⃗.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|x| {
                    let s = rotate(r, [x[1], x[2], x[3]]);
                    [x[0], s[0], s[1], s[2]]
                })
                .collect(),
        }
    }

    /// Largest Euclidean edge length.
    pub fn scale(&self) -> f64 {
        self.edges()
            .iter()
            .map(FourVector::euclidean_norm)
            .fold(0.0, f64::max)
    }
}

fn rotate(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, row) in r.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// e^w − 1 without cancellation for small |w|.
fn expm1(w: C64) -> C64 {
    let (a, b) = (w.re, w.im);
    let half = (0.5 * b).sin();
    C64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

/// (e^w − 1)/w, with the series 1 + w/2 for |w| < [`SERIES_SWITCH`].
fn phase_factor(w: C64) -> C64 {
    if w.norm() < SERIES_SWITCH {
        ONE + w * 0.5
    } else {
        expm1(w) / w
    }
}

/// Contribution z^μ e^{ik·x⁻}(e^{ik·z} − 1)/(ik·z) of one straight edge.
pub fn segment_current(x_minus: &FourVector, x_plus: &FourVector, k: &FourVector) -> FourVector {
    let z = *x_plus - *x_minus;
    let w = I * minkowski(k, &z);
    let start = (I * minkowski(k, x_minus)).exp();
    if w.norm() >= DIFFERENCE_SWITCH {
        // endpoint exponentials are shared with the neighbouring edges, so
        // k·J telescopes to rounding even when k·x is large
        let end = (I * minkowski(k, x_plus)).exp();
        return z.scale((end - start) / w);
    }
    z.scale(start * phase_factor(w))
}

pub fn loop_current(path: &LoopPath, k: &FourVector) -> FourVector {
    (0..path.len()).fold(FourVector::ZERO, |acc, e| {
        let (a, b) = path.edge_points(e);
        acc + segment_current(&a, &b, k)
    })
}

/// |k·J| for the loop current.
pub fn gauge_residual(k: &FourVector, j: &FourVector) -> f64 {
    minkowski(k, j).norm()
}

/// Massless on-shell momenta k = |k|(1, n̂) with weights for
/// ∫d³k/((2π)³ 2|k|) = ∫ |k|² d(ln|k|) dΩ / (16π³).
///
/// The radial variable u = ln|k| is integrated by Gauss–Legendre on panels
/// split at every power of ten between `k_min` and `k_max`; the angular part
/// is Gauss–Legendre in cos θ times a uniform rule in φ with 2·n_angular points.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonModeGrid {
    pub k_min: f64,
    pub k_max: f64,
    /// Nodes per radial panel.
    pub n_radial: usize,
    /// Nodes in cos θ.
    pub n_angular: usize,
    nodes: Vec<FourVector>,
    weights: Vec<f64>,
    axes: [[f64; 3]; 3],
}

const IDENTITY3: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

impl PhotonModeGrid {
    pub fn new(k_min: f64, k_max: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        Self::with_axes(k_min, k_max, n_radial, n_angular, IDENTITY3)
    }

    /// Grid whose angular nodes are rotated by R.
    pub fn with_axes(
        k_min: f64,
        k_max: f64,
        n_radial: usize,
        n_angular: usize,
        axes: [[f64; 3]; 3],
    ) -> Result<Self> {
        if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
            )));
        }
        let mut grid = Self {
            k_min,
            k_max,
            n_radial,
            n_angular,
            nodes: Vec::new(),
            weights: Vec::new(),
            axes,
        };
        if n_radial == 0 || n_angular == 0 {
            return Ok(grid);
        }
        let radial = GaussLegendre::new(n_radial);
        let polar = GaussLegendre::new(n_angular);
        let n_phi = 2 * n_angular;
        let dphi = 2.0 * PI / n_phi as f64;
        for (lo, hi) in radial_panels(k_min, k_max) {
            for (u, wu) in radial.mapped(lo.ln(), hi.ln()) {
                let k = u.exp();
                for (c, wc) in polar.mapped(-1.0, 1.0) {
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    for ip in 0..n_phi {
                        let phi = (ip as f64 + 0.5) * dphi;
                        let n = rotate(&axes, [s * phi.cos(), s * phi.sin(), c]);
                        grid.nodes.push(FourVector::real([k, k * n[0], k * n[1], k * n[2]]));
                        grid.weights.push(k * k * wu * wc * dphi / (16.0 * PI.powi(3)));
                    }
                }
            }
        }
        Ok(grid)
    }

    pub fn nodes(&self) -> &[FourVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn axes(&self) -> &[[f64; 3]; 3] {
        &self.axes
    }

    pub fn with_k_min(&self, k_min: f64) -> Result<Self> {
        Self::with_axes(k_min, self.k_max, self.n_radial, self.n_angular, self.axes)
    }

    pub fn refined(&self) -> Result<Self> {
        Self::with_axes(self.k_min, self.k_max, 2 * self.n_radial, self.n_angular, self.axes)
    }
}

/// [k_min, 10^a], [10^a, 10^{a+1}], …, [10^b, k_max].
fn radial_panels(k_min: f64, k_max: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![k_min];
    let mut d = k_min.log10().floor() as i32 + 1;
    while 10f64.powi(d) < k_max {
        let c = 10f64.powi(d);
        if c > k_min * (1.0 + 1e-12) {
            cuts.push(c);
        }
        d += 1;
    }
    cuts.push(k_max);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Two real unit vectors orthogonal to n̂ and to each other.
pub fn transverse_basis(n: [f64; 3]) -> [[f64; 3]; 2] {
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(cross(n, helper));
    let e2 = cross(n, e1);
    [e1, e2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn direction(k: &FourVector) -> [f64; 3] {
    let r = k.re();
    normalize([r[1], r[2], r[3]])
}

/// Components ε_λ · a⃗ of the spatial part of a contravariant vector along
/// the two transverse polarizations of k.
pub fn transverse_components(k: &FourVector, a: &FourVector) -> [C64; 2] {
    let basis = transverse_basis(direction(k));
    basis.map(|e| a[1] * e[0] + a[2] * e[1] + a[3] * e[2])
}

/// ⟨a·b⟩ = Σ_nodes w Σ_λ conj(ε_λ·a⃗)(ε_λ·b⃗); conjugate-linear in a.
pub fn pairing<A, B>(a: A, b: B, grid: &PhotonModeGrid) -> C64
where
    A: Fn(&FourVector) -> FourVector,
    B: Fn(&FourVector) -> FourVector,
{
    let mut acc = ZERO;
    for (k, w) in grid.nodes.iter().zip(&grid.weights) {
        let ta = transverse_components(k, &a(k));
        let tb = transverse_components(k, &b(k));
        acc += (ta[0].conj() * tb[0] + ta[1].conj() * tb[1]) * *w;
    }
    acc
}

/// Σ_nodes w conj(a^μ)(−g_μν)b^ν; agrees with [`pairing`] for conserved currents.
pub fn covariant_pairing<A, B>(a: A, b: B, grid: &PhotonModeGrid) -> C64
where
    A: Fn(&FourVector) -> FourVector,
    B: Fn(&FourVector) -> FourVector,
{
    let mut acc = ZERO;
    for (k, w) in grid.nodes.iter().zip(&grid.weights) {
        acc -= minkowski(&a(k).conj(), &b(k)) * *w;
    }
    acc
}

/// ⟨J*·J⟩ for the loop on the grid.
pub fn photon_number(path: &LoopPath, grid: &PhotonModeGrid) -> f64 {
    let j = |k: &FourVector| loop_current(path, k);
    pairing(j, j, grid).re
}

/// Photon number on the grid and on its radially refined copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementCheck {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
}

impl RefinementCheck {
    pub fn within(&self, tolerance: f64) -> bool {
        self.relative_change <= tolerance
    }
}

pub fn refinement_check(path: &LoopPath, grid: &PhotonModeGrid) -> Result<RefinementCheck> {
    let coarse = photon_number(path, grid);
    let fine = photon_number(path, &grid.refined()?);
    let relative_change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    Ok(RefinementCheck {
        coarse,
        fine,
        relative_change,
    })
}

/// Displacement amplitude of one transverse mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeAmplitude {
    pub k: FourVector,
    pub polarization: usize,
    /// √w · ε_λ·J⃗(k)
    pub alpha: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentStateData {
    pub photon_number: f64,
    pub norm_factor: f64,
    pub phase: f64,
    pub amplitudes: Vec<ModeAmplitude>,
}

/// Coherent-state data of the loop; `phase` is supplied by the caller
/// (normally the cross-edge classical action).
pub fn coherent_state(path: &LoopPath, grid: &PhotonModeGrid, phase: f64) -> CoherentStateData {
    let mut amplitudes = Vec::with_capacity(2 * grid.len());
    let mut n = 0.0;
    for (k, w) in grid.nodes.iter().zip(&grid.weights) {
        let t = transverse_components(k, &loop_current(path, k));
        for (polarization, c) in t.into_iter().enumerate() {
            let alpha = c * w.sqrt();
            n += alpha.norm_sqr();
            amplitudes.push(ModeAmplitude {
                k: *k,
                polarization,
                alpha,
            });
        }
    }
    CoherentStateData {
        photon_number: n,
        norm_factor: (-0.5 * n).exp(),
        phase,
        amplitudes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> LoopPath {
        LoopPath::new(vec![
            [0.0, 0.0, 0.0, 0.0],
            [2.0, 0.6, 0.2, 0.0],
            [3.0, -0.1, 0.4, 0.3],
        ])
        .unwrap()
    }

    #[test]
    fn zero_photon_momentum_gives_edge_vector() {
        let a = FourVector::real([0.0, 1.0, 2.0, 3.0]);
        let b = FourVector::real([1.0, 1.5, 2.0, 2.0]);
        let j = segment_current(&a, &b, &FourVector::ZERO);
        assert!((j - (b - a)).norm_max() < 1e-15);
    }

    #[test]
    fn orthogonal_photon_uses_series() {
        let a = FourVector::real([0.3, 0.0, 0.0, 0.0]);
        let b = FourVector::real([0.3, 1.0, 0.0, 0.0]);
        let k = FourVector::real([1.0, 0.0, 1.0, 0.0]);
        let j = segment_current(&a, &b, &k);
        let expected = (b - a).scale((I * minkowski(&k, &a)).exp());
        assert!((j - expected).norm_max() < 1e-15);
    }

    #[test]
    fn short_loops_are_rejected() {
        assert!(matches!(
            LoopPath::new(vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]]),
            Err(Error::InvalidLoop(_))
        ));
        assert!(matches!(
            LoopPath::new(vec![[0.0; 4], [0.0; 4], [1.0, 0.0, 0.0, 0.0]]),
            Err(Error::InvalidLoop(_))
        ));
    }

    #[test]
    fn back_and_forth_loop_has_no_current() {
        let l = LoopPath::new(vec![
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.5, 0.0, 0.0],
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 0.5, 0.0, 0.0],
        ])
        .unwrap();
        let k = FourVector::real([0.7, 0.2, 0.3, 0.6]);
        assert!(loop_current(&l, &k).norm_max() < 1e-14);
    }

    #[test]
    fn grid_nodes_are_lightlike_with_positive_weights() {
        let g = PhotonModeGrid::new(1e-2, 1.0, 4, 3).unwrap();
        assert_eq!(g.len(), 2 * 4 * 3 * 6);
        for (k, w) in g.nodes().iter().zip(g.weights()) {
            assert!(k.square().norm() < 1e-14 * k[0].re * k[0].re);
            assert!(*w > 0.0);
        }
    }

    #[test]
    fn grid_weights_integrate_phase_space_volume() {
        // ∫ d³k/((2π)³2|k|) over k_min<|k|<k_max = (k_max² − k_min²)/(8π²)
        let g = PhotonModeGrid::new(0.1, 2.0, 8, 4).unwrap();
        let total: f64 = g.weights().iter().sum();
        let exact = (4.0 - 0.01) / (8.0 * PI * PI);
        assert!((total - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn panels_split_at_decades() {
        let p = radial_panels(3e-3, 1.0);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], (3e-3, 1e-2));
        assert_eq!(p.last().unwrap().1, 1.0);
        assert_eq!(radial_panels(1e-2, 1.0).len(), 2);
    }

    #[test]
    fn covariant_and_transverse_pairings_agree_for_loop_current() {
        let l = triangle();
        let g = PhotonModeGrid::new(0.1, 1.0, 4, 4).unwrap();
        let j = |k: &FourVector| loop_current(&l, k);
        let t = pairing(j, j, &g);
        let c = covariant_pairing(j, j, &g);
        assert!((t - c).norm() < 1e-10 * t.norm());
    }

    #[test]
    fn norm_factor_matches_photon_number() {
        let d = coherent_state(&triangle(), &PhotonModeGrid::new(0.1, 1.0, 4, 3).unwrap(), 0.2);
        assert!((d.norm_factor.powi(2) * d.photon_number.exp() - 1.0).abs() < 1e-14);
        assert!(d.norm_factor > 0.0 && d.norm_factor < 1.0);
    }
}
