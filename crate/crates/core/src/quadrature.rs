//! Gauss–Legendre rules: fixed, composite over panels, tensor-product boxes
//! and 1D adaptive bisection. Every estimate pairs an `n`-point rule with an
//! `n/2`-point rule on the same panel and reports their difference.

use std::ops::Add;

use crate::algebra::{DiracMatrix, C64};
use crate::error::Result;

/// Values that can be accumulated by a quadrature rule.
pub trait Quantity: Clone + Add<Output = Self> {
    fn zero_like(&self) -> Self;
    fn scaled(&self, w: f64) -> Self;
    /// Size used for error estimates (max-entry norm).
    fn magnitude(&self) -> f64;
}

impl Quantity for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quantity for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn scaled(&self, w: f64) -> Self {
        self * w
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Quantity for DiracMatrix {
    fn zero_like(&self) -> Self {
        DiracMatrix::zero()
    }
    fn scaled(&self, w: f64) -> Self {
        self.scale_real(w)
    }
    fn magnitude(&self) -> f64 {
        self.norm_max()
    }
}

/// Component-wise vector of quantities (all entries share one shape).
#[derive(Clone, Debug, PartialEq)]
pub struct Stack<T>(pub Vec<T>);

impl<T: Quantity> Add for Stack<T> {
    type Output = Stack<T>;

    fn add(self, rhs: Stack<T>) -> Stack<T> {
        Stack(self.0.into_iter().zip(rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<T: Quantity> Quantity for Stack<T> {
    fn zero_like(&self) -> Self {
        Stack(self.0.iter().map(Quantity::zero_like).collect())
    }
    fn scaled(&self, w: f64) -> Self {
        Stack(self.0.iter().map(|x| x.scaled(w)).collect())
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.magnitude()))
    }
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> Result<T>
    where
        T: Quantity,
        F: FnMut(f64) -> Result<T>,
    {
        let mut acc: Option<T> = None;
        for (x, w) in self.mapped(a, b) {
            let v = f(x)?.scaled(w);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
        Ok(acc.expect("rule has at least one node"))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral value together with an error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// An `order`-point rule paired with an `order/2`-point companion.
#[derive(Clone, Debug)]
pub struct PairedRule {
    pub fine: GaussLegendre,
    pub coarse: GaussLegendre,
}

impl PairedRule {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2);
        Self {
            fine: GaussLegendre::new(order),
            coarse: GaussLegendre::new(order / 2),
        }
    }

    /// Composite integration over consecutive panels `[b_k, b_{k+1}]`.
    pub fn integrate_panels<T, F>(&self, breakpoints: &[f64], mut f: F) -> Result<Estimate<T>>
    where
        T: Quantity,
        F: FnMut(f64) -> Result<T>,
    {
        assert!(breakpoints.len() >= 2, "need at least one panel");
        let mut total: Option<T> = None;
        let mut error = 0.0;
        for w in breakpoints.windows(2) {
            let fine = self.fine.integrate(w[0], w[1], &mut f)?;
            let coarse = self.coarse.integrate(w[0], w[1], &mut f)?;
            error += (coarse + fine.scaled(-1.0)).magnitude();
            total = Some(match total {
                Some(t) => t + fine,
                None => fine,
            });
        }
        Ok(Estimate {
            value: total.expect("non-empty"),
            error,
        })
    }

    /// Tensor-product integration over a box whose axes are composite panel
    /// lists. The error estimate is the difference between the fine and
    /// coarse tensor products.
    pub fn integrate_box<T, F>(&self, axes: &[Vec<f64>], mut f: F) -> Result<Estimate<T>>
    where
        T: Quantity,
        F: FnMut(&[f64]) -> Result<T>,
    {
        let fine = tensor_sum(&composite_nodes(&self.fine, axes), &mut f)?;
        let coarse = tensor_sum(&composite_nodes(&self.coarse, axes), &mut f)?;
        let error = (coarse + fine.scaled(-1.0)).magnitude();
        Ok(Estimate { value: fine, error })
    }
}

fn composite_nodes(rule: &GaussLegendre, axes: &[Vec<f64>]) -> Vec<Vec<(f64, f64)>> {
    axes.iter()
        .map(|bps| {
            bps.windows(2)
                .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
                .collect()
        })
        .collect()
}

fn tensor_sum<T, F>(axes: &[Vec<(f64, f64)>], f: &mut F) -> Result<T>
where
    T: Quantity,
    F: FnMut(&[f64]) -> Result<T>,
{
    let dim = axes.len();
    if dim == 0 {
        return f(&[]);
    }
    let mut counter = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    let mut acc: Option<T> = None;
    loop {
        let mut w = 1.0;
        for d in 0..dim {
            let (x, wd) = axes[d][counter[d]];
            point[d] = x;
            w *= wd;
        }
        let v = f(&point)?.scaled(w);
        acc = Some(match acc {
            Some(s) => s + v,
            None => v,
        });
        let mut d = dim;
        loop {
            if d == 0 {
                return Ok(acc.expect("non-empty"));
            }
            d -= 1;
            counter[d] += 1;
            if counter[d] < axes[d].len() {
                break;
            }
            counter[d] = 0;
        }
    }
}

/// Adaptive bisection with a (16, 8)-point Gauss–Legendre pair per interval.
#[derive(Clone, Debug)]
pub struct Adaptive {
    rule: PairedRule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self::new(1e-12, 1e-10)
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            rule: PairedRule::new(16),
            abs_tol,
            rel_tol,
            max_depth: 40,
        }
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> Result<Estimate<f64>>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let whole = self.rule.integrate_panels(&[a, b], &mut f)?;
        let tol = self.abs_tol.max(self.rel_tol * whole.value.abs());
        self.refine(a, b, whole, tol, 0, &mut f)
    }

    fn refine<F>(
        &self,
        a: f64,
        b: f64,
        here: Estimate<f64>,
        tol: f64,
        depth: u32,
        f: &mut F,
    ) -> Result<Estimate<f64>>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if here.error <= tol || depth >= self.max_depth {
            return Ok(here);
        }
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate_panels(&[a, mid], &mut *f)?;
        let right = self.rule.integrate_panels(&[mid, b], &mut *f)?;
        let left = self.refine(a, mid, left, 0.5 * tol, depth + 1, f)?;
        let right = self.refine(mid, b, right, 0.5 * tol, depth + 1, f)?;
        Ok(Estimate {
            value: left.value + right.value,
            error: left.error + right.error,
        })
    }
}

/// Breakpoints `0, 10^lo, 10^(lo+1), …, 10^hi` for semi-infinite λ ranges
/// truncated at `10^hi`.
pub fn geometric_breakpoints(lo: i32, hi: i32) -> Vec<f64> {
    std::iter::once(0.0)
        .chain((lo..=hi).map(|e| 10f64.powi(e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 8, 16, 32, 64] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            for i in 0..n {
                assert!((gl.nodes[i] + gl.nodes[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(8);
        for deg in 0..16 {
            let v: f64 = gl.integrate(0.0, 1.0, |x| Ok(x.powi(deg))).unwrap();
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn composite_panels_integrate_decaying_tail() {
        let rule = PairedRule::new(32);
        let bps = geometric_breakpoints(-3, 3);
        let est = rule
            .integrate_panels(&bps, |x| Ok(1.0 / (1.0 + x).powi(2)))
            .unwrap();
        let exact = 1.0 - 1.0 / 1001.0;
        assert!((est.value - exact).abs() < 1e-13);
        assert!(est.error < 1e-6 && est.error >= (est.value - exact).abs());
    }

    #[test]
    fn box_rule_matches_separable_product() {
        let rule = PairedRule::new(16);
        let axes = vec![vec![0.0, 1.0], vec![0.0, 0.5, 2.0]];
        let est = rule
            .integrate_box(&axes, |x| Ok((x[0]).exp() * x[1] * x[1]))
            .unwrap();
        let exact = (1f64.exp() - 1.0) * 8.0 / 3.0;
        assert!((est.value - exact).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_narrow_lorentzian() {
        let eta = 1e-4;
        let ad = Adaptive::new(1e-13, 1e-11);
        let est = ad
            .integrate(-1.0, 2.0, |x| Ok(eta / std::f64::consts::PI / (x * x + eta * eta)))
            .unwrap();
        let exact = ((2.0 / eta).atan() + (1.0 / eta).atan()) / std::f64::consts::PI;
        assert!((est.value - exact).abs() < 1e-9, "{} vs {}", est.value, exact);
    }

    #[test]
    fn errors_from_integrand_propagate() {
        let gl = GaussLegendre::new(4);
        let r: Result<f64> = gl.integrate(0.0, 1.0, |_| {
            Err(crate::error::Error::InvalidArgument("boom".into()))
        });
        assert!(r.is_err());
    }
}
