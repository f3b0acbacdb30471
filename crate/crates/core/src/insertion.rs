//! Momentum-space insertion operators acting on generalized propagators.
//!
//! * Ĉ_μ(k) = ∫₀¹ dλ O(p → p+λk) (−i ∂/∂p^μ), classical photon summed over
//!   all insertion points;
//! * C̃_μ(k) = ∫₀^∞ dλ O(p → p+λk) (−∂/∂p^μ), classical photon at one
//!   place, acting on k^σ P_σ;
//! * Q̃_μ(k) = (δ_μ^σ k^ρ − δ_μ^ρ k^σ) C̃_ρ(k), quantum photon, acting on P_σ.
//!
//! Momentum derivatives are exact by default (multilinear jets of the
//! rational chain); central differences are available for comparison. The
//! semi-infinite λ range is split at `lambda_max`: geometric panels below,
//! and λ = λ_max/s with s ∈ (0, 1] above.

use crate::algebra::{
    gamma_lower, slash, DiracMatrix, FourVector, LorentzIndex, I,
};
use crate::chain::{resolvent, ChainSpec, VertexFactor, VertexKind};
use crate::error::{Error, Result};
use crate::quadrature::{geometric_breakpoints, Estimate, PairedRule, Stack};

/// How momentum derivatives are taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    /// Exact mixed derivatives through multilinear jets.
    Exact,
    /// Central differences with step h·(1 + ‖p‖_max); `None` uses h = 1e−4.
    CentralDifference { step: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InsertionConfig {
    /// Gauss–Legendre order per panel; an order/2 rule provides the error estimate.
    pub order: usize,
    /// Relative tolerance on the quadrature error estimate.
    pub tolerance: f64,
    /// Start of the mapped tail of λ ∈ [0, ∞).
    pub lambda_max: f64,
    /// First non-zero breakpoint of the geometric λ panels is 10^this.
    pub lambda_min_exponent: i32,
    pub derivative: DerivativeMode,
}

impl Default for InsertionConfig {
    fn default() -> Self {
        Self {
            order: 32,
            tolerance: 1e-8,
            lambda_max: 1e3,
            lambda_min_exponent: -6,
            derivative: DerivativeMode::Exact,
        }
    }
}

impl InsertionConfig {
    /// Breakpoints in the integration variable u; see [`Self::lambda_of`].
    fn semi_infinite_breakpoints(&self) -> Vec<f64> {
        let hi = self.lambda_max.log10().ceil() as i32;
        let mut bps = geometric_breakpoints(self.lambda_min_exponent, hi);
        if let Some(last) = bps.last_mut() {
            *last = self.lambda_max;
        }
        bps.push(self.lambda_max + 1.0);
        bps
    }

    /// λ(u) and dλ/du: identity on [0, Λ], λ = Λ/s with s = Λ + 1 − u beyond.
    fn lambda_of(&self, u: f64) -> (f64, f64) {
        let big = self.lambda_max;
        if u <= big {
            (u, 1.0)
        } else {
            let s = big + 1.0 - u;
            (big / s, big / (s * s))
        }
    }

    fn derivative_step(&self, p: &FourVector) -> f64 {
        match self.derivative {
            DerivativeMode::Exact => 0.0,
            DerivativeMode::CentralDifference { step } => {
                step.unwrap_or(1e-4) * (1.0 + p.norm_max())
            }
        }
    }
}

/// Result of applying an insertion operator.
#[derive(Clone, Debug, PartialEq)]
pub struct InsertionResult {
    pub value: DiracMatrix,
    /// Quadrature error estimate (fine minus coarse rule).
    pub quadrature_error_estimate: f64,
    /// Finite-difference step (0 for exact derivatives).
    pub derivative_step: f64,
}

fn accept(value: DiracMatrix, error: f64, step: f64, cfg: &InsertionConfig) -> Result<InsertionResult> {
    let tolerance = cfg.tolerance * value.norm_max().max(1.0);
    if !(error <= tolerance) {
        return Err(Error::QuadratureTolerance { estimate: error, tolerance });
    }
    Ok(InsertionResult {
        value,
        quadrature_error_estimate: error,
        derivative_step: step,
    })
}

/// ‖(p̸−m)⁻¹ k̸ (p̸+k̸−m)⁻¹ − [(p̸−m)⁻¹ − (p̸+k̸−m)⁻¹]‖_max, divided by
/// max(1, ‖(p̸−m)⁻¹‖ + ‖(p̸+k̸−m)⁻¹‖).
pub fn ward_identity_residual(p: &FourVector, k: &FourVector, mass: f64) -> Result<f64> {
    let s0 = resolvent(p, mass)?;
    let s1 = resolvent(&(*p + *k), mass)?;
    let lhs = s0 * slash(k) * s1;
    let rhs = s0 - s1;
    let scale = (s0.norm_max() + s1.norm_max()).max(1.0);
    Ok((lhs - rhs).norm_max() / scale)
}

/// Residual of −∂/∂p^μ (p̸−m)⁻¹ = (p̸−m)⁻¹ γ_μ (p̸−m)⁻¹ with a central
/// difference of step h.
///
/// Fails with [`Error::StepTooSmall`] when the rounding floor of the
/// difference quotient is comparable to the measured residual.
pub fn derivative_identity_residual(
    p: &FourVector,
    mu: LorentzIndex,
    mass: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let e = FourVector::unit(mu);
    let s = resolvent(p, mass)?;
    let fwd = resolvent(&(*p + e * h), mass)?;
    let bwd = resolvent(&(*p - e * h), mass)?;
    let fd = (bwd - fwd).scale_real(0.5 / h);
    let exact = s * gamma_lower(mu) * s;
    let residual = (fd - exact).norm_max();
    let rounding = 4.0 * f64::EPSILON * fwd.norm_max().max(bwd.norm_max()) / h;
    if rounding > 0.1 * residual {
        return Err(Error::StepTooSmall { step: h });
    }
    Ok(residual)
}

/// log₂ of residual(h)/residual(h/2); tends to 2 for a second-order stencil.
pub fn derivative_convergence_order(
    p: &FourVector,
    mu: LorentzIndex,
    mass: f64,
    h: f64,
) -> Result<f64> {
    let r1 = derivative_identity_residual(p, mu, mass, h)?;
    let r2 = derivative_identity_residual(p, mu, mass, 0.5 * h)?;
    Ok((r1 / r2).log2())
}

/// Roots of (q + λk)² − m² in the open interval (lo, hi).
fn shell_crossings(q: &FourVector, k: &FourVector, mass: f64, lo: f64, hi: f64) -> Vec<f64> {
    let a = k.square().re;
    let b = 2.0 * q.dot(k).re;
    let c = q.square().re - mass * mass;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(f64::MIN_POSITIVE);
    let mut roots = Vec::new();
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let qq = -0.5 * (b + b.signum() * sq);
            if qq != 0.0 {
                roots.push(qq / a);
                roots.push(c / qq);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|r| *r > lo && *r < hi);
    roots.sort_by(f64::total_cmp);
    roots
}

/// Rejects shifts p → p + λk, λ ∈ [0, λ_end], that cross a prefix mass
/// shell when the chain carries no iε.
fn check_path(chain: &ChainSpec, p: &FourVector, k: &FourVector, lambda_end: f64) -> Result<()> {
    if chain.epsilon() > 0.0 {
        return Ok(());
    }
    for (prefix, q) in chain.prefix_momenta(p).iter().enumerate() {
        if let Some(&lambda) = shell_crossings(q, k, chain.mass(), 0.0, lambda_end).first() {
            return Err(Error::OnShellCrossing { prefix, lambda });
        }
    }
    Ok(())
}

/// Directional derivative (v·∂_p) of the chain at p with the given factors.
fn chain_derivative(
    chain: &ChainSpec,
    p: &FourVector,
    factors: &[VertexFactor],
    v: &FourVector,
    mode: DerivativeMode,
    step: f64,
) -> Result<DiracMatrix> {
    match mode {
        DerivativeMode::Exact => Ok(chain.jet_with(p, factors, &[*v])?.top()),
        DerivativeMode::CentralDifference { .. } => {
            let fwd = chain.eval_with(&(*p + *v * step), factors)?;
            let bwd = chain.eval_with(&(*p - *v * step), factors)?;
            Ok((fwd - bwd).scale_real(0.5 / step))
        }
    }
}

/// Ĉ_μ(k) applied to the chain at base momentum p:
/// ∫₀¹ dλ (−i ∂/∂p^μ) P(p + λk).
pub fn apply_c_hat(
    chain: &ChainSpec,
    p: &FourVector,
    k: &FourVector,
    mu: LorentzIndex,
    cfg: &InsertionConfig,
) -> Result<InsertionResult> {
    check_path(chain, p, k, 1.0)?;
    let factors = chain.gamma_factors();
    let e = FourVector::unit(mu);
    let step = cfg.derivative_step(p);
    let rule = PairedRule::new(cfg.order);
    let est: Estimate<DiracMatrix> = rule.integrate_panels(&[0.0, 1.0], |lambda| {
        let q = *p + *k * lambda;
        Ok(chain_derivative(chain, &q, &factors, &e, cfg.derivative, step)?.scale(-I))
    })?;
    accept(est.value, est.error, step, cfg)
}

/// Product of several Ĉ operators applied together:
/// ∫[0,1]^N dλ Π_j (−i ∂/∂p^{μ_j}) P(p + Σ λ_j k_j). Derivatives are exact.
pub fn apply_c_hat_multi(
    chain: &ChainSpec,
    p: &FourVector,
    photons: &[(FourVector, LorentzIndex)],
    cfg: &InsertionConfig,
) -> Result<InsertionResult> {
    if photons.is_empty() {
        let value = chain.eval(p, &FourVector::ZERO)?;
        return Ok(InsertionResult {
            value,
            quadrature_error_estimate: 0.0,
            derivative_step: 0.0,
        });
    }
    let total = photons
        .iter()
        .fold(FourVector::ZERO, |acc, (k, _)| acc + *k);
    // the box corners are the extreme shifts; each edge is checked separately
    for (k, _) in photons {
        check_path(chain, p, k, 1.0)?;
        check_path(chain, &(total - *k + *p), k, 1.0)?;
    }
    let factors = chain.gamma_factors();
    let dirs: Vec<FourVector> = photons.iter().map(|(_, mu)| FourVector::unit(*mu)).collect();
    let phase = (-I).powi(photons.len() as i32);
    let rule = PairedRule::new(cfg.order);
    let axes = vec![vec![0.0, 1.0]; photons.len()];
    let est: Estimate<DiracMatrix> = rule.integrate_box(&axes, |lambdas| {
        let shift = photons
            .iter()
            .zip(lambdas)
            .fold(FourVector::ZERO, |acc, ((k, _), l)| acc + *k * *l);
        Ok(chain.jet_with(&(*p + shift), &factors, &dirs)?.top().scale(phase))
    })?;
    accept(est.value, est.error, 0.0, cfg)
}

/// Ĉ_μ(k) as an operator on arbitrary momentum-space functions, with
/// fourth-order central differences. Used to compose insertions in either
/// order without assuming the chain structure.
#[derive(Clone, Debug)]
pub struct ClassicalOperator {
    pub k: FourVector,
    pub mu: LorentzIndex,
    pub order: usize,
    pub step: f64,
}

impl ClassicalOperator {
    pub fn new(k: FourVector, mu: LorentzIndex) -> Self {
        Self {
            k,
            mu,
            order: 16,
            step: 1e-3,
        }
    }

    pub fn apply<F>(&self, f: &F, p: &FourVector) -> Result<DiracMatrix>
    where
        F: Fn(&FourVector) -> Result<DiracMatrix>,
    {
        let e = FourVector::unit(self.mu);
        let h = self.step;
        let rule = crate::quadrature::GaussLegendre::new(self.order);
        rule.integrate(0.0, 1.0, |lambda| {
            let q = *p + self.k * lambda;
            let d = (f(&(q - e * (2.0 * h)))? - f(&(q + e * (2.0 * h)))?
                + (f(&(q + e * h))? - f(&(q - e * h))?).scale_real(8.0))
            .scale_real(1.0 / (12.0 * h));
            Ok(d.scale(-I))
        })
    }
}

/// All four components μ of Q̃_μ(k_j) applied at vertex j, the remaining
/// vertices carrying their stored γ indices.
///
/// The tensor G_{ρσ} = ∫₀^∞ dλ (−∂/∂p^ρ) P_σ(p + λk_j) is integrated once
/// and contracted: Q̃_μ = k^ρ G_{ρμ} − k^σ G_{μσ}.
pub fn apply_q_tilde_all(
    chain: &ChainSpec,
    j: usize,
    p: &FourVector,
    cfg: &InsertionConfig,
) -> Result<[InsertionResult; 4]> {
    let vertex = chain
        .vertices()
        .get(j)
        .ok_or_else(|| Error::InvalidArgument(format!("no vertex at position {j}")))?;
    let k = vertex.momentum;
    check_path(chain, p, &k, f64::INFINITY)?;
    let step = cfg.derivative_step(p);
    let base = chain.gamma_factors();
    let integrand = |u: f64| -> Result<Stack<DiracMatrix>> {
        let (lambda, jac) = cfg.lambda_of(u);
        let q = *p + k * lambda;
        let mut g = Vec::with_capacity(16);
        for rho in LorentzIndex::ALL {
            let e = FourVector::unit(rho);
            for sigma in LorentzIndex::ALL {
                let mut factors = base.clone();
                factors[j] = VertexFactor::Gamma(sigma);
                g.push(chain_derivative(chain, &q, &factors, &e, cfg.derivative, step)?.scale_real(-jac));
            }
        }
        Ok(Stack(g))
    };
    let rule = PairedRule::new(cfg.order);
    let bps = cfg.semi_infinite_breakpoints();
    let est = rule.integrate_panels(&bps, integrand)?;
    let g = est.value.0;
    let comps: Vec<InsertionResult> = LorentzIndex::ALL
        .iter()
        .map(|&mu| {
            let value: DiracMatrix = LorentzIndex::ALL
                .iter()
                .map(|&r| {
                    g[r.get() * 4 + mu.get()].scale(k[r.get()])
                        - g[mu.get() * 4 + r.get()].scale(k[r.get()])
                })
                .sum();
            accept(value, est.error, step, cfg)
        })
        .collect::<Result<_>>()?;
    Ok(comps.try_into().expect("four components"))
}

/// Q̃_μ(k_j) applied at vertex j.
pub fn apply_q_tilde(
    chain: &ChainSpec,
    j: usize,
    p: &FourVector,
    mu: LorentzIndex,
    cfg: &InsertionConfig,
) -> Result<InsertionResult> {
    let [a, b, c, d] = apply_q_tilde_all(chain, j, p, cfg)?;
    Ok([a, b, c, d].into_iter().nth(mu.get()).expect("index < 4"))
}

/// k^μ contraction of the four Q̃ components.
pub fn contract_with(k: &FourVector, components: &[DiracMatrix; 4]) -> DiracMatrix {
    LorentzIndex::ALL
        .iter()
        .map(|&mu| components[mu.get()].scale(k[mu.get()]))
        .sum()
}

struct Term {
    direction: Option<FourVector>,
    factor: VertexFactor,
    coefficient: f64,
}

fn vertex_terms(kind: VertexKind, k: FourVector, mu: LorentzIndex) -> Vec<Term> {
    match kind {
        VertexKind::PlainGamma => vec![Term {
            direction: None,
            factor: VertexFactor::Gamma(mu),
            coefficient: 1.0,
        }],
        // −D_k P_μ + D_{e_μ} P_{k̸}
        VertexKind::Quantum => vec![
            Term {
                direction: Some(-k),
                factor: VertexFactor::Gamma(mu),
                coefficient: 1.0,
            },
            Term {
                direction: Some(FourVector::unit(mu)),
                factor: VertexFactor::Slash(k),
                coefficient: 1.0,
            },
        ],
        // ∫ (−∂_μ) P_{k̸}
        VertexKind::Classical => vec![Term {
            direction: Some(FourVector::unit(mu)),
            factor: VertexFactor::Slash(k),
            coefficient: -1.0,
        }],
    }
}

/// The line with every vertex treated according to its kind: quantum
/// vertices by Q̃, single-place classical vertices by C̃ on k^σP_σ, plain
/// vertices as bare γ_μ. All λ_j of non-plain vertices run over [0, λ_max]
/// and shift the whole line by a = Σ λ_j k_j. Derivatives are exact.
pub fn evaluate_insertions(
    chain: &ChainSpec,
    p: &FourVector,
    cfg: &InsertionConfig,
) -> Result<InsertionResult> {
    let per_vertex: Vec<Vec<Term>> = chain
        .vertices()
        .iter()
        .map(|v| vertex_terms(v.kind, v.momentum, v.index))
        .collect();
    let integrated: Vec<usize> = chain
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind != VertexKind::PlainGamma)
        .map(|(i, _)| i)
        .collect();
    if integrated.is_empty() {
        return accept(chain.eval(p, &FourVector::ZERO)?, 0.0, 0.0, cfg);
    }
    if chain.epsilon() == 0.0 {
        for &i in &integrated {
            let k = chain.vertices()[i].momentum;
            check_path(chain, p, &k, f64::INFINITY)?;
        }
    }
    // enumerate every choice of one term per vertex
    let mut combos: Vec<(Vec<VertexFactor>, Vec<FourVector>, f64)> = vec![(vec![], vec![], 1.0)];
    for terms in &per_vertex {
        let mut next = Vec::with_capacity(combos.len() * terms.len());
        for (factors, dirs, c) in &combos {
            for t in terms {
                let mut f = factors.clone();
                f.push(t.factor);
                let mut d = dirs.clone();
                if let Some(v) = t.direction {
                    d.push(v);
                }
                next.push((f, d, c * t.coefficient));
            }
        }
        combos = next;
    }
    let integrand = |us: &[f64]| -> Result<DiracMatrix> {
        let mut shift = FourVector::ZERO;
        let mut jac = 1.0;
        for (&i, &u) in integrated.iter().zip(us) {
            let (l, d) = cfg.lambda_of(u);
            shift += chain.vertices()[i].momentum * l;
            jac *= d;
        }
        let q = *p + shift;
        let mut acc = DiracMatrix::zero();
        for (factors, dirs, c) in &combos {
            acc += chain.jet_with(&q, factors, dirs)?.top().scale_real(*c);
        }
        Ok(acc.scale_real(jac))
    };
    let rule = PairedRule::new(cfg.order);
    let axes = vec![cfg.semi_infinite_breakpoints(); integrated.len()];
    let est = rule.integrate_box(&axes, integrand)?;
    accept(est.value, est.error, 0.0, cfg)
}
