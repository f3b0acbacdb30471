//! Simple-pole decomposition of generalized propagators in p², dominant
//! singularities of quantum-vertex lines, and the 2^N expansion of classical
//! insertions.
//!
//! With x = p² − m² + iε and p_j² − p_i² fixed, the line is
//!
//! ```text
//! N(p) / Π_i (p_i² − m² + iε) = Σ_i N(p) / [(p_i² − m² + iε) Π_{j≠i} (p_j² − p_i²)]
//! ```
//!
//! where N is the ordered product of propagator numerators i(p̸_j + m) and
//! vertex factors. Each term splits as N₁ᵢ/D₁ᵢ · i(p̸ᵢ+m)/(pᵢ²−m²) · N₂ᵢ/D₂ᵢ.

use crate::algebra::{gamma_lower, minkowski, slash, DiracMatrix, FourVector, LorentzIndex, C64, I};
use crate::chain::{ChainSpec, VertexFactor, VertexKind};
use crate::error::{Error, Result};
use crate::extrapolate::{power_law_exponent, richardson, Extrapolated, LineFit};

/// Relative tolerance below which two prefix shells count as coincident.
pub const DEGENERATE_POLE_TOLERANCE: f64 = 1e-6;

/// Richardson steps in t = (pᵢ² − m²)/m².
pub const RESIDUE_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Sign σ_ij multiplying the factor p_j² − p_i² of the pole-i denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    /// σ_ij = +1 for j > i and −1 for j < i.
    Provisional,
    /// σ_ij = +1 for all j.
    AllPositive,
}

impl SignConvention {
    pub const ALL: [SignConvention; 2] = [SignConvention::Provisional, SignConvention::AllPositive];

    fn sigma(self, i: usize, j: usize) -> f64 {
        match self {
            SignConvention::Provisional if j < i => -1.0,
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignConvention::Provisional => "provisional",
            SignConvention::AllPositive => "all-positive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleTerm {
    pub index: usize,
    pub pole_momentum: FourVector,
    pub n1: DiracMatrix,
    pub n2: DiracMatrix,
    pub d1: C64,
    pub d2: C64,
    /// pᵢ² − m² + iε
    pub pole_denominator: C64,
    pub mass: f64,
}

impl PoleTerm {
    /// N₁ᵢ · i(p̸ᵢ+m) · N₂ᵢ / (D₁ᵢ D₂ᵢ), the coefficient of 1/(pᵢ²−m²).
    pub fn residue(&self) -> DiracMatrix {
        (self.n1 * numerator(&self.pole_momentum, self.mass) * self.n2)
            .scale(1.0 / (self.d1 * self.d2))
    }

    pub fn value(&self) -> DiracMatrix {
        self.residue().scale(1.0 / self.pole_denominator)
    }
}

fn numerator(q: &FourVector, mass: f64) -> DiracMatrix {
    (slash(q) + DiracMatrix::scalar(C64::new(mass, 0.0))).scale(I)
}

fn check_distinct(prefixes: &[FourVector], mass: f64) -> Result<()> {
    for i in 0..prefixes.len() {
        for j in i + 1..prefixes.len() {
            let gap = (prefixes[j].square() - prefixes[i].square()).norm();
            if gap < DEGENERATE_POLE_TOLERANCE * mass * mass {
                return Err(Error::DegeneratePoles { i, j, gap });
            }
        }
    }
    Ok(())
}

/// Pole term i of the line at base momentum p with explicit vertex factors.
pub fn pole_term_with(
    chain: &ChainSpec,
    p: &FourVector,
    i: usize,
    factors: &[VertexFactor],
    convention: SignConvention,
) -> Result<PoleTerm> {
    let n = chain.len();
    if i > n {
        return Err(Error::InvalidIndex(i));
    }
    if factors.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} vertex factors for a chain of {n} vertices",
            factors.len()
        )));
    }
    let m = chain.mass();
    let prefixes = chain.prefix_momenta(p);
    check_distinct(&prefixes, m)?;
    for (j, q) in prefixes.iter().enumerate() {
        chain.check_off_shell(q, j)?;
    }
    let pi2 = prefixes[i].square();
    let mut n1 = DiracMatrix::identity();
    let mut d1 = C64::new(1.0, 0.0);
    for j in 0..i {
        n1 = n1 * numerator(&prefixes[j], m) * factors[j].matrix();
        d1 *= (prefixes[j].square() - pi2) * convention.sigma(i, j);
    }
    let mut n2 = DiracMatrix::identity();
    let mut d2 = C64::new(1.0, 0.0);
    for j in i + 1..=n {
        n2 = n2 * factors[j - 1].matrix() * numerator(&prefixes[j], m);
        d2 *= (prefixes[j].square() - pi2) * convention.sigma(i, j);
    }
    Ok(PoleTerm {
        index: i,
        pole_momentum: prefixes[i],
        n1,
        n2,
        d1,
        d2,
        pole_denominator: pi2 - m * m + I * chain.epsilon(),
        mass: m,
    })
}

/// All n+1 pole terms with the stored γ indices.
pub fn pole_terms(chain: &ChainSpec, p: &FourVector) -> Result<Vec<PoleTerm>> {
    pole_terms_with_convention(chain, p, SignConvention::AllPositive)
}

pub fn pole_terms_with_convention(
    chain: &ChainSpec,
    p: &FourVector,
    convention: SignConvention,
) -> Result<Vec<PoleTerm>> {
    let factors = chain.gamma_factors();
    (0..=chain.len())
        .map(|i| pole_term_with(chain, p, i, &factors, convention))
        .collect()
}

pub fn sum_terms(terms: &[PoleTerm]) -> DiracMatrix {
    terms.iter().map(PoleTerm::value).sum()
}

/// Relative distance between Σ pole terms and the direct chain value.
pub fn decomposition_residual(
    chain: &ChainSpec,
    p: &FourVector,
    convention: SignConvention,
) -> Result<f64> {
    let terms = pole_terms_with_convention(chain, p, convention)?;
    let direct = chain.eval(p, &FourVector::ZERO)?;
    Ok(DiracMatrix::relative_distance(&sum_terms(&terms), &direct))
}

/// Outcome of testing each sign convention on a set of kinematic points.
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionSearch {
    /// (convention, worst relative residual) for every candidate.
    pub candidates: Vec<(SignConvention, f64)>,
    /// First convention whose worst residual is within tolerance.
    pub selected: Option<SignConvention>,
}

/// Tries the provisional convention first, then the alternatives.
pub fn search_sign_convention(
    chain: &ChainSpec,
    points: &[FourVector],
    tolerance: f64,
) -> Result<ConventionSearch> {
    let mut candidates = Vec::new();
    let mut selected = None;
    for conv in SignConvention::ALL {
        let mut worst: f64 = 0.0;
        for p in points {
            worst = worst.max(decomposition_residual(chain, p, conv)?);
        }
        if selected.is_none() && worst <= tolerance {
            selected = Some(conv);
        }
        candidates.push((conv, worst));
    }
    Ok(ConventionSearch { candidates, selected })
}

/// Γ'_μ = γ_μ − p_μ k̸/(p·k) = (δ_μ^σ k^ρ − δ_μ^ρ k^σ) p_ρ γ_σ/(p·k).
pub fn reduced_vertex(p: &FourVector, k: &FourVector, mu: LorentzIndex) -> Option<DiracMatrix> {
    let pk = minkowski(p, k);
    if pk.norm() <= 1e-14 * (p.norm_max() * k.norm_max()).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(gamma_lower(mu) - slash(k).scale(p.lower(mu) / pk))
}

/// i p_μ/(p·k), the factor left by a classical photon at a pole.
pub fn classical_factor(p: &FourVector, k: &FourVector, mu: LorentzIndex) -> C64 {
    I * p.lower(mu) / minkowski(p, k)
}

/// Σ_μ k^μ · i p_μ/(p·k); equal to i.
pub fn contracted_classical_factor(p: &FourVector, k: &FourVector) -> C64 {
    LorentzIndex::ALL
        .iter()
        .map(|&mu| k[mu.get()] * classical_factor(p, k, mu))
        .sum()
}

/// (δ_μ^σ k^ρ − δ_μ^ρ k^σ) 2p_σ 2p_ρ for μ = 0..3; vanishes identically.
pub fn symmetric_contraction(p: &FourVector, k: &FourVector) -> [C64; 4] {
    let pk = minkowski(p, k);
    let mut out = [C64::new(0.0, 0.0); 4];
    for mu in LorentzIndex::ALL {
        let two_p = p.lower(mu) * 2.0;
        out[mu.get()] = two_p * (pk * 2.0) - (pk * 2.0) * two_p;
    }
    out
}

/// Dominant singularity of a quantum-vertex line at pole i: every quantum
/// vertex γ_μ is replaced by the reduced vertex Γ'_μ built from pᵢ.
#[derive(Clone, Debug)]
pub struct DominantSingularity {
    chain: ChainSpec,
    pole: usize,
}

impl DominantSingularity {
    pub fn new(chain: &ChainSpec, pole: usize) -> Result<Self> {
        if pole > chain.len() {
            return Err(Error::InvalidIndex(pole));
        }
        if chain.vertices().iter().any(|v| v.kind == VertexKind::Classical) {
            return Err(Error::InvalidArgument(
                "dominant singularity needs quantum or plain vertices only".into(),
            ));
        }
        Ok(Self {
            chain: chain.clone(),
            pole,
        })
    }

    pub fn pole(&self) -> usize {
        self.pole
    }

    /// Vertex factors for pole momentum pᵢ.
    pub fn factors(&self, pole_momentum: &FourVector) -> Result<Vec<VertexFactor>> {
        self.chain
            .vertices()
            .iter()
            .enumerate()
            .map(|(j, v)| match v.kind {
                VertexKind::Quantum => reduced_vertex(pole_momentum, &v.momentum, v.index)
                    .map(VertexFactor::Matrix)
                    .ok_or(Error::VanishingDot {
                        pole: self.pole,
                        photon: j,
                    }),
                _ => Ok(VertexFactor::Gamma(v.index)),
            })
            .collect()
    }

    /// Base momentum p such that the i-th prefix equals pᵢ.
    pub fn base_momentum(&self, pole_momentum: &FourVector) -> FourVector {
        *pole_momentum - self.chain.cumulative_momenta()[self.pole]
    }

    /// The pole term at base momentum p (off shell).
    pub fn term(&self, p: &FourVector) -> Result<PoleTerm> {
        let pi = self.chain.prefix_momenta(p)[self.pole];
        let factors = self.factors(&pi)?;
        pole_term_with(&self.chain, p, self.pole, &factors, SignConvention::AllPositive)
    }

    pub fn eval(&self, p: &FourVector) -> Result<DiracMatrix> {
        Ok(self.term(p)?.value())
    }

    /// Residue at an on-shell pole momentum pᵢ: N₁ᵢ i(p̸ᵢ+m) N₂ᵢ/(D₁ᵢD₂ᵢ)
    /// with the other prefixes fixed by the chain's photon momenta.
    pub fn residue(&self, pole_momentum: &FourVector) -> Result<DiracMatrix> {
        let (n1, n2, d1, d2) = self.residue_parts(pole_momentum)?;
        Ok((n1 * numerator(pole_momentum, self.chain.mass()) * n2).scale(1.0 / (d1 * d2)))
    }

    /// Residue numerator N₁ᵢ i(p̸ᵢ+m) N₂ᵢ without the denominators.
    pub fn residue_numerator(&self, pole_momentum: &FourVector) -> Result<DiracMatrix> {
        let (n1, n2, _, _) = self.residue_parts(pole_momentum)?;
        Ok(n1 * numerator(pole_momentum, self.chain.mass()) * n2)
    }

    fn residue_parts(&self, pi: &FourVector) -> Result<(DiracMatrix, DiracMatrix, C64, C64)> {
        let m = self.chain.mass();
        let factors = self.factors(pi)?;
        let prefixes = self.chain.prefix_momenta(&self.base_momentum(pi));
        check_distinct(&prefixes, m)?;
        let pi2 = pi.square();
        let i = self.pole;
        let mut n1 = DiracMatrix::identity();
        let mut d1 = C64::new(1.0, 0.0);
        for j in 0..i {
            n1 = n1 * numerator(&prefixes[j], m) * factors[j].matrix();
            d1 *= prefixes[j].square() - pi2;
        }
        let mut n2 = DiracMatrix::identity();
        let mut d2 = C64::new(1.0, 0.0);
        for j in i + 1..prefixes.len() {
            n2 = n2 * factors[j - 1].matrix() * numerator(&prefixes[j], m);
            d2 *= prefixes[j].square() - pi2;
        }
        Ok((n1, n2, d1, d2))
    }
}

/// Limit of (pᵢ² − m²)·f(p) as pᵢ² → m² along pᵢ = √(1+t)·p̂ᵢ, with p̂ᵢ on
/// shell and the remaining prefixes following from `cumulative`.
pub fn residue_limit<F>(
    on_shell_pole: &FourVector,
    cumulative: &FourVector,
    mass: f64,
    mut f: F,
) -> Result<Extrapolated<DiracMatrix>>
where
    F: FnMut(&FourVector) -> Result<DiracMatrix>,
{
    richardson(&RESIDUE_STEPS, |t| {
        let pi = on_shell_pole.scale_real((1.0 + t).sqrt());
        let gap = pi.square() - mass * mass;
        Ok(f(&(pi - *cumulative))?.scale(gap))
    })
}

/// Power α in ‖residue numerator‖ ∝ t^α when the masked photon momenta are
/// scaled by t with the pole momentum held on shell.
pub fn residue_soft_scaling(
    chain: &ChainSpec,
    pole: usize,
    on_shell_pole: &FourVector,
    mask: &[bool],
    t_values: &[f64],
) -> Result<LineFit> {
    let mut ys = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let scaled = chain.scale_momenta(t, mask);
        let dom = DominantSingularity::new(&scaled, pole)?;
        ys.push(dom.residue_numerator(on_shell_pole)?.norm_frobenius());
    }
    power_law_exponent(t_values, &ys)
}

/// Θ ∈ {0,1}^N; bit j set means classical photon j is absorbed into the shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaVector {
    pub bits: Vec<bool>,
}

impl ThetaVector {
    /// All 2^N vectors, bit j of the enumeration index giving Θ_j.
    pub fn enumerate(n: usize) -> Vec<ThetaVector> {
        (0..1usize << n)
            .map(|idx| ThetaVector {
                bits: (0..n).map(|j| idx >> j & 1 == 1).collect(),
            })
            .collect()
    }

    /// Π_j (−1)^{Θ_j}
    pub fn sign(&self) -> f64 {
        if self.bits.iter().filter(|b| **b).count() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn shift(&self, ks: &[FourVector]) -> FourVector {
        self.bits
            .iter()
            .zip(ks)
            .filter(|(b, _)| **b)
            .fold(FourVector::ZERO, |acc, (_, k)| acc + *k)
    }

    pub fn label(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

/// One pole of one Θ-term.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaPole {
    pub term: PoleTerm,
    /// Π_j i p^Θ_{iμ_j}/(p^Θ_i·k_j)
    pub classical_factor: C64,
    /// The same product with each μ_j contracted with k_j; equals i^N.
    pub contracted_factor: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaTerm {
    pub theta: ThetaVector,
    pub sign: f64,
    pub shift: FourVector,
    pub poles: Vec<ThetaPole>,
}

impl ThetaTerm {
    pub fn value(&self) -> DiracMatrix {
        self.poles
            .iter()
            .map(|tp| tp.term.value().scale(tp.classical_factor * self.sign))
            .sum()
    }

    pub fn contracted_value(&self) -> DiracMatrix {
        self.poles
            .iter()
            .map(|tp| tp.term.value().scale(tp.contracted_factor * self.sign))
            .sum()
    }
}

/// Sum over Θ of the expansion of N classical photons (k_j, μ_j), summed
/// over all insertion points, acting on the meromorphic part of the line.
pub fn classical_meromorphic_expansion(
    chain: &ChainSpec,
    p: &FourVector,
    classical: &[(FourVector, LorentzIndex)],
) -> Result<Vec<ThetaTerm>> {
    let ks: Vec<FourVector> = classical.iter().map(|(k, _)| *k).collect();
    let mut out = Vec::with_capacity(1 << classical.len());
    for theta in ThetaVector::enumerate(classical.len()) {
        let shift = theta.shift(&ks);
        let base = *p + shift;
        for (prefix, q) in chain.prefix_momenta(&base).iter().enumerate() {
            if chain.check_off_shell(q, prefix).is_err() {
                return Err(Error::OnShellShift {
                    theta: theta.label(),
                    prefix,
                });
            }
        }
        let mut poles = Vec::with_capacity(chain.len() + 1);
        for i in 0..=chain.len() {
            let dom = DominantSingularity::new(chain, i)?;
            let term = dom.term(&base)?;
            let pi = term.pole_momentum;
            let mut factor = C64::new(1.0, 0.0);
            let mut contracted_factor = C64::new(1.0, 0.0);
            for (j, (k, mu)) in classical.iter().enumerate() {
                if minkowski(&pi, k).norm() == 0.0 {
                    return Err(Error::VanishingDot { pole: i, photon: j });
                }
                factor *= classical_factor(&pi, k, *mu);
                contracted_factor *= contracted_classical_factor(&pi, k);
            }
            poles.push(ThetaPole {
                term,
                classical_factor: factor,
                contracted_factor,
            });
        }
        out.push(ThetaTerm {
            sign: theta.sign(),
            shift,
            theta,
            poles,
        });
    }
    Ok(out)
}

/// Meromorphic part Σᵢ (dominant term i) of a quantum-vertex line.
pub fn meromorphic_part(chain: &ChainSpec, p: &FourVector) -> Result<DiracMatrix> {
    let mut acc = DiracMatrix::zero();
    for i in 0..=chain.len() {
        acc += DominantSingularity::new(chain, i)?.eval(p)?;
    }
    Ok(acc)
}

pub fn expansion_total(terms: &[ThetaTerm]) -> DiracMatrix {
    terms.iter().map(ThetaTerm::value).sum()
}

pub fn expansion_contracted_total(terms: &[ThetaTerm]) -> DiracMatrix {
    terms.iter().map(ThetaTerm::contracted_value).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::VertexSpec;

    fn v(x: [f64; 4]) -> FourVector {
        FourVector::real(x)
    }

    fn mu(i: usize) -> LorentzIndex {
        LorentzIndex::new(i).unwrap()
    }

    fn two_vertex(kind: VertexKind) -> ChainSpec {
        ChainSpec::new(
            1.0,
            0.0,
            vec![
                VertexSpec::new(kind, v([0.3, 0.1, 0.05, -0.1]), mu(1)),
                VertexSpec::new(kind, v([0.25, -0.05, 0.1, 0.08]), mu(2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bare_line_is_single_term() {
        let chain = ChainSpec::bare(1.0).unwrap();
        let p = v([1.4, 0.2, 0.0, 0.3]);
        let terms = pole_terms(&chain, &p).unwrap();
        assert_eq!(terms.len(), 1);
        let direct = chain.eval(&p, &FourVector::ZERO).unwrap();
        assert!(DiracMatrix::relative_distance(&terms[0].value(), &direct) < 1e-14);
    }

    #[test]
    fn two_vertex_decomposition_is_complete() {
        let chain = two_vertex(VertexKind::PlainGamma);
        let p = v([1.3, 0.2, -0.1, 0.15]);
        assert!(decomposition_residual(&chain, &p, SignConvention::AllPositive).unwrap() < 1e-10);
        assert!(decomposition_residual(&chain, &p, SignConvention::Provisional).unwrap() > 1e-3);
    }

    #[test]
    fn zero_photon_gives_degenerate_poles() {
        let chain = ChainSpec::new(1.0, 0.0, vec![VertexSpec::plain(FourVector::ZERO, mu(0))])
            .unwrap();
        assert!(matches!(
            pole_terms(&chain, &v([1.3, 0.0, 0.0, 0.0])),
            Err(Error::DegeneratePoles { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn reduced_vertex_is_transverse() {
        let p = v([1.2, 0.3, -0.2, 0.5]);
        let k = v([0.4, 0.1, 0.3, -0.2]);
        let contracted: DiracMatrix = LorentzIndex::ALL
            .iter()
            .map(|&m| reduced_vertex(&p, &k, m).unwrap().scale(k[m.get()]))
            .sum();
        assert!(contracted.norm_max() < 1e-14);
    }

    #[test]
    fn classical_factor_contracts_to_i() {
        let p = v([1.2, 0.3, -0.2, 0.5]);
        let k = v([0.4, 0.1, 0.3, -0.2]);
        assert!((contracted_classical_factor(&p, &k) - I).norm() < 1e-15);
    }

    #[test]
    fn two_vertex_middle_residue_factorizes() {
        let chain = two_vertex(VertexKind::Quantum);
        let dom = DominantSingularity::new(&chain, 1).unwrap();
        let p1 = FourVector::on_shell(1.0, [0.1, 0.2, -0.1]);
        let vs = chain.vertices();
        let g1 = reduced_vertex(&p1, &vs[0].momentum, vs[0].index).unwrap();
        let g2 = reduced_vertex(&p1, &vs[1].momentum, vs[1].index).unwrap();
        let hand = (slash(&vs[0].momentum) * g1).scale(-I)
            * numerator(&p1, 1.0)
            * (g2 * slash(&vs[1].momentum)).scale(I);
        let got = dom.residue_numerator(&p1).unwrap();
        assert!(DiracMatrix::relative_distance(&got, &hand) < 1e-12);
    }

    #[test]
    fn theta_signs_balance() {
        for n in 1..5 {
            let s: f64 = ThetaVector::enumerate(n).iter().map(ThetaVector::sign).sum();
            assert_eq!(s, 0.0);
        }
        let t = ThetaVector::enumerate(1);
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].sign(), t[1].sign()), (1.0, -1.0));
    }

    #[test]
    fn symmetric_numerator_drops_out() {
        let out = symmetric_contraction(&v([1.1, 0.2, 0.3, 0.4]), &v([0.3, 0.1, 0.0, 0.2]));
        assert!(out.iter().all(|c| c.norm() == 0.0));
    }
}
