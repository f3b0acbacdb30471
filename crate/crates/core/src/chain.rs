//! Generalized propagators: a charged line carrying an ordered list of soft
//! photon vertices, evaluated in momentum space as a product
//!
//! ```text
//! i/(p̸+a̸−m) Γ₁ i/(p̸+a̸+k̸₁−m) Γ₂ ⋯ Γₙ i/(p̸+a̸+k̸₁+⋯+k̸ₙ−m)
//! ```
//!
//! Each propagator is represented as i(q̸+m)/(q²−m²+iε). With ε = 0 a guard
//! band rejects points with |q²−m²| < `guard`·m².

use crate::algebra::{
    dirac_inverse, gamma_lower, slash, DiracMatrix, FourVector, LorentzIndex, C64, I,
};
use crate::error::{Error, Result};
use crate::jet::{propagator_jet, MatrixJet};

/// Default relative guard band around the mass shell for ε = 0.
pub const DEFAULT_GUARD: f64 = 1e-8;

/// How a vertex couples downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// Quantum coupling, handled by the Q̃ operator.
    Quantum,
    /// Classical coupling at a single position, handled by C̃.
    Classical,
    /// Bare γ_μ, no insertion operator.
    PlainGamma,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexSpec {
    pub kind: VertexKind,
    pub momentum: FourVector,
    pub index: LorentzIndex,
}

impl VertexSpec {
    pub fn new(kind: VertexKind, momentum: FourVector, index: LorentzIndex) -> Self {
        Self { kind, momentum, index }
    }

    pub fn quantum(momentum: FourVector, index: LorentzIndex) -> Self {
        Self::new(VertexKind::Quantum, momentum, index)
    }

    pub fn plain(momentum: FourVector, index: LorentzIndex) -> Self {
        Self::new(VertexKind::PlainGamma, momentum, index)
    }
}

/// Matrix placed at a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexFactor {
    /// γ_μ (lower index).
    Gamma(LorentzIndex),
    /// v̸ = v^σ γ_σ.
    Slash(FourVector),
    Matrix(DiracMatrix),
}

impl VertexFactor {
    pub fn matrix(&self) -> DiracMatrix {
        match self {
            VertexFactor::Gamma(mu) => gamma_lower(*mu),
            VertexFactor::Slash(v) => slash(v),
            VertexFactor::Matrix(m) => *m,
        }
    }
}

/// Ordered generalized-propagator line.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    mass: f64,
    epsilon: f64,
    guard: f64,
    vertices: Vec<VertexSpec>,
}

impl ChainSpec {
    pub fn new(mass: f64, epsilon: f64, vertices: Vec<VertexSpec>) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be non-negative, got {epsilon}"
            )));
        }
        Ok(Self {
            mass,
            epsilon,
            guard: DEFAULT_GUARD,
            vertices,
        })
    }

    /// Bare line with no vertices.
    pub fn bare(mass: f64) -> Result<Self> {
        Self::new(mass, 0.0, Vec::new())
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn vertices(&self) -> &[VertexSpec] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Same line with different vertex list.
    pub fn with_vertices(&self, vertices: Vec<VertexSpec>) -> Self {
        Self {
            vertices,
            ..self.clone()
        }
    }

    /// Same vertex kinds and indices with momenta scaled by `t` where `mask[j]`.
    pub fn scale_momenta(&self, t: f64, mask: &[bool]) -> Self {
        let vertices = self
            .vertices
            .iter()
            .zip(mask)
            .map(|(v, &s)| VertexSpec {
                momentum: if s { v.momentum * t } else { v.momentum },
                ..*v
            })
            .collect();
        self.with_vertices(vertices)
    }

    /// Cumulative photon momenta K_i = k₁+⋯+k_i for i = 0..=n.
    pub fn cumulative_momenta(&self) -> Vec<FourVector> {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        let mut acc = FourVector::ZERO;
        out.push(acc);
        for v in &self.vertices {
            acc += v.momentum;
            out.push(acc);
        }
        out
    }

    /// Prefix momenta p_i = p + k₁ + ⋯ + k_i for i = 0..=n.
    pub fn prefix_momenta(&self, p: &FourVector) -> Vec<FourVector> {
        self.cumulative_momenta().into_iter().map(|k| *p + k).collect()
    }

    /// Default vertex factors γ_{μ_j} from the stored indices.
    pub fn gamma_factors(&self) -> Vec<VertexFactor> {
        self.vertices.iter().map(|v| VertexFactor::Gamma(v.index)).collect()
    }

    pub(crate) fn check_off_shell(&self, q: &FourVector, prefix: usize) -> Result<()> {
        check_off_shell(q, self.mass, self.epsilon, self.guard, prefix)
    }

    /// Ordered product at base momentum p + a with the stored vertex indices.
    pub fn eval(&self, p: &FourVector, a: &FourVector) -> Result<DiracMatrix> {
        self.eval_with(&(*p + *a), &self.gamma_factors())
    }

    /// Ordered product with explicit vertex factors.
    pub fn eval_with(&self, p: &FourVector, factors: &[VertexFactor]) -> Result<DiracMatrix> {
        Ok(self.jet_with(p, factors, &[])?.value())
    }

    /// Jet of the ordered product along `dirs` (see [`crate::jet`]).
    pub fn jet_with(
        &self,
        p: &FourVector,
        factors: &[VertexFactor],
        dirs: &[FourVector],
    ) -> Result<MatrixJet> {
        if factors.len() != self.vertices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} vertex factors for a chain of {} vertices",
                factors.len(),
                self.vertices.len()
            )));
        }
        let prefixes = self.prefix_momenta(p);
        for (i, q) in prefixes.iter().enumerate() {
            self.check_off_shell(q, i)?;
        }
        let mut acc = propagator_jet(&prefixes[0], self.mass, self.epsilon, dirs);
        for (factor, q) in factors.iter().zip(&prefixes[1..]) {
            acc = acc
                .mul_const(&factor.matrix())
                .mul(&propagator_jet(q, self.mass, self.epsilon, dirs));
        }
        Ok(acc)
    }
}

pub(crate) fn check_off_shell(
    q: &FourVector,
    mass: f64,
    epsilon: f64,
    guard: f64,
    prefix: usize,
) -> Result<()> {
    let distance = (q.square() - mass * mass).norm();
    if epsilon == 0.0 && distance < guard * mass * mass {
        return Err(Error::OnShell { prefix, distance });
    }
    Ok(())
}

/// i(p̸ + m)/(p² − m² + iε).
pub fn propagator(p: &FourVector, mass: f64, epsilon: f64) -> Result<DiracMatrix> {
    check_off_shell(p, mass, epsilon, DEFAULT_GUARD, 0)?;
    let num = slash(p) + DiracMatrix::scalar(C64::new(mass, 0.0));
    let den = p.square() - mass * mass + I * epsilon;
    Ok(num.scale(I / den))
}

/// i(p̸ − m′)⁻¹ for a complex mass m′ = m − iε′, by explicit matrix inversion.
///
/// Matches [`propagator`] with ε = 2mε′ + ε′² in the denominator; the
/// numerators differ by iε′·i, i.e. O(ε′).
pub fn propagator_complex_mass(p: &FourVector, mass: C64) -> Result<DiracMatrix> {
    let m = slash(p) - DiracMatrix::scalar(mass);
    Ok(dirac_inverse(&m)?.scale(I))
}

/// (p̸ − m)⁻¹, the resolvent without the factor i.
pub fn resolvent(p: &FourVector, mass: f64) -> Result<DiracMatrix> {
    dirac_inverse(&(slash(p) - DiracMatrix::scalar(C64::new(mass, 0.0))))
}

/// Ordered product i/(p̸+a̸−m) γ_{σ₁} ⋯ with the chain's stored indices.
pub fn eval_chain(chain: &ChainSpec, p: &FourVector, a: &FourVector) -> Result<DiracMatrix> {
    chain.eval(p, a)
}
