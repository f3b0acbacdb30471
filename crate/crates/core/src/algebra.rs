//! Minkowski vectors and 4×4 spinor-space matrices.
//!
//! Metric signature is (+,−,−,−). Gamma matrices are in the Dirac (standard)
//! representation and carry an upper index: `gamma(mu)` is γ^μ, so that
//! {γ^μ, γ^ν} = 2 g^{μν}. Vertex factors use the lowered γ_μ = g_{μν} γ^ν.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Diagonal of g_{μν} (equal to g^{μν} for this signature).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Validated Lorentz index in 0..=3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LorentzIndex(u8);

impl LorentzIndex {
    pub const ALL: [LorentzIndex; 4] = [Self(0), Self(1), Self(2), Self(3)];

    pub fn new(mu: usize) -> Result<Self> {
        if mu < 4 {
            Ok(Self(mu as u8))
        } else {
            Err(Error::InvalidIndex(mu))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn metric(self) -> f64 {
        METRIC[self.get()]
    }
}

impl TryFrom<usize> for LorentzIndex {
    type Error = Error;

    fn try_from(mu: usize) -> Result<Self> {
        Self::new(mu)
    }
}

/// Contravariant 4-vector v^μ with complex components.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FourVector(pub [C64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([ZERO; 4]);

    pub fn real(v: [f64; 4]) -> Self {
        Self(v.map(|x| C64::new(x, 0.0)))
    }

    pub fn new(components: [C64; 4]) -> Self {
        Self(components)
    }

    /// Unit vector along the μ axis (upper component 1).
    pub fn unit(mu: LorentzIndex) -> Self {
        let mut v = [ZERO; 4];
        v[mu.get()] = ONE;
        Self(v)
    }

    /// On-shell vector with the given spatial part and mass: v⁰ = sqrt(m² + |v⃗|²).
    pub fn on_shell(mass: f64, spatial: [f64; 3]) -> Self {
        let e = (mass * mass + spatial.iter().map(|x| x * x).sum::<f64>()).sqrt();
        Self::real([e, spatial[0], spatial[1], spatial[2]])
    }

    pub fn component(&self, mu: usize) -> Result<C64> {
        Ok(self.0[LorentzIndex::new(mu)?.get()])
    }

    /// Lowered component v_μ = g_{μν} v^ν.
    #[inline]
    pub fn lower(&self, mu: LorentzIndex) -> C64 {
        self.0[mu.get()] * mu.metric()
    }

    pub fn dot(&self, other: &FourVector) -> C64 {
        minkowski(self, other)
    }

    pub fn square(&self) -> C64 {
        minkowski(self, self)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|x| x.conj()))
    }

    /// Real parts of the components.
    pub fn re(&self) -> [f64; 4] {
        self.0.map(|x| x.re)
    }

    /// Largest component modulus.
    pub fn norm_max(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Σ_μ |v^μ|.
    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|x| x.norm()).sum()
    }

    /// Euclidean length of the real parts.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<usize> for FourVector {
    type Output = C64;

    fn index(&self, mu: usize) -> &C64 {
        &self.0[mu]
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for FourVector {
    type Output = FourVector;

    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;

    fn neg(self) -> FourVector {
        FourVector(self.0.map(|x| -x))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;

    fn mul(self, s: f64) -> FourVector {
        self.scale_real(s)
    }
}

/// u⁰v⁰ − u¹v¹ − u²v² − u³v³ (bilinear, no conjugation).
pub fn minkowski(u: &FourVector, v: &FourVector) -> C64 {
    u.0[0] * v.0[0] - u.0[1] * v.0[1] - u.0[2] * v.0[2] - u.0[3] * v.0[3]
}

/// 4×4 complex matrix acting on Dirac spinors.
#[derive(Clone, Copy, PartialEq)]
pub struct DiracMatrix(pub [[C64; 4]; 4]);

impl fmt::Debug for DiracMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DiracMatrix[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for x in row {
                write!(f, "{:>+.6e}{:+.6e}i  ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Default for DiracMatrix {
    fn default() -> Self {
        Self::zero()
    }
}

impl DiracMatrix {
    pub fn zero() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(s: C64) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = s;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        Self(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn adjoint(&self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].conj())
        }))
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Anticommutator AB + BA.
    pub fn anticommutator(&self, other: &DiracMatrix) -> DiracMatrix {
        *self * *other + *other * *self
    }

    pub fn commutator(&self, other: &DiracMatrix) -> DiracMatrix {
        *self * *other - *other * *self
    }

    /// ‖a − b‖_max / max(1, ‖b‖_max).
    pub fn relative_distance(a: &DiracMatrix, b: &DiracMatrix) -> f64 {
        (*a - *b).norm_max() / b.norm_max().max(1.0)
    }
}

impl Add for DiracMatrix {
    type Output = DiracMatrix;

    fn add(self, rhs: DiracMatrix) -> DiracMatrix {
        DiracMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

impl AddAssign for DiracMatrix {
    fn add_assign(&mut self, rhs: DiracMatrix) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for DiracMatrix {
    type Output = DiracMatrix;

    fn sub(self, rhs: DiracMatrix) -> DiracMatrix {
        DiracMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])
        }))
    }
}

impl Neg for DiracMatrix {
    type Output = DiracMatrix;

    fn neg(self) -> DiracMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for DiracMatrix {
    type Output = DiracMatrix;

    fn mul(self, rhs: DiracMatrix) -> DiracMatrix {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out[i][j] += a * rhs.0[k][j];
                }
            }
        }
        DiracMatrix(out)
    }
}

impl Mul<C64> for DiracMatrix {
    type Output = DiracMatrix;

    fn mul(self, s: C64) -> DiracMatrix {
        self.scale(s)
    }
}

impl std::iter::Sum for DiracMatrix {
    fn sum<It: Iterator<Item = DiracMatrix>>(iter: It) -> Self {
        iter.fold(DiracMatrix::zero(), |a, b| a + b)
    }
}

#[rustfmt::skip]
const GAMMA: [[[(f64, f64); 4]; 4]; 4] = {
    const O: (f64, f64) = (0.0, 0.0);
    const P: (f64, f64) = (1.0, 0.0);
    const M: (f64, f64) = (-1.0, 0.0);
    const PI: (f64, f64) = (0.0, 1.0);
    const MI: (f64, f64) = (0.0, -1.0);
    [
        // γ⁰ = diag(1, 1, −1, −1)
        [[P, O, O, O], [O, P, O, O], [O, O, M, O], [O, O, O, M]],
        // γ^k = [[0, σ_k], [−σ_k, 0]]
        [[O, O, O, P], [O, O, P, O], [O, M, O, O], [M, O, O, O]],
        [[O, O, O, MI], [O, O, PI, O], [O, PI, O, O], [MI, O, O, O]],
        [[O, O, P, O], [O, O, O, M], [M, O, O, O], [O, P, O, O]],
    ]
};

/// γ^μ in the Dirac representation.
pub fn gamma(mu: LorentzIndex) -> DiracMatrix {
    let g = &GAMMA[mu.get()];
    DiracMatrix(std::array::from_fn(|i| {
        std::array::from_fn(|j| C64::new(g[i][j].0, g[i][j].1))
    }))
}

/// γ_μ = g_{μν} γ^ν.
pub fn gamma_lower(mu: LorentzIndex) -> DiracMatrix {
    gamma(mu).scale_real(mu.metric())
}

/// v̸ = γ^μ g_{μν} v^ν.
pub fn slash(v: &FourVector) -> DiracMatrix {
    LorentzIndex::ALL
        .iter()
        .map(|&mu| gamma(mu).scale(v.lower(mu)))
        .sum()
}

/// Largest accepted ‖M‖∞·‖M⁻¹‖∞ before a matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Inverse by Gauss–Jordan elimination with partial pivoting.
///
/// Fails when the infinity-norm condition estimate exceeds [`MAX_CONDITION`]
/// or the residual ‖M·M⁻¹ − I‖ exceeds 1e−12, which for the propagator
/// denominators means the evaluation point is on or too close to a pole.
pub fn dirac_inverse(m: &DiracMatrix) -> Result<DiracMatrix> {
    let scale = m.norm_inf();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularMatrix { condition: f64::INFINITY });
    }
    let mut a = m.0;
    let mut inv = DiracMatrix::identity().0;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() <= f64::EPSILON * scale {
            return Err(Error::SingularMatrix { condition: f64::INFINITY });
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col].inv();
        for j in 0..4 {
            a[col][j] *= d;
            inv[col][j] *= d;
        }
        for r in 0..4 {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == ZERO {
                continue;
            }
            for j in 0..4 {
                let (ac, ic) = (a[col][j], inv[col][j]);
                a[r][j] -= f * ac;
                inv[r][j] -= f * ic;
            }
        }
    }
    let inv = DiracMatrix(inv);
    let condition = scale * inv.norm_inf();
    if condition > MAX_CONDITION {
        return Err(Error::SingularMatrix { condition });
    }
    let residual = (*m * inv - DiracMatrix::identity()).norm_max();
    if residual > 1e-12 {
        return Err(Error::SingularMatrix { condition });
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(mu: usize) -> LorentzIndex {
        LorentzIndex::new(mu).unwrap()
    }

    #[test]
    fn clifford_relation_holds_for_all_pairs() {
        for mu in LorentzIndex::ALL {
            for nu in LorentzIndex::ALL {
                let lhs = gamma(mu).anticommutator(&gamma(nu));
                let g = if mu == nu { 2.0 * mu.metric() } else { 0.0 };
                let rhs = DiracMatrix::scalar(C64::new(g, 0.0));
                assert!((lhs - rhs).norm_max() < 1e-14, "mu={mu:?} nu={nu:?}");
            }
        }
    }

    #[test]
    fn gamma_zero_hermitian_spatial_antihermitian() {
        assert_eq!(gamma(idx(0)).adjoint(), gamma(idx(0)));
        for k in 1..4 {
            assert_eq!(gamma(idx(k)).adjoint(), -gamma(idx(k)));
        }
    }

    #[test]
    fn index_out_of_range_is_rejected() {
        assert!(matches!(LorentzIndex::new(4), Err(Error::InvalidIndex(4))));
        assert!(FourVector::real([1.0; 4]).component(7).is_err());
    }

    #[test]
    fn minkowski_examples() {
        let t = FourVector::real([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(minkowski(&t, &t), ONE);
        let l = FourVector::real([1.0, 1.0, 0.0, 0.0]);
        assert_eq!(minkowski(&l, &l), ZERO);
        let u = FourVector::real([3.0, 2.0, 1.0, 0.0]);
        assert_eq!(u.square(), C64::new(4.0, 0.0));
    }

    #[test]
    fn slash_examples() {
        assert_eq!(slash(&FourVector::real([1.0, 0.0, 0.0, 0.0])), gamma(idx(0)));
        assert_eq!(slash(&FourVector::real([0.0, 0.0, 0.0, 1.0])), -gamma(idx(3)));
    }

    #[test]
    fn inverse_of_scalar_matrix() {
        let m = DiracMatrix::scalar(C64::new(2.0, 0.0));
        let inv = dirac_inverse(&m).unwrap();
        assert!((inv - DiracMatrix::scalar(C64::new(0.5, 0.0))).norm_max() < 1e-15);
    }

    #[test]
    fn inverse_of_offshell_dirac_operator() {
        // (p̸+m)(p̸−m) = (p²−m²) I with p² = 4, m = 1.
        let p = FourVector::real([2.0, 0.0, 0.0, 0.0]);
        let m = DiracMatrix::identity();
        let inv = dirac_inverse(&(slash(&p) - m)).unwrap();
        let expected = (slash(&p) + m).scale_real(1.0 / 3.0);
        assert!((inv - expected).norm_max() < 1e-14);
    }

    #[test]
    fn on_shell_dirac_operator_is_singular() {
        let p = FourVector::real([1.0, 0.0, 0.0, 0.0]);
        let err = dirac_inverse(&(slash(&p) - DiracMatrix::identity())).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
        let boosted = FourVector::on_shell(1.0, [0.3, -0.7, 0.2]);
        assert!(dirac_inverse(&(slash(&boosted) - DiracMatrix::identity())).is_err());
    }
}
