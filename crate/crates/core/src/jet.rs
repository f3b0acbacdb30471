//! Multilinear Taylor jets in `r` formal directions ε₁…ε_r with ε_j² = 0.
//!
//! Coefficient `S` (a bitmask over directions) of the jet of f(p + Σ ε_j v_j)
//! is the mixed directional derivative Π_{j∈S} (v_j·∂_p) f(p). Products of
//! propagators stay exact because each factor is rational in p.

use crate::algebra::{slash, DiracMatrix, FourVector, C64, I, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarJet(pub Vec<C64>);

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixJet(pub Vec<DiracMatrix>);

fn check_len(len: usize) -> usize {
    assert!(len.is_power_of_two(), "jet length must be 2^r");
    len
}

impl ScalarJet {
    pub fn constant(x: C64, directions: usize) -> Self {
        let mut v = vec![ZERO; 1 << directions];
        v[0] = x;
        Self(v)
    }

    /// Multiplicative inverse; requires a non-zero constant term.
    pub fn inverse(&self) -> Self {
        let n = check_len(self.0.len());
        let inv0 = self.0[0].inv();
        let mut out = vec![ZERO; n];
        out[0] = inv0;
        for s in 1..n {
            // Σ over proper subsets t of s: d[s \ t] · inv[t]
            let mut acc = ZERO;
            let mut t = (s - 1) & s;
            loop {
                acc += self.0[s & !t] * out[t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            out[s] = -inv0 * acc;
        }
        Self(out)
    }
}

impl MatrixJet {
    pub fn constant(m: DiracMatrix, directions: usize) -> Self {
        let mut v = vec![DiracMatrix::zero(); 1 << directions];
        v[0] = m;
        Self(v)
    }

    pub fn directions(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    /// Highest mixed derivative, Π_j (v_j·∂) f.
    pub fn top(&self) -> DiracMatrix {
        *self.0.last().expect("non-empty jet")
    }

    pub fn value(&self) -> DiracMatrix {
        self.0[0]
    }

    pub fn mul(&self, rhs: &MatrixJet) -> MatrixJet {
        let n = check_len(self.0.len());
        assert_eq!(n, rhs.0.len());
        let mut out = vec![DiracMatrix::zero(); n];
        for (s, slot) in out.iter_mut().enumerate() {
            let mut t = s;
            loop {
                *slot += self.0[t] * rhs.0[s & !t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
        }
        MatrixJet(out)
    }

    /// Right-multiplication by a constant matrix.
    pub fn mul_const(&self, m: &DiracMatrix) -> MatrixJet {
        MatrixJet(self.0.iter().map(|a| *a * *m).collect())
    }

    pub fn mul_scalar_jet(&self, rhs: &ScalarJet) -> MatrixJet {
        let n = check_len(self.0.len());
        assert_eq!(n, rhs.0.len());
        let mut out = vec![DiracMatrix::zero(); n];
        for (s, slot) in out.iter_mut().enumerate() {
            let mut t = s;
            loop {
                let c = rhs.0[s & !t];
                if c != ZERO {
                    *slot += self.0[t].scale(c);
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
        }
        MatrixJet(out)
    }
}

/// Jet of i(q̸ + m)/(q² − m² + iε) at q along the given directions.
pub fn propagator_jet(q: &FourVector, mass: f64, epsilon: f64, dirs: &[FourVector]) -> MatrixJet {
    let r = dirs.len();
    let n = 1 << r;
    let mut num = vec![DiracMatrix::zero(); n];
    num[0] = (slash(q) + DiracMatrix::scalar(C64::new(mass, 0.0))).scale(I);
    let mut den = vec![ZERO; n];
    den[0] = q.square() - mass * mass + I * epsilon;
    for (j, v) in dirs.iter().enumerate() {
        num[1 << j] = slash(v).scale(I);
        den[1 << j] = q.dot(v) * 2.0;
        for (l, w) in dirs.iter().enumerate().skip(j + 1) {
            den[(1 << j) | (1 << l)] = v.dot(w) * 2.0;
        }
    }
    MatrixJet(num).mul_scalar_jet(&ScalarJet(den).inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_inverse_is_multiplicative_inverse() {
        let d = ScalarJet(vec![
            C64::new(2.0, 0.5),
            C64::new(0.3, 0.0),
            C64::new(-1.0, 0.2),
            C64::new(0.7, -0.1),
        ]);
        let inv = d.inverse();
        // (d · inv)[s] = δ_{s,0}
        for s in 0..4usize {
            let mut acc = ZERO;
            for t in 0..4usize {
                if t & s == t {
                    acc += d.0[t] * inv.0[s & !t];
                }
            }
            let expected = if s == 0 { 1.0 } else { 0.0 };
            assert!((acc - expected).norm() < 1e-15, "s={s}");
        }
    }

    #[test]
    fn first_derivative_matches_central_difference() {
        let q = FourVector::real([1.7, 0.2, -0.4, 0.3]);
        let v = FourVector::real([0.3, 0.1, 0.5, -0.2]);
        let jet = propagator_jet(&q, 1.0, 0.0, &[v]);
        let h = 1e-5;
        let fwd = propagator_jet(&(q + v * h), 1.0, 0.0, &[]).value();
        let bwd = propagator_jet(&(q - v * h), 1.0, 0.0, &[]).value();
        let fd = (fwd - bwd).scale_real(0.5 / h);
        assert!((jet.top() - fd).norm_max() < 1e-8);
    }

    #[test]
    fn mixed_second_derivative_matches_finite_differences() {
        let q = FourVector::real([1.9, 0.4, 0.1, -0.3]);
        let v = FourVector::real([0.2, 0.0, 0.3, 0.1]);
        let w = FourVector::real([-0.1, 0.4, 0.0, 0.2]);
        let jet = propagator_jet(&q, 1.0, 0.0, &[v, w]);
        let h = 1e-4;
        let f = |a: f64, b: f64| propagator_jet(&(q + v * a + w * b), 1.0, 0.0, &[]).value();
        let fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)).scale_real(0.25 / (h * h));
        assert!((jet.top() - fd).norm_max() < 1e-6, "{:?}", jet.top() - fd);
    }
}
