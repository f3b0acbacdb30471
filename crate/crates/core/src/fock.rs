//! Displacement operators on a truncated multi-mode Fock space.
//!
//! Each mode carries D(α) = exp(α a† − α* a) restricted to occupations
//! 0..=n_max, computed from the eigendecomposition of the Hermitian matrix
//! i(α a† − α* a). The multi-mode operator is the Kronecker product of the
//! single-mode factors; it is never formed densely except on request.

use crate::current::CoherentStateData;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct FockConfig {
    /// Occupation cutoff per mode.
    pub n_max: usize,
    /// Largest admissible total dimension (n_max + 1)^modes.
    pub max_dimension: usize,
    /// Tolerance for the declared truncation bound and the unitarity defect.
    pub tolerance: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            n_max: 12,
            max_dimension: 4096,
            tolerance: 1e-8,
        }
    }
}

/// Prefactor c of the per-mode bound c·|α|^{n+1}/√((n+1)!).
pub const TRUNCATION_CONSTANT: f64 = 2.0;

/// c·|α|^{n+1}/√((n+1)!)
pub fn truncation_bound(alpha: f64, n_max: usize) -> f64 {
    let mut term = TRUNCATION_CONSTANT;
    for j in 1..=n_max + 1 {
        term *= alpha / (j as f64).sqrt();
    }
    term
}

/// Annihilation operator on occupations 0..=n_max.
pub fn annihilation(n_max: usize) -> DMatrix<C64> {
    let d = n_max + 1;
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// exp(α a† − α* a) on the truncated space.
pub fn displacement(alpha: C64, n_max: usize) -> DMatrix<C64> {
    let a = annihilation(n_max);
    let ad = a.adjoint();
    let g = ad * alpha - a * alpha.conj();
    let h = g * C64::new(0.0, 1.0);
    // H is Hermitian: enforce exactly before the eigensolver
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, -l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator-norm bound via the Frobenius norm.
fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityReport {
    pub modes: usize,
    pub n_max: usize,
    pub dimension: usize,
    /// Upper bound on ‖U†U − I‖ from Π_j(1 + ‖D_j†D_j − I‖) − 1.
    pub unitarity_defect: f64,
    /// |‖U|vac⟩‖ − 1|
    pub vacuum_norm_defect: f64,
    /// ⟨vac|U|vac⟩ including the phase e^{iΦ}.
    pub vacuum_overlap: C64,
    /// e^{−Σ|α|²/2 + iΦ}
    pub expected_overlap: C64,
    pub overlap_error: f64,
    /// Σ_j c·|α_j|^{n+1}/√((n+1)!)
    pub truncation_bound: f64,
}

impl UnitarityReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        let slack = 1e-13;
        self.unitarity_defect < tolerance
            && self.vacuum_norm_defect <= self.truncation_bound + slack
            && self.overlap_error <= self.truncation_bound + slack
    }
}

/// U(L) restricted to a few transverse modes.
#[derive(Clone, Debug)]
pub struct TruncatedDisplacement {
    pub factors: Vec<DMatrix<C64>>,
    pub phase: f64,
    pub report: UnitarityReport,
}

impl TruncatedDisplacement {
    /// Dense Kronecker product e^{iΦ} D₁ ⊗ ⋯ ⊗ D_M.
    pub fn dense(&self) -> DMatrix<C64> {
        let mut u = DMatrix::from_element(1, 1, C64::new(0.0, self.phase).exp());
        for f in &self.factors {
            u = u.kronecker(f);
        }
        u
    }

    /// U|vac⟩ as a product vector, mode 0 most significant.
    pub fn vacuum_image(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, self.phase).exp()];
        for f in &self.factors {
            let col = f.column(0);
            v = v.iter().flat_map(|x| col.iter().map(move |c| x * c)).collect();
        }
        v
    }
}

pub fn truncated_u(amplitudes: &[C64], phase: f64, cfg: &FockConfig) -> Result<TruncatedDisplacement> {
    let d = cfg.n_max + 1;
    let dimension = (0..amplitudes.len()).try_fold(1usize, |acc, _| acc.checked_mul(d));
    let dimension = match dimension {
        Some(dim) if dim <= cfg.max_dimension => dim,
        _ => {
            return Err(Error::FockDimension {
                dim: dimension.unwrap_or(usize::MAX),
                limit: cfg.max_dimension,
            })
        }
    };
    let bound: f64 = amplitudes
        .iter()
        .map(|a| truncation_bound(a.norm(), cfg.n_max))
        .sum();
    if bound > cfg.tolerance {
        return Err(Error::TruncationInsufficient {
            bound,
            tolerance: cfg.tolerance,
        });
    }
    let factors: Vec<DMatrix<C64>> = amplitudes.iter().map(|a| displacement(*a, cfg.n_max)).collect();
    let identity = DMatrix::<C64>::identity(d, d);
    let mut defect_product = 1.0;
    let mut norm = 1.0;
    let mut overlap = C64::new(0.0, phase).exp();
    for f in &factors {
        defect_product *= 1.0 + frobenius(&(f.adjoint() * f - &identity));
        norm *= f.column(0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        overlap *= f[(0, 0)];
    }
    let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let expected = C64::new(-0.5 * total, phase).exp();
    let report = UnitarityReport {
        modes: amplitudes.len(),
        n_max: cfg.n_max,
        dimension,
        unitarity_defect: defect_product - 1.0,
        vacuum_norm_defect: (norm - 1.0).abs(),
        vacuum_overlap: overlap,
        expected_overlap: expected,
        overlap_error: (overlap - expected).norm(),
        truncation_bound: bound,
    };
    Ok(TruncatedDisplacement {
        factors,
        phase,
        report,
    })
}

/// U(L) on the selected modes of the coherent-state data.
pub fn truncated_u_for_modes(
    data: &CoherentStateData,
    modes: &[usize],
    cfg: &FockConfig,
) -> Result<TruncatedDisplacement> {
    let amplitudes = modes
        .iter()
        .map(|&m| {
            data.amplitudes
                .get(m)
                .map(|a| a.alpha)
                .ok_or(Error::InvalidIndex(m))
        })
        .collect::<Result<Vec<_>>>()?;
    truncated_u(&amplitudes, data.phase, cfg)
}

/// Largest entry of U†U − I for a dense matrix.
pub fn dense_unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - DMatrix::<C64>::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_is_identity() {
        let t = truncated_u(&[C64::new(0.0, 0.0); 2], 0.0, &FockConfig::default()).unwrap();
        let u = t.dense();
        let n = u.nrows();
        assert_eq!(n, 169);
        assert!(max_abs(&(u - DMatrix::<C64>::identity(n, n))) < 1e-15);
    }

    #[test]
    fn dimension_limit_is_enforced() {
        let amps = vec![C64::new(0.0, 0.0); 4];
        assert!(matches!(
            truncated_u(&amps, 0.0, &FockConfig::default()),
            Err(Error::FockDimension { dim: 28561, limit: 4096 })
        ));
    }

    #[test]
    fn large_amplitude_needs_more_levels() {
        assert!(matches!(
            truncated_u(&[C64::new(2.0, 0.0)], 0.0, &FockConfig::default()),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn single_mode_half_amplitude() {
        let alpha = C64::from_polar(0.5, 0.7);
        let t = truncated_u(&[alpha], 0.3, &FockConfig::default()).unwrap();
        assert!(t.report.unitarity_defect < 1e-8);
        assert!(t.report.passes(1e-8), "{:?}", t.report);
        assert!(dense_unitarity_defect(&t.dense()) < 1e-12);
    }

    #[test]
    fn vacuum_image_is_product_of_columns() {
        let amps = [C64::new(0.3, 0.1), C64::new(-0.2, 0.25)];
        let t = truncated_u(&amps, 0.0, &FockConfig::default()).unwrap();
        let dense = t.dense();
        let v = t.vacuum_image();
        for (i, x) in v.iter().enumerate() {
            assert!((dense[(i, 0)] - x).norm() < 1e-14);
        }
    }
}
