//! Independent reference computations for derived values.

use num_complex::Complex64 as C64;
use softqed::algebra::{gamma, gamma_lower, slash, DiracMatrix, FourVector, LorentzIndex};
use softqed::chain::{propagator, ChainSpec, VertexFactor, VertexSpec};
use softqed::decomposition::{
    classical_meromorphic_expansion, expansion_total, meromorphic_part, pole_terms,
};
use softqed::fock::{annihilation, displacement};
use softqed::insertion::{apply_q_tilde, derivative_identity_residual, InsertionConfig};
use softqed::quadrature::GaussLegendre;

const M: f64 = 1.0;

fn idx(mu: usize) -> LorentzIndex {
    LorentzIndex::new(mu).unwrap()
}

fn rel(a: &DiracMatrix, b: &DiracMatrix) -> f64 {
    DiracMatrix::relative_distance(a, b)
}

/// Q̃_μ at the single vertex of an n = 1 line, from
/// Q̃_μ = P_μ(p) + ∫₀^∞ dλ ∂_μ [P with vertex k̸](p + λk), the first term
/// being the λ-integral of a total derivative. The remaining integral uses
/// fourth-order central differences and λ = t/(1 − t).
fn q_tilde_oracle(k: &FourVector, mu: LorentzIndex, p: &FourVector) -> DiracMatrix {
    let line = ChainSpec::new(M, 0.0, vec![VertexSpec::plain(*k, mu)]).unwrap();
    let p_mu = line.eval_with(p, &[VertexFactor::Gamma(mu)]).unwrap();
    let kslash = [VertexFactor::Matrix(slash(k))];
    let e = FourVector::unit(mu);
    let h = 1e-3;
    let deriv = |q: FourVector| {
        let f = |s: f64| line.eval_with(&(q + e.scale_real(s)), &kslash).unwrap();
        (f(-2.0 * h) - f(2.0 * h) + (f(h) - f(-h)).scale_real(8.0)).scale_real(1.0 / (12.0 * h))
    };
    let rule = GaussLegendre::new(64);
    let panels = [0.0, 0.5, 0.8, 0.95, 0.99, 0.999, 1.0];
    let mut tail = DiracMatrix::zero();
    for w in panels.windows(2) {
        tail += rule
            .integrate(w[0], w[1], |t| {
                let lambda = t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                Ok(deriv(*p + k.scale_real(lambda)).scale_real(jac))
            })
            .unwrap();
    }
    p_mu + tail
}

#[test]
fn q_tilde_single_vertex_matches_finite_difference_oracle() {
    let cases = [
        ([1.4, 0.2, -0.1, 0.15], [0.3, 0.1, 0.05, -0.1], 1),
        ([2.0, 0.0, 0.3, 0.0], [0.2, -0.05, 0.0, 0.1], 0),
        ([1.7, -0.25, 0.1, 0.2], [0.45, 0.2, 0.3, -0.1], 3),
    ];
    for (p, k, mu) in cases {
        let (p, k) = (FourVector::real(p), FourVector::real(k));
        let chain = ChainSpec::new(M, 0.0, vec![VertexSpec::quantum(k, idx(mu))]).unwrap();
        let cfg = InsertionConfig {
            order: 48,
            ..Default::default()
        };
        let got = apply_q_tilde(&chain, 0, &p, idx(mu), &cfg).unwrap();
        let want = q_tilde_oracle(&k, idx(mu), &p);
        let r = rel(&got.value, &want);
        assert!(r < 1e-7, "μ={mu}: relative distance {r:.3e}");
    }
}

/// exp(G) by its Taylor series, for ‖G‖ of order a few.
fn taylor_exp(g: &nalgebra::DMatrix<C64>) -> nalgebra::DMatrix<C64> {
    let n = g.nrows();
    let mut term = nalgebra::DMatrix::<C64>::identity(n, n);
    let mut sum = term.clone();
    for j in 1..120 {
        term = &term * g / C64::new(j as f64, 0.0);
        sum += &term;
    }
    sum
}

#[test]
fn displacement_matches_taylor_series() {
    for alpha in [C64::from_polar(0.5, 0.7), C64::new(-0.3, 0.2), C64::new(0.0, 0.45)] {
        let a = annihilation(12);
        let g = a.adjoint() * alpha - &a * alpha.conj();
        let want = taylor_exp(&g);
        let got = displacement(alpha, 12);
        let err = (&got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "α={alpha}: {err:.3e}");
    }
}

#[test]
fn slash_squares_to_minkowski_norm() {
    let vs = [[0.3, -1.2, 0.7, 2.0], [1.5, 0.1, 0.2, -0.3], [-0.4, 0.0, 0.9, 0.5]];
    for v in vs {
        let v = FourVector::real(v);
        let direct = slash(&v) * slash(&v);
        let norm = v[0].re * v[0].re - v[1].re * v[1].re - v[2].re * v[2].re - v[3].re * v[3].re;
        let want = DiracMatrix::identity().scale_real(norm);
        assert!((direct - want).norm_max() < 1e-12);
    }
}

#[test]
fn propagator_inverts_dirac_operator() {
    for p in [[1.4, 0.2, -0.1, 0.15], [0.3, 1.1, 0.2, 0.0], [2.0, 0.0, 0.0, 0.0]] {
        let p = FourVector::real(p);
        let s = propagator(&p, M, 0.0).unwrap();
        let d = slash(&p) - DiracMatrix::identity().scale_real(M);
        let want = DiracMatrix::identity().scale(C64::new(0.0, 1.0));
        assert!((d * s - want).norm_max() < 1e-11);
    }
}

#[test]
fn two_vertex_line_is_ordered_product() {
    let (k1, k2) = (FourVector::real([0.3, 0.1, 0.05, -0.1]), FourVector::real([0.2, -0.1, 0.1, 0.0]));
    let p = FourVector::real([1.5, 0.2, -0.1, 0.1]);
    let chain = ChainSpec::new(M, 0.0, vec![VertexSpec::plain(k1, idx(1)), VertexSpec::plain(k2, idx(3))]).unwrap();
    let want = propagator(&p, M, 0.0).unwrap()
        * gamma_lower(idx(1))
        * propagator(&(p + k1), M, 0.0).unwrap()
        * gamma_lower(idx(3))
        * propagator(&(p + k1 + k2), M, 0.0).unwrap();
    assert!(rel(&chain.eval(&p, &FourVector::ZERO).unwrap(), &want) < 1e-12);
}

#[test]
fn one_vertex_partial_fractions_in_p_squared() {
    // N/(x₀x₁) = N/(x₀(x₁ − x₀)) + N/(x₁(x₀ − x₁)), with x_i = p_i² − m²
    let k = FourVector::real([0.3, 0.1, 0.05, -0.1]);
    let p = FourVector::real([1.4, 0.2, -0.1, 0.15]);
    let q = p + k;
    let chain = ChainSpec::new(M, 0.0, vec![VertexSpec::plain(k, idx(2))]).unwrap();
    let terms = pole_terms(&chain, &p).unwrap();
    assert_eq!(terms.len(), 2);
    let i = C64::new(0.0, 1.0);
    let num = (slash(&p) + DiracMatrix::identity().scale_real(M)).scale(i)
        * gamma_lower(idx(2))
        * (slash(&q) + DiracMatrix::identity().scale_real(M)).scale(i);
    let (x0, x1) = (p.square() - M * M, q.square() - M * M);
    let t0 = num.scale(1.0 / (x0 * (x1 - x0)));
    let t1 = num.scale(1.0 / (x1 * (x0 - x1)));
    assert!(rel(&terms[0].value(), &t0) < 1e-10);
    assert!(rel(&terms[1].value(), &t1) < 1e-10);
}

#[test]
fn derivative_residual_ratio_is_four() {
    for (p, mu) in [([1.4, 0.2, -0.1, 0.15], 0), ([2.0, 0.3, 0.1, -0.2], 2), ([0.4, 1.3, 0.0, 0.2], 1)] {
        let p = FourVector::real(p);
        let r1 = derivative_identity_residual(&p, idx(mu), M, 1e-3).unwrap();
        let r2 = derivative_identity_residual(&p, idx(mu), M, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((3.6..=4.4).contains(&ratio), "{ratio}");
    }
}

#[test]
fn single_classical_photon_on_bare_line_telescopes() {
    // Θ-sum = i p_μ/(p·k) S(p) − i (p+k)_μ/((p+k)·k) S(p+k), S = i(p̸+m)/(p²−m²)
    let chain = ChainSpec::bare(M).unwrap();
    let p = FourVector::real([1.6, 0.1, -0.2, 0.3]);
    let k = FourVector::real([0.25, 0.1, 0.05, -0.1]);
    let i = C64::new(0.0, 1.0);
    for mu in 0..4 {
        let terms = classical_meromorphic_expansion(&chain, &p, &[(k, idx(mu))]).unwrap();
        let got = expansion_total(&terms);
        let q = p + k;
        let lower = |v: &FourVector| v[mu] * idx(mu).metric();
        let a = meromorphic_part(&chain, &p).unwrap().scale(i * lower(&p) / p.dot(&k));
        let b = meromorphic_part(&chain, &q).unwrap().scale(i * lower(&q) / q.dot(&k));
        let direct = propagator(&p, M, 0.0).unwrap().scale(i * lower(&p) / p.dot(&k))
            - propagator(&q, M, 0.0).unwrap().scale(i * lower(&q) / q.dot(&k));
        assert!(rel(&got, &(a - b)) < 1e-12);
        assert!(rel(&got, &direct) < 1e-12);
    }
}

#[test]
fn gamma_zero_squares_to_identity() {
    let g0 = gamma(idx(0));
    assert!((g0 * g0 - DiracMatrix::identity()).norm_max() < 1e-15);
}
