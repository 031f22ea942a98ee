use proptest::prelude::*;
use qstrata::composite::{partial_trace, schmidt, segre, TensorFactorization};
use qstrata::entanglement::{build_form_signs, pure_concurrence, SignPattern};
use qstrata::hermitian::{hs_inner, jordan_bracket, lie_bracket, HermitianOperator};
use qstrata::kraus::{apply, normalized_apply};
use qstrata::linalg::{kron, max_abs_diff, trace_product, ComplexMatrix, C64};
use qstrata::random::{
    random_density, random_hermitian, random_hermitian_signature, random_kraus, random_unitary, random_vector, rng,
    StdRng,
};
use qstrata::strata::{
    chart_forward, chart_reconstruct, face_of, gl_orbit_tangent_rank, image_basis, in_face, is_extreme,
    orbit_dimension, rank_of, same_face, select_chart, signature_of, RANK_TOL,
};
use qstrata::DensityState;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Density matrix whose support is the column span of `v`.
fn state_on(r: &mut StdRng, v: &ComplexMatrix) -> DensityState {
    let inner = random_density(r, v.ncols(), v.ncols()).unwrap();
    DensityState::from_matrix(v * inner.matrix() * v.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn scalar_product_is_invariant(seed: u64, n in 2usize..=4) {
        let mut r = rng(seed);
        let (a, b, xi) = (random_hermitian(&mut r, n), random_hermitian(&mut r, n), random_hermitian(&mut r, n));
        let lhs = hs_inner(&lie_bracket(&a, &xi).unwrap(), &b).unwrap();
        let rhs = hs_inner(&a, &lie_bracket(&xi, &b).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
        let lhs = hs_inner(&jordan_bracket(&a, &xi).unwrap(), &b).unwrap();
        let rhs = hs_inner(&a, &jordan_bracket(&xi, &b).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn lie_bracket_satisfies_jacobi(seed: u64, n in 2usize..=4) {
        let mut r = rng(seed);
        let (a, b, c) = (random_hermitian(&mut r, n), random_hermitian(&mut r, n), random_hermitian(&mut r, n));
        let br = |x: &HermitianOperator, y: &HermitianOperator| lie_bracket(x, y).unwrap();
        let sum = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(sum.norm() < 1e-10 * (1.0 + a.norm() * b.norm() * c.norm()));
        prop_assert!((&br(&a, &b) + &br(&b, &a)).norm() < 1e-12);
    }

    #[test]
    fn partial_traces_compose(seed: u64, d0 in 2usize..=3, d1 in 2usize..=3, d2 in 2usize..=3) {
        let mut r = rng(seed);
        let fact = TensorFactorization::new(vec![d0, d1, d2]).unwrap();
        let rho = random_density(&mut r, fact.total(), 1 + (seed % 4) as usize).unwrap();
        let both = partial_trace(rho.op(), &fact, &[0, 1]).unwrap();
        let first = partial_trace(rho.op(), &fact, &[0]).unwrap();
        let rest = TensorFactorization::new(vec![d1, d2]).unwrap();
        let stepwise = partial_trace(&first, &rest, &[0]).unwrap();
        prop_assert!(max_abs_diff(both.matrix(), stepwise.matrix()) < 1e-12);
        prop_assert!(close(first.trace(), 1.0, 1e-12));
        let all = partial_trace(rho.op(), &fact, &[0, 1, 2]).unwrap();
        prop_assert!(close(all.matrix()[(0, 0)].re, 1.0, 1e-12));
    }

    #[test]
    fn pure_state_reductions_share_purity(seed: u64, n1 in 2usize..=4, n2 in 2usize..=4) {
        let mut r = rng(seed);
        let fact = TensorFactorization::bipartite(n1, n2).unwrap();
        let psi = DensityState::pure(&random_vector(&mut r, n1 * n2)).unwrap();
        let a = partial_trace(psi.op(), &fact, &[1]).unwrap();
        let b = partial_trace(psi.op(), &fact, &[0]).unwrap();
        let pa = trace_product(a.matrix(), a.matrix()).re;
        let pb = trace_product(b.matrix(), b.matrix()).re;
        prop_assert!(close(pa, pb, 1e-12));
    }

    #[test]
    fn segre_is_multiplicative(seed: u64, n1 in 2usize..=3, n2 in 2usize..=3, k1 in 1usize..=3, k2 in 1usize..=3) {
        let mut r = rng(seed);
        let (k1, k2) = (k1.min(n1), k2.min(n2));
        let a = random_density(&mut r, n1, k1).unwrap();
        let b = random_density(&mut r, n2, k2).unwrap();
        let ab = segre(a.op(), b.op());
        prop_assert_eq!(rank_of(&ab, RANK_TOL), k1 * k2);
        prop_assert!(close(ab.trace(), a.op().trace() * b.op().trace(), 1e-12));
        let fact = TensorFactorization::bipartite(n1, n2).unwrap();
        prop_assert!(max_abs_diff(partial_trace(&ab, &fact, &[0]).unwrap().matrix(), b.matrix()) < 1e-12);
        let x = random_hermitian_signature(&mut r, n1, 1, 1).unwrap();
        let y = random_hermitian_signature(&mut r, n2, 1, 0).unwrap();
        let sig = signature_of(&segre(&x, &y), RANK_TOL);
        prop_assert_eq!((sig.k_plus, sig.k_minus), (1, 1));
    }

    #[test]
    fn charts_round_trip(seed: u64, n in 1usize..=5, k_frac in 0.0f64..1.0, p_frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let k = 1 + ((n as f64 * k_frac) as usize).min(n - 1);
        let kp = ((k + 1) as f64 * p_frac) as usize;
        let xi = random_hermitian_signature(&mut r, n, kp.min(k), k - kp.min(k)).unwrap();
        let chart = select_chart(&xi, RANK_TOL).unwrap();
        prop_assert_eq!(chart.real_dimension(), 2 * n * k - k * k);
        let coords = chart_forward(&xi, &chart, RANK_TOL).unwrap();
        let back = chart_reconstruct(&coords, &chart).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), xi.matrix()) < 1e-9);
        prop_assert_eq!(chart_forward(&back, &chart, RANK_TOL).unwrap(), coords);
    }

    #[test]
    fn orbit_tangent_rank_matches_formula(seed: u64, n in 1usize..=4, k_frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let k = ((n + 1) as f64 * k_frac) as usize;
        let xi = random_hermitian_signature(&mut r, n, k, 0).unwrap();
        let sig = signature_of(&xi, RANK_TOL);
        prop_assert_eq!(gl_orbit_tangent_rank(&xi, RANK_TOL), orbit_dimension(n, sig).unwrap());
    }

    #[test]
    fn same_face_is_transitive(seed: u64, n in 2usize..=5, k_frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let k = 1 + ((n as f64 * k_frac) as usize).min(n - 1);
        let support = image_basis(&random_density(&mut r, n, k).unwrap().into_op(), RANK_TOL);
        let (a, b, c) = (state_on(&mut r, &support), state_on(&mut r, &support), state_on(&mut r, &support));
        prop_assert!(same_face(&a, &b, RANK_TOL, 1e-9).unwrap());
        prop_assert!(same_face(&b, &c, RANK_TOL, 1e-9).unwrap());
        prop_assert!(same_face(&a, &c, RANK_TOL, 1e-9).unwrap());
        // a state outside the support is not in the face
        if k < n {
            let outside = random_density(&mut r, n, n).unwrap();
            prop_assert!(!in_face(&outside, &face_of(&a, RANK_TOL), 1e-9).unwrap());
        }
    }

    #[test]
    fn extreme_points_have_no_proper_split(seed: u64, n in 2usize..=5, k_frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let k = 1 + ((n as f64 * k_frac) as usize).min(n - 1);
        let rho = random_density(&mut r, n, k).unwrap();
        // ρ = (ρ + εD)/2 + (ρ - εD)/2 with D traceless on the support
        let v = image_basis(rho.op(), RANK_TOL);
        let h = random_hermitian(&mut r, k);
        let h0 = h.matrix() - ComplexMatrix::identity(k, k) * C64::new(h.trace() / k as f64, 0.0);
        let d = &v * h0 * v.adjoint();
        let compressed = v.adjoint() * rho.matrix() * &v;
        let lambda_min = HermitianOperator::hermitian_part(&compressed).spectrum().min_eigenvalue();
        let op_norm = HermitianOperator::hermitian_part(&d).spectrum().max_abs_eigenvalue();
        let splittable = op_norm > 1e-12 && {
            let eps = 0.5 * lambda_min / op_norm;
            let plus = DensityState::from_matrix(rho.matrix() + &d * C64::new(eps, 0.0));
            let minus = DensityState::from_matrix(rho.matrix() - &d * C64::new(eps, 0.0));
            plus.is_ok() && minus.is_ok() && eps * op_norm > 1e-9
        };
        prop_assert_eq!(is_extreme(&rho, RANK_TOL), !splittable);
        prop_assert_eq!(is_extreme(&rho, RANK_TOL), k == 1);
    }

    #[test]
    fn kraus_maps_preserve_positivity(seed: u64, n in 2usize..=4, ops in 1usize..=3) {
        let mut r = rng(seed);
        let k = random_kraus(&mut r, n, ops).unwrap();
        let rho = random_density(&mut r, n, 1 + (seed % n as u64) as usize).unwrap();
        let image = apply(&k, rho.op()).unwrap();
        prop_assert!(image.spectrum().min_eigenvalue() > -1e-12 * image.norm().max(1.0));
        let normalized = normalized_apply(&k, &rho).unwrap();
        prop_assert!(close(normalized.op().trace(), 1.0, 1e-12));
    }

    #[test]
    fn schmidt_reassembles_the_vector(seed: u64, n1 in 2usize..=4, n2 in 2usize..=4) {
        let mut r = rng(seed);
        let fact = TensorFactorization::bipartite(n1, n2).unwrap();
        let psi = random_vector(&mut r, n1 * n2);
        let dec = schmidt(&psi, &fact).unwrap();
        prop_assert!((dec.reassemble() - psi.amplitudes()).norm() < 1e-12);
        let total: f64 = dec.coefficients.iter().map(|l| l * l).sum();
        prop_assert!(close(total, 1.0, 1e-12));
        prop_assert!(dec.coefficients.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed: u64, k in 2usize..=3, bits in 0usize..8) {
        let mut r = rng(seed);
        let fact = TensorFactorization::new(vec![2; k]).unwrap();
        let pattern: SignPattern = (0..k).map(|j| if bits >> j & 1 == 1 { '-' } else { '+' }).collect::<String>().parse().unwrap();
        let form = build_form_signs(&fact, &pattern).unwrap();
        let psi = random_vector(&mut r, fact.total());
        let u = (1..k).fold(random_unitary(&mut r, 2), |acc, _| kron(&acc, &random_unitary(&mut r, 2)));
        let moved = qstrata::PureStateVector::new(&u * psi.amplitudes()).unwrap();
        let (c0, c1) = (pure_concurrence(&psi, &form).unwrap(), pure_concurrence(&moved, &form).unwrap());
        prop_assert!((c0 - c1).abs() < 1e-10);
        prop_assert!(c0 >= 0.0);
    }
}
