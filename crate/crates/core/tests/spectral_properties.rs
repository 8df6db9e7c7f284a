use dwell_core::entanglement::bec_amplitudes;
use dwell_core::operators::hamiltonian;
use dwell_core::spectral::matrix_exp_hermitian_action;
use dwell_core::{eigh, gibbs_state, ground_state, sector_basis, CMatrix, ModelParams, OperatorMatrix, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(d: usize, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    OperatorMatrix::new(sector_basis(d - 1), h).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn eigh_reconstructs_random_hermitian_matrices() {
    for (d, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (120, 5), (200, 6)] {
        let op = random_hermitian(d, seed);
        let dec = eigh(&op).unwrap();
        let v = dec.eigenvectors();
        let lam = CMatrix::from_diagonal(&dwell_core::CVector::from_iterator(
            d,
            dec.eigenvalues().iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        let scale = max_abs(op.data()).max(1.0);
        assert!(max_abs(&(v * lam * v.adjoint() - op.data())) <= 1e-10 * scale * d as f64, "d = {d}");
        assert!(max_abs(&(v.adjoint() * v - CMatrix::identity(d, d))) <= 1e-10 * d as f64, "d = {d}");
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn bec_amplitudes_match_free_ground_state() {
    for n in 1..=30 {
        let gs = ground_state(&hamiltonian(&sector_basis(n), ModelParams { j: 1.0, u: 0.0 })).unwrap();
        let amps = bec_amplitudes(n);
        for (z, a) in gs.state.amplitudes().iter().zip(&amps) {
            assert!((z.re - a).abs() <= 1e-10 && z.im.abs() <= 1e-10, "n = {n}");
        }
    }
}

#[test]
fn gibbs_state_tends_to_ground_projector() {
    let h = hamiltonian(&sector_basis(6), ModelParams { j: 0.4, u: 1.0 });
    let gs = ground_state(&h).unwrap();
    let rho = gibbs_state(&h, 200.0).unwrap();
    let a = gs.state.amplitudes();
    let overlap = (a.adjoint() * rho.data() * a)[(0, 0)].re;
    assert!((overlap - 1.0).abs() < 1e-10);
}

#[test]
fn exp_action_is_unitary_and_composes() {
    let op = random_hermitian(9, 77);
    let psi = StateVector::basis_state(op.basis().clone(), 3);
    let once = matrix_exp_hermitian_action(&op, Complex64::new(0.0, -1.3), &psi).unwrap();
    assert!((once.norm() - 1.0).abs() < 1e-12);
    let half = matrix_exp_hermitian_action(&op, Complex64::new(0.0, -0.65), &psi).unwrap();
    let twice = matrix_exp_hermitian_action(&op, Complex64::new(0.0, -0.65), &half).unwrap();
    assert!((once.amplitudes() - twice.amplitudes()).iter().all(|z| z.norm() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gibbs_state_is_valid_and_swap_symmetric(n in 1usize..=8, j in 0.0f64..5.0, beta in 0.0f64..20.0) {
        let h = hamiltonian(&sector_basis(n), ModelParams { j, u: 1.0 });
        let rho = gibbs_state(&h, beta).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
        prop_assert!(rho.hermiticity_deviation() <= 1e-12);
        let swap: Vec<usize> = (0..=n).rev().collect();
        prop_assert!(max_abs(&(rho.permuted(&swap).data() - rho.data())) <= 1e-12);
    }

    #[test]
    fn ground_state_is_an_eigenvector(n in 1usize..=12, j in 0.01f64..10.0) {
        let h = hamiltonian(&sector_basis(n), ModelParams { j, u: 1.0 });
        let gs = ground_state(&h).unwrap();
        let a = gs.state.amplitudes();
        let residual = h.data() * a - a * Complex64::new(gs.energy, 0.0);
        prop_assert!(residual.iter().all(|z| z.norm() <= 1e-10));
        prop_assert!(!gs.degenerate);
    }
}
