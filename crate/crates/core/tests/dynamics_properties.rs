use dwell_core::dynamics::{
    lindblad_evolve_exact, lindblad_evolve_rk4, open_initial_state, quench_evolve, quenched_open_run, series, Channel,
    Integrator, LindbladModel, QuenchSpec, TimeSeries,
};
use dwell_core::operators::hamiltonian;
use dwell_core::{full_basis, ground_state, sector_basis, DensityMatrix, ModelParams, StateVector};

fn params(j: f64) -> ModelParams {
    ModelParams { j, u: 1.0 }
}

fn spec(j0: f64, je: f64, t_max: f64, samples: usize) -> QuenchSpec {
    QuenchSpec::new(params(j0), params(je), t_max, samples).unwrap()
}

fn channel<'a>(ts: &'a TimeSeries, name: &str) -> &'a [f64] {
    ts.channel(name).unwrap_or_else(|| panic!("missing channel {name}"))
}

#[test]
fn trajectories_stay_physical() {
    for ch in [Channel::Dephasing, Channel::Loss] {
        for integrator in [Integrator::Rk4, Integrator::Exact] {
            for n in 1..=3 {
                for gamma in [0.5, 3.0] {
                    let ts = quenched_open_run(&spec(0.1, 1.0, 6.0, 121), ch, gamma, n, integrator).unwrap();
                    assert!(channel(&ts, series::TRACE).iter().all(|t| (t - 1.0).abs() <= 1e-8));
                    assert!(channel(&ts, series::HERMITICITY_ERROR).iter().all(|&h| h <= 1e-9));
                    assert!(channel(&ts, series::MIN_EIGENVALUE).iter().all(|&m| m >= -1e-7));
                }
            }
        }
    }
}

#[test]
fn dephasing_keeps_populations_without_hopping() {
    let n = 4;
    let basis = sector_basis(n);
    let gs = ground_state(&hamiltonian(&basis, params(0.8))).unwrap();
    let rho0 = DensityMatrix::from_pure(&gs.state).unwrap();
    let model = LindbladModel::build(Channel::Dephasing, params(0.0), n, 1.5).unwrap();
    let ts = lindblad_evolve_rk4(&model, &rho0, 5.0, 51).unwrap();
    assert!(channel(&ts, series::TRACE).iter().all(|t| (t - 1.0).abs() <= 1e-9));
    // H commutes with every n_k here, so no population moves.
    let exact = lindblad_evolve_exact(&model, &rho0, 5.0, 2).unwrap();
    assert!((channel(&exact, series::PARTICLE_NUMBER)[1] - n as f64).abs() <= 1e-9);
    let purity = channel(&ts, series::PURITY);
    assert!(purity.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let neg = channel(&ts, series::NEGATIVITY);
    let last = neg[neg.len() - 1];
    // Coherence between |n,N-n⟩ and |m,N-m⟩ decays at γ(n-m)²; the slowest is e^{-γt}.
    assert!(last <= neg[0] * (-1.5f64 * 5.0).exp() + 1e-9);
}

#[test]
fn loss_without_hamiltonian_drains_exponentially() {
    let gamma = 0.8;
    for n in 1..=4 {
        let basis = full_basis(n);
        let top = StateVector::basis_state(basis.clone(), 0);
        let rho0 = DensityMatrix::from_pure(&top).unwrap();
        let model = LindbladModel::build(Channel::Loss, ModelParams { j: 0.0, u: 0.0 }, n, gamma).unwrap();
        let ts = lindblad_evolve_rk4(&model, &rho0, 6.0, 61).unwrap();
        for (t, v) in ts.times().iter().zip(channel(&ts, series::PARTICLE_NUMBER)) {
            assert!((v - n as f64 * (-gamma * t).exp()).abs() <= 1e-6, "n = {n}, t = {t}");
        }
    }
}

#[test]
fn loss_particle_number_never_grows() {
    for n in 2..=4 {
        let ts = quenched_open_run(&spec(1.0, 0.1, 15.0, 301), Channel::Loss, 0.7, n, Integrator::Rk4).unwrap();
        let particles = channel(&ts, series::PARTICLE_NUMBER);
        assert!(particles.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let populations: f64 = (0..=n)
            .map(|m| *channel(&ts, &series::population_channel(m)).last().unwrap())
            .sum();
        assert!((populations - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn loss_ends_in_vacuum() {
    let ts = quenched_open_run(&spec(1.0, 0.1, 30.0, 301), Channel::Loss, 1.0, 3, Integrator::Rk4).unwrap();
    assert!(*channel(&ts, &series::population_channel(0)).last().unwrap() >= 0.99);
    assert!(*channel(&ts, series::NEGATIVITY).last().unwrap() <= 1e-3);
}

#[test]
fn closed_quench_conserves_energy() {
    for n in 1..=6 {
        let ts = quench_evolve(&spec(0.1, 1.0, 40.0, 801), n).unwrap();
        let e = channel(&ts, series::ENERGY);
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        let stdev = (e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / e.len() as f64).sqrt();
        assert!(stdev <= 1e-8 * mean.abs(), "n = {n}");
    }
}

#[test]
fn unitary_exact_path_keeps_purity() {
    let s = spec(0.1, 1.0, 10.0, 101);
    let rho0 = open_initial_state(&s, Channel::Dephasing, 4).unwrap();
    let model = LindbladModel::build(Channel::Dephasing, s.evolution, 4, 0.0).unwrap();
    let ts = lindblad_evolve_exact(&model, &rho0, s.t_max, s.samples).unwrap();
    assert!(channel(&ts, series::PURITY).iter().all(|p| (p - 1.0).abs() <= 1e-10));
}

#[test]
fn rk4_matches_exact_on_dephasing_reference_case() {
    let s = spec(0.1, 1.0, 10.0, 201);
    let rk4 = quenched_open_run(&s, Channel::Dephasing, 1.0, 3, Integrator::Rk4).unwrap();
    let exact = quenched_open_run(&s, Channel::Dephasing, 1.0, 3, Integrator::Exact).unwrap();
    assert!(rk4.max_deviation(&exact).unwrap() <= 1e-6);
}

#[test]
fn running_average_settles() {
    for n in 2..=5 {
        let ts = quench_evolve(&spec(0.1, 1.0, 100.0, 4001), n).unwrap();
        let avg = channel(&ts, series::NEGATIVITY_AVG);
        let tail = &avg[avg.len() / 2..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi - lo < 0.05 * mean, "n = {n}: spread {} of mean {mean}", hi - lo);
    }
}

#[test]
fn weak_dephasing_initially_keeps_quench_gain() {
    let gamma = 0.1;
    for n in 2..=5 {
        let ts = quenched_open_run(&spec(0.1, 1.0, 1.0, 51), Channel::Dephasing, gamma, n, Integrator::Rk4).unwrap();
        let neg = channel(&ts, series::NEGATIVITY);
        assert!(neg[1..].iter().all(|&v| v > neg[0]), "n = {n}");
    }
}

#[test]
fn strong_dephasing_suppresses_oscillations() {
    // Count turning points of the negativity over the same window.
    let turns = |gamma: f64, n: usize| {
        let ts = quenched_open_run(&spec(0.1, 1.0, 10.0, 1001), Channel::Dephasing, gamma, n, Integrator::Rk4).unwrap();
        let neg = channel(&ts, series::NEGATIVITY).to_vec();
        neg.windows(3).filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0).count()
    };
    for n in 2..=5 {
        assert!(turns(10.0, n) < turns(0.1, n), "n = {n}");
    }
}
