mod common;

use common::{qubits, random_hermitian, random_state, random_unitary, rng};
use oto_clock::crosscheck::{branched_deviation, path_sum_sequence};
use oto_clock::dynamics::spectral_decompose;
use oto_clock::oracle::{branch_states, otoc_pure, otoc_pure_with};
use oto_clock::protocol::{
    flip_clock, hadamard_clock, init_branched, measure_clock, noise_bound, run_oto_protocol, run_oto_protocol_with,
    run_oto_sequence, snr, Axis, BranchedState, MeasureAxis, ProtocolSpec, PulseErrors, Snr,
};
use oto_clock::{inner, local_operator, LocalOp, Operator, StateVector, C64};
use proptest::prelude::*;

fn random_spec(seed: u64, n: usize, t: f64, errors: PulseErrors) -> ProtocolSpec {
    let mut r = rng(seed);
    let space = qubits(n);
    ProtocolSpec {
        hamiltonian: random_hermitian(&space, &mut r),
        psi0: random_state(&space, &mut r),
        o1: random_unitary(&space, &mut r),
        o2: random_unitary(&space, &mut r),
        t,
        errors,
        measure_axis: MeasureAxis::Both,
    }
}

fn small_angle() -> impl Strategy<Value = f64> {
    -0.3f64..0.3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn protocol_measures_the_otoc(seed in any::<u64>(), n in 2usize..4, t in 0.0f64..10.0) {
        let spec = random_spec(seed, n, t, PulseErrors::IDEAL);
        let res = run_oto_protocol(&spec).unwrap();
        let want = otoc_pure(&spec.hamiltonian, &spec.psi0, &spec.o1, &spec.o2, t).unwrap();
        prop_assert!((res.otoc.unwrap() - want).norm() < 1e-9);
        prop_assert!(res.tau_x.unwrap().abs() <= 1.0 + 1e-9 && res.tau_y.unwrap().abs() <= 1.0 + 1e-9);
        prop_assert!(res.norm_conserving);
        let (f, b) = res.norms;
        prop_assert!((f * f + b * b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn final_state_holds_both_branches(seed in any::<u64>(), t in 0.0f64..10.0) {
        let spec = random_spec(seed, 2, t, PulseErrors::IDEAL);
        let eig = spectral_decompose(&spec.hamiltonian).unwrap();
        let bs = run_oto_sequence(&eig, &spec.psi0, &spec.o1, &spec.o2, t, &spec.errors).unwrap();
        let (r, l) = branch_states(&eig, &spec.psi0, &spec.o1, &spec.o2, t, t).unwrap();
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        prop_assert!(bs.fwd().max_abs_diff(&r.scale(s)).unwrap() < 1e-9);
        prop_assert!(bs.bwd().max_abs_diff(&l.scale(s)).unwrap() < 1e-9);
    }

    #[test]
    fn flip_errors_stay_within_the_noise_bound(
        seed in any::<u64>(), t in 0.0f64..10.0,
        dp in small_angle(), d1 in small_angle(), d2 in small_angle(),
    ) {
        let spec = random_spec(seed, 2, t, PulseErrors { d_theta_prime: dp, d_theta_1: d1, d_theta_2: d2 });
        let eig = spectral_decompose(&spec.hamiltonian).unwrap();
        let res = run_oto_protocol_with(&eig, &spec).unwrap();
        let lr = otoc_pure_with(&eig, &spec.psi0, &spec.o1, &spec.o2, t).unwrap();
        let signal = dp.cos() * (0.5 * d1).cos().powi(2) * (0.5 * d2).cos().powi(2) * lr.re;
        prop_assert!((res.tau_x.unwrap() - signal).abs() <= noise_bound(d1, d2) + 1e-9);
        let (f, b) = res.norms;
        prop_assert!((f * f + b * b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hadamard_error_only_rescales(seed in any::<u64>(), t in 0.0f64..10.0, dp in small_angle()) {
        let ideal = run_oto_protocol(&random_spec(seed, 2, t, PulseErrors::IDEAL)).unwrap().otoc.unwrap();
        let errors = PulseErrors { d_theta_prime: dp, ..PulseErrors::IDEAL };
        let got = run_oto_protocol(&random_spec(seed, 2, t, errors)).unwrap().otoc.unwrap();
        prop_assert!((got - ideal * dp.cos()).norm() < 1e-10);
        if ideal.re.abs() > 1e-6 {
            prop_assert!((got.arg() - ideal.arg()).abs() < 1e-9);
        }
    }

    #[test]
    fn eight_paths_rebuild_the_final_state(
        seed in any::<u64>(), t in 0.0f64..10.0,
        dp in small_angle(), d1 in small_angle(), d2 in small_angle(),
    ) {
        let errors = PulseErrors { d_theta_prime: dp, d_theta_1: d1, d_theta_2: d2 };
        let spec = random_spec(seed, 2, t, errors);
        let eig = spectral_decompose(&spec.hamiltonian).unwrap();
        let bs = run_oto_sequence(&eig, &spec.psi0, &spec.o1, &spec.o2, t, &errors).unwrap();
        let (f, b) = path_sum_sequence(&spec.hamiltonian, &spec.psi0, &spec.o1, &spec.o2, t, &errors).unwrap();
        prop_assert!(branched_deviation(&bs, &f, &b) < 1e-9);
    }

    #[test]
    fn flips_preserve_norm(seed in any::<u64>(), d in -3.2f64..3.2) {
        let mut r = rng(seed);
        let space = qubits(2);
        let bs = BranchedState::from_branches(
            random_state(&space, &mut r).scale(C64::new(0.6, 0.0)),
            random_state(&space, &mut r).scale(C64::new(0.0, 0.8)),
        ).unwrap();
        prop_assert!((flip_clock(&bs, d).norm_sqr() - 1.0).abs() < 1e-12);
        let w = hadamard_clock(&init_branched(bs.fwd().normalized().as_ref().unwrap()).unwrap(), d);
        prop_assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

fn qubit_spec(h: Operator, o1: Operator, o2: Operator, psi: StateVector, t: f64) -> ProtocolSpec {
    ProtocolSpec { hamiltonian: h, psi0: psi, o1, o2, t, errors: PulseErrors::IDEAL, measure_axis: MeasureAxis::Both }
}

#[test]
fn single_qubit_otoc_rotates_at_four_times_the_field() {
    let q = qubits(1);
    let z = local_operator(&q, 0, LocalOp::SigmaZ).unwrap();
    let x = local_operator(&q, 0, LocalOp::SigmaX).unwrap();
    let up = StateVector::basis(&q, 0).unwrap();
    for t in [0.0, 0.2, 1.1, 7.5] {
        let res = run_oto_protocol(&qubit_spec(z.clone(), x.clone(), x.clone(), up.clone(), t)).unwrap();
        assert!((res.otoc.unwrap() - C64::from_polar(1.0, 4.0 * t)).norm() < 1e-12);
    }
}

#[test]
fn trivial_operator_choices_give_one() {
    let mut r = rng(9);
    let space = qubits(3);
    let h = random_hermitian(&space, &mut r);
    let psi = random_state(&space, &mut r);
    let id = Operator::identity(&space);
    let res = run_oto_protocol(&qubit_spec(h.clone(), id.clone(), id, psi.clone(), 3.3)).unwrap();
    assert!((res.otoc.unwrap() - 1.0).norm() < 1e-12);

    let z0 = local_operator(&space, 0, LocalOp::SigmaZ).unwrap();
    let z2 = local_operator(&space, 2, LocalOp::SigmaZ).unwrap();
    let res = run_oto_protocol(&qubit_spec(h, z0, z2, psi, 0.0)).unwrap();
    assert!((res.otoc.unwrap() - 1.0).norm() < 1e-12);
}

#[test]
fn clock_readout_conventions() {
    let mut r = rng(4);
    let space = qubits(2);
    let psi = random_state(&space, &mut r);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let same = BranchedState::from_branches(psi.scale(h), psi.scale(h)).unwrap();
    assert!((measure_clock(&same, Axis::X) - 1.0).abs() < 1e-12);

    let mut perp = random_state(&space, &mut r);
    perp = perp.add_scaled(-inner(&psi, &perp).unwrap(), &psi).unwrap().normalized().unwrap();
    let orth = BranchedState::from_branches(psi.scale(h), perp.scale(h)).unwrap();
    assert!(measure_clock(&orth, Axis::X).abs() < 1e-12);

    // fwd = iψ, bwd = ψ: τʸ = 2 Im⟨bwd|fwd⟩ = +1
    let phased = BranchedState::from_branches(psi.scale(h * C64::new(0.0, 1.0)), psi.scale(h)).unwrap();
    assert!(measure_clock(&phased, Axis::X).abs() < 1e-12);
    assert!((measure_clock(&phased, Axis::Y) - 1.0).abs() < 1e-12);
}

#[test]
fn pulse_limits() {
    let q = qubits(1);
    let psi = StateVector::basis(&q, 0).unwrap();
    let all_fwd = hadamard_clock(&init_branched(&psi).unwrap(), std::f64::consts::FRAC_PI_2);
    assert!(all_fwd.bwd().norm() < 1e-15);
    assert!((all_fwd.fwd().norm() - 1.0).abs() < 1e-15);

    let bs = BranchedState::from_branches(psi.scale(C64::new(0.6, 0.0)), psi.scale(C64::new(0.0, 0.8))).unwrap();
    let swapped = flip_clock(&bs, 0.0);
    assert_eq!(swapped.fwd().amplitudes(), bs.bwd().amplitudes());
    let twice = flip_clock(&swapped, 0.0);
    assert_eq!(twice.fwd().amplitudes(), bs.fwd().amplitudes());
    let failed = flip_clock(&bs, std::f64::consts::PI);
    assert!(failed.fwd().max_abs_diff(&bs.fwd().scale(C64::new(0.0, -1.0))).unwrap() < 1e-15);
    assert!(init_branched(&psi.scale(C64::new(2.0, 0.0))).is_err());
}

#[test]
fn error_law_values() {
    assert_eq!(noise_bound(0.0, 0.0), 0.0);
    let d: f64 = 0.17;
    assert!((noise_bound(d, 0.0) - (d.sin().abs() + (0.5 * d).sin().powi(2))).abs() < 1e-15);
    let small = 1e-4;
    assert!((noise_bound(small, -small) - 2.0 * small.sin()).abs() < 10.0 * small * small);

    assert_eq!(snr(0.0, 0.0, 0.5), Snr::Noiseless);
    assert_eq!(snr(0.1, 0.2, 0.0), Snr::Finite(0.0));
    let Snr::Finite(a) = snr(0.1, 0.2, 0.3) else { panic!() };
    let Snr::Finite(b) = snr(0.1, 0.2, 0.6) else { panic!() };
    assert!((b - 2.0 * a).abs() < 1e-15);
    let Snr::Finite(c) = snr(1e-3, 1e-3, 0.8) else { panic!() };
    assert!((c / (0.8 / 2e-3) - 1.0).abs() < 1e-5);
}
