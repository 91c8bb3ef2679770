mod common;

use common::{fig6, qubits, random_hermitian, random_state, rng};
use oto_clock::dynamics::{conditional_propagate, propagate, spectral_decompose, Direction};
use oto_clock::models::{build_local_effective, build_nonlocal_effective, solve_sign_condition, Frame, SignModel};
use oto_clock::protocol::{flip_clock, BranchedState};
use oto_clock::{expectation, local_operator, LocalOp, Operator, StateVector, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagation_is_unitary_and_composes(seed in any::<u64>(), n in 1usize..4, t1 in 0.0f64..10.0, t2 in 0.0f64..10.0) {
        let mut r = rng(seed);
        let space = qubits(n);
        let h = random_hermitian(&space, &mut r);
        let psi = random_state(&space, &mut r);
        let eig = spectral_decompose(&h).unwrap();

        let a = propagate(&eig, &psi, t1, Direction::Forward).unwrap();
        prop_assert!((a.norm() - 1.0).abs() < 1e-10);
        let ab = propagate(&eig, &a, t2, Direction::Forward).unwrap();
        let direct = propagate(&eig, &psi, t1 + t2, Direction::Forward).unwrap();
        prop_assert!(ab.max_abs_diff(&direct).unwrap() < 1e-9);
        let back = propagate(&eig, &a, t1, Direction::Backward).unwrap();
        prop_assert!(back.max_abs_diff(&psi).unwrap() < 1e-9);

        let e0 = expectation(&h, &psi).unwrap().re;
        let e1 = expectation(&h, &a).unwrap().re;
        prop_assert!((e0 - e1).abs() < 1e-9 * h.max_abs().max(1.0) * space.dim() as f64);
    }

    #[test]
    fn echo_segments_cancel(seed in any::<u64>(), t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let space = qubits(3);
        let eig = spectral_decompose(&random_hermitian(&space, &mut r)).unwrap();
        let bs = BranchedState::from_branches(
            random_state(&space, &mut r).scale(C64::new(0.6, 0.0)),
            random_state(&space, &mut r).scale(C64::new(0.8, 0.0)),
        ).unwrap();
        let mut out = conditional_propagate(&eig, &bs, t).unwrap();
        out = flip_clock(&out, 0.0);
        out = conditional_propagate(&eig, &out, 2.0 * t).unwrap();
        out = flip_clock(&out, 0.0);
        out = conditional_propagate(&eig, &out, t).unwrap();
        prop_assert!(out.fwd().max_abs_diff(bs.fwd()).unwrap() < 1e-9);
        prop_assert!(out.bwd().max_abs_diff(bs.bwd()).unwrap() < 1e-9);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn two_level_examples() {
    let q = qubits(1);
    let up = StateVector::basis(&q, 0).unwrap();
    let z = spectral_decompose(&local_operator(&q, 0, LocalOp::SigmaZ).unwrap()).unwrap();
    let t = 0.83;
    let out = propagate(&z, &up, t, Direction::Forward).unwrap();
    assert!((out.amplitudes()[0] - C64::from_polar(1.0, -t)).norm() < 1e-14);
    assert_eq!(propagate(&z, &up, 0.0, Direction::Forward).unwrap().max_abs_diff(&up).unwrap(), 0.0);
    assert!(propagate(&z, &up, -1.0, Direction::Forward).is_err());

    let x = spectral_decompose(&local_operator(&q, 0, LocalOp::SigmaX).unwrap()).unwrap();
    let out = propagate(&x, &up, std::f64::consts::FRAC_PI_2, Direction::Forward).unwrap();
    assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn spectrum_shifts_with_identity() {
    let mut r = rng(5);
    let space = qubits(3);
    let h = random_hermitian(&space, &mut r);
    let shifted = &h + &(2.5 * &Operator::identity(&space));
    let (a, b) = (spectral_decompose(&h).unwrap(), spectral_decompose(&shifted).unwrap());
    for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
        assert!((y - x - 2.5).abs() < 1e-12);
    }
}

/// The clock-included effective Hamiltonian, evolved on the full space,
/// against branch propagation with the n_a = 1 block.
fn duality_defect(h: &Operator, t: f64, seed: u64) -> f64 {
    let mut r = rng(seed);
    let h1 = h.clock_sector(1).unwrap();
    let sys = h1.space().clone();
    let bs = BranchedState::from_branches(
        random_state(&sys, &mut r).scale(C64::new(0.8, 0.0)),
        random_state(&sys, &mut r).scale(C64::new(0.6, 0.0)),
    )
    .unwrap();
    let full = StateVector::new(h.space(), nalgebra::DVector::from_vec(bs.interleaved())).unwrap();
    let evolved_full = propagate(&spectral_decompose(h).unwrap(), &full, t, Direction::Forward).unwrap();
    let evolved_branch = conditional_propagate(&spectral_decompose(&h1).unwrap(), &bs, t).unwrap();
    let want = StateVector::new(h.space(), nalgebra::DVector::from_vec(evolved_branch.interleaved())).unwrap();
    evolved_full.max_abs_diff(&want).unwrap()
}

#[test]
fn sector_one_runs_backward() {
    let p = solve_sign_condition(&fig6(), SignModel::Local).unwrap();
    let h = build_local_effective(&p, 2, Frame::Rotating).unwrap();
    for t in [0.3, 4.0, 25.0] {
        assert!(duality_defect(&h, t, 1) < 1e-9);
    }
    let mut q = common::bus(3);
    q.g_site = vec![4.0, 5.0, 7.0];
    let q = solve_sign_condition(&q, SignModel::Nonlocal).unwrap();
    let h = build_nonlocal_effective(&q, true, Frame::Rotating).unwrap();
    assert!(duality_defect(&h, 3.0, 2) < 1e-9);
}
