mod common;

use common::{qubits, random_hermitian, random_state, random_unitary, rng};
use oto_clock::dynamics::spectral_decompose;
use oto_clock::models::build_disordered_heisenberg;
use oto_clock::oracle::{
    loschmidt_echo, otoc_operator_product, otoc_pure, otoc_pure_with, otoc_switch_error, otoc_thermal,
    otoc_thermal_with, relative_switch_error, thermal_weights,
};
use oto_clock::{local_operator, LocalOp, Operator, StateVector, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_correlators_are_bounded_and_route_independent(seed in any::<u64>(), n in 1usize..4, t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let space = qubits(n);
        let h = random_hermitian(&space, &mut r);
        let (o1, o2) = (random_unitary(&space, &mut r), random_unitary(&space, &mut r));
        let psi = random_state(&space, &mut r);
        let eig = spectral_decompose(&h).unwrap();
        let a = otoc_pure_with(&eig, &psi, &o1, &o2, t).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-9);
        let b = otoc_operator_product(&eig, &psi, &o1, &o2, t).unwrap();
        prop_assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn thermal_average_is_eigenstate_average(seed in any::<u64>(), beta in 0.0f64..3.0, t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let space = qubits(2);
        let h = random_hermitian(&space, &mut r);
        let (o1, o2) = (random_unitary(&space, &mut r), random_unitary(&space, &mut r));
        let eig = spectral_decompose(&h).unwrap();
        let w = thermal_weights(eig.eigenvalues(), beta).unwrap();
        let mut want = C64::new(0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            want += otoc_pure_with(&eig, &eig.eigenvector(k), &o1, &o2, t).unwrap() * *wk;
        }
        prop_assert!((otoc_thermal_with(&eig, beta, &o1, &o2, t).unwrap() - want).norm() < 1e-9);
    }

    #[test]
    fn echo_is_bounded(seed in any::<u64>(), t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let space = qubits(2);
        let h = random_hermitian(&space, &mut r);
        let dh = random_hermitian(&space, &mut r).scale(C64::new(0.1, 0.0));
        let psi = random_state(&space, &mut r);
        prop_assert!(loschmidt_echo(&h, &dh, &psi, t).unwrap().norm() <= 1.0 + 1e-12);
    }
}

struct Chain {
    h: Operator,
    o1: Operator,
    o2: Operator,
    psi: StateVector,
}

fn chain4() -> Chain {
    let h = build_disordered_heisenberg(&[0.3, -0.2, 0.45, -0.1]).unwrap();
    let space = h.space().clone();
    Chain {
        o1: local_operator(&space, 1, LocalOp::SigmaZ).unwrap(),
        o2: local_operator(&space, 3, LocalOp::SigmaZ).unwrap(),
        psi: StateVector::from_levels(&space, &[0, 1, 0, 1]).unwrap(),
        h,
    }
}

#[test]
fn reference_values_from_dense_exponentials() {
    let c = chain4();
    let pure = otoc_pure(&c.h, &c.psi, &c.o1, &c.o2, 5.0).unwrap();
    assert!((pure - C64::new(0.16421558065777503, 0.0)).norm() < 1e-10);
    let switched = otoc_switch_error(&c.h, &c.psi, &c.o1, &c.o2, 5.0, 0.1).unwrap();
    assert!((switched - C64::new(0.13118766496968237, 0.0)).norm() < 1e-10);

    let h2 = build_disordered_heisenberg(&[0.2, -0.3]).unwrap();
    let z = local_operator(h2.space(), 0, LocalOp::SigmaZ).unwrap();
    let th = otoc_thermal(&h2, 1.0, &z, &z, 1.5).unwrap();
    assert!((th - C64::new(0.9823835329202822, 0.17256421400899805)).norm() < 1e-10);
}

#[test]
fn switch_error_limits() {
    let c = chain4();
    let eig = spectral_decompose(&c.h).unwrap();
    for t in [0.0, 1.0, 4.0] {
        let pure = otoc_pure_with(&eig, &c.psi, &c.o1, &c.o2, t).unwrap();
        assert!((otoc_switch_error(&c.h, &c.psi, &c.o1, &c.o2, t, 0.0).unwrap() - pure).norm() < 1e-12);
    }
    let equal_time = otoc_pure(&c.h, &c.psi, &c.o1, &c.o2, 0.0).unwrap();
    assert!((otoc_switch_error(&c.h, &c.psi, &c.o1, &c.o2, 0.0, 0.3).unwrap() - equal_time).norm() < 1e-12);

    let pure = otoc_pure_with(&eig, &c.psi, &c.o1, &c.o2, 3.0).unwrap();
    let gaps: Vec<f64> = [1e-3, 1e-2, 1e-1]
        .iter()
        .map(|&e| (otoc_switch_error(&c.h, &c.psi, &c.o1, &c.o2, 3.0, e).unwrap() - pure).norm())
        .collect();
    assert!(gaps[0] < gaps[1] && gaps[1] < gaps[2], "{gaps:?}");
    assert!(gaps[0] < 3.0 * 1e-3 * c.h.max_abs() * 16.0);
}

#[test]
fn ensemble_statistics() {
    let c = chain4();
    let eig = spectral_decompose(&c.h).unwrap();
    let zero = relative_switch_error(&eig, &c.psi, &c.o1, &c.o2, 2.0, 0.0, 20, 7).unwrap();
    assert_eq!(zero.relative_error, Some(0.0));
    let a = relative_switch_error(&eig, &c.psi, &c.o1, &c.o2, 2.0, 0.05, 40, 7).unwrap();
    let b = relative_switch_error(&eig, &c.psi, &c.o1, &c.o2, 2.0, 0.05, 40, 7).unwrap();
    assert_eq!(a, b);
    assert!(relative_switch_error(&eig, &c.psi, &c.o1, &c.o2, 2.0, 0.05, 0, 7).is_err());
}

#[test]
fn thermal_limits() {
    let mut r = rng(21);
    let space = qubits(2);
    let h = random_hermitian(&space, &mut r);
    let id = Operator::identity(&space);
    assert!((otoc_thermal(&h, 0.0, &id, &id, 2.0).unwrap() - 1.0).norm() < 1e-12);

    let (o1, o2) = (random_unitary(&space, &mut r), random_unitary(&space, &mut r));
    let eig = spectral_decompose(&h).unwrap();
    let ground = otoc_pure_with(&eig, &eig.eigenvector(0), &o1, &o2, 1.7).unwrap();
    assert!((otoc_thermal_with(&eig, f64::INFINITY, &o1, &o2, 1.7).unwrap() - ground).norm() < 1e-12);
    assert!((otoc_thermal_with(&eig, 200.0, &o1, &o2, 1.7).unwrap() - ground).norm() < 1e-9);
}

#[test]
fn echo_examples() {
    let q = qubits(1);
    let z = local_operator(&q, 0, LocalOp::SigmaZ).unwrap();
    let up = StateVector::basis(&q, 0).unwrap();
    let eps = 0.37;
    for t in [0.0, 0.5, 3.0, 12.0] {
        let e = loschmidt_echo(&z, &(eps * &z), &up, t).unwrap();
        assert!((e - C64::from_polar(1.0, -eps * t)).norm() < 1e-10);
        let one = loschmidt_echo(&z, &Operator::zeros(&q), &up, t).unwrap();
        assert!((one - 1.0).norm() < 1e-12);
    }
}
