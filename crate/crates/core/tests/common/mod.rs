#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DMatrix;
use oto_clock::models::ModelParams;
use oto_clock::{make_space, HilbertSpace, Operator, SiteKind, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn qubits(n: usize) -> Arc<HilbertSpace> {
    make_space(vec![SiteKind::Qubit; n]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> Operator {
    let a = gaussian_matrix(space.dim(), rng);
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    Operator::from_dense(space.clone(), &h, true).unwrap()
}

pub fn random_unitary(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> Operator {
    let q = gaussian_matrix(space.dim(), rng).qr().q();
    Operator::from_dense(space.clone(), &q, false).unwrap()
}

pub fn random_state(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> StateVector {
    let v = gaussian_matrix(space.dim(), rng).column(0).into_owned();
    StateVector::new(space, v).unwrap().normalized().unwrap()
}

pub fn fig6() -> ModelParams {
    ModelParams {
        omega_a: 5800.0,
        omega_b: 4950.0,
        epsilon: 5000.0,
        eta: 0.0,
        chi: -50.0,
        g_a: 200.0,
        g_site: vec![5.0, 5.0],
        n_sites: 2,
        n_max: 3,
        hardcore: false,
        periodic: false,
    }
}

pub fn fig7() -> ModelParams {
    ModelParams { g_site: vec![5.0; 3], n_sites: 3, periodic: true, ..fig6() }
}

pub fn bus(n: usize) -> ModelParams {
    ModelParams { eta: 100.0, g_site: vec![5.0; n], n_sites: n, ..fig6() }
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
