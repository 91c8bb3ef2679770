//! Reference correlators computed directly from the system Hamiltonian.
//!
//! The out-of-time-ordered correlator is F(t) = ⟨ψ|O₂(t)† O₁† O₂(t) O₁|ψ⟩ with
//! O(t) = e^{iHt} O e^{−iHt}. For Hermitian operators this is the familiar
//! ⟨O₂(t)O₁O₂(t)O₁⟩; the adjoints make it the overlap ⟨L|R⟩ of the two
//! interferometer branches for any O.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dynamics::{propagate, spectral_decompose, Direction, EigenSystem};
use crate::error::{Error, Result};
use crate::hilbert::{inner, Operator, StateVector, C64};
use crate::models::disorder_stream;

/// The two branch states (|R⟩, |L⟩) of a run whose flipped segment runs for
/// `t_back` instead of t:
///
/// |R⟩ = e^{iH t_back} O₂ e^{−iHt} O₁|ψ⟩,  |L⟩ = O₁ e^{iH t_back} O₂ e^{−iHt}|ψ⟩
pub fn branch_states(
    eig: &EigenSystem,
    psi: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    t_back: f64,
) -> Result<(StateVector, StateVector)> {
    let back = |v: &StateVector| {
        if t_back >= 0.0 {
            propagate(eig, v, t_back, Direction::Backward)
        } else {
            propagate(eig, v, -t_back, Direction::Forward)
        }
    };
    let r = back(&o2.apply(&propagate(eig, &o1.apply(psi)?, t, Direction::Forward)?)?)?;
    let l = o1.apply(&back(&o2.apply(&propagate(eig, psi, t, Direction::Forward)?)?)?)?;
    Ok((r, l))
}

pub fn otoc_pure(h: &Operator, psi: &StateVector, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    otoc_pure_with(&spectral_decompose(h)?, psi, o1, o2, t)
}

/// F(t) as ⟨L|R⟩ from a precomputed decomposition.
pub fn otoc_pure_with(eig: &EigenSystem, psi: &StateVector, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    let (r, l) = branch_states(eig, psi, o1, o2, t, t)?;
    inner(&l, &r)
}

/// Heisenberg-picture O(t) in the eigenbasis: O(t)_mn = e^{i(E_m − E_n)t} Õ_mn.
fn heisenberg_in_eigenbasis(eig: &EigenSystem, op_eig: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let e = eig.eigenvalues();
    DMatrix::from_fn(op_eig.nrows(), op_eig.ncols(), |m, n| op_eig[(m, n)] * C64::from_polar(1.0, (e[m] - e[n]) * t))
}

/// The correlator operator O₂(t)† O₁† O₂(t) O₁ in the eigenbasis.
fn correlator_in_eigenbasis(eig: &EigenSystem, o1: &Operator, o2: &Operator, t: f64) -> Result<DMatrix<C64>> {
    let w = heisenberg_in_eigenbasis(eig, &eig.to_eigenbasis(o2)?, t);
    let v = eig.to_eigenbasis(o1)?;
    Ok(w.adjoint() * v.adjoint() * &w * &v)
}

/// F(t) as the matrix element of the four-operator product, built from
/// Heisenberg-picture matrices rather than from evolved states.
pub fn otoc_operator_product(
    eig: &EigenSystem,
    psi: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
) -> Result<C64> {
    let c = correlator_in_eigenbasis(eig, o1, o2, t)?;
    let v = eig.eigenvectors();
    let p: DVector<C64> = v.ad_mul(psi.amplitudes());
    Ok(p.dotc(&(c * &p)))
}

/// Tr[ρ O₂(t)† O₁† O₂(t) O₁] with ρ = e^{−βH}/Z. `beta = ∞` selects the
/// (possibly degenerate) ground space with equal weights.
pub fn otoc_thermal(h: &Operator, beta: f64, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    otoc_thermal_with(&spectral_decompose(h)?, beta, o1, o2, t)
}

pub fn otoc_thermal_with(eig: &EigenSystem, beta: f64, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    let weights = thermal_weights(eig.eigenvalues(), beta)?;
    let c = correlator_in_eigenbasis(eig, o1, o2, t)?;
    Ok(weights.iter().enumerate().map(|(n, &w)| c[(n, n)] * w).sum())
}

/// Normalized Boltzmann weights e^{−β(E − E_min)}/Z.
pub fn thermal_weights(energies: &[f64], beta: f64) -> Result<Vec<f64>> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParams(format!("inverse temperature must be non-negative, got {beta}")));
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if beta.is_infinite() {
        let span = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max) - e_min;
        let tol = 1e-9 * span.max(1.0);
        energies.iter().map(|&e| if e - e_min <= tol { 1.0 } else { 0.0 }).collect()
    } else {
        energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect()
    };
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / z).collect())
}

/// Correlator when the flipped Hamiltonian is −(1 + ε)H:
/// ⟨ψ|e^{iHt} O₂† e^{−iHt(1+ε)} O₁† e^{iHt(1+ε)} O₂ e^{−iHt} O₁|ψ⟩ = ⟨L|R⟩.
pub fn otoc_switch_error(
    h: &Operator,
    psi: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    epsilon: f64,
) -> Result<C64> {
    otoc_switch_error_with(&spectral_decompose(h)?, psi, o1, o2, t, epsilon)
}

pub fn otoc_switch_error_with(
    eig: &EigenSystem,
    psi: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    epsilon: f64,
) -> Result<C64> {
    let (r, l) = branch_states(eig, psi, o1, o2, t, t * (1.0 + epsilon))?;
    inner(&l, &r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchErrorStats {
    /// Sample mean of the perturbed correlator.
    pub mean: C64,
    /// The unperturbed correlator F(t).
    pub pure: C64,
    /// |mean/pure − 1|, undefined when F(t) = 0.
    pub relative_error: Option<f64>,
    /// |Re mean / Re pure − 1|.
    pub relative_error_re: Option<f64>,
    /// |Im mean / Im pure − 1|.
    pub relative_error_im: Option<f64>,
}

/// Averages [`otoc_switch_error`] over ε ~ N(0, δ²), δ being the standard
/// deviation. Sample k draws from its own counter-based stream `(seed, k)`,
/// so the result does not depend on how the samples are scheduled.
#[allow(clippy::too_many_arguments)]
pub fn relative_switch_error(
    eig: &EigenSystem,
    psi: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SwitchErrorStats> {
    let eps = switch_samples(delta, n_samples, seed)?;
    let pure = otoc_pure_with(eig, psi, o1, o2, t)?;
    let values: Vec<C64> =
        eps.par_iter().map(|&e| otoc_switch_error_with(eig, psi, o1, o2, t, e)).collect::<Result<_>>()?;
    let mean = values.iter().sum::<C64>() / n_samples as f64;
    let ratio = |num: f64, den: f64| (den != 0.0).then(|| (num / den - 1.0).abs());
    Ok(SwitchErrorStats {
        mean,
        pure,
        relative_error: (pure.norm() != 0.0).then(|| (mean / pure - 1.0).norm()),
        relative_error_re: ratio(mean.re, pure.re),
        relative_error_im: ratio(mean.im, pure.im),
    })
}

/// The ε values used by [`relative_switch_error`].
pub fn switch_samples(delta: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if n_samples == 0 {
        return Err(Error::NoSamples);
    }
    let normal = Normal::new(0.0, delta).map_err(|e| Error::InvalidDisorder(e.to_string()))?;
    Ok((0..n_samples as u64).map(|k| normal.sample(&mut disorder_stream(seed, k))).collect())
}

/// ⟨ψ|e^{iHt} e^{−i(H+δH)t}|ψ⟩.
pub fn loschmidt_echo(h: &Operator, delta_h: &Operator, psi: &StateVector, t: f64) -> Result<C64> {
    let perturbed = (h + delta_h).into_hermitian()?;
    let a = propagate(&spectral_decompose(h)?, psi, t, Direction::Forward)?;
    let b = propagate(&spectral_decompose(&perturbed)?, psi, t, Direction::Forward)?;
    inner(&a, &b)
}
