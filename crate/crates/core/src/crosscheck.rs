//! Second routes to the protocol and oracle results that avoid the
//! eigendecomposition: dense matrix exponentials by Taylor series with
//! scaling and squaring, and an explicit sum over the clock's paths.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{Operator, StateVector, C64};
use crate::protocol::{BranchedState, PulseErrors};

fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// e^A by a Taylor series on A/2^s followed by s squarings.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / C64::new(2f64.powi(s), 0.0);
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) < 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// e^{−iHt} as a dense matrix.
pub fn evolution(h: &Operator, t: f64) -> DMatrix<C64> {
    expm(&(h.to_dense() * C64::new(0.0, -t)))
}

/// O₂(t)† O₁† O₂(t) O₁ with O₂(t) = U† O₂ U, U = e^{−iHt}.
fn correlator(h: &Operator, o1: &Operator, o2: &Operator, t: f64) -> DMatrix<C64> {
    let u = evolution(h, t);
    let w = u.adjoint() * o2.to_dense() * &u;
    let v = o1.to_dense();
    w.adjoint() * v.adjoint() * &w * &v
}

/// ⟨ψ|O₂(t)† O₁† O₂(t) O₁|ψ⟩.
pub fn otoc_dense(h: &Operator, psi: &StateVector, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    let p = psi.amplitudes();
    if p.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: p.len() });
    }
    Ok(p.dotc(&(correlator(h, o1, o2, t) * p)))
}

/// Tr[ρ O₂(t)† O₁† O₂(t) O₁] with ρ = e^{−β(H − E₀)}/Z, β finite. E₀ is any
/// lower bound, here the smallest Gershgorin disc edge.
pub fn otoc_thermal_dense(h: &Operator, beta: f64, o1: &Operator, o2: &Operator, t: f64) -> Result<C64> {
    if beta.is_nan() || beta < 0.0 || beta.is_infinite() {
        return Err(Error::InvalidParams(format!("dense thermal route needs finite β ≥ 0, got {beta}")));
    }
    let hd = h.to_dense();
    let e0 = (0..hd.nrows())
        .map(|i| {
            hd[(i, i)].re - hd.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, z)| z.norm()).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    let shifted = &hd - DMatrix::<C64>::identity(hd.nrows(), hd.nrows()) * C64::new(e0, 0.0);
    let rho = expm(&(shifted * C64::new(-beta, 0.0)));
    let z = rho.trace();
    Ok((rho * correlator(h, o1, o2, t)).trace() / z)
}

/// ⟨ψ|e^{iHt} e^{−i(H+δH)t}|ψ⟩.
pub fn loschmidt_dense(h: &Operator, delta_h: &Operator, psi: &StateVector, t: f64) -> Result<C64> {
    let p = psi.amplitudes();
    let a = evolution(h, t) * p;
    let b = evolution(&(h + delta_h), t) * p;
    Ok(a.dotc(&b))
}

/// The interferometer's final state assembled path by path.
///
/// The clock starts in |0⟩ and each of the three pulses splits every path in
/// two, so eight clock histories contribute. Along a history the system sees
/// O₁, O₂ and e^{−iHt} while the clock sits in |1⟩ during the first half,
/// e^{+iHt} while it sits in |0⟩, and the mirror rule after the second flip.
/// Returns (|1⟩ component, |0⟩ component).
pub fn path_sum_sequence(
    h: &Operator,
    psi0: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    errors: &PulseErrors,
) -> Result<(DVector<C64>, DVector<C64>)> {
    let n = h.dim();
    let fwd_t = evolution(h, t);
    let fwd_2t = evolution(h, 2.0 * t);
    let (back_t, back_2t) = (fwd_t.adjoint(), fwd_2t.adjoint());
    let (m1, m2) = (o1.to_dense(), o2.to_dense());
    let run = |level: usize, seg: usize| -> &DMatrix<C64> {
        match (level, seg) {
            (1, 2) => &fwd_2t,
            (0, 2) => &back_2t,
            (1, _) => &fwd_t,
            _ => &back_t,
        }
    };

    let half = 0.5 * (std::f64::consts::FRAC_PI_2 + errors.d_theta_prime);
    // R_y acting on |0⟩
    let start = [(0usize, C64::new(half.cos(), 0.0)), (1usize, C64::new(half.sin(), 0.0))];
    let flip =
        |d: f64, from: usize| [(1 - from, C64::new((0.5 * d).cos(), 0.0)), (from, C64::new(0.0, -(0.5 * d).sin()))];

    let mut out = [DVector::<C64>::zeros(n), DVector::<C64>::zeros(n)];
    for (l0, a0) in start {
        let mut v = psi0.amplitudes() * a0;
        if l0 == 1 {
            v = &m1 * v;
        }
        v = run(l0, 1) * v;
        if l0 == 1 {
            v = &m2 * v;
        }
        for (l1, a1) in flip(errors.d_theta_1, l0) {
            let w = run(l1, 2) * &v * a1;
            for (l2, a2) in flip(errors.d_theta_2, l1) {
                let mut x = &w * a2;
                if l2 == 0 {
                    x = &m2 * x;
                }
                x = run(l2, 3) * x;
                if l2 == 0 {
                    x = &m1 * x;
                }
                out[l2] += x;
            }
        }
    }
    let [zero, one] = out;
    Ok((one, zero))
}

/// Largest deviation between a branched state and a path-sum result.
pub fn branched_deviation(bs: &BranchedState, fwd: &DVector<C64>, bwd: &DVector<C64>) -> f64 {
    let d = |a: &DVector<C64>, b: &DVector<C64>| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    d(bs.fwd().amplitudes(), fwd).max(d(bs.bwd().amplitudes(), bwd))
}
