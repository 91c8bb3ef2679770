//! Qubits coupled to one shared bus cavity whose frequency is shifted by the
//! ancilla through a cross-Kerr term.

use crate::error::Result;
use crate::hilbert::{local_operator, make_space, LocalOp, Operator, SiteKind};

use super::{Frame, ModelParams};

/// Space `[bus, qubit × N, clock]`:
///
/// H = ω_a n_a + ω_b b†b + (ε/2)Σσᶻ + η n_a b†b + Σ_j g_j(σ⁺_j b + h.c.)
///
/// The rotating frame removes ε(b†b + Σσᶻ/2) and the ancilla energy, leaving
/// −Δ_{b,n_a} b†b + V.
pub fn build_nonlocal_microscopic(params: &ModelParams, frame: Frame) -> Result<Operator> {
    params.validate()?;
    let n = params.n_sites;
    let mut sites = vec![SiteKind::Boson { n_max: params.cutoff() }];
    sites.extend(std::iter::repeat_n(SiteKind::Qubit, n));
    sites.push(SiteKind::Clock);
    let space = make_space(sites)?;
    let clock = n + 1;

    let b = local_operator(&space, 0, LocalOp::Annihilate)?;
    let nb = local_operator(&space, 0, LocalOp::Number)?;
    let na = local_operator(&space, clock, LocalOp::ClockProjector(1))?;

    let mut h = Operator::zeros(&space);
    match frame {
        Frame::Lab => {
            h = &h + &(params.omega_a * &na);
            h = &h + &(params.omega_b * &nb);
            for j in 0..n {
                h = &h + &((0.5 * params.epsilon) * &local_operator(&space, 1 + j, LocalOp::SigmaZ)?);
            }
        }
        Frame::Rotating => h = &h + &(-params.delta_b() * &nb),
    }
    h = &h + &(params.eta * &(&na * &nb));
    for (j, &g) in params.g_site.iter().enumerate() {
        let hop = &local_operator(&space, 1 + j, LocalOp::SigmaPlus)? * &b;
        h = &h + &(g * &(&hop + &hop.adjoint()));
    }
    h.into_hermitian()
}

/// Space `[qubit × N, clock]`, bus eliminated to second order:
///
/// Σ_{n_a} |n_a⟩⟨n_a| [Σ_{j<j'} g_j g_j'/Δ_{b,n_a} (σ⁺_jσ⁻_j' + h.c.) + Σ_j g_j²/(2Δ_{b,n_a}) σᶻ_j]
///
/// With `include_zz` the fourth-order Σ_{j<j'} 2g_j²g_j'²/Δ³_{b,n_a} σᶻ_jσᶻ_j' is added. With
/// η = 2Δ_b this is the (1 − 2a†a) form. The lab frame adds ω_a n_a + (ε/2)Σσᶻ.
pub fn build_nonlocal_effective(params: &ModelParams, include_zz: bool, frame: Frame) -> Result<Operator> {
    params.validate()?;
    let n = params.n_sites;
    let mut sites = vec![SiteKind::Qubit; n];
    sites.push(SiteKind::Clock);
    let space = make_space(sites)?;
    let clock = n;
    let g = &params.g_site;

    let z = (0..n).map(|j| local_operator(&space, j, LocalOp::SigmaZ)).collect::<Result<Vec<_>>>()?;
    let plus = (0..n).map(|j| local_operator(&space, j, LocalOp::SigmaPlus)).collect::<Result<Vec<_>>>()?;

    let mut h = Operator::zeros(&space);
    for n_a in 0..2 {
        let d = params.nonlocal_detuning(n_a)?;
        let d3 = d * d * d;
        let mut block = Operator::zeros(&space);
        for j in 0..n {
            for k in j + 1..n {
                let flip = &plus[j] * &plus[k].adjoint();
                block = &block + &((g[j] * g[k] / d) * &(&flip + &flip.adjoint()));
                if include_zz {
                    let gg = g[j] * g[j] * g[k] * g[k];
                    block = &block + &((2.0 * gg / d3) * &(&z[j] * &z[k]));
                }
            }
            block = &block + &((g[j] * g[j] / (2.0 * d)) * &z[j]);
        }
        let proj = local_operator(&space, clock, LocalOp::ClockProjector(n_a))?;
        h = &h + &(&proj * &block);
    }
    if frame == Frame::Lab {
        h = &h + &(params.omega_a * &local_operator(&space, clock, LocalOp::ClockProjector(1))?);
        for zj in &z {
            h = &h + &((0.5 * params.epsilon) * zj);
        }
    }
    h.into_hermitian()
}

#[cfg(test)]
mod tests {
    use super::super::{solve_sign_condition, SignModel};
    use super::*;

    fn params(g: Vec<f64>) -> ModelParams {
        ModelParams {
            omega_a: 5800.0,
            omega_b: 4950.0,
            epsilon: 5000.0,
            eta: 100.0,
            chi: 0.0,
            g_a: 0.0,
            n_sites: g.len(),
            g_site: g,
            n_max: 3,
            hardcore: false,
            periodic: false,
        }
    }

    #[test]
    fn decoupled_microscopic_is_diagonal() {
        let h = build_nonlocal_microscopic(&params(vec![0.0, 0.0]), Frame::Lab).unwrap();
        assert!(h.matrix().iter().all(|(r, c, _)| r == c));
    }

    #[test]
    fn microscopic_conserves_clock_number() {
        for frame in [Frame::Lab, Frame::Rotating] {
            let h = build_nonlocal_microscopic(&params(vec![5.0]), frame).unwrap();
            assert_eq!(h.clock_coupling().unwrap(), 0.0);
        }
    }

    #[test]
    fn flip_flop_splitting_in_one_excitation_sector() {
        // rotating frame, n_a = 0, basis {|1,↓↓⟩, |0,↑↓⟩, |0,↓↑⟩}
        let p = params(vec![5.0, 5.0]);
        let h = build_nonlocal_microscopic(&p, Frame::Rotating).unwrap();
        let s = h.space().clone();
        let basis: Vec<usize> =
            [[1, 1, 1, 0], [0, 0, 1, 0], [0, 1, 0, 0]].iter().map(|l| s.index_of(l).unwrap()).collect();
        let block = h.matrix().restrict(&basis).to_dense().map(|v| v.re);
        let mut ev: Vec<f64> = block.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let splitting = ev[2] - ev[1];
        // (−Δ + √(Δ² + 8g²))/2 from the 3 × 3 secular equation
        assert!((splitting - 0.980_762_113_533_16).abs() < 1e-10);
        assert!((splitting - 1.0).abs() < 0.02);
    }

    #[test]
    fn effective_blocks_flip_sign_exactly() {
        let p = solve_sign_condition(&params(vec![5.0, 3.7, 6.1]), SignModel::Nonlocal).unwrap();
        let h = build_nonlocal_effective(&p, true, Frame::Rotating).unwrap();
        let b0 = h.clock_sector(0).unwrap();
        let b1 = h.clock_sector(1).unwrap();
        assert_eq!(b1.matrix().max_abs_diff(&b0.matrix().scale((-1.0).into())), 0.0);
    }

    #[test]
    fn zz_coefficient_for_uniform_couplings() {
        let p = params(vec![5.0, 5.0]);
        let with = build_nonlocal_effective(&p, true, Frame::Rotating).unwrap();
        let without = build_nonlocal_effective(&p, false, Frame::Rotating).unwrap();
        let diff = &with - &without;
        // ⟨↑↑, n_a=0| ZZ |↑↑, n_a=0⟩
        let idx = diff.space().index_of(&[0, 0, 0]).unwrap();
        assert!((diff.get(idx, idx).re - 2.0 * 625.0 / 125_000.0).abs() < 1e-15);
    }

    #[test]
    fn zero_coupling_effective_vanishes() {
        let h = build_nonlocal_effective(&params(vec![0.0; 3]), false, Frame::Rotating).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn singular_detuning_is_reported() {
        let mut p = params(vec![1.0]);
        p.eta = p.delta_b();
        assert_eq!(
            build_nonlocal_effective(&p, false, Frame::Rotating).unwrap_err(),
            crate::error::Error::SingularDetuning(1)
        );
    }
}
