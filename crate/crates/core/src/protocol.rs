//! The clock interferometer.
//!
//! The system and the clock are stored as two system-only vectors, one per
//! clock basis state. The clock couples as H_tot = −τᶻ ⊗ H, so the component
//! on |1_a⟩ evolves forward (e^{−iHt}) and the component on |0_a⟩ backward.
//! The protocol starts on |0_a⟩; the conditional operations C_{O,1} act on the
//! |1_a⟩ component, which therefore ends up holding |R⟩, while |0_a⟩ holds
//! |L⟩.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{conditional_propagate, spectral_decompose, EigenSystem};
use crate::error::{Error, Result};
use crate::hilbert::{inner, HilbertSpace, Operator, StateVector, C64};

/// Clock basis state whose component evolves forward in time.
pub const FORWARD_CLOCK_LEVEL: usize = 1;

#[derive(Clone, Debug)]
pub struct BranchedState {
    /// Component on |1_a⟩.
    fwd: StateVector,
    /// Component on |0_a⟩.
    bwd: StateVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Fwd,
    Bwd,
}

impl BranchedState {
    pub fn from_branches(fwd: StateVector, bwd: StateVector) -> Result<Self> {
        if !Arc::ptr_eq(fwd.space(), bwd.space()) && **fwd.space() != **bwd.space() {
            return Err(Error::BadBranchSpace);
        }
        if fwd.space().clock_site().is_some() {
            return Err(Error::BadBranchSpace);
        }
        Ok(BranchedState { fwd, bwd })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.fwd.space()
    }

    pub fn fwd(&self) -> &StateVector {
        &self.fwd
    }

    pub fn bwd(&self) -> &StateVector {
        &self.bwd
    }

    /// Component on clock level `n_a`.
    pub fn clock_component(&self, n_a: usize) -> &StateVector {
        if n_a == FORWARD_CLOCK_LEVEL {
            &self.fwd
        } else {
            &self.bwd
        }
    }

    pub fn forward_clock_level(&self) -> usize {
        FORWARD_CLOCK_LEVEL
    }

    pub fn branch(&self, which: Branch) -> &StateVector {
        match which {
            Branch::Fwd => &self.fwd,
            Branch::Bwd => &self.bwd,
        }
    }

    /// ‖fwd‖² + ‖bwd‖².
    pub fn norm_sqr(&self) -> f64 {
        self.fwd.norm().powi(2) + self.bwd.norm().powi(2)
    }

    /// Full system ⊗ clock amplitudes, clock as the last (fastest) site.
    pub fn interleaved(&self) -> Vec<C64> {
        let (z, o) = (self.bwd.amplitudes(), self.fwd.amplitudes());
        z.iter().zip(o.iter()).flat_map(|(&a, &b)| [a, b]).collect()
    }

    fn map_clock(&self, m: [[C64; 2]; 2]) -> Self {
        // (|0_a⟩, |1_a⟩) components = (bwd, fwd)
        let z = self.bwd.amplitudes();
        let o = self.fwd.amplitudes();
        let new_z = z * m[0][0] + o * m[0][1];
        let new_o = z * m[1][0] + o * m[1][1];
        BranchedState {
            fwd: StateVector::with_amplitudes(self.space(), new_o),
            bwd: StateVector::with_amplitudes(self.space(), new_z),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseErrors {
    #[serde(default)]
    pub d_theta_prime: f64,
    #[serde(default)]
    pub d_theta_1: f64,
    #[serde(default)]
    pub d_theta_2: f64,
}

impl PulseErrors {
    pub const IDEAL: PulseErrors = PulseErrors { d_theta_prime: 0.0, d_theta_1: 0.0, d_theta_2: 0.0 };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureAxis {
    X,
    Y,
    #[default]
    Both,
}

#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    /// System-only Hamiltonian in the rotating frame.
    pub hamiltonian: Operator,
    pub psi0: StateVector,
    pub o1: Operator,
    pub o2: Operator,
    pub t: f64,
    pub errors: PulseErrors,
    pub measure_axis: MeasureAxis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub tau_x: Option<f64>,
    pub tau_y: Option<f64>,
    /// ⟨τˣ⟩ + i⟨τʸ⟩, present when both axes are measured.
    pub otoc: Option<C64>,
    /// 2⟨bwd|fwd⟩ on the final state, i.e. ⟨L|R⟩ for an ideal run.
    pub branch_overlap: C64,
    /// (‖fwd‖, ‖bwd‖) of the final state.
    pub norms: (f64, f64),
    /// False when O₁ or O₂ is not unitary, so the norm is not conserved.
    pub norm_conserving: bool,
}

/// Step 1: ψ₀ on |0_a⟩.
pub fn init_branched(psi0: &StateVector) -> Result<BranchedState> {
    if !psi0.is_normalized() {
        return Err(Error::NotNormalized(psi0.norm()));
    }
    BranchedState::from_branches(StateVector::zeros(psi0.space()), psi0.clone())
}

/// Step 2: R_y(π/2 + δθ′) on the clock. For a state on |0_a⟩ the weights are
/// √((1 − sin δθ′)/2) on |0_a⟩ and √((1 + sin δθ′)/2) on |1_a⟩.
pub fn hadamard_clock(bs: &BranchedState, d_theta_prime: f64) -> BranchedState {
    let half = 0.5 * (std::f64::consts::FRAC_PI_2 + d_theta_prime);
    let (c, s) = (C64::new(half.cos(), 0.0), C64::new(half.sin(), 0.0));
    bs.map_clock([[c, -s], [s, c]])
}

/// π pulse about x with angle error δθ, i·R_x(π + δθ). The ideal pulse swaps
/// the clock levels; the error leaves a −i sin(δθ/2) amplitude behind.
pub fn flip_clock(bs: &BranchedState, d_theta: f64) -> BranchedState {
    let stay = C64::new(0.0, -(0.5 * d_theta).sin());
    let swap = C64::new((0.5 * d_theta).cos(), 0.0);
    bs.map_clock([[stay, swap], [swap, stay]])
}

/// C_{O,1} (branch `Fwd`) or C_{O,0} (branch `Bwd`).
pub fn conditional_apply(bs: &BranchedState, op: &Operator, branch: Branch) -> Result<BranchedState> {
    let mut out = bs.clone();
    match branch {
        Branch::Fwd => out.fwd = op.apply(&bs.fwd)?,
        Branch::Bwd => out.bwd = op.apply(&bs.bwd)?,
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// ⟨τˣ⟩ = 2 Re⟨bwd|fwd⟩ and ⟨τʸ⟩ = 2 Im⟨bwd|fwd⟩, so that the protocol's
/// final state gives Re⟨L|R⟩ and +Im⟨L|R⟩.
pub fn measure_clock(bs: &BranchedState, axis: Axis) -> f64 {
    let overlap = 2.0 * bs.bwd.amplitudes().dotc(bs.fwd.amplitudes());
    match axis {
        Axis::X => overlap.re,
        Axis::Y => overlap.im,
    }
}

/// The full sequence, returning the final branched state.
pub fn run_oto_sequence(
    eig: &EigenSystem,
    psi0: &StateVector,
    o1: &Operator,
    o2: &Operator,
    t: f64,
    errors: &PulseErrors,
) -> Result<BranchedState> {
    let mut bs = init_branched(psi0)?;
    bs = hadamard_clock(&bs, errors.d_theta_prime);
    bs = conditional_apply(&bs, o1, Branch::Fwd)?;
    bs = conditional_propagate(eig, &bs, t)?;
    bs = conditional_apply(&bs, o2, Branch::Fwd)?;
    bs = flip_clock(&bs, errors.d_theta_1);
    bs = conditional_propagate(eig, &bs, 2.0 * t)?;
    bs = flip_clock(&bs, errors.d_theta_2);
    bs = conditional_apply(&bs, o2, Branch::Bwd)?;
    bs = conditional_propagate(eig, &bs, t)?;
    conditional_apply(&bs, o1, Branch::Bwd)
}

pub fn run_oto_protocol(spec: &ProtocolSpec) -> Result<ProtocolResult> {
    let eig = spectral_decompose(&spec.hamiltonian)?;
    run_oto_protocol_with(&eig, spec)
}

/// As [`run_oto_protocol`] with a precomputed decomposition of `spec.hamiltonian`.
pub fn run_oto_protocol_with(eig: &EigenSystem, spec: &ProtocolSpec) -> Result<ProtocolResult> {
    let bs = run_oto_sequence(eig, &spec.psi0, &spec.o1, &spec.o2, spec.t, &spec.errors)?;
    let overlap = C64::new(2.0, 0.0) * inner(bs.bwd(), bs.fwd())?;
    let (x, y) = match spec.measure_axis {
        MeasureAxis::X => (Some(measure_clock(&bs, Axis::X)), None),
        MeasureAxis::Y => (None, Some(measure_clock(&bs, Axis::Y))),
        MeasureAxis::Both => (Some(measure_clock(&bs, Axis::X)), Some(measure_clock(&bs, Axis::Y))),
    };
    let tol = 1e-10;
    Ok(ProtocolResult {
        tau_x: x,
        tau_y: y,
        otoc: x.zip(y).map(|(x, y)| C64::new(x, y)),
        branch_overlap: overlap,
        norms: (bs.fwd().norm(), bs.bwd().norm()),
        norm_conserving: spec.o1.is_unitary(tol) && spec.o2.is_unitary(tol),
    })
}

/// Upper bound on the noise term generated by flip-pulse errors:
///
/// |sin δθ₁| + |sin δθ₂| + |sin δθ₁||sin δθ₂| + sin²(δθ₁/2)(1 + |sin δθ₂|)
/// + sin²(δθ₂/2)(1 + |sin δθ₁|) + sin²(δθ₁/2) sin²(δθ₂/2)
pub fn noise_bound(d_theta_1: f64, d_theta_2: f64) -> f64 {
    let (s1, s2) = (d_theta_1.sin().abs(), d_theta_2.sin().abs());
    let (h1, h2) = ((0.5 * d_theta_1).sin().powi(2), (0.5 * d_theta_2).sin().powi(2));
    s1 + s2 + s1 * s2 + h1 * (1.0 + s2) + h2 * (1.0 + s1) + h1 * h2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Snr {
    Finite(f64),
    /// Both flip pulses ideal: no noise term at all.
    Noiseless,
}

/// cos²(δθ₁/2) cos²(δθ₂/2) |⟨L|R⟩| / (|sin δθ₁| + |sin δθ₂|).
pub fn snr(d_theta_1: f64, d_theta_2: f64, overlap_magnitude: f64) -> Snr {
    let denom = d_theta_1.sin().abs() + d_theta_2.sin().abs();
    if denom == 0.0 {
        return Snr::Noiseless;
    }
    let signal = (0.5 * d_theta_1).cos().powi(2) * (0.5 * d_theta_2).cos().powi(2);
    Snr::Finite(signal * overlap_magnitude / denom)
}
