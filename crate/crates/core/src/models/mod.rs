//! Hamiltonian builders for the clock-controlled cavity-QED models.
//!
//! All frequencies are angular, in MHz, with ħ = 1. Two detunings appear
//! throughout: Δ_b = ε − ω_b and Δ_a = ε − ω_a. The ancilla-dependent
//! detuning Δ_{b,n_a} differs between the two architectures:
//!
//! * nonlocal (qubits on a shared bus): Δ_{b,n_a} = Δ_b − η n_a
//! * local (cavities linked by qubits):  Δ_{b,n_a} = Δ_b + 2χ n_a

mod disorder;
mod heisenberg;
mod local;
mod nonlocal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use disorder::stream_rng as disorder_stream;
pub use disorder::{sample_disorder, sample_disorder_realization, DisorderSpec, DisorderTarget, Distribution};
pub use heisenberg::build_disordered_heisenberg;
pub use local::{
    build_complete_second_order, build_local_effective, build_local_microscopic, local_all_down_basis, LocalLattice,
};
pub use nonlocal::{build_nonlocal_effective, build_nonlocal_microscopic};

/// Reference frame of a builder. Rotating-frame builders drop the bare
/// cavity (local) or qubit (nonlocal) frequency, and the ancilla energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Rotating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub epsilon: f64,
    /// Cross-Kerr coupling between bus and ancilla (nonlocal model).
    pub eta: f64,
    /// Dispersive shift of the qubits by the ancilla (local model).
    pub chi: f64,
    pub g_a: f64,
    /// One coupling per cavity (local) or per qubit (nonlocal).
    pub g_site: Vec<f64>,
    #[serde(rename = "n")]
    pub n_sites: usize,
    pub n_max: usize,
    #[serde(default)]
    pub hardcore: bool,
    #[serde(default)]
    pub periodic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignModel {
    Nonlocal,
    Local,
    LocalJc,
}

impl ModelParams {
    pub fn delta_a(&self) -> f64 {
        self.epsilon - self.omega_a
    }

    pub fn delta_b(&self) -> f64 {
        self.epsilon - self.omega_b
    }

    pub fn nonlocal_detuning(&self, n_a: usize) -> Result<f64> {
        let d = self.delta_b() - self.eta * sector_weight(n_a)?;
        nonzero(d, n_a)
    }

    pub fn local_detuning(&self, n_a: usize) -> Result<f64> {
        let d = self.delta_b() + 2.0 * self.chi * sector_weight(n_a)?;
        nonzero(d, n_a)
    }

    /// Effective boson cutoff: 1 in hardcore mode.
    pub fn cutoff(&self) -> usize {
        if self.hardcore {
            1
        } else {
            self.n_max
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scalars = [self.omega_a, self.omega_b, self.epsilon, self.eta, self.chi, self.g_a];
        if scalars.iter().chain(&self.g_site).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite frequency or coupling".into()));
        }
        if self.n_sites == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(Error::BosonCutoff);
        }
        if self.g_site.len() != self.n_sites {
            return Err(Error::CouplingLength { expected: self.n_sites, got: self.g_site.len() });
        }
        Ok(())
    }

    /// Returns `g_site` if every entry is equal.
    pub fn uniform_coupling(&self) -> Option<f64> {
        let first = *self.g_site.first()?;
        self.g_site.iter().all(|&g| g == first).then_some(first)
    }
}

fn sector_weight(n_a: usize) -> Result<f64> {
    match n_a {
        0 => Ok(0.0),
        1 => Ok(1.0),
        _ => Err(Error::BadSector(n_a)),
    }
}

fn nonzero(d: f64, n_a: usize) -> Result<f64> {
    if d == 0.0 {
        Err(Error::SingularDetuning(n_a))
    } else {
        Ok(d)
    }
}

/// Overwrites the dependent parameter so that Δ_{b,1} = −Δ_{b,0}.
///
/// `Nonlocal` sets η = 2Δ_b, `Local` sets χ = −Δ_b, and `LocalJc` sets
/// g_a = √(−Δ_aΔ_b) together with the dispersive shift it induces,
/// χ = g_a²/Δ_a = −Δ_b.
pub fn solve_sign_condition(params: &ModelParams, model: SignModel) -> Result<ModelParams> {
    let mut out = params.clone();
    let db = params.delta_b();
    match model {
        SignModel::Nonlocal => out.eta = 2.0 * db,
        SignModel::Local => out.chi = -db,
        SignModel::LocalJc => {
            let da = params.delta_a();
            let product = da * db;
            if product >= 0.0 {
                return Err(Error::NoRealSolution(product));
            }
            out.g_a = (-product).sqrt();
            // g_a²/Δ_a in exact arithmetic; assigned directly so Δ_{b,1} = −Δ_b holds bit for bit
            out.chi = -db;
        }
    }
    Ok(out)
}
