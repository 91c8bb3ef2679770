//! Experiment configuration files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context};
use oto_clock::models::{DisorderSpec, ModelParams, SignModel};
use oto_clock::{local_operator, HilbertSpace, LocalOp, Operator, SiteKind};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    Oracle,
    Protocol,
    SwitchSweep,
    PulseSweep,
    Spectra,
    RingCheck,
    Loschmidt,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        write!(f, "{}", s.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// On-site fields of the Heisenberg chain: explicit values or a seeded draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainFields {
    Explicit(Vec<f64>),
    Random(DisorderSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSection {
    /// Open Heisenberg chain with on-site fields.
    Chain { l: usize, fields: ChainFields },
    /// Cavity lattice with coupler qubits. As a protocol system the
    /// rotating-frame effective Hamiltonian of the given order is used.
    Local {
        params: ModelParams,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default)]
        sign_condition: Option<SignModel>,
    },
    /// Qubits on a shared bus.
    Nonlocal {
        params: ModelParams,
        #[serde(default)]
        zz: bool,
        #[serde(default)]
        sign_condition: Option<SignModel>,
    },
}

fn default_order() -> usize {
    2
}

/// `name@site`, or `identity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    pub name: String,
    pub site: Option<usize>,
}

impl OperatorSpec {
    pub fn at(name: &str, site: usize) -> Self {
        OperatorSpec { name: name.into(), site: Some(site) }
    }

    fn local_op(&self) -> anyhow::Result<LocalOp> {
        Ok(match self.name.as_str() {
            "sigma_x" => LocalOp::SigmaX,
            "sigma_y" => LocalOp::SigmaY,
            "sigma_z" => LocalOp::SigmaZ,
            "sigma_plus" => LocalOp::SigmaPlus,
            "sigma_minus" => LocalOp::SigmaMinus,
            "a" => LocalOp::Annihilate,
            "adag" => LocalOp::Create,
            "n" => LocalOp::Number,
            other => bail!("unknown operator `{other}`"),
        })
    }

    pub fn build(&self, space: &Arc<HilbertSpace>) -> anyhow::Result<Operator> {
        match (self.name.as_str(), self.site) {
            ("identity", None) => Ok(Operator::identity(space)),
            (_, None) => bail!("operator `{}` needs a site, as in {}@0", self.name, self.name),
            (_, Some(site)) => {
                if site >= space.num_sites() {
                    bail!("site {site} of `{self}` is out of range (system has {} sites)", space.num_sites());
                }
                Ok(local_operator(space, site, self.local_op()?).with_context(|| format!("building `{self}`"))?)
            }
        }
    }

    pub fn is_hermitian_name(&self) -> bool {
        matches!(self.name.as_str(), "sigma_x" | "sigma_y" | "sigma_z" | "n" | "identity")
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            Some(s) => write!(f, "{}@{}", self.name, s),
            None => write!(f, "{}", self.name),
        }
    }
}

impl FromStr for OperatorSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let spec = match s.split_once('@') {
            None => OperatorSpec { name: s.trim().into(), site: None },
            Some((name, site)) => OperatorSpec {
                name: name.trim().into(),
                site: Some(site.trim().parse().with_context(|| format!("bad site in `{s}`"))?),
            },
        };
        if spec.name != "identity" {
            spec.local_op()?;
        } else if spec.site.is_some() {
            bail!("`identity` takes no site");
        }
        Ok(spec)
    }
}

impl Serialize for OperatorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorsSection {
    pub o1: OperatorSpec,
    pub o2: OperatorSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// One level per system site.
    Levels { levels: Vec<usize> },
    /// Qubits alternate up, down, up, ...; bosons empty.
    Neel,
    /// Lowest eigenvector of the system Hamiltonian.
    Ground,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.start >= 0.0 && self.stop >= self.start && self.stop.is_finite()) {
            bail!("time grid must satisfy 0 <= start <= stop, got [{}, {}]", self.start, self.stop);
        }
        if self.points == 0 || (self.points == 1 && self.stop != self.start) {
            bail!("time grid needs at least two points to span [{}, {}]", self.start, self.stop);
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|k| if k + 1 == self.points { self.stop } else { self.start + step * k as f64 }).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSection {
    #[serde(default)]
    pub d_theta_prime: f64,
    #[serde(default)]
    pub d_theta_1: f64,
    #[serde(default)]
    pub d_theta_2: f64,
    /// Half-width of the uniform angle draws of `pulse_sweep`.
    #[serde(default)]
    pub max_angle: Option<f64>,
    /// Standard deviations of ε for `switch_sweep`.
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub op: OperatorSpec,
    pub strength: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// A configuration file. Every section is optional when a preset supplies it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<OperatorsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi0: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Ensemble>,
    /// Inverse temperature for `oracle`; absent means the pure state ψ₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    /// Coupling values swept by `spectra` and `ring_check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow::anyhow!("line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Site kinds named in error messages.
pub fn describe_space(space: &HilbertSpace) -> String {
    space
        .sites()
        .iter()
        .map(|k| match k {
            SiteKind::Qubit => "qubit".to_string(),
            SiteKind::Boson { n_max } => format!("boson({n_max})"),
            SiteKind::Clock => "clock".to_string(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}
