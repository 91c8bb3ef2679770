//! Merging flags, configuration file and preset into one experiment.
//!
//! Precedence is flag, then config, then preset default.

use anyhow::{bail, Context};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{
    ChainFields, Ensemble, ErrorSection, ExperimentConfig, ExperimentKind, Format, InitialState, ModelSection,
    OperatorsSection, Perturbation, TimeGrid,
};
use crate::presets::preset_defaults;

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<ExperimentKind>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub chain_length: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<String>,
}

/// A fully specified experiment. Serialized canonically for the config hash.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: ExperimentKind,
    pub preset: Option<String>,
    pub model: ModelSection,
    pub operators: Option<OperatorsSection>,
    pub psi0: Option<InitialState>,
    pub time: Option<TimeGrid>,
    pub errors: ErrorSection,
    pub ensemble: Ensemble,
    pub beta: Option<f64>,
    pub perturbation: Option<Perturbation>,
    pub g_values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputTarget {
    pub path: Option<String>,
    pub format: Format,
}

impl Resolved {
    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("resolved configs serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn operators(&self) -> anyhow::Result<&OperatorsSection> {
        self.operators.as_ref().with_context(|| format!("`{}` needs an operators section", self.experiment))
    }

    pub fn psi0(&self) -> anyhow::Result<&InitialState> {
        self.psi0.as_ref().with_context(|| format!("`{}` needs a psi0 section", self.experiment))
    }

    pub fn time(&self) -> anyhow::Result<&TimeGrid> {
        self.time.as_ref().with_context(|| format!("`{}` needs a time section", self.experiment))
    }
}

fn chain_length_of(model: Option<&ModelSection>) -> Option<usize> {
    match model {
        Some(ModelSection::Chain { l, .. }) => Some(*l),
        _ => None,
    }
}

pub fn resolve(config: Option<ExperimentConfig>, flags: &Overrides) -> anyhow::Result<(Resolved, OutputTarget)> {
    let config = config.unwrap_or_default();
    let preset = flags.preset.clone().or_else(|| config.preset.clone());
    let length = flags.chain_length.or_else(|| chain_length_of(config.model.as_ref()));
    let defaults = match &preset {
        Some(name) => preset_defaults(name, length)?,
        None => ExperimentConfig::default(),
    };

    let experiment = flags
        .experiment
        .or(config.experiment)
        .or(defaults.experiment)
        .context("no experiment given: use --experiment, an `experiment` key, or a preset")?;
    let mut model = config.model.or(defaults.model).context("no model given: add a `model` section or a preset")?;
    if let Some(l) = flags.chain_length {
        match &mut model {
            ModelSection::Chain { l: current, fields } => {
                if let ChainFields::Explicit(v) = fields {
                    if v.len() != l {
                        bail!("--L {l} conflicts with {} explicit chain fields", v.len());
                    }
                }
                *current = l;
            }
            _ => bail!("--L applies to chain models only"),
        }
    }
    let mut ensemble = config.ensemble.or(defaults.ensemble).unwrap_or(Ensemble { n_samples: 100, seed: 0 });
    if let Some(seed) = flags.seed {
        ensemble.seed = seed;
    }

    let resolved = Resolved {
        experiment,
        preset,
        model,
        operators: config.operators.or(defaults.operators),
        psi0: config.psi0.or(defaults.psi0),
        time: config.time.or(defaults.time),
        errors: config.errors.or(defaults.errors).unwrap_or_default(),
        ensemble,
        beta: config.beta.or(defaults.beta),
        perturbation: config.perturbation.or(defaults.perturbation),
        g_values: config.g_values.or(defaults.g_values),
    };
    if let Some(t) = &resolved.time {
        t.validate()?;
    }
    let output = config.output.unwrap_or_default();
    let target = OutputTarget {
        path: flags.out.clone().or(output.path),
        format: flags.format.or(output.format).unwrap_or_default(),
    };
    Ok((resolved, target))
}
