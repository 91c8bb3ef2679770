use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderTarget {
    GSite,
    FieldH,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub distribution: Distribution,
    pub target: DisorderTarget,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        match self.distribution {
            Distribution::Uniform { lo, hi } if lo >= hi || !lo.is_finite() || !hi.is_finite() => {
                Err(Error::InvalidDisorder(format!("uniform bounds [{lo}, {hi}]")))
            }
            Distribution::Gaussian { mean, std } if std < 0.0 || !mean.is_finite() || !std.is_finite() => {
                Err(Error::InvalidDisorder(format!("gaussian mean {mean}, std {std}")))
            }
            _ => Ok(()),
        }
    }
}

/// `count` draws from realization 0 of `spec`.
pub fn sample_disorder(spec: &DisorderSpec, count: usize) -> Result<Vec<f64>> {
    sample_disorder_realization(spec, 0, count)
}

/// `count` draws from the stream `(spec.seed, realization)`.
///
/// Each realization owns an independent ChaCha stream, so realizations can be
/// generated in any order or in parallel without changing their values.
pub fn sample_disorder_realization(spec: &DisorderSpec, realization: u64, count: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, realization);
    Ok(match spec.distribution {
        Distribution::Uniform { lo, hi } => (0..count).map(|_| rng.random_range(lo..=hi)).collect(),
        Distribution::Gaussian { mean, std } => {
            let normal = Normal::new(mean, std).map_err(|e| Error::InvalidDisorder(e.to_string()))?;
            (0..count).map(|_| normal.sample(&mut rng)).collect()
        }
    })
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
