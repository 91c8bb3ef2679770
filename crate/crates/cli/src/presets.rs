//! Named parameter sets for the published figures.

use oto_clock::models::{DisorderSpec, DisorderTarget, Distribution, ModelParams, SignModel};

use crate::config::{
    ChainFields, Ensemble, ErrorSection, ExperimentConfig, ExperimentKind, InitialState, ModelSection, OperatorSpec,
    OperatorsSection, Perturbation, TimeGrid,
};

pub const DEFAULT_CHAIN_LENGTH: usize = 8;

pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: [PresetInfo; 3] = [
    PresetInfo {
        name: "fig4_chain",
        summary: "disordered Heisenberg chain, L = 8 by default, fields uniform in [-0.5, 0.5]",
    },
    PresetInfo {
        name: "fig6_dimer",
        summary: "two cavities and one coupler: Δ_b = 50, Δ_a = -800, χ = -50, g_a = 200, g_b = 5, n_max = 3 (MHz)",
    },
    PresetInfo { name: "fig7_ring", summary: "three-cavity ring with three couplers, fig6_dimer frequencies" },
];

/// ε = 5000, ω_b = 4950, ω_a = 5800: Δ_b = 50, Δ_a = −800.
pub fn dimer_params() -> ModelParams {
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

pub fn ring_params() -> ModelParams {
    ModelParams { g_site: vec![5.0; 3], n_sites: 3, periodic: true, ..dimer_params() }
}

pub fn chain_fields(seed: u64) -> DisorderSpec {
    DisorderSpec { distribution: Distribution::Uniform { lo: -0.5, hi: 0.5 }, target: DisorderTarget::FieldH, seed }
}

fn cavity_defaults(params: ModelParams, experiment: ExperimentKind, g_values: Vec<f64>) -> ExperimentConfig {
    let n = params.n_sites;
    let mut levels = vec![0; n];
    levels[0] = 1;
    ExperimentConfig {
        experiment: Some(experiment),
        model: Some(ModelSection::Local { params, order: 2, sign_condition: Some(SignModel::Local) }),
        operators: Some(OperatorsSection { o1: OperatorSpec::at("n", 0), o2: OperatorSpec::at("n", n - 1) }),
        psi0: Some(InitialState::Levels { levels }),
        time: Some(TimeGrid { start: 0.0, stop: 20.0, points: 41 }),
        errors: Some(ErrorSection { max_angle: Some(0.3), deltas: Some(vec![0.02, 0.05]), ..Default::default() }),
        ensemble: Some(Ensemble { n_samples: 100, seed: 1 }),
        perturbation: Some(Perturbation { op: OperatorSpec::at("n", 0), strength: 0.05 }),
        g_values: Some(g_values),
        ..Default::default()
    }
}

/// Defaults of a preset. `chain_length` sizes `fig4_chain` and the site of
/// its second operator, σᶻ on the next-to-last site.
pub fn preset_defaults(name: &str, chain_length: Option<usize>) -> anyhow::Result<ExperimentConfig> {
    Ok(match name {
        "fig4_chain" => {
            let l = chain_length.unwrap_or(DEFAULT_CHAIN_LENGTH);
            if l < 4 {
                anyhow::bail!("fig4_chain needs L >= 4, got {l}");
            }
            ExperimentConfig {
                experiment: Some(ExperimentKind::SwitchSweep),
                model: Some(ModelSection::Chain { l, fields: ChainFields::Random(chain_fields(12)) }),
                operators: Some(OperatorsSection {
                    o1: OperatorSpec::at("sigma_z", 1),
                    o2: OperatorSpec::at("sigma_z", l - 2),
                }),
                psi0: Some(InitialState::Neel),
                time: Some(TimeGrid { start: 0.0, stop: 10.0, points: 21 }),
                errors: Some(ErrorSection {
                    max_angle: Some(0.3),
                    deltas: Some(vec![0.02, 0.05]),
                    ..Default::default()
                }),
                ensemble: Some(Ensemble { n_samples: 100, seed: 1 }),
                perturbation: Some(Perturbation { op: OperatorSpec::at("sigma_z", 0), strength: 0.05 }),
                ..Default::default()
            }
        }
        "fig6_dimer" => {
            cavity_defaults(dimer_params(), ExperimentKind::Spectra, (1..=10).map(|k| 0.5 * k as f64).collect())
        }
        "fig7_ring" => cavity_defaults(ring_params(), ExperimentKind::RingCheck, vec![1.0, 2.0, 3.0, 4.0, 5.0]),
        other => {
            let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
            anyhow::bail!("unknown preset `{other}`; available: {}", names.join(", "))
        }
    })
}
