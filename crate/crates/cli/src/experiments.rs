//! The experiment kinds, each producing one result table.

use anyhow::{bail, Context};
use oto_clock::dynamics::{spectral_decompose, EigenSystem};
use oto_clock::models::{
    build_disordered_heisenberg, build_local_effective, build_local_microscopic, build_nonlocal_effective,
    sample_disorder, solve_sign_condition, DisorderTarget, Frame, ModelParams,
};
use oto_clock::oracle::{loschmidt_echo, otoc_pure_with, otoc_thermal_with, relative_switch_error};
use oto_clock::protocol::{measure_clock, noise_bound, run_oto_sequence, snr, Axis, PulseErrors, Snr};
use oto_clock::spectra::{
    classify_manifold, compare_local_model, manifold_splitting, ring_degeneracy_signature, sector_spectrum,
    OffsetPolicy, COMPARED_MANIFOLDS,
};
use oto_clock::{Operator, SiteKind, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{describe_space, ChainFields, ExperimentKind, InitialState, ModelSection};
use crate::output::{Cell, Table};
use crate::resolve::Resolved;

/// The system Hamiltonian seen by the protocol. For the cavity models this is
/// the n_a = 1 block of the rotating-frame effective Hamiltonian, the block
/// that the clock's |1⟩ level evolves forward with.
pub fn system_hamiltonian(model: &ModelSection) -> anyhow::Result<Operator> {
    Ok(match model {
        ModelSection::Chain { l, fields } => {
            let h = match fields {
                ChainFields::Explicit(v) => {
                    if v.len() != *l {
                        bail!("chain has L = {l} but {} fields", v.len());
                    }
                    v.clone()
                }
                ChainFields::Random(spec) => {
                    if spec.target != DisorderTarget::FieldH {
                        bail!("chain fields need a field_h disorder target");
                    }
                    sample_disorder(spec, *l)?
                }
            };
            build_disordered_heisenberg(&h)?
        }
        ModelSection::Local { .. } | ModelSection::Nonlocal { .. } => {
            let (params, _) = cavity_params(model)?;
            let h = match model {
                ModelSection::Local { order, .. } => build_local_effective(&params, *order, Frame::Rotating)?,
                ModelSection::Nonlocal { zz, .. } => build_nonlocal_effective(&params, *zz, Frame::Rotating)?,
                ModelSection::Chain { .. } => unreachable!(),
            };
            h.clock_sector(1)?
        }
    })
}

/// Model parameters with the sign condition applied, and whether the model is local.
fn cavity_params(model: &ModelSection) -> anyhow::Result<(ModelParams, bool)> {
    let (params, cond, local) = match model {
        ModelSection::Local { params, sign_condition, .. } => (params, sign_condition, true),
        ModelSection::Nonlocal { params, sign_condition, .. } => (params, sign_condition, false),
        ModelSection::Chain { .. } => bail!("this experiment needs a cavity model"),
    };
    params.validate()?;
    let p = match cond {
        Some(m) => solve_sign_condition(params, *m)?,
        None => params.clone(),
    };
    Ok((p, local))
}

fn initial_state(spec: &InitialState, eig: &EigenSystem) -> anyhow::Result<StateVector> {
    let space = eig.space();
    Ok(match spec {
        InitialState::Levels { levels } => StateVector::from_levels(space, levels)
            .with_context(|| format!("psi0 levels {levels:?} do not fit the system ({})", describe_space(space)))?,
        InitialState::Neel => {
            let mut q = 0;
            let levels: Vec<usize> = space
                .sites()
                .iter()
                .map(|k| match k {
                    SiteKind::Qubit => {
                        q += 1;
                        (q + 1) % 2
                    }
                    _ => 0,
                })
                .collect();
            StateVector::from_levels(space, &levels)?
        }
        InitialState::Ground => eig.eigenvector(0),
    })
}

struct System {
    eig: EigenSystem,
    psi: StateVector,
    o1: Operator,
    o2: Operator,
}

fn system(r: &Resolved) -> anyhow::Result<System> {
    let h = system_hamiltonian(&r.model)?;
    let eig = spectral_decompose(&h)?;
    let ops = r.operators()?;
    let space = h.space();
    Ok(System { psi: initial_state(r.psi0()?, &eig)?, o1: ops.o1.build(space)?, o2: ops.o2.build(space)?, eig })
}

pub fn run_experiment(r: &Resolved) -> anyhow::Result<Table> {
    match r.experiment {
        ExperimentKind::Oracle => oracle(r),
        ExperimentKind::Protocol => protocol(r),
        ExperimentKind::SwitchSweep => switch_sweep(r),
        ExperimentKind::PulseSweep => pulse_sweep(r),
        ExperimentKind::Spectra => spectra(r),
        ExperimentKind::RingCheck => ring_check(r),
        ExperimentKind::Loschmidt => loschmidt(r),
    }
}

fn complex_cells(z: C64) -> [Cell; 3] {
    [z.re.into(), z.im.into(), z.norm().into()]
}

fn oracle(r: &Resolved) -> anyhow::Result<Table> {
    let s = system(r)?;
    let times = r.time()?.values();
    let values: Vec<C64> = times
        .par_iter()
        .map(|&t| match r.beta {
            Some(beta) => otoc_thermal_with(&s.eig, beta, &s.o1, &s.o2, t),
            None => otoc_pure_with(&s.eig, &s.psi, &s.o1, &s.o2, t),
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["t", "re", "im", "abs"]);
    table.meta("average", r.beta.map_or("pure state psi0".to_string(), |b| format!("thermal, beta = {b}")));
    for (t, z) in times.iter().zip(values) {
        let [a, b, c] = complex_cells(z);
        table.push(vec![(*t).into(), a, b, c]);
    }
    Ok(table)
}

fn pulse_errors(r: &Resolved) -> PulseErrors {
    PulseErrors { d_theta_prime: r.errors.d_theta_prime, d_theta_1: r.errors.d_theta_1, d_theta_2: r.errors.d_theta_2 }
}

struct Readout {
    tau_x: f64,
    tau_y: f64,
    norm_fwd: f64,
    norm_bwd: f64,
}

fn readout(s: &System, t: f64, errors: &PulseErrors) -> anyhow::Result<Readout> {
    let bs = run_oto_sequence(&s.eig, &s.psi, &s.o1, &s.o2, t, errors)?;
    Ok(Readout {
        tau_x: measure_clock(&bs, Axis::X),
        tau_y: measure_clock(&bs, Axis::Y),
        norm_fwd: bs.fwd().norm(),
        norm_bwd: bs.bwd().norm(),
    })
}

fn protocol(r: &Resolved) -> anyhow::Result<Table> {
    let s = system(r)?;
    let errors = pulse_errors(r);
    let times = r.time()?.values();
    let rows: Vec<Vec<Cell>> = times
        .par_iter()
        .map(|&t| -> anyhow::Result<Vec<Cell>> {
            let res = readout(&s, t, &errors)?;
            let exact = otoc_pure_with(&s.eig, &s.psi, &s.o1, &s.o2, t)?;
            let otoc = C64::new(res.tau_x, res.tau_y);
            Ok(vec![
                t.into(),
                res.tau_x.into(),
                res.tau_y.into(),
                exact.re.into(),
                exact.im.into(),
                (otoc - exact).norm().into(),
                res.norm_fwd.into(),
                res.norm_bwd.into(),
                (s.o1.is_unitary(1e-10) && s.o2.is_unitary(1e-10)).into(),
            ])
        })
        .collect::<anyhow::Result<_>>()?;
    let mut table = Table::new(&[
        "t",
        "tau_x",
        "tau_y",
        "oracle_re",
        "oracle_im",
        "deviation",
        "norm_fwd",
        "norm_bwd",
        "norm_conserving",
    ]);
    table.meta("pulse_errors", format!("{} {} {}", errors.d_theta_prime, errors.d_theta_1, errors.d_theta_2));
    table.rows = rows;
    Ok(table)
}

fn switch_sweep(r: &Resolved) -> anyhow::Result<Table> {
    let s = system(r)?;
    let deltas = r.errors.deltas.clone().context("switch_sweep needs errors.deltas")?;
    let times = r.time()?.values();
    let mut table = Table::new(&[
        "delta",
        "t",
        "mean_re",
        "mean_im",
        "mean_abs",
        "pure_re",
        "pure_im",
        "rel_err",
        "rel_err_re",
        "rel_err_im",
        "rel_err_re_signed",
    ]);
    let f0 = otoc_pure_with(&s.eig, &s.psi, &s.o1, &s.o2, 0.0)?;
    table.meta("pure_t0", format!("{:.16e} {:+.16e}i", f0.re, f0.im));
    table.meta("normalization", "none; correlators are raw values");
    table.meta("n_samples", r.ensemble.n_samples);
    for &delta in &deltas {
        for &t in &times {
            let st =
                relative_switch_error(&s.eig, &s.psi, &s.o1, &s.o2, t, delta, r.ensemble.n_samples, r.ensemble.seed)?;
            let signed = (st.pure.re != 0.0).then(|| st.mean.re / st.pure.re - 1.0);
            let [a, b, c] = complex_cells(st.mean);
            table.push(vec![
                delta.into(),
                t.into(),
                a,
                b,
                c,
                st.pure.re.into(),
                st.pure.im.into(),
                st.relative_error.into(),
                st.relative_error_re.into(),
                st.relative_error_im.into(),
                signed.into(),
            ]);
        }
    }
    Ok(table)
}

/// Angles (δθ′, δθ₁, δθ₂) of draw `k`, uniform in [−max, max].
pub fn pulse_draw(seed: u64, k: u64, max_angle: f64) -> PulseErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let mut a = || if max_angle > 0.0 { rng.random_range(-max_angle..=max_angle) } else { 0.0 };
    PulseErrors { d_theta_prime: a(), d_theta_1: a(), d_theta_2: a() }
}

fn pulse_sweep(r: &Resolved) -> anyhow::Result<Table> {
    let s = system(r)?;
    let max_angle = r.errors.max_angle.context("pulse_sweep needs errors.max_angle")?;
    let times = r.time()?.values();
    let exact: Vec<C64> =
        times.iter().map(|&t| otoc_pure_with(&s.eig, &s.psi, &s.o1, &s.o2, t)).collect::<Result<_, _>>()?;
    let rows: Vec<Vec<Vec<Cell>>> = (0..r.ensemble.n_samples as u64)
        .into_par_iter()
        .map(|k| -> anyhow::Result<Vec<Vec<Cell>>> {
            let e = pulse_draw(r.ensemble.seed, k, max_angle);
            times
                .iter()
                .zip(&exact)
                .map(|(&t, lr)| {
                    let res = readout(&s, t, &e)?;
                    let tau_x = res.tau_x;
                    let signal = e.d_theta_prime.cos()
                        * (0.5 * e.d_theta_1).cos().powi(2)
                        * (0.5 * e.d_theta_2).cos().powi(2)
                        * lr.re;
                    let bound = noise_bound(e.d_theta_1, e.d_theta_2);
                    let ratio = match snr(e.d_theta_1, e.d_theta_2, lr.norm()) {
                        Snr::Finite(x) => x,
                        Snr::Noiseless => f64::INFINITY,
                    };
                    Ok(vec![
                        (k as usize).into(),
                        t.into(),
                        e.d_theta_prime.into(),
                        e.d_theta_1.into(),
                        e.d_theta_2.into(),
                        tau_x.into(),
                        res.tau_y.into(),
                        signal.into(),
                        (tau_x - signal).into(),
                        bound.into(),
                        ((tau_x - signal).abs() <= bound + 1e-9).into(),
                        ratio.into(),
                    ])
                })
                .collect()
        })
        .collect::<anyhow::Result<_>>()?;
    let mut table = Table::new(&[
        "sample",
        "t",
        "d_theta_prime",
        "d_theta_1",
        "d_theta_2",
        "tau_x",
        "tau_y",
        "signal",
        "deviation",
        "noise_bound",
        "within_bound",
        "snr",
    ]);
    table.meta("max_angle", max_angle);
    table.rows = rows.into_iter().flatten().collect();
    Ok(table)
}

fn with_coupling(p: &ModelParams, g: f64) -> ModelParams {
    ModelParams { g_site: vec![g; p.n_sites], ..p.clone() }
}

fn g_values(r: &Resolved, p: &ModelParams) -> anyhow::Result<Vec<f64>> {
    match &r.g_values {
        Some(v) if !v.is_empty() => Ok(v.clone()),
        Some(_) => bail!("g_values is empty"),
        None => Ok(vec![p.uniform_coupling().context("non-uniform couplings need explicit g_values")?]),
    }
}

fn spectra(r: &Resolved) -> anyhow::Result<Table> {
    let (base, local) = cavity_params(&r.model)?;
    if !local {
        bail!("spectra compares the local model only");
    }
    let gs = g_values(r, &base)?;
    let results: Vec<_> = gs
        .par_iter()
        .map(|&g| -> anyhow::Result<_> {
            let p = with_coupling(&base, g);
            let mut per_sector = Vec::new();
            for n_a in 0..2 {
                let (exact, _, cmp) = compare_local_model(&p, n_a)?;
                let m = classify_manifold(&exact, (1, 0));
                let split = manifold_splitting(&exact, &m).ok();
                per_sector.push((cmp, split, m.warning));
            }
            Ok((g, p.delta_b(), per_sector))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut table = Table::new(&[
        "g",
        "sector",
        "manifold_boson",
        "manifold_qubit",
        "index",
        "e_exact",
        "e_eff",
        "e_eff_aligned",
        "rel_err",
        "boson_exact",
        "qubit_exact",
        "boson_eff",
        "splitting",
        "splitting_over_g2_delta",
        "label_warning",
    ]);
    table.meta("offset_policy", format!("{:?}", OffsetPolicy::ManifoldCentroid));
    table.meta("pairing", "sorted-within-manifold");
    table.meta("manifolds", format!("{COMPARED_MANIFOLDS:?} as (boson number, excited couplers)"));
    table.meta("frame", "rotating");
    let mut excluded = 0;
    for (g, db, sectors) in results {
        for (n_a, (cmp, split, warn)) in sectors.into_iter().enumerate() {
            excluded += cmp.excluded;
            let mut index = vec![0usize; COMPARED_MANIFOLDS.len()];
            for p in &cmp.pairs {
                let k = COMPARED_MANIFOLDS.iter().position(|m| *m == p.manifold).unwrap_or(0);
                table.push(vec![
                    g.into(),
                    n_a.into(),
                    p.manifold.0.into(),
                    p.manifold.1.into(),
                    index[k].into(),
                    p.exact.energy.into(),
                    p.effective.energy.into(),
                    p.effective_aligned.into(),
                    p.rel_err.into(),
                    p.exact.boson.into(),
                    p.exact.qubit_excitation.into(),
                    p.effective.boson.into(),
                    split.into(),
                    split.map(|s| s / (g * g / db.abs())).into(),
                    warn.into(),
                ]);
                index[k] += 1;
            }
        }
    }
    table.meta("excluded_near_zero_levels", excluded);
    Ok(table)
}

fn ring_check(r: &Resolved) -> anyhow::Result<Table> {
    let (base, local) = cavity_params(&r.model)?;
    if !local || base.n_sites != 3 || !base.periodic {
        bail!("ring_check needs a local model with n = 3 and periodic = true");
    }
    let gs = g_values(r, &base)?;
    let results: Vec<_> = gs
        .par_iter()
        .map(|&g| -> anyhow::Result<_> {
            let p = with_coupling(&base, g);
            let h = build_local_microscopic(&p, Frame::Rotating)?;
            let sig = [0, 1].map(|n_a| sector_spectrum(&h, n_a).and_then(|s| ring_degeneracy_signature(&s)));
            let [a, b] = sig;
            Ok((g, p.delta_b(), [a?, b?]))
        })
        .collect::<anyhow::Result<_>>()?;
    let mut table = Table::new(&[
        "g",
        "sector",
        "e0",
        "e1",
        "e2",
        "hopping",
        "splitting",
        "predicted_splitting",
        "ground_degeneracy",
        "overlap_plus",
        "overlap_minus",
        "chirality_check",
        "ambiguous",
    ]);
    table.meta("predicted_splitting", "3 g^2 / |Delta_b|");
    for (g, db, sigs) in results {
        for s in sigs {
            table.push(vec![
                g.into(),
                s.n_a.into(),
                s.energies[0].into(),
                s.energies[1].into(),
                s.energies[2].into(),
                s.hopping.into(),
                (3.0 * s.hopping).into(),
                (3.0 * g * g / db.abs()).into(),
                s.ground_degeneracy.into(),
                s.chiral_overlaps[0].into(),
                s.chiral_overlaps[1].into(),
                s.chirality_check.into(),
                s.ambiguous.into(),
            ]);
        }
    }
    Ok(table)
}

fn loschmidt(r: &Resolved) -> anyhow::Result<Table> {
    let h = system_hamiltonian(&r.model)?;
    let eig = spectral_decompose(&h)?;
    let psi = initial_state(r.psi0()?, &eig)?;
    let pert = r.perturbation.as_ref().context("loschmidt needs a perturbation section")?;
    if !pert.op.is_hermitian_name() {
        bail!("perturbation operator `{}` is not Hermitian", pert.op);
    }
    let dh = pert.strength * &pert.op.build(h.space())?;
    let times = r.time()?.values();
    let values: Vec<C64> = times.par_iter().map(|&t| loschmidt_echo(&h, &dh, &psi, t)).collect::<Result<_, _>>()?;
    let mut table = Table::new(&["t", "re", "im", "abs"]);
    table.meta("perturbation", format!("{} * {}", pert.strength, pert.op));
    for (t, z) in times.iter().zip(values) {
        let [a, b, c] = complex_cells(z);
        table.push(vec![(*t).into(), a, b, c]);
    }
    Ok(table)
}
