//! The acceptance suite, run by `oto-clock verify` and by the test target.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use oto_clock::crosscheck::{branched_deviation, path_sum_sequence};
use oto_clock::dynamics::spectral_decompose;
use oto_clock::models::{
    build_complete_second_order, build_local_effective, build_nonlocal_effective, solve_sign_condition, Frame,
    ModelParams, SignModel,
};
use oto_clock::oracle::{loschmidt_echo, otoc_pure_with, otoc_switch_error_with, relative_switch_error};
use oto_clock::protocol::{
    measure_clock, noise_bound, run_oto_protocol_with, run_oto_sequence, Axis, MeasureAxis, ProtocolSpec, PulseErrors,
};
use oto_clock::spectra::{
    classify_manifold, compare_local_model, manifold_splitting, ring_degeneracy_signature, sector_spectrum,
    sw_consistency_check,
};
use oto_clock::{local_operator, make_space, HilbertSpace, LocalOp, Operator, SiteKind, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ChainFields, ModelSection};
use crate::experiments::system_hamiltonian;
use crate::presets::{chain_fields, dimer_params, ring_params};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{}]: {verdict} ({}; {:.2} s)", self.id, self.name, self.detail, self.seconds)
    }
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

fn qubit_space(n: usize) -> Arc<HilbertSpace> {
    make_space(vec![SiteKind::Qubit; n]).expect("qubit spaces are valid")
}

fn random_matrix(d: usize, r: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

/// A random Hermitian H, unitary O₁ and O₂, normalized ψ and t ∈ [0, 10].
pub struct Instance {
    pub h: Operator,
    pub o1: Operator,
    pub o2: Operator,
    pub psi: StateVector,
    pub t: f64,
}

pub fn random_instance(seed: u64, k: u64, n_qubits: usize) -> Instance {
    let mut r = stream(seed, k);
    let space = qubit_space(n_qubits);
    let d = space.dim();
    let a = random_matrix(d, &mut r);
    let h = Operator::from_dense(space.clone(), &((&a + a.adjoint()) * C64::new(0.5, 0.0)), true).unwrap();
    let mut unitary = || Operator::from_dense(space.clone(), &random_matrix(d, &mut r).qr().q(), false).unwrap();
    let (o1, o2) = (unitary(), unitary());
    let v = random_matrix(d, &mut r).column(0).into_owned();
    let psi = StateVector::new(&space, v).unwrap().normalized().unwrap();
    Instance { h, o1, o2, psi, t: r.random_range(0.0..=10.0) }
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> anyhow::Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e:#}")));
    CriterionResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn protocol_oracle_equivalence() -> CriterionResult {
    timed(1, "protocol-oracle equivalence", || {
        let n = 60;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let inst = random_instance(101, k, 2 + (k as usize % 2));
            let eig = spectral_decompose(&inst.h)?;
            let spec = ProtocolSpec {
                hamiltonian: inst.h.clone(),
                psi0: inst.psi.clone(),
                o1: inst.o1.clone(),
                o2: inst.o2.clone(),
                t: inst.t,
                errors: PulseErrors::IDEAL,
                measure_axis: MeasureAxis::Both,
            };
            let got = run_oto_protocol_with(&eig, &spec)?.otoc.unwrap_or_default();
            let want = otoc_pure_with(&eig, &inst.psi, &inst.o1, &inst.o2, inst.t)?;
            worst = worst.max((got - want).norm());
        }
        Ok((worst < 1e-9, format!("{n} instances, max |protocol - oracle| = {worst:.2e}, tolerance 1e-9")))
    })
}

fn one_photon_splittings(p: &ModelParams) -> anyhow::Result<[f64; 2]> {
    let h = oto_clock::models::build_local_microscopic(p, Frame::Rotating)?;
    let mut out = [0.0; 2];
    for (n_a, slot) in out.iter_mut().enumerate() {
        let s = sector_spectrum(&h, n_a)?;
        *slot = manifold_splitting(&s, &classify_manifold(&s, (1, 0)))?;
    }
    Ok(out)
}

pub fn dimer_reproduction() -> CriterionResult {
    timed(2, "dimer spectra", || {
        let p = dimer_params();
        let mut rel: f64 = 0.0;
        for n_a in 0..2 {
            rel = rel.max(compare_local_model(&p, n_a)?.2.max_rel_error());
        }
        let [s0, s1] = one_photon_splittings(&p)?;
        let want = 2.0 * p.g_site[0].powi(2) / p.delta_b();
        let dev = ((s0 / want - 1.0).abs()).max((s1 / want - 1.0).abs());
        let agree = (s0 - s1).abs() / s0;
        let pass = rel < 1e-3 && dev < 0.05 && agree < 1e-2;
        Ok((
            pass,
            format!(
                "(a) max rel err {rel:.2e} < 1e-3; (b) splittings {s0:.6}, {s1:.6} vs {want}, off by {:.2}% < 5%; (c) sectors differ by {:.2e} < 1e-2",
                100.0 * dev,
                agree
            ),
        ))
    })
}

pub fn ring_reproduction() -> CriterionResult {
    timed(3, "ring spectra", || {
        let p = ring_params();
        let h = oto_clock::models::build_local_microscopic(&p, Frame::Rotating)?;
        let s0 = ring_degeneracy_signature(&sector_spectrum(&h, 0)?)?;
        let s1 = ring_degeneracy_signature(&sector_spectrum(&h, 1)?)?;
        let want = 3.0 * p.g_site[0].powi(2) / p.delta_b();
        let dev = ((3.0 * s0.hopping / want - 1.0).abs()).max((3.0 * s1.hopping / want - 1.0).abs());
        let pattern = s0.ground_degeneracy == 1 && s1.ground_degeneracy == 2 && !s0.ambiguous && !s1.ambiguous;
        let chiral = s0.chirality_check && s1.chirality_check;
        Ok((
            pattern && dev < 0.05 && chiral,
            format!(
                "ground degeneracy {} / {}; splittings {:.4}, {:.4} vs {want}, off by {:.2}% < 5%; chiral overlaps {:.6}, {:.6}",
                s0.ground_degeneracy,
                s1.ground_degeneracy,
                3.0 * s0.hopping,
                3.0 * s1.hopping,
                100.0 * dev,
                s0.chiral_overlaps[0].min(s0.chiral_overlaps[1]),
                s1.chiral_overlaps[0].min(s1.chiral_overlaps[1]),
            ),
        ))
    })
}

/// An effective builder together with the condition that makes it flip.
pub struct FlipCase {
    pub name: &'static str,
    pub condition: SignModel,
    pub build: fn(&ModelParams) -> oto_clock::Result<Operator>,
    /// Requires uniform couplings.
    pub uniform: bool,
    pub bus: bool,
}

pub fn effective_builders() -> Vec<FlipCase> {
    vec![
        FlipCase {
            name: "local order 2",
            condition: SignModel::Local,
            build: |p| build_local_effective(p, 2, Frame::Rotating),
            uniform: false,
            bus: false,
        },
        FlipCase {
            name: "local order 4",
            condition: SignModel::Local,
            build: |p| build_local_effective(p, 4, Frame::Rotating),
            uniform: true,
            bus: false,
        },
        FlipCase {
            name: "local complete second order",
            condition: SignModel::Local,
            build: |p| build_complete_second_order(p, Frame::Rotating),
            uniform: false,
            bus: false,
        },
        FlipCase {
            name: "bus flip-flop",
            condition: SignModel::Nonlocal,
            build: |p| build_nonlocal_effective(p, false, Frame::Rotating),
            uniform: false,
            bus: true,
        },
        FlipCase {
            name: "bus flip-flop + zz",
            condition: SignModel::Nonlocal,
            build: |p| build_nonlocal_effective(p, true, Frame::Rotating),
            uniform: false,
            bus: true,
        },
    ]
}

/// Largest |H₁ + H₀| element over the cases, with disordered couplings
/// wherever the builder allows them.
pub fn sign_flip_defect(cases: &[FlipCase]) -> anyhow::Result<Vec<(&'static str, f64)>> {
    let mut out = Vec::new();
    for case in cases {
        let mut worst: f64 = 0.0;
        for (k, (n, periodic)) in [(2, false), (3, false), (3, true), (4, false)].into_iter().enumerate() {
            let mut r = stream(404, k as u64);
            let g: Vec<f64> = if case.uniform {
                vec![r.random_range(2.0..7.0); n]
            } else {
                (0..n).map(|_| r.random_range(2.0..7.0)).collect()
            };
            let base = ModelParams {
                g_site: g,
                n_sites: n,
                periodic: periodic && !case.bus,
                n_max: if n > 3 { 2 } else { 3 },
                omega_b: 5000.0 - r.random_range(30.0..90.0),
                ..dimer_params()
            };
            let p = solve_sign_condition(&base, case.condition)?;
            let h = (case.build)(&p)?;
            let d = (&h.clock_sector(1)? + &h.clock_sector(0)?).max_abs();
            worst = worst.max(d);
        }
        out.push((case.name, worst));
    }
    Ok(out)
}

pub fn sign_flip_exactness() -> CriterionResult {
    sign_flip_exactness_for(&effective_builders())
}

pub fn sign_flip_exactness_for(cases: &[FlipCase]) -> CriterionResult {
    timed(4, "sign-flip exactness", || {
        let defects = sign_flip_defect(cases)?;
        let pass = defects.iter().all(|(_, d)| *d <= 1e-12);
        let detail = defects.iter().map(|(n, d)| format!("{n}: {d:.1e}")).collect::<Vec<_>>().join(", ");
        Ok((pass, format!("max |H(n_a=1) + H(n_a=0)| per builder: {detail}; tolerance 1e-12")))
    })
}

pub fn classical_switch() -> CriterionResult {
    timed(5, "classical-switch errors", || {
        let l = 8;
        let model = ModelSection::Chain { l, fields: ChainFields::Random(chain_fields(12)) };
        let h = system_hamiltonian(&model)?;
        let space = h.space().clone();
        let eig = spectral_decompose(&h)?;
        let o1 = local_operator(&space, 1, LocalOp::SigmaZ)?;
        let o2 = local_operator(&space, l - 2, LocalOp::SigmaZ)?;
        let levels: Vec<usize> = (0..l).map(|i| i % 2).collect();
        let psi = StateVector::from_levels(&space, &levels)?;
        let samples = 100;

        let mut zero_delta: f64 = 0.0;
        let mut reduction: f64 = 0.0;
        for t in [0.0, 1.0, 5.0, 10.0] {
            let st = relative_switch_error(&eig, &psi, &o1, &o2, t, 0.0, samples, 5)?;
            zero_delta = zero_delta.max(st.relative_error.unwrap_or(f64::INFINITY));
            let pure = otoc_pure_with(&eig, &psi, &o1, &o2, t)?;
            reduction = reduction.max((otoc_switch_error_with(&eig, &psi, &o1, &o2, t, 0.0)? - pure).norm());
        }
        let mut growth = Vec::new();
        for delta in [0.02, 0.05] {
            let e1 = relative_switch_error(&eig, &psi, &o1, &o2, 1.0, delta, samples, 5)?.relative_error;
            let e10 = relative_switch_error(&eig, &psi, &o1, &o2, 10.0, delta, samples, 5)?.relative_error;
            growth.push((delta, e1.unwrap_or(f64::NAN), e10.unwrap_or(f64::NAN)));
        }
        let grows = growth.iter().all(|(_, a, b)| b > a);
        let pass = zero_delta < 1e-10 && grows && reduction < 1e-10;
        let g = growth
            .iter()
            .map(|(d, a, b)| format!("delta {d}: {a:.3e} at t=1, {b:.3e} at t=10"))
            .collect::<Vec<_>>()
            .join("; ");
        Ok((
            pass,
            format!(
                "(a) delta=0 rel err {zero_delta:.1e} < 1e-10; (b) {g}; (c) eps=0 vs oracle {reduction:.1e} < 1e-10"
            ),
        ))
    })
}

pub fn pulse_error_laws() -> CriterionResult {
    timed(6, "pulse-error laws", || {
        let draws = 200;
        let (mut excess, mut prefactor, mut phase, mut paths): (f64, f64, f64, f64) =
            (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
        for k in 0..draws {
            let inst = random_instance(606, k, 2);
            let mut r = stream(607, k);
            let mut a = || r.random_range(-0.3..=0.3);
            let e = PulseErrors { d_theta_prime: a(), d_theta_1: a(), d_theta_2: a() };
            let eig = spectral_decompose(&inst.h)?;
            let lr = otoc_pure_with(&eig, &inst.psi, &inst.o1, &inst.o2, inst.t)?;

            let bs = run_oto_sequence(&eig, &inst.psi, &inst.o1, &inst.o2, inst.t, &e)?;
            let signal =
                e.d_theta_prime.cos() * (0.5 * e.d_theta_1).cos().powi(2) * (0.5 * e.d_theta_2).cos().powi(2) * lr.re;
            excess = excess.max((measure_clock(&bs, Axis::X) - signal).abs() - noise_bound(e.d_theta_1, e.d_theta_2));

            let only = PulseErrors { d_theta_prime: e.d_theta_prime, ..PulseErrors::IDEAL };
            let b1 = run_oto_sequence(&eig, &inst.psi, &inst.o1, &inst.o2, inst.t, &only)?;
            let got = C64::new(measure_clock(&b1, Axis::X), measure_clock(&b1, Axis::Y));
            prefactor = prefactor.max((got - lr * e.d_theta_prime.cos()).norm());
            if lr.re.abs() > 1e-6 {
                phase = phase.max((got.arg() - lr.arg()).abs());
            }

            let (f, b) = path_sum_sequence(&inst.h, &inst.psi, &inst.o1, &inst.o2, inst.t, &e)?;
            paths = paths.max(branched_deviation(&bs, &f, &b));
        }
        let pass = excess <= 1e-9 && prefactor < 1e-10 && phase < 1e-9 && paths < 1e-9;
        Ok((
            pass,
            format!(
                "{draws} draws: (a) max(|dev| - bound) = {excess:.3e} <= 1e-9; (b) prefactor {prefactor:.1e} < 1e-10, phase shift {phase:.1e}; (c) 8-path {paths:.1e} < 1e-9"
            ),
        ))
    })
}

pub fn loschmidt() -> CriterionResult {
    timed(7, "Loschmidt echo", || {
        let mut unperturbed: f64 = 0.0;
        for k in 0..20 {
            let inst = random_instance(707, k, 2 + (k as usize % 2));
            let zero = Operator::zeros(inst.h.space());
            unperturbed = unperturbed.max((loschmidt_echo(&inst.h, &zero, &inst.psi, inst.t)? - 1.0).norm());
        }
        let space = qubit_space(1);
        let z = local_operator(&space, 0, LocalOp::SigmaZ)?;
        let up = StateVector::basis(&space, 0)?;
        let eps = 0.3;
        let mut analytic: f64 = 0.0;
        for t in [0.0, 0.7, 3.0, 10.0] {
            let e = loschmidt_echo(&z, &(eps * &z), &up, t)?;
            analytic = analytic.max((e - C64::from_polar(1.0, -eps * t)).norm());
        }
        Ok((
            unperturbed < 1e-12 && analytic < 1e-10,
            format!("deltaH = 0: {unperturbed:.1e} < 1e-12; commuting case: {analytic:.1e} < 1e-10"),
        ))
    })
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub fn sw_scaling_points() -> anyhow::Result<Vec<(f64, f64)>> {
    [1.0, 2.5, 5.0]
        .into_iter()
        .map(|g| {
            let p = ModelParams { g_site: vec![g; 2], ..dimer_params() };
            Ok((g, sw_consistency_check(&p, 0)?.residual))
        })
        .collect()
}

pub fn sw_consistency() -> CriterionResult {
    timed(8, "Schrieffer-Wolff residual scaling", || {
        let pts = sw_scaling_points()?;
        let slope = log_log_slope(&pts);
        let listed = pts.iter().map(|(g, r)| format!("g={g}: {r:.3e}")).collect::<Vec<_>>().join(", ");
        Ok(((slope - 3.0).abs() <= 0.3, format!("residuals {listed}; fitted exponent {slope:.3}, required 3 +/- 0.3")))
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        protocol_oracle_equivalence(),
        dimer_reproduction(),
        ring_reproduction(),
        sign_flip_exactness(),
        classical_switch(),
        pulse_error_laws(),
        loschmidt(),
        sw_consistency(),
    ]
}
