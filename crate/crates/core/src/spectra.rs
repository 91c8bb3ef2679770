//! Clock-sector spectra of the local model, their comparison with the
//! effective Hamiltonians, and the diagnostics of the dimer and ring.

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use crate::dynamics::{spectral_decompose, EigenSystem};
use crate::error::{Error, Result};
use crate::hilbert::{local_operator, HilbertSpace, LocalOp, Operator, SiteKind, StateVector, C64};
use crate::models::{
    build_local_effective, build_local_microscopic, local_all_down_basis, Frame, LocalLattice, ModelParams,
};

/// Rounded labels deviating more than this from an integer raise a warning.
pub const LABEL_WARN: f64 = 0.4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    /// ⟨Σ b†b⟩ over every boson site.
    pub boson: f64,
    /// ⟨Σ σ⁺σ⁻⟩, the number of excited (up) qubits.
    pub qubit_excitation: f64,
    /// ⟨Σ σᶻ⟩.
    pub sz: f64,
    /// ⟨a†a⟩ of the clock.
    pub clock: f64,
}

#[derive(Clone, Debug)]
pub struct SectorSpectrum {
    pub n_a: usize,
    /// Ascending in energy.
    pub levels: Vec<Level>,
    pub vectors: Vec<StateVector>,
}

impl SectorSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn span(&self) -> f64 {
        match (self.levels.first(), self.levels.last()) {
            (Some(a), Some(b)) => b.energy - a.energy,
            _ => 0.0,
        }
    }

    pub fn space(&self) -> Option<&Arc<HilbertSpace>> {
        self.vectors.first().map(|v| v.space())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct BasisLabels {
    boson: f64,
    qubit_excitation: f64,
    sz: f64,
    clock: f64,
}

fn basis_labels(space: &HilbertSpace, i: usize) -> BasisLabels {
    let mut out = BasisLabels { boson: 0.0, qubit_excitation: 0.0, sz: 0.0, clock: 0.0 };
    for (s, kind) in space.sites().iter().enumerate() {
        let level = space.level(i, s) as f64;
        match kind {
            SiteKind::Boson { .. } => out.boson += level,
            SiteKind::Qubit => {
                out.qubit_excitation += 1.0 - level;
                out.sz += 1.0 - 2.0 * level;
            }
            SiteKind::Clock => out.clock = level,
        }
    }
    out
}

fn level_of(space: &HilbertSpace, energy: f64, v: &DVector<C64>) -> Level {
    let mut lv = Level { energy, boson: 0.0, qubit_excitation: 0.0, sz: 0.0, clock: 0.0 };
    for (i, a) in v.iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let b = basis_labels(space, i);
        lv.boson += w * b.boson;
        lv.qubit_excitation += w * b.qubit_excitation;
        lv.sz += w * b.sz;
        lv.clock += w * b.clock;
    }
    lv
}

/// Eigenpairs of `h` in clock sector `n_a`, labelled by bare-basis
/// expectation values.
pub fn sector_spectrum(h: &Operator, n_a: usize) -> Result<SectorSpectrum> {
    let leak = h.clock_coupling()?;
    if leak > 1e-12 {
        return Err(Error::ClockCoupling(leak));
    }
    if n_a > 1 {
        return Err(Error::BadSector(n_a));
    }
    sector_spectrum_from(&spectral_decompose(h)?, n_a)
}

pub fn sector_spectrum_from(eig: &EigenSystem, n_a: usize) -> Result<SectorSpectrum> {
    let space = eig.space().clone();
    let mut levels = Vec::new();
    let mut vectors = Vec::new();
    for (k, &e) in eig.eigenvalues().iter().enumerate() {
        let v = eig.eigenvector(k);
        let lv = level_of(&space, e, v.amplitudes());
        if (lv.clock - n_a as f64).abs() < 0.5 {
            levels.push(lv);
            vectors.push(v);
        }
    }
    Ok(SectorSpectrum { n_a, levels, vectors })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifold {
    pub target: (usize, usize),
    /// Indices into the spectrum's levels.
    pub indices: Vec<usize>,
    /// Largest distance of any level's labels from the nearest integer.
    pub max_deviation: f64,
    pub warning: bool,
}

/// Levels whose rounded (boson number, qubit excitation) equal `target`.
pub fn classify_manifold(spectrum: &SectorSpectrum, target: (usize, usize)) -> Manifold {
    let mut indices = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (i, lv) in spectrum.levels.iter().enumerate() {
        let (b, q) = (lv.boson.round(), lv.qubit_excitation.round());
        max_deviation = max_deviation.max((lv.boson - b).abs()).max((lv.qubit_excitation - q).abs());
        if b == target.0 as f64 && q == target.1 as f64 {
            indices.push(i);
        }
    }
    Manifold { target, indices, max_deviation, warning: max_deviation > LABEL_WARN }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetPolicy {
    /// Compare energies as given.
    None,
    /// Shift each effective manifold so its centroid matches the exact one.
    ManifoldCentroid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairedLevel {
    pub manifold: (usize, usize),
    pub exact: Level,
    pub effective: Level,
    /// Effective energy after the offset policy.
    pub effective_aligned: f64,
    /// (E_eff − E_exact)/E_exact, `None` for |E_exact| below the cutoff.
    pub rel_err: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumComparison {
    pub n_a: usize,
    pub policy: OffsetPolicy,
    pub pairing: &'static str,
    pub pairs: Vec<PairedLevel>,
    /// Levels skipped because |E_exact| < 10⁻⁶ · span.
    pub excluded: usize,
}

impl SpectrumComparison {
    pub fn max_rel_error(&self) -> f64 {
        self.pairs.iter().filter_map(|p| p.rel_err).map(f64::abs).fold(0.0, f64::max)
    }
}

/// Pairs the two spectra by sorted order inside each listed manifold.
pub fn compare_spectra(
    exact: &SectorSpectrum,
    effective: &SectorSpectrum,
    manifolds: &[(usize, usize)],
    policy: OffsetPolicy,
) -> Result<SpectrumComparison> {
    if exact.n_a != effective.n_a {
        return Err(Error::BadSector(effective.n_a));
    }
    let cutoff = 1e-6 * exact.span();
    let mut pairs = Vec::new();
    let mut excluded = 0;
    for &target in manifolds {
        let me = classify_manifold(exact, target);
        let mf = classify_manifold(effective, target);
        if me.indices.len() != mf.indices.len() {
            return Err(Error::CardinalityMismatch {
                boson: target.0,
                qubit: target.1,
                exact: me.indices.len(),
                effective: mf.indices.len(),
            });
        }
        if me.indices.is_empty() {
            continue;
        }
        let centroid = |s: &SectorSpectrum, m: &Manifold| {
            m.indices.iter().map(|&i| s.levels[i].energy).sum::<f64>() / m.indices.len() as f64
        };
        let shift = match policy {
            OffsetPolicy::None => 0.0,
            OffsetPolicy::ManifoldCentroid => centroid(exact, &me) - centroid(effective, &mf),
        };
        for (&i, &j) in me.indices.iter().zip(&mf.indices) {
            let (ex, ef) = (&exact.levels[i], &effective.levels[j]);
            let aligned = ef.energy + shift;
            let rel_err = if ex.energy.abs() < cutoff {
                excluded += 1;
                None
            } else {
                Some((aligned - ex.energy) / ex.energy)
            };
            pairs.push(PairedLevel {
                manifold: target,
                exact: ex.clone(),
                effective: ef.clone(),
                effective_aligned: aligned,
                rel_err,
            });
        }
    }
    Ok(SpectrumComparison { n_a: exact.n_a, policy, pairing: "sorted-within-manifold", pairs, excluded })
}

/// Splitting of a manifold: E_max − E_min for two levels; for three, the gap
/// between the (near-)degenerate pair's mean and the lone level.
pub fn manifold_splitting(spectrum: &SectorSpectrum, manifold: &Manifold) -> Result<f64> {
    let mut e: Vec<f64> = manifold.indices.iter().map(|&i| spectrum.levels[i].energy).collect();
    if e.len() < 2 {
        return Err(Error::ManifoldTooSmall { need: 2, got: e.len() });
    }
    e.sort_by(f64::total_cmp);
    if e.len() == 3 {
        let (lo, hi) = (e[1] - e[0], e[2] - e[1]);
        return Ok(if lo <= hi { e[2] - 0.5 * (e[0] + e[1]) } else { 0.5 * (e[1] + e[2]) - e[0] });
    }
    Ok(e[e.len() - 1] - e[0])
}

/// Levels closer than this are treated as degenerate.
pub fn degeneracy_tolerance(span: f64) -> f64 {
    (1e-6 * span).max(1e-9)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RingSignature {
    pub n_a: usize,
    /// The three 1-photon energies, ascending.
    pub energies: [f64; 3],
    /// |t| inferred from the splitting, which is 3|t|.
    pub hopping: f64,
    pub ground_degeneracy: usize,
    /// Overlaps of the degenerate doublet with the k = ±2π/3 Bloch states.
    pub chiral_overlaps: [f64; 2],
    pub chirality_check: bool,
    /// Set when the pattern is neither {1, 2} nor {2, 1} within tolerance.
    pub ambiguous: bool,
}

/// Degeneracy pattern and chirality of the 1-photon manifold of a
/// three-cavity ring.
///
/// The doublet is projected onto the bare 1-photon, all-couplers-down
/// subspace and renormalized before the Bloch overlaps are taken, which
/// removes the dressing by virtual qubit excitations.
pub fn ring_degeneracy_signature(spectrum: &SectorSpectrum) -> Result<RingSignature> {
    let space = spectrum.space().ok_or(Error::NotARing)?.clone();
    let cavities = space.boson_sites();
    if cavities.len() != 3 {
        return Err(Error::NotARing);
    }
    let m = classify_manifold(spectrum, (1, 0));
    if m.indices.len() != 3 {
        return Err(Error::ManifoldTooSmall { need: 3, got: m.indices.len() });
    }
    let mut idx = m.indices.clone();
    idx.sort_by(|&a, &b| spectrum.levels[a].energy.total_cmp(&spectrum.levels[b].energy));
    let e = [0, 1, 2].map(|k| spectrum.levels[idx[k]].energy);
    let hopping = manifold_splitting(spectrum, &m)? / 3.0;
    let tol = 1e-3 * hopping;
    let (low_pair, high_pair) = (e[1] - e[0] < tol, e[2] - e[1] < tol);
    let ambiguous = low_pair == high_pair;
    let ground_degeneracy = if low_pair && !high_pair { 2 } else { 1 };
    let doublet = if ground_degeneracy == 2 { [idx[0], idx[1]] } else { [idx[1], idx[2]] };

    // bare |1_c⟩ ⊗ |↓…↓⟩ ⊗ |n_a⟩ for c = 0, 1, 2
    let mut bare = [0usize; 3];
    for (c, slot) in bare.iter_mut().enumerate() {
        let levels: Vec<usize> = space
            .sites()
            .iter()
            .enumerate()
            .map(|(s, kind)| match kind {
                SiteKind::Boson { .. } => usize::from(s == cavities[c]),
                SiteKind::Qubit => 1,
                SiteKind::Clock => spectrum.n_a,
            })
            .collect();
        *slot = space.index_of(&levels)?;
    }
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for &k in &doublet {
        let a = spectrum.vectors[k].amplitudes();
        let mut v = DVector::from_iterator(3, bare.iter().map(|&i| a[i]));
        for u in &basis {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let n = v.norm();
        if n < 1e-8 {
            return Err(Error::NotARing);
        }
        basis.push(v / C64::new(n, 0.0));
    }
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let r3 = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let bloch =
        [DVector::from_vec(vec![r3, r3 * w, r3 * w.conj()]), DVector::from_vec(vec![r3, r3 * w.conj(), r3 * w])];
    let chiral_overlaps = bloch.map(|b| basis.iter().map(|u| u.dotc(&b).norm_sqr()).sum::<f64>());
    let chirality_check = chiral_overlaps.iter().all(|&o| o > 1.0 - 1e-3);
    Ok(RingSignature {
        n_a: spectrum.n_a,
        energies: e,
        hopping,
        ground_degeneracy,
        chiral_overlaps,
        chirality_check,
        ambiguous,
    })
}

/// S⁽¹⁾ = (1/Δ_{b,n_a}) Σ_{(c,q) adjacent} g_c (b_c σ⁺_q − b†_c σ⁻_q) on the
/// cavity ⊗ coupler space of sector `n_a`.
pub fn sw_generator_first_order(params: &ModelParams, n_a: usize) -> Result<Operator> {
    params.validate()?;
    let lat = LocalLattice::from_params(params)?;
    let d = params.local_detuning(n_a)?;
    let space = lat.microscopic_space(params.cutoff())?.without_clock()?;
    let mut s = Operator::zeros(&space);
    for (q, &(l, r)) in lat.qubits.iter().enumerate() {
        let plus = local_operator(&space, lat.qubit_site(q), LocalOp::SigmaPlus)?;
        for c in if l == r { vec![l] } else { vec![l, r] } {
            let term = &local_operator(&space, c, LocalOp::Annihilate)? * &plus;
            s = &s + &((params.g_site[c] / d) * &(&term - &term.adjoint()));
        }
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwResidual {
    /// ‖P e^S H e^{−S} P − (H₀ + H_eff⁽²⁾)‖_max on the all-down subspace.
    pub residual: f64,
    /// g³/Δ², with g the largest coupling and Δ = |Δ_{b,n_a}|.
    pub scale: f64,
}

/// Applies the first-order Schrieffer-Wolff rotation to the rotating-frame
/// microscopic Hamiltonian of sector `n_a` and compares the all-down block
/// with the second-order effective Hamiltonian plus the bare coupler energy.
pub fn sw_consistency_check(params: &ModelParams, n_a: usize) -> Result<SwResidual> {
    let lat = LocalLattice::from_params(params)?;
    let h = build_local_microscopic(params, Frame::Rotating)?.clock_sector(n_a)?;
    let s = sw_generator_first_order(params, n_a)?;
    // e^S = e^{−iK} with K = iS Hermitian
    let k = s.scale(C64::new(0.0, 1.0)).into_hermitian()?;
    let u = spectral_decompose(&k)?.function_matrix(|e| C64::from_polar(1.0, -e));
    let rotated = &u * h.to_dense() * u.adjoint();

    let basis = local_all_down_basis(&lat, h.space());
    let eff = build_local_effective(params, 2, Frame::Rotating)?.clock_sector(n_a)?;
    let d = params.local_detuning(n_a)?;
    let h0 = -(lat.n_qubits() as f64) * 0.5 * d;
    let mut residual: f64 = 0.0;
    for (a, &i) in basis.iter().enumerate() {
        for (b, &j) in basis.iter().enumerate() {
            let want = eff.get(a, b) + if a == b { C64::new(h0, 0.0) } else { C64::new(0.0, 0.0) };
            residual = residual.max((rotated[(i, j)] - want).norm());
        }
    }
    let g = params.g_site.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    Ok(SwResidual { residual, scale: g * g * g / (d * d) })
}

/// The compared manifolds of the local model: vacuum and one photon, all
/// couplers down.
pub const COMPARED_MANIFOLDS: [(usize, usize); 2] = [(0, 0), (1, 0)];

/// Exact and second-order effective spectra of sector `n_a`, compared on
/// [`COMPARED_MANIFOLDS`] with centroid alignment.
pub fn compare_local_model(
    params: &ModelParams,
    n_a: usize,
) -> Result<(SectorSpectrum, SectorSpectrum, SpectrumComparison)> {
    let exact = sector_spectrum(&build_local_microscopic(params, Frame::Rotating)?, n_a)?;
    let eff = sector_spectrum(&build_local_effective(params, 2, Frame::Rotating)?, n_a)?;
    let cmp = compare_spectra(&exact, &eff, &COMPARED_MANIFOLDS, OffsetPolicy::ManifoldCentroid)?;
    Ok((exact, eff, cmp))
}
