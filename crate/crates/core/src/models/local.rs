//! Local cavities linked by coupler qubits; the ancilla shifts every qubit
//! dispersively.
//!
//! Site layout of the microscopic space: cavities `0..N`, then one site per
//! coupler qubit, then the clock. The effective space keeps the cavities and
//! the clock.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{local_operator, make_space, HilbertSpace, LocalOp, Operator, SiteKind};

use super::{Frame, ModelParams};

/// Which cavities each coupler qubit touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalLattice {
    pub n_cavities: usize,
    pub periodic: bool,
    /// `qubits[q] = (left, right)` cavities of coupler `q`.
    pub qubits: Vec<(usize, usize)>,
}

impl LocalLattice {
    /// Open chain: N − 1 couplers. Ring: N couplers, N ≥ 3.
    pub fn new(n_cavities: usize, periodic: bool) -> Result<Self> {
        if n_cavities == 0 {
            return Err(Error::InvalidParams("lattice needs at least one cavity".into()));
        }
        let qubits = if periodic {
            if n_cavities < 3 {
                return Err(Error::InvalidParams(format!("ring needs at least 3 cavities, got {n_cavities}")));
            }
            (0..n_cavities).map(|q| (q, (q + 1) % n_cavities)).collect()
        } else {
            (0..n_cavities - 1).map(|q| (q, q + 1)).collect()
        };
        Ok(LocalLattice { n_cavities, periodic, qubits })
    }

    pub fn from_params(params: &ModelParams) -> Result<Self> {
        Self::new(params.n_sites, params.periodic)
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit_site(&self, q: usize) -> usize {
        self.n_cavities + q
    }

    /// Cavities shared by two couplers.
    fn shared(&self, q: usize, r: usize) -> Vec<usize> {
        let (a, b) = self.qubits[q];
        let (c, d) = self.qubits[r];
        let mut out: Vec<usize> = [a, b].into_iter().filter(|&x| x == c || x == d).collect();
        out.dedup();
        out
    }

    /// Next-nearest-neighbour pairs (j, j+2), wrapping on a ring.
    fn second_neighbours(&self) -> Vec<(usize, usize)> {
        let n = self.n_cavities;
        if self.periodic {
            (0..n).map(|j| (j, (j + 2) % n)).collect()
        } else {
            (0..n.saturating_sub(2)).map(|j| (j, j + 2)).collect()
        }
    }

    pub fn microscopic_space(&self, n_max: usize) -> Result<Arc<HilbertSpace>> {
        let mut sites = vec![SiteKind::Boson { n_max }; self.n_cavities];
        sites.extend(std::iter::repeat_n(SiteKind::Qubit, self.n_qubits()));
        sites.push(SiteKind::Clock);
        make_space(sites)
    }

    pub fn effective_space(&self, n_max: usize) -> Result<Arc<HilbertSpace>> {
        let mut sites = vec![SiteKind::Boson { n_max }; self.n_cavities];
        sites.push(SiteKind::Clock);
        make_space(sites)
    }
}

struct Ops {
    b: Vec<Operator>,
    n: Vec<Operator>,
    z: Vec<Operator>,
    plus: Vec<Operator>,
    proj: [Operator; 2],
}

impl Ops {
    fn new(space: &Arc<HilbertSpace>, lat: &LocalLattice, with_qubits: bool) -> Result<Self> {
        let cav = |op| (0..lat.n_cavities).map(|c| local_operator(space, c, op)).collect::<Result<Vec<_>>>();
        let qub = |op| {
            if with_qubits {
                (0..lat.n_qubits()).map(|q| local_operator(space, lat.qubit_site(q), op)).collect()
            } else {
                Ok(Vec::new())
            }
        };
        let clock = space.clock_site().ok_or(Error::NoClock)?;
        Ok(Ops {
            b: cav(LocalOp::Annihilate)?,
            n: cav(LocalOp::Number)?,
            z: qub(LocalOp::SigmaZ)?,
            plus: qub(LocalOp::SigmaPlus)?,
            proj: [
                local_operator(space, clock, LocalOp::ClockProjector(0))?,
                local_operator(space, clock, LocalOp::ClockProjector(1))?,
            ],
        })
    }

    /// B_q = Σ_{c adjacent to q} g_c b_c.
    fn bus(&self, space: &Arc<HilbertSpace>, lat: &LocalLattice, g: &[f64], q: usize) -> Operator {
        let (l, r) = lat.qubits[q];
        let mut out = Operator::zeros(space);
        for c in dedup([l, r]) {
            out = &out + &(g[c] * &self.b[c]);
        }
        out
    }
}

fn dedup(pair: [usize; 2]) -> impl Iterator<Item = usize> {
    let second = (pair[1] != pair[0]).then_some(pair[1]);
    std::iter::once(pair[0]).chain(second)
}

fn check_couplings(params: &ModelParams) -> Result<LocalLattice> {
    params.validate()?;
    LocalLattice::from_params(params)
}

/// Microscopic lattice Hamiltonian.
///
/// Lab frame: ω_b Σn_c + (ε/2)Σσᶻ_q + χ n_a Σσᶻ_q + V, with
/// V = Σ_q Σ_{c adjacent to q} g_c (b†_c σ⁻_q + b_c σ⁺_q).
/// Rotating frame at ω_b: (Δ_b/2)Σσᶻ_q + χ n_a Σσᶻ_q + V.
pub fn build_local_microscopic(params: &ModelParams, frame: Frame) -> Result<Operator> {
    let lat = check_couplings(params)?;
    let space = lat.microscopic_space(params.cutoff())?;
    let ops = Ops::new(&space, &lat, true)?;
    let mut h = h0_local(params, &space, &ops, frame);
    for (q, &(l, r)) in lat.qubits.iter().enumerate() {
        for c in dedup([l, r]) {
            let hop = &ops.b[c] * &ops.plus[q];
            h = &h + &(params.g_site[c] * &(&hop + &hop.adjoint()));
        }
    }
    h.into_hermitian()
}

fn h0_local(params: &ModelParams, space: &Arc<HilbertSpace>, ops: &Ops, frame: Frame) -> Operator {
    let mut h = Operator::zeros(space);
    let qubit_freq = match frame {
        Frame::Lab => {
            for n in &ops.n {
                h = &h + &(params.omega_b * n);
            }
            0.5 * params.epsilon
        }
        Frame::Rotating => 0.5 * params.delta_b(),
    };
    let na = &ops.proj[1];
    for z in &ops.z {
        h = &h + &(qubit_freq * z);
        h = &h + &(params.chi * &(na * z));
    }
    h
}

/// Cavity-only Hamiltonian with the qubits eliminated in the all-down sector.
///
/// Order 2: Σ_{n_a} |n_a⟩⟨n_a| (−1/Δ_{b,n_a}) Σ_q B_q†B_q, i.e. hopping
/// −g_c g_c'/Δ between neighbours and an on-site shift −Σ g_c²/Δ from each
/// adjacent coupler. Order 4 adds, for uniform g,
/// g⁴/Δ³ Σ_j [2b†b†bb + 6n_jn_{j+1} + 8n_j + (2b†_jb_{j+1} + b†_jb_{j+2} + h.c.)
/// + (b†²_{j+1}b²_j + h.c.)]. The lab frame adds ω_b Σn_c.
pub fn build_local_effective(params: &ModelParams, order: usize, frame: Frame) -> Result<Operator> {
    if order != 2 && order != 4 {
        return Err(Error::InvalidParams(format!("effective order must be 2 or 4, got {order}")));
    }
    let lat = check_couplings(params)?;
    let g4 = if order == 4 { Some(params.uniform_coupling().ok_or(Error::NonUniformCouplings)?) } else { None };
    let space = lat.effective_space(params.cutoff())?;
    let ops = Ops::new(&space, &lat, false)?;

    let mut second = Operator::zeros(&space);
    for q in 0..lat.n_qubits() {
        let bq = ops.bus(&space, &lat, &params.g_site, q);
        second = &second + &(&bq.adjoint() * &bq);
    }
    let fourth = g4.map(|g| fourth_order_terms(&space, &lat, &ops).scale((g * g * g * g).into()));

    let mut h = Operator::zeros(&space);
    for n_a in 0..2 {
        let d = params.local_detuning(n_a)?;
        let mut block = second.scale((-1.0 / d).into());
        if let Some(f) = &fourth {
            block = &block + &f.scale((1.0 / (d * d * d)).into());
        }
        h = &h + &(&ops.proj[n_a] * &block);
    }
    if frame == Frame::Lab {
        for n in &ops.n {
            h = &h + &(params.omega_b * n);
        }
    }
    h.into_hermitian()
}

fn fourth_order_terms(space: &Arc<HilbertSpace>, lat: &LocalLattice, ops: &Ops) -> Operator {
    let mut t = Operator::zeros(space);
    for j in 0..lat.n_cavities {
        let bd = ops.b[j].adjoint();
        let pair = &(&bd * &bd) * &(&ops.b[j] * &ops.b[j]);
        t = &t + &(2.0 * &pair);
        t = &t + &(8.0 * &ops.n[j]);
    }
    for &(j, k) in &lat.qubits {
        t = &t + &(6.0 * &(&ops.n[j] * &ops.n[k]));
        let hop = &ops.b[j].adjoint() * &ops.b[k];
        t = &t + &(2.0 * &(&hop + &hop.adjoint()));
        let bk = ops.b[k].adjoint();
        let pair_hop = &(&bk * &bk) * &(&ops.b[j] * &ops.b[j]);
        t = &t + &(&pair_hop + &pair_hop.adjoint());
    }
    for (j, k) in lat.second_neighbours() {
        let hop = &ops.b[j].adjoint() * &ops.b[k];
        t = &t + &(&hop + &hop.adjoint());
    }
    t
}

/// Second-order Hamiltonian on the full cavity ⊗ qubit ⊗ clock space:
///
/// H₀ + Σ_{n_a} |n_a⟩⟨n_a| (1/Δ_{b,n_a}) [Σ_q (B_q†B_q σᶻ_q + G_q σ⁺_qσ⁻_q)
/// + Σ_{q<q'} G_{qq'} (σ⁺_qσ⁻_q' + h.c.)]
///
/// with G_q = Σ g_c² over cavities adjacent to q and G_{qq'} over cavities
/// shared by q and q'. H₀ is the uncoupled part of
/// [`build_local_microscopic`] in the same frame. Restricted to all couplers
/// down, H − H₀ is exactly the order-2 output of [`build_local_effective`].
pub fn build_complete_second_order(params: &ModelParams, frame: Frame) -> Result<Operator> {
    let lat = check_couplings(params)?;
    let space = lat.microscopic_space(params.cutoff())?;
    let ops = Ops::new(&space, &lat, true)?;
    let g = &params.g_site;
    let gq: Vec<f64> = lat.qubits.iter().map(|&(l, r)| dedup([l, r]).map(|c| g[c] * g[c]).sum()).collect();

    let mut bracket = Operator::zeros(&space);
    for (q, &gq) in gq.iter().enumerate() {
        let bq = ops.bus(&space, &lat, g, q);
        let raise_lower = &ops.plus[q] * &ops.plus[q].adjoint();
        bracket = &bracket + &(&(&bq.adjoint() * &bq) * &ops.z[q]);
        bracket = &bracket + &(gq * &raise_lower);
        for r in q + 1..lat.n_qubits() {
            let shared: f64 = lat.shared(q, r).iter().map(|&c| g[c] * g[c]).sum();
            if shared != 0.0 {
                let flip = &ops.plus[q] * &ops.plus[r].adjoint();
                bracket = &bracket + &(shared * &(&flip + &flip.adjoint()));
            }
        }
    }
    let mut h = h0_local(params, &space, &ops, frame);
    for n_a in 0..2 {
        let d = params.local_detuning(n_a)?;
        h = &h + &(&ops.proj[n_a] * &bracket.scale((1.0 / d).into()));
    }
    h.into_hermitian()
}

/// Microscopic basis indices with every coupler down, ordered like the
/// effective space.
pub fn local_all_down_basis(lat: &LocalLattice, space: &HilbertSpace) -> Vec<usize> {
    (0..space.dim()).filter(|&i| (0..lat.n_qubits()).all(|q| space.level(i, lat.qubit_site(q)) == 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::{solve_sign_condition, SignModel};
    use super::*;

    fn params(n: usize, periodic: bool, g: f64) -> ModelParams {
        ModelParams {
            omega_a: 5800.0,
            omega_b: 4950.0,
            epsilon: 5000.0,
            eta: 0.0,
            chi: -50.0,
            g_a: 200.0,
            g_site: vec![g; n],
            n_sites: n,
            n_max: 3,
            hardcore: false,
            periodic,
        }
    }

    #[test]
    fn lattice_layouts() {
        assert_eq!(LocalLattice::new(2, false).unwrap().qubits, vec![(0, 1)]);
        assert_eq!(LocalLattice::new(3, true).unwrap().qubits, vec![(0, 1), (1, 2), (2, 0)]);
        assert!(LocalLattice::new(2, true).is_err());
    }

    #[test]
    fn reference_dimensions() {
        assert_eq!(build_local_microscopic(&params(2, false, 5.0), Frame::Rotating).unwrap().dim(), 64);
        assert_eq!(build_local_microscopic(&params(3, true, 5.0), Frame::Rotating).unwrap().dim(), 1024);
    }

    #[test]
    fn microscopic_conserves_clock_number() {
        let h = build_local_microscopic(&params(3, true, 5.0), Frame::Lab).unwrap();
        assert_eq!(h.clock_coupling().unwrap(), 0.0);
    }

    #[test]
    fn hardcore_order_two_couplings() {
        let mut p = params(3, false, 5.0);
        p.hardcore = true;
        let p = solve_sign_condition(&p, SignModel::Local).unwrap();
        let h = build_local_effective(&p, 2, Frame::Rotating).unwrap();
        let s = h.space().clone();
        let i = |l: &[usize]| s.index_of(l).unwrap();
        // interior site sees two couplers, edges one
        assert!((h.get(i(&[0, 1, 0, 0]), i(&[0, 1, 0, 0])).re + 2.0 * 0.5).abs() < 1e-15);
        assert!((h.get(i(&[1, 0, 0, 0]), i(&[1, 0, 0, 0])).re + 0.5).abs() < 1e-15);
        assert!((h.get(i(&[1, 0, 0, 0]), i(&[0, 1, 0, 0])).re + 0.5).abs() < 1e-15);
        assert!((h.get(i(&[1, 0, 0, 1]), i(&[0, 1, 0, 1])).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn effective_zero_coupling_vanishes() {
        for order in [2, 4] {
            let h = build_local_effective(&params(3, false, 0.0), order, Frame::Rotating).unwrap();
            assert_eq!(h.max_abs(), 0.0);
        }
    }

    #[test]
    fn order_four_correction_scales_as_g_squared_over_delta_squared() {
        let ratio = |g: f64| {
            let p = solve_sign_condition(&params(3, false, g), SignModel::Local).unwrap();
            let h2 = build_local_effective(&p, 2, Frame::Rotating).unwrap();
            let h4 = build_local_effective(&p, 4, Frame::Rotating).unwrap();
            (&h4 - &h2).max_abs() / h2.max_abs()
        };
        let (r1, r2) = (ratio(5.0), ratio(2.5));
        // (g/Δ)² = 10⁻² times O(1) operator norms
        assert!(r1 / 1e-2 > 1.0 && r1 / 1e-2 < 30.0, "{r1}");
        assert!((r1 / r2 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn order_four_rejects_disorder() {
        let mut p = params(3, false, 5.0);
        p.g_site[1] = 4.0;
        assert_eq!(build_local_effective(&p, 4, Frame::Rotating).unwrap_err(), Error::NonUniformCouplings);
    }

    #[test]
    fn complete_second_order_projects_onto_effective() {
        for (n, periodic) in [(2, false), (3, true)] {
            let mut p = solve_sign_condition(&params(n, periodic, 5.0), SignModel::Local).unwrap();
            p.g_site = (0..n).map(|c| 4.0 + c as f64 * 0.7).collect();
            let lat = LocalLattice::from_params(&p).unwrap();
            let full = build_complete_second_order(&p, Frame::Rotating).unwrap();
            let space = full.space().clone();
            let ops = Ops::new(&space, &lat, true).unwrap();
            let h0 = h0_local(&p, &space, &ops, Frame::Rotating);
            let basis = local_all_down_basis(&lat, &space);
            let eff_space = lat.effective_space(p.cutoff()).unwrap();
            let projected = (&full - &h0).restrict(&basis, &eff_space).unwrap();
            let eff = build_local_effective(&p, 2, Frame::Rotating).unwrap();
            assert!(projected.max_abs_diff(&eff).unwrap() < 1e-14);
        }
    }

    #[test]
    fn complete_second_order_flip_flop_amplitude() {
        let p = solve_sign_condition(&params(3, false, 5.0), SignModel::Local).unwrap();
        let h = build_complete_second_order(&p, Frame::Rotating).unwrap();
        let s = h.space().clone();
        // cavities empty, couplers (↑↓) → (↓↑), clock 0
        let a = s.index_of(&[0, 0, 0, 0, 1, 0]).unwrap();
        let b = s.index_of(&[0, 0, 0, 1, 0, 0]).unwrap();
        assert!((h.get(a, b).re - 25.0 / 50.0).abs() < 1e-15);
    }

    #[test]
    fn complete_second_order_without_coupling_is_h0() {
        let p = params(2, false, 0.0);
        let full = build_complete_second_order(&p, Frame::Lab).unwrap();
        let micro = build_local_microscopic(&p, Frame::Lab).unwrap();
        assert_eq!(full.max_abs_diff(&micro).unwrap(), 0.0);
    }
}
