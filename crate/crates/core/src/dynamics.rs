//! Exact time evolution through a cached spectral decomposition.
//!
//! Hamiltonians are split into the connected components of their sparsity
//! graph before diagonalization. The blocks are the conserved sectors of the
//! model (clock number, excitation number, total σᶻ, ...), so each dense
//! eigensolve stays small and eigenvectors never mix sectors through
//! accidental degeneracies.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, Operator, StateVector, C64};
use crate::protocol::BranchedState;

pub const DEFAULT_DIM_CAP: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// e^{−iHt}
    Forward,
    /// e^{+iHt}
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        }
    }
}

#[derive(Clone, Debug)]
struct Block {
    basis: Vec<usize>,
    values: Vec<f64>,
    /// Columns are eigenvectors on `basis`.
    vectors: DMatrix<C64>,
}

/// Eigenvalues in ascending order with their eigenvectors, stored blockwise.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    space: Arc<HilbertSpace>,
    blocks: Vec<Block>,
    /// Global index → (block, column).
    order: Vec<(usize, usize)>,
    eigenvalues: Vec<f64>,
}

pub fn spectral_decompose(h: &Operator) -> Result<EigenSystem> {
    spectral_decompose_with_cap(h, DEFAULT_DIM_CAP)
}

pub fn spectral_decompose_with_cap(h: &Operator, cap: usize) -> Result<EigenSystem> {
    let dim = h.dim();
    if dim > cap {
        return Err(Error::DimensionOverCap { dim, cap });
    }
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect >= 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }

    let blocks: Vec<Block> = connected_blocks(h).into_iter().map(|basis| diagonalize_block(h, basis)).collect();
    let mut order: Vec<(usize, usize)> =
        blocks.iter().enumerate().flat_map(|(b, blk)| (0..blk.values.len()).map(move |c| (b, c))).collect();
    order.sort_by(|&(b1, c1), &(b2, c2)| blocks[b1].values[c1].total_cmp(&blocks[b2].values[c2]));
    let eigenvalues = order.iter().map(|&(b, c)| blocks[b].values[c]).collect();
    Ok(EigenSystem { space: h.space().clone(), blocks, order, eigenvalues })
}

/// Basis indices grouped by connected component of the nonzero pattern,
/// each group ascending, groups ordered by their smallest index.
fn connected_blocks(h: &Operator) -> Vec<Vec<usize>> {
    let n = h.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c, _) in h.matrix().iter() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn diagonalize_block(h: &Operator, basis: Vec<usize>) -> Block {
    let sub = h.matrix().restrict(&basis).to_dense();
    let (values, mut vectors) = if sub.iter().all(|v| v.im == 0.0) {
        let eig = sub.map(|v| v.re).symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors.map(|v| C64::new(v, 0.0)))
    } else {
        let eig = sub.symmetric_eigen();
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    for mut col in vectors.column_iter_mut() {
        canonicalize_phase(col.as_mut_slice());
    }
    // ascending within the block, stable for reproducibility
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values = idx.iter().map(|&i| values[i]).collect();
    let vectors = DMatrix::from_fn(vectors.nrows(), idx.len(), |r, c| vectors[(r, idx[c])]);
    Block { basis, values, vectors }
}

/// Rotates `v` so that its largest-magnitude component (first on ties) is
/// real and positive.
fn canonicalize_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, x) in v.iter().enumerate() {
        let n = x.norm();
        if n > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = n;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        for x in v.iter_mut() {
            *x *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}

impl EigenSystem {
    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of independent blocks found in the sparsity pattern.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        let (b, c) = self.order[k];
        let blk = &self.blocks[b];
        let mut amps = DVector::zeros(self.dim());
        for (row, &i) in blk.basis.iter().enumerate() {
            amps[i] = blk.vectors[(row, c)];
        }
        StateVector::with_amplitudes(&self.space, amps)
    }

    /// Dense matrix with eigenvector `k` in column `k`.
    pub fn eigenvectors(&self) -> DMatrix<C64> {
        let mut v = DMatrix::zeros(self.dim(), self.dim());
        for (k, &(b, c)) in self.order.iter().enumerate() {
            let blk = &self.blocks[b];
            for (row, &i) in blk.basis.iter().enumerate() {
                v[(i, k)] = blk.vectors[(row, c)];
            }
        }
        v
    }

    /// V Λ V†.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let v = self.eigenvectors();
        let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&e| C64::new(e, 0.0)),
        ));
        &v * lambda * v.adjoint()
    }

    /// f(H) as a dense matrix.
    pub fn function_matrix(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let v = self.eigenvectors();
        let fv = DMatrix::from_fn(self.dim(), self.dim(), |r, c| v[(r, c)] * f(self.eigenvalues[c]));
        fv * v.adjoint()
    }

    /// f(H)ψ.
    pub fn apply_function(&self, psi: &StateVector, f: impl Fn(f64) -> C64) -> Result<StateVector> {
        if !same_space(&self.space, psi.space()) {
            return Err(Error::SpaceMismatch);
        }
        let x = psi.amplitudes();
        let mut out = DVector::zeros(self.dim());
        for blk in &self.blocks {
            let local = DVector::from_iterator(blk.basis.len(), blk.basis.iter().map(|&i| x[i]));
            let mut coeffs = blk.vectors.ad_mul(&local);
            for (c, &e) in coeffs.iter_mut().zip(&blk.values) {
                *c *= f(e);
            }
            let back = &blk.vectors * coeffs;
            for (row, &i) in blk.basis.iter().enumerate() {
                out[i] = back[row];
            }
        }
        Ok(StateVector::with_amplitudes(&self.space, out))
    }

    /// V† O V as a dense matrix in the global eigenvalue order.
    pub fn to_eigenbasis(&self, op: &Operator) -> Result<DMatrix<C64>> {
        if !same_space(&self.space, op.space()) {
            return Err(Error::SpaceMismatch);
        }
        let v = self.eigenvectors();
        Ok(v.adjoint() * op.to_dense() * v)
    }
}

fn same_space(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// e^{∓iHt}ψ for `t ≥ 0`.
pub fn propagate(eig: &EigenSystem, psi: &StateVector, t: f64, direction: Direction) -> Result<StateVector> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let s = direction.sign() * t;
    eig.apply_function(psi, |e| C64::from_polar(1.0, s * e))
}

/// Evolves the forward branch with e^{−iHt} and the backward one with e^{+iHt}.
pub fn conditional_propagate(eig: &EigenSystem, bs: &BranchedState, t: f64) -> Result<BranchedState> {
    if !same_space(eig.space(), bs.space()) {
        return Err(Error::SpaceMismatch);
    }
    let fwd = propagate(eig, bs.fwd(), t, Direction::Forward)?;
    let bwd = propagate(eig, bs.bwd(), t, Direction::Backward)?;
    BranchedState::from_branches(fwd, bwd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{local_operator, make_space, LocalOp, SiteKind};
    use crate::models::build_disordered_heisenberg;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit(op: LocalOp) -> Operator {
        let s = make_space(vec![SiteKind::Qubit]).unwrap();
        local_operator(&s, 0, op).unwrap()
    }

    #[test]
    fn pauli_z_spectrum() {
        let eig = spectral_decompose(&qubit(LocalOp::SigmaZ)).unwrap();
        assert_eq!(eig.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn shift_moves_every_level() {
        let h = build_disordered_heisenberg(&[0.1, -0.3, 0.2]).unwrap();
        let shifted = &h + &(2.5 * &Operator::identity(h.space()));
        let a = spectral_decompose(&h).unwrap();
        let b = spectral_decompose(&shifted).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((y - x - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let h = build_disordered_heisenberg(&[0.4, -0.1, 0.25, 0.05]).unwrap();
        let eig = spectral_decompose(&h).unwrap();
        let err = (eig.reconstruct() - h.to_dense()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9 * h.max_abs());
        let v = eig.eigenvectors();
        let id = DMatrix::<C64>::identity(v.ncols(), v.ncols());
        assert!((v.adjoint() * v - id).iter().all(|x| x.norm() < 1e-10));
        assert!(eig.num_blocks() > 1);
    }

    #[test]
    fn rejects_non_hermitian_and_oversized() {
        assert!(matches!(spectral_decompose(&qubit(LocalOp::SigmaPlus)), Err(Error::NotHermitian(_))));
        let big = build_disordered_heisenberg(&[0.0; 4]).unwrap();
        assert_eq!(spectral_decompose_with_cap(&big, 8).unwrap_err(), Error::DimensionOverCap { dim: 16, cap: 8 });
    }

    #[test]
    fn eigenstate_picks_up_phase() {
        let eig = spectral_decompose(&qubit(LocalOp::SigmaZ)).unwrap();
        let up = StateVector::basis(eig.space(), 0).unwrap();
        let t = 0.73;
        let out = propagate(&eig, &up, t, Direction::Forward).unwrap();
        assert!((out.amplitudes()[0] - C64::from_polar(1.0, -t)).norm() < 1e-14);
        let same = propagate(&eig, &up, 0.0, Direction::Forward).unwrap();
        assert!(same.max_abs_diff(&up).unwrap() < 1e-15);
        assert!(propagate(&eig, &up, -1.0, Direction::Forward).is_err());
    }

    #[test]
    fn sigma_x_rotates_fully_at_half_pi() {
        let eig = spectral_decompose(&qubit(LocalOp::SigmaX)).unwrap();
        let up = StateVector::basis(eig.space(), 0).unwrap();
        let out = propagate(&eig, &up, std::f64::consts::FRAC_PI_2, Direction::Forward).unwrap();
        // e^{−iσˣπ/2} = −iσˣ
        assert!((out.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn canonical_phase_makes_largest_component_positive() {
        let mut v = [c(0.1, 0.2), c(0.0, -0.9), c(0.3, 0.0)];
        canonicalize_phase(&mut v);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
    }
}
