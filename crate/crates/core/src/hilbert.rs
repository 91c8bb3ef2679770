//! Composite Hilbert spaces of qubits, truncated bosons and a two-level clock,
//! together with operators and states living on them.
//!
//! Basis states are indexed with site 0 varying slowest. Qubit level `0` is
//! the σᶻ = +1 ("up") state and level `1` is σᶻ = −1; the clock level `n`
//! counts photons in the clock cavity, so τᶻ = 1 − 2a†a.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub type C64 = Complex64;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Qubit,
    /// Bosonic mode truncated to `n_max` quanta (dimension `n_max + 1`).
    Boson {
        n_max: usize,
    },
    /// The ancilla that sets the direction of time.
    Clock,
}

impl SiteKind {
    pub fn dim(self) -> usize {
        match self {
            SiteKind::Qubit | SiteKind::Clock => 2,
            SiteKind::Boson { n_max } => n_max + 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SiteKind::Qubit => "qubit",
            SiteKind::Boson { .. } => "boson",
            SiteKind::Clock => "clock",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    sites: Vec<SiteKind>,
    strides: Vec<usize>,
    total_dim: usize,
}

/// Builds the tensor-product space of `sites`.
pub fn make_space(sites: Vec<SiteKind>) -> Result<Arc<HilbertSpace>> {
    if sites.is_empty() {
        return Err(Error::EmptySpace);
    }
    let clocks = sites.iter().filter(|s| matches!(s, SiteKind::Clock)).count();
    if clocks > 1 {
        return Err(Error::MultipleClocks(clocks));
    }
    if sites.iter().any(|s| matches!(s, SiteKind::Boson { n_max: 0 })) {
        return Err(Error::BosonCutoff);
    }
    let mut strides = vec![1; sites.len()];
    for i in (0..sites.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sites[i + 1].dim();
    }
    let total_dim = strides[0] * sites[0].dim();
    Ok(Arc::new(HilbertSpace { sites, strides, total_dim }))
}

impl HilbertSpace {
    pub fn sites(&self) -> &[SiteKind] {
        &self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.total_dim
    }

    pub fn site_dim(&self, site: usize) -> usize {
        self.sites[site].dim()
    }

    /// Local level of `site` in basis state `index`.
    #[inline]
    pub fn level(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.sites[site].dim()
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.sites.len()).map(|s| self.level(index, s)).collect()
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.sites.len() {
            return Err(Error::BadOccupation);
        }
        levels.iter().zip(&self.sites).zip(&self.strides).try_fold(0, |acc, ((&l, s), &st)| {
            if l < s.dim() {
                Ok(acc + l * st)
            } else {
                Err(Error::BadOccupation)
            }
        })
    }

    pub fn clock_site(&self) -> Option<usize> {
        self.sites.iter().position(|s| matches!(s, SiteKind::Clock))
    }

    pub fn qubit_sites(&self) -> Vec<usize> {
        self.sites_where(|s| matches!(s, SiteKind::Qubit))
    }

    pub fn boson_sites(&self) -> Vec<usize> {
        self.sites_where(|s| matches!(s, SiteKind::Boson { .. }))
    }

    fn sites_where(&self, pred: impl Fn(&SiteKind) -> bool) -> Vec<usize> {
        self.sites.iter().enumerate().filter(|(_, s)| pred(s)).map(|(i, _)| i).collect()
    }

    /// Basis indices whose clock level equals `n_a`, in ascending order.
    pub fn clock_sector_basis(&self, n_a: usize) -> Result<Vec<usize>> {
        let clock = self.clock_site().ok_or(Error::NoClock)?;
        if n_a > 1 {
            return Err(Error::BadSector(n_a));
        }
        Ok((0..self.total_dim).filter(|&i| self.level(i, clock) == n_a).collect())
    }

    /// The same space with the clock site removed.
    pub fn without_clock(&self) -> Result<Arc<HilbertSpace>> {
        let clock = self.clock_site().ok_or(Error::NoClock)?;
        let sites = self.sites.iter().enumerate().filter(|&(i, _)| i != clock).map(|(_, s)| *s).collect();
        make_space(sites)
    }
}

fn same_space(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Single-site operators understood by [`local_operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOp {
    /// Boson annihilation `a`.
    Annihilate,
    /// Boson creation `a†`.
    Create,
    /// Boson number `a†a`.
    Number,
    SigmaX,
    SigmaY,
    SigmaZ,
    /// σ⁺ = |0⟩⟨1| raises the qubit from down to up.
    SigmaPlus,
    SigmaMinus,
    /// |0⟩⟨0| (spin up).
    ProjUp,
    /// |1⟩⟨1| (spin down).
    ProjDown,
    TauX,
    TauY,
    TauZ,
    /// |n_a⟩⟨n_a| on the clock.
    ClockProjector(usize),
}

impl LocalOp {
    fn name(self) -> &'static str {
        match self {
            LocalOp::Annihilate => "a",
            LocalOp::Create => "a_dag",
            LocalOp::Number => "n",
            LocalOp::SigmaX => "sigma_x",
            LocalOp::SigmaY => "sigma_y",
            LocalOp::SigmaZ => "sigma_z",
            LocalOp::SigmaPlus => "sigma_plus",
            LocalOp::SigmaMinus => "sigma_minus",
            LocalOp::ProjUp => "proj_up",
            LocalOp::ProjDown => "proj_down",
            LocalOp::TauX => "tau_x",
            LocalOp::TauY => "tau_y",
            LocalOp::TauZ => "tau_z",
            LocalOp::ClockProjector(_) => "clock_projector",
        }
    }

    /// Matrix elements `(row, col, value)` on a site of kind `kind`.
    fn entries(self, kind: SiteKind) -> Result<Vec<(usize, usize, C64)>> {
        let i = C64::new(0.0, 1.0);
        let mismatch = || Error::KindMismatch { op: self.name(), site: kind.name() };
        let two_level = |m: [[C64; 2]; 2]| {
            let mut out = Vec::new();
            for (r, row) in m.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    if v != ZERO {
                        out.push((r, c, v));
                    }
                }
            }
            out
        };
        let x = [[ZERO, ONE], [ONE, ZERO]];
        let y = [[ZERO, -i], [i, ZERO]];
        let z = [[ONE, ZERO], [ZERO, -ONE]];
        match (self, kind) {
            (LocalOp::Annihilate, SiteKind::Boson { n_max }) => {
                Ok((1..=n_max).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))).collect())
            }
            (LocalOp::Create, SiteKind::Boson { n_max }) => {
                Ok((1..=n_max).map(|n| (n, n - 1, C64::new((n as f64).sqrt(), 0.0))).collect())
            }
            (LocalOp::Number, SiteKind::Boson { n_max }) => {
                Ok((1..=n_max).map(|n| (n, n, C64::new(n as f64, 0.0))).collect())
            }
            (LocalOp::SigmaX, SiteKind::Qubit) => Ok(two_level(x)),
            (LocalOp::SigmaY, SiteKind::Qubit) => Ok(two_level(y)),
            (LocalOp::SigmaZ, SiteKind::Qubit) => Ok(two_level(z)),
            (LocalOp::SigmaPlus, SiteKind::Qubit) => Ok(vec![(0, 1, ONE)]),
            (LocalOp::SigmaMinus, SiteKind::Qubit) => Ok(vec![(1, 0, ONE)]),
            (LocalOp::ProjUp, SiteKind::Qubit) => Ok(vec![(0, 0, ONE)]),
            (LocalOp::ProjDown, SiteKind::Qubit) => Ok(vec![(1, 1, ONE)]),
            (LocalOp::TauX, SiteKind::Clock) => Ok(two_level(x)),
            (LocalOp::TauY, SiteKind::Clock) => Ok(two_level(y)),
            (LocalOp::TauZ, SiteKind::Clock) => Ok(two_level(z)),
            (LocalOp::ClockProjector(n), SiteKind::Clock) if n < 2 => Ok(vec![(n, n, ONE)]),
            _ => Err(mismatch()),
        }
    }

    fn is_hermitian(self) -> bool {
        !matches!(self, LocalOp::Annihilate | LocalOp::Create | LocalOp::SigmaPlus | LocalOp::SigmaMinus)
    }
}

/// An immutable square matrix on a [`HilbertSpace`].
#[derive(Clone, Debug)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: CsrMatrix,
    hermitian: bool,
}

impl Operator {
    /// Wraps `matrix`. With `hermitian_hint` the matrix must equal its adjoint
    /// to within 1e-12 elementwise.
    pub fn new(space: Arc<HilbertSpace>, matrix: CsrMatrix, hermitian_hint: bool) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: matrix.dim() });
        }
        let op = Operator { space, matrix, hermitian: false };
        if hermitian_hint {
            op.into_hermitian()
        } else {
            Ok(op)
        }
    }

    pub fn from_dense(space: Arc<HilbertSpace>, m: &DMatrix<C64>, hermitian_hint: bool) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: m.nrows().max(m.ncols()) });
        }
        Self::new(space, CsrMatrix::from_dense(m), hermitian_hint)
    }

    pub fn zeros(space: &Arc<HilbertSpace>) -> Self {
        Operator { matrix: CsrMatrix::zeros(space.dim()), space: space.clone(), hermitian: true }
    }

    pub fn identity(space: &Arc<HilbertSpace>) -> Self {
        Operator { matrix: CsrMatrix::identity(space.dim()), space: space.clone(), hermitian: true }
    }

    /// Diagonal operator whose entry at basis state `i` is `f(i)`.
    pub fn diagonal(space: &Arc<HilbertSpace>, f: impl Fn(usize) -> f64) -> Self {
        let diag: Vec<C64> = (0..space.dim()).map(|i| C64::new(f(i), 0.0)).collect();
        Operator { matrix: CsrMatrix::from_diagonal(&diag), space: space.clone(), hermitian: true }
    }

    /// Embeds a local `d × d` matrix acting on `site`, identity elsewhere.
    pub fn embed(space: &Arc<HilbertSpace>, site: usize, local: &DMatrix<C64>) -> Result<Self> {
        if site >= space.num_sites() {
            return Err(Error::SiteOutOfRange { index: site, len: space.num_sites() });
        }
        let d = space.site_dim(site);
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: local.nrows().max(local.ncols()) });
        }
        let entries: Vec<_> = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, local[(r, c)]))
            .filter(|e| e.2 != ZERO)
            .collect();
        let hermitian = (local - local.adjoint()).iter().all(|v| v.norm() == 0.0);
        Ok(Self::embed_entries(space, site, &entries, hermitian))
    }

    fn embed_entries(space: &Arc<HilbertSpace>, site: usize, entries: &[(usize, usize, C64)], hermitian: bool) -> Self {
        let stride = space.strides[site];
        let triplets = (0..space.dim()).flat_map(|col| {
            let level = space.level(col, site);
            entries.iter().filter(move |e| e.1 == level).map(move |&(r, _, v)| {
                let row = col - level * stride + r * stride;
                (row, col, v)
            })
        });
        Operator { matrix: CsrMatrix::from_triplets(space.dim(), triplets), space: space.clone(), hermitian }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    pub fn adjoint(&self) -> Self {
        Operator { matrix: self.matrix.adjoint(), space: self.space.clone(), hermitian: self.hermitian }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Operator {
            matrix: self.matrix.scale(alpha),
            space: self.space.clone(),
            hermitian: self.hermitian && alpha.im == 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_space(other.space())?;
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }

    /// ‖A − A†‖ in the elementwise max norm.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.max_abs_diff(&self.matrix.adjoint())
    }

    /// Validates Hermiticity and sets the hint.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect >= HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_space(other.space())?;
        Ok(&(self * other) - &(other * self))
    }

    /// Whether `A†A = 1` to within `tol` elementwise.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.matrix.adjoint().matmul(&self.matrix);
        prod.max_abs_diff(&CsrMatrix::identity(self.dim())) < tol
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_space(state.space())?;
        Ok(StateVector { space: self.space.clone(), amps: self.matrix.mul_vec(&state.amps) })
    }

    /// Principal block on `basis`, reinterpreted on `target`.
    pub fn restrict(&self, basis: &[usize], target: &Arc<HilbertSpace>) -> Result<Operator> {
        if basis.len() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: basis.len() });
        }
        Ok(Operator { matrix: self.matrix.restrict(basis), space: target.clone(), hermitian: self.hermitian })
    }

    /// Largest element connecting different clock sectors.
    pub fn clock_coupling(&self) -> Result<f64> {
        let clock = self.space.clock_site().ok_or(Error::NoClock)?;
        Ok(self
            .matrix
            .iter()
            .filter(|&(r, c, _)| self.space.level(r, clock) != self.space.level(c, clock))
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max))
    }

    /// The block acting in clock sector `n_a`, as an operator on the space
    /// without the clock. Fails if the operator mixes sectors.
    pub fn clock_sector(&self, n_a: usize) -> Result<Operator> {
        let leak = self.clock_coupling()?;
        if leak > HERMITIAN_TOL {
            return Err(Error::ClockCoupling(leak));
        }
        let basis = self.space.clock_sector_basis(n_a)?;
        let reduced = self.space.without_clock()?;
        self.restrict(&basis, &reduced)
    }

    fn check_space(&self, other: &Arc<HilbertSpace>) -> Result<()> {
        if same_space(&self.space, other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    /// Panics if the operands live on different spaces.
    fn add(self, rhs: &Operator) -> Operator {
        self.check_space(rhs.space()).expect("operator addition across spaces");
        Operator {
            matrix: self.matrix.axpby(ONE, &rhs.matrix, ONE),
            space: self.space.clone(),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.check_space(rhs.space()).expect("operator subtraction across spaces");
        Operator {
            matrix: self.matrix.axpby(ONE, &rhs.matrix, -ONE),
            space: self.space.clone(),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.check_space(rhs.space()).expect("operator product across spaces");
        Operator { matrix: self.matrix.matmul(&rhs.matrix), space: self.space.clone(), hermitian: false }
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

/// `op` acting on `site`, identity elsewhere.
pub fn local_operator(space: &Arc<HilbertSpace>, site: usize, op: LocalOp) -> Result<Operator> {
    let kind = *space.sites().get(site).ok_or(Error::SiteOutOfRange { index: site, len: space.num_sites() })?;
    let entries = op.entries(kind)?;
    Ok(Operator::embed_entries(space, site, &entries, op.is_hermitian()))
}

/// Σₖ cₖ · (Aₖ₁ Aₖ₂ ⋯). An empty product is the identity.
pub fn compose(space: &Arc<HilbertSpace>, terms: &[(C64, Vec<&Operator>)]) -> Result<Operator> {
    let mut total = Operator::zeros(space);
    for (coeff, factors) in terms {
        let mut product = Operator::identity(space);
        for f in factors {
            if !same_space(space, f.space()) {
                return Err(Error::SpaceMismatch);
            }
            product = &product * f;
        }
        total = &total + &product.scale(*coeff);
    }
    Ok(total)
}

pub fn apply(op: &Operator, state: &StateVector) -> Result<StateVector> {
    op.apply(state)
}

/// ⟨lhs|rhs⟩, conjugate-linear in `lhs`.
pub fn inner(lhs: &StateVector, rhs: &StateVector) -> Result<C64> {
    if !same_space(&lhs.space, &rhs.space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(lhs.amps.dotc(&rhs.amps))
}

pub fn expectation(op: &Operator, state: &StateVector) -> Result<C64> {
    inner(state, &op.apply(state)?)
}

/// Projector onto basis states with Σ σᶻ over `qubit_sites` equal to `value`.
pub fn projector_total_sz(space: &Arc<HilbertSpace>, qubit_sites: &[usize], value: i64) -> Result<Operator> {
    for &q in qubit_sites {
        match space.sites().get(q) {
            Some(SiteKind::Qubit) => {}
            Some(other) => return Err(Error::KindMismatch { op: "projector_total_sz", site: other.name() }),
            None => return Err(Error::SiteOutOfRange { index: q, len: space.num_sites() }),
        }
    }
    let k = qubit_sites.len() as i64;
    if value.abs() > k || (value + k) % 2 != 0 {
        return Err(Error::UnattainableSz { value, qubits: qubit_sites.len() });
    }
    Ok(Operator::diagonal(space, |i| {
        let sz: i64 = qubit_sites.iter().map(|&q| if space.level(i, q) == 0 { 1 } else { -1 }).sum();
        if sz == value {
            1.0
        } else {
            0.0
        }
    }))
}

/// Amplitudes on a [`HilbertSpace`].
#[derive(Clone, Debug)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(space: &Arc<HilbertSpace>, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: amps.len() });
        }
        if !amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NotNormalized(f64::NAN));
        }
        Ok(StateVector { space: space.clone(), amps })
    }

    pub fn zeros(space: &Arc<HilbertSpace>) -> Self {
        StateVector { space: space.clone(), amps: DVector::zeros(space.dim()) }
    }

    pub fn basis(space: &Arc<HilbertSpace>, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::BadOccupation);
        }
        let mut amps = DVector::zeros(space.dim());
        amps[index] = ONE;
        Ok(StateVector { space: space.clone(), amps })
    }

    pub fn from_levels(space: &Arc<HilbertSpace>, levels: &[usize]) -> Result<Self> {
        Self::basis(space, space.index_of(levels)?)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < 1e-12
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, alpha: C64) -> Self {
        StateVector { space: self.space.clone(), amps: &self.amps * alpha }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: C64, other: &StateVector) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(StateVector { space: self.space.clone(), amps: &self.amps + &other.amps * alpha })
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok((&self.amps - &other.amps).iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    pub(crate) fn with_amplitudes(space: &Arc<HilbertSpace>, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), space.dim());
        StateVector { space: space.clone(), amps }
    }
}
