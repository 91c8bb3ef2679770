use crate::error::{Error, Result};
use crate::hilbert::{local_operator, make_space, LocalOp, Operator, SiteKind};

/// Open-chain H = Σ_i σ_i·σ_{i+1} + Σ_i h_i σᶻ_i on `fields.len()` qubits.
pub fn build_disordered_heisenberg(fields: &[f64]) -> Result<Operator> {
    let l = fields.len();
    if l < 2 {
        return Err(Error::InvalidParams(format!("Heisenberg chain needs L >= 2, got {l}")));
    }
    if fields.iter().any(|h| !h.is_finite()) {
        return Err(Error::InvalidParams("non-finite field".into()));
    }
    let space = make_space(vec![SiteKind::Qubit; l])?;
    let paulis = |op| (0..l).map(|i| local_operator(&space, i, op)).collect::<Result<Vec<_>>>();
    let (x, y, z) = (paulis(LocalOp::SigmaX)?, paulis(LocalOp::SigmaY)?, paulis(LocalOp::SigmaZ)?);

    let mut h = Operator::zeros(&space);
    for i in 0..l - 1 {
        for s in [&x, &y, &z] {
            h = &h + &(&s[i] * &s[i + 1]);
        }
    }
    for (i, &hi) in fields.iter().enumerate() {
        h = &h + &(hi * &z[i]);
    }
    h.into_hermitian()
}
