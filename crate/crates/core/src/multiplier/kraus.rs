//! Christensen–Sinclair bounds from explicit Kraus families.
//!
//! `Φ⁽¹⁾_{x,y}(A) = Σ uᵢ A vᵢ` with
//! `uᵢ ∈ {D_{(S*)ⁿx}} ∪ {D_{Sⁿx} R_ζ : ζ ∈ Λ(n), n ≥ 1}` and `vᵢ` the adjoints of
//! the same operators built from `y`. For `Φ⁽²⁾` the second family is
//! `D_{Sⁿx} R_ζ qᵢ` with `ζ ∈ Λ(n−1)`.

use super::Variant;
use crate::error::Result;
use crate::fock::{self, FockOperator, FockSpace, Word};
use crate::hankel::l2;
use crate::linalg;
use crate::sparse::SparseMatrix;
use crate::C64;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsBound {
    /// `‖Σ uᵢuᵢ*‖`.
    pub row: f64,
    /// `‖Σ vᵢ*vᵢ‖`.
    pub col: f64,
    /// `row · col`.
    pub bound: f64,
    /// `√(row · col)`, the bound on the cb norm itself.
    pub cb: f64,
}

fn shifted_diagonal(space: &Arc<FockSpace>, x: &[C64], shift: isize) -> Result<FockOperator> {
    let a: Vec<C64> = (0..=space.max_len() as isize)
        .map(|p| {
            let q = p + shift;
            if q < 0 {
                C64::default()
            } else {
                x.get(q as usize).copied().unwrap_or_default()
            }
        })
        .collect();
    fock::diagonal(space, &a)
}

/// Every `uᵢ` of the family built from `x`.
pub fn kraus_family(space: &Arc<FockSpace>, x: &[C64], variant: Variant) -> Result<Vec<FockOperator>> {
    let mut out = Vec::new();
    for n in 0..x.len().max(1) {
        out.push(shifted_diagonal(space, x, n as isize)?);
    }
    let n_max = space.max_len();
    let qs: Vec<FockOperator> = (0..space.num_factors()).map(|i| fock::factor_end_projection(space, i)).collect::<Result<_>>()?;
    for n in 1..=n_max {
        let d = shifted_diagonal(space, x, -(n as isize))?;
        match variant {
            Variant::First => {
                for zeta in space.level_words(n) {
                    out.push(d.compose(&fock::right_word(space, zeta)?));
                }
            }
            Variant::Second => {
                let words: Vec<Word> = space.level_words(n - 1).to_vec();
                for zeta in &words {
                    let dr = d.compose(&fock::right_word(space, zeta)?);
                    for q in &qs {
                        out.push(dr.compose(q));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Σ uᵢuᵢ*` for the family built from `x`.
pub fn row_sum(space: &Arc<FockSpace>, x: &[C64], variant: Variant) -> Result<FockOperator> {
    let mut acc = SparseMatrix::zeros(space.dim());
    for u in kraus_family(space, x, variant)? {
        acc.accumulate(u.compose(&u.adjoint()).matrix());
    }
    FockOperator::new(space, acc)
}

/// Spectral norm of a Hermitian sparse operator.
pub fn hermitian_operator_norm(op: &FockOperator) -> Result<f64> {
    let m = op.matrix();
    if m.dim() <= linalg::DENSE_EIGEN_LIMIT {
        return linalg::hermitian_norm(&m.to_dense());
    }
    linalg::power_iteration_norm(|v| DVector::from_vec(m.apply(v.as_slice())), m.dim(), 1e-13, 10_000)
}

/// Row and column norms of the Kraus families of `Φ^{(variant)}_{x,y}`.
pub fn cs_bound(space: &Arc<FockSpace>, x: &[C64], y: &[C64], variant: Variant) -> Result<CsBound> {
    let row = hermitian_operator_norm(&row_sum(space, x, variant)?)?;
    // vᵢ*vᵢ has the same shape as uᵢuᵢ* with y in place of x
    let col = hermitian_operator_norm(&row_sum(space, y, variant)?)?;
    let bound = row * col;
    Ok(CsBound { row, col, bound, cb: bound.sqrt() })
}

/// `‖x‖₂²`, the value the row sum takes on every basis word.
pub fn row_identity_scale(x: &[C64]) -> f64 {
    l2(x).powi(2)
}
