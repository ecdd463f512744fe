//! The unital completely positive maps `π₁`, `π₂` on `H ⊗ ℂᵀ`.
//!
//! ```text
//! π₁(A) = Σ_{n≤0} Uₙ (A ⊗ 1) Uₙ* + Σ_{n≥1} Uₙ (ρⁿ(A) ⊗ 1) Uₙ*,   Uₙ = Σᵢ P_{i+n} ⊗ e_{i0}
//! ```
//!
//! and `π₂` with `ρⁿ⁻¹(ε(A))` in the second sum. On the truncated model `n`
//! runs from `−(T−1)` to `N`; outside that range `Uₙ` vanishes. The tensor
//! index of `w ⊗ eᵢ` is `pos(w)·T + i`.

use super::{ShiftPowers, Variant};
use crate::error::{Error, Result};
use crate::fock::{self, classify_case, Case, FockOperator, FockSpace, Word};
use crate::sparse::SparseMatrix;
use crate::C64;
use rand::Rng;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorOperator {
    pub tensor_dim: usize,
    pub matrix: SparseMatrix,
}

impl TensorOperator {
    pub fn max_abs_diff(&self, other: &TensorOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `min Re⟨v, X v⟩ / ‖v‖²` over random complex Gaussian-like vectors.
    pub fn min_quadratic_form<R: Rng>(&self, rng: &mut R, samples: usize) -> f64 {
        let dim = self.matrix.dim();
        let mut worst = f64::INFINITY;
        for _ in 0..samples {
            let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let xv = self.matrix.apply(&v);
            let num: C64 = v.iter().zip(&xv).map(|(a, b)| a.conj() * b).sum();
            let den: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.min(num.re / den);
        }
        worst
    }
}

fn matrix_unit(dim: usize, row: usize, col: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(dim, [(row, col, C64::new(1.0, 0.0))])
}

/// `Uₙ = Σ_{0≤i<T} P_{i+n} ⊗ e_{i0}`.
pub fn u_n(space: &Arc<FockSpace>, tensor_dim: usize, n: isize) -> SparseMatrix {
    let mut out = SparseMatrix::zeros(space.dim() * tensor_dim);
    for i in 0..tensor_dim {
        let level = i as isize + n;
        if level < 0 || level as usize > space.max_len() {
            continue;
        }
        let p = fock::level_projection(space, level as usize);
        out.accumulate(&p.matrix().kron(&matrix_unit(tensor_dim, i, 0)));
    }
    out
}

/// `π_{variant}(A)` assembled from the explicit isometries `Uₙ`.
pub fn ucp_pi_apply(space: &Arc<FockSpace>, tensor_dim: usize, variant: Variant, a: &FockOperator) -> Result<TensorOperator> {
    if tensor_dim < space.max_len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "tensor dimension {tensor_dim} is below N + 1 = {}",
            space.max_len() + 1
        )));
    }
    if !Arc::ptr_eq(space, a.space()) {
        return Err(Error::DimensionMismatch("operator lives on a different space".into()));
    }
    let powers = ShiftPowers::new(a);
    let one = SparseMatrix::identity(tensor_dim);
    let mut out = SparseMatrix::zeros(space.dim() * tensor_dim);
    for n in -(tensor_dim as isize - 1)..=space.max_len() as isize {
        let inner = if n <= 0 { powers.base() } else { powers.shifted(variant, n as usize) };
        let u = u_n(space, tensor_dim, n);
        if u.nnz() == 0 || inner.matrix().nnz() == 0 {
            continue;
        }
        out.accumulate(&u.matmul(&inner.matrix().kron(&one)).matmul(&u.adjoint()));
    }
    Ok(TensorOperator { tensor_dim, matrix: out })
}

/// `Sᵃ(S*)ᵇ` on `ℂᵀ` with the truncated shift `S eⱼ = e_{j+1}`.
pub fn shift_monomial(tensor_dim: usize, a: usize, b: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(
        tensor_dim,
        (b..tensor_dim).filter(|j| j - b + a < tensor_dim).map(|j| (j - b + a, j, C64::new(1.0, 0.0))),
    )
}

/// `L_ξL_η* ⊗ Sᵏ(S*)ˡ`, or `⊗ S^{k−1}(S*)^{l−1}` for `π₂` in Case 2.
pub fn ucp_expected(space: &Arc<FockSpace>, tensor_dim: usize, variant: Variant, xi: &Word, eta: &Word) -> Result<TensorOperator> {
    let (k, l) = (xi.len(), eta.len());
    let (a, b) = match (variant, classify_case(xi, eta)) {
        (Variant::Second, Case::Case2) => (k - 1, l - 1),
        _ => (k, l),
    };
    let op = fock::word_operator(space, xi, eta)?;
    Ok(TensorOperator { tensor_dim, matrix: op.matrix().kron(&shift_monomial(tensor_dim, a, b)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_space, FockSpec, Letter};
    use crate::multiplier::word_pairs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(dims: &[usize], n: usize) -> Arc<FockSpace> {
        build_space(FockSpec::new(dims.to_vec(), n)).unwrap()
    }

    /// Entry `(r⊗i, c⊗j)` equals `Xₘ(r, c)` with `m = |r| − i = |c| − j`.
    fn block_oracle(space: &Arc<FockSpace>, t: usize, variant: Variant, a: &FockOperator) -> SparseMatrix {
        let mut triplets = Vec::new();
        for n in -(t as isize - 1)..=space.max_len() as isize {
            let x = match (n, variant) {
                (n, _) if n <= 0 => a.clone(),
                (n, Variant::First) => fock::rho_pow(a, n as usize),
                (n, Variant::Second) => fock::rho_pow(&fock::eps(a), n as usize - 1),
            };
            for (r, c, v) in x.matrix().iter() {
                let i = space.len_of(r) as isize - n;
                let j = space.len_of(c) as isize - n;
                if (0..t as isize).contains(&i) && (0..t as isize).contains(&j) {
                    triplets.push((r * t + i as usize, c * t + j as usize, v));
                }
            }
        }
        SparseMatrix::from_triplets(space.dim() * t, triplets)
    }

    #[test]
    fn explicit_isometries_match_block_formula() {
        let s = space(&[2, 1], 3);
        let a = fock::word_operator(&s, &s.basis()[2].clone(), &s.basis()[5].clone()).unwrap();
        for variant in [Variant::First, Variant::Second] {
            let got = ucp_pi_apply(&s, 5, variant, &a).unwrap();
            assert_eq!(got.matrix, block_oracle(&s, 5, variant, &a));
        }
    }

    #[test]
    fn unital() {
        let s = space(&[1, 1], 4);
        for variant in [Variant::First, Variant::Second] {
            let got = ucp_pi_apply(&s, 6, variant, &fock::identity(&s)).unwrap();
            assert_eq!(got.matrix, SparseMatrix::identity(s.dim() * 6));
        }
    }

    #[test]
    fn tensor_relations() {
        let s = space(&[1, 1], 4);
        for (xi, eta) in word_pairs(&s, 4, None) {
            let a = fock::word_operator(&s, &xi, &eta).unwrap();
            for variant in [Variant::First, Variant::Second] {
                let got = ucp_pi_apply(&s, 6, variant, &a).unwrap();
                let expected = ucp_expected(&s, 6, variant, &xi, &eta).unwrap();
                assert!(got.max_abs_diff(&expected) < 1e-12, "{xi} {eta} {variant:?}");
            }
        }
    }

    #[test]
    fn single_letter_gives_shift() {
        let s = space(&[1, 1], 3);
        let g = Word::new(vec![Letter::new(0, 0)]).unwrap();
        let lg = fock::creation(&s, Letter::new(0, 0)).unwrap();
        let got = ucp_pi_apply(&s, 4, Variant::First, &lg).unwrap();
        assert_eq!(got.matrix, lg.matrix().kron(&shift_monomial(4, 1, 0)));
        let case2 = ucp_expected(&s, 4, Variant::Second, &g, &g).unwrap();
        let gg = fock::word_operator(&s, &g, &g).unwrap();
        assert_eq!(case2.matrix, gg.matrix().kron(&SparseMatrix::identity(4)));
    }

    #[test]
    fn positivity_spot_check() {
        let s = space(&[2, 1], 2);
        let a = fock::word_operator(&s, &s.basis()[1].clone(), &s.basis()[3].clone())
            .unwrap()
            .plus(&fock::creation(&s, Letter::new(1, 0)).unwrap().scale(C64::new(0.3, -0.8)));
        let ata = a.adjoint().compose(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for variant in [Variant::First, Variant::Second] {
            let pi = ucp_pi_apply(&s, 3, variant, &ata).unwrap();
            assert!(pi.min_quadratic_form(&mut rng, 50) >= -1e-12);
        }
    }

    #[test]
    fn rejects_small_tensor_factor() {
        let s = space(&[1, 1], 4);
        assert!(matches!(ucp_pi_apply(&s, 4, Variant::First, &fock::identity(&s)), Err(Error::DimensionMismatch(_))));
    }
}
