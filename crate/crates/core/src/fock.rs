//! Truncated free product of pointed finite-dimensional Hilbert spaces.
//!
//! Factor `i` contributes `factor_dims[i]` letters spanning the orthogonal
//! complement of its distinguished vector. Basis words are alternating strings
//! of letters (consecutive letters from distinct factors) of length at most
//! `max_len`; the empty word is the vacuum `Ω`. Creations that would produce a
//! word longer than `max_len` return zero.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

/// Default cap on the number of basis words.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpec {
    #[serde(rename = "factors")]
    pub factor_dims: Vec<usize>,
    pub max_len: usize,
}

impl FockSpec {
    pub fn new(factor_dims: Vec<usize>, max_len: usize) -> Self {
        FockSpec { factor_dims, max_len }
    }

    pub fn validate(&self) -> Result<()> {
        if self.factor_dims.is_empty() {
            return Err(Error::InvalidSpace("at least one factor is required".into()));
        }
        if self.factor_dims.contains(&0) {
            return Err(Error::InvalidSpace("factor dimensions must be positive".into()));
        }
        if self.max_len == 0 {
            return Err(Error::InvalidSpace("max_len must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of words per length `0..=max_len`, `None` on overflow.
    pub fn level_sizes(&self) -> Option<Vec<u128>> {
        // ending[i]: words of the current length whose last letter is in factor i
        let mut ending = vec![0u128; self.factor_dims.len()];
        let mut total: u128 = 1;
        let mut sizes = vec![1u128];
        for _ in 0..self.max_len {
            let next: Option<Vec<u128>> = self
                .factor_dims
                .iter()
                .zip(&ending)
                .map(|(&d, &e)| (d as u128).checked_mul(total - e))
                .collect();
            ending = next?;
            total = ending.iter().try_fold(0u128, |acc, &x| acc.checked_add(x))?;
            sizes.push(total);
        }
        Some(sizes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub factor: usize,
    pub index: usize,
}

impl Letter {
    pub fn new(factor: usize, index: usize) -> Self {
        Letter { factor, index }
    }
}

/// Ordered by length first, then lexicographically by letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn vacuum() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0].factor == w[1].factor) {
            return Err(Error::InvalidWord("consecutive letters must come from distinct factors".into()));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// `self ⊗ other` if the junction alternates.
    pub fn concat(&self, other: &Word) -> Option<Word> {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) if a.factor == b.factor => None,
            _ => Some(Word(self.0.iter().chain(&other.0).copied().collect())),
        }
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Ω");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("{}.{}", l.factor, l.index)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
}

/// Case 1 if either word is the vacuum or the last letters sit in distinct
/// factors, Case 2 if both last letters sit in the same factor.
pub fn classify_case(xi: &Word, eta: &Word) -> Case {
    match (xi.last(), eta.last()) {
        (Some(a), Some(b)) if a.factor == b.factor => Case::Case2,
        _ => Case::Case1,
    }
}

#[derive(Debug)]
pub struct FockSpace {
    spec: FockSpec,
    basis: Vec<Word>,
    index: HashMap<Word, usize>,
    level_offsets: Vec<usize>,
    letters: Vec<Letter>,
    // per letter: basis position of γ⊗w, resp. w⊗γ, where defined
    prepend: Vec<Vec<Option<usize>>>,
    append: Vec<Vec<Option<usize>>>,
}

pub fn build_space(spec: FockSpec) -> Result<Arc<FockSpace>> {
    build_space_with_cap(spec, DEFAULT_BASIS_CAP)
}

pub fn build_space_with_cap(spec: FockSpec, cap: usize) -> Result<Arc<FockSpace>> {
    spec.validate()?;
    let sizes = spec.level_sizes();
    let total = sizes.as_ref().map(|s| s.iter().sum::<u128>());
    match total {
        Some(t) if t <= cap as u128 => {}
        _ => {
            let size = total.map_or(usize::MAX, |t| usize::try_from(t).unwrap_or(usize::MAX));
            return Err(Error::TooLarge { size, cap });
        }
    }

    let letters: Vec<Letter> = spec
        .factor_dims
        .iter()
        .enumerate()
        .flat_map(|(f, &d)| (0..d).map(move |i| Letter::new(f, i)))
        .collect();

    let mut basis = vec![Word::vacuum()];
    let mut level_offsets = vec![0];
    let mut previous = 0..1;
    for _ in 0..spec.max_len {
        let start = basis.len();
        level_offsets.push(start);
        for &gamma in &letters {
            for pos in previous.clone() {
                let w = &basis[pos];
                if w.first().is_none_or(|l| l.factor != gamma.factor) {
                    let mut letters = Vec::with_capacity(w.len() + 1);
                    letters.push(gamma);
                    letters.extend_from_slice(w.letters());
                    basis.push(Word(letters));
                }
            }
        }
        previous = start..basis.len();
    }
    let index: HashMap<Word, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();

    let lookup = |w: Option<Word>| w.and_then(|w| index.get(&w).copied());
    let prepend = letters
        .iter()
        .map(|&g| basis.iter().map(|w| lookup(Word(vec![g]).concat(w))).collect())
        .collect();
    let append = letters
        .iter()
        .map(|&g| basis.iter().map(|w| lookup(w.concat(&Word(vec![g])))).collect())
        .collect();

    Ok(Arc::new(FockSpace { spec, basis, index, level_offsets, letters, prepend, append }))
}

impl FockSpace {
    pub fn spec(&self) -> &FockSpec {
        &self.spec
    }

    pub fn max_len(&self) -> usize {
        self.spec.max_len
    }

    pub fn num_factors(&self) -> usize {
        self.spec.factor_dims.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn word(&self, pos: usize) -> &Word {
        &self.basis[pos]
    }

    pub fn position(&self, word: &Word) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    /// Basis positions of `Λ(n)`.
    pub fn level(&self, n: usize) -> std::ops::Range<usize> {
        if n > self.max_len() {
            return self.dim()..self.dim();
        }
        let end = self.level_offsets.get(n + 1).copied().unwrap_or(self.dim());
        self.level_offsets[n]..end
    }

    pub fn level_words(&self, n: usize) -> &[Word] {
        &self.basis[self.level(n)]
    }

    /// `Λ(1)` in basis order.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len_of(&self, pos: usize) -> usize {
        self.basis[pos].len()
    }

    fn letter_slot(&self, letter: Letter) -> Result<usize> {
        self.letters
            .binary_search(&letter)
            .map_err(|_| Error::InvalidWord(format!("letter {}.{} is not in the space", letter.factor, letter.index)))
    }

    pub(crate) fn append_map(&self, letter: Letter) -> Result<&[Option<usize>]> {
        Ok(&self.append[self.letter_slot(letter)?])
    }

    pub(crate) fn prepend_map(&self, letter: Letter) -> Result<&[Option<usize>]> {
        Ok(&self.prepend[self.letter_slot(letter)?])
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        for &l in word.letters() {
            self.letter_slot(l)?;
        }
        Ok(())
    }
}

/// A matrix on the word basis of a [`FockSpace`].
#[derive(Debug, Clone)]
pub struct FockOperator {
    space: Arc<FockSpace>,
    matrix: SparseMatrix,
}

impl PartialEq for FockOperator {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.matrix == other.matrix
    }
}

impl FockOperator {
    pub fn new(space: &Arc<FockSpace>, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::DimensionMismatch(format!("matrix of dimension {} on a space of dimension {}", matrix.dim(), space.dim())));
        }
        Ok(FockOperator { space: Arc::clone(space), matrix })
    }

    fn wrap(&self, matrix: SparseMatrix) -> Self {
        FockOperator { space: Arc::clone(&self.space), matrix }
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        self.wrap(self.matrix.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.wrap(self.matrix.scale(factor))
    }

    pub fn compose(&self, rhs: &FockOperator) -> Self {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        self.wrap(self.matrix.matmul(&rhs.matrix))
    }

    pub fn plus(&self, rhs: &FockOperator) -> Self {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        self.wrap(&self.matrix + &rhs.matrix)
    }

    pub fn minus(&self, rhs: &FockOperator) -> Self {
        debug_assert!(Arc::ptr_eq(&self.space, &rhs.space));
        self.wrap(&self.matrix - &rhs.matrix)
    }

    /// `D_a · self · D_b*` with `D_a` diagonal by word length.
    pub fn sandwich_diagonals(&self, a: &[C64], b: &[C64]) -> Self {
        let space = &self.space;
        self.wrap(self.matrix.weighted(|r, c| a[space.len_of(r)] * b[space.len_of(c)].conj()))
    }

    pub fn max_abs_diff(&self, other: &FockOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn write_triplets_csv<W: Write>(&self, out: W) -> Result<()> {
        self.matrix.write_triplets_csv(out)
    }
}

pub fn identity(space: &Arc<FockSpace>) -> FockOperator {
    FockOperator { space: Arc::clone(space), matrix: SparseMatrix::identity(space.dim()) }
}

pub fn zero(space: &Arc<FockSpace>) -> FockOperator {
    FockOperator { space: Arc::clone(space), matrix: SparseMatrix::zeros(space.dim()) }
}

fn from_map(space: &Arc<FockSpace>, map: &[Option<usize>]) -> FockOperator {
    let one = C64::new(1.0, 0.0);
    let matrix = SparseMatrix::from_triplets(space.dim(), map.iter().enumerate().filter_map(|(src, dst)| Some(((*dst)?, src, one))));
    FockOperator { space: Arc::clone(space), matrix }
}

/// Left creation `L_γ`.
pub fn creation(space: &Arc<FockSpace>, letter: Letter) -> Result<FockOperator> {
    Ok(from_map(space, space.prepend_map(letter)?))
}

/// Right creation `R_γ`.
pub fn right_creation(space: &Arc<FockSpace>, letter: Letter) -> Result<FockOperator> {
    Ok(from_map(space, space.append_map(letter)?))
}

/// `L_ξ = L_{ξ₁} ⋯ L_{ξₙ}`, `L_Ω = 1`.
pub fn left_word(space: &Arc<FockSpace>, xi: &Word) -> Result<FockOperator> {
    let mut out = identity(space);
    for &l in xi.letters() {
        out = out.compose(&creation(space, l)?);
    }
    Ok(out)
}

/// `R_ζ = R_{ζₙ} ⋯ R_{ζ₁}`, `R_Ω = 1`.
pub fn right_word(space: &Arc<FockSpace>, zeta: &Word) -> Result<FockOperator> {
    let mut out = identity(space);
    for &l in zeta.letters() {
        out = right_creation(space, l)?.compose(&out);
    }
    Ok(out)
}

/// `L_ξ L_η*`.
pub fn word_operator(space: &Arc<FockSpace>, xi: &Word, eta: &Word) -> Result<FockOperator> {
    Ok(left_word(space, xi)?.compose(&left_word(space, eta)?.adjoint()))
}

/// `D_a`: multiplies words of length `n` by `a[n]`.
pub fn diagonal(space: &Arc<FockSpace>, a: &[C64]) -> Result<FockOperator> {
    if a.len() <= space.max_len() {
        return Err(Error::DimensionMismatch(format!("diagonal needs {} levels, got {}", space.max_len() + 1, a.len())));
    }
    let values: Vec<C64> = (0..space.dim()).map(|p| a[space.len_of(p)]).collect();
    Ok(FockOperator { space: Arc::clone(space), matrix: SparseMatrix::diagonal(&values) })
}

fn projection_where(space: &Arc<FockSpace>, keep: impl Fn(&Word) -> bool) -> FockOperator {
    let one = C64::new(1.0, 0.0);
    let matrix = SparseMatrix::from_triplets(space.dim(), (0..space.dim()).filter(|&p| keep(space.word(p))).map(|p| (p, p, one)));
    FockOperator { space: Arc::clone(space), matrix }
}

/// `Pₙ`.
pub fn level_projection(space: &Arc<FockSpace>, n: usize) -> FockOperator {
    projection_where(space, |w| w.len() == n)
}

/// `Qₙ = Σ_{k ≥ n} P_k`.
pub fn tail_projection(space: &Arc<FockSpace>, n: usize) -> FockOperator {
    projection_where(space, |w| w.len() >= n)
}

/// `qᵢ`: words whose last letter lies in factor `i`.
pub fn factor_end_projection(space: &Arc<FockSpace>, factor: usize) -> Result<FockOperator> {
    if factor >= space.num_factors() {
        return Err(Error::InvalidSpace(format!("factor {factor} out of range")));
    }
    Ok(projection_where(space, |w| w.last().is_some_and(|l| l.factor == factor)))
}

/// `ρ(A) = Σ_{γ ∈ Λ(1)} R_γ A R_γ*`.
pub fn rho(a: &FockOperator) -> FockOperator {
    let space = a.space();
    let mut out = SparseMatrix::zeros(space.dim());
    for &letter in space.letters() {
        let map = space.append_map(letter).expect("letter from the space");
        out.accumulate(&a.matrix.conjugate_by(map));
    }
    a.wrap(out)
}

/// `ρⁿ(A)` by repeated application.
pub fn rho_pow(a: &FockOperator, n: usize) -> FockOperator {
    let mut out = a.clone();
    for _ in 0..n {
        out = rho(&out);
    }
    out
}

/// `ε(A) = Σᵢ qᵢ A qᵢ`.
pub fn eps(a: &FockOperator) -> FockOperator {
    let space = Arc::clone(a.space());
    let last = move |p: usize| space.word(p).last().map(|l| l.factor);
    a.wrap(a.matrix.filtered(|r, c| matches!((last(r), last(c)), (Some(x), Some(y)) if x == y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn space(dims: &[usize], n: usize) -> Arc<FockSpace> {
        build_space(FockSpec::new(dims.to_vec(), n)).unwrap()
    }

    fn w(letters: &[(usize, usize)]) -> Word {
        Word::new(letters.iter().map(|&(f, i)| Letter::new(f, i)).collect()).unwrap()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(space(&[1, 1], 3).dim(), 7);
        assert_eq!(space(&[2, 2, 2], 2).dim(), 31);
        let single = space(&[3], 4);
        assert_eq!(single.dim(), 4);
        assert!(single.level(2).is_empty());
        assert_eq!(FockSpec::new(vec![2, 3], 3).level_sizes().unwrap(), vec![1, 5, 12, 30]);
    }

    #[test]
    fn basis_is_graded_lex_and_indexed() {
        let s = space(&[2, 1, 2], 3);
        assert!(s.basis().windows(2).all(|p| p[0] < p[1]));
        for (i, word) in s.basis().iter().enumerate() {
            assert_eq!(s.position(word), Some(i));
            assert!(word.letters().windows(2).all(|p| p[0].factor != p[1].factor));
        }
        assert_eq!(s.level_offsets()[1], 1);
    }

    #[test]
    fn basis_cap() {
        let err = build_space_with_cap(FockSpec::new(vec![3, 3, 3], 8), 1000).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
        assert!(build_space(FockSpec::new(vec![], 3)).is_err());
        assert!(build_space(FockSpec::new(vec![1, 0], 3)).is_err());
        assert!(build_space(FockSpec::new(vec![1, 1], 0)).is_err());
    }

    #[test]
    fn creation_action() {
        let s = space(&[2, 2], 3);
        let g = Letter::new(0, 1);
        let l = creation(&s, g).unwrap();
        let vac = s.position(&Word::vacuum()).unwrap();
        assert_eq!(l.matrix().get(s.position(&w(&[(0, 1)])).unwrap(), vac), c(1.0));
        // kills words that already start in γ's factor
        let same = s.position(&w(&[(0, 0), (1, 0)])).unwrap();
        assert!((0..s.dim()).all(|r| l.matrix().get(r, same) == c(0.0)));
        let other = s.position(&w(&[(1, 0), (0, 0)])).unwrap();
        let target = s.position(&w(&[(0, 1), (1, 0), (0, 0)])).unwrap();
        assert_eq!(l.matrix().get(target, other), c(1.0));
        // words of maximal length are truncated away
        let full = s.position(&w(&[(1, 0), (0, 0), (1, 1)])).unwrap();
        assert!((0..s.dim()).all(|r| l.matrix().get(r, full) == c(0.0)));
        // L_γ* L_δ = 0 for distinct letters
        for &a in s.letters() {
            for &b in s.letters() {
                let prod = creation(&s, a).unwrap().adjoint().compose(&creation(&s, b).unwrap());
                if a != b {
                    assert_eq!(prod.matrix().nnz(), 0);
                }
            }
        }
    }

    #[test]
    fn right_creation_action() {
        let s = space(&[1, 2], 3);
        let g = Letter::new(0, 0);
        let d = Letter::new(1, 1);
        let r = right_creation(&s, g).unwrap();
        let vac = s.position(&Word::vacuum()).unwrap();
        assert_eq!(r.matrix().get(s.position(&w(&[(0, 0)])).unwrap(), vac), c(1.0));
        let ends_in_g = s.position(&w(&[(1, 0), (0, 0)])).unwrap();
        assert!((0..s.dim()).all(|row| r.matrix().get(row, ends_in_g) == c(0.0)));
        let lg = creation(&s, g).unwrap();
        let rd = right_creation(&s, d).unwrap();
        let both = s.position(&w(&[(0, 0), (1, 1)])).unwrap();
        assert_eq!(lg.compose(&rd).matrix().get(both, vac), c(1.0));
        assert_eq!(rd.compose(&lg).matrix().get(both, vac), c(1.0));
    }

    #[test]
    fn partial_isometries_and_grading() {
        let s = space(&[2, 1, 1], 3);
        for &g in s.letters() {
            for op in [creation(&s, g).unwrap(), right_creation(&s, g).unwrap()] {
                assert_eq!(op.compose(&op.adjoint()).compose(&op), op);
                for (r, col, _) in op.matrix().iter() {
                    assert_eq!(s.len_of(r), s.len_of(col) + 1);
                }
            }
        }
    }

    #[test]
    fn word_operators() {
        let s = space(&[1, 1], 4);
        assert_eq!(word_operator(&s, &Word::vacuum(), &Word::vacuum()).unwrap(), identity(&s));
        let g = Letter::new(0, 0);
        assert_eq!(word_operator(&s, &w(&[(0, 0)]), &Word::vacuum()).unwrap(), creation(&s, g).unwrap());
        let xi = w(&[(0, 0), (1, 0)]);
        let eta = w(&[(1, 0)]);
        let zeta = w(&[(0, 0), (1, 0)]);
        let op = word_operator(&s, &xi, &eta).unwrap();
        let src = s.position(&eta.concat(&zeta).unwrap()).unwrap();
        let dst = s.position(&xi.concat(&zeta).unwrap()).unwrap();
        assert_eq!(op.matrix().get(dst, src), c(1.0));
    }

    #[test]
    fn diagonals_and_projections() {
        let s = space(&[2, 1], 3);
        let n = s.max_len();
        assert_eq!(diagonal(&s, &vec![c(1.0); n + 1]).unwrap(), identity(&s));
        let mut e0 = vec![c(0.0); n + 1];
        e0[0] = c(1.0);
        assert_eq!(diagonal(&s, &e0).unwrap(), level_projection(&s, 0));
        assert!(diagonal(&s, &e0[..n]).is_err());
        let a: Vec<C64> = vec![C64::new(0.5, 0.5), c(-2.0), c(0.1), C64::new(0.0, 1.5)];
        let norm = linalg::hermitian_norm(&{
            let d = diagonal(&s, &a).unwrap();
            d.compose(&d.adjoint()).matrix().to_dense()
        })
        .unwrap()
        .sqrt();
        assert!((norm - 2.0).abs() < 1e-12);

        assert_eq!(tail_projection(&s, 0), identity(&s));
        let mut sum = zero(&s);
        for k in 0..=n {
            sum = sum.plus(&level_projection(&s, k));
        }
        assert_eq!(sum, identity(&s));
        assert_eq!(tail_projection(&s, 1), identity(&s).minus(&level_projection(&s, 0)));
    }

    #[test]
    fn factor_end_projections() {
        let s = space(&[1, 2, 1], 3);
        let mut sum = zero(&s);
        for i in 0..3 {
            let q = factor_end_projection(&s, i).unwrap();
            assert_eq!(q.matrix().get(0, 0), c(0.0));
            for (p, word) in s.level_words(1).iter().enumerate() {
                let pos = s.level(1).start + p;
                let expected = if word.last().unwrap().factor == i { 1.0 } else { 0.0 };
                assert_eq!(q.matrix().get(pos, pos), c(expected));
            }
            sum = sum.plus(&q);
        }
        assert_eq!(sum, tail_projection(&s, 1));
        assert!(factor_end_projection(&s, 3).is_err());
    }

    #[test]
    fn rho_and_eps_examples() {
        let s = space(&[2, 1], 3);
        assert_eq!(rho(&identity(&s)), tail_projection(&s, 1));
        assert_eq!(rho(&level_projection(&s, 0)), level_projection(&s, 1));
        assert_eq!(eps(&identity(&s)), tail_projection(&s, 1));
        // explicit sum over the materialized R_γ
        let a = word_operator(&s, &w(&[(0, 1)]), &w(&[(1, 0)])).unwrap();
        let mut explicit = zero(&s);
        for &g in s.letters() {
            let r = right_creation(&s, g).unwrap();
            explicit = explicit.plus(&r.compose(&a).compose(&r.adjoint()));
        }
        assert_eq!(rho(&a), explicit);
        let mut explicit = zero(&s);
        for i in 0..s.num_factors() {
            let q = factor_end_projection(&s, i).unwrap();
            explicit = explicit.plus(&q.compose(&a).compose(&q));
        }
        assert_eq!(eps(&a), explicit);
    }

    #[test]
    fn eps_is_idempotent_and_contractive() {
        let s = space(&[2, 2], 2);
        let a = FockOperator::new(
            &s,
            SparseMatrix::from_triplets(s.dim(), (0..s.dim() * 3).map(|k| ((k * 5) % s.dim(), (k * 7 + 1) % s.dim(), C64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.05)))),
        )
        .unwrap();
        let e = eps(&a);
        assert_eq!(eps(&e), e);
        let norm = |op: &FockOperator| linalg::singular_values(&op.matrix().to_dense()).unwrap()[0];
        assert!(norm(&e) <= norm(&a) + 1e-12);
    }

    #[test]
    fn classify_cases() {
        let a = w(&[(0, 0)]);
        let b = w(&[(1, 0)]);
        let a2 = w(&[(1, 0), (0, 1)]);
        assert_eq!(classify_case(&Word::vacuum(), &a), Case::Case1);
        assert_eq!(classify_case(&a, &Word::vacuum()), Case::Case1);
        assert_eq!(classify_case(&a, &b), Case::Case1);
        assert_eq!(classify_case(&a, &a2), Case::Case2);
    }

    /// The embedded algebra of factor `i` acts on `w` through the free product
    /// rule: a word not starting in factor `i` sees `a` applied to `Ωᵢ`, a word
    /// starting with a letter of factor `i` sees `a` applied to that letter.
    fn embedded_matrix_unit(s: &Arc<FockSpace>, factor: usize, to: Option<usize>, from: Option<usize>) -> FockOperator {
        let mut triplets = Vec::new();
        for (pos, word) in s.basis().iter().enumerate() {
            let (head, rest): (Option<usize>, Word) = match word.first() {
                Some(l) if l.factor == factor => (Some(l.index), Word(word.letters()[1..].to_vec())),
                _ => (None, word.clone()),
            };
            if head != from {
                continue;
            }
            let image = match to {
                Some(idx) => Word(vec![Letter::new(factor, idx)]).concat(&rest).unwrap(),
                None => rest,
            };
            if let Some(dst) = s.position(&image) {
                triplets.push((dst, pos, c(1.0)));
            }
        }
        FockOperator::new(s, SparseMatrix::from_triplets(s.dim(), triplets)).unwrap()
    }

    #[test]
    fn letter_operators_generate_matrix_units() {
        for dims in [[1usize, 2], [3, 1], [2, 2]] {
            let s = space(&dims, 3);
            for factor in 0..dims.len() {
                for g in 0..dims[factor] {
                    let lg = creation(&s, Letter::new(factor, g)).unwrap();
                    assert_eq!(embedded_matrix_unit(&s, factor, Some(g), None), lg);
                    assert_eq!(embedded_matrix_unit(&s, factor, None, Some(g)), lg.adjoint());
                    for d in 0..dims[factor] {
                        let ld = creation(&s, Letter::new(factor, d)).unwrap();
                        assert_eq!(embedded_matrix_unit(&s, factor, Some(g), Some(d)), lg.compose(&ld.adjoint()));
                    }
                }
            }
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec: FockSpec = serde_json::from_str(r#"{"factors":[1,1],"max_len":5}"#).unwrap();
        assert_eq!(spec, FockSpec::new(vec![1, 1], 5));
    }
}
