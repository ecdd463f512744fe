//! The maps `Φ⁽¹⁾_{x,y}`, `Φ⁽²⁾_{x,y}` and the multiplier `T = T₁ + T₂ + c·Id`.
//!
//! With `Sⁿ` the shift on sequences (`(Sⁿx)(p) = x(p−n)`, zero for `p < n`),
//!
//! ```text
//! Φ⁽¹⁾_{x,y}(A) = Σ_{n≥0} D_{(S*)ⁿx} A D*_{(S*)ⁿy} + Σ_{n≥1} D_{Sⁿx} ρⁿ(A) D*_{Sⁿy}
//! Φ⁽²⁾_{x,y}(A) = Σ_{n≥0} D_{(S*)ⁿx} A D*_{(S*)ⁿy} + Σ_{n≥1} D_{Sⁿx} ρⁿ⁻¹(ε(A)) D*_{Sⁿy}
//! ```
//!
//! Diagonal sandwiches only reweight matrix entries by the lengths of the row
//! and column words, so each map reduces to a table of coefficients indexed by
//! `(n, len(row), len(col))` applied to the precomputed powers `ρⁿ(A)`. The first
//! sum runs over the whole vector, not only up to the truncation length.

pub mod kraus;
pub mod ucp;

use crate::error::{Error, Result};
use crate::fock::{self, classify_case, Case, FockOperator, FockSpace, Word};
use crate::hankel::{self, l2, RankOneDecomposition, RankOneTerm};
use crate::symbol::RadialSymbol;
use crate::wire::complex as wire_complex;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;

pub use kraus::{cs_bound, row_sum, CsBound};
pub use ucp::{ucp_pi_apply, ucp_expected, TensorOperator};

/// Which of the two families of maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

impl Variant {
    pub fn from_index(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Variant::First),
            2 => Ok(Variant::Second),
            other => Err(Error::Config(format!("variant must be 1 or 2, got {other}"))),
        }
    }
}

/// `ρⁿ(A)` for `n = 0..=N` and, for the second family, `ρⁿ(ε(A))`.
#[derive(Debug, Clone)]
pub struct ShiftPowers {
    rho: Vec<FockOperator>,
    rho_eps: Vec<FockOperator>,
}

impl ShiftPowers {
    pub fn new(a: &FockOperator) -> Self {
        let n = a.space().max_len();
        let mut rho = vec![a.clone()];
        let mut rho_eps = vec![fock::eps(a)];
        for _ in 0..n {
            rho.push(fock::rho(rho.last().expect("non-empty")));
            rho_eps.push(fock::rho(rho_eps.last().expect("non-empty")));
        }
        ShiftPowers { rho, rho_eps }
    }

    pub fn base(&self) -> &FockOperator {
        &self.rho[0]
    }

    /// The operator multiplied by `D_{Sⁿx} · D*_{Sⁿy}` in the second sum.
    fn shifted(&self, variant: Variant, n: usize) -> &FockOperator {
        match variant {
            Variant::First => &self.rho[n],
            Variant::Second => &self.rho_eps[n - 1],
        }
    }
}

/// Entry weights of one map (or a sum of maps sharing a variant) on a space of
/// maximal word length `N`.
#[derive(Debug, Clone)]
struct Coefficients {
    // first[lr][lc] = Σ_{n≥0} G(lr+n, lc+n)
    first: Vec<Vec<C64>>,
    // second[n][lr][lc] = G(lr−n, lc−n), n ≥ 1
    second: Vec<Vec<Vec<C64>>>,
}

impl Coefficients {
    /// `G(p, q) = Σᵢ xᵢ(p)·conj(yᵢ(q))` over the given terms.
    fn from_terms(terms: &[RankOneTerm], max_len: usize) -> Self {
        let gram = |p: usize, q: usize| -> C64 {
            terms
                .iter()
                .map(|t| t.x.get(p).copied().unwrap_or_default() * t.y.get(q).copied().unwrap_or_default().conj())
                .sum()
        };
        let horizon = terms.iter().map(|t| t.x.len().max(t.y.len())).max().unwrap_or(0);
        let first = (0..=max_len)
            .map(|lr| {
                (0..=max_len)
                    .map(|lc| (0..horizon.saturating_sub(lr.min(lc))).map(|n| gram(lr + n, lc + n)).sum())
                    .collect()
            })
            .collect();
        let second = (0..=max_len)
            .map(|n| {
                (0..=max_len)
                    .map(|lr| (0..=max_len).map(|lc| if n == 0 || lr < n || lc < n { C64::default() } else { gram(lr - n, lc - n) }).collect())
                    .collect()
            })
            .collect();
        Coefficients { first, second }
    }

    fn apply(&self, space: &FockSpace, powers: &ShiftPowers, variant: Variant) -> FockOperator {
        let len = |p: usize| space.len_of(p);
        let base = powers.base();
        let mut out = base.matrix().weighted(|r, c| self.first[len(r)][len(c)]);
        for n in 1..=space.max_len() {
            let table = &self.second[n];
            out.accumulate(&powers.shifted(variant, n).matrix().weighted(|r, c| table[len(r)][len(c)]));
        }
        FockOperator::new(base.space(), out).expect("same space")
    }
}

fn phi_apply(space: &Arc<FockSpace>, x: &[C64], y: &[C64], a: &FockOperator, variant: Variant) -> Result<FockOperator> {
    check_space(space, a)?;
    let terms = [RankOneTerm { x: x.to_vec(), y: y.to_vec() }];
    Ok(Coefficients::from_terms(&terms, space.max_len()).apply(space, &ShiftPowers::new(a), variant))
}

fn check_space(space: &Arc<FockSpace>, a: &FockOperator) -> Result<()> {
    if Arc::ptr_eq(space, a.space()) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("operator lives on a different space".into()))
    }
}

/// `Φ⁽¹⁾_{x,y}(A)`.
pub fn phi1_apply(space: &Arc<FockSpace>, x: &[C64], y: &[C64], a: &FockOperator) -> Result<FockOperator> {
    phi_apply(space, x, y, a, Variant::First)
}

/// `Φ⁽²⁾_{x,y}(A)`.
pub fn phi2_apply(space: &Arc<FockSpace>, x: &[C64], y: &[C64], a: &FockOperator) -> Result<FockOperator> {
    phi_apply(space, x, y, a, Variant::Second)
}

/// Rank-one data of `h` and `k` realizing `T₁ = Σ Φ⁽¹⁾_{xᵢ,yᵢ}`, `T₂ = Σ Φ⁽²⁾_{zᵢ,wᵢ}`.
#[derive(Debug, Clone)]
pub struct MultiplierPlan {
    pub symbol: RadialSymbol,
    pub decomposition_h: RankOneDecomposition,
    pub decomposition_k: RankOneDecomposition,
    pub c: C64,
    /// Hankel truncation `M` the decompositions were taken from.
    pub truncation: usize,
    /// Upper bound on the number of rank terms per matrix.
    pub rank_cap: usize,
    /// Number of vector entries retained.
    pub vector_horizon: usize,
    /// `Σ (‖xᵢ‖‖yᵢ‖ − ‖xᵢ'‖‖yᵢ'‖)` over both decompositions, primes denoting
    /// the vectors cut at the horizon.
    pub beyond_horizon_mass: f64,
    pub converged: bool,
}

/// Decomposes the truncated `h` and `k` of a symbol of class 𝒞.
///
/// `horizon = None` keeps every entry of the singular vectors.
pub fn build_plan(sym: &RadialSymbol, tol: f64, horizon: Option<usize>) -> Result<MultiplierPlan> {
    let report = hankel::c_norm(sym, tol)?;
    let m = report.truncation;
    let full_h = hankel::rank_one_decompose(&hankel::hankel_h(sym, m), tol)?;
    let full_k = hankel::rank_one_decompose(&hankel::hankel_k(sym, m), tol)?;
    let vector_horizon = horizon.map_or(m, |h| h.min(m));
    let (decomposition_h, lost_h) = cut(full_h, vector_horizon);
    let (decomposition_k, lost_k) = cut(full_k, vector_horizon);
    Ok(MultiplierPlan {
        symbol: sym.clone(),
        decomposition_h,
        decomposition_k,
        c: sym.tail_constant(),
        truncation: m,
        rank_cap: m,
        vector_horizon,
        beyond_horizon_mass: lost_h + lost_k,
        converged: report.converged,
    })
}

fn cut(dec: RankOneDecomposition, horizon: usize) -> (RankOneDecomposition, f64) {
    let before = dec.nuclear_sum;
    let terms: Vec<RankOneTerm> = dec
        .terms
        .into_iter()
        .map(|t| RankOneTerm { x: t.x.into_iter().take(horizon).collect(), y: t.y.into_iter().take(horizon).collect() })
        .collect();
    let nuclear_sum = terms.iter().map(|t| l2(&t.x) * l2(&t.y)).sum();
    (RankOneDecomposition { terms, nuclear_sum }, (before - nuclear_sum).max(0.0))
}

/// Which part of `T` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Full,
    T1,
    T2,
}

/// Coefficient tables of a plan on a fixed space, reusable across operators.
#[derive(Debug, Clone)]
pub struct PreparedPlan {
    space: Arc<FockSpace>,
    t1: Coefficients,
    t2: Coefficients,
    c: C64,
}

impl MultiplierPlan {
    pub fn prepare(&self, space: &Arc<FockSpace>) -> Result<PreparedPlan> {
        if self.vector_horizon < space.max_len() {
            return Err(Error::DimensionMismatch(format!(
                "vector horizon {} is shorter than the word length {}",
                self.vector_horizon,
                space.max_len()
            )));
        }
        Ok(PreparedPlan {
            space: Arc::clone(space),
            t1: Coefficients::from_terms(&self.decomposition_h.terms, space.max_len()),
            t2: Coefficients::from_terms(&self.decomposition_k.terms, space.max_len()),
            c: self.c,
        })
    }
}

impl PreparedPlan {
    pub fn apply_powers(&self, powers: &ShiftPowers, component: Component) -> FockOperator {
        let t1 = || self.t1.apply(&self.space, powers, Variant::First);
        let t2 = || self.t2.apply(&self.space, powers, Variant::Second);
        match component {
            Component::T1 => t1(),
            Component::T2 => t2(),
            Component::Full => t1().plus(&t2()).plus(&powers.base().scale(self.c)),
        }
    }

    pub fn apply(&self, a: &FockOperator, component: Component) -> Result<FockOperator> {
        check_space(&self.space, a)?;
        Ok(self.apply_powers(&ShiftPowers::new(a), component))
    }
}

/// `T(A) = Σᵢ Φ⁽¹⁾_{xᵢ,yᵢ}(A) + Σᵢ Φ⁽²⁾_{zᵢ,wᵢ}(A) + c·A`.
pub fn apply_t(plan: &MultiplierPlan, space: &Arc<FockSpace>, a: &FockOperator) -> Result<FockOperator> {
    plan.prepare(space)?.apply(a, Component::Full)
}

/// `Σ‖xᵢ‖‖yᵢ‖ + Σ‖zᵢ‖‖wᵢ‖ + |c|`.
pub fn plan_cb_bound(plan: &MultiplierPlan) -> f64 {
    plan.decomposition_h.nuclear_sum + plan.decomposition_k.nuclear_sum + plan.c.norm()
}

/// The eigenvalue predicted for `L_ξL_η*` with `|ξ| = k`, `|η| = l`.
pub fn expected_eigenvalue(sym: &RadialSymbol, k: usize, l: usize, case: Case, component: Component, tol: f64) -> Result<C64> {
    Ok(match (component, case) {
        (Component::Full, Case::Case1) => sym.eval(k + l),
        (Component::Full, Case::Case2) => sym.eval(k + l - 1),
        (Component::T1, _) => sym.psi1(k + l, tol)?,
        (Component::T2, Case::Case1) => sym.psi2(k + l, tol)?,
        (Component::T2, Case::Case2) => sym.psi2(k + l - 2, tol)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest word length of `ξ` and `η`.
    pub max_word: usize,
    /// Optional bound on `k + l`.
    pub max_total: Option<usize>,
    pub component: Component,
    pub tol: f64,
}

impl EigenOptions {
    pub fn new(max_word: usize, tol: f64) -> Self {
        EigenOptions { max_word, max_total: None, component: Component::Full, tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub xi: String,
    pub eta: String,
    pub case: Case,
    pub k: usize,
    pub l: usize,
    #[serde(with = "wire_complex")]
    pub expected: C64,
    /// Coefficient of `T(L_ξL_η*)` at `(ξ, η)`.
    #[serde(with = "wire_complex")]
    pub measured: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub component: Component,
    pub pairs: usize,
    pub worst_residual: f64,
    pub max_abs_eigenvalue: f64,
    pub records: Vec<EigenRecord>,
}

impl EigenReport {
    /// Writes `xi,eta,case,k,l,expected_re,expected_im,residual` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["xi", "eta", "case", "k", "l", "expected_re", "expected_im", "residual"])?;
        for r in &self.records {
            let case = match r.case {
                Case::Case1 => "1",
                Case::Case2 => "2",
            };
            writer.write_record([
                r.xi.clone(),
                r.eta.clone(),
                case.to_string(),
                r.k.to_string(),
                r.l.to_string(),
                r.expected.re.to_string(),
                r.expected.im.to_string(),
                r.residual.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Pairs `(ξ, η)` with `|ξ|, |η| ≤ max_word` and `|ξ| + |η| ≤ max_total`.
pub fn word_pairs(space: &FockSpace, max_word: usize, max_total: Option<usize>) -> Vec<(Word, Word)> {
    let words: Vec<&Word> = space.basis().iter().filter(|w| w.len() <= max_word).collect();
    let mut out = Vec::new();
    for xi in &words {
        for eta in &words {
            if max_total.is_none_or(|t| xi.len() + eta.len() <= t) {
                out.push(((*xi).clone(), (*eta).clone()));
            }
        }
    }
    out
}

/// Largest column deviation of `got` from `expected` over the columns `χ`
/// with `|χ| − l + k ≤ N`.
pub fn safe_residual(got: &FockOperator, expected: &FockOperator, k: usize, l: usize) -> f64 {
    let space = got.space();
    let n = space.max_len();
    let safe = |c: usize| space.len_of(c) + k <= n + l;
    (got.matrix() - expected.matrix()).filtered(|_, c| safe(c)).max_abs()
}

/// Compares `T(L_ξL_η*)` (or one of its components) with the predicted multiple
/// of `L_ξL_η*` on the truncation-safe columns, for every pair in range.
pub fn verify_eigenaction(plan: &MultiplierPlan, space: &Arc<FockSpace>, opts: &EigenOptions) -> Result<EigenReport> {
    if opts.max_word > space.max_len() {
        return Err(Error::Config(format!(
            "max_word {} exceeds the word length {} of the space",
            opts.max_word,
            space.max_len()
        )));
    }
    let prepared = plan.prepare(space)?;
    let mut records = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (xi, eta) in word_pairs(space, opts.max_word, opts.max_total) {
        let (k, l) = (xi.len(), eta.len());
        let case = classify_case(&xi, &eta);
        let expected = expected_eigenvalue(&plan.symbol, k, l, case, opts.component, opts.tol)?;
        let a = fock::word_operator(space, &xi, &eta)?;
        let got = prepared.apply(&a, opts.component)?;
        let residual = safe_residual(&got, &a.scale(expected), k, l);
        let row = space.position(&xi).expect("basis word");
        let col = space.position(&eta).expect("basis word");
        let measured = got.matrix().get(row, col);
        worst = worst.max(residual);
        max_abs = max_abs.max(measured.norm());
        records.push(EigenRecord { xi: xi.to_string(), eta: eta.to_string(), case, k, l, expected, measured, residual });
    }
    Ok(EigenReport { component: opts.component, pairs: records.len(), worst_residual: worst, max_abs_eigenvalue: max_abs, records })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftIdentityReport {
    pub pairs: usize,
    pub max_power: usize,
    /// Worst `|ρⁿ(L_ξL_η*) − L_ξL_η* Q_{l+n}|` on safe columns.
    pub worst_rho: f64,
    /// Worst deviation of `ε(L_ξL_η*)` from `ρ(L_ξL_η*)` (Case 1) or `L_ξL_η*` (Case 2).
    pub worst_eps: f64,
}

impl ShiftIdentityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_rho <= tol && self.worst_eps <= tol
    }
}

/// Checks `ρⁿ(L_ξL_η*) = L_ξL_η* Q_{l+n}` for `n ≤ max_power` and the case split of
/// `ε` for all pairs with `k + l ≤ max_total`.
pub fn verify_shift_identities(space: &Arc<FockSpace>, max_total: usize, max_power: usize) -> Result<ShiftIdentityReport> {
    let mut worst_rho: f64 = 0.0;
    let mut worst_eps: f64 = 0.0;
    let pairs = word_pairs(space, space.max_len().min(max_total), Some(max_total));
    for (xi, eta) in &pairs {
        let (k, l) = (xi.len(), eta.len());
        let a = fock::word_operator(space, xi, eta)?;
        let mut power = a.clone();
        for n in 0..=max_power {
            if n > 0 {
                power = fock::rho(&power);
            }
            let expected = a.compose(&fock::tail_projection(space, l + n));
            worst_rho = worst_rho.max(safe_residual(&power, &expected, k, l));
        }
        let expected = match classify_case(xi, eta) {
            Case::Case1 => fock::rho(&a),
            Case::Case2 => a.clone(),
        };
        worst_eps = worst_eps.max(safe_residual(&fock::eps(&a), &expected, k, l));
    }
    Ok(ShiftIdentityReport { pairs: pairs.len(), max_power, worst_rho, worst_eps })
}
