//! Truncated Hankel matrices of a symbol and the norms built from them.
//!
//! For a symbol `φ` the matrices are
//!
//! ```text
//! h  = (φ(i+j)   − φ(i+j+1))_{i,j}
//! k  = (φ(i+j+1) − φ(i+j+2))_{i,j}
//! ĥ  = (φ(i+j)   − φ(i+j+2))_{i,j}
//! ```
//!
//! and `‖φ‖_𝒞 = ‖h‖₁ + ‖k‖₁ + |c|`, `‖φ‖_𝒞′ = |c₁| + |c₂| + ‖ĥ‖₁`. The infinite
//! matrices are approached by truncations `M = 32, 64, …, 4096`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::symbol::Sequence;
use crate::C64;
use nalgebra::DMatrix;
use serde::Serialize;
use std::io::Write;

/// Relative cutoff below which singular triplets are dropped.
pub const RANK_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct TruncationSchedule {
    pub start: usize,
    pub cap: usize,
    /// Growth ratio of successive norms at the cap that is read as divergence.
    pub divergence_ratio: f64,
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        TruncationSchedule { start: 32, cap: 4096, divergence_ratio: 1.5 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HankelReport {
    pub truncation: usize,
    pub trace_norm_h: f64,
    pub trace_norm_k: f64,
    pub tail_abs: f64,
    pub total: f64,
    pub converged: bool,
    /// The truncation contains every non-zero entry, so the norms are exact.
    pub exact: bool,
    pub singular_values_h: Vec<f64>,
    pub singular_values_k: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CPrimeReport {
    pub truncation: usize,
    pub trace_norm_hhat: f64,
    #[serde(with = "crate::wire::complex")]
    pub c1: C64,
    #[serde(with = "crate::wire::complex")]
    pub c2: C64,
    pub total: f64,
    pub converged: bool,
    pub exact: bool,
    pub singular_values_hhat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOneTerm {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
}

/// `A = Σᵢ xᵢ ⊙ yᵢ` with `(x ⊙ y)(t) = ⟨t, y⟩ x`, i.e. entries `x(p)·conj(y(q))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneDecomposition {
    pub terms: Vec<RankOneTerm>,
    pub nuclear_sum: f64,
}

impl RankOneDecomposition {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn reconstruct(&self, rows: usize, cols: usize) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(rows, cols, C64::new(0.0, 0.0));
        for term in &self.terms {
            for p in 0..rows.min(term.x.len()) {
                for q in 0..cols.min(term.y.len()) {
                    out[(p, q)] += term.x[p] * term.y[q].conj();
                }
            }
        }
        out
    }
}

/// `(seq(i+j+offset) − seq(i+j+offset+step))` for `0 ≤ i, j < m`.
fn difference_hankel(seq: &impl Sequence, m: usize, offset: usize, step: usize) -> DMatrix<C64> {
    let diffs: Vec<C64> = (0..2 * m.max(1) - 1)
        .map(|n| seq.value(n + offset) - seq.value(n + offset + step))
        .collect();
    DMatrix::from_fn(m, m, |i, j| diffs[i + j])
}

pub fn hankel_h(seq: &impl Sequence, m: usize) -> DMatrix<C64> {
    difference_hankel(seq, m, 0, 1)
}

pub fn hankel_k(seq: &impl Sequence, m: usize) -> DMatrix<C64> {
    difference_hankel(seq, m, 1, 1)
}

pub fn hankel_hat(seq: &impl Sequence, m: usize) -> DMatrix<C64> {
    difference_hankel(seq, m, 0, 2)
}

/// Sum of singular values.
pub fn trace_norm(a: &DMatrix<C64>) -> Result<f64> {
    Ok(linalg::singular_values(a)?.iter().sum())
}

struct Adaptive {
    truncation: usize,
    singular_values: Vec<Vec<f64>>,
    converged: bool,
    exact: bool,
}

/// Shared doubling loop over one or more difference-Hankel matrices.
///
/// `kinds` lists `(offset, step)` pairs. Convergence needs every trace norm to
/// move by less than `tol` between successive truncations and the entries
/// outside the current window (sampled up to twice the cap) to carry less than
/// `tol` in total.
fn adaptive(seq: &impl Sequence, tol: f64, schedule: &TruncationSchedule, kinds: &[(usize, usize)]) -> Result<Option<Adaptive>> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let settle = seq.settles_at();
    let cap = schedule.cap.max(1);
    let horizon = 2 * cap;

    // absolute entry mass per anti-diagonal, used both as a cheap lower bound on
    // the trace norms and to test the part of the matrix outside the window
    let mut diag_mass = vec![0.0; horizon];
    for (n, mass) in diag_mass.iter_mut().enumerate() {
        for &(offset, step) in kinds {
            *mass += (seq.value(n + offset) - seq.value(n + offset + step)).norm();
        }
    }
    if diag_mass.iter().any(|x| !x.is_finite()) {
        return Ok(None);
    }
    let mut outside = vec![0.0; horizon + 1];
    for n in (0..horizon).rev() {
        outside[n] = outside[n + 1] + diag_mass[n];
    }
    if settle.is_none_or(|s| s > cap) {
        let half = outside[0] - outside[cap];
        let full = outside[0];
        if half > 0.0 && full > schedule.divergence_ratio * half {
            return Ok(None);
        }
    }

    let mut m = schedule.start.clamp(1, cap);
    let mut previous: Option<Vec<f64>> = None;
    loop {
        let singular_values = kinds
            .iter()
            .map(|&(offset, step)| linalg::singular_values(&difference_hankel(seq, m, offset, step)))
            .collect::<Result<Vec<_>>>()?;
        let norms: Vec<f64> = singular_values.iter().map(|s| s.iter().sum()).collect();
        if norms.iter().any(|x| !x.is_finite()) {
            return Ok(None);
        }
        let exact = settle.is_some_and(|s| m >= s);
        let stable = previous
            .as_ref()
            .is_some_and(|prev| prev.iter().zip(&norms).all(|(a, b)| (a - b).abs() < tol));
        if exact || (stable && outside[(2 * m - 1).min(horizon)] < tol) {
            return Ok(Some(Adaptive { truncation: m, singular_values, converged: true, exact }));
        }
        if m >= cap {
            if let Some(prev) = previous {
                let before: f64 = prev.iter().sum();
                let after: f64 = norms.iter().sum();
                if after > schedule.divergence_ratio * before {
                    return Ok(None);
                }
            }
            return Ok(Some(Adaptive { truncation: m, singular_values, converged: false, exact: false }));
        }
        previous = Some(norms);
        let mut next = (2 * m).min(cap);
        if let Some(s) = settle {
            if s > m && s < next {
                next = s;
            }
        }
        m = next;
    }
}

/// `‖φ‖_𝒞` with adaptive truncation.
pub fn c_norm(seq: &impl Sequence, tol: f64) -> Result<HankelReport> {
    c_norm_with(seq, tol, &TruncationSchedule::default())
}

pub fn c_norm_with(seq: &impl Sequence, tol: f64, schedule: &TruncationSchedule) -> Result<HankelReport> {
    let (even, odd) = seq.parity_tails();
    if (even - odd).norm() > 0.0 {
        return Err(Error::NotInClassC(format!("even and odd limits differ ({even} vs {odd})")));
    }
    let run = adaptive(seq, tol, schedule, &[(0, 1), (1, 1)])?
        .ok_or_else(|| Error::NotInClassC("trace norms of the difference Hankel matrices grow without bound".into()))?;
    let mut sv = run.singular_values.into_iter();
    let singular_values_h = sv.next().unwrap_or_default();
    let singular_values_k = sv.next().unwrap_or_default();
    let trace_norm_h: f64 = singular_values_h.iter().sum();
    let trace_norm_k: f64 = singular_values_k.iter().sum();
    let tail_abs = even.norm();
    Ok(HankelReport {
        truncation: run.truncation,
        trace_norm_h,
        trace_norm_k,
        tail_abs,
        total: trace_norm_h + trace_norm_k + tail_abs,
        converged: run.converged,
        exact: run.exact,
        singular_values_h,
        singular_values_k,
    })
}

/// `‖φ‖_𝒞′ = |c₁| + |c₂| + ‖ĥ‖₁` with `c₁, c₂` taken from the parity limits.
pub fn cprime_norm(seq: &impl Sequence, tol: f64) -> Result<CPrimeReport> {
    cprime_norm_with(seq, tol, &TruncationSchedule::default())
}

pub fn cprime_norm_with(seq: &impl Sequence, tol: f64, schedule: &TruncationSchedule) -> Result<CPrimeReport> {
    let (even, odd) = seq.parity_tails();
    let run = adaptive(seq, tol, schedule, &[(0, 2)])?
        .ok_or_else(|| Error::NotInClassCPrime("trace norm of the second-difference Hankel matrix grows without bound".into()))?;
    let singular_values_hhat = run.singular_values.into_iter().next().unwrap_or_default();
    let trace_norm_hhat: f64 = singular_values_hhat.iter().sum();
    let c1 = (even + odd) / 2.0;
    let c2 = (even - odd) / 2.0;
    Ok(CPrimeReport {
        truncation: run.truncation,
        trace_norm_hhat,
        c1,
        c2,
        total: c1.norm() + c2.norm() + trace_norm_hhat,
        converged: run.converged,
        exact: run.exact,
        singular_values_hhat,
    })
}

/// Balanced rank-one decomposition from the SVD: `xₘ = √σₘ uₘ`, `yₘ = √σₘ vₘ`.
///
/// Triplets with `σ ≤ 10⁻¹⁴·σ_max` are dropped. The reconstruction is checked
/// against `A` and a deviation above `10·tol` (relative to `σ_max` when that
/// exceeds one) is reported as a numerical failure.
pub fn rank_one_decompose(a: &DMatrix<C64>, tol: f64) -> Result<RankOneDecomposition> {
    let dec = linalg::svd(a)?;
    let sigma_max = dec.sigma.first().copied().unwrap_or(0.0);
    let mut terms = Vec::new();
    let mut nuclear_sum = 0.0;
    for ((sigma, u), v) in dec.sigma.iter().zip(dec.u).zip(dec.v) {
        if *sigma <= RANK_CUTOFF * sigma_max || *sigma == 0.0 {
            continue;
        }
        let root = sigma.sqrt();
        let x: Vec<C64> = u.into_iter().map(|z| z * root).collect();
        let y: Vec<C64> = v.into_iter().map(|z| z * root).collect();
        nuclear_sum += l2(&x) * l2(&y);
        terms.push(RankOneTerm { x, y });
    }
    let decomposition = RankOneDecomposition { terms, nuclear_sum };
    let error = (decomposition.reconstruct(a.nrows(), a.ncols()) - a)
        .iter()
        .fold(0.0, |m: f64, z| m.max(z.norm()));
    if error > 10.0 * tol * sigma_max.max(1.0) {
        return Err(Error::NumericalFailure(format!("rank-one reconstruction error {error:e}")));
    }
    Ok(decomposition)
}

pub(crate) fn l2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Writes `index,sigma` rows.
pub fn write_singular_values_csv<W: Write>(out: W, sigma: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["index", "sigma"])?;
    for (i, s) in sigma.iter().enumerate() {
        writer.write_record([i.to_string(), format!("{s:e}")])?;
    }
    writer.flush()?;
    Ok(())
}
