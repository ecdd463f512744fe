//! Radial symbols `φ: ℕ₀ → ℂ`.
//!
//! A symbol is either a closed-form family or finite data followed by an
//! explicit tail constant. Besides evaluation this module provides the limit
//! `c = lim φ(n)`, the split `φ(n) = ψ₁(n) + ψ₂(n) + c` with
//! `ψ₁(n) = Σᵢ (φ(n+2i) − φ(n+2i+1))` and `ψ₂(n) = ψ₁(n+1)`, and the doubling
//! `φ̃(2n) = φ(n)`, `φ̃(2n+1) = 0`.

use crate::error::{Error, Result};
use crate::integral::DiscreteMeasure;
use crate::wire::JsonComplex;
use crate::C64;
use serde::{Deserialize, Serialize};

/// Terms per block in the Cauchy test of the ψ series.
pub const SERIES_BLOCK: usize = 64;
/// Hard cap on the number of ψ series terms.
pub const SERIES_CAP: usize = 1_000_000;

/// A sequence on ℕ₀ that eventually follows a 2-periodic tail.
///
/// Everything the Hankel module needs: values, the even/odd limits and, when
/// known, an index from which the sequence coincides with those limits.
pub trait Sequence {
    fn value(&self, n: usize) -> C64;

    /// Limits along even and odd indices.
    fn parity_tails(&self) -> (C64, C64);

    /// `Some(s)` if `value(n)` equals its parity tail for every `n ≥ s`.
    fn settles_at(&self) -> Option<usize>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolWire", into = "SymbolWire")]
pub enum RadialSymbol {
    /// `φ(n) = sⁿ`, `|s| < 1`.
    Geometric { s: C64 },
    /// `φ(n) = δ_{n,n₀}`.
    Indicator { n0: usize },
    /// `φ(n) = rⁿ` for `n ≤ n₀` and `0` afterwards.
    TruncatedGeometric { r: f64, n0: usize },
    /// `φ(n) = values[n]` inside the data, `tail` afterwards.
    Finite { values: Vec<C64>, tail: C64 },
    /// `φ(n) = c + Σⱼ wⱼ sⱼⁿ`.
    FromMeasure { c: C64, measure: DiscreteMeasure },
}

impl RadialSymbol {
    pub fn geometric(s: C64) -> Result<Self> {
        let sym = RadialSymbol::Geometric { s };
        sym.validate()?;
        Ok(sym)
    }

    pub fn indicator(n0: usize) -> Self {
        RadialSymbol::Indicator { n0 }
    }

    pub fn truncated_geometric(r: f64, n0: usize) -> Result<Self> {
        let sym = RadialSymbol::TruncatedGeometric { r, n0 };
        sym.validate()?;
        Ok(sym)
    }

    pub fn finite(values: Vec<C64>, tail: C64) -> Result<Self> {
        let sym = RadialSymbol::Finite { values, tail };
        sym.validate()?;
        Ok(sym)
    }

    /// The constant symbol, stored as finite data with an empty prefix.
    pub fn constant(c: C64) -> Self {
        RadialSymbol::Finite { values: Vec::new(), tail: c }
    }

    pub fn from_measure(c: C64, measure: DiscreteMeasure) -> Result<Self> {
        let sym = RadialSymbol::FromMeasure { c, measure };
        sym.validate()?;
        Ok(sym)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        match self {
            RadialSymbol::Geometric { s } => {
                if !finite(s) || s.norm() >= 1.0 {
                    return Err(Error::InvalidSymbol(format!("geometric ratio {s} must satisfy |s| < 1")));
                }
            }
            RadialSymbol::Indicator { .. } => {}
            RadialSymbol::TruncatedGeometric { r, .. } => {
                if !(*r > 0.0 && *r < 1.0) {
                    return Err(Error::InvalidSymbol(format!("truncated geometric ratio {r} must lie in (0, 1)")));
                }
            }
            RadialSymbol::Finite { values, tail } => {
                if !finite(tail) || !values.iter().all(finite) {
                    return Err(Error::InvalidSymbol("finite symbol has non-finite entries".into()));
                }
            }
            RadialSymbol::FromMeasure { c, measure } => {
                if !finite(c) {
                    return Err(Error::InvalidSymbol("measure constant is not finite".into()));
                }
                measure.validate()?;
            }
        }
        Ok(())
    }

    pub fn eval(&self, n: usize) -> C64 {
        match self {
            RadialSymbol::Geometric { s } => pow(*s, n),
            RadialSymbol::Indicator { n0 } => {
                if n == *n0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            RadialSymbol::TruncatedGeometric { r, n0 } => {
                if n <= *n0 {
                    pow(C64::new(*r, 0.0), n)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            RadialSymbol::Finite { values, tail } => values.get(n).copied().unwrap_or(*tail),
            RadialSymbol::FromMeasure { c, measure } => measure.eval(*c, n),
        }
    }

    pub fn tail_constant(&self) -> C64 {
        match self {
            RadialSymbol::Finite { tail, .. } => *tail,
            RadialSymbol::FromMeasure { c, .. } => *c,
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Upper bound on `|φ(m) − c|` valid for all `m ≥ n`, for the families
    /// without finite support.
    pub fn decay_bound(&self, n: usize) -> Option<f64> {
        match self {
            RadialSymbol::Geometric { s } => Some(s.norm().powf(n as f64)),
            RadialSymbol::FromMeasure { measure, .. } => {
                let radius = measure.atoms().iter().map(|a| a.s.norm()).fold(0.0, f64::max);
                let mass: f64 = measure.atoms().iter().map(|a| a.w.norm()).sum();
                Some(mass * radius.powf(n as f64))
            }
            _ => None,
        }
    }

    /// `ψ₁(n) = Σᵢ (φ(n+2i) − φ(n+2i+1))`.
    pub fn psi1(&self, n: usize, tol: f64) -> Result<C64> {
        if let RadialSymbol::Geometric { s } = self {
            return Ok(pow(*s, n) / (C64::new(1.0, 0.0) + s));
        }
        if let Some(settle) = self.settles_at() {
            let mut sum = C64::new(0.0, 0.0);
            let mut m = n;
            while m < settle {
                sum += self.eval(m) - self.eval(m + 1);
                m += 2;
            }
            return Ok(sum);
        }
        alternating_difference_series(|m| self.eval(m), n, tol)
    }

    /// `ψ₂(n) = ψ₁(n+1)`.
    pub fn psi2(&self, n: usize, tol: f64) -> Result<C64> {
        self.psi1(n + 1, tol)
    }

    /// Collapses finite data that is a unit point mass onto [`RadialSymbol::Indicator`]
    /// and trims trailing entries equal to the tail.
    pub fn canonical(self) -> Self {
        match self {
            RadialSymbol::Finite { mut values, tail } => {
                while values.last() == Some(&tail) {
                    values.pop();
                }
                let zero = C64::new(0.0, 0.0);
                let one = C64::new(1.0, 0.0);
                if tail == zero {
                    let nonzero: Vec<usize> = (0..values.len()).filter(|&i| values[i] != zero).collect();
                    if nonzero.len() == 1 && values[nonzero[0]] == one {
                        return RadialSymbol::Indicator { n0: nonzero[0] };
                    }
                }
                RadialSymbol::Finite { values, tail }
            }
            other => other,
        }
    }
}

impl Sequence for RadialSymbol {
    fn value(&self, n: usize) -> C64 {
        self.eval(n)
    }

    fn parity_tails(&self) -> (C64, C64) {
        let c = self.tail_constant();
        (c, c)
    }

    fn settles_at(&self) -> Option<usize> {
        match self {
            RadialSymbol::Geometric { s } => (s.norm() == 0.0).then_some(1),
            RadialSymbol::Indicator { n0 } => Some(n0 + 1),
            RadialSymbol::TruncatedGeometric { n0, .. } => Some(n0 + 1),
            RadialSymbol::Finite { values, .. } => Some(values.len()),
            RadialSymbol::FromMeasure { measure, .. } => {
                if measure.atoms().is_empty() {
                    Some(0)
                } else if measure.atoms().iter().all(|a| a.s.norm() == 0.0) {
                    Some(1)
                } else {
                    None
                }
            }
        }
    }
}

fn pow(z: C64, n: usize) -> C64 {
    z.powu(u32::try_from(n).unwrap_or(u32::MAX))
}

/// Sums `Σᵢ (f(n+2i) − f(n+2i+1))` block by block, stopping once a block of
/// [`SERIES_BLOCK`] consecutive terms has absolute sum below `tol`.
pub fn alternating_difference_series(f: impl Fn(usize) -> C64, n: usize, tol: f64) -> Result<C64> {
    let mut sum = C64::new(0.0, 0.0);
    let mut terms = 0;
    let mut block_sum = f64::INFINITY;
    while terms < SERIES_CAP {
        block_sum = 0.0;
        for _ in 0..SERIES_BLOCK {
            let m = n + 2 * terms;
            let d = f(m) - f(m + 1);
            sum += d;
            block_sum += d.norm();
            terms += 1;
        }
        if block_sum < tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent { terms, block_sum })
}

/// Options for [`double_parity`].
#[derive(Debug, Clone, Copy)]
pub struct DoublingOptions {
    /// Maximum number of source values copied for symbols without finite support.
    pub horizon: usize,
    /// Source values are copied until `|φ(n) − c|` is provably below this floor.
    pub floor: f64,
}

impl Default for DoublingOptions {
    fn default() -> Self {
        DoublingOptions { horizon: 4096, floor: 1e-20 }
    }
}

/// `φ̃(2n) = φ(n)`, `φ̃(2n+1) = 0`, stored as data plus separate even/odd limits.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledSymbol {
    pub values: Vec<C64>,
    pub even_tail: C64,
    pub odd_tail: C64,
    /// Number of source values copied.
    pub source_len: usize,
}

impl DoubledSymbol {
    /// `𝒞′` constants `(c₁, c₂)` with `φ̃(n) → c₁ + (−1)ⁿ c₂`.
    pub fn cprime_constants(&self) -> (C64, C64) {
        ((self.even_tail + self.odd_tail) / 2.0, (self.even_tail - self.odd_tail) / 2.0)
    }
}

impl Sequence for DoubledSymbol {
    fn value(&self, n: usize) -> C64 {
        match self.values.get(n) {
            Some(v) => *v,
            None if n % 2 == 0 => self.even_tail,
            None => self.odd_tail,
        }
    }

    fn parity_tails(&self) -> (C64, C64) {
        (self.even_tail, self.odd_tail)
    }

    fn settles_at(&self) -> Option<usize> {
        Some(self.values.len())
    }
}

/// Doubles any symbol, keeping the 2-periodic tail `(c, 0)` explicit.
pub fn double_parity(sym: &RadialSymbol, opts: DoublingOptions) -> DoubledSymbol {
    let c = sym.tail_constant();
    let source_len = match sym.settles_at() {
        Some(s) => s,
        None => {
            let mut n = 0;
            while n < opts.horizon && sym.decay_bound(n).is_none_or(|b| b >= opts.floor) {
                n += 1;
            }
            n
        }
    };
    let zero = C64::new(0.0, 0.0);
    let mut values = Vec::with_capacity(2 * source_len);
    for n in 0..source_len {
        values.push(sym.eval(n));
        values.push(zero);
    }
    DoubledSymbol { values, even_tail: c, odd_tail: zero, source_len }
}

/// Doubles a symbol whose limit vanishes.
///
/// Symbols with `c ≠ 0` have a 2-periodic doubled tail; they are refused with
/// [`Error::UnsupportedTail`] carrying `c₁ = c₂ = c/2`. Use [`double_parity`]
/// for those.
pub fn double(sym: &RadialSymbol) -> Result<RadialSymbol> {
    let c = sym.tail_constant();
    if c != C64::new(0.0, 0.0) {
        return Err(Error::UnsupportedTail { c1: c / 2.0, c2: c / 2.0 });
    }
    if let RadialSymbol::Indicator { n0 } = sym {
        return Ok(RadialSymbol::Indicator { n0: 2 * n0 });
    }
    let doubled = double_parity(sym, DoublingOptions::default());
    Ok(RadialSymbol::Finite { values: doubled.values, tail: c }.canonical())
}

/// `a − b` as finite data over `0..horizon` with tail `c_a − c_b`.
///
/// Exact when both symbols settle before `horizon`; otherwise the caller picks
/// a horizon beyond which the difference is negligible.
pub fn finite_difference(a: &RadialSymbol, b: &RadialSymbol, horizon: usize) -> RadialSymbol {
    let values = (0..horizon).map(|n| a.eval(n) - b.eval(n)).collect();
    RadialSymbol::Finite { values, tail: a.tail_constant() - b.tail_constant() }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum SymbolWire {
    Geometric {
        s: JsonComplex,
    },
    Indicator {
        #[serde(alias = "n")]
        n0: usize,
    },
    TruncatedGeometric {
        r: f64,
        #[serde(alias = "n")]
        n0: usize,
    },
    Finite {
        values: Vec<JsonComplex>,
        tail: JsonComplex,
    },
    FromMeasure {
        c: JsonComplex,
        atoms: DiscreteMeasure,
    },
}

impl TryFrom<SymbolWire> for RadialSymbol {
    type Error = Error;

    fn try_from(wire: SymbolWire) -> Result<Self> {
        let sym = match wire {
            SymbolWire::Geometric { s } => RadialSymbol::Geometric { s: s.0 },
            SymbolWire::Indicator { n0 } => RadialSymbol::Indicator { n0 },
            SymbolWire::TruncatedGeometric { r, n0 } => RadialSymbol::TruncatedGeometric { r, n0 },
            SymbolWire::Finite { values, tail } => RadialSymbol::Finite {
                values: values.into_iter().map(C64::from).collect(),
                tail: tail.0,
            },
            SymbolWire::FromMeasure { c, atoms } => RadialSymbol::FromMeasure { c: c.0, measure: atoms },
        };
        sym.validate()?;
        Ok(sym)
    }
}

impl From<RadialSymbol> for SymbolWire {
    fn from(sym: RadialSymbol) -> Self {
        match sym {
            RadialSymbol::Geometric { s } => SymbolWire::Geometric { s: s.into() },
            RadialSymbol::Indicator { n0 } => SymbolWire::Indicator { n0 },
            RadialSymbol::TruncatedGeometric { r, n0 } => SymbolWire::TruncatedGeometric { r, n0 },
            RadialSymbol::Finite { values, tail } => SymbolWire::Finite {
                values: values.into_iter().map(JsonComplex).collect(),
                tail: tail.into(),
            },
            RadialSymbol::FromMeasure { c, measure } => SymbolWire::FromMeasure { c: c.into(), atoms: measure },
        }
    }
}
