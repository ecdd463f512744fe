//! Finitely atomic measures on the open unit disk and the symbols they induce,
//! `φ(n) = c + Σⱼ wⱼ sⱼⁿ`.
//!
//! The weight `Σⱼ |wⱼ|·|1−sⱼ|/(1−|sⱼ|)` dominates `‖h‖₁ + ‖k‖₁` of the induced
//! symbol; [`verify_membership_bound`] checks that against the SVD norms, and
//! [`verify_doubling`] compares `‖φ̃‖_𝒞′` of the doubled symbol with `‖φ‖_𝒞`.

use crate::error::{Error, Result};
use crate::hankel::{c_norm, cprime_norm};
use crate::symbol::{double_parity, DoublingOptions, RadialSymbol};
use crate::C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Atoms must satisfy `|s| < 1 − BOUNDARY_MARGIN`.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::wire::complex")]
    pub s: C64,
    #[serde(with = "crate::wire::complex")]
    pub w: C64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for DiscreteMeasure {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        DiscreteMeasure::new(atoms)
    }
}

impl From<DiscreteMeasure> for Vec<Atom> {
    fn from(m: DiscreteMeasure) -> Self {
        m.atoms
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let measure = DiscreteMeasure { atoms };
        measure.validate()?;
        Ok(measure)
    }

    pub fn empty() -> Self {
        DiscreteMeasure::default()
    }

    /// Unit point mass at `s`.
    pub fn delta(s: C64) -> Result<Self> {
        DiscreteMeasure::new(vec![Atom { s, w: C64::new(1.0, 0.0) }])
    }

    /// `count` atoms with `|s| ≤ max_radius` and `|w| ≤ max_weight`, both
    /// uniform in the respective disks.
    pub fn random<R: Rng>(rng: &mut R, count: usize, max_radius: f64, max_weight: f64) -> Result<Self> {
        let mut disk = |radius: f64| {
            let r = radius * rng.random::<f64>().sqrt();
            C64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
        };
        let atoms = (0..count).map(|_| Atom { s: disk(max_radius), w: disk(max_weight) }).collect();
        DiscreteMeasure::new(atoms)
    }

    pub fn validate(&self) -> Result<()> {
        for atom in &self.atoms {
            let finite = [atom.s.re, atom.s.im, atom.w.re, atom.w.im].iter().all(|x| x.is_finite());
            if !finite {
                return Err(Error::InvalidMeasure("atom has non-finite coordinates".into()));
            }
            if atom.s.norm() >= 1.0 - BOUNDARY_MARGIN {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} lies within {BOUNDARY_MARGIN:e} of the unit circle",
                    atom.s
                )));
            }
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `c + Σⱼ wⱼ sⱼⁿ`.
    pub fn eval(&self, c: C64, n: usize) -> C64 {
        let exp = u32::try_from(n).unwrap_or(u32::MAX);
        self.atoms.iter().fold(c, |acc, a| acc + a.w * a.s.powu(exp))
    }

    /// `Σⱼ |wⱼ|·|1−sⱼ|/(1−|sⱼ|)`.
    pub fn weight(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.w.norm() * (1.0 - a.s).norm() / (1.0 - a.s.norm()))
            .sum()
    }
}

pub fn eval_measure(c: C64, measure: &DiscreteMeasure, n: usize) -> C64 {
    measure.eval(c, n)
}

pub fn weight(measure: &DiscreteMeasure) -> f64 {
    measure.weight()
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    /// `‖h‖₁ + ‖k‖₁` of the induced symbol.
    pub lhs: f64,
    /// `weight(ν)`.
    pub rhs: f64,
    pub c_abs: f64,
    pub c_norm_total: f64,
    pub truncation: usize,
    pub converged: bool,
    pub holds: bool,
}

/// Checks `‖h‖₁ + ‖k‖₁ ≤ weight(ν) + tol` for `φ(n) = c + ∫ sⁿ dν`.
pub fn verify_membership_bound(c: C64, measure: &DiscreteMeasure, tol: f64) -> Result<MembershipReport> {
    let sym = RadialSymbol::from_measure(c, measure.clone())?;
    let report = c_norm(&sym, tol)?;
    let lhs = report.trace_norm_h + report.trace_norm_k;
    let rhs = measure.weight();
    Ok(MembershipReport {
        lhs,
        rhs,
        c_abs: c.norm(),
        c_norm_total: report.total,
        truncation: report.truncation,
        converged: report.converged,
        holds: lhs <= rhs + tol,
    })
}

/// A closed-form representing pair `(c, ν)` where one is known.
pub fn representation_for(sym: &RadialSymbol) -> Result<(C64, DiscreteMeasure)> {
    match sym {
        RadialSymbol::Geometric { s } => Ok((C64::new(0.0, 0.0), DiscreteMeasure::delta(*s)?)),
        RadialSymbol::FromMeasure { c, measure } => Ok((*c, measure.clone())),
        RadialSymbol::Finite { values, tail } if values.is_empty() => Ok((*tail, DiscreteMeasure::empty())),
        other => Err(Error::Unsupported(format!("no finitely atomic representation is known for {other:?}"))),
    }
}

/// `|c| + weight(ν)` against `(8/π)·‖φ‖_𝒞`.
#[derive(Debug, Clone, Serialize)]
pub struct HeadroomReport {
    pub representation_mass: f64,
    pub c_norm_total: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn verify_headroom(sym: &RadialSymbol, tol: f64) -> Result<HeadroomReport> {
    let (c, measure) = representation_for(sym)?;
    let total = c_norm(sym, tol)?.total;
    let mass = c.norm() + measure.weight();
    let bound = 8.0 / std::f64::consts::PI * total;
    Ok(HeadroomReport { representation_mass: mass, c_norm_total: total, bound, holds: mass <= bound + tol })
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub c_norm: f64,
    pub cprime_norm: f64,
    pub trace_norm_hhat: f64,
    #[serde(with = "crate::wire::complex")]
    pub c1: C64,
    #[serde(with = "crate::wire::complex")]
    pub c2: C64,
    pub difference: f64,
    pub holds: bool,
}

/// Compares `‖φ̃‖_𝒞′` of the doubled symbol with `‖φ‖_𝒞`.
pub fn verify_doubling(sym: &RadialSymbol, tol: f64) -> Result<DoublingReport> {
    let direct = c_norm(sym, tol)?;
    let doubled = double_parity(sym, DoublingOptions::default());
    let prime = cprime_norm(&doubled, tol)?;
    let difference = (prime.total - direct.total).abs();
    Ok(DoublingReport {
        c_norm: direct.total,
        cprime_norm: prime.total,
        trace_norm_hhat: prime.trace_norm_hhat,
        c1: prime.c1,
        c2: prime.c2,
        difference,
        holds: difference <= tol,
    })
}
