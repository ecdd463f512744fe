//! Square sparse complex matrices in deduplicated triplet form.

use crate::error::Result;
use crate::C64;
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::io::Write;
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_triplets(values.len(), values.iter().enumerate().map(|(i, v)| (i, i, *v)))
    }

    /// Duplicate positions are summed; exact zeros are not stored.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut m = SparseMatrix::zeros(dim);
        for (r, c, v) in triplets {
            m.add_at(r, c, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn add_at(&mut self, row: usize, col: usize, value: C64) {
        assert!(row < self.dim && col < self.dim, "entry ({row}, {col}) outside dimension {}", self.dim);
        if value == C64::new(0.0, 0.0) {
            return;
        }
        let slot = self.entries.entry((row, col)).or_default();
        *slot += value;
        if *slot == C64::new(0.0, 0.0) {
            self.entries.remove(&(row, col));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn adjoint(&self) -> Self {
        SparseMatrix::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, factor: C64) -> Self {
        SparseMatrix::from_triplets(self.dim, self.iter().map(|(r, c, v)| (r, c, v * factor)))
    }

    /// Multiplies entry `(r, c)` by `weight(r, c)`.
    pub fn weighted(&self, weight: impl Fn(usize, usize) -> C64) -> Self {
        SparseMatrix::from_triplets(self.dim, self.iter().map(|(r, c, v)| (r, c, v * weight(r, c))))
    }

    pub fn filtered(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        SparseMatrix { dim: self.dim, entries: self.entries.iter().filter(|(&(r, c), _)| keep(r, c)).map(|(k, v)| (*k, *v)).collect() }
    }

    /// `V A V*` for the partial isometry `V eᵢ = e_{map[i]}` (`None` kills `eᵢ`).
    pub fn conjugate_by(&self, map: &[Option<usize>]) -> Self {
        SparseMatrix::from_triplets(
            self.dim,
            self.iter().filter_map(|(r, c, v)| Some((map[r]?, map[c]?, v))),
        )
    }

    /// Accumulates `other` into `self`.
    pub fn accumulate(&mut self, other: &SparseMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (r, c, v) in other.iter() {
            self.add_at(r, c, v);
        }
    }

    pub fn matmul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); other.dim];
        for (r, c, v) in other.iter() {
            rows[r].push((c, v));
        }
        let mut out = SparseMatrix::zeros(self.dim);
        for (i, k, a) in self.iter() {
            for &(j, b) in &rows[k] {
                out.add_at(i, j, a * b);
            }
        }
        out
    }

    /// `A ⊗ B` with the index of `eᵢ ⊗ fⱼ` equal to `i·dim(B) + j`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let d = other.dim;
        SparseMatrix::from_triplets(
            self.dim * d,
            self.iter()
                .flat_map(|(r, c, a)| other.iter().map(move |(p, q, b)| (r * d + p, c * d + q, a * b))),
        )
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        for (r, c, v) in self.iter() {
            y[r] += v * x[c];
        }
        y
    }

    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        (self - other).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(self.dim, self.dim, C64::new(0.0, 0.0));
        for (r, c, v) in self.iter() {
            out[(r, c)] = v;
        }
        out
    }

    /// Writes `row,col,re,im` rows.
    pub fn write_triplets_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["row", "col", "re", "im"])?;
        for (r, c, v) in self.iter() {
            writer.write_record([r.to_string(), c.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;

    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        out.accumulate(rhs);
        out
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;

    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        out.accumulate(&rhs.scale(C64::new(-1.0, 0.0)));
        out
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;

    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.matmul(rhs)
    }
}
