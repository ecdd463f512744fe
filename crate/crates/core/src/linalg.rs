//! Dense kernels: singular values, SVD with vectors, Hermitian spectral norms.
//!
//! Real-valued inputs are routed through the real SVD, which is several times
//! cheaper than the complex one for the same dimension.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Largest dimension handled by the dense Hermitian eigensolver; above it the
/// spectral norm falls back to power iteration.
pub const DENSE_EIGEN_LIMIT: usize = 512;

const SVD_MAX_ITER: usize = 100_000;

// nalgebra's own default; with plain machine epsilon the complex SVD can return
// singular vectors that do not recompose the input
const SVD_EPS: f64 = 5.0 * f64::EPSILON;

fn is_real(a: &DMatrix<C64>) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &DMatrix<C64>) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = if is_real(a) {
        let re = a.map(|z| z.re);
        re.try_svd(false, false, SVD_EPS, SVD_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure("real SVD did not converge".into()))?
            .singular_values
            .iter()
            .copied()
            .collect()
    } else {
        a.clone()
            .try_svd(false, false, SVD_EPS, SVD_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure("complex SVD did not converge".into()))?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Thin SVD `A = Σ σₘ uₘ vₘ*` with triplets sorted by decreasing `σ`.
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Vec<Vec<C64>>,
    pub v: Vec<Vec<C64>>,
}

pub fn svd(a: &DMatrix<C64>) -> Result<Svd> {
    if a.is_empty() {
        return Ok(Svd { sigma: Vec::new(), u: Vec::new(), v: Vec::new() });
    }
    let (sigma, u, v_t) = if is_real(a) {
        let dec = a
            .map(|z| z.re)
            .try_svd(true, true, SVD_EPS, SVD_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure("real SVD did not converge".into()))?;
        let u = dec.u.expect("requested U").map(|x| C64::new(x, 0.0));
        let v_t = dec.v_t.expect("requested V").map(|x| C64::new(x, 0.0));
        (dec.singular_values.iter().copied().collect::<Vec<_>>(), u, v_t)
    } else {
        let dec = a
            .clone()
            .try_svd(true, true, SVD_EPS, SVD_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure("complex SVD did not converge".into()))?;
        (dec.singular_values.iter().copied().collect::<Vec<_>>(), dec.u.expect("requested U"), dec.v_t.expect("requested V"))
    };
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    Ok(Svd {
        sigma: order.iter().map(|&m| sigma[m]).collect(),
        u: order.iter().map(|&m| u.column(m).iter().copied().collect()).collect(),
        // row m of V* is the conjugate of the right singular vector
        v: order.iter().map(|&m| v_t.row(m).iter().map(|z| z.conj()).collect()).collect(),
    })
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &DMatrix<C64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    if a.nrows() <= DENSE_EIGEN_LIMIT {
        let eig = a
            .clone()
            .try_symmetric_eigen(SVD_EPS, SVD_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
        Ok(eig.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs())))
    } else {
        power_iteration_norm(|x| a * x, a.nrows(), 1e-13, 10_000)
    }
}

/// Largest `|λ|` of a Hermitian operator given as a matrix-vector product.
pub fn power_iteration_norm(
    apply: impl Fn(&nalgebra::DVector<C64>) -> nalgebra::DVector<C64>,
    dim: usize,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if dim == 0 {
        return Ok(0.0);
    }
    // deterministic start with generic overlap
    let mut x = nalgebra::DVector::from_fn(dim, |i, _| C64::new(1.0 + (i as f64 * 0.618).sin() * 0.5, 0.0));
    x /= C64::new(x.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        // A² is positive semidefinite, so iterate on it to avoid sign oscillation
        let y = apply(&apply(&x));
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = norm.sqrt();
        x = y / C64::new(norm, 0.0);
        if (next - estimate).abs() <= tol * next.max(1.0) {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NumericalFailure(format!("power iteration stalled at {estimate}")))
}
