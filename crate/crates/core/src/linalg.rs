//! Small dense complex linear algebra helpers (dimensions stay below a few hundred).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// |a⟩⟨b|
pub fn outer(a: &[Complex64], b: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

pub fn projector(v: &[Complex64]) -> CMatrix {
    outer(v, v)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨a|b⟩
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_entry(&(m - m.adjoint()))
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized first.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).map(|z| z * 0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Spectral norm of a Hermitian matrix: the largest |eigenvalue|.
pub fn hermitian_spectral_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest deviation of `m m†` from the identity.
pub fn row_orthonormality_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_entry(&(m * m.adjoint() - CMatrix::identity(n, n)))
}

/// Checks a density matrix: Hermitian, unit trace, PSD, all within `tol`.
pub fn check_density_matrix(rho: &CMatrix, tol: f64) -> Result<(), String> {
    if !rho.is_square() {
        return Err("not square".into());
    }
    let herm = hermiticity_defect(rho);
    if herm > tol {
        return Err(format!("not Hermitian (defect {herm:.3e})"));
    }
    let tr = trace(rho);
    if (tr - c(1.0)).norm() > tol {
        return Err(format!("trace {tr} differs from 1"));
    }
    let min_ev = hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0);
    if min_ev < -tol {
        return Err(format!("negative eigenvalue {min_ev:.3e}"));
    }
    Ok(())
}
