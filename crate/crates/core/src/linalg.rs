//! Dense symmetric eigenproblems, canonical orthogonalization and a
//! Davidson lowest-root solver.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Eigenvalues ascending with matching eigenvector columns.
pub fn sym_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        // fix the sign so the largest component is positive
        let (imax, _) = col
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (j, v)| if v.abs() > best.1 + 1e-12 { (j, v.abs()) } else { best });
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(k, &col);
    }
    (values, vecs)
}

/// Default overlap-eigenvalue threshold for discarding near-dependent directions.
pub const DEFAULT_LINDEP: f64 = 1e-7;

/// Canonical orthogonalization: columns `u_i / sqrt(s_i)` for overlap
/// eigenvalues `s_i >= threshold`. Returns the transform and the number of
/// discarded directions.
pub fn canonical_orthogonalizer(s: &DMatrix<f64>, threshold: f64) -> (DMatrix<f64>, usize) {
    let (vals, vecs) = sym_eigen(s);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= threshold).collect();
    let mut x = DMatrix::zeros(s.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        x.set_column(k, &(vecs.column(i) / vals[i].sqrt()));
    }
    (x, vals.len() - keep.len())
}

/// Solves `H c = e S c` through a precomputed orthogonalizer `x`.
/// Returns eigenvalues ascending and coefficient columns normalized under S.
pub fn generalized_eigen(h: &DMatrix<f64>, x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let hp = x.transpose() * h * x;
    let (e, v) = sym_eigen(&hp);
    (e, x * v)
}

/// Lowest eigenpair of a symmetric operator given by `matvec`, using
/// Davidson iterations with a diagonal preconditioner.
pub fn davidson_lowest<F>(diag: &[f64], matvec: F, tol: f64, max_iter: usize) -> Result<(f64, DVector<f64>)>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = diag.len();
    if n == 0 {
        return Err(Error::Eigen("empty matrix".into()));
    }
    let max_sub = 40.min(n);
    let start = (0..n).min_by(|&i, &j| diag[i].total_cmp(&diag[j])).unwrap();
    let mut v0 = DVector::zeros(n);
    v0[start] = 1.0;
    let mut basis: Vec<DVector<f64>> = vec![v0];
    let mut images: Vec<DVector<f64>> = vec![matvec(&basis[0])];
    let mut last = (f64::NAN, f64::NAN);
    for _ in 0..max_iter {
        let m = basis.len();
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = basis[i].dot(&images[j]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let (vals, vecs) = sym_eigen(&g);
        let theta = vals[0];
        let mut x = DVector::zeros(n);
        let mut ax = DVector::zeros(n);
        for k in 0..m {
            x.axpy(vecs[(k, 0)], &basis[k], 1.0);
            ax.axpy(vecs[(k, 0)], &images[k], 1.0);
        }
        let r = &ax - &x * theta;
        let rnorm = r.norm();
        last = (last.1, rnorm);
        if rnorm < tol || m == n {
            let nx = x.norm();
            return Ok((theta, x / nx));
        }
        let mut t = DVector::from_iterator(
            n,
            r.iter().zip(diag).map(|(ri, di)| {
                let d = di - theta;
                ri / if d.abs() < 1e-8 { 1e-8_f64.copysign(d) } else { d }
            }),
        );
        if basis.len() >= max_sub {
            basis = vec![x.clone()];
            images = vec![ax];
        }
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&t);
                t.axpy(-c, b, 1.0);
            }
        }
        let tn = t.norm();
        if tn < 1e-14 {
            let nx = x.norm();
            return Ok((theta, x / nx));
        }
        t /= tn;
        images.push(matvec(&t));
        basis.push(t);
    }
    Err(Error::Eigen(format!(
        "Davidson did not converge in {max_iter} iterations (residuals {:.3e}, {:.3e})",
        last.0, last.1
    )))
}
