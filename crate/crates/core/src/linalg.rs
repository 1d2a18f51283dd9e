//! Dense Hermitian positive-definite solve used by the closed-form x-update.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Solves `a · x = b` for Hermitian positive-definite `a` via Cholesky
/// (`a = L·Lᴴ`). Only the lower triangle of `a` is read.
pub fn hermitian_pd_solve<T: Real>(a: &Array2<Cx<T>>, b: &Array1<Cx<T>>) -> Result<Array1<Cx<T>>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension {
            context: "hermitian_pd_solve",
            expected: n,
            got: b.len(),
        });
    }
    // row-major lower factor
    let mut l = vec![Cx::new(T::zero(), T::zero()); n * n];
    let mut diag = vec![T::zero(); n];
    for j in 0..n {
        let (head, tail) = l.split_at_mut(j * n);
        let row_j = &mut tail[..n];
        for (k, v) in row_j.iter_mut().enumerate().take(j + 1) {
            *v = a[[j, k]];
        }
        for k in 0..j {
            let row_k = &head[k * n..k * n + k + 1];
            let mut s = row_j[k];
            for p in 0..k {
                s -= row_j[p] * row_k[p].conj();
            }
            row_j[k] = s / diag[k];
        }
        let mut d = row_j[j].re;
        for v in &row_j[..j] {
            d -= v.norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Numerical(format!(
                "matrix not positive definite at pivot {j}"
            )));
        }
        diag[j] = d.sqrt();
        row_j[j] = Cx::new(diag[j], T::zero());
    }

    // forward: L y = b
    let mut y: Vec<Cx<T>> = b.to_vec();
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        let mut s = y[i];
        for (lik, yk) in row.iter().zip(y.iter()) {
            s -= *lik * *yk;
        }
        y[i] = s / diag[i];
    }
    // backward: Lᴴ x = y
    let mut x = y;
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[k * n + i].conj() * x[k];
        }
        x[i] = s / diag[i];
    }
    let x = Array1::from_vec(x);
    if !is_finite_vec(&x) {
        return Err(Error::Numerical("non-finite solution".into()));
    }
    Ok(x)
}

/// Largest entrywise modulus, zero for an empty vector.
pub fn max_abs<T: Real>(v: &Array1<Cx<T>>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

pub fn frobenius_sq<T: Real>(a: &Array2<Cx<T>>) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn is_finite_vec<T: Real>(v: &Array1<Cx<T>>) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
