use num_traits::Zero;

use super::Mat;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Lower Cholesky factor `L` with `G = L L*`.
pub fn cholesky<T: Real>(g: &Mat<T>) -> Result<Mat<T>> {
    if !g.is_square() || g.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "Cholesky needs a nonempty square matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if !g.is_hermitian(T::lit(1e-12)) {
        return Err(Error::Definiteness("Gram matrix is not Hermitian".into()));
    }
    let n = g.nrows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) {
            return Err(Error::Definiteness(format!(
                "Gram matrix is not positive definite (pivot {j} = {d:e})"
            )));
        }
        let djj = d.sqrt();
        l[(j, j)] = cr(djj);
        for i in j + 1..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower triangular `L`.
pub fn solve_lower<T: Real>(l: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..b.ncols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `U x = b` for upper triangular `U`.
pub fn solve_upper<T: Real>(u: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = u.nrows();
    let mut x = b.clone();
    for c in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= u[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = if u[(i, i)].is_zero() {
                C::new(T::nan(), T::nan())
            } else {
                s / u[(i, i)]
            };
        }
    }
    x
}

/// `R M R^{-1}` with `R = L*`, the matrix whose Euclidean norms equal the
/// `G`-weighted norms of `M` (since `x* G x = |R x|^2`).
pub fn weighted_similarity<T: Real>(m: &Mat<T>, l: &Mat<T>) -> Mat<T> {
    let r = l.adjoint();
    // (R M) R^{-1} = ((R^{-*}) (R M)*)* = (L^{-1} (R M)*)*
    let rm = &r * m;
    solve_lower(l, &rm.adjoint()).adjoint()
}
