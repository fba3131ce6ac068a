use num_traits::Zero;

use super::{vec_norm, Mat};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Singular value decomposition `A = U diag(s) V*`.
///
/// `u` is m x k with k = min(m, n), `v` is the full n x n unitary factor, so its
/// trailing columns span the kernel once `s` drops below the rank cut.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    pub u: Mat<T>,
    pub s: Vec<T>,
    pub v: Mat<T>,
}

const MAX_SWEEPS: usize = 80;

impl<T: Real> Svd<T> {
    /// One-sided (Hestenes) Jacobi SVD.
    pub fn new(a: &Mat<T>) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::Dimension(format!("SVD of empty {m}x{n} matrix")));
        }
        if !a.is_finite() {
            return Err(Error::Input("SVD of matrix with non-finite entries".into()));
        }
        // Pad wide inputs with zero rows so the right factor comes out square.
        let rows = m.max(n);
        let mut work: Vec<Vec<C<T>>> = (0..n)
            .map(|j| {
                let mut col = a.column(j);
                col.resize(rows, C::zero());
                col
            })
            .collect();
        let mut v: Vec<Vec<C<T>>> = (0..n)
            .map(|j| {
                let mut e = vec![C::zero(); n];
                e[j] = cr(T::one());
                e
            })
            .collect();

        let eps = T::epsilon();
        // Columns this small carry singular values below eps * |A|; rotating
        // them only chases rounding noise.
        let tiny = eps * eps * a.norm_fro().powi(2);
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (alpha, beta, gamma) = {
                        let (cp, cq) = (&work[p], &work[q]);
                        let mut alpha = T::zero();
                        let mut beta = T::zero();
                        let mut gamma: C<T> = C::zero();
                        for (x, y) in cp.iter().zip(cq) {
                            alpha += x.norm_sqr();
                            beta += y.norm_sqr();
                            gamma += x.conj() * y;
                        }
                        (alpha, beta, gamma)
                    };
                    let g = gamma.norm();
                    if g.is_zero() || g <= eps * (alpha * beta).sqrt() || alpha <= tiny || beta <= tiny {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (g + g);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = cs * t;
                    let w = phase.conj();
                    rotate(&mut work, p, q, cs, sn, w);
                    rotate(&mut v, p, q, cs, sn, w);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence("Jacobi SVD did not converge".into()));
        }

        let norms: Vec<T> = work.iter().map(|col| vec_norm(col)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

        let k = m.min(n);
        let s: Vec<T> = order.iter().take(k).map(|&j| norms[j]).collect();
        let mut u = Mat::zeros(m, k);
        for (col, &j) in order.iter().take(k).enumerate() {
            let nrm = norms[j];
            if nrm > T::zero() {
                for i in 0..m {
                    u[(i, col)] = work[j][i] / nrm;
                }
            }
        }
        let mut vm = Mat::zeros(n, n);
        for (col, &j) in order.iter().enumerate() {
            for i in 0..n {
                vm[(i, col)] = v[j][i];
            }
        }
        Ok(Self { u, s, v: vm })
    }

    pub fn sigma_max(&self) -> T {
        self.s.first().copied().unwrap_or_else(T::zero)
    }

    /// Smallest singular value, counting the implicit zeros of a wide matrix.
    pub fn sigma_min(&self) -> T {
        if self.v.nrows() > self.s.len() {
            T::zero()
        } else {
            self.s.last().copied().unwrap_or_else(T::zero)
        }
    }

    pub fn rank(&self, tol: T) -> usize {
        self.s.iter().filter(|&&x| x > tol).count()
    }

    /// Orthonormal basis of the numerical kernel (right singular vectors beyond the rank).
    pub fn kernel_basis(&self, tol: T) -> Mat<T> {
        let r = self.rank(tol);
        let n = self.v.nrows();
        let idx: Vec<usize> = (r..n).collect();
        self.v.columns(&idx)
    }
}

/// Applies the complex Jacobi rotation to columns `p`, `q`:
/// `x_p <- c x_p - s w x_q`, `x_q <- s x_p + c w x_q`.
fn rotate<T: Real>(cols: &mut [Vec<C<T>>], p: usize, q: usize, cs: T, sn: T, w: C<T>) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let wy = w * *y;
        let nx = *x * cs - wy * sn;
        let ny = *x * sn + wy * cs;
        *x = nx;
        *y = ny;
    }
}

/// Spectral norm.
pub fn norm2<T: Real>(a: &Mat<T>) -> Result<T> {
    Ok(Svd::new(a)?.sigma_max())
}

/// 2-norm condition number; infinite for singular input.
pub fn cond2<T: Real>(a: &Mat<T>) -> Result<T> {
    let svd = Svd::new(a)?;
    let lo = svd.sigma_min();
    Ok(if lo.is_zero() {
        T::infinity()
    } else {
        svd.sigma_max() / lo
    })
}
