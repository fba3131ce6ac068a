use num_traits::{One, Zero};

use super::{vec_norm, Mat};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Complex Schur form `A = Z T Z*` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur<T: Real> {
    pub t: Mat<T>,
    pub z: Mat<T>,
}

const ITERS_PER_EIGENVALUE: usize = 60;

impl<T: Real> Schur<T> {
    pub fn new(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "eigenvalues need a nonempty square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::Input("eigenvalues of matrix with non-finite entries".into()));
        }
        let (mut h, mut z) = hessenberg(a);
        francis_single_shift(&mut h, &mut z)?;
        Ok(Self { t: h, z })
    }

    pub fn eigenvalues(&self) -> Vec<C<T>> {
        self.t.diag()
    }

    /// Unit-norm eigenvectors as columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> Mat<T> {
        let t = &self.t;
        let n = t.nrows();
        let small = T::epsilon() * t.max_abs().max(T::min_positive_value());
        let mut y = Mat::zeros(n, n);
        for k in 0..n {
            let lam = t[(k, k)];
            let mut col = vec![C::zero(); n];
            col[k] = C::one();
            for j in (0..k).rev() {
                let mut s: C<T> = C::zero();
                for l in j + 1..=k {
                    s += t[(j, l)] * col[l];
                }
                let mut d = t[(j, j)] - lam;
                if d.norm() < small {
                    d = cr(small);
                }
                col[j] = -s / d;
            }
            y.set_column(k, &col);
        }
        let mut v = &self.z * &y;
        for k in 0..n {
            let col = v.column(k);
            let nrm = vec_norm(&col);
            if nrm > T::zero() {
                let scaled: Vec<_> = col.iter().map(|&x| x / nrm).collect();
                v.set_column(k, &scaled);
            }
        }
        v
    }
}

pub fn eigenvalues<T: Real>(a: &Mat<T>) -> Result<Vec<C<T>>> {
    Ok(Schur::new(a)?.eigenvalues())
}

/// Eigenvalues and unit eigenvectors of a general complex matrix.
pub fn eig<T: Real>(a: &Mat<T>) -> Result<(Vec<C<T>>, Mat<T>)> {
    let s = Schur::new(a)?;
    Ok((s.eigenvalues(), s.eigenvectors()))
}

/// Householder reduction to upper Hessenberg form, returning `(H, Q)` with `A = Q H Q*`.
fn hessenberg<T: Real>(a: &Mat<T>) -> (Mat<T>, Mat<T>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = Mat::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = vec_norm(&x);
        if alpha.is_zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm().is_zero() { C::one() } else { x0 / x0.norm() };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        if vn.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- (I - 2vv*) H (I - 2vv*)
        for j in 0..n {
            let mut s: C<T> = C::zero();
            for (r, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + r, j)];
            }
            s = s + s;
            for (r, vi) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= *vi * s;
            }
        }
        for i in 0..n {
            let mut s: C<T> = C::zero();
            for (r, vi) in v.iter().enumerate() {
                s += h[(i, k + 1 + r)] * *vi;
            }
            s = s + s;
            for (r, vi) in v.iter().enumerate() {
                h[(i, k + 1 + r)] -= s * vi.conj();
            }
        }
        for i in 0..n {
            let mut s: C<T> = C::zero();
            for (r, vi) in v.iter().enumerate() {
                s += q[(i, k + 1 + r)] * *vi;
            }
            s = s + s;
            for (r, vi) in v.iter().enumerate() {
                q[(i, k + 1 + r)] -= s * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::zero();
        }
    }
    (h, q)
}

/// Givens pair `(c, s)` with `[c, s; -conj(s), c] [x; y] = [r; 0]`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay.is_zero() {
        return (T::one(), C::zero());
    }
    if ax.is_zero() {
        return (T::zero(), C::one());
    }
    let nrm = ax.hypot(ay);
    let alpha = x / ax;
    (ax / nrm, alpha * y.conj() / nrm)
}

fn rot_rows<T: Real>(h: &mut Mat<T>, k: usize, cs: T, sn: C<T>, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = h[(k, j)];
        let b = h[(k + 1, j)];
        h[(k, j)] = a * cs + sn * b;
        h[(k + 1, j)] = -sn.conj() * a + b * cs;
    }
}

fn rot_cols<T: Real>(h: &mut Mat<T>, k: usize, cs: T, sn: C<T>, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = h[(i, k)];
        let b = h[(i, k + 1)];
        h[(i, k)] = a * cs + b * sn.conj();
        h[(i, k + 1)] = -a * sn + b * cs;
    }
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let tr_half = (a + d) * half;
    let diff_half = (a - d) * half;
    let disc = (diff_half * diff_half + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Implicit single-shift QR on an upper Hessenberg matrix, accumulating into `z`.
fn francis_single_shift<T: Real>(h: &mut Mat<T>, z: &mut Mat<T>) -> Result<()> {
    let n = h.nrows();
    if n == 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let norm = h.max_abs();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let limit = ITERS_PER_EIGENVALUE * n;
    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if scale.is_zero() {
                scale = norm;
            }
            if sub <= eps * scale || sub < T::min_positive_value() {
                h[(lo, lo - 1)] = C::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > limit {
            return Err(Error::Convergence("complex QR iteration did not converge".into()));
        }
        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let (cs, sn) = givens(h[(lo, lo)] - shift, h[(lo + 1, lo)]);
        rot_rows(h, lo, cs, sn, lo..n);
        rot_cols(h, lo, cs, sn, 0..(lo + 3).min(hi + 1));
        rot_cols(z, lo, cs, sn, 0..n);
        for k in lo + 1..hi {
            let (cs, sn) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rot_rows(h, k, cs, sn, k - 1..n);
            h[(k + 1, k - 1)] = C::zero();
            rot_cols(h, k, cs, sn, 0..(k + 3).min(hi + 1));
            rot_cols(z, k, cs, sn, 0..n);
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C::zero();
        }
    }
    Ok(())
}
