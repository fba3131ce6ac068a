use num_traits::{One, Zero};

use super::Mat;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    lu: Mat<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            if pivot.is_zero() {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// True when some pivot is exactly zero.
    pub fn is_singular(&self) -> bool {
        (0..self.dim()).any(|i| self.lu[(i, i)].is_zero())
    }

    /// Ratio of smallest to largest pivot modulus; a cheap singularity indicator.
    pub fn pivot_ratio(&self) -> T {
        let piv: Vec<T> = (0..self.dim()).map(|i| self.lu[(i, i)].norm()).collect();
        let max = piv.iter().copied().fold(T::zero(), T::max);
        let min = piv.iter().copied().fold(T::infinity(), T::min);
        if max.is_zero() {
            T::zero()
        } else {
            min / max
        }
    }

    fn check_nonsingular(&self) -> Result<()> {
        if self.is_singular() {
            Err(Error::Factorization {
                factor: "LU".into(),
                detail: "zero pivot".into(),
            })
        } else {
            Ok(())
        }
    }

    pub fn solve_vec(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        self.check_nonsingular()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension("LU rhs length mismatch".into()));
        }
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solves `A* x = b`.
    pub fn solve_adjoint_vec(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        self.check_nonsingular()?;
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension("LU rhs length mismatch".into()));
        }
        // A* = U* L* P, so solve U* y = b, L* w = y, x = P^T w.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![C::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &Mat<T>) -> Result<Mat<T>> {
        let mut x = Mat::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = self.solve_vec(&b.column(j))?;
            x.set_column(j, &col);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat<T>> {
        self.solve(&Mat::identity(self.dim()))
    }

    pub fn det(&self) -> C<T> {
        let mut d = if self.swaps.is_multiple_of(2) {
            C::one()
        } else {
            -C::one()
        };
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Complex logarithm of the determinant, imaginary part reduced to (-pi, pi].
    pub fn log_det(&self) -> C<T> {
        let mut acc = C::zero();
        for i in 0..self.dim() {
            acc += self.lu[(i, i)].ln();
        }
        if self.swaps % 2 == 1 {
            acc.im += T::PI();
        }
        C::new(acc.re, wrap_angle(acc.im))
    }
}

/// Reduces an angle into (-pi, pi].
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y -= two_pi;
    } else if y <= -T::PI() {
        y += two_pi;
    }
    y
}

/// Solves `A X = B` by LU.
pub fn solve<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    Lu::new(a)?.solve(b)
}

pub fn inverse<T: Real>(a: &Mat<T>) -> Result<Mat<T>> {
    Lu::new(a)?.inverse()
}
