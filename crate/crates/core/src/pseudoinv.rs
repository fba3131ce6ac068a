//! Generalized inverse `T^#` with kernel and cokernel projections.
//!
//! At finite dimension the generalized inverse is the Moore–Penrose
//! pseudoinverse of the rank-truncated matrix. The projections `P` and `Q` are
//! formed from the trailing singular vectors, so the identities
//! `T T^# = I - Q` and `T^# T = I - P` are checked rather than built in.

use crate::blockop::OperatorFamily;
use crate::error::{Error, Result};
use crate::linalg::{cond2, inverse, Mat, Svd};
use crate::scalar::{Real, C};

/// How singular values are cut off when deciding the numerical rank.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum TolPolicy<T> {
    /// `max(m, n) * eps * sigma_max`.
    #[default]
    Default,
    /// `factor * sigma_max`.
    Relative(T),
    Absolute(T),
}

impl<T: Real> TolPolicy<T> {
    pub fn resolve(&self, m: usize, n: usize, sigma_max: T) -> Result<T> {
        let tol = match *self {
            TolPolicy::Default => T::from_usize_lossy(m.max(n)) * T::epsilon() * sigma_max,
            TolPolicy::Relative(f) => {
                if !(f > T::zero()) || !f.is_finite() {
                    return Err(Error::Input(format!("relative tolerance must be positive, got {f}")));
                }
                f * sigma_max
            }
            TolPolicy::Absolute(a) => {
                if !(a > T::zero()) || !a.is_finite() {
                    return Err(Error::Input(format!("absolute tolerance must be positive, got {a}")));
                }
                a
            }
        };
        Ok(tol)
    }
}

#[derive(Clone, Debug)]
pub struct PinvBundle<T: Real> {
    /// `T^#`, m x n for an n x m input.
    pub pinv: Mat<T>,
    pub rank: usize,
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<T>,
    /// Orthogonal projection onto the kernel.
    pub proj_kernel: Mat<T>,
    /// Orthogonal projection onto the cokernel `(ran T)^perp`.
    pub proj_cokernel: Mat<T>,
    pub tol_used: T,
}

impl<T: Real> PinvBundle<T> {
    pub fn kernel_dim(&self) -> usize {
        self.proj_kernel.nrows() - self.rank
    }

    pub fn cokernel_dim(&self) -> usize {
        self.proj_cokernel.nrows() - self.rank
    }
}

pub fn generalized_inverse<T: Real>(t: &Mat<T>, policy: TolPolicy<T>) -> Result<PinvBundle<T>> {
    let (n, m) = t.shape();
    if n == 0 || m == 0 {
        return Err(Error::Dimension(format!(
            "generalized inverse of an empty {n}x{m} matrix"
        )));
    }
    if !t.is_finite() {
        return Err(Error::Input(
            "generalized inverse of a matrix with non-finite entries".into(),
        ));
    }
    let svd = Svd::new(t)?;
    let tol = policy.resolve(n, m, svd.sigma_max())?;
    let rank = svd.rank(tol);

    // pinv = V_r diag(1/s) U_r*
    let mut pinv = Mat::zeros(m, n);
    for k in 0..rank {
        let inv_s = T::one() / svd.s[k];
        for i in 0..m {
            let vik = svd.v[(i, k)] * inv_s;
            for j in 0..n {
                pinv[(i, j)] += vik * svd.u[(j, k)].conj();
            }
        }
    }
    let null_proj = |basis: &Mat<T>, dim: usize| {
        let idx: Vec<usize> = (rank..dim).collect();
        let b = basis.columns(&idx);
        &b * &b.adjoint()
    };
    let proj_kernel = null_proj(&svd.v, m);
    // The left factor is thin; the right factor of T* is square.
    let proj_cokernel = null_proj(&Svd::new(&t.adjoint())?.v, n);
    Ok(PinvBundle {
        pinv,
        rank,
        singular_values: svd.s,
        proj_kernel,
        proj_cokernel,
        tol_used: tol,
    })
}

/// Max-norm residuals of the two defining identities of `T^#`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals<T> {
    /// `|T T^# - (I - Q)|_max`
    pub range: T,
    /// `|T^# T - (I - P)|_max`
    pub domain: T,
}

impl<T: Real> IdentityResiduals<T> {
    pub fn max(&self) -> T {
        self.range.max(self.domain)
    }
}

pub fn gen_inverse_identities<T: Real>(t: &Mat<T>, bundle: &PinvBundle<T>) -> Result<IdentityResiduals<T>> {
    let (n, m) = t.shape();
    if bundle.pinv.shape() != (m, n) || bundle.proj_kernel.shape() != (m, m) || bundle.proj_cokernel.shape() != (n, n) {
        return Err(Error::Dimension(format!("bundle shapes do not match a {n}x{m} matrix")));
    }
    let range = (t * &bundle.pinv).max_diff(&(&Mat::identity(n) - &bundle.proj_cokernel));
    let domain = (&bundle.pinv * t).max_diff(&(&Mat::identity(m) - &bundle.proj_kernel));
    Ok(IdentityResiduals { range, domain })
}

/// Relative residuals of the four Penrose conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenroseResiduals<T> {
    /// `|T X T - T| / |T|`
    pub txt: T,
    /// `|X T X - X| / |X|`
    pub xtx: T,
    /// `|(T X)* - T X|`
    pub tx_hermitian: T,
    /// `|(X T)* - X T|`
    pub xt_hermitian: T,
}

impl<T: Real> PenroseResiduals<T> {
    pub fn max(&self) -> T {
        self.txt.max(self.xtx).max(self.tx_hermitian).max(self.xt_hermitian)
    }
}

pub fn penrose_residuals<T: Real>(t: &Mat<T>, pinv: &Mat<T>) -> PenroseResiduals<T> {
    let rel = |num: T, den: T| if den > T::zero() { num / den } else { num };
    let tx = t * pinv;
    let xt = pinv * t;
    PenroseResiduals {
        txt: rel((&tx * t).max_diff(t), t.max_abs()),
        xtx: rel((&xt * pinv).max_diff(pinv), pinv.max_abs()),
        tx_hermitian: tx.adjoint().max_diff(&tx),
        xt_hermitian: xt.adjoint().max_diff(&xt),
    }
}

/// Condition number above which `S - z` counts as singular.
fn shift_condition_limit<T: Real>() -> T {
    T::one() / (T::lit(1e4) * T::epsilon())
}

/// `S_z‡ - (z S^# + P) S_z‡` with `S_z‡ = (S - z)^{-1}`, for a fixed matrix `s`.
pub fn shifted_extension_matrix<T: Real>(s: &Mat<T>, z: C<T>) -> Result<Mat<T>> {
    if !s.is_square() {
        return Err(Error::Dimension("shifted extension needs a square matrix".into()));
    }
    let shifted = s.shifted(z);
    let cond = cond2(&shifted)?;
    if !(cond < shift_condition_limit()) {
        return Err(Error::Shift {
            z: format!("{z}"),
            condition: cond.to_f64_lossy(),
        });
    }
    let sz = inverse(&shifted)?;
    let bundle = generalized_inverse(s, TolPolicy::Default)?;
    let factor = &bundle.pinv.scale(z) + &bundle.proj_kernel;
    Ok(&sz - &(&factor * &sz))
}

/// Shifted extension of the generalized inverse of `S(lambda)`.
pub fn shifted_extension<T: Real>(family: &OperatorFamily<T>, z: C<T>, lambda: C<T>) -> Result<Mat<T>> {
    let s = family.evaluate(lambda)?;
    shifted_extension_matrix(&s, z)
}

/// Residual of `S‡ = S^#` restricted to `ran S`, i.e. `|(S‡ - S^#) S|_max`.
pub fn restricted_extension_residual<T: Real>(s: &Mat<T>, ext: &Mat<T>) -> Result<T> {
    let bundle = generalized_inverse(s, TolPolicy::Default)?;
    let diff = ext - &bundle.pinv;
    Ok((&diff * s).max_abs() / s.max_abs().max(T::min_positive_value()))
}
