//! Weighted Galerkin matrices in the Dirichlet sine and Neumann cosine bases on `(0, L)`.

use super::coeff::CoefficientSpec;
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Real, C};

/// Absolute quadrature tolerance per matrix entry.
pub const ENTRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `sqrt(2/L) sin(k pi x / L)`, `k = 1..=n`.
    Sine,
    /// Derivatives of the sine functions.
    SineDeriv,
    /// `sqrt(1/L)` then `sqrt(2/L) cos(k pi x / L)`, `k = 0..=n`.
    Cosine,
}

impl Basis {
    pub fn len(self, n: usize) -> usize {
        match self {
            Basis::Sine | Basis::SineDeriv => n,
            Basis::Cosine => n + 1,
        }
    }

    fn fill<T: Real>(self, x: T, length: T, out: &mut [T]) {
        let pi_l = T::PI() / length;
        let norm = (T::lit(2.0) / length).sqrt();
        match self {
            Basis::Sine => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = norm * (T::from_usize_lossy(i + 1) * pi_l * x).sin();
                }
            }
            Basis::SineDeriv => {
                for (i, o) in out.iter_mut().enumerate() {
                    let k = T::from_usize_lossy(i + 1) * pi_l;
                    *o = norm * k * (k * x).cos();
                }
            }
            Basis::Cosine => {
                out[0] = (T::one() / length).sqrt();
                for (i, o) in out.iter_mut().enumerate().skip(1) {
                    *o = norm * (T::from_usize_lossy(i) * pi_l * x).cos();
                }
            }
        }
    }
}

/// `M[i][j] = int_0^L w(x) u_i(x) v_j(x) dx`.
pub fn weighted_matrix<T: Real>(
    w: &CoefficientSpec,
    name: &str,
    length: f64,
    n: usize,
    rows: Basis,
    cols: Basis,
    panels: usize,
) -> Result<Mat<T>> {
    let (nr, nc) = (rows.len(n), cols.len(n));
    let l = T::lit(length);
    let breaks: Vec<T> = w.breakpoints().into_iter().map(T::lit).collect();
    let integrand = |x: T, out: &mut [C<T>]| {
        let mut u = vec![T::zero(); nr];
        let mut v = vec![T::zero(); nc];
        rows.fill(x, l, &mut u);
        cols.fill(x, l, &mut v);
        let wx = w.eval(x);
        for i in 0..nr {
            for j in 0..nc {
                out[i * nc + j] = wx * (u[i] * v[j]);
            }
        }
    };
    let r = integrate(
        integrand,
        nr * nc,
        T::zero(),
        l,
        panels,
        &breaks,
        w.singular_at_origin(),
        T::lit(ENTRY_TOL),
    );
    if r.unresolved > T::zero() {
        return Err(Error::Quadrature {
            coefficient: name.into(),
            change: r.unresolved.to_f64_lossy(),
        });
    }
    Ok(Mat::from_vec(nr, nc, r.values))
}

/// Mass matrix of `w` in the sine basis; exactly `c I` for a constant `c`.
pub fn sine_mass<T: Real>(w: &CoefficientSpec, name: &str, length: f64, n: usize, panels: usize) -> Result<Mat<T>> {
    match w.constant_value(length) {
        Some((re, im)) => Ok(Mat::identity(n).scale(C::new(T::lit(re), T::lit(im)))),
        None => weighted_matrix(w, name, length, n, Basis::Sine, Basis::Sine, panels),
    }
}

pub fn default_panels(n: usize) -> usize {
    (2 * n).max(32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::coeff::CoefficientSpec;

    #[test]
    fn constant_weight_quadrature_matches_identity() {
        // Force the quadrature path with a support covering the whole interval
        // written as a table.
        let w = CoefficientSpec::table(vec![0.0, std::f64::consts::PI], vec![2.0, 2.0]);
        let m: Mat<f64> = weighted_matrix(&w, "w", std::f64::consts::PI, 12, Basis::Sine, Basis::Sine, 24).unwrap();
        assert!(m.max_diff(&Mat::identity(12).scale_real(2.0)) < 1e-12);
        let c: Mat<f64> = weighted_matrix(&w, "w", std::f64::consts::PI, 6, Basis::Cosine, Basis::Cosine, 24).unwrap();
        assert!(c.max_diff(&Mat::identity(7).scale_real(2.0)) < 1e-12);
    }

    #[test]
    fn linear_weight_against_closed_form() {
        // int_0^pi x (2/pi) sin(jx) sin(kx) dx: diagonal pi/2, off-diagonal
        // (2/pi) * (-(1 - (-1)^(j+k))) * 2jk / (j^2 - k^2)^2.
        let pi = std::f64::consts::PI;
        let m: Mat<f64> = weighted_matrix(
            &CoefficientSpec::power(1.0, 1.0),
            "a",
            pi,
            6,
            Basis::Sine,
            Basis::Sine,
            16,
        )
        .unwrap();
        for j in 1..=6 {
            for k in 1..=6 {
                let expect = if j == k {
                    pi / 2.0
                } else if (j + k) % 2 == 1 {
                    let (jf, kf) = (j as f64, k as f64);
                    -(2.0 / pi) * 4.0 * jf * kf / (jf * jf - kf * kf).powi(2)
                } else {
                    0.0
                };
                assert!((m[(j - 1, k - 1)].re - expect).abs() < 1e-12, "{j} {k}");
            }
        }
    }
}
