use serde::{Deserialize, Serialize};

use crate::blockop::{ExcludedSet, OperatorFamily, GUARD_REL};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{c, cr, Real, C};

/// Symbol of `[[Δ, -Δ²], [sqrt(-Δ), Δ]]` sampled on `ξ ∈ [0, xi_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstCoeffSpec {
    pub xi_max: f64,
    pub n_xi: usize,
}

impl ConstCoeffSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi_max > 0.0) || !self.xi_max.is_finite() {
            return Err(Error::Config(format!("xi_max must be positive, got {}", self.xi_max)));
        }
        if self.n_xi < 2 {
            return Err(Error::Config(format!("n_xi must be at least 2, got {}", self.n_xi)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ConstCoeff<T> {
    /// Uniform grid including both ends.
    pub xi: Vec<T>,
}

impl<T: Real> ConstCoeff<T> {
    /// `[[-ξ², -ξ⁴], [ξ, -ξ²]]`.
    pub fn symbol(&self, xi: T) -> Mat<T> {
        let x2 = xi * xi;
        Mat::from_rows(&[vec![cr(-x2), cr(-x2 * x2)], vec![cr(xi), cr(-x2)]])
    }

    /// `-ξ² - λ - ξ⁵/(ξ² + λ)`.
    pub fn schur_symbol(&self, lambda: C<T>, xi: T) -> Result<C<T>> {
        let x2 = xi * xi;
        let pole = cr(x2) + lambda;
        if pole.norm() <= T::lit(GUARD_REL) * (T::one() + x2) {
            return Err(Error::Domain {
                label: "const_coeff.s".into(),
                lambda: format!("{lambda}"),
                nearest: format!("{}", -x2),
            });
        }
        Ok(cr(-x2) - lambda - cr(x2 * x2 * xi) / pole)
    }

    /// `(λ+, λ-) = -ξ² ± i ξ^{5/2}`.
    pub fn eigencurves(&self, xi: T) -> (C<T>, C<T>) {
        let x2 = xi * xi;
        let w = xi.powf(T::lit(2.5));
        (c(-x2, w), c(-x2, -w))
    }

    /// `s_λ(ξ)` at fixed `ξ` as a 1x1 family with excluded point `-ξ²`.
    pub fn family_at(&self, xi: T) -> OperatorFamily<T> {
        let this = Self { xi: Vec::new() };
        OperatorFamily::new(
            "const_coeff.s",
            1,
            ExcludedSet::from_points(vec![cr(-xi * xi)]),
            move |lambda| Ok(Mat::from_diag(&[this.schur_symbol(lambda, xi)?])),
        )
    }
}

pub fn build_const_coeff<T: Real>(spec: &ConstCoeffSpec) -> Result<ConstCoeff<T>> {
    spec.validate()?;
    let n = spec.n_xi;
    let xi = (0..n)
        .map(|i| T::lit(spec.xi_max * i as f64 / (n - 1) as f64))
        .collect();
    Ok(ConstCoeff { xi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cf;

    #[test]
    fn symbol_examples() {
        let cc = build_const_coeff::<f64>(&ConstCoeffSpec { xi_max: 10.0, n_xi: 11 }).unwrap();
        assert_eq!(cc.symbol(0.0).max_abs(), 0.0);
        assert_eq!(cc.eigencurves(0.0), (cf(0.0, 0.0), cf(0.0, 0.0)));
        let (p, m) = cc.eigencurves(1.0);
        assert_eq!((p, m), (cf(-1.0, 1.0), cf(-1.0, -1.0)));
        assert!(cc.schur_symbol(p, 1.0).unwrap().norm() < 1e-14);
        assert!(cc.schur_symbol(m, 1.0).unwrap().norm() < 1e-14);
        assert!(matches!(cc.schur_symbol(cf(-4.0, 0.0), 2.0), Err(Error::Domain { .. })));
    }
}
