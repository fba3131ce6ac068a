use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coeff::CoefficientSpec;
use super::galerkin::{default_panels, sine_mass};
use crate::blockop::{BlockOperator, ExcludedSet, GramPair, OperatorFamily};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{cr, Real, C};

/// `u_tt + 2 a u_t + (-u_xx + q u) = 0` on `(0, L)` with Dirichlet ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampedWaveSpec {
    pub length: f64,
    pub n_modes: usize,
    pub damping: CoefficientSpec,
    #[serde(default = "zero_coefficient")]
    pub potential: CoefficientSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

fn zero_coefficient() -> CoefficientSpec {
    CoefficientSpec::constant(0.0)
}

impl DampedWaveSpec {
    pub fn new(length: f64, n_modes: usize, damping: CoefficientSpec, potential: CoefficientSpec) -> Self {
        Self {
            length,
            n_modes,
            damping,
            potential,
            quad_order: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::Config(format!("length must be positive, got {}", self.length)));
        }
        if self.n_modes < 4 {
            return Err(Error::Config(format!(
                "n_modes must be at least 4, got {}",
                self.n_modes
            )));
        }
        if self.quad_order == Some(0) {
            return Err(Error::Config("quad_order must be positive".into()));
        }
        self.damping.validate("damping", self.length)?;
        self.potential.validate("potential", self.length)?;
        self.damping.require_nonnegative("damping", self.length)?;
        self.potential.require_nonnegative("potential", self.length)?;
        Ok(())
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order.unwrap_or_else(|| default_panels(self.n_modes))
    }
}

#[derive(Clone, Debug)]
pub struct DampedWave<T: Real> {
    /// `[[0, I], [-(K + Q), -2 A]]`.
    pub block: BlockOperator<T>,
    /// `G1 = K + Q`, `G2 = I`.
    pub gram: GramPair<T>,
    /// `lambda -> -(1/lambda)((K + Q) + 2 lambda A + lambda^2)`, excluded `{0}`.
    pub schur: OperatorFamily<T>,
    /// `-a +- sqrt(a^2 - q - (k pi / L)^2)` for constant `a`, `q`.
    pub reference: Option<Vec<C<T>>>,
    pub stiffness: Mat<T>,
    pub damping: Mat<T>,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Real> DampedWave<T> {
    /// Coefficients `[K + Q, 2 A, I]` of the quadratic pencil.
    pub fn quadratic_coeffs(&self) -> Vec<Mat<T>> {
        let n = self.stiffness.nrows();
        vec![
            self.stiffness.clone(),
            self.damping.scale_real(T::lit(2.0)),
            Mat::identity(n),
        ]
    }
}

pub fn build_damped_wave<T: Real>(spec: &DampedWaveSpec) -> Result<DampedWave<T>> {
    spec.validate()?;
    let n = spec.n_modes;
    let l = spec.length;
    let panels = spec.quad_order();
    let lt = T::lit(l);
    let k_diag: Vec<T> = (1..=n)
        .map(|k| {
            let w = T::from_usize_lossy(k) * T::PI() / lt;
            w * w
        })
        .collect();
    let q = sine_mass::<T>(&spec.potential, "potential", l, n, panels)?;
    let a = sine_mass::<T>(&spec.damping, "damping", l, n, panels)?;
    let stiffness = &Mat::from_real_diag(&k_diag) + &q;

    let block = BlockOperator::new(
        Mat::zeros(n, n),
        Mat::identity(n),
        -&stiffness,
        a.scale_real(T::lit(-2.0)),
    )?;
    let gram = GramPair::new(stiffness.clone(), Mat::identity(n))?;

    let (kq, a2) = (stiffness.clone(), a.scale_real(T::lit(2.0)));
    let schur = OperatorFamily::new(
        "damped_wave.S2",
        n,
        ExcludedSet::from_points(vec![cr(T::zero())]),
        move |lambda| {
            let inner = &(&kq + &a2.scale(lambda)) + &Mat::identity(n).scale(lambda * lambda);
            Ok(inner.scale(-(cr(T::one()) / lambda)))
        },
    );

    let reference = match (spec.damping.constant_value(l), spec.potential.constant_value(l)) {
        (Some((ar, 0.0)), Some((qr, 0.0))) => {
            let (a, q) = (T::lit(ar), T::lit(qr));
            let mut out = Vec::with_capacity(2 * n);
            for kk in &k_diag {
                let root = cr(a * a - q - *kk).sqrt();
                out.push(cr(-a) + root);
                out.push(cr(-a) - root);
            }
            Some(out)
        }
        _ => None,
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("basis".into(), "dirichlet_sine".into());
    metadata.insert("n_modes".into(), n.to_string());
    metadata.insert("quadrature_order".into(), panels.to_string());
    metadata.insert(
        "quadrature_entry_tol".into(),
        format!("{:e}", super::galerkin::ENTRY_TOL),
    );
    Ok(DampedWave {
        block,
        gram,
        schur,
        reference,
        stiffness,
        damping: a,
        metadata,
    })
}
