use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockop::{BlockOperator, ExcludedSet, GramPair, OperatorFamily};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Mat};
use crate::scalar::{c, cr, Real, C};

/// Klein–Gordon operator with potential `W(x) = x`, in the Hermite basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleinGordonSpec {
    pub mass: f64,
    pub n_hermite: usize,
    #[serde(default = "default_lambda_list")]
    pub lambda_list: Vec<Complex64>,
}

pub fn default_lambda_list() -> Vec<Complex64> {
    vec![
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.7),
        Complex64::new(0.5, 0.5),
    ]
}

impl KleinGordonSpec {
    pub fn new(mass: f64, n_hermite: usize) -> Self {
        Self {
            mass,
            n_hermite,
            lambda_list: default_lambda_list(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {}", self.mass)));
        }
        if self.n_hermite < 16 {
            return Err(Error::Config(format!(
                "n_hermite must be at least 16, got {}",
                self.n_hermite
            )));
        }
        if self.lambda_list.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("lambda_list entries must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct KleinGordon<T: Real> {
    /// `lambda -> H + m^2 - lambda^2 + 2 i lambda X`.
    pub t_family: OperatorFamily<T>,
    /// `t_family(lambda) / lambda`, excluded `{0}`.
    pub schur: OperatorFamily<T>,
    /// `[[0, I], [H + m^2, 2 i X]]`.
    pub block: BlockOperator<T>,
    /// `G1 = H + m^2`, `G2 = I`.
    pub gram: GramPair<T>,
    pub position: Mat<T>,
    pub lambda_list: Vec<C<T>>,
    pub metadata: BTreeMap<String, String>,
}

/// Eigenvalues of `T(lambda)` split by the truncation policy.
#[derive(Clone, Debug)]
pub struct KeptSpectrum<T> {
    /// The lowest `floor(N/2)` by `|re|`, ascending.
    pub kept: Vec<C<T>>,
    /// The rest, flagged as truncation artefacts.
    pub flagged: Vec<C<T>>,
}

impl<T: Real> KleinGordon<T> {
    pub fn n(&self) -> usize {
        self.t_family.dim()
    }

    pub fn kept_spectrum(&self, lambda: C<T>) -> Result<KeptSpectrum<T>> {
        let mut ev = eigenvalues(&self.t_family.evaluate(lambda)?)?;
        ev.sort_by(|a, b| {
            a.re.abs()
                .partial_cmp(&b.re.abs())
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        let flagged = ev.split_off(self.n() / 2);
        Ok(KeptSpectrum { kept: ev, flagged })
    }
}

pub fn build_klein_gordon<T: Real>(spec: &KleinGordonSpec) -> Result<KleinGordon<T>> {
    spec.validate()?;
    let n = spec.n_hermite;
    let m2 = T::lit(spec.mass * spec.mass);
    let h: Vec<T> = (0..n).map(|k| T::from_usize_lossy(2 * k + 1)).collect();
    let mut x = Mat::zeros(n, n);
    for k in 0..n - 1 {
        let v = cr((T::from_usize_lossy(k + 1) / T::lit(2.0)).sqrt());
        x[(k, k + 1)] = v;
        x[(k + 1, k)] = v;
    }
    let hm: Vec<T> = h.iter().map(|&v| v + m2).collect();
    let hm_mat = Mat::from_real_diag(&hm);

    let (hm_t, x_t) = (hm_mat.clone(), x.clone());
    let t_family = OperatorFamily::new("klein_gordon.T", n, ExcludedSet::empty(), move |lambda: C<T>| {
        let two_i_lambda = c(T::zero(), T::lit(2.0)) * lambda;
        Ok(&hm_t.shifted(lambda * lambda) + &x_t.scale(two_i_lambda))
    });
    let t_inner = t_family.clone();
    let schur = OperatorFamily::new(
        "klein_gordon.S2",
        n,
        ExcludedSet::from_points(vec![cr(T::zero())]),
        move |lambda: C<T>| Ok(t_inner.evaluate(lambda)?.scale(cr(T::one()) / lambda)),
    );
    let block = BlockOperator::new(
        Mat::zeros(n, n),
        Mat::identity(n),
        hm_mat.clone(),
        x.scale(c(T::zero(), T::lit(2.0))),
    )?;
    let gram = GramPair::new(hm_mat, Mat::identity(n))?;
    let lambda_list = spec.lambda_list.iter().map(|z| c(T::lit(z.re), T::lit(z.im))).collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("basis".into(), "hermite_functions".into());
    metadata.insert("n_hermite".into(), n.to_string());
    metadata.insert("kept_eigenvalues".into(), (n / 2).to_string());
    Ok(KleinGordon {
        t_family,
        schur,
        block,
        gram,
        position: x,
        lambda_list,
        metadata,
    })
}
