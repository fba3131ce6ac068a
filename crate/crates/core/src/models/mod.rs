//! Discretized model problems as block operators and operator families.

pub mod coeff;
pub mod const_coeff;
pub mod damped_wave;
mod galerkin;
pub mod klein_gordon;
pub mod matrix_de;
pub mod quadrature;

use serde::{Deserialize, Serialize};

pub use coeff::{CoefficientKind, CoefficientSpec, Scale};
pub use const_coeff::{build_const_coeff, ConstCoeff, ConstCoeffSpec};
pub use damped_wave::{build_damped_wave, DampedWave, DampedWaveSpec};
pub use galerkin::ENTRY_TOL;
pub use klein_gordon::{build_klein_gordon, KeptSpectrum, KleinGordon, KleinGordonSpec};
pub use matrix_de::{build_matrix_de, MatrixDe, MatrixDeSpec};

use std::collections::BTreeMap;

use crate::blockop::{BlockOperator, GramPair, OperatorFamily};
use crate::error::Result;
use crate::scalar::{Real, C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    DampedWave(DampedWaveSpec),
    MatrixDe(MatrixDeSpec),
    KleinGordon(KleinGordonSpec),
    ConstCoeff(ConstCoeffSpec),
}

impl ModelSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelSpec::DampedWave(_) => "damped_wave",
            ModelSpec::MatrixDe(_) => "matrix_de",
            ModelSpec::KleinGordon(_) => "klein_gordon",
            ModelSpec::ConstCoeff(_) => "const_coeff",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::DampedWave(s) => s.validate(),
            ModelSpec::MatrixDe(s) => s.validate(),
            ModelSpec::KleinGordon(s) => s.validate(),
            ModelSpec::ConstCoeff(s) => s.validate(),
        }
    }

    /// The discretization size: modes, Hermite functions, or symbol samples.
    pub fn size(&self) -> usize {
        match self {
            ModelSpec::DampedWave(s) => s.n_modes,
            ModelSpec::MatrixDe(s) => s.n_modes,
            ModelSpec::KleinGordon(s) => s.n_hermite,
            ModelSpec::ConstCoeff(s) => s.n_xi,
        }
    }

    pub fn with_size(&self, n: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::DampedWave(s) => s.n_modes = n,
            ModelSpec::MatrixDe(s) => s.n_modes = n,
            ModelSpec::KleinGordon(s) => s.n_hermite = n,
            ModelSpec::ConstCoeff(s) => s.n_xi = n,
        }
        out
    }
}

/// A built model of any kind.
#[derive(Clone, Debug)]
pub enum Model<T: Real> {
    DampedWave(DampedWave<T>),
    MatrixDe(MatrixDe<T>),
    KleinGordon(KleinGordon<T>),
    ConstCoeff(ConstCoeff<T>),
}

pub fn build_model<T: Real>(spec: &ModelSpec) -> Result<Model<T>> {
    Ok(match spec {
        ModelSpec::DampedWave(s) => Model::DampedWave(build_damped_wave(s)?),
        ModelSpec::MatrixDe(s) => Model::MatrixDe(build_matrix_de(s)?),
        ModelSpec::KleinGordon(s) => Model::KleinGordon(build_klein_gordon(s)?),
        ModelSpec::ConstCoeff(s) => Model::ConstCoeff(build_const_coeff(s)?),
    })
}

impl<T: Real> Model<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::DampedWave(_) => "damped_wave",
            Model::MatrixDe(_) => "matrix_de",
            Model::KleinGordon(_) => "klein_gordon",
            Model::ConstCoeff(_) => "const_coeff",
        }
    }

    /// The block operator; `None` for the symbol-only model.
    pub fn block(&self) -> Option<&BlockOperator<T>> {
        match self {
            Model::DampedWave(m) => Some(&m.block),
            Model::MatrixDe(m) => Some(&m.block),
            Model::KleinGordon(m) => Some(&m.block),
            Model::ConstCoeff(_) => None,
        }
    }

    /// The Schur complement family whose roots are compared with the block spectrum.
    pub fn schur(&self) -> Option<&OperatorFamily<T>> {
        match self {
            Model::DampedWave(m) => Some(&m.schur),
            Model::MatrixDe(m) => Some(&m.schur),
            Model::KleinGordon(m) => Some(&m.schur),
            Model::ConstCoeff(_) => None,
        }
    }

    pub fn gram(&self) -> Option<&GramPair<T>> {
        match self {
            Model::DampedWave(m) => Some(&m.gram),
            Model::MatrixDe(m) => Some(&m.gram),
            Model::KleinGordon(m) => Some(&m.gram),
            Model::ConstCoeff(_) => None,
        }
    }

    /// Closed-form eigenvalues when the coefficients are constant.
    pub fn reference(&self) -> Option<&[C<T>]> {
        match self {
            Model::DampedWave(m) => m.reference.as_deref(),
            Model::MatrixDe(m) => m.reference.as_deref(),
            _ => None,
        }
    }

    /// Generator `G` of the evolution `x' = G x` with the Gram pair of its energy
    /// norm: the damped-wave block itself, or `-A` for the matrix differential
    /// operator. `None` where no contraction semigroup is modelled.
    pub fn generator(&self) -> Result<Option<(BlockOperator<T>, GramPair<T>)>> {
        Ok(match self {
            Model::DampedWave(m) => Some((m.block.clone(), m.gram.clone())),
            Model::MatrixDe(m) => {
                let b = &m.block;
                Some((BlockOperator::new(-&b.a, -&b.b, -&b.c, -&b.d)?, m.gram.clone()))
            }
            _ => None,
        })
    }

    pub fn metadata(&self) -> BTreeMap<String, String> {
        match self {
            Model::DampedWave(m) => m.metadata.clone(),
            Model::MatrixDe(m) => m.metadata.clone(),
            Model::KleinGordon(m) => m.metadata.clone(),
            Model::ConstCoeff(m) => {
                let mut out = BTreeMap::new();
                out.insert("n_xi".into(), m.xi.len().to_string());
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_json_round_trip() {
        let js = r#"{"model": "damped_wave", "length": 3.0, "n_modes": 8,
                     "damping": {"kind": "constant", "scale": 1.0}}"#;
        let m: ModelSpec = serde_json::from_str(js).unwrap();
        assert_eq!(m.tag(), "damped_wave");
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"model": "damped_wave", "length": 3.0, "n_modes": 8, "extra": 1,
                      "damping": {"kind": "constant"}}"#;
        assert!(serde_json::from_str::<ModelSpec>(bad).is_err());
        let kg: ModelSpec = serde_json::from_str(r#"{"model": "klein_gordon", "mass": 1.0, "n_hermite": 32}"#).unwrap();
        assert_eq!(kg.with_size(64).size(), 64);
    }
}
