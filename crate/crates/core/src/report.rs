use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    BlockEig,
    SchurNep,
    Symbol,
    Reference,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::BlockEig => "block_eig",
            MethodTag::SchurNep => "schur_nep",
            MethodTag::Symbol => "symbol",
            MethodTag::Reference => "reference",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eigenpair {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

/// `values[i][j] = sigma_min(M - (re[i] + i im[j]))`; NaN marks excluded cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridData {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralReport {
    pub model_tag: String,
    pub method_tag: MethodTag,
    pub n: usize,
    pub eigenpairs: Vec<Eigenpair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_data: Option<GridData>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl SpectralReport {
    pub fn new(model_tag: impl Into<String>, method_tag: MethodTag, n: usize) -> Self {
        Self {
            model_tag: model_tag.into(),
            method_tag,
            n,
            eigenpairs: Vec::new(),
            grid_data: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn push<T: Real>(&mut self, lambda: C<T>, residual: T) {
        self.eigenpairs.push(Eigenpair {
            re: lambda.re.to_f64_lossy(),
            im: lambda.im.to_f64_lossy(),
            residual: residual.to_f64_lossy(),
        });
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn eigenvalues(&self) -> Vec<C<f64>> {
        self.eigenpairs.iter().map(|p| C::new(p.re, p.im)).collect()
    }

    /// Orders eigenpairs by real part, then imaginary part.
    pub fn sort(&mut self) {
        self.eigenpairs
            .sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    }
}
