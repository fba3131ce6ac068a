use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use schurlab::models::ModelSpec;
use schurlab::verify::{GridSpec, Observable, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    SchurNep,
    Compare,
    Pseudospectrum,
    VerifyIdentities,
    Semigroup,
    Refine,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::SchurNep => "schur-nep",
            Command::Compare => "compare",
            Command::Pseudospectrum => "pseudospectrum",
            Command::VerifyIdentities => "verify-identities",
            Command::Semigroup => "semigroup",
            Command::Refine => "refine",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSpec {
    pub sizes: Vec<usize>,
    pub observable: Observable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub command: Command,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    /// Spectral window for `spectrum` (optional), `schur-nep` and `compare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    /// Sampling grid for `pseudospectrum`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineSpec>,
}

/// `RunConfig` with the model left raw, so model errors can carry their field path.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Value,
    command: Command,
    output_dir: PathBuf,
    seed: u64,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    window: Option<Window>,
    #[serde(default)]
    grid: Option<GridSpec>,
    #[serde(default)]
    refine: Option<RefineSpec>,
}

const MODEL_TAGS: &str = "damped_wave, matrix_de, klein_gordon, const_coeff";

fn model_field<S: DeserializeOwned>(body: Value) -> Result<S> {
    serde_path_to_error::deserialize(body).map_err(|e| anyhow!("model.{}: {}", e.path(), e.inner()))
}

fn parse_model(value: Value) -> Result<ModelSpec> {
    let Value::Object(mut body) = value else {
        bail!("model: expected an object with a `model` tag");
    };
    let tag = match body.remove("model") {
        Some(Value::String(s)) => s,
        Some(other) => bail!("model.model: expected a string tag, got {other}"),
        None => bail!("model.model: missing tag; expected one of {MODEL_TAGS}"),
    };
    let body = Value::Object(body);
    let spec = match tag.as_str() {
        "damped_wave" => ModelSpec::DampedWave(model_field(body)?),
        "matrix_de" => ModelSpec::MatrixDe(model_field(body)?),
        "klein_gordon" => ModelSpec::KleinGordon(model_field(body)?),
        "const_coeff" => ModelSpec::ConstCoeff(model_field(body)?),
        other => bail!("model.model: unknown model `{other}`; expected one of {MODEL_TAGS}"),
    };
    spec.validate().map_err(|e| anyhow!("model: {e}"))?;
    Ok(spec)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            anyhow!("{}", e.inner())
        } else {
            anyhow!("{path}: {}", e.inner())
        }
    })?;
    let cfg = RunConfig {
        model: parse_model(raw.model)?,
        command: raw.command,
        output_dir: raw.output_dir,
        seed: raw.seed,
        tolerances: raw.tolerances,
        window: raw.window,
        grid: raw.grid,
        refine: raw.refine,
    };
    Tolerances::resolve(&cfg)?;
    if let Some(w) = &cfg.window {
        w.validate().context("window")?;
    }
    if let Some(g) = &cfg.grid {
        g.validate().context("grid")?;
    }
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

/// Tolerances with their defaults; keys outside this set are rejected.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Equivalence distance for `compare`.
    pub compare: f64,
    /// Relative residual for accepting contour roots.
    pub residual: f64,
    /// Relative singular value cut of the contour moments.
    pub rank: f64,
    /// Residual bound of the block identities in `verify-identities`.
    pub identity: f64,
    /// Bound on the determinant split in `verify-identities`.
    pub logdet: f64,
    /// Largest admissible real part of the sampled numerical range in `semigroup`.
    pub range: f64,
    /// Slack above 1 for semigroup norms.
    pub contraction: f64,
}

pub const TOLERANCE_KEYS: [&str; 7] = [
    "compare",
    "residual",
    "rank",
    "identity",
    "logdet",
    "range",
    "contraction",
];

impl Tolerances {
    fn defaults(model: &ModelSpec) -> Self {
        Self {
            compare: 1e-7,
            residual: 1e-8,
            rank: 1e-10,
            identity: 1e-10,
            logdet: 1e-8,
            range: match model {
                ModelSpec::MatrixDe(_) => 1e-10,
                _ => 1e-12,
            },
            contraction: 1e-8,
        }
    }

    pub fn resolve(cfg: &RunConfig) -> Result<Self> {
        let mut t = Self::defaults(&cfg.model);
        for (key, &value) in &cfg.tolerances {
            if !(value > 0.0) || !value.is_finite() {
                bail!("tolerances.{key}: must be positive and finite, got {value}");
            }
            let slot = match key.as_str() {
                "compare" => &mut t.compare,
                "residual" => &mut t.residual,
                "rank" => &mut t.rank,
                "identity" => &mut t.identity,
                "logdet" => &mut t.logdet,
                "range" => &mut t.range,
                "contraction" => &mut t.contraction,
                _ => bail!(
                    "tolerances.{key}: unknown tolerance; expected one of {}",
                    TOLERANCE_KEYS.join(", ")
                ),
            };
            *slot = value;
        }
        Ok(t)
    }
}
