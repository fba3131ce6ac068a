use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use serde::Serialize;

use schurlab::blockop::{numerical_range_sample, semigroup_contraction_check, ExcludedSet};
use schurlab::models::{build_model, Model};
use schurlab::verify::{
    block_spectrum, equivalence_check_with, identity_audit, pseudospectrum, refinement_study, EquivalenceOptions,
    IdentityAudit, PseudoTarget, RefinementTable, Verdict, Window,
};
use schurlab::{MethodTag, SpectralReport, C64};

use crate::config::{Command, RunConfig, Tolerances};

/// Numerical-range samples drawn by `semigroup`.
pub const RANGE_SAMPLES: usize = 10_000;
pub const SEMIGROUP_TIMES: [f64; 3] = [0.1, 1.0, 10.0];
pub const CONTOUR_NODES: usize = 256;
pub const CONTOUR_MOMENTS: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct SemigroupNormRow {
    pub t: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemigroupCheck {
    pub samples: usize,
    pub max_range_re: f64,
    pub range_tol: f64,
    pub norms: Vec<SemigroupNormRow>,
    pub contraction_tol: f64,
}

/// Everything a command produces; serialized as `report.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub model_tag: &'static str,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    /// Present for commands that decide PASS/FAIL.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub summary: BTreeMap<String, String>,
    pub reports: Vec<SpectralReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentityAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<SemigroupCheck>,
}

impl RunReport {
    fn new(cfg: &RunConfig, model: &Model<f64>, tolerances: Tolerances) -> Self {
        Self {
            command: cfg.command.as_str(),
            model_tag: model.tag(),
            config: cfg.clone(),
            tolerances,
            verdict: None,
            summary: BTreeMap::new(),
            reports: Vec::new(),
            identities: None,
            refinement: None,
            semigroup: None,
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.insert(key.into(), value.to_string());
    }
}

fn require<'a, T>(field: &'a Option<T>, name: &str, cfg: &RunConfig) -> Result<&'a T> {
    field
        .as_ref()
        .ok_or_else(|| anyhow!("`{}` needs a `{name}` entry in the config", cfg.command.as_str()))
}

fn need_block<'a>(model: &'a Model<f64>, cfg: &RunConfig) -> Result<&'a schurlab::blockop::BlockOperator<f64>> {
    model.block().ok_or_else(|| {
        anyhow!(
            "`{}` needs a block model; `{}` has none",
            cfg.command.as_str(),
            model.tag()
        )
    })
}

fn report_from(tag: &str, method: MethodTag, n: usize, values: &[(C64, f64)]) -> SpectralReport {
    let mut r = SpectralReport::new(tag, method, n);
    for (z, res) in values {
        r.push(*z, *res);
    }
    r
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let tol = Tolerances::resolve(cfg)?;
    let model = build_model::<f64>(&cfg.model)?;
    let n = cfg.model.size();
    let tag = model.tag();
    let mut out = RunReport::new(cfg, &model, tol.clone());
    let opts = EquivalenceOptions {
        n_nodes: CONTOUR_NODES,
        n_moments: CONTOUR_MOMENTS,
        residual_tol: tol.residual,
        rank_tol: tol.rank,
        seed: cfg.seed,
    };

    match cfg.command {
        Command::Spectrum => {
            let window = cfg.window.as_ref();
            match &model {
                Model::ConstCoeff(cc) => {
                    let mut pts = Vec::new();
                    for &xi in &cc.xi {
                        let (p, m) = cc.eigencurves(xi);
                        let sym = cc.symbol(xi);
                        for z in [p, m] {
                            if window.is_none_or(|w| w.contains(z)) {
                                let s = sym.shifted(z);
                                let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
                                pts.push((z, det.norm()));
                            }
                        }
                    }
                    out.reports.push(report_from(tag, MethodTag::Symbol, n, &pts));
                }
                _ => {
                    let block = block_spectrum(need_block(&model, cfg)?, window, &ExcludedSet::empty())?;
                    let mut r = report_from(tag, MethodTag::BlockEig, n, &block);
                    r.metadata = model.metadata();
                    out.reports.push(r);
                    if let Some(reference) = model.reference() {
                        let kept: Vec<(C64, f64)> = reference
                            .iter()
                            .filter(|z| window.is_none_or(|w| w.contains(**z)))
                            .map(|z| (*z, 0.0))
                            .collect();
                        let mut r = report_from(tag, MethodTag::Reference, n, &kept);
                        r.sort();
                        out.reports.push(r);
                    }
                }
            }
            out.note("eigenvalues", out.reports[0].eigenpairs.len());
        }
        Command::SchurNep | Command::Compare => {
            let window: &Window = require(&cfg.window, "window", cfg)?;
            let eq = equivalence_check_with::<f64>(&cfg.model, window, tol.compare, &opts)?;
            out.note("nep_roots", eq.report_nep.eigenpairs.len());
            if cfg.command == Command::Compare {
                out.note("block_eigenvalues", eq.report_block.eigenpairs.len());
                out.note("block_to_nep", format!("{:e}", eq.block_to_nep));
                out.note("nep_to_block", format!("{:e}", eq.nep_to_block));
                out.note("matching_max", format!("{:e}", eq.matching_max));
                out.verdict = Some(eq.verdict);
                out.reports.push(eq.report_block);
            }
            out.reports.push(eq.report_nep);
        }
        Command::Pseudospectrum => {
            let grid = require(&cfg.grid, "grid", cfg)?;
            let r = match &model {
                Model::KleinGordon(kg) => pseudospectrum(PseudoTarget::Family(&kg.t_family), None, grid, tag)?,
                Model::ConstCoeff(_) => bail!("`pseudospectrum` needs a block model; `const_coeff` has none"),
                _ => {
                    let m = need_block(&model, cfg)?.assemble();
                    pseudospectrum(PseudoTarget::Matrix(&m), model.gram(), grid, tag)?
                }
            };
            let g = r.grid_data.as_ref().expect("pseudospectrum fills the grid");
            let min = g
                .values
                .iter()
                .flatten()
                .copied()
                .filter(|v| !v.is_nan())
                .fold(f64::INFINITY, f64::min);
            out.note("sigma_min_over_grid", format!("{min:e}"));
            out.reports.push(r);
        }
        Command::VerifyIdentities => {
            let audit = identity_audit(need_block(&model, cfg)?, cfg.seed, tol.identity, tol.logdet)?;
            out.note("points", audit.rows.len());
            out.verdict = Some(audit.verdict);
            out.identities = Some(audit);
        }
        Command::Semigroup => {
            let (gen, gram) = model.generator()?.ok_or_else(|| {
                anyhow!("`semigroup` needs damped_wave or matrix_de; `{tag}` has no contraction semigroup")
            })?;
            let range = numerical_range_sample(&gen, &gram, RANGE_SAMPLES, cfg.seed)?;
            let max_range_re = range.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let norms: Vec<SemigroupNormRow> = semigroup_contraction_check(&gen, &gram, &SEMIGROUP_TIMES)?
                .into_iter()
                .map(|s| SemigroupNormRow { t: s.t, norm: s.norm })
                .collect();
            let max_norm = norms.iter().map(|s| s.norm).fold(0.0, f64::max);
            let ok = max_range_re <= tol.range && max_norm <= 1.0 + tol.contraction;
            out.note("max_range_re", format!("{max_range_re:e}"));
            out.note("max_norm", format!("{max_norm:e}"));
            out.verdict = Some(Verdict::from_bool(ok));
            out.semigroup = Some(SemigroupCheck {
                samples: RANGE_SAMPLES,
                max_range_re,
                range_tol: tol.range,
                norms,
                contraction_tol: tol.contraction,
            });
        }
        Command::Refine => {
            let spec = require(&cfg.refine, "refine", cfg)?;
            let table = refinement_study::<f64>(&cfg.model, &spec.sizes, &spec.observable)?;
            out.note("monotone", table.monotone);
            out.note("flags", table.flags.len());
            out.refinement = Some(table);
        }
    }
    Ok(out)
}
