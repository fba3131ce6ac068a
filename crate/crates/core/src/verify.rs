//! Cross-checks between the block-operator and Schur-complement routes:
//! windowed spectral equivalence, pseudospectra, refinement studies and
//! identity audits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockop::{
    determinant_split, kernel_correspondence, left_approx_inverse, BlockOperator, ExcludedSet, GramPair, OperatorFamily,
};
use crate::error::{Error, Result};
use crate::linalg::{eig, eigenvalues, sigma_min, sigma_min_shifted, vec_norm, Mat};
use crate::models::{build_model, ConstCoeff, Model, ModelSpec};
use crate::nep::{beyn_solve, cluster_radius, merge_clusters, spectral_distance, ContourSpec};
use crate::pseudoinv::{generalized_inverse, penrose_residuals, TolPolicy};
use crate::report::{GridData, MethodTag, SpectralReport};
use crate::scalar::{c, cr, Real, C};

/// Boundary tolerance of the closed-rectangle window filter.
pub const WINDOW_BOUNDARY_TOL: f64 = 1e-12;
pub const DEFAULT_COMPARE_TOL: f64 = 1e-7;

/// Closed rectangle `[re_min, re_max] x [im_min, im_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.re_min, self.re_max, self.im_min, self.im_max];
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Window("window bounds must be finite".into()));
        }
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(Error::Window(format!(
                "window must have positive width and height, got re [{}, {}], im [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        Ok(())
    }

    pub fn contains<T: Real>(&self, z: C<T>) -> bool {
        let (re, im) = (z.re.to_f64_lossy(), z.im.to_f64_lossy());
        let t = WINDOW_BOUNDARY_TOL;
        re >= self.re_min - t && re <= self.re_max + t && im >= self.im_min - t && im <= self.im_max + t
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    /// The smallest-area ellipse through the four corners: semi-axes are the
    /// half-width and half-height times `sqrt 2`.
    pub fn circumscribing_contour<T: Real>(&self) -> ContourSpec<T> {
        let ctr = self.center();
        let s2 = std::f64::consts::SQRT_2;
        ContourSpec::ellipse(
            c(T::lit(ctr.re), T::lit(ctr.im)),
            T::lit(0.5 * (self.re_max - self.re_min) * s2),
            T::lit(0.5 * (self.im_max - self.im_min) * s2),
        )
    }
}

/// A window sampled on `n_re x n_im` points, ends included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    pub fn new(window: Window, n_re: usize, n_im: usize) -> Self {
        Self {
            re_min: window.re_min,
            re_max: window.re_max,
            im_min: window.im_min,
            im_max: window.im_max,
            n_re,
            n_im,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.re_min, self.re_max, self.im_min, self.im_max];
        if v.iter().any(|x| !x.is_finite()) || self.re_min > self.re_max || self.im_min > self.im_max {
            return Err(Error::Window("grid bounds must be finite and ordered".into()));
        }
        if self.n_re == 0 || self.n_im == 0 {
            return Err(Error::Window("grid needs at least one point per axis".into()));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn re_axis(&self) -> Vec<f64> {
        Self::axis(self.re_min, self.re_max, self.n_re)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        Self::axis(self.im_min, self.im_max, self.n_im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

/// Dense eigenvalues of `op` with relative residuals
/// `|(M - lambda) v| / max(1, |M|_F)`.
///
/// Values within [`cluster_radius`] of each other are replaced by their mean.
/// Values outside `window`, or within guard distance of `excluded`, are dropped.
/// Sorted by real part, then imaginary part.
pub fn block_spectrum<T: Real>(
    op: &BlockOperator<T>,
    window: Option<&Window>,
    excluded: &ExcludedSet<T>,
) -> Result<Vec<(C<T>, T)>> {
    matrix_spectrum(&op.assemble(), window, excluded)
}

fn matrix_spectrum<T: Real>(m: &Mat<T>, window: Option<&Window>, excluded: &ExcludedSet<T>) -> Result<Vec<(C<T>, T)>> {
    let (vals, vecs) = eig(m)?;
    let vals = merge_clusters(&vals, cluster_radius(m.norm_one()));
    let scale = m.norm_fro().max(T::one());
    let mut out = Vec::new();
    for (i, &z) in vals.iter().enumerate() {
        if window.is_some_and(|w| !w.contains(z)) || excluded.violation(z).is_some() {
            continue;
        }
        let v = vecs.column(i);
        let r = vec_norm(&m.shifted(z).mat_vec(&v)) / (vec_norm(&v) * scale);
        out.push((z, r));
    }
    sort_spectrum(&mut out);
    Ok(out)
}

fn sort_spectrum<T: Real>(v: &mut [(C<T>, T)]) {
    v.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
}

/// Contour parameters for the NEP route of [`equivalence_check_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceOptions {
    pub n_nodes: usize,
    pub n_moments: usize,
    pub residual_tol: f64,
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            n_nodes: 256,
            n_moments: 2,
            residual_tol: 1e-8,
            rank_tol: 1e-10,
            seed: crate::nep::DEFAULT_PROBE_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Equivalence {
    pub report_block: SpectralReport,
    pub report_nep: SpectralReport,
    /// Largest distance from a block eigenvalue to the nearest NEP root.
    pub block_to_nep: f64,
    /// Largest distance from a NEP root to the nearest block eigenvalue.
    pub nep_to_block: f64,
    /// Largest distance within the one-to-one matching; infinite when the
    /// counts differ.
    pub matching_max: f64,
    pub matching: Vec<(usize, usize)>,
    pub verdict: Verdict,
}

impl Equivalence {
    pub fn distance(&self) -> f64 {
        self.block_to_nep.max(self.nep_to_block)
    }
}

pub fn equivalence_check<T: Real>(model: &ModelSpec, window: &Window, tol: f64) -> Result<Equivalence> {
    equivalence_check_with::<T>(model, window, tol, &EquivalenceOptions::default())
}

/// Block eigenvalues in `window` against the Schur family's roots from a
/// contour circumscribing it. PASS iff both directed distances and the
/// one-to-one matching stay within `tol`.
pub fn equivalence_check_with<T: Real>(
    model: &ModelSpec,
    window: &Window,
    tol: f64,
    opts: &EquivalenceOptions,
) -> Result<Equivalence> {
    window.validate()?;
    let built = build_model::<T>(model)?;
    let n = model.size();
    let contour = window
        .circumscribing_contour::<T>()
        .with_nodes(opts.n_nodes)
        .with_moments(opts.n_moments)
        .with_rank_tol(T::lit(opts.rank_tol))
        .with_seed(opts.seed);
    let (mut block, mut nep, block_tag) = match &built {
        Model::ConstCoeff(cc) => {
            let (b, r) = const_coeff_routes(cc, window, &contour, opts)?;
            (b, r, MethodTag::Symbol)
        }
        _ => {
            let family = built.schur().expect("block models carry a Schur family");
            check_contour_guard(family, &contour, window)?;
            let block = block_spectrum(built.block().unwrap(), Some(window), family.excluded())?;
            let res = beyn_solve(family, &contour.with_probes(family.dim()), T::lit(opts.residual_tol))?;
            let mut nep: Vec<(C<T>, T)> = res
                .eigenvalues
                .iter()
                .zip(&res.residuals)
                .filter(|(z, _)| window.contains(**z))
                .map(|(z, r)| (*z, *r))
                .collect();
            sort_spectrum(&mut nep);
            let mut meta = BTreeMap::new();
            meta.insert("moment_rank".into(), res.moment_rank.to_string());
            meta.insert("certified".into(), res.certified.to_string());
            meta.insert("rejected".into(), res.rejected.len().to_string());
            if !res.warnings.is_empty() {
                meta.insert("warnings".into(), res.warnings.join("; "));
            }
            ((block, BTreeMap::new()), (nep, meta), MethodTag::BlockEig)
        }
    };

    let to_c64 = |v: &[(C<T>, T)]| -> Vec<Complex64> {
        v.iter()
            .map(|(z, _)| Complex64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
            .collect()
    };
    let (bz, nz) = (to_c64(&block.0), to_c64(&nep.0));
    let directed = |x: &[Complex64], y: &[Complex64]| {
        if x.is_empty() {
            return 0.0;
        }
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let block_to_nep = directed(&bz, &nz);
    let nep_to_block = directed(&nz, &bz);
    let dist = spectral_distance(&bz, &nz);
    let matching_max = if bz.len() == nz.len() {
        dist.matching_max
    } else {
        f64::INFINITY
    };
    let verdict = Verdict::from_bool(block_to_nep <= tol && nep_to_block <= tol && matching_max <= tol);

    let tag = built.tag();
    let mut common = built.metadata();
    common.insert("window".into(), format!("{window:?}"));
    common.insert("compare_tol".into(), format!("{tol:e}"));
    common.insert("window_boundary_tol".into(), format!("{WINDOW_BOUNDARY_TOL:e}"));
    let mut report_block = SpectralReport::new(tag, block_tag, n);
    report_block.metadata = common.clone();
    report_block.metadata.append(&mut block.1);
    for (z, r) in &block.0 {
        report_block.push(*z, *r);
    }
    let mut report_nep = SpectralReport::new(tag, MethodTag::SchurNep, n);
    report_nep.metadata = common;
    report_nep.metadata.append(&mut nep.1);
    report_nep
        .metadata
        .insert("contour_nodes".into(), opts.n_nodes.to_string());
    report_nep.metadata.insert("moments".into(), opts.n_moments.to_string());
    report_nep
        .metadata
        .insert("residual_tol".into(), format!("{:e}", opts.residual_tol));
    report_nep
        .metadata
        .insert("rank_tol".into(), format!("{:e}", opts.rank_tol));
    report_nep.metadata.insert("probe_seed".into(), opts.seed.to_string());
    for (z, r) in &nep.0 {
        report_nep.push(*z, *r);
    }
    Ok(Equivalence {
        report_block,
        report_nep,
        block_to_nep,
        nep_to_block,
        matching_max,
        matching: dist.matching,
        verdict,
    })
}

fn check_contour_guard<T: Real>(family: &OperatorFamily<T>, contour: &ContourSpec<T>, window: &Window) -> Result<()> {
    for (z, _) in contour.nodes() {
        if let Some(mu) = family.excluded().violation(z) {
            return Err(Error::Window(format!(
                "the contour circumscribing {window:?} passes within guard distance of excluded point {mu} of `{}`; shrink or move the window",
                family.label()
            )));
        }
    }
    Ok(())
}

type Route<T> = (Vec<(C<T>, T)>, BTreeMap<String, String>);

/// Symbol eigencurves per sample against scalar contour roots of `s_lambda(xi)`.
fn const_coeff_routes<T: Real>(
    cc: &ConstCoeff<T>,
    window: &Window,
    contour: &ContourSpec<T>,
    opts: &EquivalenceOptions,
) -> Result<(Route<T>, Route<T>)> {
    let per_xi: Vec<(Vec<(C<T>, T)>, Vec<(C<T>, T)>)> = cc
        .xi
        .par_iter()
        .map(|&xi| {
            let sym = matrix_spectrum(&cc.symbol(xi), Some(window), &ExcludedSet::empty())?;
            let family = cc.family_at(xi);
            check_contour_guard(&family, contour, window)?;
            let res = beyn_solve(&family, contour, T::lit(opts.residual_tol))?;
            let roots = res
                .eigenvalues
                .iter()
                .zip(&res.residuals)
                .filter(|(z, _)| window.contains(**z))
                .map(|(z, r)| (*z, *r))
                .collect();
            Ok((sym, roots))
        })
        .collect::<Result<_>>()?;
    let mut sym = Vec::new();
    let mut roots = Vec::new();
    for (s, r) in per_xi {
        sym.extend(s);
        roots.extend(r);
    }
    sort_spectrum(&mut sym);
    sort_spectrum(&mut roots);
    let mut meta = BTreeMap::new();
    meta.insert("xi_samples".into(), cc.xi.len().to_string());
    Ok(((sym, BTreeMap::new()), (roots, meta)))
}

/// What [`pseudospectrum`] samples.
#[derive(Clone, Copy)]
pub enum PseudoTarget<'a, T: Real> {
    Matrix(&'a Mat<T>),
    Family(&'a OperatorFamily<T>),
}

/// `sigma_min(M - lambda)` or `sigma_min(F(lambda))` on the grid, in the
/// `G`-norm when a Gram pair is given. Cells in the excluded set hold NaN.
pub fn pseudospectrum<T: Real>(
    target: PseudoTarget<'_, T>,
    gram: Option<&GramPair<T>>,
    grid: &GridSpec,
    model_tag: &str,
) -> Result<SpectralReport> {
    grid.validate()?;
    let (re, im) = (grid.re_axis(), grid.im_axis());
    let weighted = match (target, gram) {
        (PseudoTarget::Matrix(m), Some(g)) => Some(g.similarity(m)?),
        _ => None,
    };
    let n = match target {
        PseudoTarget::Matrix(m) => m.nrows(),
        PseudoTarget::Family(f) => f.dim(),
    };
    let cells: Vec<(usize, usize)> = (0..re.len()).flat_map(|i| (0..im.len()).map(move |j| (i, j))).collect();
    let vals: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let z = c(T::lit(re[i]), T::lit(im[j]));
            let v = match target {
                PseudoTarget::Matrix(m) => sigma_min_shifted(weighted.as_ref().unwrap_or(m), z)?,
                PseudoTarget::Family(f) => {
                    if f.excluded().violation(z).is_some() {
                        return Ok(None);
                    }
                    let fz = f.evaluate(z)?;
                    match gram {
                        Some(g) => sigma_min(&g.similarity(&fz)?)?,
                        None => sigma_min(&fz)?,
                    }
                }
            };
            Ok(Some(v.to_f64_lossy()))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![vec![0.0; im.len()]; re.len()];
    let mut excluded_cells = 0usize;
    for (&(i, j), v) in cells.iter().zip(vals) {
        values[i][j] = v.unwrap_or_else(|| {
            excluded_cells += 1;
            f64::NAN
        });
    }
    let mut report = SpectralReport::new(model_tag, MethodTag::BlockEig, n)
        .with_meta("grid", format!("{grid:?}"))
        .with_meta("weighted", gram.is_some())
        .with_meta("excluded_cells", excluded_cells);
    if let PseudoTarget::Family(f) = target {
        report.method_tag = MethodTag::SchurNep;
        report = report.with_meta("family", f.label());
    }
    report.grid_data = Some(GridData { re, im, values });
    Ok(report)
}

/// Quantity tracked by [`refinement_study`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `k`-th eigenvalue (1-based). For block models: of the block, upper
    /// half-plane only, ordered by modulus. For Klein–Gordon: `k`-th kept
    /// eigenvalue of `T(lambda)`, `lambda` defaulting to the first of the
    /// model's list.
    EigK {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<Complex64>,
    },
    /// Smallest singular value of `M - lambda` (block models), of `T(lambda)`
    /// (Klein–Gordon), or `min_xi |s_lambda(xi)|` (symbol model).
    SigmaMinAt { lambda: Complex64 },
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::EigK { k, lambda: None } => format!("eig_{k}"),
            Observable::EigK { k, lambda: Some(l) } => format!("eig_{k} at lambda = {l}"),
            Observable::SigmaMinAt { lambda } => format!("sigma_min at lambda = {lambda}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    /// `|v(N_i) - v(N_{i-1})|`.
    pub diff: Option<f64>,
    /// `log(diff_{i-1} / diff_i) / log(N_i / N_{i-1})`.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementTable {
    pub model_tag: String,
    pub observable: String,
    pub rows: Vec<RefinementRow>,
    /// Consecutive differences never grow above the noise floor.
    pub monotone: bool,
    pub flags: Vec<String>,
}

/// Differences below `NOISE_FLOOR * (1 + |v|)` count as converged.
const NOISE_FLOOR: f64 = 1e-13;

pub fn refinement_study<T: Real>(
    model: &ModelSpec,
    sizes: &[usize],
    observable: &Observable,
) -> Result<RefinementTable> {
    if sizes.len() < 3 {
        return Err(Error::Input(format!("need at least 3 sizes, got {}", sizes.len())));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input(format!(
            "sizes must be strictly increasing, got {sizes:?}"
        )));
    }
    let values: Vec<Complex64> = sizes
        .par_iter()
        .map(|&n| {
            let m = build_model::<T>(&model.with_size(n))?;
            let v = observe(&m, observable)?;
            Ok(Complex64::new(v.re.to_f64_lossy(), v.im.to_f64_lossy()))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(sizes.len());
    let mut flags = Vec::new();
    let mut monotone = true;
    for (i, (&n, v)) in sizes.iter().zip(&values).enumerate() {
        let diff = (i > 0).then(|| (v - values[i - 1]).norm());
        let order = match (i > 1, diff) {
            (true, Some(d)) => {
                let prev = (values[i - 1] - values[i - 2]).norm();
                let floor = NOISE_FLOOR * (1.0 + v.norm());
                if d > floor && prev > floor {
                    Some((prev / d).ln() / (n as f64 / sizes[i - 1] as f64).ln())
                } else {
                    None
                }
            }
            _ => None,
        };
        if i > 1 {
            let d = diff.unwrap();
            let prev = (values[i - 1] - values[i - 2]).norm();
            if d > prev && d > NOISE_FLOOR * (1.0 + v.norm()) {
                monotone = false;
                flags.push(format!("difference grew from {prev:e} to {d:e} at N = {n}"));
            }
        }
        rows.push(RefinementRow {
            n,
            re: v.re,
            im: v.im,
            diff,
            order,
        });
    }
    Ok(RefinementTable {
        model_tag: model.tag().into(),
        observable: observable.label(),
        rows,
        monotone,
        flags,
    })
}

fn observe<T: Real>(model: &Model<T>, obs: &Observable) -> Result<C<T>> {
    let lam = |z: Complex64| c(T::lit(z.re), T::lit(z.im));
    match (model, obs) {
        (Model::KleinGordon(kg), Observable::EigK { k, lambda }) => {
            let at = lambda
                .map(lam)
                .or_else(|| kg.lambda_list.first().copied())
                .unwrap_or(cr(T::zero()));
            let kept = kg.kept_spectrum(at)?.kept;
            nth(&kept, *k)
        }
        (Model::KleinGordon(kg), Observable::SigmaMinAt { lambda }) => {
            Ok(cr(sigma_min(&kg.t_family.evaluate(lam(*lambda))?)?))
        }
        (Model::ConstCoeff(cc), Observable::SigmaMinAt { lambda }) => {
            let mut best = T::infinity();
            for &xi in &cc.xi {
                best = best.min(cc.schur_symbol(lam(*lambda), xi)?.norm());
            }
            Ok(cr(best))
        }
        (Model::ConstCoeff(_), Observable::EigK { .. }) => {
            Err(Error::Config("eig_k is not defined for the symbol model".into()))
        }
        (_, Observable::EigK { lambda: Some(_), .. }) => {
            Err(Error::Config("eig_k takes lambda only for klein_gordon".into()))
        }
        (m, Observable::EigK { k, lambda: None }) => {
            let a = m.block().unwrap().assemble();
            let vals = eigenvalues(&a)?;
            let mut vals = merge_clusters(&vals, cluster_radius(a.norm_one()));
            let floor = T::lit(1e-8);
            vals.retain(|z| z.im >= -floor * (T::one() + z.norm()));
            vals.sort_by(|x, y| {
                x.norm()
                    .partial_cmp(&y.norm())
                    .unwrap()
                    .then(x.re.partial_cmp(&y.re).unwrap())
            });
            nth(&vals, *k)
        }
        (m, Observable::SigmaMinAt { lambda }) => {
            Ok(cr(sigma_min_shifted(&m.block().unwrap().assemble(), lam(*lambda))?))
        }
    }
}

fn nth<T: Real>(v: &[C<T>], k: usize) -> Result<C<T>> {
    if k == 0 || k > v.len() {
        return Err(Error::Config(format!("eigenvalue index {k} outside 1..={}", v.len())));
    }
    Ok(v[k - 1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityRow {
    pub re: f64,
    pub im: f64,
    /// Largest relative Penrose residual of the pivot block's generalized inverse.
    pub penrose: f64,
    pub left_inverse: f64,
    pub rank_k: usize,
    pub expected_rank_k: usize,
    pub ker_block: usize,
    pub ker_schur: usize,
    pub kernel_map: f64,
    /// Relative determinant split residual; `None` where the block shift is singular.
    pub logdet: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityAudit {
    pub rows: Vec<IdentityRow>,
    pub tol: f64,
    pub logdet_tol: f64,
    pub verdict: Verdict,
}

/// Number of random shifts and of block eigenvalues audited.
const AUDIT_RANDOM: usize = 4;
const AUDIT_EIGEN: usize = 4;

/// Checks the block identities (Penrose conditions, left approximate inverse,
/// kernel correspondence, determinant split at regular shifts) at seeded random
/// shifts and at the smallest block eigenvalues away from `eig(D)`.
pub fn identity_audit<T: Real>(op: &BlockOperator<T>, seed: u64, tol: f64, logdet_tol: f64) -> Result<IdentityAudit> {
    let a = op.assemble();
    let d_eigs = ExcludedSet::from_points(eigenvalues(&op.d)?);
    let mut spectrum = eigenvalues(&a)?;
    spectrum.sort_by(|x, y| {
        x.norm()
            .partial_cmp(&y.norm())
            .unwrap()
            .then(x.re.partial_cmp(&y.re).unwrap())
    });
    let radius = T::one().max(spectrum.first().map(|z| z.norm()).unwrap_or(T::one()) * T::lit(2.0));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambdas = Vec::new();
    while lambdas.len() < AUDIT_RANDOM {
        let z = c(
            T::lit(rng.gen_range(-1.0..1.0)) * radius,
            T::lit(rng.gen_range(-1.0..1.0)) * radius,
        );
        if d_eigs.distance(z) > T::lit(1e-3) * radius {
            lambdas.push(z);
        }
    }
    let min_gap = T::lit(1e-6) * (T::one() + a.norm_fro());
    lambdas.extend(
        spectrum
            .iter()
            .filter(|z| d_eigs.distance(**z) > min_gap)
            .take(AUDIT_EIGEN)
            .copied(),
    );

    let rows: Vec<IdentityRow> = lambdas
        .par_iter()
        .map(|&z| {
            let pivot = op.d.shifted(z);
            let bundle = generalized_inverse(&pivot, TolPolicy::Default)?;
            let pr = penrose_residuals(&pivot, &bundle.pinv);
            let penrose = pr.txt.max(pr.xtx).max(pr.tx_hermitian).max(pr.xt_hermitian);
            let li = left_approx_inverse(op, z, TolPolicy::Default)?;
            let kc = kernel_correspondence(op, z, T::lit(1e-8))?;
            let ds = determinant_split(op, z)?;
            Ok(IdentityRow {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
                penrose: penrose.to_f64_lossy(),
                left_inverse: li.identity_residual.to_f64_lossy(),
                rank_k: li.rank_k,
                expected_rank_k: li.ker_schur_dim + li.ker_pivot_dim,
                ker_block: kc.ker_block_dim,
                ker_schur: kc.ker_schur_dim,
                kernel_map: kc.basis_map_residual.to_f64_lossy(),
                logdet: (kc.ker_block_dim == 0).then(|| ds.residual.to_f64_lossy()),
            })
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| {
        r.penrose <= tol
            && r.left_inverse <= tol
            && r.rank_k == r.expected_rank_k
            && r.ker_block == r.ker_schur
            && r.kernel_map <= tol
            && r.logdet.is_none_or(|v| v <= logdet_tol)
    });
    Ok(IdentityAudit {
        rows,
        tol,
        logdet_tol,
        verdict: Verdict::from_bool(ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CoefficientSpec, DampedWaveSpec};
    use crate::scalar::cf;
    use std::f64::consts::PI;

    #[test]
    fn window_filter_and_contour() {
        let w = Window::new(-2.0, 0.0, -1.0, 1.0);
        assert!(w.contains(cf::<f64>(0.0 + 5e-13, 1.0)));
        assert!(!w.contains(cf::<f64>(1e-11, 0.0)));
        let ct = w.circumscribing_contour::<f64>();
        // Corners lie on the ellipse.
        let u = 1.0 / ct.rx;
        let v = 1.0 / ct.ry;
        assert!((u * u + v * v - 1.0).abs() < 1e-15);
        assert!(Window::new(0.0, 0.0, 0.0, 1.0).validate().is_err());
    }

    #[test]
    fn damped_wave_routes_agree_on_small_window() {
        let spec = ModelSpec::DampedWave(DampedWaveSpec::new(
            PI,
            12,
            CoefficientSpec::constant(1.0),
            CoefficientSpec::constant(0.0),
        ));
        let eq = equivalence_check::<f64>(&spec, &Window::new(-2.0, -0.5, 0.5, 6.0), 1e-8).unwrap();
        assert_eq!(eq.report_block.eigenpairs.len(), 5);
        assert_eq!(eq.report_nep.eigenpairs.len(), 5);
        assert!(eq.verdict.passed(), "distance {}", eq.distance());
    }

    #[test]
    fn window_error_when_contour_hits_excluded_point() {
        let spec = ModelSpec::DampedWave(DampedWaveSpec::new(
            PI,
            8,
            CoefficientSpec::constant(1.0),
            CoefficientSpec::constant(0.0),
        ));
        // Center -sqrt 2 and semi-axis sqrt 2: the first node is 0.
        let s2 = std::f64::consts::SQRT_2;
        let w = Window::new(-s2 - 1.0, -s2 + 1.0, -1.0, 1.0);
        assert!(matches!(
            equivalence_check::<f64>(&spec, &w, 1e-8),
            Err(Error::Window(_))
        ));
    }

    #[test]
    fn pseudospectrum_of_zero_and_normal_matrices() {
        let grid = GridSpec::new(Window::new(-1.0, 1.0, -1.0, 1.0), 5, 5);
        let z = Mat::<f64>::zeros(3, 3);
        let r = pseudospectrum(PseudoTarget::Matrix(&z), None, &grid, "zero").unwrap();
        let g = r.grid_data.unwrap();
        for (i, x) in g.re.iter().enumerate() {
            for (j, y) in g.im.iter().enumerate() {
                assert!((g.values[i][j] - x.hypot(*y)).abs() < 1e-12);
            }
        }
        let d = Mat::from_diag(&[cf::<f64>(1.0, 0.0), cf(0.0, 2.0)]);
        let grid = GridSpec::new(Window::new(0.0, 1.0, 0.0, 0.0), 2, 1);
        let r = pseudospectrum(PseudoTarget::Matrix(&d), None, &grid, "diag").unwrap();
        let g = r.grid_data.unwrap();
        assert!((g.values[0][0] - 1.0).abs() < 1e-12);
        assert!(g.values[1][0].abs() < 1e-12);
    }

    #[test]
    fn pseudospectrum_marks_excluded_cells() {
        let fam = OperatorFamily::new("pole", 1, ExcludedSet::from_points(vec![cf(0.0, 0.0)]), |l: C<f64>| {
            Ok(Mat::from_diag(&[cr(1.0) / l]))
        });
        let grid = GridSpec::new(Window::new(-1.0, 1.0, 0.0, 0.0), 3, 1);
        let r = pseudospectrum(PseudoTarget::Family(&fam), None, &grid, "pole").unwrap();
        let g = r.grid_data.unwrap();
        assert!(g.values[1][0].is_nan());
        assert!((g.values[0][0] - 1.0).abs() < 1e-15);
        assert_eq!(r.metadata["excluded_cells"], "1");
    }

    #[test]
    fn refinement_rejects_bad_sizes() {
        let spec = ModelSpec::DampedWave(DampedWaveSpec::new(
            PI,
            8,
            CoefficientSpec::constant(1.0),
            CoefficientSpec::constant(0.0),
        ));
        let obs = Observable::EigK { k: 1, lambda: None };
        assert!(refinement_study::<f64>(&spec, &[8, 16], &obs).is_err());
        assert!(refinement_study::<f64>(&spec, &[8, 8, 16], &obs).is_err());
        let t = refinement_study::<f64>(&spec, &[8, 16, 32], &obs).unwrap();
        for row in &t.rows {
            assert!((row.re + 1.0).abs() < 1e-13 && row.im.abs() < 1e-13);
        }
        assert!(t.monotone);
    }

    #[test]
    fn observable_json_shape() {
        let o: Observable = serde_json::from_str(r#"{"sigma_min_at": {"lambda": [0.5, 1.0]}}"#).unwrap();
        assert_eq!(
            o,
            Observable::SigmaMinAt {
                lambda: Complex64::new(0.5, 1.0)
            }
        );
        let e: Observable = serde_json::from_str(r#"{"eig_k": {"k": 2}}"#).unwrap();
        assert_eq!(e, Observable::EigK { k: 2, lambda: None });
    }
}
