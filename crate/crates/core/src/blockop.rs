//! 2x2 block operators, their Schur complement families, and the identities
//! relating them.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cond2, eigenvalues, expm, inverse, weighted_similarity, wrap_angle, Lu, Mat, Svd};
use crate::pseudoinv::{generalized_inverse, TolPolicy};
use crate::scalar::{cr, Real, C};

/// Relative guard distance around excluded points.
pub const GUARD_REL: f64 = 1e-10;

/// Condition number above which a factor counts as singular.
pub(crate) fn singular_condition_limit<T: Real>() -> T {
    T::one() / (T::lit(1e4) * T::epsilon())
}

/// `[[A, B], [C, D]]` acting on `X1 x X2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator<T: Real> {
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub c: Mat<T>,
    pub d: Mat<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    /// Eliminate the second component: `A - lambda - B (D - lambda)^-1 C`.
    First,
    /// Eliminate the first component: `D - lambda - C (A - lambda)^-1 B`.
    Second,
}

impl<T: Real> BlockOperator<T> {
    pub fn new(a: Mat<T>, b: Mat<T>, c: Mat<T>, d: Mat<T>) -> Result<Self> {
        let n1 = a.nrows();
        let n2 = d.nrows();
        if n1 == 0 || n2 == 0 {
            return Err(Error::Dimension("block operator with an empty diagonal block".into()));
        }
        if a.shape() != (n1, n1) || d.shape() != (n2, n2) || b.shape() != (n1, n2) || c.shape() != (n2, n1) {
            return Err(Error::Dimension(format!(
                "incompatible blocks A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            return Err(Error::Input("block operator with non-finite entries".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn n1(&self) -> usize {
        self.a.nrows()
    }

    pub fn n2(&self) -> usize {
        self.d.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n1() + self.n2()
    }

    pub fn assemble(&self) -> Mat<T> {
        Mat::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn pivot_block(&self, pivot: Pivot) -> &Mat<T> {
        match pivot {
            Pivot::First => &self.d,
            Pivot::Second => &self.a,
        }
    }

    pub fn cast<S: Real>(&self) -> BlockOperator<S> {
        BlockOperator {
            a: self.a.cast(),
            b: self.b.cast(),
            c: self.c.cast(),
            d: self.d.cast(),
        }
    }
}

/// Subsets of the complex plane where a family is undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region<T> {
    /// `{origin + t e^{i angle} : t >= 0}`.
    Ray { origin: C<T>, angle: T },
    /// Closed sector with vertex and opening angles `angle_lo <= arg <= angle_hi`.
    Sector { vertex: C<T>, angle_lo: T, angle_hi: T },
}

impl<T: Real> Region<T> {
    fn distance(&self, z: C<T>) -> T {
        match *self {
            Region::Ray { origin, angle } => ray_distance(origin, angle, z),
            Region::Sector {
                vertex,
                angle_lo,
                angle_hi,
            } => {
                let w = z - vertex;
                if w.norm() == T::zero() {
                    return T::zero();
                }
                let mut arg = w.arg();
                let two_pi = T::PI() + T::PI();
                while arg < angle_lo {
                    arg += two_pi;
                }
                if arg <= angle_hi {
                    T::zero()
                } else {
                    ray_distance(vertex, angle_lo, z).min(ray_distance(vertex, angle_hi, z))
                }
            }
        }
    }

    fn translated(&self, delta: C<T>) -> Self {
        match *self {
            Region::Ray { origin, angle } => Region::Ray {
                origin: origin + delta,
                angle,
            },
            Region::Sector {
                vertex,
                angle_lo,
                angle_hi,
            } => Region::Sector {
                vertex: vertex + delta,
                angle_lo,
                angle_hi,
            },
        }
    }

    /// Point of the region closest to `z`, for error messages.
    fn anchor(&self) -> C<T> {
        match *self {
            Region::Ray { origin, .. } => origin,
            Region::Sector { vertex, .. } => vertex,
        }
    }
}

fn ray_distance<T: Real>(origin: C<T>, angle: T, z: C<T>) -> T {
    let dir = C::new(angle.cos(), angle.sin());
    let w = z - origin;
    let t = (w * dir.conj()).re.max(T::zero());
    (w - dir * cr(t)).norm()
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExcludedSet<T> {
    pub points: Vec<C<T>>,
    pub regions: Vec<Region<T>>,
}

impl<T: Real> ExcludedSet<T> {
    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            regions: Vec::new(),
        }
    }

    pub fn from_points(points: Vec<C<T>>) -> Self {
        Self {
            points,
            regions: Vec::new(),
        }
    }

    pub fn with_region(mut self, region: Region<T>) -> Self {
        self.regions.push(region);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.regions.is_empty()
    }

    /// The excluded feature that violates the guard at `z`, if any.
    pub fn violation(&self, z: C<T>) -> Option<C<T>> {
        let g = T::lit(GUARD_REL);
        for &mu in &self.points {
            if (z - mu).norm() <= g * (T::one() + mu.norm()) {
                return Some(mu);
            }
        }
        for r in &self.regions {
            if r.distance(z) <= g * (T::one() + z.norm()) {
                return Some(r.anchor());
            }
        }
        None
    }

    /// Distance from `z` to the nearest excluded feature.
    pub fn distance(&self, z: C<T>) -> T {
        let p = self.points.iter().map(|&mu| (z - mu).norm());
        let r = self.regions.iter().map(|r| r.distance(z));
        p.chain(r).fold(T::infinity(), T::min)
    }

    pub fn translated(&self, delta: C<T>) -> Self {
        Self {
            points: self.points.iter().map(|&p| p + delta).collect(),
            regions: self.regions.iter().map(|r| r.translated(delta)).collect(),
        }
    }
}

type FamilyFn<T> = dyn Fn(C<T>) -> Result<Mat<T>> + Send + Sync;

/// A matrix-valued function `lambda -> S(lambda)` with an excluded set.
///
/// Evaluation refuses parameters within the guard distance of the excluded set.
#[derive(Clone)]
pub struct OperatorFamily<T: Real> {
    label: String,
    dim: usize,
    excluded: ExcludedSet<T>,
    f: Arc<FamilyFn<T>>,
}

impl<T: Real> fmt::Debug for OperatorFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorFamily")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("excluded", &self.excluded)
            .finish()
    }
}

impl<T: Real> OperatorFamily<T> {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        excluded: ExcludedSet<T>,
        f: impl Fn(C<T>) -> Result<Mat<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            dim,
            excluded,
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn excluded(&self) -> &ExcludedSet<T> {
        &self.excluded
    }

    pub fn check_domain(&self, lambda: C<T>) -> Result<()> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::Input(format!("non-finite parameter {lambda}")));
        }
        match self.excluded.violation(lambda) {
            Some(mu) => Err(Error::Domain {
                label: self.label.clone(),
                lambda: format!("{lambda}"),
                nearest: format!("{mu}"),
            }),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, lambda: C<T>) -> Result<Mat<T>> {
        self.check_domain(lambda)?;
        let m = (self.f)(lambda)?;
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::Dimension(format!(
                "family `{}` returned {:?}, expected {}x{}",
                self.label,
                m.shape(),
                self.dim,
                self.dim
            )));
        }
        Ok(m)
    }

    /// `lambda -> S(lambda + delta)`, with the excluded set moved by `-delta`.
    pub fn shifted(&self, delta: C<T>) -> Self {
        let f = self.f.clone();
        Self {
            label: format!("{}(. + {delta})", self.label),
            dim: self.dim,
            excluded: self.excluded.translated(-delta),
            f: Arc::new(move |l| f(l + delta)),
        }
    }
}

/// The Schur complement family of `op` with respect to `pivot`.
///
/// The excluded set is the spectrum of the pivot block.
pub fn schur_family<T: Real>(op: &BlockOperator<T>, pivot: Pivot) -> Result<OperatorFamily<T>> {
    let excluded = ExcludedSet::from_points(eigenvalues(op.pivot_block(pivot))?);
    let blocks = Arc::new(op.clone());
    let (label, dim) = match pivot {
        Pivot::First => ("S1", op.n1()),
        Pivot::Second => ("S2", op.n2()),
    };
    Ok(OperatorFamily::new(label, dim, excluded, move |lambda| {
        let o = &*blocks;
        let (keep, left, right, piv, piv_name) = match pivot {
            Pivot::First => (&o.a, &o.b, &o.c, &o.d, "D - lambda"),
            Pivot::Second => (&o.d, &o.c, &o.b, &o.a, "A - lambda"),
        };
        let lu = Lu::new(&piv.shifted(lambda))?;
        if lu.is_singular() {
            return Err(Error::Factorization {
                factor: piv_name.into(),
                detail: format!("at lambda = {lambda}"),
            });
        }
        let x = lu.solve(right)?;
        Ok(&keep.shifted(lambda) - &(left * &x))
    }))
}

/// `S(lambda)` and the two terms it is assembled from, first pivot.
fn schur_parts<T: Real>(op: &BlockOperator<T>, lambda: C<T>) -> Result<(Mat<T>, Mat<T>, Lu<T>)> {
    let lu = Lu::new(&op.d.shifted(lambda))?;
    let coupling = &op.b * &lu.solve(&op.c)?;
    let s = &op.a.shifted(lambda) - &coupling;
    Ok((s, coupling, lu))
}

#[derive(Clone, Debug)]
pub struct KernelCorrespondence<T: Real> {
    pub ker_block_dim: usize,
    pub ker_schur_dim: usize,
    /// Worst relative residual `|(A - lambda) x| / (|A - lambda|_F |x|)` of the
    /// lifted Schur kernel vectors `x = (f, -(D - lambda)^-1 C f)`.
    pub basis_map_residual: T,
    pub schur_kernel: Mat<T>,
    pub block_kernel: Mat<T>,
}

/// Compares `ker(A - lambda)` with `ker S(lambda)` (first pivot).
///
/// Numerical kernels use the cut `rel_tol * scale`, where the block scale is its
/// largest singular value and the Schur scale is `|A - lambda|_F + |B (D - lambda)^-1 C|_F`,
/// the size of the terms that cancel when `S(lambda)` is singular.
pub fn kernel_correspondence<T: Real>(
    op: &BlockOperator<T>,
    lambda: C<T>,
    rel_tol: T,
) -> Result<KernelCorrespondence<T>> {
    let pivot = ExcludedSet::from_points(eigenvalues(&op.d)?);
    if let Some(mu) = pivot.violation(lambda) {
        return Err(Error::Domain {
            label: "D".into(),
            lambda: format!("{lambda}"),
            nearest: format!("{mu}"),
        });
    }
    let block = op.assemble().shifted(lambda);
    let block_svd = Svd::new(&block)?;
    let block_kernel = block_svd.kernel_basis(rel_tol * block_svd.sigma_max());

    let (s, coupling, lu) = schur_parts(op, lambda)?;
    let scale = op.a.shifted(lambda).norm_fro() + coupling.norm_fro();
    let schur_svd = Svd::new(&s)?;
    let schur_kernel = schur_svd.kernel_basis(rel_tol * scale.max(T::min_positive_value()));

    let block_norm = block.norm_fro().max(T::min_positive_value());
    let mut worst = T::zero();
    for j in 0..schur_kernel.ncols() {
        let f = schur_kernel.column(j);
        let cf = op.c.mat_vec(&f);
        let g: Vec<C<T>> = lu.solve_vec(&cf)?.into_iter().map(|v| -v).collect();
        let x: Vec<C<T>> = f.into_iter().chain(g).collect();
        let r = crate::linalg::vec_norm(&block.mat_vec(&x)) / (block_norm * crate::linalg::vec_norm(&x));
        worst = worst.max(r);
    }
    Ok(KernelCorrespondence {
        ker_block_dim: block_kernel.ncols(),
        ker_schur_dim: schur_kernel.ncols(),
        basis_map_residual: worst,
        schur_kernel,
        block_kernel,
    })
}

fn check_factor<T: Real>(m: &Mat<T>, name: &str, lambda: C<T>) -> Result<()> {
    let cond = cond2(m)?;
    if cond < singular_condition_limit() {
        Ok(())
    } else {
        Err(Error::Factorization {
            factor: name.into(),
            detail: format!("condition {:.3e} at lambda = {lambda}", cond.to_f64_lossy()),
        })
    }
}

/// `(A - lambda)^-1` through the first-pivot Frobenius–Schur factorization.
pub fn frobenius_schur_inverse<T: Real>(op: &BlockOperator<T>, lambda: C<T>) -> Result<Mat<T>> {
    let d0 = op.d.shifted(lambda);
    check_factor(&d0, "D - lambda", lambda)?;
    let dinv = inverse(&d0)?;
    let s = &op.a.shifted(lambda) - &(&(&op.b * &dinv) * &op.c);
    check_factor(&s, "S(lambda)", lambda)?;
    let sinv = inverse(&s)?;
    let sbd = &(&sinv * &op.b) * &dinv;
    let dcs = &(&dinv * &op.c) * &sinv;
    let lower_right = &dinv + &(&dcs * &(&op.b * &dinv));
    Ok(Mat::from_blocks(&sinv, &(-&sbd), &(-&dcs), &lower_right))
}

#[derive(Clone, Debug)]
pub struct LeftApproxInverse<T: Real> {
    pub l: Mat<T>,
    pub k: Mat<T>,
    /// `|L (A - lambda) - I - K|_max / (1 + |L|_max |A - lambda|_max)`.
    pub identity_residual: T,
    pub rank_k: usize,
    pub ker_schur_dim: usize,
    pub ker_pivot_dim: usize,
}

/// Left approximate inverse `L` of `A - lambda` with finite-rank defect `K`,
/// built from generalized inverses of `D - lambda` and `S(lambda)`.
///
/// Under [`TolPolicy::Default`] both rank cuts are relative to the terms each
/// factor is formed from: `n2 eps (|D|_F + |lambda| sqrt(n2))` for `D - lambda`
/// and `n1 eps (|A - lambda|_F + |B (D - lambda)^# C|_F)` for `S(lambda)`, so
/// cancellation in the difference counts as a kernel.
pub fn left_approx_inverse<T: Real>(
    op: &BlockOperator<T>,
    lambda: C<T>,
    policy: TolPolicy<T>,
) -> Result<LeftApproxInverse<T>> {
    let (n1, n2) = (op.n1(), op.n2());
    let formation = |n: usize, formed: T| match policy {
        TolPolicy::Default if formed > T::zero() => TolPolicy::Absolute(T::from_usize_lossy(n) * T::epsilon() * formed),
        p => p,
    };
    let d0 = op.d.shifted(lambda);
    let d_formed = op.d.norm_fro() + lambda.norm() * T::from_usize_lossy(n2).sqrt();
    let dg = generalized_inverse(&d0, formation(n2, d_formed))?;
    let a0 = op.a.shifted(lambda);
    let bdc = &(&op.b * &dg.pinv) * &op.c;
    let s = &a0 - &bdc;
    let s_policy = formation(n1, a0.norm_fro() + bdc.norm_fro());
    let sg = generalized_inverse(&s, s_policy)?;
    let (dp, sp) = (&dg.pinv, &sg.pinv);

    let dc = dp * &op.c;
    let sb = sp * &op.b;
    let dcs = &dc * sp;
    let sbd = &sb * dp;
    let l = Mat::from_blocks(sp, &(-&sbd), &(-&dcs), &(dp + &(&dcs * &(&op.b * dp))));
    let k = Mat::from_blocks(
        &(-&sg.proj_kernel),
        &(&sb * &dg.proj_kernel),
        &(&dc * &sg.proj_kernel),
        &(&(-&dg.proj_kernel) - &(&(&dcs * &op.b) * &dg.proj_kernel)),
    );
    let shifted = op.assemble().shifted(lambda);
    let lhs = &l * &shifted;
    let rhs = &Mat::identity(n1 + n2) + &k;
    let identity_residual = lhs.max_diff(&rhs) / (T::one() + l.max_abs() * shifted.max_abs());

    let ksvd = Svd::new(&k)?;
    let rank_k = ksvd.rank(T::lit(1e-8) * ksvd.sigma_max().max(T::one()));
    Ok(LeftApproxInverse {
        l,
        k,
        identity_residual,
        rank_k,
        ker_schur_dim: sg.kernel_dim(),
        ker_pivot_dim: dg.kernel_dim(),
    })
}

/// `log det(A - lambda)` against `log det(D - lambda) + log det S(lambda)`.
#[derive(Clone, Copy, Debug)]
pub struct DeterminantSplit<T> {
    pub log_det_block: C<T>,
    pub log_det_pivot: C<T>,
    pub log_det_schur: C<T>,
    /// Difference modulo `2 pi i`, relative to `max(1, |log det(A - lambda)|)`.
    pub residual: T,
}

pub fn determinant_split<T: Real>(op: &BlockOperator<T>, lambda: C<T>) -> Result<DeterminantSplit<T>> {
    let (s, _, lu_d) = schur_parts(op, lambda)?;
    let log_det_block = Lu::new(&op.assemble().shifted(lambda))?.log_det();
    let log_det_pivot = lu_d.log_det();
    let log_det_schur = Lu::new(&s)?.log_det();
    let diff = log_det_block - log_det_pivot - log_det_schur;
    let residual = (diff.re.abs() + wrap_angle(diff.im).abs()) / log_det_block.norm().max(T::one());
    Ok(DeterminantSplit {
        log_det_block,
        log_det_pivot,
        log_det_schur,
        residual,
    })
}

/// Positive definite weights `G1`, `G2`; the energy inner product is
/// `<u, v>_G = v* diag(G1, G2) u`.
#[derive(Clone, Debug)]
pub struct GramPair<T: Real> {
    pub g1: Mat<T>,
    pub g2: Mat<T>,
    chol: Mat<T>,
}

impl<T: Real> GramPair<T> {
    pub fn new(g1: Mat<T>, g2: Mat<T>) -> Result<Self> {
        let l1 = cholesky(&g1)?;
        let l2 = cholesky(&g2)?;
        let chol = Mat::from_blocks(
            &l1,
            &Mat::zeros(l1.nrows(), l2.nrows()),
            &Mat::zeros(l2.nrows(), l1.nrows()),
            &l2,
        );
        Ok(Self { g1, g2, chol })
    }

    pub fn identity(n1: usize, n2: usize) -> Result<Self> {
        Self::new(Mat::identity(n1), Mat::identity(n2))
    }

    pub fn dim(&self) -> usize {
        self.g1.nrows() + self.g2.nrows()
    }

    pub fn full(&self) -> Mat<T> {
        let (n1, n2) = (self.g1.nrows(), self.g2.nrows());
        Mat::from_blocks(&self.g1, &Mat::zeros(n1, n2), &Mat::zeros(n2, n1), &self.g2)
    }

    /// Lower factor `L` of `G = L L*`.
    pub fn cholesky_factor(&self) -> &Mat<T> {
        &self.chol
    }

    /// `R M R^-1` with `R = L*`; its Euclidean norms are the `G`-norms of `M`.
    pub fn similarity(&self, m: &Mat<T>) -> Result<Mat<T>> {
        if m.shape() != (self.dim(), self.dim()) {
            return Err(Error::Dimension(format!(
                "operator {:?} does not match Gram dimension {}",
                m.shape(),
                self.dim()
            )));
        }
        Ok(weighted_similarity(m, &self.chol))
    }

    pub fn cast<S: Real>(&self) -> Result<GramPair<S>> {
        GramPair::new(self.g1.cast(), self.g2.cast())
    }
}

/// Rayleigh quotients `<A x, x>_G / <x, x>_G` for seeded random complex `x`.
///
/// Real and imaginary parts come from the Hermitian and skew parts of `G A`
/// separately, so a dissipative form yields real parts that are nonpositive up to
/// rounding in a single quadratic form.
pub fn numerical_range_sample<T: Real>(
    op: &BlockOperator<T>,
    gram: &GramPair<T>,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<C<T>>> {
    if gram.dim() != op.dim() || gram.g1.nrows() != op.n1() {
        return Err(Error::Dimension("Gram pair does not match the block operator".into()));
    }
    let ga = &gram.full() * &op.assemble();
    let gaa = ga.adjoint();
    let half = cr(T::lit(0.5));
    let herm = (&ga + &gaa).scale(half);
    let skew = (&ga - &gaa).scale(half);
    let g = gram.full();
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = Mat::<T>::random_normal(n, 1, &mut rng).column(0);
        let form = |m: &Mat<T>| crate::linalg::vec_dot(&x, &m.mat_vec(&x));
        let den = form(&g).re;
        let re = form(&herm).re / den;
        let im = form(&skew).im / den;
        out.push(C::new(re, im));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemigroupNorm<T> {
    pub t: T,
    /// `|exp(t A)|_G = |R exp(t A) R^-1|_2`.
    pub norm: T,
}

pub fn semigroup_contraction_check<T: Real>(
    op: &BlockOperator<T>,
    gram: &GramPair<T>,
    times: &[T],
) -> Result<Vec<SemigroupNorm<T>>> {
    let a = op.assemble();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::Input(format!(
                "semigroup time must be finite and nonnegative, got {t}"
            )));
        }
        let e = expm(&a.scale_real(t))?;
        let w = gram.similarity(&e)?;
        let norm = Svd::new(&w)?.sigma_max();
        out.push(SemigroupNorm { t, norm });
    }
    Ok(out)
}
