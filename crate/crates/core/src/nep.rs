//! Nonlinear eigenvalue problems `S(lambda) v = 0`: the Beyn contour method,
//! companion linearization of matrix polynomials, and spectral distances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blockop::{singular_condition_limit, OperatorFamily};
use crate::error::{Error, Result};
use crate::linalg::{cond2, eig, vec_norm, Lu, Mat, Svd};
use crate::report::{MethodTag, SpectralReport};
use crate::scalar::{c, cr, Real, C};

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_PROBES: usize = 16;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_PROBE_SEED: u64 = 0x5eed_b3f1;

/// Ellipse `center + rx cos(t) + i ry sin(t)` with its trapezoid discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec<T> {
    pub center: C<T>,
    pub rx: T,
    pub ry: T,
    pub n_nodes: usize,
    /// Number of probe columns; `None` means `min(n, 16)`.
    pub n_probes: Option<usize>,
    pub rank_tol: T,
    pub seed: u64,
    /// Number `K` of block rows in the Hankel moment matrices; `1` is the
    /// single-moment method.
    pub n_moments: usize,
}

impl<T: Real> ContourSpec<T> {
    pub fn ellipse(center: C<T>, rx: T, ry: T) -> Self {
        Self {
            center,
            rx,
            ry,
            n_nodes: DEFAULT_NODES,
            n_probes: None,
            rank_tol: T::lit(DEFAULT_RANK_TOL),
            seed: DEFAULT_PROBE_SEED,
            n_moments: 1,
        }
    }

    pub fn circle(center: C<T>, r: T) -> Self {
        Self::ellipse(center, r, r)
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.n_nodes = n;
        self
    }

    pub fn with_probes(mut self, n: usize) -> Self {
        self.n_probes = Some(n);
        self
    }

    pub fn with_moments(mut self, k: usize) -> Self {
        self.n_moments = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rank_tol(mut self, tol: T) -> Self {
        self.rank_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rx > T::zero() && self.ry > T::zero() && self.rx.is_finite() && self.ry.is_finite()) {
            return Err(Error::Contour(format!(
                "semi-axes must be positive, got {} and {}",
                self.rx, self.ry
            )));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::Contour("non-finite contour center".into()));
        }
        if self.n_nodes < 8 {
            return Err(Error::Contour(format!(
                "need at least 8 quadrature nodes, got {}",
                self.n_nodes
            )));
        }
        if self.n_probes == Some(0) {
            return Err(Error::Contour("need at least one probe".into()));
        }
        if self.n_moments == 0 {
            return Err(Error::Contour("need at least one moment".into()));
        }
        if !(self.rank_tol > T::zero() && self.rank_tol < T::one()) {
            return Err(Error::Contour(format!(
                "rank tolerance must lie in (0, 1), got {}",
                self.rank_tol
            )));
        }
        Ok(())
    }

    /// Quadrature nodes `z_j` and derivatives `z'(theta_j)`.
    pub fn nodes(&self) -> Vec<(C<T>, C<T>)> {
        let m = self.n_nodes;
        (0..m)
            .map(|j| {
                let th = T::PI() * T::lit(2.0) * T::from_usize_lossy(j) / T::from_usize_lossy(m);
                let (s, co) = th.sin_cos();
                let z = self.center + c(self.rx * co, self.ry * s);
                let dz = c(-self.rx * s, self.ry * co);
                (z, dz)
            })
            .collect()
    }

    /// Scale used to normalize moment powers: `(z - center) / radius`.
    pub fn radius(&self) -> T {
        self.rx.max(self.ry)
    }

    /// Strictly inside the ellipse.
    pub fn contains(&self, z: C<T>) -> bool {
        let u = (z.re - self.center.re) / self.rx;
        let v = (z.im - self.center.im) / self.ry;
        u * u + v * v < T::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rejected<T> {
    pub lambda: C<T>,
    pub residual: Option<T>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct NepResult<T: Real> {
    pub eigenvalues: Vec<C<T>>,
    /// `|S(lambda_i) v_i| / max(1, |S(lambda_i)|_F)` for unit `v_i`.
    pub residuals: Vec<T>,
    /// Unit eigenvectors as columns.
    pub eigenvectors: Mat<T>,
    pub moment_rank: usize,
    pub singular_values: Vec<T>,
    pub rejected: Vec<Rejected<T>>,
    pub certified: bool,
    pub warnings: Vec<String>,
    pub nodes_used: usize,
}

impl<T: Real> NepResult<T> {
    pub fn to_report(&self, model_tag: &str, n: usize) -> SpectralReport {
        let mut r = SpectralReport::new(model_tag, MethodTag::SchurNep, n)
            .with_meta("moment_rank", self.moment_rank)
            .with_meta("nodes", self.nodes_used)
            .with_meta("certified", self.certified)
            .with_meta("rejected", self.rejected.len());
        for (l, res) in self.eigenvalues.iter().zip(&self.residuals) {
            r.push(*l, *res);
        }
        if !self.warnings.is_empty() {
            r.metadata.insert("warnings".into(), self.warnings.join("; "));
        }
        r
    }
}

/// Beyn's contour method for the eigenvalues of `family` inside the ellipse,
/// with `contour.n_moments` block Hankel moments.
///
/// Candidates outside the ellipse, or with relative residual above
/// `residual_tol`, are moved to `rejected`.
pub fn beyn_solve<T: Real>(
    family: &OperatorFamily<T>,
    contour: &ContourSpec<T>,
    residual_tol: T,
) -> Result<NepResult<T>> {
    contour.validate()?;
    let n = family.dim();
    if n == 0 {
        return Err(Error::Dimension("family of dimension zero".into()));
    }
    let ell = contour.n_probes.unwrap_or(DEFAULT_PROBES).min(n);
    let nodes = contour.nodes();
    for &(z, _) in &nodes {
        if let Some(mu) = family.excluded().violation(z) {
            return Err(Error::Contour(format!(
                "node {z} lies within guard distance of excluded point {mu} of `{}`",
                family.label()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(contour.seed);
    let probes = Mat::<T>::random_normal(n, ell, &mut rng);

    let solves: Vec<Mat<T>> = nodes
        .par_iter()
        .map(|&(z, _)| {
            let s = family.evaluate(z)?;
            let lu = Lu::new(&s)?;
            if lu.is_singular() {
                return Err(Error::Contour(format!("S(z) is singular at node {z}")));
            }
            lu.solve(&probes)
        })
        .collect::<Result<_>>()?;

    let m = T::from_usize_lossy(contour.n_nodes);
    let kk = contour.n_moments;
    let rho = contour.radius();
    let mut moments: Vec<Mat<T>> = (0..2 * kk).map(|_| Mat::zeros(n, ell)).collect();
    let mut scale = T::zero();
    for (x, &(z, dz)) in solves.iter().zip(&nodes) {
        // dz / (i M)
        let w = c(dz.im / m, -dz.re / m);
        let zt = (z - contour.center) / rho;
        let mut wp = w;
        for mom in moments.iter_mut() {
            *mom = &*mom + &x.scale(wp);
            wp *= zt;
        }
        scale += x.norm_fro() * w.norm();
    }
    let hankel = |shift: usize| {
        let mut h = Mat::zeros(kk * n, kk * ell);
        for r in 0..kk {
            for s in 0..kk {
                h.set_block(r * n, s * ell, &moments[r + s + shift]);
            }
        }
        h
    };
    let (b0, b1) = (hankel(0), hankel(1));

    let svd = Svd::new(&b0)?;
    let sigma1 = svd.sigma_max();
    let cut = contour.rank_tol * sigma1.max(scale);
    let k = svd.rank(cut);
    let mut warnings = Vec::new();
    let mut certified = true;
    if k == kk * ell {
        certified = false;
        warnings.push(format!(
            "moment rank equals the probe count {ell} times the moment count {kk}; eigenvalues may be missing"
        ));
    }
    let hundred = T::lit(100.0);
    if svd.s.iter().any(|&s| s > cut / hundred && s <= cut * hundred) {
        certified = false;
        warnings.push("singular values of the moment matrix lie close to the rank cut".into());
    }

    let mut result = NepResult {
        eigenvalues: Vec::new(),
        residuals: Vec::new(),
        eigenvectors: Mat::zeros(n, 0),
        moment_rank: k,
        singular_values: svd.s.clone(),
        rejected: Vec::new(),
        certified,
        warnings,
        nodes_used: contour.n_nodes,
    };
    if k == 0 {
        return Ok(result);
    }

    let idx: Vec<usize> = (0..k).collect();
    let uk = svd.u.columns(&idx);
    let wk = svd.v.columns(&idx);
    let inv_s: Vec<C<T>> = svd.s[..k].iter().map(|&s| cr(T::one() / s)).collect();
    let b = &(&(&uk.adjoint() * &b1) * &wk) * &Mat::from_diag(&inv_s);
    let (mu, sv) = eig(&b)?;
    let mu = merge_clusters(&mu, cluster_radius(b.norm_fro()));
    let full = &uk * &sv;
    let vecs = full.submatrix(0, 0, n, full.ncols());
    let mu: Vec<C<T>> = mu.iter().map(|&z| contour.center + z * rho).collect();

    let mut kept = Vec::new();
    for (i, &lambda) in mu.iter().enumerate() {
        let mut v = vecs.column(i);
        let nv = vec_norm(&v);
        if nv > T::zero() {
            v.iter_mut().for_each(|x| *x /= nv);
        }
        if !contour.contains(lambda) {
            result.rejected.push(Rejected {
                lambda,
                residual: None,
                reason: "outside contour".into(),
            });
            continue;
        }
        match family.evaluate(lambda) {
            Ok(s) => {
                let res = vec_norm(&s.mat_vec(&v)) / s.norm_fro().max(T::one());
                if res <= residual_tol {
                    kept.push((lambda, res, v));
                } else {
                    result.rejected.push(Rejected {
                        lambda,
                        residual: Some(res),
                        reason: "residual above tolerance".into(),
                    });
                }
            }
            Err(e) => result.rejected.push(Rejected {
                lambda,
                residual: None,
                reason: e.to_string(),
            }),
        }
    }
    kept.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    let mut vmat = Mat::zeros(n, kept.len());
    for (j, (lambda, res, v)) in kept.into_iter().enumerate() {
        result.eigenvalues.push(lambda);
        result.residuals.push(res);
        vmat.set_column(j, &v);
    }
    result.eigenvectors = vmat;
    Ok(result)
}

/// Radius below which computed eigenvalues of a matrix with norm `scale` are
/// treated as one perturbed multiple eigenvalue: `10 sqrt(eps max(1, scale))`.
pub fn cluster_radius<T: Real>(scale: T) -> T {
    T::lit(10.0) * (T::epsilon() * scale.max(T::one())).sqrt()
}

/// Replaces each group of values linked by distance `<= radius` by the group
/// mean. A defective eigenvalue splits by `O(sqrt(eps))` while the mean of the
/// split cluster stays accurate to `O(eps)`. Order is preserved.
pub fn merge_clusters<T: Real>(vals: &[C<T>], radius: T) -> Vec<C<T>> {
    let n = vals.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn root(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= radius {
                let (ri, rj) = (root(&mut group, i), root(&mut group, j));
                if ri != rj {
                    group[rj] = ri;
                }
            }
        }
    }
    let mut sum = vec![C::new(T::zero(), T::zero()); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        let r = root(&mut group, i);
        sum[r] += vals[i];
        count[r] += 1;
    }
    (0..n)
        .map(|i| {
            let r = root(&mut group, i);
            sum[r] / T::from_usize_lossy(count[r])
        })
        .collect()
}

/// Eigenpairs of a matrix polynomial `sum_j lambda^j M_j`.
#[derive(Clone, Debug)]
pub struct PolyEig<T: Real> {
    pub eigenvalues: Vec<C<T>>,
    pub eigenvectors: Mat<T>,
    /// `|P(lambda) v| / |v|`.
    pub residuals: Vec<T>,
}

/// `P(lambda) = sum_j lambda^j coeffs[j]`.
pub fn poly_eval<T: Real>(coeffs: &[Mat<T>], lambda: C<T>) -> Mat<T> {
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for m in coeffs.iter().rev().skip(1) {
        acc = &acc.scale(lambda) + m;
    }
    acc
}

/// Solves the polynomial eigenproblem through the block companion matrix of the
/// monic polynomial `M_k^-1 P`.
pub fn polyeig<T: Real>(coeffs: &[Mat<T>]) -> Result<PolyEig<T>> {
    if coeffs.len() < 2 {
        return Err(Error::Linearization("need a polynomial of degree at least one".into()));
    }
    let n = coeffs[0].nrows();
    if n == 0 || coeffs.iter().any(|m| m.shape() != (n, n)) {
        return Err(Error::Dimension(
            "coefficients must be nonempty square matrices of one size".into(),
        ));
    }
    let deg = coeffs.len() - 1;
    let lead = &coeffs[deg];
    let cond = cond2(lead)?;
    if !(cond < singular_condition_limit()) {
        return Err(Error::Linearization(format!(
            "leading coefficient is singular (condition {:.3e})",
            cond.to_f64_lossy()
        )));
    }
    let lu = Lu::new(lead)?;
    let dim = n * deg;
    let mut comp = Mat::zeros(dim, dim);
    for blk in 0..deg - 1 {
        comp.set_block(blk * n, (blk + 1) * n, &Mat::identity(n));
    }
    for (j, m) in coeffs.iter().take(deg).enumerate() {
        let monic = lu.solve(m)?;
        comp.set_block((deg - 1) * n, j * n, &(-&monic));
    }
    let (vals, vecs) = eig(&comp)?;
    let mut eigenvectors = Mat::zeros(n, dim);
    let mut residuals = Vec::with_capacity(dim);
    for (i, &lambda) in vals.iter().enumerate() {
        let col = vecs.column(i);
        // The blocks are v, lambda v, ...; take the best scaled one.
        let best = (0..deg)
            .max_by(|&p, &q| {
                vec_norm(&col[p * n..(p + 1) * n])
                    .partial_cmp(&vec_norm(&col[q * n..(q + 1) * n]))
                    .unwrap()
            })
            .unwrap();
        let mut v = col[best * n..(best + 1) * n].to_vec();
        let nv = vec_norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        residuals.push(vec_norm(&poly_eval(coeffs, lambda).mat_vec(&v)));
        eigenvectors.set_column(i, &v);
    }
    Ok(PolyEig {
        eigenvalues: vals,
        eigenvectors,
        residuals,
    })
}

/// Companion-linearization spectrum of a matrix polynomial as a report.
pub fn polyeig_linearize<T: Real>(coeffs: &[Mat<T>], model_tag: &str) -> Result<SpectralReport> {
    let pe = polyeig(coeffs)?;
    let mut r = SpectralReport::new(model_tag, MethodTag::BlockEig, coeffs[0].nrows())
        .with_meta("linearization", "companion")
        .with_meta("degree", coeffs.len() - 1);
    for (l, res) in pe.eigenvalues.iter().zip(&pe.residuals) {
        r.push(*l, *res);
    }
    r.sort();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDistance<T> {
    /// Hausdorff distance between the two point sets.
    pub hausdorff: T,
    /// Index pairs `(i, j)` matching `a[i]` with `b[j]`, `min(|a|, |b|)` of them.
    pub matching: Vec<(usize, usize)>,
    /// Largest distance within the matching.
    pub matching_max: T,
}

/// Hausdorff distance plus a bottleneck matching: the one-to-one matching of
/// the smaller set into the larger that minimizes the largest pair distance.
/// Symmetric in its arguments.
pub fn spectral_distance<T: Real>(a: &[C<T>], b: &[C<T>]) -> SpectralDistance<T> {
    if a.is_empty() && b.is_empty() {
        return SpectralDistance {
            hausdorff: T::zero(),
            matching: Vec::new(),
            matching_max: T::zero(),
        };
    }
    if a.is_empty() || b.is_empty() {
        return SpectralDistance {
            hausdorff: T::infinity(),
            matching: Vec::new(),
            matching_max: T::infinity(),
        };
    }
    if a.len() > b.len() {
        let mut d = spectral_distance(b, a);
        d.matching = d.matching.into_iter().map(|(j, i)| (i, j)).collect();
        d.matching.sort_unstable();
        return d;
    }
    let dist: Vec<Vec<T>> = a.iter().map(|p| b.iter().map(|q| (*p - *q).norm()).collect()).collect();
    let row_min = |r: &Vec<T>| r.iter().copied().fold(T::infinity(), T::min);
    let a_to_b_dir = dist.iter().map(row_min).fold(T::zero(), T::max);
    let b_to_a_dir = (0..b.len())
        .map(|j| dist.iter().map(|r| r[j]).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    let hausdorff = a_to_b_dir.max(b_to_a_dir);

    // Binary search over the candidate thresholds for the smallest one that
    // admits a matching saturating `a`.
    let mut levels: Vec<T> = dist.iter().flatten().copied().collect();
    levels.sort_by(|x, y| x.partial_cmp(y).unwrap());
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    let mut best = match_within(&dist, levels[hi]).expect("complete bipartite graph has a saturating matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match match_within(&dist, levels[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let matching: Vec<(usize, usize)> = best.iter().enumerate().map(|(i, &j)| (i, j)).collect();
    let matching_max = matching.iter().map(|&(i, j)| dist[i][j]).fold(T::zero(), T::max);
    SpectralDistance {
        hausdorff,
        matching,
        matching_max,
    }
}

/// Kuhn's augmenting-path matching on edges with `dist <= level`; `Some` when
/// every row is matched.
fn match_within<T: Real>(dist: &[Vec<T>], level: T) -> Option<Vec<usize>> {
    let (na, nb) = (dist.len(), dist[0].len());
    let mut owner = vec![usize::MAX; nb];
    fn augment<T: Real>(i: usize, dist: &[Vec<T>], level: T, seen: &mut [bool], owner: &mut [usize]) -> bool {
        for j in 0..seen.len() {
            if dist[i][j] <= level && !seen[j] {
                seen[j] = true;
                if owner[j] == usize::MAX || augment(owner[j], dist, level, seen, owner) {
                    owner[j] = i;
                    return true;
                }
            }
        }
        false
    }
    for i in 0..na {
        let mut seen = vec![false; nb];
        if !augment(i, dist, level, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut a_to_b = vec![0; na];
    for (j, &i) in owner.iter().enumerate() {
        if i != usize::MAX {
            a_to_b[i] = j;
        }
    }
    Some(a_to_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockop::ExcludedSet;
    use crate::scalar::cf;

    fn scalar_family(f: impl Fn(C<f64>) -> C<f64> + Send + Sync + 'static) -> OperatorFamily<f64> {
        OperatorFamily::new("scalar", 1, ExcludedSet::empty(), move |l| Ok(Mat::from_diag(&[f(l)])))
    }

    #[test]
    fn diagonal_pair_in_unit_circle() {
        let fam = OperatorFamily::new("diag", 2, ExcludedSet::empty(), |l: C<f64>| {
            Ok(Mat::from_diag(&[l - cf(0.5, 0.0), l + cf(0.5, 0.0)]))
        });
        let r = beyn_solve(&fam, &ContourSpec::circle(cf(0.0, 0.0), 1.0), 1e-12).unwrap();
        assert_eq!(r.eigenvalues.len(), 2);
        assert!((r.eigenvalues[0] - cf(-0.5, 0.0)).norm() < 1e-12);
        assert!((r.eigenvalues[1] - cf(0.5, 0.0)).norm() < 1e-12);
        assert!(r.residuals.iter().all(|&x| x <= 1e-12));
    }

    #[test]
    fn shared_eigenvector_needs_two_moments() {
        let fam = scalar_family(|l| l * l - cf(0.25, 0.0));
        let spec = ContourSpec::circle(cf(0.0, 0.0), 1.0);
        let one = beyn_solve(&fam, &spec, 1e-12).unwrap();
        // The residues at +-0.5 cancel in the zeroth moment.
        assert_eq!(one.moment_rank, 0);
        let two = beyn_solve(&fam, &spec.with_moments(2), 1e-12).unwrap();
        assert_eq!(two.eigenvalues.len(), 2);
        assert!((two.eigenvalues[0] - cf(-0.5, 0.0)).norm() < 1e-12);
        assert!((two.eigenvalues[1] - cf(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root_is_recovered_by_cluster_mean() {
        // (lambda - 0.2)^2 has a single eigenvector and algebraic multiplicity two.
        let fam = scalar_family(|l| (l - cf(0.2, 0.1)) * (l - cf(0.2, 0.1)));
        let r = beyn_solve(&fam, &ContourSpec::circle(cf(0.0, 0.0), 1.0).with_moments(2), 1e-10).unwrap();
        assert_eq!(r.moment_rank, 2);
        for z in &r.eigenvalues {
            assert!((z - cf(0.2, 0.1)).norm() < 1e-12);
        }
    }

    #[test]
    fn merge_clusters_averages_close_values() {
        let v = [cf(1.0, 1e-8), cf(1.0, -1e-8), cf(3.0, 0.0)];
        let m = merge_clusters(&v, 1e-6);
        assert_eq!(m[0], cf(1.0, 0.0));
        assert_eq!(m[1], cf(1.0, 0.0));
        assert_eq!(m[2], cf(3.0, 0.0));
    }

    #[test]
    fn no_eigenvalue_inside() {
        let fam = scalar_family(|l| l - cf(3.0, 0.0));
        let r = beyn_solve(&fam, &ContourSpec::circle(cf(0.0, 0.0), 1.0), 1e-12).unwrap();
        assert!(r.eigenvalues.is_empty());
        assert_eq!(r.moment_rank, 0);
    }

    #[test]
    fn contour_validation_and_guard() {
        let fam = OperatorFamily::new("pole", 1, ExcludedSet::from_points(vec![cf(1.0, 0.0)]), |l: C<f64>| {
            Ok(Mat::from_diag(&[l]))
        });
        let spec = ContourSpec::circle(cf(0.0, 0.0), 1.0);
        assert!(matches!(beyn_solve(&fam, &spec, 1e-10), Err(Error::Contour(_))));
        assert!(matches!(
            beyn_solve(&fam, &spec.with_nodes(4), 1e-10),
            Err(Error::Contour(_))
        ));
        assert!(matches!(
            beyn_solve(&fam, &ContourSpec::ellipse(cf(0.0, 0.0), -1.0, 1.0), 1e-10),
            Err(Error::Contour(_))
        ));
    }

    #[test]
    fn companion_of_scalar_quadratic() {
        // lambda^2 + 3 lambda + 2 = (lambda + 1)(lambda + 2)
        let m = |x: f64| Mat::<f64>::from_real(1, 1, &[x]);
        let pe = polyeig(&[m(2.0), m(3.0), m(1.0)]).unwrap();
        let mut re: Vec<f64> = pe.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-13 && (re[1] + 1.0).abs() < 1e-13);
        assert!(pe.residuals.iter().all(|&r| r < 1e-13));
        assert!(matches!(polyeig(&[m(1.0), m(0.0)]), Err(Error::Linearization(_))));
    }

    #[test]
    fn spectral_distance_examples() {
        let a = [cf(1.0, 0.0), cf(2.0, 0.0), cf(3.0, 0.0)];
        let b = [cf(1.1, 0.0), cf(2.1, 0.0), cf(2.9, 0.0)];
        let d = spectral_distance::<f64>(&a, &b);
        assert!((d.hausdorff - 0.1).abs() < 1e-12);
        assert_eq!(d.matching, vec![(0, 0), (1, 1), (2, 2)]);
        let e = spectral_distance::<f64>(&[], &a);
        assert!(e.hausdorff.is_infinite() && e.matching.is_empty());
        assert_eq!(spectral_distance::<f64>(&[], &[]).hausdorff, 0.0);
    }
}
