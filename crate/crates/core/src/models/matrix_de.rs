use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coeff::CoefficientSpec;
use super::galerkin::{default_panels, sine_mass, weighted_matrix, Basis};
use crate::blockop::{schur_family, BlockOperator, GramPair, OperatorFamily, Pivot, GUARD_REL};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{cr, Real, C};

/// `[[-d^2/dx^2 + q, d/dx (b .)], [c d/dx, d]]` on `(0, L)`, Dirichlet in the
/// first component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDeSpec {
    pub length: f64,
    pub n_modes: usize,
    pub q: CoefficientSpec,
    pub b: CoefficientSpec,
    pub c: CoefficientSpec,
    pub d: CoefficientSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

impl MatrixDeSpec {
    pub fn new(
        length: f64,
        n_modes: usize,
        q: CoefficientSpec,
        b: CoefficientSpec,
        c: CoefficientSpec,
        d: CoefficientSpec,
    ) -> Self {
        Self {
            length,
            n_modes,
            q,
            b,
            c,
            d,
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
        for (name, coef) in [("q", &self.q), ("b", &self.b), ("c", &self.c), ("d", &self.d)] {
            coef.validate(name, self.length)?;
        }
        Ok(())
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order.unwrap_or_else(|| default_panels(self.n_modes))
    }

    /// `c = conj(b)`, the structural condition for accretivity.
    pub fn is_accretive_variant(&self) -> bool {
        self.c == self.b.conj()
    }
}

#[derive(Clone, Debug)]
pub struct MatrixDe<T: Real> {
    pub block: BlockOperator<T>,
    /// Both components carry the L2 inner product.
    pub gram: GramPair<T>,
    /// First-pivot family, excluded set = eigenvalues of `D`.
    pub schur: OperatorFamily<T>,
    /// Per-mode quadratic roots plus the decoupled constant mode, for constant coefficients.
    pub reference: Option<Vec<C<T>>>,
    pub spec: MatrixDeSpec,
    pub metadata: BTreeMap<String, String>,
}

const DIAGNOSTIC_POINTS: usize = 1000;

impl<T: Real> MatrixDe<T> {
    fn grid(&self) -> impl Iterator<Item = T> + '_ {
        let l = self.spec.length;
        (0..=DIAGNOSTIC_POINTS).map(move |i| T::lit(l * i as f64 / DIAGNOSTIC_POINTS as f64))
    }

    /// `1 + b(x) c(x) / (d(x) - lambda)`.
    pub fn pi(&self, lambda: C<T>, x: T) -> Result<C<T>> {
        let dl = self.spec.d.eval(x) - lambda;
        if dl.norm() <= T::lit(GUARD_REL) * (T::one() + lambda.norm()) {
            return Err(Error::Domain {
                label: "d - lambda".into(),
                lambda: format!("{lambda}"),
                nearest: format!("d({x})"),
            });
        }
        Ok(cr(T::one()) + self.spec.b.eval(x) * self.spec.c.eval(x) / dl)
    }

    /// Pointwise check that `(d - lambda)^-1 |b|, |c|` scaled by `(re pi)^-1/2`
    /// stays finite on a uniform grid. Returns warnings; empty means the check passed.
    pub fn dominance_warnings(&self, lambda: C<T>) -> Vec<String> {
        let mut out = Vec::new();
        for x in self.grid() {
            let p = match self.pi(lambda, x) {
                Ok(p) => p,
                Err(e) => {
                    out.push(e.to_string());
                    continue;
                }
            };
            if !(p.re > T::zero()) {
                out.push(format!("re pi(lambda) = {} is not positive at x = {x}", p.re));
                continue;
            }
            let dl = (self.spec.d.eval(x) - lambda).norm();
            let m = self.spec.b.eval(x).norm().max(self.spec.c.eval(x).norm()) / (dl * p.re.sqrt());
            if !m.is_finite() {
                out.push(format!("dominance quantity is not finite at x = {x}"));
            }
        }
        out
    }

    /// Largest `atan(|im f| / re f)` over the grid; `pi/2` or more means not sectorial.
    pub fn sectoriality_angle(&self, f: &CoefficientSpec) -> T {
        self.grid()
            .map(|x| {
                let v = f.eval(x);
                if v.norm() == T::zero() {
                    T::zero()
                } else {
                    v.im.abs().atan2(v.re)
                }
            })
            .fold(T::zero(), T::max)
    }
}

pub fn build_matrix_de<T: Real>(spec: &MatrixDeSpec) -> Result<MatrixDe<T>> {
    spec.validate()?;
    let n = spec.n_modes;
    let l = spec.length;
    let lt = T::lit(l);
    let panels = spec.quad_order();
    let wave = |k: usize| T::from_usize_lossy(k) * T::PI() / lt;

    let k_diag: Vec<T> = (1..=n).map(|k| wave(k) * wave(k)).collect();
    let a = &Mat::from_real_diag(&k_diag) + &sine_mass::<T>(&spec.q, "q", l, n, panels)?;
    let constant = |f: &CoefficientSpec| f.constant_value(l).map(|(r, i)| C::new(T::lit(r), T::lit(i)));

    let b = match constant(&spec.b) {
        Some(v) => {
            let mut m = Mat::zeros(n, n + 1);
            for j in 1..=n {
                m[(j - 1, j)] = -v * wave(j);
            }
            m
        }
        None => -&weighted_matrix::<T>(&spec.b, "b", l, n, Basis::SineDeriv, Basis::Cosine, panels)?,
    };
    let c = match constant(&spec.c) {
        Some(v) => {
            let mut m = Mat::zeros(n + 1, n);
            for k in 1..=n {
                m[(k, k - 1)] = v * wave(k);
            }
            m
        }
        None => weighted_matrix::<T>(&spec.c, "c", l, n, Basis::Cosine, Basis::SineDeriv, panels)?,
    };
    let d = match constant(&spec.d) {
        Some(v) => Mat::identity(n + 1).scale(v),
        None => weighted_matrix::<T>(&spec.d, "d", l, n, Basis::Cosine, Basis::Cosine, panels)?,
    };

    let block = BlockOperator::new(a, b, c, d)?;
    let schur = schur_family(&block, Pivot::First)?;
    let gram = GramPair::identity(n, n + 1)?;

    let reference = match (
        constant(&spec.q),
        constant(&spec.b),
        constant(&spec.c),
        constant(&spec.d),
    ) {
        (Some(q), Some(b), Some(c), Some(d)) => {
            let mut out = vec![d];
            for kk in &k_diag {
                // (d - lambda)(k^2 + q - lambda) + b c k^2 = 0
                let s = d + cr(*kk) + q;
                let p = d * (cr(*kk) + q) + b * c * *kk;
                let disc = (s * s - p * T::lit(4.0)).sqrt();
                let two = T::lit(2.0);
                out.push((s + disc) / two);
                out.push((s - disc) / two);
            }
            Some(out)
        }
        _ => None,
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("basis".into(), "dirichlet_sine x neumann_cosine".into());
    metadata.insert("n_modes".into(), n.to_string());
    metadata.insert("quadrature_order".into(), panels.to_string());
    metadata.insert(
        "coefficient_regularity".into(),
        "bounded continuous coefficients; L1loc generality not assembled".into(),
    );
    metadata.insert("weight_omega".into(), "not assembled (out of numerical scope)".into());
    let mut out = MatrixDe {
        block,
        gram,
        schur,
        reference,
        spec: spec.clone(),
        metadata,
    };
    if spec.is_accretive_variant() {
        let tq = out.sectoriality_angle(&spec.q);
        let td = out.sectoriality_angle(&spec.d);
        out.metadata.insert("accretive_variant".into(), "c = conj(b)".into());
        out.metadata
            .insert("theta_q".into(), format!("{:e}", tq.to_f64_lossy()));
        out.metadata
            .insert("theta_d".into(), format!("{:e}", td.to_f64_lossy()));
    }
    Ok(out)
}
