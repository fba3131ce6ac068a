//! Adaptive Gauss–Legendre quadrature of vector-valued integrands.

use std::sync::OnceLock;

use crate::scalar::{Real, C};

const GL_POINTS: usize = 20;
const MAX_DEPTH: usize = 40;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// How a panel maps its quadrature variable `u` to `x`.
#[derive(Clone, Copy, Debug)]
enum PanelMap<T> {
    Linear,
    /// `x = x0 + h u^2`, `u in [0, 1]`: removes `(x - x0)^alpha` endpoint singularities.
    Quadratic {
        x0: T,
        h: T,
    },
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct Integral<T: Real> {
    pub values: Vec<C<T>>,
    /// Largest unresolved local error estimate, zero when every panel converged.
    pub unresolved: T,
}

/// Integrates `f` (writing `len` values at `x` into its output slice) over
/// `[a, b]`.
///
/// The interval is cut into `panels` equal pieces, further split at
/// `breakpoints`; panels are bisected until the 20-point rule agrees with its
/// two halves to `abs_tol` (shared out by panel length). When `singular_left`
/// is set, the first panel uses a quadratic substitution at `a`.
pub fn integrate<T: Real, F>(
    f: F,
    len: usize,
    a: T,
    b: T,
    panels: usize,
    breakpoints: &[T],
    singular_left: bool,
    abs_tol: T,
) -> Integral<T>
where
    F: Fn(T, &mut [C<T>]),
{
    let mut cuts: Vec<T> = (0..=panels.max(1))
        .map(|i| a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(panels.max(1)))
        .collect();
    cuts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (b - a).abs());

    let mut q = Quad {
        f: &f,
        len,
        total: b - a,
        tol: abs_tol,
        acc: vec![C::new(T::zero(), T::zero()); len],
        unresolved: T::zero(),
    };
    for (i, w) in cuts.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        if i == 0 && singular_left {
            let map = PanelMap::Quadratic { x0: lo, h: hi - lo };
            q.panel(map, T::zero(), T::one(), hi - lo);
        } else {
            q.panel(PanelMap::Linear, lo, hi, hi - lo);
        }
    }
    Integral {
        values: q.acc,
        unresolved: q.unresolved,
    }
}

struct Quad<'a, T: Real, F> {
    f: &'a F,
    len: usize,
    total: T,
    tol: T,
    acc: Vec<C<T>>,
    unresolved: T,
}

impl<T: Real, F: Fn(T, &mut [C<T>])> Quad<'_, T, F> {
    fn rule(&self, map: PanelMap<T>, lo: T, hi: T) -> Vec<C<T>> {
        let (xs, ws) = rule();
        let half = (hi - lo) / T::lit(2.0);
        let mid = (hi + lo) / T::lit(2.0);
        let mut out = vec![C::new(T::zero(), T::zero()); self.len];
        let mut buf = vec![C::new(T::zero(), T::zero()); self.len];
        for (&xi, &wi) in xs.iter().zip(ws) {
            let u = mid + half * T::lit(xi);
            let (x, jac) = match map {
                PanelMap::Linear => (u, T::one()),
                PanelMap::Quadratic { x0, h } => (x0 + h * u * u, T::lit(2.0) * h * u),
            };
            (self.f)(x, &mut buf);
            let w = T::lit(wi) * half * jac;
            for (o, v) in out.iter_mut().zip(&buf) {
                *o += *v * w;
            }
        }
        out
    }

    /// `width` is the panel length in `x`, used to share out the tolerance.
    fn panel(&mut self, map: PanelMap<T>, lo: T, hi: T, width: T) {
        let whole = self.rule(map, lo, hi);
        self.refine(map, lo, hi, width, whole, 0);
    }

    fn refine(&mut self, map: PanelMap<T>, lo: T, hi: T, width: T, whole: Vec<C<T>>, depth: usize) {
        let mid = (lo + hi) / T::lit(2.0);
        let left = self.rule(map, lo, mid);
        let right = self.rule(map, mid, hi);
        let mut err = T::zero();
        for i in 0..self.len {
            err = err.max((left[i] + right[i] - whole[i]).norm());
        }
        let budget = self.tol * (width / self.total).abs();
        if err <= budget || depth >= MAX_DEPTH {
            if err > budget {
                self.unresolved = self.unresolved.max(err);
            }
            for i in 0..self.len {
                self.acc[i] += left[i] + right[i];
            }
            return;
        }
        // In the quadratic map the x-width of each half is not half the panel;
        // splitting the budget evenly is still conservative.
        let half = width / T::lit(2.0);
        self.refine(map, lo, mid, half, left, depth + 1);
        self.refine(map, mid, hi, half, right, depth + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // int_{-1}^{1} x^38 = 2/39
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_and_singular_integrands() {
        let r = integrate(
            |x: f64, out: &mut [C<f64>]| {
                out[0] = C::new((40.0 * x).sin().powi(2), 0.0);
                out[1] = C::new(x.powf(-0.5), 0.0);
            },
            2,
            0.0,
            std::f64::consts::PI,
            8,
            &[],
            true,
            1e-12,
        );
        assert_eq!(r.unresolved, 0.0);
        assert!((r.values[0].re - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((r.values[1].re - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
