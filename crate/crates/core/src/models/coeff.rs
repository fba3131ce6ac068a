use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Shape of a coefficient function before scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientKind {
    Constant,
    /// `x^alpha`, `alpha > -1`.
    Power {
        alpha: f64,
    },
    /// Piecewise linear through `(x[i], y[i])`, constant beyond the end samples.
    Table {
        x: Vec<f64>,
        y: Vec<f64>,
    },
    /// `sin(frequency x)`.
    Sine {
        frequency: f64,
    },
}

/// Real or complex multiplier; written as a number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scale {
    Real(f64),
    Complex([f64; 2]),
}

impl Scale {
    pub fn parts(&self) -> (f64, f64) {
        match *self {
            Scale::Real(r) => (r, 0.0),
            Scale::Complex([re, im]) => (re, im),
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            Scale::Real(r) => Scale::Real(r),
            Scale::Complex([re, im]) => Scale::Complex([re, -im]),
        }
    }
}

impl Default for Scale {
    fn default() -> Self {
        Scale::Real(1.0)
    }
}

/// `scale * kind(x)` on `support`, zero outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub kind: CoefficientKind,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<(f64, f64)>,
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        Self {
            kind: CoefficientKind::Constant,
            scale: Scale::Real(value),
            support: None,
        }
    }

    pub fn complex_constant(re: f64, im: f64) -> Self {
        Self {
            kind: CoefficientKind::Constant,
            scale: Scale::Complex([re, im]),
            support: None,
        }
    }

    pub fn power(alpha: f64, scale: f64) -> Self {
        Self {
            kind: CoefficientKind::Power { alpha },
            scale: Scale::Real(scale),
            support: None,
        }
    }

    pub fn sine(frequency: f64, scale: Scale) -> Self {
        Self {
            kind: CoefficientKind::Sine { frequency },
            scale,
            support: None,
        }
    }

    pub fn table(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            kind: CoefficientKind::Table { x, y },
            scale: Scale::Real(1.0),
            support: None,
        }
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale.conj(),
            support: self.support,
        }
    }

    pub fn validate(&self, name: &str, length: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("coefficient `{name}`: {msg}")));
        let (re, im) = self.scale.parts();
        if !re.is_finite() || !im.is_finite() {
            return bad("scale must be finite".into());
        }
        if let Some((lo, hi)) = self.support {
            if !(lo < hi) || lo < 0.0 || hi > length || !lo.is_finite() || !hi.is_finite() {
                return bad(format!(
                    "support ({lo}, {hi}) must be a nonempty subinterval of [0, {length}]"
                ));
            }
        }
        match &self.kind {
            CoefficientKind::Constant => {}
            CoefficientKind::Power { alpha } => {
                if !(*alpha > -1.0) || !alpha.is_finite() {
                    return bad(format!("power exponent must exceed -1, got {alpha}"));
                }
            }
            CoefficientKind::Table { x, y } => {
                if x.len() < 2 || x.len() != y.len() {
                    return bad("table needs at least two samples and equal x/y lengths".into());
                }
                if x.windows(2).any(|w| !(w[0] < w[1])) || x.iter().chain(y).any(|v| !v.is_finite()) {
                    return bad("table abscissae must be finite and strictly increasing".into());
                }
            }
            CoefficientKind::Sine { frequency } => {
                if !frequency.is_finite() {
                    return bad("sine frequency must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Checks `coefficient >= 0` on `[0, length]`.
    pub fn require_nonnegative(&self, name: &str, length: f64) -> Result<()> {
        let (re, im) = self.scale.parts();
        let fail = || {
            Err(Error::Config(format!(
                "coefficient `{name}` must be real and nonnegative"
            )))
        };
        if im != 0.0 {
            return fail();
        }
        let (lo, hi) = self.support.unwrap_or((0.0, length));
        let shape_ok = match &self.kind {
            CoefficientKind::Constant | CoefficientKind::Power { .. } => true,
            CoefficientKind::Table { y, .. } => y.iter().all(|&v| v >= 0.0),
            CoefficientKind::Sine { frequency } => {
                (0..=1000).all(|i| (frequency * (lo + (hi - lo) * i as f64 / 1000.0)).sin() >= -1e-14)
            }
        };
        if re < 0.0 && !self.is_zero() || (re > 0.0 && !shape_ok) {
            return fail();
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.scale.parts() == (0.0, 0.0)
    }

    /// The constant value when the coefficient is constant on all of `[0, length]`.
    pub fn constant_value(&self, length: f64) -> Option<(f64, f64)> {
        if self.is_zero() {
            return Some((0.0, 0.0));
        }
        let full = self.support.is_none_or(|(lo, hi)| lo <= 0.0 && hi >= length);
        match self.kind {
            CoefficientKind::Constant if full => Some(self.scale.parts()),
            _ => None,
        }
    }

    /// Whether the integrand has an endpoint singularity at `x = 0` that needs
    /// the substituted first panel.
    pub fn singular_at_origin(&self) -> bool {
        match self.kind {
            CoefficientKind::Power { alpha } => alpha.fract() != 0.0 && self.support.is_none_or(|(lo, _)| lo <= 0.0),
            _ => false,
        }
    }

    /// Points where the coefficient is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some((lo, hi)) = self.support {
            out.push(lo);
            out.push(hi);
        }
        if let CoefficientKind::Table { x, .. } = &self.kind {
            out.extend(x.iter().copied());
        }
        out
    }

    pub fn eval<T: Real>(&self, x: T) -> C<T> {
        let xf = x.to_f64_lossy();
        if let Some((lo, hi)) = self.support {
            if xf < lo || xf > hi {
                return C::new(T::zero(), T::zero());
            }
        }
        let shape: T = match &self.kind {
            CoefficientKind::Constant => T::one(),
            CoefficientKind::Power { alpha } => {
                if x > T::zero() {
                    x.powf(T::lit(*alpha))
                } else {
                    T::zero()
                }
            }
            CoefficientKind::Table { x: xs, y } => T::lit(interpolate(xs, y, xf)),
            CoefficientKind::Sine { frequency } => (T::lit(*frequency) * x).sin(),
        };
        let (re, im) = self.scale.parts();
        C::new(T::lit(re) * shape, T::lit(im) * shape)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_kinds() {
        let p = CoefficientSpec::power(-0.5, 2.0);
        assert!((p.eval(4.0f64).re - 1.0).abs() < 1e-15);
        let t = CoefficientSpec::table(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]);
        assert!((t.eval(2.0f64).re - 1.0).abs() < 1e-15);
        let s = CoefficientSpec::sine(1.0, Scale::Complex([0.0, 1.0]));
        let v = s.eval(std::f64::consts::FRAC_PI_2);
        assert!(v.re.abs() < 1e-15 && (v.im - 1.0).abs() < 1e-15);
        let c = CoefficientSpec::constant(3.0).with_support(1.0, 2.0);
        assert_eq!(c.eval(0.5f64).re, 0.0);
        assert_eq!(c.eval(1.5f64).re, 3.0);
    }

    #[test]
    fn validation() {
        assert!(CoefficientSpec::power(-1.0, 1.0).validate("a", 1.0).is_err());
        assert!(CoefficientSpec::constant(1.0)
            .with_support(0.5, 2.0)
            .validate("a", 1.0)
            .is_err());
        assert!(CoefficientSpec::constant(-1.0).require_nonnegative("a", 1.0).is_err());
        assert!(CoefficientSpec::complex_constant(1.0, 1.0)
            .require_nonnegative("a", 1.0)
            .is_err());
        assert!(CoefficientSpec::sine(1.0, Scale::Real(1.0))
            .require_nonnegative("a", 3.0)
            .is_ok());
        assert!(CoefficientSpec::sine(1.0, Scale::Real(1.0))
            .require_nonnegative("a", 4.0)
            .is_err());
    }

    #[test]
    fn serde_forms() {
        let s: CoefficientSpec = serde_json::from_str(r#"{"kind": {"power": {"alpha": -0.5}}, "scale": 1.0}"#).unwrap();
        assert_eq!(s, CoefficientSpec::power(-0.5, 1.0));
        let c: CoefficientSpec = serde_json::from_str(r#"{"kind": "constant", "scale": [0.0, 2.0]}"#).unwrap();
        assert_eq!(c.scale.parts(), (0.0, 2.0));
        assert!(serde_json::from_str::<CoefficientSpec>(r#"{"kind": "constant", "bogus": 1}"#).is_err());
    }
}
