//! Matrix exponential by scaling and squaring with diagonal Padé approximants.

use super::{lu, Mat};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm thresholds below which the Padé approximant of each degree is
/// accurate to double precision.
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
    (13, 5.371920351148152),
];

/// Largest squaring count accepted before reporting a range error.
const MAX_SQUARINGS: i32 = 200;

pub fn expm<T: Real>(a: &Mat<T>) -> Result<Mat<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("matrix exponential of non-square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Range("matrix exponential of non-finite matrix".into()));
    }
    let n = a.nrows();
    let norm = a.norm_one().to_f64_lossy();
    for &(deg, theta) in &THETA[..4] {
        if norm <= theta {
            return pade(a, deg);
        }
    }
    let theta13 = THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::Range(format!(
            "t*|A| = {norm:.3e} is too large for scaling and squaring; use a smaller t"
        )));
    }
    let scaled = a.scale_real(T::lit(2f64.powi(-s)));
    let mut e = pade(&scaled, 13)?;
    for _ in 0..s {
        e = &e * &e;
    }
    if !e.is_finite() {
        return Err(Error::Range(format!(
            "matrix exponential overflowed for |A|_1 = {norm:.3e}; use a smaller t"
        )));
    }
    debug_assert_eq!(e.nrows(), n);
    Ok(e)
}

fn pade<T: Real>(a: &Mat<T>, degree: usize) -> Result<Mat<T>> {
    let n = a.nrows();
    let id = Mat::identity(n);
    let b: &[f64] = match degree {
        3 => &PADE3,
        5 => &PADE5,
        7 => &PADE7,
        9 => &PADE9,
        13 => &PADE13,
        _ => unreachable!("unsupported Padé degree"),
    };
    let k = |x: f64| cr(T::lit(x));
    let a2 = a * a;
    let (u, v) = if degree == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &(&a6.scale(k(b[13])) + &a4.scale(k(b[11]))) + &a2.scale(k(b[9]));
        let u = a * &(&(&(&a6 * &inner_u) + &a6.scale(k(b[7])))
            + &(&(&a4.scale(k(b[5])) + &a2.scale(k(b[3]))) + &id.scale(k(b[1]))));
        let inner_v = &(&a6.scale(k(b[12])) + &a4.scale(k(b[10]))) + &a2.scale(k(b[8]));
        let v = &(&(&a6 * &inner_v) + &a6.scale(k(b[6])))
            + &(&(&a4.scale(k(b[4])) + &a2.scale(k(b[2]))) + &id.scale(k(b[0])));
        (u, v)
    } else {
        // Even powers I, A^2, A^4, ...
        let m = degree / 2;
        let mut powers = vec![id.clone(), a2.clone()];
        for p in 2..=m {
            powers.push(&powers[p - 1] * &a2);
        }
        let mut uo = Mat::zeros(n, n);
        let mut ve = Mat::zeros(n, n);
        for (p, pw) in powers.iter().enumerate() {
            uo = &uo + &pw.scale(k(b[2 * p + 1]));
            ve = &ve + &pw.scale(k(b[2 * p]));
        }
        (a * &uo, ve)
    };
    let num = &v + &u;
    let den = &v - &u;
    lu::solve(&den, &num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cf;

    #[test]
    fn exponential_of_diagonal() {
        for s in [1e-3, 0.2, 0.9, 2.0, 5.0, 40.0] {
            let a = Mat::<f64>::from_diag(&[cf(-s, 0.0), cf(0.0, s), cf(s * 0.1, -s)]);
            let e = expm(&a).unwrap();
            for i in 0..3 {
                let want = a[(i, i)].exp();
                assert!((e[(i, i)] - want).norm() <= 1e-13 * want.norm().max(1.0), "s={s}");
            }
        }
    }

    #[test]
    fn exponential_of_nilpotent_jordan_block() {
        let a = Mat::<f64>::from_real(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        let e = expm(&a).unwrap();
        assert!(e.max_diff(&Mat::from_real(2, 2, &[1.0, 3.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn rotation_generator_gives_rotation() {
        let t = 2.5;
        let a = Mat::<f64>::from_real(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a).unwrap();
        let want = Mat::from_real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(e.max_diff(&want) < 1e-14);
    }

    #[test]
    fn huge_argument_is_a_range_error() {
        let a = Mat::<f64>::from_real(1, 1, &[1e300]);
        assert!(matches!(expm(&a), Err(Error::Range(_))));
    }
}
