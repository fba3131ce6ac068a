use super::{vec_norm, Lu, Mat, Svd};
use crate::error::Result;
use crate::scalar::{Real, C};

/// Below this size the smallest singular value comes straight from the SVD.
const DIRECT_LIMIT: usize = 24;
const MAX_INVERSE_STEPS: usize = 300;

/// Smallest singular value of a square matrix.
///
/// Small matrices use the Jacobi SVD; larger ones run inverse iteration on
/// `(M* M)^{-1}` through one LU factorization, falling back to the SVD when the
/// iteration stalls.
pub fn sigma_min<T: Real>(m: &Mat<T>) -> Result<T> {
    let n = m.nrows();
    if n <= DIRECT_LIMIT || !m.is_square() {
        return Ok(Svd::new(m)?.sigma_min());
    }
    let lu = Lu::new(m)?;
    if lu.is_singular() {
        return Ok(T::zero());
    }
    // Deterministic start vector with no special structure.
    let mut x: Vec<C<T>> = (0..n)
        .map(|i| {
            let t = T::from_usize_lossy(i + 1);
            C::new(
                (t * T::lit(0.7548776662466927)).sin(),
                (t * T::lit(0.5698402909980532)).cos(),
            )
        })
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);

    let tol = T::lit(64.0) * T::epsilon();
    let mut prev = T::zero();
    for _ in 0..MAX_INVERSE_STEPS {
        let y = lu.solve_vec(&x)?;
        let w = lu.solve_adjoint_vec(&y)?;
        // |y|^2 = x* (M* M)^{-1} x is the Rayleigh quotient.
        let ny = vec_norm(&y);
        let nw = vec_norm(&w);
        if !ny.is_finite() || !nw.is_finite() || nw.is_zero() {
            return Ok(Svd::new(m)?.sigma_min());
        }
        let est = ny * ny;
        x = w.iter().map(|&z| z / nw).collect();
        if (est - prev).abs() <= tol * est {
            return Ok(T::one() / est.sqrt());
        }
        prev = est;
    }
    Ok(Svd::new(m)?.sigma_min())
}

/// `sigma_min(M - lambda I)`.
pub fn sigma_min_shifted<T: Real>(m: &Mat<T>, lambda: C<T>) -> Result<T> {
    sigma_min(&m.shifted(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_svd_on_large_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [30usize, 60] {
            let a = Mat::<f64>::random_normal(n, n, &mut rng);
            let want = Svd::new(&a).unwrap().sigma_min();
            let got = sigma_min(&a).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.max(1e-3), "{got} vs {want}");
        }
    }

    #[test]
    fn distance_to_spectrum_of_normal_matrix() {
        let d: Vec<C<f64>> = (0..40).map(|k| cf(k as f64, 0.5 * k as f64)).collect();
        let m = Mat::from_diag(&d);
        let got = sigma_min_shifted(&m, cf(3.2, 1.1)).unwrap();
        let want = d
            .iter()
            .map(|z| (z - cf(3.2, 1.1)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((got - want).abs() < 1e-12);
    }
}
