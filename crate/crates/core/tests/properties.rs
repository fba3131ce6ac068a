//! Property tests for the structural invariants.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schurlab::blockop::{
    determinant_split, frobenius_schur_inverse, left_approx_inverse, BlockOperator, ExcludedSet, OperatorFamily,
};
use schurlab::linalg::{cond2, eigenvalues, inverse, sigma_min, Mat, Svd};
use schurlab::models::{
    build_damped_wave, build_klein_gordon, build_matrix_de, CoefficientSpec, DampedWaveSpec, KleinGordonSpec,
    MatrixDeSpec, ModelSpec,
};
use schurlab::nep::{beyn_solve, poly_eval, polyeig, spectral_distance, ContourSpec, NepResult};
use schurlab::pseudoinv::{
    gen_inverse_identities, generalized_inverse, penrose_residuals, shifted_extension_matrix, TolPolicy,
};
use schurlab::scalar::cf;
use schurlab::verify::{block_spectrum, pseudospectrum, GridSpec, PseudoTarget, Window};
use schurlab::{Mat32, Mat64, C64};

fn randn(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat64 {
    Mat::random_normal(rows, cols, rng)
}

fn c(re: f64, im: f64) -> C64 {
    cf(re, im)
}

fn rank_deficient(m: usize, n: usize, r: usize, rng: &mut ChaCha8Rng) -> Mat64 {
    &randn(m, r, rng) * &randn(r, n, rng)
}

fn random_op(n1: usize, n2: usize, rng: &mut ChaCha8Rng) -> BlockOperator<f64> {
    BlockOperator::new(
        randn(n1, n1, rng),
        randn(n1, n2, rng),
        randn(n2, n1, rng),
        randn(n2, n2, rng),
    )
    .unwrap()
}

fn random_lambda(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn penrose_conditions_hold_under_rank_deficiency(seed: u64, m in 1usize..7, n in 1usize..7, drop in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = m.min(n).saturating_sub(drop);
        let t = if r == 0 { Mat::zeros(m, n) } else { rank_deficient(m, n, r, &mut rng) };
        let b = generalized_inverse(&t, TolPolicy::Default).unwrap();
        prop_assert_eq!(b.rank, r);
        prop_assert!(penrose_residuals(&t, &b.pinv).max() <= 1e-11);
        prop_assert!(gen_inverse_identities(&t, &b).unwrap().max() <= 1e-11);
        // Projector traces are the kernel and cokernel dimensions.
        let tp = b.proj_kernel.trace();
        let tq = b.proj_cokernel.trace();
        prop_assert!((tp.re - (n - r) as f64).abs() < 1e-10 && tp.im.abs() < 1e-10);
        prop_assert!((tq.re - (m - r) as f64).abs() < 1e-10 && tq.im.abs() < 1e-10);
    }

    #[test]
    fn invertible_matrices_have_zero_projectors(seed: u64, n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = randn(n, n, &mut rng).shifted(c(-4.0 * n as f64, 0.0));
        prop_assume!(cond2(&t).unwrap() < 1e6);
        let b = generalized_inverse(&t, TolPolicy::Default).unwrap();
        let inv = inverse(&t).unwrap();
        prop_assert!(b.pinv.max_diff(&inv) <= 1e-12 * inv.max_abs());
        prop_assert!(b.proj_kernel.max_abs() <= 1e-12);
        prop_assert!(b.proj_cokernel.max_abs() <= 1e-12);
    }

    #[test]
    fn shifted_extension_restricts_to_pinv(seed: u64, n in 2usize..7, zr in -5.0f64..-0.5, zi in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = rank_deficient(n, n, n - 1, &mut rng);
        let z = c(zr, zi);
        prop_assume!(cond2(&s.shifted(z)).unwrap() < 1e6);
        let ext = shifted_extension_matrix(&s, z).unwrap();
        let pinv = generalized_inverse(&s, TolPolicy::Default).unwrap().pinv;
        prop_assert!(ext.max_diff(&pinv) <= 1e-9 * pinv.max_abs().max(1.0));
    }

    #[test]
    fn determinant_splits_over_the_pivot(seed: u64, n1 in 1usize..11, n2 in 1usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_op(n1, n2, &mut rng);
        let l = random_lambda(&mut rng);
        prop_assume!(cond2(&op.d.shifted(l)).unwrap() < 1e8);
        prop_assume!(cond2(&op.assemble().shifted(l)).unwrap() < 1e8);
        let d = determinant_split(&op, l).unwrap();
        prop_assert!(d.residual <= 1e-8, "{:?}", d);
    }

    #[test]
    fn left_inverse_defect_rank_is_the_kernel_sum(seed: u64, n1 in 2usize..6, n2 in 2usize..6, kd in 0usize..2, ks in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lambda(&mut rng);
        let d = if kd == 0 { randn(n2, n2, &mut rng) } else { rank_deficient(n2, n2, n2 - kd, &mut rng).shifted(-l) };
        let b = randn(n1, n2, &mut rng);
        let cc = randn(n2, n1, &mut rng);
        let dg = generalized_inverse(&d.shifted(l), TolPolicy::Default).unwrap().pinv;
        let low = if ks == 0 { randn(n1, n1, &mut rng) } else { rank_deficient(n1, n1, n1 - ks, &mut rng) };
        let a = &(&Mat::identity(n1).scale(l) + &(&(&b * &dg) * &cc)) + &low;
        let op = BlockOperator::new(a, b, cc, d).unwrap();
        // Random factors are generic, so the constructed coranks are exact.
        prop_assume!(kd > 0 || cond2(&op.d.shifted(l)).unwrap() < 1e6);
        prop_assume!(ks > 0 || cond2(&low).unwrap() < 1e6);
        let li = left_approx_inverse(&op, l, TolPolicy::Default).unwrap();
        prop_assert_eq!(li.ker_pivot_dim, kd);
        prop_assert_eq!(li.ker_schur_dim, ks);
        prop_assert_eq!(li.rank_k, kd + ks);
        prop_assert!(li.identity_residual <= 1e-10);
    }

    #[test]
    fn frobenius_inverse_is_the_inverse(seed: u64, n1 in 1usize..8, n2 in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_op(n1, n2, &mut rng);
        let l = random_lambda(&mut rng);
        let full = op.assemble().shifted(l);
        prop_assume!(cond2(&op.d.shifted(l)).unwrap() < 1e6 && cond2(&full).unwrap() < 1e6);
        let inv = inverse(&full).unwrap();
        let fs = frobenius_schur_inverse(&op, l).unwrap();
        prop_assert!(fs.max_diff(&inv) <= 1e-8 * inv.max_abs().max(1.0));
    }

    #[test]
    fn spectral_distance_is_symmetric(seed: u64, na in 0usize..6, nb in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<C64> = (0..na).map(|_| random_lambda(&mut rng)).collect();
        let b: Vec<C64> = (0..nb).map(|_| random_lambda(&mut rng)).collect();
        let ab = spectral_distance(&a, &b);
        let ba = spectral_distance(&b, &a);
        prop_assert_eq!(ab.hausdorff, ba.hausdorff);
        prop_assert_eq!(ab.matching_max, ba.matching_max);
        prop_assert_eq!(spectral_distance(&a, &a).hausdorff, 0.0);
    }

    #[test]
    fn diagonal_pseudospectrum_is_distance_to_spectrum(seed: u64, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: Vec<C64> = (0..n).map(|_| random_lambda(&mut rng)).collect();
        let m = Mat::from_diag(&d);
        let grid = GridSpec::new(Window::new(-2.5, 2.5, -2.5, 2.5), 9, 7);
        let r = pseudospectrum(PseudoTarget::Matrix(&m), None, &grid, "diag").unwrap();
        let g = r.grid_data.unwrap();
        for (i, &x) in g.re.iter().enumerate() {
            for (j, &y) in g.im.iter().enumerate() {
                let dist = d.iter().map(|z| (*z - c(x, y)).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!((g.values[i][j] - dist).abs() <= 1e-12);
            }
        }
    }
}

/// Monic quadratic `lambda^2 + lambda M1 + M0` with random 3x3 coefficients.
fn random_quadratic(rng: &mut ChaCha8Rng) -> Vec<Mat64> {
    vec![
        randn(3, 3, rng).scale_real(0.5),
        randn(3, 3, rng).scale_real(0.5),
        Mat::identity(3),
    ]
}

fn family_of(coeffs: Vec<Mat64>) -> OperatorFamily<f64> {
    OperatorFamily::new("poly", 3, ExcludedSet::empty(), move |l| Ok(poly_eval(&coeffs, l)))
}

fn solve(fam: &OperatorFamily<f64>, center: C64, radius: f64, nodes: usize) -> NepResult<f64> {
    let contour = ContourSpec::circle(center, radius)
        .with_nodes(nodes)
        .with_probes(3)
        .with_moments(2);
    beyn_solve(fam, &contour, 1e-8).unwrap()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn beyn_agrees_with_linearization(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = random_quadratic(&mut rng);
        let roots = polyeig(&coeffs).unwrap().eigenvalues;
        // A radius with no root within 10% of the circle, so the trapezoid rule converges fast.
        let radius = [1.0, 0.7, 1.4, 0.5, 2.0]
            .into_iter()
            .find(|r| roots.iter().all(|z| (z.norm() / r - 1.0).abs() > 0.1));
        prop_assume!(radius.is_some());
        let radius = radius.unwrap();
        let inside: Vec<C64> = roots.into_iter().filter(|z| z.norm() < radius).collect();
        let fam = family_of(coeffs);
        let r = solve(&fam, c(0.0, 0.0), radius, 512);
        prop_assert_eq!(r.eigenvalues.len(), inside.len());
        prop_assert!(spectral_distance(&r.eigenvalues, &inside).matching_max <= 1e-8);
        for (res, l) in r.residuals.iter().zip(&r.eigenvalues) {
            prop_assert!(*res <= 1e-8);
            prop_assert!(r.rejected.iter().all(|x| x.lambda != *l));
        }

        let doubled = solve(&fam, c(0.0, 0.0), radius, 1024);
        prop_assert!(spectral_distance(&r.eigenvalues, &doubled.eigenvalues).matching_max <= 1e-8);

        // Shifting the family by delta moves every root by -delta.
        let delta = c(0.3, -0.2);
        let moved = solve(&fam.shifted(delta), -delta, radius, 512);
        let back: Vec<C64> = moved.eigenvalues.iter().map(|z| *z + delta).collect();
        prop_assert!(spectral_distance(&r.eigenvalues, &back).matching_max <= 1e-10);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn block_eigenvalues_are_schur_roots(n in 6usize..14, scale in 0.1f64..2.0, alpha in 0.0f64..2.0) {
        let spec = DampedWaveSpec::new(PI, n, CoefficientSpec::power(alpha, scale), CoefficientSpec::constant(0.0));
        let m = build_damped_wave::<f64>(&spec).unwrap();
        for (l, _) in block_spectrum(&m.block, None, m.schur.excluded()).unwrap() {
            let s = m.schur.evaluate(l).unwrap();
            prop_assert!(sigma_min(&s).unwrap() <= 1e-8 * s.norm_fro());
        }
    }

    #[test]
    fn matrix_de_block_eigenvalues_are_schur_roots(q in 0.0f64..2.0, b in 0.1f64..2.0, d in 3.0f64..8.0) {
        let k = CoefficientSpec::constant;
        let m = build_matrix_de::<f64>(&MatrixDeSpec::new(PI, 8, k(q), k(b), k(b), k(d))).unwrap();
        let block: Vec<C64> = block_spectrum(&m.block, None, m.schur.excluded()).unwrap().into_iter().map(|p| p.0).collect();
        for l in &block {
            let s = m.schur.evaluate(*l).unwrap();
            prop_assert!(sigma_min(&s).unwrap() <= 1e-8 * s.norm_fro());
        }
        // Conversely, contour roots of the Schur family lie on the block spectrum.
        let contour = ContourSpec::circle(c(d + 2.0, 0.0), 1.5).with_nodes(256).with_probes(8).with_moments(2);
        prop_assume!(block.iter().all(|z| ((z - c(d + 2.0, 0.0)).norm() - 1.5).abs() > 0.2));
        prop_assume!(m.schur.excluded().points.iter().all(|z| ((z - c(d + 2.0, 0.0)).norm() - 1.5).abs() > 0.2));
        let r = beyn_solve(&m.schur, &contour, 1e-8).unwrap();
        for z in &r.eigenvalues {
            let near = block.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(near <= 1e-8);
        }
    }

    #[test]
    fn singular_damping_quadrature_doubles_stably(alpha in -0.5f64..2.0, scale in 0.2f64..2.0) {
        let coarse = DampedWaveSpec::new(PI, 10, CoefficientSpec::power(alpha, scale), CoefficientSpec::constant(0.0));
        let mut fine = coarse.clone();
        fine.quad_order = Some(2 * coarse.quad_order());
        let a = build_damped_wave::<f64>(&coarse).unwrap().damping;
        let b = build_damped_wave::<f64>(&fine).unwrap().damping;
        prop_assert!(a.max_diff(&b) <= 1e-8 * b.max_abs());
    }

    #[test]
    fn klein_gordon_low_spectrum_is_lambda_independent(r in 0.0f64..1.0, theta in 0.0f64..(2.0 * PI)) {
        let kg = build_klein_gordon::<f64>(&KleinGordonSpec::new(1.0, 64)).unwrap();
        let l = c(r * theta.cos(), r * theta.sin());
        let base = kg.kept_spectrum(c(0.0, 0.0)).unwrap().kept;
        let here = kg.kept_spectrum(l).unwrap().kept;
        prop_assert_eq!(base.len(), 32);
        prop_assert!(spectral_distance(&base, &here).matching_max <= 1e-6);
    }

    #[test]
    fn damped_wave_spec_json_round_trip(n in 4usize..64, len in 0.5f64..10.0, a in -2.0f64..2.0, q in 0.0f64..3.0) {
        let spec = ModelSpec::DampedWave(DampedWaveSpec::new(len, n, CoefficientSpec::constant(a), CoefficientSpec::constant(q)));
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn single_precision_smoke() {
    let spec = DampedWaveSpec::new(PI, 6, CoefficientSpec::constant(0.5), CoefficientSpec::constant(0.0));
    let m32 = build_damped_wave::<f32>(&spec).unwrap();
    let m64 = build_damped_wave::<f64>(&spec).unwrap();
    let a: Mat32 = m32.block.assemble();
    assert!(a.cast::<f64>().max_diff(&m64.block.assemble()) < 1e-5);
    let ev: Vec<C64> = eigenvalues(&a)
        .unwrap()
        .iter()
        .map(|z| c(z.re as f64, z.im as f64))
        .collect();
    let reference = m64.reference.unwrap();
    assert!(spectral_distance(&ev, &reference).matching_max < 1e-4);
    assert!(Svd::new(&a).unwrap().sigma_max().is_finite());
}
