use chernpos::extremal::{extremize_sectional, sectional, verify_lemma_linear, verify_lemma_linear1, Mode};
use chernpos::linalg::{c, CVec};
use chernpos::tensor::CurvatureTensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Min and max of `H` over `(cos t, sin t e^{i p})`, which covers the unit
/// sphere of `C^2` up to phase.
fn sweep(r: &CurvatureTensor, steps: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=steps {
        let t = FRAC_PI_2 * i as f64 / steps as f64;
        for j in 0..steps {
            let p = TAU * j as f64 / steps as f64;
            let e = CVec::from_vec(vec![c(t.cos(), 0.0), c(t.sin() * p.cos(), t.sin() * p.sin())]);
            let h = sectional(r, &e);
            lo = lo.min(h);
            hi = hi.max(h);
        }
    }
    (lo, hi)
}

#[test]
fn optimizer_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..5 {
        let r = CurvatureTensor::random_kahler(2, &mut rng);
        let (lo, hi) = sweep(&r, 400);
        let min = extremize_sectional(&r, Mode::Min, k, 32).unwrap();
        let max = extremize_sectional(&r, Mode::Max, k, 32).unwrap();
        assert!(min.value <= lo + 1e-12 && lo - min.value <= 1e-4, "{} {}", min.value, lo);
        assert!(max.value >= hi - 1e-12 && max.value - hi <= 1e-4, "{} {}", max.value, hi);
    }
}

#[test]
fn witness_reproduces_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for k in 0..20 {
        let r = CurvatureTensor::random_kahler(2 + k % 2, &mut rng);
        for mode in [Mode::Min, Mode::Max] {
            let w = extremize_sectional(&r, mode, k as u64, 16).unwrap();
            assert!((sectional(&r, &w.e) - w.value).abs() <= 1e-10);
            assert!((w.e.norm() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn scaling_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 0..10 {
        let r = CurvatureTensor::random_kahler(3, &mut rng);
        let w = extremize_sectional(&r, Mode::Min, k, 32).unwrap();
        let ws = extremize_sectional(&r.scaled(2.5), Mode::Min, k, 32).unwrap();
        assert!((ws.value - 2.5 * w.value).abs() <= 1e-9);
        let overlap = w.e.dotc(&ws.e).norm();
        assert!((overlap - 1.0).abs() <= 1e-6, "{overlap}");
    }
}

#[test]
fn lemma_suites_on_random_tensors() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 0..60 {
        let r = CurvatureTensor::random_kahler(2 + k % 2, &mut rng);
        let lin = verify_lemma_linear(&r, 200, k as u64).unwrap();
        let lin1 = verify_lemma_linear1(&r, 200, k as u64).unwrap();
        assert!(lin.pass, "{lin:?}");
        assert!(lin1.pass, "{lin1:?}");
    }
}
