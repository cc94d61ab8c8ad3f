use chernpos::curvature::{chern_curvature, griffiths_min};
use chernpos::linalg::{c, eigenvalues, min_eig, random_unit, CMat, CVec, C};
use chernpos::metric::MetricField;
use chernpos::tautological::{
    best_chart, fiber_directions, fiber_form, induced_curvature_fd, normal_frame_check, taut_curvature_at,
    taut_curvature_in_chart, taut_positivity_scan,
};
use chernpos::tensor::CurvatureTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(n: usize, points: usize, seed: u64) -> Vec<Vec<C>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![c(0.0, 0.0); n]];
    while out.len() < points {
        out.push((0..n).map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect());
    }
    out
}

#[test]
fn projective_plane_is_positive() {
    let rep = taut_positivity_scan(&MetricField::fubini_study(2), &grid(2, 12, 1), &fiber_directions(2, 40)).unwrap();
    assert!(rep.min_eigenvalue >= 1.0 - 1e-6, "{rep:?}");
    let a = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let spot = taut_curvature_at(&CurvatureTensor::fubini_study(2), &a).unwrap();
    assert!((spot - CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]))).norm() < 1e-14);
}

#[test]
fn product_of_lines_is_quasi_positive() {
    let rep = taut_positivity_scan(&MetricField::product_fs(&[1, 1]), &grid(2, 12, 2), &fiber_directions(2, 40)).unwrap();
    assert!((-1e-8..=1e-6).contains(&rep.min_eigenvalue), "{rep:?}");
    assert!(rep.has_strictly_positive_sample(0.1), "{rep:?}");
}

#[test]
fn closed_form_matches_induced_metric_route() {
    let twisted = MetricField::new(
        2,
        2,
        std::sync::Arc::new(|z: &[C]| {
            let mut h = CMat::from_diagonal(&CVec::from_vec(vec![
                c(1.0 + z[0].norm_sqr() + 0.2 * z[1].norm_sqr(), 0.0),
                c(1.5 + 0.5 * (z[0] * z[1].conj()).re, 0.0),
            ]));
            h[(0, 1)] = z[1].conj() * c(0.4, -0.1) + z[0] * z[0].conj() * c(0.0, 0.2);
            h[(1, 0)] = h[(0, 1)].conj();
            h
        }),
    );
    let metrics = [MetricField::fubini_study(2), MetricField::product_fs(&[1, 1]), twisted];
    for metric in &metrics {
        for z in grid(2, 4, 3).iter().map(|z| z.iter().map(|x| x * 0.4).collect::<Vec<_>>()) {
            let r = chern_curvature(metric, &z).unwrap();
            for a in fiber_directions(2, 6) {
                let m = best_chart(&a);
                let closed = taut_curvature_in_chart(&r, &a, m).unwrap();
                let numeric = induced_curvature_fd(metric, &z, &a, m).unwrap();
                assert!((closed - numeric).norm() <= 1e-5);
            }
        }
    }
}

#[test]
fn normal_frame_expansion() {
    for metric in [MetricField::fubini_study(2), MetricField::product_fs(&[1, 1])] {
        for z in grid(2, 5, 4) {
            let rep = normal_frame_check(&metric, &z).unwrap();
            assert!(rep.max_first_derivative <= 1e-8);
            assert!(rep.max_deviation <= 1e-6);
        }
    }
}

#[test]
fn fiber_block_is_a_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in 2..=4 {
        for _ in 0..50 {
            let a = random_unit(&mut rng, r);
            for m in 0..r {
                let ev = eigenvalues(&fiber_form(&a, m));
                assert!(ev.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
            }
        }
    }
}

#[test]
fn semipositivity_transfers() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fs = CurvatureTensor::fubini_study(3);
    let prod = CurvatureTensor::product_fs(&[1, 2]);
    for k in 0..30 {
        let t: f64 = rng.random();
        let r = fs.mix(&prod, t);
        assert!(griffiths_min(&r, k, 16).min_value >= 0.0 - 1e-12);
        for _ in 0..20 {
            let a = random_unit(&mut rng, 3);
            let m = taut_curvature_in_chart(&r, &a, best_chart(&a)).unwrap();
            assert!(min_eig(&m) >= -1e-8);
        }
    }
}
