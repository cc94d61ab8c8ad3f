//! Chern curvature of a metric field at a point, and positivity diagnostics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fd;
use crate::linalg::{identity_frame, least_eigvec, min_eig, random_unit, trace_norm, CMat, CVec, C};
use crate::metric::{DiffMethod, MetricField, MetricJet};
use crate::tensor::{CurvatureTensor, Symmetry};
use crate::GeomError;

/// Default number of multi-start runs for [`griffiths_min`].
pub const DEFAULT_RESTARTS: usize = 32;

/// `R = -d dbar H + (d H) H^{-1} (dbar H)` in the coordinate frame.
pub fn coordinate_curvature(jet: &MetricJet, symmetry: Symmetry) -> Result<CurvatureTensor, GeomError> {
    let n = jet.d.len();
    let r = jet.h.nrows();
    let hinv = jet.h.clone().try_inverse().ok_or(GeomError::NotPositiveDefinite(0.0))?;
    let mut second = vec![vec![CMat::zeros(r, r); n]; n];
    for i in 0..n {
        for j in 0..n {
            second[i][j] = &jet.d[i] * &hinv * jet.d[j].adjoint() - &jet.dd[i][j];
        }
    }
    Ok(CurvatureTensor::from_fn(n, r, symmetry, |i, j, a, b| second[i][j][(a, b)]))
}

/// Chern curvature in a frame where the metric is the identity at `z`. Base
/// indices are changed too when the bundle is the tangent bundle. The tensor
/// is projected onto its symmetry class; the defect is kept on the tensor.
pub fn chern_curvature(metric: &MetricField, z: &[C]) -> Result<CurvatureTensor, GeomError> {
    let jet = metric.jet(z)?;
    let symmetry = if metric.is_kahler() { Symmetry::Kahler } else { Symmetry::Hermitian };
    let raw = coordinate_curvature(&jet, symmetry)?;
    let p = identity_frame(&jet.h)?;
    let base = metric.is_tangent().then_some(&p);
    Ok(raw.transform(base, &p).project())
}

/// `-d dbar log det H` in coordinates. Uses the closed-form jet when present,
/// otherwise differentiates `log det H` numerically.
pub fn chern_ricci(metric: &MetricField, z: &[C]) -> Result<CMat, GeomError> {
    let h = metric.evaluate(z)?;
    let n = metric.base_dim();
    if metric.has_closed_form() && metric.diff.method == DiffMethod::Auto {
        let jet = metric.jet(z)?;
        let hinv = h.try_inverse().ok_or(GeomError::NotPositiveDefinite(0.0))?;
        return Ok(CMat::from_fn(n, n, |i, j| {
            let a = (&hinv * &jet.dd[i][j]).trace();
            let b = (&hinv * &jet.d[i] * &hinv * jet.d[j].adjoint()).trace();
            b - a
        }));
    }
    let f = |p: &[C]| {
        let det = metric.raw(p).determinant();
        vec![C::new(-det.re.ln(), 0.0)]
    };
    let dd = fd::wirtinger_mixed(&f, z, &metric.diff.steps);
    let out = CMat::from_fn(n, n, |i, j| dd[i][j][0]);
    if !crate::linalg::is_finite(&out) {
        return Err(GeomError::NonFinite("log det"));
    }
    Ok(out)
}

fn check_unit(what: &'static str, v: &CVec, dim: usize) -> Result<(), GeomError> {
    if v.len() != dim {
        return Err(GeomError::Dimension { expected: dim, found: v.len() });
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(GeomError::NotUnit { what, norm });
    }
    Ok(())
}

/// `sum R_{i jbar k lbar} u^i conj(u^j) v^k conj(v^l)` for unit `u`, `v`.
pub fn bisectional(r: &CurvatureTensor, u: &CVec, v: &CVec) -> Result<f64, GeomError> {
    check_unit("u", u, r.base_dim())?;
    check_unit("v", v, r.rank())?;
    Ok(r.eval(u, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The witness pair evaluates to the reported negative value.
    NegativeWitness,
    /// No negative value found; the minimum is a heuristic estimate.
    HeuristicNonnegative,
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub min_value: f64,
    pub u: CVec,
    pub v: CVec,
    pub restarts: usize,
    pub converged: bool,
    pub certificate: Certificate,
}

/// Minimizes `R(u, ubar, v, vbar)` over unit pairs by alternating least
/// eigenvectors: for fixed `v` the best `u` is an eigenvector of `A(v)`, and
/// symmetrically. Each sweep cannot increase the value.
pub fn griffiths_min(r: &CurvatureTensor, seed: u64, restarts: usize) -> PositivityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let restarts = restarts.max(1);
    let mut best: Option<(f64, CVec, CVec, bool)> = None;
    for start in 0..restarts {
        let mut v = if start < r.rank() {
            CVec::from_fn(r.rank(), |a, _| C::new(f64::from(u8::from(a == start)), 0.0))
        } else {
            random_unit(&mut rng, r.rank())
        };
        let mut u = CVec::zeros(r.base_dim());
        let mut prev = f64::INFINITY;
        let mut converged = false;
        for _ in 0..500 {
            let (_, x) = least_eigvec(&r.base_form(&v));
            u = x.map(|c| c.conj());
            let (value, y) = least_eigvec(&r.fiber_form(&u));
            v = y.map(|c| c.conj());
            if prev - value <= 1e-15 * value.abs().max(1.0) {
                converged = true;
                break;
            }
            prev = value;
        }
        let value = r.eval(&u, &v);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, u, v, converged));
        }
    }
    let (min_value, u, v, converged) = best.expect("at least one restart");
    let certificate = if min_value < 0.0 { Certificate::NegativeWitness } else { Certificate::HeuristicNonnegative };
    PositivityReport { min_value, u, v, restarts, converged, certificate }
}

/// Least eigenvalue of the Nakano matrix `N[(i,a)][(j,b)] = R_{i jbar a bbar}`.
pub fn nakano_min(r: &CurvatureTensor) -> f64 {
    min_eig(&r.nakano_matrix())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceReport {
    pub all_psd: bool,
    pub min_eigenvalue: f64,
}

/// Checks that every slice `S_k[i][j] = R_{i jbar k kbar}` is positive
/// semidefinite up to `tol`.
pub fn psd_slice_check(r: &CurvatureTensor, tol: f64) -> SliceReport {
    let mut least = f64::INFINITY;
    for k in 0..r.rank() {
        let e = CVec::from_fn(r.rank(), |a, _| C::new(f64::from(u8::from(a == k)), 0.0));
        least = least.min(min_eig(&r.base_form(&e)));
    }
    SliceReport { all_psd: least >= -tol, min_eigenvalue: least }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessVerdict {
    pub pass: bool,
    pub max_entry: f64,
    pub ricci_trace_norm: f64,
    pub bound: f64,
}

/// Constant in `max |R| <= C * ||Ric||_1`.
///
/// For a Griffiths semipositive `R` and unit `v`, the slice `S_v = R(., ., v, vbar)`
/// is PSD and `S_v <= Ric`, since `Ric` is the sum of the slices over any
/// unitary basis containing `v`. So `|S_v| <= ||Ric||`. Polarizing,
/// `R_{. . k lbar} = 1/4 sum_t e^{it} S_{e_k + e^{it} e_l}` over the four
/// quarter turns, and `|e_k + e^{it} e_l|^2 = 2` gives the factor 2.
pub const FLATNESS_CONSTANT: f64 = 2.0;

/// Checks `max |R| <= 2 (||Ric||_1 + n tol) + tol` for a Griffiths
/// semipositive tensor on a tangent bundle.
pub fn flat_if_ricci_flat(r: &CurvatureTensor, tol: f64, seed: u64) -> Result<FlatnessVerdict, GeomError> {
    if r.base_dim() != r.rank() {
        return Err(GeomError::Precondition("tensor must live on a tangent bundle".into()));
    }
    let report = griffiths_min(r, seed, DEFAULT_RESTARTS);
    if report.min_value < -tol {
        return Err(GeomError::Precondition(format!(
            "tensor is not Griffiths semipositive (minimum {:e})",
            report.min_value
        )));
    }
    let ricci_trace_norm = trace_norm(&r.fiber_trace());
    let n = r.base_dim() as f64;
    let bound = FLATNESS_CONSTANT * (ricci_trace_norm + n * tol) + tol;
    let max_entry = r.max_abs();
    Ok(FlatnessVerdict { pass: max_entry <= bound, max_entry, ricci_trace_norm, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn unit(n: usize, k: usize) -> CVec {
        CVec::from_fn(n, |i, _| c(f64::from(u8::from(i == k)), 0.0))
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let r = chern_curvature(&MetricField::flat(2), &[c(0.5, -1.0), c(2.0, 0.0)]).unwrap();
        assert!(r.max_abs() < 1e-10);
        assert_eq!(r.symmetry(), Symmetry::Kahler);
    }

    #[test]
    fn fubini_study_at_origin() {
        let r = chern_curvature(&MetricField::fubini_study(2), &[c(0.0, 0.0); 2]).unwrap();
        assert!(r.max_abs_diff(&CurvatureTensor::fubini_study(2)) < 1e-8);
        let ric = chern_ricci(&MetricField::fubini_study(2), &[c(0.0, 0.0); 2]).unwrap();
        assert!((ric - CMat::identity(2, 2).map(|x| x * 3.0)).norm() < 1e-6);
    }

    #[test]
    fn bisectional_examples() {
        let fs = CurvatureTensor::fubini_study(2);
        let (e0, e1) = (unit(2, 0), unit(2, 1));
        assert!((bisectional(&fs, &e0, &e1).unwrap() - 1.0).abs() < 1e-15);
        assert!((bisectional(&fs, &e0, &e0).unwrap() - 2.0).abs() < 1e-15);
        let zero = CurvatureTensor::zero(2, 2, Symmetry::Kahler);
        assert_eq!(bisectional(&zero, &e0, &e1).unwrap(), 0.0);
        let long = e0.map(|x| x * 2.0);
        assert!(matches!(bisectional(&fs, &long, &e1), Err(GeomError::NotUnit { .. })));
    }

    #[test]
    fn griffiths_examples() {
        let fs = CurvatureTensor::fubini_study(2);
        let rep = griffiths_min(&fs, 1, DEFAULT_RESTARTS);
        assert!((rep.min_value - 1.0).abs() < 1e-12);
        assert_eq!(rep.certificate, Certificate::HeuristicNonnegative);
        let neg = griffiths_min(&fs.scaled(-1.0), 1, DEFAULT_RESTARTS);
        assert!((neg.min_value + 2.0).abs() < 1e-12);
        assert_eq!(neg.certificate, Certificate::NegativeWitness);
        assert!((neg.u.dotc(&neg.v).norm() - 1.0).abs() < 1e-6);
        let replay = bisectional(&fs.scaled(-1.0), &neg.u, &neg.v).unwrap();
        assert!((replay - neg.min_value).abs() < 1e-10);
        let zero = griffiths_min(&CurvatureTensor::zero(2, 2, Symmetry::Kahler), 1, 4);
        assert_eq!(zero.min_value, 0.0);
    }

    #[test]
    fn nakano_of_fubini_study() {
        // N = I + swap on C^2 (x) C^2, eigenvalues {0, 2, 2, 2}.
        assert!(nakano_min(&CurvatureTensor::fubini_study(2)).abs() < 1e-14);
        assert_eq!(nakano_min(&CurvatureTensor::zero(2, 2, Symmetry::Kahler)), 0.0);
    }

    #[test]
    fn slices() {
        let fs = CurvatureTensor::fubini_study(2);
        let s = psd_slice_check(&fs, 1e-12);
        assert!(s.all_psd && (s.min_eigenvalue - 1.0).abs() < 1e-14);
        assert!(psd_slice_check(&CurvatureTensor::zero(2, 2, Symmetry::Kahler), 1e-12).all_psd);
        assert!(!psd_slice_check(&fs.scaled(-1.0), 1e-12).all_psd);
    }

    #[test]
    fn flatness_bound() {
        let zero = CurvatureTensor::zero(2, 2, Symmetry::Kahler);
        assert!(flat_if_ricci_flat(&zero, 1e-10, 0).unwrap().pass);
        let fs = flat_if_ricci_flat(&CurvatureTensor::fubini_study(2), 1e-10, 0).unwrap();
        assert!(fs.pass && (fs.ricci_trace_norm - 6.0).abs() < 1e-12);
        let torus = chern_curvature(&MetricField::flat(2), &[c(0.1, 0.2), c(0.3, 0.4)]).unwrap();
        assert!(flat_if_ricci_flat(&torus, 1e-9, 0).unwrap().pass);
        let neg = CurvatureTensor::fubini_study(2).scaled(-1.0);
        assert!(matches!(flat_if_ricci_flat(&neg, 1e-9, 0), Err(GeomError::Precondition(_))));
    }
}
