//! The tautological line bundle `O(1)` on `P(E*)` with the quotient metric
//! induced by a Hermitian metric on `E`.
//!
//! A fiber point is a unit covector `a`. In the chart `W_m = 1` the fiber
//! coordinates are `w'^A = |a_m| W_A / W_m` for `A != m`; with this scaling the
//! Fubini-Study form at `a` is `delta_AB - conj(a_A) a_B`.

use crate::curvature::chern_curvature;
use crate::fd;
use crate::linalg::{
    cholesky, generalized_eigenvalues, identity_frame, is_finite, CMat, CVec, C,
};
use crate::metric::MetricField;
use crate::tensor::CurvatureTensor;
use crate::GeomError;

/// `1 / (W^* H^{-1} W)`, the induced metric on `O(1)` at the covector `W`.
pub fn induced_metric_value(h: &CMat, w: &CVec) -> Result<f64, GeomError> {
    if w.norm() == 0.0 {
        return Err(GeomError::ZeroInput);
    }
    let l = cholesky(h)?;
    let y = l.solve_lower_triangular(w).ok_or(GeomError::NotPositiveDefinite(0.0))?;
    Ok(1.0 / y.norm_squared())
}

fn check_direction(a: &CVec, rank: usize) -> Result<(), GeomError> {
    if a.len() != rank {
        return Err(GeomError::Dimension { expected: rank, found: a.len() });
    }
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(GeomError::NotUnit { what: "fiber direction", norm });
    }
    Ok(())
}

/// Chart index with the largest coordinate.
pub fn best_chart(a: &CVec) -> usize {
    a.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).map(|(k, _)| k).unwrap_or(0)
}

fn others(r: usize, m: usize) -> Vec<usize> {
    (0..r).filter(|&k| k != m).collect()
}

/// Fubini-Study form of the fiber at `a` in the scaled chart `W_m = 1`.
pub fn fiber_form(a: &CVec, m: usize) -> CMat {
    let idx = others(a.len(), m);
    CMat::from_fn(idx.len(), idx.len(), |p, q| {
        let delta = if p == q { 1.0 } else { 0.0 };
        C::new(delta, 0.0) - a[idx[p]].conj() * a[idx[q]]
    })
}

/// Curvature of `O(1)` at the fiber point `a` in the chart `W_m = 1`, in
/// coordinates `(z^1..z^n, w'^A)`. `R` must be in a unitary frame.
/// Base block `sum R_{i jbar a bbar} conj(a_a) a_b`, fiber block [`fiber_form`].
pub fn taut_curvature_in_chart(r: &CurvatureTensor, a: &CVec, m: usize) -> Result<CMat, GeomError> {
    check_direction(a, r.rank())?;
    if m >= r.rank() || a[m].norm() < 1e-12 {
        return Err(GeomError::Chart);
    }
    let n = r.base_dim();
    let base = r.base_form(&a.map(|x| x.conj()));
    let fiber = fiber_form(a, m);
    let k = fiber.nrows();
    let mut out = CMat::zeros(n + k, n + k);
    out.view_mut((0, 0), (n, n)).copy_from(&base);
    out.view_mut((n, n), (k, k)).copy_from(&fiber);
    Ok(out)
}

/// [`taut_curvature_in_chart`] in the standard chart `W_r = 1`.
pub fn taut_curvature_at(r: &CurvatureTensor, a: &CVec) -> Result<CMat, GeomError> {
    taut_curvature_in_chart(r, a, r.rank().saturating_sub(1))
}

/// Eigenvalues of the curvature relative to the reference form: the identity
/// on the base (the tensor is in a unitary frame) and Fubini-Study on the fiber.
pub fn relative_spectrum(r: &CurvatureTensor, a: &CVec) -> Result<Vec<f64>, GeomError> {
    let m = best_chart(a);
    let curv = taut_curvature_in_chart(r, a, m)?;
    let n = r.base_dim();
    let fiber = fiber_form(a, m);
    let k = fiber.nrows();
    let mut reference = CMat::identity(n + k, n + k);
    reference.view_mut((n, n), (k, k)).copy_from(&fiber);
    generalized_eigenvalues(&curv, &reference)
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Deterministic fiber directions: the coordinate axes followed by `count`
/// points from a Halton sequence pushed through Box-Muller.
pub fn fiber_directions(rank: usize, count: usize) -> Vec<CVec> {
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    assert!(2 * rank <= PRIMES.len(), "rank too large for the Halton table");
    let mut out: Vec<CVec> = (0..rank)
        .map(|k| CVec::from_fn(rank, |i, _| C::new(f64::from(u8::from(i == k)), 0.0)))
        .collect();
    let mut k = 1u64;
    while out.len() < rank + count {
        let v = CVec::from_fn(rank, |i, _| {
            let u1 = radical_inverse(k, PRIMES[2 * i]).max(1e-12);
            let u2 = radical_inverse(k, PRIMES[2 * i + 1]);
            let rad = (-2.0 * u1.ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            C::new(rad * t.cos(), rad * t.sin())
        });
        k += 1;
        let norm = v.norm();
        if norm > 1e-8 {
            out.push(v.map(|x| x / norm));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub points: usize,
    pub directions: usize,
    /// Least relative eigenvalue over all configurations.
    pub min_eigenvalue: f64,
    pub min_point: Vec<C>,
    pub min_direction: CVec,
    /// Largest spread between top and bottom relative eigenvalues.
    pub max_gap: f64,
    /// Best least eigenvalue among all configurations; positive means some
    /// configuration is strictly positive definite.
    pub best_sample_min: f64,
    pub best_direction: CVec,
}

impl ScanReport {
    pub fn has_strictly_positive_sample(&self, margin: f64) -> bool {
        self.best_sample_min > margin
    }
}

/// Relative spectrum of the `O(1)` curvature over a base grid and a set of
/// fiber directions.
pub fn taut_positivity_scan(
    metric: &MetricField,
    base_grid: &[Vec<C>],
    fiber_samples: &[CVec],
) -> Result<ScanReport, GeomError> {
    if base_grid.is_empty() || fiber_samples.is_empty() {
        return Err(GeomError::Precondition("empty scan".into()));
    }
    let mut report = ScanReport {
        points: base_grid.len(),
        directions: fiber_samples.len(),
        min_eigenvalue: f64::INFINITY,
        min_point: base_grid[0].clone(),
        min_direction: fiber_samples[0].clone(),
        max_gap: 0.0,
        best_sample_min: f64::NEG_INFINITY,
        best_direction: fiber_samples[0].clone(),
    };
    for z in base_grid {
        let r = chern_curvature(metric, z)?;
        for a in fiber_samples {
            let spec = relative_spectrum(&r, a)?;
            let (lo, hi) = (spec[0], spec[spec.len() - 1]);
            if lo < report.min_eigenvalue {
                report.min_eigenvalue = lo;
                report.min_point = z.clone();
                report.min_direction = a.clone();
            }
            if lo > report.best_sample_min {
                report.best_sample_min = lo;
                report.best_direction = a.clone();
            }
            report.max_gap = report.max_gap.max(hi - lo);
        }
    }
    Ok(report)
}

/// Holomorphic frame `G(z) = P + sum (z - z0)^k Q_k` that is unitary at `z0`
/// with vanishing first derivatives of the metric there.
struct NormalFrame {
    z0: Vec<C>,
    p: CMat,
    q: Vec<CMat>,
    /// Base coordinates `z = z0 + S zeta`.
    s: CMat,
}

impl NormalFrame {
    fn new(metric: &MetricField, z0: &[C]) -> Result<Self, GeomError> {
        let jet = metric.jet(z0)?;
        let p = identity_frame(&jet.h)?;
        let hp = &jet.h * p.map(|x| x.conj());
        let hp_inv = hp.try_inverse().ok_or(GeomError::NotPositiveDefinite(0.0))?;
        let q = jet
            .d
            .iter()
            .map(|dk| (-(p.transpose() * dk * p.map(|x| x.conj()) * &hp_inv)).transpose())
            .collect();
        let n = metric.base_dim();
        let s = if metric.is_tangent() { p.clone() } else { CMat::identity(n, n) };
        Ok(Self { z0: z0.to_vec(), p, q, s })
    }

    fn point(&self, zeta: &[C]) -> Vec<C> {
        let zeta = CVec::from_column_slice(zeta);
        let dz = &self.s * zeta;
        self.z0.iter().zip(dz.iter()).map(|(a, b)| a + b).collect()
    }

    /// Metric in the frame `G` at base coordinate `zeta`.
    fn metric_at(&self, metric: &MetricField, zeta: &[C]) -> CMat {
        let z = self.point(zeta);
        let mut g = self.p.clone();
        for (k, qk) in self.q.iter().enumerate() {
            g += qk * (z[k] - self.z0[k]);
        }
        g.transpose() * metric.raw(&z) * g.map(|x| x.conj())
    }
}

#[derive(Clone, Debug)]
pub struct NormalFrameReport {
    /// Largest first derivative of the metric in the normal frame.
    pub max_first_derivative: f64,
    /// `-d_i dbar_j h'_{a bbar}` at the point, read off numerically.
    pub coefficient: CurvatureTensor,
    /// Largest entrywise gap between `coefficient` and [`chern_curvature`].
    pub max_deviation: f64,
}

/// Expands the metric in a holomorphic normal frame and checks
/// `h = delta - R z zbar + O(|z|^3)` against the curvature tensor.
pub fn normal_frame_check(metric: &MetricField, z: &[C]) -> Result<NormalFrameReport, GeomError> {
    let frame = NormalFrame::new(metric, z)?;
    let n = metric.base_dim();
    let r = metric.rank();
    let f = |zeta: &[C]| frame.metric_at(metric, zeta).as_slice().to_vec();
    let origin = vec![C::new(0.0, 0.0); n];
    let steps = metric.diff.steps;
    let first = fd::wirtinger_first(&f, &origin, &steps);
    let max_first_derivative = first.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    let mixed = fd::wirtinger_mixed(&f, &origin, &steps);
    let reference = chern_curvature(metric, z)?;
    let coefficient = CurvatureTensor::from_fn(n, r, reference.symmetry(), |i, j, a, b| -mixed[i][j][a + b * r]);
    let max_deviation = coefficient.max_abs_diff(&reference);
    Ok(NormalFrameReport { max_first_derivative, coefficient, max_deviation })
}

/// Curvature of `O(1)` at `(z, a)` computed as the numerical `d dbar` of
/// `-log h^L` with `h^L` from [`induced_metric_value`], in normal base
/// coordinates and the scaled fiber chart `W_m = 1`.
pub fn induced_curvature_fd(metric: &MetricField, z: &[C], a: &CVec, m: usize) -> Result<CMat, GeomError> {
    check_direction(a, metric.rank())?;
    if a[m].norm() < 1e-12 {
        return Err(GeomError::Chart);
    }
    let frame = NormalFrame::new(metric, z)?;
    let n = metric.base_dim();
    let r = metric.rank();
    let idx = others(r, m);
    let scale = a[m].norm();
    let f = |x: &[C]| {
        let h = frame.metric_at(metric, &x[..n]);
        let mut w = CVec::zeros(r);
        w[m] = C::new(1.0, 0.0);
        for (p, &k) in idx.iter().enumerate() {
            w[k] = x[n + p] / scale;
        }
        let v = induced_metric_value(&h, &w).map(|v| -v.ln()).unwrap_or(f64::NAN);
        vec![C::new(v, 0.0)]
    };
    let mut x0 = vec![C::new(0.0, 0.0); n];
    x0.extend(idx.iter().map(|&k| a[k] / a[m] * scale));
    let mixed = fd::wirtinger_mixed(&f, &x0, &metric.diff.steps);
    let dim = x0.len();
    let out = CMat::from_fn(dim, dim, |i, j| mixed[i][j][0]);
    if !is_finite(&out) {
        return Err(GeomError::NonFinite("induced curvature"));
    }
    Ok(out)
}
