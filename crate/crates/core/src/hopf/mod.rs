//! Diagonal Hopf surfaces `(C^2 \ 0) / <(z, w) -> (a z, b w)>`.
//!
//! Everything is built on the positive function `Phi` defined implicitly by
//! `|z|^2 Phi^-alpha + |w|^2 Phi^(alpha-2) = 1`, which satisfies
//! `Phi(a z, b w) = |a| |b| Phi(z, w)`. Matrices indexed `[i][j]` hold
//! `d_i dbar_j` of the named function in the coordinates `(z, w)`.

mod relative;

pub use relative::{
    lambda2_search, relative_tangent_bound, relative_tangent_curvature, LambdaSearch, RelativeTangentReport,
};

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{griffiths_min, PositivityReport, DEFAULT_RESTARTS};
use crate::fd::{self, Steps};
use crate::linalg::{c, min_eig, random_unit, CMat, CVec, C};
use crate::metric::{MetricField, MetricJet};
use crate::tensor::{CurvatureTensor, Symmetry};
use crate::GeomError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfParams {
    pub a: C,
    pub b: C,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl HopfParams {
    /// Deck parameters with the canonical metric coefficients
    /// `1 / alpha^2` and `1 / (2 - alpha)^2`.
    pub fn new(a: C, b: C) -> Result<Self, GeomError> {
        if !(a.norm() >= b.norm() && b.norm() > 1.0) {
            return Err(GeomError::Precondition(format!("need |a| >= |b| > 1, got |a| = {}, |b| = {}", a.norm(), b.norm())));
        }
        let mut p = Self { a, b, lambda1: 1.0, lambda2: 1.0 };
        let (l1, l2) = p.canonical_lambdas();
        p.lambda1 = l1;
        p.lambda2 = l2;
        Ok(p)
    }

    /// Real deck parameters `a = e^alpha`, `b = e^(2 - alpha)`.
    pub fn from_alpha(alpha: f64) -> Result<Self, GeomError> {
        if !(1.0..2.0).contains(&alpha) {
            return Err(GeomError::Precondition(format!("alpha must lie in [1, 2), got {alpha}")));
        }
        Self::new(c(alpha.exp(), 0.0), c((2.0 - alpha).exp(), 0.0))
    }

    pub fn with_lambdas(self, lambda1: f64, lambda2: f64) -> Result<Self, GeomError> {
        if !(lambda1 > 0.0 && lambda2 > 0.0 && lambda1.is_finite() && lambda2.is_finite()) {
            return Err(GeomError::Precondition("metric coefficients must be positive".into()));
        }
        Ok(Self { lambda1, lambda2, ..self })
    }

    pub fn k1(&self) -> f64 {
        self.a.norm().ln()
    }

    pub fn k2(&self) -> f64 {
        self.b.norm().ln()
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.k1() / (self.k1() + self.k2())
    }

    pub fn canonical_lambdas(&self) -> (f64, f64) {
        let alpha = self.alpha();
        (1.0 / (alpha * alpha), 1.0 / ((2.0 - alpha) * (2.0 - alpha)))
    }

    pub fn is_canonical(&self) -> bool {
        let (l1, l2) = self.canonical_lambdas();
        (self.lambda1 - l1).abs() <= 1e-14 * l1 && (self.lambda2 - l2).abs() <= 1e-14 * l2
    }

    pub fn canonical(&self) -> Self {
        let (lambda1, lambda2) = self.canonical_lambdas();
        Self { lambda1, lambda2, ..*self }
    }
}

/// Closed-form derivatives of `Phi` at a point.
#[derive(Clone, Debug)]
pub struct PhiDerivatives {
    /// `(d_z Phi, d_w Phi)`.
    pub d_phi: [C; 2],
    /// `alpha |z|^2 Phi^-alpha + (2 - alpha) |w|^2 Phi^(alpha-2)`.
    pub delta: f64,
    /// `d dbar log Phi`.
    pub m_log: CMat,
    /// `d Phi ^ dbar Phi`, i.e. `d_i Phi conj(d_j Phi)`.
    pub m_wedge: CMat,
}

impl PhiDerivatives {
    /// `det / trace^2`, invariant under rescaling of the matrix.
    pub fn scaled_det(&self) -> f64 {
        let tr = self.m_log.trace().re;
        if tr == 0.0 {
            return 0.0;
        }
        self.m_log.determinant().re / (tr * tr)
    }
}

#[derive(Clone, Debug)]
pub struct PhiValue {
    pub phi: f64,
    /// `|z|^2 Phi^-alpha + |w|^2 Phi^(alpha-2) - 1`.
    pub residual: f64,
    pub derivatives: PhiDerivatives,
}

fn key_equation(alpha: f64, zz: f64, ww: f64, t: f64) -> (f64, f64) {
    let x = zz * (-alpha * t).exp();
    let y = ww * ((alpha - 2.0) * t).exp();
    (x + y - 1.0, -(alpha * x + (2.0 - alpha) * y))
}

/// The positive root `Phi` of the key equation, solved in `t = log Phi`.
pub fn solve_phi_value(params: &HopfParams, z: C, w: C) -> Result<f64, GeomError> {
    let (zz, ww) = (z.norm_sqr(), w.norm_sqr());
    if zz + ww == 0.0 {
        return Err(GeomError::ZeroInput);
    }
    if !(zz + ww).is_finite() {
        return Err(GeomError::NonFinite("Hopf point"));
    }
    let alpha = params.alpha();
    if alpha == 1.0 {
        return Ok(zz + ww);
    }
    let g = |t: f64| key_equation(alpha, zz, ww, t);
    let t0 = (zz + ww).ln();
    let (mut lo, mut hi) = (t0 - 1.0, t0 + 1.0);
    let mut width = 1.0;
    // g is strictly decreasing in t, so the root lies where g changes sign.
    while g(lo).0 <= 0.0 || g(hi).0 >= 0.0 {
        width *= 2.0;
        if width > 4096.0 {
            return Err(GeomError::Bracket);
        }
        lo = t0 - width;
        hi = t0 + width;
    }
    let mut t = t0.clamp(lo, hi);
    for _ in 0..200 {
        let (val, der) = g(t);
        if val == 0.0 {
            break;
        }
        if val > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - val / der;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - t).abs();
        t = next;
        if step <= f64::EPSILON * t.abs().max(1.0) || hi - lo <= f64::EPSILON * t.abs().max(1.0) {
            break;
        }
    }
    Ok(t.exp())
}

/// Root of `m = k (1 - m)^kappa` in `(0, 1)`, to full relative precision.
fn minority_fraction(k: f64, kappa: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut m = k / (1.0 + k);
    for _ in 0..200 {
        let g = m - k * (1.0 - m).powf(kappa);
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            hi = m;
        } else {
            lo = m;
        }
        let dg = 1.0 + k * kappa * (1.0 - m).powf(kappa - 1.0);
        let newton = m - g / dg;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - m).abs();
        m = next;
        if step <= 1e-17 * m || hi - lo <= 1e-17 * m {
            break;
        }
    }
    m
}

/// The smaller of `X = |z|^2 Phi^-alpha` and `Y = 1 - X`, computed at any
/// point by an independent solve. `x_minor` fixes which one is tracked.
#[derive(Clone, Copy)]
struct Minority {
    alpha: f64,
    x_minor: bool,
}

impl Minority {
    fn at(params: &HopfParams, z: C, w: C) -> Result<Self, GeomError> {
        let alpha = params.alpha();
        let phi = solve_phi_value(params, z, w)?;
        Ok(Self { alpha, x_minor: z.norm_sqr() * phi.powf(-alpha) < 0.5 })
    }

    fn value(&self, p: &[C]) -> f64 {
        let (lz, lw) = (p[0].norm_sqr().ln(), p[1].norm_sqr().ln());
        if self.x_minor {
            let kappa = self.alpha / (2.0 - self.alpha);
            minority_fraction((lz - kappa * lw).exp(), kappa)
        } else {
            let kappa = (2.0 - self.alpha) / self.alpha;
            minority_fraction((lw - kappa * lz).exp(), kappa)
        }
    }
}

fn fd_steps() -> Steps {
    // The fractions are smooth but steep for alpha near 2.
    Steps { second: 1e-3, ..Steps::default() }
}

/// `d dbar log Phi` by finite differences of an independent solve.
/// `log Phi` differs from the pluriharmonic `log|w|^2 / (2 - alpha)` by
/// `-log(1 - X) / (2 - alpha)`, and from `log|z|^2 / alpha` by
/// `-log(1 - Y) / alpha`; differencing the remainder built from the smaller
/// fraction keeps full relative precision even where the result is tiny.
pub fn m_log_fd(params: &HopfParams, z: C, w: C) -> Result<CMat, GeomError> {
    let m = Minority::at(params, z, w)?;
    let scale = if m.x_minor { 2.0 - m.alpha } else { m.alpha };
    let f = |p: &[C]| vec![c(-(-m.value(p)).ln_1p() / scale, 0.0)];
    let mixed = fd::wirtinger_mixed(&f, &[z, w], &fd_steps());
    let out = CMat::from_fn(2, 2, |i, j| mixed[i][j][0]);
    if !crate::linalg::is_finite(&out) {
        return Err(GeomError::NonFinite("d dbar log Phi"));
    }
    Ok(out)
}

/// `Phi` together with its residual and closed-form derivatives.
pub fn solve_phi(params: &HopfParams, z: C, w: C) -> Result<PhiValue, GeomError> {
    let phi = solve_phi_value(params, z, w)?;
    let alpha = params.alpha();
    let residual = z.norm_sqr() * phi.powf(-alpha) + w.norm_sqr() * phi.powf(alpha - 2.0) - 1.0;
    Ok(PhiValue { phi, residual, derivatives: phi_closed_forms(params, z, w, phi) })
}

/// `d Phi`, `Delta`, `d dbar log Phi` and `d Phi ^ dbar Phi` from `Phi`.
pub fn phi_closed_forms(params: &HopfParams, z: C, w: C, phi: f64) -> PhiDerivatives {
    let alpha = params.alpha();
    let (zz, ww) = (z.norm_sqr(), w.norm_sqr());
    let delta = alpha * zz * phi.powf(-alpha) + (2.0 - alpha) * ww * phi.powf(alpha - 2.0);
    let d_phi = [z.conj() * (phi.powf(1.0 - alpha) / delta), w.conj() * (phi.powf(alpha - 1.0) / delta)];
    let s = 1.0 / (phi * phi * delta.powi(3));
    let cross = z.conj() * w * (alpha * (alpha - 2.0) * s);
    let m_log = CMat::from_row_slice(
        2,
        2,
        &[c((alpha - 2.0).powi(2) * ww * s, 0.0), cross, cross.conj(), c(alpha * alpha * zz * s, 0.0)],
    );
    let m_wedge = CMat::from_fn(2, 2, |i, j| d_phi[i] * d_phi[j].conj());
    PhiDerivatives { d_phi, delta, m_log, m_wedge }
}

/// `d dbar Phi = Phi d dbar log Phi + d Phi ^ dbar Phi / Phi`.
pub fn ddbar_phi(phi: f64, der: &PhiDerivatives) -> CMat {
    der.m_log.map(|x| x * phi) + der.m_wedge.map(|x| x / phi)
}

/// The four summands of `d dbar Phi` obtained by applying `dbar` to
/// `d Phi = N / Q` with `N = (zbar, wbar Phi^(2 alpha - 2))` and
/// `Q = Phi^(alpha - 1) Delta`: `A` and `D` come from `dbar N`, `B` and `C`
/// from `dbar Q` (explicit and through `Phi`).
pub fn ddbar_phi_parts(params: &HopfParams, z: C, w: C, phi: f64, der: &PhiDerivatives) -> [CMat; 4] {
    let alpha = params.alpha();
    let q = phi.powf(alpha - 1.0) * der.delta;
    let dp = der.d_phi;
    let a = CMat::from_row_slice(2, 2, &[c(1.0 / q, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(phi.powf(2.0 * alpha - 2.0) / q, 0.0)]);
    let coef = [z * (-alpha / phi), w * ((alpha - 2.0) * phi.powf(2.0 * alpha - 3.0))];
    let b = CMat::from_fn(2, 2, |i, j| dp[i] * coef[j] / q);
    let k = alpha * z.norm_sqr() * phi.powi(-2)
        + (alpha - 2.0) * (2.0 * alpha - 3.0) * w.norm_sqr() * phi.powf(2.0 * alpha - 4.0);
    let cc = der.m_wedge.map(|x| x * (k / q));
    let d = CMat::from_fn(2, 2, |i, j| {
        if i == 1 {
            w.conj() * dp[j].conj() * ((2.0 * alpha - 2.0) * phi.powf(2.0 * alpha - 3.0) / q)
        } else {
            c(0.0, 0.0)
        }
    });
    [a, b, cc, d]
}

/// Metric coefficients `f = (lambda1 Phi^-alpha, lambda2 Phi^(alpha-2))`.
fn coefficients(params: &HopfParams, phi: f64) -> [f64; 2] {
    let alpha = params.alpha();
    [params.lambda1 * phi.powf(-alpha), params.lambda2 * phi.powf(alpha - 2.0)]
}

fn exponents(params: &HopfParams) -> [f64; 2] {
    let alpha = params.alpha();
    [-alpha, alpha - 2.0]
}

/// Value, `d_i f_k` and `d_i dbar_j f_k` for both coefficients.
type CoefficientJet = ([f64; 2], [[C; 2]; 2], [CMat; 2]);

fn coefficient_jet(params: &HopfParams, z: C, w: C) -> Result<CoefficientJet, GeomError> {
    let v = solve_phi(params, z, w)?;
    let phi = v.phi;
    let dd = ddbar_phi(phi, &v.derivatives);
    let wedge = &v.derivatives.m_wedge;
    let f = coefficients(params, phi);
    let lambdas = [params.lambda1, params.lambda2];
    let mut d = [[c(0.0, 0.0); 2]; 2];
    let mut second = [CMat::zeros(2, 2), CMat::zeros(2, 2)];
    for (k, p) in exponents(params).into_iter().enumerate() {
        let l = lambdas[k];
        for i in 0..2 {
            d[k][i] = v.derivatives.d_phi[i] * (p * l * phi.powf(p - 1.0));
        }
        second[k] = dd.map(|x| x * (p * l * phi.powf(p - 1.0))) + wedge.map(|x| x * (p * (p - 1.0) * l * phi.powf(p - 2.0)));
    }
    Ok((f, d, second))
}

/// `omega = i (lambda1 Phi^-alpha dz dzbar + lambda2 Phi^(alpha-2) dw dwbar)`
/// as a metric on the tangent bundle with a closed-form jet.
pub fn gauduchon_metric(params: &HopfParams) -> MetricField {
    let p = *params;
    let eval = Arc::new(move |x: &[C]| match solve_phi_value(&p, x[0], x[1]) {
        Ok(phi) => {
            let f = coefficients(&p, phi);
            CMat::from_diagonal(&CVec::from_vec(vec![c(f[0], 0.0), c(f[1], 0.0)]))
        }
        Err(_) => CMat::from_element(2, 2, c(f64::NAN, 0.0)),
    });
    let jet = Arc::new(move |x: &[C]| match coefficient_jet(&p, x[0], x[1]) {
        Ok((f, d, dd)) => {
            let diag = |a: C, b: C| CMat::from_diagonal(&CVec::from_vec(vec![a, b]));
            MetricJet {
                h: diag(c(f[0], 0.0), c(f[1], 0.0)),
                d: (0..2).map(|i| diag(d[0][i], d[1][i])).collect(),
                dd: (0..2).map(|i| (0..2).map(|j| diag(dd[0][(i, j)], dd[1][(i, j)])).collect()).collect(),
            }
        }
        Err(_) => {
            let nan = CMat::from_element(2, 2, c(f64::NAN, 0.0));
            MetricJet { h: nan.clone(), d: vec![nan.clone(); 2], dd: vec![vec![nan; 2]; 2] }
        }
    });
    MetricField::tangent(2, false, eval).with_jet(jet)
}

/// Sample points `(z, w)` covering a fundamental domain: the angle
/// `atan(|w| / |z|)` over `(0, pi/2)`, the radius over `[1, |a|)`, with
/// scattered phases.
pub fn hopf_grid(params: &HopfParams, n: usize) -> Vec<(C, C)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let s = (i as f64 + 0.5) / n as f64 * FRAC_PI_2;
        for j in 0..n {
            let r = params.a.norm().powf(j as f64 / n as f64);
            let tz = TAU * 0.37 * j as f64;
            let tw = TAU * 0.61 * i as f64;
            out.push((C::from_polar(r * s.cos(), tz), C::from_polar(r * s.sin(), tw)));
        }
    }
    out
}

/// A random point with `log |(z, w)|` uniform in `[log r_min, log r_max]` and
/// direction uniform on the unit sphere.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> (C, C) {
    let u = random_unit(rng, 2);
    let r = (r_min.ln() + rng.random::<f64>() * (r_max.ln() - r_min.ln())).exp();
    (u[0] * r, u[1] * r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GauduchonReport {
    pub points: usize,
    /// Largest `|t1 + t2| / (|t1| + |t2|)` with `t1 = d_w dbar_w f1`,
    /// `t2 = d_z dbar_z f2` from the closed forms.
    pub max_closed_residual: f64,
    /// Same quantity with both terms from finite differences of `Phi`.
    pub max_fd_residual: f64,
    /// Largest gap between the two routes, relative to `|t1| + |t2|`.
    pub max_route_gap: f64,
}

fn scaled(t1: C, t2: C) -> f64 {
    let den = t1.norm() + t2.norm();
    if den == 0.0 {
        0.0
    } else {
        (t1 + t2).norm() / den
    }
}

/// Evaluates the `d dbar omega = 0` condition over the given points.
pub fn verify_gauduchon(params: &HopfParams, grid: &[(C, C)]) -> Result<GauduchonReport, GeomError> {
    let mut rep = GauduchonReport { points: grid.len(), max_closed_residual: 0.0, max_fd_residual: 0.0, max_route_gap: 0.0 };
    for &(z, w) in grid {
        let (_, _, dd) = coefficient_jet(params, z, w)?;
        let (t1, t2) = (dd[0][(1, 1)], dd[1][(0, 0)]);
        // f1 = lambda1 X / |z|^2 and f2 = lambda2 Y / |w|^2 with X + Y = 1, so
        // both terms are second derivatives of the smaller fraction.
        let m = Minority::at(params, z, w)?;
        let f = |p: &[C]| vec![c(m.value(p), 0.0)];
        let num = fd::wirtinger_mixed(&f, &[z, w], &fd_steps());
        let sign = if m.x_minor { 1.0 } else { -1.0 };
        let n1 = num[1][1][0] * (sign * params.lambda1 / z.norm_sqr());
        let n2 = num[0][0][0] * (-sign * params.lambda2 / w.norm_sqr());
        if !(n1.re.is_finite() && n2.re.is_finite()) {
            return Err(GeomError::NonFinite("Gauduchon residual"));
        }
        rep.max_closed_residual = rep.max_closed_residual.max(scaled(t1, t2));
        rep.max_fd_residual = rep.max_fd_residual.max(scaled(n1, n2));
        let gap = ((t1 - n1).norm() + (t2 - n2).norm()) / (t1.norm() + t2.norm()).max(f64::MIN_POSITIVE);
        rep.max_route_gap = rep.max_route_gap.max(gap);
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct HopfCurvature {
    pub tensor: CurvatureTensor,
    pub report: PositivityReport,
}

/// Closed-form Chern curvature of [`gauduchon_metric`] in the unitary frame
/// `e_k / sqrt(f_k)`: `R_{i jbar k lbar} = c_k M_ij / sqrt(f_i f_j) delta_kl`
/// with `M = d dbar log Phi` and `c = (alpha, 2 - alpha)`.
pub fn hopf_curvature_tensor(params: &HopfParams, z: C, w: C) -> Result<CurvatureTensor, GeomError> {
    let v = solve_phi(params, z, w)?;
    let f = coefficients(params, v.phi);
    let alpha = params.alpha();
    let weight = [alpha, 2.0 - alpha];
    let m = &v.derivatives.m_log;
    Ok(CurvatureTensor::from_fn(2, 2, Symmetry::Hermitian, |i, j, k, l| {
        if k == l {
            m[(i, j)] * (weight[k] / (f[i] * f[j]).sqrt())
        } else {
            c(0.0, 0.0)
        }
    }))
}

/// [`hopf_curvature_tensor`] together with its Griffiths minimum.
pub fn hopf_curvature(params: &HopfParams, z: C, w: C, seed: u64) -> Result<HopfCurvature, GeomError> {
    let tensor = hopf_curvature_tensor(params, z, w)?;
    let report = griffiths_min(&tensor, seed, DEFAULT_RESTARTS);
    Ok(HopfCurvature { tensor, report })
}

/// Chern-Ricci form `-d dbar log det omega = 2 d dbar log Phi`.
pub fn ricci_form(params: &HopfParams, z: C, w: C) -> Result<CMat, GeomError> {
    Ok(solve_phi(params, z, w)?.derivatives.m_log.map(|x| x * 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemipositivityReport {
    pub points: usize,
    pub pairs_per_point: usize,
    /// Least value found by the alternating minimizer.
    pub min_griffiths: f64,
    /// Least value over the random direction pairs.
    pub min_sampled: f64,
}

/// Griffiths minimum and random-pair sampling of the curvature over a grid.
pub fn semipositivity_scan(
    params: &HopfParams,
    grid: &[(C, C)],
    pairs: usize,
    seed: u64,
) -> Result<SemipositivityReport, GeomError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SemipositivityReport { points: grid.len(), pairs_per_point: pairs, min_griffiths: f64::INFINITY, min_sampled: f64::INFINITY };
    for (k, &(z, w)) in grid.iter().enumerate() {
        let curv = hopf_curvature(params, z, w, seed.wrapping_add(k as u64))?;
        rep.min_griffiths = rep.min_griffiths.min(curv.report.min_value);
        for _ in 0..pairs {
            let u = random_unit(&mut rng, 2);
            let v = random_unit(&mut rng, 2);
            rep.min_sampled = rep.min_sampled.min(curv.tensor.eval(&u, &v));
        }
    }
    Ok(rep)
}

/// One CSV row: `Re z, Im z, Re w, Im w, Phi, Delta, min_eig_Mlog,
/// det_Mlog, gauduchon_residual, griffiths_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridRow {
    pub z: C,
    pub w: C,
    pub phi: f64,
    pub delta: f64,
    pub min_eig_mlog: f64,
    pub det_mlog: f64,
    pub gauduchon_residual: f64,
    pub griffiths_min: f64,
}

pub const CSV_HEADER: [&str; 10] = [
    "re_z", "im_z", "re_w", "im_w", "phi", "delta", "min_eig_Mlog", "det_Mlog", "gauduchon_residual", "griffiths_min",
];

impl GridRow {
    pub fn fields(&self) -> [f64; 10] {
        [
            self.z.re,
            self.z.im,
            self.w.re,
            self.w.im,
            self.phi,
            self.delta,
            self.min_eig_mlog,
            self.det_mlog,
            self.gauduchon_residual,
            self.griffiths_min,
        ]
    }
}

pub fn grid_row(params: &HopfParams, z: C, w: C, seed: u64) -> Result<GridRow, GeomError> {
    let v = solve_phi(params, z, w)?;
    let (_, _, dd) = coefficient_jet(params, z, w)?;
    let curv = hopf_curvature(params, z, w, seed)?;
    Ok(GridRow {
        z,
        w,
        phi: v.phi,
        delta: v.derivatives.delta,
        min_eig_mlog: min_eig(&v.derivatives.m_log),
        det_mlog: v.derivatives.m_log.determinant().re,
        gauduchon_residual: scaled(dd[0][(1, 1)], dd[1][(0, 0)]),
        griffiths_min: curv.report.min_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn params() {
        let p = HopfParams::from_alpha(1.4).unwrap();
        assert!(close(p.alpha(), 1.4, 1e-14));
        assert!(close(p.k1(), 1.4, 1e-14) && close(p.k2(), 0.6, 1e-14));
        assert!(p.is_canonical());
        assert!(HopfParams::new(c(2.0, 0.0), c(3.0, 0.0)).is_err());
        assert!(HopfParams::new(c(2.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(p.with_lambdas(0.0, 1.0).is_err());
    }

    #[test]
    fn solver_examples() {
        for alpha in [1.0, 1.2, 1.4, 1.8, 1.99] {
            let p = HopfParams::from_alpha(alpha).unwrap();
            assert!(close(solve_phi_value(&p, c(1.0, 0.0), c(0.0, 0.0)).unwrap(), 1.0, 1e-14));
            let v = solve_phi(&p, p.a, c(0.0, 0.0)).unwrap();
            assert!(close(v.phi, p.a.norm() * p.b.norm(), 1e-13));
            assert!(close(v.phi, (p.k1() + p.k2()).exp(), 1e-13));
        }
        let p = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert_eq!(solve_phi_value(&p, c(1.0, 0.0), c(1.0, 0.0)).unwrap(), 2.0);
        assert!(matches!(solve_phi(&p, c(0.0, 0.0), c(0.0, 0.0)), Err(GeomError::ZeroInput)));
    }

    #[test]
    fn residual_and_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = HopfParams::new(c(3.0, 1.0), c(1.2, -0.9)).unwrap();
        for _ in 0..200 {
            let (z, w) = random_point(&mut rng, 1e-3, 1e3);
            let v = solve_phi(&p, z, w).unwrap();
            assert!(v.residual.abs() <= 1e-12, "{}", v.residual);
            let moved = solve_phi_value(&p, p.a * z, p.b * w).unwrap();
            assert!((moved - p.a.norm() * p.b.norm() * v.phi).abs() <= 1e-10 * moved);
            let inv = z.norm_sqr() * v.phi.powf(-p.alpha());
            let inv_moved = (p.a * z).norm_sqr() * moved.powf(-p.alpha());
            assert!((inv - inv_moved).abs() <= 1e-10);
        }
    }

    #[test]
    fn key_map_is_decreasing() {
        for alpha in [1.0, 1.3, 1.7, 1.95] {
            for (zz, ww) in [(1.0, 0.0), (0.0, 1.0), (0.3, 2.0), (1e-4, 1e3)] {
                let mut t = -20.0;
                while t < 20.0 {
                    assert!(key_equation(alpha, zz, ww, t).1 < 0.0);
                    t += 0.25;
                }
            }
        }
    }

    #[test]
    fn closed_forms_at_axis() {
        let p = HopfParams::from_alpha(1.4).unwrap();
        let v = solve_phi(&p, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(close(v.derivatives.delta, 1.4, 1e-14));
        let expect = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 / 1.4, 0.0)]);
        assert!((v.derivatives.m_log.clone() - expect).norm() < 1e-14);
    }

    #[test]
    fn closed_forms_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alpha in [1.0, 1.4, 1.8] {
            let p = HopfParams::from_alpha(alpha).unwrap();
            let f = |x: &[C]| {
                let phi = solve_phi_value(&p, x[0], x[1]).unwrap();
                vec![c(phi.ln(), 0.0), c(phi, 0.0)]
            };
            for _ in 0..10 {
                let (z, w) = random_point(&mut rng, 1.0, p.a.norm());
                let v = solve_phi(&p, z, w).unwrap();
                let first = fd::wirtinger_first(&f, &[z, w], &Steps::default());
                let mixed = fd::wirtinger_mixed(&f, &[z, w], &Steps::default());
                let m_log = m_log_fd(&p, z, w).unwrap();
                let hess = CMat::from_fn(2, 2, |i, j| mixed[i][j][1]);
                let scale = v.derivatives.m_log.norm();
                assert!((m_log - &v.derivatives.m_log).norm() <= 1e-6 * scale);
                for i in 0..2 {
                    assert!((first[i][1] - v.derivatives.d_phi[i]).norm() <= 1e-8 * v.phi);
                }
                let parts = ddbar_phi_parts(&p, z, w, v.phi, &v.derivatives);
                let sum = parts.iter().fold(CMat::zeros(2, 2), |acc, m| acc + m);
                let closed = ddbar_phi(v.phi, &v.derivatives);
                assert!((sum.clone() - &closed).norm() <= 1e-12 * closed.norm());
                assert!((hess - sum).norm() <= 1e-6 * closed.norm());
                assert!(v.derivatives.scaled_det().abs() <= 1e-10);
                assert!(min_eig(&v.derivatives.m_log) >= -1e-10 * scale);
            }
        }
    }

    #[test]
    fn metric_alpha_one_is_standard() {
        let p = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let (z, w) = (c(0.3, 0.4), c(-1.0, 0.2));
        let h = gauduchon_metric(&p).evaluate(&[z, w]).unwrap();
        let s = z.norm_sqr() + w.norm_sqr();
        assert!((h - CMat::identity(2, 2).map(|x| x / s)).norm() < 1e-15);
    }

    #[test]
    fn metric_invariance() {
        let p = HopfParams::new(c(2.5, 0.5), c(1.5, 0.0)).unwrap();
        let m = gauduchon_metric(&p);
        let (z, w) = (c(0.7, -0.2), c(0.1, 0.9));
        let h = m.evaluate(&[z, w]).unwrap();
        let h2 = m.evaluate(&[p.a * z, p.b * w]).unwrap();
        // Pullback of f1 |dz|^2 under z -> a z multiplies by |a|^2.
        assert!(close(h2[(0, 0)].re * p.a.norm_sqr(), h[(0, 0)].re, 1e-12));
        assert!(close(h2[(1, 1)].re * p.b.norm_sqr(), h[(1, 1)].re, 1e-12));
    }

    #[test]
    fn gauduchon_condition() {
        for alpha in [1.0, 1.4] {
            let p = HopfParams::from_alpha(alpha).unwrap();
            let rep = verify_gauduchon(&p, &hopf_grid(&p, 4)).unwrap();
            assert!(rep.max_closed_residual <= 1e-10, "{rep:?}");
            assert!(rep.max_fd_residual <= 1e-6, "{rep:?}");
        }
        let bad = HopfParams::from_alpha(1.4).unwrap().with_lambdas(1.0, 1.0).unwrap();
        let rep = verify_gauduchon(&bad, &hopf_grid(&bad, 4)).unwrap();
        assert!(rep.max_closed_residual > 1e-4 && rep.max_fd_residual > 1e-4);
    }

    #[test]
    fn curvature_annihilates_z_direction_on_axis() {
        let p = HopfParams::from_alpha(1.4).unwrap();
        let t = hopf_curvature_tensor(&p, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let e0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        for k in 0..2 {
            let ek = CVec::from_fn(2, |i, _| c(f64::from(u8::from(i == k)), 0.0));
            assert!(t.eval(&e0, &ek).abs() < 1e-14);
        }
        let rep = hopf_curvature(&p, c(0.4, 0.3), c(-0.8, 1.1), 0).unwrap();
        assert!(rep.report.min_value >= -1e-9);
    }

    #[test]
    fn ricci_is_degenerate_and_nonnegative() {
        let p = HopfParams::from_alpha(1.8).unwrap();
        let ric = ricci_form(&p, c(0.4, 0.3), c(-0.8, 1.1)).unwrap();
        assert!(min_eig(&ric) >= -1e-12 * ric.norm());
        assert!(ric.determinant().norm() <= 1e-10 * ric.norm_squared());
    }

    #[test]
    fn grid_shape() {
        let p = HopfParams::from_alpha(1.2).unwrap();
        let g = hopf_grid(&p, 5);
        assert_eq!(g.len(), 25);
        let row = grid_row(&p, g[7].0, g[7].1, 0).unwrap();
        assert_eq!(row.fields().len(), CSV_HEADER.len());
        assert!(row.phi > 0.0 && row.delta > 0.0);
    }
}
