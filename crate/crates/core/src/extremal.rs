//! Extremizers of the holomorphic sectional curvature `H(W) = R(W, Wbar, W, Wbar)`
//! on the unit sphere, and the first-order inequalities they satisfy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curvature::{griffiths_min, DEFAULT_RESTARTS};
use crate::linalg::{normalize_phase, random_unit, random_unit_orthogonal, CVec, C};
use crate::tensor::{CurvatureTensor, Symmetry};
use crate::GeomError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub struct DirectionWitness {
    pub e: CVec,
    pub value: f64,
    pub mode: Mode,
    pub restarts: usize,
    pub seed: u64,
    /// Norm of the Riemannian gradient of `H` at `e`.
    pub grad_norm: f64,
}

pub fn sectional(r: &CurvatureTensor, w: &CVec) -> f64 {
    r.eval(w, w)
}

/// `H(w)` and `g = dH/d conj(w)`.
fn value_and_gradient(r: &CurvatureTensor, w: &CVec) -> (f64, CVec) {
    let n = r.base_dim();
    let mut g = CVec::zeros(n);
    let mut h = C::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let x = r.get(i, j, k, l);
                    h += x * w[i] * w[j].conj() * w[k] * w[l].conj();
                    g[j] += x * w[i] * w[k] * w[l].conj();
                    g[l] += x * w[i] * w[j].conj() * w[k];
                }
            }
        }
    }
    (h.re, g)
}

/// Riemannian gradient on the sphere; the real gradient of `H` is `2g`, and
/// `Re <w, g> = 2H` by homogeneity.
fn sphere_gradient(r: &CurvatureTensor, w: &CVec, sign: f64) -> (f64, CVec) {
    let (h, g) = value_and_gradient(r, w);
    let radial = w.dotc(&g).re;
    let tangent = (&g - w * C::new(radial, 0.0)).map(|x| x * (2.0 * sign));
    (sign * h, tangent)
}

/// Projected gradient descent with Barzilai-Borwein steps and Armijo
/// backtracking, minimizing `sign * H`.
fn descend(r: &CurvatureTensor, start: CVec, sign: f64) -> (CVec, f64, f64) {
    let scale = r.max_abs().max(1e-300);
    let mut w = start;
    let (mut f, mut g) = sphere_gradient(r, &w, sign);
    let mut step = 0.1 / scale;
    for _ in 0..5000 {
        let gn2 = g.norm_squared();
        if gn2.sqrt() <= 1e-13 * scale {
            break;
        }
        // Once the predicted decrease drops below the roundoff of f, progress
        // is judged by the gradient norm instead.
        let flat = gn2 <= 1e-12 * scale * scale;
        let mut t = step;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = &w - g.map(|x| x * t);
            let w_new = trial.map(|x| x / trial.norm());
            let (f_new, g_new) = sphere_gradient(r, &w_new, sign);
            if f_new <= f - 1e-4 * t * gn2 || (flat && g_new.norm_squared() < gn2) {
                accepted = Some((w_new, f_new, g_new));
                break;
            }
            t *= 0.5;
        }
        // No sufficient decrease left at working precision.
        let Some((w_new, f_new, g_new)) = accepted else { break };
        let s = &w_new - &w;
        let y = &g_new - &g;
        let sy = s.dotc(&y).re;
        step = if sy > 0.0 { s.norm_squared() / sy } else { t * 2.0 };
        w = w_new;
        f = f_new;
        g = g_new;
    }
    let gn = g.norm();
    (w, sign * f, gn)
}

/// Best-found extremizer of `H` over the unit sphere: multi-start descent,
/// then a pass of small random perturbations around the best point.
pub fn extremize_sectional(
    r: &CurvatureTensor,
    mode: Mode,
    seed: u64,
    restarts: usize,
) -> Result<DirectionWitness, GeomError> {
    if r.symmetry() != Symmetry::Kahler {
        return Err(GeomError::NotKahler);
    }
    let n = r.base_dim();
    let sign = match mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    let better = |a: f64, b: f64| sign * a < sign * b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let restarts = restarts.max(1);
    let mut best: Option<(CVec, f64, f64)> = None;
    for _ in 0..restarts {
        let (w, v, gn) = descend(r, random_unit(&mut rng, n), sign);
        if best.as_ref().is_none_or(|b| better(v, b.1)) {
            best = Some((w, v, gn));
        }
    }
    let (mut e, mut value, mut grad) = best.expect("at least one restart");
    for _ in 0..16 {
        let kick = random_unit(&mut rng, n).map(|x| x * 1e-3);
        let trial = &e + kick;
        let (w, v, gn) = descend(r, trial.map(|x| x / trial.norm()), sign);
        if better(v, value) {
            (e, value, grad) = (w, v, gn);
        }
    }
    let e = normalize_phase(&e);
    let value = sectional(r, &e);
    Ok(DirectionWitness { e, value, mode, restarts, seed, grad_norm: grad })
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub witness: DirectionWitness,
    pub samples: usize,
    /// Least `2R(e,ebar,W,Wbar) - (1 + |<W,e>|^2) H(e)`, sign-flipped for `Max`.
    pub min_inequality_slack: f64,
    /// Largest `|R(e, ebar, e, Wbar)|` over unit `W` orthogonal to `e`.
    pub max_first_order: f64,
    /// Least `2R(e,ebar,f,fbar) - H(e)` over unit `f` orthogonal to `e`, sign-flipped for `Max`.
    pub min_orthogonal_slack: f64,
    pub pass: bool,
}

pub const INEQUALITY_SLACK: f64 = 1e-7;
pub const FIRST_ORDER_TOL: f64 = 1e-6;

fn verify(r: &CurvatureTensor, mode: Mode, samples: usize, seed: u64) -> Result<LemmaReport, GeomError> {
    let witness = extremize_sectional(r, mode, seed, DEFAULT_RESTARTS)?;
    let sign = match mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    let e = &witness.e;
    let h = witness.value;
    let n = r.base_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut min_inequality_slack = f64::INFINITY;
    let mut max_first_order: f64 = 0.0;
    let mut min_orthogonal_slack = f64::INFINITY;
    for _ in 0..samples {
        let w = random_unit(&mut rng, n);
        let overlap = w.dotc(e).norm_sqr();
        let slack = sign * (2.0 * r.eval(e, &w) - (1.0 + overlap) * h);
        min_inequality_slack = min_inequality_slack.min(slack);

        let f = random_unit_orthogonal(&mut rng, e);
        max_first_order = max_first_order.max(mixed_term(r, e, &f).norm());
        min_orthogonal_slack = min_orthogonal_slack.min(sign * (2.0 * r.eval(e, &f) - h));
    }
    let pass = min_inequality_slack >= -INEQUALITY_SLACK
        && max_first_order <= FIRST_ORDER_TOL
        && min_orthogonal_slack >= -INEQUALITY_SLACK;
    Ok(LemmaReport { witness, samples, min_inequality_slack, max_first_order, min_orthogonal_slack, pass })
}

/// `R(e, ebar, e, fbar) = sum R_{i jbar k lbar} e^i conj(e^j) e^k conj(f^l)`.
pub fn mixed_term(r: &CurvatureTensor, e: &CVec, f: &CVec) -> C {
    let n = r.base_dim();
    let mut acc = C::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * e[i] * e[j].conj() * e[k] * f[l].conj();
                }
            }
        }
    }
    acc
}

/// At a minimizer `e` of `H`: `2R(e,ebar,W,Wbar) >= (1 + |<W,e>|^2) H(e)` for
/// unit `W`, and `R(e,ebar,e,fbar) = 0` for `f` orthogonal to `e`.
pub fn verify_lemma_linear(r: &CurvatureTensor, samples: usize, seed: u64) -> Result<LemmaReport, GeomError> {
    verify(r, Mode::Min, samples, seed)
}

/// Mirror of [`verify_lemma_linear`] at a maximizer, with the inequality reversed.
pub fn verify_lemma_linear1(r: &CurvatureTensor, samples: usize, seed: u64) -> Result<LemmaReport, GeomError> {
    verify(r, Mode::Max, samples, seed)
}

#[derive(Clone, Debug)]
pub struct FilterReport {
    pub witness: DirectionWitness,
    /// `H(e)/2`.
    pub bound: f64,
    /// Least sampled `R(e, ebar, W, Wbar)`.
    pub min_observed: f64,
    pub pass: bool,
}

/// If `R` is Griffiths semipositive and `H(e) > 0` at the minimizer `e`,
/// then `R(e, ebar, W, Wbar) >= H(e)/2` for every unit `W`.
pub fn filter_positivity(r: &CurvatureTensor, samples: usize, seed: u64) -> Result<FilterReport, GeomError> {
    let griffiths = griffiths_min(r, seed, DEFAULT_RESTARTS);
    if griffiths.min_value < -1e-9 {
        return Err(GeomError::Precondition(format!("griffiths minimum {:e} is negative", griffiths.min_value)));
    }
    let witness = extremize_sectional(r, Mode::Min, seed, DEFAULT_RESTARTS)?;
    if witness.value <= 1e-12 {
        return Err(GeomError::Precondition(format!("minimal sectional value {:e} is not positive", witness.value)));
    }
    let bound = 0.5 * witness.value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf11e);
    let mut min_observed = f64::INFINITY;
    for k in 0..samples {
        let w = if k % 2 == 0 {
            random_unit(&mut rng, r.base_dim())
        } else {
            random_unit_orthogonal(&mut rng, &witness.e)
        };
        min_observed = min_observed.min(r.eval(&witness.e, &w));
    }
    Ok(FilterReport { pass: min_observed >= bound - INEQUALITY_SLACK, witness, bound, min_observed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn zero_tensor() {
        let z = CurvatureTensor::zero(2, 2, Symmetry::Kahler);
        let w = extremize_sectional(&z, Mode::Min, 1, 4).unwrap();
        assert_eq!(w.value, 0.0);
        assert!((w.e.norm() - 1.0).abs() < 1e-12);
        let rep = verify_lemma_linear(&z, 20, 1).unwrap();
        assert!(rep.pass && rep.min_inequality_slack.abs() < 1e-15);
        assert!(verify_lemma_linear1(&z, 20, 1).unwrap().pass);
        assert!(matches!(filter_positivity(&z, 10, 1), Err(GeomError::Precondition(_))));
    }

    #[test]
    fn fubini_study_is_constant() {
        let fs = CurvatureTensor::fubini_study(3);
        let lo = extremize_sectional(&fs, Mode::Min, 2, 4).unwrap();
        let hi = extremize_sectional(&fs, Mode::Max, 2, 4).unwrap();
        assert!((lo.value - 2.0).abs() < 1e-12 && (hi.value - 2.0).abs() < 1e-12);
        let rep = verify_lemma_linear(&fs, 50, 3).unwrap();
        assert!(rep.pass && rep.min_inequality_slack.abs() < 1e-12);
        let rep1 = verify_lemma_linear1(&fs, 50, 3).unwrap();
        assert!(rep1.pass && rep1.min_inequality_slack.abs() < 1e-12);
        let filt = filter_positivity(&fs, 50, 3).unwrap();
        assert!(filt.pass && (filt.bound - 1.0).abs() < 1e-12);
        assert!((filt.min_observed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_of_lines() {
        let t = CurvatureTensor::product_fs(&[1, 1]);
        let w = extremize_sectional(&t, Mode::Min, 5, 8).unwrap();
        assert!((w.value - 1.0).abs() < 1e-10);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.e[0].norm() - s).abs() < 1e-6 && (w.e[1].norm() - s).abs() < 1e-6);
        assert!(w.e[0].im.abs() < 1e-12 || w.e[1].im.abs() < 1e-12);
        // Both sides at e = (1,1)/sqrt2, W = (1,0).
        let e = CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
        let wv = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((2.0 * t.eval(&e, &wv) - 2.0).abs() < 1e-12);
        assert!(((1.0 + wv.dotc(&e).norm_sqr()) * sectional(&t, &e) - 1.5).abs() < 1e-12);
        assert!(verify_lemma_linear(&t, 100, 5).unwrap().pass);
        let neg = t.scaled(-1.0);
        let rep = verify_lemma_linear1(&neg, 100, 5).unwrap();
        assert!(rep.pass && (rep.witness.value + 1.0).abs() < 1e-10);
        let filt = filter_positivity(&t, 200, 5).unwrap();
        assert!(filt.pass && (filt.bound - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_hermitian_tag() {
        let t = CurvatureTensor::zero(2, 2, Symmetry::Hermitian);
        assert!(matches!(extremize_sectional(&t, Mode::Min, 0, 1), Err(GeomError::NotKahler)));
    }
}
