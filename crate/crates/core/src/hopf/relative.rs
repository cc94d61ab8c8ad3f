//! Curvature of the relative tangent bundle of `Y = P(T*X) -> X` over a
//! diagonal Hopf surface, with the metric
//! `2 d dbar log(Phi^(alpha-1) |W1|^2 / lambda1 + Phi^(1-alpha) |W2|^2 / lambda2)`.
//!
//! A fiber point is a unit `(a1, a2)`. The chart is `W2 = 1`, `x = a1 / a2`
//! when `|a2| >= |a1|`, and `W1 = 1`, `x = a2 / a1` otherwise. In either chart
//! the potential is `log(A + B |x|^2)` with `A`, `B` powers of `Phi`.

use crate::linalg::{c, generalized_eigenvalues, CMat, CVec, C};

use super::{solve_phi, HopfParams};
use crate::GeomError;

struct Chart {
    x: C,
    a: f64,
    b: f64,
    /// Exponents of `Phi` in `A` and `B`.
    ma: f64,
    mb: f64,
}

fn chart(alpha: f64, lambda1: f64, lambda2: f64, phi: f64, dir: &CVec) -> Result<Chart, GeomError> {
    if dir.len() != 2 {
        return Err(GeomError::Dimension { expected: 2, found: dir.len() });
    }
    let norm = dir.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(GeomError::NotUnit { what: "fiber direction", norm });
    }
    let c1 = phi.powf(alpha - 1.0) / lambda1;
    let c2 = phi.powf(1.0 - alpha) / lambda2;
    Ok(if dir[1].norm() >= dir[0].norm() {
        Chart { x: dir[0] / dir[1], a: c2, b: c1, ma: 1.0 - alpha, mb: alpha - 1.0 }
    } else {
        Chart { x: dir[1] / dir[0], a: c1, b: c2, ma: alpha - 1.0, mb: 1.0 - alpha }
    })
}

/// Curvature form in coordinates `(z, w, x)` and the reference form
/// `omega_Y`: the canonical Gauduchon metric plus the Fubini-Study form
/// `1 / (1 + |x|^2)^2` on the fiber.
pub fn relative_tangent_curvature(
    params: &HopfParams,
    lambda1: f64,
    lambda2: f64,
    z: C,
    w: C,
    dir: &CVec,
) -> Result<(CMat, CMat), GeomError> {
    let alpha = params.alpha();
    let v = solve_phi(params, z, w)?;
    let phi = v.phi;
    let ch = chart(alpha, lambda1, lambda2, phi, dir)?;
    let xx = ch.x.norm_sqr();
    let s = ch.a + ch.b * xx;
    // d dbar log S = (mb p + ma q) / S * M + p q / S^2 * v v^*, with p = B |x|^2,
    // q = A and v = ((mb - ma) d log Phi, dx / x); p v v^* = B (x v)(x v)^*.
    let base = v.derivatives.m_log.map(|m| m * ((ch.mb * ch.b * xx + ch.ma * ch.a) / s));
    let dlog = [v.derivatives.d_phi[0] / phi, v.derivatives.d_phi[1] / phi];
    let xv = [ch.x * dlog[0] * (ch.mb - ch.ma), ch.x * dlog[1] * (ch.mb - ch.ma), c(1.0, 0.0)];
    let k = ch.a * ch.b / (s * s);
    let theta = CMat::from_fn(3, 3, |i, j| {
        let b = if i < 2 && j < 2 { base[(i, j)] } else { c(0.0, 0.0) };
        (b + xv[i] * xv[j].conj() * k) * 2.0
    });
    let (l1, l2) = params.canonical_lambdas();
    let fs = 1.0 / (1.0 + xx).powi(2);
    let reference = CMat::from_diagonal(&CVec::from_vec(vec![
        c(l1 * phi.powf(-alpha), 0.0),
        c(l2 * phi.powf(alpha - 2.0), 0.0),
        c(fs, 0.0),
    ]));
    Ok((theta, reference))
}

#[derive(Clone, Debug)]
pub struct RelativeTangentReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon: f64,
    /// Least eigenvalue of the curvature relative to `omega_Y`.
    pub min_eigenvalue: f64,
    pub witness_point: (C, C),
    pub witness_direction: CVec,
    /// `min_eigenvalue >= -epsilon`, i.e. `curvature >= -epsilon omega_Y`.
    pub pass: bool,
}

/// Least relative eigenvalue of the curvature over a base grid and fiber
/// directions.
pub fn relative_tangent_bound(
    params: &HopfParams,
    lambda1: f64,
    lambda2: f64,
    epsilon: f64,
    base_grid: &[(C, C)],
    fiber_samples: &[CVec],
) -> Result<RelativeTangentReport, GeomError> {
    if base_grid.is_empty() || fiber_samples.is_empty() {
        return Err(GeomError::Precondition("empty scan".into()));
    }
    let mut rep = RelativeTangentReport {
        lambda1,
        lambda2,
        epsilon,
        min_eigenvalue: f64::INFINITY,
        witness_point: base_grid[0],
        witness_direction: fiber_samples[0].clone(),
        pass: false,
    };
    for &(z, w) in base_grid {
        for dir in fiber_samples {
            let (theta, reference) = relative_tangent_curvature(params, lambda1, lambda2, z, w, dir)?;
            let least = generalized_eigenvalues(&theta, &reference)?[0];
            if least < rep.min_eigenvalue {
                rep.min_eigenvalue = least;
                rep.witness_point = (z, w);
                rep.witness_direction = dir.clone();
            }
        }
    }
    rep.pass = rep.min_eigenvalue >= -epsilon;
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct LambdaSearch {
    /// `(lambda2, least relative eigenvalue)` for every tried value.
    pub history: Vec<(f64, f64)>,
    /// The first `lambda2` meeting the bound, if any.
    pub found: Option<f64>,
    pub last: RelativeTangentReport,
}

/// Doubles `lambda2` from 1 until the bound holds or `2^max_doublings` is
/// exceeded.
pub fn lambda2_search(
    params: &HopfParams,
    lambda1: f64,
    epsilon: f64,
    base_grid: &[(C, C)],
    fiber_samples: &[CVec],
    max_doublings: u32,
) -> Result<LambdaSearch, GeomError> {
    let mut history = Vec::new();
    let mut lambda2 = 1.0;
    loop {
        let rep = relative_tangent_bound(params, lambda1, lambda2, epsilon, base_grid, fiber_samples)?;
        history.push((lambda2, rep.min_eigenvalue));
        if rep.pass {
            return Ok(LambdaSearch { history, found: Some(lambda2), last: rep });
        }
        if history.len() > max_doublings as usize {
            return Ok(LambdaSearch { history, found: None, last: rep });
        }
        lambda2 *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{self, Steps};
    use crate::hopf::{hopf_grid, solve_phi_value};
    use crate::linalg::min_eig;
    use crate::tautological::fiber_directions;

    fn unit(a: C, b: C) -> CVec {
        let v = CVec::from_vec(vec![a, b]);
        let n = v.norm();
        v.map(|x| x / n)
    }

    #[test]
    fn matches_fd_of_potential() {
        let p = HopfParams::from_alpha(1.4).unwrap();
        let (l1, l2) = (0.7, 3.0);
        let (z, w) = (c(0.6, 0.2), c(-0.4, 0.9));
        for dir in [unit(c(0.3, 0.1), c(0.8, -0.2)), unit(c(0.9, 0.1), c(0.2, 0.3))] {
            let use_w2 = dir[1].norm() >= dir[0].norm();
            let f = |x: &[C]| {
                let phi = solve_phi_value(&p, x[0], x[1]).unwrap();
                let c1 = phi.powf(p.alpha() - 1.0) / l1;
                let c2 = phi.powf(1.0 - p.alpha()) / l2;
                let s = if use_w2 { c1 * x[2].norm_sqr() + c2 } else { c1 + c2 * x[2].norm_sqr() };
                vec![c(2.0 * s.ln(), 0.0)]
            };
            let x0 = if use_w2 { dir[0] / dir[1] } else { dir[1] / dir[0] };
            let mixed = fd::wirtinger_mixed(&f, &[z, w, x0], &Steps::default());
            let numeric = CMat::from_fn(3, 3, |i, j| mixed[i][j][0]);
            let (theta, _) = relative_tangent_curvature(&p, l1, l2, z, w, &dir).unwrap();
            assert!((theta.clone() - numeric).norm() <= 1e-6 * theta.norm());
        }
    }

    #[test]
    fn alpha_one_is_fiberwise() {
        let p = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let rep = relative_tangent_bound(&p, 1.0, 5.0, 0.0, &hopf_grid(&p, 4), &fiber_directions(2, 16)).unwrap();
        assert!(rep.min_eigenvalue >= -1e-10);
        let (theta, _) = relative_tangent_curvature(&p, 1.0, 1.0, c(0.5, 0.0), c(0.5, 0.5), &unit(c(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert!((theta[(2, 2)].re - 2.0).abs() < 1e-14);
        assert!(theta.view((0, 0), (2, 2)).norm() < 1e-14);
    }

    #[test]
    fn axes() {
        let p = HopfParams::from_alpha(1.4).unwrap();
        let (z, w) = (c(0.6, 0.2), c(-0.4, 0.9));
        let m = solve_phi(&p, z, w).unwrap().derivatives.m_log;
        // W2 = 0: the base block is 2 (alpha - 1) d dbar log Phi.
        let (theta, _) = relative_tangent_curvature(&p, 1.0, 8.0, z, w, &unit(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        let base = theta.view((0, 0), (2, 2)).into_owned();
        assert!((base.clone() - m.map(|x| x * 0.8)).norm() < 1e-14);
        assert!(min_eig(&base) >= -1e-14);
        // W1 = 0: the base block is 2 (1 - alpha) d dbar log Phi for every lambda2.
        for l2 in [1.0, 1e6] {
            let (theta, _) = relative_tangent_curvature(&p, 1.0, l2, z, w, &unit(c(0.0, 0.0), c(1.0, 0.0))).unwrap();
            let base = theta.view((0, 0), (2, 2)).into_owned();
            assert!((base - m.map(|x| x * -0.8)).norm() < 1e-14);
        }
    }

    #[test]
    fn search_records_history() {
        let p = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let s = lambda2_search(&p, 1.0, 0.01, &hopf_grid(&p, 2), &fiber_directions(2, 4), 3).unwrap();
        assert_eq!(s.found, Some(1.0));
        let p = HopfParams::from_alpha(1.4).unwrap();
        let s = lambda2_search(&p, 1.0, 0.01, &hopf_grid(&p, 2), &fiber_directions(2, 4), 3).unwrap();
        assert_eq!(s.history.len(), 4);
        assert!(s.found.is_none());
    }
}
