//! The acceptance battery. Each criterion is a named group of checks with a
//! wall-clock budget; `Level::Quick` shrinks sample sizes, `Level::Full` uses
//! the reference sizes.

use std::time::Instant;

use chernpos::classes::{BasePresentation, BundleClass, ProjBundleRing, Relation};
use chernpos::curvature::{chern_curvature, chern_ricci};
use chernpos::extremal::{verify_lemma_linear, verify_lemma_linear1, FIRST_ORDER_TOL, INEQUALITY_SLACK};
use chernpos::hopf::{
    hopf_grid, lambda2_search, m_log_fd, random_point, relative_tangent_bound, semipositivity_scan, solve_phi,
    solve_phi_value, verify_gauduchon, HopfParams,
};
use chernpos::linalg::{c, min_eig, CMat, CVec, C};
use chernpos::metric::MetricField;
use chernpos::tautological::{fiber_directions, taut_curvature_at, taut_positivity_scan};
use chernpos::tensor::CurvatureTensor;
use chernpos::GeomError;
use clap::ValueEnum;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate defects used to show that the battery detects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// Reduce `xi^r` with the wrong sign.
    GrothendieckSign,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub level: Level,
    pub seed: u64,
    pub mutation: Option<Mutation>,
}

impl Options {
    pub fn new(level: Level, seed: u64) -> Self {
        Options { level, seed, mutation: None }
    }

    fn pick(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget_seconds: f64,
    run: fn(&Options) -> Vec<Check>,
}

impl Criterion {
    pub fn run(&self, opts: &Options) -> Vec<Check> {
        (self.run)(opts)
    }
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: "1", title: "exact class numbers", budget_seconds: 1.0, run: exact_classes },
    Criterion { id: "2", title: "pushforward identity", budget_seconds: 5.0, run: pushforward },
    Criterion { id: "3", title: "hopf solver", budget_seconds: 10.0, run: hopf_solver },
    Criterion { id: "4", title: "log-hessian closed forms", budget_seconds: 30.0, run: log_hessian },
    Criterion { id: "5", title: "gauduchon condition", budget_seconds: 60.0, run: gauduchon },
    Criterion { id: "6", title: "hopf semipositivity", budget_seconds: 60.0, run: hopf_semipositivity },
    Criterion { id: "7", title: "extremal lemma suites", budget_seconds: 120.0, run: lemma_suites },
    Criterion { id: "8", title: "curvature engine oracle", budget_seconds: 30.0, run: engine_oracle },
    Criterion { id: "9", title: "tautological positivity", budget_seconds: 60.0, run: tautological },
    Criterion { id: "10a", title: "relative tangent, diagonal case", budget_seconds: 60.0, run: relative_diagonal },
    Criterion { id: "10b", title: "relative tangent, lambda2 search", budget_seconds: 60.0, run: relative_search },
];

pub fn criterion(id: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

/// Check-name prefix; zero padded so that sorted output follows criterion order.
fn prefix(id: &str) -> String {
    let digits: String = id.chars().take_while(char::is_ascii_digit).collect();
    let rest = &id[digits.len()..];
    format!("c{:0>2}{rest}", digits)
}

pub const TOLERANCES: [(&str, f64); 17] = [
    ("alpha_one_rel", 1e-12),
    ("deck_equivariance_rel", 1e-10),
    ("engine_flat_abs", 1e-10),
    ("engine_fs_curvature_abs", 1e-8),
    ("engine_fs_ricci_abs", 1e-6),
    ("gauduchon_negative_control", 1e-4),
    ("gauduchon_residual", 1e-8),
    ("griffiths_min", -1e-8),
    ("lemma_first_order", FIRST_ORDER_TOL),
    ("lemma_inequality_slack", -INEQUALITY_SLACK),
    ("log_hessian_fd_rel", 1e-6),
    ("log_hessian_psd_rel", -1e-10),
    ("log_hessian_scaled_det", 1e-10),
    ("relative_diagonal", -1e-10),
    ("relative_search_epsilon", 0.01),
    ("taut_fs_min", 1.0 - 1e-6),
    ("taut_product_window", 1e-6),
];

fn tol(name: &str) -> f64 {
    TOLERANCES.iter().find(|t| t.0 == name).map(|t| t.1).expect("known tolerance")
}

/// Runs the selected criteria (all when `only` is empty).
pub fn run_suite(opts: &Options, only: &[String], command: Vec<String>) -> Result<Report, String> {
    let selected: Vec<&Criterion> = if only.is_empty() {
        CRITERIA.iter().collect()
    } else {
        only.iter().map(|id| criterion(id).ok_or_else(|| format!("unknown criterion {id:?}"))).collect::<Result<_, _>>()?
    };
    let start = Instant::now();
    let mut report = Report::new(command, opts.seed);
    for (name, value) in TOLERANCES {
        report.tolerance(name, value);
    }
    for crit in selected {
        report.extend(crit.run(opts));
    }
    report.finish(start.elapsed().as_secs_f64());
    Ok(report)
}

/// Turns a failed computation into a failing check instead of aborting.
fn guarded(name: String, f: impl FnOnce(&str) -> Result<Vec<Check>, GeomError>) -> Vec<Check> {
    f(&name).unwrap_or_else(|e| vec![Check::error(format!("{name}.error"), e)])
}

fn exact_classes(_: &Options) -> Vec<Check> {
    let p = prefix("1");
    let base = BasePresentation::projective(2);
    let mut out = Vec::new();
    for (label, expr, expected) in [("c2_tp2", "integrate(c2(T))", "3"), ("s2_tp2_twist", "integrate(s2(T (x) O(-1)))", "0")] {
        let name = format!("{p}.{label}");
        match chernpos::expr::run(expr, &base) {
            Ok(v) => {
                let text = v.to_string();
                let value = v.as_number().and_then(ToPrimitive::to_f64).unwrap_or(f64::NAN);
                out.push(Check::exact(name, &text, expected, value));
            }
            Err(e) => out.push(Check::error(name, e)),
        }
    }
    // The same numbers through the bundle API, bypassing the parser.
    let t = BundleClass::tangent(&base);
    let c2 = t.chern(2).integrate();
    out.push(Check::exact(format!("{p}.c2_tp2_direct"), &c2.to_string(), "3", c2.to_f64().unwrap_or(f64::NAN)));
    let twisted = t.twist(&BundleClass::line(&base, &[-1]).expect("line bundle")).expect("twist");
    let s2 = twisted.segre_part(2).integrate();
    out.push(Check::exact(format!("{p}.s2_tp2_twist_direct"), &s2.to_string(), "0", s2.to_f64().unwrap_or(f64::NAN)));
    out
}

/// Sum of line bundles, optionally with a twisted tangent bundle.
fn random_bundle(rng: &mut ChaCha8Rng, base: &BasePresentation) -> BundleClass {
    let m = base.num_factors();
    let line = |rng: &mut ChaCha8Rng| {
        let d: Vec<i64> = (0..m).map(|_| rng.random_range(-3..=3)).collect();
        BundleClass::line(base, &d).expect("degrees match base")
    };
    let mut e = if rng.random_bool(0.4) {
        let t = BundleClass::tangent(base);
        let l = line(rng);
        t.twist(&l).expect("twist by a line bundle")
    } else {
        line(rng)
    };
    for _ in 0..rng.random_range(0..=2) {
        let l = line(rng);
        e = e.direct_sum(&l);
    }
    e
}

fn pushforward(opts: &Options) -> Vec<Check> {
    let p = prefix("2");
    let relation = match opts.mutation {
        Some(Mutation::GrothendieckSign) => Relation::FlippedSign,
        None => Relation::Dual,
    };
    let bases: Vec<BasePresentation> = ["P2", "P3", "P1xP1"].iter().map(|s| s.parse().expect("valid base")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5e97e);
    let count = opts.pick(30, 100);
    let mut mismatches = 0usize;
    for k in 0..count {
        let e = random_bundle(&mut rng, &bases[k % bases.len()]);
        let ring = ProjBundleRing::with_relation(&e, relation);
        let n = e.base().dim();
        let lhs = ring.integrate(&ring.xi_power(n + e.rank() - 1));
        if lhs != e.signed_segre_number().value {
            mismatches += 1;
        }
    }
    let mut out = vec![Check::exact(
        format!("{p}.random_bundle_mismatches"),
        &mismatches.to_string(),
        "0",
        mismatches as f64,
    )];
    let base = BasePresentation::projective(2);
    let ring = ProjBundleRing::with_relation(&BundleClass::tangent(&base), relation);
    let top = ring.integrate(&ring.xi_power(3));
    out.push(Check::exact(format!("{p}.tangent_p2"), &top.to_string(), "6", top.to_f64().unwrap_or(f64::NAN)));
    let cube = ring.integrate(&ring.pow(&ring.anticanonical_class(), 3));
    out.push(Check::exact(format!("{p}.anticanonical_cube"), &cube.to_string(), "48", cube.to_f64().unwrap_or(f64::NAN)));
    out
}

fn parameter_pairs() -> Vec<HopfParams> {
    [
        (c(2.0, 0.0), c(2.0, 0.0)),
        (c(3.0, 1.0), c(1.2, -0.9)),
        (c(0.0, 5.0), c(1.5, 0.0)),
        (c(1.4f64.exp(), 0.0), c(0.6f64.exp(), 0.0)),
        (c(-4.0, 4.0), c(1.1, 0.3)),
    ]
    .into_iter()
    .map(|(a, b)| HopfParams::new(a, b).expect("valid deck parameters"))
    .collect()
}

fn hopf_solver(opts: &Options) -> Vec<Check> {
    let p = prefix("3");
    let n = opts.pick(200, 1000);
    let mut out = guarded(format!("{p}.alpha_one"), |name| {
        let params = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0))?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3a);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let (z, w) = random_point(&mut rng, 1e-2, 1e2);
            let s = z.norm_sqr() + w.norm_sqr();
            worst = worst.max((solve_phi_value(&params, z, w)? - s).abs() / s);
        }
        Ok(vec![Check::at_most(format!("{name}.max_rel_error"), worst, tol("alpha_one_rel"))])
    });
    out.extend(guarded(format!("{p}.deck_equivariance"), |name| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3b);
        let mut worst = 0.0f64;
        for params in parameter_pairs() {
            for _ in 0..n {
                let (z, w) = random_point(&mut rng, 1e-2, 1e2);
                let phi = solve_phi_value(&params, z, w)?;
                let moved = solve_phi_value(&params, params.a * z, params.b * w)?;
                worst = worst.max((moved - params.a.norm() * params.b.norm() * phi).abs() / moved);
            }
        }
        Ok(vec![Check::at_most(format!("{name}.max_rel_error"), worst, tol("deck_equivariance_rel"))])
    }));
    out
}

const ALPHAS: [f64; 4] = [1.0, 1.2, 1.4, 1.8];

fn log_hessian(opts: &Options) -> Vec<Check> {
    let p = prefix("4");
    guarded(p, |name| {
        let n = opts.pick(200, 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4);
        let (mut fd_gap, mut det, mut psd) = (0.0f64, 0.0f64, f64::INFINITY);
        for k in 0..n {
            let params = HopfParams::from_alpha(ALPHAS[k % ALPHAS.len()])?;
            let (z, w) = random_point(&mut rng, 1.0, params.a.norm());
            let der = solve_phi(&params, z, w)?.derivatives;
            let scale = der.m_log.norm();
            fd_gap = fd_gap.max((m_log_fd(&params, z, w)? - &der.m_log).norm() / scale);
            det = det.max(der.scaled_det().abs());
            psd = psd.min(min_eig(&der.m_log) / scale);
        }
        Ok(vec![
            Check::at_most(format!("{name}.fd_rel_gap"), fd_gap, tol("log_hessian_fd_rel")),
            Check::at_most(format!("{name}.scaled_det"), det, tol("log_hessian_scaled_det")),
            Check::at_least(format!("{name}.min_rel_eigenvalue"), psd, tol("log_hessian_psd_rel")),
        ])
    })
}

fn gauduchon(opts: &Options) -> Vec<Check> {
    let p = prefix("5");
    let n = opts.pick(10, 20);
    let mut out = Vec::new();
    for alpha in ALPHAS {
        out.extend(guarded(format!("{p}.alpha_{alpha:.1}"), |name| {
            let params = HopfParams::from_alpha(alpha)?;
            let rep = verify_gauduchon(&params, &hopf_grid(&params, n))?;
            Ok(vec![Check::at_most(format!("{name}.residual"), rep.max_closed_residual, tol("gauduchon_residual"))])
        }));
    }
    out.extend(guarded(format!("{p}.negative_control"), |name| {
        let params = HopfParams::from_alpha(1.4)?.with_lambdas(1.0, 1.0)?;
        let rep = verify_gauduchon(&params, &hopf_grid(&params, n))?;
        Ok(vec![Check::at_least(format!("{name}.residual"), rep.max_closed_residual, tol("gauduchon_negative_control"))])
    }));
    out
}

fn hopf_semipositivity(opts: &Options) -> Vec<Check> {
    let p = prefix("6");
    let (n, pairs) = (opts.pick(10, 20), opts.pick(200, 1000));
    let mut out = Vec::new();
    for alpha in [1.0, 1.4, 1.8] {
        out.extend(guarded(format!("{p}.alpha_{alpha:.1}"), |name| {
            let params = HopfParams::from_alpha(alpha)?;
            let rep = semipositivity_scan(&params, &hopf_grid(&params, n), pairs, opts.seed)?;
            Ok(vec![
                Check::at_least(format!("{name}.griffiths_min"), rep.min_griffiths, tol("griffiths_min")),
                Check::at_least(format!("{name}.sampled_min"), rep.min_sampled, tol("griffiths_min")),
            ])
        }));
    }
    out
}

fn lemma_suites(opts: &Options) -> Vec<Check> {
    let p = prefix("7");
    guarded(p, |name| {
        let count = opts.pick(40, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7);
        let mut slack = [f64::INFINITY; 2];
        let mut first = [0.0f64; 2];
        for k in 0..count {
            let r = CurvatureTensor::random_kahler(2 + k % 2, &mut rng);
            let seed = opts.seed.wrapping_add(k as u64);
            for (i, rep) in [verify_lemma_linear(&r, 200, seed)?, verify_lemma_linear1(&r, 200, seed)?].iter().enumerate() {
                slack[i] = slack[i].min(rep.min_inequality_slack);
                first[i] = first[i].max(rep.max_first_order);
            }
        }
        let mut out = Vec::new();
        for (i, label) in ["linear", "linear1"].iter().enumerate() {
            out.push(Check::at_least(format!("{name}.{label}.inequality_slack"), slack[i], tol("lemma_inequality_slack")));
            out.push(Check::at_most(format!("{name}.{label}.first_order"), first[i], tol("lemma_first_order")));
        }
        Ok(out)
    })
}

pub(crate) fn engine_checks(prefix: &str) -> Vec<Check> {
    guarded(prefix.to_string(), |name| {
        let origin = [c(0.0, 0.0), c(0.0, 0.0)];
        let fs = MetricField::fubini_study(2).finite_difference();
        let r = chern_curvature(&fs, &origin)?;
        let delta = |i: usize, j: usize| f64::from(u8::from(i == j));
        let mut gap = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let expected = delta(i, j) * delta(k, l) + delta(i, l) * delta(k, j);
                        gap = gap.max((r.get(i, j, k, l) - c(expected, 0.0)).norm());
                    }
                }
            }
        }
        let ric = chern_ricci(&fs, &origin)?;
        let ric_gap = (ric - CMat::identity(2, 2).map(|x| x * 3.0)).camax();
        let mut flat = 0.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(0x8);
        for _ in 0..10 {
            let z: Vec<C> = (0..2).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
            flat = flat.max(chern_curvature(&MetricField::flat(2).finite_difference(), &z)?.max_abs());
        }
        Ok(vec![
            Check::at_most(format!("{name}.fs_curvature_gap"), gap, tol("engine_fs_curvature_abs")),
            Check::at_most(format!("{name}.fs_ricci_gap"), ric_gap, tol("engine_fs_ricci_abs")),
            Check::at_most(format!("{name}.flat_max_abs"), flat, tol("engine_flat_abs")),
        ])
    })
}

fn engine_oracle(_: &Options) -> Vec<Check> {
    engine_checks(&prefix("8"))
}

/// Base points: the chart origin followed by seeded uniform points.
pub(crate) fn base_grid(dim: usize, points: usize, seed: u64) -> Vec<Vec<C>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![c(0.0, 0.0); dim]];
    while out.len() < points.max(1) {
        out.push((0..dim).map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect());
    }
    out
}

fn tautological(opts: &Options) -> Vec<Check> {
    let p = prefix("9");
    let (points, dirs) = (opts.pick(8, 25), opts.pick(24, 80));
    let mut out = guarded(format!("{p}.p2"), |name| {
        let metric = MetricField::fubini_study(2);
        let rep = taut_positivity_scan(&metric, &base_grid(2, points, opts.seed ^ 0x9), &fiber_directions(2, dirs))?;
        let r = chern_curvature(&metric, &[c(0.0, 0.0), c(0.0, 0.0)])?;
        let a = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let spot = taut_curvature_at(&r, &a)?;
        let expected = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]));
        Ok(vec![
            Check::at_least(format!("{name}.min_eigenvalue"), rep.min_eigenvalue, tol("taut_fs_min")),
            Check::at_most(format!("{name}.spot_gap"), (spot - expected).camax(), 1e-8),
        ])
    });
    out.extend(guarded(format!("{p}.p1xp1"), |name| {
        let metric = MetricField::product_fs(&[1, 1]);
        let rep = taut_positivity_scan(&metric, &base_grid(2, points, opts.seed ^ 0x99), &fiber_directions(2, dirs))?;
        Ok(vec![
            Check::within(format!("{name}.min_eigenvalue"), rep.min_eigenvalue, -1e-8, tol("taut_product_window")),
            Check::at_least(format!("{name}.best_sample_min"), rep.best_sample_min, 0.1),
        ])
    }));
    out
}

fn relative_grid(opts: &Options, params: &HopfParams) -> (Vec<(C, C)>, Vec<CVec>) {
    (hopf_grid(params, opts.pick(6, 10)), fiber_directions(2, opts.pick(16, 32)))
}

fn relative_diagonal(opts: &Options) -> Vec<Check> {
    guarded(prefix("10a"), |name| {
        let params = HopfParams::new(c(2.0, 0.0), c(2.0, 0.0))?;
        let (grid, fiber) = relative_grid(opts, &params);
        let rep = relative_tangent_bound(&params, params.lambda1, params.lambda2, 0.0, &grid, &fiber)?;
        Ok(vec![Check::at_least(format!("{name}.min_eigenvalue"), rep.min_eigenvalue, tol("relative_diagonal"))])
    })
}

/// Largest `lambda2` tried is `2^MAX_DOUBLINGS`.
pub const MAX_DOUBLINGS: u32 = 40;

fn relative_search(opts: &Options) -> Vec<Check> {
    guarded(prefix("10b"), |name| {
        let params = HopfParams::from_alpha(1.4)?;
        let (grid, fiber) = relative_grid(opts, &params);
        let eps = tol("relative_search_epsilon");
        let s = lambda2_search(&params, params.lambda1, eps, &grid, &fiber, MAX_DOUBLINGS)?;
        let best = s.history.iter().map(|h| h.1).fold(f64::NEG_INFINITY, f64::max);
        Ok(vec![
            Check::flag(format!("{name}.terminated"), s.found.is_some(), "some lambda2 meets the bound"),
            Check::at_least(format!("{name}.best_bound"), best, -eps),
        ])
    })
}
