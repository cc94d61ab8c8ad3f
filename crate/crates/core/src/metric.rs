//! Hermitian metrics on holomorphic bundles over a coordinate chart.

use std::fmt;
use std::sync::Arc;

use crate::fd::{self, Steps};
use crate::linalg::{is_finite, min_eig, CMat, C};
use crate::GeomError;

/// Value and derivatives of `H(z)` at one point: `d[i] = d_i H` and
/// `dd[i][j] = d_i dbar_j H`, with `H[a][b] = h(e_a, conj e_b)`.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub h: CMat,
    pub d: Vec<CMat>,
    pub dd: Vec<Vec<CMat>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffMethod {
    /// Closed-form jet when the field supplies one, finite differences otherwise.
    #[default]
    Auto,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DiffConfig {
    pub method: DiffMethod,
    pub steps: Steps,
}

pub type EvalFn = Arc<dyn Fn(&[C]) -> CMat + Send + Sync>;
pub type JetFn = Arc<dyn Fn(&[C]) -> MetricJet + Send + Sync>;

#[derive(Clone)]
pub struct MetricField {
    base_dim: usize,
    rank: usize,
    /// The bundle is the holomorphic tangent bundle of the chart.
    tangent: bool,
    kahler: bool,
    eval: EvalFn,
    jet: Option<JetFn>,
    pub diff: DiffConfig,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("base_dim", &self.base_dim)
            .field("rank", &self.rank)
            .field("tangent", &self.tangent)
            .field("kahler", &self.kahler)
            .field("closed_form_jet", &self.jet.is_some())
            .field("diff", &self.diff)
            .finish()
    }
}

impl MetricField {
    pub fn new(base_dim: usize, rank: usize, eval: EvalFn) -> Self {
        Self { base_dim, rank, tangent: false, kahler: false, eval, jet: None, diff: DiffConfig::default() }
    }

    /// A metric on the tangent bundle; `kahler` declares `d omega = 0`.
    pub fn tangent(n: usize, kahler: bool, eval: EvalFn) -> Self {
        Self { tangent: true, kahler, ..Self::new(n, n, eval) }
    }

    pub fn with_jet(mut self, jet: JetFn) -> Self {
        self.jet = Some(jet);
        self
    }

    pub fn with_diff(mut self, diff: DiffConfig) -> Self {
        self.diff = diff;
        self
    }

    /// Same field with closed-form derivatives disabled.
    pub fn finite_difference(&self) -> Self {
        let mut m = self.clone();
        m.diff.method = DiffMethod::FiniteDifference;
        m
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_tangent(&self) -> bool {
        self.tangent
    }

    pub fn is_kahler(&self) -> bool {
        self.tangent && self.kahler
    }

    pub fn has_closed_form(&self) -> bool {
        self.jet.is_some()
    }

    /// Raw evaluation without checks.
    pub fn raw(&self, z: &[C]) -> CMat {
        (self.eval)(z)
    }

    /// `H(z)`, checked to be finite and positive definite.
    pub fn evaluate(&self, z: &[C]) -> Result<CMat, GeomError> {
        if z.len() != self.base_dim {
            return Err(GeomError::Dimension { expected: self.base_dim, found: z.len() });
        }
        let h = (self.eval)(z);
        if !is_finite(&h) {
            return Err(GeomError::NonFinite("metric"));
        }
        let least = min_eig(&h);
        if least <= 0.0 {
            return Err(GeomError::NotPositiveDefinite(least));
        }
        Ok(h)
    }

    pub fn jet(&self, z: &[C]) -> Result<MetricJet, GeomError> {
        let h = self.evaluate(z)?;
        let jet = match (&self.jet, self.diff.method) {
            (Some(j), DiffMethod::Auto) => j(z),
            _ => self.fd_jet(z, h),
        };
        let finite = jet.d.iter().all(is_finite) && jet.dd.iter().flatten().all(is_finite);
        if !finite {
            return Err(GeomError::NonFinite("metric derivatives"));
        }
        Ok(jet)
    }

    fn fd_jet(&self, z: &[C], h: CMat) -> MetricJet {
        let r = self.rank;
        let f = |p: &[C]| (self.eval)(p).as_slice().to_vec();
        let to_mat = |v: &Vec<C>| CMat::from_column_slice(r, r, v);
        let d = fd::wirtinger_first(&f, z, &self.diff.steps).iter().map(to_mat).collect();
        let dd = fd::wirtinger_mixed(&f, z, &self.diff.steps)
            .iter()
            .map(|row| row.iter().map(to_mat).collect())
            .collect();
        MetricJet { h, d, dd }
    }

    /// Euclidean metric on the tangent bundle of `C^n`.
    pub fn flat(n: usize) -> Self {
        Self::tangent(n, true, Arc::new(move |_z: &[C]| CMat::identity(n, n)))
    }

    /// Fubini-Study metric of `P^n` in the affine chart,
    /// `g = delta / (1 + |z|^2) - conj(z_i) z_j / (1 + |z|^2)^2`.
    pub fn fubini_study(n: usize) -> Self {
        Self::product_fs(&[n])
    }

    /// Product of Fubini-Study metrics on `P^{n_1} x .. x P^{n_m}`.
    pub fn product_fs(factors: &[usize]) -> Self {
        let factors = factors.to_vec();
        let n: usize = factors.iter().sum();
        Self::tangent(
            n,
            true,
            Arc::new(move |z: &[C]| {
                let mut g = CMat::zeros(n, n);
                let mut start = 0;
                for &d in &factors {
                    let block = &z[start..start + d];
                    let s = 1.0 + block.iter().map(|x| x.norm_sqr()).sum::<f64>();
                    for i in 0..d {
                        for j in 0..d {
                            let delta = if i == j { 1.0 / s } else { 0.0 };
                            g[(start + i, start + j)] = C::new(delta, 0.0) - block[i].conj() * block[j] / (s * s);
                        }
                    }
                    start += d;
                }
                g
            }),
        )
    }
}
