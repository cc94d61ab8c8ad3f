//! The ring of `Y = P(E*)`: classes are polynomials in `xi = c_1(O_Y(1))` of
//! degree `< r` with coefficients pulled back from the base.

use std::fmt;

use num_rational::BigRational;

use super::bundle::BundleClass;
use super::graded::{join_terms, rat, GradedClass};

/// Sign used when reducing `xi^r`. [`Relation::Dual`] is the correct relation
/// `xi^r + c_1(E*) xi^{r-1} + .. + c_r(E*) = 0`; [`Relation::FlippedSign`]
/// exists only so that test batteries can check they detect a sign error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Relation {
    #[default]
    Dual,
    FlippedSign,
}

#[derive(Clone, Debug)]
pub struct ProjBundleRing {
    bundle: BundleClass,
    /// `xi^r = sum_{i=1}^{r} reduction[i - 1] * xi^{r - i}`.
    reduction: Vec<GradedClass>,
}

/// A class on `Y`, stored as coefficients of `1, xi, .., xi^{r-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjClass {
    coeffs: Vec<GradedClass>,
}

impl ProjClass {
    pub fn coefficients(&self) -> &[GradedClass] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(GradedClass::is_zero)
    }
}

impl fmt::Display for ProjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            c.write_terms(&mut parts, j as u32);
        }
        f.write_str(&join_terms(parts))
    }
}

impl ProjBundleRing {
    pub fn new(bundle: &BundleClass) -> Self {
        Self::with_relation(bundle, Relation::Dual)
    }

    pub fn with_relation(bundle: &BundleClass, relation: Relation) -> Self {
        let dual = bundle.dual();
        let reduction = (1..=bundle.rank())
            .map(|i| match relation {
                Relation::Dual => -&dual.chern(i),
                Relation::FlippedSign => dual.chern(i),
            })
            .collect();
        Self { bundle: bundle.clone(), reduction }
    }

    pub fn bundle(&self) -> &BundleClass {
        &self.bundle
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank() as usize
    }

    /// `dim Y = dim X + r - 1`.
    pub fn dim(&self) -> u32 {
        self.bundle.base().dim() + self.bundle.rank() - 1
    }

    pub fn zero(&self) -> ProjClass {
        ProjClass { coeffs: vec![GradedClass::zero(self.bundle.base()); self.rank()] }
    }

    /// `pi^* beta`.
    pub fn pullback(&self, beta: &GradedClass) -> ProjClass {
        let mut out = self.zero();
        out.coeffs[0] = beta.clone();
        out
    }

    pub fn one(&self) -> ProjClass {
        self.pullback(&GradedClass::one(self.bundle.base()))
    }

    pub fn xi(&self) -> ProjClass {
        self.from_xi_poly(vec![
            GradedClass::zero(self.bundle.base()),
            GradedClass::one(self.bundle.base()),
        ])
    }

    /// Reduces an arbitrary polynomial in `xi` with base coefficients.
    pub fn from_xi_poly(&self, mut coeffs: Vec<GradedClass>) -> ProjClass {
        let r = self.rank();
        while coeffs.len() > r {
            let top = coeffs.pop().expect("nonempty");
            let d = coeffs.len();
            if top.is_zero() {
                continue;
            }
            for (i, red) in self.reduction.iter().enumerate() {
                let target = d - 1 - i;
                coeffs[target] = &coeffs[target] + &(&top * red);
            }
        }
        coeffs.resize(r, GradedClass::zero(self.bundle.base()));
        ProjClass { coeffs }
    }

    pub fn add(&self, a: &ProjClass, b: &ProjClass) -> ProjClass {
        ProjClass { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, a: &ProjClass, s: &BigRational) -> ProjClass {
        ProjClass { coeffs: a.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn mul(&self, a: &ProjClass, b: &ProjClass) -> ProjClass {
        let base = self.bundle.base();
        let mut prod = vec![GradedClass::zero(base); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] = &prod[i + j] + &(x * y);
            }
        }
        self.from_xi_poly(prod)
    }

    pub fn pow(&self, a: &ProjClass, mut k: u32) -> ProjClass {
        let mut acc = self.one();
        let mut sq = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `xi^k`, reduced.
    pub fn xi_power(&self, k: u32) -> ProjClass {
        self.pow(&self.xi(), k)
    }

    /// `pi_*`: the coefficient of `xi^{r-1}` in reduced form. Classes without
    /// an `xi^{r-1}` component push forward to zero.
    pub fn pushforward(&self, a: &ProjClass) -> GradedClass {
        a.coeffs[self.rank() - 1].clone()
    }

    /// Degree on `Y`, computed as `\int_X pi_*(a)`.
    pub fn integrate(&self, a: &ProjClass) -> BigRational {
        self.pushforward(a).integrate()
    }

    /// `c_1(K_Y) = -r xi + pi^*(c_1(K_X) + c_1(E))`, from
    /// `K_Y = O_Y(-r) (x) pi^*(K_X (x) det E)`.
    pub fn canonical_class(&self) -> ProjClass {
        let base = self.bundle.base();
        let k_x = -&BundleClass::tangent(base).chern(1);
        let beta = &k_x + &self.bundle.chern(1);
        let r = rat(i64::from(self.bundle.rank()));
        self.add(&self.scale(&self.xi(), &-r), &self.pullback(&beta))
    }

    /// `c_1(K_Y^{-1})`.
    pub fn anticanonical_class(&self) -> ProjClass {
        self.scale(&self.canonical_class(), &rat(-1))
    }
}
