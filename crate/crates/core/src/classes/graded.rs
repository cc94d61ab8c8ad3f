//! Truncated graded rings `Q[h_1, .., h_m] / (h_i^{n_i + 1})`, the rational
//! cohomology of a product of projective spaces.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ClassError;

/// Dimensions `(n_1, .., n_m)` of the projective-space factors of the base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasePresentation {
    factors: Vec<u32>,
}

impl BasePresentation {
    pub fn new(factors: Vec<u32>) -> Result<Self, ClassError> {
        if factors.is_empty() {
            return Err(ClassError::InvalidBase("at least one factor is required".into()));
        }
        if factors.contains(&0) {
            return Err(ClassError::InvalidBase("every factor must have dimension >= 1".into()));
        }
        Ok(Self { factors })
    }

    pub fn projective(n: u32) -> Self {
        Self::new(vec![n]).expect("P^n with n >= 1")
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Total complex dimension.
    pub fn dim(&self) -> u32 {
        self.factors.iter().sum()
    }

    fn admits(&self, exps: &[u32]) -> bool {
        exps.len() == self.factors.len() && exps.iter().zip(&self.factors).all(|(e, n)| e <= n)
    }
}

impl FromStr for BasePresentation {
    type Err = ClassError;

    /// Accepts `P2`, `P1xP1`, `P1xP2xP3` (case-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let factors = s
            .trim()
            .split(['x', 'X'])
            .map(|part| {
                let digits = part.trim().strip_prefix(['P', 'p']).ok_or_else(|| {
                    ClassError::InvalidBase(format!("factor `{part}` must look like `P<n>`"))
                })?;
                digits
                    .parse::<u32>()
                    .map_err(|_| ClassError::InvalidBase(format!("bad factor dimension in `{part}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(factors)
    }
}

impl fmt::Display for BasePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("P{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Exponent tuple of a monomial `h_1^{e_1} .. h_m^{e_m}`.
///
/// Ordered by total degree first, then lexicographically, which is the
/// canonical serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A class in the truncated ring of a [`BasePresentation`], with exact
/// rational coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedClass {
    base: BasePresentation,
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GradedClass {
    pub fn zero(base: &BasePresentation) -> Self {
        Self { base: base.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(base: &BasePresentation, value: BigRational) -> Self {
        let mut out = Self::zero(base);
        out.insert(vec![0; base.num_factors()], value);
        out
    }

    pub fn one(base: &BasePresentation) -> Self {
        Self::constant(base, BigRational::one())
    }

    /// The hyperplane class `h_i` of factor `i` (0-based).
    pub fn generator(base: &BasePresentation, factor: usize) -> Self {
        let mut exps = vec![0; base.num_factors()];
        exps[factor] = 1;
        Self::monomial(base, exps, BigRational::one())
    }

    /// `coeff * h^exps`, or zero when the monomial is killed by truncation.
    pub fn monomial(base: &BasePresentation, exps: Vec<u32>, coeff: BigRational) -> Self {
        assert_eq!(exps.len(), base.num_factors(), "exponent arity must match the base");
        let mut out = Self::zero(base);
        out.insert(exps, coeff);
        out
    }

    /// Builds a class from `(exponents, coefficient)` pairs, dropping
    /// monomials beyond the truncation.
    pub fn from_terms<I>(base: &BasePresentation, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut out = Self::zero(base);
        for (exps, c) in terms {
            out.insert(exps, c);
        }
        out
    }

    fn insert(&mut self, exps: Vec<u32>, coeff: BigRational) {
        if coeff.is_zero() || !self.base.admits(&exps) {
            return;
        }
        let key = Monomial(exps);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn base(&self) -> &BasePresentation {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Homogeneous component of total degree `k`.
    pub fn graded_part(&self, k: u32) -> Self {
        Self {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(&self.base);
        }
        Self {
            base: self.base.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::one(&self.base);
        let mut sq = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Coefficient of the top monomial `h_1^{n_1} .. h_m^{n_m}`, i.e. the
    /// degree of the class against the fundamental class.
    pub fn integrate(&self) -> BigRational {
        self.coefficient(self.base.factors())
    }

    /// Applies `c_k -> (-1)^k c_k` to every homogeneous component.
    pub fn alternate_signs(&self) -> Self {
        Self {
            base: self.base.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if m.degree() % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    fn assert_same_base(&self, other: &Self) {
        assert_eq!(self.base, other.base, "graded classes live on different bases");
    }

    /// Writes the canonical text form, optionally tagging every term with a
    /// trailing `xi^e` factor.
    pub(crate) fn write_terms(&self, out: &mut Vec<String>, xi_power: u32) {
        for (m, c) in &self.terms {
            let mut factors = vec![format_rational(c)];
            for (i, e) in m.exponents().iter().enumerate() {
                if *e > 0 {
                    factors.push(format!("h{}^{}", i + 1, e));
                }
            }
            if xi_power > 0 {
                factors.push(format!("xi^{xi_power}"));
            }
            out.push(factors.join(" * "));
        }
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, t) in terms.into_iter().enumerate() {
        if i == 0 {
            s.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(&t);
        }
    }
    s
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        self.write_terms(&mut parts, 0);
        f.write_str(&join_terms(parts))
    }
}

impl Add for &GradedClass {
    type Output = GradedClass;
    fn add(self, rhs: &GradedClass) -> GradedClass {
        self.assert_same_base(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.0.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GradedClass {
    type Output = GradedClass;
    fn sub(self, rhs: &GradedClass) -> GradedClass {
        self + &(-rhs)
    }
}

impl Neg for &GradedClass {
    type Output = GradedClass;
    fn neg(self) -> GradedClass {
        GradedClass {
            base: self.base.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &GradedClass {
    type Output = GradedClass;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &GradedClass) -> GradedClass {
        self.assert_same_base(rhs);
        let mut out = GradedClass::zero(&self.base);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.insert(exps, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GradedClass {
            type Output = GradedClass;
            fn $m(self, rhs: GradedClass) -> GradedClass {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GradedClass {
    type Output = GradedClass;
    fn neg(self) -> GradedClass {
        -&self
    }
}

/// `true` when `q` is strictly positive.
pub(crate) fn is_positive(q: &BigRational) -> bool {
    q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> BasePresentation {
        BasePresentation::projective(2)
    }

    #[test]
    fn parses_bases() {
        assert_eq!("P2".parse::<BasePresentation>().unwrap().factors(), &[2]);
        assert_eq!("P1xP1".parse::<BasePresentation>().unwrap().factors(), &[1, 1]);
        assert_eq!("p1Xp2".parse::<BasePresentation>().unwrap().dim(), 3);
        assert!("P0".parse::<BasePresentation>().is_err());
        assert!("Q2".parse::<BasePresentation>().is_err());
        assert!("".parse::<BasePresentation>().is_err());
    }

    #[test]
    fn hyperplane_square_integrates_to_one() {
        let h = GradedClass::generator(&p2(), 0);
        assert_eq!(h.pow(2).integrate(), rat(1));
        assert!(h.pow(3).is_zero());
    }

    #[test]
    fn product_of_lines_on_p1xp1() {
        let base: BasePresentation = "P1xP1".parse().unwrap();
        let s = &GradedClass::generator(&base, 0) + &GradedClass::generator(&base, 1);
        let sq = s.pow(2);
        assert_eq!(sq.integrate(), rat(2));
        assert_eq!(sq.to_string(), "2 * h1^1 * h2^1");
    }

    #[test]
    fn truncation_kills_high_powers() {
        let base: BasePresentation = "P1xP2".parse().unwrap();
        for f in 0..2 {
            let n = base.factors()[f];
            for e in 0..=n {
                let mut exps = vec![0, 0];
                exps[f] = e;
                let m = GradedClass::monomial(&base, exps, rat(5));
                let killer = GradedClass::generator(&base, f).pow(n + 1 - e);
                assert!((&m * &killer).is_zero());
            }
        }
    }

    #[test]
    fn canonical_text_form() {
        let base = p2();
        let h = GradedClass::generator(&base, 0);
        let c = &(&GradedClass::one(&base) + &h.scale(&rat(3))) - &h.pow(2).scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(c.to_string(), "1 + 3 * h1^1 - 1/2 * h1^2");
        assert_eq!(GradedClass::zero(&base).to_string(), "0");
    }
}
