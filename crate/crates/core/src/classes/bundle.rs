//! Total Chern classes of bundles built from tangent bundles and line bundles,
//! their Segre classes, and the signed top Segre number.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::graded::{is_positive, rat, BasePresentation, GradedClass};
use super::ClassError;

/// Description of a bundle on a product of projective spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleDesc {
    /// Holomorphic tangent bundle of the whole product.
    Tangent,
    Cotangent,
    /// `O(d_1, .., d_m)`.
    Line(Vec<i64>),
    Sum(Vec<BundleDesc>),
    /// Tensor product; at most one factor may have rank > 1.
    Tensor(Vec<BundleDesc>),
    Dual(Box<BundleDesc>),
    Det(Box<BundleDesc>),
}

/// A bundle reduced to its numerical data: rank and total Chern class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleClass {
    rank: u32,
    total_chern: GradedClass,
}

impl BundleClass {
    /// Validates `c_0 = 1` and `c_k = 0` for `k > rank`.
    pub fn new(rank: u32, total_chern: GradedClass) -> Result<Self, ClassError> {
        if rank == 0 {
            return Err(ClassError::InvalidRank);
        }
        let base = total_chern.base().clone();
        if total_chern.graded_part(0) != GradedClass::one(&base) {
            return Err(ClassError::InvalidChernClass("degree-0 term must be 1".into()));
        }
        if total_chern.max_degree().unwrap_or(0) > rank {
            return Err(ClassError::InvalidChernClass(format!(
                "nonzero Chern class above the rank {rank}"
            )));
        }
        Ok(Self { rank, total_chern })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn base(&self) -> &BasePresentation {
        self.total_chern.base()
    }

    pub fn total_chern(&self) -> &GradedClass {
        &self.total_chern
    }

    /// `c_k(E)`.
    pub fn chern(&self, k: u32) -> GradedClass {
        self.total_chern.graded_part(k)
    }

    pub fn trivial(base: &BasePresentation, rank: u32) -> Self {
        Self { rank, total_chern: GradedClass::one(base) }
    }

    pub fn line(base: &BasePresentation, degrees: &[i64]) -> Result<Self, ClassError> {
        if degrees.len() != base.num_factors() {
            return Err(ClassError::BaseMismatch {
                expected: base.num_factors(),
                found: degrees.len(),
            });
        }
        let mut c = GradedClass::one(base);
        for (i, d) in degrees.iter().enumerate() {
            c = &c + &GradedClass::generator(base, i).scale(&rat(*d));
        }
        Ok(Self { rank: 1, total_chern: c })
    }

    /// `T(P^{n_1} x .. x P^{n_m})`, with `c = prod (1 + h_i)^{n_i + 1}` from
    /// the Euler sequence.
    pub fn tangent(base: &BasePresentation) -> Self {
        let mut c = GradedClass::one(base);
        for (i, n) in base.factors().iter().enumerate() {
            let one_plus_h = &GradedClass::one(base) + &GradedClass::generator(base, i);
            c = &c * &one_plus_h.pow(n + 1);
        }
        Self { rank: base.dim(), total_chern: c }
    }

    pub fn dual(&self) -> Self {
        Self { rank: self.rank, total_chern: self.total_chern.alternate_signs() }
    }

    pub fn det(&self) -> Self {
        Self {
            rank: 1,
            total_chern: &GradedClass::one(self.base()) + &self.chern(1),
        }
    }

    /// Whitney sum formula.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            rank: self.rank + other.rank,
            total_chern: &self.total_chern * &other.total_chern,
        }
    }

    /// `E (x) L` for a line bundle `L`:
    /// `c_k(E (x) L) = sum_i binom(r - i, k - i) c_i(E) c_1(L)^{k - i}`.
    pub fn twist(&self, line: &Self) -> Result<Self, ClassError> {
        if line.rank != 1 {
            return Err(ClassError::UnsupportedTensor);
        }
        let base = self.base();
        let r = self.rank;
        let l = line.chern(1);
        let mut total = GradedClass::zero(base);
        for k in 0..=r {
            for i in 0..=k {
                let coeff = binomial(r - i, k - i);
                if coeff.is_zero() {
                    continue;
                }
                let term = &self.chern(i) * &l.pow(k - i);
                total = &total + &term.scale(&coeff);
            }
        }
        Self::new(r, total)
    }

    /// Tensor product where at most one side has rank > 1.
    pub fn tensor(&self, other: &Self) -> Result<Self, ClassError> {
        match (self.rank, other.rank) {
            (_, 1) => self.twist(other),
            (1, _) => other.twist(self),
            _ => Err(ClassError::UnsupportedTensor),
        }
    }

    /// Total Segre class `s(E)` with `c(E) s(E) = 1`, via
    /// `s_k = -(c_1 s_{k-1} + .. + c_{k-1} s_1 + c_k)`.
    pub fn segre(&self) -> GradedClass {
        let base = self.base().clone();
        let n = base.dim();
        let chern: Vec<GradedClass> = (0..=n).map(|k| self.chern(k)).collect();
        let mut parts = vec![GradedClass::one(&base)];
        for k in 1..=n as usize {
            let mut acc = GradedClass::zero(&base);
            for i in 1..=k {
                acc = &acc + &(&chern[i] * &parts[k - i]);
            }
            parts.push(-acc);
        }
        parts.iter().fold(GradedClass::zero(&base), |acc, p| &acc + p)
    }

    /// `s_k(E)`.
    pub fn segre_part(&self, k: u32) -> GradedClass {
        self.segre().graded_part(k)
    }

    /// `(-1)^n \int s_n(E)` with `n = dim X`. A nef bundle is big exactly when
    /// this is positive; nefness is the caller's responsibility.
    pub fn signed_segre_number(&self) -> SegreVerdict {
        let n = self.base().dim();
        let raw = self.segre_part(n).integrate();
        let value = if n % 2 == 1 { -raw } else { raw };
        let big_if_nef = is_positive(&value);
        SegreVerdict { value, big_if_nef }
    }
}

/// Outcome of the signed Segre test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegreVerdict {
    pub value: BigRational,
    /// Bigness verdict, valid under the assumption that the bundle is nef.
    pub big_if_nef: bool,
}

fn binomial(n: u32, k: u32) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * rat(i64::from(n - j)) / rat(i64::from(j + 1));
    }
    acc
}

/// Evaluates a [`BundleDesc`] on `base`.
pub fn total_chern(base: &BasePresentation, desc: &BundleDesc) -> Result<BundleClass, ClassError> {
    Ok(match desc {
        BundleDesc::Tangent => BundleClass::tangent(base),
        BundleDesc::Cotangent => BundleClass::tangent(base).dual(),
        BundleDesc::Line(d) => BundleClass::line(base, d)?,
        BundleDesc::Sum(parts) => {
            let mut it = parts.iter();
            let first = it.next().ok_or(ClassError::EmptyDescriptor)?;
            let mut acc = total_chern(base, first)?;
            for p in it {
                acc = acc.direct_sum(&total_chern(base, p)?);
            }
            acc
        }
        BundleDesc::Tensor(parts) => {
            let mut it = parts.iter();
            let first = it.next().ok_or(ClassError::EmptyDescriptor)?;
            let mut acc = total_chern(base, first)?;
            for p in it {
                acc = acc.tensor(&total_chern(base, p)?)?;
            }
            acc
        }
        BundleDesc::Dual(inner) => total_chern(base, inner)?.dual(),
        BundleDesc::Det(inner) => total_chern(base, inner)?.det(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> BasePresentation {
        BasePresentation::projective(2)
    }

    fn h2(base: &BasePresentation, c: i64) -> GradedClass {
        GradedClass::monomial(base, vec![2], rat(c))
    }

    #[test]
    fn tangent_of_p2() {
        let t = BundleClass::tangent(&p2());
        assert_eq!(t.rank(), 2);
        assert_eq!(t.total_chern().to_string(), "1 + 3 * h1^1 + 3 * h1^2");
        assert_eq!(t.chern(2).integrate(), rat(3));
    }

    #[test]
    fn trivial_line_bundle_has_trivial_class() {
        for base in ["P2", "P1xP1", "P3"] {
            let base: BasePresentation = base.parse().unwrap();
            let zeros = vec![0; base.num_factors()];
            let o = BundleClass::line(&base, &zeros).unwrap();
            assert_eq!(o.total_chern(), &GradedClass::one(&base));
            assert_eq!(o.segre(), GradedClass::one(&base));
        }
    }

    #[test]
    fn hyperplane_twist_of_tangent() {
        let base = p2();
        let e = BundleClass::tangent(&base).twist(&BundleClass::line(&base, &[-1]).unwrap()).unwrap();
        assert_eq!(e.chern(1).integrate(), rat(0));
        assert_eq!(e.chern(1), GradedClass::generator(&base, 0));
        assert_eq!(e.chern(2), h2(&base, 1));
        assert_eq!(e.segre_part(2), GradedClass::zero(&base));
        let v = e.signed_segre_number();
        assert_eq!(v.value, rat(0));
        assert!(!v.big_if_nef);
    }

    #[test]
    fn segre_of_tangent_p2() {
        let base = p2();
        let t = BundleClass::tangent(&base);
        assert_eq!(t.segre_part(1), GradedClass::generator(&base, 0).scale(&rat(-3)));
        assert_eq!(t.segre_part(2), h2(&base, 6));
        let v = t.signed_segre_number();
        assert_eq!(v.value, rat(6));
        assert!(v.big_if_nef);
    }

    #[test]
    fn low_degree_segre_formulas() {
        let base = BasePresentation::projective(3);
        let e = BundleClass::tangent(&base).direct_sum(&BundleClass::line(&base, &[2]).unwrap());
        let (c1, c2, c3) = (e.chern(1), e.chern(2), e.chern(3));
        assert_eq!(e.segre_part(1), -&c1);
        assert_eq!(e.segre_part(2), &c1.pow(2) - &c2);
        let s3 = &(&(&c1 * &c2).scale(&rat(2)) - &c1.pow(3)) - &c3;
        assert_eq!(e.segre_part(3), s3);
    }

    #[test]
    fn line_bundle_on_p1_is_big_by_degree() {
        let base = BasePresentation::projective(1);
        let v = BundleClass::line(&base, &[1]).unwrap().signed_segre_number();
        assert_eq!(v.value, rat(1));
        assert!(v.big_if_nef);
    }

    #[test]
    fn rejects_bad_descriptors() {
        let base = p2();
        let err = total_chern(&base, &BundleDesc::Tensor(vec![BundleDesc::Tangent, BundleDesc::Tangent]));
        assert_eq!(err, Err(ClassError::UnsupportedTensor));
        let err = total_chern(&base, &BundleDesc::Line(vec![1, 2]));
        assert_eq!(err, Err(ClassError::BaseMismatch { expected: 1, found: 2 }));
        assert_eq!(total_chern(&base, &BundleDesc::Sum(vec![])), Err(ClassError::EmptyDescriptor));
    }

    #[test]
    fn determinant_and_cotangent() {
        let base: BasePresentation = "P1xP1".parse().unwrap();
        let t = total_chern(&base, &BundleDesc::Tangent).unwrap();
        let det = total_chern(&base, &BundleDesc::Det(Box::new(BundleDesc::Tangent))).unwrap();
        assert_eq!(det.rank(), 1);
        assert_eq!(det.chern(1), t.chern(1));
        let cot = total_chern(&base, &BundleDesc::Cotangent).unwrap();
        assert_eq!(cot.chern(1), -&t.chern(1));
        assert_eq!(cot.chern(2), t.chern(2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), rat(6));
        assert_eq!(binomial(3, 0), rat(1));
        assert_eq!(binomial(2, 3), rat(0));
    }
}
