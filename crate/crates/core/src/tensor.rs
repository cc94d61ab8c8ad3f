//! Pointwise Chern curvature tensors `R_{i jbar a bbar}` with base indices
//! `i, j < n` and fiber indices `a, b < r`.

use rand::Rng;

use crate::linalg::{complex_normal, CMat, CVec, C};

/// Declared symmetry class. Every tensor is Hermitian,
/// `R_{i jbar a bbar} = conj R_{j ibar b abar}`; Kahler tensors (tangent
/// bundles of Kahler metrics) also satisfy `R_{i jbar k lbar} = R_{k jbar i lbar}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    Kahler,
}

#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    n: usize,
    r: usize,
    data: Vec<C>,
    symmetry: Symmetry,
    /// Symmetry defect measured before the last projection.
    projection_defect: f64,
}

impl CurvatureTensor {
    pub fn zero(n: usize, r: usize, symmetry: Symmetry) -> Self {
        assert!(symmetry == Symmetry::Hermitian || n == r, "kahler tensors need n = r");
        Self { n, r, data: vec![C::new(0.0, 0.0); n * n * r * r], symmetry, projection_defect: 0.0 }
    }

    /// Builds a tensor entrywise without projecting it.
    pub fn from_fn(n: usize, r: usize, symmetry: Symmetry, f: impl Fn(usize, usize, usize, usize) -> C) -> Self {
        let mut t = Self::zero(n, r, symmetry);
        for i in 0..n {
            for j in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let k = t.idx(i, j, a, b);
                        t.data[k] = f(i, j, a, b);
                    }
                }
            }
        }
        t
    }

    /// `delta_ij delta_kl + delta_il delta_kj`, the Fubini-Study tensor of
    /// `P^n` in a unitary frame.
    pub fn fubini_study(n: usize) -> Self {
        Self::from_fn(n, n, Symmetry::Kahler, |i, j, k, l| {
            let v = f64::from(u8::from(i == j && k == l)) + f64::from(u8::from(i == l && k == j));
            C::new(v, 0.0)
        })
    }

    /// Block-diagonal sum of Fubini-Study tensors, one block per factor.
    pub fn product_fs(factors: &[usize]) -> Self {
        let n: usize = factors.iter().sum();
        let mut block = Vec::with_capacity(n);
        for (f, &d) in factors.iter().enumerate() {
            block.extend(std::iter::repeat_n(f, d));
        }
        let fs = Self::fubini_study(n);
        Self::from_fn(n, n, Symmetry::Kahler, |i, j, k, l| {
            if block[i] == block[j] && block[j] == block[k] && block[k] == block[l] {
                fs.get(i, j, k, l)
            } else {
                C::new(0.0, 0.0)
            }
        })
    }

    /// Gaussian entries projected onto the Hermitian class.
    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Self {
        let mut t = Self::zero(n, r, Symmetry::Hermitian);
        t.data.iter_mut().for_each(|x| *x = complex_normal(rng));
        t.project()
    }

    /// Gaussian entries averaged over `i <-> k`, `j <-> l` and conjugate
    /// transposition. Reproducible from the generator state.
    pub fn random_kahler<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut t = Self::zero(n, n, Symmetry::Kahler);
        t.data.iter_mut().for_each(|x| *x = complex_normal(rng));
        t.project()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * self.n + j) * self.r + a) * self.r + b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> C {
        self.data[self.idx(i, j, a, b)]
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn projection_defect(&self) -> f64 {
        self.projection_defect
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|x| *x *= s);
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.n, self.r), (other.n, other.r));
        self.data.iter().zip(&other.data).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Convex combination `(1 - t) self + t other`, keeping the weaker tag.
    pub fn mix(&self, other: &Self, t: f64) -> Self {
        assert_eq!((self.n, self.r), (other.n, other.r));
        let symmetry = if self.symmetry == other.symmetry { self.symmetry } else { Symmetry::Hermitian };
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x * (1.0 - t) + y * t).collect();
        Self { n: self.n, r: self.r, data, symmetry, projection_defect: 0.0 }
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..self.r {
                    for b in 0..self.r {
                        worst = worst.max((self.get(i, j, a, b) - self.get(j, i, b, a).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn kahler_defect(&self) -> f64 {
        if self.n != self.r {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    for l in 0..self.n {
                        worst = worst.max((self.get(i, j, k, l) - self.get(k, j, i, l)).norm());
                    }
                }
            }
        }
        worst
    }

    /// Worst violation of the declared symmetry class.
    pub fn symmetry_defect(&self) -> f64 {
        match self.symmetry {
            Symmetry::Hermitian => self.hermitian_defect(),
            Symmetry::Kahler => self.hermitian_defect().max(self.kahler_defect()),
        }
    }

    /// Orthogonal projection onto the declared symmetry class; the defect
    /// before projecting is kept in [`Self::projection_defect`].
    pub fn project(mut self) -> Self {
        let defect = self.symmetry_defect();
        let (n, r) = (self.n, self.r);
        if self.symmetry == Symmetry::Kahler {
            let old = self.clone();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let s = old.get(i, j, k, l) + old.get(k, j, i, l) + old.get(i, l, k, j) + old.get(k, l, i, j);
                            let at = self.idx(i, j, k, l);
                            self.data[at] = s * 0.25;
                        }
                    }
                }
            }
        }
        let old = self.clone();
        for i in 0..n {
            for j in 0..n {
                for a in 0..r {
                    for b in 0..r {
                        let at = self.idx(i, j, a, b);
                        self.data[at] = (old.get(i, j, a, b) + old.get(j, i, b, a).conj()) * 0.5;
                    }
                }
            }
        }
        self.projection_defect = defect;
        self
    }

    /// Components in new frames `e'_p = sum_q P[q][p] e_q`. The base frame is
    /// changed only when `base` is given.
    pub fn transform(&self, base: Option<&CMat>, fiber: &CMat) -> Self {
        let (n, r) = (self.n, self.r);
        // Contract one index at a time to keep the cost at O(n^2 r^2 (n + r)).
        let mut t = self.clone();
        let fiber_bar = fiber.map(|x| x.conj());
        t = t.contract(3, &fiber_bar);
        t = t.contract(2, fiber);
        if let Some(p) = base {
            t = t.contract(1, &p.map(|x| x.conj()));
            t = t.contract(0, p);
        }
        debug_assert_eq!((t.n, t.r), (n, r));
        t.projection_defect = self.projection_defect;
        t
    }

    fn contract(&self, slot: usize, p: &CMat) -> Self {
        let mut out = Self::zero(self.n, self.r, Symmetry::Hermitian);
        out.symmetry = self.symmetry;
        let dim = if slot < 2 { self.n } else { self.r };
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..self.r {
                    for b in 0..self.r {
                        let mut acc = C::new(0.0, 0.0);
                        for q in 0..dim {
                            let (src, p_idx) = match slot {
                                0 => (self.get(q, j, a, b), p[(q, i)]),
                                1 => (self.get(i, q, a, b), p[(q, j)]),
                                2 => (self.get(i, j, q, b), p[(q, a)]),
                                _ => (self.get(i, j, a, q), p[(q, b)]),
                            };
                            acc += src * p_idx;
                        }
                        let at = out.idx(i, j, a, b);
                        out.data[at] = acc;
                    }
                }
            }
        }
        out
    }

    /// `A(v)[i][j] = sum R_{i jbar a bbar} v^a conj(v^b)`, so that the
    /// bisectional value is `sum A[i][j] u^i conj(u^j)`.
    pub fn base_form(&self, v: &CVec) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| {
            let mut acc = C::new(0.0, 0.0);
            for a in 0..self.r {
                for b in 0..self.r {
                    acc += self.get(i, j, a, b) * v[a] * v[b].conj();
                }
            }
            acc
        })
    }

    /// `B(u)[a][b] = sum R_{i jbar a bbar} u^i conj(u^j)`.
    pub fn fiber_form(&self, u: &CVec) -> CMat {
        CMat::from_fn(self.r, self.r, |a, b| {
            let mut acc = C::new(0.0, 0.0);
            for i in 0..self.n {
                for j in 0..self.n {
                    acc += self.get(i, j, a, b) * u[i] * u[j].conj();
                }
            }
            acc
        })
    }

    /// The `nr x nr` matrix `N[(i,a)][(j,b)] = R_{i jbar a bbar}`.
    pub fn nakano_matrix(&self) -> CMat {
        let r = self.r;
        CMat::from_fn(self.n * r, self.n * r, |p, q| self.get(p / r, q / r, p % r, q % r))
    }

    /// `sum_a R_{i jbar a abar}`, the Ricci contraction in a unitary fiber frame.
    pub fn fiber_trace(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| (0..self.r).map(|a| self.get(i, j, a, a)).sum())
    }

    /// `sum R_{i jbar a bbar} u^i conj(u^j) v^a conj(v^b)` with no unit check.
    pub fn eval(&self, u: &CVec, v: &CVec) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                let uu = u[i] * u[j].conj();
                for a in 0..self.r {
                    for b in 0..self.r {
                        acc += self.get(i, j, a, b) * uu * v[a] * v[b].conj();
                    }
                }
            }
        }
        acc.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity_frame, random_unit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fubini_study_is_kahler() {
        let fs = CurvatureTensor::fubini_study(3);
        assert_eq!(fs.symmetry_defect(), 0.0);
        assert_eq!(fs.get(0, 0, 0, 0), c(2.0, 0.0));
        assert_eq!(fs.get(0, 0, 1, 1), c(1.0, 0.0));
        assert_eq!(fs.get(0, 1, 1, 0), c(1.0, 0.0));
        assert_eq!(fs.get(0, 1, 0, 1), c(0.0, 0.0));
    }

    #[test]
    fn product_blocks() {
        let t = CurvatureTensor::product_fs(&[1, 1]);
        assert_eq!(t.get(0, 0, 0, 0), c(2.0, 0.0));
        assert_eq!(t.get(0, 0, 1, 1), c(0.0, 0.0));
        assert_eq!(t.get(1, 1, 1, 1), c(2.0, 0.0));
    }

    #[test]
    fn random_tensors_satisfy_their_tags() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = CurvatureTensor::random_kahler(3, &mut rng);
        assert!(k.symmetry_defect() < 1e-12 && k.projection_defect() > 0.1);
        let h = CurvatureTensor::random_hermitian(2, 3, &mut rng);
        assert!(h.symmetry_defect() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = CurvatureTensor::random_kahler(2, &mut rng);
        let again = k.clone().project();
        assert!(again.max_abs_diff(&k) < 1e-15);
    }

    #[test]
    fn transform_by_unitary_preserves_fs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = nalgebra::linalg::QR::new(CMat::from_fn(3, 3, |_, _| crate::linalg::complex_normal(&mut rng))).q();
        let fs = CurvatureTensor::fubini_study(3);
        assert!(fs.transform(Some(&q), &q).max_abs_diff(&fs) < 1e-13);
    }

    #[test]
    fn transform_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = CurvatureTensor::random_hermitian(2, 3, &mut rng);
        let h = {
            let a = CMat::from_fn(3, 3, |_, _| crate::linalg::complex_normal(&mut rng));
            &a * a.adjoint() + CMat::identity(3, 3)
        };
        let p = identity_frame(&h).unwrap();
        let t2 = t.transform(None, &p);
        let u = random_unit(&mut rng, 2);
        let v = random_unit(&mut rng, 3);
        assert!((t2.eval(&u, &v) - t.eval(&u, &(&p * &v))).abs() < 1e-12);
    }

    #[test]
    fn forms_agree_with_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = CurvatureTensor::random_hermitian(3, 2, &mut rng);
        let u = random_unit(&mut rng, 3);
        let v = random_unit(&mut rng, 2);
        let direct = t.eval(&u, &v);
        let via_a = crate::linalg::quad(&t.base_form(&v), &u.map(|x| x.conj()));
        let via_b = crate::linalg::quad(&t.fiber_form(&u), &v.map(|x| x.conj()));
        assert!((direct - via_a).abs() < 1e-12 && (direct - via_b).abs() < 1e-12);
        let x = CVec::from_fn(6, |p, _| u[p / 2] * v[p % 2]);
        assert!((crate::linalg::quad(&t.nakano_matrix(), &x.map(|z| z.conj())) - direct).abs() < 1e-12);
    }
}
