//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::GeomError;

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|x| x * 0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

pub fn min_eig(m: &CMat) -> f64 {
    eigenvalues(m)[0]
}

pub fn least_eigvec(m: &CMat) -> (f64, CVec) {
    let (vals, vecs) = eigh(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|x| x.abs()).sum()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(m: &CMat) -> Result<CMat, GeomError> {
    if !is_finite(m) {
        return Err(GeomError::NonFinite("matrix"));
    }
    let h = hermitian_part(m);
    let least = min_eig(&h);
    if least <= 0.0 {
        return Err(GeomError::NotPositiveDefinite(least));
    }
    Cholesky::new(h).map(|c| c.l()).ok_or(GeomError::NotPositiveDefinite(least))
}

/// Frame change `P` with `P^T H conj(P) = I`, where `H[a][b] = h(e_a, conj e_b)`
/// and the new frame is `e'_b = sum_a P[a][b] e_a`.
pub fn identity_frame(h: &CMat) -> Result<CMat, GeomError> {
    let l = cholesky(&h.map(|x| x.conj()))?;
    let inv = l.try_inverse().ok_or(GeomError::NotPositiveDefinite(0.0))?;
    Ok(inv.adjoint())
}

/// Eigenvalues of `a` relative to the positive definite `b`, ascending.
pub fn generalized_eigenvalues(a: &CMat, b: &CMat) -> Result<Vec<f64>, GeomError> {
    let l = cholesky(b)?;
    let inv = l.try_inverse().ok_or(GeomError::NotPositiveDefinite(0.0))?;
    Ok(eigenvalues(&(&inv * a * inv.adjoint())))
}

/// Quadratic form `x^* m x`, real part.
pub fn quad(m: &CMat, x: &CVec) -> f64 {
    (x.adjoint() * m * x)[(0, 0)].re
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v.map(|x| x / norm);
        }
    }
}

/// Random unit vector orthogonal to the unit vector `e`.
pub fn random_unit_orthogonal<R: Rng + ?Sized>(rng: &mut R, e: &CVec) -> CVec {
    loop {
        let v = random_unit(rng, e.len());
        let w = &v - e * e.dotc(&v);
        let norm = w.norm();
        if norm > 1e-6 {
            return w.map(|x| x / norm);
        }
    }
}

/// Rotates the phase so the largest-magnitude entry is real and positive.
pub fn normalize_phase(v: &CVec) -> CVec {
    let k = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(k, _)| k);
    match k {
        Some(k) if v[k].norm() > 0.0 => {
            let phase = v[k].conj() / v[k].norm();
            v.map(|x| x * phase)
        }
        _ => v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let a = CMat::from_fn(n, n, |_, _| complex_normal(rng));
        &a * a.adjoint() + CMat::identity(n, n)
    }

    #[test]
    fn identity_frame_normalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_pd(3, &mut rng);
        let p = identity_frame(&h).unwrap();
        let id = p.transpose() * &h * p.map(|x| x.conj());
        assert!((id - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_sorted_and_vectors_match() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let v = vecs.column(0).into_owned();
        assert!((quad(&m, &v) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(matches!(cholesky(&m), Err(GeomError::NotPositiveDefinite(_))));
    }

    #[test]
    fn generalized_against_diagonal() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![c(2.0, 0.0), c(3.0, 0.0)]));
        let b = CMat::from_diagonal(&CVec::from_vec(vec![c(4.0, 0.0), c(1.0, 0.0)]));
        let g = generalized_eigenvalues(&a, &b).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-14 && (g[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn phase_normalization() {
        let v = CVec::from_vec(vec![c(0.0, 0.6), c(0.0, -0.8)]);
        let w = normalize_phase(&v);
        assert!((w[1] - c(0.8, 0.0)).norm() < 1e-15);
    }
}
