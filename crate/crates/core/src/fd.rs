//! Finite differences for functions `C^n -> C^m`, returning Wirtinger
//! derivatives `d_i F` and `d_i dbar_j F` assembled from real partials.
//!
//! Stencils are fourth-order central differences with one Richardson level,
//! and steps scale with `max(1, |z|)`.

use crate::linalg::C;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Steps {
    /// Relative step for first derivatives.
    pub first: f64,
    /// Relative step for second derivatives. Larger than `first` because the
    /// roundoff of a second difference grows like `eps / h^2`.
    pub second: f64,
    pub richardson: bool,
}

impl Default for Steps {
    fn default() -> Self {
        Self { first: 1e-4, second: 2e-3, richardson: true }
    }
}

const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
const WEIGHTS: [f64; 4] = [1.0, -8.0, 8.0, -1.0];

fn shifted(z: &[C], moves: &[(usize, f64)]) -> Vec<C> {
    let n = z.len();
    let mut out = z.to_vec();
    for &(p, h) in moves {
        if p < n {
            out[p].re += h;
        } else {
            out[p - n].im += h;
        }
    }
    out
}

fn axpy(acc: &mut [C], s: f64, x: &[C]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b * s;
    }
}

fn scale_of(z: &[C]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1.0)
}

fn richardson(coarse: Vec<C>, fine: Vec<C>) -> Vec<C> {
    coarse.iter().zip(&fine).map(|(c, f)| (f * 16.0 - c) / 15.0).collect()
}

/// Real partial along coordinate `p` (`p < n` is `Re z_p`, else `Im z_{p-n}`).
fn partial<F: Fn(&[C]) -> Vec<C>>(f: &F, z: &[C], p: usize, h: f64) -> Vec<C> {
    let mut acc: Vec<C> = Vec::new();
    for (o, w) in OFFSETS.iter().zip(WEIGHTS) {
        let v = f(&shifted(z, &[(p, o * h)]));
        if acc.is_empty() {
            acc = vec![C::new(0.0, 0.0); v.len()];
        }
        axpy(&mut acc, w / (12.0 * h), &v);
    }
    acc
}

fn second_partial<F: Fn(&[C]) -> Vec<C>>(f: &F, z: &[C], f0: &[C], p: usize, q: usize, h: f64) -> Vec<C> {
    // Values are taken relative to the center, so constants cancel exactly.
    let mut acc = vec![C::new(0.0, 0.0); f0.len()];
    let mut add = |s: f64, moves: &[(usize, f64)]| {
        let v = f(&shifted(z, moves));
        for ((a, x), c) in acc.iter_mut().zip(&v).zip(f0) {
            *a += (x - c) * s;
        }
    };
    if p == q {
        for (o, c) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            add(c / (12.0 * h * h), &[(p, o * h)]);
        }
    } else {
        for (op, wp) in OFFSETS.iter().zip(WEIGHTS) {
            for (oq, wq) in OFFSETS.iter().zip(WEIGHTS) {
                add(wp * wq / (144.0 * h * h), &[(p, op * h), (q, oq * h)]);
            }
        }
    }
    acc
}

/// `d_i F` for every `i`, where `d_i = (d/dx_i - i d/dy_i) / 2`.
pub fn wirtinger_first<F: Fn(&[C]) -> Vec<C>>(f: &F, z: &[C], steps: &Steps) -> Vec<Vec<C>> {
    let n = z.len();
    let h = steps.first * scale_of(z);
    let real = |p: usize| {
        let coarse = partial(f, z, p, h);
        if steps.richardson {
            richardson(coarse, partial(f, z, p, h / 2.0))
        } else {
            coarse
        }
    };
    (0..n)
        .map(|i| {
            let dx = real(i);
            let dy = real(n + i);
            dx.iter().zip(&dy).map(|(x, y)| (x - y * C::i()) * 0.5).collect()
        })
        .collect()
}

/// `d_i dbar_j F` for every `(i, j)`.
pub fn wirtinger_mixed<F: Fn(&[C]) -> Vec<C>>(f: &F, z: &[C], steps: &Steps) -> Vec<Vec<Vec<C>>> {
    let n = z.len();
    let f0 = f(z);
    let h = steps.second * scale_of(z);
    let mut hess: Vec<Vec<Vec<C>>> = vec![vec![Vec::new(); 2 * n]; 2 * n];
    for p in 0..2 * n {
        for q in p..2 * n {
            let coarse = second_partial(f, z, &f0, p, q, h);
            let v = if steps.richardson {
                richardson(coarse, second_partial(f, z, &f0, p, q, h / 2.0))
            } else {
                coarse
            };
            hess[q][p] = v.clone();
            hess[p][q] = v;
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (xx, yy) = (&hess[i][j], &hess[n + i][n + j]);
                    let (xy, yx) = (&hess[i][n + j], &hess[n + i][j]);
                    (0..f0.len()).map(|k| (xx[k] + yy[k] + (xy[k] - yx[k]) * C::i()) * 0.25).collect()
                })
                .collect()
        })
        .collect()
}
