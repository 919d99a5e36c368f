use num_traits::{One, Signed, Zero};

use super::{rat, round_half_up, Mat, Rat};
use crate::error::{Error, Result};

/// Lovász parameter used when callers don't pick one.
pub const DEFAULT_DELTA: (i64, i64) = (3, 4);

/// LLL-reduces the columns of `basis` with exact arithmetic.
pub fn lll_reduce(basis: &Mat, delta: &Rat) -> Result<Mat> {
    let gram = basis.transpose().mul(basis)?;
    let (transform, _) = lll_gram(&gram, delta)?;
    basis.mul(&transform)
}

/// LLL on a Gram matrix. Returns the unimodular transform `U` and the reduced
/// Gram matrix `Uᵀ G U`.
pub fn lll_gram(gram: &Mat, delta: &Rat) -> Result<(Mat, Mat)> {
    if !gram.is_square() {
        return Err(Error::dim("lll needs a square Gram matrix"));
    }
    if !gram.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if *delta <= rat(1, 4) || *delta >= Rat::one() {
        return Err(Error::invalid(format!(
            "lll delta must lie in (1/4, 1), got {delta}"
        )));
    }
    let n = gram.rows();
    let mut g = gram.clone();
    let mut u = Mat::identity(n);
    let mut gs = GramSchmidt::new(&g, n)?;
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let mu = gs.mu(k, j).clone();
            if mu.abs() > rat(1, 2) {
                let r = Rat::from_integer(round_half_up(&mu));
                subtract_column(&mut g, &mut u, k, j, &r);
                gs = GramSchmidt::new(&g, n)?;
            }
        }
        let mu = gs.mu(k, k - 1);
        let lhs = gs.norms[k].clone();
        let rhs = (delta - mu * mu) * &gs.norms[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            swap_columns(&mut g, &mut u, k, k - 1);
            gs = GramSchmidt::new(&g, n)?;
            k = (k - 1).max(1);
        }
    }
    Ok((u, g))
}

/// Gram-Schmidt data computed from a Gram matrix alone.
struct GramSchmidt {
    mu: Vec<Rat>,
    norms: Vec<Rat>,
    n: usize,
}

impl GramSchmidt {
    fn new(g: &Mat, n: usize) -> Result<Self> {
        let mut mu = vec![Rat::zero(); n * n];
        let mut norms: Vec<Rat> = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..i {
                let mut s = g.get(i, j).clone();
                for k in 0..j {
                    let (a, b) = (&mu[j * n + k], &mu[i * n + k]);
                    if !a.is_zero() && !b.is_zero() {
                        s -= a * b * &norms[k];
                    }
                }
                mu[i * n + j] = s / &norms[j];
            }
            let mut b = g.get(i, i).clone();
            for k in 0..i {
                let m = &mu[i * n + k];
                if !m.is_zero() {
                    b -= m * m * &norms[k];
                }
            }
            if !b.is_positive() {
                return Err(Error::RankDeficient {
                    rank: i,
                    expected: n,
                });
            }
            norms.push(b);
        }
        Ok(GramSchmidt { mu, norms, n })
    }

    fn mu(&self, i: usize, j: usize) -> &Rat {
        &self.mu[i * self.n + j]
    }
}

/// `b_k -= r * b_j`, mirrored on the Gram matrix and the transform.
fn subtract_column(g: &mut Mat, u: &mut Mat, k: usize, j: usize, r: &Rat) {
    let n = g.rows();
    for i in 0..n {
        let v = g.get(i, k) - r * g.get(i, j);
        g.set(i, k, v);
    }
    for i in 0..n {
        let v = g.get(k, i) - r * g.get(j, i);
        g.set(k, i, v);
    }
    for i in 0..n {
        let v = u.get(i, k) - r * u.get(i, j);
        u.set(i, k, v);
    }
}

fn swap_columns(g: &mut Mat, u: &mut Mat, a: usize, b: usize) {
    let n = g.rows();
    for i in 0..n {
        let (x, y) = (g.get(i, a).clone(), g.get(i, b).clone());
        g.set(i, a, y);
        g.set(i, b, x);
    }
    for i in 0..n {
        let (x, y) = (g.get(a, i).clone(), g.get(b, i).clone());
        g.set(a, i, y);
        g.set(b, i, x);
    }
    for i in 0..u.rows() {
        let (x, y) = (u.get(i, a).clone(), u.get(i, b).clone());
        u.set(i, a, y);
        u.set(i, b, x);
    }
}
