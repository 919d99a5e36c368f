use num_traits::{One, Signed, Zero};

use super::{Mat, Rat};
use crate::error::{Error, Result};

/// `q = lower * diag(diag) * lower^T` with `lower` unit lower-triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlFactor {
    pub lower: Mat,
    pub diag: Vec<Rat>,
}

impl LdlFactor {
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn reconstruct(&self) -> Mat {
        let d = Mat::diagonal(&self.diag);
        self.lower
            .mul(&d)
            .and_then(|ld| ld.mul(&self.lower.transpose()))
            .expect("factor shapes agree")
    }
}

/// Exact LDLᵀ factorization of a symmetric matrix. Fails unless every pivot
/// is strictly positive, so success certifies positive definiteness.
pub fn ldl(q: &Mat) -> Result<LdlFactor> {
    if !q.is_square() {
        return Err(Error::dim(format!(
            "ldl needs a square matrix, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = q.rows();
    let mut lower = Mat::identity(n);
    let mut diag: Vec<Rat> = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = q.get(j, j).clone();
        for k in 0..j {
            let l = lower.get(j, k);
            if !l.is_zero() {
                d -= l * l * &diag[k];
            }
        }
        if !d.is_positive() {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: d.to_string(),
            });
        }
        for i in j + 1..n {
            let mut s = q.get(i, j).clone();
            for k in 0..j {
                let (a, b) = (lower.get(i, k), lower.get(j, k));
                if !a.is_zero() && !b.is_zero() {
                    s -= a * b * &diag[k];
                }
            }
            lower.set(i, j, s / &d);
        }
        diag.push(d);
    }
    debug_assert!((0..n).all(|i| lower.get(i, i).is_one()));
    Ok(LdlFactor { lower, diag })
}
