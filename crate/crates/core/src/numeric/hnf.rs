use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::Mat;
use crate::error::{Error, Result};

/// Column-style Hermite normal form of an integer matrix.
///
/// The result has one column per pivot (so `rows x rank`). Column `j` is
/// zero above its pivot row `p_j`, the pivot rows strictly increase, pivots are
/// positive and every entry in a pivot row to the left of the pivot lies in
/// `[0, pivot)`. For a full-rank square input the result is lower triangular.
/// Two integer matrices generate the same column lattice iff their forms agree.
pub fn hnf(m: &Mat) -> Result<Mat> {
    let cols = m.integer_columns()?;
    let h = hnf_columns(m.rows(), cols);
    Ok(Mat::from_int_columns(m.rows(), &h).expect("hnf columns have the input row count"))
}

/// [`hnf`] on raw integer columns, each of length `rows`.
pub fn hnf_columns(rows: usize, mut cols: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    debug_assert!(cols.iter().all(|c| c.len() == rows));
    cols.retain(|c| c.iter().any(|v| !v.is_zero()));
    let mut done = 0usize;
    for p in 0..rows {
        if done == cols.len() {
            break;
        }
        // gcd-reduce row p across the remaining columns
        loop {
            let mut best: Option<usize> = None;
            for j in done..cols.len() {
                if cols[j][p].is_zero() {
                    continue;
                }
                if best.is_none_or(|b| cols[j][p].abs() < cols[b][p].abs()) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            cols.swap(done, b);
            let mut all_zero = true;
            for j in done + 1..cols.len() {
                if cols[j][p].is_zero() {
                    continue;
                }
                let q = cols[j][p].div_floor(&cols[done][p]);
                let pivot_col = cols[done].clone();
                axpy(&mut cols[j], &q, &pivot_col, p);
                if !cols[j][p].is_zero() {
                    all_zero = false;
                }
            }
            if all_zero {
                break;
            }
        }
        if done == cols.len() || cols[done][p].is_zero() {
            continue;
        }
        if cols[done][p].is_negative() {
            for v in cols[done].iter_mut().skip(p) {
                *v = -&*v;
            }
        }
        let pivot_col = cols[done].clone();
        for j in 0..done {
            let q = cols[j][p].div_floor(&pivot_col[p]);
            if !q.is_zero() {
                axpy(&mut cols[j], &q, &pivot_col, p);
            }
        }
        done += 1;
        cols.retain(|c| c.iter().any(|v| !v.is_zero()));
    }
    cols.truncate(done);
    cols
}

/// `target -= factor * source`, touching rows from `start` on (entries above
/// are zero in `source`).
fn axpy(target: &mut [BigInt], factor: &BigInt, source: &[BigInt], start: usize) {
    for (t, s) in target.iter_mut().zip(source).skip(start) {
        if !s.is_zero() {
            *t -= factor * s;
        }
    }
}

/// Whether two integer matrices generate the same column lattice.
pub fn same_column_lattice(a: &Mat, b: &Mat) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::dim("lattices live in different ambient dimensions"));
    }
    Ok(hnf(a)? == hnf(b)?)
}
