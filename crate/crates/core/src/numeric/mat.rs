use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{lcm_of_denominators, parse_rat, to_integer, Rat};
use crate::error::{Error, Result};

/// Dense row-major matrix of rationals.
///
/// When a matrix describes a lattice its *columns* are the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rat]) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Builds a matrix from integer rows. Panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged integer rows");
            data.extend(r.iter().map(|&v| Rat::from_integer(BigInt::from(v))));
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_bigint_rows(rows: usize, cols: usize, data: &[BigInt]) -> Result<Self> {
        Mat::new(
            rows,
            cols,
            data.iter().cloned().map(Rat::from_integer).collect(),
        )
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Result<Self> {
        let mut m = Mat::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::dim(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_int_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let cols: Vec<Vec<Rat>> = columns
            .iter()
            .map(|c| c.iter().cloned().map(Rat::from_integer).collect())
            .collect();
        Mat::from_columns(rows, &cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rat) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::dim(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("addition of differently shaped matrices"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn scaled(&self, factor: &Rat) -> Mat {
        Mat {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..*self
        }
    }

    /// Block diagonal matrix `[[a, 0], [0, b]]`.
    pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
        let mut m = Mat::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        m
    }

    /// Sub-matrix made of the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let columns: Vec<Vec<Rat>> = cols.iter().map(|&j| self.column(j)).collect();
        Mat::from_columns(self.rows, &columns).expect("columns have matching length")
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    /// Row-major integer entries, or the position of the first non-integer.
    pub fn to_integers(&self) -> Result<Vec<BigInt>> {
        self.data
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                to_integer(v).ok_or(Error::NonIntegral {
                    row: idx / self.cols.max(1),
                    col: idx % self.cols.max(1),
                })
            })
            .collect()
    }

    /// Integer columns, failing on any non-integral entry.
    pub fn integer_columns(&self) -> Result<Vec<Vec<BigInt>>> {
        let ints = self.to_integers()?;
        Ok((0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| ints[i * self.cols + j].clone())
                    .collect()
            })
            .collect())
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::dim(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Rows are first scaled to integers; the scale factors are divided out
    /// at the end.
    pub fn determinant(&self) -> Result<Rat> {
        self.require_square("determinant")?;
        let n = self.rows;
        if n == 0 {
            return Ok(Rat::one());
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row = self.row(i);
                let l = lcm_of_denominators(row.iter());
                scale *= &l;
                row.iter()
                    .map(|v| (v * Rat::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        let det = bareiss(&mut a);
        Ok(Rat::new(det, scale))
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Mat> {
        self.require_square("inverse")?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot =
                (col..n)
                    .find(|&r| !a.get(r, col).is_zero())
                    .ok_or(Error::RankDeficient {
                        rank: col,
                        expected: n,
                    })?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a.get(col, col).clone();
            for j in 0..n {
                let v = a.get(col, j) / &p;
                a.set(col, j, v);
                let w = inv.get(col, j) / &p;
                inv.set(col, j, w);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                    let w = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Rat]) -> Result<Vec<Rat>> {
        self.require_square("solve")?;
        if b.len() != self.rows {
            return Err(Error::dim("right-hand side length"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let pivot =
                (col..n)
                    .find(|&r| !a.get(r, col).is_zero())
                    .ok_or(Error::RankDeficient {
                        rank: col,
                        expected: n,
                    })?;
            a.swap_rows(col, pivot);
            rhs.swap(col, pivot);
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col) / a.get(col, col);
                for j in col..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                }
                let v = &rhs[r] - &f * &rhs[col];
                rhs[r] = v;
            }
        }
        let mut x = vec![Rat::zero(); n];
        for i in (0..n).rev() {
            let mut s = rhs[i].clone();
            for j in i + 1..n {
                s -= a.get(i, j) * &x[j];
            }
            x[i] = s / a.get(i, i);
        }
        Ok(x)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, pivot);
            for r in rank + 1..self.rows {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col) / a.get(rank, col);
                for j in col..self.cols {
                    let v = a.get(r, j) - &f * a.get(rank, j);
                    a.set(r, j, v);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Bareiss elimination on an integer matrix, destroying it. Returns the
/// determinant.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Matrix text format: `"<rows> <cols>"` then one whitespace separated line
/// per row. Entries are integers or `a/b`. Lines starting with `#` and blank
/// lines are skipped.
impl FromStr for Mat {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad header `{header}`"),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse {
                line: line_no,
                msg: "header must be `<rows> <cols>`".into(),
            });
        };
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (line_no, line) = lines.next().ok_or(Error::Parse {
                line: line_no,
                msg: format!("expected {rows} rows, found {r}"),
            })?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {cols} entries, found {}", entries.len()),
                });
            }
            for e in entries {
                data.push(parse_rat(e).ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: format!("bad entry `{e}`"),
                })?);
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse {
                line: line_no,
                msg: "trailing content after matrix".into(),
            });
        }
        Mat::new(rows, cols, data)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Mat {
    /// Entries as strings, row by row, for machine-readable reports.
    pub fn string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_string()).collect())
            .collect()
    }

    /// Largest absolute entry, used in reports and search heuristics.
    pub fn max_abs(&self) -> Rat {
        self.data
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn determinant_of_identity_and_singular() {
        assert_eq!(Mat::identity(6).determinant().unwrap(), int(1));
        assert_eq!(Mat::identity(0).determinant().unwrap(), int(1));
        let singular = Mat::from_ints(&[[1, 2], [2, 4]]);
        assert_eq!(singular.determinant().unwrap(), int(0));
        assert!(Mat::zeros(2, 3).determinant().is_err());
    }

    #[test]
    fn determinant_needs_row_swap() {
        let m = Mat::from_ints(&[[0, 1], [1, 0]]);
        assert_eq!(m.determinant().unwrap(), int(-1));
    }

    #[test]
    fn rational_determinant() {
        let m = Mat::new(2, 2, vec![rat(1, 2), int(1), int(0), rat(2, 3)]).unwrap();
        assert_eq!(m.determinant().unwrap(), rat(1, 3));
    }

    #[test]
    fn inverse_and_solve() {
        let m = Mat::from_ints(&[[2, 1], [1, 2]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Mat::identity(2));
        let x = m.solve(&[int(3), int(3)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        assert!(Mat::from_ints(&[[1, 1], [1, 1]]).inverse().is_err());
    }

    #[test]
    fn rank_counts_independent_columns() {
        assert_eq!(Mat::from_ints(&[[1, 1], [0, 0]]).rank(), 1);
        assert_eq!(Mat::from_ints(&[[1, 2, 3], [2, 4, 6], [0, 0, 1]]).rank(), 2);
        assert_eq!(Mat::identity(4).rank(), 4);
    }

    #[test]
    fn text_format_round_trip() {
        let m = Mat::new(2, 2, vec![int(1), rat(-1, 2), int(0), int(7)]).unwrap();
        let text = m.to_string();
        assert_eq!(text, "2 2\n1 -1/2\n0 7\n");
        assert_eq!(text.parse::<Mat>().unwrap(), m);
        let with_comment = "# gram\n2 2\n1 -1/2\n\n0 7\n";
        assert_eq!(with_comment.parse::<Mat>().unwrap(), m);
    }

    #[test]
    fn text_format_rejects_garbage() {
        assert!("2 2\n1 2\n".parse::<Mat>().is_err());
        assert!("2 2\n1 2\n3\n".parse::<Mat>().is_err());
        assert!("2\n1 2\n".parse::<Mat>().is_err());
        assert!("1 1\n0.5\n".parse::<Mat>().is_err());
        assert!("1 1\n1\n2\n".parse::<Mat>().is_err());
        assert!("".parse::<Mat>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn determinant_matches_cofactor_expansion(
            n in 1usize..=4,
            seed in proptest::collection::vec(-9i64..=9, 16),
        ) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
            let m = Mat::from_ints(&rows);
            prop_assert_eq!(m.determinant().unwrap(), int(cofactor_det(&rows)));
        }
    }
}
