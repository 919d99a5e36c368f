//! Linear codes over `ℤ/qℤ` and their Construction A lattices.
//!
//! A code is stored by its canonical generators: the Hermite normal form of
//! the lifted lattice `π_q⁻¹(C)` with the `q·e_i` columns dropped, reduced
//! mod `q`. For prime `q` this is the reduced row echelon form and is
//! computed directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numeric::{hnf_columns, Mat};

/// Default limit on `|C|` for operations that visit every codeword.
pub const DEFAULT_CODEWORD_CAP: u128 = 1_000_000;

pub fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

fn check_modulus(q: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::invalid(format!(
            "modulus must be at least 2, got {q}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearCode {
    q: u32,
    n: usize,
    generators: Vec<Vec<u32>>,
}

impl LinearCode {
    /// Code spanned by `rows` (any integers, reduced mod `q`).
    pub fn new(q: u32, n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        check_modulus(q)?;
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::dim(format!(
                "generator has length {}, expected {n}",
                r.len()
            )));
        }
        let reduced: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v.rem_euclid(q as i64) as u32).collect())
            .collect();
        Ok(Self::from_residues(q, n, reduced))
    }

    fn from_residues(q: u32, n: usize, rows: Vec<Vec<u32>>) -> Self {
        let generators = if is_prime(q) {
            let field = PrimeField::new(q);
            let k = rows.len();
            let mut flat: Vec<u32> = rows.into_iter().flatten().collect();
            let rank = field.rref(&mut flat, k, n);
            flat.truncate(rank * n);
            flat.chunks(n.max(1)).map(<[u32]>::to_vec).collect()
        } else {
            canonical_by_hnf(q, n, &rows)
        };
        LinearCode { q, n, generators }
    }

    pub fn zero(q: u32, n: usize) -> Result<Self> {
        check_modulus(q)?;
        Ok(LinearCode {
            q,
            n,
            generators: Vec::new(),
        })
    }

    pub fn full(q: u32, n: usize) -> Result<Self> {
        check_modulus(q)?;
        let generators = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        Ok(LinearCode { q, n, generators })
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn length(&self) -> usize {
        self.n
    }

    /// Number of canonical generators.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    /// Additive order of the span of each generator in the coset
    /// representation: `q / leading entry`.
    fn generator_orders(&self) -> Vec<u32> {
        self.generators
            .iter()
            .map(|g| {
                self.q
                    / g.iter()
                        .copied()
                        .find(|&v| v != 0)
                        .expect("non-zero generator")
            })
            .collect()
    }

    /// `|C|`, or `None` if it does not fit in 128 bits.
    pub fn size(&self) -> Option<u128> {
        self.generator_orders()
            .iter()
            .try_fold(1u128, |acc, &o| acc.checked_mul(o as u128))
    }

    /// Visits every codeword once.
    pub fn for_each_codeword(&self, mut visit: impl FnMut(&[u32])) {
        let orders = self.generator_orders();
        let mut coeff = vec![0u32; orders.len()];
        let mut word = vec![0u32; self.n];
        loop {
            visit(&word);
            // odometer on coefficients, updating the word incrementally
            let mut i = 0;
            loop {
                if i == orders.len() {
                    return;
                }
                coeff[i] += 1;
                if coeff[i] < orders[i] {
                    for (w, &g) in word.iter_mut().zip(&self.generators[i]) {
                        *w = (*w + g) % self.q;
                    }
                    break;
                }
                // wrap: subtract (order - 1) copies, i.e. add one more and
                // remove order copies (which is ≡ 0 only when order·g ≡ 0)
                for (w, &g) in word.iter_mut().zip(&self.generators[i]) {
                    let back = (g as u64 * (orders[i] - 1) as u64 % self.q as u64) as u32;
                    *w = (*w + self.q - back) % self.q;
                }
                coeff[i] = 0;
                i += 1;
            }
        }
    }

    pub fn codewords(&self, cap: u128) -> Result<Vec<Vec<u32>>> {
        self.check_cap(cap)?;
        let mut out = Vec::new();
        self.for_each_codeword(|w| out.push(w.to_vec()));
        Ok(out)
    }

    fn check_cap(&self, cap: u128) -> Result<()> {
        match self.size() {
            Some(s) if s <= cap => Ok(()),
            size => Err(Error::CapExceeded(format!(
                "code has {} codewords, cap is {cap}",
                size.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string())
            ))),
        }
    }

    pub fn contains(&self, word: &[i64]) -> Result<bool> {
        if word.len() != self.n {
            return Err(Error::dim("word length differs from code length"));
        }
        let lattice = lift(self);
        let v: Vec<_> = word.iter().map(|&c| crate::numeric::int(c)).collect();
        lattice.contains(&v)
    }

    /// Image under `x ↦ (±x_{σ⁻¹(j)})_j`: coordinate `j` moves to `perm[j]`
    /// and is negated when `negate[j]`.
    pub fn apply_monomial(&self, perm: &[usize], negate: &[bool]) -> Result<LinearCode> {
        check_signed_permutation(self.n, perm, negate)?;
        let rows: Vec<Vec<u32>> = self
            .generators
            .iter()
            .map(|g| {
                let mut out = vec![0u32; self.n];
                for j in 0..self.n {
                    out[perm[j]] = if negate[j] {
                        (self.q - g[j]) % self.q
                    } else {
                        g[j]
                    };
                }
                out
            })
            .collect();
        Ok(Self::from_residues(self.q, self.n, rows))
    }
}

fn check_signed_permutation(n: usize, perm: &[usize], negate: &[bool]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n || negate.len() != n {
        return Err(Error::dim("monomial map has the wrong length"));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid("not a permutation"));
        }
    }
    Ok(())
}

/// Canonical generators for arbitrary `q` through the lifted lattice.
fn canonical_by_hnf(q: u32, n: usize, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let cols = lift_columns(q, n, rows);
    hnf_columns(n, cols)
        .into_iter()
        .filter_map(|c| {
            let pivot = c.iter().find(|v| !v.is_zero()).expect("non-zero column");
            (pivot < &BigInt::from(q)).then(|| {
                c.iter()
                    .map(|v| (v % BigInt::from(q)).to_u32().expect("reduced entry"))
                    .collect()
            })
        })
        .collect()
}

fn lift_columns(q: u32, n: usize, rows: &[Vec<u32>]) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    for i in 0..n {
        cols.push(
            (0..n)
                .map(|j| BigInt::from(if i == j { q } else { 0 }))
                .collect(),
        );
    }
    cols
}

/// `π_q(L)`: the basis columns reduced mod `q`.
pub fn project(l: &Lattice, q: u32) -> Result<LinearCode> {
    check_modulus(q)?;
    let n = l.dimension();
    let cols = l.basis().integer_columns()?;
    let rows: Vec<Vec<i64>> = cols
        .iter()
        .map(|c| {
            c.iter()
                .map(|v| v.mod_floor(&BigInt::from(q)).to_i64().expect("residue"))
                .collect()
        })
        .collect();
    LinearCode::new(q, n, &rows)
}

/// `π_q⁻¹(C)` with its Hermite normal form basis.
pub fn lift(c: &LinearCode) -> Lattice {
    let n = c.n;
    if n == 0 {
        return Lattice::empty();
    }
    let cols = hnf_columns(n, lift_columns(c.q, n, &c.generators));
    let basis = Mat::from_int_columns(n, &cols).expect("n rows");
    Lattice::new(basis).expect("q·ℤⁿ is contained, so the lift has full rank")
}

/// Sorted folded residues `min(c_i, q − c_i)` of one codeword.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightSignature(pub Vec<u32>);

pub fn weight_signature(word: &[u32], q: u32) -> WeightSignature {
    let mut s: Vec<u32> = word
        .iter()
        .map(|&c| {
            let c = c % q;
            c.min(q - c)
        })
        .collect();
    s.sort_unstable();
    WeightSignature(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeightDistribution {
    pub counts: BTreeMap<WeightSignature, u64>,
}

impl WeightDistribution {
    /// `(signature, count)` pairs in ascending signature order.
    pub fn rows(&self) -> Vec<(Vec<u32>, u64)> {
        self.counts.iter().map(|(s, &c)| (s.0.clone(), c)).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sig, count) in &self.counts {
            let s: Vec<String> = sig.0.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}\t{count}", s.join(" "))?;
        }
        Ok(())
    }
}

pub fn weight_distribution(c: &LinearCode) -> Result<WeightDistribution> {
    weight_distribution_with_cap(c, DEFAULT_CODEWORD_CAP)
}

pub fn weight_distribution_with_cap(c: &LinearCode, cap: u128) -> Result<WeightDistribution> {
    c.check_cap(cap)?;
    let mut counts = BTreeMap::new();
    c.for_each_codeword(|w| *counts.entry(weight_signature(w, c.q)).or_insert(0) += 1);
    Ok(WeightDistribution { counts })
}

pub fn equal_weight_dist(a: &LinearCode, b: &LinearCode) -> Result<bool> {
    if a.q != b.q || a.n != b.n {
        return Err(Error::invalid("codes have different parameters"));
    }
    if a.size() != b.size() {
        return Ok(false);
    }
    Ok(weight_distribution(a)? == weight_distribution(b)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    All,
    /// Generator matrices of the shape `[I_k | X]`.
    Systematic,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "systematic" => Ok(Family::Systematic),
            other => Err(Error::invalid(format!("unknown code family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::All => "all",
            Family::Systematic => "systematic",
        })
    }
}

/// Pivot positions of every reduced echelon shape of rank `k` in length `n`,
/// lexicographically.
pub(crate) fn pivot_patterns(n: usize, k: usize, family: Family) -> Vec<Vec<usize>> {
    if family == Family::Systematic {
        return if k <= n {
            vec![(0..k).collect()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut pattern: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(pattern.clone());
        // next k-subset
        let Some(i) = (0..k).rev().find(|&i| pattern[i] < n - k + i) else {
            return out;
        };
        pattern[i] += 1;
        for j in (i + 1)..k {
            pattern[j] = pattern[j - 1] + 1;
        }
    }
}

/// Positions `(row, col)` of the free entries of an echelon shape.
pub(crate) fn free_positions(n: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        for c in (p + 1)..n {
            if !pivots.contains(&c) {
                out.push((r, c));
            }
        }
    }
    out
}

/// Pivot positions, free `(row, column)` slots and their current values.
type PatternCursor = (Vec<usize>, Vec<(usize, usize)>, Vec<u32>);

/// All `k`-dimensional subspaces of `F_qⁿ` (or the systematic ones), each
/// once, in pivot-pattern then free-entry order.
pub struct CodeEnumeration {
    q: u32,
    n: usize,
    patterns: std::vec::IntoIter<Vec<usize>>,
    current: Option<PatternCursor>,
}

impl Iterator for CodeEnumeration {
    type Item = LinearCode;

    fn next(&mut self) -> Option<LinearCode> {
        if self.current.is_none() {
            let pivots = self.patterns.next()?;
            let free = free_positions(self.n, &pivots);
            let values = vec![0u32; free.len()];
            self.current = Some((pivots, free, values));
        }
        let (pivots, free, values) = self.current.as_mut().expect("set above");
        let k = pivots.len();
        let mut generators = vec![vec![0u32; self.n]; k];
        for (r, &p) in pivots.iter().enumerate() {
            generators[r][p] = 1;
        }
        for (&(r, c), &v) in free.iter().zip(values.iter()) {
            generators[r][c] = v;
        }
        let code = LinearCode {
            q: self.q,
            n: self.n,
            generators,
        };
        // advance the free entries as a base-q counter; wrap moves to the next pattern
        let mut i = 0;
        loop {
            if i == values.len() {
                self.current = None;
                break;
            }
            values[i] += 1;
            if values[i] < self.q {
                break;
            }
            values[i] = 0;
            i += 1;
        }
        Some(code)
    }
}

pub fn enumerate_codes(q: u32, n: usize, k: usize, family: Family) -> Result<CodeEnumeration> {
    if !is_prime(q) {
        return Err(Error::Unsupported(format!(
            "code enumeration needs a prime modulus, got {q}"
        )));
    }
    if k > n {
        return Err(Error::invalid(format!("rank {k} exceeds length {n}")));
    }
    Ok(CodeEnumeration {
        q,
        n,
        patterns: pivot_patterns(n, k, family).into_iter(),
        current: None,
    })
}

/// Largest length accepted by [`canonical_monomial_form`].
pub const MAX_CANONICAL_LENGTH: usize = 8;

/// Every signed permutation of `n` coordinates as `(perm, negate)`.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << n);
    for perm in perms {
        for mask in 0u32..(1 << n) {
            let negate = (0..n).map(|j| mask >> j & 1 == 1).collect();
            out.push((perm.clone(), negate));
        }
    }
    out
}

fn permute(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == p.len() {
        out.push(p.clone());
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, out);
        p.swap(i, j);
    }
}

/// Least canonical generator matrix over all signed coordinate permutations.
pub fn canonical_monomial_form(c: &LinearCode) -> Result<LinearCode> {
    if c.n > MAX_CANONICAL_LENGTH {
        return Err(Error::Unsupported(format!(
            "monomial canonical form needs length at most {MAX_CANONICAL_LENGTH}, got {}",
            c.n
        )));
    }
    if is_prime(c.q) {
        let field = PrimeField::new(c.q);
        let maps = signed_permutations(c.n);
        let rows = field.orbit_minimum(&c.generators, c.n, &maps, |_| {});
        return Ok(LinearCode {
            q: c.q,
            n: c.n,
            generators: rows,
        });
    }
    let mut best: Option<LinearCode> = None;
    for (perm, negate) in signed_permutations(c.n) {
        let image = c.apply_monomial(&perm, &negate)?;
        if best
            .as_ref()
            .is_none_or(|b| image.generators < b.generators)
        {
            best = Some(image);
        }
    }
    Ok(best.expect("the identity is a signed permutation"))
}

/// Arithmetic in `ℤ/pℤ` on small residues.
pub(crate) struct PrimeField {
    pub q: u32,
    inv: Vec<u32>,
}

impl PrimeField {
    pub fn new(q: u32) -> Self {
        debug_assert!(is_prime(q));
        let mut inv = vec![0u32; q as usize];
        for a in 1..q {
            inv[a as usize] = (1..q)
                .find(|b| a as u64 * *b as u64 % q as u64 == 1)
                .expect("field");
        }
        PrimeField { q, inv }
    }

    /// Reduced row echelon form of the `k × n` row-major matrix in place;
    /// returns the rank. Zero rows end up at the bottom.
    pub fn rref(&self, m: &mut [u32], k: usize, n: usize) -> usize {
        let q = self.q as u64;
        let mut r = 0;
        for col in 0..n {
            if r == k {
                break;
            }
            let Some(p) = (r..k).find(|&i| m[i * n + col] != 0) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    m.swap(p * n + j, r * n + j);
                }
            }
            let s = self.inv[m[r * n + col] as usize] as u64;
            for j in col..n {
                m[r * n + j] = (m[r * n + j] as u64 * s % q) as u32;
            }
            for i in 0..k {
                let f = m[i * n + col] as u64;
                if i == r || f == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = f * m[r * n + j] as u64 % q;
                    m[i * n + j] = ((m[i * n + j] as u64 + q - sub) % q) as u32;
                }
            }
            r += 1;
        }
        r
    }

    /// Minimal canonical generators over the images of `rows` under `maps`;
    /// `seen` receives each image's canonical rows.
    pub fn orbit_minimum(
        &self,
        rows: &[Vec<u32>],
        n: usize,
        maps: &[(Vec<usize>, Vec<bool>)],
        mut seen: impl FnMut(&[u32]),
    ) -> Vec<Vec<u32>> {
        let k = rows.len();
        let mut best: Option<Vec<u32>> = None;
        let mut buf = vec![0u32; k * n];
        for (perm, negate) in maps {
            for (r, g) in rows.iter().enumerate() {
                for j in 0..n {
                    let v = g[j];
                    buf[r * n + perm[j]] = if negate[j] && v != 0 { self.q - v } else { v };
                }
            }
            self.rref(&mut buf, k, n);
            seen(&buf);
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.unwrap_or_default()
            .chunks(n.max(1))
            .map(<[u32]>::to_vec)
            .collect()
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.q, self.n, self.generators.len())?;
        for g in &self.generators {
            let s: Vec<String> = g.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for LinearCode {
    type Err = Error;

    /// `q n k` on the first line, then `k` rows of `n` residues in `[0, q)`.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `q n k` header"))?;
        let head: Vec<u64> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(hl, "header must be three integers"))
            })
            .collect::<Result<_>>()?;
        let [q, n, k] = head[..] else {
            return Err(parse_err(hl, "header must be `q n k`"));
        };
        let q = u32::try_from(q).map_err(|_| parse_err(hl, "modulus too large"))?;
        if q < 2 {
            return Err(parse_err(hl, "modulus must be at least 2"));
        }
        let (n, k) = (n as usize, k as usize);
        let mut rows = Vec::with_capacity(k);
        for (line, text) in lines.by_ref().take(k) {
            let row: Vec<i64> = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .ok()
                        .filter(|&v| v < q)
                        .map(i64::from)
                        .ok_or_else(|| parse_err(line, "entries must be integers in [0, q)"))
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(parse_err(line, &format!("expected {n} entries")));
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(parse_err(hl, &format!("expected {k} generator rows")));
        }
        if let Some((line, _)) = lines.next() {
            return Err(parse_err(line, "unexpected trailing data"));
        }
        LinearCode::new(q, n, &rows)
    }
}
