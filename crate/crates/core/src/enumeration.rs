//! Exact Fincke-Pohst enumeration of short vectors of a positive definite
//! form.
//!
//! The form is written as `Q(x) = (1/E) Σ W_i Y_i²` with
//! `Y_i = den_i x_i + Σ_{j>i} M_ij x_j`, where every `W_i`, `den_i`, `M_ij`
//! and `E` is an integer derived from the exact LDLᵀ factorization. The
//! interval for `x_i` then comes from an integer square root, so the search is
//! exhaustive with no rounding anywhere. Coordinates are enumerated last to
//! first; only vectors whose last non-zero coordinate is positive are
//! visited, which picks one vector from every ± pair.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GramForm, Lattice};
use crate::numeric::{
    floor, gcd_of_rats, int, lcm_of_denominators, ldl, lll_gram, rat, to_i64, Rat, Span,
    DEFAULT_DELTA,
};

/// Coordinate vector of a lattice point.
pub type IntVec = Vec<i64>;

/// Integer arithmetic the enumerator can run on.
trait EnumInt: Clone + Integer + Signed + Roots + From<i64> + Send + Sync + fmt::Debug {
    fn from_big(v: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn as_i64(&self) -> Option<i64>;
    fn as_i128(&self) -> Option<i128>;
}

impl EnumInt for i128 {
    fn from_big(v: &BigInt) -> Self {
        v.to_i128().expect("magnitude checked before choosing i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn as_i64(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
    fn as_i128(&self) -> Option<i128> {
        Some(*self)
    }
}

impl EnumInt for BigInt {
    fn from_big(v: &BigInt) -> Self {
        v.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn as_i64(&self) -> Option<i64> {
        self.to_i64()
    }
    fn as_i128(&self) -> Option<i128> {
        self.to_i128()
    }
}

/// Per-partition accumulator fed by the walker.
trait Sink: Send {
    fn push<T: EnumInt>(&mut self, x: &[i64], norm: &T);
}

#[derive(Default)]
struct VectorSink(Vec<(IntVec, BigInt)>);

impl Sink for VectorSink {
    fn push<T: EnumInt>(&mut self, x: &[i64], norm: &T) {
        self.0.push((x.to_vec(), norm.to_big()));
    }
}

/// Keeps only vectors whose scaled norm equals `target`.
struct ExactSink {
    target: BigInt,
    small: Option<i128>,
    found: Vec<IntVec>,
}

impl Sink for ExactSink {
    fn push<T: EnumInt>(&mut self, x: &[i64], norm: &T) {
        let hit = match (norm.as_i128(), self.small) {
            (Some(v), Some(t)) => v == t,
            (Some(_), None) => false,
            (None, _) => norm.to_big() == self.target,
        };
        if hit {
            self.found.push(x.to_vec());
        }
    }
}

#[derive(Default)]
struct HistogramSink {
    small: std::collections::HashMap<i128, u64>,
    big: BTreeMap<BigInt, u64>,
}

impl Sink for HistogramSink {
    fn push<T: EnumInt>(&mut self, _: &[i64], norm: &T) {
        match norm.as_i128() {
            Some(v) => *self.small.entry(v).or_insert(0) += 1,
            None => *self.big.entry(norm.to_big()).or_insert(0) += 1,
        }
    }
}

/// Integer data of the decomposition `Q(x) = (1/E) Σ W_i Y_i²`.
#[derive(Clone, Debug)]
struct Layout {
    n: usize,
    den: Vec<BigInt>,
    /// `coef[i][j]` for `j > i`; zero elsewhere.
    coef: Vec<Vec<BigInt>>,
    weight: Vec<BigInt>,
    scale: BigInt,
}

impl Layout {
    fn new(q: &GramForm) -> Result<Self> {
        let f = ldl(q.matrix())?;
        let n = q.dimension();
        let mut den = Vec::with_capacity(n);
        let mut coef = vec![vec![BigInt::zero(); n]; n];
        let mut w: Vec<Rat> = Vec::with_capacity(n);
        for i in 0..n {
            let below: Vec<Rat> = (i + 1..n).map(|j| f.lower.get(j, i).clone()).collect();
            let d = lcm_of_denominators(below.iter());
            for (off, l) in below.iter().enumerate() {
                coef[i][i + 1 + off] = (l * Rat::from_integer(d.clone())).to_integer();
            }
            w.push(&f.diag[i] / Rat::from_integer(&d * &d));
            den.push(d);
        }
        let scale = lcm_of_denominators(w.iter());
        let weight = w
            .iter()
            .map(|v| (v * Rat::from_integer(scale.clone())).to_integer())
            .collect();
        Ok(Layout {
            n,
            den,
            coef,
            weight,
            scale,
        })
    }

    /// Whether every intermediate of an enumeration up to `budget` (already
    /// scaled by `E`) fits comfortably in an i128.
    fn fits_i128(&self, budget: &BigInt, max_coord: &[BigInt]) -> bool {
        let limit = BigInt::one() << 120;
        if budget > &limit {
            return false;
        }
        for i in 0..self.n {
            let mut y = &self.den[i] * &max_coord[i];
            for j in i + 1..self.n {
                y += self.coef[i][j].abs() * &max_coord[j];
            }
            // the candidate loop evaluates W (Y + den)² at the interval edges
            y += &self.den[i] * 2;
            if &self.weight[i] * &y * &y > limit {
                return false;
            }
        }
        true
    }
}

/// Short vector enumerator for one form and one bound.
pub struct Enumerator {
    layout: Layout,
    budget: BigInt,
    max_coord: Vec<BigInt>,
}

impl Enumerator {
    /// Prepares enumeration of `{x ≠ 0 : Q(x) ≤ bound}`.
    pub fn new(q: &GramForm, bound: &Rat) -> Result<Self> {
        if bound.is_negative() {
            return Err(Error::invalid("enumeration bound must be non-negative"));
        }
        let layout = Layout::new(q)?;
        let budget = floor(&(bound * Rat::from_integer(layout.scale.clone())));
        // |x_i| ≤ sqrt(bound · (Q⁻¹)_ii)
        let inv = q.matrix().inverse()?;
        let max_coord = (0..layout.n)
            .map(|i| floor(&(bound * inv.get(i, i))).sqrt() + 1)
            .collect::<Vec<BigInt>>();
        if max_coord.iter().any(|m| ToPrimitive::to_i64(m).is_none()) {
            return Err(Error::CapExceeded(
                "coordinates would not fit in 64 bits".into(),
            ));
        }
        Ok(Enumerator {
            layout,
            budget,
            max_coord,
        })
    }

    /// Common denominator `E`: visitors receive `E·Q(x)` as an integer.
    pub fn norm_scale(&self) -> &BigInt {
        &self.layout.scale
    }

    /// Runs the walk with one sink per value of the last coordinate, in
    /// parallel. Sinks come back in ascending order of that coordinate.
    fn run<T: EnumInt, S: Sink>(&self, make: &(impl Fn() -> S + Sync)) -> Vec<S> {
        let walker = Walker::<T>::new(&self.layout, &self.budget);
        let n = self.layout.n;
        if n == 0 {
            return Vec::new();
        }
        let Some((lo, hi)) = walker.range(n - 1, &T::zero(), &walker.budget, true) else {
            return Vec::new();
        };
        (lo..=hi)
            .into_par_iter()
            .map(|first| {
                let mut sink = make();
                walker.walk_from(first, &mut sink);
                sink
            })
            .collect()
    }

    fn run_any<S: Sink>(&self, make: impl Fn() -> S + Sync) -> Vec<S> {
        if self.layout.fits_i128(&self.budget, &self.max_coord) {
            self.run::<i128, S>(&make)
        } else {
            self.run::<BigInt, S>(&make)
        }
    }

    #[cfg(test)]
    fn use_i128(&self) -> bool {
        self.layout.fits_i128(&self.budget, &self.max_coord)
    }

    /// All canonical vectors with their scaled norms `E·Q(x)`.
    fn vectors_scaled(&self) -> Vec<(IntVec, BigInt)> {
        self.run_any(VectorSink::default)
            .into_iter()
            .flat_map(|s| s.0)
            .collect()
    }

    /// Canonical vectors with scaled norm exactly `target`.
    fn vectors_with_scaled_norm(&self, target: &BigInt) -> Vec<IntVec> {
        self.run_any(|| ExactSink {
            target: target.clone(),
            small: target.to_i128(),
            found: Vec::new(),
        })
        .into_iter()
        .flat_map(|s| s.found)
        .collect()
    }

    /// Histogram of scaled norms over canonical vectors.
    fn norm_histogram(&self) -> BTreeMap<BigInt, u64> {
        let mut hist = BTreeMap::new();
        for sink in self.run_any(HistogramSink::default) {
            for (k, c) in sink.small {
                *hist.entry(BigInt::from(k)).or_insert(0) += c;
            }
            for (k, c) in sink.big {
                *hist.entry(k).or_insert(0) += c;
            }
        }
        hist
    }
}

struct Walker<'a, T: EnumInt> {
    n: usize,
    den: Vec<T>,
    coef: Vec<Vec<T>>,
    weight: Vec<T>,
    budget: T,
    _layout: &'a Layout,
}

impl<'a, T: EnumInt> Walker<'a, T> {
    fn new(layout: &'a Layout, budget: &BigInt) -> Self {
        Walker {
            n: layout.n,
            den: layout.den.iter().map(T::from_big).collect(),
            coef: layout
                .coef
                .iter()
                .map(|r| r.iter().map(T::from_big).collect())
                .collect(),
            weight: layout.weight.iter().map(T::from_big).collect(),
            budget: T::from_big(budget),
            _layout: layout,
        }
    }

    /// Integer interval for coordinate `i` given the shift
    /// `C = Σ_{j>i} M_ij x_j` and remaining budget, or `None` if empty.
    fn range(&self, i: usize, shift: &T, remaining: &T, nonneg: bool) -> Option<(i64, i64)> {
        if remaining.is_negative() {
            return None;
        }
        // need W (den x + C)² ≤ R, i.e. |den x + C| ≤ m
        let m = (remaining.clone() / self.weight[i].clone()).sqrt();
        let den = &self.den[i];
        let lo = (-(m.clone()) - shift.clone()).div_ceil(den);
        let hi = (m - shift.clone()).div_floor(den);
        let lo = if nonneg && lo < T::zero() {
            T::zero()
        } else {
            lo
        };
        if lo > hi {
            return None;
        }
        Some((lo.as_i64()?, hi.as_i64()?))
    }

    fn walk_from<S: Sink>(&self, first: i64, sink: &mut S) {
        let n = self.n;
        let mut x = vec![0i64; n];
        x[n - 1] = first;
        let y = self.den[n - 1].clone() * T::from(first);
        let used = self.weight[n - 1].clone() * y.clone() * y;
        let remaining = self.budget.clone() - used;
        if remaining.is_negative() {
            return;
        }
        self.descend(n - 1, &mut x, remaining, first == 0, sink);
    }

    /// Coordinates `level..n` are fixed; fill `level-1` downwards.
    fn descend<S: Sink>(
        &self,
        level: usize,
        x: &mut [i64],
        remaining: T,
        zero_so_far: bool,
        sink: &mut S,
    ) {
        if level == 0 {
            if !zero_so_far {
                sink.push(x, &(self.budget.clone() - remaining));
            }
            return;
        }
        let i = level - 1;
        let mut shift = T::zero();
        for j in level..self.n {
            if x[j] != 0 {
                shift = shift + self.coef[i][j].clone() * T::from(x[j]);
            }
        }
        let Some((lo, hi)) = self.range(i, &shift, &remaining, zero_so_far) else {
            return;
        };
        for v in lo..=hi {
            let y = self.den[i].clone() * T::from(v) + shift.clone();
            let rest = remaining.clone() - self.weight[i].clone() * y.clone() * y;
            if rest.is_negative() {
                continue;
            }
            x[i] = v;
            self.descend(i, x, rest, zero_so_far && v == 0, sink);
        }
        x[i] = 0;
    }
}

/// Flips `x` so its first non-zero coordinate is positive.
pub fn canonical_sign(x: &mut [i64]) {
    if x.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        x.iter_mut().for_each(|c| *c = -*c);
    }
}

fn canonical_sign_rat(v: &mut [Rat]) {
    if v.iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative())
    {
        v.iter_mut().for_each(|c| *c = -c.clone());
    }
}

/// A lattice vector with its norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    pub coords: IntVec,
    pub norm: Rat,
}

/// LLL-reduced view of a form: `form = Uᵀ q U`, with `U` kept as `small`.
pub(crate) struct Reduced {
    pub form: GramForm,
    small: Vec<Vec<i64>>,
}

impl Reduced {
    pub fn new(q: &GramForm) -> Result<Self> {
        if q.dimension() == 0 {
            return Ok(Reduced {
                form: q.clone(),
                small: Vec::new(),
            });
        }
        let delta = rat(DEFAULT_DELTA.0, DEFAULT_DELTA.1);
        let (transform, g) = lll_gram(q.matrix(), &delta)?;
        let n = q.dimension();
        let small = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        to_i64(transform.get(i, j)).ok_or_else(|| {
                            Error::CapExceeded("reduction transform exceeds 64 bits".into())
                        })
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Reduced {
            form: GramForm::new(g)?,
            small,
        })
    }

    /// Maps reduced coordinates back to the original basis.
    pub fn lift(&self, y: &[i64]) -> IntVec {
        self.small
            .iter()
            .map(|row| row.iter().zip(y).map(|(u, c)| u * c).sum())
            .collect()
    }
}

/// Non-zero `x ∈ ℤⁿ` with `xᵀqx ≤ bound`, one per ± pair (first non-zero
/// coordinate positive), sorted by norm then coordinates.
pub fn enumerate_up_to(q: &GramForm, bound: &Rat) -> Result<Vec<ShortVector>> {
    let reduced = Reduced::new(q)?;
    let e = Enumerator::new(&reduced.form, bound)?;
    let scale = Rat::from_integer(e.norm_scale().clone());
    let mut out: Vec<ShortVector> = e
        .vectors_scaled()
        .into_iter()
        .map(|(y, norm)| {
            let mut coords = reduced.lift(&y);
            canonical_sign(&mut coords);
            ShortVector {
                coords,
                norm: Rat::from_integer(norm) / &scale,
            }
        })
        .collect();
    out.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
    Ok(out)
}

/// Canonical representatives `x` with `xᵀqx = target` exactly, sorted.
pub fn vectors_of_norm(q: &GramForm, target: &Rat) -> Result<Vec<IntVec>> {
    let reduced = Reduced::new(q)?;
    let e = Enumerator::new(&reduced.form, target)?;
    let scaled = target * Rat::from_integer(e.norm_scale().clone());
    if !scaled.is_integer() || target.is_zero() {
        return Ok(Vec::new());
    }
    let mut out: Vec<IntVec> = e
        .vectors_with_scaled_norm(&scaled.to_integer())
        .into_iter()
        .map(|y| {
            let mut x = reduced.lift(&y);
            canonical_sign(&mut x);
            x
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Representation numbers `R(q, t)` for `0 ≤ t ≤ bound`.
///
/// Keys are every multiple of `step` (the positive generator of the values
/// `q` can take) up to the bound, zero counts included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepSpectrum {
    pub bound: Rat,
    pub step: Rat,
    pub counts: BTreeMap<Rat, u64>,
}

impl RepSpectrum {
    /// `R(q, t)`; `None` when `t` is beyond the bound or not a value the
    /// form can take (not a multiple of `step`).
    pub fn get(&self, t: &Rat) -> Option<u64> {
        if t.is_negative() || t > &self.bound {
            return None;
        }
        if let Some(c) = self.counts.get(t) {
            return Some(*c);
        }
        (!self.step.is_zero() && (t / &self.step).is_integer()).then_some(0)
    }

    /// Every multiple of `step` up to the bound with its count, zeros
    /// included, ascending.
    pub fn entries(&self) -> impl Iterator<Item = (Rat, u64)> + '_ {
        let steps = if self.step.is_zero() {
            0
        } else {
            floor(&(&self.bound / &self.step))
                .to_u64()
                .unwrap_or(u64::MAX)
        };
        (0..=steps).map(move |k| {
            let t = &self.step * Rat::from_integer(k.into());
            let c = self.counts.get(&t).copied().unwrap_or(0);
            (t, c)
        })
    }

    /// `t<TAB>count` lines, ascending, zeros included.
    pub fn to_tsv(&self) -> String {
        self.entries().map(|(t, c)| format!("{t}\t{c}\n")).collect()
    }

    /// Restriction to `t ≤ bound`.
    pub fn truncated(&self, bound: &Rat) -> RepSpectrum {
        RepSpectrum {
            bound: bound.clone().min(self.bound.clone()),
            step: self.step.clone(),
            counts: self
                .counts
                .iter()
                .filter(|(t, _)| *t <= bound)
                .map(|(t, c)| (t.clone(), *c))
                .collect(),
        }
    }

    /// First `t` (up to the smaller bound) where the two spectra differ.
    pub fn first_difference(&self, other: &RepSpectrum) -> Option<Rat> {
        let bound = self.bound.clone().min(other.bound.clone());
        let keys: std::collections::BTreeSet<&Rat> =
            self.counts.keys().chain(other.counts.keys()).collect();
        keys.into_iter()
            .filter(|t| **t <= bound)
            .find(|t| self.counts.get(t) != other.counts.get(t))
            .cloned()
    }
}

/// Serializable spectrum: rationals as strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpectrumRecord {
    pub bound: String,
    pub step: String,
    pub counts: Vec<(String, u64)>,
}

impl From<&RepSpectrum> for SpectrumRecord {
    fn from(s: &RepSpectrum) -> Self {
        SpectrumRecord {
            bound: s.bound.to_string(),
            step: s.step.to_string(),
            counts: s.entries().map(|(t, c)| (t.to_string(), c)).collect(),
        }
    }
}

/// Positive generator of the additive group of values of `q` on `ℤⁿ`.
pub fn value_step(q: &GramForm) -> Rat {
    let m = q.matrix();
    let n = q.dimension();
    let mut gens: Vec<Rat> = Vec::new();
    for i in 0..n {
        gens.push(m.get(i, i).clone());
        for j in 0..i {
            gens.push(m.get(i, j) * int(2));
        }
    }
    gcd_of_rats(gens.iter())
}

pub fn rep_spectrum(q: &GramForm, bound: &Rat) -> Result<RepSpectrum> {
    if bound.is_negative() {
        return Err(Error::invalid("spectrum bound must be non-negative"));
    }
    let reduced = Reduced::new(q)?;
    let e = Enumerator::new(&reduced.form, bound)?;
    let scale = Rat::from_integer(e.norm_scale().clone());
    let step = value_step(q);
    let mut counts = BTreeMap::from([(Rat::zero(), 1u64)]);
    for (norm, c) in e.norm_histogram() {
        let t = Rat::from_integer(norm) / &scale;
        *counts.entry(t).or_insert(0) += 2 * c;
    }
    Ok(RepSpectrum {
        bound: bound.clone(),
        step,
        counts,
    })
}

/// Same-norm vectors of a lattice, ambient coordinates, one per ± pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorList {
    pub norm: Rat,
    pub vectors: Vec<Vec<Rat>>,
}

impl VectorList {
    fn from_coords(lattice: &Lattice, norm: Rat, coords: &[IntVec]) -> Self {
        let mut vectors: Vec<Vec<Rat>> = coords
            .iter()
            .map(|x| {
                let mut v = lattice.ambient(x);
                canonical_sign_rat(&mut v);
                v
            })
            .collect();
        vectors.sort();
        VectorList { norm, vectors }
    }
}

/// Minimal-norm non-zero vectors of the lattice.
pub fn shortest_vectors(l: &Lattice) -> Result<VectorList> {
    if l.dimension() == 0 {
        return Err(Error::invalid(
            "the 0-dimensional lattice has no non-zero vectors",
        ));
    }
    let q = l.gram();
    let reduced = Reduced::new(&q)?;
    let bound = (0..q.dimension())
        .map(|i| reduced.form.matrix().get(i, i).clone())
        .min()
        .expect("positive dimension");
    let all = enumerate_up_to(&q, &bound)?;
    let min = all[0].norm.clone();
    let coords: Vec<IntVec> = all
        .into_iter()
        .take_while(|v| v.norm == min)
        .map(|v| v.coords)
        .collect();
    Ok(VectorList::from_coords(l, min, &coords))
}

/// Successive stages of minimal vectors, each adding one dimension.
///
/// Stage `k` takes the smallest norm `m` found outside the span `S` of the
/// earlier stages, picks a pivot `c` among those vectors (the one with the
/// earliest leading coordinate), and holds every norm-`m` vector outside `S`
/// but inside `S + ⟨c⟩`. Ties that lie in the same extension (like a pair
/// differing by an earlier stage vector) therefore share a stage, while
/// genuinely new directions of the same norm open the next one.
pub fn independent_ladder(l: &Lattice, count: usize) -> Result<Vec<VectorList>> {
    let n = l.dimension();
    if count == 0 || count > n {
        return Err(Error::invalid(format!(
            "ladder length must be between 1 and the dimension {n}, got {count}"
        )));
    }
    let q = l.gram();
    let reduced = Reduced::new(&q)?;
    // a reduced basis vector escapes every proper subspace, so this bound
    // reaches every stage
    let bound = reduced.form.max_diagonal();
    let all = enumerate_up_to(&q, &bound)?;
    let ambient: Vec<Vec<Rat>> = all
        .iter()
        .map(|v| {
            let mut a = l.ambient(&v.coords);
            canonical_sign_rat(&mut a);
            a
        })
        .collect();
    let mut span = Span::new();
    let mut stages = Vec::with_capacity(count);
    let mut idx = 0;
    while stages.len() < count && idx < all.len() {
        let norm = all[idx].norm.clone();
        let end = idx + all[idx..].iter().take_while(|v| v.norm == norm).count();
        let fresh: Vec<usize> = (idx..end)
            .filter(|&k| !span.contains(&to_rats(&all[k].coords)))
            .collect();
        if fresh.is_empty() {
            idx = end;
            continue;
        }
        let pivot = *fresh
            .iter()
            .max_by(|&&a, &&b| ambient[a].cmp(&ambient[b]).then(b.cmp(&a)))
            .expect("non-empty");
        let mut extended = span.clone();
        extended.insert(&to_rats(&all[pivot].coords));
        let members: Vec<IntVec> = fresh
            .iter()
            .filter(|&&k| extended.contains(&to_rats(&all[k].coords)))
            .map(|&k| all[k].coords.clone())
            .collect();
        span = extended;
        stages.push(VectorList::from_coords(l, norm, &members));
    }
    Ok(stages)
}

pub(crate) fn to_rats(x: &[i64]) -> Vec<Rat> {
    x.iter().map(|&c| int(c)).collect()
}
