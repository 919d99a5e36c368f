//! Integral equivalence of positive definite forms.
//!
//! `q2 = Bᵀ q1 B` with `B ∈ GL_n(ℤ)` forces column `j` of `B` to have
//! `q1`-norm `(q2)_jj`, so each column ranges over a finite candidate set
//! and the pairwise products `b_iᵀ q1 b_j = (q2)_ij` prune the search. Since
//! `xᵀq1x ≥ λ_min ‖x‖²`, every candidate also obeys `‖b_j‖² ≤ (q2)_jj / λ`
//! for any lower bound `λ` of the spectrum of `q1`; those caps are reported
//! alongside the result.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::{vectors_of_norm, IntVec};
use crate::error::{Error, Result};
use crate::lattice::{GramForm, Lattice};
use crate::numeric::{
    char_poly, check_positive, eigenvalue_lower_bound, lcm_of_denominators, rat, Mat, Rat,
    SturmChain,
};

/// `(q2)_jj / lambda_bound` for every column `j`.
pub fn norm_caps(q1: &GramForm, q2: &GramForm, lambda_bound: &Rat) -> Result<Vec<Rat>> {
    check_positive(lambda_bound, "lambda bound")?;
    if q1.dimension() != q2.dimension() {
        return Err(Error::dim("forms have different dimensions"));
    }
    Ok((0..q2.dimension())
        .map(|j| q2.matrix().get(j, j) / lambda_bound)
        .collect())
}

/// Checks that no eigenvalue of `q` is smaller than `lambda`.
pub fn is_eigenvalue_lower_bound(q: &GramForm, lambda: &Rat) -> Result<bool> {
    if !lambda.is_positive() {
        return Ok(true);
    }
    let p = char_poly(q.matrix())?;
    let sturm = SturmChain::new(&p);
    let mut below = sturm.count_roots(&Rat::zero(), lambda);
    if p.eval(lambda).is_zero() {
        below -= 1;
    }
    Ok(below == 0)
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Lower bound on the smallest eigenvalue of `q1` used for the reported
    /// caps. Certified from the characteristic polynomial when absent.
    pub lambda_bound: Option<Rat>,
    /// Abort after visiting this many search nodes.
    pub node_budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// `|S_j|` for each column `j`, counting both signs.
    pub candidate_counts: Vec<usize>,
    pub nodes: u64,
    pub caps: Vec<String>,
    pub lambda_bound: String,
    /// Partitions of the first assigned column (one sign per ± pair).
    pub partitions: usize,
    pub first_column: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Columns of the matrix are the images of the standard basis:
    /// `Bᵀ q1 B = q2`.
    Equivalent(Mat),
    /// Every candidate assignment was ruled out.
    NotEquivalent,
    /// The node budget ran out before the search finished.
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl EquivalenceWitness {
    pub fn is_equivalent(&self) -> bool {
        matches!(self.outcome, Outcome::Equivalent(_))
    }

    pub fn witness(&self) -> Option<&Mat> {
        match &self.outcome {
            Outcome::Equivalent(b) => Some(b),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self.outcome {
            Outcome::Equivalent(_) => "Equivalent",
            Outcome::NotEquivalent => "NotEquivalent",
            Outcome::BudgetExceeded => "BudgetExceeded",
        }
    }
}

/// Machine-readable form of an [`EquivalenceWitness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub verdict: String,
    pub witness: Option<Vec<Vec<String>>>,
    pub stats: SearchStats,
}

impl EquivalenceWitness {
    pub fn record(&self) -> WitnessRecord {
        WitnessRecord {
            verdict: self.verdict().to_string(),
            witness: self.witness().map(Mat::string_rows),
            stats: self.stats.clone(),
        }
    }
}

impl fmt::Display for EquivalenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict())?;
        let counts: Vec<String> = self
            .stats
            .candidate_counts
            .iter()
            .map(|c| c.to_string())
            .collect();
        writeln!(f, "candidates: {}", counts.join(" "))?;
        writeln!(f, "nodes: {}", self.stats.nodes)?;
        writeln!(f, "lambda_bound: {}", self.stats.lambda_bound)?;
        writeln!(f, "caps: {}", self.stats.caps.join(" "))?;
        if let Outcome::Equivalent(b) = &self.outcome {
            writeln!(f)?;
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Every `x` (both signs) with `xᵀ q x = target`.
pub fn candidate_set(q: &GramForm, target: &Rat) -> Result<Vec<IntVec>> {
    let mut out = Vec::new();
    for x in vectors_of_norm(q, target)? {
        out.push(x.iter().map(|c| -c).collect());
        out.push(x);
    }
    Ok(out)
}

pub fn integral_equivalence(q1: &GramForm, q2: &GramForm) -> Result<EquivalenceWitness> {
    integral_equivalence_with(q1, q2, &SearchOptions::default())
}

pub fn congruent_lattices(a: &Lattice, b: &Lattice) -> Result<EquivalenceWitness> {
    integral_equivalence(&a.gram(), &b.gram())
}

/// Integer copies of both forms over a common denominator.
fn integer_pair(q1: &GramForm, q2: &GramForm) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let den = Rat::from_integer(lcm_of_denominators(
        q1.matrix().entries().iter().chain(q2.matrix().entries()),
    ));
    let convert = |q: &GramForm| -> Result<Vec<Vec<i64>>> {
        let n = q.dimension();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (q.matrix().get(i, j) * &den)
                            .to_integer()
                            .to_i64()
                            .ok_or_else(|| Error::Unsupported("form entries exceed 64 bits".into()))
                    })
                    .collect()
            })
            .collect()
    };
    Ok((convert(q1)?, convert(q2)?))
}

struct Search<'a> {
    target: &'a [Vec<i64>],
    vectors: Vec<IntVec>,
    /// `q1 · x` for each candidate.
    images: Vec<Vec<i64>>,
    nodes: AtomicU64,
    budget: u64,
    found: AtomicBool,
    aborted: AtomicBool,
}

impl Search<'_> {
    fn pairing(&self, a: u32, b: u32) -> i128 {
        self.vectors[a as usize]
            .iter()
            .zip(&self.images[b as usize])
            .map(|(&x, &y)| x as i128 * y as i128)
            .sum()
    }

    /// Assigns `choice` to `column` and narrows the other open domains.
    /// `None` when some domain empties.
    fn narrow(
        &self,
        domains: &[Option<Vec<u32>>],
        column: usize,
        choice: u32,
    ) -> Option<Vec<Option<Vec<u32>>>> {
        let mut next = Vec::with_capacity(domains.len());
        for (k, d) in domains.iter().enumerate() {
            match d {
                Some(_) if k == column => next.push(None),
                Some(cands) => {
                    let want = self.target[column][k] as i128;
                    let kept: Vec<u32> = cands
                        .iter()
                        .copied()
                        .filter(|&c| self.pairing(choice, c) == want)
                        .collect();
                    if kept.is_empty() {
                        return None;
                    }
                    next.push(Some(kept));
                }
                None => next.push(None),
            }
        }
        Some(next)
    }

    /// Counts one node; false once the search should stop.
    fn visit(&self) -> bool {
        if self.found.load(Ordering::Relaxed) || self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn pick_column(domains: &[Option<Vec<u32>>]) -> Option<usize> {
        domains
            .iter()
            .enumerate()
            .filter_map(|(k, d)| d.as_ref().map(|d| (d.len(), k)))
            .min()
            .map(|(_, k)| k)
    }

    fn descend(&self, domains: Vec<Option<Vec<u32>>>, assigned: &mut Vec<(usize, u32)>) -> bool {
        let Some(column) = Self::pick_column(&domains) else {
            return true;
        };
        let cands = domains[column].as_ref().expect("open column");
        for &c in cands {
            if !self.visit() {
                return false;
            }
            if let Some(next) = self.narrow(&domains, column, c) {
                assigned.push((column, c));
                if self.descend(next, assigned) {
                    return true;
                }
                assigned.pop();
            }
        }
        false
    }
}

pub fn integral_equivalence_with(
    q1: &GramForm,
    q2: &GramForm,
    opts: &SearchOptions,
) -> Result<EquivalenceWitness> {
    let n = q1.dimension();
    if q2.dimension() != n {
        return Err(Error::dim("forms have different dimensions"));
    }
    let lambda = match &opts.lambda_bound {
        Some(l) => {
            check_positive(l, "lambda bound")?;
            if !is_eigenvalue_lower_bound(q1, l)? {
                return Err(Error::invalid(format!(
                    "{l} exceeds the smallest eigenvalue of the first form"
                )));
            }
            l.clone()
        }
        None => eigenvalue_lower_bound(q1.matrix(), &rat(1, 1000))?,
    };
    let caps = norm_caps(q1, q2, &lambda)?;
    let mut stats = SearchStats {
        candidate_counts: Vec::new(),
        nodes: 0,
        caps: caps.iter().map(|c| c.to_string()).collect(),
        lambda_bound: lambda.to_string(),
        partitions: 0,
        first_column: None,
    };
    if q1.determinant() != q2.determinant() {
        return Ok(EquivalenceWitness {
            outcome: Outcome::NotEquivalent,
            stats,
        });
    }
    if q1 == q2 {
        return Ok(EquivalenceWitness {
            outcome: Outcome::Equivalent(Mat::identity(n)),
            stats,
        });
    }

    let (s1, target) = integer_pair(q1, q2)?;
    let mut by_norm: BTreeMap<Rat, Vec<u32>> = BTreeMap::new();
    let mut vectors: Vec<IntVec> = Vec::new();
    for j in 0..n {
        let norm = q2.matrix().get(j, j).clone();
        if by_norm.contains_key(&norm) {
            continue;
        }
        let set = candidate_set(q1, &norm)?;
        let start = vectors.len() as u32;
        by_norm.insert(norm, (start..start + set.len() as u32).collect());
        vectors.extend(set);
    }
    let images: Vec<Vec<i64>> = vectors
        .iter()
        .map(|x| {
            (0..n)
                .map(|i| s1[i].iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let domains: Vec<Option<Vec<u32>>> = (0..n)
        .map(|j| Some(by_norm[q2.matrix().get(j, j)].clone()))
        .collect();
    stats.candidate_counts = domains
        .iter()
        .map(|d| d.as_ref().map_or(0, Vec::len))
        .collect();

    let search = Search {
        target: &target,
        vectors,
        images,
        nodes: AtomicU64::new(0),
        budget: opts.node_budget.unwrap_or(u64::MAX),
        found: AtomicBool::new(false),
        aborted: AtomicBool::new(false),
    };
    let first = Search::pick_column(&domains).expect("n > 0");
    // -B is a witness iff B is, so the first column keeps one sign per pair
    let roots: Vec<u32> = domains[first]
        .as_ref()
        .expect("open")
        .iter()
        .copied()
        .filter(|&c| {
            search.vectors[c as usize]
                .iter()
                .find(|&&v| v != 0)
                .is_some_and(|&v| v > 0)
        })
        .collect();
    stats.partitions = roots.len();
    stats.first_column = Some(first);

    let witness = roots.par_iter().find_map_any(|&c| {
        if !search.visit() {
            return None;
        }
        let next = search.narrow(&domains, first, c)?;
        let mut assigned = vec![(first, c)];
        if search.descend(next, &mut assigned) {
            search.found.store(true, Ordering::Relaxed);
            Some(assigned)
        } else {
            None
        }
    });
    stats.nodes = search.nodes.load(Ordering::Relaxed);

    let outcome = match witness {
        Some(assigned) => {
            let mut columns = vec![Vec::new(); n];
            for (j, c) in assigned {
                columns[j] = search.vectors[c as usize].clone();
            }
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| columns.iter().map(|c| c[i]).collect())
                .collect();
            let b = Mat::from_ints(&rows);
            verify_witness(q1, q2, &b)?;
            Outcome::Equivalent(b)
        }
        None if search.aborted.load(Ordering::Relaxed) => Outcome::BudgetExceeded,
        None => Outcome::NotEquivalent,
    };
    Ok(EquivalenceWitness { outcome, stats })
}

/// `Bᵀ q1 B = q2` and `|det B| = 1`, exactly.
pub fn verify_witness(q1: &GramForm, q2: &GramForm, b: &Mat) -> Result<()> {
    if !b.is_integral() {
        return Err(Error::verification("witness", "matrix is not integral"));
    }
    let det = b.determinant()?;
    if det.abs() != Rat::from_integer(1.into()) {
        return Err(Error::verification(
            "witness",
            format!("determinant is {det}"),
        ));
    }
    let image = b.transpose().mul(q1.matrix())?.mul(b)?;
    if &image != q2.matrix() {
        return Err(Error::verification("witness", "Bᵀ q1 B differs from q2"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::enumeration::rep_spectrum;
    use crate::numeric::int;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unimodular(n: usize, rng: &mut ChaCha8Rng, bound: i64) -> Mat {
        // product of elementary moves and signed swaps, entries kept small
        loop {
            let mut b = Mat::identity(n);
            for _ in 0..(2 * n) {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let f = if rng.gen_bool(0.5) { 1 } else { -1 };
                let mut next = b.clone();
                for r in 0..n {
                    let v = b.get(r, i) + b.get(r, j) * int(f);
                    next.set(r, i, v);
                }
                if next.max_abs() <= int(bound) {
                    b = next;
                }
            }
            if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..n);
                for r in 0..n {
                    let v = -b.get(r, k).clone();
                    b.set(r, k, v);
                }
            }
            if b != Mat::identity(n) {
                return b;
            }
        }
    }

    #[test]
    fn caps_from_printed_bound() {
        let caps = norm_caps(&corpus::form(0), &corpus::form(1), &rat(263, 400)).unwrap();
        let mut want = vec![rat(5600, 263), rat(2800, 263), rat(1200, 263)];
        want.extend(vec![rat(10000, 263); 3]);
        assert_eq!(caps, want);
        let id = GramForm::new(Mat::identity(3)).unwrap();
        assert_eq!(norm_caps(&id, &id, &int(1)).unwrap(), vec![int(1); 3]);
        assert!(norm_caps(&id, &id, &int(0)).is_err());
        assert!(norm_caps(&id, &id, &int(-1)).is_err());
    }

    #[test]
    fn caps_shrink_as_the_bound_grows() {
        let (a, b) = (corpus::form(0), corpus::form(2));
        let small = norm_caps(&a, &b, &rat(1, 2)).unwrap();
        let large = norm_caps(&a, &b, &rat(2, 3)).unwrap();
        assert!(small.iter().zip(&large).all(|(s, l)| s > l));
    }

    #[test]
    fn printed_bound_is_a_lower_bound() {
        assert!(is_eigenvalue_lower_bound(&corpus::form(0), &rat(263, 400)).unwrap());
        assert!(!is_eigenvalue_lower_bound(&corpus::form(0), &rat(3, 4)).unwrap());
        let id = GramForm::new(Mat::identity(2)).unwrap();
        assert!(is_eigenvalue_lower_bound(&id, &int(1)).unwrap());
    }

    #[test]
    fn corpus_pairs_are_inequivalent() {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let w = integral_equivalence(&corpus::form(i), &corpus::form(j)).unwrap();
            assert_eq!(w.outcome, Outcome::NotEquivalent, "pair {i} {j}");
            assert!(w.stats.nodes > 0);
        }
    }

    #[test]
    fn form_is_equivalent_to_itself() {
        let q = corpus::form(0);
        let w = integral_equivalence(&q, &q).unwrap();
        let b = w.witness().expect("equivalent");
        verify_witness(&q, &q, b).unwrap();
        let id = GramForm::new(Mat::identity(3)).unwrap();
        let w = integral_equivalence(&id, &id).unwrap();
        assert_eq!(w.witness().unwrap(), &Mat::identity(3));
    }

    #[test]
    fn elementary_conjugate() {
        let q = corpus::form(1);
        let mut b = Mat::identity(6);
        b.set(0, 3, int(1));
        let w = integral_equivalence(&q, &q.transform(&b).unwrap()).unwrap();
        verify_witness(&q, &q.transform(&b).unwrap(), w.witness().unwrap()).unwrap();
    }

    #[test]
    fn lattice_congruence() {
        let w = congruent_lattices(&corpus::lattice(0), &corpus::lattice(1)).unwrap();
        assert_eq!(w.outcome, Outcome::NotEquivalent);
        // signed permutation of ambient coordinates
        let l = corpus::lattice(2);
        let mut p = Mat::zeros(6, 6);
        for (i, &(j, s)) in [(3, 1), (0, -1), (5, 1), (1, 1), (4, -1), (2, 1)]
            .iter()
            .enumerate()
        {
            p.set(i, j, int(s));
        }
        let image = Lattice::new(p.mul(l.basis()).unwrap()).unwrap();
        assert!(congruent_lattices(&l, &image).unwrap().is_equivalent());
        let scaled = l.scale(&int(2)).unwrap();
        let w = congruent_lattices(&l, &scaled).unwrap();
        assert_eq!(w.outcome, Outcome::NotEquivalent);
        assert_eq!(w.stats.nodes, 0);
    }

    #[test]
    fn rejects_mismatched_input() {
        let a = GramForm::new(Mat::identity(2)).unwrap();
        let b = GramForm::new(Mat::identity(3)).unwrap();
        assert!(integral_equivalence(&a, &b).is_err());
        let opts = SearchOptions {
            lambda_bound: Some(int(2)),
            ..Default::default()
        };
        assert!(integral_equivalence_with(&a, &a, &opts).is_err());
    }

    #[test]
    fn budget_is_reported() {
        let opts = SearchOptions {
            node_budget: Some(3),
            ..Default::default()
        };
        let q = corpus::form(0);
        let mut b = Mat::identity(6);
        b.set(1, 4, int(-1));
        let conj = q.transform(&b).unwrap();
        let w = integral_equivalence_with(&q, &conj, &opts).unwrap();
        assert_eq!(w.outcome, Outcome::BudgetExceeded);
        assert!(w.witness().is_none());
    }

    #[test]
    fn rational_forms() {
        let a = GramForm::new(Mat::diagonal(&[rat(1, 2), rat(3, 2)])).unwrap();
        let mut b = Mat::identity(2);
        b.set(0, 1, int(2));
        let conj = a.transform(&b).unwrap();
        let w = integral_equivalence(&a, &conj).unwrap();
        verify_witness(&a, &conj, w.witness().unwrap()).unwrap();
    }

    #[test]
    fn candidates_respect_caps() {
        let (q1, q2) = (corpus::form(0), corpus::form(1));
        let lambda = rat(263, 400);
        let caps = norm_caps(&q1, &q2, &lambda).unwrap();
        for j in 0..6 {
            let set = candidate_set(&q1, q2.matrix().get(j, j)).unwrap();
            assert!(!set.is_empty());
            for x in set {
                let len: i64 = x.iter().map(|c| c * c).sum();
                assert!(int(len) <= caps[j]);
            }
        }
    }

    #[test]
    fn random_conjugates_are_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..50 {
            let q = corpus::form(k % 3);
            let b = random_unimodular(6, &mut rng, 2);
            let conj = q.transform(&b).unwrap();
            let w = integral_equivalence(&q, &conj).unwrap();
            verify_witness(&q, &conj, w.witness().expect("conjugate")).unwrap();
        }
    }

    #[test]
    fn distinguishable_pairs_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let rows: Vec<Vec<i64>> = (0..3)
                .map(|_| (0..3).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let m = Mat::from_ints(&rows);
            if m.determinant().unwrap().is_zero() {
                continue;
            }
            let a = GramForm::new(m.transpose().mul(&m).unwrap()).unwrap();
            let mut shift = Mat::identity(3);
            shift.set(2, 2, int(2));
            let b = a.transform(&shift).unwrap();
            let c = GramForm::new(Mat::diagonal(&[int(1), int(1), a.determinant()])).unwrap();
            let sa = rep_spectrum(&a, &int(12)).unwrap();
            let sc = rep_spectrum(&c, &int(12)).unwrap();
            assert_eq!(
                integral_equivalence(&a, &b).unwrap().outcome,
                Outcome::NotEquivalent
            );
            if sa.first_difference(&sc).is_some() {
                assert_eq!(
                    integral_equivalence(&a, &c).unwrap().outcome,
                    Outcome::NotEquivalent
                );
            }
            checked += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn verdict_is_symmetric(
            seed in proptest::collection::vec(-2i64..=2, 9),
            ops in proptest::collection::vec((0usize..3, 0usize..3, -1i64..=1), 0..4),
            swap in any::<bool>(),
        ) {
            let m = Mat::from_ints(&[&seed[0..3], &seed[3..6], &seed[6..9]]);
            prop_assume!(!m.determinant().unwrap().is_zero());
            let a = GramForm::new(m.transpose().mul(&m).unwrap()).unwrap();
            let mut b = Mat::identity(3);
            for (i, j, f) in ops {
                if i != j {
                    for r in 0..3 {
                        let v = b.get(r, i) + b.get(r, j) * int(f);
                        b.set(r, i, v);
                    }
                }
            }
            let other = if swap {
                a.transform(&b).unwrap()
            } else {
                GramForm::new(Mat::diagonal(&[int(1), int(1), a.determinant()])).unwrap()
            };
            let ab = integral_equivalence(&a, &other).unwrap();
            let ba = integral_equivalence(&other, &a).unwrap();
            prop_assert_eq!(ab.is_equivalent(), ba.is_equivalent());
            if let Some(w) = ab.witness() {
                prop_assert!(verify_witness(&a, &other, w).is_ok());
            }
        }
    }
}
