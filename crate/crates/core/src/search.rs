//! Exhaustive search for isospectral, non-isometric Construction A lattices.
//!
//! Codes are bucketed by weight distribution, collapsed to monomial
//! equivalence classes, lifted, certified and split into isometry classes.
//! Buckets keep only canonical forms, so the state that is checkpointed stays
//! small even when millions of codes are visited.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{
    canonical_monomial_form, free_positions, is_prime, lift, pivot_patterns, signed_permutations,
    weight_distribution, Family, LinearCode, PrimeField, WeightDistribution, WeightSignature,
    MAX_CANONICAL_LENGTH,
};
use crate::error::{Error, Result};
use crate::isometry::{integral_equivalence_with, EquivalenceWitness, Outcome, SearchOptions};
use crate::lattice::{GramForm, Lattice};
use crate::spectra::{certify, IsoCertificate, Verdict};

/// Codes visited per invocation before the run stops with a checkpoint.
pub const DEFAULT_CODE_BUDGET: u64 = 100_000_000;

/// Free entries fixed per partition.
const PREFIX_ENTRIES: usize = 2;

/// Largest dense signature-class table.
const MAX_CLASSES: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub family: Family,
    pub min_tuple: usize,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Resume from and save progress to this file.
    pub checkpoint: Option<PathBuf>,
    pub code_budget: u64,
    /// Node budget for each pairwise isometry search.
    pub node_budget: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            checkpoint: None,
            code_budget: DEFAULT_CODE_BUDGET,
            node_budget: None,
        }
    }
}

/// Codes sharing one weight distribution with at least two monomial classes.
#[derive(Clone, Debug)]
pub struct CollisionBucket {
    pub distribution: WeightDistribution,
    /// Codes of the family that landed in this bucket.
    pub codes: u64,
    /// Monomial canonical forms, ascending.
    pub canonical_forms: Vec<LinearCode>,
}

#[derive(Clone, Debug)]
pub struct PairOutcome {
    pub i: usize,
    pub j: usize,
    pub witness: EquivalenceWitness,
}

#[derive(Clone, Debug)]
pub struct CollisionTuple {
    pub codes: Vec<LinearCode>,
    pub lattices: Vec<Lattice>,
    pub certificate: IsoCertificate,
    /// One entry per unordered pair `i < j`.
    pub pairwise: Vec<PairOutcome>,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub params: SearchParams,
    pub codes_examined: u64,
    /// Distinct monomial classes met.
    pub classes: usize,
    /// Ascending by first canonical form.
    pub collisions: Vec<CollisionBucket>,
    /// Ascending by first canonical form.
    pub tuples: Vec<CollisionTuple>,
}

/// Signature class histogram: `(class, count)` pairs with ascending class.
/// A class encodes how many coordinates fold to each value `1..=q/2`, so
/// equal keys are exactly equal distributions.
type DistKey = Vec<(u32, u32)>;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Bucket {
    codes: u64,
    /// Packed canonical generator matrices.
    forms: BTreeSet<u128>,
}

#[derive(Default)]
struct Table {
    codes: u64,
    buckets: HashMap<DistKey, Bucket>,
}

impl Table {
    fn merge_into(self, global: &mut BTreeMap<DistKey, Bucket>) -> u64 {
        for (key, b) in self.buckets {
            let entry = global.entry(key).or_default();
            entry.codes += b.codes;
            entry.forms.extend(b.forms);
        }
        self.codes
    }
}

struct Engine {
    q: u32,
    n: usize,
    k: usize,
    field: PrimeField,
    maps: Vec<(Vec<usize>, Vec<bool>)>,
    /// Class contribution of one coordinate value.
    contrib: Vec<u32>,
    classes: usize,
    /// Code → canonical form, filled an orbit at a time.
    memo: RwLock<HashMap<u128, u128>>,
}

impl Engine {
    fn new(q: u32, n: usize, k: usize) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::Unsupported(format!(
                "search needs a prime modulus, got {q}"
            )));
        }
        if k > n {
            return Err(Error::invalid(format!("rank {k} exceeds length {n}")));
        }
        if n > MAX_CANONICAL_LENGTH {
            return Err(Error::Unsupported(format!(
                "search needs length at most {MAX_CANONICAL_LENGTH}, got {n}"
            )));
        }
        let digits = (k * n) as f64 * (q as f64).log2();
        if digits >= 127.0 {
            return Err(Error::Unsupported(
                "generator matrices too large to pack".into(),
            ));
        }
        let half = q / 2;
        let classes = (n as u64 + 1)
            .checked_pow(half)
            .filter(|&c| c <= MAX_CLASSES)
            .ok_or_else(|| Error::Unsupported(format!("modulus {q} too large for length {n}")))?;
        let contrib = (0..q)
            .map(|v| {
                let f = v.min(q - v);
                if f == 0 {
                    0
                } else {
                    (n as u32 + 1).pow(f - 1)
                }
            })
            .collect();
        Ok(Engine {
            q,
            n,
            k,
            field: PrimeField::new(q),
            maps: signed_permutations(n),
            contrib,
            classes: classes as usize,
            memo: RwLock::new(HashMap::new()),
        })
    }

    fn pack(&self, flat: &[u32]) -> u128 {
        flat.iter()
            .fold(0u128, |acc, &v| acc * self.q as u128 + v as u128)
    }

    fn unpack(&self, mut id: u128) -> LinearCode {
        let mut flat = vec![0u32; self.k * self.n];
        for v in flat.iter_mut().rev() {
            *v = (id % self.q as u128) as u32;
            id /= self.q as u128;
        }
        let rows: Vec<Vec<i64>> = flat
            .chunks(self.n.max(1))
            .take(self.k)
            .map(|r| r.iter().map(|&v| v as i64).collect())
            .collect();
        LinearCode::new(self.q, self.n, &rows).expect("packed parameters are valid")
    }

    fn decode(&self, key: &DistKey) -> WeightDistribution {
        let base = self.n as u32 + 1;
        let counts = key
            .iter()
            .map(|&(class, count)| {
                let mut sig = Vec::with_capacity(self.n);
                let mut rest = class;
                for f in 1..=self.q / 2 {
                    sig.extend(std::iter::repeat_n(f, (rest % base) as usize));
                    rest /= base;
                }
                let zeros = self.n - sig.len();
                sig.splice(0..0, std::iter::repeat_n(0, zeros));
                (WeightSignature(sig), count as u64)
            })
            .collect();
        WeightDistribution { counts }
    }

    /// Distribution key of the code spanned by the `k` rows of `gens`.
    fn key(&self, gens: &[u32], hist: &mut [u32], touched: &mut Vec<u32>) -> DistKey {
        let (n, q) = (self.n, self.q);
        let mut coeff = [0u32; MAX_CANONICAL_LENGTH];
        let mut word = [0u32; MAX_CANONICAL_LENGTH];
        loop {
            let class: u32 = word[..n].iter().map(|&v| self.contrib[v as usize]).sum();
            if hist[class as usize] == 0 {
                touched.push(class);
            }
            hist[class as usize] += 1;
            let mut i = 0;
            loop {
                if i == self.k {
                    touched.sort_unstable();
                    let key = touched
                        .iter()
                        .map(|&c| (c, std::mem::take(&mut hist[c as usize])))
                        .collect();
                    touched.clear();
                    return key;
                }
                let g = &gens[i * n..(i + 1) * n];
                for (w, &x) in word[..n].iter_mut().zip(g) {
                    *w += x;
                    if *w >= q {
                        *w -= q;
                    }
                }
                coeff[i] += 1;
                if coeff[i] < q {
                    break;
                }
                // q additions returned the word to where it was
                coeff[i] = 0;
                i += 1;
            }
        }
    }

    fn canonical(&self, gens: &[u32]) -> u128 {
        let id = self.pack(gens);
        if let Some(&c) = self.memo.read().expect("memo lock").get(&id) {
            return c;
        }
        let rows: Vec<Vec<u32>> = gens.chunks(self.n).map(<[u32]>::to_vec).collect();
        let mut images = Vec::with_capacity(self.maps.len());
        let best = self
            .field
            .orbit_minimum(&rows, self.n, &self.maps, |img| images.push(self.pack(img)));
        let best = self.pack(&best.concat());
        let mut memo = self.memo.write().expect("memo lock");
        memo.extend(images.into_iter().map(|img| (img, best)));
        best
    }

    fn absorb(&self, gens: &[u32], table: &mut Table, hist: &mut [u32], touched: &mut Vec<u32>) {
        let key = self.key(gens, hist, touched);
        let form = self.canonical(gens);
        let bucket = table.buckets.entry(key).or_default();
        bucket.codes += 1;
        bucket.forms.insert(form);
        table.codes += 1;
    }
}

/// One slice of the family: an echelon shape with its first free entries
/// fixed.
#[derive(Clone, Debug)]
struct Partition {
    pivots: Vec<usize>,
    prefix: Vec<u32>,
}

fn partitions(q: u32, n: usize, k: usize, family: Family) -> Vec<Partition> {
    let mut out = Vec::new();
    for pivots in pivot_patterns(n, k, family) {
        let m = free_positions(n, &pivots).len().min(PREFIX_ENTRIES);
        let mut prefix = vec![0u32; m];
        loop {
            out.push(Partition {
                pivots: pivots.clone(),
                prefix: prefix.clone(),
            });
            let Some(i) = (0..m).find(|&i| prefix[i] + 1 < q) else {
                break;
            };
            prefix[i] += 1;
            prefix[..i].iter_mut().for_each(|v| *v = 0);
        }
    }
    out
}

fn scan_partition(engine: &Engine, part: &Partition) -> Table {
    let (n, q) = (engine.n, engine.q);
    let free = free_positions(n, &part.pivots);
    let mut gens = vec![0u32; engine.k * n];
    for (r, &p) in part.pivots.iter().enumerate() {
        gens[r * n + p] = 1;
    }
    for (&(r, c), &v) in free.iter().zip(&part.prefix) {
        gens[r * n + c] = v;
    }
    let rest = &free[part.prefix.len()..];
    let mut table = Table::default();
    let mut hist = vec![0u32; engine.classes];
    let mut touched = Vec::new();
    loop {
        engine.absorb(&gens, &mut table, &mut hist, &mut touched);
        let mut i = 0;
        loop {
            let Some(&(r, c)) = rest.get(i) else {
                return table;
            };
            let v = &mut gens[r * n + c];
            *v += 1;
            if *v < q {
                break;
            }
            *v = 0;
            i += 1;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    q: u32,
    n: usize,
    k: usize,
    family: Family,
    completed: usize,
    codes_examined: u64,
    buckets: Vec<CheckpointBucket>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointBucket {
    key: DistKey,
    codes: u64,
    forms: Vec<String>,
}

impl Checkpoint {
    fn load(
        path: &Path,
        params: &SearchParams,
    ) -> Result<Option<(usize, u64, BTreeMap<DistKey, Bucket>)>> {
        if !path.exists() {
            return Ok(None);
        }
        let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
        if (cp.q, cp.n, cp.k, cp.family) != (params.q, params.n, params.k, params.family) {
            return Err(Error::invalid(format!(
                "checkpoint {} belongs to a different search",
                path.display()
            )));
        }
        let mut buckets = BTreeMap::new();
        for b in cp.buckets {
            let forms = b
                .forms
                .iter()
                .map(|f| {
                    f.parse::<u128>()
                        .map_err(|_| Error::invalid("corrupt checkpoint form"))
                })
                .collect::<Result<_>>()?;
            buckets.insert(
                b.key,
                Bucket {
                    codes: b.codes,
                    forms,
                },
            );
        }
        Ok(Some((cp.completed, cp.codes_examined, buckets)))
    }

    fn save(
        path: &Path,
        params: &SearchParams,
        completed: usize,
        codes: u64,
        buckets: &BTreeMap<DistKey, Bucket>,
    ) -> Result<()> {
        let cp = Checkpoint {
            q: params.q,
            n: params.n,
            k: params.k,
            family: params.family,
            completed,
            codes_examined: codes,
            buckets: buckets
                .iter()
                .map(|(key, b)| CheckpointBucket {
                    key: key.clone(),
                    codes: b.codes,
                    forms: b.forms.iter().map(u128::to_string).collect(),
                })
                .collect(),
        };
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&cp)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn check_min_tuple(min_tuple: usize) -> Result<()> {
    if min_tuple < 2 {
        return Err(Error::invalid(format!(
            "minimum tuple size must be at least 2, got {min_tuple}"
        )));
    }
    Ok(())
}

pub fn run_search(params: &SearchParams) -> Result<SearchReport> {
    run_search_with(params, &RunOptions::default())
}

pub fn run_search_with(params: &SearchParams, opts: &RunOptions) -> Result<SearchReport> {
    check_min_tuple(params.min_tuple)?;
    let engine = Engine::new(params.q, params.n, params.k)?;
    let parts = partitions(params.q, params.n, params.k, params.family);
    let (mut done, mut codes, mut buckets) = match &opts.checkpoint {
        Some(path) => Checkpoint::load(path, params)?.unwrap_or_default(),
        None => Default::default(),
    };
    let batch = rayon::current_num_threads().max(1) * 4;
    let mut visited = 0u64;
    while done < parts.len() {
        if visited >= opts.code_budget {
            if let Some(path) = &opts.checkpoint {
                Checkpoint::save(path, params, done, codes, &buckets)?;
            }
            return Err(Error::CapExceeded(format!(
                "stopped after {visited} codes ({done} of {} partitions); {}",
                parts.len(),
                opts.checkpoint.as_ref().map_or_else(
                    || "no checkpoint file was given".to_string(),
                    |p| format!("resume from checkpoint {}", p.display())
                )
            )));
        }
        let end = (done + batch).min(parts.len());
        let tables: Vec<Table> = parts[done..end]
            .par_iter()
            .map(|p| scan_partition(&engine, p))
            .collect();
        for t in tables {
            let n = t.merge_into(&mut buckets);
            codes += n;
            visited += n;
        }
        done = end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint::save(path, params, done, codes, &buckets)?;
        }
    }
    finish(&engine, params.clone(), codes, buckets, opts)
}

/// Runs the pipeline on an explicit list of codes of equal `q`, `n`, rank.
pub fn search_codes(
    codes: &[LinearCode],
    min_tuple: usize,
    opts: &RunOptions,
) -> Result<SearchReport> {
    check_min_tuple(min_tuple)?;
    let Some(first) = codes.first() else {
        let params = SearchParams {
            q: 2,
            n: 0,
            k: 0,
            family: Family::All,
            min_tuple,
        };
        return Ok(SearchReport {
            params,
            codes_examined: 0,
            classes: 0,
            collisions: Vec::new(),
            tuples: Vec::new(),
        });
    };
    let (q, n, k) = (first.modulus(), first.length(), first.rank());
    if codes
        .iter()
        .any(|c| (c.modulus(), c.length(), c.rank()) != (q, n, k))
    {
        return Err(Error::invalid("codes must share modulus, length and rank"));
    }
    let engine = Engine::new(q, n, k)?;
    let tables: Vec<Table> = codes
        .par_chunks(1024)
        .map(|chunk| {
            let mut table = Table::default();
            let mut hist = vec![0u32; engine.classes];
            let mut touched = Vec::new();
            for c in chunk {
                engine.absorb(
                    &c.generators().concat(),
                    &mut table,
                    &mut hist,
                    &mut touched,
                );
            }
            table
        })
        .collect();
    let mut buckets = BTreeMap::new();
    let mut total = 0;
    for t in tables {
        total += t.merge_into(&mut buckets);
    }
    let params = SearchParams {
        q,
        n,
        k,
        family: Family::All,
        min_tuple,
    };
    finish(&engine, params, total, buckets, opts)
}

fn finish(
    engine: &Engine,
    params: SearchParams,
    codes_examined: u64,
    buckets: BTreeMap<DistKey, Bucket>,
    opts: &RunOptions,
) -> Result<SearchReport> {
    let classes = buckets
        .values()
        .flat_map(|b| b.forms.iter())
        .collect::<BTreeSet<_>>()
        .len();
    let mut collisions: Vec<CollisionBucket> = buckets
        .iter()
        .filter(|(_, b)| b.forms.len() >= 2)
        .map(|(key, b)| CollisionBucket {
            distribution: engine.decode(key),
            codes: b.codes,
            canonical_forms: b.forms.iter().map(|&f| engine.unpack(f)).collect(),
        })
        .collect();
    collisions.sort_by(|a, b| a.canonical_forms.cmp(&b.canonical_forms));
    let tuples: Vec<Option<CollisionTuple>> = collisions
        .par_iter()
        .filter(|c| c.canonical_forms.len() >= params.min_tuple)
        .map(|c| tuple_from_bucket(&c.canonical_forms, params.min_tuple, opts))
        .collect::<Result<_>>()?;
    Ok(SearchReport {
        params,
        codes_examined,
        classes,
        collisions,
        tuples: tuples.into_iter().flatten().collect(),
    })
}

/// Keeps one code per isometry class of the lifts; `None` when fewer than
/// `min_tuple` classes remain. An inconclusive pair counts as isometric.
fn tuple_from_bucket(
    forms: &[LinearCode],
    min_tuple: usize,
    opts: &RunOptions,
) -> Result<Option<CollisionTuple>> {
    let grams: Vec<GramForm> = forms.iter().map(|c| lift(c).gram()).collect();
    if certify(&grams)?.verdict != Verdict::Isospectral {
        return Ok(None);
    }
    let search = SearchOptions {
        lambda_bound: None,
        node_budget: opts.node_budget,
    };
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..forms.len() {
        let mut fresh = true;
        for &r in &reps {
            let w = integral_equivalence_with(&grams[r], &grams[i], &search)?;
            if w.outcome != Outcome::NotEquivalent {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push(i);
        }
    }
    if reps.len() < min_tuple {
        return Ok(None);
    }
    let codes: Vec<LinearCode> = reps.iter().map(|&i| forms[i].clone()).collect();
    verify_tuple_with(&codes, opts).map(Some)
}

pub fn verify_tuple(codes: &[LinearCode]) -> Result<CollisionTuple> {
    verify_tuple_with(codes, &RunOptions::default())
}

/// Recomputes every stage for `codes`; the error names the first stage that
/// fails.
pub fn verify_tuple_with(codes: &[LinearCode], opts: &RunOptions) -> Result<CollisionTuple> {
    if codes.len() < 2 {
        return Err(Error::invalid("a tuple needs at least two codes"));
    }
    let (q, n) = (codes[0].modulus(), codes[0].length());
    if codes.iter().any(|c| c.modulus() != q || c.length() != n) {
        return Err(Error::invalid("codes must share modulus and length"));
    }
    let dists = codes
        .iter()
        .map(weight_distribution)
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = (1..codes.len()).find(|&j| dists[j] != dists[0]) {
        return Err(Error::verification(
            "weight-distribution",
            format!("codes 0 and {j} have different weight distributions"),
        ));
    }
    let canon = codes
        .iter()
        .map(canonical_monomial_form)
        .collect::<Result<Vec<_>>>()?;
    for i in 0..codes.len() {
        for j in (i + 1)..codes.len() {
            if canon[i] == canon[j] {
                return Err(Error::verification(
                    "canonical-form",
                    format!("codes {i} and {j} are monomially equivalent"),
                ));
            }
        }
    }
    let lattices: Vec<Lattice> = codes.iter().map(lift).collect();
    let grams: Vec<GramForm> = lattices.iter().map(Lattice::gram).collect();
    let certificate = certify(&grams)?;
    if certificate.verdict != Verdict::Isospectral {
        return Err(Error::verification(
            "certificate",
            format!("verdict {}", certificate.verdict),
        ));
    }
    let search = SearchOptions {
        lambda_bound: None,
        node_budget: opts.node_budget,
    };
    let pairs: Vec<(usize, usize)> = (0..codes.len())
        .flat_map(|i| ((i + 1)..codes.len()).map(move |j| (i, j)))
        .collect();
    let pairwise = pairs
        .par_iter()
        .map(|&(i, j)| {
            let witness = integral_equivalence_with(&grams[i], &grams[j], &search)?;
            if witness.outcome != Outcome::NotEquivalent {
                return Err(Error::verification(
                    "isometry",
                    format!("lattices {i} and {j}: {}", witness.verdict()),
                ));
            }
            Ok(PairOutcome { i, j, witness })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollisionTuple {
        codes: codes.to_vec(),
        lattices,
        certificate,
        pairwise,
    })
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    params: SearchParams,
    codes_examined: u64,
    classes: usize,
    collisions: usize,
    tuples: Vec<ManifestTuple>,
}

#[derive(Serialize, Deserialize)]
struct ManifestTuple {
    directory: String,
    codes: Vec<String>,
}

impl SearchReport {
    /// Writes `manifest.json` and one `tuple-NNN` directory per tuple.
    pub fn write_results(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::new();
        for (t, tuple) in self.tuples.iter().enumerate() {
            let name = format!("tuple-{:03}", t + 1);
            tuple.write_files(&dir.join(&name))?;
            entries.push(ManifestTuple {
                directory: name,
                codes: tuple.codes.iter().map(LinearCode::to_string).collect(),
            });
        }
        let manifest = Manifest {
            params: self.params.clone(),
            codes_examined: self.codes_examined,
            classes: self.classes,
            collisions: self.collisions.len(),
            tuples: entries,
        };
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        Ok(())
    }
}

impl CollisionTuple {
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (i, (c, l)) in self.codes.iter().zip(&self.lattices).enumerate() {
            let i = i + 1;
            fs::write(dir.join(format!("code-{i}.txt")), c.to_string())?;
            fs::write(dir.join(format!("lattice-{i}.txt")), l.basis().to_string())?;
            fs::write(
                dir.join(format!("gram-{i}.txt")),
                l.gram().matrix().to_string(),
            )?;
        }
        fs::write(dir.join("certificate.txt"), self.certificate.to_string())?;
        fs::write(
            dir.join("certificate.json"),
            serde_json::to_string_pretty(&self.certificate.record())? + "\n",
        )?;
        let mut pairwise = String::new();
        for p in &self.pairwise {
            pairwise.push_str(&format!("pair {} {}\n{}\n", p.i + 1, p.j + 1, p.witness));
        }
        fs::write(dir.join("pairwise.txt"), pairwise)?;
        Ok(())
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "q: {}  n: {}  k: {}  family: {}  min_tuple: {}",
            p.q, p.n, p.k, p.family, p.min_tuple
        )?;
        writeln!(f, "codes: {}", self.codes_examined)?;
        writeln!(f, "monomial classes: {}", self.classes)?;
        writeln!(f, "collisions: {}", self.collisions.len())?;
        writeln!(f, "tuples: {}", self.tuples.len())?;
        for (t, tuple) in self.tuples.iter().enumerate() {
            writeln!(f)?;
            writeln!(f, "tuple {}", t + 1)?;
            for c in &tuple.codes {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}
