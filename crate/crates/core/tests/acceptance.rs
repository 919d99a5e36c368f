//! Acceptance checks, one line per criterion. Runs without the test harness
//! so that every criterion is attempted and reported; exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use isotori::codes::{canonical_monomial_form, equal_weight_dist, lift, project, Family};
use isotori::corpus;
use isotori::decomposition::decompose;
use isotori::enumeration::{independent_ladder, rep_spectrum, shortest_vectors};
use isotori::isometry::{
    integral_equivalence, integral_equivalence_with, norm_caps, verify_witness, Outcome,
    SearchOptions,
};
use isotori::lattice::{choir_family, GramForm, Lattice};
use isotori::numeric::{hnf, int, ldl, rat, Mat, Rat};
use isotori::search::{run_search, verify_tuple, SearchParams};
use isotori::spectra::{certify, hecke_threshold, mu0, Verdict};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took <= limit, || {
        format!("{what} took {took:.1?}, limit {limit:?}")
    })?;
    Ok(took)
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn doubled(i: usize) -> GramForm {
    corpus::form(i).double().unwrap()
}

fn rep_tables() -> Check {
    let start = Instant::now();
    for i in 0..3 {
        let s = rep_spectrum(&doubled(i), &int(92)).map_err(e)?;
        for &(t, r) in corpus::REP_2Q.iter() {
            let got = s.get(&int(t as i64));
            ensure(got == Some(r), || {
                format!("2Q{} at t = {t}: {got:?}, expected {r}", i + 1)
            })?;
        }
        for (t, r) in [(0, 1), (6, 2), (14, 10), (92, 236)] {
            ensure(s.get(&int(t)) == Some(r), || {
                format!("2Q{} at t = {t}", i + 1)
            })?;
        }
    }
    let took = within(start, Duration::from_secs(10), "three spectra")?;
    Ok(format!("47 values x 3 forms exact, {took:.2?}"))
}

fn certificate_gates() -> Check {
    let start = Instant::now();
    let forms: Vec<GramForm> = (0..3).map(corpus::form).collect();
    for i in 0..3 {
        let d = doubled(i);
        ensure(d.determinant() == int(1_000_000), || {
            format!("det(2Q{}) = {}", i + 1, d.determinant())
        })?;
        ensure(d.level().map_err(e)? == 100, || {
            format!("level(2Q{})", i + 1)
        })?;
        ensure(hecke_threshold(&d).map_err(e)? == int(92), || {
            format!("threshold(2Q{})", i + 1)
        })?;
    }
    ensure(mu0(100).map_err(e)? == 180, || "mu0(100) != 180".into())?;
    let cert = certify(&forms).map_err(e)?;
    ensure(cert.verdict == Verdict::Isospectral, || {
        format!("verdict {}", cert.verdict)
    })?;
    ensure(cert.dets.iter().all(|d| *d == int(1_000_000)), || {
        "certificate dets".into()
    })?;
    ensure(cert.levels.iter().all(|l| *l == Some(100)), || {
        "certificate levels".into()
    })?;
    let took = within(start, Duration::from_secs(30), "certificate")?;
    Ok(format!(
        "det 10^6, level 100, mu0 180, threshold 92, Isospectral, {took:.2?}"
    ))
}

fn non_isometry() -> Check {
    let start = Instant::now();
    let forms: Vec<GramForm> = (0..3).map(corpus::form).collect();
    let mut nodes = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let w = integral_equivalence(&forms[i], &forms[j]).map_err(e)?;
        ensure(w.outcome == Outcome::NotEquivalent, || {
            format!("Q{} vs Q{}: {}", i + 1, j + 1, w.verdict())
        })?;
        nodes.push(w.stats.nodes);
    }
    let lambda = rat(corpus::PRINTED_LAMBDA.0, corpus::PRINTED_LAMBDA.1);
    let expected = [
        rat(5600, 263),
        rat(2800, 263),
        rat(1200, 263),
        rat(10000, 263),
        rat(10000, 263),
        rat(10000, 263),
    ];
    let caps = norm_caps(&forms[0], &forms[1], &lambda).map_err(e)?;
    ensure(caps == expected, || format!("caps {caps:?}"))?;
    let opts = SearchOptions {
        lambda_bound: Some(lambda),
        node_budget: None,
    };
    let w = integral_equivalence_with(&forms[0], &forms[1], &opts).map_err(e)?;
    let shown: Vec<String> = expected.iter().map(|c| c.to_string()).collect();
    ensure(w.stats.caps == shown, || {
        format!("reported caps {:?}", w.stats.caps)
    })?;
    ensure(w.outcome == Outcome::NotEquivalent, || {
        "search with printed bound".into()
    })?;
    let took = within(start, Duration::from_secs(300), "isometry searches")?;
    Ok(format!(
        "3 pairs NotEquivalent (nodes {nodes:?}), caps {}, {took:.2?}",
        shown.join(" ")
    ))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let b = Mat::from_ints(&rows);
        if b.determinant().unwrap().abs() == int(1) {
            return b;
        }
    }
}

fn positive_control() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let q1 = corpus::form(0);
    let start = Instant::now();
    for trial in 0..20 {
        let b = random_unimodular(&mut rng, 6);
        let q2 = q1.transform(&b).map_err(e)?;
        let w = integral_equivalence(&q1, &q2).map_err(e)?;
        let found = w
            .witness()
            .ok_or_else(|| format!("trial {trial}: {}", w.verdict()))?;
        verify_witness(&q1, &q2, found).map_err(e)?;
        let back = found
            .transpose()
            .mul(q1.matrix())
            .and_then(|m| m.mul(found))
            .map_err(e)?;
        ensure(&back == q2.matrix(), || {
            format!("trial {trial}: BᵀQ₁B ≠ Q₂")
        })?;
        ensure(found.determinant().map_err(e)?.abs() == int(1), || {
            format!("trial {trial}: |det B| ≠ 1")
        })?;
    }
    Ok(format!(
        "20 conjugates, 20 verified witnesses, {:.2?}",
        start.elapsed()
    ))
}

/// Reference vectors of the independence ladder of `L_1`, up to sign.
const REFERENCE_LADDER: [(i64, &[[i64; 6]]); 6] = [
    (3, &[[0, 0, 1, 0, 1, 1]]),
    (4, &[[1, 0, -1, 1, 1, 0]]),
    (5, &[[0, 1, -1, 1, -1, 1]]),
    (7, &[[2, -1, 0, 1, -1, 0], [1, -1, 1, 0, -2, 0]]),
    (8, &[[1, 0, 1, 2, 1, -1]]),
    (10, &[[2, 1, 1, -2, 0, 0]]),
];

fn canonical(v: &[Rat]) -> Vec<Rat> {
    let flip = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    v.iter()
        .map(|x| if flip { -x } else { x.clone() })
        .collect()
}

fn irreducibility() -> Check {
    let start = Instant::now();
    for i in 0..3 {
        let l = corpus::lattice(i);
        let d = decompose(&l).map_err(e)?;
        ensure(d.components.len() == 1, || {
            format!("L{} has {} components", i + 1, d.components.len())
        })?;
        ensure(d.certificate.generation == Mat::identity(6), || {
            format!("L{} generation", i + 1)
        })?;
        ensure(
            d.certificate.determinant_product == l.gram().determinant(),
            || format!("L{} determinant", i + 1),
        )?;
        let o = &d.certificate.orthogonality;
        ensure(
            o.is_symmetric() && o.determinant().map_err(e)? == l.gram().determinant(),
            || format!("L{} orthogonality", i + 1),
        )?;
    }
    let l1 = corpus::lattice(0);
    let ladder = independent_ladder(&l1, 6).map_err(e)?;
    let norms: Vec<Rat> = ladder.iter().map(|s| s.norm.clone()).collect();
    let want: Vec<Rat> = REFERENCE_LADDER.iter().map(|(n, _)| int(*n)).collect();
    ensure(norms == want, || format!("stage norms {norms:?}"))?;
    ensure(ladder[3].vectors.len() == 2, || {
        format!("norm 7 stage has {} pairs", ladder[3].vectors.len())
    })?;
    let mut mismatches = Vec::new();
    for (stage, (norm, printed)) in ladder.iter().zip(REFERENCE_LADDER.iter()) {
        let mut expected: Vec<Vec<Rat>> = printed
            .iter()
            .map(|v| canonical(&v.iter().map(|&x| int(x)).collect::<Vec<_>>()))
            .collect();
        expected.sort();
        if stage.vectors != expected {
            let member: Vec<bool> = expected
                .iter()
                .map(|v| l1.contains(v).unwrap_or(false))
                .collect();
            let fmt = |vs: &[Vec<Rat>]| {
                vs.iter()
                    .map(|v| {
                        format!(
                            "({})",
                            v.iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            mismatches.push(format!(
                "norm {norm}: found ±{} but the list has ±{} (in L1: {member:?})",
                fmt(&stage.vectors),
                fmt(&expected)
            ));
        }
    }
    let took = within(start, Duration::from_secs(120), "decompositions and ladder")?;
    if mismatches.is_empty() {
        Ok(format!(
            "one component each, ladder 3 4 5 7 8 10 matches, {took:.2?}"
        ))
    } else {
        Err(format!(
            "one component each and norms 3 4 5 7 8 10 agree; vector list differs: {}",
            mismatches.join("; ")
        ))
    }
}

fn code_round_trip() -> Check {
    let codes = (0..3)
        .map(|i| project(&corpus::lattice(i), 5))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    for (i, c) in codes.iter().enumerate() {
        ensure(c.size() == Some(125), || {
            format!("|C{}| = {:?}", i + 1, c.size())
        })?;
        let l = lift(c);
        ensure(l.same_lattice(&corpus::lattice(i)).map_err(e)?, || {
            format!("lift of C{} differs from L{}", i + 1, i + 1)
        })?;
        ensure(l.determinant() * int(125) == int(5i64.pow(6)), || {
            format!("det·|C{}| ≠ 5^6", i + 1)
        })?;
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        ensure(equal_weight_dist(&codes[i], &codes[j]).map_err(e)?, || {
            format!("C{} and C{} distributions differ", i + 1, j + 1)
        })?;
    }
    Ok("|C| = 125, equal distributions, lifts recover L1 L2 L3, det·|C| = 5^6".into())
}

fn discovery() -> Check {
    let start = Instant::now();
    let params = SearchParams {
        q: 5,
        n: 6,
        k: 3,
        family: Family::Systematic,
        min_tuple: 3,
    };
    let report = run_search(&params).map_err(e)?;
    ensure(!report.tuples.is_empty(), || "no tuple emitted".into())?;
    for t in &report.tuples {
        ensure(t.codes.len() >= 3, || "tuple smaller than 3".into())?;
        verify_tuple(&t.codes).map_err(e)?;
    }
    let canon = (0..3)
        .map(|i| canonical_monomial_form(&project(&corpus::lattice(i), 5).unwrap()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let hit = report
        .collisions
        .iter()
        .any(|b| canon.iter().all(|c| b.canonical_forms.contains(c)));
    ensure(hit, || {
        "no collision bucket holds the three corpus codes".into()
    })?;
    let took = within(start, Duration::from_secs(3600), "search")?;
    Ok(format!(
        "{} codes, {} collisions, {} verified tuples, corpus bucket found, {took:.1?} on {} threads",
        report.codes_examined,
        report.collisions.len(),
        report.tuples.len(),
        rayon::current_num_threads()
    ))
}

fn random_form(rng: &mut ChaCha8Rng, n: usize) -> Option<GramForm> {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-5..=5);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    GramForm::new(Mat::from_ints(&rows)).ok()
}

fn inverse_diag_f64(q: &GramForm, i: usize) -> f64 {
    q.matrix().inverse().unwrap().get(i, i).to_f64().unwrap()
}

/// Counts `x` in the bounding box of `xᵀqx ≤ bound` directly.
fn box_counts(q: &GramForm, bound: i64) -> Vec<u64> {
    let n = q.dimension();
    let radius: Vec<i64> = (0..n)
        .map(|i| (bound as f64 * inverse_diag_f64(q, i)).sqrt().floor() as i64 + 1)
        .collect();
    let m: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| q.matrix().get(i, j).to_integer().to_i64().unwrap())
                .collect()
        })
        .collect();
    let mut counts = vec![0u64; bound as usize + 1];
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        let norm: i64 = (0..n)
            .map(|i| (0..n).map(|j| x[i] * m[i][j] * x[j]).sum::<i64>())
            .sum();
        if norm <= bound {
            counts[norm as usize] += 1;
        }
        let Some(i) = (0..n).find(|&i| x[i] < radius[i]) else {
            return counts;
        };
        x[i] += 1;
        for (xj, rj) in x[..i].iter_mut().zip(&radius) {
            *xj = -rj;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn leibniz(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    permutations(n)
        .iter()
        .map(|p| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            sign * (0..n).map(|i| m[i][p[i]]).product::<i64>()
        })
        .sum()
}

fn oracle_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut forms = 0;
    while forms < 100 {
        let n = rng.gen_range(2..=4);
        let Some(q) = random_form(&mut rng, n) else {
            continue;
        };
        let bound = rng.gen_range(0..=30);
        let s = rep_spectrum(&q, &int(bound)).map_err(e)?;
        let oracle = box_counts(&q, bound);
        for (t, &want) in oracle.iter().enumerate() {
            let got = s.get(&int(t as i64)).unwrap_or(0);
            ensure(got == want, || {
                format!(
                    "form {:?} t = {t}: {got} vs box {want}",
                    q.matrix().string_rows()
                )
            })?;
        }
        let f = ldl(q.matrix()).map_err(e)?;
        ensure(&f.reconstruct() == q.matrix(), || {
            "LDLᵀ does not reconstruct".into()
        })?;
        forms += 1;
    }
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let m = Mat::from_ints(&rows);
        let det = m.determinant().map_err(e)?;
        ensure(det == int(leibniz(&rows)), || {
            format!("determinant of {rows:?}")
        })?;
        if det.is_zero() {
            continue;
        }
        let h = hnf(&m).map_err(e)?;
        for i in 0..n {
            for j in 0..n {
                let v = h.get(i, j);
                if j > i {
                    ensure(v.is_zero(), || "hnf not lower triangular".into())?;
                } else if j < i {
                    ensure(!v.is_negative() && v < h.get(i, i), || {
                        "hnf entry not reduced".into()
                    })?;
                }
            }
        }
        // each basis expresses the other with integer coefficients
        for (a, b) in [(&m, &h), (&h, &m)] {
            for col in b.columns() {
                let x = a.solve(&col).map_err(e)?;
                ensure(x.iter().all(|c| c.is_integer()), || {
                    format!("hnf spans a different lattice for {rows:?}")
                })?;
            }
        }
        ensure(h.determinant().map_err(e)? == det.abs(), || {
            "hnf determinant".into()
        })?;
    }
    Ok(
        "100 forms vs box oracle exact, 100 LDLᵀ, 100 determinants vs Leibniz, HNF shape and span"
            .into(),
    )
}

fn choir() -> Check {
    let start = Instant::now();
    let family = choir_family(&corpus::lattices(), 2).map_err(e)?;
    ensure(
        family.len() == 9 && family.iter().all(|l| l.dimension() == 12),
        || "family shape".into(),
    )?;
    let grams: Vec<GramForm> = family.iter().map(Lattice::gram).collect();
    let spectra = grams
        .iter()
        .map(|g| rep_spectrum(g, &int(50)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    ensure(spectra.windows(2).all(|w| w[0] == w[1]), || {
        "spectra differ up to 50".into()
    })?;
    let opts = SearchOptions {
        lambda_bound: None,
        node_budget: Some(50_000_000),
    };
    let mut exceeded = 0;
    for i in 0..9 {
        for j in (i + 1)..9 {
            match integral_equivalence_with(&grams[i], &grams[j], &opts)
                .map_err(e)?
                .outcome
            {
                Outcome::NotEquivalent => {}
                Outcome::BudgetExceeded => exceeded += 1,
                Outcome::Equivalent(_) => return Err(format!("members {i} and {j} are isometric")),
            }
        }
        ensure(start.elapsed() < Duration::from_secs(7200), || {
            "isometry budget of 2 h exhausted".into()
        })?;
    }
    if exceeded > 0 {
        let dets: Vec<Rat> = family.iter().map(Lattice::determinant).collect();
        ensure(dets.windows(2).all(|w| w[0].abs() == w[1].abs()), || {
            "determinants differ".into()
        })?;
        let shortest = family
            .iter()
            .map(shortest_vectors)
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        ensure(
            shortest
                .windows(2)
                .all(|w| w[0].norm == w[1].norm && w[0].vectors.len() == w[1].vectors.len()),
            || "shortest vectors differ".into(),
        )?;
        return Ok(format!("downgraded: spectra, dets and shortest vectors agree; {exceeded} of 36 searches over budget"));
    }
    Ok(format!(
        "9 lattices of dimension 12, spectra equal to 50, 36 pairs NotEquivalent, {:.1?}",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("representation tables", rep_tables),
        ("certificate gates", certificate_gates),
        ("non-isometry", non_isometry),
        ("positive isometry control", positive_control),
        ("irreducibility and ladder", irreducibility),
        ("code round trip", code_round_trip),
        ("discovery rerun", discovery),
        ("oracle equivalence", oracle_suites),
        ("scaled sum family", choir),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", n + 1),
            Err(detail) => {
                println!("criterion {} {name}: FAIL ({detail})", n + 1);
                failed.push(n + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
