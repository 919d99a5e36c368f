//! End-to-end check of the compiled-in triplet: isospectrality,
//! non-isometry, irreducibility and the code round trip.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::codes::{equal_weight_dist, lift, project};
use crate::corpus;
use crate::decomposition::decompose;
use crate::error::Result;
use crate::isometry::{integral_equivalence, Outcome};
use crate::lattice::{GramForm, Lattice};
use crate::numeric::{int, Mat, Rat};
use crate::spectra::{certify_with, CertifyOptions, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletReport {
    pub stages: Vec<Stage>,
}

impl TripletReport {
    pub fn all_pass(&self) -> bool {
        self.stages.iter().all(|s| s.status == Status::Pass)
    }

    pub fn first_failure(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| s.status == Status::Fail)
    }
}

impl fmt::Display for TripletReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            writeln!(f, "{}: {} ({})", s.name, s.status, s.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct TripletOptions {
    /// Compare spectra only up to this `t`.
    pub max_t: Option<Rat>,
    /// Replace the third basis by a perturbed copy.
    pub perturb: bool,
}

/// The triplet with the last diagonal entry of the third basis raised by one,
/// which changes its determinant.
pub fn perturbed_bases() -> Vec<Mat> {
    let mut bases: Vec<Mat> = (0..3).map(corpus::basis).collect();
    let shifted = bases[2].get(5, 5) + int(1);
    bases[2].set(5, 5, shifted);
    bases
}

pub fn check_triplet(opts: &TripletOptions) -> Result<TripletReport> {
    let bases = if opts.perturb {
        perturbed_bases()
    } else {
        (0..3).map(corpus::basis).collect()
    };
    check_bases(&bases, corpus::MODULUS as u32, opts.max_t.clone())
}

pub fn check_bases(bases: &[Mat], q: u32, max_t: Option<Rat>) -> Result<TripletReport> {
    let lattices = bases
        .iter()
        .map(|b| Lattice::new(b.clone()))
        .collect::<Result<Vec<_>>>()?;
    let grams: Vec<GramForm> = lattices.iter().map(Lattice::gram).collect();
    let stages = vec![
        isospectrality(&grams, max_t)?,
        non_isometry(&grams)?,
        irreducibility(&lattices)?,
        round_trip(&lattices, q)?,
    ];
    Ok(TripletReport { stages })
}

fn stage(name: &str, status: Status, detail: String) -> Stage {
    Stage {
        name: name.to_string(),
        status,
        detail,
    }
}

fn isospectrality(grams: &[GramForm], max_t: Option<Rat>) -> Result<Stage> {
    let opts = CertifyOptions {
        max_t,
        ..CertifyOptions::default()
    };
    let cert = certify_with(grams, &opts)?;
    let status = match cert.verdict {
        Verdict::Isospectral => Status::Pass,
        Verdict::NotIsospectral => Status::Fail,
        Verdict::Inconclusive => Status::Inconclusive,
    };
    let mut detail = format!("{} up to t = {}", cert.verdict, cert.compared_up_to);
    if let Some(t) = &cert.first_discrepancy {
        detail.push_str(&format!(", first difference at t = {t}"));
    }
    if let (Some(level), Some(threshold)) = (cert.level(), &cert.threshold) {
        detail.push_str(&format!(
            ", det {}, level {level}, threshold {threshold}",
            cert.det()
        ));
    }
    Ok(stage("isospectrality", status, detail))
}

fn non_isometry(grams: &[GramForm]) -> Result<Stage> {
    let mut verdicts = Vec::new();
    let mut status = Status::Pass;
    for i in 0..grams.len() {
        for j in (i + 1)..grams.len() {
            let w = integral_equivalence(&grams[i], &grams[j])?;
            match w.outcome {
                Outcome::NotEquivalent => {}
                Outcome::Equivalent(_) => status = Status::Fail,
                Outcome::BudgetExceeded if status == Status::Pass => status = Status::Inconclusive,
                Outcome::BudgetExceeded => {}
            }
            verdicts.push(format!("{}-{} {}", i + 1, j + 1, w.verdict()));
        }
    }
    Ok(stage("non-isometry", status, verdicts.join(", ")))
}

fn irreducibility(lattices: &[Lattice]) -> Result<Stage> {
    let counts = lattices
        .iter()
        .map(|l| decompose(l).map(|d| d.components.len()))
        .collect::<Result<Vec<_>>>()?;
    let status = if counts.iter().all(|&c| c == 1) {
        Status::Pass
    } else {
        Status::Fail
    };
    let counts: Vec<String> = counts.iter().map(usize::to_string).collect();
    Ok(stage(
        "irreducibility",
        status,
        format!("components {}", counts.join(" ")),
    ))
}

fn round_trip(lattices: &[Lattice], q: u32) -> Result<Stage> {
    let mut problems = Vec::new();
    let mut codes = Vec::new();
    for (i, l) in lattices.iter().enumerate() {
        let c = match project(l, q) {
            Ok(c) => c,
            Err(e) => {
                problems.push(format!("lattice {}: {e}", i + 1));
                continue;
            }
        };
        if !lift(&c).same_lattice(l)? {
            problems.push(format!("lattice {} is not the lift of its code", i + 1));
        }
        let size = c.size().and_then(|s| s.to_i64()).unwrap_or(0);
        let full = int(q as i64).pow(l.dimension() as i32);
        if lift(&c).determinant() * int(size) != full {
            problems.push(format!("lattice {}: det·|C| ≠ q^n", i + 1));
        }
        codes.push(c);
    }
    for j in 1..codes.len() {
        if !equal_weight_dist(&codes[0], &codes[j])? {
            problems.push(format!(
                "codes 1 and {} differ in weight distribution",
                j + 1
            ));
        }
    }
    let sizes: Vec<String> = codes
        .iter()
        .map(|c| c.size().map_or("?".into(), |s| s.to_string()))
        .collect();
    Ok(if problems.is_empty() {
        stage(
            "code round trip",
            Status::Pass,
            format!(
                "q = {q}, sizes {}, equal weight distributions",
                sizes.join(" ")
            ),
        )
    } else {
        stage("code round trip", Status::Fail, problems.join("; "))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_passes() {
        let r = check_triplet(&TripletOptions::default()).unwrap();
        assert!(r.all_pass(), "{r}");
        assert_eq!(r.stages.len(), 4);
        assert!(r.stages[0].detail.contains("level 100"));
    }

    #[test]
    fn partial_table_is_inconclusive() {
        let opts = TripletOptions {
            max_t: Some(int(16)),
            perturb: false,
        };
        let r = check_triplet(&opts).unwrap();
        assert_eq!(r.stages[0].status, Status::Inconclusive);
        assert!(!r.all_pass());
        assert!(r.first_failure().is_none());
    }

    #[test]
    fn perturbation_fails_isospectrality() {
        let opts = TripletOptions {
            max_t: None,
            perturb: true,
        };
        let r = check_triplet(&opts).unwrap();
        assert_eq!(r.first_failure().unwrap().name, "isospectrality", "{r}");
    }
}
