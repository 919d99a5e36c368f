//! Isospectrality certificates for integral positive definite forms.
//!
//! Two even forms in `2k` variables with equal determinant and level `N`
//! share every representation number once they agree for all
//! `0 ≤ t ≤ μ₀(N)·k/6 + 2` (Hecke). [`certify`] brings arbitrary integral
//! forms into that setting (doubling to make them even, `Q ⊕ Q` for odd
//! dimension) and compares the spectra over every integer `t` in range.

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::{rep_spectrum, RepSpectrum, SpectrumRecord};
use crate::error::{Error, Result};
use crate::lattice::GramForm;
use crate::numeric::{floor, int, Rat};

/// `N ∏_{p | N} (1 + 1/p)`, the index of `Γ₀(N)` in `SL₂(ℤ)`.
pub fn mu0(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("mu0 needs a positive integer"));
    }
    let mut rest = n;
    let mut out = n as u128;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            out = out / p as u128 * (p as u128 + 1);
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        out = out / rest as u128 * (rest as u128 + 1);
    }
    u64::try_from(out).map_err(|_| Error::CapExceeded("mu0 overflows 64 bits".into()))
}

/// `μ₀(N_q)·k/6 + 2` for an even form in `2k` variables.
pub fn hecke_threshold(q: &GramForm) -> Result<Rat> {
    if !q.is_even() {
        return Err(Error::NotEven);
    }
    let n = q.dimension();
    if n % 2 == 1 {
        return Err(Error::dim(format!(
            "Hecke threshold needs an even number of variables, got {n}"
        )));
    }
    let k = (n / 2) as i64;
    let m = mu0(q.level()?)?;
    Ok(Rat::from_integer(m.into()) * int(k) / int(6) + int(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Isospectral,
    NotIsospectral,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Isospectral => "Isospectral",
            Verdict::NotIsospectral => "NotIsospectral",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Stop comparing at this `t` even when the threshold is higher; the
    /// verdict is then at best [`Verdict::Inconclusive`].
    pub max_t: Option<Rat>,
    /// How far to scan when the theorem does not apply (level mismatch) and
    /// for the raw-spectrum cross-check of odd dimensional inputs.
    pub fallback_cap: Rat,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            max_t: None,
            fallback_cap: int(60),
        }
    }
}

/// Outcome of [`certify`]. Determinant, level, threshold and spectra refer to
/// the normalized forms that were actually compared (see `doubled` and
/// `summed`).
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub verdict: Verdict,
    /// Inputs were replaced by `2Q` to make them even.
    pub doubled: bool,
    /// Odd dimension: inputs were replaced by `Q ⊕ Q`.
    pub summed: bool,
    pub dets: Vec<Rat>,
    pub levels: Vec<Option<u64>>,
    pub threshold: Option<Rat>,
    /// Largest `t` compared.
    pub compared_up_to: Rat,
    pub compared_spectra: Vec<RepSpectrum>,
    pub first_discrepancy: Option<Rat>,
    pub notes: Vec<String>,
}

impl IsoCertificate {
    pub fn det(&self) -> &Rat {
        &self.dets[0]
    }

    pub fn level(&self) -> Option<u64> {
        self.levels[0]
    }

    /// Comparison table, `t` then one count column per form.
    pub fn table_tsv(&self) -> String {
        let mut out = String::from("t");
        for i in 0..self.compared_spectra.len() {
            out.push_str(&format!("\tR{}", i + 1));
        }
        out.push('\n');
        if let Some(first) = self.compared_spectra.first() {
            for (t, _) in first.entries() {
                out.push_str(&t.to_string());
                for s in &self.compared_spectra {
                    out.push_str(&format!("\t{}", s.get(&t).unwrap_or(0)));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            verdict: self.verdict,
            doubled: self.doubled,
            summed: self.summed,
            dets: self.dets.iter().map(|d| d.to_string()).collect(),
            levels: self.levels.clone(),
            threshold: self.threshold.as_ref().map(|t| t.to_string()),
            compared_up_to: self.compared_up_to.to_string(),
            first_discrepancy: self.first_discrepancy.as_ref().map(|t| t.to_string()),
            notes: self.notes.clone(),
            spectra: self
                .compared_spectra
                .iter()
                .map(SpectrumRecord::from)
                .collect(),
        }
    }
}

/// Machine-readable form of an [`IsoCertificate`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateRecord {
    pub verdict: Verdict,
    pub doubled: bool,
    pub summed: bool,
    pub dets: Vec<String>,
    pub levels: Vec<Option<u64>>,
    pub threshold: Option<String>,
    pub compared_up_to: String,
    pub first_discrepancy: Option<String>,
    pub notes: Vec<String>,
    pub spectra: Vec<SpectrumRecord>,
}

impl fmt::Display for IsoCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "doubled: {}", self.doubled)?;
        writeln!(f, "summed: {}", self.summed)?;
        let dets: Vec<String> = self.dets.iter().map(|d| d.to_string()).collect();
        writeln!(f, "det: {}", dets.join(" "))?;
        let levels: Vec<String> = self
            .levels
            .iter()
            .map(|l| opt(l.map(|v| v.to_string())))
            .collect();
        writeln!(f, "level: {}", levels.join(" "))?;
        writeln!(
            f,
            "threshold: {}",
            opt(self.threshold.as_ref().map(|t| t.to_string()))
        )?;
        writeln!(f, "compared_up_to: {}", self.compared_up_to)?;
        writeln!(
            f,
            "first_discrepancy: {}",
            opt(self.first_discrepancy.as_ref().map(|t| t.to_string()))
        )?;
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        writeln!(f)?;
        write!(f, "{}", self.table_tsv())
    }
}

fn spectra_up_to(forms: &[GramForm], bound: &Rat) -> Result<Vec<RepSpectrum>> {
    forms.par_iter().map(|q| rep_spectrum(q, bound)).collect()
}

fn first_discrepancy(spectra: &[RepSpectrum]) -> Option<Rat> {
    spectra[1..]
        .iter()
        .filter_map(|s| spectra[0].first_difference(s))
        .min()
}

pub fn certify(forms: &[GramForm]) -> Result<IsoCertificate> {
    certify_with(forms, &CertifyOptions::default())
}

pub fn certify_with(forms: &[GramForm], opts: &CertifyOptions) -> Result<IsoCertificate> {
    if forms.len() < 2 {
        return Err(Error::invalid("certify needs at least two forms"));
    }
    let n = forms[0].dimension();
    if forms.iter().any(|q| q.dimension() != n) {
        return Err(Error::dim("forms have different dimensions"));
    }
    for q in forms {
        if !q.is_integral() {
            let m = q.matrix();
            let (row, col) = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| !m.get(i, j).is_integer())
                .expect("some entry is fractional");
            return Err(Error::NonIntegral { row, col });
        }
    }
    let mut notes = Vec::new();
    let mut work: Vec<GramForm> = forms.to_vec();
    let doubled = work.iter().any(|q| !q.is_even());
    if doubled {
        work = work.iter().map(|q| q.double()).collect::<Result<_>>()?;
        notes.push("inputs not all even: comparing 2Q, R(2Q, 2t) = R(Q, t)".into());
    }

    let summed = n % 2 == 1;
    if summed {
        // Q ⊕ Q determines Q's theta series (unique square root with
        // constant term 1); the raw spectra are compared too as a cross-check
        let raw = spectra_up_to(&work, &opts.fallback_cap)?;
        let dets: Vec<Rat> = work.iter().map(|q| q.determinant()).collect();
        if let Some(t) = first_discrepancy(&raw) {
            notes.push(format!(
                "odd dimension: raw spectra differ at t = {t} before summing"
            ));
            return Ok(IsoCertificate {
                verdict: Verdict::NotIsospectral,
                doubled,
                summed: false,
                levels: work.iter().map(|q| q.level().ok()).collect(),
                dets,
                threshold: None,
                compared_up_to: opts.fallback_cap.clone(),
                compared_spectra: raw,
                first_discrepancy: Some(t),
                notes,
            });
        }
        work = work.iter().map(|q| q.direct_sum(q)).collect();
        notes.push("odd dimension: comparing Q ⊕ Q".into());
    }

    let dets: Vec<Rat> = work.iter().map(|q| q.determinant()).collect();
    let levels: Vec<Option<u64>> = work.iter().map(|q| q.level().ok()).collect();
    let mut cert = IsoCertificate {
        verdict: Verdict::Inconclusive,
        doubled,
        summed,
        dets: dets.clone(),
        levels: levels.clone(),
        threshold: None,
        compared_up_to: Rat::zero(),
        compared_spectra: Vec::new(),
        first_discrepancy: None,
        notes,
    };

    if dets.iter().any(|d| d != &dets[0]) {
        cert.verdict = Verdict::NotIsospectral;
        cert.notes
            .push("determinants differ: the spectrum fixes the covolume (Weyl asymptotics)".into());
        return Ok(cert);
    }

    if levels.iter().any(|l| l != &levels[0]) {
        let cap = opts.max_t.clone().map_or(opts.fallback_cap.clone(), |m| {
            m.min(opts.fallback_cap.clone())
        });
        let spectra = spectra_up_to(&work, &cap)?;
        cert.first_discrepancy = first_discrepancy(&spectra);
        cert.verdict = if cert.first_discrepancy.is_some() {
            Verdict::NotIsospectral
        } else {
            Verdict::Inconclusive
        };
        cert.notes.push(format!(
            "levels differ, the threshold theorem does not apply; scanned up to t = {cap}"
        ));
        cert.compared_up_to = cap;
        cert.compared_spectra = spectra;
        return Ok(cert);
    }

    let threshold = hecke_threshold(&work[0])?;
    cert.threshold = Some(threshold.clone());
    let full = Rat::from_integer(floor(&threshold));
    let limit = match &opts.max_t {
        Some(m) if *m < full => m.clone(),
        _ => full.clone(),
    };
    let spectra = spectra_up_to(&work, &limit)?;
    cert.first_discrepancy = first_discrepancy(&spectra);
    cert.verdict = match (&cert.first_discrepancy, limit == full) {
        (Some(_), _) => Verdict::NotIsospectral,
        (None, true) => Verdict::Isospectral,
        (None, false) => {
            cert.notes.push(format!(
                "spectra agree up to t = {limit} only; threshold {threshold} not reached"
            ));
            Verdict::Inconclusive
        }
    };
    cert.compared_up_to = limit;
    cert.compared_spectra = spectra;
    Ok(cert)
}
