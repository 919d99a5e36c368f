//! `isotori` command-line front end.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 usage
//! or input error, 3 failed verification.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use isotori::codes::{self, Family, LinearCode};
use isotori::decomposition::{decompose, decompose_form};
use isotori::enumeration::{rep_spectrum, SpectrumRecord};
use isotori::isometry::{integral_equivalence_with, Outcome, SearchOptions};
use isotori::lattice::{GramForm, Lattice};
use isotori::numeric::{parse_rat, Mat, Rat};
use isotori::search::{run_search_with, RunOptions, SearchParams, DEFAULT_CODE_BUDGET};
use isotori::spectra::{certify_with, CertifyOptions, Verdict};
use isotori::triplet::{check_triplet, Status, TripletOptions};
use isotori::Error;

#[derive(Parser)]
#[command(
    name = "isotori",
    version,
    about = "Exact tools for flat tori, lattices and linear codes"
)]
struct Cli {
    /// Print a JSON document instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Representation numbers R(Q, t) for t up to a bound, as TSV.
    Rep {
        form: PathBuf,
        #[arg(long, value_parser = rational)]
        max: Rat,
        /// The file holds a basis; use its Gram matrix.
        #[arg(long)]
        basis: bool,
    },
    /// Certify that forms are isospectral.
    Isospec {
        #[arg(required = true, num_args = 2..)]
        forms: Vec<PathBuf>,
        /// Compare only up to this t.
        #[arg(long, value_parser = rational)]
        max_t: Option<Rat>,
        #[arg(long)]
        basis: bool,
    },
    /// Decide whether two forms are integrally equivalent.
    Isometry {
        first: PathBuf,
        second: PathBuf,
        /// Lower bound on the smallest eigenvalue of the first form.
        #[arg(long, value_parser = rational)]
        lambda: Option<Rat>,
        /// Give up after this many search nodes.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        basis: bool,
    },
    /// Split a lattice into orthogonal indecomposable components.
    Decompose {
        lattice: PathBuf,
        /// The file holds a Gram matrix rather than a basis.
        #[arg(long)]
        gram: bool,
    },
    /// Basis of the dual lattice.
    Dual { lattice: PathBuf },
    /// Construction A lattice of a code.
    Lift { code: PathBuf },
    /// Code obtained by reducing an integral lattice mod q.
    Project {
        lattice: PathBuf,
        #[arg(long)]
        q: u32,
    },
    /// Weight distributions of one or more codes.
    Weightdist {
        #[arg(required = true)]
        codes: Vec<PathBuf>,
    },
    /// Search a code family for isospectral, non-isometric lifts.
    Codesearch {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "systematic", value_parser = family)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        min_tuple: usize,
        #[arg(long)]
        out: PathBuf,
        /// Progress file; defaults to `checkpoint.json` inside the output.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stop after this many codes in one invocation.
        #[arg(long, default_value_t = DEFAULT_CODE_BUDGET)]
        code_budget: u64,
        /// Node budget for each isometry search.
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Re-check the built-in triplet end to end.
    PaperTriplet {
        #[arg(long, value_parser = rational)]
        max_t: Option<Rat>,
        /// Run on a deliberately perturbed triplet; expected to fail.
        #[arg(long)]
        self_test_negative: bool,
    },
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).ok_or_else(|| format!("`{s}` is not an integer or fraction"))
}

fn family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Negative verdicts and failed checks carry their own exit code.
enum Failure {
    Negative,
    Verification(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification { .. } => Failure::Verification(e.to_string()),
            e => Failure::Input(e),
        }
    }
}

type RunResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn read_mat(path: &Path) -> Result<Mat, Error> {
    read(path)?.parse()
}

fn read_form(path: &Path, basis: bool) -> Result<GramForm, Error> {
    let m = read_mat(path)?;
    if basis {
        Ok(Lattice::new(m)?.gram())
    } else {
        GramForm::new(m)
    }
}

fn read_code(path: &Path) -> Result<LinearCode, Error> {
    read(path)?.parse()
}

fn emit<T: Serialize>(
    json: bool,
    text: impl FnOnce() -> String,
    value: impl FnOnce() -> T,
) -> Result<(), Error> {
    if json {
        println!("{}", serde_json::to_string_pretty(&value())?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

#[derive(Serialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl From<&Mat> for MatrixRecord {
    fn from(m: &Mat) -> Self {
        MatrixRecord {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.string_rows(),
        }
    }
}

#[derive(Serialize)]
struct DistributionRecord {
    code: String,
    distribution: Vec<(Vec<u32>, u64)>,
}

#[derive(Serialize)]
struct SearchRecord {
    codes_examined: u64,
    classes: usize,
    collisions: usize,
    tuples: Vec<Vec<LinearCode>>,
    out: String,
}

fn run(cli: Cli) -> RunResult {
    let json = cli.json;
    match cli.command {
        Command::Rep { form, max, basis } => {
            let q = read_form(&form, basis)?;
            let s = rep_spectrum(&q, &max)?;
            emit(json, || s.to_tsv(), || SpectrumRecord::from(&s))?;
        }
        Command::Isospec {
            forms,
            max_t,
            basis,
        } => {
            let forms = forms
                .iter()
                .map(|p| read_form(p, basis))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = CertifyOptions {
                max_t,
                ..CertifyOptions::default()
            };
            let cert = certify_with(&forms, &opts)?;
            emit(json, || cert.to_string(), || cert.record())?;
            if cert.verdict != Verdict::Isospectral {
                return Err(Failure::Negative);
            }
        }
        Command::Isometry {
            first,
            second,
            lambda,
            budget,
            basis,
        } => {
            let q1 = read_form(&first, basis)?;
            let q2 = read_form(&second, basis)?;
            let opts = SearchOptions {
                lambda_bound: lambda,
                node_budget: budget,
            };
            let w = integral_equivalence_with(&q1, &q2, &opts)?;
            emit(json, || w.to_string(), || w.record())?;
            match w.outcome {
                Outcome::Equivalent(_) => {}
                Outcome::NotEquivalent => return Err(Failure::Negative),
                Outcome::BudgetExceeded => {
                    return Err(Failure::Input(Error::CapExceeded(format!(
                        "isometry search exceeded {} nodes",
                        budget.unwrap_or_default()
                    ))))
                }
            }
        }
        Command::Decompose { lattice, gram } => {
            let m = read_mat(&lattice)?;
            let d = if gram {
                decompose_form(&GramForm::new(m)?)?
            } else {
                decompose(&Lattice::new(m)?)?
            };
            emit(json, || d.to_string(), || d.record())?;
        }
        Command::Dual { lattice } => {
            let dual = Lattice::new(read_mat(&lattice)?)?.dual();
            emit(
                json,
                || dual.basis().to_string(),
                || MatrixRecord::from(dual.basis()),
            )?;
        }
        Command::Lift { code } => {
            let l = codes::lift(&read_code(&code)?);
            emit(
                json,
                || l.basis().to_string(),
                || MatrixRecord::from(l.basis()),
            )?;
        }
        Command::Project { lattice, q } => {
            let c = codes::project(&Lattice::new(read_mat(&lattice)?)?, q)?;
            emit(json, || c.to_string(), || c.clone())?;
        }
        Command::Weightdist { codes: paths } => {
            let codes = paths
                .iter()
                .map(|p| read_code(p))
                .collect::<Result<Vec<_>, _>>()?;
            let dists = codes
                .iter()
                .map(codes::weight_distribution)
                .collect::<Result<Vec<_>, _>>()?;
            let equal = dists.windows(2).all(|w| w[0] == w[1]);
            let text = || {
                if dists.len() == 1 {
                    return dists[0].to_string();
                }
                let mut out = String::new();
                for (p, d) in paths.iter().zip(&dists) {
                    out.push_str(&format!("# {}\n{d}", p.display()));
                }
                out.push_str(&format!("# equal: {equal}\n"));
                out
            };
            let value = || {
                paths
                    .iter()
                    .zip(&dists)
                    .map(|(p, d)| DistributionRecord {
                        code: p.display().to_string(),
                        distribution: d.rows(),
                    })
                    .collect::<Vec<_>>()
            };
            emit(json, text, value)?;
            for pair in codes.windows(2) {
                codes::equal_weight_dist(&pair[0], &pair[1])?;
            }
            if !equal {
                return Err(Failure::Negative);
            }
        }
        Command::Codesearch {
            q,
            n,
            k,
            family,
            min_tuple,
            out,
            checkpoint,
            code_budget,
            node_budget,
        } => {
            let params = SearchParams {
                q,
                n,
                k,
                family,
                min_tuple,
            };
            fs::create_dir_all(&out).map_err(Error::from)?;
            let opts = RunOptions {
                checkpoint: Some(checkpoint.unwrap_or_else(|| out.join("checkpoint.json"))),
                code_budget,
                node_budget,
            };
            let report = run_search_with(&params, &opts)?;
            report.write_results(&out)?;
            emit(
                json,
                || report.to_string(),
                || SearchRecord {
                    codes_examined: report.codes_examined,
                    classes: report.classes,
                    collisions: report.collisions.len(),
                    tuples: report.tuples.iter().map(|t| t.codes.clone()).collect(),
                    out: out.display().to_string(),
                },
            )?;
        }
        Command::PaperTriplet {
            max_t,
            self_test_negative,
        } => {
            let opts = TripletOptions {
                max_t,
                perturb: self_test_negative,
            };
            let report = check_triplet(&opts)?;
            emit(json, || report.to_string(), || report.clone())?;
            if let Some(stage) = report.first_failure() {
                return Err(Failure::Verification(format!(
                    "failing stage: {}",
                    stage.name
                )));
            }
            if report.stages.iter().any(|s| s.status != Status::Pass) {
                return Err(Failure::Negative);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
