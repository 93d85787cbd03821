//! Command-line surface for the process/ensemble toolkit.
//!
//! Reports are stable plain text: `key: value` lines in a fixed order per
//! subcommand, with the effective configuration echoed up front. Output is
//! byte-identical for identical inputs and seeds; the only exception is the
//! `elapsed-ms` field of `enumerate` and `sample`.
//!
//! Exit codes: 0 when the run succeeded and every checked property holds,
//! 1 when a checked property is false (e.g. the table is not a classical
//! process, the ensemble is not orthonormal, discrimination missed), and
//! 2 on malformed inputs or usage errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use qnlwe::bits;
use qnlwe::rng::child_seed;
use qnlwe::{protocols, search, Ensemble, Error, ProcessTable, StateLabel, StateVector};

#[derive(Parser)]
#[command(
    name = "qnlwe",
    version,
    about = "Verify, search and simulate Boolean multi-party processes without causal order, \
             and the product-state ensembles they induce"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a `.proc` table is a classical process without global past
    VerifyProcess {
        /// Process file (`.proc`)
        process: PathBuf,
        /// Accept a party's own input as the required signal source
        #[arg(long)]
        allow_self_signaling: bool,
    },
    /// Construct the product-state ensemble induced by a process
    BuildEnsemble {
        /// Process file (`.proc`)
        process: PathBuf,
        /// Write the `.ens` file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check exact orthonormality and the local-measurement obstruction
    CheckEnsemble {
        /// Ensemble file (`.ens`)
        ensemble: PathBuf,
    },
    /// Read the process table back off an ensemble's labels
    InvertEnsemble {
        /// Ensemble file (`.ens`)
        ensemble: PathBuf,
        /// Write the `.proc` file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure a product state in the basis induced by a process
    Measure {
        /// Process file (`.proc`)
        process: PathBuf,
        /// Product state to measure, e.g. `01+`
        #[arg(long)]
        state: String,
        /// Draw this many seeded samples instead of printing the exact
        /// distribution
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report raw weights even if the induced ensemble is not orthonormal
        #[arg(long)]
        force_nonorthonormal: bool,
    },
    /// Simulate the process's classical channel from the induced measurement
    Channel {
        /// Process file (`.proc`)
        process: PathBuf,
        /// Input word, e.g. `001` (omit with --check)
        #[arg(long, conflicts_with = "check")]
        input: Option<String>,
        /// Check all inputs for deterministic reproduction of the table
        #[arg(long)]
        check: bool,
        /// Point-mass tolerance for the faithfulness check
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Draw this many seeded runs instead of the exact distribution
        #[arg(long, default_value_t = 0, conflicts_with = "check")]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Prepare each induced-ensemble member and tally identifications
    Discriminate {
        /// Process file (`.proc`)
        process: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only run the given ensemble member
        #[arg(long)]
        secret: Option<usize>,
    },
    /// Exhaustively enumerate classical processes (n <= 3)
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Which passing set to write with --out
        #[arg(long, value_enum, default_value_t = Filter::NoGlobalPast)]
        filter: Filter,
        /// Deduplicate the written set to canonical symmetry representatives
        #[arg(long)]
        canonical: bool,
        /// Directory for `.proc` files, one per written table, named by
        /// content hash
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Examine uniformly random tables for the process properties
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Filter {
    /// All classical processes
    Classical,
    /// Classical processes where every party receives a signal from another
    NoGlobalPast,
}

impl Filter {
    fn name(self) -> &'static str {
        match self {
            Filter::Classical => "classical",
            Filter::NoGlobalPast => "no-global-past",
        }
    }
}

/// A finished run: the report text plus whether every checked property held.
struct Outcome {
    report: String,
    properties_ok: bool,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            report,
            properties_ok: true,
        }
    }

    fn failed(report: String) -> Self {
        Outcome {
            report,
            properties_ok: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.properties_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, String> {
    match command {
        Command::VerifyProcess {
            process,
            allow_self_signaling,
        } => verify_process(&process, allow_self_signaling),
        Command::BuildEnsemble { process, out } => build_ensemble(&process, out.as_deref()),
        Command::CheckEnsemble { ensemble } => check_ensemble(&ensemble),
        Command::InvertEnsemble { ensemble, out } => invert_ensemble(&ensemble, out.as_deref()),
        Command::Measure {
            process,
            state,
            samples,
            seed,
            force_nonorthonormal,
        } => measure(&process, &state, samples, seed, force_nonorthonormal),
        Command::Channel {
            process,
            input,
            check,
            tolerance,
            samples,
            seed,
        } => channel(&process, input.as_deref(), check, tolerance, samples, seed),
        Command::Discriminate {
            process,
            trials,
            seed,
            secret,
        } => discriminate(&process, trials, seed, secret),
        Command::Enumerate {
            n,
            filter,
            canonical,
            out,
            jobs,
        } => enumerate(n, filter, canonical, out.as_deref(), jobs),
        Command::Sample { n, count, seed } => sample(n, count, seed),
    }
}

fn load_process(path: &Path) -> Result<ProcessTable, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProcessTable::from_proc_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_ensemble(path: &Path) -> Result<Ensemble, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ensemble::from_ens_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn verify_process(path: &Path, allow_self: bool) -> Result<Outcome, String> {
    let omega = load_process(path)?;
    let mut report = String::new();
    let _ = writeln!(report, "command: verify-process");
    let _ = writeln!(report, "input: {}", path.display());
    let _ = writeln!(report, "allow-self-signaling: {allow_self}");
    let _ = writeln!(report, "n: {}", omega.n());

    let violation = omega.classical_process_violation();
    let is_process = violation.is_none();
    let _ = writeln!(report, "classical-process: {is_process}");
    if let Some(v) = violation {
        let _ = writeln!(report, "violating-intervention: {}", v.intervention);
        let _ = writeln!(
            report,
            "violating-fixed-points: {}",
            format_words(&v.fixed_points, omega.n())
        );
    }
    let no_global_past = omega.has_no_global_past(allow_self);
    let _ = writeln!(report, "no-global-past: {no_global_past}");
    let relation = omega.signaling_relation();
    let rows: Vec<String> = (0..omega.n()).map(|i| relation.row_string(i)).collect();
    let _ = writeln!(report, "signaling-matrix: {}", rows.join(";"));

    if is_process && no_global_past {
        Ok(Outcome::ok(report))
    } else {
        Ok(Outcome::failed(report))
    }
}

fn build_ensemble(path: &Path, out: Option<&Path>) -> Result<Outcome, String> {
    let omega = load_process(path)?;
    let ensemble = Ensemble::from_process(&omega);
    let mut content = String::new();
    let _ = writeln!(content, "# command: build-ensemble");
    let _ = writeln!(content, "# input: {}", path.display());
    let _ = writeln!(content, "# n: {}", omega.n());
    content.push_str(&ensemble.to_ens_string());
    emit_file(content, "build-ensemble", path, out, ensemble.states().len())
}

fn invert_ensemble(path: &Path, out: Option<&Path>) -> Result<Outcome, String> {
    let ensemble = load_ensemble(path)?;
    let omega = ensemble
        .to_process()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut content = String::new();
    let _ = writeln!(content, "# command: invert-ensemble");
    let _ = writeln!(content, "# input: {}", path.display());
    let _ = writeln!(content, "# n: {}", omega.n());
    content.push_str(&omega.to_proc_string());
    emit_file(content, "invert-ensemble", path, out, omega.rows())
}

fn emit_file(
    content: String,
    command: &str,
    input: &Path,
    out: Option<&Path>,
    rows: usize,
) -> Result<Outcome, String> {
    match out {
        None => Ok(Outcome::ok(content)),
        Some(out_path) => {
            fs::write(out_path, &content).map_err(|e| format!("{}: {e}", out_path.display()))?;
            let mut report = String::new();
            let _ = writeln!(report, "command: {command}");
            let _ = writeln!(report, "input: {}", input.display());
            let _ = writeln!(report, "out: {}", out_path.display());
            let _ = writeln!(report, "rows: {rows}");
            Ok(Outcome::ok(report))
        }
    }
}

fn check_ensemble(path: &Path) -> Result<Outcome, String> {
    let ensemble = load_ensemble(path)?;
    let mut report = String::new();
    let _ = writeln!(report, "command: check-ensemble");
    let _ = writeln!(report, "input: {}", path.display());
    let _ = writeln!(report, "n: {}", ensemble.n());
    let _ = writeln!(report, "states: {}", ensemble.states().len());

    let pair = ensemble.first_non_orthogonal_pair();
    let orthonormal = pair.is_none();
    let _ = writeln!(report, "orthonormal: {orthonormal}");
    if let Some((j, k)) = pair {
        let _ = writeln!(
            report,
            "non-orthogonal-pair: {},{}",
            ensemble.states()[j],
            ensemble.states()[k]
        );
    }
    let obstruction = ensemble.local_obstruction_report();
    let row: String = obstruction
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let _ = writeln!(report, "local-obstruction: {row}");
    let _ = writeln!(
        report,
        "obstruction-all-true: {}",
        obstruction.iter().all(|&b| b)
    );

    if orthonormal {
        Ok(Outcome::ok(report))
    } else {
        Ok(Outcome::failed(report))
    }
}

fn measure(
    path: &Path,
    state: &str,
    samples: u64,
    seed: u64,
    force: bool,
) -> Result<Outcome, String> {
    let omega = load_process(path)?;
    let label: StateLabel = state.parse().map_err(|e: Error| e.to_string())?;
    if label.n() != omega.n() {
        return Err(format!(
            "state has {} parties, process has {}",
            label.n(),
            omega.n()
        ));
    }
    let psi = StateVector::from_label(&label);

    let mut report = String::new();
    let _ = writeln!(report, "command: measure");
    let _ = writeln!(report, "process: {}", path.display());
    let _ = writeln!(report, "state: {label}");
    let _ = writeln!(report, "seed: {seed}");
    let _ = writeln!(report, "samples: {samples}");
    let _ = writeln!(report, "force-nonorthonormal: {force}");
    let _ = writeln!(report, "n: {}", omega.n());

    let weights = if force {
        let weights =
            protocols::measurement_weights(&omega, &psi).map_err(|e| e.to_string())?;
        let sum: f64 = weights.iter().map(|(_, p)| p).sum();
        let _ = writeln!(report, "weight-sum: {sum:.12}");
        weights
    } else {
        match protocols::measurement_distribution(&omega, &psi) {
            Ok(weights) => weights,
            Err(Error::NonOrthonormal(a, b)) => {
                let _ = writeln!(report, "orthonormal: false");
                let _ = writeln!(report, "non-orthogonal-pair: {a},{b}");
                return Ok(Outcome::failed(report));
            }
            Err(e) => return Err(e.to_string()),
        }
    };

    if samples == 0 {
        for (record, p) in &weights {
            let _ = writeln!(
                report,
                "basis={} outcome={} label={} p={p:.12}",
                bits::format_word(record.basis, omega.n()),
                bits::format_word(record.outcome, omega.n()),
                record.label
            );
        }
    } else {
        let probs: Vec<f64> = weights.iter().map(|(_, p)| *p).collect();
        let total: f64 = probs.iter().sum();
        for i in 0..samples {
            // Inverse-CDF over the raw weights; in forced mode the weights
            // are renormalized by their sum.
            let u = qnlwe::rng::SplitMix64::new(child_seed(seed, i)).next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = weights.len() - 1;
            for (idx, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = idx;
                    break;
                }
            }
            let record = &weights[chosen].0;
            let _ = writeln!(
                report,
                "sample={i} basis={} outcome={} label={}",
                bits::format_word(record.basis, omega.n()),
                bits::format_word(record.outcome, omega.n()),
                record.label
            );
        }
    }
    Ok(Outcome::ok(report))
}

fn channel(
    path: &Path,
    input: Option<&str>,
    check: bool,
    tolerance: f64,
    samples: u64,
    seed: u64,
) -> Result<Outcome, String> {
    let omega = load_process(path)?;
    let n = omega.n();

    let mut report = String::new();
    let _ = writeln!(report, "command: channel");
    let _ = writeln!(report, "process: {}", path.display());
    let input_word = match (input, check) {
        (Some(s), false) => {
            let _ = writeln!(report, "input: {s}");
            Some(bits::parse_word(s, n).map_err(|e| format!("input: {e}"))?)
        }
        (None, true) => {
            let _ = writeln!(report, "input: (all)");
            None
        }
        _ => return Err("give exactly one of --input <bits> or --check".into()),
    };
    let _ = writeln!(report, "tolerance: {tolerance:e}");
    let _ = writeln!(report, "seed: {seed}");
    let _ = writeln!(report, "samples: {samples}");
    let _ = writeln!(report, "n: {n}");

    let non_orthonormal = |report: &mut String, a: StateLabel, b: StateLabel| {
        let _ = writeln!(report, "orthonormal: false");
        let _ = writeln!(report, "non-orthogonal-pair: {a},{b}");
    };

    match input_word {
        Some(word) => {
            if samples == 0 {
                let dist = match protocols::channel_distribution(&omega, word) {
                    Ok(dist) => dist,
                    Err(Error::NonOrthonormal(a, b)) => {
                        non_orthonormal(&mut report, a, b);
                        return Ok(Outcome::failed(report));
                    }
                    Err(e) => return Err(e.to_string()),
                };
                write_channel_lines(&mut report, n, word, &dist);
            } else {
                for i in 0..samples {
                    let run = match protocols::run_channel(&omega, word, child_seed(seed, i)) {
                        Ok(run) => run,
                        Err(Error::NonOrthonormal(a, b)) => {
                            non_orthonormal(&mut report, a, b);
                            return Ok(Outcome::failed(report));
                        }
                        Err(e) => return Err(e.to_string()),
                    };
                    let _ = writeln!(
                        report,
                        "sample={i} input={} label={} output={}",
                        bits::format_word(word, n),
                        run.label,
                        bits::format_word(run.output, n)
                    );
                }
            }
            Ok(Outcome::ok(report))
        }
        None => {
            for word in 0..bits::word_count(n) as u16 {
                let dist = match protocols::channel_distribution(&omega, word) {
                    Ok(dist) => dist,
                    Err(Error::NonOrthonormal(a, b)) => {
                        non_orthonormal(&mut report, a, b);
                        return Ok(Outcome::failed(report));
                    }
                    Err(e) => return Err(e.to_string()),
                };
                write_channel_lines(&mut report, n, word, &dist);
            }
            let faithful = protocols::channel_is_faithful_with(&omega, tolerance)
                .map_err(|e| e.to_string())?;
            let _ = writeln!(report, "faithful: {}", faithful.faithful);
            if faithful.faithful {
                Ok(Outcome::ok(report))
            } else {
                Ok(Outcome::failed(report))
            }
        }
    }
}

fn write_channel_lines(
    report: &mut String,
    n: usize,
    input: u16,
    dist: &qnlwe::OutcomeDistribution,
) {
    for (out, &p) in dist.probs().iter().enumerate() {
        if p != 0.0 {
            let _ = writeln!(
                report,
                "input={} -> output={} p={p:.12}",
                bits::format_word(input, n),
                bits::format_word(out as u16, n)
            );
        }
    }
}

fn discriminate(
    path: &Path,
    trials: u64,
    seed: u64,
    secret: Option<usize>,
) -> Result<Outcome, String> {
    let omega = load_process(path)?;
    let n = omega.n();
    let mut report = String::new();
    let _ = writeln!(report, "command: discriminate");
    let _ = writeln!(report, "process: {}", path.display());
    let _ = writeln!(report, "trials: {trials}");
    let _ = writeln!(report, "seed: {seed}");
    let _ = writeln!(report, "n: {n}");

    let ensemble = Ensemble::from_process(&omega);
    if let Some((j, k)) = ensemble.first_non_orthogonal_pair() {
        let _ = writeln!(report, "orthonormal: false");
        let _ = writeln!(
            report,
            "non-orthogonal-pair: {},{}",
            ensemble.states()[j],
            ensemble.states()[k]
        );
        return Ok(Outcome::failed(report));
    }

    let secrets: Vec<usize> = match secret {
        Some(s) => {
            if s >= ensemble.states().len() {
                return Err(format!(
                    "secret index {s} out of range for {} states",
                    ensemble.states().len()
                ));
            }
            vec![s]
        }
        None => (0..ensemble.states().len()).collect(),
    };

    let mut perfect = true;
    for s in secrets {
        let mut successes = 0u64;
        for trial in 0..trials {
            let trial_seed = child_seed(seed, s as u64 * trials + trial);
            let found =
                protocols::discriminate(&omega, s, trial_seed).map_err(|e| e.to_string())?;
            if found == s {
                successes += 1;
            }
        }
        perfect &= successes == trials;
        let _ = writeln!(
            report,
            "state={} trials={trials} success={successes}",
            ensemble.states()[s]
        );
    }
    let _ = writeln!(report, "perfect: {perfect}");
    if perfect {
        Ok(Outcome::ok(report))
    } else {
        Ok(Outcome::failed(report))
    }
}

fn enumerate(
    n: usize,
    filter: Filter,
    canonical: bool,
    out: Option<&Path>,
    jobs: usize,
) -> Result<Outcome, String> {
    let report_data = search::exhaustive_search(n, jobs).map_err(|e| e.to_string())?;
    let mut report = String::new();
    let _ = writeln!(report, "command: enumerate");
    let _ = writeln!(report, "n: {n}");
    let _ = writeln!(report, "filter: {}", filter.name());
    let _ = writeln!(report, "canonical: {canonical}");
    let _ = writeln!(report, "jobs: {}", jobs.max(1));
    match out {
        Some(dir) => {
            let _ = writeln!(report, "out: {}", dir.display());
        }
        None => {
            let _ = writeln!(report, "out: (none)");
        }
    }
    let _ = writeln!(report, "total-candidates: {}", report_data.total_candidates);
    let _ = writeln!(report, "classical-processes: {}", report_data.process_count);
    let _ = writeln!(report, "no-global-past: {}", report_data.no_global_past_count);
    let _ = writeln!(
        report,
        "canonical-classes: {}",
        report_data.canonical_class_count
    );

    if let Some(dir) = out {
        let written = write_corpus(dir, n, filter, canonical).map_err(|e| e.to_string())?;
        let _ = writeln!(report, "written: {written}");
    }
    let _ = writeln!(report, "elapsed-ms: {}", report_data.elapsed.as_millis());
    Ok(Outcome::ok(report))
}

/// Streams the filtered tables into `dir`, one `.proc` file each, named by
/// the SHA-256 of the file content (so canonical representatives get their
/// canonical table hash). Returns the number of files written.
fn write_corpus(dir: &Path, n: usize, filter: Filter, canonical: bool) -> qnlwe::Result<usize> {
    let tables: Box<dyn Iterator<Item = ProcessTable>> = match filter {
        Filter::Classical => Box::new(search::enumerate_classical_processes(n)?),
        Filter::NoGlobalPast => Box::new(search::enumerate_no_global_past(n)?),
    };
    let tables: Vec<ProcessTable> = if canonical {
        let set: std::collections::BTreeSet<ProcessTable> =
            tables.map(|t| search::canonicalize(&t)).collect();
        set.into_iter().collect()
    } else {
        tables.collect()
    };
    fs::create_dir_all(dir)
        .map_err(|e| qnlwe::Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    for table in &tables {
        let content = table.to_proc_string();
        let digest = Sha256::digest(content.as_bytes());
        let name: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        let path = dir.join(format!("{name}.proc"));
        fs::write(&path, &content)
            .map_err(|e| qnlwe::Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    Ok(tables.len())
}

fn sample(n: usize, count: u64, seed: u64) -> Result<Outcome, String> {
    let report_data = search::sample_functions(n, count, seed).map_err(|e| e.to_string())?;
    let mut report = String::new();
    let _ = writeln!(report, "command: sample");
    let _ = writeln!(report, "n: {n}");
    let _ = writeln!(report, "count: {count}");
    let _ = writeln!(report, "seed: {seed}");
    let _ = writeln!(report, "examined: {}", report_data.total_candidates);
    let _ = writeln!(report, "classical-processes: {}", report_data.process_count);
    let _ = writeln!(report, "no-global-past: {}", report_data.no_global_past_count);
    let _ = writeln!(
        report,
        "canonical-classes: {}",
        report_data.canonical_class_count
    );
    let _ = writeln!(report, "retained: {}", report_data.representatives.len());
    let _ = writeln!(report, "elapsed-ms: {}", report_data.elapsed.as_millis());
    Ok(Outcome::ok(report))
}

fn format_words(words: &[u16], n: usize) -> String {
    if words.is_empty() {
        return "(none)".to_string();
    }
    words
        .iter()
        .map(|&w| bits::format_word(w, n))
        .collect::<Vec<_>>()
        .join(",")
}
