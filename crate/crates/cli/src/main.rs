//! `opflab`: command-line front end for the toy-theory and representation
//! engines.
//!
//! Exit codes: 0 on success, 1 when a check fails or on I/O errors, 2 on
//! usage and parameter errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use opflab::rep::{
    born_rep_partition, branch_decompose, cache_dir_from_env, cache_files, certify_holistic,
    character_row, clear_cache_dir, dim_dj, enumerate_k_values, kronecker, pad, partitions, su_dim,
    CharacterCache, Partition, RepError, Verdict,
};
use opflab::tensor::{
    random_pure_state_with, rel_diff, symmetric_projector, ComplexMatrix, StateVector,
};
use opflab::toy::{
    canonical_measurement, convex_decomposition, figure_data, is_reduced_state, reduced_state,
    reduced_state_closed_form, verify_constraints_with, BipartiteVector, Ensemble, StarVariant,
    ToyError, ToyState, MEMBERSHIP_TOL,
};

const DEFAULT_SEED: u64 = 7;

/// Certified distance the purification witness must keep from every reduced
/// state.
const WITNESS_MARGIN: f64 = 0.02;

#[derive(Parser, Debug)]
#[command(
    name = "opflab",
    version,
    about = "Toy theories with modified measurement postulates and the representation theory behind them"
)]
struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the artifact to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the SU(d) irrep D_j^d.
    Dim {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        d: usize,
    },
    /// Kronecker coefficient g(λ, μ, ν) of the symmetric group.
    Kron {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        mu: Partition,
        #[arg(long)]
        nu: Partition,
    },
    /// Restriction of the SU(mn) irrep λ to SU(m) × SU(n).
    Branch {
        #[arg(long)]
        lambda: Partition,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Decide whether D_j^{d_a d_b} contains trivial ⊠ trivial.
    CertifyLt {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        da: usize,
        #[arg(long)]
        db: usize,
        /// Compute the multiplicity directly even when induction applies.
        #[arg(long)]
        direct: bool,
    },
    /// Achievable numbers of fiducial parameters K_d up to a limit.
    KValues {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        limit: u64,
    },
    /// Toy-theory experiments.
    #[command(subcommand)]
    Toy(ToyCommand),
    /// Character cache management.
    Cache(CacheArgs),
}

#[derive(Subcommand, Debug)]
enum ToyCommand {
    /// Run the seeded consistency suite.
    Verify {
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Drop the antisymmetric term of the ⋆-product; the unit check is
        /// then expected to fail.
        #[arg(long)]
        negative_control: bool,
    },
    /// Reduced state of a random bipartite pure state.
    Reduce {
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
    },
    /// The qubit state ½(|0⟩⟨0|⊗2 + |1⟩⟨1|⊗2) that has no purification.
    Witness {
        #[arg(long, default_value_t = MEMBERSHIP_TOL)]
        tol: f64,
    },
    /// Point clouds of the projected qubit state space.
    Figure {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Canonical mutually-unbiased-basis measurement.
    Mub {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Args, Debug)]
struct CacheArgs {
    #[arg(value_enum)]
    action: CacheAction,
    /// Degree n; required for `warm`, optional filter for `stat` and `clear`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    da: usize,
    #[arg(long, default_value_t = 3)]
    db: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CacheAction {
    Warm,
    Clear,
    Stat,
}

/// A failed run: exit code plus message for the diagnostic stream.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<RepError> for Failure {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Cache(_) | RepError::Inconsistent(_) => Self::runtime(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<ToyError> for Failure {
    fn from(e: ToyError) -> Self {
        match e {
            ToyError::NotPrime(_)
            | ToyError::InvalidArgument(_)
            | ToyError::DimensionMismatch { .. } => Self::usage(e.to_string()),
            _ => Self::runtime(e.to_string()),
        }
    }
}

/// Rendered artifact and whether the command's check passed.
struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn pass(body: String) -> Self {
        Self { body, ok: true }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: {}", e.message);
                return ExitCode::from(e.code);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let format = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Dim { j, d } => dim(*j, *d, format(Format::Text)),
        Command::Kron { lambda, mu, nu } => kron(lambda, mu, nu, format(Format::Text)),
        Command::Branch { lambda, m, n } => branch(lambda, *m, *n, format(Format::Text)),
        Command::CertifyLt { j, da, db, direct } => {
            certify(*j, *da, *db, *direct, format(Format::Text))
        }
        Command::KValues { d, limit } => k_values(*d, *limit, format(Format::Text)),
        Command::Toy(ToyCommand::Verify {
            da,
            db,
            trials,
            negative_control,
        }) => toy_verify(
            *da,
            *db,
            *trials,
            cli.seed,
            *negative_control,
            format(Format::Json),
        ),
        Command::Toy(ToyCommand::Reduce { da, db }) => {
            toy_reduce(*da, *db, cli.seed, format(Format::Json))
        }
        Command::Toy(ToyCommand::Witness { tol }) => toy_witness(*tol, format(Format::Json)),
        Command::Toy(ToyCommand::Figure { samples }) => {
            toy_figure(*samples, cli.seed, format(Format::Csv))
        }
        Command::Toy(ToyCommand::Mub { d }) => toy_mub(*d, format(Format::Text)),
        Command::Cache(args) => cache(args, format(Format::Text)),
    }
}

fn reject_csv(format: Format) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::usage("this command has no CSV output"));
    }
    Ok(())
}

fn dim(j: usize, d: usize, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    let value = dim_dj(j, d)?;
    let partition = born_rep_partition(j, d)?;
    let weyl = su_dim(&partition, d);
    let body = match format {
        Format::Json => to_json(&json!({
            "j": j,
            "d": d,
            "partition": partition,
            "dimension": value.to_string(),
        })),
        _ => format!("{value}\n"),
    };
    Ok(Outcome {
        body,
        ok: weyl == value,
    })
}

fn kron(
    lambda: &Partition,
    mu: &Partition,
    nu: &Partition,
    format: Format,
) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    let cache = CharacterCache::from_env()?;
    let value = kronecker(&cache, lambda, mu, nu)?;
    let body = match format {
        Format::Json => to_json(&json!({
            "lambda": lambda,
            "mu": mu,
            "nu": nu,
            "value": value.to_string(),
        })),
        _ => format!("{value}\n"),
    };
    Ok(Outcome::pass(body))
}

fn branch(lambda: &Partition, m: usize, n: usize, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    if m == 0 || n == 0 {
        return Err(Failure::usage("m and n must be positive"));
    }
    let cache = CharacterCache::from_env()?;
    let terms = branch_decompose(&cache, lambda, m, n)?;
    let total: BigUint = terms
        .iter()
        .map(|t| &t.multiplicity * su_dim(&t.mu, m) * su_dim(&t.nu, n))
        .sum();
    let expected = su_dim(lambda, m * n);
    let ok = total == expected;
    let body = match format {
        Format::Json => to_json(&json!({
            "lambda": lambda,
            "m": m,
            "n": n,
            "terms": terms,
            "dimension_sum": total.to_string(),
            "dimension": expected.to_string(),
            "dimension_check": ok,
        })),
        _ => {
            let mut out = String::new();
            for t in &terms {
                writeln!(
                    out,
                    "{} ⊠ {} : {}",
                    t.mu_padded, t.nu_padded, t.multiplicity
                )
                .expect("String write");
            }
            let verdict = if ok { "ok" } else { "MISMATCH" };
            writeln!(out, "dimension check: {total} = {expected} ({verdict})")
                .expect("String write");
            out
        }
    };
    Ok(Outcome { body, ok })
}

fn certify(
    j: usize,
    da: usize,
    db: usize,
    direct: bool,
    format: Format,
) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    let cache = CharacterCache::from_env()?;
    let cert = certify_holistic(&cache, j, da, db, direct)?;
    let ok = cert.holistic || cert.verdict == Verdict::LocallyTomographicQuantum;
    let body = match format {
        Format::Json => to_json(&cert),
        _ => {
            let multiplicity = cert
                .multiplicity
                .as_ref()
                .map_or_else(|| "n/a (inductive)".to_string(), ToString::to_string);
            let verdict = match cert.verdict {
                Verdict::Holistic => "holistic",
                Verdict::LocallyTomographicQuantum => "locally tomographic (quantum)",
                Verdict::NotHolistic => "not holistic",
            };
            let mut out = format!(
                "j={} d_a={} d_b={} method={:?}\nmultiplicity: {multiplicity}\nverdict: {verdict}\n",
                cert.j, cert.d_a, cert.d_b, cert.method
            )
            .to_lowercase();
            if !cert.chain.is_empty() {
                let chain: Vec<String> = cert.chain.iter().map(ToString::to_string).collect();
                writeln!(out, "chain: {}", chain.join(" -> ")).expect("String write");
            }
            out
        }
    };
    Ok(Outcome { body, ok })
}

fn k_values(d: usize, limit: u64, format: Format) -> Result<Outcome, Failure> {
    let k = enumerate_k_values(d, limit)?;
    let body = match format {
        Format::Json => to_json(&k),
        Format::Csv => {
            let mut out = String::from("k\n");
            for v in &k.values {
                writeln!(out, "{v}").expect("String write");
            }
            out
        }
        Format::Text => {
            let values: Vec<String> = k.values.iter().map(ToString::to_string).collect();
            let mut out = format!("{}\n", values.join(", "));
            if k.experimental {
                out.push_str("note: no admissibility filter is applied for d >= 3\n");
            }
            out
        }
    };
    Ok(Outcome::pass(body))
}

fn toy_verify(
    da: usize,
    db: usize,
    trials: usize,
    seed: u64,
    negative_control: bool,
    format: Format,
) -> Result<Outcome, Failure> {
    if trials == 0 {
        return Err(Failure::usage("trials must be positive"));
    }
    let variant = if negative_control {
        StarVariant::WithoutAntisymmetric
    } else {
        StarVariant::Standard
    };
    let report = verify_constraints_with(da, db, trials, seed, variant)?;
    let ok = if negative_control {
        report.get("C3-unit").is_some_and(|r| !r.pass)
    } else {
        report.all_pass
    };
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("constraint,pass,max_residual,trials\n");
            for r in &report.results {
                writeln!(
                    out,
                    "{},{},{:.6e},{}",
                    r.constraint, r.pass, r.max_residual, r.trials
                )
                .expect("String write");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "d_a={} d_b={} trials={} seed={}\n",
                report.d_a, report.d_b, report.trials, report.seed
            );
            for r in &report.results {
                let mark = if r.pass { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{mark} {:<18} max residual {:.3e}",
                    r.constraint, r.max_residual
                )
                .expect("String write");
            }
            out
        }
    };
    Ok(Outcome { body, ok })
}

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    json!(rows)
}

fn toy_reduce(da: usize, db: usize, seed: u64, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    if da == 0 || db == 0 {
        return Err(Failure::usage("local dimensions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = BipartiteVector::new(da, db, random_pure_state_with(da * db, &mut rng))?;
    let omega = reduced_state(&psi);
    let closed_form_residual = rel_diff(omega.matrix(), &reduced_state_closed_form(&psi));
    let ensemble = convex_decomposition(&omega)?;
    let decomposition_residual = rel_diff(omega.matrix(), &ensemble.doubled_matrix());
    let ok = closed_form_residual < 1e-10 && decomposition_residual < 1e-9;
    let body = match format {
        Format::Json => to_json(&json!({
            "d_a": da,
            "d_b": db,
            "seed": seed,
            "reduced_state": matrix_json(omega.matrix()),
            "closed_form_residual": closed_form_residual,
            "ensemble_size": ensemble.len(),
            "decomposition_residual": decomposition_residual,
        })),
        _ => format!(
            "d_a={da} d_b={db} seed={seed}\nclosed-form residual: {closed_form_residual:.3e}\nensemble size: {}\ndecomposition residual: {decomposition_residual:.3e}\n",
            ensemble.len()
        ),
    };
    Ok(Outcome { body, ok })
}

fn toy_witness(tol: f64, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::usage("tol must be positive"));
    }
    let ensemble = Ensemble::new(vec![
        (0.5, StateVector::basis(2, 0)),
        (0.5, StateVector::basis(2, 1)),
    ])?;
    let omega = ToyState::from_ensemble(&ensemble)?;
    let report = is_reduced_state(&omega, 2, tol)?;
    let rejected = !report.member && report.lower_bound.is_some_and(|lb| lb >= WITNESS_MARGIN);
    let body = match format {
        Format::Json => to_json(&json!({
            "state": matrix_json(omega.matrix()),
            "tol": tol,
            "member": report.member,
            "distance": report.distance,
            "lower_bound": report.lower_bound,
            "margin": WITNESS_MARGIN,
            "rejected": rejected,
        })),
        _ => {
            let lb = report
                .lower_bound
                .map_or_else(|| "none".to_string(), |v| format!("{v:.6}"));
            format!(
                "closest reduced state at distance {:.6}\ncertified lower bound: {lb}\n{}\n",
                report.distance,
                if rejected {
                    "rejected: no purification"
                } else {
                    "not rejected"
                }
            )
        }
    };
    Ok(Outcome { body, ok: rejected })
}

fn toy_figure(samples: usize, seed: u64, format: Format) -> Result<Outcome, Failure> {
    if samples == 0 {
        return Err(Failure::usage("samples must be positive"));
    }
    let data = figure_data(samples, seed);
    let body = match format {
        Format::Csv => data.to_csv(),
        Format::Json => {
            let cloud =
                |pts: &[(f64, f64)]| json!(pts.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>());
            to_json(&json!({
                "seed": seed,
                "samples": samples,
                "pure": cloud(&data.pure),
                "mixed": cloud(&data.mixed),
                "reduced": cloud(&data.reduced),
            }))
        }
        Format::Text => {
            let mut out = String::new();
            for (kind, (x, y)) in data.points() {
                writeln!(out, "{} {x:.17e} {y:.17e}", kind.as_str()).expect("String write");
            }
            out
        }
    };
    Ok(Outcome::pass(body))
}

fn toy_mub(d: usize, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    let measurement = canonical_measurement(d)?;
    let sum = measurement
        .effects()
        .iter()
        .fold(ComplexMatrix::zeros(d * d, d * d), |acc, e| {
            acc + e.matrix()
        });
    let unit_residual = rel_diff(&sum, &symmetric_projector(d));
    let traces: Vec<f64> = measurement.effects().iter().map(|e| e.trace()).collect();
    let ok = unit_residual < 1e-10;
    let body = match format {
        Format::Json => to_json(&json!({
            "d": d,
            "bases": d + 1,
            "effects": measurement.len(),
            "effect_traces": traces,
            "unit_residual": unit_residual,
        })),
        _ => format!(
            "d={d} bases={} effects={}\neffect trace: {:.6}\nunit residual: {unit_residual:.3e}\n",
            d + 1,
            measurement.len(),
            traces.first().copied().unwrap_or(0.0)
        ),
    };
    Ok(Outcome { body, ok })
}

fn cache(args: &CacheArgs, format: Format) -> Result<Outcome, Failure> {
    reject_csv(format)?;
    let dir = cache_dir_from_env();
    match args.action {
        CacheAction::Warm => {
            let n = args
                .n
                .ok_or_else(|| Failure::usage("cache warm requires --n"))?;
            let d = args.da * args.db;
            if args.da < 2 || args.db < 2 {
                return Err(Failure::usage("local dimensions must be at least 2"));
            }
            if n == 0 || n % d != 0 {
                return Err(Failure::usage(format!(
                    "n = {n} is not a positive multiple of d_a d_b = {d}"
                )));
            }
            let cache = CharacterCache::open(&dir)?;
            let classes = partitions(n, None);
            let irreps = [
                born_rep_partition(n / d, d)?,
                pad(&Partition::empty(), args.da, n)?,
                pad(&Partition::empty(), args.db, n)?,
            ];
            for lambda in &irreps {
                character_row(&cache, lambda, &classes)?;
            }
            cache.persist()?;
            let entries = cache.counts_by_degree().get(&n).copied().unwrap_or(0);
            let body = match format {
                Format::Json => to_json(&json!({
                    "dir": dir.display().to_string(),
                    "n": n,
                    "classes": classes.len(),
                    "entries": entries,
                })),
                _ => format!(
                    "n={n} classes={} entries={entries} dir={}\n",
                    classes.len(),
                    dir.display()
                ),
            };
            Ok(Outcome::pass(body))
        }
        CacheAction::Clear => {
            let removed = match args.n {
                None => clear_cache_dir(&dir)?,
                Some(n) => {
                    let mut removed = 0;
                    for (degree, path) in cache_files(&dir)? {
                        if degree == n {
                            std::fs::remove_file(&path).map_err(|e| {
                                Failure::runtime(format!("{}: {e}", path.display()))
                            })?;
                            removed += 1;
                        }
                    }
                    removed
                }
            };
            let body = match format {
                Format::Json => {
                    to_json(&json!({ "dir": dir.display().to_string(), "removed": removed }))
                }
                _ => format!("removed {removed} file(s) from {}\n", dir.display()),
            };
            Ok(Outcome::pass(body))
        }
        CacheAction::Stat => {
            let cache = CharacterCache::open(&dir)?;
            let counts: Vec<(usize, usize)> = cache
                .counts_by_degree()
                .into_iter()
                .filter(|(degree, _)| args.n.is_none_or(|n| n == *degree))
                .collect();
            let total: usize = counts.iter().map(|(_, c)| c).sum();
            let body = match format {
                Format::Json => {
                    let by_degree: serde_json::Map<String, serde_json::Value> = counts
                        .iter()
                        .map(|(n, c)| (n.to_string(), json!(c)))
                        .collect();
                    to_json(
                        &json!({ "dir": dir.display().to_string(), "total": total, "by_degree": by_degree }),
                    )
                }
                _ => {
                    let mut out = String::new();
                    for (n, c) in &counts {
                        writeln!(out, "n={n} entries={c}").expect("String write");
                    }
                    writeln!(out, "total {total}").expect("String write");
                    out
                }
            };
            Ok(Outcome::pass(body))
        }
    }
}
