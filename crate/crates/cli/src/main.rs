//! scharc: command-line workbench for exact supercharacter theory
//! computations on unipotent matrix groups over finite fields.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use scharc_core::cap::DEFAULT_CAP;
use scharc_core::charfun::ConjClasses;
use scharc_core::classical::{build_classical, Kind};
use scharc_core::field::Field;
use scharc_core::groups::PatternGroup;
use scharc_core::oracle::irr_table;
use scharc_core::partitions::{enumerate_fq_set_partitions, is_k_nonnesting, FqSetPartitionWire};

use scharc_cli::cache;
use scharc_cli::export;
use scharc_cli::job::{
    run, split_prime_power, CliError, Construction, GroupSel, JobSpec, DEFAULT_JOB_CAP,
};

#[derive(Parser)]
#[command(
    name = "scharc",
    about = "Exact supercharacter theories of unipotent matrix groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GroupArgs {
    /// Group kind: ut, uo, usp, or uu.
    #[arg(long, default_value = "ut")]
    group: String,
    /// Matrix size (UT_n, or the even ambient size for uo/usp/uu).
    #[arg(long)]
    n: usize,
    /// Field size, a prime power.
    #[arg(long)]
    q: u64,
    /// Enumeration cap override.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct SctArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Construction: algebra, classical, littlegroups[:k[:strategy]],
    /// nk:k, or ns:1,2.
    #[arg(long, default_value = "algebra")]
    construction: String,
    /// Split position, used by littlegroups and nk when the
    /// construction string does not carry one.
    #[arg(long)]
    k: Option<usize>,
    /// Little-groups strategy: maximal or minimal.
    #[arg(long)]
    strategy: Option<String>,
    /// Verify against the irreducible-character oracle.
    #[arg(long)]
    verify: bool,
    /// Artifact format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the artifact to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (defaults to $SCHARC_CACHE when set).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// First construction (compact form).
    #[arg(long)]
    a: String,
    /// Second construction (compact form).
    #[arg(long)]
    b: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    /// Number of points of the arc diagrams.
    #[arg(long)]
    n: usize,
    /// Field size for the arc labels.
    #[arg(long)]
    q: u64,
    /// Report the k-nonnesting flag for this split position.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a JobSpec JSON file.
    job: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a supercharacter theory and print a report.
    Sct(SctArgs),
    /// Build two theories of one group and compare their partitions.
    Compare(CompareArgs),
    /// Build a theory and verify it (sct with --verify forced).
    Verify(SctArgs),
    /// Print the full irreducible character table of the group.
    Oracle(OracleArgs),
    /// Enumerate labelled set partitions (arc diagrams).
    Partitions(PartitionArgs),
    /// Build a theory and print the serialized artifact itself.
    Export(SctArgs),
    /// Execute a JobSpec file.
    Run(RunArgs),
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Assertion(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn make_field(q: u64) -> Result<Arc<Field>, CliError> {
    let (p, degree) = split_prime_power(q)?;
    Field::new(p, degree, None).map_err(CliError::from)
}

fn job_from_args(args: &SctArgs, verify: bool) -> Result<JobSpec, CliError> {
    let mut construction = Construction::parse(&args.construction)?;
    if let Some(k) = args.k {
        construction = match construction {
            Construction::Littlegroups {
                strategy, lattice, ..
            } => Construction::Littlegroups {
                k,
                strategy,
                lattice,
            },
            Construction::Nk { .. } => Construction::Nk { k },
            other => other,
        };
    }
    if let Some(strategy) = &args.strategy {
        if let Construction::Littlegroups { k, lattice, .. } = construction {
            construction = Construction::Littlegroups {
                k,
                strategy: strategy.clone(),
                lattice,
            };
        }
    }
    Ok(JobSpec {
        group: GroupSel {
            kind: args.group.group.clone(),
            n: args.group.n,
            q: args.group.q,
        },
        construction,
        compare_with: None,
        verify: verify || args.verify,
        format: args.format.clone(),
        cap: args.group.cap,
    })
}

#[derive(Serialize)]
struct PartitionLine {
    partition: FqSetPartitionWire,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_nonnesting: Option<bool>,
}

fn cmd_sct(args: &SctArgs, verify: bool, print_artifact: bool) -> Result<(), CliError> {
    let job = job_from_args(args, verify)?;
    let dir = cache::resolve_dir(args.cache_dir.clone());
    let out = run(&job, dir.as_deref())?;
    if print_artifact {
        emit(&args.out, &out.artifact)?;
    } else {
        if args.out.is_some() {
            emit(&args.out, &out.artifact)?;
        }
        let mut doc = serde_json::to_string_pretty(&out.report).expect("report serializes");
        doc.push('\n');
        print!("{doc}");
    }
    if out.report.verify_pass == Some(false) {
        return Err(CliError::Assertion(
            "verification failed; see report".to_string(),
        ));
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let job = JobSpec {
        group: GroupSel {
            kind: args.group.group.clone(),
            n: args.group.n,
            q: args.group.q,
        },
        construction: Construction::parse(&args.a)?,
        compare_with: Some(Construction::parse(&args.b)?),
        verify: false,
        format: "json".to_string(),
        cap: args.group.cap,
    };
    let dir = cache::resolve_dir(args.cache_dir.clone());
    let out = run(&job, dir.as_deref())?;
    if args.out.is_some() {
        emit(&args.out, &out.artifact)?;
    }
    let word = out
        .report
        .comparison
        .as_deref()
        .unwrap_or("unknown")
        .to_string();
    println!("{word}");
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let cap = args.group.cap.map_or(DEFAULT_JOB_CAP, u128::from);
    let classes = match args.group.group.as_str() {
        "ut" => {
            let pg = PatternGroup::ut(args.group.n, make_field(args.group.q)?);
            ConjClasses::new(pg.enumerate_with_cap(cap)?)
        }
        kind @ ("uo" | "usp" | "uu") => {
            let ck = match kind {
                "uo" => Kind::Orthogonal,
                "usp" => Kind::Symplectic,
                _ => Kind::Unitary,
            };
            if args.group.n % 2 != 0 || args.group.n == 0 {
                return Err(CliError::Schema(format!(
                    "classical kinds need an even matrix size, got {}",
                    args.group.n
                )));
            }
            let ug = build_classical(ck, args.group.n / 2, make_field(args.group.q)?, cap)?;
            ug.u_classes.clone()
        }
        other => return Err(CliError::Schema(format!("unknown group kind {other:?}"))),
    };
    let table = irr_table(&classes)?;
    let mut doc = String::from("character");
    for c in 0..classes.num() {
        doc.push(',');
        doc.push_str(&export::code_to_string(classes.group.code(classes.rep(c))));
    }
    doc.push('\n');
    for (i, chi) in table.chars.iter().enumerate() {
        doc.push_str(&format!("irr{i}"));
        for v in &chi.values {
            doc.push(',');
            doc.push_str(&v.render());
        }
        doc.push('\n');
    }
    emit(&args.out, &doc)
}

fn cmd_partitions(args: &PartitionArgs) -> Result<(), CliError> {
    let field = make_field(args.q)?;
    let parts = enumerate_fq_set_partitions(args.n, &field, DEFAULT_CAP)?;
    let lines: Vec<PartitionLine> = parts
        .iter()
        .map(|p| PartitionLine {
            partition: p.to_wire(&field),
            k_nonnesting: args.k.map(|k| is_k_nonnesting(p, k)),
        })
        .collect();
    let mut doc = serde_json::to_string_pretty(&lines).expect("partition list serializes");
    doc.push('\n');
    emit(&args.out, &doc)?;
    eprintln!("{} partitions", parts.len());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let doc = std::fs::read_to_string(&args.job)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", args.job.display())))?;
    let job = JobSpec::from_json(&doc)?;
    let dir = cache::resolve_dir(args.cache_dir.clone());
    let out = run(&job, dir.as_deref())?;
    if args.out.is_some() {
        emit(&args.out, &out.artifact)?;
    }
    let mut report = serde_json::to_string_pretty(&out.report).expect("report serializes");
    report.push('\n');
    print!("{report}");
    if out.report.verify_pass == Some(false) {
        return Err(CliError::Assertion(
            "verification failed; see report".to_string(),
        ));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Sct(args) => cmd_sct(&args, false, false),
        Cmd::Verify(args) => cmd_sct(&args, true, false),
        Cmd::Export(args) => cmd_sct(&args, false, true),
        Cmd::Compare(args) => cmd_compare(&args),
        Cmd::Oracle(args) => cmd_oracle(&args),
        Cmd::Partitions(args) => cmd_partitions(&args),
        Cmd::Run(args) => cmd_run(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
