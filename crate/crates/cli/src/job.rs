//! Job specifications and the driver that executes them.
//!
//! A `JobSpec` names a group, a construction, and what to do with the
//! result (verify against the irreducible-character oracle, compare
//! with a second construction, export as JSON or CSV). Execution is
//! fully deterministic: the same spec always produces byte-identical
//! artifacts, which is what makes content-addressed caching sound.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use scharc_core::classical::{build_classical, sct_classical, sct_classical_littlegroups, Kind};
use scharc_core::field::Field;
use scharc_core::groups::PatternGroup;
use scharc_core::littlegroups::{LatticeDescriptor, SplitData, Strategy};
use scharc_core::oracle::irr_table;
use scharc_core::partitions::{sct_nk, sct_ns};
use scharc_core::sct::{sct_algebra_group, sct_compare, sct_verify, Comparison, SCTheory};
use scharc_core::Error;

use crate::cache;
use crate::export;

/// Default enumeration cap: generous for every desk-scale group while
/// still catching runaway requests.
pub const DEFAULT_JOB_CAP: u128 = 1 << 21;

/// Errors carrying the process exit code contract:
/// assertion failures exit 1, schema errors exit 2, cap overruns
/// exit 3.
#[derive(Debug, Clone)]
pub enum CliError {
    Assertion(String),
    Schema(String),
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Cap(m) => write!(f, "cap exceeded: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::CapExceeded { requested, cap } => {
                CliError::Cap(format!("requested {requested}, cap {cap}"))
            }
            other => CliError::Assertion(other.to_string()),
        }
    }
}

/// Which group to build. `n` is the matrix size: UT_n for the `ut`
/// kind, and the even ambient size 2m for the orthogonal, symplectic,
/// and unitary kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSel {
    pub kind: String,
    pub n: usize,
    pub q: u64,
}

/// The construction to run on the selected group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase", deny_unknown_fields)]
pub enum Construction {
    /// Two-sided orbit theory of an algebra group.
    Algebra,
    /// Little-groups build over the split at column k (`ut` kinds) or
    /// the classical little-groups build (other kinds, k ignored).
    Littlegroups {
        #[serde(default)]
        k: usize,
        #[serde(default = "default_strategy")]
        strategy: String,
        #[serde(default = "default_lattice")]
        lattice: String,
    },
    /// Direct classical theory via the Cayley transfer.
    Classical,
    /// The coarsened theory SCT(n, k) indexed by k-nonnesting
    /// labelled set partitions.
    Nk { k: usize },
    /// The join SCT(n, S) over a set of split positions.
    Ns { s: Vec<usize> },
}

fn default_strategy() -> String {
    "maximal".to_string()
}

fn default_lattice() -> String {
    "ideal".to_string()
}

impl Construction {
    /// Parses the compact command-line form: `algebra`, `classical`,
    /// `littlegroups[:k[:strategy[:lattice]]]`, `nk:k`, `ns:1,2`.
    pub fn parse(s: &str) -> Result<Construction, CliError> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or("");
        let rest: Vec<&str> = parts.collect();
        let bad = || CliError::Schema(format!("bad construction {s:?}"));
        match head {
            "algebra" if rest.is_empty() => Ok(Construction::Algebra),
            "classical" if rest.is_empty() => Ok(Construction::Classical),
            "littlegroups" if rest.len() <= 3 => {
                let k = match rest.first() {
                    Some(t) => t.parse().map_err(|_| bad())?,
                    None => 0,
                };
                let strategy = rest.get(1).map_or_else(default_strategy, |t| t.to_string());
                let lattice = rest.get(2).map_or_else(default_lattice, |t| t.to_string());
                Ok(Construction::Littlegroups {
                    k,
                    strategy,
                    lattice,
                })
            }
            "nk" if rest.len() == 1 => Ok(Construction::Nk {
                k: rest[0].parse().map_err(|_| bad())?,
            }),
            "ns" if rest.len() == 1 => {
                let s = rest[0]
                    .split(',')
                    .map(|t| t.parse().map_err(|_| bad()))
                    .collect::<Result<Vec<usize>, _>>()?;
                Ok(Construction::Ns { s })
            }
            _ => Err(bad()),
        }
    }
}

/// A complete, reproducible description of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub group: GroupSel,
    pub construction: Construction,
    #[serde(default)]
    pub compare_with: Option<Construction>,
    #[serde(default)]
    pub verify: bool,
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default)]
    pub cap: Option<u64>,
}

fn default_format() -> String {
    "json".to_string()
}

impl JobSpec {
    pub fn from_json(doc: &str) -> Result<JobSpec, CliError> {
        serde_json::from_str(doc).map_err(|e| CliError::Schema(format!("bad job spec: {e}")))
    }

    /// Canonical single-line form used for cache keys.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("job spec serializes")
    }
}

/// The run report: self-describing parameters plus the outcome of
/// every requested check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub job: JobSpec,
    pub group_order: usize,
    pub num_superclasses: usize,
    pub num_supercharacters: usize,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<String>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    pub artifact: String,
    pub from_cache: bool,
}

/// Splits a prime power q into (p, degree).
pub fn split_prime_power(q: u64) -> Result<(u64, usize), CliError> {
    if q < 2 {
        return Err(CliError::Schema(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut degree = 0;
    while rest > 1 {
        if rest % p != 0 {
            return Err(CliError::Schema(format!("{q} is not a prime power")));
        }
        rest /= p;
        degree += 1;
    }
    Ok((p, degree))
}

fn make_field(q: u64) -> Result<Arc<Field>, CliError> {
    let (p, degree) = split_prime_power(q)?;
    Field::new(p, degree, None).map_err(CliError::from)
}

fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    match s {
        "maximal" => Ok(Strategy::Maximal),
        "minimal" => Ok(Strategy::Minimal),
        other => Err(CliError::Schema(format!("bad strategy {other:?}"))),
    }
}

fn parse_lattice(s: &str) -> Result<LatticeDescriptor, CliError> {
    match s {
        "ideal" => Ok(LatticeDescriptor::IdealProduct),
        "two-sided" => Ok(LatticeDescriptor::TwoSidedIdealProduct),
        other => Err(CliError::Schema(format!("bad lattice {other:?}"))),
    }
}

/// Builds the requested theory.
pub fn build_theory(
    group: &GroupSel,
    construction: &Construction,
    cap: u128,
) -> Result<SCTheory, CliError> {
    match group.kind.as_str() {
        "ut" => {
            let field = make_field(group.q)?;
            let pg = PatternGroup::ut(group.n, field.clone());
            match construction {
                Construction::Algebra => Ok(sct_algebra_group(&pg, cap)?),
                Construction::Littlegroups {
                    k,
                    strategy,
                    lattice,
                } => {
                    let sd = SplitData::new(&pg, *k, cap)?;
                    Ok(sd.sch_build(&parse_lattice(lattice)?, parse_strategy(strategy)?)?)
                }
                Construction::Nk { k } => Ok(sct_nk(group.n, *k, field, cap)?),
                Construction::Ns { s } => Ok(sct_ns(group.n, s, field, cap)?),
                Construction::Classical => Err(CliError::Schema(
                    "the classical construction needs a uo/usp/uu group".to_string(),
                )),
            }
        }
        kind @ ("uo" | "usp" | "uu") => {
            let ck = match kind {
                "uo" => Kind::Orthogonal,
                "usp" => Kind::Symplectic,
                _ => Kind::Unitary,
            };
            if group.n % 2 != 0 || group.n == 0 {
                return Err(CliError::Schema(format!(
                    "classical kinds need an even matrix size, got {}",
                    group.n
                )));
            }
            let field = make_field(group.q)?;
            let ug = build_classical(ck, group.n / 2, field, cap)?;
            match construction {
                Construction::Classical => Ok(sct_classical(&ug)?),
                Construction::Littlegroups { .. } => Ok(sct_classical_littlegroups(&ug)?),
                other => Err(CliError::Schema(format!(
                    "construction {other:?} is not defined for classical kinds"
                ))),
            }
        }
        other => Err(CliError::Schema(format!("unknown group kind {other:?}"))),
    }
}

pub fn comparison_word(c: Comparison) -> &'static str {
    match c {
        Comparison::Equal => "equal",
        Comparison::StrictlyFiner => "strictly finer",
        Comparison::StrictlyCoarser => "strictly coarser",
        Comparison::Incomparable => "incomparable",
    }
}

fn execute(job: &JobSpec) -> Result<(Report, String), CliError> {
    let cap = job.cap.map_or(DEFAULT_JOB_CAP, u128::from);
    let theory = build_theory(&job.group, &job.construction, cap)?;
    let (verify, verify_pass) = if job.verify {
        let table = irr_table(&theory.classes)?;
        let report = sct_verify(&theory, Some(&table));
        (Some(report.lines()), Some(report.pass()))
    } else {
        (None, None)
    };
    let comparison = match &job.compare_with {
        Some(other) => {
            let t2 = build_theory(&job.group, other, cap)?;
            Some(comparison_word(sct_compare(&theory, &t2)?).to_string())
        }
        None => None,
    };
    let artifact = match job.format.as_str() {
        "json" => export::export_json(&theory),
        "csv" => export::export_csv(&theory),
        other => return Err(CliError::Schema(format!("bad format {other:?}"))),
    };
    let report = Report {
        job: job.clone(),
        group_order: theory.group().order(),
        num_superclasses: theory.blocks.len(),
        num_supercharacters: theory.chars.len(),
        provenance: theory.provenance.clone(),
        verify,
        verify_pass,
        comparison,
    };
    Ok((report, artifact))
}

/// Runs a job, serving from and feeding the cache when a directory is
/// configured. A failed verification is reported in the output rather
/// than raised, so the caller can print the full report before
/// choosing the exit code.
pub fn run(job: &JobSpec, cache_dir: Option<&std::path::Path>) -> Result<RunOutput, CliError> {
    let key = cache::cache_key(job);
    if let Some(dir) = cache_dir {
        if let Some(entry) = cache::load(dir, &key) {
            if let Ok(report) = serde_json::from_value::<Report>(entry.report.clone()) {
                return Ok(RunOutput {
                    report,
                    artifact: entry.artifact,
                    from_cache: true,
                });
            }
        }
    }
    let (report, artifact) = execute(job)?;
    if let Some(dir) = cache_dir {
        let entry = cache::Entry {
            version: cache::CACHE_VERSION.to_string(),
            key: key.clone(),
            report: serde_json::to_value(&report).expect("report serializes"),
            artifact: artifact.clone(),
        };
        cache::store(dir, &key, &entry);
    }
    Ok(RunOutput {
        report,
        artifact,
        from_cache: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_splitting() {
        assert_eq!(split_prime_power(2).unwrap(), (2, 1));
        assert_eq!(split_prime_power(9).unwrap(), (3, 2));
        assert_eq!(split_prime_power(8).unwrap(), (2, 3));
        assert_eq!(split_prime_power(7).unwrap(), (7, 1));
        assert!(split_prime_power(6).is_err());
        assert!(split_prime_power(1).is_err());
    }

    #[test]
    fn construction_compact_grammar() {
        assert_eq!(
            Construction::parse("algebra").unwrap(),
            Construction::Algebra
        );
        assert_eq!(
            Construction::parse("nk:2").unwrap(),
            Construction::Nk { k: 2 }
        );
        assert_eq!(
            Construction::parse("ns:1,3").unwrap(),
            Construction::Ns { s: vec![1, 3] }
        );
        assert_eq!(
            Construction::parse("littlegroups:2:minimal").unwrap(),
            Construction::Littlegroups {
                k: 2,
                strategy: "minimal".to_string(),
                lattice: "ideal".to_string(),
            }
        );
        assert!(Construction::parse("nk").is_err());
        assert!(Construction::parse("nk:x").is_err());
        assert!(Construction::parse("mystery").is_err());
    }

    #[test]
    fn malformed_job_spec_is_a_schema_error() {
        let e = JobSpec::from_json("{not json").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = JobSpec::from_json("{\"group\":{\"kind\":\"ut\",\"n\":3,\"q\":2}}").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = JobSpec::from_json(
            "{\"group\":{\"kind\":\"ut\",\"n\":3,\"q\":2,\"x\":1},\
             \"construction\":{\"tag\":\"algebra\"}}",
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn ut3_algebra_job_runs_and_verifies() {
        let job = JobSpec::from_json(
            "{\"group\":{\"kind\":\"ut\",\"n\":3,\"q\":2},\
             \"construction\":{\"tag\":\"algebra\"},\"verify\":true}",
        )
        .unwrap();
        let out = run(&job, None).unwrap();
        assert_eq!(out.report.num_superclasses, 5);
        assert_eq!(out.report.num_supercharacters, 5);
        assert_eq!(out.report.verify_pass, Some(true));
        assert!(!out.from_cache);
    }

    #[test]
    fn tiny_cap_is_a_cap_error() {
        let job = JobSpec {
            group: GroupSel {
                kind: "ut".to_string(),
                n: 4,
                q: 2,
            },
            construction: Construction::Algebra,
            compare_with: None,
            verify: false,
            format: "json".to_string(),
            cap: Some(4),
        };
        let e = run(&job, None).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }
}
