//! `masurelab`: command line surface over the toolkit.
//!
//! Exit codes: 0 success (and verified verdicts), 2 usage errors,
//! 3 computational refusals and negative verdicts (invalid path,
//! falsified comparison, depth exceeded), 70 internal invariant
//! violations.

mod exec;
mod output;

use clap::{Parser, Subcommand};
use exec::{CommandOutput, Refusal, TreeVerifyKind};
use output::{
    cache_dir, cache_lookup, cache_store, canonical_config, config_hash, render, OutputFormat,
    ResultEnvelope,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "masurelab",
    version,
    about = "Root systems, Hecke paths, rank-one masure oracles and Gindikin-Karpelevich series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cache directory (default: $MASURELAB_CACHE or the system temp dir)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Output format; csv only for flat tables
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Bypass the result cache
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Kac-Moody matrix (or a full datum file)
    RootdataValidate {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
    },
    /// Emit the canonical root datum of a matrix
    RootdataCanonical {
        #[arg(long)]
        matrix: String,
    },
    /// Positive real roots up to a coefficient-sum height
    RootsEnumerate {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        height: i64,
    },
    /// Dominant representative of a point of V (rational coordinates)
    WeylDominant {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        /// Comma-separated rational coordinates, e.g. "3,-1/2"
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Reflection budget
        #[arg(long, default_value_t = 1000)]
        bound: i64,
    },
    /// Monoid basis of the dominant coweights
    MonoidBasis {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        /// Initial certification bound
        #[arg(long, default_value_t = 10)]
        bound: u32,
    },
    /// Decompose a dominant integral coweight over the monoid basis
    MonoidDecompose {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        /// Comma-separated integer ambient coordinates
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 10)]
        bound: u32,
    },
    /// Validate a Hecke path (path JSON on stdin)
    PathCheck {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        /// Root height cutoff for chain search
        #[arg(long, default_value_t = 6)]
        height: i64,
    },
    /// Enumerate Hecke paths of a shape from 0 to shape + mu
    PathEnumerate {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        /// Shape as comma-separated coroot coefficients
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Deficit as comma-separated (nonpositive) coroot coefficients
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value_t = 6)]
        height: i64,
    },
    /// Parameters and size of a tree oracle
    TreeBuildInfo {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        depth: i64,
    },
    /// Bi-retraction fiber counts (mu and lambda accept "a..b" ranges)
    TreeCounts {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        depth: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
    },
    /// Verify retraction-fiber statements on the tree oracle
    TreeVerify {
        #[command(subcommand)]
        kind: TreeVerifyCommand,
    },
    /// Counting side of the identity from the tree oracle
    GkLhs {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        depth: i64,
        #[arg(long, default_value_t = 6)]
        truncation: u32,
    },
    /// Product side of the identity (symbolic in q)
    GkRhs {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 6)]
        truncation: u32,
        /// Optional exact evaluation point
        #[arg(long)]
        q: Option<i64>,
    },
    /// Compare both sides coefficientwise at an exact rational q
    GkCompare {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        depth: i64,
        #[arg(long, default_value_t = 6)]
        truncation: u32,
    },
    /// Weighted path count for a shape and deficit (EXPERIMENTAL beyond
    /// rank one)
    PathCountEstimate {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        datum_file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, default_value_t = 6)]
        height: i64,
    },
}

#[derive(Subcommand)]
enum TreeVerifyCommand {
    /// Bi-retraction fibers sit inside the sphere fibers above the
    /// dominance threshold
    Inclusion {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 12)]
        depth: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: String,
    },
    /// Fiber counts do not depend on the base point
    Invariance {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        depth: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: String,
    },
    /// Set equality of the two fibers from some lambda on
    Equality {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 12)]
        depth: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal invariant violation; this is a bug");
            ExitCode::from(70)
        }
    }
}

fn run(cli: &Cli) -> ExitCode {
    let (name, args, stdin_needed) = describe(&cli.command);
    let mut args = args;
    let stdin_text = if stdin_needed {
        let mut buf = String::new();
        if std::io::stdin().read_to_string(&mut buf).is_err() {
            eprintln!("could not read path JSON from stdin");
            return ExitCode::from(2);
        }
        args.insert("stdin_sha256".to_string(), json!(config_hash(&buf)));
        buf
    } else {
        String::new()
    };

    let canonical = canonical_config(&name, &args);
    let hash = config_hash(&canonical);
    let dir = cache_dir(cli.cache_dir.as_deref());

    if !cli.no_cache {
        if let Some(envelope) = cache_lookup(&dir, &hash) {
            let csv = csv_for(&cli.command, &envelope, &stdin_text);
            return print_and_exit(&envelope, cli.format, csv.as_ref(), verdict_of(&envelope));
        }
    }

    match execute(&cli.command, &stdin_text) {
        Err(refusal) => {
            let envelope = ResultEnvelope {
                command: name,
                config_hash: hash,
                timestamp: chrono::Utc::now().to_rfc3339(),
                payload: json!({"error": {"kind": refusal.kind, "message": refusal.message}}),
                certification: vec![],
            };
            // refusals are not cached: they may be environment-dependent
            print_and_exit(&envelope, OutputFormat::Json, None, 3)
        }
        Ok(out) => {
            let envelope = ResultEnvelope {
                command: name,
                config_hash: hash.clone(),
                timestamp: chrono::Utc::now().to_rfc3339(),
                payload: out.payload,
                certification: out.certification,
            };
            if !cli.no_cache {
                cache_store(&dir, &hash, &envelope);
            }
            let code = if out.verdict_failure { 3 } else { 0 };
            print_and_exit(&envelope, cli.format, out.csv.as_ref(), code)
        }
    }
}

fn print_and_exit(
    envelope: &ResultEnvelope,
    format: OutputFormat,
    csv: Option<&output::CsvTable>,
    code: u8,
) -> ExitCode {
    match render(envelope, format, csv) {
        Ok(text) => {
            // tolerate closed pipes (e.g. piping into head)
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

/// The verdict stored in a cached envelope: error payloads and negative
/// verdicts exit 3 on replay too.
fn verdict_of(envelope: &ResultEnvelope) -> u8 {
    let p = &envelope.payload;
    if p.get("error").is_some() {
        return 3;
    }
    let failed = [
        p.get("equal").and_then(|v| v.as_bool()).map(|b| !b),
        p.get("verified").and_then(|v| v.as_bool()).map(|b| !b),
        p.get("status")
            .and_then(|v| v.as_str())
            .map(|s| s != "valid"),
    ]
    .into_iter()
    .flatten()
    .any(|b| b);
    if failed {
        3
    } else {
        0
    }
}

/// Canonical argument map per command; also says whether stdin is read.
fn describe(cmd: &Command) -> (String, BTreeMap<String, serde_json::Value>, bool) {
    let mut m = BTreeMap::new();
    let name;
    let mut stdin = false;
    match cmd {
        Command::RootdataValidate { matrix, datum_file } => {
            name = "rootdata-validate";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
        }
        Command::RootdataCanonical { matrix } => {
            name = "rootdata-canonical";
            m.insert("matrix".into(), json!(matrix));
        }
        Command::RootsEnumerate {
            matrix,
            datum_file,
            height,
        } => {
            name = "roots-enumerate";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("height".into(), json!(height));
        }
        Command::WeylDominant {
            matrix,
            datum_file,
            lambda,
            bound,
        } => {
            name = "weyl-dominant";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("lambda".into(), json!(lambda));
            m.insert("bound".into(), json!(bound));
        }
        Command::MonoidBasis {
            matrix,
            datum_file,
            bound,
        } => {
            name = "monoid-basis";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("bound".into(), json!(bound));
        }
        Command::MonoidDecompose {
            matrix,
            datum_file,
            lambda,
            bound,
        } => {
            name = "monoid-decompose";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("lambda".into(), json!(lambda));
            m.insert("bound".into(), json!(bound));
        }
        Command::PathCheck {
            matrix,
            datum_file,
            height,
        } => {
            name = "path-check";
            stdin = true;
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("height".into(), json!(height));
        }
        Command::PathEnumerate {
            matrix,
            datum_file,
            lambda,
            mu,
            height,
        } => {
            name = "path-enumerate";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("lambda".into(), json!(lambda));
            m.insert("mu".into(), json!(mu));
            m.insert("height".into(), json!(height));
        }
        Command::TreeBuildInfo { q, depth } => {
            name = "tree-build-info";
            m.insert("q".into(), json!(q));
            m.insert("depth".into(), json!(depth));
        }
        Command::TreeCounts {
            q,
            depth,
            mu,
            lambda,
        } => {
            name = "tree-counts";
            m.insert("q".into(), json!(q));
            m.insert("depth".into(), json!(depth));
            m.insert("mu".into(), json!(mu));
            m.insert("lambda".into(), json!(lambda));
        }
        Command::TreeVerify { kind } => {
            let (sub, q, depth, mu, range) = match kind {
                TreeVerifyCommand::Inclusion {
                    q,
                    depth,
                    mu,
                    lambda_range,
                } => ("inclusion", q, depth, mu, lambda_range),
                TreeVerifyCommand::Invariance {
                    q,
                    depth,
                    mu,
                    lambda_range,
                } => ("invariance", q, depth, mu, lambda_range),
                TreeVerifyCommand::Equality {
                    q,
                    depth,
                    mu,
                    lambda_range,
                } => ("equality", q, depth, mu, lambda_range),
            };
            name = "tree-verify";
            m.insert("kind".into(), json!(sub));
            m.insert("q".into(), json!(q));
            m.insert("depth".into(), json!(depth));
            m.insert("mu".into(), json!(mu));
            m.insert("lambda_range".into(), json!(range));
        }
        Command::GkLhs {
            matrix,
            q,
            depth,
            truncation,
        } => {
            name = "gk-lhs";
            opt(&mut m, "matrix", matrix.as_deref());
            m.insert("q".into(), json!(q));
            m.insert("depth".into(), json!(depth));
            m.insert("truncation".into(), json!(truncation));
        }
        Command::GkRhs {
            matrix,
            truncation,
            q,
        } => {
            name = "gk-rhs";
            opt(&mut m, "matrix", matrix.as_deref());
            m.insert("truncation".into(), json!(truncation));
            if let Some(qv) = q {
                m.insert("q".into(), json!(qv));
            }
        }
        Command::GkCompare {
            matrix,
            q,
            depth,
            truncation,
        } => {
            name = "gk-compare";
            opt(&mut m, "matrix", matrix.as_deref());
            m.insert("q".into(), json!(q));
            m.insert("depth".into(), json!(depth));
            m.insert("truncation".into(), json!(truncation));
        }
        Command::PathCountEstimate {
            matrix,
            datum_file,
            lambda,
            mu,
            q,
            height,
        } => {
            name = "path-count-estimate";
            opt(&mut m, "matrix", matrix.as_deref());
            optp(&mut m, "datum_file", datum_file.as_deref());
            m.insert("lambda".into(), json!(lambda));
            m.insert("mu".into(), json!(mu));
            if let Some(qv) = q {
                m.insert("q".into(), json!(qv));
            }
            m.insert("height".into(), json!(height));
        }
    }
    (name.to_string(), m, stdin)
}

fn opt(m: &mut BTreeMap<String, serde_json::Value>, key: &str, v: Option<&str>) {
    if let Some(v) = v {
        m.insert(key.to_string(), json!(v));
    }
}

fn optp(m: &mut BTreeMap<String, serde_json::Value>, key: &str, v: Option<&std::path::Path>) {
    if let Some(v) = v {
        m.insert(key.to_string(), json!(v.to_string_lossy()));
    }
}

fn execute(cmd: &Command, stdin_text: &str) -> Result<CommandOutput, Refusal> {
    match cmd {
        Command::RootdataValidate { matrix, datum_file } => {
            exec::rootdata_validate(matrix.as_deref(), datum_file.as_deref())
        }
        Command::RootdataCanonical { matrix } => exec::rootdata_canonical(matrix),
        Command::RootsEnumerate {
            matrix,
            datum_file,
            height,
        } => exec::roots_enumerate(matrix.as_deref(), datum_file.as_deref(), *height),
        Command::WeylDominant {
            matrix,
            datum_file,
            lambda,
            bound,
        } => exec::weyl_dominant(matrix.as_deref(), datum_file.as_deref(), lambda, *bound),
        Command::MonoidBasis {
            matrix,
            datum_file,
            bound,
        } => exec::monoid_basis(matrix.as_deref(), datum_file.as_deref(), *bound),
        Command::MonoidDecompose {
            matrix,
            datum_file,
            lambda,
            bound,
        } => exec::monoid_decompose(matrix.as_deref(), datum_file.as_deref(), lambda, *bound),
        Command::PathCheck {
            matrix,
            datum_file,
            height,
        } => exec::path_check(
            matrix.as_deref(),
            datum_file.as_deref(),
            *height,
            stdin_text,
        ),
        Command::PathEnumerate {
            matrix,
            datum_file,
            lambda,
            mu,
            height,
        } => exec::path_enumerate(
            matrix.as_deref(),
            datum_file.as_deref(),
            lambda,
            mu,
            *height,
        ),
        Command::TreeBuildInfo { q, depth } => exec::tree_build_info(*q, *depth),
        Command::TreeCounts {
            q,
            depth,
            mu,
            lambda,
        } => exec::tree_counts(*q, *depth, mu, lambda),
        Command::TreeVerify { kind } => match kind {
            TreeVerifyCommand::Inclusion {
                q,
                depth,
                mu,
                lambda_range,
            } => exec::tree_verify(TreeVerifyKind::Inclusion, *q, *depth, *mu, lambda_range),
            TreeVerifyCommand::Invariance {
                q,
                depth,
                mu,
                lambda_range,
            } => exec::tree_verify(TreeVerifyKind::Invariance, *q, *depth, *mu, lambda_range),
            TreeVerifyCommand::Equality {
                q,
                depth,
                mu,
                lambda_range,
            } => exec::tree_verify(TreeVerifyKind::Equality, *q, *depth, *mu, lambda_range),
        },
        Command::GkLhs {
            matrix,
            q,
            depth,
            truncation,
        } => exec::gk_lhs(matrix.as_deref(), *q, *depth, *truncation),
        Command::GkRhs {
            matrix,
            truncation,
            q,
        } => exec::gk_rhs(matrix.as_deref(), *truncation, *q),
        Command::GkCompare {
            matrix,
            q,
            depth,
            truncation,
        } => exec::gk_compare(matrix.as_deref(), *q, *depth, *truncation),
        Command::PathCountEstimate {
            matrix,
            datum_file,
            lambda,
            mu,
            q,
            height,
        } => exec::path_count_estimate_cmd(
            matrix.as_deref(),
            datum_file.as_deref(),
            lambda,
            mu,
            *q,
            *height,
        ),
    }
}

/// Rebuilds the CSV table for a cached envelope.
fn csv_for(cmd: &Command, envelope: &ResultEnvelope, _stdin: &str) -> Option<output::CsvTable> {
    let p = &envelope.payload;
    match cmd {
        Command::TreeCounts { .. } => {
            let rows = p.get("rows")?.as_array()?;
            Some(output::CsvTable {
                header: vec![
                    "lambda".into(),
                    "mu".into(),
                    "count".into(),
                    "radius_needed".into(),
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r["lambda"].to_string(),
                            r["mu"].to_string(),
                            r["count"].as_str().unwrap_or_default().to_string(),
                            r["radius_needed"].to_string(),
                        ]
                    })
                    .collect(),
            })
        }
        Command::TreeVerify { .. } => {
            let rows = p.get("rows")?.as_array()?;
            if rows.first()?.get("count").is_some() {
                Some(output::CsvTable {
                    header: vec!["lambda".into(), "count".into()],
                    rows: rows
                        .iter()
                        .map(|r| vec![r["lambda_coroot"].to_string(), r["count"].to_string()])
                        .collect(),
                })
            } else {
                Some(output::CsvTable {
                    header: vec![
                        "lambda".into(),
                        "fiber".into(),
                        "sphere_fiber".into(),
                        "included".into(),
                        "equal".into(),
                    ],
                    rows: rows
                        .iter()
                        .map(|r| {
                            vec![
                                r["lambda_coroot"].to_string(),
                                r["fiber_size"].to_string(),
                                r["sphere_fiber_size"].to_string(),
                                r["included"].to_string(),
                                r["equal"].to_string(),
                            ]
                        })
                        .collect(),
                })
            }
        }
        Command::GkLhs { .. } | Command::GkRhs { .. } => {
            let entries = p
                .get("entries")
                .or_else(|| p.get("series").and_then(|s| s.get("entries")))?
                .as_array()?;
            Some(output::CsvTable {
                header: vec!["mu".into(), "coefficient".into()],
                rows: entries
                    .iter()
                    .map(|e| {
                        let mu = e["mu"]
                            .as_array()
                            .map(|a| {
                                a.iter()
                                    .map(|x| x.to_string())
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            })
                            .unwrap_or_default();
                        let coeff = e["coeff"]
                            .as_object()
                            .map(|o| {
                                o.iter()
                                    .map(|(k, v)| format!("{}*q^{}", v.as_str().unwrap_or("?"), k))
                                    .collect::<Vec<_>>()
                                    .join(" + ")
                            })
                            .unwrap_or_default();
                        vec![mu, coeff]
                    })
                    .collect(),
            })
        }
        Command::RootsEnumerate { .. } => {
            let rows = p.as_array()?;
            Some(output::CsvTable {
                header: vec!["root".into(), "coroot".into(), "height".into()],
                rows: rows
                    .iter()
                    .map(|r| {
                        let ints = |key: &str| {
                            r[key]
                                .as_array()
                                .map(|a| {
                                    a.iter()
                                        .map(|x| x.to_string())
                                        .collect::<Vec<_>>()
                                        .join(" ")
                                })
                                .unwrap_or_default()
                        };
                        vec![ints("root"), ints("coroot"), r["height"].to_string()]
                    })
                    .collect(),
            })
        }
        _ => None,
    }
}
