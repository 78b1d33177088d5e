//! Implementations of the subcommands: argument normalization, the call
//! into the core library, and payload assembly.

use crate::output::CsvTable;
use masurelab_core::coweight_monoid::{decompose_in_basis, hilbert_basis};
use masurelab_core::gk_series::{
    default_multiplicities, lhs_from_counts, path_count_estimate, rhs_product, series_to_json,
    CoweightSeries, SeriesError,
};
use masurelab_core::hecke_paths::{
    enumerate_hecke, path_from_json, path_to_json, sufficiently_dominant_bound, validate_hecke,
    EnumerationCutoffs, PathJson, Validation,
};
use masurelab_core::rational::{format_rat, parse_rat, rat_int};
use masurelab_core::rootdata::{rat_to_i64, KacMoodyMatrix, RootDatumJson};
use masurelab_core::tree_masure::TreeMasure;
use masurelab_core::weylgeom::{dominant_representative, real_roots_up_to_height};
use masurelab_core::{CoweightVector, RootGeneratingSystem};
use serde_json::json;
use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::Path;

/// A machine-readable refusal: printed as an error envelope, exit 3.
#[derive(Debug)]
pub struct Refusal {
    pub kind: String,
    pub message: String,
}

impl Refusal {
    pub fn new(kind: &str, message: impl std::fmt::Display) -> Self {
        Refusal {
            kind: kind.to_string(),
            message: message.to_string(),
        }
    }
}

/// Payload plus presentation data for one executed command.
pub struct CommandOutput {
    pub payload: serde_json::Value,
    pub certification: Vec<String>,
    pub csv: Option<CsvTable>,
    /// Set when the command ran but its verification verdict is negative
    /// (nonempty diff, falsified invariance, invalid path).
    pub verdict_failure: bool,
}

impl CommandOutput {
    fn ok(payload: serde_json::Value, certification: Vec<String>) -> Self {
        CommandOutput {
            payload,
            certification,
            csv: None,
            verdict_failure: false,
        }
    }
}

// ---------------------------------------------------------------------------
// argument parsing helpers
// ---------------------------------------------------------------------------

pub fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, Refusal> {
    serde_json::from_str(s).map_err(|e| Refusal::new("BadMatrix", format!("--matrix: {e}")))
}

/// Loads a system from `--datum-file`, or builds the canonical datum of
/// `--matrix`.
pub fn load_system(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
) -> Result<RootGeneratingSystem, Refusal> {
    match (matrix, datum_file) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Refusal::new("DatumFileUnreadable", e))?;
            let json: RootDatumJson =
                serde_json::from_str(&text).map_err(|e| Refusal::new("DatumFileMalformed", e))?;
            RootGeneratingSystem::from_json(&json).map_err(|e| Refusal::new("BadDatum", e))
        }
        (Some(m), None) => {
            let entries = parse_matrix(m)?;
            let km = KacMoodyMatrix::validate(entries).map_err(|e| Refusal::new("BadMatrix", e))?;
            Ok(RootGeneratingSystem::canonical(km))
        }
        (None, None) => Err(Refusal::new(
            "MissingDatum",
            "provide --matrix or --datum-file",
        )),
    }
}

pub fn parse_i64_list(s: &str) -> Result<Vec<i64>, Refusal> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| Refusal::new("BadInteger", format!("`{p}`: {e}")))
        })
        .collect()
}

pub fn parse_rat_list(s: &str) -> Result<CoweightVector, Refusal> {
    let coords: Result<Vec<_>, _> = s.split(',').map(|p| parse_rat(p.trim())).collect();
    Ok(CoweightVector::new(
        coords.map_err(|e| Refusal::new("BadRational", e))?,
    ))
}

/// `"a..b"` inclusive, or a single integer.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, Refusal> {
    if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|e| Refusal::new("BadRange", format!("`{s}`: {e}")))?;
        let b: i64 = b
            .trim()
            .parse()
            .map_err(|e| Refusal::new("BadRange", format!("`{s}`: {e}")))?;
        if a > b {
            return Err(Refusal::new("BadRange", format!("`{s}`: empty range")));
        }
        Ok(a..=b)
    } else {
        let v: i64 = s
            .trim()
            .parse()
            .map_err(|e| Refusal::new("BadRange", format!("`{s}`: {e}")))?;
        Ok(v..=v)
    }
}

fn build_tree(q: u64, depth: i64) -> Result<TreeMasure, Refusal> {
    TreeMasure::build(q, depth).map_err(|e| Refusal::new("BadTreeParams", e))
}

/// Indices of the singleton components of a matrix whose masure oracle
/// exists (a product of rank-one trees); refuses otherwise.
fn rank_one_components(sys: &RootGeneratingSystem) -> Result<usize, Refusal> {
    let comps = sys.matrix().indecomposable_components();
    if comps.iter().any(|c| c.len() >= 2) {
        return Err(Refusal::new(
            "NoMasureOracle",
            "the exact masure oracle exists only for rank-one data and products of rank-one data",
        ));
    }
    Ok(comps.len())
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

pub fn rootdata_validate(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
) -> Result<CommandOutput, Refusal> {
    match (matrix, datum_file) {
        (Some(m), None) => {
            let entries = parse_matrix(m)?;
            let km = KacMoodyMatrix::validate(entries)
                .map_err(|e| Refusal::new(error_kind_of(&e), e))?;
            Ok(CommandOutput::ok(
                json!({"valid": true, "index_count": km.size()}),
                vec![],
            ))
        }
        _ => {
            let sys = load_system(matrix, datum_file)?;
            Ok(CommandOutput::ok(
                json!({
                    "valid": true,
                    "index_count": sys.index_count(),
                    "ambient_rank": sys.ambient_rank(),
                    "inessential_dim": sys.inessential_dim(),
                }),
                vec![],
            ))
        }
    }
}

fn error_kind_of(e: &masurelab_core::RootDataError) -> &'static str {
    use masurelab_core::RootDataError::*;
    match e {
        NotSquare => "NotSquare",
        BadDiagonal { .. } => "BadDiagonal",
        PositiveOffDiagonal { .. } => "PositiveOffDiagonal",
        BrokenZeroSymmetry { .. } => "BrokenZeroSymmetry",
        _ => "BadDatum",
    }
}

pub fn rootdata_canonical(matrix: &str) -> Result<CommandOutput, Refusal> {
    let entries = parse_matrix(matrix)?;
    let km = KacMoodyMatrix::validate(entries).map_err(|e| Refusal::new(error_kind_of(&e), e))?;
    let sys = RootGeneratingSystem::canonical(km);
    Ok(CommandOutput::ok(
        serde_json::to_value(sys.to_json()).unwrap(),
        vec![],
    ))
}

pub fn roots_enumerate(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    height: i64,
) -> Result<CommandOutput, Refusal> {
    if height < 1 {
        return Err(Refusal::new("BadHeight", "--height must be >= 1"));
    }
    let sys = load_system(matrix, datum_file)?;
    let roots = real_roots_up_to_height(&sys, height);
    let rows: Vec<_> = roots.iter().map(|r| r.to_json(&sys)).collect();
    let csv = CsvTable {
        header: vec!["root".into(), "coroot".into(), "height".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    join_ints(&r.root),
                    join_ints(&r.coroot),
                    r.height.to_string(),
                ]
            })
            .collect(),
    };
    Ok(CommandOutput {
        payload: serde_json::to_value(&rows).unwrap(),
        certification: vec![format!(
            "complete for positive real roots of height <= {height}"
        )],
        csv: Some(csv),
        verdict_failure: false,
    })
}

fn join_ints(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn weyl_dominant(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    lambda: &str,
    budget: i64,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let v = parse_rat_list(lambda)?;
    if v.dim() != sys.ambient_rank() {
        return Err(Refusal::new(
            "BadVector",
            "--lambda length must equal the ambient rank",
        ));
    }
    let (dom, word) = dominant_representative(&sys, &v, budget.max(0) as usize)
        .map_err(|e| Refusal::new("NotDominantable", e))?;
    Ok(CommandOutput::ok(
        json!({
            "dominant": dom.coords().iter().map(format_rat).collect::<Vec<_>>(),
            "word": word,
        }),
        vec![format!("search budget {budget} reflections")],
    ))
}

pub fn monoid_basis(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    bound: u32,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let basis = hilbert_basis(&sys, bound, 64).map_err(|e| Refusal::new("BoundExceeded", e))?;
    let cert = vec![format!(
        "N-span certified inside the alpha-value box [0, {}]^I",
        basis.certification_bound
    )];
    Ok(CommandOutput::ok(
        serde_json::to_value(&basis).unwrap(),
        cert,
    ))
}

pub fn monoid_decompose(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    lambda: &str,
    bound: u32,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let lam_ints = parse_i64_list(lambda)?;
    if lam_ints.len() != sys.ambient_rank() {
        return Err(Refusal::new(
            "BadVector",
            "--lambda length must equal the ambient rank",
        ));
    }
    let lam = CoweightVector::from_ints(&lam_ints);
    let basis = hilbert_basis(&sys, bound, 64).map_err(|e| Refusal::new("BoundExceeded", e))?;
    let coeffs =
        decompose_in_basis(&sys, &lam, &basis).map_err(|e| Refusal::new("NotDecomposable", e))?;
    let gens: Vec<Vec<String>> = basis
        .generators()
        .iter()
        .map(|g| g.coords().iter().map(format_rat).collect())
        .collect();
    Ok(CommandOutput::ok(
        json!({"coefficients": coeffs, "generators": gens}),
        vec![format!(
            "decomposition valid inside the alpha-value box [0, {}]^I",
            basis.certification_bound
        )],
    ))
}

pub fn path_check(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    height: i64,
    stdin_json: &str,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let path_json: PathJson =
        serde_json::from_str(stdin_json).map_err(|e| Refusal::new("BadPathJson", e))?;
    let path = path_from_json(&sys, &path_json).map_err(|e| Refusal::new("BadPath", e))?;
    let cert = vec![format!("chains searched over roots of height <= {height}")];
    match validate_hecke(&sys, &path, height) {
        Validation::Valid(c) => {
            let full = path_to_json(&path, Some(&c));
            Ok(CommandOutput::ok(
                json!({"status": "valid", "path": full}),
                cert,
            ))
        }
        Validation::Invalid { breakpoint } => Ok(CommandOutput {
            payload: json!({"status": "invalid", "breakpoint": breakpoint}),
            certification: cert,
            csv: None,
            verdict_failure: true,
        }),
        Validation::Inconclusive { cutoff } => Ok(CommandOutput {
            payload: json!({"status": "inconclusive", "cutoff": cutoff}),
            certification: cert,
            csv: None,
            verdict_failure: true,
        }),
    }
}

pub fn path_enumerate(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    lambda: &str,
    mu: &str,
    height: i64,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let shape_coeffs = parse_i64_list(lambda)?;
    let mu_coeffs = parse_i64_list(mu)?;
    if shape_coeffs.len() != sys.index_count() || mu_coeffs.len() != sys.index_count() {
        return Err(Refusal::new(
            "BadVector",
            "--lambda and --mu take coroot coefficients (one per index)",
        ));
    }
    let shape = sys.coweight_from_coroot_ints(&shape_coeffs);
    let mu_vec = sys.coweight_from_coroot_ints(&mu_coeffs);
    let start = CoweightVector::zero(sys.ambient_rank());
    let end = shape.add(&mu_vec);
    let mu_target = start.add(&shape).sub(&end);
    let cutoffs = EnumerationCutoffs::for_problem(&sys, &shape, &mu_target, height);
    let found = enumerate_hecke(&sys, &shape, &start, &end, &cutoffs)
        .map_err(|e| Refusal::new("EnumerationFailed", e))?;
    let paths: Vec<PathJson> = found
        .paths
        .iter()
        .map(|(p, c)| path_to_json(p, Some(c)))
        .collect();
    let mut cert = vec![
        format!("roots searched to height {}", cutoffs.root_height),
        format!(
            "breakpoint denominators capped at {}",
            cutoffs.max_denominator
        ),
    ];
    if found.cutoff_advisory {
        cert.push("CutoffTooSmall: some branch was dropped at a declared cutoff".into());
    }
    Ok(CommandOutput::ok(
        json!({
            "paths": paths,
            "count": paths.len(),
            "complete_relative_to_cutoffs": !found.cutoff_advisory,
        }),
        cert,
    ))
}

pub fn tree_build_info(q: u64, depth: i64) -> Result<CommandOutput, Refusal> {
    let tree = build_tree(q, depth)?;
    let count = tree.vertex_count();
    Ok(CommandOutput::ok(
        json!({
            "q": q,
            "depth": depth,
            "vertex_count": count.to_string(),
            "apartment_positions": [-depth, depth],
            "full_scan_available": count <= masurelab_core::tree_masure::DEFAULT_SCAN_LIMIT,
        }),
        vec![format!(
            "full scans refuse beyond {} vertices; fiber counts are region-local",
            masurelab_core::tree_masure::DEFAULT_SCAN_LIMIT
        )],
    ))
}

pub fn tree_counts(q: u64, depth: i64, mu: &str, lambda: &str) -> Result<CommandOutput, Refusal> {
    let tree = build_tree(q, depth)?;
    let mu_range = parse_range(mu)?;
    let lambda_range = parse_range(lambda)?;
    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    for l in lambda_range {
        for m in mu_range.clone() {
            let c = tree
                .count_bi_retraction(l, m)
                .map_err(|e| Refusal::new("DepthExceeded", e))?;
            rows_json.push(json!({
                "lambda": l,
                "mu": m,
                "count": c.count.to_string(),
                "radius_needed": c.radius_needed,
            }));
            rows_csv.push(vec![
                l.to_string(),
                m.to_string(),
                c.count.to_string(),
                c.radius_needed.to_string(),
            ]);
        }
    }
    Ok(CommandOutput {
        payload: json!({"q": q, "depth": depth, "rows": rows_json}),
        certification: vec![format!("exact counts; tree depth {depth} covers every row")],
        csv: Some(CsvTable {
            header: vec![
                "lambda".into(),
                "mu".into(),
                "count".into(),
                "radius_needed".into(),
            ],
            rows: rows_csv,
        }),
        verdict_failure: false,
    })
}

pub enum TreeVerifyKind {
    Inclusion,
    Invariance,
    Equality,
}

pub fn tree_verify(
    kind: TreeVerifyKind,
    q: u64,
    depth: i64,
    mu: i64,
    lambda_range: &str,
) -> Result<CommandOutput, Refusal> {
    let tree = build_tree(q, depth)?;
    let range = parse_range(lambda_range)?;
    match kind {
        TreeVerifyKind::Invariance => {
            let report = tree
                .verify_invariance(mu, range)
                .map_err(|e| Refusal::new("DepthExceeded", e))?;
            let csv = CsvTable {
                header: vec!["lambda".into(), "count".into()],
                rows: report
                    .rows
                    .iter()
                    .map(|r| vec![r.lambda_coroot.to_string(), r.count.to_string()])
                    .collect(),
            };
            let ok = report.all_equal;
            let mut payload = serde_json::to_value(&report).unwrap();
            payload["verified"] = json!(ok);
            Ok(CommandOutput {
                payload,
                certification: vec![format!("exact counts over the depth-{depth} tree")],
                csv: Some(csv),
                verdict_failure: !ok,
            })
        }
        TreeVerifyKind::Inclusion | TreeVerifyKind::Equality => {
            let threshold = rank_one_threshold(mu)?;
            let report = tree
                .verify_inclusion_equality(mu, range, threshold)
                .map_err(|e| Refusal::new("DepthExceeded", e))?;
            let failed = match kind {
                TreeVerifyKind::Inclusion => !report.inclusion_holds_from_threshold,
                _ => report.min_lambda_equal_onward.is_none_or(|m| m > threshold),
            };
            let csv = CsvTable {
                header: vec![
                    "lambda".into(),
                    "fiber".into(),
                    "sphere_fiber".into(),
                    "included".into(),
                    "equal".into(),
                ],
                rows: report
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.lambda_coroot.to_string(),
                            r.fiber_size.to_string(),
                            r.sphere_fiber_size.to_string(),
                            r.included.to_string(),
                            r.equal.to_string(),
                        ]
                    })
                    .collect(),
            };
            let mut payload = serde_json::to_value(&report).unwrap();
            payload["verified"] = json!(!failed);
            Ok(CommandOutput {
                payload,
                certification: vec![format!(
                    "dominance threshold lambda >= {threshold} coroots from h(-mu) alpha(nu) with nu = alpha_vee"
                )],
                csv: Some(csv),
                verdict_failure: failed,
            })
        }
    }
}

/// Rank-one sufficiently-dominant threshold in coroot multiples: the
/// smallest integral dominant `l` with `alpha(l a^v) > h(-mu) alpha(a^v)`.
fn rank_one_threshold(mu: i64) -> Result<i64, Refusal> {
    if mu > 0 {
        return Err(Refusal::new("OutsideCone", "--mu must be <= 0"));
    }
    let sys = rank_one_system();
    let mu_vec = CoweightVector::from_ints(&[mu]);
    let nu = CoweightVector::from_ints(&[1]);
    let bounds = sufficiently_dominant_bound(&sys, &mu_vec, &nu)
        .map_err(|e| Refusal::new("OutsideCone", e))?;
    let b = rat_to_i64(&bounds[0]).expect("integral bound");
    Ok(b / 2 + 1)
}

/// The rank-one system behind the single tree oracle.
fn rank_one_system() -> RootGeneratingSystem {
    let m = KacMoodyMatrix::validate(vec![vec![2]]).unwrap();
    RootGeneratingSystem::new(m, 1, vec![vec![2]], vec![vec![1]]).unwrap()
}

/// Counter over a product of rank-one trees, one per singleton component.
fn product_counter(trees: &[TreeMasure]) -> impl Fn(&[i64]) -> Result<u128, SeriesError> + '_ {
    move |mu: &[i64]| {
        let mut acc: u128 = 1;
        for (tree, &m) in trees.iter().zip(mu) {
            let c = tree
                .count_bi_retraction(0, m)
                .map_err(|e| SeriesError::Counter(e.to_string()))?;
            acc *= c.count;
        }
        Ok(acc)
    }
}

pub fn gk_lhs(
    matrix: Option<&str>,
    q: u64,
    depth: i64,
    truncation: u32,
) -> Result<CommandOutput, Refusal> {
    let sys = match matrix {
        Some(m) => load_system(Some(m), None)?,
        None => rank_one_system(),
    };
    let components = rank_one_components(&sys)?;
    let trees: Vec<TreeMasure> = (0..components)
        .map(|_| build_tree(q, depth))
        .collect::<Result<_, _>>()?;
    let counter = product_counter(&trees);
    let lhs = lhs_from_counts(components, truncation, counter)
        .map_err(|e| Refusal::new("DepthExceeded", e))?;
    let js = series_to_json(&lhs);
    Ok(CommandOutput {
        payload: serde_json::to_value(&js).unwrap(),
        certification: vec![format!(
            "counts from {} tree(s) with q = {q}, depth {depth}; truncation {truncation}",
            components
        )],
        csv: Some(series_csv(&lhs)),
        verdict_failure: false,
    })
}

pub fn gk_rhs(
    matrix: Option<&str>,
    truncation: u32,
    q: Option<i64>,
) -> Result<CommandOutput, Refusal> {
    let sys = match matrix {
        Some(m) => load_system(Some(m), None)?,
        None => rank_one_system(),
    };
    let mults = default_multiplicities(&sys, truncation);
    let h0 = CoweightSeries::one(sys.index_count(), truncation);
    let rhs =
        rhs_product(&sys, truncation, &mults, &h0).map_err(|e| Refusal::new("SeriesError", e))?;
    let mut payload = serde_json::to_value(series_to_json(&rhs)).unwrap();
    if let Some(qv) = q {
        if qv < 2 {
            return Err(Refusal::new("BadQ", "--q must be >= 2"));
        }
        let at = rat_int(qv);
        let evaluated: Vec<_> = rhs
            .entries_sorted()
            .into_iter()
            .map(|(k, v)| json!({"mu": k, "value": format_rat(&v.eval(&at))}))
            .collect();
        payload = json!({"series": payload, "evaluated_at_q": qv, "values": evaluated});
    }
    Ok(CommandOutput {
        payload,
        certification: vec![
            format!("all positive real roots of coroot height <= {truncation} carry multiplicity 1 (reductive default)"),
            "H_0 = 1 (reductive default); supply explicit multiplicities in library use".into(),
        ],
        csv: Some(series_csv(&rhs)),
        verdict_failure: false,
    })
}

fn series_csv(s: &CoweightSeries) -> CsvTable {
    CsvTable {
        header: vec!["mu".into(), "coefficient".into()],
        rows: s
            .entries_sorted()
            .into_iter()
            .map(|(k, v)| vec![join_ints(k), format!("{v}")])
            .collect(),
    }
}

pub fn gk_compare(
    matrix: Option<&str>,
    q: u64,
    depth: i64,
    truncation: u32,
) -> Result<CommandOutput, Refusal> {
    let sys = match matrix {
        Some(m) => load_system(Some(m), None)?,
        None => rank_one_system(),
    };
    let components = rank_one_components(&sys)?;
    let trees: Vec<TreeMasure> = (0..components)
        .map(|_| build_tree(q, depth))
        .collect::<Result<_, _>>()?;
    let counter = product_counter(&trees);
    let lhs = lhs_from_counts(components, truncation, counter)
        .map_err(|e| Refusal::new("DepthExceeded", e))?;
    let mults = default_multiplicities(&sys, truncation);
    let h0 = CoweightSeries::one(sys.index_count(), truncation);
    let rhs =
        rhs_product(&sys, truncation, &mults, &h0).map_err(|e| Refusal::new("SeriesError", e))?;
    let at = rat_int(q as i64);
    let diffs = lhs
        .compare(&rhs, Some(&at))
        .map_err(|e| Refusal::new("SeriesError", e))?;
    let diff_rows: Vec<_> = diffs
        .iter()
        .map(|d| {
            json!({
                "mu": d.mu,
                "lhs": format_rat(&d.left.eval(&at)),
                "rhs": format_rat(&d.right.eval(&at)),
            })
        })
        .collect();
    Ok(CommandOutput {
        payload: json!({
            "equal": diffs.is_empty(),
            "q": q,
            "truncation": truncation,
            "diffs": diff_rows,
        }),
        certification: vec![format!(
            "left side from tree counts at depth {depth}; right side truncated product; exact rational comparison at q = {q}"
        )],
        csv: None,
        verdict_failure: !diffs.is_empty(),
    })
}

pub fn path_count_estimate_cmd(
    matrix: Option<&str>,
    datum_file: Option<&Path>,
    lambda: &str,
    mu: &str,
    q: Option<i64>,
    height: i64,
) -> Result<CommandOutput, Refusal> {
    let sys = load_system(matrix, datum_file)?;
    let shape_coeffs = parse_i64_list(lambda)?;
    let mu_coeffs = parse_i64_list(mu)?;
    if shape_coeffs.len() != sys.index_count() || mu_coeffs.len() != sys.index_count() {
        return Err(Refusal::new(
            "BadVector",
            "--lambda and --mu take coroot coefficients (one per index)",
        ));
    }
    let shape = sys.coweight_from_coroot_ints(&shape_coeffs);
    let end = shape.add(&sys.coweight_from_coroot_ints(&mu_coeffs));
    let est = path_count_estimate(&sys, &shape, &end, height)
        .map_err(|e| Refusal::new("EnumerationFailed", e))?;
    let mut payload = BTreeMap::new();
    payload.insert("weight".to_string(), json!(format!("{}", est.weight)));
    payload.insert(
        "weight_terms".to_string(),
        json!(est
            .weight
            .terms()
            .map(|(e, c)| (e.to_string(), format_rat(c)))
            .collect::<BTreeMap<_, _>>()),
    );
    payload.insert("path_count".to_string(), json!(est.path_count));
    payload.insert("experimental".to_string(), json!(est.experimental));
    if let Some(qv) = q {
        if qv < 2 {
            return Err(Refusal::new("BadQ", "--q must be >= 2"));
        }
        payload.insert(
            "evaluated".to_string(),
            json!(format_rat(&est.weight.eval(&rat_int(qv)))),
        );
    }
    let mut cert = vec![format!("paths enumerated with root height cutoff {height}")];
    if est.experimental {
        cert.push("EXPERIMENTAL: the q-weight model is calibrated on rank-one oracles only".into());
    }
    Ok(CommandOutput {
        payload: serde_json::Value::Object(payload.into_iter().collect()),
        certification: cert,
        csv: None,
        verdict_failure: false,
    })
}
