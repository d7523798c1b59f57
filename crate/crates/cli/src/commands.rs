//! The `nicel` subcommands. Each writes its report to `out` and returns the
//! process outcome; input errors propagate as `Err`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nicel_core::constructions::extension_tower;
use nicel_core::einstein::{gauge_group, verify_einstein, Flavor, SigmaSystem};
use nicel_core::exactla::{format_rational, parse_rational};
use nicel_core::{build_diagram, solve_diagonal, solve_sigma, Involution, SolveOptions, SolveReport, Verdict};
use serde::Serialize;

use crate::corpus;
use crate::input::{load_algebra, load_metric};
use crate::report::{metric_cell, pair, table, verdict_text, CertificateRecord};

/// Default absolute Ricci residual for numeric certificates.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Success, certified or verified.
    Ok = 0,
    /// Obstructed, nonexistent, failed verification or corpus mismatch.
    Negative = 1,
    /// The solver could neither certify nor refute.
    Unknown = 3,
}

/// Exit status for input errors.
pub const EXIT_INPUT_ERROR: i32 = 2;

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "nicel", version, about = "Einstein metrics on nice nilpotent Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagram, root matrix, ranks and the K/H/L conditions.
    Analyze(AnalyzeArgs),
    /// Diagonal or sigma-diagonal Einstein metrics.
    Solve(SolveArgs),
    /// Check `ric = lambda id` for a given metric.
    Verify(VerifyArgs),
    /// One-bracket extension tower with a certificate per level.
    Extend(ExtendArgs),
    /// Run the pipeline on the built-in corpus and diff against expected facts.
    Corpus(CorpusArgs),
}

/// Algebra file (tuple or `dim N` bracket format) or `corpus:LABEL`.
#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: String,
    #[arg(long)]
    pub json: bool,
    /// Print the root matrix.
    #[arg(long)]
    pub matrix: bool,
    /// List the diagram involutions.
    #[arg(long)]
    pub involutions: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: String,
    /// Involution in cycle notation, e.g. "(1,3)(2,4)(5,6)".
    #[arg(long, conflicts_with = "all_involutions")]
    pub sigma: Option<String>,
    /// Solve for the identity and every diagram involution.
    #[arg(long)]
    pub all_involutions: bool,
    #[arg(long, default_value = "einstein")]
    pub flavor: Flavor,
    /// Report `-g`, an Einstein metric with negative constant.
    #[arg(long)]
    pub negate: bool,
    /// Comma-separated 1-based nodes normalised to |g| = 1; with
    /// `--all-involutions` only the diagonal run uses it.
    #[arg(long)]
    pub gauge: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: String,
    /// Lines `i j VALUE`, or `signature ++--` for an orthonormal basis.
    pub metric: PathBuf,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    pub input: String,
    /// Anchor and first partner, 1-based: `--edge 1,4`.
    #[arg(long)]
    pub edge: String,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    /// Directory for the level files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Label prefix (e.g. `84`) or collection name.
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

/// `--tol`, else `NICEL_TOL`, else [`DEFAULT_TOLERANCE`].
pub fn tolerance(flag: Option<f64>) -> Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("NICEL_TOL") {
            Ok(v) => v.trim().parse().with_context(|| format!("NICEL_TOL={v:?} is not a number"))?,
            Err(_) => DEFAULT_TOLERANCE,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        bail!("tolerance must be a nonnegative number, got {tol}");
    }
    Ok(tol)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Analyze(a) => analyze(&a, out),
        Command::Solve(a) => solve(&a, out),
        Command::Verify(a) => verify(&a, out),
        Command::Extend(a) => extend(&a, out),
        Command::Corpus(a) => run_corpus(&a, out),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeReport {
    algebra: String,
    tuple: String,
    dimension: usize,
    brackets: usize,
    lcs: Vec<usize>,
    ucs: Vec<usize>,
    index_set: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    root_matrix: Option<Vec<Vec<i64>>>,
    rank: usize,
    rank_gf2: usize,
    det: Option<String>,
    gf2_surjective: bool,
    k: KStatus,
    h: HStatus,
    l: LStatus,
    gauge: GaugeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    involutions: Option<Vec<String>>,
}

#[derive(Serialize)]
struct KStatus {
    solvable: bool,
    parameters: Option<usize>,
    #[serde(rename = "X")]
    x: Option<Vec<String>>,
}

#[derive(Serialize)]
struct HStatus {
    status: &'static str,
    forced_zeros: Vec<String>,
}

#[derive(Serialize)]
struct LStatus {
    status: &'static str,
    cells: usize,
    passing_cells: usize,
    exhaustive: bool,
}

#[derive(Serialize)]
struct GaugeSummary {
    connected_dim: usize,
    sign_kernel_dim: usize,
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<Outcome> {
    let alg = load_algebra(&args.input)?;
    let sc = &alg.sc;
    let diagram = build_diagram(sc)?;
    let rm = diagram.root_matrix();
    let (q, g2) = (rm.rational(), rm.gf2());
    let sys = SigmaSystem::new(sc, &Involution::identity(sc.dim()))?;
    let solution = sys.solve_k(Flavor::Einstein);
    let k = KStatus {
        solvable: solution.is_some(),
        parameters: solution.as_ref().map(|s| s.dimension()),
        x: solution.as_ref().map(|s| s.particular.iter().map(format_rational).collect()),
    };
    let (h, l) = match &solution {
        None => (
            HStatus { status: "n/a", forced_zeros: Vec::new() },
            LStatus { status: "n/a", cells: 0, passing_cells: 0, exhaustive: false },
        ),
        Some(s) => {
            let zeros: Vec<String> =
                nicel_core::einstein::check_h(s).iter().map(|&r| sys.index_set()[r].subscript()).collect();
            let h = HStatus { status: if zeros.is_empty() { "clean" } else { "obstructed" }, forced_zeros: zeros };
            let l = if h.status == "clean" {
                let cells = sys.cells(s);
                let passing = cells.passing().count();
                let status = match (passing, cells.exhaustive) {
                    (0, true) => "obstructed",
                    (0, false) => "unknown",
                    _ => "clean",
                };
                LStatus { status, cells: cells.cells.len(), passing_cells: passing, exhaustive: cells.exhaustive }
            } else {
                LStatus { status: "n/a", cells: 0, passing_cells: 0, exhaustive: false }
            };
            (h, l)
        }
    };
    let gauge = gauge_group(&rm);
    let report = AnalyzeReport {
        algebra: alg.name.clone(),
        tuple: sc.to_string(),
        dimension: sc.dim(),
        brackets: rm.rows(),
        lcs: sc.lower_central_series()?,
        ucs: sc.upper_central_series()?,
        index_set: rm.index_set().iter().map(|e| e.subscript()).collect(),
        root_matrix: args.matrix.then(|| rm.entries().to_vec()),
        rank: q.rank(),
        rank_gf2: g2.rank(),
        det: if q.is_square() { Some(format_rational(&q.det()?)) } else { None },
        gf2_surjective: g2.is_surjective(),
        k,
        h,
        l,
        gauge: GaugeSummary { connected_dim: gauge.connected_dim, sign_kernel_dim: gauge.sign_kernel.len() },
        involutions: if args.involutions {
            Some(diagram.involutions()?.iter().map(ToString::to_string).collect())
        } else {
            None
        },
    };
    if args.json {
        emit_json(out, &report)?;
    } else {
        let mut s = String::new();
        writeln!(s, "algebra   {}", report.algebra)?;
        writeln!(s, "tuple     {}", report.tuple)?;
        writeln!(
            s,
            "diagram   {} nodes, {} arrows, |I| = {}, LCS {:?}, UCS {:?}",
            report.dimension,
            diagram.arrows().len(),
            report.brackets,
            report.lcs,
            report.ucs
        )?;
        if args.matrix {
            writeln!(s, "root matrix (rows indexed by I):")?;
            for line in rm.labeled_dump().lines() {
                writeln!(s, "  {line}")?;
            }
        }
        let det = report.det.as_deref().map(|d| format!(", det {d}")).unwrap_or_default();
        writeln!(s, "ranks     Q {}, GF(2) {}{det}", report.rank, report.rank_gf2)?;
        writeln!(s, "gauge     dim ker M = {}, dim ker M_2 = {}", gauge.connected_dim, gauge.sign_kernel.len())?;
        writeln!(s, "{}", klh_line(&report))?;
        if let Some(inv) = &report.involutions {
            if inv.is_empty() {
                writeln!(s, "involutions: none")?;
            } else {
                writeln!(s, "involutions: {}", inv.join(" "))?;
            }
        }
        out.write_all(s.as_bytes())?;
    }
    Ok(Outcome::Ok)
}

fn klh_line(r: &AnalyzeReport) -> String {
    let k = match (&r.k.x, r.k.parameters) {
        (None, _) => "K: obstructed".to_owned(),
        (Some(x), Some(0)) => format!("K: solvable, unique X = ({})", x.join(",")),
        (Some(x), Some(d)) => format!("K: solvable, {d}-parameter family through X0 = ({})", x.join(",")),
        (Some(_), None) => unreachable!("parameters accompany a solution"),
    };
    let h = if r.h.forced_zeros.is_empty() {
        r.h.status.to_owned()
    } else {
        let xs: Vec<String> = r.h.forced_zeros.iter().map(|z| format!("x_{z}")).collect();
        format!("obstructed ({} = 0)", xs.join(", "))
    };
    let m2 = if r.gf2_surjective { "surjective" } else { "not surjective" };
    format!("{k}; H: {h}; L: {}; M_{{Δ,2}}: {m2}", r.l.status)
}

#[derive(Serialize)]
struct SolveRun {
    sigma: String,
    verdict: String,
    summary: String,
    certificates: Vec<CertificateRecord>,
    report: SolveReport,
}

#[derive(Serialize)]
struct SolveOutput {
    algebra: String,
    tuple: String,
    flavor: Flavor,
    negate: bool,
    tolerance: f64,
    runs: Vec<SolveRun>,
}

fn parse_gauge(text: &str, n: usize) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            let k: usize = t.trim().parse().with_context(|| format!("bad gauge node {t:?}"))?;
            if k == 0 || k > n {
                bail!("gauge node {k} outside 1..={n}");
            }
            Ok(k - 1)
        })
        .collect()
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<Outcome> {
    let alg = load_algebra(&args.input)?;
    let n = alg.sc.dim();
    let opts = SolveOptions {
        flavor: args.flavor,
        gauge_nodes: args.gauge.as_deref().map(|g| parse_gauge(g, n)).transpose()?.unwrap_or_default(),
        tolerance: tolerance(args.tol)?,
        ..Default::default()
    };
    let sigmas: Vec<Involution> = if let Some(text) = &args.sigma {
        vec![Involution::parse(text, n)?]
    } else if args.all_involutions {
        let mut all = vec![Involution::identity(n)];
        all.extend(build_diagram(&alg.sc)?.involutions()?);
        all
    } else {
        vec![Involution::identity(n)]
    };
    let mut runs = Vec::new();
    for sigma in &sigmas {
        let report = if sigma.is_identity() {
            solve_diagonal(&alg.sc, &opts)?
        } else if args.all_involutions {
            // a diagonal gauge need not survive the involution
            solve_sigma(&alg.sc, sigma, &SolveOptions { gauge_nodes: Vec::new(), ..opts.clone() })?
        } else {
            solve_sigma(&alg.sc, sigma, &opts)?
        };
        let certificates = report
            .verdict
            .certificates()
            .iter()
            .map(|c| CertificateRecord::new(&alg.name, &report, c, args.negate))
            .collect();
        runs.push(SolveRun {
            sigma: sigma.to_string(),
            verdict: crate::report::verdict_key(&report.verdict),
            summary: verdict_text(&report.verdict),
            certificates,
            report,
        });
    }
    let outcome = solve_outcome(&runs);
    let output = SolveOutput {
        algebra: alg.name.clone(),
        tuple: alg.sc.to_string(),
        flavor: args.flavor,
        negate: args.negate,
        tolerance: opts.tolerance,
        runs,
    };
    if args.json {
        emit_json(out, &output)?;
    } else {
        out.write_all(solve_table(&output, args.negate).as_bytes())?;
    }
    Ok(outcome)
}

/// Certified anywhere wins; otherwise unknown beats a clean negative.
fn solve_outcome(runs: &[SolveRun]) -> Outcome {
    if runs.iter().any(|r| matches!(r.report.verdict, Verdict::Certified { .. })) {
        Outcome::Ok
    } else if runs.iter().any(|r| matches!(r.report.verdict, Verdict::Unknown { .. })) {
        Outcome::Unknown
    } else {
        Outcome::Negative
    }
}

fn solve_table(o: &SolveOutput, negate: bool) -> String {
    let mut rows = Vec::new();
    for run in &o.runs {
        let sigma = if run.sigma.is_empty() || run.sigma == "id" { "id".to_owned() } else { run.sigma.clone() };
        let certs = run.report.verdict.certificates();
        if certs.is_empty() {
            rows.push(vec![o.algebra.clone(), sigma, run.summary.clone(), String::new(), String::new()]);
            continue;
        }
        for c in certs {
            let sig = if negate { (c.signature.1, c.signature.0) } else { c.signature };
            let mode = match c.mode {
                nicel_core::einstein::Mode::Exact => "exact".to_owned(),
                nicel_core::einstein::Mode::Numeric => format!("numeric {:.1e}", c.residual),
            };
            rows.push(vec![o.algebra.clone(), sigma.clone(), metric_cell(c, negate), pair(sig), mode]);
        }
    }
    let mut s = format!("{}\n", o.tuple);
    s.push_str(&table(&["Name", "σ", "Metric", "Sign.", "Mode"], &rows));
    s
}

#[derive(Serialize)]
struct VerifyOutput {
    algebra: String,
    lambda: String,
    signature: String,
    mode: &'static str,
    passes: bool,
    max_abs: f64,
    nonzero: Vec<nicel_core::einstein::ResidualEntry>,
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let alg = load_algebra(&args.input)?;
    let metric = load_metric(&args.metric, alg.sc.dim())?;
    let lambda = parse_rational(&args.lambda).with_context(|| format!("--lambda {:?}", args.lambda))?;
    let tol = tolerance(args.tol)?;
    let r = verify_einstein(&alg.sc, &metric, &lambda, tol);
    let output = VerifyOutput {
        algebra: alg.name.clone(),
        lambda: format_rational(&lambda),
        signature: pair(metric.signature()),
        mode: r.mode,
        passes: r.passes,
        max_abs: r.max_abs,
        nonzero: r.nonzero,
    };
    if args.json {
        emit_json(out, &output)?;
    } else {
        let mut s = String::new();
        if output.passes {
            writeln!(s, "{}: {} pass, ric = {} id, signature {}", output.algebra, output.mode, output.lambda, output.signature)?;
        } else {
            writeln!(
                s,
                "{}: {} FAIL, ric != {} id, max |ric - lambda id| = {:.6e}, signature {}",
                output.algebra, output.mode, output.lambda, output.max_abs, output.signature
            )?;
            let rows: Vec<Vec<String>> =
                output.nonzero.iter().map(|e| vec![e.row.to_string(), e.col.to_string(), e.value.clone()]).collect();
            s.push_str(&table(&["i", "j", "(ric - lambda id)_ij"], &rows));
        }
        out.write_all(s.as_bytes())?;
    }
    Ok(if output.passes { Outcome::Ok } else { Outcome::Negative })
}

#[derive(Serialize)]
struct LevelRecord {
    level: usize,
    dimension: usize,
    edge: (usize, usize),
    algebra: String,
    file: String,
    certificate_file: String,
    contracted: Option<String>,
    verdict: String,
    certificates: usize,
    matches_corpus: Option<String>,
}

#[derive(Serialize)]
struct LevelCertificates {
    algebra: String,
    tuple: String,
    contracted: Option<String>,
    verdict: String,
    certificates: Vec<CertificateRecord>,
}

fn extend(args: &ExtendArgs, out: &mut dyn Write) -> Result<Outcome> {
    let alg = load_algebra(&args.input)?;
    let (anchor, partner) = match args.edge.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [a, b] => (
            a.parse::<usize>().with_context(|| format!("bad edge {:?}", args.edge))?,
            b.parse::<usize>().with_context(|| format!("bad edge {:?}", args.edge))?,
        ),
        _ => bail!("--edge expects `i,j`, got {:?}", args.edge),
    };
    if anchor == 0 || partner == 0 {
        bail!("--edge indices are 1-based");
    }
    let opts = SolveOptions { tolerance: tolerance(args.tol)?, ..Default::default() };
    let levels = extension_tower(&alg.sc, anchor - 1, partner - 1, args.depth, &opts)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let stem: String =
        alg.name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    let mut records = Vec::new();
    let mut outcome = Outcome::Ok;
    for l in &levels {
        let name = format!("{}+{}", alg.name, l.level);
        let file = args.out_dir.join(format!("{stem}_ext{}.alg", l.level));
        let cert_file = args.out_dir.join(format!("{stem}_ext{}.cert.json", l.level));
        let doc = l.algebra.to_document(Some(name.clone()));
        fs::write(&file, nicel_core::parser::render_bracket_file(&doc))
            .with_context(|| format!("writing {}", file.display()))?;
        let target_name = if l.contracted.is_some() { format!("{name} (contraction limit)") } else { name.clone() };
        let certs: Vec<CertificateRecord> =
            l.report.verdict.certificates().iter().map(|c| CertificateRecord::new(&target_name, &l.report, c, false)).collect();
        let bundle = LevelCertificates {
            algebra: name.clone(),
            tuple: l.algebra.to_string(),
            contracted: l.contracted.as_ref().map(ToString::to_string),
            verdict: crate::report::verdict_key(&l.report.verdict),
            certificates: certs,
        };
        let mut text = serde_json::to_string_pretty(&bundle)?;
        text.push('\n');
        fs::write(&cert_file, text).with_context(|| format!("writing {}", cert_file.display()))?;
        if bundle.certificates.is_empty() {
            outcome = match (&l.report.verdict, outcome) {
                (Verdict::Unknown { .. }, Outcome::Ok) => Outcome::Unknown,
                (Verdict::Unknown { .. }, o) => o,
                _ => Outcome::Negative,
            };
        }
        records.push(LevelRecord {
            level: l.level,
            dimension: l.algebra.dim(),
            edge: l.extension,
            algebra: l.algebra.to_string(),
            file: file.display().to_string(),
            certificate_file: cert_file.display().to_string(),
            contracted: bundle.contracted.clone(),
            verdict: bundle.verdict.clone(),
            certificates: bundle.certificates.len(),
            matches_corpus: corpus_match(&l.algebra)?,
        });
    }
    if args.json {
        emit_json(out, &records)?;
    } else {
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                vec![
                    r.level.to_string(),
                    r.dimension.to_string(),
                    format!("({},{})", r.edge.0, r.edge.1),
                    format!("{} ({})", r.verdict, r.certificates),
                    r.matches_corpus.clone().unwrap_or_default(),
                    r.file.clone(),
                ]
            })
            .collect();
        let mut s = table(&["Level", "Dim", "Edge", "Verdict", "Corpus", "File"], &rows);
        for r in &records {
            if let Some(c) = &r.contracted {
                writeln!(s, "level {}: X has zeros, certified on the contraction limit {c}", r.level)?;
            }
        }
        out.write_all(s.as_bytes())?;
    }
    Ok(outcome)
}

/// Label of a corpus algebra with an isomorphic diagram and equal root
/// matrix after relabelling.
fn corpus_match(sc: &nicel_core::StructureConstants) -> Result<Option<String>> {
    let ours = build_diagram(sc)?;
    for e in corpus::entries() {
        let other_sc = e.structure_constants();
        if other_sc.dim() != sc.dim() || other_sc.len() != sc.len() {
            continue;
        }
        let other = build_diagram(&other_sc)?;
        if let Some(perm) = ours.isomorphism(&other)? {
            if build_diagram(&sc.relabel(&perm))?.root_matrix() == other.root_matrix() {
                return Ok(Some(e.label.clone()));
            }
        }
    }
    Ok(None)
}

fn run_corpus(args: &CorpusArgs, out: &mut dyn Write) -> Result<Outcome> {
    let report = corpus::run(args.filter.as_deref(), tolerance(args.tol)?);
    if args.json {
        emit_json(out, &report)?;
    } else {
        let rows: Vec<Vec<String>> = report
            .summary
            .iter()
            .map(|(c, s)| vec![c.clone(), s.entries.to_string(), s.facts.to_string(), s.mismatches.to_string()])
            .collect();
        let mut s = table(&["Collection", "Entries", "Facts", "Mismatches"], &rows);
        for e in &report.entries {
            for f in e.mismatches() {
                writeln!(
                    s,
                    "MISMATCH {}/{}: {}: expected {}, got {} [{}]",
                    e.collection, e.label, f.fact, f.expected, f.actual, f.source
                )?;
            }
        }
        let total: usize = report.summary.values().map(|c| c.facts).sum();
        writeln!(s, "{} entries, {total} facts, {} mismatches", report.entries.len(), report.mismatches())?;
        out.write_all(s.as_bytes())?;
    }
    Ok(if report.mismatches() == 0 { Outcome::Ok } else { Outcome::Negative })
}
