//! The built-in reference corpus and the checker behind `nicel corpus`.
//!
//! Every expected fact lives in `corpus/*.toml` next to a `source` string
//! naming the table row or worked example it was transcribed from.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use anyhow::{anyhow, bail, Context, Result};
use nicel_core::constructions::{contraction_limit, one_bracket_extension};
use nicel_core::einstein::{solve_k, verify_einstein, Flavor, MetricValues, Mode};
use nicel_core::exactla::{format_rational, parse_rational, rat, Rational};
use nicel_core::parser::{parse_coefficient, parse_tuple};
use nicel_core::{
    build_diagram, solve_diagonal, solve_sigma, AlgebraDocument, EinsteinCertificate, Involution, Metric, Scalar,
    SigmaDiagonalMetric, SolveOptions, SolveReport, StructureConstants, Surd,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::input::parse_surd_sum;
use crate::report::{pair, verdict_key};

/// Collection name and TOML text, in report order.
pub const FILES: [(&str, &str); 5] = [
    ("obstructed9", include_str!("../corpus/obstructed9.toml")),
    ("diagonal8", include_str!("../corpus/diagonal8.toml")),
    ("sigma8", include_str!("../corpus/sigma8.toml")),
    ("sigma9", include_str!("../corpus/sigma9.toml")),
    ("examples", include_str!("../corpus/examples.toml")),
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    collection: String,
    entry: Vec<toml::Table>,
}

/// Facts attached to one algebra; all optional.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFacts {
    /// Upper central series dimensions, e.g. `"24679"`.
    pub ucs: Option<String>,
    /// Verdict key of the diagonal solver (see [`verdict_key`]).
    pub diagonal: Option<String>,
    /// 1-based nodes fixed to `|g| = 1` for the diagonal run.
    pub gauge: Option<Vec<usize>>,
    /// Number of diagonal certificates under `gauge`.
    pub certificates: Option<usize>,
    /// Subscripts of the forced zeros of `X`, e.g. `["159"]`.
    pub hyperplane: Option<Vec<String>>,
    /// Unique solution of `tM X = [1]`.
    pub x: Option<Vec<String>>,
    pub det: Option<String>,
    #[serde(default)]
    pub metric: Vec<ExpectedMetric>,
    #[serde(default)]
    pub sigma_verdict: Vec<ExpectedSigmaVerdict>,
    pub extension: Option<ExpectedExtension>,
    pub contraction: Option<ExpectedContraction>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedMetric {
    /// Cycle notation; identity when absent.
    pub sigma: Option<String>,
    /// Orthonormal diagonal metric `diag(±1)`.
    pub signs: Option<String>,
    #[serde(default)]
    pub orbits: Vec<String>,
    #[serde(default)]
    pub values: Vec<String>,
    pub signature: Option<String>,
    /// The solver must emit a certificate with exactly these values.
    #[serde(default)]
    pub solver: bool,
    /// Values are irrational sums; compare within the tolerance.
    #[serde(default)]
    pub numeric: bool,
    pub source: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSigmaVerdict {
    pub sigma: String,
    pub verdict: String,
    pub source: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedExtension {
    pub edge: [usize; 2],
    pub result: String,
    pub label: String,
    pub source: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedContraction {
    pub result: String,
    pub label: String,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub collection: &'static str,
    pub label: String,
    pub source: String,
    pub document: AlgebraDocument,
    pub facts: ExpectedFacts,
}

impl CorpusEntry {
    pub fn structure_constants(&self) -> StructureConstants {
        StructureConstants::from_document(&self.document)
    }
}

fn parse_file(collection: &'static str, text: &str) -> Result<Vec<CorpusEntry>> {
    let raw: RawFile = toml::from_str(text).with_context(|| format!("corpus file {collection}"))?;
    if raw.collection != collection {
        bail!("corpus file {collection} declares collection {:?}", raw.collection);
    }
    raw.entry
        .into_iter()
        .map(|mut table| {
            let mut take = |key: &str| -> Result<String> {
                match table.remove(key) {
                    Some(toml::Value::String(s)) => Ok(s),
                    _ => bail!("corpus file {collection}: entry without string `{key}`"),
                }
            };
            let (label, tuple, source) = (take("label")?, take("tuple")?, take("source")?);
            let facts: ExpectedFacts =
                table.try_into().with_context(|| format!("corpus entry {collection}/{label}"))?;
            let mut document = parse_tuple(&tuple).with_context(|| format!("corpus entry {collection}/{label}"))?;
            document.name = Some(label.clone());
            Ok(CorpusEntry { collection, label, source, document, facts })
        })
        .collect()
}

/// All entries, in file order within each collection.
pub fn entries() -> &'static [CorpusEntry] {
    static ENTRIES: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        FILES
            .iter()
            .map(|(c, text)| parse_file(c, text))
            .collect::<Result<Vec<_>>>()
            .expect("built-in corpus parses")
            .into_iter()
            .flatten()
            .collect()
    })
}

/// First entry with this label, preferring the worked examples.
pub fn lookup(label: &str) -> Option<&'static CorpusEntry> {
    let all = entries();
    all.iter().find(|e| e.collection == "examples" && e.label == label).or_else(|| all.iter().find(|e| e.label == label))
}

/// Outcome of comparing one expected fact against the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactResult {
    pub fact: String,
    pub source: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryResult {
    pub collection: String,
    pub label: String,
    pub source: String,
    pub facts: Vec<FactResult>,
}

impl EntryResult {
    pub fn mismatches(&self) -> impl Iterator<Item = &FactResult> {
        self.facts.iter().filter(|f| !f.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollectionSummary {
    pub entries: usize,
    pub facts: usize,
    pub mismatches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub tolerance: f64,
    pub summary: BTreeMap<String, CollectionSummary>,
    pub entries: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn mismatches(&self) -> usize {
        self.entries.iter().map(|e| e.mismatches().count()).sum()
    }
}

/// `filter` keeps entries whose label starts with it or whose collection
/// equals it.
pub fn run(filter: Option<&str>, tolerance: f64) -> CorpusReport {
    let selected: Vec<(usize, &CorpusEntry)> = entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| filter.is_none_or(|f| e.label.starts_with(f) || e.collection == f))
        .collect();
    let mut results: Vec<(usize, usize, EntryResult)> = selected
        .par_iter()
        .map(|&(ordinal, e)| {
            let coll = FILES.iter().position(|(c, _)| *c == e.collection).expect("known collection");
            (coll, ordinal, check_entry(e, tolerance))
        })
        .collect();
    // collection, then label, then file position for repeated labels
    results.sort_by(|a, b| (a.0, &a.2.label, a.1).cmp(&(b.0, &b.2.label, b.1)));
    let entries: Vec<EntryResult> = results.into_iter().map(|(_, _, r)| r).collect();
    let mut summary = BTreeMap::new();
    for r in &entries {
        let s = summary
            .entry(r.collection.clone())
            .or_insert(CollectionSummary { entries: 0, facts: 0, mismatches: 0 });
        s.entries += 1;
        s.facts += r.facts.len();
        s.mismatches += r.mismatches().count();
    }
    CorpusReport { tolerance, summary, entries }
}

struct Checker<'a> {
    entry: &'a CorpusEntry,
    facts: Vec<FactResult>,
}

impl Checker<'_> {
    fn push(&mut self, fact: impl Into<String>, source: &str, expected: impl Into<String>, actual: impl Into<String>) {
        let (expected, actual) = (expected.into(), actual.into());
        let ok = expected == actual;
        self.facts.push(FactResult { fact: fact.into(), source: source.to_owned(), expected, actual, ok });
    }

    fn fail(&mut self, fact: impl Into<String>, source: &str, expected: impl Into<String>, err: anyhow::Error) {
        self.facts.push(FactResult {
            fact: fact.into(),
            source: source.to_owned(),
            expected: expected.into(),
            actual: format!("error: {err:#}"),
            ok: false,
        });
    }
}

pub fn check_entry(entry: &CorpusEntry, tol: f64) -> EntryResult {
    let mut ck = Checker { entry, facts: Vec::new() };
    let src = entry.source.as_str();
    let sc = entry.structure_constants();
    match sc.validate() {
        Ok(()) => ck.push("nice nilpotent Lie algebra", src, "valid", "valid"),
        Err(e) => ck.fail("nice nilpotent Lie algebra", src, "valid", e.into()),
    }
    if ck.facts.iter().all(|f| f.ok) {
        check_algebra(&mut ck, &sc, tol);
    }
    EntryResult {
        collection: entry.collection.to_owned(),
        label: entry.label.clone(),
        source: entry.source.clone(),
        facts: ck.facts,
    }
}

fn check_algebra(ck: &mut Checker<'_>, sc: &StructureConstants, tol: f64) {
    let facts = &ck.entry.facts;
    let src = ck.entry.source.clone();
    let src = src.as_str();
    if let Some(ucs) = &facts.ucs {
        match sc.upper_central_series() {
            Ok(d) => ck.push("UCS dimensions", src, ucs.clone(), d.iter().filter(|&&k| k > 0).map(usize::to_string).collect::<String>()),
            Err(e) => ck.fail("UCS dimensions", src, ucs.clone(), e.into()),
        }
    }
    let rm = match build_diagram(sc) {
        Ok(d) => d.root_matrix(),
        Err(e) => return ck.fail("nice diagram", src, "built", e.into()),
    };
    if let Some(det) = &facts.det {
        // row order, hence the sign, is a convention
        let actual = if rm.rows() == rm.cols() {
            rm.rational().det().map(|d| format_rational(&d).trim_start_matches('-').to_owned()).unwrap_or_else(|e| format!("error: {e}"))
        } else {
            format!("not square ({}x{})", rm.rows(), rm.cols())
        };
        ck.push("|det M|", src, normalize_rational(det.trim_start_matches('-')), actual);
    }
    if let Some(x) = &facts.x {
        let expected = paren(x.iter().map(|v| normalize_rational(v)));
        let actual = match solve_k(&rm, Flavor::Einstein) {
            None => "no solution".to_owned(),
            Some(s) if s.dimension() > 0 => format!("{}-parameter family", s.dimension()),
            Some(s) => paren(s.particular.iter().map(format_rational)),
        };
        ck.push("X", src, expected, actual);
    }
    let needs_diagonal = facts.diagonal.is_some()
        || facts.hyperplane.is_some()
        || facts.certificates.is_some()
        || facts.metric.iter().any(|m| m.solver && m.sigma.is_none());
    let diagonal = if needs_diagonal {
        let gauge = facts.gauge.clone().unwrap_or_default();
        let opts = SolveOptions { gauge_nodes: gauge.iter().map(|g| g - 1).collect(), tolerance: tol, ..Default::default() };
        match solve_diagonal(sc, &opts) {
            Ok(r) => Some(r),
            Err(e) => {
                ck.fail("diagonal solver", src, facts.diagonal.clone().unwrap_or_default(), e.into());
                None
            }
        }
    } else {
        None
    };
    if let Some(r) = &diagonal {
        if let Some(v) = &facts.diagonal {
            ck.push("diagonal verdict", src, v.clone(), verdict_key(&r.verdict));
        }
        if let Some(h) = &facts.hyperplane {
            let actual = match r.verdict.obstruction() {
                Some(nicel_core::einstein::Obstruction::H { indices }) => {
                    indices.iter().map(|e| e.subscript()).collect::<Vec<_>>().join(",")
                }
                _ => "none".to_owned(),
            };
            ck.push("forced zeros of X", src, h.join(","), actual);
        }
        if let Some(n) = facts.certificates {
            ck.push("number of certificates", src, n.to_string(), r.verdict.certificates().len().to_string());
        }
    }
    for (k, m) in facts.metric.iter().enumerate() {
        check_metric(ck, sc, k + 1, m, diagonal.as_ref(), tol);
    }
    for sv in &facts.sigma_verdict {
        let fact = format!("sigma {} verdict", sv.sigma);
        let actual = Involution::parse(&sv.sigma, sc.dim())
            .and_then(|sigma| solve_sigma(sc, &sigma, &SolveOptions { tolerance: tol, ..Default::default() }));
        match actual {
            Ok(r) => ck.push(fact, &sv.source, sv.verdict.clone(), verdict_key(&r.verdict)),
            Err(e) => ck.fail(fact, &sv.source, sv.verdict.clone(), e.into()),
        }
    }
    if let Some(ext) = &facts.extension {
        let fact = format!("extension at ({},{}) matches {}", ext.edge[0], ext.edge[1], ext.label);
        match extension_matches(sc, ext) {
            Ok(ok) => ck.push(fact, &ext.source, "isomorphic diagram, equal root matrix", if ok { "isomorphic diagram, equal root matrix" } else { "different" }),
            Err(e) => ck.fail(fact, &ext.source, "isomorphic diagram, equal root matrix", e),
        }
    }
    if let Some(con) = &facts.contraction {
        check_contraction(ck, sc, con, tol);
    }
}

fn check_metric(
    ck: &mut Checker<'_>,
    sc: &StructureConstants,
    k: usize,
    m: &ExpectedMetric,
    diagonal: Option<&SolveReport>,
    tol: f64,
) {
    let what = format!("metric {k}");
    let expected = match build_expected_metric(m, sc.dim()) {
        Ok(e) => e,
        Err(e) => return ck.fail(format!("{what} transcription"), &m.source, "well formed", e),
    };
    let half = rat(1, 2);
    let (metric, check_tol) = match &expected {
        Expected::Signs(metric) => (metric.clone(), 0.0),
        Expected::Sigma(s) => (s.to_metric(), if s.is_exact() { 0.0 } else { tol }),
    };
    let report = verify_einstein(sc, &metric, &half, check_tol);
    let mode = report.mode;
    let verdict = if report.passes { format!("{mode} pass") } else { format!("{mode} fail, max residual {:.3e}", report.max_abs) };
    let want = if check_tol == 0.0 { "exact pass" } else { "numeric pass" };
    ck.push(format!("{what} is Einstein"), &m.source, want, verdict);
    if let Some(sig) = &m.signature {
        let actual = match &expected {
            Expected::Signs(metric) => metric.signature(),
            Expected::Sigma(s) => s.signature(),
        };
        ck.push(format!("{what} signature"), &m.source, sig.clone(), pair(actual));
    }
    if !m.solver {
        return;
    }
    let Expected::Sigma(want) = &expected else {
        return ck.push(format!("{what} reproduced by solver"), &m.source, "orbit values", "signs-only metric");
    };
    let owned;
    let report = if want.sigma.is_identity() {
        diagonal
    } else {
        owned = solve_sigma(sc, &want.sigma, &SolveOptions { tolerance: tol, ..Default::default() }).ok();
        owned.as_ref()
    };
    let Some(report) = report else {
        return ck.push(format!("{what} reproduced by solver"), &m.source, "certificate", "solver error");
    };
    let hit = report.verdict.certificates().iter().any(|c| same_values(c, want, tol));
    ck.push(
        format!("{what} reproduced by solver"),
        &m.source,
        "certificate found",
        if hit { "certificate found".to_owned() } else { format!("no match among {} certificate(s)", report.verdict.certificates().len()) },
    );
}

enum Expected {
    Signs(Metric),
    Sigma(SigmaDiagonalMetric),
}

fn build_expected_metric(m: &ExpectedMetric, n: usize) -> Result<Expected> {
    if let Some(signs) = &m.signs {
        return Ok(Expected::Signs(Metric::from_signs(signs)?));
    }
    let sigma = match &m.sigma {
        Some(s) => Involution::parse(s, n)?,
        None => Involution::identity(n),
    };
    if m.orbits.len() != m.values.len() {
        bail!("{} orbit labels for {} values", m.orbits.len(), m.values.len());
    }
    let mut exact: Vec<Option<Surd>> = vec![None; n];
    let mut approx: Vec<Option<f64>> = vec![None; n];
    for (label, value) in m.orbits.iter().zip(&m.values) {
        let nodes = orbit_nodes(label, n)?;
        let closed = match nodes.as_slice() {
            [a] => sigma.apply(*a) == *a,
            [a, b] => sigma.apply(*a) == *b,
            _ => false,
        };
        if !closed {
            bail!("orbit label {label:?} is not an orbit of {sigma}");
        }
        for &i in &nodes {
            if m.numeric {
                approx[i] = Some(parse_surd_sum(value)?.to_f64());
            } else {
                exact[i] = Some(parse_coefficient(value)?);
            }
        }
    }
    let values = if m.numeric {
        MetricValues::Numeric(collect_nodes(approx)?)
    } else {
        MetricValues::Exact(collect_nodes(exact)?)
    };
    Ok(Expected::Sigma(SigmaDiagonalMetric::new(sigma, values)?))
}

fn collect_nodes<T>(v: Vec<Option<T>>) -> Result<Vec<T>> {
    v.into_iter().enumerate().map(|(i, x)| x.ok_or_else(|| anyhow!("no value for node {}", i + 1))).collect()
}

/// `"13"` is the cycle (1,3); `"7"` and `"77"` the fixed node 7. Labels for
/// nodes past 9 are comma-separated.
fn orbit_nodes(label: &str, n: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = if label.contains(',') {
        label.split(',').map(|s| s.trim().parse::<usize>()).collect::<Result<_, _>>()?
    } else {
        label.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| anyhow!("bad orbit label {label:?}"))).collect::<Result<_>>()?
    };
    let mut nodes: Vec<usize> = match parts.as_slice() {
        [a] => vec![*a],
        [a, b] if a == b => vec![*a],
        [a, b] => vec![*a, *b],
        _ => bail!("bad orbit label {label:?}"),
    };
    for v in &mut nodes {
        if *v == 0 || *v > n {
            bail!("orbit label {label:?} outside 1..={n}");
        }
        *v -= 1;
    }
    Ok(nodes)
}

fn same_values(c: &EinsteinCertificate, want: &SigmaDiagonalMetric, tol: f64) -> bool {
    if c.sigma != want.sigma {
        return false;
    }
    (0..want.dim()).all(|i| match (&c.g[i], want.value(i)) {
        (Scalar::Exact(a), Scalar::Exact(b)) => *a == b,
        (a, b) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= tol * b.abs().max(1.0)
        }
    })
}

fn extension_matches(sc: &StructureConstants, ext: &ExpectedExtension) -> Result<bool> {
    let [i, j] = ext.edge;
    if i == 0 || j == 0 {
        bail!("edge indices are 1-based");
    }
    let ours = one_bracket_extension(sc, i - 1, j - 1)?;
    let target = StructureConstants::from_document(&parse_tuple(&ext.result)?);
    target.validate()?;
    let (d_ours, d_target) = (build_diagram(&ours)?, build_diagram(&target)?);
    let Some(perm) = d_ours.isomorphism(&d_target)? else {
        return Ok(false);
    };
    Ok(build_diagram(&ours.relabel(&perm))?.root_matrix() == d_target.root_matrix())
}

fn check_contraction(ck: &mut Checker<'_>, sc: &StructureConstants, con: &ExpectedContraction, tol: f64) {
    let fact = format!("contraction limit is {}", con.label);
    let limit = (|| -> Result<StructureConstants> {
        let rm = build_diagram(sc)?.root_matrix();
        let s = solve_k(&rm, Flavor::Einstein).ok_or_else(|| anyhow!("no solution of tM X = [1]"))?;
        if s.dimension() > 0 {
            bail!("X is not unique");
        }
        Ok(contraction_limit(sc, &s.particular)?)
    })();
    let limit = match limit {
        Ok(l) => l,
        Err(e) => return ck.fail(fact, &con.source, con.result.clone(), e),
    };
    let target = parse_tuple(&con.result).map(|d| StructureConstants::from_document(&d));
    match target {
        Ok(t) => ck.push(fact, &con.source, t.to_string(), limit.to_string()),
        Err(e) => return ck.fail(fact, &con.source, con.result.clone(), e.into()),
    }
    let fact = format!("{} certificates verify", con.label);
    let actual = match solve_diagonal(&limit, &SolveOptions { tolerance: tol, ..Default::default() }) {
        Ok(r) if !r.verdict.certificates().is_empty() => {
            let all = r.verdict.certificates().iter().all(|c| {
                let t = if c.mode == Mode::Exact { 0.0 } else { tol };
                verify_einstein(&limit, &c.metric().to_metric(), &rat(1, 2), t).passes
            });
            if all { "all verify".to_owned() } else { "a certificate fails".to_owned() }
        }
        Ok(r) => verdict_key(&r.verdict),
        Err(e) => format!("error: {e}"),
    };
    ck.push(fact, &con.source, "all verify", actual);
}

fn paren(items: impl Iterator<Item = String>) -> String {
    format!("({})", items.collect::<Vec<_>>().join(","))
}

fn normalize_rational(v: &str) -> String {
    parse_rational(v).map(|q: Rational| format_rational(&q)).unwrap_or_else(|_| format!("unparsable {v:?}"))
}
