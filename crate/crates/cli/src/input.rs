//! Algebra and metric files, plus the `corpus:LABEL` shorthand.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nicel_core::parser::{parse_bracket_file, parse_coefficient, parse_tuple};
use nicel_core::{AlgebraDocument, Metric, StructureConstants, Surd, SurdSum};

use crate::corpus;

/// A validated algebra and the name it is reported under.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub document: AlgebraDocument,
    pub sc: StructureConstants,
}

impl Algebra {
    pub fn from_document(name: String, document: AlgebraDocument) -> Result<Self> {
        let sc = StructureConstants::from_document(&document);
        sc.validate().with_context(|| format!("{name} is not a nice nilpotent Lie algebra"))?;
        Ok(Algebra { name, document, sc })
    }
}

/// Tuple text, or the line-based format when the first statement is `dim N`.
pub fn parse_algebra_text(text: &str) -> Result<AlgebraDocument> {
    let body: Vec<&str> =
        text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).collect();
    let doc = match body.first() {
        Some(first) if first.starts_with("dim") => parse_bracket_file(text)?,
        Some(_) => parse_tuple(&body.concat())?,
        None => bail!("empty algebra file"),
    };
    Ok(doc)
}

/// `corpus:LABEL` picks a built-in entry; anything else is a file path.
pub fn load_algebra(spec: &str) -> Result<Algebra> {
    if let Some(label) = spec.strip_prefix("corpus:") {
        let entry = corpus::lookup(label).ok_or_else(|| anyhow!("no corpus entry labelled {label:?}"))?;
        return Algebra::from_document(entry.label.clone(), entry.document.clone());
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = parse_algebra_text(&text).with_context(|| format!("parsing {}", path.display()))?;
    let name = doc
        .name
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| spec.to_owned());
    Algebra::from_document(name, doc)
}

/// Lines `i j VALUE` (1-based, either triangle) or a single `signature ++--`.
pub fn parse_metric_text(text: &str, n: usize) -> Result<Metric> {
    let mut entries = Vec::new();
    let mut signs: Option<String> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let at = || format!("metric line {}", lineno + 1);
        match fields.as_slice() {
            ["signature", s] => {
                if signs.is_some() || !entries.is_empty() {
                    bail!("{}: `signature` must be the only statement", at());
                }
                signs = Some((*s).to_owned());
            }
            [i, j, v] => {
                if signs.is_some() {
                    bail!("{}: `signature` must be the only statement", at());
                }
                let idx = |s: &str| -> Result<usize> {
                    let k: usize = s.parse().with_context(|| format!("{}: bad index {s:?}", at()))?;
                    if k == 0 || k > n {
                        bail!("{}: index {k} outside 1..={n}", at());
                    }
                    Ok(k - 1)
                };
                let value = parse_coefficient(v).with_context(at)?;
                entries.push((idx(i)?, idx(j)?, value));
            }
            _ => bail!("{}: expected `i j VALUE` or `signature SIGNS`", at()),
        }
    }
    if let Some(s) = signs {
        if s.chars().count() != n {
            bail!("signature {s:?} has {} entries for dimension {n}", s.chars().count());
        }
        return Ok(Metric::from_signs(&s)?);
    }
    if entries.is_empty() {
        bail!("metric file has no entries");
    }
    Ok(Metric::from_entries(n, &entries)?)
}

pub fn load_metric(path: &Path, n: usize) -> Result<Metric> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_metric_text(&text, n).with_context(|| format!("parsing {}", path.display()))
}

/// `a + b*sqrt(c) - ...` with the operators separated by whitespace.
pub fn parse_surd_sum(text: &str) -> Result<SurdSum> {
    let mut total = SurdSum::zero();
    let mut negate = false;
    let mut expect_term = true;
    for tok in text.split_whitespace() {
        if expect_term {
            let mut s: Surd = parse_coefficient(tok)?;
            if negate {
                s = -s;
            }
            total.add_surd(&s);
            expect_term = false;
        } else {
            negate = match tok {
                "+" => false,
                "-" | "\u{2212}" => true,
                _ => bail!("expected `+` or `-` between terms of {text:?}, found {tok:?}"),
            };
            expect_term = true;
        }
    }
    if expect_term {
        bail!("incomplete sum {text:?}");
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nicel_core::exactla::rat;

    #[test]
    fn tuple_and_bracket_files_agree() {
        let t = parse_algebra_text("# Heisenberg\n(0,0,\n e^{12})\n").unwrap();
        let b = parse_algebra_text("dim 3 name h3\n1 2 3 1\n").unwrap();
        assert_eq!(t.brackets, b.brackets);
        assert_eq!(b.name.as_deref(), Some("h3"));
    }

    #[test]
    fn metric_forms() {
        let m = parse_metric_text("signature ++-\n", 3).unwrap();
        assert_eq!(m.signature(), (2, 1));
        let m = parse_metric_text("1 1 2\n2 3 -1/2\n", 3).unwrap();
        assert_eq!(m.signature(), (2, 1));
        assert!(parse_metric_text("1 2 1\n2 1 2\n3 3 1\n", 3).is_err());
        assert!(parse_metric_text("signature ++\n", 3).is_err());
        assert!(parse_metric_text("1 4 1\n", 3).is_err());
    }

    #[test]
    fn surd_sums() {
        let s = parse_surd_sum("-27/16 + 3/16*sqrt(249)").unwrap();
        assert!((s.to_f64() - (-27.0 / 16.0 + 3.0 / 16.0 * 249f64.sqrt())).abs() < 1e-15);
        assert_eq!(parse_surd_sum("5/2").unwrap(), SurdSum::from_rational(rat(5, 2)));
        assert!(parse_surd_sum("1 +").is_err());
        assert!(parse_surd_sum("1 * 2").is_err());
    }
}
