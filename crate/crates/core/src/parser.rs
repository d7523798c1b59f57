//! Tuple notation `(0,0,e^{12},...)` and the line-based bracket format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::number::{normalize_minus, parse_rational};
use crate::exactla::Surd;

/// One structure constant `[e_i, e_j] = coeff e_k`, 1-based, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Surd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub name: Option<String>,
    pub dimension: usize,
    /// Sorted by `(i, j)`.
    pub brackets: Vec<BracketEntry>,
}

impl AlgebraDocument {
    /// Validates indices and pair uniqueness, orients pairs, and sorts.
    pub fn new(name: Option<String>, dimension: usize, raw: Vec<BracketEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut brackets = Vec::with_capacity(raw.len());
        for mut b in raw {
            if b.coeff.is_zero() {
                continue;
            }
            for idx in [b.i, b.j, b.k] {
                if idx == 0 || idx > dimension {
                    return Err(Error::Input(format!("index {idx} outside 1..={dimension}")));
                }
            }
            if b.i == b.j {
                return Err(Error::Input(format!("bracket of e_{} with itself", b.i)));
            }
            if b.i > b.j {
                std::mem::swap(&mut b.i, &mut b.j);
                b.coeff = -b.coeff;
            }
            if !seen.insert((b.i, b.j)) {
                return Err(Error::NotNice(format!("[e_{}, e_{}] assigned more than once", b.i, b.j)));
            }
            brackets.push(b);
        }
        brackets.sort_by_key(|b| (b.i, b.j));
        Ok(AlgebraDocument { name, dimension, brackets })
    }
}

/// Parses `(s_1,...,s_n)` where slot `k` is `0` or a sum of `coeff e^{ij}`.
pub fn parse_tuple(text: &str) -> Result<AlgebraDocument> {
    let t = normalize_minus(text.trim());
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::parse(None, "tuple must be enclosed in parentheses"))?;
    let slots = split_top_level(inner, &[',']);
    let n = slots.len();
    let mut raw = Vec::new();
    for (k0, slot) in slots.iter().enumerate() {
        let slot: String = slot.chars().filter(|c| !c.is_whitespace()).collect();
        if slot.is_empty() {
            return Err(Error::parse(None, format!("slot {} is empty", k0 + 1)));
        }
        if slot == "0" {
            continue;
        }
        for term in split_terms(&slot) {
            let (i, j, coeff) = parse_term(&term, n)?;
            raw.push(BracketEntry { i, j, k: k0 + 1, coeff });
        }
    }
    AlgebraDocument::new(None, n, raw)
}

/// Splits at separator characters outside `{}` and `()`.
fn split_top_level(s: &str, seps: &[char]) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && seps.contains(&c) {
            out.push(String::new());
        } else {
            out.last_mut().expect("nonempty").push(c);
        }
    }
    out
}

/// Splits a whitespace-free slot into signed terms.
fn split_terms(slot: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in slot.chars() {
        match c {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            _ => {}
        }
        let splits = depth == 0 && (c == '+' || c == '-') && !cur.is_empty() && !cur.ends_with(['*', '/']);
        if splits {
            out.push(std::mem::take(&mut cur));
        }
        if !(splits && c == '+') {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter().map(|t| t.strip_prefix('+').map(str::to_owned).unwrap_or(t)).collect()
}

fn parse_term(term: &str, n: usize) -> Result<(usize, usize, Surd)> {
    let pos = term
        .find("e^{")
        .ok_or_else(|| Error::parse(None, format!("term {term:?} lacks e^{{..}}")))?;
    let close = term[pos..]
        .find('}')
        .map(|c| pos + c)
        .ok_or_else(|| Error::parse(None, format!("unclosed brace in {term:?}")))?;
    if close + 1 != term.len() {
        return Err(Error::parse(None, format!("trailing text after e^{{..}} in {term:?}")));
    }
    let (i, j) = parse_indices(&term[pos + 3..close], n)?;
    let mut head = &term[..pos];
    let negative = head.starts_with('-');
    if negative {
        head = &head[1..];
    }
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = if head.is_empty() { Surd::one() } else { parse_coefficient(head)? };
    Ok((i, j, if negative { -coeff } else { coeff }))
}

fn parse_indices(body: &str, n: usize) -> Result<(usize, usize)> {
    let parse_idx = |s: &str| -> Result<usize> {
        let v: usize = s.parse().map_err(|_| Error::parse(None, format!("bad index {s:?}")))?;
        if v == 0 || v > n {
            return Err(Error::Input(format!("index {v} outside 1..={n}")));
        }
        Ok(v)
    };
    if let Some((a, b)) = body.split_once(',') {
        return Ok((parse_idx(a)?, parse_idx(b)?));
    }
    if n >= 10 {
        return Err(Error::Input(format!("ambiguous e^{{{body}}} in dimension {n}: write e^{{i,j}}")));
    }
    let digits: Vec<char> = body.chars().collect();
    if digits.len() != 2 {
        return Err(Error::parse(None, format!("expected two digits in e^{{{body}}}")));
    }
    Ok((parse_idx(&digits[0].to_string())?, parse_idx(&digits[1].to_string())?))
}

/// A product or quotient of rationals and square roots, such as `3/√2`,
/// `2√3`, `sqrt(5/2)` or `4*sqrt(3)`.
pub fn parse_coefficient(text: &str) -> Result<Surd> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::parse(None, format!("bad coefficient {text:?}"));
    let mut value = Surd::one();
    let mut divide = false;
    let mut pos = 0;
    let mut negative = false;
    if s.first() == Some(&'-') {
        negative = true;
        pos = 1;
    }
    let mut expect_factor = true;
    while pos < s.len() {
        let c = s[pos];
        if c == '*' || c == '/' {
            if expect_factor {
                return Err(bad());
            }
            divide = c == '/';
            expect_factor = true;
            pos += 1;
            continue;
        }
        let factor = if c.is_ascii_digit() {
            let start = pos;
            while pos < s.len() && s[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits: String = s[start..pos].iter().collect();
            Surd::from_rational(&parse_rational(&digits)?)
        } else {
            let rest: String = s[pos..].iter().collect();
            let skip = if rest.starts_with("sqrt") {
                4
            } else if c == '√' {
                1
            } else {
                return Err(bad());
            };
            pos += skip;
            let radicand = if s.get(pos) == Some(&'(') {
                let close = s[pos..].iter().position(|&c| c == ')').ok_or_else(bad)? + pos;
                let inner: String = s[pos + 1..close].iter().collect();
                pos = close + 1;
                parse_rational(&inner)?
            } else {
                let start = pos;
                while pos < s.len() && s[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(bad());
                }
                parse_rational(&s[start..pos].iter().collect::<String>())?
            };
            Surd::sqrt(radicand)?
        };
        value = if divide {
            &value * &factor.recip().ok_or_else(|| Error::parse(None, format!("division by zero in {text:?}")))?
        } else {
            &value * &factor
        };
        divide = false;
        expect_factor = false;
    }
    if expect_factor {
        return Err(bad());
    }
    Ok(if negative { -value } else { value })
}

/// Parses `dim N [name LABEL]` followed by `i j k COEFF` lines.
pub fn parse_bracket_file(text: &str) -> Result<AlgebraDocument> {
    let mut header: Option<(usize, Option<String>)> = None;
    let mut raw = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((dim, _)) = &header else {
            if fields.first() != Some(&"dim") || fields.len() < 2 {
                return Err(Error::parse(Some(lineno), "expected header `dim N [name LABEL]`"));
            }
            let n: usize =
                fields[1].parse().map_err(|_| Error::parse(Some(lineno), format!("bad dimension {:?}", fields[1])))?;
            let name = match &fields[2..] {
                [] => None,
                ["name", label] => Some((*label).to_owned()),
                _ => return Err(Error::parse(Some(lineno), "expected `name LABEL` after the dimension")),
            };
            header = Some((n, name));
            continue;
        };
        if fields.len() != 4 {
            return Err(Error::parse(Some(lineno), "expected `i j k COEFF`"));
        }
        let idx = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| Error::parse(Some(lineno), format!("bad index {s:?}")))?;
            if v == 0 || v > *dim {
                return Err(Error::parse(Some(lineno), format!("index {v} outside 1..={dim}")));
            }
            Ok(v)
        };
        let (i, j, k) = (idx(fields[0])?, idx(fields[1])?, idx(fields[2])?);
        let coeff = parse_coefficient(fields[3]).map_err(|e| Error::parse(Some(lineno), e.to_string()))?;
        if coeff.is_zero() {
            return Err(Error::parse(Some(lineno), "zero coefficient"));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::NotNice(format!("line {lineno}: pair ({i},{j}) repeated")));
        }
        raw.push(BracketEntry { i, j, k, coeff });
    }
    let (n, name) = header.ok_or_else(|| Error::parse(None, "missing `dim` header"))?;
    AlgebraDocument::new(name, n, raw)
}

/// Canonical tuple text; terms in each slot sorted by `(i, j)`.
pub fn render_tuple(doc: &AlgebraDocument) -> String {
    let wide = doc.dimension >= 10;
    let slots: Vec<String> = (1..=doc.dimension)
        .map(|k| {
            let mut slot = String::new();
            for b in doc.brackets.iter().filter(|b| b.k == k) {
                let idx = if wide { format!("{},{}", b.i, b.j) } else { format!("{}{}", b.i, b.j) };
                let c = b.coeff.to_string();
                let body = match c.as_str() {
                    "1" => format!("e^{{{idx}}}"),
                    "-1" => format!("-e^{{{idx}}}"),
                    _ => format!("{c}*e^{{{idx}}}"),
                };
                if !slot.is_empty() && !body.starts_with('-') {
                    slot.push('+');
                }
                slot.push_str(&body);
            }
            if slot.is_empty() {
                "0".to_owned()
            } else {
                slot
            }
        })
        .collect();
    format!("({})", slots.join(","))
}

/// Line-based form accepted by [`parse_bracket_file`].
pub fn render_bracket_file(doc: &AlgebraDocument) -> String {
    let mut out = String::new();
    match &doc.name {
        Some(name) => writeln!(out, "dim {} name {name}", doc.dimension),
        None => writeln!(out, "dim {}", doc.dimension),
    }
    .expect("string write");
    for b in &doc.brackets {
        writeln!(out, "{} {} {} {}", b.i, b.j, b.k, b.coeff).expect("string write");
    }
    out
}
