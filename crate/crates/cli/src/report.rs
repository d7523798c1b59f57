//! Report shapes shared by the commands: the certificate JSON record, verdict
//! wording, and aligned text tables.

use nicel_core::einstein::{GaugeChoice, Mode, NonexistenceProof, Obstruction, OrthonormalForm};
use nicel_core::exactla::format_rational;
use nicel_core::{EinsteinCertificate, Scalar, SolveReport, Verdict};
use serde::Serialize;

/// One Einstein metric, in the documented `certificate` JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub algebra: String,
    pub sigma: String,
    /// Einstein constant: `ric = lambda id`.
    pub lambda: String,
    #[serde(rename = "X")]
    pub x: Vec<String>,
    pub g: Vec<String>,
    pub signature: String,
    pub mode: Mode,
    pub residual_bound: f64,
    pub gauge: GaugeChoice,
    pub family: bool,
    pub orthonormal: Option<OrthonormalForm>,
}

impl CertificateRecord {
    /// `negate` reports `-g`, which solves `ric = -lambda id`.
    pub fn new(algebra: &str, report: &SolveReport, c: &EinsteinCertificate, negate: bool) -> Self {
        let lambda = report.flavor.lambda();
        let (g, lambda, signature) = if negate {
            (c.g.iter().map(|v| scalar_text(&negated(v))).collect(), -lambda, (c.signature.1, c.signature.0))
        } else {
            (c.g.iter().map(scalar_text).collect(), lambda, c.signature)
        };
        CertificateRecord {
            algebra: algebra.to_owned(),
            sigma: c.sigma.to_string(),
            lambda: format_rational(&lambda),
            x: c.x.iter().map(scalar_text).collect(),
            g,
            signature: pair(signature),
            mode: c.mode,
            residual_bound: c.residual,
            gauge: c.gauge.clone(),
            family: c.family,
            orthonormal: if negate { None } else { c.orthonormal.clone() },
        }
    }
}

fn negated(v: &Scalar) -> Scalar {
    match v {
        Scalar::Exact(s) => Scalar::Exact(-s.clone()),
        Scalar::Approx(x) => Scalar::Approx(-x),
    }
}

/// Exact values in the number grammar, floats with 15 significant digits.
pub fn scalar_text(v: &Scalar) -> String {
    match v {
        Scalar::Exact(s) => s.to_string(),
        Scalar::Approx(x) => format!("{x:.14e}"),
    }
}

/// Shorter float form for human tables.
pub fn scalar_short(v: &Scalar) -> String {
    match v {
        Scalar::Exact(s) => s.to_string(),
        Scalar::Approx(x) => format!("{x:.10}"),
    }
}

pub fn pair((p, q): (usize, usize)) -> String {
    format!("({p},{q})")
}

/// `(g13,g24,g7) = (a,b,c)` as in the published tables.
pub fn metric_cell(c: &EinsteinCertificate, negate: bool) -> String {
    let orbits = c.orbit_values();
    let labels: Vec<String> = orbits.iter().map(|(l, _)| format!("g{l}")).collect();
    let values: Vec<String> =
        orbits.iter().map(|(_, v)| scalar_short(&if negate { negated(v) } else { v.clone() })).collect();
    format!("({}) = ({})", labels.join(","), values.join(","))
}

/// One line describing a verdict that carries no certificate.
pub fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Certified { certificates } => format!("certified: {} certificate(s)", certificates.len()),
        Verdict::Obstructed { obstruction } => format!("obstructed: {}", obstruction_text(obstruction)),
        Verdict::Nonexistent { proof } => match proof {
            NonexistenceProof::Compatibility { relation, value } => {
                format!("nonexistent: compatibility relation {relation:?} forces {value} = 1")
            }
            NonexistenceProof::Sturm { cells, infeasible_cells } => format!(
                "nonexistent: Sturm certificate, {} sign-feasible cell(s) without roots, {infeasible_cells} infeasible",
                cells.len()
            ),
        },
        Verdict::Unknown { reason, .. } => format!("unknown: {reason}"),
    }
}

pub fn obstruction_text(o: &Obstruction) -> String {
    match o {
        Obstruction::K => "K (no solution of tM X = [1])".into(),
        Obstruction::H { indices } => {
            let xs: Vec<String> = indices.iter().map(|e| format!("x_{}", e.subscript())).collect();
            format!("H ({} = 0 on every solution)", xs.join(", "))
        }
        Obstruction::L => "L (no sign cell passes the GF(2) system)".into(),
        Obstruction::ConditionIII { reason } => format!("condition (iii) incompatible: {reason}"),
    }
}

/// Stable key used by the corpus: `certified`, `obstructed:H`, ...
pub fn verdict_key(v: &Verdict) -> String {
    match v {
        Verdict::Obstructed { obstruction } => format!(
            "obstructed:{}",
            match obstruction {
                Obstruction::K => "K",
                Obstruction::H { .. } => "H",
                Obstruction::L => "L",
                Obstruction::ConditionIII { .. } => "condition_iii",
            }
        ),
        other => other.name().to_owned(),
    }
}

/// Left-aligned columns separated by two spaces; trailing blanks trimmed.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut s = String::new();
        for (k, cell) in cells.iter().enumerate() {
            s.push_str(cell);
            if k + 1 < cols {
                s.extend(std::iter::repeat_n(' ', width[k] - cell.chars().count() + 2));
            }
        }
        s.trim_end().to_owned() + "\n"
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
