//! Nice diagrams, the index set, root matrices and diagram automorphisms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{Gf2Matrix, RationalMatrix};
use crate::lie::StructureConstants;

/// Largest node count accepted by the automorphism search.
pub const MAX_SEARCH_NODES: usize = 14;

/// Per node: brackets landing on it, arrows leaving it, arrows it labels.
type Degrees = (usize, usize, usize);

/// Arrow `source --label--> target`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub source: usize,
    pub label: usize,
    pub target: usize,
}

/// `({i, j}, k)` with `i < j`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexElem {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl IndexElem {
    pub fn new(a: usize, b: usize, k: usize) -> Self {
        IndexElem { i: a.min(b), j: a.max(b), k }
    }

    /// `x_{159}` style subscript, comma-separated once any index exceeds 9.
    pub fn subscript(&self) -> String {
        let (i, j, k) = (self.i + 1, self.j + 1, self.k + 1);
        if k >= 10 || j >= 10 {
            format!("{i},{j},{k}")
        } else {
            format!("{i}{j}{k}")
        }
    }

    fn sort_key(&self) -> (usize, usize) {
        (self.k, self.i)
    }
}

impl fmt::Display for IndexElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({{{},{}}},{})", self.i + 1, self.j + 1, self.k + 1)
    }
}

impl Serialize for IndexElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDiagram {
    n: usize,
    arrows: BTreeSet<Arrow>,
    index: Vec<IndexElem>,
    position: HashMap<IndexElem, usize>,
}

impl NiceDiagram {
    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &BTreeSet<Arrow> {
        &self.arrows
    }

    /// The index set in root-matrix row order: by target, then smaller source.
    pub fn index_set(&self) -> &[IndexElem] {
        &self.index
    }

    pub fn position(&self, e: &IndexElem) -> Option<usize> {
        self.position.get(e).copied()
    }

    pub fn root_matrix(&self) -> RootMatrix {
        let rows = self
            .index
            .iter()
            .map(|e| {
                let mut r = vec![0i64; self.n];
                r[e.i] -= 1;
                r[e.j] -= 1;
                r[e.k] += 1;
                r
            })
            .collect();
        RootMatrix { n: self.n, index: self.index.clone(), rows }
    }

    /// Per node: (incoming pairs, outgoing arrows, arrows labelled by it).
    fn degrees(&self) -> Vec<Degrees> {
        let mut d = vec![(0, 0, 0); self.n];
        for e in &self.index {
            d[e.k].0 += 1;
        }
        for a in &self.arrows {
            d[a.source].1 += 1;
            d[a.label].2 += 1;
        }
        d
    }

    /// Degree triple together with the sorted multiset of neighbour triples.
    fn refined_colors(&self) -> Vec<(Degrees, Vec<Degrees>)> {
        let deg = self.degrees();
        let mut nb: Vec<Vec<Degrees>> = vec![Vec::new(); self.n];
        for a in &self.arrows {
            nb[a.source].push(deg[a.target]);
            nb[a.target].push(deg[a.source]);
        }
        (0..self.n)
            .map(|v| {
                nb[v].sort();
                (deg[v], std::mem::take(&mut nb[v]))
            })
            .collect()
    }

    pub fn automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        search_maps(self, self, false)
    }

    /// Nontrivial diagram involutions, ordered by permutation array.
    pub fn involutions(&self) -> Result<Vec<Involution>> {
        Ok(self
            .automorphisms()?
            .into_iter()
            .filter(|p| p.iter().enumerate().all(|(i, &s)| p[s] == i) && p.iter().enumerate().any(|(i, &s)| i != s))
            .map(|perm| Involution { perm })
            .collect())
    }

    /// A node map `p` with `p(self) = other`, if one exists.
    pub fn isomorphism(&self, other: &NiceDiagram) -> Result<Option<Vec<usize>>> {
        if self.n != other.n || self.index.len() != other.index.len() {
            return Ok(None);
        }
        Ok(search_maps(self, other, true)?.into_iter().next())
    }

    /// Whether `perm` maps the index set onto itself.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.n
            && self.index.iter().all(|e| self.position.contains_key(&IndexElem::new(perm[e.i], perm[e.j], perm[e.k])))
    }

    /// Row permutation `r -> position of sigma(row r)`.
    pub fn permutation_action_on_index_set(&self, sigma: &Involution) -> Result<Vec<usize>> {
        self.action(sigma.as_slice()).ok_or_else(|| Error::NotAutomorphism(sigma.to_string()))
    }

    pub(crate) fn action(&self, perm: &[usize]) -> Option<Vec<usize>> {
        if perm.len() != self.n {
            return None;
        }
        self.index.iter().map(|e| self.position(&IndexElem::new(perm[e.i], perm[e.j], perm[e.k]))).collect()
    }

    /// Graphviz text, 1-based node names.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for v in 0..self.n {
            writeln!(out, "  {};", v + 1).expect("string write");
        }
        for a in &self.arrows {
            writeln!(out, "  {} -> {} [label=\"{}\"];", a.source + 1, a.target + 1, a.label + 1).expect("string write");
        }
        out.push_str("}\n");
        out
    }
}

/// Backtracking over node maps `p` with `p(from) = to` (as index sets),
/// pruned by refined degree colours.
fn search_maps(from: &NiceDiagram, to: &NiceDiagram, first_only: bool) -> Result<Vec<Vec<usize>>> {
    let n = from.n;
    if n > MAX_SEARCH_NODES {
        return Err(Error::UnsupportedSize { n, max: MAX_SEARCH_NODES });
    }
    let cf = from.refined_colors();
    let ct = to.refined_colors();
    let candidates: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&w| cf[v] == ct[w]).collect()).collect();
    // index elements become checkable once their largest node is assigned
    let mut due: Vec<Vec<IndexElem>> = vec![Vec::new(); n];
    for e in &from.index {
        due[e.i.max(e.j).max(e.k)].push(*e);
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(0, &candidates, &due, to, &mut perm, &mut used, &mut out, first_only);
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    v: usize,
    candidates: &[Vec<usize>],
    due: &[Vec<IndexElem>],
    to: &NiceDiagram,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    first_only: bool,
) -> bool {
    if v == perm.len() {
        out.push(perm.clone());
        return first_only;
    }
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        perm[v] = w;
        let ok = due[v].iter().all(|e| to.position.contains_key(&IndexElem::new(perm[e.i], perm[e.j], perm[e.k])));
        if ok {
            used[w] = true;
            let stop = extend(v + 1, candidates, due, to, perm, used, out, first_only);
            used[w] = false;
            if stop {
                return true;
            }
        }
    }
    perm[v] = usize::MAX;
    false
}

/// Builds the diagram, checking the stated axioms and acyclicity.
pub fn build_diagram(sc: &StructureConstants) -> Result<NiceDiagram> {
    if let Some(v) = sc.validate_nice().first() {
        return Err(Error::DiagramAxiom(v.to_string()));
    }
    let n = sc.dim();
    let mut arrows = BTreeSet::new();
    let mut index = Vec::new();
    for (i, j, k, _) in sc.entries() {
        arrows.insert(Arrow { source: i, label: j, target: k });
        arrows.insert(Arrow { source: j, label: i, target: k });
        index.push(IndexElem::new(i, j, k));
    }
    let list: Vec<&Arrow> = arrows.iter().collect();
    for (x, a) in list.iter().enumerate() {
        for b in &list[x + 1..] {
            let shared = usize::from(a.source == b.source) + usize::from(a.target == b.target) + usize::from(a.label == b.label);
            if shared > 1 {
                return Err(Error::DiagramAxiom(format!(
                    "arrows {}-{}->{} and {}-{}->{} share more than one of source, label, target",
                    a.source + 1,
                    a.label + 1,
                    a.target + 1,
                    b.source + 1,
                    b.label + 1,
                    b.target + 1
                )));
            }
        }
    }
    check_acyclic(n, &arrows)?;
    index.sort_by_key(IndexElem::sort_key);
    for w in index.windows(2) {
        if w[0].sort_key() == w[1].sort_key() {
            return Err(Error::DiagramAxiom(format!("index set order has a tie between {} and {}", w[0], w[1])));
        }
    }
    let position = index.iter().enumerate().map(|(r, e)| (*e, r)).collect();
    Ok(NiceDiagram { n, arrows, index, position })
}

fn check_acyclic(n: usize, arrows: &BTreeSet<Arrow>) -> Result<()> {
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in arrows {
        succ[a.source].push(a.target);
        indeg[a.target] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    if seen < n {
        let cyclic: Vec<String> = (0..n).filter(|&v| indeg[v] > 0).map(|v| (v + 1).to_string()).collect();
        return Err(Error::DiagramAxiom(format!("cycle through nodes {}", cyclic.join(","))));
    }
    Ok(())
}

/// `M_Δ`: row for `({i,j},k)` is `-e^i - e^j + e^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootMatrix {
    n: usize,
    index: Vec<IndexElem>,
    rows: Vec<Vec<i64>>,
}

impl RootMatrix {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn index_set(&self) -> &[IndexElem] {
        &self.index
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn rational(&self) -> RationalMatrix {
        let flat: Vec<i64> = self.rows.iter().flatten().copied().collect();
        RationalMatrix::from_i64(self.rows.len(), self.n, &flat)
    }

    pub fn gf2(&self) -> Gf2Matrix {
        let bits: Vec<Vec<bool>> = self.rows.iter().map(|r| r.iter().map(|&x| x % 2 != 0).collect()).collect();
        if bits.is_empty() {
            return Gf2Matrix::zeros(0, self.n);
        }
        Gf2Matrix::from_rows(&bits).expect("rectangular")
    }

    /// Row sums, which are all `-1`.
    pub fn row_sums(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    /// Rows prefixed by their index-set element.
    pub fn labeled_dump(&self) -> String {
        let label_w = self.index.iter().map(|e| e.to_string().len()).max().unwrap_or(0);
        let mut out = String::new();
        for (e, r) in self.index.iter().zip(&self.rows) {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>2}")).collect();
            writeln!(out, "{:<label_w$}  {}", e.to_string(), cells.join(" ")).expect("string write");
        }
        out
    }
}

impl fmt::Display for RootMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>2}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A permutation with `sigma^2 = id`, 0-based; the identity is allowed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Involution {
    perm: Vec<usize>,
}

impl Involution {
    pub fn identity(n: usize) -> Self {
        Involution { perm: (0..n).collect() }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        if perm.iter().any(|&p| p >= n) || perm.iter().enumerate().any(|(i, &p)| perm[p] != i) {
            return Err(Error::Input(format!("{perm:?} is not an involution")));
        }
        Ok(Involution { perm })
    }

    /// Parses cycle notation such as `(1,3)(2,4)`; `id` or `()` is the identity.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        if t == "id" || t == "()" || t.is_empty() {
            return Ok(Involution { perm });
        }
        let bad = |why: &str| Error::Input(format!("bad cycle notation {text:?}: {why}"));
        let mut rest = t.as_str();
        let mut touched = BTreeSet::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let parts: Vec<&str> = body[..close].split(',').collect();
            let idx: Vec<usize> = parts
                .iter()
                .map(|p| p.parse::<usize>().map_err(|_| bad("non-numeric entry")))
                .collect::<Result<_>>()?;
            if idx.len() != 2 {
                return Err(bad("involutions consist of 2-cycles"));
            }
            let (a, b) = (idx[0], idx[1]);
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(bad("entry out of range"));
            }
            if !touched.insert(a) || !touched.insert(b) {
                return Err(bad("cycles overlap"));
            }
            perm[a - 1] = b - 1;
            perm[b - 1] = a - 1;
            rest = &body[close + 1..];
        }
        Ok(Involution { perm })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// 2-cycles `(a, b)` with `a < b`, 0-based.
    pub fn cycles(&self) -> Vec<(usize, usize)> {
        self.perm.iter().enumerate().filter(|&(i, &p)| i < p).map(|(i, &p)| (i, p)).collect()
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        for (a, b) in self.cycles() {
            write!(f, "({},{})", a + 1, b + 1)?;
        }
        Ok(())
    }
}

impl Serialize for Involution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for IndexElem {
    type Err = Error;

    /// Parses `({i,j},k)`, 1-based.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let nums: Vec<usize> = t
            .split(|c: char| !c.is_ascii_digit())
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().expect("digits"))
            .collect();
        match nums.as_slice() {
            [i, j, k] if *i > 0 && *j > 0 && *k > 0 && i != j => Ok(IndexElem::new(i - 1, j - 1, k - 1)),
            _ => Err(Error::Input(format!("bad index element {s:?}"))),
        }
    }
}

/// Automorphism orbits of the index set, as sorted position lists.
pub fn index_orbits(d: &NiceDiagram, perm: &[usize]) -> Vec<Vec<usize>> {
    let act = d.action(perm).expect("automorphism");
    let mut seen = vec![false; act.len()];
    let mut out = Vec::new();
    for r in 0..act.len() {
        if seen[r] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = r;
        while !seen[x] {
            seen[x] = true;
            orbit.push(x);
            x = act[x];
        }
        orbit.sort();
        out.push(orbit);
    }
    out
}

/// Node orbits of a permutation, as sorted lists.
pub fn node_orbits(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut by_min: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..perm.len() {
        let mut orbit = vec![i];
        let mut x = perm[i];
        while x != i {
            orbit.push(x);
            x = perm[x];
        }
        orbit.sort();
        by_min.entry(orbit[0]).or_insert(orbit);
    }
    by_min.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(t: &str) -> NiceDiagram {
        build_diagram(&StructureConstants::parse_tuple(t).unwrap()).unwrap()
    }

    pub(crate) const T842_117: &str = "(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})";
    pub(crate) const T952_355: &str = "(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36})";

    #[test]
    fn heisenberg() {
        let d = diag("(0,0,e^{12})");
        assert_eq!(d.index_set(), &[IndexElem::new(0, 1, 2)]);
        let arrows: Vec<Arrow> = d.arrows().iter().copied().collect();
        assert_eq!(arrows, vec![Arrow { source: 0, label: 1, target: 2 }, Arrow { source: 1, label: 0, target: 2 }]);
        assert_eq!(d.root_matrix().entries(), &[vec![-1, -1, 1]]);
        let inv = d.involutions().unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].to_string(), "(1,2)");
    }

    #[test]
    fn root_matrix_842_117() {
        let rm = diag(T842_117).root_matrix();
        let expect = [
            [-1, -1, 0, 0, 1, 0, 0, 0],
            [0, 0, -1, -1, 0, 1, 0, 0],
            [-1, 0, 0, 0, -1, 0, 1, 0],
            [0, -1, 0, -1, 0, 0, 1, 0],
            [0, 0, -1, 0, 0, -1, 1, 0],
            [-1, 0, -1, 0, 0, 0, 0, 1],
            [0, -1, 0, 0, -1, 0, 0, 1],
            [0, 0, 0, -1, 0, -1, 0, 1],
        ];
        assert_eq!(rm.entries(), expect.map(|r| r.to_vec()).as_slice());
        assert!(rm.row_sums().iter().all(|&s| s == -1));
    }

    #[test]
    fn index_order_952_355() {
        let d = diag(T952_355);
        let labels: Vec<String> = d.index_set().iter().map(IndexElem::subscript).collect();
        assert_eq!(labels, ["125", "346", "137", "247", "158", "238", "149", "369"]);
    }

    #[test]
    fn involutions_from_examples() {
        let inv: Vec<String> = diag(T952_355).involutions().unwrap().iter().map(ToString::to_string).collect();
        assert!(inv.contains(&"(1,3)(2,4)(5,6)(8,9)".to_owned()));
        let inv: Vec<String> = diag(T842_117).involutions().unwrap().iter().map(ToString::to_string).collect();
        for s in ["(1,3)(2,4)(5,6)", "(1,2)(3,4)(7,8)", "(1,4)(2,3)(5,6)(7,8)"] {
            assert!(inv.contains(&s.to_owned()), "{s} missing from {inv:?}");
        }
    }

    #[test]
    fn action_conjugates_root_matrix() {
        let d = diag(T842_117);
        let rm = d.root_matrix();
        for sigma in d.involutions().unwrap() {
            let act = d.permutation_action_on_index_set(&sigma).unwrap();
            for (r, &s) in act.iter().enumerate() {
                for c in 0..d.nodes() {
                    assert_eq!(rm.entries()[s][sigma.apply(c)], rm.entries()[r][c]);
                }
            }
        }
        let id = Involution::identity(8);
        assert_eq!(d.permutation_action_on_index_set(&id).unwrap(), (0..8).collect::<Vec<_>>());
        let bad = Involution::parse("(1,5)", 8).unwrap();
        assert!(matches!(d.permutation_action_on_index_set(&bad), Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn automorphisms_form_a_group() {
        let d = diag(T842_117);
        let auts = d.automorphisms().unwrap();
        let set: BTreeSet<Vec<usize>> = auts.iter().cloned().collect();
        for a in &auts {
            let mut inv = vec![0; a.len()];
            for (i, &x) in a.iter().enumerate() {
                inv[x] = i;
            }
            assert!(set.contains(&inv));
            for b in &auts {
                let comp: Vec<usize> = (0..a.len()).map(|i| a[b[i]]).collect();
                assert!(set.contains(&comp));
            }
        }
    }

    #[test]
    fn cycle_notation() {
        let s = Involution::parse("(1,4)(2,3)(5,6)(7,8)", 8).unwrap();
        assert_eq!(s.to_string(), "(1,4)(2,3)(5,6)(7,8)");
        assert!(Involution::parse("(1,2,3)", 8).is_err());
        assert!(Involution::parse("(1,2)(2,3)", 8).is_err());
        assert!(Involution::parse("(1,9)", 8).is_err());
        assert!(Involution::parse("id", 3).unwrap().is_identity());
    }

    #[test]
    fn size_bound() {
        let d = build_diagram(&StructureConstants::new(15)).unwrap();
        assert!(matches!(d.automorphisms(), Err(Error::UnsupportedSize { n: 15, max: 14 })));
    }
}
