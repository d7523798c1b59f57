//! The linear data of the σ-diagonal Einstein problem: the system
//! `ᵗM X = [1]` restricted to σ̃-invariant `X`, forced zeros, and the sign
//! cells of its solution set.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::{build_diagram, index_orbits, node_orbits, IndexElem, Involution, NiceDiagram, RootMatrix};
use crate::error::{Error, Result};
use crate::exactla::number::{format_rational, int, rational_to_f64, sign_of};
use crate::exactla::{Gf2Matrix, Rational, RationalMatrix, Surd};
use crate::lie::StructureConstants;
use crate::poly::Bound;

/// Right-hand side of `ᵗM X = rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `rhs = [1]`, i.e. `ric = ½ id`.
    #[default]
    Einstein,
    /// `rhs = 0`, i.e. `ric = 0`.
    RicciFlat,
}

impl Flavor {
    pub fn rhs(&self) -> Rational {
        match self {
            Flavor::Einstein => Rational::one(),
            Flavor::RicciFlat => Rational::zero(),
        }
    }

    pub fn lambda(&self) -> Rational {
        match self {
            Flavor::Einstein => Rational::new(1.into(), 2.into()),
            Flavor::RicciFlat => Rational::zero(),
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "einstein" => Ok(Flavor::Einstein),
            "ricciflat" | "ricci-flat" => Ok(Flavor::RicciFlat),
            _ => Err(Error::Input(format!("unknown flavor {s:?}"))),
        }
    }
}

/// `{ X0 + sum_a t_a K_a }`, indexed by the index set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineSolutionSet {
    pub flavor: Flavor,
    #[serde(serialize_with = "crate::exactla::number::ser_rationals")]
    pub particular: Vec<Rational>,
    #[serde(serialize_with = "ser_kernel")]
    pub kernel: Vec<Vec<Rational>>,
}

#[allow(clippy::ptr_arg)]
fn ser_kernel<S: serde::Serializer>(v: &Vec<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|k| k.iter().map(format_rational).collect::<Vec<_>>()))
}

impl AffineSolutionSet {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn len(&self) -> usize {
        self.particular.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_empty()
    }

    pub fn point(&self, t: &[Rational]) -> Vec<Rational> {
        assert_eq!(t.len(), self.dimension(), "parameter count");
        let mut x = self.particular.clone();
        for (ta, k) in t.iter().zip(&self.kernel) {
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += ta * ki;
            }
        }
        x
    }

    pub fn point_f64(&self, t: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.particular.iter().map(rational_to_f64).collect();
        for (ta, k) in t.iter().zip(&self.kernel) {
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += ta * rational_to_f64(ki);
            }
        }
        x
    }

    /// Constant term and parameter coefficients of component `r`.
    pub fn component(&self, r: usize) -> (Rational, Vec<Rational>) {
        (self.particular[r].clone(), self.kernel.iter().map(|k| k[r].clone()).collect())
    }

    pub fn is_forced_zero(&self, r: usize) -> bool {
        self.particular[r].is_zero() && self.kernel.iter().all(|k| k[r].is_zero())
    }
}

/// Solves `ᵗM X = rhs` over all of the index set.
pub fn solve_k(rm: &RootMatrix, flavor: Flavor) -> Option<AffineSolutionSet> {
    let mt = rm.rational().transpose();
    let rhs = vec![flavor.rhs(); rm.cols()];
    let sol = mt.solve_affine(&rhs).expect("dimensions agree")?;
    Some(AffineSolutionSet { flavor, particular: sol.particular, kernel: sol.kernel })
}

/// Rows `I` with `x_I` identically zero on the solution set.
pub fn check_h(s: &AffineSolutionSet) -> Vec<usize> {
    (0..s.len()).filter(|&r| s.is_forced_zero(r)).collect()
}

/// An open cell of the parameter space on which every `x_I` has constant sign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    /// Rational point inside the cell.
    #[serde(serialize_with = "crate::exactla::number::ser_rationals")]
    pub sample: Vec<Rational>,
    /// For one parameter: the interval `(lo, hi)` between consecutive zeros.
    pub interval: Option<(Bound, Bound)>,
    /// Sign of `x` per index-orbit representative.
    pub signs: Vec<i8>,
    /// Whether the sign vector of `x / (c c̃)` lies in the image of the
    /// reduced GF(2) root matrix.
    pub passes_l: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellEnumeration {
    pub cells: Vec<Cell>,
    /// `true` when every cell was found (parameter dimension at most 2).
    pub exhaustive: bool,
}

impl CellEnumeration {
    pub fn passing(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.passes_l)
    }
}

/// Number of random samples used when the parameter dimension exceeds 2.
pub const SAMPLE_COUNT: usize = 4096;
const SAMPLE_SEED: u64 = 0x6e69_6365_6c00_0001;

/// The problem for a fixed diagram involution `σ`, reduced to σ-orbits:
/// node orbits carry the unknowns `g`, index orbits carry `X`.
#[derive(Clone, Debug)]
pub struct SigmaSystem {
    pub diagram: NiceDiagram,
    pub root: RootMatrix,
    pub sigma: Involution,
    pub node_orbits: Vec<Vec<usize>>,
    pub node_orbit_of: Vec<usize>,
    pub index_orbits: Vec<Vec<usize>>,
    pub index_orbit_of: Vec<usize>,
    /// Representative rows of `M P`, one per index orbit.
    pub reduced: RationalMatrix,
    pub reduced2: Gf2Matrix,
    /// `c_I c̃_I` for each index-orbit representative.
    pub coupling: Vec<Surd>,
    /// `c_I` per index-set row.
    pub constants: Vec<Surd>,
}

impl SigmaSystem {
    pub fn new(sc: &StructureConstants, sigma: &Involution) -> Result<Self> {
        let diagram = build_diagram(sc)?;
        let n = sc.dim();
        if sigma.len() != n {
            return Err(Error::Dimension(format!("involution on {} points for {n} nodes", sigma.len())));
        }
        if !diagram.is_automorphism(sigma.as_slice()) {
            return Err(Error::NotAutomorphism(sigma.to_string()));
        }
        let root = diagram.root_matrix();
        let perm = sigma.as_slice();
        let node_orbits = node_orbits(perm);
        let mut node_orbit_of = vec![0; n];
        for (o, orbit) in node_orbits.iter().enumerate() {
            for &i in orbit {
                node_orbit_of[i] = o;
            }
        }
        let index_orbits = index_orbits(&diagram, perm);
        let m = diagram.index_set().len();
        let mut index_orbit_of = vec![0; m];
        for (o, orbit) in index_orbits.iter().enumerate() {
            for &r in orbit {
                index_orbit_of[r] = o;
            }
        }
        let constants: Vec<Surd> = diagram.index_set().iter().map(|e| sc.c(e.i, e.j, e.k)).collect();
        // c̃_I is the component of σ̃(c) at I, i.e. ±c_J with J = σ̃(I)
        let coupling_of = |r: usize| -> Surd {
            let e = diagram.index_set()[r];
            let (si, sj) = (perm[e.i], perm[e.j]);
            let j = diagram.position(&IndexElem::new(si, sj, perm[e.k])).expect("automorphism");
            let tilde = if si > sj { -constants[j].clone() } else { constants[j].clone() };
            &constants[r] * &tilde
        };
        let coupling: Vec<Surd> = index_orbits.iter().map(|orbit| coupling_of(orbit[0])).collect();
        debug_assert!(index_orbits.iter().zip(&coupling).all(|(o, p)| o.iter().all(|&r| coupling_of(r) == *p)));
        let r = node_orbits.len();
        let mut reduced = RationalMatrix::zeros(index_orbits.len(), r);
        for (o, orbit) in index_orbits.iter().enumerate() {
            let row = &root.entries()[orbit[0]];
            for (i, &v) in row.iter().enumerate() {
                reduced[(o, node_orbit_of[i])] += int(v);
            }
        }
        let bits: Vec<Vec<bool>> = (0..reduced.rows())
            .map(|o| (0..r).map(|c| reduced[(o, c)].to_integer().bit(0)).collect())
            .collect();
        let reduced2 = if bits.is_empty() { Gf2Matrix::zeros(0, r) } else { Gf2Matrix::from_rows(&bits)? };
        Ok(SigmaSystem {
            diagram,
            root,
            sigma: sigma.clone(),
            node_orbits,
            node_orbit_of,
            index_orbits,
            index_orbit_of,
            reduced,
            reduced2,
            coupling,
            constants,
        })
    }

    pub fn index_set(&self) -> &[IndexElem] {
        self.diagram.index_set()
    }

    /// Solves `ᵗM X = rhs` with `X` constant on σ̃-orbits.
    pub fn solve_k(&self, flavor: Flavor) -> Option<AffineSolutionSet> {
        let m = self.index_set().len();
        let n = self.root.cols();
        let mo = self.index_orbits.len();
        // ᵗM Q with Q the orbit indicator matrix
        let mut a = RationalMatrix::zeros(n, mo);
        for (r, row) in self.root.entries().iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                a[(i, self.index_orbit_of[r])] += int(v);
            }
        }
        let rhs = vec![flavor.rhs(); n];
        let sol = a.solve_affine(&rhs).expect("dimensions agree")?;
        let lift = |z: &[Rational]| -> Vec<Rational> { (0..m).map(|r| z[self.index_orbit_of[r]].clone()).collect() };
        Some(AffineSolutionSet {
            flavor,
            particular: lift(&sol.particular),
            kernel: sol.kernel.iter().map(|k| lift(k)).collect(),
        })
    }

    /// Representative component of each index orbit.
    pub fn orbit_values<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.index_orbits.iter().map(|o| x[o[0]].clone()).collect()
    }

    /// GF(2) right-hand side `logsign(x / (c c̃))` from the signs of `x`.
    pub fn logsign_y(&self, signs: &[i8]) -> Vec<bool> {
        signs.iter().zip(&self.coupling).map(|(&s, p)| (s < 0) ^ (p.sign() < 0)).collect()
    }

    pub fn passes_l(&self, signs: &[i8]) -> bool {
        self.reduced2.in_image(&self.logsign_y(signs)).expect("dimensions agree")
    }

    fn make_cell(&self, s: &AffineSolutionSet, sample: Vec<Rational>, interval: Option<(Bound, Bound)>) -> Cell {
        let x = s.point(&sample);
        let signs: Vec<i8> = self.orbit_values(&x).iter().map(sign_of).collect();
        let passes_l = !signs.contains(&0) && self.passes_l(&signs);
        Cell { sample, interval, signs, passes_l }
    }

    /// Every open sign cell for parameter dimension at most 2, otherwise a
    /// deterministic random sample of cells.
    pub fn cells(&self, s: &AffineSolutionSet) -> CellEnumeration {
        let lines: Vec<(Rational, Vec<Rational>)> = self
            .index_orbits
            .iter()
            .map(|o| s.component(o[0]))
            .filter(|(_, b)| b.iter().any(|v| !v.is_zero()))
            .collect();
        let mut by_signs: BTreeMap<Vec<i8>, Cell> = BTreeMap::new();
        let mut push = |cell: Cell| {
            if !cell.signs.contains(&0) {
                by_signs.entry(cell.signs.clone()).or_insert(cell);
            }
        };
        let exhaustive = match s.dimension() {
            0 => {
                push(self.make_cell(s, Vec::new(), None));
                true
            }
            1 => {
                let mut cuts: Vec<Rational> = lines.iter().map(|(a, b)| -a / &b[0]).collect();
                cuts.sort();
                cuts.dedup();
                let mut bounds = vec![Bound::NegInf];
                bounds.extend(cuts.into_iter().map(Bound::Finite));
                bounds.push(Bound::PosInf);
                for w in bounds.windows(2) {
                    let t = simplest_between(&w[0], &w[1]);
                    push(self.make_cell(s, vec![t], Some((w[0].clone(), w[1].clone()))));
                }
                true
            }
            2 => {
                for sample in planar_samples(&lines) {
                    push(self.make_cell(s, sample, None));
                }
                true
            }
            d => {
                let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
                for k in 0..SAMPLE_COUNT {
                    let scale = [1i64, 8, 64, 512][k % 4];
                    let sample: Vec<Rational> = (0..d)
                        .map(|_| Rational::new(rng.gen_range(-64 * scale..=64 * scale).into(), rng.gen_range(1i64..=8).into()))
                        .collect();
                    push(self.make_cell(s, sample, None));
                }
                false
            }
        };
        let mut cells: Vec<Cell> = by_signs.into_values().collect();
        cells.sort_by(|a, b| a.sample.cmp(&b.sample));
        CellEnumeration { cells, exhaustive }
    }
}

/// Sample points of every 2-dimensional cell of an arrangement of lines
/// `a + b·t = 0`, by slicing at critical abscissae.
fn planar_samples(lines: &[(Rational, Vec<Rational>)]) -> Vec<Vec<Rational>> {
    let mut xs: Vec<Rational> = Vec::new();
    for (a, b) in lines {
        if b[1].is_zero() {
            xs.push(-a / &b[0]);
        }
    }
    for (p, (a1, b1)) in lines.iter().enumerate() {
        for (a2, b2) in &lines[p + 1..] {
            let det = &b1[0] * &b2[1] - &b1[1] * &b2[0];
            if !det.is_zero() {
                // Cramer on b1·t = -a1, b2·t = -a2
                xs.push((-a1 * &b2[1] + a2 * &b1[1]) / &det);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let mut out = Vec::new();
    for s in slab_samples(&xs) {
        let mut ys: Vec<Rational> =
            lines.iter().filter(|(_, b)| !b[1].is_zero()).map(|(a, b)| -(a + &b[0] * &s) / &b[1]).collect();
        ys.sort();
        ys.dedup();
        for y in slab_samples(&ys) {
            out.push(vec![s.clone(), y]);
        }
    }
    out
}

/// One simple rational in each open gap of the sorted cut list.
fn slab_samples(cuts: &[Rational]) -> Vec<Rational> {
    let mut bounds = vec![Bound::NegInf];
    bounds.extend(cuts.iter().cloned().map(Bound::Finite));
    bounds.push(Bound::PosInf);
    bounds.windows(2).map(|w| simplest_between(&w[0], &w[1])).collect()
}

/// The rational with smallest denominator (then smallest magnitude) in the
/// open interval `(lo, hi)`.
pub fn simplest_between(lo: &Bound, hi: &Bound) -> Rational {
    let zero = Rational::zero();
    let above = |b: &Bound| matches!(b, Bound::Finite(q) if *q >= zero);
    let below = |b: &Bound| matches!(b, Bound::Finite(q) if *q <= zero);
    if !above(lo) && !below(hi) {
        return zero;
    }
    if above(lo) {
        let Bound::Finite(l) = lo else { unreachable!() };
        let h = match hi {
            Bound::Finite(h) => Some(h.clone()),
            _ => None,
        };
        return simplest_positive(l, h.as_ref());
    }
    // mirror an interval left of zero
    let Bound::Finite(h) = hi else { unreachable!() };
    let l = match lo {
        Bound::Finite(l) => Some(-l),
        _ => None,
    };
    -simplest_positive(&-h, l.as_ref())
}

/// Simplest rational in `(lo, hi)` for `lo >= 0`; `hi = None` means `+inf`.
fn simplest_positive(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let k = lo.floor();
    let next = &k + Rational::one();
    if hi.is_none_or(|h| &next < h) {
        return next;
    }
    let h = hi.expect("finite");
    // lo and hi share the integer part k (hi may equal k + 1)
    let frac_lo = lo - &k;
    let frac_hi = h - &k;
    let inner_lo = frac_hi.recip();
    let inner_hi = if frac_lo.is_zero() { None } else { Some(frac_lo.recip()) };
    k + simplest_positive(&inner_lo, inner_hi.as_ref()).recip()
}
