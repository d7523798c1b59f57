//! Existence decisions for σ-diagonal Einstein metrics, with certificates.
//!
//! The pipeline runs the linear check on `ᵗM X = [1]`, then forced zeros,
//! then the sign system over GF(2), then the multiplicative compatibility
//! `W log|y| = 0` for the left kernel `W` of the reduced root matrix. Every
//! returned certificate has had its Ricci operator recomputed.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::metric::{Metric, MetricValues, Scalar, SigmaDiagonalMetric};
use super::ricci::verify_einstein;
use super::system::{check_h, AffineSolutionSet, Cell, CellEnumeration, Flavor, SigmaSystem};
use crate::diagram::{IndexElem, Involution};
use crate::error::{Error, Result};
use crate::exactla::factor::multiplicative_atoms;
use crate::exactla::number::{rational_pow, rational_to_f64, sign_of};
use crate::exactla::{Rational, RationalMatrix, Surd};
use crate::lie::StructureConstants;
use crate::poly::{Bound, Poly, RealRoot};

/// Newton stops once every compatibility residual is below this.
pub const NEWTON_TOLERANCE: f64 = 1e-13;
pub const NEWTON_MAX_ITER: usize = 200;
/// Grid points per parameter axis used as extra Newton seeds.
pub const GRID_PER_AXIS: usize = 9;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub flavor: Flavor,
    /// 0-based nodes to normalise to `|g| = 1`; others are chosen as needed.
    pub gauge_nodes: Vec<usize>,
    /// Absolute Ricci residual accepted for numeric certificates.
    pub tolerance: f64,
    /// Maximum number of sign solutions turned into certificates.
    pub sign_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { flavor: Flavor::Einstein, gauge_nodes: Vec::new(), tolerance: 1e-9, sign_cap: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// How the residual gauge freedom was fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeChoice {
    /// 1-based nodes with `|g| = 1`.
    pub unit_nodes: Vec<usize>,
    /// Which solution of the GF(2) sign system this certificate uses.
    pub sign_solution: usize,
    pub sign_solutions: usize,
    /// `true` if the sign solutions exceeded the cap and only one was kept.
    pub truncated: bool,
}

/// The same algebra in a basis where the metric is `diag(±1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthonormalForm {
    pub signs: String,
    pub constants: Vec<(IndexElem, Surd)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EinsteinCertificate {
    pub sigma: Involution,
    pub flavor: Flavor,
    pub mode: Mode,
    /// Point of the solution set `X0 + sum t_a K_a` that was used.
    pub parameters: Vec<Scalar>,
    /// `true` when the point lies in a positive-dimensional family.
    pub family: bool,
    pub x: Vec<Scalar>,
    /// `g_i` per node, with `g_i = g_{σ_i}`.
    pub g: Vec<Scalar>,
    pub signature: (usize, usize),
    /// Largest `|ric - λ id|` entry; zero for exact certificates.
    pub residual: f64,
    pub gauge: GaugeChoice,
    pub orthonormal: Option<OrthonormalForm>,
    /// Set when another numeric solution lies in the same sign cell; float
    /// mode cannot tell whether the two are one gauge orbit.
    pub shares_cell: bool,
}

impl EinsteinCertificate {
    pub fn metric(&self) -> SigmaDiagonalMetric {
        let values = match self.mode {
            Mode::Exact => MetricValues::Exact(self.g.iter().map(|s| s.as_exact().expect("exact").clone()).collect()),
            Mode::Numeric => MetricValues::Numeric(self.g.iter().map(Scalar::to_f64).collect()),
        };
        SigmaDiagonalMetric::new(self.sigma.clone(), values).expect("validated")
    }

    /// `(label, value)` per σ-orbit, labelled `13` for the cycle `(1,3)`.
    pub fn orbit_values(&self) -> Vec<(String, Scalar)> {
        let n = self.g.len();
        let sep = if n >= 10 { "," } else { "" };
        (0..n)
            .filter(|&i| self.sigma.apply(i) >= i)
            .map(|i| {
                let j = self.sigma.apply(i);
                let label = if i == j { format!("{}", i + 1) } else { format!("{}{sep}{}", i + 1, j + 1) };
                (label, self.g[i].clone())
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// `ᵗM X = [1]` has no σ̃-invariant solution.
    K,
    /// These components vanish on every solution.
    H { indices: Vec<IndexElem> },
    /// No solution cell passes the GF(2) sign system.
    L,
    /// The σ-reduced system fails although the unreduced one passes with the
    /// same `y`.
    #[serde(rename = "condition_iii")]
    ConditionIII { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SturmCell {
    pub lo: Bound,
    pub hi: Bound,
    /// gcd of the compatibility polynomials on this cell.
    pub polynomial: Poly,
    pub roots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonexistenceProof {
    /// `prod |y_o|^{2 w_o} = value != 1` for the left-kernel vector `relation`.
    Compatibility { relation: Vec<i64>, value: String },
    /// No real root of the compatibility gcd in any sign-feasible cell.
    Sturm { cells: Vec<SturmCell>, infeasible_cells: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonAttempt {
    pub cell_signs: Vec<i8>,
    pub seeds: usize,
    pub converged: usize,
    pub best_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Certified { certificates: Vec<EinsteinCertificate> },
    Obstructed { obstruction: Obstruction },
    Nonexistent { proof: NonexistenceProof },
    Unknown { reason: String, attempts: Vec<NewtonAttempt> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Certified { .. } => "certified",
            Verdict::Obstructed { .. } => "obstructed",
            Verdict::Nonexistent { .. } => "nonexistent",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn certificates(&self) -> &[EinsteinCertificate] {
        match self {
            Verdict::Certified { certificates } => certificates,
            _ => &[],
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            Verdict::Obstructed { obstruction } => Some(obstruction),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub sigma: Involution,
    pub flavor: Flavor,
    pub index_set: Vec<IndexElem>,
    pub solution: Option<AffineSolutionSet>,
    /// `dim` of the affine solution set of `ᵗM X = [1]`.
    pub parameter_dim: Option<usize>,
    /// `m_σ - rank` of the reduced root matrix.
    pub compatibility_dim: usize,
    pub cells: Option<CellEnumeration>,
    pub verdict: Verdict,
}

/// Einstein metrics diagonal in the nice basis.
pub fn solve_diagonal(sc: &StructureConstants, opts: &SolveOptions) -> Result<SolveReport> {
    solve_sigma(sc, &Involution::identity(sc.dim()), opts)
}

/// Einstein metrics of the form `sum g_i e^i ⊗ e^{σ_i}`.
pub fn solve_sigma(sc: &StructureConstants, sigma: &Involution, opts: &SolveOptions) -> Result<SolveReport> {
    sc.validate()?;
    let sys = SigmaSystem::new(sc, sigma)?;
    let mut gauge_orbits = BTreeSet::new();
    for &node in &opts.gauge_nodes {
        if node >= sc.dim() {
            return Err(Error::Input(format!("gauge node {} out of range", node + 1)));
        }
        gauge_orbits.insert(sys.node_orbit_of[node]);
    }
    let mags = MagnitudeSolver::new(&sys.reduced, &gauge_orbits.into_iter().collect::<Vec<_>>())?;
    let relations: Vec<Vec<i64>> = sys
        .reduced
        .left_kernel()
        .iter()
        .map(|w| w.iter().map(|q| q.to_integer().to_i64().expect("small relation")).collect())
        .collect();
    let mut report = SolveReport {
        sigma: sigma.clone(),
        flavor: opts.flavor,
        index_set: sys.index_set().to_vec(),
        solution: None,
        parameter_dim: None,
        compatibility_dim: relations.len(),
        cells: None,
        verdict: Verdict::Obstructed { obstruction: Obstruction::K },
    };
    let Some(s) = sys.solve_k(opts.flavor) else {
        return Ok(report);
    };
    report.parameter_dim = Some(s.dimension());
    report.solution = Some(s.clone());
    let forced = check_h(&s);
    if !forced.is_empty() {
        let indices = forced.iter().map(|&r| sys.index_set()[r]).collect();
        report.verdict = Verdict::Obstructed { obstruction: Obstruction::H { indices } };
        return Ok(report);
    }
    let cells = sys.cells(&s);
    let ctx = Context { sc, sys: &sys, s: &s, mags: &mags, relations: &relations, opts };
    report.verdict = match s.dimension() {
        0 => ctx.decide_point(),
        1 => ctx.decide_line(&cells),
        _ => ctx.decide_newton(&cells),
    };
    report.cells = Some(cells);
    Ok(report)
}

/// Solves `R v = e` for `e` in the image of the reduced root matrix `R`,
/// with the gauge orbits' entries of `v` pinned to zero.
#[derive(Clone, Debug)]
struct MagnitudeSolver {
    reduced: RationalMatrix,
    /// `r x m_σ`; `v = S e` whenever `e` lies in the image.
    solve: RationalMatrix,
    free: Vec<usize>,
}

impl MagnitudeSolver {
    fn new(reduced: &RationalMatrix, gauge: &[usize]) -> Result<Self> {
        let r = reduced.cols();
        let mut order: Vec<usize> = (0..r).filter(|c| !gauge.contains(c)).collect();
        order.extend_from_slice(gauge);
        let (_, pivots) = reduced.rref_with_order(&order);
        if let Some(c) = gauge.iter().find(|c| pivots.contains(c)) {
            return Err(Error::Precondition(format!("node orbit {} cannot be normalised; it is fixed by the others", c + 1)));
        }
        let (_, rows) = reduced.transpose().rref();
        let rho = rows.len();
        let mut sub = RationalMatrix::zeros(rho, rho);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &c) in pivots.iter().enumerate() {
                sub[(a, b)] = reduced[(i, c)].clone();
            }
        }
        let mut solve = RationalMatrix::zeros(r, reduced.rows());
        if rho > 0 {
            let inv = sub.inverse()?.expect("independent rows and pivot columns");
            for (b, &c) in pivots.iter().enumerate() {
                for (a, &i) in rows.iter().enumerate() {
                    solve[(c, i)] = inv[(b, a)].clone();
                }
            }
        }
        let free = (0..r).filter(|c| !pivots.contains(c)).collect();
        Ok(MagnitudeSolver { reduced: reduced.clone(), solve, free })
    }

    fn solve_exact(&self, e: &[Rational]) -> Option<Vec<Rational>> {
        let v = self.solve.mul_vec(e).expect("dimensions agree");
        (self.reduced.mul_vec(&v).expect("dimensions agree") == e).then_some(v)
    }

    fn solve_f64(&self, e: &[f64]) -> Vec<f64> {
        (0..self.solve.rows())
            .map(|c| (0..self.solve.cols()).map(|i| rational_to_f64(&self.solve[(c, i)]) * e[i]).sum())
            .collect()
    }
}

/// Why exact certificate construction failed at a point.
enum PointFailure {
    Zero,
    Sign,
    Magnitude,
}

struct Context<'a> {
    sc: &'a StructureConstants,
    sys: &'a SigmaSystem,
    s: &'a AffineSolutionSet,
    mags: &'a MagnitudeSolver,
    relations: &'a [Vec<i64>],
    opts: &'a SolveOptions,
}

impl Context<'_> {
    fn gauge_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> =
            self.mags.free.iter().flat_map(|&o| self.sys.node_orbits[o].iter().map(|i| i + 1)).collect();
        nodes.sort();
        nodes
    }

    fn decide_point(&self) -> Verdict {
        let x = self.s.particular.clone();
        match self.exact_certificates(&x, Vec::new(), false) {
            Ok(certs) if !certs.is_empty() => Verdict::Certified { certificates: certs },
            Ok(_) => Verdict::Unknown { reason: "no candidate metric passed verification".into(), attempts: Vec::new() },
            Err(PointFailure::Zero) => unreachable!("forced zeros are caught earlier"),
            Err(failure) => {
                if !self.sys.sigma.is_identity() && self.unrestricted_passes(&x) {
                    let reason = match failure {
                        PointFailure::Sign => "the reduced sign system is inconsistent",
                        _ => "the reduced magnitude system is inconsistent",
                    };
                    return Verdict::Obstructed { obstruction: Obstruction::ConditionIII { reason: reason.into() } };
                }
                match failure {
                    PointFailure::Sign => Verdict::Obstructed { obstruction: Obstruction::L },
                    _ => Verdict::Nonexistent { proof: self.compatibility_proof(&x) },
                }
            }
        }
    }

    fn decide_line(&self, cells: &CellEnumeration) -> Verdict {
        let passing: Vec<&Cell> = cells.passing().collect();
        if passing.is_empty() {
            return Verdict::Obstructed { obstruction: Obstruction::L };
        }
        let mut certs = Vec::new();
        let mut sturm = Vec::new();
        for cell in &passing {
            let (lo, hi) = cell.interval.clone().expect("one parameter");
            let gcd = self
                .relations
                .iter()
                .map(|w| self.compatibility_poly(w, &cell.signs))
                .fold(Poly::zero(), |acc, p| acc.gcd(&p));
            if gcd.is_zero() {
                // every point of the cell is a solution
                certs.extend(self.exact_certificates(&self.s.point(&cell.sample), vec![exact(&cell.sample[0])], true).unwrap_or_default());
                continue;
            }
            let roots = gcd.squarefree().real_roots(&lo, &hi);
            sturm.push(SturmCell { lo, hi, polynomial: gcd.monic(), roots: roots.len() });
            for root in roots {
                match root {
                    RealRoot::Exact(t) => {
                        let x = self.s.point(std::slice::from_ref(&t));
                        certs.extend(self.exact_certificates(&x, vec![exact(&t)], false).unwrap_or_default());
                    }
                    RealRoot::Isolated { .. } => {
                        let t = root.approx();
                        let x = self.s.point_f64(&[t]);
                        certs.extend(self.numeric_certificates(&x, vec![Scalar::Approx(t)], false));
                    }
                }
            }
        }
        if !certs.is_empty() {
            Verdict::Certified { certificates: certs }
        } else if sturm.iter().all(|c| c.roots == 0) {
            let infeasible_cells = cells.cells.len() - passing.len();
            Verdict::Nonexistent { proof: NonexistenceProof::Sturm { cells: sturm, infeasible_cells } }
        } else {
            Verdict::Unknown { reason: "roots found but no candidate metric passed verification".into(), attempts: Vec::new() }
        }
    }

    fn decide_newton(&self, cells: &CellEnumeration) -> Verdict {
        let passing: Vec<&Cell> = cells.passing().collect();
        if passing.is_empty() {
            return if cells.exhaustive {
                Verdict::Obstructed { obstruction: Obstruction::L }
            } else {
                Verdict::Unknown { reason: "no sampled cell passes the sign system".into(), attempts: Vec::new() }
            };
        }
        let mut certs = Vec::new();
        if self.relations.is_empty() {
            for cell in &passing {
                let params = cell.sample.iter().map(exact).collect();
                certs.extend(self.exact_certificates(&self.s.point(&cell.sample), params, true).unwrap_or_default());
            }
        } else {
            let d = self.s.dimension();
            let mut seeds: Vec<Vec<f64>> =
                passing.iter().map(|c| c.sample.iter().map(rational_to_f64).collect()).collect();
            if d == 2 {
                seeds.extend(grid_seeds(&cells.cells));
            }
            let mut found: Vec<Vec<f64>> = Vec::new();
            let mut attempts = Vec::new();
            for cell in &passing {
                let mut attempt = NewtonAttempt { cell_signs: cell.signs.clone(), seeds: 0, converged: 0, best_residual: f64::INFINITY };
                for seed in seeds.iter().filter(|t| self.signs_at(t).as_deref() == Some(&cell.signs[..])) {
                    attempt.seeds += 1;
                    let (t, res) = self.newton(seed, &cell.signs);
                    attempt.best_residual = attempt.best_residual.min(res);
                    if res < NEWTON_TOLERANCE * 10.0 {
                        attempt.converged += 1;
                        let dup = found.iter().any(|u| u.iter().zip(&t).all(|(a, b)| (a - b).abs() <= 1e-7 * (1.0 + a.abs())));
                        if !dup {
                            found.push(t);
                        }
                    }
                }
                attempts.push(attempt);
            }
            let family = d > self.relations.len();
            let cells_of: Vec<Option<Vec<i8>>> = found.iter().map(|t| self.signs_at(t)).collect();
            for (t, cell) in found.iter().zip(&cells_of) {
                let x = self.s.point_f64(t);
                let shared = cells_of.iter().filter(|c| *c == cell).count() > 1;
                let mut batch = self.numeric_certificates(&x, t.iter().map(|&v| Scalar::Approx(v)).collect(), family);
                for c in &mut batch {
                    c.shares_cell = shared;
                }
                certs.extend(batch);
            }
            if certs.is_empty() {
                return Verdict::Unknown { reason: "Newton found no solution in the sign-feasible cells".into(), attempts };
            }
        }
        if certs.is_empty() {
            Verdict::Unknown { reason: "no candidate metric passed verification".into(), attempts: Vec::new() }
        } else {
            Verdict::Certified { certificates: certs }
        }
    }

    /// Orbit sign vector of `x(t)`, or `None` on a wall.
    fn signs_at(&self, t: &[f64]) -> Option<Vec<i8>> {
        let x = self.s.point_f64(t);
        let signs: Vec<i8> = self.sys.orbit_values(&x).iter().map(|v| if *v > 0.0 { 1 } else if *v < 0.0 { -1 } else { 0 }).collect();
        (!signs.contains(&0)).then_some(signs)
    }

    /// `F_w(t) = sum_o w_o (ln|x_o(t)| - ln|p_o|)`.
    fn residuals(&self, t: &[f64]) -> Vec<f64> {
        let x = self.sys.orbit_values(&self.s.point_f64(t));
        let lp: Vec<f64> = self.sys.coupling.iter().map(|p| 0.5 * rational_to_f64(&p.square()).ln()).collect();
        self.relations
            .iter()
            .map(|w| w.iter().enumerate().map(|(o, &wo)| wo as f64 * (x[o].abs().ln() - lp[o])).sum())
            .collect()
    }

    /// Damped Gauss-Newton on `F = 0` inside the cell with orbit signs `signs`.
    fn newton(&self, seed: &[f64], signs: &[i8]) -> (Vec<f64>, f64) {
        let d = seed.len();
        let b: Vec<Vec<f64>> = self
            .sys
            .index_orbits
            .iter()
            .map(|o| self.s.kernel.iter().map(|k| rational_to_f64(&k[o[0]])).collect())
            .collect();
        let norm = |f: &[f64]| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut t = seed.to_vec();
        let mut f = self.residuals(&t);
        for _ in 0..NEWTON_MAX_ITER {
            if norm(&f) < NEWTON_TOLERANCE {
                break;
            }
            let x = self.sys.orbit_values(&self.s.point_f64(&t));
            let jac = DMatrix::from_fn(self.relations.len(), d, |r, a| {
                self.relations[r].iter().enumerate().map(|(o, &wo)| wo as f64 * b[o][a] / x[o]).sum()
            });
            let rhs = -DVector::from_column_slice(&f);
            let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-14) else {
                break;
            };
            let mut lambda = 1.0;
            let mut accepted = false;
            while lambda > 1e-12 {
                let trial: Vec<f64> = t.iter().zip(step.iter()).map(|(ti, si)| ti + lambda * si).collect();
                if self.signs_at(&trial).as_deref() == Some(signs) {
                    let ft = self.residuals(&trial);
                    if norm(&ft) < norm(&f) {
                        t = trial;
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let res = norm(&f);
        (t, res)
    }

    /// `prod_{w>0} (εx)^w - κ prod_{w<0} (εx)^{-w}` with `κ = prod |p|^w`,
    /// squared through when `κ` is irrational.
    fn compatibility_poly(&self, w: &[i64], signs: &[i8]) -> Poly {
        let mut pos = Poly::one();
        let mut neg = Poly::one();
        let mut kappa = Surd::one();
        for (o, &wo) in w.iter().enumerate() {
            if wo == 0 {
                continue;
            }
            let (a, b) = self.s.component(self.sys.index_orbits[o][0]);
            let eps = Rational::from_integer(signs[o].into());
            let xo = Poly::linear(a * &eps, &b[0] * &eps);
            let p = self.sys.coupling[o].abs();
            let pw = if wo > 0 { p } else { p.recip().expect("nonzero constant") };
            for _ in 0..wo.unsigned_abs() {
                kappa = &kappa * &pw;
            }
            if wo > 0 {
                pos = pos.mul(&xo.pow(wo as u32));
            } else {
                neg = neg.mul(&xo.pow((-wo) as u32));
            }
        }
        match kappa.to_rational() {
            Some(k) => pos.sub(&neg.scale(&k)),
            None => pos.mul(&pos).sub(&neg.mul(&neg).scale(&kappa.square())),
        }
    }

    fn compatibility_proof(&self, x: &[Rational]) -> NonexistenceProof {
        let y2 = self.y_squared(&self.sys.orbit_values(x));
        for w in self.relations {
            let value = w.iter().zip(&y2).fold(Rational::one(), |acc, (&wo, q)| acc * rational_pow(q, wo));
            if !value.is_one() {
                return NonexistenceProof::Compatibility { relation: w.clone(), value: crate::exactla::format_rational(&value) };
            }
        }
        unreachable!("magnitude system failed but every relation holds")
    }

    fn y_squared(&self, xo: &[Rational]) -> Vec<Rational> {
        xo.iter().zip(&self.sys.coupling).map(|(x, p)| x * x / p.square()).collect()
    }

    /// The unreduced sign and magnitude systems for `y_I = x_I / (c_I c̃_I)`.
    fn unrestricted_passes(&self, x: &[Rational]) -> bool {
        let p: Vec<&Surd> = (0..x.len()).map(|r| &self.sys.coupling[self.sys.index_orbit_of[r]]).collect();
        let logsign: Vec<bool> = x.iter().zip(&p).map(|(xi, pi)| (sign_of(xi) < 0) ^ (pi.sign() < 0)).collect();
        if !self.sys.root.gf2().in_image(&logsign).expect("dimensions agree") {
            return false;
        }
        let y2: Vec<Rational> = x.iter().zip(&p).map(|(xi, pi)| xi * xi / pi.square()).collect();
        let (_, exps) = multiplicative_atoms(&y2);
        let m = self.sys.root.rational();
        let atoms = exps.first().map_or(0, Vec::len);
        (0..atoms).all(|a| {
            let e: Vec<Rational> = exps.iter().map(|row| Rational::from_integer(row[a].into())).collect();
            m.solve_affine(&e).expect("dimensions agree").is_some()
        })
    }

    fn exact_certificates(&self, x: &[Rational], params: Vec<Scalar>, family: bool) -> std::result::Result<Vec<EinsteinCertificate>, PointFailure> {
        let xo = self.sys.orbit_values(x);
        if xo.iter().any(Zero::is_zero) {
            return Err(PointFailure::Zero);
        }
        let signs: Vec<i8> = xo.iter().map(sign_of).collect();
        let sign_sol = self.sys.reduced2.solve(&self.sys.logsign_y(&signs)).expect("dimensions agree").ok_or(PointFailure::Sign)?;
        let y2 = self.y_squared(&xo);
        let (atoms, exps) = multiplicative_atoms(&y2);
        let r = self.sys.node_orbits.len();
        // v[o][a]: exponent of atom a in |g_o|^2
        let mut v = vec![Vec::with_capacity(atoms.len()); r];
        for a in 0..atoms.len() {
            let e: Vec<Rational> = exps.iter().map(|row| Rational::from_integer(row[a].into())).collect();
            let va = self.mags.solve_exact(&e).ok_or(PointFailure::Magnitude)?;
            for (o, q) in va.into_iter().enumerate() {
                v[o].push(q);
            }
        }
        let magnitudes: Vec<Scalar> = v.iter().map(|vo| magnitude(&atoms, vo)).collect();
        let xs: Vec<Scalar> = x.iter().map(exact).collect();
        Ok(self.assemble(&magnitudes, sign_sol, xs, params, family))
    }

    fn numeric_certificates(&self, x: &[f64], params: Vec<Scalar>, family: bool) -> Vec<EinsteinCertificate> {
        let xo = self.sys.orbit_values(x);
        if xo.contains(&0.0) {
            return Vec::new();
        }
        let signs: Vec<i8> = xo.iter().map(|v| if *v > 0.0 { 1 } else { -1 }).collect();
        let Some(sign_sol) = self.sys.reduced2.solve(&self.sys.logsign_y(&signs)).expect("dimensions agree") else {
            return Vec::new();
        };
        let logy: Vec<f64> = xo
            .iter()
            .zip(&self.sys.coupling)
            .map(|(x, p)| x.abs().ln() - 0.5 * rational_to_f64(&p.square()).ln())
            .collect();
        let magnitudes: Vec<Scalar> = self.mags.solve_f64(&logy).into_iter().map(|u| Scalar::Approx(u.exp())).collect();
        self.assemble(&magnitudes, sign_sol, x.iter().map(|&v| Scalar::Approx(v)).collect(), params, family)
    }

    /// One verified certificate per enumerated sign solution.
    fn assemble(
        &self,
        magnitudes: &[Scalar],
        sign_sol: crate::exactla::Gf2Solution,
        x: Vec<Scalar>,
        params: Vec<Scalar>,
        family: bool,
    ) -> Vec<EinsteinCertificate> {
        let (mut solutions, truncated) = match sign_sol.enumerate(self.opts.sign_cap) {
            Some(all) => (all, false),
            None => (vec![sign_sol.particular.clone()], true),
        };
        // gauge nodes positive first
        solutions.sort_by_key(|neg| (self.mags.free.iter().map(|&o| neg[o]).collect::<Vec<_>>(), neg.clone()));
        let total = if truncated { 0 } else { solutions.len() };
        let exact_mode = magnitudes.iter().all(|m| matches!(m, Scalar::Exact(_)));
        let n = self.sc.dim();
        let mut out = Vec::new();
        for (idx, neg) in solutions.iter().enumerate() {
            let orbit_value = |i: usize| -> Scalar {
                let o = self.sys.node_orbit_of[i];
                match (&magnitudes[o], neg[o]) {
                    (Scalar::Exact(s), true) => Scalar::Exact(-s.clone()),
                    (Scalar::Exact(s), false) => Scalar::Exact(s.clone()),
                    (m, true) => Scalar::Approx(-m.to_f64()),
                    (m, false) => Scalar::Approx(m.to_f64()),
                }
            };
            let g: Vec<Scalar> = (0..n)
                .map(|i| if exact_mode { orbit_value(i) } else { Scalar::Approx(orbit_value(i).to_f64()) })
                .collect();
            let values = if exact_mode {
                MetricValues::Exact(g.iter().map(|s| s.as_exact().expect("exact").clone()).collect())
            } else {
                MetricValues::Numeric(g.iter().map(Scalar::to_f64).collect())
            };
            let Ok(metric) = SigmaDiagonalMetric::new(self.sys.sigma.clone(), values) else {
                continue;
            };
            let report = verify_einstein(self.sc, &metric.to_metric(), &self.opts.flavor.lambda(), self.opts.tolerance);
            if !report.passes {
                continue;
            }
            let mode = if exact_mode { Mode::Exact } else { Mode::Numeric };
            let orthonormal = (exact_mode && self.sys.sigma.is_identity()).then(|| self.orthonormal(&x, &g)).flatten();
            out.push(EinsteinCertificate {
                sigma: self.sys.sigma.clone(),
                flavor: self.opts.flavor,
                mode,
                parameters: params.clone(),
                family,
                x: x.clone(),
                signature: metric.signature(),
                g,
                residual: report.max_abs,
                gauge: GaugeChoice { unit_nodes: self.gauge_nodes(), sign_solution: idx, sign_solutions: total, truncated },
                orthonormal,
                shares_cell: false,
            });
        }
        out
    }

    /// `c'_I = sign(c_I) sqrt|x_I|` with metric `diag(sign g_i)`, kept only if
    /// it is again Einstein.
    fn orthonormal(&self, x: &[Scalar], g: &[Scalar]) -> Option<OrthonormalForm> {
        let mut sc = StructureConstants::new(self.sc.dim());
        let mut constants = Vec::new();
        for (r, e) in self.sys.index_set().iter().enumerate() {
            let xr = x[r].as_exact()?.to_rational()?;
            let c = Surd::sqrt(xr.abs()).ok()?;
            let c = if self.sys.constants[r].sign() < 0 { -c } else { c };
            sc.insert(e.i, e.j, e.k, c.clone()).ok()?;
            constants.push((*e, c));
        }
        let signs: String = g.iter().map(|s| if s.signum() > 0 { '+' } else { '-' }).collect();
        let metric = Metric::from_signs(&signs).ok()?;
        verify_einstein(&sc, &metric, &self.opts.flavor.lambda(), 0.0).passes.then_some(OrthonormalForm { signs, constants })
    }
}

fn exact(q: &Rational) -> Scalar {
    Scalar::Exact(Surd::from_rational(q))
}

/// `sqrt(prod atoms^v)`, exact when every exponent is an integer.
fn magnitude(atoms: &[BigUint], v: &[Rational]) -> Scalar {
    if v.iter().all(|q| q.is_integer()) {
        let sq = atoms.iter().zip(v).fold(Rational::one(), |acc, (a, q)| {
            let a = Rational::from_integer(a.clone().into());
            acc * rational_pow(&a, q.to_integer().to_i64().expect("small exponent"))
        });
        return Scalar::Exact(Surd::sqrt(sq).expect("positive"));
    }
    let ln: f64 = atoms
        .iter()
        .zip(v)
        .map(|(a, q)| rational_to_f64(q) * rational_to_f64(&Rational::from_integer(a.clone().into())).ln())
        .sum();
    Scalar::Approx((0.5 * ln).exp())
}

/// A `GRID_PER_AXIS`² grid over the box spanned by the cell samples, widened.
fn grid_seeds(cells: &[Cell]) -> Vec<Vec<f64>> {
    let pts: Vec<Vec<f64>> = cells.iter().map(|c| c.sample.iter().map(rational_to_f64).collect()).collect();
    if pts.is_empty() {
        return Vec::new();
    }
    let axis = |a: usize| -> Vec<f64> {
        let lo = pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min) - 1.0;
        let hi = pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max) + 1.0;
        (0..GRID_PER_AXIS).map(|k| lo + (hi - lo) * k as f64 / (GRID_PER_AXIS - 1) as f64).collect()
    };
    let (xs, ys) = (axis(0), axis(1));
    xs.iter().flat_map(|&u| ys.iter().map(move |&v| vec![u, v])).collect()
}
