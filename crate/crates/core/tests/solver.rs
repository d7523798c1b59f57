use nicel_core::diagram::{build_diagram, Involution};
use nicel_core::einstein::{
    solve_diagonal, solve_k, solve_sigma, verify_einstein, EinsteinCertificate, Flavor, Mode, NonexistenceProof,
    Obstruction, Scalar, SolveOptions, Verdict,
};
use nicel_core::exactla::{int, rat, Rational, Surd};
use nicel_core::lie::StructureConstants;

const A842_117: &str = "(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})";
const A952_355: &str = "(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36})";
const A952_384: &str = "(0,0,0,0,e^{12},e^{34},e^{14}+e^{23},e^{13}+e^{25},e^{15}+e^{24}+e^{36})";
const A9531_495A: &str = "(0,0,0,0,- e^{12},-e^{13}+e^{24},e^{15}+e^{34},e^{14}+e^{26}+e^{35},e^{17}+e^{23}+e^{46})";
const A9631_93A: &str = "(0,0,0,e^{12},e^{13},e^{23},e^{14},e^{15}+e^{26},e^{17}+e^{24}+e^{35})";
const A9521_217A: &str = "(0,0,0,0,e^{12},e^{14}+e^{23},e^{13}+e^{24},e^{15},e^{18}+e^{25}+e^{37}+e^{46})";
const A96421_147A: &str = "(0,0,0,e^{12},e^{13},e^{24},e^{15}+e^{23},e^{14}+e^{26},e^{16}+e^{28}+e^{35})";
const A952_782: &str = "(0,0,0,0,e^{13}+e^{24},- e^{12},e^{34},e^{15}+e^{23}+e^{46},e^{14}+e^{27}+e^{35})";
const A86532_6: &str = "(0,0,e^{12},- e^{13},e^{23},-e^{15}+e^{24}, e^{16}+e^{25}+e^{34},e^{14}+e^{26}+e^{35})";

fn sc(t: &str) -> StructureConstants {
    StructureConstants::parse_tuple(t).unwrap()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn q(s: &Scalar) -> Rational {
    s.as_exact().and_then(Surd::to_rational).expect("rational value")
}

fn sigma_report(t: &str, sigma: &str, opts: &SolveOptions) -> nicel_core::einstein::SolveReport {
    let a = sc(t);
    solve_sigma(&a, &Involution::parse(sigma, a.dim()).unwrap(), opts).unwrap()
}

fn assert_sound(a: &StructureConstants, certs: &[EinsteinCertificate]) {
    for c in certs {
        let tol = if c.mode == Mode::Exact { 0.0 } else { 1e-9 };
        let r = verify_einstein(a, &c.metric().to_metric(), &rat(1, 2), tol);
        assert!(r.passes, "certificate fails verification: {r:?}");
    }
}

#[test]
fn k_solutions_match_worked_examples() {
    for (t, x) in [
        (A842_117, vec![-5, -5, -3, 7, -3, 7, -3, -3]),
        (A952_355, vec![-6, -6, 4, -3, -7, 8, 8, -7]),
        (A9631_93A, vec![5, 14, -13, -17, 15, -14, -18, 21, -2]),
        (A952_384, vec![-6, -6, -3, 4, 8, -7, 0, 8, -7]),
    ] {
        let rm = build_diagram(&sc(t)).unwrap().root_matrix();
        let s = solve_k(&rm, Flavor::Einstein).unwrap();
        assert_eq!(s.dimension(), 0, "{t}");
        assert_eq!(s.particular, ints(&x), "{t}");
    }
}

#[test]
fn one_parameter_k_family() {
    let d = build_diagram(&sc(A9521_217A)).unwrap();
    let s = solve_k(&d.root_matrix(), Flavor::Einstein).unwrap();
    assert_eq!(s.dimension(), 1);
    let at = |sub: &str| d.index_set().iter().position(|e| e.subscript() == sub).unwrap();
    // x_125 and x_{14,6}: first two rows, fixed on the family
    let (a0, b0) = s.component(0);
    let (a1, b1) = s.component(1);
    assert_eq!((a0, b0[0].clone()), (int(5), int(0)));
    assert_eq!((a1, b1[0].clone()), (rat(25, 2), int(0)));
    assert!(!s.kernel[0][at("236")].eq(&int(0)));
}

#[test]
fn heisenberg_is_k_obstructed() {
    let r = solve_diagonal(&sc("(0,0,e^{12})"), &SolveOptions::default()).unwrap();
    assert_eq!(r.verdict.obstruction(), Some(&Obstruction::K));
}

#[test]
fn ricci_flat_flavor_on_heisenberg_is_also_obstructed() {
    // x_{123} = 0 is forced by ᵗM X = 0
    let opts = SolveOptions { flavor: Flavor::RicciFlat, ..Default::default() };
    let r = solve_diagonal(&sc("(0,0,e^{12})"), &opts).unwrap();
    assert!(matches!(r.verdict.obstruction(), Some(Obstruction::H { .. })));
}

#[test]
fn diagonal_842_117_is_exact_with_orthonormal_form() {
    let a = sc(A842_117);
    let r = solve_diagonal(&a, &SolveOptions::default()).unwrap();
    let certs = r.verdict.certificates();
    assert_eq!(certs.len(), 1);
    let c = &certs[0];
    assert_eq!(c.mode, Mode::Exact);
    assert_eq!(c.signature, (6, 2));
    let ortho = c.orthonormal.as_ref().unwrap();
    assert_eq!(ortho.signs, "++++--++");
    let consts: Vec<String> = ortho.constants.iter().map(|(_, s)| s.to_string()).collect();
    assert_eq!(consts, ["sqrt(5)", "sqrt(5)", "sqrt(3)", "sqrt(7)", "sqrt(3)", "sqrt(7)", "sqrt(3)", "sqrt(3)"]);
    assert_sound(&a, certs);
}

#[test]
fn diagonal_952_355_with_gauge_on_second_node() {
    let a = sc(A952_355);
    let opts = SolveOptions { gauge_nodes: vec![1], ..Default::default() };
    let r = solve_diagonal(&a, &opts).unwrap();
    let certs = r.verdict.certificates();
    assert_eq!(certs.len(), 2);
    let expected = [
        rat(4, 21),
        int(1),
        rat(4, 21),
        rat(-64, 1323),
        rat(-8, 7),
        rat(512, 9261),
        rat(64, 441),
        rat(32, 21),
        rat(-2048, 27783),
    ];
    let g: Vec<Rational> = certs[0].g.iter().map(q).collect();
    assert_eq!(g, expected);
    // the other orbit flips the sign-kernel support {2,4,5,6,8,9}
    let flipped: Vec<Rational> = expected
        .iter()
        .enumerate()
        .map(|(i, v)| if [1, 3, 4, 5, 7, 8].contains(&i) { -v.clone() } else { v.clone() })
        .collect();
    assert_eq!(certs[1].g.iter().map(q).collect::<Vec<_>>(), flipped);
    assert_eq!(certs[0].gauge.unit_nodes, vec![2]);
    assert_eq!(certs[0].gauge.sign_solutions, 2);
    assert_sound(&a, certs);
}

#[test]
fn gauge_on_a_pivot_node_is_rejected() {
    // every node of 842:117 is fixed: M has full rank
    let opts = SolveOptions { gauge_nodes: vec![0], ..Default::default() };
    assert!(solve_diagonal(&sc(A842_117), &opts).is_err());
}

#[test]
fn sigma_842_117_unique_solution() {
    let r = sigma_report(A842_117, "(1,3)(2,4)(5,6)", &SolveOptions::default());
    let certs = r.verdict.certificates();
    assert_eq!(certs.len(), 1);
    let vals: Vec<(String, Rational)> = certs[0].orbit_values().into_iter().map(|(l, v)| (l, q(&v))).collect();
    let expected = [("13", rat(-7, 15)), ("24", rat(-7, 15)), ("56", rat(-49, 45)), ("7", rat(-343, 225)), ("8", rat(-343, 225))];
    assert_eq!(vals, expected.iter().map(|(l, v)| (l.to_string(), v.clone())).collect::<Vec<_>>());
    assert_eq!(certs[0].signature, (3, 5));
}

#[test]
fn sigma_952_355_fails_only_by_invariance() {
    let r = sigma_report(A952_355, "(1,3)(2,4)(5,6)(8,9)", &SolveOptions::default());
    assert!(matches!(r.verdict.obstruction(), Some(Obstruction::ConditionIII { .. })));
}

#[test]
fn sigma_identity_matches_diagonal() {
    let a = sc(A952_355);
    let d = solve_diagonal(&a, &SolveOptions::default()).unwrap();
    let s = solve_sigma(&a, &Involution::identity(9), &SolveOptions::default()).unwrap();
    assert_eq!(d, s);
}

#[test]
fn non_automorphism_is_an_error() {
    let a = sc(A842_117);
    assert!(solve_sigma(&a, &Involution::parse("(1,2)", 8).unwrap(), &SolveOptions::default()).is_err());
}

#[test]
fn forced_zeros() {
    let r = solve_diagonal(&sc(A952_384), &SolveOptions::default()).unwrap();
    let Some(Obstruction::H { indices }) = r.verdict.obstruction() else { panic!("{:?}", r.verdict) };
    assert_eq!(indices.iter().map(|e| e.subscript()).collect::<Vec<_>>(), ["159"]);
    let r = solve_diagonal(&sc(A9531_495A), &SolveOptions::default()).unwrap();
    let Some(Obstruction::H { indices }) = r.verdict.obstruction() else { panic!("{:?}", r.verdict) };
    assert_eq!(indices.iter().map(|e| e.subscript()).collect::<Vec<_>>(), ["157"]);
    let r = solve_diagonal(&sc(A842_117), &SolveOptions::default()).unwrap();
    assert!(r.verdict.obstruction().is_none());
}

#[test]
fn sign_obstructions() {
    for t in [A9631_93A, A9521_217A] {
        let r = solve_diagonal(&sc(t), &SolveOptions::default()).unwrap();
        assert_eq!(r.verdict.obstruction(), Some(&Obstruction::L), "{t}");
        assert!(r.cells.unwrap().exhaustive);
    }
}

#[test]
fn nonexistence_by_sturm() {
    let r = solve_diagonal(&sc(A96421_147A), &SolveOptions::default()).unwrap();
    assert_eq!(r.parameter_dim, Some(1));
    let cells = r.cells.as_ref().unwrap();
    assert_eq!(cells.passing().count(), 2);
    let Verdict::Nonexistent { proof: NonexistenceProof::Sturm { cells: sturm, .. } } = &r.verdict else {
        panic!("{:?}", r.verdict)
    };
    assert_eq!(sturm.len(), 2);
    assert!(sturm.iter().all(|c| c.roots == 0));
}

/// The ±√249 family with g1 = 1. The g8 entry uses `+183` and the g9 entry
/// carries the ± on the surd; as printed otherwise the metric is not Einstein
/// (see `printed_variants_are_not_einstein`).
fn closed_form_782(sign: f64) -> [f64; 9] {
    let s = sign * 249f64.sqrt();
    [
        1.0,
        3.0 / 16.0 * (s - 9.0),
        (731.0 + 47.0 * s) / 2205.0,
        (131253.0 + 8321.0 * s) / 463050.0,
        -(47.0 * s + 731.0) / 735.0,
        -9.0 / 16.0 * (5.0 * s - 73.0),
        -16.0 * (333103.0 * s + 5256379.0) / 170170875.0,
        2.0 / 105.0 * (11.0 * s + 183.0),
        4.0 * (8321.0 * s + 131253.0) / 231525.0,
    ]
}

#[test]
fn numeric_952_782_matches_closed_forms() {
    let a = sc(A952_782);
    let opts = SolveOptions { gauge_nodes: vec![0], ..Default::default() };
    let r = solve_diagonal(&a, &opts).unwrap();
    assert_eq!(r.parameter_dim, Some(2));
    let certs = r.verdict.certificates();
    assert!(!certs.is_empty());
    assert_sound(&a, certs);
    for sign in [1.0, -1.0] {
        let want = closed_form_782(sign);
        let hit = certs.iter().any(|c| {
            c.mode == Mode::Numeric
                && c.residual < 1e-9
                && c.g.iter().zip(&want).all(|(g, w)| (g.to_f64() - w).abs() <= 1e-9 * w.abs().max(1.0))
        });
        assert!(hit, "no certificate for the {sign} branch");
    }
}

#[test]
fn three_parameter_family_still_certifies() {
    let a = sc(A86532_6);
    let r = solve_diagonal(&a, &SolveOptions::default()).unwrap();
    assert_eq!(r.parameter_dim, Some(3));
    assert!(!r.cells.as_ref().unwrap().exhaustive);
    assert_sound(&a, r.verdict.certificates());
}

#[test]
fn every_certificate_is_sound() {
    for (t, sigma) in [
        (A842_117, "(1,2)(3,4)(7,8)"),
        (A842_117, "(1,4)(2,3)(5,6)(7,8)"),
        (A86532_6, "(1,2)(4,5)(7,8)"),
        (A952_355, "id"),
        (A952_782, "id"),
    ] {
        let a = sc(t);
        let r = solve_sigma(&a, &Involution::parse(sigma, a.dim()).unwrap(), &SolveOptions::default()).unwrap();
        assert!(!r.verdict.certificates().is_empty(), "{t} {sigma}");
        assert_sound(&a, r.verdict.certificates());
    }
}


#[test]
fn printed_variants_are_not_einstein() {
    use nicel_core::einstein::Metric;
    let a = sc(A952_782);
    let diag = |g: &[f64; 9]| Metric::Numeric((0..9).map(|i| (0..9).map(|j| if i == j { g[i] } else { 0.0 }).collect()).collect());
    let r = 249f64.sqrt();
    for sign in [1.0, -1.0] {
        let g = closed_form_782(sign);
        assert!(verify_einstein(&a, &diag(&g), &rat(1, 2), 1e-9).passes);
        let mut printed_g8 = g;
        printed_g8[7] = 2.0 / 105.0 * (11.0 * sign * r - 183.0);
        assert!(!verify_einstein(&a, &diag(&printed_g8), &rat(1, 2), 1e-9).passes);
        if sign < 0.0 {
            let mut printed_g9 = g;
            printed_g9[8] = 4.0 * (8321.0 * r - 131253.0) / 231525.0;
            assert!(!verify_einstein(&a, &diag(&printed_g9), &rat(1, 2), 1e-9).passes);
        }
    }
}
