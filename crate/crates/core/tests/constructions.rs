use nicel_core::constructions::{contraction_limit, extension_tower, is_one_bracket_extension, one_bracket_extension};
use nicel_core::einstein::{solve_diagonal, solve_k, verify_einstein, Flavor, Mode, SolveOptions};
use nicel_core::exactla::rat;
use nicel_core::{build_diagram, StructureConstants};

const A842_117: &str = "(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})";
const A952_355: &str = "(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36})";
const A952_394: &str = "(0,0,0,0,e^{12},e^{34},e^{13},e^{14}+e^{25}+e^{36},e^{15}+e^{23}+e^{46})";
const EXTRA_25: &str = "(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36}+e^{25})";

fn sc(t: &str) -> StructureConstants {
    StructureConstants::parse_tuple(t).unwrap()
}

#[test]
fn extra_bracket_contracts_to_952_355() {
    let a = sc(EXTRA_25);
    let rm = build_diagram(&a).unwrap().root_matrix();
    let s = solve_k(&rm, Flavor::Einstein).unwrap();
    assert_eq!(s.dimension(), 0);
    let zeros: Vec<String> =
        rm.index_set().iter().zip(&s.particular).filter(|(_, x)| *x == &rat(0, 1)).map(|(e, _)| e.subscript()).collect();
    assert_eq!(zeros, ["259"]);
    let limit = contraction_limit(&a, &s.particular).unwrap();
    assert_eq!(limit, sc(A952_355));
    assert!(limit.jacobi_residual().is_empty());
    let r = solve_diagonal(&limit, &SolveOptions::default()).unwrap();
    for c in r.verdict.certificates() {
        assert!(verify_einstein(&limit, &c.metric().to_metric(), &rat(1, 2), 0.0).passes);
    }
    assert_eq!(r.verdict.certificates().len(), 2);
}

#[test]
fn extension_of_842_117_is_952_394() {
    let ext = one_bracket_extension(&sc(A842_117), 0, 3).unwrap();
    let ours = build_diagram(&ext).unwrap();
    let target_sc = sc(A952_394);
    let target = build_diagram(&target_sc).unwrap();
    let perm = ours.isomorphism(&target).unwrap().expect("isomorphic diagrams");
    let relabeled = build_diagram(&ext.relabel(&perm)).unwrap();
    assert_eq!(relabeled.root_matrix(), target.root_matrix());
    // and the quotient of the corpus labeling of 952:394 is 842:117 again
    let (q, r) = is_one_bracket_extension(&target_sc).unwrap();
    assert_eq!(r, 6);
    assert!(build_diagram(&q).unwrap().isomorphism(&build_diagram(&sc(A842_117)).unwrap()).unwrap().is_some());
}

#[test]
fn column_scan_agrees_on_842_117() {
    // a column of M with a single nonzero entry, equal to 1
    let a = sc(A842_117);
    let rm = build_diagram(&a).unwrap().root_matrix();
    let scan = (0..rm.cols()).rev().find(|&c| {
        let col: Vec<i64> = rm.entries().iter().map(|row| row[c]).filter(|&v| v != 0).collect();
        col == [1]
    });
    assert_eq!(is_one_bracket_extension(&a).map(|(_, r)| r), scan);
}

#[test]
fn tower_certifies_dimensions_9_to_12() {
    let levels = extension_tower(&sc(A842_117), 0, 3, 4, &SolveOptions::default()).unwrap();
    assert_eq!(levels.iter().map(|l| l.algebra.dim()).collect::<Vec<_>>(), [9, 10, 11, 12]);
    for l in &levels {
        let rm = build_diagram(&l.algebra).unwrap().root_matrix();
        assert!(rm.gf2().det().unwrap(), "level {}", l.level);
        let certs = l.report.verdict.certificates();
        assert!(!certs.is_empty(), "level {}: {:?}", l.level, l.report.verdict);
        let target = l.contracted.as_ref().unwrap_or(&l.algebra);
        for c in certs {
            let tol = if c.mode == Mode::Exact { 0.0 } else { 1e-9 };
            assert!(verify_einstein(target, &c.metric().to_metric(), &rat(1, 2), tol).passes);
        }
        let x = l.report.solution.as_ref().unwrap();
        let sum: nicel_core::Rational = x.particular.iter().sum();
        assert_eq!(sum, rat(-(target.dim() as i64), 1));
    }
}

#[test]
fn tower_reports_failing_level() {
    // partner 2 gives de^9 = e^{13}, and [e_1, e_3] = e_8 is already a bracket
    let err = extension_tower(&sc(A842_117), 0, 2, 2, &SolveOptions::default()).unwrap_err();
    assert!(err.to_string().contains("level 1"), "{err}");
}
