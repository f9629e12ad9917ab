//! Exact coefficient solving and its agreement with the numerical checker.

use std::f64::consts::FRAC_1_SQRT_2;

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;

use wtcalc::rules::Suite;
use wtcalc::semantics::{Family, Model, RULE_TOL};
use wtcalc::solver::{compile, cross_check, implies_constraint, model_from_solution, solve, Solution, Var};
use wtcalc::soundness::{check_suite, Aggregate, Sampling};

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn value(s: &Solution, f: Family, k: usize) -> Option<BigRational> {
    s.value(Var::new(f, k)).cloned()
}

fn solved(names: &[&str], k: usize) -> Solution {
    let s = solve(&compile(names, k).unwrap());
    assert!(!s.is_unsat(), "{}", s.render());
    s
}

#[test]
fn denotational_block() {
    let s = solved(&["Denotational"], 4);
    for f in [Family::U, Family::V] {
        assert_eq!(value(&s, f, 2), Some(r(0)));
        assert_eq!(value(&s, f, 3), Some(r(1)));
    }
    assert_eq!(value(&s, Family::Xi, 0), Some(r(0)));
    assert_eq!(value(&s, Family::G, 3), Some(r(-1)));
    for k in 0..=4 {
        assert_eq!(value(&s, Family::H, k), Some(r(-(k as i64))), "h{k}");
    }
}

#[test]
fn nu_exponents_are_forced() {
    let s = solved(&["Denotational", "Change", "FuseZ", "BialgZG", "SwitchZG"], 6);
    for k in 0..=6usize {
        let kk = k as i64;
        assert_eq!(value(&s, Family::U, k), Some(r(kk - 2)), "u{k}");
        assert_eq!(value(&s, Family::V, k), Some(r(kk - 2)), "v{k}");
        assert_eq!(value(&s, Family::G, k), Some(r(2 - kk)), "g{k}");
        assert_eq!(value(&s, Family::H, k), Some(r(-kk)), "h{k}");
    }
    let Solution::Solved { free, .. } = &s else { unreachable!() };
    assert!(free.is_empty());
}

#[test]
fn four_block_leaves_only_g0_open() {
    let s = solved(&["Denotational", "Change", "FuseZ", "BialgZG"], 6);
    let Solution::Solved { free, .. } = &s else { unreachable!() };
    assert_eq!(free, &vec![Var::new(Family::G, 0)]);
    for k in 1..=6usize {
        assert_eq!(value(&s, Family::G, k), Some(r(2 - k as i64)));
        assert_eq!(value(&s, Family::U, k), Some(r(k as i64 - 2)));
    }
}

#[test]
fn bialgebra_and_special_conflict() {
    let s = solve(&compile(&["BialgZR", "SpecialZ"], 6).unwrap());
    let Solution::Unsat { conflict } = &s else { panic!("{}", s.render()) };
    assert_eq!(conflict.len(), 2);
    let text = s.render();
    assert!(text.starts_with("UNSAT:"));
    assert!(text.contains("[BialgZR] x_u,3 = 1") && text.contains("[SpecialZ] x_u,3 = 0"), "{text}");
}

#[test]
fn exact_ket_conflict() {
    let s = solve(&compile(&["KetZeroExact", "FuseZ", "SpecialZ"], 6).unwrap());
    let Solution::Unsat { conflict } = &s else { panic!("{}", s.render()) };
    // Minimal: dropping any one equation leaves a consistent system.
    for skip in 0..conflict.len() {
        let rest: Vec<_> = conflict
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, e)| e.clone())
            .collect();
        let sys = wtcalc::solver::ConstraintSystem {
            k_max: 6,
            equations: rest,
        };
        assert!(!solve(&sys).is_unsat());
    }
}

#[test]
fn unit_and_copy() {
    let s = solved(&["UnitR_CounitZ", "CopyZR"], 6);
    assert_eq!(value(&s, Family::U, 1), Some(r(-1)));
    assert_eq!(value(&s, Family::U, 3), Some(r(1)));
}

#[test]
fn special_frobenius_forces_ones() {
    let s = solved(&["IdZ", "FuseZ", "SpecialZ"], 4);
    for k in 0..=4 {
        assert_eq!(value(&s, Family::U, k), Some(r(0)));
    }
}

#[test]
fn zh_triangle() {
    assert!(implies_constraint(&["IdH", "Not"], "MultZH", 6).unwrap());
    assert!(implies_constraint(&["IdH", "MultZH"], "Not", 6).unwrap());
    assert!(implies_constraint(&["Not", "MultZH"], "IdH", 6).unwrap());
    assert!(!implies_constraint(&["IdZ"], "SpecialZ", 6).unwrap());
}

#[test]
fn nu_solution_models_the_well_tempered_suite() {
    let s = solved(&["Denotational", "Change", "FuseZ", "BialgZG", "SwitchZG"], 6);
    let m = model_from_solution(&s, 6).unwrap();
    for f in [Family::U, Family::V, Family::G, Family::H] {
        for k in 0..=6 {
            assert_eq!(m.quarter_log(f, k), Model::nu().quarter_log(f, k), "{f}{k}");
        }
    }
    let sampling = Sampling::default().with_max_degree(6);
    for r in check_suite(Suite::WellTemperedZx, &m, &sampling, RULE_TOL) {
        assert!(r.is_sound(), "{}", r.render());
    }
}

#[test]
fn all_ones_cross_check() {
    let s = solved(&["IdZ", "FuseZ", "SpecialZ"], 6);
    let rows = cross_check(&s, &["IdZ", "FuseZ", "SpecialZ", "BialgZR"], 6).unwrap();
    for row in &rows {
        assert!(row.agree(), "{}", row.render());
    }
    let bialg = rows.iter().find(|r| r.constraint == "BialgZR").unwrap();
    assert!(!bialg.equations_hold);
    match bialg.verdict {
        Aggregate::ProportionallySound(Some(l)) => assert!((l - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-10),
        ref v => panic!("{v}"),
    }
}

#[test]
fn beta_is_all_zero_exponents() {
    let beta = Model::beta();
    for f in [Family::U, Family::V, Family::G, Family::H] {
        for k in 0..=6 {
            assert_eq!(beta.quarter_log(f, k).map(|q| *q.numer()), Some(0), "{f}{k}");
        }
    }
    for r in check_suite(Suite::LegacyZh, &beta, &Sampling::default(), RULE_TOL) {
        assert!(r.is_sound(), "{}", r.render());
    }
}
