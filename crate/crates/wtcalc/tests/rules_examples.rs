//! Rule catalogue shapes, side computations and soundness verdicts.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64 as C64;
use num_rational::Rational64;

use wtcalc::diagram::{Diagram, Endpoint, NodeKind};
use wtcalc::rules::{self, euler_angles, lookup, scale_nu_lambda, Bindings, RuleError, Suite, Value};
use wtcalc::semantics::{Family, Model, RULE_TOL};
use wtcalc::soundness::{
    check_instance, check_schema, check_suite, coefficient_axis, verify_condition_table, Aggregate, ConditionTable,
    Sampling, Verdict,
};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

fn lambda_of(v: &Verdict) -> C64 {
    match v {
        Verdict::ProportionallySound(z) => *z,
        other => panic!("expected a proportional verdict, got {other:?}"),
    }
}

fn plain(name: &str) -> rules::RuleInstance {
    lookup(name).unwrap().instantiate(&Bindings::default()).unwrap()
}

#[test]
fn fuse_z_schema() {
    let s = lookup("Fuse_Z").unwrap();
    let names: Vec<&str> = s.params.iter().map(|p| p.name).collect();
    assert_eq!(names, ["k", "l", "m", "n", "theta", "delta"]);
    let b = [
        ("k", Value::Arity(1)),
        ("l", Value::Arity(1)),
        ("m", Value::Arity(1)),
        ("n", Value::Arity(1)),
        ("theta", Value::Phase(FRAC_PI_4)),
        ("delta", Value::Phase(FRAC_PI_4)),
    ];
    let inst = rules::instantiate("Fuse_Z", &b).unwrap();
    assert_eq!(inst.lhs.nodes().len(), 2);
    assert_eq!(inst.rhs.nodes().len(), 1);
    let kind = inst.rhs.nodes().values().next().unwrap();
    assert!(kind.matches(&NodeKind::ZSpider(FRAC_PI_2), 1e-12));
}

#[test]
fn id_nu_schema() {
    let inst = plain("Id_ν");
    assert_eq!(inst.lhs.nodes().values().collect::<Vec<_>>(), [&NodeKind::NuBox(0.0)]);
    assert_eq!(inst.rhs, Diagram::empty());
}

#[test]
fn special_z_schema() {
    let inst = plain("Special Z");
    assert_eq!(inst.lhs.nodes().len(), 2);
    assert!(inst.lhs.nodes().values().all(|k| matches!(k, NodeKind::ZSpider(_))));
    let parallel = inst
        .lhs
        .edges()
        .iter()
        .filter(|(a, b)| matches!((a, b), (Endpoint::Node(_), Endpoint::Node(_))))
        .count();
    assert_eq!(parallel, 2);
    assert_eq!(inst.rhs, Diagram::wire());
}

#[test]
fn bialg_two_two() {
    let inst = rules::instantiate("Bialg", &[("m", Value::Arity(2)), ("n", Value::Arity(2))]).unwrap();
    let l = &inst.lhs;
    let inner = l
        .edges()
        .iter()
        .filter(|(a, b)| matches!((a, b), (Endpoint::Node(_), Endpoint::Node(_))))
        .count();
    assert_eq!(inner, 4);
    assert_eq!((l.inputs().len(), l.outputs().len()), (2, 2));
}

#[test]
fn scale_nu_domain() {
    let err = rules::instantiate("Scale_nu", &[("theta", Value::Phase(PI))]).unwrap_err();
    assert!(matches!(err, RuleError::Domain(_)));
    assert!(scale_nu_lambda(3.0 * PI).is_err());
}

#[test]
fn scale_nu_lambda_values() {
    // Oracle: log2(1 / cos^2(θ/2)) − 1.
    for theta in [0.0, FRAC_PI_2, 1.0, -2.5] {
        let want = (1.0 / (theta / 2.0).cos().powi(2)).log2() - 1.0;
        assert!((scale_nu_lambda(theta).unwrap() - want).abs() < 1e-12);
    }
    assert!(close(scale_nu_lambda(0.0).unwrap(), -1.0));
    assert!(close(scale_nu_lambda(FRAC_PI_2).unwrap(), 0.0));
}

#[test]
fn euler_angle_values() {
    let a = euler_angles(0.0, 0.0);
    assert!(close(a.phi1, FRAC_PI_2) && close(a.phi2, FRAC_PI_2) && close(a.phi3, FRAC_PI_2));
    assert!(close(a.gamma, -FRAC_PI_4));
    let b = euler_angles(FRAC_PI_2, 0.0);
    assert!(close(b.phi1, 3.0 * FRAC_PI_4) && close(b.phi2, 0.0) && close(b.phi3, 3.0 * FRAC_PI_4));
    assert!(close(b.gamma, FRAC_PI_4));
}

#[test]
fn euler_sound_off_grid() {
    let nu = Model::nu();
    for (t, d) in [(0.3, 2.9), (5.0, 0.0), (FRAC_PI_2, PI), (1.234, 4.321)] {
        let inst = rules::instantiate("Euler", &[("theta", Value::Phase(t)), ("delta", Value::Phase(d))]).unwrap();
        assert_eq!(check_instance(&inst, &nu, RULE_TOL).unwrap(), Verdict::Sound, "({t}, {d})");
    }
}

#[test]
fn well_tempered_spec_z_is_sound() {
    let r = check_schema(lookup("zh:Spec_Z").unwrap(), &Model::nu(), &Sampling::default(), RULE_TOL);
    assert!(r.is_sound(), "{}", r.render());
}

#[test]
fn idealized_scalings_under_nu() {
    let nu = Model::nu();
    let l = lambda_of(&check_instance(&plain("Special Z"), &nu, RULE_TOL).unwrap());
    assert!((l - C64::new(SQRT_2, 0.0)).norm() < 1e-10);
    let l = lambda_of(&check_instance(&plain("Orth ZH"), &nu, RULE_TOL).unwrap());
    assert!((l - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-10);
}

#[test]
fn idealized_fuse_h_beta() {
    let b = [
        ("k", Value::Arity(1)),
        ("l", Value::Arity(1)),
        ("m", Value::Arity(1)),
        ("n", Value::Arity(1)),
    ];
    let inst = rules::instantiate("Fuse H", &b).unwrap();
    let l = lambda_of(&check_instance(&inst, &Model::beta(), RULE_TOL).unwrap());
    assert!((l - C64::new(2.0, 0.0)).norm() < 1e-10);
}

#[test]
fn suites_sound_under_their_models() {
    let sampling = Sampling::default();
    for (suite, model) in [
        (Suite::WellTemperedZx, Model::nu()),
        (Suite::LegacyZx, Model::alpha()),
        (Suite::LegacyZh, Model::beta()),
    ] {
        for r in check_suite(suite, &model, &sampling, RULE_TOL) {
            assert!(r.is_sound(), "{}", r.render());
        }
    }
}

#[test]
fn special_z_axis() {
    let points = coefficient_axis(&Model::nu(), &[Family::U, Family::V], 3, 0);
    let table = ConditionTable {
        table: "idealized-zx",
        rule: "Special Z",
        condition: "u3 = 1".into(),
        points,
    };
    let rows = verify_condition_table(&table, &Sampling::default(), RULE_TOL).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.matches(), "{}", r.render());
    }
    assert!(rows[1].observed_sound());
    assert!(!rows[2].observed_sound());
}

#[test]
fn bialg_zg_on_and_off_manifold() {
    // On the manifold g_k = u_1^{k−2} = u_k^{−1}; off it g_3 is nudged.
    let base = Model::nu();
    let mut off = base.clone();
    let g3 = off.quarter_log(Family::G, 3).unwrap();
    off.set(Family::G, 3, g3 + Rational64::from_integer(1));
    let schema = lookup("Bialg ZG").unwrap();
    let sampling = Sampling::default();
    assert!(check_schema(schema, &base, &sampling, RULE_TOL).is_sound());
    assert_ne!(check_schema(schema, &off, &sampling, RULE_TOL).aggregate(), Aggregate::Sound);
}

#[test]
fn unit_r_requires_inverse_coefficients() {
    let schema = lookup("Unit R").unwrap();
    let sampling = Sampling::default();
    let mut m = Model::nu();
    let u1 = m.quarter_log(Family::U, 1).unwrap();
    assert!(check_schema(schema, &m, &sampling, RULE_TOL).is_sound());
    for f in [Family::U, Family::V] {
        m.set(f, 3, -u1 + Rational64::from_integer(1));
    }
    assert!(!check_schema(schema, &m, &sampling, RULE_TOL).is_sound());
}
