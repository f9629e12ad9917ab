//! Numerical soundness checking of rule instances and schemas against a
//! model, and the coefficient condition tables of the idealized rules.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;

use num_complex::Complex64 as C64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::rules::{self, Bindings, ParamKind, RuleError, RuleInstance, RuleSchema, Suite, Value};
use crate::semantics::{compare, evaluate, fmt_sig17, CoeffFamily, Comparison, Family, Model, SemanticsError};

/// Seed of the random part of the default sampling grid.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Result for a single instance. λ satisfies ⟦lhs⟧ = λ⟦rhs⟧.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Sound,
    ProportionallySound(C64),
    Unsound(f64),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Sound => f.write_str("Sound"),
            Verdict::ProportionallySound(z) => {
                write!(f, "ProportionallySound lambda={},{}", fmt_sig17(z.re), fmt_sig17(z.im))
            }
            Verdict::Unsound(d) => write!(f, "Unsound dev={}", fmt_sig17(*d)),
        }
    }
}

/// Evaluate both sides and compare them.
pub fn check_instance(inst: &RuleInstance, model: &Model, tol: f64) -> Result<Verdict, SemanticsError> {
    let lhs = evaluate(&inst.lhs, model)?;
    let rhs = evaluate(&inst.rhs, model)?;
    Ok(match compare(&lhs, &rhs, tol)? {
        Comparison::Equal => Verdict::Sound,
        Comparison::Proportional(z) => Verdict::ProportionallySound(z),
        Comparison::Different(d) => Verdict::Unsound(d),
    })
}

/// The parameter grid a schema is checked over.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    /// Arity parameters range over 0..=max_arity (within the schema's range).
    pub max_arity: usize,
    /// Instances with more boundary legs than this are skipped.
    pub leg_cap: usize,
    pub phases: Vec<f64>,
    pub complexes: Vec<C64>,
    pub reals: Vec<f64>,
    /// Instances containing a node of larger degree are skipped.
    pub max_degree: Option<usize>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::with_seed(DEFAULT_SEED)
    }
}

impl Sampling {
    /// Fixed samples plus seeded random ones: 7 phases, 6 H-box parameters,
    /// 6 reals.
    pub fn with_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phases = vec![0.0, FRAC_PI_4, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
        phases.extend((0..2).map(|_| rng.gen_range(0.0..TAU)));
        let mut complexes = vec![
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(2.0, 0.0),
        ];
        complexes.push(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let mut reals = vec![0.0, 1.0, -1.0, 0.5, 3.0];
        reals.push(rng.gen_range(-3.0..3.0));
        Sampling {
            max_arity: 3,
            leg_cap: 12,
            phases,
            complexes,
            reals,
            max_degree: None,
        }
    }

    pub fn with_max_degree(mut self, d: usize) -> Self {
        self.max_degree = Some(d);
        self
    }

    /// One-line description for reports.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "arity 0..{} legs<={} phases {} complex {} reals {}",
            self.max_arity,
            self.leg_cap,
            self.phases.len(),
            self.complexes.len(),
            self.reals.len()
        );
        if let Some(d) = self.max_degree {
            s.push_str(&format!(" degree<={d}"));
        }
        s
    }

    /// Every arity combination crossed with cyclic value tuples: tuple i
    /// gives the j-th value parameter sample (i + j) of its list.
    pub fn bindings(&self, schema: &RuleSchema) -> Vec<Bindings> {
        let mut arity_grid: Vec<Vec<(&'static str, Value)>> = vec![vec![]];
        for p in schema.arity_params() {
            let ParamKind::Arity { min, max } = p.kind else { unreachable!() };
            let hi = max.min(self.max_arity);
            arity_grid = arity_grid
                .into_iter()
                .flat_map(|prefix| {
                    (min..=hi).map(move |k| {
                        let mut v = prefix.clone();
                        v.push((p.name, Value::Arity(k)));
                        v
                    })
                })
                .collect();
        }
        let values: Vec<_> = schema.value_params().collect();
        let tuples = values
            .iter()
            .map(|p| self.samples_len(p.kind))
            .max()
            .unwrap_or(1);
        let mut out = Vec::new();
        for arities in &arity_grid {
            for i in 0..tuples {
                let mut vals = Vec::new();
                for (j, p) in values.iter().enumerate() {
                    vals.push((p.name, self.sample(p.kind, i + j)));
                }
                out.push(Bindings(
                    schema
                        .params
                        .iter()
                        .map(|p| {
                            arities
                                .iter()
                                .chain(&vals)
                                .find(|(n, _)| *n == p.name)
                                .copied()
                                .expect("every parameter bound")
                        })
                        .collect(),
                ));
            }
        }
        out
    }

    fn samples_len(&self, kind: ParamKind) -> usize {
        match kind {
            ParamKind::Phase => self.phases.len(),
            ParamKind::Complex => self.complexes.len(),
            ParamKind::Real => self.reals.len(),
            ParamKind::Arity { .. } => 1,
        }
    }

    fn sample(&self, kind: ParamKind, i: usize) -> Value {
        match kind {
            ParamKind::Phase => Value::Phase(self.phases[i % self.phases.len()]),
            ParamKind::Complex => Value::Complex(self.complexes[i % self.complexes.len()]),
            ParamKind::Real => Value::Real(self.reals[i % self.reals.len()]),
            ParamKind::Arity { .. } => unreachable!("arities are gridded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Checked(Verdict),
    /// Outside the rule's domain or the sampling limits.
    Skipped(String),
    /// Instantiation or evaluation failed.
    Failed(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Checked(v) => write!(f, "{v}"),
            Outcome::Skipped(r) => write!(f, "Skipped ({r})"),
            Outcome::Failed(r) => write!(f, "Failed ({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub key: String,
    pub bindings: Bindings,
    pub outcome: Outcome,
}

/// Summary over all instances of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregate {
    Sound,
    /// Every instance proportional; the common λ when it is constant.
    ProportionallySound(Option<C64>),
    Unsound,
    /// Some instance failed to instantiate or evaluate.
    Failed,
    /// No instance was checked.
    Empty,
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregate::Sound => f.write_str("Sound"),
            Aggregate::ProportionallySound(Some(z)) => {
                write!(f, "ProportionallySound lambda={},{}", fmt_sig17(z.re), fmt_sig17(z.im))
            }
            Aggregate::ProportionallySound(None) => f.write_str("ProportionallySound lambda=varying"),
            Aggregate::Unsound => f.write_str("Unsound"),
            Aggregate::Failed => f.write_str("Failed"),
            Aggregate::Empty => f.write_str("Empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub schema: &'static str,
    pub model: String,
    pub tol: f64,
    pub grid: String,
    /// Sorted by binding key in natural order.
    pub records: Vec<InstanceRecord>,
}

impl CheckReport {
    pub fn checked(&self) -> impl Iterator<Item = &Verdict> {
        self.records.iter().filter_map(|r| match &r.outcome {
            Outcome::Checked(v) => Some(v),
            _ => None,
        })
    }

    pub fn aggregate(&self) -> Aggregate {
        if self.records.iter().any(|r| matches!(r.outcome, Outcome::Failed(_))) {
            return Aggregate::Failed;
        }
        let verdicts: Vec<&Verdict> = self.checked().collect();
        if verdicts.is_empty() {
            return Aggregate::Empty;
        }
        if verdicts.iter().any(|v| matches!(v, Verdict::Unsound(_))) {
            return Aggregate::Unsound;
        }
        if verdicts.iter().all(|v| **v == Verdict::Sound) {
            return Aggregate::Sound;
        }
        let lambdas: Vec<C64> = verdicts
            .iter()
            .map(|v| match v {
                Verdict::ProportionallySound(z) => *z,
                _ => C64::new(1.0, 0.0),
            })
            .collect();
        let first = lambdas[0];
        let tol = self.tol.max(1e-12) * first.norm().max(1.0);
        let constant = lambdas.iter().all(|z| (z - first).norm() <= tol);
        Aggregate::ProportionallySound(constant.then_some(first))
    }

    pub fn is_sound(&self) -> bool {
        self.aggregate() == Aggregate::Sound
    }

    /// (checked, skipped, failed)
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for r in &self.records {
            match r.outcome {
                Outcome::Checked(_) => c.0 += 1,
                Outcome::Skipped(_) => c.1 += 1,
                Outcome::Failed(_) => c.2 += 1,
            }
        }
        c
    }

    /// Line-oriented text: a header, one line per instance, a summary.
    pub fn render(&self) -> String {
        let mut s = format!(
            "rule {} model {} tol {} grid {}\n",
            self.schema, self.model, self.tol, self.grid
        );
        for r in &self.records {
            s.push_str(&format!("  {} {}\n", r.key, r.outcome));
        }
        let (c, k, f) = self.counts();
        s.push_str(&format!(
            "aggregate {} checked {c} skipped {k} failed {f}\n",
            self.aggregate()
        ));
        s
    }
}

fn check_one(schema: &'static RuleSchema, b: &Bindings, model: &Model, tol: f64, sampling: &Sampling) -> Outcome {
    let inst = match schema.instantiate(b) {
        Ok(i) => i,
        Err(RuleError::Domain(m)) => return Outcome::Skipped(m),
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    let legs = inst.lhs.boundary_count();
    if legs > sampling.leg_cap {
        return Outcome::Skipped(format!("{legs} legs over cap {}", sampling.leg_cap));
    }
    if let Some(d) = sampling.max_degree {
        let top = [&inst.lhs, &inst.rhs]
            .iter()
            .flat_map(|side| side.degrees().into_values())
            .max()
            .unwrap_or(0);
        if top > d {
            return Outcome::Skipped(format!("node degree {top} over {d}"));
        }
    }
    match check_instance(&inst, model, tol) {
        Ok(v) => Outcome::Checked(v),
        Err(e) => Outcome::Failed(e.to_string()),
    }
}

/// Check explicit bindings; the sampling supplies only the skip limits.
pub fn check_bindings(
    schema: &'static RuleSchema,
    bindings: &[Bindings],
    model: &Model,
    sampling: &Sampling,
    tol: f64,
    grid: String,
) -> CheckReport {
    let mut records: Vec<InstanceRecord> = bindings
        .par_iter()
        .map(|b| InstanceRecord {
            key: b.key(),
            bindings: b.clone(),
            outcome: check_one(schema, b, model, tol, sampling),
        })
        .collect();
    rules::sort_by_key(&mut records, |r| r.key.clone());
    CheckReport {
        schema: schema.name,
        model: model.name.clone(),
        tol,
        grid,
        records,
    }
}

/// Check every instance of the sampling grid.
pub fn check_schema(schema: &'static RuleSchema, model: &Model, sampling: &Sampling, tol: f64) -> CheckReport {
    let bindings = sampling.bindings(schema);
    check_bindings(schema, &bindings, model, sampling, tol, sampling.describe())
}

/// Check every schema of a suite, in catalogue order.
pub fn check_suite(suite: Suite, model: &Model, sampling: &Sampling, tol: f64) -> Vec<CheckReport> {
    rules::suite(suite)
        .into_iter()
        .map(|s| check_schema(s, model, sampling, tol))
        .collect()
}

// ---- condition tables ----------------------------------------------------

/// One model on a coefficient axis, with the verdict the condition predicts.
#[derive(Debug, Clone)]
pub struct AxisPoint {
    pub label: String,
    pub model: Model,
    pub expected_sound: bool,
}

/// An idealized rule together with the models probing its condition.
#[derive(Debug, Clone)]
pub struct ConditionTable {
    /// "idealized-zx" or "idealized-zh".
    pub table: &'static str,
    pub rule: &'static str,
    /// The condition being probed.
    pub condition: String,
    pub points: Vec<AxisPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub table: &'static str,
    pub rule: &'static str,
    pub condition: String,
    pub point: String,
    pub expected_sound: bool,
    pub observed: Aggregate,
}

impl TableRow {
    pub fn observed_sound(&self) -> bool {
        self.observed == Aggregate::Sound
    }

    pub fn matches(&self) -> bool {
        self.observed_sound() == self.expected_sound
    }

    pub fn render(&self) -> String {
        format!(
            "{} | {} | {} | {} | expected {} | observed {} | {}",
            self.table,
            self.rule,
            self.condition,
            self.point,
            if self.expected_sound { "sound" } else { "unsound" },
            self.observed,
            if self.matches() { "ok" } else { "MISMATCH" }
        )
    }
}

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Points q*−1, q*, q*+1 on the quarter-log axis of the given families at
/// degree k, on top of `base`; sound is expected exactly at q*.
pub fn coefficient_axis(base: &Model, families: &[Family], k: usize, q_star: i64) -> Vec<AxisPoint> {
    [q_star - 1, q_star, q_star + 1]
        .into_iter()
        .map(|x| {
            let mut m = base.clone();
            for f in families {
                m.set(*f, k, q(x));
            }
            let names: Vec<String> = families.iter().map(|f| format!("{f}{k}")).collect();
            let label = format!("{}={}", names.join("="), x);
            m.name = format!("{}[{label}]", base.name);
            AxisPoint {
                label,
                model: m,
                expected_sound: x == q_star,
            }
        })
        .collect()
}

/// Run a rule over each point of a table.
pub fn verify_condition_table(table: &ConditionTable, sampling: &Sampling, tol: f64) -> Result<Vec<TableRow>, RuleError> {
    let schema = rules::lookup(table.rule)?;
    Ok(table
        .points
        .iter()
        .map(|p| TableRow {
            table: table.table,
            rule: schema.name,
            condition: table.condition.clone(),
            point: p.label.clone(),
            expected_sound: p.expected_sound,
            observed: check_schema(schema, &p.model, sampling, tol).aggregate(),
        })
        .collect())
}

fn single(table: &'static str, rule: &'static str, families: &[Family], k: usize, q_star: i64) -> ConditionTable {
    let names: Vec<String> = families.iter().map(|f| format!("{f}{k}")).collect();
    ConditionTable {
        table,
        rule,
        condition: format!("{} = 2^({q_star}/4)", names.join("=")),
        points: coefficient_axis(&Model::nu(), families, k, q_star),
    }
}

/// ν with u = v on the manifold u_k = u₁^{2−k}, u₁ = 2^{t/4}.
fn nu_with_uv(t: i64) -> Model {
    let mut m = Model::nu();
    m.u = CoeffFamily::power_law(-t, 2 * t);
    m.v = m.u.clone();
    m
}

/// On-manifold points t ∈ {−2, −1, 0} and the same with one coefficient
/// moved by one quarter-log unit.
fn family(
    table: &'static str,
    rule: &'static str,
    condition: &str,
    make: impl Fn(i64) -> Model,
    perturb: (Family, usize),
) -> ConditionTable {
    let mut points = Vec::new();
    for t in [-2, -1, 0] {
        let mut m = make(t);
        m.name = format!("family[t={t}]");
        points.push(AxisPoint {
            label: format!("t={t}"),
            model: m.clone(),
            expected_sound: true,
        });
        let (f, k) = perturb;
        let x = m.quarter_log(f, k).expect("family defined at the perturbed degree");
        m.set(f, k, x + q(1));
        m.name = format!("family[t={t},{f}{k}+1]");
        points.push(AxisPoint {
            label: format!("t={t} {f}{k}+1"),
            model: m,
            expected_sound: false,
        });
    }
    ConditionTable {
        table,
        rule,
        condition: condition.to_string(),
        points,
    }
}

/// The coefficient conditions of every idealized rule, probed around ν.
/// Quarter-log values: u = v throughout; x_f,k denotes log₂ f_k times 4.
pub fn standard_tables() -> Vec<ConditionTable> {
    use Family::{G, H, U, V};
    const ZX: &str = "idealized-zx";
    const ZH: &str = "idealized-zh";
    vec![
        single(ZX, "Id Z", &[U, V], 2, 0),
        single(ZX, "Id R", &[U, V], 2, 0),
        single(ZX, "Unit R", &[U, V], 3, 1),
        single(ZX, "Counit Z", &[U, V], 3, 1),
        single(ZX, "Copy ZR", &[U, V], 3, 1),
        single(ZX, "Bialg ZR", &[U, V], 3, 1),
        single(ZX, "Special Z", &[U, V], 3, 0),
        single(ZX, "Empty ZR", &[U, V], 1, -1),
        family(ZX, "Fuse Z", "x_u,k = (2-k) x_u,1", nu_with_uv, (U, 3)),
        family(ZX, "Switch ZR", "x_v,k = x_u,k", nu_with_uv, (V, 3)),
        single(ZH, "Id H", &[H], 2, -2),
        single(ZH, "Not", &[U, V], 3, 1),
        single(ZH, "Mult ZH", &[H], 1, -1),
        single(ZH, "Unit ZH", &[H], 1, -1),
        single(ZH, "Orth ZH", &[U, V], 1, -2),
        single(ZH, "Dilem ZH", &[U, V], 1, -1),
        single(ZH, "Avg ZH", &[U, V], 3, -1),
        family(
            ZH,
            "Switch ZG",
            "x_g,k = 4 + k x_h,2 + x_u,k",
            |t| {
                let mut m = nu_with_uv(t);
                m.g = CoeffFamily::power_law(-(2 + t), 4 + 2 * t);
                m
            },
            (G, 3),
        ),
        family(
            ZH,
            "Bialg ZG",
            "x_g,k = -x_u,k = (k-2) x_u,1",
            |t| {
                let mut m = nu_with_uv(t);
                m.g = CoeffFamily::power_law(t, -2 * t);
                m
            },
            (G, 3),
        ),
        family(
            ZH,
            "Bialg ZH",
            "x_u,k = -2 - x_h,k = (2-k) x_u,1",
            |t| {
                let mut m = nu_with_uv(t);
                m.h = CoeffFamily::power_law(t, -2 - 2 * t);
                m
            },
            (H, 3),
        ),
        fuse_h_table(),
    ]
}

fn fuse_h_table() -> ConditionTable {
    let base = Model::nu();
    let mut bad = base.clone();
    bad.set(Family::H, 3, q(-2));
    bad.name = "nu[h3=-2]".into();
    ConditionTable {
        table: "idealized-zh",
        rule: "Fuse H",
        condition: "x_h,k = -k".into(),
        points: vec![
            AxisPoint {
                label: "h=-k".into(),
                model: base,
                expected_sound: true,
            },
            AxisPoint {
                label: "h3=-2".into(),
                model: bad,
                expected_sound: false,
            },
        ],
    }
}

/// Run every standard table.
pub fn run_tables(sampling: &Sampling, tol: f64) -> Vec<TableRow> {
    standard_tables()
        .iter()
        .flat_map(|t| verify_condition_table(t, sampling, tol).expect("standard tables name known rules"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let s = Sampling::default();
        assert_eq!(s.phases.len(), 7);
        assert_eq!(s.complexes.len(), 6);
        let fuse = rules::lookup("Fuse_Z").unwrap();
        assert_eq!(s.bindings(fuse).len(), 256 * 7);
        let id = rules::lookup("Id_Z").unwrap();
        assert_eq!(s.bindings(id), vec![Bindings::default()]);
        assert_eq!(Sampling::with_seed(1), Sampling::with_seed(1));
    }

    #[test]
    fn axis_points() {
        let pts = coefficient_axis(&Model::nu(), &[Family::U, Family::V], 3, 0);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1].model.quarter_log(Family::V, 3), Some(q(0)));
        assert_eq!(pts[1].model.quarter_log(Family::U, 2), Some(q(0)));
        assert!(pts[1].expected_sound && !pts[0].expected_sound);
    }

    #[test]
    fn special_z_scaling() {
        let r = check_schema(rules::lookup("Special Z").unwrap(), &Model::nu(), &Sampling::default(), 1e-9);
        match r.aggregate() {
            Aggregate::ProportionallySound(Some(z)) => {
                assert!((z - C64::new(std::f64::consts::SQRT_2, 0.0)).norm() < 1e-10)
            }
            other => panic!("{other:?}"),
        }
    }
}
