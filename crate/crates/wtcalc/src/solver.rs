//! Exact linear constraint solving over quarter-log₂ coefficient exponents.
//!
//! A positive coefficient c is represented by x with c = 2^{x/4}; every
//! multiplicative soundness condition becomes a linear equation in the x's.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::semantics::{CoeffFamily, Family, Model, RULE_TOL};
use crate::soundness::{check_schema, Aggregate, Sampling};

/// Smallest admissible truncation degree.
pub const MIN_K: usize = 4;
/// Default truncation degree.
pub const DEFAULT_K: usize = 6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("unknown constraint \"{0}\" (known: {1})")]
    UnknownConstraint(String, String),
    #[error("truncation degree {0} below the minimum {MIN_K}")]
    DegreeTooSmall(usize),
    #[error("system is unsatisfiable")]
    Unsat,
    #[error("exponents needed by the rules are not determined: {0}")]
    Undetermined(String),
    #[error("exponent {0} does not fit a 64-bit rational")]
    Overflow(String),
    #[error(transparent)]
    Rule(#[from] crate::rules::RuleError),
}

/// An unknown exponent x_{f,k}; ξ uses k = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub family: Family,
    pub k: usize,
}

impl Var {
    pub fn new(family: Family, k: usize) -> Self {
        Var {
            family,
            k: if family == Family::Xi { 0 } else { k },
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family == Family::Xi {
            write!(f, "x_xi")
        } else {
            write!(f, "x_{},{}", self.family, self.k)
        }
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn from_r64(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Narrow an exact exponent to the model's number type.
pub fn to_r64(r: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// Σ coeff·x = rhs, tagged with the constraint that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub coeffs: BTreeMap<Var, BigRational>,
    pub rhs: BigRational,
    pub source: String,
}

impl Equation {
    fn new(source: String, terms: &[(i64, Var)], rhs: i64) -> Self {
        let mut coeffs: BTreeMap<Var, BigRational> = BTreeMap::new();
        for (c, v) in terms {
            *coeffs.entry(*v).or_insert_with(BigRational::zero) += big(*c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Equation {
            coeffs,
            rhs: big(rhs),
            source,
        }
    }

    /// Whether the equation reads 0 = 0.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && self.rhs.is_zero()
    }

    /// lhs − rhs at the model's exponents; None if a coefficient is undefined.
    pub fn residual(&self, model: &Model) -> Option<BigRational> {
        let mut s = -self.rhs.clone();
        for (v, c) in &self.coeffs {
            s += c * from_r64(model.quarter_log(v.family, v.k)?);
        }
        Some(s)
    }

    pub fn holds_in(&self, model: &Model) -> Option<bool> {
        self.residual(model).map(|r| r.is_zero())
    }
}

fn fmt_linear(coeffs: &BTreeMap<Var, BigRational>) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (v, c)) in coeffs.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag} "));
        }
        s.push_str(&v.to_string());
    }
    s
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} = {}", self.source, fmt_linear(&self.coeffs), self.rhs)
    }
}

/// Names accepted by [`compile`], in registry order.
pub const REGISTRY: &[&str] = &[
    "Denotational",
    "Change",
    "KetZeroExact",
    "IdZ",
    "UnitR_CounitZ",
    "CopyZR",
    "BialgZR",
    "FuseZ",
    "SpecialZ",
    "IdH",
    "Not",
    "SwitchZG",
    "MultZH",
    "UnitZH",
    "BialgZG",
    "BialgZH",
    "FuseH",
    "OrthZH",
    "DilemZH",
    "AvgZH",
];

fn canonical_name(name: &str) -> Option<&'static str> {
    match name {
        "UnitR" | "CounitZ" => Some("UnitR_CounitZ"),
        _ => REGISTRY.iter().copied().find(|n| *n == name),
    }
}

/// Idealized rules whose soundness a constraint expresses.
pub fn rules_for(name: &str) -> &'static [&'static str] {
    match canonical_name(name).unwrap_or("") {
        "Change" => &["Switch ZR"],
        "IdZ" => &["Id Z"],
        "UnitR_CounitZ" => &["Unit R", "Counit Z"],
        "CopyZR" => &["Copy ZR"],
        "BialgZR" => &["Bialg ZR"],
        "FuseZ" => &["Fuse Z"],
        "SpecialZ" => &["Special Z"],
        "IdH" => &["Id H"],
        "Not" => &["Not"],
        "SwitchZG" => &["Switch ZG"],
        "MultZH" => &["Mult ZH"],
        "UnitZH" => &["Unit ZH"],
        "BialgZG" => &["Bialg ZG"],
        "BialgZH" => &["Bialg ZH"],
        "FuseH" => &["Fuse H"],
        "OrthZH" => &["Orth ZH"],
        "DilemZH" => &["Dilem ZH"],
        "AvgZH" => &["Avg ZH"],
        _ => &[],
    }
}

/// Equations of one registry constraint at truncation degree `k_max`.
fn equations_of(name: &'static str, k_max: usize) -> Vec<Equation> {
    use Family::{G, H, U, V, Xi};
    let x = Var::new;
    let tag = |k: Option<usize>| match k {
        Some(k) => format!("{name} k={k}"),
        None => name.to_string(),
    };
    let one = |terms: &[(i64, Var)], rhs: i64| vec![Equation::new(tag(None), terms, rhs)];
    let mut out = Vec::new();
    match name {
        "Denotational" => {
            let d = "Denotational".to_string();
            out.push(Equation::new(d.clone(), &[(1, x(U, 2))], 0));
            out.push(Equation::new(d.clone(), &[(1, x(V, 2))], 0));
            out.push(Equation::new(d.clone(), &[(1, x(Xi, 0))], 0));
            out.push(Equation::new(d.clone(), &[(1, x(U, 3))], 1));
            out.push(Equation::new(d.clone(), &[(1, x(V, 3))], 1));
            out.push(Equation::new(d, &[(1, x(G, 3))], -1));
            for k in 0..=k_max {
                out.push(Equation::new(tag(Some(k)), &[(1, x(H, k))], -(k as i64)));
            }
        }
        "Change" => {
            for k in 0..=k_max {
                out.push(Equation::new(tag(Some(k)), &[(1, x(U, k)), (-1, x(V, k))], 0));
            }
        }
        "KetZeroExact" | "OrthZH" => return one(&[(1, x(U, 1))], -2),
        "IdZ" => return one(&[(1, x(U, 2))], 0),
        "UnitR_CounitZ" => return one(&[(1, x(U, 3)), (1, x(U, 1))], 0),
        "CopyZR" => return one(&[(1, x(U, 3)), (-1, x(U, 1))], 2),
        "BialgZR" => return one(&[(1, x(U, 3))], 1),
        "SpecialZ" => return one(&[(1, x(U, 3))], 0),
        "IdH" => return one(&[(1, x(H, 2))], -2),
        "Not" => return one(&[(1, x(U, 3)), (1, x(H, 1)), (2, x(H, 2))], -4),
        "MultZH" => return one(&[(1, x(H, 1)), (1, x(U, 3))], 0),
        "UnitZH" => return one(&[(1, x(H, 1)), (-1, x(U, 1))], 0),
        "DilemZH" => return one(&[(1, x(U, 1)), (-1, x(H, 1)), (2, x(H, 2))], -4),
        "AvgZH" => return one(&[(1, x(U, 3)), (-1, x(H, 1)), (2, x(H, 2))], -4),
        "FuseZ" => {
            for k in (0..=k_max).filter(|k| *k != 1) {
                out.push(Equation::new(tag(Some(k)), &[(1, x(U, k)), (k as i64 - 2, x(U, 1))], 0));
            }
        }
        "SwitchZG" => {
            for k in 0..=k_max {
                out.push(Equation::new(
                    tag(Some(k)),
                    &[(1, x(G, k)), (-(k as i64), x(H, 2)), (-1, x(U, k))],
                    4,
                ));
            }
        }
        "BialgZG" => {
            for k in 1..=k_max {
                out.push(Equation::new(tag(Some(k)), &[(1, x(G, k)), (1, x(U, k))], 0));
                out.push(Equation::new(tag(Some(k)), &[(1, x(G, k)), (2 - k as i64, x(U, 1))], 0));
            }
        }
        "BialgZH" => {
            for k in 1..=k_max {
                out.push(Equation::new(tag(Some(k)), &[(1, x(U, k)), (1, x(H, k))], -2));
                if k != 1 {
                    out.push(Equation::new(tag(Some(k)), &[(1, x(U, k)), (k as i64 - 2, x(U, 1))], 0));
                }
            }
        }
        "FuseH" => {
            for k in 0..=k_max {
                out.push(Equation::new(tag(Some(k)), &[(1, x(H, k))], -(k as i64)));
            }
        }
        _ => unreachable!("registry names are exhaustive"),
    }
    out.retain(|e| !e.is_trivial());
    out
}

/// Linear system over x_{f,k} (f ∈ u,v,g,h; k = 0..=K) and x_ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub k_max: usize,
    pub equations: Vec<Equation>,
}

impl ConstraintSystem {
    /// Every unknown, in a fixed order.
    pub fn variables(&self) -> Vec<Var> {
        let mut v: Vec<Var> = [Family::U, Family::V, Family::G, Family::H]
            .into_iter()
            .flat_map(|f| (0..=self.k_max).map(move |k| Var::new(f, k)))
            .collect();
        v.push(Var::new(Family::Xi, 0));
        v
    }

    /// Unknowns occurring in some equation.
    pub fn mentioned(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self
            .equations
            .iter()
            .flat_map(|e| e.coeffs.keys().copied())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn with(&self, extra: Equation) -> ConstraintSystem {
        let mut s = self.clone();
        s.equations.push(extra);
        s
    }
}

/// Build the system for the named constraints.
pub fn compile(names: &[&str], k_max: usize) -> Result<ConstraintSystem, SolverError> {
    if k_max < MIN_K {
        return Err(SolverError::DegreeTooSmall(k_max));
    }
    let mut equations = Vec::new();
    for n in names {
        let c = canonical_name(n.trim())
            .ok_or_else(|| SolverError::UnknownConstraint(n.to_string(), REGISTRY.join(",")))?;
        equations.extend(equations_of(c, k_max));
    }
    Ok(ConstraintSystem { k_max, equations })
}

/// Result of elimination.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Solved {
        determined: BTreeMap<Var, BigRational>,
        /// Non-pivot unknowns.
        free: Vec<Var>,
        /// Pivot unknowns expressed through free ones, `x = rhs − Σ c·free`.
        dependent: Vec<(Var, Equation)>,
    },
    Unsat {
        /// A minimal inconsistent subset, in system order.
        conflict: Vec<Equation>,
    },
}

impl Solution {
    pub fn is_unsat(&self) -> bool {
        matches!(self, Solution::Unsat { .. })
    }

    pub fn value(&self, v: Var) -> Option<&BigRational> {
        match self {
            Solution::Solved { determined, .. } => determined.get(&v),
            Solution::Unsat { .. } => None,
        }
    }

    /// Line-oriented text: `FAMILY K = 2^{q /4}` per determined unknown,
    /// then free and dependent unknowns; or `UNSAT:` with the conflict.
    pub fn render(&self) -> String {
        let mut s = String::new();
        match self {
            Solution::Solved {
                determined,
                free,
                dependent,
            } => {
                for (v, q) in determined {
                    s.push_str(&format!("{} {} = 2^{{{q} /4}}\n", v.family, v.k));
                }
                let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
                s.push_str(&format!("free: {}\n", names.join(" ")));
                for (_, e) in dependent {
                    s.push_str(&format!("dependent: {} = {}\n", fmt_linear(&e.coeffs), e.rhs));
                }
            }
            Solution::Unsat { conflict } => {
                s.push_str("UNSAT:\n");
                for e in conflict {
                    s.push_str(&format!("  {e}\n"));
                }
            }
        }
        s
    }
}

/// Reduced row echelon form of an augmented system.
struct Echelon {
    vars: Vec<Var>,
    /// Rows of coefficients followed by the right-hand side.
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    consistent: bool,
}

fn eliminate(vars: &[Var], eqs: &[Equation]) -> Echelon {
    let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = vars.len();
    let mut rows: Vec<Vec<BigRational>> = eqs
        .iter()
        .map(|e| {
            let mut r = vec![BigRational::zero(); n + 1];
            for (v, c) in &e.coeffs {
                r[index[v]] = c.clone();
            }
            r[n] = e.rhs.clone();
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].recip();
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[row].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let consistent = rows[row..].iter().all(|r| r[n].is_zero());
    rows.truncate(row);
    Echelon {
        vars: vars.to_vec(),
        rows,
        pivots,
        consistent,
    }
}

fn consistent(vars: &[Var], eqs: &[Equation]) -> bool {
    eliminate(vars, eqs).consistent
}

/// Shrink an inconsistent list to a minimal inconsistent subset: take the
/// shortest inconsistent prefix, then drop members whose removal keeps it
/// inconsistent.
fn minimal_conflict(vars: &[Var], eqs: &[Equation]) -> Vec<Equation> {
    let end = (1..=eqs.len())
        .find(|&i| !consistent(vars, &eqs[..i]))
        .expect("called on an inconsistent system");
    let mut core: Vec<Equation> = eqs[..end].to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if !consistent(vars, &trial) {
            core = trial;
        } else {
            i += 1;
        }
    }
    core
}

/// Gaussian elimination over the rationals.
pub fn solve(system: &ConstraintSystem) -> Solution {
    let vars = system.variables();
    let ech = eliminate(&vars, &system.equations);
    if !ech.consistent {
        return Solution::Unsat {
            conflict: minimal_conflict(&vars, &system.equations),
        };
    }
    let n = vars.len();
    let mut determined = BTreeMap::new();
    let mut dependent = Vec::new();
    for (r, &p) in ech.rows.iter().zip(&ech.pivots) {
        let others: BTreeMap<Var, BigRational> = (0..n)
            .filter(|&j| j != p && !r[j].is_zero())
            .map(|j| (ech.vars[j], r[j].clone()))
            .collect();
        if others.is_empty() {
            determined.insert(ech.vars[p], r[n].clone());
        } else {
            let mut coeffs = others;
            coeffs.insert(ech.vars[p], BigRational::one());
            dependent.push((
                ech.vars[p],
                Equation {
                    coeffs,
                    rhs: r[n].clone(),
                    source: "elimination".into(),
                },
            ));
        }
    }
    let free = (0..n)
        .filter(|j| !ech.pivots.contains(j))
        .map(|j| ech.vars[j])
        .collect();
    Solution::Solved {
        determined,
        free,
        dependent,
    }
}

fn augmented_rank(vars: &[Var], eqs: &[Equation]) -> usize {
    let e = eliminate(vars, eqs);
    e.rows.len() + usize::from(!e.consistent)
}

/// Whether every solution of `system` satisfies `eq` (vacuously true when
/// the system is unsatisfiable).
pub fn implies(system: &ConstraintSystem, eq: &Equation) -> bool {
    let vars = system.variables();
    if !consistent(&vars, &system.equations) {
        return true;
    }
    let mut all = system.equations.clone();
    all.push(eq.clone());
    augmented_rank(&vars, &all) == augmented_rank(&vars, &system.equations)
}

/// Whether `names` together imply every equation of `target`.
pub fn implies_constraint(names: &[&str], target: &str, k_max: usize) -> Result<bool, SolverError> {
    let sys = compile(names, k_max)?;
    Ok(compile(&[target], k_max)?.equations.iter().all(|e| implies(&sys, e)))
}

/// Whether the model satisfies every equation of a constraint at degrees
/// up to `k_max`. None when some needed coefficient is undefined.
pub fn holds(name: &str, model: &Model, k_max: usize) -> Result<Option<bool>, SolverError> {
    let sys = compile(&[name], k_max.max(MIN_K))?;
    let mut all = true;
    for e in &sys.equations {
        match e.holds_in(model) {
            Some(b) => all &= b,
            None => return Ok(None),
        }
    }
    Ok(Some(all))
}

/// Every-degree verdict for closed-form families: each condition at degree
/// k is linear in k once the families are power laws, so agreement at
/// degrees 0..=MIN_K decides it for all k.
pub fn holds_for_all_degrees(name: &str, model: &Model) -> Result<bool, SolverError> {
    for f in [Family::U, Family::V, Family::G, Family::H] {
        if !matches!(model.family(f), Some(CoeffFamily::PowerLaw { .. })) {
            return Err(SolverError::Undetermined(format!(
                "family {f} is not a closed form"
            )));
        }
    }
    Ok(holds(name, model, MIN_K)?.expect("closed forms are total"))
}

/// Model whose exponents are the determined values, v taken from u where
/// only u is determined, and every other coefficient at its ν value.
pub fn model_from_solution(solution: &Solution, k_max: usize) -> Result<Model, SolverError> {
    let Solution::Solved { determined, .. } = solution else {
        return Err(SolverError::Unsat);
    };
    let mut m = Model::nu();
    m.name = "solution".into();
    for f in [Family::U, Family::V, Family::G, Family::H] {
        let mut table = BTreeMap::new();
        for k in 0..=k_max {
            let val = determined
                .get(&Var::new(f, k))
                .or_else(|| match f {
                    Family::V => determined.get(&Var::new(Family::U, k)),
                    _ => None,
                })
                .map(|q| to_r64(q).ok_or_else(|| SolverError::Overflow(q.to_string())))
                .transpose()?;
            let q = val.unwrap_or_else(|| m.quarter_log(f, k).expect("ν closed form is total"));
            table.insert(k, q);
        }
        let fam = CoeffFamily::Explicit(table);
        match f {
            Family::U => m.u = fam,
            Family::V => m.v = fam,
            Family::G => m.g = fam,
            Family::H => m.h = fam,
            Family::Xi => {}
        }
    }
    if let Some(q) = determined.get(&Var::new(Family::Xi, 0)) {
        m.xi = to_r64(q).ok_or_else(|| SolverError::Overflow(q.to_string()))?;
    }
    Ok(m)
}

/// Solver verdict against checker verdict for one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckRow {
    pub constraint: &'static str,
    pub rule: &'static str,
    pub equations_hold: bool,
    pub verdict: Aggregate,
}

impl CrossCheckRow {
    pub fn agree(&self) -> bool {
        self.equations_hold == (self.verdict == Aggregate::Sound)
    }

    pub fn render(&self) -> String {
        format!(
            "{} {} equations {} checker {} {}",
            self.constraint,
            self.rule,
            if self.equations_hold { "hold" } else { "fail" },
            self.verdict,
            if self.agree() { "agree" } else { "DISAGREE" }
        )
    }
}

/// Build the model of a solution and check the rules behind each named
/// constraint on grids limited to degree `k_max`.
pub fn cross_check(solution: &Solution, names: &[&str], k_max: usize) -> Result<Vec<CrossCheckRow>, SolverError> {
    let model = model_from_solution(solution, k_max)?;
    let sys = compile(names, k_max)?;
    let Solution::Solved { determined, .. } = solution else {
        return Err(SolverError::Unsat);
    };
    let missing: Vec<String> = sys
        .mentioned()
        .into_iter()
        .filter(|v| !determined.contains_key(v))
        .map(|v| v.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(SolverError::Undetermined(missing.join(" ")));
    }
    let sampling = Sampling::default().with_max_degree(k_max);
    let mut rows = Vec::new();
    for n in names {
        let c = canonical_name(n.trim()).expect("compiled above");
        let hold = holds(c, &model, k_max)?.expect("model tables cover 0..=K");
        for rule in rules_for(c) {
            let schema = crate::rules::lookup(rule)?;
            rows.push(CrossCheckRow {
                constraint: c,
                rule: schema.name,
                equations_hold: hold,
                verdict: check_schema(schema, &model, &sampling, RULE_TOL).aggregate(),
            });
        }
    }
    Ok(rows)
}
