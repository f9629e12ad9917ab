//! Rewrite-rule schemas: parametric pairs of diagram builders, grouped into
//! suites, and their instantiation.

mod angles;
mod catalogue;

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::diagram::{natural_cmp, Diagram, DiagramError};
use crate::semantics::{Calculus, Model};

pub use angles::{arg0, euler_angles, is_odd_multiple_of_pi, scale_nu_lambda, EulerAngles};

/// Largest arity accepted by any "…"-leg parameter.
pub const MAX_ARITY: usize = 8;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("unknown rule \"{0}\"")]
    UnknownRule(String),
    #[error("binding error: {0}")]
    Binding(String),
    #[error("outside the rule's domain: {0}")]
    Domain(String),
    #[error("{rule}: sides differ in boundary signature ({lhs} vs {rhs})")]
    Signature {
        rule: String,
        lhs: String,
        rhs: String,
    },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Rule families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// Axioms of the well-tempered ZX calculus.
    WellTemperedZx,
    /// Axioms of the well-tempered ZH calculus.
    WellTemperedZh,
    /// Scalar-exact ZX rules for the unnormalised standard model.
    LegacyZx,
    /// Scalar-exact ZH rules for the unnormalised standard model.
    LegacyZh,
    /// Scalar-free candidate rules whose soundness constrains the model.
    Idealized,
    /// Rules derivable from the axioms, used by the rewriter.
    Derived,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::WellTemperedZx,
        Suite::WellTemperedZh,
        Suite::LegacyZx,
        Suite::LegacyZh,
        Suite::Idealized,
        Suite::Derived,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::WellTemperedZx => "welltempered-zx",
            Suite::WellTemperedZh => "welltempered-zh",
            Suite::LegacyZx => "legacy-zx",
            Suite::LegacyZh => "legacy-zh",
            Suite::Idealized => "idealized",
            Suite::Derived => "derived",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Model under which the suite is meant to be sound.
    pub fn default_model(&self) -> Model {
        match self {
            Suite::LegacyZx => Model::alpha(),
            Suite::LegacyZh => Model::beta(),
            _ => Model::nu(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    /// Number of legs, within [min, max].
    Arity { min: usize, max: usize },
    /// Angle in radians.
    Phase,
    /// H-box entry.
    Complex,
    /// Real exponent.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Arity(usize),
    Phase(f64),
    Complex(C64),
    Real(f64),
}

/// Concrete values for a schema's parameters, in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bindings(pub Vec<(&'static str, Value)>);

impl Bindings {
    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    /// Stable identifier used in reports and fixture file names, e.g.
    /// `k1_l0_theta0.785398`.
    pub fn key(&self) -> String {
        if self.0.is_empty() {
            return "default".into();
        }
        self.0
            .iter()
            .map(|(n, v)| match v {
                Value::Arity(k) => format!("{n}{k}"),
                Value::Phase(x) | Value::Real(x) => format!("{n}{}", fmt6(*x)),
                Value::Complex(z) => format!("{n}{}i{}", fmt6(z.re), fmt6(z.im)),
            })
            .collect::<Vec<_>>()
            .join("_")
    }
}

fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with("-0.000000") {
        "0.000000".into()
    } else {
        s
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, v)| match v {
                Value::Arity(k) => format!("{n}={k}"),
                Value::Phase(x) | Value::Real(x) => format!("{n}={x}"),
                Value::Complex(z) => format!("{n}={}{:+}i", z.re, z.im),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Typed access to bindings inside builders.
pub(crate) struct Args<'a>(&'a Bindings);

impl Args<'_> {
    pub(crate) fn n(&self, name: &str) -> usize {
        match self.0.get(name) {
            Some(Value::Arity(k)) => k,
            other => panic!("arity {name} missing: {other:?}"),
        }
    }

    pub(crate) fn phase(&self, name: &str) -> f64 {
        match self.0.get(name) {
            Some(Value::Phase(x)) => x,
            other => panic!("phase {name} missing: {other:?}"),
        }
    }

    pub(crate) fn c(&self, name: &str) -> C64 {
        match self.0.get(name) {
            Some(Value::Complex(z)) => z,
            other => panic!("complex {name} missing: {other:?}"),
        }
    }

    pub(crate) fn r(&self, name: &str) -> f64 {
        match self.0.get(name) {
            Some(Value::Real(x)) => x,
            other => panic!("real {name} missing: {other:?}"),
        }
    }
}

pub(crate) type BuildFn = fn(&Args) -> Result<(Diagram, Diagram), RuleError>;

/// A parametric rewrite.
pub struct RuleSchema {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub suite: Suite,
    pub calculus: Calculus,
    pub params: &'static [ParamSpec],
    /// Informal description of both sides.
    pub summary: &'static str,
    pub(crate) build: BuildFn,
}

impl fmt::Debug for RuleSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuleSchema")
            .field("name", &self.name)
            .field("suite", &self.suite)
            .field("params", &self.params)
            .finish()
    }
}

/// A schema with concrete bindings and both sides built.
#[derive(Debug, Clone)]
pub struct RuleInstance {
    pub schema: &'static str,
    pub bindings: Bindings,
    pub lhs: Diagram,
    pub rhs: Diagram,
}

impl RuleSchema {
    pub fn arity_params(&self) -> impl Iterator<Item = &ParamSpec> {
        self.params
            .iter()
            .filter(|p| matches!(p.kind, ParamKind::Arity { .. }))
    }

    pub fn value_params(&self) -> impl Iterator<Item = &ParamSpec> {
        self.params
            .iter()
            .filter(|p| !matches!(p.kind, ParamKind::Arity { .. }))
    }

    /// Check bindings against the declared parameters and build both sides.
    pub fn instantiate(&'static self, bindings: &Bindings) -> Result<RuleInstance, RuleError> {
        if bindings.0.len() != self.params.len() {
            return Err(RuleError::Binding(format!(
                "{} expects {} parameters, got {}",
                self.name,
                self.params.len(),
                bindings.0.len()
            )));
        }
        for (spec, (name, value)) in self.params.iter().zip(&bindings.0) {
            if spec.name != *name {
                return Err(RuleError::Binding(format!(
                    "expected parameter {}, got {name}",
                    spec.name
                )));
            }
            let ok = match (spec.kind, value) {
                (ParamKind::Arity { min, max }, Value::Arity(k)) => (min..=max).contains(k),
                (ParamKind::Phase, Value::Phase(x)) | (ParamKind::Real, Value::Real(x)) => {
                    x.is_finite()
                }
                (ParamKind::Complex, Value::Complex(z)) => z.re.is_finite() && z.im.is_finite(),
                _ => false,
            };
            if !ok {
                return Err(RuleError::Binding(format!(
                    "{name} = {value:?} outside the declared range of {}",
                    self.name
                )));
            }
        }
        let (lhs, rhs) = (self.build)(&Args(bindings))?;
        lhs.check()?;
        rhs.check()?;
        if lhs.inputs().len() != rhs.inputs().len() || lhs.outputs().len() != rhs.outputs().len() {
            return Err(RuleError::Signature {
                rule: self.name.to_string(),
                lhs: format!("{}→{}", lhs.inputs().len(), lhs.outputs().len()),
                rhs: format!("{}→{}", rhs.inputs().len(), rhs.outputs().len()),
            });
        }
        Ok(RuleInstance {
            schema: self.name,
            bindings: bindings.clone(),
            lhs,
            rhs,
        })
    }
}

/// Every schema, in a fixed order.
pub fn catalogue() -> &'static [RuleSchema] {
    static CAT: OnceLock<Vec<RuleSchema>> = OnceLock::new();
    CAT.get_or_init(catalogue::all)
}

/// Find a schema by name or alias.
pub fn lookup(name: &str) -> Result<&'static RuleSchema, RuleError> {
    catalogue()
        .iter()
        .find(|s| s.name == name || s.aliases.contains(&name))
        .ok_or_else(|| RuleError::UnknownRule(name.to_string()))
}

/// Schemas of one suite.
pub fn suite(s: Suite) -> Vec<&'static RuleSchema> {
    catalogue().iter().filter(|r| r.suite == s).collect()
}

/// Instantiate a schema by name with parameters given as `(name, value)`.
pub fn instantiate(name: &str, bindings: &[(&'static str, Value)]) -> Result<RuleInstance, RuleError> {
    lookup(name)?.instantiate(&Bindings(bindings.to_vec()))
}

/// File-system friendly form of a rule name: characters outside
/// `[A-Za-z0-9_-]` become `_`, with `^` spelled out and a suite prefix
/// separator `:` rendered as `-`.
pub fn sanitize_name(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            'A'..='Z' | 'a'..='z' | '0'..='9' | '_' | '-' => c,
            ':' => '-',
            _ => '_',
        })
        .collect()
}

/// Sort instances by binding key, in natural order.
pub fn sort_by_key<T>(items: &mut [T], key: impl Fn(&T) -> String) {
    items.sort_by(|a, b| natural_cmp(&key(a), &key(b)));
}
