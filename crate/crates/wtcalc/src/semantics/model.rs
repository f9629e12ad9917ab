//! Coefficient families and named models.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::SemanticsError;
use crate::diagram::{phase_eq, NodeKind};

/// Degrees materialised when a closed-form family is converted to a table.
pub const EXPLICIT_DEGREES: usize = 32;

/// Values of 2^{r/4} for r = 0..3.
const QUARTER_POWERS: [f64; 4] = [1.0, 1.189_207_115_002_721, SQRT_2, 1.681_792_830_507_429];

/// 2^{q/4}, exact to the last bit for integer q.
pub fn pow2_quarter(q: Rational64) -> f64 {
    if *q.denom() == 1 {
        let n = *q.numer();
        let r = n.rem_euclid(4);
        let e = (n - r) / 4;
        QUARTER_POWERS[r as usize] * 2f64.powi(e as i32)
    } else {
        2f64.powf(q.to_f64().unwrap_or(f64::NAN) / 4.0)
    }
}

/// 2^{x/4} for a real exponent, through the exact table when x is integral.
pub fn pow2_quarter_f64(x: f64) -> f64 {
    if x.fract() == 0.0 && x.abs() < 1e9 {
        pow2_quarter(Rational64::from_integer(x as i64))
    } else {
        2f64.powf(x / 4.0)
    }
}

/// Which generators a model interprets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calculus {
    /// Green and red spiders, Hadamard boxes; white dots read as phase-free
    /// green spiders.
    Zx,
    /// White dots, H-boxes, gray dots, not dots; phase-free green spiders
    /// read as white dots.
    Zh,
    /// Every generator.
    Hybrid,
}

/// Coefficient families of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    U,
    V,
    G,
    H,
    Xi,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::U, Family::V, Family::G, Family::H, Family::Xi];

    pub fn name(&self) -> &'static str {
        match self {
            Family::U => "u",
            Family::V => "v",
            Family::G => "g",
            Family::H => "h",
            Family::Xi => "xi",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "u" => Ok(Family::U),
            "v" => Ok(Family::V),
            "g" => Ok(Family::G),
            "h" => Ok(Family::H),
            "xi" | "ξ" => Ok(Family::Xi),
            other => Err(format!("unknown coefficient family \"{other}\"")),
        }
    }
}

/// A degree-indexed family of positive coefficients, stored as quarter-log₂
/// exponents: the coefficient at degree k is 2^{q_k/4}.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffFamily {
    /// q_k = a·k + b.
    PowerLaw { a: Rational64, b: Rational64 },
    /// q_k listed per degree; missing degrees are undefined.
    Explicit(BTreeMap<usize, Rational64>),
}

impl CoeffFamily {
    pub fn power_law(a: i64, b: i64) -> Self {
        CoeffFamily::PowerLaw {
            a: Rational64::from_integer(a),
            b: Rational64::from_integer(b),
        }
    }

    pub fn constant_one() -> Self {
        Self::power_law(0, 0)
    }

    pub fn quarter_log(&self, k: usize) -> Option<Rational64> {
        match self {
            CoeffFamily::PowerLaw { a, b } => Some(*a * Rational64::from_integer(k as i64) + *b),
            CoeffFamily::Explicit(t) => t.get(&k).copied(),
        }
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.quarter_log(k).map(pow2_quarter)
    }

    /// Table form over degrees 0..=max_k.
    pub fn to_explicit(&self, max_k: usize) -> CoeffFamily {
        match self {
            CoeffFamily::Explicit(_) => self.clone(),
            CoeffFamily::PowerLaw { .. } => CoeffFamily::Explicit(
                (0..=max_k)
                    .map(|k| (k, self.quarter_log(k).expect("closed form is total")))
                    .collect(),
            ),
        }
    }

    /// Override a single degree, converting a closed form to a table first.
    pub fn set(&mut self, k: usize, q: Rational64) {
        if let CoeffFamily::PowerLaw { .. } = self {
            *self = self.to_explicit(EXPLICIT_DEGREES.max(k));
        }
        if let CoeffFamily::Explicit(t) = self {
            t.insert(k, q);
        }
    }

    /// Whether a table agrees with the closed form q_k = a·k + b on every
    /// listed degree; a closed form agrees with itself.
    pub fn agrees_with_power_law(&self, a: Rational64, b: Rational64) -> bool {
        match self {
            CoeffFamily::PowerLaw { a: a2, b: b2 } => *a2 == a && *b2 == b,
            CoeffFamily::Explicit(t) => t
                .iter()
                .all(|(k, q)| *q == a * Rational64::from_integer(*k as i64) + b),
        }
    }
}

/// Coefficient assignment for every generator and degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub calculus: Calculus,
    pub u: CoeffFamily,
    pub v: CoeffFamily,
    pub g: CoeffFamily,
    pub h: CoeffFamily,
    /// Quarter-log₂ of ξ.
    pub xi: Rational64,
    pub hadamard_scale: f64,
}

impl Model {
    /// The standard ZX model: spiders unnormalised, unitary Hadamard.
    pub fn alpha() -> Self {
        Model {
            name: "alpha".into(),
            calculus: Calculus::Zx,
            u: CoeffFamily::constant_one(),
            v: CoeffFamily::constant_one(),
            g: CoeffFamily::constant_one(),
            h: CoeffFamily::constant_one(),
            xi: Rational64::zero(),
            hadamard_scale: 1.0,
        }
    }

    /// The standard ZH model: every coefficient 1.
    pub fn beta() -> Self {
        Model {
            name: "beta".into(),
            calculus: Calculus::Zh,
            ..Model::alpha()
        }
    }

    /// The well-tempered model: u_k = v_k = ν^{2−k}, g_k = ν^{k−2},
    /// h_k = ν^k with ν = 2^{−1/4}.
    pub fn nu() -> Self {
        Model {
            name: "nu".into(),
            calculus: Calculus::Hybrid,
            u: CoeffFamily::power_law(1, -2),
            v: CoeffFamily::power_law(1, -2),
            g: CoeffFamily::power_law(-1, 2),
            h: CoeffFamily::power_law(-1, 0),
            xi: Rational64::zero(),
            hadamard_scale: 1.0,
        }
    }

    /// Look up a named model.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "alpha" | "α" => Some(Model::alpha()),
            "beta" | "β" => Some(Model::beta()),
            "nu" | "ν" => Some(Model::nu()),
            _ => None,
        }
    }

    /// Parse a coefficient file: lines `FAMILY K QUARTERLOG`, where
    /// QUARTERLOG is a rational `p/q` and the coefficient is 2^{QUARTERLOG/4}.
    /// An optional `base alpha|beta|nu` line picks the starting model
    /// (default nu). Blank lines and `#` comments are ignored.
    pub fn from_coefficient_file(name: &str, text: &str) -> Result<Self, SemanticsError> {
        let err = |line: usize, message: String| SemanticsError::ModelFile { line, message };
        let mut base: Option<Model> = None;
        let mut overrides = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields[0] == "base" {
                if fields.len() != 2 {
                    return Err(err(line, "expected `base alpha|beta|nu`".into()));
                }
                if base.is_some() || !overrides.is_empty() {
                    return Err(err(line, "`base` must come first and only once".into()));
                }
                base = Some(
                    Model::named(fields[1])
                        .ok_or_else(|| err(line, format!("unknown base model \"{}\"", fields[1])))?,
                );
                continue;
            }
            if fields.len() != 3 {
                return Err(err(line, "expected `FAMILY K QUARTERLOG`".into()));
            }
            let family: Family = fields[0].parse().map_err(|e| err(line, e))?;
            let k: usize = fields[1]
                .parse()
                .map_err(|_| err(line, format!("bad degree \"{}\"", fields[1])))?;
            let q: Rational64 = fields[2]
                .parse()
                .map_err(|_| err(line, format!("bad rational \"{}\"", fields[2])))?;
            overrides.push((family, k, q));
        }
        let mut m = base.unwrap_or_else(Model::nu);
        m.name = name.to_string();
        for (f, k, q) in overrides {
            m.set(f, k, q);
        }
        Ok(m)
    }

    pub fn family(&self, f: Family) -> Option<&CoeffFamily> {
        match f {
            Family::U => Some(&self.u),
            Family::V => Some(&self.v),
            Family::G => Some(&self.g),
            Family::H => Some(&self.h),
            Family::Xi => None,
        }
    }

    /// Override one coefficient; for ξ the degree is ignored.
    pub fn set(&mut self, f: Family, k: usize, q: Rational64) {
        match f {
            Family::U => self.u.set(k, q),
            Family::V => self.v.set(k, q),
            Family::G => self.g.set(k, q),
            Family::H => self.h.set(k, q),
            Family::Xi => self.xi = q,
        }
    }

    /// Quarter-log₂ exponent of a coefficient.
    pub fn quarter_log(&self, f: Family, k: usize) -> Option<Rational64> {
        match f {
            Family::Xi => Some(self.xi),
            _ => self.family(f).and_then(|c| c.quarter_log(k)),
        }
    }

    pub fn coefficient(&self, f: Family, k: usize) -> Result<f64, SemanticsError> {
        self.quarter_log(f, k)
            .map(pow2_quarter)
            .ok_or(SemanticsError::CoefficientUndefined { family: f, degree: k })
    }

    /// Whether the model's calculus interprets this generator.
    pub fn licenses(&self, kind: &NodeKind) -> bool {
        match self.calculus {
            Calculus::Hybrid => true,
            Calculus::Zx => matches!(
                kind,
                NodeKind::ZSpider(_) | NodeKind::XSpider(_) | NodeKind::Hadamard | NodeKind::WhiteDot
            ),
            Calculus::Zh => match kind {
                NodeKind::ZSpider(p) => phase_eq(*p, 0.0, 1e-12),
                NodeKind::WhiteDot | NodeKind::HBox(_) | NodeKind::GrayDot | NodeKind::NotDot => {
                    true
                }
                _ => false,
            },
        }
    }
}
