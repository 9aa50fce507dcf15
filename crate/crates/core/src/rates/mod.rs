//! Birth and death rate sequences.
//!
//! A chain on `{0, 1, 2, ...}` jumps `i -> i+1` at rate `b_i` (`i >= 0`) and
//! `i -> i-1` at rate `a_i` (`i >= 1`). Every algorithm in the crate reads
//! rates through [`BirthDeathRates`], which exposes both the natural value and
//! its logarithm so that super-exponential families stay representable.

mod boundary;
mod measure;
mod series;

pub use boundary::{
    classify_boundary, BoundaryClass, BoundaryReport, Certificate, ConsistencyCheck,
};
pub use measure::{build_measures, build_measures_with, MeasureTable, MuStorage, Stationary};
#[allow(unused_imports)]
pub(crate) use series::{ln_prefix_ratios, ln_suffix_ratios};
pub use series::{
    mean_passage_down_reflected, mean_passage_up, series_inverse_mu_b, series_mu, series_r,
    series_r_from, series_s, series_t, series_u1, DecisionRule, DivergenceWitness, SeriesValue,
    TailPolicy, Verdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Read access to a birth-death parameter pair `(a_i, b_i)`.
pub trait BirthDeathRates: Send + Sync {
    /// `b_i`, the rate of `i -> i+1`.
    fn birth(&self, i: usize) -> f64;
    /// `a_i`, the rate of `i -> i-1`. Only meaningful for `i >= 1`.
    fn death(&self, i: usize) -> f64;
    fn ln_birth(&self, i: usize) -> f64 {
        self.birth(i).ln()
    }
    fn ln_death(&self, i: usize) -> f64 {
        self.death(i).ln()
    }
    fn label(&self) -> &str {
        ""
    }
}

impl<T: BirthDeathRates + ?Sized> BirthDeathRates for &T {
    fn birth(&self, i: usize) -> f64 {
        (**self).birth(i)
    }
    fn death(&self, i: usize) -> f64 {
        (**self).death(i)
    }
    fn ln_birth(&self, i: usize) -> f64 {
        (**self).ln_birth(i)
    }
    fn ln_death(&self, i: usize) -> f64 {
        (**self).ln_death(i)
    }
    fn label(&self) -> &str {
        (**self).label()
    }
}

/// One side (`a` or `b`) of a closed-form family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sequence {
    /// `c`
    Constant(f64),
    /// `base * ratio^i`
    Geometric { base: f64, ratio: f64 },
    /// `coef * m^exp`, with `m = i` for death rates and `m = i + 1` for birth rates.
    Power { coef: f64, exp: f64 },
}

impl Sequence {
    fn eval(&self, m: usize) -> f64 {
        match *self {
            Sequence::Constant(c) => c,
            Sequence::Geometric { base, ratio } => {
                if m <= i32::MAX as usize {
                    base * ratio.powi(m as i32)
                } else {
                    base * ratio.powf(m as f64)
                }
            }
            Sequence::Power { coef, exp } => coef * (m as f64).powf(exp),
        }
    }

    fn ln_eval(&self, m: usize) -> f64 {
        match *self {
            Sequence::Constant(c) => c.ln(),
            Sequence::Geometric { base, ratio } => base.ln() + m as f64 * ratio.ln(),
            Sequence::Power { coef, exp } => coef.ln() + exp * (m as f64).ln(),
        }
    }

    fn validate(&self, side: &str) -> Result<()> {
        let ok = match *self {
            Sequence::Constant(c) => c > 0.0 && c.is_finite(),
            Sequence::Geometric { base, ratio } => {
                base > 0.0 && ratio > 0.0 && base.is_finite() && ratio.is_finite()
            }
            Sequence::Power { coef, exp } => coef > 0.0 && coef.is_finite() && exp.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRates(format!(
                "{side}: parameters must be positive and finite, got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateFamily {
    Constant {
        a: f64,
        b: f64,
    },
    Geometric {
        a: Sequence,
        b: Sequence,
    },
    Power {
        a: Sequence,
        b: Sequence,
    },
    /// `a = [a_1, a_2, ...]`, `b = [b_0, b_1, ...]`; indices past either
    /// table fall through to `tail`, evaluated at the absolute index.
    Table {
        a: Vec<f64>,
        b: Vec<f64>,
        tail: Box<RateFamily>,
    },
}

impl RateFamily {
    fn birth(&self, i: usize) -> f64 {
        match self {
            RateFamily::Constant { b, .. } => *b,
            RateFamily::Geometric { b, .. } | RateFamily::Power { b, .. } => {
                b.eval(i + power_shift(b))
            }
            RateFamily::Table { b, tail, .. } => b.get(i).copied().unwrap_or_else(|| tail.birth(i)),
        }
    }

    fn death(&self, i: usize) -> f64 {
        match self {
            RateFamily::Constant { a, .. } => *a,
            RateFamily::Geometric { a, .. } | RateFamily::Power { a, .. } => a.eval(i),
            RateFamily::Table { a, tail, .. } => {
                if i >= 1 && i <= a.len() {
                    a[i - 1]
                } else {
                    tail.death(i)
                }
            }
        }
    }

    fn ln_birth(&self, i: usize) -> f64 {
        match self {
            RateFamily::Constant { b, .. } => b.ln(),
            RateFamily::Geometric { b, .. } | RateFamily::Power { b, .. } => {
                b.ln_eval(i + power_shift(b))
            }
            RateFamily::Table { b, tail, .. } => {
                b.get(i).map(|v| v.ln()).unwrap_or_else(|| tail.ln_birth(i))
            }
        }
    }

    fn ln_death(&self, i: usize) -> f64 {
        match self {
            RateFamily::Constant { a, .. } => a.ln(),
            RateFamily::Geometric { a, .. } | RateFamily::Power { a, .. } => a.ln_eval(i),
            RateFamily::Table { a, tail, .. } => {
                if i >= 1 && i <= a.len() {
                    a[i - 1].ln()
                } else {
                    tail.ln_death(i)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RateFamily::Constant { a, b } => {
                Sequence::Constant(*a).validate("a")?;
                Sequence::Constant(*b).validate("b")
            }
            RateFamily::Geometric { a, b } | RateFamily::Power { a, b } => {
                a.validate("a")?;
                b.validate("b")
            }
            RateFamily::Table { a, b, tail } => {
                if let Some(bad) = a
                    .iter()
                    .chain(b.iter())
                    .find(|v| !(**v > 0.0 && v.is_finite()))
                {
                    return Err(Error::InvalidRates(format!(
                        "table entry {bad} is not a positive finite rate"
                    )));
                }
                if matches!(**tail, RateFamily::Table { .. }) {
                    return Err(Error::InvalidRates(
                        "table tail must be a closed-form family".into(),
                    ));
                }
                tail.validate()
            }
        }
    }
}

/// Power-law birth rates are evaluated at `i + 1` so that `b_0 > 0`.
fn power_shift(seq: &Sequence) -> usize {
    match seq {
        Sequence::Power { .. } => 1,
        _ => 0,
    }
}

/// A validated birth-death rate specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateDoc", into = "RateDoc")]
pub struct RateSpec {
    family: RateFamily,
    description: String,
}

impl RateSpec {
    pub fn new(family: RateFamily, description: impl Into<String>) -> Result<Self> {
        family.validate()?;
        Ok(Self {
            family,
            description: description.into(),
        })
    }

    pub fn constant(a: f64, b: f64) -> Result<Self> {
        Self::new(
            RateFamily::Constant { a, b },
            format!("constant a={a}, b={b}"),
        )
    }

    /// `a_i = a_base * a_ratio^i`, `b_i = b_base * b_ratio^i`.
    pub fn geometric(a_base: f64, a_ratio: f64, b_base: f64, b_ratio: f64) -> Result<Self> {
        Self::new(
            RateFamily::Geometric {
                a: Sequence::Geometric {
                    base: a_base,
                    ratio: a_ratio,
                },
                b: Sequence::Geometric {
                    base: b_base,
                    ratio: b_ratio,
                },
            },
            format!("geometric a={a_base}*{a_ratio}^i, b={b_base}*{b_ratio}^i"),
        )
    }

    /// `a_i = a_coef * i^a_exp`, `b_i = b_coef * (i+1)^b_exp`.
    pub fn power(a_coef: f64, a_exp: f64, b_coef: f64, b_exp: f64) -> Result<Self> {
        Self::new(
            RateFamily::Power {
                a: Sequence::Power {
                    coef: a_coef,
                    exp: a_exp,
                },
                b: Sequence::Power {
                    coef: b_coef,
                    exp: b_exp,
                },
            },
            format!("power a={a_coef}*i^{a_exp}, b={b_coef}*(i+1)^{b_exp}"),
        )
    }

    pub fn table(a: Vec<f64>, b: Vec<f64>, tail: RateSpec) -> Result<Self> {
        let desc = format!("table ({} death, {} birth entries)", a.len(), b.len());
        Self::new(
            RateFamily::Table {
                a,
                b,
                tail: Box::new(tail.family),
            },
            desc,
        )
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn family(&self) -> &RateFamily {
        &self.family
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rate spec serializes")
    }
}

impl BirthDeathRates for RateSpec {
    fn birth(&self, i: usize) -> f64 {
        self.family.birth(i)
    }
    fn death(&self, i: usize) -> f64 {
        self.family.death(i)
    }
    fn ln_birth(&self, i: usize) -> f64 {
        self.family.ln_birth(i)
    }
    fn ln_death(&self, i: usize) -> f64 {
        self.family.ln_death(i)
    }
    fn label(&self) -> &str {
        &self.description
    }
}

// JSON document form:
// {"family": "constant"|"geometric"|"power"|"table", "a": {...}, "b": {...}, "tail": {...}}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FamilyTag {
    Constant,
    Geometric,
    Power,
    Table,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SideDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coef: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateDoc {
    family: FamilyTag,
    a: SideDoc,
    b: SideDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Box<RateDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

fn need(field: Option<f64>, side: &str, name: &str) -> Result<f64> {
    field.ok_or_else(|| Error::InvalidRates(format!("{side}: missing \"{name}\"")))
}

fn family_from_doc(doc: &RateDoc) -> Result<RateFamily> {
    let side = |s: &SideDoc, name: &str| -> Result<Sequence> {
        Ok(match doc.family {
            FamilyTag::Constant => Sequence::Constant(need(s.value, name, "value")?),
            FamilyTag::Geometric => Sequence::Geometric {
                base: need(s.base, name, "base")?,
                ratio: need(s.ratio, name, "ratio")?,
            },
            FamilyTag::Power => Sequence::Power {
                coef: need(s.coef, name, "coef")?,
                exp: need(s.exp, name, "exp")?,
            },
            FamilyTag::Table => unreachable!(),
        })
    };
    if doc.family != FamilyTag::Table && doc.tail.is_some() {
        return Err(Error::InvalidRates(
            "\"tail\" is only valid for the table family".into(),
        ));
    }
    let family = match doc.family {
        FamilyTag::Constant => match (side(&doc.a, "a")?, side(&doc.b, "b")?) {
            (Sequence::Constant(a), Sequence::Constant(b)) => RateFamily::Constant { a, b },
            _ => unreachable!(),
        },
        FamilyTag::Geometric => RateFamily::Geometric {
            a: side(&doc.a, "a")?,
            b: side(&doc.b, "b")?,
        },
        FamilyTag::Power => RateFamily::Power {
            a: side(&doc.a, "a")?,
            b: side(&doc.b, "b")?,
        },
        FamilyTag::Table => {
            let tail = doc
                .tail
                .as_ref()
                .ok_or_else(|| Error::InvalidRates("table family requires \"tail\"".into()))?;
            RateFamily::Table {
                a: doc
                    .a
                    .values
                    .clone()
                    .ok_or_else(|| Error::InvalidRates("a: missing \"values\"".into()))?,
                b: doc
                    .b
                    .values
                    .clone()
                    .ok_or_else(|| Error::InvalidRates("b: missing \"values\"".into()))?,
                tail: Box::new(family_from_doc(tail)?),
            }
        }
    };
    family.validate()?;
    Ok(family)
}

fn side_doc(seq: &Sequence) -> SideDoc {
    match *seq {
        Sequence::Constant(c) => SideDoc {
            value: Some(c),
            ..Default::default()
        },
        Sequence::Geometric { base, ratio } => SideDoc {
            base: Some(base),
            ratio: Some(ratio),
            ..Default::default()
        },
        Sequence::Power { coef, exp } => SideDoc {
            coef: Some(coef),
            exp: Some(exp),
            ..Default::default()
        },
    }
}

fn doc_from_family(family: &RateFamily, description: Option<String>) -> RateDoc {
    match family {
        RateFamily::Constant { a, b } => RateDoc {
            family: FamilyTag::Constant,
            a: side_doc(&Sequence::Constant(*a)),
            b: side_doc(&Sequence::Constant(*b)),
            tail: None,
            description,
        },
        RateFamily::Geometric { a, b } | RateFamily::Power { a, b } => RateDoc {
            family: if matches!(family, RateFamily::Geometric { .. }) {
                FamilyTag::Geometric
            } else {
                FamilyTag::Power
            },
            a: side_doc(a),
            b: side_doc(b),
            tail: None,
            description,
        },
        RateFamily::Table { a, b, tail } => RateDoc {
            family: FamilyTag::Table,
            a: SideDoc {
                values: Some(a.clone()),
                ..Default::default()
            },
            b: SideDoc {
                values: Some(b.clone()),
                ..Default::default()
            },
            tail: Some(Box::new(doc_from_family(tail, None))),
            description,
        },
    }
}

impl TryFrom<RateDoc> for RateSpec {
    type Error = Error;

    fn try_from(doc: RateDoc) -> Result<Self> {
        let family = family_from_doc(&doc)?;
        let description = doc
            .description
            .unwrap_or_else(|| format!("{:?}", doc.family).to_lowercase());
        Ok(Self {
            family,
            description,
        })
    }
}

impl From<RateSpec> for RateDoc {
    fn from(spec: RateSpec) -> Self {
        doc_from_family(&spec.family, Some(spec.description))
    }
}
