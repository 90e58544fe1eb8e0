//! Extended linear classifiers.
//!
//! An XLC scores an instance as
//! `bias + Σ weight·value` over real features plus, for each categorical
//! feature, the entry of its value table selected by the instance value.
//! The instance is classified `+` when the score is strictly positive and
//! `-` otherwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl ClassLabel {
    pub fn symbol(self) -> &'static str {
        match self {
            ClassLabel::Plus => "+",
            ClassLabel::Minus => "-",
        }
    }

    pub fn opposite(self) -> ClassLabel {
        match self {
            ClassLabel::Plus => ClassLabel::Minus,
            ClassLabel::Minus => ClassLabel::Plus,
        }
    }

    /// Classification rule of the decision function: positive scores are
    /// `+`, everything else (including zero) is `-`.
    pub fn from_score(score: f64) -> ClassLabel {
        if score > 0.0 {
            ClassLabel::Plus
        } else {
            ClassLabel::Minus
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(ClassLabel::Plus),
            "-" | "minus" => Ok(ClassLabel::Minus),
            other => Err(Error::Parse(format!("unknown class label {other:?}"))),
        }
    }
}

/// Domain of a single feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeatureSpec {
    Real { lower: f64, upper: f64 },
    Categorical { domain_size: usize },
}

/// A feature together with its weights.
///
/// Categorical values are `1..=values.len()`; `values[r - 1]` is the weight
/// selected when the feature takes value `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Feature {
    Real { lower: f64, upper: f64, weight: f64 },
    Categorical { values: Vec<f64> },
}

impl Feature {
    pub fn spec(&self) -> FeatureSpec {
        match *self {
            Feature::Real { lower, upper, .. } => FeatureSpec::Real { lower, upper },
            Feature::Categorical { ref values } => FeatureSpec::Categorical {
                domain_size: values.len(),
            },
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidFeature {
            index,
            reason: reason.to_string(),
        };
        match self {
            Feature::Real {
                lower,
                upper,
                weight,
            } => {
                if !(lower.is_finite() && upper.is_finite() && weight.is_finite()) {
                    return Err(invalid("bounds and weight must be finite"));
                }
                if lower > upper {
                    return Err(invalid("lower bound exceeds upper bound"));
                }
            }
            Feature::Categorical { values } => {
                if values.is_empty() {
                    return Err(invalid("categorical domain must be non-empty"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("value table entries must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Contribution of this feature to the score when it takes `value`.
    /// The value must already be validated against the feature's domain.
    pub(crate) fn contribution(&self, value: f64) -> f64 {
        match self {
            Feature::Real { weight, .. } => weight * value,
            Feature::Categorical { values } => values[value as usize - 1],
        }
    }

    fn check_value(&self, index: usize, value: f64) -> Result<()> {
        let ok = match self {
            Feature::Real { lower, upper, .. } => value >= *lower && value <= *upper,
            Feature::Categorical { values } => {
                value.fract() == 0.0 && value >= 1.0 && value <= values.len() as f64
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfDomain { index, value })
        }
    }

    fn negated(&self) -> Feature {
        match self {
            Feature::Real {
                lower,
                upper,
                weight,
            } => Feature::Real {
                lower: *lower,
                upper: *upper,
                weight: -weight,
            },
            Feature::Categorical { values } => Feature::Categorical {
                values: values.iter().map(|v| -v).collect(),
            },
        }
    }
}

#[derive(Deserialize)]
struct XlcModelDef {
    bias: f64,
    features: Vec<Feature>,
}

impl TryFrom<XlcModelDef> for XlcModel {
    type Error = Error;

    fn try_from(def: XlcModelDef) -> Result<Self> {
        XlcModel::new(def.bias, def.features)
    }
}

/// Extended linear classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XlcModelDef")]
pub struct XlcModel {
    bias: f64,
    features: Vec<Feature>,
}

impl XlcModel {
    pub fn new(bias: f64, features: Vec<Feature>) -> Result<Self> {
        if !bias.is_finite() {
            return Err(Error::InvalidModel("bias must be finite".into()));
        }
        for (i, f) in features.iter().enumerate() {
            f.validate(i)?;
        }
        Ok(XlcModel { bias, features })
    }

    /// Model with only categorical features, one value table per feature.
    pub fn categorical(bias: f64, tables: Vec<Vec<f64>>) -> Result<Self> {
        let features = tables
            .into_iter()
            .map(|values| Feature::Categorical { values })
            .collect();
        XlcModel::new(bias, features)
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn is_categorical(&self) -> bool {
        self.features
            .iter()
            .all(|f| matches!(f, Feature::Categorical { .. }))
    }

    /// The model with bias and every weight negated.
    pub fn negated(&self) -> XlcModel {
        XlcModel {
            bias: -self.bias,
            features: self.features.iter().map(Feature::negated).collect(),
        }
    }

    pub fn validate_instance(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: instance.len(),
            });
        }
        for (i, (f, &v)) in self.features.iter().zip(instance.values()).enumerate() {
            f.check_value(i, v)?;
        }
        Ok(())
    }

    /// Score of the decision function, summed left to right by feature index.
    pub fn evaluate(&self, instance: &Instance) -> Result<f64> {
        self.validate_instance(instance)?;
        Ok(self.score_unchecked(instance.values()))
    }

    pub(crate) fn score_unchecked(&self, values: &[f64]) -> f64 {
        self.features
            .iter()
            .zip(values)
            .fold(self.bias, |acc, (f, &v)| acc + f.contribution(v))
    }

    pub fn decide(&self, instance: &Instance) -> Result<ClassLabel> {
        self.evaluate(instance).map(ClassLabel::from_score)
    }

    /// The literal that keeps feature `index` from moving the score against
    /// the predicted class of `instance`.
    pub fn literal_of(&self, instance: &Instance, index: usize) -> Result<Literal> {
        let target = self.decide(instance)?;
        self.literal_for(instance, index, target)
    }

    pub(crate) fn literal_for(
        &self,
        instance: &Instance,
        index: usize,
        target: ClassLabel,
    ) -> Result<Literal> {
        let feature = self.features.get(index).ok_or(Error::InvalidFeature {
            index,
            reason: "no such feature".into(),
        })?;
        let value = instance.values()[index];
        let relation = match feature {
            Feature::Categorical { .. } => Relation::Eq,
            Feature::Real { weight, .. } => {
                let oriented = match target {
                    ClassLabel::Plus => *weight,
                    ClassLabel::Minus => -weight,
                };
                if oriented > 0.0 {
                    Relation::Ge
                } else if oriented < 0.0 {
                    Relation::Le
                } else {
                    return Err(Error::ZeroWeight { index });
                }
            }
        };
        Ok(Literal {
            feature: index,
            relation,
            value,
        })
    }
}

/// One concrete point of the feature space.
///
/// Categorical entries hold their 1-based value as an integral `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(values: Vec<f64>) -> Self {
        Instance(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for Instance {
    fn from(values: Vec<f64>) -> Self {
        Instance(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ge => "≥",
            Relation::Le => "≤",
        }
    }
}

/// A fixed feature in an explanation: `e_i = a`, `e_i ≥ a` or `e_i ≤ a`.
///
/// `feature` is 0-based; the rendered form numbers features from 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Literal {
    pub feature: usize,
    pub relation: Relation,
    pub value: f64,
}

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(e{} {} {})",
            subscript(self.feature + 1),
            self.relation.symbol(),
            self.value
        )
    }
}
