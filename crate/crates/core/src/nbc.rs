//! Binary-class naive Bayes classifiers over categorical features.
//!
//! Probabilities are handled in shifted, floored log space:
//! `lprob(p) = threshold + max(big_m, ln p)`, where `big_m` is below the log
//! of every nonzero probability (so zero probabilities map to `big_m`) and
//! `threshold` makes every `lprob` value nonnegative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xlc::{ClassLabel, Feature, Instance, XlcModel};

const SUM_TOLERANCE: f64 = 1e-9;

/// Class-conditional distributions of one categorical feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbcFeature {
    pub domain: usize,
    pub cond_plus: Vec<f64>,
    pub cond_minus: Vec<f64>,
}

impl NbcFeature {
    pub fn conditional(&self, class: ClassLabel) -> &[f64] {
        match class {
            ClassLabel::Plus => &self.cond_plus,
            ClassLabel::Minus => &self.cond_minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pub plus: f64,
    pub minus: f64,
}

impl Priors {
    pub fn of(&self, class: ClassLabel) -> f64 {
        match class {
            ClassLabel::Plus => self.plus,
            ClassLabel::Minus => self.minus,
        }
    }
}

/// A probability referenced by the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Prior(ClassLabel),
    /// `Prob(e_feature = value | class)`, with `value` 1-based.
    Conditional {
        feature: usize,
        value: usize,
        class: ClassLabel,
    },
}

#[derive(Deserialize)]
struct NbcModelDef {
    priors: Priors,
    features: Vec<NbcFeature>,
    big_m: f64,
    threshold: f64,
}

impl TryFrom<NbcModelDef> for NbcModel {
    type Error = Error;

    fn try_from(def: NbcModelDef) -> Result<Self> {
        NbcModel::new(def.priors, def.features, def.big_m, def.threshold)
    }
}

/// `threshold + max(big_m, ln p)`, natural log; `p = 0` gives
/// `threshold + big_m`.
pub fn lprob(p: f64, big_m: f64, threshold: f64) -> f64 {
    threshold + big_m.max(p.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NbcModelDef")]
pub struct NbcModel {
    priors: Priors,
    features: Vec<NbcFeature>,
    big_m: f64,
    threshold: f64,
}

fn check_distribution(what: &str, probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidModel(format!(
            "{what}: probability outside [0, 1]"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidModel(format!(
            "{what}: probabilities sum to {total}"
        )));
    }
    Ok(())
}

impl NbcModel {
    pub fn new(
        priors: Priors,
        features: Vec<NbcFeature>,
        big_m: f64,
        threshold: f64,
    ) -> Result<Self> {
        check_distribution("priors", &[priors.plus, priors.minus])?;
        for (j, f) in features.iter().enumerate() {
            if f.domain == 0 || f.cond_plus.len() != f.domain || f.cond_minus.len() != f.domain {
                return Err(Error::InvalidFeature {
                    index: j,
                    reason: format!(
                        "domain {} does not match conditional lengths {}/{}",
                        f.domain,
                        f.cond_plus.len(),
                        f.cond_minus.len()
                    ),
                });
            }
            check_distribution(&format!("feature {} given +", j + 1), &f.cond_plus)?;
            check_distribution(&format!("feature {} given -", j + 1), &f.cond_minus)?;
        }
        let model = NbcModel {
            priors,
            features,
            big_m,
            threshold,
        };
        model.check_constants(big_m, threshold)?;
        Ok(model)
    }

    /// Model with the default constants: `big_m` is one below the sum of
    /// the logs of all nonzero probabilities, and `threshold` is one above
    /// the largest `-max(big_m, ln p)`.
    pub fn with_default_constants(priors: Priors, features: Vec<NbcFeature>) -> Result<Self> {
        let probe = NbcModel {
            priors,
            features,
            big_m: f64::NEG_INFINITY,
            threshold: 0.0,
        };
        let big_m = probe.default_big_m();
        let threshold = probe.default_threshold(big_m);
        NbcModel::new(probe.priors, probe.features, big_m, threshold)
    }

    /// Same probabilities, different constants.
    pub fn with_constants(&self, big_m: f64, threshold: f64) -> Result<Self> {
        NbcModel::new(self.priors, self.features.clone(), big_m, threshold)
    }

    fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        [self.priors.plus, self.priors.minus].into_iter().chain(
            self.features
                .iter()
                .flat_map(|f| f.cond_plus.iter().chain(&f.cond_minus).copied()),
        )
    }

    pub fn default_big_m(&self) -> f64 {
        self.probabilities()
            .filter(|&p| p > 0.0)
            .map(f64::ln)
            .sum::<f64>()
            - 1.0
    }

    pub fn default_threshold(&self, big_m: f64) -> f64 {
        1.0 + self
            .probabilities()
            .map(|p| -big_m.max(p.ln()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_constants(&self, big_m: f64, threshold: f64) -> Result<()> {
        if !big_m.is_finite() || !threshold.is_finite() {
            return Err(Error::InvalidModel(
                "big_m and threshold must be finite".into(),
            ));
        }
        for p in self.probabilities() {
            if p > 0.0 && big_m >= p.ln() {
                return Err(Error::InvalidModel(format!(
                    "big_m {big_m} is not below ln({p})"
                )));
            }
            if threshold + big_m.max(p.ln()) < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "threshold {threshold} leaves lprob({p}) negative"
                )));
            }
        }
        Ok(())
    }

    pub fn priors(&self) -> Priors {
        self.priors
    }

    pub fn features(&self) -> &[NbcFeature] {
        &self.features
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn probability(&self, event: Event) -> Option<f64> {
        match event {
            Event::Prior(c) => Some(self.priors.of(c)),
            Event::Conditional {
                feature,
                value,
                class,
            } => self
                .features
                .get(feature)?
                .conditional(class)
                .get(value.checked_sub(1)?)
                .copied(),
        }
    }

    /// `max(big_m, ln p)`: the floored log-probability without the shift.
    fn floored_log(&self, p: f64) -> f64 {
        self.big_m.max(p.ln())
    }

    /// Shifted, floored log-probability of a model event. Unknown events
    /// are treated as probability zero.
    pub fn lprob(&self, event: Event) -> f64 {
        lprob(
            self.probability(event).unwrap_or(0.0),
            self.big_m,
            self.threshold,
        )
    }

    pub fn validate_instance(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: instance.len(),
            });
        }
        for (index, (f, &v)) in self.features.iter().zip(instance.values()).enumerate() {
            if v.fract() != 0.0 || v < 1.0 || v > f.domain as f64 {
                return Err(Error::OutOfDomain { index, value: v });
            }
        }
        Ok(())
    }

    /// Log-space class score: `lprob(c) + Σ lprob(e_i = a_i | c)`.
    pub fn class_score(&self, instance: &Instance, class: ClassLabel) -> Result<f64> {
        self.validate_instance(instance)?;
        Ok(self.features.iter().zip(instance.values()).fold(
            self.lprob(Event::Prior(class)),
            |acc, (f, &v)| {
                acc + self.threshold + self.floored_log(f.conditional(class)[v as usize - 1])
            },
        ))
    }

    /// Most probable class; an exact tie goes to `-`.
    pub fn predict(&self, instance: &Instance) -> Result<ClassLabel> {
        let plus = self.class_score(instance, ClassLabel::Plus)?;
        let minus = self.class_score(instance, ClassLabel::Minus)?;
        Ok(if plus > minus {
            ClassLabel::Plus
        } else {
            ClassLabel::Minus
        })
    }

    /// Equivalent XLC: bias `lprob(+) - lprob(-)` and, for each feature, the
    /// table `lprob(e_j = r | +) - lprob(e_j = r | -)`. The threshold cancels
    /// in every difference and is left out of the arithmetic, so the result
    /// does not depend on it.
    pub fn reduce_to_xlc(&self) -> XlcModel {
        let bias = self.floored_log(self.priors.plus) - self.floored_log(self.priors.minus);
        let features = self
            .features
            .iter()
            .map(|f| Feature::Categorical {
                values: f
                    .cond_plus
                    .iter()
                    .zip(&f.cond_minus)
                    .map(|(&p, &q)| self.floored_log(p) - self.floored_log(q))
                    .collect(),
            })
            .collect();
        XlcModel::new(bias, features).expect("finite weights from a validated model")
    }
}

/// Rows of 1-based categorical values with class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub domains: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
    pub labels: Vec<ClassLabel>,
}

impl LabeledDataset {
    /// Builds a dataset, inferring each domain as the largest of the
    /// declared size (if any) and the largest observed value.
    pub fn new(
        rows: Vec<Vec<usize>>,
        labels: Vec<ClassLabel>,
        declared: Option<Vec<usize>>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let n = rows[0].len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidDataset(format!(
                "row {i} has {} values, expected {n}",
                rows[i].len()
            )));
        }
        let domains = match declared {
            Some(d) => {
                if d.len() != n {
                    return Err(Error::InvalidDataset(format!(
                        "{} declared domains for {n} features",
                        d.len()
                    )));
                }
                for (i, row) in rows.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if v == 0 || v > d[j] {
                            return Err(Error::InvalidDataset(format!(
                                "data row {}, feature {}: value {v} outside 1..={}",
                                i + 1,
                                j + 1,
                                d[j]
                            )));
                        }
                    }
                }
                d
            }
            None => {
                let mut d = vec![1; n];
                for (i, row) in rows.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if v == 0 {
                            return Err(Error::InvalidDataset(format!(
                                "data row {}, feature {}: values are 1-based",
                                i + 1,
                                j + 1
                            )));
                        }
                        d[j] = d[j].max(v);
                    }
                }
                d
            }
        };
        Ok(LabeledDataset {
            domains,
            rows,
            labels,
        })
    }

    pub fn num_features(&self) -> usize {
        self.domains.len()
    }
}

/// Estimates an NBC with additive smoothing on the conditionals. Priors are
/// plain frequencies.
pub fn train(dataset: &LabeledDataset, smoothing: f64) -> Result<NbcModel> {
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidDataset(format!(
            "invalid smoothing {smoothing}"
        )));
    }
    if dataset.rows.is_empty() {
        return Err(Error::InvalidDataset("dataset is empty".into()));
    }
    let class_rows = |c: ClassLabel| dataset.labels.iter().filter(|&&l| l == c).count();
    let n_plus = class_rows(ClassLabel::Plus);
    let n_minus = class_rows(ClassLabel::Minus);
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::InvalidDataset(
            "both classes must occur in the dataset".into(),
        ));
    }

    let mut features = Vec::with_capacity(dataset.num_features());
    for (j, &d) in dataset.domains.iter().enumerate() {
        let mut counts_plus = vec![0usize; d];
        let mut counts_minus = vec![0usize; d];
        for (row, &label) in dataset.rows.iter().zip(&dataset.labels) {
            let v = row[j];
            if v == 0 || v > d {
                return Err(Error::InvalidDataset(format!(
                    "feature {}: value {v} outside 1..={d}",
                    j + 1
                )));
            }
            match label {
                ClassLabel::Plus => counts_plus[v - 1] += 1,
                ClassLabel::Minus => counts_minus[v - 1] += 1,
            }
        }
        let estimate = |counts: &[usize], total: usize| -> Vec<f64> {
            let denom = total as f64 + smoothing * d as f64;
            counts
                .iter()
                .map(|&c| (c as f64 + smoothing) / denom)
                .collect()
        };
        features.push(NbcFeature {
            domain: d,
            cond_plus: estimate(&counts_plus, n_plus),
            cond_minus: estimate(&counts_minus, n_minus),
        });
    }

    let total = dataset.rows.len() as f64;
    let priors = Priors {
        plus: n_plus as f64 / total,
        minus: n_minus as f64 / total,
    };
    NbcModel::with_default_constants(priors, features)
}
