//! Reduction of "explain this prediction" to a cardinality-minimisation
//! problem over per-feature deltas.
//!
//! For a `+` prediction, fixing feature `j` to its instance value guarantees
//! `delta[j]` more score than its worst case. A set `P` of fixed features
//! keeps the prediction iff `Σ_{j∈P} delta[j] > phi`, where
//! `phi = Σ delta - gamma` is the negated worst-case score and `gamma` the
//! score of the instance. `-` predictions are handled on the negated model
//! with the non-strict comparison `≥`, which preserves the `score ≤ 0`
//! boundary of the `-` class.

use crate::error::{Error, Result};
use crate::xlc::{ClassLabel, Feature, Instance, Literal, XlcModel};

#[derive(Clone, Debug, PartialEq)]
pub struct ExplanationProblem {
    deltas: Vec<f64>,
    phi: f64,
    gamma: f64,
    target: ClassLabel,
    strict: bool,
    order: Vec<usize>,
    support: usize,
    literals: Vec<Option<Literal>>,
}

/// Worst-case gain of fixing one feature, oriented so that larger scores
/// favour the target class.
fn feature_delta(feature: &Feature, value: f64) -> f64 {
    match feature {
        Feature::Categorical { values } => {
            let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
            feature.contribution(value) - worst
        }
        Feature::Real {
            lower,
            upper,
            weight,
        } => {
            if *weight > 0.0 {
                (value - lower) * weight
            } else if *weight < 0.0 {
                (value - upper) * weight
            } else {
                0.0
            }
        }
    }
}

impl ExplanationProblem {
    /// Derives the problem explaining the model's own prediction on `instance`.
    pub fn derive(model: &XlcModel, instance: &Instance) -> Result<Self> {
        let target = model.decide(instance)?;
        let oriented;
        let model_for_target = match target {
            ClassLabel::Plus => model,
            ClassLabel::Minus => {
                oriented = model.negated();
                &oriented
            }
        };
        let gamma = model_for_target.score_unchecked(instance.values());
        let deltas: Vec<f64> = model_for_target
            .features()
            .iter()
            .zip(instance.values())
            .map(|(f, &v)| feature_delta(f, v))
            .collect();
        let literals = (0..model.num_features())
            .map(|i| model.literal_for(instance, i, target).ok())
            .collect();
        let mut problem = Self::build(deltas, gamma, target == ClassLabel::Plus)?;
        problem.target = target;
        problem.literals = literals;
        Ok(problem)
    }

    /// A problem given directly by its deltas and phi, with no model behind
    /// it. The target class is `+` when `strict`, `-` otherwise.
    pub fn from_deltas(deltas: Vec<f64>, phi: f64, strict: bool) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidModel("phi must be finite".into()));
        }
        let total = deltas.iter().sum::<f64>();
        let mut problem = Self::build(deltas, total - phi, strict)?;
        problem.phi = phi;
        Ok(problem)
    }

    fn build(deltas: Vec<f64>, gamma: f64, strict: bool) -> Result<Self> {
        if let Some(index) = deltas.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidFeature {
                index,
                reason: format!("delta {} is not a finite nonnegative number", deltas[index]),
            });
        }
        let phi = deltas.iter().sum::<f64>() - gamma;
        let mut order: Vec<usize> = (0..deltas.len()).collect();
        // Stable: ties keep ascending feature index.
        order.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]));
        let support = order.iter().take_while(|&&i| deltas[i] > 0.0).count();
        let n = deltas.len();
        Ok(ExplanationProblem {
            deltas,
            phi,
            gamma,
            target: if strict {
                ClassLabel::Plus
            } else {
                ClassLabel::Minus
            },
            strict,
            order,
            support,
            literals: vec![None; n],
        })
    }

    /// Per-feature deltas, indexed by feature.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Score of the instance, oriented towards the target class.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn target(&self) -> ClassLabel {
        self.target
    }

    /// `true` when an explanation needs `Σ delta > phi`, `false` for `≥`.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn num_features(&self) -> usize {
        self.deltas.len()
    }

    /// All feature indices by non-increasing delta.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Prefix of [`order`](Self::order) with strictly positive deltas. Zero
    /// deltas can never appear in a subset-minimal explanation.
    pub fn search_order(&self) -> &[usize] {
        &self.order[..self.support]
    }

    /// Whether a picked total meets the explanation threshold.
    #[inline]
    pub fn covers(&self, picked_total: f64) -> bool {
        if self.strict {
            picked_total > self.phi
        } else {
            picked_total >= self.phi
        }
    }

    /// Whether a residual `phi - picked_total` means the picked features
    /// already cover phi.
    #[inline]
    pub fn residual_covered(&self, residual: f64) -> bool {
        if self.strict {
            residual < 0.0
        } else {
            residual <= 0.0
        }
    }

    /// Soundness of a feature set: its deltas reach past phi.
    pub fn is_sufficient(&self, features: &[usize]) -> bool {
        self.covers(features.iter().map(|&j| self.deltas[j]).sum())
    }

    /// Soundness plus subset-minimality.
    pub fn is_explanation(&self, features: &[usize]) -> bool {
        let total: f64 = features.iter().map(|&j| self.deltas[j]).sum();
        self.covers(total)
            && features
                .iter()
                .all(|&j| !self.covers(total - self.deltas[j]))
    }

    pub fn literal(&self, feature: usize) -> Option<Literal> {
        self.literals.get(feature).copied().flatten()
    }
}
