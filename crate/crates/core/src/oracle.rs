//! Brute-force reference checks, independent of the delta/phi reduction.
//!
//! Entailment is checked by evaluating the classifier on completions of the
//! free features: every value of a free categorical feature, and both bound
//! endpoints of a free real feature (a linear term attains its extremes at
//! the endpoints).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::nbc::NbcModel;
use crate::xlc::{ClassLabel, Feature, Instance, XlcModel};

pub const MAX_ENTAILS_FEATURES: usize = 14;
pub const MAX_COMPLETIONS: u64 = 1_000_000;
pub const MAX_SUBSET_FEATURES: usize = 12;

/// Every subset-minimal explanation of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// 0-based feature sets, each sorted ascending.
    pub all_minimal: BTreeSet<Vec<usize>>,
    pub min_cardinality: usize,
}

fn candidate_values(feature: &Feature) -> Vec<f64> {
    match feature {
        Feature::Real { lower, upper, .. } => {
            if lower == upper {
                vec![*lower]
            } else {
                vec![*lower, *upper]
            }
        }
        Feature::Categorical { values } => (1..=values.len()).map(|r| r as f64).collect(),
    }
}

fn fixed_mask(n: usize, subset: &[usize]) -> Result<Vec<bool>> {
    let mut fixed = vec![false; n];
    for &j in subset {
        if j >= n {
            return Err(Error::InvalidFeature {
                index: j,
                reason: "no such feature".into(),
            });
        }
        fixed[j] = true;
    }
    Ok(fixed)
}

/// Whether fixing the features in `subset` to their instance values keeps
/// the model's prediction for every completion of the other features.
/// Enumerates all completions.
pub fn entails(model: &XlcModel, instance: &Instance, subset: &[usize]) -> Result<bool> {
    let target = model.decide(instance)?;
    let n = model.num_features();
    if n > MAX_ENTAILS_FEATURES {
        return Err(Error::SizeGuard(format!(
            "{n} features exceed the limit of {MAX_ENTAILS_FEATURES}"
        )));
    }
    let fixed = fixed_mask(n, subset)?;
    let choices: Vec<Vec<f64>> = model
        .features()
        .iter()
        .zip(instance.values())
        .zip(&fixed)
        .map(|((f, &a), &is_fixed)| {
            if is_fixed {
                vec![a]
            } else {
                candidate_values(f)
            }
        })
        .collect();
    let total = choices
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .filter(|&t| t <= MAX_COMPLETIONS);
    if total.is_none() {
        return Err(Error::SizeGuard(format!(
            "more than {MAX_COMPLETIONS} completions"
        )));
    }

    let mut digits = vec![0usize; n];
    let mut point: Vec<f64> = choices.iter().map(|c| c[0]).collect();
    loop {
        if ClassLabel::from_score(model.score_unchecked(&point)) != target {
            return Ok(false);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return Ok(true);
            }
            digits[k] += 1;
            if digits[k] < choices[k].len() {
                point[k] = choices[k][digits[k]];
                break;
            }
            digits[k] = 0;
            point[k] = choices[k][0];
            k += 1;
        }
    }
}

/// Same question as [`entails`], answered on a single completion: each free
/// feature independently takes the candidate value least favourable to the
/// predicted class. Exact because the score is a sum of per-feature terms.
pub fn entails_adversarial(
    model: &XlcModel,
    instance: &Instance,
    subset: &[usize],
) -> Result<bool> {
    let target = model.decide(instance)?;
    let fixed = fixed_mask(model.num_features(), subset)?;
    let point: Vec<f64> = model
        .features()
        .iter()
        .zip(instance.values())
        .zip(&fixed)
        .map(|((f, &a), &is_fixed)| {
            if is_fixed {
                return a;
            }
            let score = |v: &f64| f.contribution(*v);
            let candidates = candidate_values(f);
            let worst = match target {
                ClassLabel::Plus => candidates
                    .iter()
                    .min_by(|x, y| score(x).total_cmp(&score(y))),
                ClassLabel::Minus => candidates
                    .iter()
                    .max_by(|x, y| score(x).total_cmp(&score(y))),
            };
            *worst.expect("non-empty domain")
        })
        .collect();
    Ok(ClassLabel::from_score(model.score_unchecked(&point)) == target)
}

/// All subset-minimal entailing feature sets, by checking all `2^n`
/// subsets. Supersets of entailing sets entail, so a set is minimal iff no
/// single-element removal entails.
pub fn all_minimal_explanations(model: &XlcModel, instance: &Instance) -> Result<OracleResult> {
    let n = model.num_features();
    if n > MAX_SUBSET_FEATURES {
        return Err(Error::SizeGuard(format!(
            "{n} features exceed the limit of {MAX_SUBSET_FEATURES}"
        )));
    }
    model.validate_instance(instance)?;
    let subsets = 1usize << n;
    let members = |mask: usize| -> Vec<usize> { (0..n).filter(|j| mask >> j & 1 == 1).collect() };
    let mut entailing = vec![false; subsets];
    for (mask, slot) in entailing.iter_mut().enumerate() {
        *slot = entails_adversarial(model, instance, &members(mask))?;
    }
    let all_minimal: BTreeSet<Vec<usize>> = (0..subsets)
        .filter(|&mask| {
            entailing[mask] && (0..n).all(|j| mask >> j & 1 == 0 || !entailing[mask & !(1 << j)])
        })
        .map(members)
        .collect();
    let min_cardinality = all_minimal.iter().map(Vec::len).min().unwrap_or(0);
    Ok(OracleResult {
        all_minimal,
        min_cardinality,
    })
}

/// Most probable class from raw probability products, no logarithms.
/// An exact tie goes to `-`.
pub fn nbc_predict_direct(model: &NbcModel, instance: &Instance) -> Result<ClassLabel> {
    model.validate_instance(instance)?;
    let product = |class: ClassLabel| {
        model
            .features()
            .iter()
            .zip(instance.values())
            .fold(model.priors().of(class), |acc, (f, &v)| {
                acc * f.conditional(class)[v as usize - 1]
            })
    };
    Ok(if product(ClassLabel::Plus) > product(ClassLabel::Minus) {
        ClassLabel::Plus
    } else {
        ClassLabel::Minus
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbc::{NbcFeature, Priors};

    fn example_a(bias: f64) -> XlcModel {
        XlcModel::categorical(bias, vec![vec![3.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]]).unwrap()
    }

    fn example_c() -> XlcModel {
        XlcModel::new(
            -0.4,
            vec![
                Feature::Real {
                    lower: 0.0,
                    upper: 1.0,
                    weight: 2.0,
                },
                Feature::Real {
                    lower: 0.0,
                    upper: 2.0,
                    weight: -1.0,
                },
            ],
        )
        .unwrap()
    }

    fn sets(v: &[&[usize]]) -> BTreeSet<Vec<usize>> {
        v.iter().map(|s| s.to_vec()).collect()
    }

    #[test]
    fn entails_examples() {
        let a = Instance::new(vec![1.0; 3]);
        let m = example_a(-2.5);
        assert!(entails(&m, &a, &[0, 1, 2]).unwrap());
        assert!(entails(&m, &a, &[0]).unwrap());
        assert!(!entails(&m, &a, &[2]).unwrap());

        let c = Instance::new(vec![1.0, 0.5]);
        assert!(!entails(&example_c(), &c, &[0]).unwrap());
        assert!(entails(&example_c(), &c, &[0, 1]).unwrap());
    }

    #[test]
    fn entails_guards() {
        let big = XlcModel::categorical(1.0, vec![vec![0.0; 2]; 15]).unwrap();
        let x = Instance::new(vec![1.0; 15]);
        assert!(matches!(entails(&big, &x, &[]), Err(Error::SizeGuard(_))));

        let wide = XlcModel::categorical(1.0, vec![vec![0.0; 10]; 7]).unwrap();
        let y = Instance::new(vec![1.0; 7]);
        assert!(matches!(entails(&wide, &y, &[]), Err(Error::SizeGuard(_))));
        assert!(entails(&wide, &y, &[0]).unwrap());
    }

    #[test]
    fn all_minimal_examples() {
        let a = Instance::new(vec![1.0; 3]);
        let r = all_minimal_explanations(&example_a(-2.5), &a).unwrap();
        assert_eq!(r.all_minimal, sets(&[&[0], &[1, 2]]));
        assert_eq!(r.min_cardinality, 1);

        let b = all_minimal_explanations(&example_a(10.0), &a).unwrap();
        assert_eq!(b.all_minimal, sets(&[&[]]));
        assert_eq!(b.min_cardinality, 0);

        let c = all_minimal_explanations(&example_c(), &Instance::new(vec![1.0, 0.5])).unwrap();
        assert_eq!(c.all_minimal, sets(&[&[0, 1]]));
    }

    #[test]
    fn adversarial_matches_full_enumeration_on_examples() {
        let a = Instance::new(vec![1.0; 3]);
        let m = example_a(-2.5);
        for mask in 0..8usize {
            let s: Vec<usize> = (0..3).filter(|j| mask >> j & 1 == 1).collect();
            assert_eq!(
                entails(&m, &a, &s).unwrap(),
                entails_adversarial(&m, &a, &s).unwrap()
            );
        }
    }

    #[test]
    fn direct_nbc_prediction() {
        let m = NbcModel::with_default_constants(
            Priors {
                plus: 0.5,
                minus: 0.5,
            },
            vec![NbcFeature {
                domain: 2,
                cond_plus: vec![0.2, 0.8],
                cond_minus: vec![0.8, 0.2],
            }],
        )
        .unwrap();
        assert_eq!(
            nbc_predict_direct(&m, &Instance::new(vec![2.0])).unwrap(),
            ClassLabel::Plus
        );
        assert_eq!(
            nbc_predict_direct(&m, &Instance::new(vec![1.0])).unwrap(),
            ClassLabel::Minus
        );

        let tie = NbcModel::with_default_constants(
            Priors {
                plus: 0.5,
                minus: 0.5,
            },
            vec![NbcFeature {
                domain: 2,
                cond_plus: vec![0.5, 0.5],
                cond_minus: vec![0.5, 0.5],
            }],
        )
        .unwrap();
        assert_eq!(
            nbc_predict_direct(&tie, &Instance::new(vec![1.0])).unwrap(),
            ClassLabel::Minus
        );
    }
}
