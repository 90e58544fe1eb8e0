//! Seeded synthetic models for benchmarks and randomized checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nbc::{NbcFeature, NbcModel, Priors};
use crate::xlc::{Feature, Instance, XlcModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` binary features, each with delta exactly 1 at the returned instance,
/// and a bias such that any `picks` fixed features (and no fewer) keep the
/// prediction `+`. The seed only decides which value of each feature is
/// the favourable one.
pub fn equal_delta(n: usize, picks: usize, seed: u64) -> (XlcModel, Instance) {
    assert!(picks >= 1 && picks <= n, "need 1 <= picks <= n");
    let mut rng = rng(seed);
    let mut tables = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let good = rng.gen_range(1..=2usize);
        let mut table = vec![0.0, 0.0];
        table[good - 1] = 1.0;
        tables.push(table);
        values.push(good as f64);
    }
    // score = bias + n; phi = n - score = picks - 0.5
    let bias = 0.5 - picks as f64;
    let model = XlcModel::categorical(bias, tables).expect("finite tables");
    (model, Instance::new(values))
}

/// Categorical XLC with `n` features, domain sizes uniform in
/// `1..=max_domain` and weights uniform in `[-weight_bound, weight_bound]`.
pub fn random_categorical<R: Rng>(
    rng: &mut R,
    n: usize,
    max_domain: usize,
    weight_bound: f64,
) -> XlcModel {
    let tables = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_domain);
            (0..d)
                .map(|_| rng.gen_range(-weight_bound..=weight_bound))
                .collect()
        })
        .collect();
    let bias = rng.gen_range(-weight_bound..=weight_bound);
    XlcModel::categorical(bias, tables).expect("finite tables")
}

/// Mixed XLC: each feature real-valued with probability one half.
pub fn random_mixed<R: Rng>(
    rng: &mut R,
    n: usize,
    max_domain: usize,
    weight_bound: f64,
) -> XlcModel {
    let features = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let a: f64 = rng.gen_range(-5.0..5.0);
                let b: f64 = rng.gen_range(-5.0..5.0);
                Feature::Real {
                    lower: a.min(b),
                    upper: a.max(b),
                    weight: rng.gen_range(-weight_bound..=weight_bound),
                }
            } else {
                let d = rng.gen_range(1..=max_domain);
                Feature::Categorical {
                    values: (0..d)
                        .map(|_| rng.gen_range(-weight_bound..=weight_bound))
                        .collect(),
                }
            }
        })
        .collect();
    XlcModel::new(rng.gen_range(-weight_bound..=weight_bound), features).expect("finite weights")
}

/// A uniformly random in-domain instance.
pub fn random_instance<R: Rng>(rng: &mut R, model: &XlcModel) -> Instance {
    Instance::new(
        model
            .features()
            .iter()
            .map(|f| match f {
                Feature::Real { lower, upper, .. } => {
                    if lower == upper {
                        *lower
                    } else {
                        rng.gen_range(*lower..=*upper)
                    }
                }
                Feature::Categorical { values } => rng.gen_range(1..=values.len()) as f64,
            })
            .collect(),
    )
}

fn random_distribution<R: Rng>(rng: &mut R, d: usize, zero_free: bool) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..d)
        .map(|_| {
            if !zero_free && rng.gen_bool(0.1) {
                0.0
            } else {
                rng.gen_range(0.05..1.0)
            }
        })
        .collect();
    if raw.iter().all(|&p| p == 0.0) {
        *raw.choose_mut(rng).expect("non-empty domain") = 1.0;
    }
    let total: f64 = raw.iter().sum();
    raw.iter_mut().for_each(|p| *p /= total);
    raw
}

/// NBC over `n` features with domain sizes in `1..=max_domain`, default
/// constants. With `zero_free`, every probability is positive.
pub fn random_nbc<R: Rng>(rng: &mut R, n: usize, max_domain: usize, zero_free: bool) -> NbcModel {
    let plus = rng.gen_range(0.1..0.9);
    let priors = Priors {
        plus,
        minus: 1.0 - plus,
    };
    let features = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_domain);
            NbcFeature {
                domain: d,
                cond_plus: random_distribution(rng, d, zero_free),
                cond_minus: random_distribution(rng, d, zero_free),
            }
        })
        .collect();
    NbcModel::with_default_constants(priors, features).expect("valid random NBC")
}

/// All instances of an all-categorical model, in lexicographic order.
pub fn all_instances(domains: &[usize]) -> impl Iterator<Item = Instance> + '_ {
    let total: usize = domains.iter().product();
    (0..total).map(move |mut code| {
        let values = domains
            .iter()
            .map(|&d| {
                let v = code % d;
                code /= d;
                (v + 1) as f64
            })
            .collect();
        Instance::new(values)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::{enumerate, find_one};
    use crate::problem::ExplanationProblem;

    #[test]
    fn equal_delta_shape() {
        let (m, x) = equal_delta(6, 3, 7);
        let p = ExplanationProblem::derive(&m, &x).unwrap();
        assert!(p.deltas().iter().all(|&d| d == 1.0));
        assert_eq!(p.phi(), 2.5);
        assert_eq!(find_one(&p).unwrap().cardinality(), 3);
        assert_eq!(enumerate(&p, None).count(), 20);
    }

    #[test]
    fn all_instances_counts() {
        assert_eq!(all_instances(&[2, 3]).count(), 6);
        assert_eq!(all_instances(&[]).count(), 1);
    }

    #[test]
    fn random_models_are_valid() {
        let mut r = rng(1);
        for _ in 0..20 {
            let m = random_mixed(&mut r, 5, 3, 10.0);
            let x = random_instance(&mut r, &m);
            m.validate_instance(&x).unwrap();
            let nbc = random_nbc(&mut r, 4, 3, false);
            assert_eq!(nbc.num_features(), 4);
        }
    }
}
