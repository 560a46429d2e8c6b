use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lda::{evaluate, midpoint_variant, train_discriminant, DiscriminantModel, LdaOptions, MidpointMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// `subset_size` distinct samples per category; the rest are evaluated.
    #[default]
    WithoutReplacement,
    /// `subset_size` draws with replacement; never-drawn samples are evaluated.
    WithReplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapMode {
    /// Draw a new control set and train a new discriminant every iteration.
    #[default]
    Retrain,
    /// Train once on a seeded control set; resample only the evaluation set.
    EvaluateOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    /// Training samples drawn per category.
    pub subset_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub sampling: Sampling,
    pub mode: BootstrapMode,
    pub midpoint: MidpointMode,
    pub lda: LdaOptions,
}

impl BootstrapOptions {
    pub fn new(subset_size: usize, iterations: usize, seed: u64, lda: LdaOptions) -> Self {
        BootstrapOptions {
            subset_size,
            iterations,
            seed,
            sampling: Sampling::default(),
            mode: BootstrapMode::default(),
            midpoint: MidpointMode::default(),
            lda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryBootstrap<T> {
    pub label: String,
    /// One entry per successful iteration, in iteration order.
    pub accuracies: Vec<T>,
    pub mean: T,
    /// Twice the sample standard deviation of `accuracies`.
    pub error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport<T> {
    pub per_category: Vec<CategoryBootstrap<T>>,
    pub iterations: usize,
    pub seed: u64,
    pub subset_size: usize,
    pub sampling: Sampling,
    pub mode: BootstrapMode,
    pub midpoint: MidpointMode,
    /// Iterations whose training failed (e.g. singular covariance); excluded above.
    pub failed_iterations: usize,
}

impl<T: Scalar> BootstrapReport<T> {
    pub fn category(&self, label: &str) -> Option<&CategoryBootstrap<T>> {
        self.per_category.iter().find(|c| c.label == label)
    }

    /// Unweighted mean of the per-category mean accuracies.
    pub fn mean_accuracy(&self) -> T {
        let n = T::from_count(self.per_category.len().max(1));
        self.per_category.iter().map(|c| c.mean).sum::<T>() / n
    }
}

/// Mean and twice the sample standard deviation.
pub fn mean_and_error<T: Scalar>(values: &[T]) -> (T, T) {
    let n = values.len();
    if n == 0 {
        return (T::nan(), T::nan());
    }
    let mean = values.iter().copied().sum::<T>() / T::from_count(n);
    if n < 2 {
        return (mean, T::zero());
    }
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (mean, T::lit(2.0) * (ss / T::from_count(n - 1)).sqrt())
}

/// Indices of the training draw and of the samples left for evaluation.
fn draw<R: Rng>(n: usize, k: usize, sampling: Sampling, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    match sampling {
        Sampling::WithoutReplacement => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            let rest = idx.split_off(k);
            (idx, rest)
        }
        Sampling::WithReplacement => {
            let drawn: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            let mut seen = vec![false; n];
            for &i in &drawn {
                seen[i] = true;
            }
            (drawn, (0..n).filter(|&i| !seen[i]).collect())
        }
    }
}

fn train<T: Scalar>(g1: &[Vec<T>], g2: &[Vec<T>], options: &BootstrapOptions) -> Result<DiscriminantModel<T>> {
    let model = train_discriminant(g1, g2, &options.lda)?;
    Ok(match options.midpoint {
        MidpointMode::Mean => model,
        mode => {
            let w = midpoint_variant(&model, mode, g1, g2)?;
            model.with_midpoint(w)
        }
    })
}

fn accuracies<T: Scalar>(model: &DiscriminantModel<T>, e1: &[&Vec<T>], e2: &[&Vec<T>]) -> Result<[T; 2]> {
    let labeled: Vec<(Vec<T>, &str)> = e1
        .iter()
        .map(|x| ((*x).clone(), model.labels[0].as_str()))
        .chain(e2.iter().map(|x| ((*x).clone(), model.labels[1].as_str())))
        .collect();
    let ev = evaluate(model, &labeled)?;
    let get = |i: usize| ev.accuracy(&model.labels[i]).unwrap_or_else(T::nan);
    Ok([get(0), get(1)])
}

fn pick<'a, T>(pool: &'a [Vec<T>], idx: &[usize]) -> Vec<&'a Vec<T>> {
    idx.iter().map(|&i| &pool[i]).collect()
}

fn owned<T: Clone>(v: &[&Vec<T>]) -> Vec<Vec<T>> {
    v.iter().map(|x| (*x).clone()).collect()
}

/// Resampled per-category accuracy of the discriminant.
///
/// `pool1`/`pool2` hold the feature vectors of the two categories, named by
/// `options.lda.labels`. Iteration `i` draws from `ChaCha8Rng::seed_from_u64(seed + i)`,
/// so the report does not depend on how iterations are scheduled.
pub fn bootstrap_accuracy<T: Scalar>(
    pool1: &[Vec<T>],
    pool2: &[Vec<T>],
    options: &BootstrapOptions,
) -> Result<BootstrapReport<T>> {
    if options.iterations < 2 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 2 iterations, got {}",
            options.iterations
        )));
    }
    if options.subset_size == 0 {
        return Err(Error::InvalidParameter("bootstrap subset size must be positive".into()));
    }
    for (pool, label) in [(pool1, &options.lda.labels[0]), (pool2, &options.lda.labels[1])] {
        let limit = match options.sampling {
            Sampling::WithoutReplacement => options.subset_size + 1,
            Sampling::WithReplacement => 2,
        };
        if pool.len() < limit || pool.len() < options.subset_size {
            return Err(Error::TooFewSamples(format!(
                "category {label:?} has {} samples; a training draw of {} needs at least {} (evaluation must be non-empty)",
                pool.len(),
                options.subset_size,
                limit.max(options.subset_size),
            )));
        }
    }

    let fixed = match options.mode {
        BootstrapMode::Retrain => None,
        BootstrapMode::EvaluateOnly => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let (c1, r1) = draw(pool1.len(), options.subset_size, Sampling::WithoutReplacement, &mut rng);
            let (c2, r2) = draw(pool2.len(), options.subset_size, Sampling::WithoutReplacement, &mut rng);
            let model = train(&owned(&pick(pool1, &c1)), &owned(&pick(pool2, &c2)), options)?;
            Some((model, r1, r2))
        }
    };

    let outcomes: Vec<Option<[T; 2]>> = (0..options.iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(i as u64));
            let result = match &fixed {
                None => {
                    let (c1, e1) = draw(pool1.len(), options.subset_size, options.sampling, &mut rng);
                    let (c2, e2) = draw(pool2.len(), options.subset_size, options.sampling, &mut rng);
                    if e1.is_empty() || e2.is_empty() {
                        return None;
                    }
                    train(&owned(&pick(pool1, &c1)), &owned(&pick(pool2, &c2)), options)
                        .and_then(|model| accuracies(&model, &pick(pool1, &e1), &pick(pool2, &e2)))
                }
                Some((model, r1, r2)) => {
                    let resample = |rest: &[usize], rng: &mut ChaCha8Rng| -> Vec<usize> {
                        (0..rest.len()).map(|_| rest[rng.gen_range(0..rest.len())]).collect()
                    };
                    let e1 = resample(r1, &mut rng);
                    let e2 = resample(r2, &mut rng);
                    accuracies(model, &pick(pool1, &e1), &pick(pool2, &e2))
                }
            };
            match result {
                Ok(acc) => Some(acc),
                Err(e) => {
                    log::debug!("bootstrap iteration {i} failed: {e}");
                    None
                }
            }
        })
        .collect();

    let ok: Vec<[T; 2]> = outcomes.iter().flatten().copied().collect();
    let failed = outcomes.len() - ok.len();
    if ok.len() < 2 {
        return Err(Error::TooFewSamples(format!(
            "only {} of {} bootstrap iterations trained successfully",
            ok.len(),
            options.iterations
        )));
    }
    if failed > 0 {
        log::warn!("{failed} of {} bootstrap iterations failed and were skipped", options.iterations);
    }

    let per_category = (0..2)
        .map(|c| {
            let accs: Vec<T> = ok.iter().map(|a| a[c]).collect();
            let (mean, error) = mean_and_error(&accs);
            CategoryBootstrap {
                label: options.lda.labels[c].clone(),
                accuracies: accs,
                mean,
                error,
            }
        })
        .collect();

    Ok(BootstrapReport {
        per_category,
        iterations: options.iterations,
        seed: options.seed,
        subset_size: options.subset_size,
        sampling: options.sampling,
        mode: options.mode,
        midpoint: options.midpoint,
        failed_iterations: failed,
    })
}
