use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::linalg::{dot, SquareMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_dims<T>(groups: &[&[Vec<T>]]) -> Result<usize> {
    let dim = groups
        .iter()
        .flat_map(|g| g.iter())
        .map(Vec::len)
        .next()
        .ok_or_else(|| Error::TooFewSamples("no observations".into()))?;
    for x in groups.iter().flat_map(|g| g.iter()) {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
    }
    Ok(dim)
}

/// Component-wise mean of a non-empty group.
pub fn mean_vector<T: Scalar>(group: &[Vec<T>]) -> Vec<T> {
    let dim = group.first().map_or(0, Vec::len);
    let n = T::from_count(group.len());
    (0..dim)
        .map(|j| group.iter().map(|x| x[j]).sum::<T>() / n)
        .collect()
}

fn add_scatter<T: Scalar>(s: &mut SquareMatrix<T>, group: &[Vec<T>], mean: &[T]) {
    for x in group {
        for i in 0..mean.len() {
            let di = x[i] - mean[i];
            for j in 0..mean.len() {
                s[(i, j)] = s[(i, j)] + di * (x[j] - mean[j]);
            }
        }
    }
}

/// Within-group scatter of both groups, divided by `n1 + n2 − 2`.
pub fn pooled_covariance<T: Scalar>(group1: &[Vec<T>], group2: &[Vec<T>]) -> Result<SquareMatrix<T>> {
    let dim = check_dims(&[group1, group2])?;
    if group1.is_empty() || group2.is_empty() || group1.len() + group2.len() < 3 {
        return Err(Error::TooFewSamples(format!(
            "pooled covariance needs both groups non-empty and n1 + n2 >= 3 (have {} + {})",
            group1.len(),
            group2.len()
        )));
    }
    let mut s = SquareMatrix::zeros(dim);
    add_scatter(&mut s, group1, &mean_vector(group1));
    add_scatter(&mut s, group2, &mean_vector(group2));
    let denom = T::from_count(group1.len() + group2.len() - 2);
    for i in 0..dim {
        for j in 0..dim {
            s[(i, j)] = s[(i, j)] / denom;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaOptions {
    /// `λ` in `S_pooled + λI`; 0 disables regularization.
    pub ridge: f64,
    /// Training fails when the (regularized) pooled covariance is worse conditioned.
    pub max_condition: f64,
    pub labels: [String; 2],
}

impl Default for LdaOptions {
    fn default() -> Self {
        LdaOptions {
            ridge: 0.0,
            max_condition: 1e12,
            labels: ["group1".into(), "group2".into()],
        }
    }
}

impl LdaOptions {
    pub fn with_labels(mut self, first: impl Into<String>, second: impl Into<String>) -> Self {
        self.labels = [first.into(), second.into()];
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    First,
    Second,
}

impl Group {
    pub fn index(self) -> usize {
        match self {
            Group::First => 0,
            Group::Second => 1,
        }
    }
}

/// Fisher's linear discriminant for two groups.
///
/// `y0 = (x̄1 − x̄2)ᵀ S⁻¹ x0` is compared against the midpoint
/// `w = ½ (x̄1 − x̄2)ᵀ S⁻¹ (x̄1 + x̄2)`; `y0 ≥ w` assigns group 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantModel<T> {
    /// `S_pooled⁻¹ (x̄1 − x̄2)`.
    pub direction: Vec<T>,
    pub midpoint: T,
    pub mean1: Vec<T>,
    pub mean2: Vec<T>,
    pub labels: [String; 2],
    /// Per-feature sample standard deviation over both training groups.
    pub dispersions: Vec<T>,
    pub condition_number: T,
    pub ridge: T,
}

pub fn train_discriminant<T: Scalar>(
    group1: &[Vec<T>],
    group2: &[Vec<T>],
    options: &LdaOptions,
) -> Result<DiscriminantModel<T>> {
    let pooled = pooled_covariance(group1, group2)?;
    let ridge = T::lit(options.ridge);
    let system = if options.ridge > 0.0 {
        pooled.with_ridge(ridge)
    } else {
        pooled
    };
    let condition = system.condition_number();
    log::debug!(
        "pooled covariance condition number {:.3e} (ridge {})",
        condition.as_f64(),
        options.ridge
    );
    let lu = match system.lu() {
        Some(lu) if condition.as_f64() <= options.max_condition => lu,
        _ => {
            return Err(Error::SingularCovariance {
                condition: condition.as_f64(),
                limit: options.max_condition,
            })
        }
    };

    let mean1 = mean_vector(group1);
    let mean2 = mean_vector(group2);
    let diff: Vec<T> = mean1.iter().zip(&mean2).map(|(&a, &b)| a - b).collect();
    let sum: Vec<T> = mean1.iter().zip(&mean2).map(|(&a, &b)| a + b).collect();
    let direction = lu.solve(&diff);
    let midpoint = dot(&direction, &sum) / T::lit(2.0);

    Ok(DiscriminantModel {
        direction,
        midpoint,
        mean1,
        mean2,
        labels: options.labels.clone(),
        dispersions: dispersions(group1, group2),
        condition_number: condition,
        ridge,
    })
}

fn dispersions<T: Scalar>(group1: &[Vec<T>], group2: &[Vec<T>]) -> Vec<T> {
    let all: Vec<&Vec<T>> = group1.iter().chain(group2).collect();
    let n = all.len();
    let dim = all.first().map_or(0, |x| x.len());
    (0..dim)
        .map(|j| {
            if n < 2 {
                return T::zero();
            }
            let mean = all.iter().map(|x| x[j]).sum::<T>() / T::from_count(n);
            let ss: T = all.iter().map(|x| (x[j] - mean) * (x[j] - mean)).sum();
            (ss / T::from_count(n - 1)).sqrt()
        })
        .collect()
}

impl<T: Scalar> DiscriminantModel<T> {
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// `y0 = direction · x0`.
    pub fn project(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(dot(&self.direction, x))
    }

    pub fn classify(&self, x: &[T]) -> Result<Group> {
        Ok(if self.project(x)? >= self.midpoint {
            Group::First
        } else {
            Group::Second
        })
    }

    pub fn classify_label(&self, x: &[T]) -> Result<&str> {
        Ok(self.label(self.classify(x)?))
    }

    pub fn label(&self, group: Group) -> &str {
        &self.labels[group.index()]
    }

    pub fn group_of(&self, label: &str) -> Result<Group> {
        if label == self.labels[0] {
            Ok(Group::First)
        } else if label == self.labels[1] {
            Ok(Group::Second)
        } else {
            Err(Error::UnknownLabel {
                label: label.to_owned(),
                expected: self.labels.to_vec(),
            })
        }
    }

    /// The same discriminant with a different dividing value.
    pub fn with_midpoint(&self, midpoint: T) -> Self {
        DiscriminantModel {
            midpoint,
            ..self.clone()
        }
    }

    /// The separating plane in dispersion-normalized coordinates
    /// `γ'_i = γ_i / Δγ_i`, e.g. `2.3γ'1 + 8.2γ'2 + 2.2γ'3 = 14.1`.
    pub fn plane_equation(&self, decimals: usize) -> String {
        let names: Vec<String> = (0..self.direction.len())
            .map(|i| match i {
                0..=2 => format!("γ'{}", i + 1),
                3 => "l'".to_owned(),
                _ => format!("x'{}", i + 1),
            })
            .collect();
        self.plane_equation_named(decimals, &names)
    }

    /// [`Self::plane_equation`] with caller-chosen coordinate names.
    pub fn plane_equation_named<S: AsRef<str>>(&self, decimals: usize, names: &[S]) -> String {
        let mut out = String::new();
        for (i, (&d, &spread)) in self.direction.iter().zip(&self.dispersions).enumerate() {
            let c = (d * spread).as_f64();
            let name = names.get(i).map_or("?", |n| n.as_ref());
            if i == 0 {
                let _ = write!(out, "{c:.decimals$}{name}");
            } else if c < 0.0 {
                let _ = write!(out, " - {:.decimals$}{name}", -c);
            } else {
                let _ = write!(out, " + {c:.decimals$}{name}");
            }
        }
        let _ = write!(out, " = {:.decimals$}", self.midpoint.as_f64());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryAccuracy<T> {
    pub label: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: T,
}

/// Fraction of each category's samples that land in their own group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation<T> {
    /// In model label order; categories without samples are absent.
    pub per_category: Vec<CategoryAccuracy<T>>,
}

impl<T: Scalar> Evaluation<T> {
    pub fn accuracy(&self, label: &str) -> Option<T> {
        self.per_category
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.accuracy)
    }
}

pub fn evaluate<T: Scalar, L: AsRef<str>>(
    model: &DiscriminantModel<T>,
    labeled: &[(Vec<T>, L)],
) -> Result<Evaluation<T>> {
    if labeled.is_empty() {
        return Err(Error::TooFewSamples("nothing to evaluate".into()));
    }
    let mut correct = [0usize; 2];
    let mut total = [0usize; 2];
    for (x, label) in labeled {
        let truth = model.group_of(label.as_ref())?;
        total[truth.index()] += 1;
        if model.classify(x)? == truth {
            correct[truth.index()] += 1;
        }
    }
    Ok(Evaluation {
        per_category: (0..2)
            .filter(|&i| total[i] > 0)
            .map(|i| CategoryAccuracy {
                label: model.labels[i].clone(),
                correct: correct[i],
                total: total[i],
                accuracy: T::from_count(correct[i]) / T::from_count(total[i]),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MidpointMode {
    /// Halfway between the projected group means.
    #[default]
    Mean,
    /// Halfway between the projected group medians.
    Median,
}

pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    })
}

/// Dividing value from already projected group values.
pub fn midpoint_from_projections<T: Scalar>(proj1: &[T], proj2: &[T], mode: MidpointMode) -> Result<T> {
    if proj1.is_empty() || proj2.is_empty() {
        return Err(Error::TooFewSamples("midpoint needs both groups non-empty".into()));
    }
    let center = |p: &[T]| match mode {
        MidpointMode::Mean => p.iter().copied().sum::<T>() / T::from_count(p.len()),
        MidpointMode::Median => median(p).expect("non-empty"),
    };
    Ok((center(proj1) + center(proj2)) / T::lit(2.0))
}

/// The model's dividing value under `mode`. `Mean` reproduces the trained
/// midpoint when `group1`/`group2` are the training groups.
pub fn midpoint_variant<T: Scalar>(
    model: &DiscriminantModel<T>,
    mode: MidpointMode,
    group1: &[Vec<T>],
    group2: &[Vec<T>],
) -> Result<T> {
    let project = |g: &[Vec<T>]| g.iter().map(|x| model.project(x)).collect::<Result<Vec<T>>>();
    midpoint_from_projections(&project(group1)?, &project(group2)?, mode)
}
