use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fitting::{fit_power_law, PowerLawFit, DEFAULT_MIN_FIT_POINTS};
use crate::scalar::Scalar;
use crate::tokenize::TokenStream;

/// Lemma frequencies sorted from most to least frequent.
pub fn rank_frequencies(stream: &TokenStream) -> Vec<usize> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for lemma in stream.lemmas() {
        *counts.entry(lemma).or_default() += 1;
    }
    let mut freqs: Vec<usize> = counts.into_values().collect();
    freqs.sort_unstable_by(|a, b| b.cmp(a));
    freqs
}

/// Power law `f(r) ∝ r^−γ` fitted to the rank-frequency curve; `gamma` is the
/// Zipf exponent.
pub fn zipf_exponent<T: Scalar>(stream: &TokenStream) -> Result<PowerLawFit<T>> {
    let freqs = rank_frequencies(stream);
    if freqs.len() < DEFAULT_MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: DEFAULT_MIN_FIT_POINTS,
            found: freqs.len(),
        });
    }
    let points: Vec<(T, T)> = freqs
        .iter()
        .enumerate()
        .map(|(r, &f)| (T::from_count(r + 1), T::from_count(f)))
        .collect();
    fit_power_law(&points, None, DEFAULT_MIN_FIT_POINTS)
}
