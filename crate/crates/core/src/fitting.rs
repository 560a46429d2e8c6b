//! Running-average binning, log-log power-law fits and the per-sample
//! exponent triple `(γ1, γ2, γ3)`.
//!
//! The degree distribution `P(k)` is fitted as two power laws that meet at
//! `k = √N`: `γ1` on `k < √N` and `γ2` on `k ≥ √N`. Before fitting, each
//! region is averaged over consecutive `k`-intervals of width `2m`, which
//! smooths out the period-`2m` ripple the network construction imprints on
//! `P(k)`. The clustering spectrum `C(k)` is fitted unbinned as one power law
//! with exponent `γ3`.

use std::fmt;
use std::str::FromStr;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, DegreeDistribution};
use crate::scalar::Scalar;
use crate::semnet::SemanticNetwork;

/// Averaged points over consecutive `k`-intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries<T> {
    /// `(interval midpoint, mean value)`, midpoints strictly increasing.
    pub points: Vec<(T, T)>,
    /// Raw values that fell in each interval.
    pub populations: Vec<usize>,
    pub bin_width: usize,
}

/// Averages `raw` over consecutive intervals `[lo, lo + width − 1]` starting at
/// the smallest `k` present. Intervals without raw points produce nothing.
pub fn bin_running_average<T: Scalar>(raw: &[(usize, T)], bin_width: usize) -> Result<BinnedSeries<T>> {
    let origin = raw
        .iter()
        .map(|&(k, _)| k)
        .min()
        .ok_or_else(|| Error::InvalidParameter("cannot bin an empty series".into()))?;
    bin_from(raw, bin_width, origin)
}

/// As [`bin_running_average`], with intervals anchored at `origin`.
/// Points below `origin` are ignored.
pub fn bin_from<T: Scalar>(raw: &[(usize, T)], bin_width: usize, origin: usize) -> Result<BinnedSeries<T>> {
    if bin_width == 0 {
        return Err(Error::InvalidParameter("bin width must be >= 1".into()));
    }
    if raw.is_empty() {
        return Err(Error::InvalidParameter("cannot bin an empty series".into()));
    }
    let mut sorted: Vec<(usize, T)> = raw.iter().copied().filter(|&(k, _)| k >= origin).collect();
    sorted.sort_by_key(|&(k, _)| k);

    let mut points = Vec::new();
    let mut populations = Vec::new();
    let mut iter = sorted.into_iter().peekable();
    while let Some(&(k, _)) = iter.peek() {
        let bin = (k - origin) / bin_width;
        let lo = origin + bin * bin_width;
        let hi = lo + bin_width - 1;
        let mut sum = T::zero();
        let mut count = 0;
        while let Some(&(k, v)) = iter.peek() {
            if k > hi {
                break;
            }
            sum = sum + v;
            count += 1;
            iter.next();
        }
        let center = (T::from_count(lo) + T::from_count(hi)) / T::lit(2.0);
        points.push((center, sum / T::from_count(count)));
        populations.push(count);
    }
    Ok(BinnedSeries {
        points,
        populations,
        bin_width,
    })
}

/// `value ≈ amplitude · k^(−gamma)` by least squares on `(ln k, ln value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub gamma: T,
    pub amplitude: T,
    /// Smallest and largest `k` that entered the fit.
    pub k_range: (T, T),
    pub n_points: usize,
    /// Reduced χ² of the log-space residuals with unit weights.
    pub reduced_chi2: T,
}

impl<T: Scalar> PowerLawFit<T> {
    pub fn predict(&self, k: T) -> T {
        self.amplitude * k.powf(-self.gamma)
    }
}

pub const DEFAULT_MIN_FIT_POINTS: usize = 3;

/// Fits a power law to the points with `k` inside `k_range` (inclusive, all
/// points when `None`). Points with `k ≤ 0` or `value ≤ 0` are dropped before
/// the log transform.
pub fn fit_power_law<T: Scalar>(
    points: &[(T, T)],
    k_range: Option<(T, T)>,
    min_points: usize,
) -> Result<PowerLawFit<T>> {
    let min_points = min_points.max(2);
    let in_range: Vec<(T, T)> = points
        .iter()
        .copied()
        .filter(|&(k, _)| k_range.is_none_or(|(lo, hi)| k >= lo && k <= hi))
        .collect();
    let usable: Vec<(T, T)> = in_range
        .iter()
        .copied()
        .filter(|&(k, v)| k > T::zero() && v > T::zero() && k.is_finite() && v.is_finite())
        .collect();
    if usable.is_empty() && !in_range.is_empty() {
        return Err(Error::AllZero);
    }
    if usable.len() < min_points {
        return Err(Error::InsufficientPoints {
            needed: min_points,
            found: usable.len(),
        });
    }

    let n = T::from_count(usable.len());
    let logs: Vec<(T, T)> = usable.iter().map(|&(k, v)| (k.ln(), v.ln())).collect();
    let x_mean = logs.iter().map(|p| p.0).sum::<T>() / n;
    let y_mean = logs.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = logs.iter().map(|p| (p.0 - x_mean) * (p.0 - x_mean)).sum();
    let sxy: T = logs.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    if sxx <= T::zero() {
        return Err(Error::InsufficientPoints {
            needed: 2,
            found: 1,
        });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: T = logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = usable.len() - 2;
    let reduced_chi2 = if dof == 0 { T::zero() } else { ssr / T::from_count(dof) };
    let k_min = usable.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let k_max = usable.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);

    Ok(PowerLawFit {
        gamma: -slope,
        amplitude: intercept.exp(),
        k_range: (k_min, k_max),
        n_points: usable.len(),
        reduced_chi2,
    })
}

/// Which `N` sets the break between the two degree regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitBasis {
    /// Vertex count of the network.
    Vertices,
    /// Word count of the source stream.
    #[default]
    Words,
}

impl fmt::Display for SplitBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitBasis::Vertices => "vertices",
            SplitBasis::Words => "words",
        })
    }
}

impl FromStr for SplitBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertices" => Ok(SplitBasis::Vertices),
            "words" => Ok(SplitBasis::Words),
            other => Err(Error::InvalidParameter(format!(
                "split basis must be vertices|words, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub split_basis: SplitBasis,
    /// `P(k)` bin width; `2m` when `None`.
    pub bin_width: Option<usize>,
    /// Narrow the bins of a degree region, one step at a time, until it has
    /// enough positive points to fit. Off means a short region is an error.
    pub shrink_bins: bool,
    pub min_fit_points: usize,
    /// Attach the mean geodesic distance `l`.
    pub with_geodesic: bool,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            split_basis: SplitBasis::Words,
            bin_width: None,
            shrink_bins: true,
            min_fit_points: DEFAULT_MIN_FIT_POINTS,
            with_geodesic: false,
        }
    }
}

/// The exponent triple of one text sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub sample_id: String,
    /// Degree exponent below `√N`.
    pub gamma1: T,
    /// Degree exponent at and above `√N`.
    pub gamma2: T,
    /// Clustering-spectrum exponent.
    pub gamma3: T,
    pub mean_geodesic: Option<T>,
    pub n_vertices: usize,
    pub n_words: usize,
    pub m: usize,
}

impl<T: Scalar> FeatureVector<T> {
    /// `[γ1, γ2, γ3]`, with `l` appended when requested and present.
    pub fn to_vec(&self, include_geodesic: bool) -> Vec<T> {
        let mut v = vec![self.gamma1, self.gamma2, self.gamma3];
        if include_geodesic {
            if let Some(l) = self.mean_geodesic {
                v.push(l);
            }
        }
        v
    }
}

/// One fitted degree region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFit<T> {
    pub fit: PowerLawFit<T>,
    pub binned: BinnedSeries<T>,
    /// Inclusive degree bounds of the region.
    pub k_bounds: (usize, usize),
}

/// Everything [`extract_features`] computed along the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureExtraction<T> {
    pub features: FeatureVector<T>,
    /// First degree of the upper region: the smallest integer `≥ √N`.
    pub split_k: usize,
    pub lower: RegionFit<T>,
    pub upper: RegionFit<T>,
    pub clustering: PowerLawFit<T>,
}

/// Smallest integer `k` with `k ≥ √n`.
pub fn split_degree(n: usize) -> usize {
    let mut k = (n as f64).sqrt().floor() as usize;
    while k * k < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k
}

fn fit_region<T: Scalar>(
    dist: &DegreeDistribution,
    k_bounds: (usize, usize),
    width: usize,
    shrink: bool,
    min_points: usize,
    region: &'static str,
) -> Result<RegionFit<T>> {
    let wrap = |e: Error| Error::DegenerateRegion {
        region,
        source: Box::new(e),
    };
    if k_bounds.0 > k_bounds.1 {
        return Err(wrap(Error::InsufficientPoints {
            needed: min_points,
            found: 0,
        }));
    }
    let raw: Vec<(usize, T)> = dist.dense(k_bounds.0, k_bounds.1);
    let mut width = width.max(1);
    loop {
        let binned = bin_from(&raw, width, k_bounds.0).map_err(wrap)?;
        match fit_power_law(&binned.points, None, min_points) {
            Ok(fit) => {
                debug!(
                    "{region}: k in [{}, {}], bin width {width}, {} of {} bins fitted, reduced chi2 {:.4}",
                    k_bounds.0,
                    k_bounds.1,
                    fit.n_points,
                    binned.points.len(),
                    fit.reduced_chi2.as_f64()
                );
                return Ok(RegionFit {
                    fit,
                    binned,
                    k_bounds,
                });
            }
            Err(e @ (Error::InsufficientPoints { .. } | Error::AllZero)) => {
                if shrink && width > 1 {
                    width -= 1;
                    continue;
                }
                return Err(wrap(e));
            }
            Err(e) => return Err(wrap(e)),
        }
    }
}

/// Fits the two degree regions of `dist`, split at `√split_n`.
pub fn fit_degree_regions<T: Scalar>(
    dist: &DegreeDistribution,
    split_n: usize,
    bin_width: usize,
    options: &FeatureOptions,
) -> Result<(usize, RegionFit<T>, RegionFit<T>)> {
    let split_k = split_degree(split_n);
    let k_max = dist.max_degree().unwrap_or(0);
    let lower = fit_region(
        dist,
        (1, split_k.saturating_sub(1)),
        bin_width,
        options.shrink_bins,
        options.min_fit_points,
        "lower degree region (k < sqrt N)",
    )?;
    let upper = fit_region(
        dist,
        (split_k.max(1), k_max),
        bin_width,
        options.shrink_bins,
        options.min_fit_points,
        "upper degree region (k >= sqrt N)",
    )?;
    Ok((split_k, lower, upper))
}

/// Computes `(γ1, γ2, γ3)` (and optionally `l`) for one network.
pub fn extract_features<T: Scalar>(
    net: &SemanticNetwork,
    sample_id: &str,
    options: &FeatureOptions,
) -> Result<FeatureExtraction<T>> {
    let g = net.graph();
    let dist = measures::degree_distribution(g);
    let split_n = match options.split_basis {
        SplitBasis::Vertices => net.n_vertices(),
        SplitBasis::Words => net.n_words(),
    };
    let width = options.bin_width.unwrap_or(2 * net.m());
    let (split_k, lower, upper) = fit_degree_regions(&dist, split_n, width, options)?;

    let spectrum: Vec<(T, T)> = measures::clustering_by_degree::<T>(g)
        .series()
        .into_iter()
        .map(|(k, c)| (T::from_count(k), c))
        .collect();
    let clustering = fit_power_law(&spectrum, None, options.min_fit_points).map_err(|e| {
        Error::DegenerateRegion {
            region: "clustering spectrum C(k)",
            source: Box::new(e),
        }
    })?;

    let mean_geodesic = options
        .with_geodesic
        .then(|| measures::mean_geodesic::<T>(g).mean_geodesic);

    Ok(FeatureExtraction {
        features: FeatureVector {
            sample_id: sample_id.to_owned(),
            gamma1: lower.fit.gamma,
            gamma2: upper.fit.gamma,
            gamma3: clustering.gamma,
            mean_geodesic,
            n_vertices: net.n_vertices(),
            n_words: net.n_words(),
            m: net.m(),
        },
        split_k,
        lower,
        upper,
        clustering,
    })
}
