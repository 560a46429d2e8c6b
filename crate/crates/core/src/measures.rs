//! Complex-network measures over an [`Adjacency`].

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::semnet::Adjacency;

/// `k_i = Σ_j a_ij`, indexed by vertex.
pub fn degrees(g: &Adjacency) -> Vec<usize> {
    (0..g.n_vertices()).map(|v| g.degree(v)).collect()
}

/// Number of triangles through each vertex, by sorted-neighbor intersection.
pub fn triangles(g: &Adjacency) -> Vec<usize> {
    (0..g.n_vertices())
        .map(|i| {
            let ni = g.neighbors(i);
            // every triangle through i is seen once from each of its two other corners
            let twice: usize = ni
                .iter()
                .map(|&j| sorted_intersection_len(ni, g.neighbors(j)))
                .sum();
            twice / 2
        })
        .collect()
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `C_i = Σ_{j,m} a_ij a_jm a_mi / (k_i (k_i − 1))`, and 0 where `k_i < 2`.
pub fn clustering_coefficients<T: Scalar>(g: &Adjacency) -> Vec<T> {
    triangles(g)
        .into_iter()
        .enumerate()
        .map(|(v, t)| local_clustering(t, g.degree(v)))
        .collect()
}

pub(crate) fn local_clustering<T: Scalar>(triangles: usize, degree: usize) -> T {
    if degree < 2 {
        T::zero()
    } else {
        T::from_count(2 * triangles) / T::from_count(degree * (degree - 1))
    }
}

/// `P(k)`: number of vertices with degree `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub counts: BTreeMap<usize, usize>,
    pub n_vertices: usize,
}

impl DegreeDistribution {
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// `(k, P(k))` for every `k` in `from..=to`, zeros included.
    pub fn dense<T: Scalar>(&self, from: usize, to: usize) -> Vec<(usize, T)> {
        (from..=to)
            .map(|k| (k, T::from_count(self.count(k))))
            .collect()
    }
}

pub fn degree_distribution(g: &Adjacency) -> DegreeDistribution {
    let mut counts = BTreeMap::new();
    for v in 0..g.n_vertices() {
        *counts.entry(g.degree(v)).or_insert(0) += 1;
    }
    DegreeDistribution {
        counts,
        n_vertices: g.n_vertices(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeClustering<T> {
    /// Mean `C_i` over the vertices of this degree.
    pub mean: T,
    pub vertices: usize,
}

/// `C(k)`: mean clustering coefficient of the vertices of degree `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringByDegree<T> {
    pub points: BTreeMap<usize, DegreeClustering<T>>,
}

impl<T: Scalar> ClusteringByDegree<T> {
    pub fn get(&self, k: usize) -> Option<T> {
        self.points.get(&k).map(|p| p.mean)
    }

    /// `(k, C(k))` pairs in increasing `k`.
    pub fn series(&self) -> Vec<(usize, T)> {
        self.points.iter().map(|(&k, p)| (k, p.mean)).collect()
    }
}

pub fn clustering_by_degree<T: Scalar>(g: &Adjacency) -> ClusteringByDegree<T> {
    let coefficients: Vec<T> = clustering_coefficients(g);
    let mut sums: BTreeMap<usize, (T, usize)> = BTreeMap::new();
    for (v, c) in coefficients.into_iter().enumerate() {
        let entry = sums.entry(g.degree(v)).or_insert((T::zero(), 0));
        entry.0 = entry.0 + c;
        entry.1 += 1;
    }
    ClusteringByDegree {
        points: sums
            .into_iter()
            .map(|(k, (sum, n))| {
                (
                    k,
                    DegreeClustering {
                        mean: sum / T::from_count(n),
                        vertices: n,
                    },
                )
            })
            .collect(),
    }
}

/// Mean geodesic distance with the `½N(N+1)` normalization.
///
/// `l = Σ_{i≥j} d_ij / (½ N (N+1))`, where the sum includes the zero diagonal
/// terms and, on a disconnected graph, only pairs that can reach each other.
/// The more common convention divides by `½ N (N−1)`; the two differ by the
/// constant factor `(N−1)/(N+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSummary<T> {
    pub mean_geodesic: T,
    /// `Σ_{i>j} d_ij` over reachable pairs.
    pub distance_sum: u64,
    pub n_vertices: usize,
    pub connected: bool,
    /// Unordered vertex pairs with no path between them.
    pub unreachable_pairs: u64,
}

impl<T: Scalar> GeodesicSummary<T> {
    /// The same distance sum under the `½N(N−1)` convention.
    pub fn conventional_mean(&self) -> T {
        let n = self.n_vertices as u64;
        if n < 2 {
            return T::zero();
        }
        T::from_u64(self.distance_sum).expect("sum fits") / T::from_u64(n * (n - 1) / 2).expect("fits")
    }
}

fn bfs_distances(g: &Adjacency, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.fill(usize::MAX);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = next;
                queue.push_back(u);
            }
        }
    }
}

pub fn mean_geodesic<T: Scalar>(g: &Adjacency) -> GeodesicSummary<T> {
    let n = g.n_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut distance_sum = 0u64;
    let mut unreachable_pairs = 0u64;
    for i in 0..n {
        bfs_distances(g, i, &mut dist, &mut queue);
        for &d in &dist[..i] {
            if d == usize::MAX {
                unreachable_pairs += 1;
            } else {
                distance_sum += d as u64;
            }
        }
    }
    let pairs = (n as u64) * (n as u64 + 1) / 2;
    let mean_geodesic = if pairs == 0 {
        T::zero()
    } else {
        T::from_u64(distance_sum).expect("sum fits") / T::from_u64(pairs).expect("fits")
    };
    GeodesicSummary {
        mean_geodesic,
        distance_sum,
        n_vertices: n,
        connected: unreachable_pairs == 0,
        unreachable_pairs,
    }
}

/// `l` against `log10 N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldReport<T> {
    pub mean_geodesic: T,
    pub log10_n: T,
    pub ratio: T,
    pub small_world: bool,
    pub band: (T, T),
}

/// Default accepted band for `l / log10 N`.
pub const SMALL_WORLD_BAND: (f64, f64) = (0.25, 4.0);

pub fn small_world_check<T: Scalar>(
    summary: &GeodesicSummary<T>,
    band: (T, T),
) -> Result<SmallWorldReport<T>> {
    if summary.n_vertices < 2 {
        return Err(Error::InvalidParameter(format!(
            "small-world check needs N >= 2, got {}",
            summary.n_vertices
        )));
    }
    let log10_n = T::from_count(summary.n_vertices).log10();
    let ratio = summary.mean_geodesic / log10_n;
    Ok(SmallWorldReport {
        mean_geodesic: summary.mean_geodesic,
        log10_n,
        ratio,
        small_world: ratio >= band.0 && ratio <= band.1,
        band,
    })
}
