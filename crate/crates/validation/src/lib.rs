//! Reference implementations written independently of `storynet`, plus the
//! seeded fixtures the acceptance suite feeds to both.

#![allow(clippy::needless_range_loop)]

pub mod graph {
    use std::collections::BTreeMap;

    use rand::Rng;

    /// Dense undirected simple graph.
    #[derive(Debug, Clone)]
    pub struct Dense {
        pub n: usize,
        pub adj: Vec<Vec<bool>>,
    }

    impl Dense {
        pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
            let mut adj = vec![vec![false; n]; n];
            for &(a, b) in edges {
                adj[a][b] = true;
                adj[b][a] = true;
            }
            Dense { n, adj }
        }

        pub fn edges(&self) -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for a in 0..self.n {
                for b in a + 1..self.n {
                    if self.adj[a][b] {
                        out.push((a, b));
                    }
                }
            }
            out
        }

        pub fn degrees(&self) -> Vec<usize> {
            self.adj.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
        }

        /// Triangles through each vertex, by scanning every vertex triple.
        pub fn triangles(&self) -> Vec<usize> {
            let mut t = vec![0; self.n];
            for a in 0..self.n {
                for b in a + 1..self.n {
                    for c in b + 1..self.n {
                        if self.adj[a][b] && self.adj[b][c] && self.adj[a][c] {
                            t[a] += 1;
                            t[b] += 1;
                            t[c] += 1;
                        }
                    }
                }
            }
            t
        }

        /// `2t / (k(k−1))`, zero below degree 2.
        pub fn clustering(&self) -> Vec<f64> {
            let k = self.degrees();
            let t = self.triangles();
            (0..self.n)
                .map(|i| {
                    if k[i] < 2 {
                        0.0
                    } else {
                        (2 * t[i]) as f64 / (k[i] * (k[i] - 1)) as f64
                    }
                })
                .collect()
        }

        pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
            let mut h = BTreeMap::new();
            for k in self.degrees() {
                *h.entry(k).or_insert(0) += 1;
            }
            h
        }

        /// Mean clustering per degree, summed in vertex order.
        pub fn clustering_by_degree(&self) -> BTreeMap<usize, f64> {
            let k = self.degrees();
            let c = self.clustering();
            let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
            for i in 0..self.n {
                let e = acc.entry(k[i]).or_insert((0.0, 0));
                e.0 += c[i];
                e.1 += 1;
            }
            acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
        }

        /// Floyd–Warshall; `None` marks unreachable pairs.
        pub fn distances(&self) -> Vec<Vec<Option<u64>>> {
            let n = self.n;
            let mut d = vec![vec![None; n]; n];
            for i in 0..n {
                d[i][i] = Some(0);
                for j in 0..n {
                    if self.adj[i][j] {
                        d[i][j] = Some(1);
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                            if d[i][j].is_none_or(|c| a + b < c) {
                                d[i][j] = Some(a + b);
                            }
                        }
                    }
                }
            }
            d
        }

        /// Sum of `d_ij` over reachable `i > j`, over `½N(N+1)`.
        pub fn mean_geodesic(&self) -> f64 {
            let d = self.distances();
            let mut sum = 0u64;
            for i in 0..self.n {
                for j in 0..i {
                    sum += d[i][j].unwrap_or(0);
                }
            }
            let pairs = (self.n * (self.n + 1) / 2) as u64;
            sum as f64 / pairs as f64
        }

        pub fn is_connected(&self) -> bool {
            self.distances().iter().all(|row| row.iter().all(Option::is_some))
        }
    }

    /// Every labelled connected simple graph on `n` vertices.
    pub fn all_connected(n: usize) -> Vec<Dense> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let g = Dense::from_edges(n, &edges);
            if g.is_connected() {
                out.push(g);
            }
        }
        out
    }

    /// A random spanning tree plus each remaining pair with probability `p`.
    pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Dense {
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((a, b));
                }
            }
        }
        let mut g = Dense::from_edges(n, &edges);
        // relabel so the tree is not always rooted at vertex 0
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
        let old = g.clone();
        for a in 0..n {
            for b in 0..n {
                g.adj[perm[a]][perm[b]] = old.adj[a][b];
            }
        }
        g
    }
}

pub mod fixtures {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Draws of `mean + L z` with `z` standard normal.
    pub fn gaussian<R: Rng>(n: usize, mean: &[f64], chol: &[Vec<f64>], rng: &mut R) -> Vec<Vec<f64>> {
        let d = mean.len();
        (0..n)
            .map(|_| {
                let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                (0..d)
                    .map(|i| mean[i] + (0..=i).map(|j| chol[i][j] * z[j]).sum::<f64>())
                    .collect()
            })
            .collect()
    }

    /// `Σ = L Lᵀ`.
    pub fn covariance(chol: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let d = chol.len();
        (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| chol[i][k] * chol[j][k]).sum()).collect())
            .collect()
    }

    /// Solves `a x = b` by Gauss–Jordan elimination with partial pivoting.
    pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        }).collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
            m.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        (0..n).map(|i| m[i][n] / m[i][i]).collect()
    }

    /// Mahalanobis length of `v` under `Σ`.
    pub fn mahalanobis(sigma: &[Vec<f64>], v: &[f64]) -> f64 {
        let w = solve(sigma, v);
        v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().sqrt()
    }

    pub fn det3(m: &[Vec<f64>]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Uniform entries in `[-2, 2]`, redrawn until `|det| ≥ 0.25`.
    pub fn random_invertible3<R: Rng>(rng: &mut R) -> Vec<Vec<f64>> {
        loop {
            let m: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            if det3(&m).abs() >= 0.25 {
                return m;
            }
        }
    }

    pub fn apply(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}
