//! Word co-occurrence networks.
//!
//! One vertex per distinct lemma, indexed by first occurrence. Two vertices
//! share an edge iff some occurrence of each lies within `m` positions of the
//! other (`1 ≤ |p − q| ≤ m`). Edges are unweighted and self loops are never
//! created, so repeated co-occurrences and a word next to itself add nothing.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::tokenize::TokenStream;

/// Simple undirected graph as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjacency {
    neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    /// Graph on `n` vertices from an edge list. Duplicate edges (in either
    /// orientation) collapse; self loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self loop on vertex {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        Ok(Self::from_raw(neighbors))
    }

    fn from_raw(mut neighbors: Vec<Vec<usize>>) -> Self {
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Adjacency { neighbors }
    }

    pub fn n_vertices(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors
            .get(a)
            .is_some_and(|list| list.binary_search(&b).is_ok())
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each edge once, as `(a, b)` with `a < b`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// The co-occurrence network of one token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticNetwork {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    graph: Adjacency,
    m: usize,
    n_words: usize,
}

impl SemanticNetwork {
    /// Builds the network of `stream` at word distance `m`.
    pub fn build(stream: &TokenStream, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!(
                "word distance m must be >= 1, got {m}"
            )));
        }
        if stream.is_empty() {
            return Err(Error::EmptyStream);
        }

        let mut labels = Vec::new();
        let mut index = HashMap::new();
        let ids: Vec<usize> = stream
            .lemmas()
            .map(|lemma| {
                *index.entry(lemma.to_owned()).or_insert_with(|| {
                    labels.push(lemma.to_owned());
                    labels.len() - 1
                })
            })
            .collect();

        let mut neighbors = vec![Vec::new(); labels.len()];
        for (p, &a) in ids.iter().enumerate() {
            for &b in ids.iter().skip(p + 1).take(m) {
                if a != b {
                    neighbors[a].push(b);
                    neighbors[b].push(a);
                }
            }
        }

        Ok(SemanticNetwork {
            labels,
            index,
            graph: Adjacency::from_raw(neighbors),
            m,
            n_words: stream.n_words(),
        })
    }

    pub fn graph(&self) -> &Adjacency {
        &self.graph
    }

    /// Word distance the network was built at.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `N`, the number of distinct lemmas.
    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    /// `N_words` of the source stream.
    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Lemmas in vertex order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, lemma: &str) -> Option<usize> {
        self.index.get(lemma).copied()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn degree_of(&self, lemma: &str) -> Option<usize> {
        self.vertex(lemma).map(|v| self.graph.degree(v))
    }

    /// Neighbor lemmas of `lemma`, sorted.
    pub fn neighbor_labels(&self, lemma: &str) -> Option<Vec<&str>> {
        let v = self.vertex(lemma)?;
        let mut out: Vec<&str> = self
            .graph
            .neighbors(v)
            .iter()
            .map(|&u| self.labels[u].as_str())
            .collect();
        out.sort_unstable();
        Some(out)
    }

    /// Edges as lemma pairs `(a, b)` with `a < b`, sorted lexicographically.
    pub fn labeled_edges(&self) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = self
            .graph
            .edges()
            .map(|(a, b)| {
                let (x, y) = (self.labels[a].as_str(), self.labels[b].as_str());
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Writes the edge-list dump: one `lemma_i<TAB>lemma_j` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b) in self.labeled_edges() {
            writeln!(out, "{a}\t{b}")?;
        }
        Ok(())
    }

    pub fn edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("lemmas are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::{make_stream, IdentityLemmatizer};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const FEYNMAN: &str = "To those who do not know mathematics it is difficult to get across \
                           a real feeling as to the beauty, the deepest beauty, of nature...";

    fn stream(words: &[&str]) -> TokenStream {
        TokenStream::from_lemmas("t", words.iter().copied())
    }

    /// Independent oracle: scan every position pair.
    fn brute_force_edges(lemmas: &[String], m: usize) -> BTreeSet<(String, String)> {
        let mut set = BTreeSet::new();
        for p in 0..lemmas.len() {
            for q in 0..lemmas.len() {
                let gap = p.abs_diff(q);
                if gap >= 1 && gap <= m && lemmas[p] != lemmas[q] {
                    let (a, b) = if lemmas[p] < lemmas[q] {
                        (&lemmas[p], &lemmas[q])
                    } else {
                        (&lemmas[q], &lemmas[p])
                    };
                    set.insert((a.clone(), b.clone()));
                }
            }
        }
        set
    }

    #[test]
    fn feynman_beauty() {
        let s = make_stream(FEYNMAN, "f", &IdentityLemmatizer);
        let net = SemanticNetwork::build(&s, 2).unwrap();
        assert_eq!(net.n_vertices(), 21);
        assert_eq!(net.n_words(), 25);
        assert_eq!(net.degree_of("beauty"), Some(5));
        assert_eq!(
            net.neighbor_labels("beauty").unwrap(),
            ["deepest", "nature", "of", "the", "to"]
        );
        let lemmas: Vec<String> = s.lemmas().map(str::to_owned).collect();
        assert_eq!(net.edge_count(), brute_force_edges(&lemmas, 2).len());
    }

    #[test]
    fn repeated_word_has_no_self_loop() {
        let net = SemanticNetwork::build(&stream(&["a", "b", "a"]), 1).unwrap();
        assert_eq!(net.n_vertices(), 2);
        assert_eq!(net.edge_count(), 1);
        assert!(!net.graph().has_edge(0, 0));
    }

    #[test]
    fn chain_and_triangle() {
        let abc = stream(&["a", "b", "c"]);
        assert_eq!(SemanticNetwork::build(&abc, 1).unwrap().edge_count(), 2);
        assert_eq!(SemanticNetwork::build(&abc, 2).unwrap().edge_count(), 3);
        // m larger than the stream: complete graph
        assert_eq!(SemanticNetwork::build(&abc, 10).unwrap().edge_count(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SemanticNetwork::build(&stream(&[]), 2),
            Err(Error::EmptyStream)
        ));
        assert!(matches!(
            SemanticNetwork::build(&stream(&["a"]), 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn vertices_in_first_occurrence_order() {
        let net = SemanticNetwork::build(&stream(&["z", "y", "z", "x"]), 1).unwrap();
        assert_eq!(net.labels(), ["z", "y", "x"]);
    }

    #[test]
    fn edge_list_format() {
        let net = SemanticNetwork::build(&stream(&["b", "a", "c"]), 1).unwrap();
        assert_eq!(net.edge_list_string(), "a\tb\na\tc\n");
    }

    #[test]
    fn adjacency_rejects_loops() {
        assert!(Adjacency::from_edges(2, &[(0, 0)]).is_err());
        assert!(Adjacency::from_edges(2, &[(0, 2)]).is_err());
        let g = Adjacency::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1), (1, 2)]);
    }

    fn small_stream() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(
            prop_oneof![Just("a"), Just("b"), Just("c"), Just("d"), Just("e"), Just("f"), Just("g")]
                .prop_map(str::to_owned),
            1..50,
        )
    }

    proptest! {
        #[test]
        fn matches_pair_scan(lemmas in small_stream(), m in 1usize..6) {
            let net = SemanticNetwork::build(&TokenStream::from_lemmas("p", lemmas.clone()), m).unwrap();
            let expected = brute_force_edges(&lemmas, m);
            let got: BTreeSet<(String, String)> = net
                .labeled_edges()
                .into_iter()
                .map(|(a, b)| (a.to_owned(), b.to_owned()))
                .collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn structural_invariants(lemmas in small_stream(), m in 1usize..6) {
            let s = TokenStream::from_lemmas("p", lemmas.clone());
            let net = SemanticNetwork::build(&s, m).unwrap();
            let g = net.graph();
            let degree_sum: usize = (0..g.n_vertices()).map(|v| g.degree(v)).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
            prop_assert!(net.n_vertices() <= net.n_words());
            for v in 0..g.n_vertices() {
                prop_assert!(!g.has_edge(v, v));
                for &u in g.neighbors(v) {
                    prop_assert!(g.has_edge(u, v));
                }
                let occurrences = lemmas.iter().filter(|l| **l == net.label(v)).count();
                prop_assert!(g.degree(v) <= 2 * m * occurrences);
            }
            // connected: BFS from vertex 0 reaches everything
            let mut seen = vec![false; g.n_vertices()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &u in g.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            prop_assert!(seen.iter().all(|&b| b));
            // monotone in m
            let wider = SemanticNetwork::build(&s, m + 1).unwrap();
            for (a, b) in net.labeled_edges() {
                let (va, vb) = (wider.vertex(a).unwrap(), wider.vertex(b).unwrap());
                prop_assert!(wider.graph().has_edge(va, vb));
            }
        }
    }
}
