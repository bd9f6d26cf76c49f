//! Weighted k-uniform hypergraphs on vertex set {0, ..., n-1}.
//!
//! Edges are sorted k-tuples of distinct vertices; parallel edges are kept as
//! distinct entries (their weights are not merged). An inverted index from
//! vertex to edge ids backs the neighborhood and degree queries, so subset
//! scans only ever touch edges that can actually match.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HypergraphError {
    #[error("edge arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("edge {index} has {got} vertices, expected {expected}")]
    WrongEdgeSize {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("edge {index} contains duplicate vertex {vertex}")]
    DuplicateVertex { index: usize, vertex: usize },
    #[error("edge {index} references vertex {vertex} outside 0..{n}")]
    VertexOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("edge {index} has non-finite or negative weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("{got} weights for {edges} edges")]
    WeightCountMismatch { got: usize, edges: usize },
    #[error("subset size {got} does not match k-1 = {expected}")]
    WrongSubsetSize { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Vec<f64>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting each edge and checking that every edge has
    /// exactly `k` distinct in-range vertices and a finite nonnegative weight.
    pub fn new(
        k: usize,
        n: usize,
        edges: Vec<Vec<usize>>,
        weights: Vec<f64>,
    ) -> Result<Self, HypergraphError> {
        if k < 2 {
            return Err(HypergraphError::ArityTooSmall(k));
        }
        if weights.len() != edges.len() {
            return Err(HypergraphError::WeightCountMismatch {
                got: weights.len(),
                edges: edges.len(),
            });
        }
        let mut sorted_edges = Vec::with_capacity(edges.len());
        for (index, mut e) in edges.into_iter().enumerate() {
            if e.len() != k {
                return Err(HypergraphError::WrongEdgeSize {
                    index,
                    got: e.len(),
                    expected: k,
                });
            }
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(HypergraphError::DuplicateVertex {
                        index,
                        vertex: w[0],
                    });
                }
            }
            if let Some(&v) = e.last() {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { index, vertex: v, n });
                }
            }
            sorted_edges.push(e);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(HypergraphError::BadWeight { index, weight: w });
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for (id, e) in sorted_edges.iter().enumerate() {
            for &v in e {
                incidence[v].push(id);
            }
        }
        Ok(Self {
            k,
            n,
            edges: sorted_edges,
            weights,
            incidence,
        })
    }

    /// All weights 1.
    pub fn unweighted(k: usize, n: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let w = vec![1.0; edges.len()];
        Self::new(k, n, edges, w)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &[usize] {
        &self.edges[id]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Edge ids containing `v`.
    pub fn edges_at(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Number of edges containing `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// Largest degree over all vertices; 0 for an edgeless instance.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Vertices sharing at least one edge with `v`, sorted, `v` excluded.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for &id in &self.incidence[v] {
            for &u in &self.edges[id] {
                seen[u] = true;
            }
        }
        seen[v] = false;
        (0..self.n).filter(|&u| seen[u]).collect()
    }

    /// Vertices `u` such that `subset + {u}` is an edge, for a sorted or
    /// unsorted (k-1)-subset. Parallel completions are reported once.
    pub fn completion_neighborhood(&self, subset: &[usize]) -> Result<Vec<usize>, HypergraphError> {
        if subset.len() + 1 != self.k {
            return Err(HypergraphError::WrongSubsetSize {
                got: subset.len(),
                expected: self.k - 1,
            });
        }
        let mut s: Vec<usize> = subset.to_vec();
        s.sort_unstable();
        // Scan the shortest incidence list among the subset's vertices.
        let probe = *s
            .iter()
            .min_by_key(|&&v| self.incidence.get(v).map_or(0, Vec::len))
            .expect("nonempty subset");
        if probe >= self.n {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for &id in &self.incidence[probe] {
            let e = &self.edges[id];
            let mut extra = None;
            let mut si = s.iter().peekable();
            let mut ok = true;
            for &u in e {
                if si.peek() == Some(&&u) {
                    si.next();
                } else if extra.is_none() {
                    extra = Some(u);
                } else {
                    ok = false;
                    break;
                }
            }
            if ok && si.peek().is_none() {
                if let Some(u) = extra {
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Edge ids whose vertex set contains all of `subset`.
    pub fn edges_containing_all(&self, subset: &[usize]) -> Vec<usize> {
        if subset.is_empty() {
            return (0..self.m()).collect();
        }
        let probe = *subset
            .iter()
            .min_by_key(|&&v| self.incidence.get(v).map_or(0, Vec::len))
            .expect("nonempty subset");
        if probe >= self.n {
            return Vec::new();
        }
        self.incidence[probe]
            .iter()
            .copied()
            .filter(|&id| {
                let e = &self.edges[id];
                subset.iter().all(|v| e.binary_search(v).is_ok())
            })
            .collect()
    }

    /// Sub-hypergraph on the same vertex range keeping edges fully inside
    /// `keep` (given as vertex ids). Edge order and weights are preserved.
    pub fn induced(&self, keep: &[usize]) -> Hypergraph {
        let mut inside = vec![false; self.n];
        for &v in keep {
            if v < self.n {
                inside[v] = true;
            }
        }
        self.filter_edges(|e| e.iter().all(|&v| inside[v]))
    }

    /// Drops every edge touching `remove`; the vertex range is unchanged.
    pub fn remove_vertices(&self, remove: &[usize]) -> Hypergraph {
        let mut gone = vec![false; self.n];
        for &v in remove {
            if v < self.n {
                gone[v] = true;
            }
        }
        self.filter_edges(|e| !e.iter().any(|&v| gone[v]))
    }

    fn filter_edges(&self, mut pred: impl FnMut(&[usize]) -> bool) -> Hypergraph {
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        for (e, &w) in self.edges.iter().zip(&self.weights) {
            if pred(e) {
                edges.push(e.clone());
                weights.push(w);
            }
        }
        Hypergraph::new(self.k, self.n, edges, weights).expect("filtered edges stay valid")
    }

    /// Vertices appearing in at least one edge, sorted.
    pub fn active_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.incidence[v].is_empty()).collect()
    }
}
