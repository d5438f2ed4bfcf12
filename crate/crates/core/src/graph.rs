//! Ordered finite simple graphs on `{1..n}` with a bitmask edge encoding.
//!
//! Edges are stored as bits of a single `u64`, indexed by the lexicographic
//! order on unordered pairs `{u, v}` with `u < v`: index(1,2) = 0,
//! index(1,3) = 1, ..., index(2,3) = n-1, and so on. The encoding cannot
//! express loops or multi-edges, and a vertex count whose pair count exceeds
//! 64 bits is rejected at construction rather than silently truncated.

use std::fmt;
use std::ops::Range;

use serde::Deserialize;
use thiserror::Error;

/// Largest vertex count the single-word encoding supports (C(11,2) = 55 bits).
pub const MAX_VERTICES: usize = 11;

/// Number of unordered vertex pairs on `{1..n}`, i.e. C(n,2).
pub const fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Bit index of the pair `{u, v}` with `u < v`, lexicographic in `(u, v)`.
///
/// Callers must pass `1 <= u < v <= n`.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(1 <= u && u < v && v <= n);
    (u - 1) * n - u * (u - 1) / 2 + (v - u) - 1
}

/// Inverse of [`pair_index`]: the pair `(u, v)` with `u < v` at a bit index.
pub fn pair_at(n: usize, index: usize) -> (usize, usize) {
    debug_assert!(index < pair_count(n));
    let mut u = 1;
    let mut base = 0;
    // Row u covers indices [base, base + n - u).
    while index >= base + (n - u) {
        base += n - u;
        u += 1;
    }
    (u, u + 1 + (index - base))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count {n} exceeds the {MAX_VERTICES}-vertex limit of the bitmask encoding")]
    TooManyVertices { n: usize },
    #[error("vertex count must be at least 1")]
    EmptyVertexSet,
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop edge {vertex} {vertex} is not allowed in a simple graph")]
    LoopEdge { vertex: usize },
    #[error("duplicate edge {u} {v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge mask {mask:#x} has bits beyond the {bits} pairs of an {n}-vertex graph")]
    MaskTooWide { n: usize, bits: usize, mask: u64 },
}

/// Errors from [`parse_graph`], carrying the 1-based source line.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphParseError {
    #[error("line {line}: expected vertex count, got {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: expected \"u v\", got {text:?}")]
    BadEdgeLine { line: usize, text: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("json: {message}")]
    Json { message: String },
    #[error("input is empty")]
    Empty,
}

/// A finite simple graph on `{1..n}` with the natural vertex order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderedGraph {
    n: usize,
    mask: u64,
}

impl OrderedGraph {
    /// Edgeless graph on `{1..n}`.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_mask(n, 0)
    }

    /// Complete graph on `{1..n}`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let bits = pair_count(n);
        check_order(n)?;
        let mask = if bits == 0 { 0 } else { u64::MAX >> (64 - bits) };
        Ok(Self { n, mask })
    }

    /// Graph with exactly the given edge bits set.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self, GraphError> {
        check_order(n)?;
        let bits = pair_count(n);
        if bits < 64 && mask >> bits != 0 {
            return Err(GraphError::MaskTooWide { n, bits, mask });
        }
        Ok(Self { n, mask })
    }

    /// Graph with the listed edges; either endpoint order is accepted.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        check_vertex(u, self.n)?;
        check_vertex(v, self.n)?;
        if u == v {
            return Err(GraphError::LoopEdge { vertex: u });
        }
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        let bit = 1u64 << pair_index(self.n, u, v);
        if self.mask & bit != 0 {
            return Err(GraphError::DuplicateEdge { u, v });
        }
        self.mask |= bit;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The raw edge bitmask.
    pub fn edge_mask(&self) -> u64 {
        self.mask
    }

    pub fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Whether `{u, v}` is an edge. `adjacent(t, t)` is always false.
    pub fn adjacent(&self, u: usize, v: usize) -> Result<bool, GraphError> {
        check_vertex(u, self.n)?;
        check_vertex(v, self.n)?;
        Ok(self.has_edge(u, v))
    }

    /// Unvalidated adjacency test for hot loops; vertices must be in range.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        debug_assert!(1 <= u && u <= self.n && 1 <= v && v <= self.n);
        if u == v {
            return false;
        }
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.mask >> pair_index(self.n, u, v) & 1 != 0
    }

    /// Edges in ascending bit-index order, each as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let idx = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(pair_at(n, idx))
        })
    }

    /// The edge set as an [`EdgeSet`] over the same pair indexing.
    pub fn edge_set(&self) -> EdgeSet {
        EdgeSet {
            n: self.n,
            mask: self.mask,
        }
    }

    /// Canonical text rendering: header line `n`, then `u v` per edge in
    /// ascending bit-index order. [`parse_graph`] round-trips this exactly.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderedGraph(n={}, edges=", self.n)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

fn check_order(n: usize) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyVertexSet);
    }
    if n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { n });
    }
    Ok(())
}

fn check_vertex(v: usize, n: usize) -> Result<(), GraphError> {
    if v == 0 || v > n {
        return Err(GraphError::VertexOutOfRange { vertex: v, n });
    }
    Ok(())
}

/// An arbitrary set of vertex pairs over the same indexing as [`OrderedGraph`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: usize,
    mask: u64,
}

impl EdgeSet {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        check_order(n)?;
        Ok(Self { n, mask: 0 })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        check_order(n)?;
        let mut mask = 0u64;
        for &(u, v) in pairs {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(GraphError::LoopEdge { vertex: u });
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            mask |= 1 << pair_index(n, u, v);
        }
        Ok(Self { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        if u == v || u == 0 || v == 0 || u > self.n || v > self.n {
            return false;
        }
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.mask >> pair_index(self.n, u, v) & 1 != 0
    }

    pub fn intersects(&self, other: &EdgeSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.mask & other.mask != 0
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        debug_assert_eq!(self.n, other.n);
        EdgeSet {
            n: self.n,
            mask: self.mask & other.mask,
        }
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        debug_assert_eq!(self.n, other.n);
        EdgeSet {
            n: self.n,
            mask: self.mask | other.mask,
        }
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.mask & !other.mask == 0
    }

    /// Pairs in ascending bit-index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let idx = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(pair_at(n, idx))
        })
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[derive(Deserialize)]
struct JsonGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Parses a graph from either the line format (`n`, then `u v` lines) or the
/// JSON alternative `{"n": int, "edges": [[u,v], ...]}`. Input edges may list
/// endpoints in either order; loops and duplicates are rejected.
pub fn parse_graph(text: &str) -> Result<OrderedGraph, GraphParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return parse_graph_json(trimmed);
    }

    let mut n: Option<(usize, OrderedGraph)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match &mut n {
            None => {
                let count: usize = line.parse().map_err(|_| GraphParseError::BadHeader {
                    line: lineno,
                    text: line.to_string(),
                })?;
                let g = OrderedGraph::empty(count).map_err(|source| GraphParseError::Invalid {
                    line: lineno,
                    source,
                })?;
                n = Some((count, g));
            }
            Some((_, g)) => {
                let mut it = line.split_whitespace();
                let (u, v) = match (it.next(), it.next(), it.next()) {
                    (Some(u), Some(v), None) => (u, v),
                    _ => {
                        return Err(GraphParseError::BadEdgeLine {
                            line: lineno,
                            text: line.to_string(),
                        })
                    }
                };
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| GraphParseError::BadEdgeLine {
                        line: lineno,
                        text: line.to_string(),
                    })
                };
                let (u, v) = (parse(u)?, parse(v)?);
                g.insert_edge(u, v).map_err(|source| GraphParseError::Invalid {
                    line: lineno,
                    source,
                })?;
            }
        }
    }
    match n {
        Some((_, g)) => Ok(g),
        None => Err(GraphParseError::Empty),
    }
}

fn parse_graph_json(text: &str) -> Result<OrderedGraph, GraphParseError> {
    let parsed: JsonGraph = serde_json::from_str(text).map_err(|e| GraphParseError::Json {
        message: e.to_string(),
    })?;
    OrderedGraph::from_edges(parsed.n, &parsed.edges)
        .map_err(|source| GraphParseError::Invalid { line: 1, source })
}

/// Total number of graphs on `{1..n}`, i.e. `2^C(n,2)`. Fits in `u64` for all
/// supported vertex counts.
pub fn graph_count(n: usize) -> Result<u64, GraphError> {
    check_order(n)?;
    Ok(1u64 << pair_count(n))
}

/// All graphs on `{1..n}` in ascending bitmask order.
pub fn graphs(n: usize) -> Result<GraphRange, GraphError> {
    let total = graph_count(n)?;
    Ok(GraphRange {
        n,
        masks: 0..total,
    })
}

/// The graphs whose masks lie in a contiguous range; disjoint ranges partition
/// the enumeration for parallel consumption.
pub fn graphs_in_range(n: usize, masks: Range<u64>) -> Result<GraphRange, GraphError> {
    let total = graph_count(n)?;
    debug_assert!(masks.end <= total);
    Ok(GraphRange { n, masks })
}

/// Iterator over a contiguous mask range of the graph enumeration.
#[derive(Clone, Debug)]
pub struct GraphRange {
    n: usize,
    masks: Range<u64>,
}

impl Iterator for GraphRange {
    type Item = OrderedGraph;

    fn next(&mut self) -> Option<OrderedGraph> {
        let mask = self.masks.next()?;
        Some(OrderedGraph {
            n: self.n,
            mask,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.masks.size_hint()
    }
}

impl ExactSizeIterator for GraphRange {}
