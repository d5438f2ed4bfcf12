//! The derangement set of an ordered graph.
//!
//! A permutation `w` belongs to `D(G)` when, for every vertex `t`, the vertex
//! `lambda_w(t)` is adjacent in `G` to some vertex of `rho_w(t)`. A fixed
//! point `t` has `lambda(t) = t` and `rho(t) = {t}`, and a simple graph never
//! provides that adjacency, so everything in `D(G)` is a derangement without
//! any restriction being imposed up front.

use thiserror::Error;

use crate::graph::{EdgeSet, GraphError, OrderedGraph};
use crate::perm::{canopy, CanopyData, Derangement, Permutation};

/// Default vertex-count cutoff for materializing a whole derangement set.
pub const DEFAULT_DSET_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsetError {
    #[error("permutation is on {perm_n} vertices but the graph has {graph_n}")]
    SizeMismatch { graph_n: usize, perm_n: usize },
    #[error("n={n} exceeds the enumeration limit {limit}; raise the limit explicitly to override")]
    LimitExceeded { n: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One vertex at which the membership criterion fails, with its canopy values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFailure {
    pub vertex: usize,
    pub lambda: usize,
    pub rho: Vec<usize>,
}

/// Outcome of the membership criterion, listing every failing vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    pub witness_failures: Vec<WitnessFailure>,
}

/// Evaluates the membership criterion of `w` in `D(G)` for any permutation,
/// reporting all vertices where it fails.
pub fn check_membership(
    graph: &OrderedGraph,
    w: &Permutation,
) -> Result<MembershipReport, DsetError> {
    check_sizes(graph, w)?;
    let canopy = canopy(w);
    let witness_failures: Vec<WitnessFailure> = (1..=graph.n())
        .filter(|&t| !vertex_criterion_holds(graph, &canopy, t))
        .map(|t| WitnessFailure {
            vertex: t,
            lambda: canopy.lambda(t),
            rho: canopy.rho(t).to_vec(),
        })
        .collect();
    Ok(MembershipReport {
        member: witness_failures.is_empty(),
        witness_failures,
    })
}

/// Hot-path form of the criterion for a precomputed canopy; the canopy
/// depends only on `w`, so graph enumeration loops hoist it.
#[inline]
pub fn membership_holds(graph: &OrderedGraph, canopy: &CanopyData) -> bool {
    debug_assert_eq!(graph.n(), canopy.n());
    (1..=graph.n()).all(|t| vertex_criterion_holds(graph, canopy, t))
}

#[inline]
fn vertex_criterion_holds(graph: &OrderedGraph, canopy: &CanopyData, t: usize) -> bool {
    let lambda = canopy.lambda(t);
    canopy.rho(t).iter().any(|&s| graph.has_edge(lambda, s))
}

/// Materializes `D(G)` in enumeration order. Refuses vertex counts above
/// [`DEFAULT_DSET_LIMIT`]; use [`derangement_set_with_limit`] to override.
pub fn derangement_set(graph: &OrderedGraph) -> Result<Vec<Derangement>, DsetError> {
    derangement_set_with_limit(graph, DEFAULT_DSET_LIMIT)
}

pub fn derangement_set_with_limit(
    graph: &OrderedGraph,
    limit: usize,
) -> Result<Vec<Derangement>, DsetError> {
    let n = graph.n();
    if n > limit {
        return Err(DsetError::LimitExceeded { n, limit });
    }
    Ok(crate::perm::derangements(n)
        .filter(|d| membership_holds(graph, &canopy(d)))
        .collect())
}

/// The edge-requirement set `E_{w,t}`: pairs `{lambda_w(t), s}` over
/// `s in rho_w(t)`, with the degenerate pair `{t, t}` dropped when `t` is
/// minimal in its cycle (a simple graph cannot contain it).
pub fn edge_requirement(w: &Derangement, t: usize) -> Result<EdgeSet, DsetError> {
    let n = w.n();
    if t == 0 || t > n {
        return Err(GraphError::VertexOutOfRange { vertex: t, n }.into());
    }
    let canopy = canopy(w);
    let lambda = canopy.lambda(t);
    let pairs: Vec<(usize, usize)> = canopy
        .rho(t)
        .iter()
        .filter(|&&s| s != lambda)
        .map(|&s| (lambda, s))
        .collect();
    Ok(EdgeSet::from_pairs(n, &pairs)?)
}

/// The vertices not minimal in their cycles, `U(w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMinSet {
    perm: Derangement,
    elements: Vec<usize>,
}

impl NonMinSet {
    pub fn perm(&self) -> &Derangement {
        &self.perm
    }

    /// Ascending list of the non-minimal vertices.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.elements.binary_search(&t).is_ok()
    }
}

pub fn non_min_elements(w: &Derangement) -> NonMinSet {
    let mut elements: Vec<usize> = w
        .cycles()
        .iter()
        .flat_map(|cycle| cycle[1..].iter().copied())
        .collect();
    elements.sort_unstable();
    NonMinSet {
        perm: w.clone(),
        elements,
    }
}

/// Membership stated through the edge-requirement sets: `w` is in `D(G)` iff
/// the edge set of `G` meets `E_{w,t}` for every vertex `t`. Cross-validates
/// [`check_membership`].
pub fn membership_via_requirements(
    graph: &OrderedGraph,
    w: &Derangement,
) -> Result<bool, DsetError> {
    check_sizes(graph, w)?;
    let edges = graph.edge_set();
    for t in 1..=graph.n() {
        if !edges.intersects(&edge_requirement(w, t)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_sizes(graph: &OrderedGraph, w: &Permutation) -> Result<(), DsetError> {
    if graph.n() != w.n() {
        return Err(DsetError::SizeMismatch {
            graph_n: graph.n(),
            perm_n: w.n(),
        });
    }
    Ok(())
}
