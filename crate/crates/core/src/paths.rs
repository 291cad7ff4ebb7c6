//! Bounded-length simple-path counting and exact maximum internally
//! node-disjoint path search between a vertex pair.
//!
//! The disjoint-path maximization is solved exactly by exhaustive search:
//! enumerate every simple path of length at most `max_len` between the
//! endpoints (neighbors explored in ascending vertex id, so the result is
//! deterministic), then branch-and-bound over interior-disjoint subsets.
//! A search-node budget guards against blowup; exhaustion is a hard error,
//! never a silent wrong answer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default search budget for [`max_disjoint_paths`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Witness for a set of internally node-disjoint paths between two
/// endpoints. Produced by [`max_disjoint_paths`], checked by
/// [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCertificate {
    pub endpoint_a: usize,
    pub endpoint_b: usize,
    /// Each path is a full vertex sequence from `endpoint_a` to `endpoint_b`.
    pub paths: Vec<Vec<usize>>,
}

/// Why a certificate failed verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateViolation {
    TooFewPaths,
    WrongEndpoints,
    VertexOutOfRange,
    MissingEdge,
    PathTooLong,
    RepeatedVertexInPath,
    EndpointInInterior,
    InteriorOverlap,
}

/// Counts simple paths from `a` to `b` with at most `max_len` edges
/// (`None` = unbounded). Exhaustive DFS; intended for desk scale.
pub fn count_simple_paths(g: &Graph, a: usize, b: usize, max_len: Option<usize>) -> Result<u64> {
    check_endpoints(g, a, b)?;
    let adj = g.adjacency();
    let mut visited = vec![false; g.num_vertices()];
    visited[a] = true;
    let mut count = 0u64;
    dfs_count(&adj, a, b, max_len, 0, &mut visited, &mut count);
    Ok(count)
}

fn dfs_count(
    adj: &[Vec<usize>],
    u: usize,
    b: usize,
    max_len: Option<usize>,
    depth: usize,
    visited: &mut [bool],
    count: &mut u64,
) {
    if let Some(cap) = max_len {
        if depth >= cap {
            return;
        }
    }
    for &v in &adj[u] {
        if v == b {
            *count += 1;
            continue;
        }
        if !visited[v] {
            visited[v] = true;
            dfs_count(adj, v, b, max_len, depth + 1, visited, count);
            visited[v] = false;
        }
    }
}

/// Exact maximum number of internally node-disjoint `a`-`b` paths, each of
/// at most `max_len` edges, plus a witnessing certificate.
///
/// Endpoints are shared; interiors must be pairwise disjoint and exclude
/// the endpoints. Uses [`DEFAULT_SEARCH_BUDGET`] search nodes.
pub fn max_disjoint_paths(
    g: &Graph,
    a: usize,
    b: usize,
    max_len: usize,
) -> Result<(usize, PathCertificate)> {
    max_disjoint_paths_with_budget(g, a, b, max_len, DEFAULT_SEARCH_BUDGET)
}

pub fn max_disjoint_paths_with_budget(
    g: &Graph,
    a: usize,
    b: usize,
    max_len: usize,
    budget: u64,
) -> Result<(usize, PathCertificate)> {
    check_endpoints(g, a, b)?;
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be positive".into()));
    }
    if g.num_vertices() > 128 {
        return Err(Error::Capacity(format!(
            "disjoint-path search supports at most 128 vertices, got {}",
            g.num_vertices()
        )));
    }

    let adj = g.adjacency();
    let mut nodes_left = SearchBudget {
        left: budget,
        total: budget,
    };

    // Phase 1: enumerate all candidate paths in deterministic DFS order,
    // recording each path's interior as a bitmask.
    let mut paths: Vec<(u128, Vec<usize>)> = Vec::new();
    let mut stack = vec![a];
    let mut visited = vec![false; g.num_vertices()];
    visited[a] = true;
    enumerate_paths(
        &adj,
        a,
        b,
        max_len,
        &mut stack,
        &mut visited,
        &mut paths,
        &mut nodes_left,
    )?;

    // Phase 2: branch and bound for a maximum interior-disjoint subset.
    // Paths are in enumeration order; the first optimum found is kept, so
    // the certificate is deterministic.
    let masks: Vec<u128> = paths.iter().map(|(m, _)| *m).collect();
    let mut best: Vec<usize> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    pack(&masks, 0, 0u128, &mut chosen, &mut best, &mut nodes_left)?;

    let certificate = PathCertificate {
        endpoint_a: a,
        endpoint_b: b,
        paths: best.iter().map(|&i| paths[i].1.clone()).collect(),
    };
    Ok((certificate.paths.len(), certificate))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_paths(
    adj: &[Vec<usize>],
    u: usize,
    b: usize,
    max_len: usize,
    stack: &mut Vec<usize>,
    visited: &mut [bool],
    paths: &mut Vec<(u128, Vec<usize>)>,
    nodes_left: &mut SearchBudget,
) -> Result<()> {
    spend(nodes_left, 1)?;
    if stack.len() > max_len {
        return Ok(());
    }
    for &v in &adj[u] {
        if v == b {
            let mut path = stack.clone();
            path.push(b);
            let interior: u128 = path[1..path.len() - 1]
                .iter()
                .fold(0u128, |m, &w| m | (1u128 << w));
            paths.push((interior, path));
            continue;
        }
        if !visited[v] {
            visited[v] = true;
            stack.push(v);
            enumerate_paths(adj, v, b, max_len, stack, visited, paths, nodes_left)?;
            stack.pop();
            visited[v] = false;
        }
    }
    Ok(())
}

fn pack(
    masks: &[u128],
    from: usize,
    used: u128,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
    nodes_left: &mut SearchBudget,
) -> Result<()> {
    spend(nodes_left, 1)?;
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    // Even taking every remaining path cannot beat the incumbent.
    if chosen.len() + (masks.len() - from) <= best.len() {
        return Ok(());
    }
    for i in from..masks.len() {
        if masks[i] & used == 0 {
            chosen.push(i);
            pack(masks, i + 1, used | masks[i], chosen, best, nodes_left)?;
            chosen.pop();
        }
    }
    Ok(())
}

struct SearchBudget {
    left: u64,
    total: u64,
}

fn spend(budget: &mut SearchBudget, cost: u64) -> Result<()> {
    if budget.left < cost {
        return Err(Error::BudgetExhausted(budget.total));
    }
    budget.left -= cost;
    Ok(())
}

fn check_endpoints(g: &Graph, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::InvalidArgument(format!("endpoints coincide: {a}")));
    }
    if a >= g.num_vertices() || b >= g.num_vertices() {
        return Err(Error::InvalidArgument(format!(
            "endpoint out of range: ({a},{b}) on {} vertices",
            g.num_vertices()
        )));
    }
    Ok(())
}

/// Checks that `cert` witnesses at least `d` internally disjoint `a`-`b`
/// paths in `g`, each of at most `l` edges. Returns `Ok(())` when valid,
/// otherwise the first violation found.
pub fn verify_certificate(
    g: &Graph,
    cert: &PathCertificate,
    l: usize,
    d: usize,
) -> std::result::Result<(), CertificateViolation> {
    if cert.paths.len() < d {
        return Err(CertificateViolation::TooFewPaths);
    }
    let mut seen_interior = vec![false; g.num_vertices()];
    for path in &cert.paths {
        if path.len() < 2 {
            return Err(CertificateViolation::WrongEndpoints);
        }
        if path[0] != cert.endpoint_a || *path.last().unwrap() != cert.endpoint_b {
            return Err(CertificateViolation::WrongEndpoints);
        }
        if path.len() - 1 > l {
            return Err(CertificateViolation::PathTooLong);
        }
        let mut in_path = vec![false; g.num_vertices()];
        for &v in path {
            if v >= g.num_vertices() {
                return Err(CertificateViolation::VertexOutOfRange);
            }
            if in_path[v] {
                return Err(CertificateViolation::RepeatedVertexInPath);
            }
            in_path[v] = true;
        }
        for w in path.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(CertificateViolation::MissingEdge);
            }
        }
        for &v in &path[1..path.len() - 1] {
            if v == cert.endpoint_a || v == cert.endpoint_b {
                return Err(CertificateViolation::EndpointInInterior);
            }
            if seen_interior[v] {
                return Err(CertificateViolation::InteriorOverlap);
            }
            seen_interior[v] = true;
        }
    }
    Ok(())
}

/// Convenience wrapper returning a plain boolean.
pub fn certificate_is_valid(g: &Graph, cert: &PathCertificate, l: usize, d: usize) -> bool {
    verify_certificate(g, cert, l, d).is_ok()
}
