//! Hard-instance families: a center graph plus a list of hypothesis graphs
//! within a certified KL radius, one builder per graph class.
//!
//! Vertex labeling is deterministic: blocks occupy consecutive vertex
//! ranges starting at 0; within a block the endpoints come first, then
//! common neighbors, then path interiors. Vertices left over when p is not
//! a multiple of the block size stay isolated and are flagged.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::{kl_exact_with_caps, Caps, IsingModel};
use crate::paths::{count_simple_paths, max_disjoint_paths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    PathRestricted,
    PathLength,
    Girth,
    Dregular,
    EdgeBounded,
}

/// Which family is built from the center: one graph per removed
/// well-connected edge, or one per removed edge of any kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Connectivity,
    Hamming1,
}

/// Echoed construction parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub girth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_budget: Option<usize>,
    /// Number of disjoint blocks (or cliques) placed.
    pub blocks: usize,
    /// Per-block path count k where the construction uses one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths_per_block: Option<usize>,
    /// Vertices left isolated because p is not a block-size multiple.
    pub leftover_vertices: usize,
}

/// Center graph, hypothesis family, and certified KL radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardEnsemble {
    pub center: Graph,
    pub members: Vec<Graph>,
    /// Certified KL radius in nats (from the matching closed form, not
    /// from exact inference).
    pub rho: f64,
    pub lambda: f64,
    pub class_tag: ClassTag,
    pub kind: EnsembleKind,
    pub params: EnsembleParams,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Path-restricted family: blocks of eta + 1 vertices, each an (s,t) edge
/// plus eta - 1 common neighbors, giving exactly eta simple s-t paths.
pub fn build_path_restricted(
    p: usize,
    eta: usize,
    lambda: f64,
    kind: EnsembleKind,
) -> Result<HardEnsemble> {
    check_lambda(lambda)?;
    if eta < 1 {
        return Err(Error::InvalidArgument("eta must be at least 1".into()));
    }
    let block_size = eta + 1;
    let alpha = p / block_size;
    if alpha < 1 {
        return Err(Error::Infeasible(format!(
            "p = {p} cannot fit one block of {block_size} vertices"
        )));
    }

    let mut edges = Vec::new();
    let mut block_edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut main_edges: Vec<(usize, usize)> = Vec::new();
    for b in 0..alpha {
        let base = b * block_size;
        let (s, t) = (base, base + 1);
        let mut this_block = vec![(s, t)];
        for w in (base + 2)..(base + block_size) {
            this_block.push((s, w));
            this_block.push((t, w));
        }
        main_edges.push((s, t));
        edges.extend_from_slice(&this_block);
        block_edges.push(this_block);
    }
    let center = Graph::new(p, edges)?;

    let (members, rho) = match kind {
        EnsembleKind::Connectivity => {
            let members: Result<Vec<Graph>> = main_edges
                .iter()
                .map(|&(s, t)| center.without_edge(s, t))
                .collect();
            (members?, bounds::kl_upper_bound_ld(lambda, 2, eta - 1, 1)?)
        }
        EnsembleKind::Hamming1 => {
            let members: Result<Vec<Graph>> = block_edges
                .iter()
                .flatten()
                .map(|&(u, v)| center.without_edge(u, v))
                .collect();
            (members?, bounds::kl_upper_bound_hamming1(lambda)?)
        }
    };

    Ok(HardEnsemble {
        center,
        members,
        rho,
        lambda,
        class_tag: ClassTag::PathRestricted,
        kind,
        params: EnsembleParams {
            p,
            eta: Some(eta),
            blocks: alpha,
            leftover_vertices: p - alpha * block_size,
            ..Default::default()
        },
    })
}

/// Path-length family: each block is an (s,t) edge, eta - 1 common
/// neighbors, and k extra vertex-disjoint (gamma+1)-length paths, with
/// k = floor((p^(1-nu) - (eta+1)) / gamma) and floor(p^nu) blocks.
pub fn build_path_length(
    p: usize,
    eta: usize,
    gamma: usize,
    nu: f64,
    lambda: f64,
    kind: EnsembleKind,
) -> Result<HardEnsemble> {
    check_lambda(lambda)?;
    if eta < 1 || gamma < 1 {
        return Err(Error::InvalidArgument("eta and gamma must be at least 1".into()));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!("nu must lie in (0,1), got {nu}")));
    }
    let pf = p as f64;
    let t_nu = (pf.powf(1.0 - nu) - (eta as f64 + 1.0)) / gamma as f64;
    let k = t_nu.floor() as usize;
    if k < 1 {
        return Err(Error::Infeasible(format!(
            "t_nu = {t_nu:.4} < 1; need p^(1-nu) >= eta + 1 + gamma"
        )));
    }
    let alpha = pf.powf(nu).floor() as usize;
    let block_size = k * gamma + eta + 1;
    if alpha * block_size > p {
        return Err(Error::Infeasible(format!(
            "alpha * block size = {alpha} * {block_size} exceeds p = {p}"
        )));
    }

    let mut edges = Vec::new();
    let mut block_edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut main_edges: Vec<(usize, usize)> = Vec::new();
    for b in 0..alpha {
        let base = b * block_size;
        let (s, t) = (base, base + 1);
        let mut this_block = vec![(s, t)];
        for w in (base + 2)..(base + eta + 1) {
            this_block.push((s, w));
            this_block.push((t, w));
        }
        // k long paths, gamma interior vertices each
        let interiors_base = base + eta + 1;
        for path in 0..k {
            let first = interiors_base + path * gamma;
            let mut prev = s;
            for step in 0..gamma {
                this_block.push((prev, first + step));
                prev = first + step;
            }
            this_block.push((prev, t));
        }
        main_edges.push((s, t));
        edges.extend_from_slice(&this_block);
        block_edges.push(this_block);
    }
    let center = Graph::new(p, edges)?;

    let (members, rho) = match kind {
        EnsembleKind::Connectivity => {
            let members: Result<Vec<Graph>> = main_edges
                .iter()
                .map(|&(s, t)| center.without_edge(s, t))
                .collect();
            // combined radius: eta - 1 short paths and k long paths
            let t = lambda.tanh();
            let log_big = crate::numerics::log_add_exp(
                0.0,
                (eta as f64 - 1.0) * (2.0 * lambda).cosh().ln()
                    + k as f64
                        * ((t.powi(gamma as i32 + 1)).ln_1p()
                            - (-t.powi(gamma as i32 + 1)).ln_1p()),
            );
            let rho = 2.0 * lambda * (-log_big).exp();
            (members?, rho)
        }
        EnsembleKind::Hamming1 => {
            let members: Result<Vec<Graph>> = block_edges
                .iter()
                .flatten()
                .map(|&(u, v)| center.without_edge(u, v))
                .collect();
            (members?, bounds::kl_upper_bound_hamming1(lambda)?)
        }
    };

    Ok(HardEnsemble {
        center,
        members,
        rho,
        lambda,
        class_tag: ClassTag::PathLength,
        kind,
        params: EnsembleParams {
            p,
            eta: Some(eta),
            gamma: Some(gamma),
            nu: Some(nu),
            blocks: alpha,
            paths_per_block: Some(k),
            leftover_vertices: p - alpha * block_size,
            ..Default::default()
        },
    })
}

/// Girth family: each block is an (s,t) edge plus k vertex-disjoint
/// (g-1)-length paths, k = min(d, floor(p^(1-nu)/g)), floor(p^nu) blocks.
pub fn build_girth(
    p: usize,
    g: usize,
    d: usize,
    nu: f64,
    lambda: f64,
    kind: EnsembleKind,
) -> Result<HardEnsemble> {
    check_lambda(lambda)?;
    if g < 3 {
        return Err(Error::InvalidArgument(format!("girth must be at least 3, got {g}")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!("nu must lie in (0,1), got {nu}")));
    }
    let pf = p as f64;
    let k = d.min((pf.powf(1.0 - nu) / g as f64).floor() as usize);
    if k < 1 {
        return Err(Error::Infeasible(format!(
            "d_nu = min(d, p^(1-nu)/g) < 1 at p = {p}, g = {g}, nu = {nu}"
        )));
    }
    let alpha = pf.powf(nu).floor() as usize;
    let block_size = k * (g - 2) + 2;
    if alpha * block_size > p {
        return Err(Error::Infeasible(format!(
            "alpha * block size = {alpha} * {block_size} exceeds p = {p}"
        )));
    }

    let mut edges = Vec::new();
    let mut block_edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut main_edges: Vec<(usize, usize)> = Vec::new();
    for b in 0..alpha {
        let base = b * block_size;
        let (s, t) = (base, base + 1);
        let mut this_block = vec![(s, t)];
        let interiors_base = base + 2;
        for path in 0..k {
            let first = interiors_base + path * (g - 2);
            let mut prev = s;
            for step in 0..(g - 2) {
                this_block.push((prev, first + step));
                prev = first + step;
            }
            this_block.push((prev, t));
        }
        main_edges.push((s, t));
        edges.extend_from_slice(&this_block);
        block_edges.push(this_block);
    }
    let center = Graph::new(p, edges)?;

    let (members, rho) = match kind {
        EnsembleKind::Connectivity => {
            let members: Result<Vec<Graph>> = main_edges
                .iter()
                .map(|&(s, t)| center.without_edge(s, t))
                .collect();
            (members?, bounds::kl_upper_bound_ld(lambda, g - 1, k, 1)?)
        }
        EnsembleKind::Hamming1 => {
            let members: Result<Vec<Graph>> = block_edges
                .iter()
                .flatten()
                .map(|&(u, v)| center.without_edge(u, v))
                .collect();
            (members?, bounds::kl_upper_bound_hamming1(lambda)?)
        }
    };

    Ok(HardEnsemble {
        center,
        members,
        rho,
        lambda,
        class_tag: ClassTag::Girth,
        kind,
        params: EnsembleParams {
            p,
            girth: Some(g),
            degree: Some(d),
            nu: Some(nu),
            blocks: alpha,
            paths_per_block: Some(k),
            leftover_vertices: p - alpha * block_size,
            ..Default::default()
        },
    })
}

/// Approximately d-regular family: disjoint (d+1)-cliques, members are all
/// single-edge removals.
pub fn build_dregular(p: usize, d: usize, lambda: f64) -> Result<HardEnsemble> {
    check_lambda(lambda)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if d + 1 > p {
        return Err(Error::Infeasible(format!("d + 1 = {} exceeds p = {p}", d + 1)));
    }
    let block_size = d + 1;
    let groups = p / block_size;
    let mut edges = Vec::new();
    for b in 0..groups {
        let base = b * block_size;
        for u in base..(base + block_size) {
            for v in (u + 1)..(base + block_size) {
                edges.push((u, v));
            }
        }
    }
    let center = Graph::new(p, edges.clone())?;
    let members: Result<Vec<Graph>> = edges
        .iter()
        .map(|&(u, v)| center.without_edge(u, v))
        .collect();
    let df = d as f64;
    let clique_branch = 2.0 * lambda * df * (lambda - lambda * df).exp();
    let rho = clique_branch.min(bounds::kl_upper_bound_hamming1(lambda)?);
    Ok(HardEnsemble {
        center,
        members: members?,
        rho,
        lambda,
        class_tag: ClassTag::Dregular,
        kind: EnsembleKind::Hamming1,
        params: EnsembleParams {
            p,
            degree: Some(d),
            blocks: groups,
            leftover_vertices: p - groups * block_size,
            ..Default::default()
        },
    })
}

/// Edge-bounded family: a single clique on the largest m with
/// C(m,2) <= k, members are all single-edge removals.
pub fn build_edge_bounded(p: usize, k: usize, lambda: f64) -> Result<HardEnsemble> {
    check_lambda(lambda)?;
    if k < 9 {
        return Err(Error::InvalidArgument(format!(
            "theorem hypothesis requires k >= 9, got {k}"
        )));
    }
    let m = bounds::largest_clique_order(k);
    if m < 3 {
        return Err(Error::Infeasible(format!("clique order m = {m} < 3")));
    }
    if m > p {
        return Err(Error::Infeasible(format!("clique order m = {m} exceeds p = {p}")));
    }
    let mut edges = Vec::new();
    for u in 0..m {
        for v in (u + 1)..m {
            edges.push((u, v));
        }
    }
    let center = Graph::new(p, edges.clone())?;
    let members: Result<Vec<Graph>> = edges
        .iter()
        .map(|&(u, v)| center.without_edge(u, v))
        .collect();
    let sq = (2.0 * k as f64).sqrt();
    let clique_branch = 2.0 * lambda * (sq + 1.0) * (lambda - lambda * (sq - 1.0)).exp();
    let rho = clique_branch.min(bounds::kl_upper_bound_hamming1(lambda)?);
    Ok(HardEnsemble {
        center,
        members: members?,
        rho,
        lambda,
        class_tag: ClassTag::EdgeBounded,
        kind: EnsembleKind::Hamming1,
        params: EnsembleParams {
            p,
            edge_budget: Some(k),
            blocks: 1,
            paths_per_block: None,
            leftover_vertices: p - m,
            ..Default::default()
        },
    })
}

/// The closed-form family size the construction promises.
pub fn expected_member_count(e: &HardEnsemble) -> usize {
    let pm = &e.params;
    match (e.class_tag, e.kind) {
        (ClassTag::PathRestricted, EnsembleKind::Connectivity) => pm.blocks,
        (ClassTag::PathRestricted, EnsembleKind::Hamming1) => {
            pm.blocks * (2 * pm.eta.unwrap() - 1)
        }
        (ClassTag::PathLength, EnsembleKind::Connectivity) => pm.blocks,
        (ClassTag::PathLength, EnsembleKind::Hamming1) => {
            let k = pm.paths_per_block.unwrap();
            let gamma = pm.gamma.unwrap();
            pm.blocks * (k * (gamma + 1) + 2 * pm.eta.unwrap() - 1)
        }
        (ClassTag::Girth, EnsembleKind::Connectivity) => pm.blocks,
        (ClassTag::Girth, EnsembleKind::Hamming1) => {
            let k = pm.paths_per_block.unwrap();
            pm.blocks * (k * (pm.girth.unwrap() - 1) + 1)
        }
        (ClassTag::Dregular, _) => {
            let d = pm.degree.unwrap();
            pm.blocks * (d + 1) * d / 2
        }
        (ClassTag::EdgeBounded, _) => {
            let m = bounds::largest_clique_order(pm.edge_budget.unwrap());
            m * (m - 1) / 2
        }
    }
}

/// One validation finding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub member: Option<usize>,
    pub message: String,
}

/// Mechanized audit of everything the construction asserts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks_run: usize,
    pub kl_checked: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks distinctness, Hamming/connectivity structure, per-class
/// membership invariants, and (when p fits the enumeration cap) exact KL
/// dominance of every member against the certified radius.
pub fn validate_ensemble(e: &HardEnsemble) -> ValidationReport {
    let mut violations = Vec::new();
    let mut checks = 0usize;

    let push = |member: Option<usize>, message: String, violations: &mut Vec<Violation>| {
        violations.push(Violation { member, message });
    };

    // counts
    checks += 1;
    let expected = expected_member_count(e);
    if e.members.len() != expected {
        push(
            None,
            format!("|T| = {} but closed form gives {expected}", e.members.len()),
            &mut violations,
        );
    }

    // distinctness
    checks += 1;
    for (i, m) in e.members.iter().enumerate() {
        if m == &e.center {
            push(Some(i), "member equals center".into(), &mut violations);
        }
        for (j, m2) in e.members.iter().enumerate().skip(i + 1) {
            if m == m2 {
                push(Some(i), format!("member duplicates member {j}"), &mut violations);
            }
        }
    }

    // structural relation to the center
    for (i, m) in e.members.iter().enumerate() {
        checks += 1;
        match m.hamming_distance(&e.center) {
            Ok(h) => {
                if h != 1 {
                    push(
                        Some(i),
                        format!("member is at Hamming distance {h} from center, expected 1"),
                        &mut violations,
                    );
                }
            }
            Err(err) => push(Some(i), format!("hamming check failed: {err}"), &mut violations),
        }
    }

    class_checks(e, &mut checks, &mut violations);

    // exact KL dominance at desk scale
    let kl_checked = e.center.num_vertices() <= 12;
    if kl_checked {
        let caps = Caps::from_env();
        for (i, m) in e.members.iter().enumerate() {
            checks += 1;
            let member_model = IsingModel::new(m.clone(), e.lambda).unwrap();
            let center_model = IsingModel::new(e.center.clone(), e.lambda).unwrap();
            match kl_exact_with_caps(&member_model, &center_model, caps) {
                Ok(kl) => {
                    if kl > e.rho + 1e-9 {
                        push(
                            Some(i),
                            format!("exact KL {kl:.6e} exceeds certified rho {:.6e}", e.rho),
                            &mut violations,
                        );
                    }
                }
                Err(err) => push(Some(i), format!("KL check failed: {err}"), &mut violations),
            }
        }
    }

    ValidationReport {
        checks_run: checks,
        kl_checked,
        violations,
    }
}

fn class_checks(e: &HardEnsemble, checks: &mut usize, violations: &mut Vec<Violation>) {
    let pm = &e.params;
    match e.class_tag {
        ClassTag::PathRestricted => {
            let eta = pm.eta.unwrap();
            for (i, m) in e.members.iter().enumerate() {
                *checks += 1;
                if let Some(msg) = max_pairwise_paths_exceeds(m, None, eta) {
                    violations.push(Violation {
                        member: Some(i),
                        message: format!("class membership: {msg}"),
                    });
                }
            }
            if e.kind == EnsembleKind::Connectivity {
                for (i, m) in e.members.iter().enumerate() {
                    *checks += 1;
                    let (s, t) = modified_pair(m, &e.center);
                    match max_disjoint_paths(m, s, t, 2) {
                        Ok((d, _)) => {
                            if d < eta - 1 {
                                violations.push(Violation {
                                    member: Some(i),
                                    message: format!(
                                        "modified pair only (2,{d})-connected, expected (2,{})",
                                        eta - 1
                                    ),
                                });
                            }
                        }
                        Err(err) => violations.push(Violation {
                            member: Some(i),
                            message: format!("connectivity check failed: {err}"),
                        }),
                    }
                }
            }
        }
        ClassTag::PathLength => {
            let eta = pm.eta.unwrap();
            let gamma = pm.gamma.unwrap();
            for (i, m) in e.members.iter().enumerate() {
                *checks += 1;
                if let Some(msg) = max_pairwise_paths_exceeds(m, Some(gamma), eta) {
                    violations.push(Violation {
                        member: Some(i),
                        message: format!("class membership: {msg}"),
                    });
                }
            }
            // center block endpoints have exactly eta short paths
            *checks += 1;
            let block_size = pm.paths_per_block.unwrap() * gamma + eta + 1;
            for b in 0..pm.blocks {
                let s = b * block_size;
                let t = s + 1;
                match count_simple_paths(&e.center, s, t, Some(gamma)) {
                    Ok(c) => {
                        if c != eta as u64 {
                            violations.push(Violation {
                                member: None,
                                message: format!(
                                    "center block {b}: {c} short paths between endpoints, expected {eta}"
                                ),
                            });
                        }
                    }
                    Err(err) => violations.push(Violation {
                        member: None,
                        message: format!("path count failed: {err}"),
                    }),
                }
            }
        }
        ClassTag::Girth => {
            let g = pm.girth.unwrap();
            let d = pm.degree.unwrap();
            for (i, m) in e.members.iter().enumerate() {
                *checks += 1;
                if let Some(found) = m.girth() {
                    if found < g {
                        violations.push(Violation {
                            member: Some(i),
                            message: format!("girth {found} below required {g}"),
                        });
                    }
                }
                *checks += 1;
                let md = m.max_degree();
                if md > d {
                    violations.push(Violation {
                        member: Some(i),
                        message: format!("max degree {md} exceeds bound {d}"),
                    });
                }
            }
        }
        ClassTag::Dregular => {
            let d = pm.degree.unwrap();
            for (i, m) in e.members.iter().enumerate() {
                *checks += 1;
                let mut off = 0usize;
                for v in 0..m.num_vertices() {
                    let deg = m.degree(v);
                    if deg == 0 {
                        continue; // leftover isolated vertex
                    }
                    if deg != d && deg != d - 1 {
                        violations.push(Violation {
                            member: Some(i),
                            message: format!("vertex {v} has degree {deg}, expected {d} or {}", d - 1),
                        });
                    }
                    if deg == d - 1 {
                        off += 1;
                    }
                }
                if off != 2 {
                    violations.push(Violation {
                        member: Some(i),
                        message: format!("{off} vertices of degree d-1, expected exactly 2"),
                    });
                }
            }
        }
        ClassTag::EdgeBounded => {
            let k = pm.edge_budget.unwrap();
            for (i, m) in e.members.iter().enumerate() {
                *checks += 1;
                let edges = m.num_edges();
                if edges * 2 < k || edges > k {
                    violations.push(Violation {
                        member: Some(i),
                        message: format!("edge count {edges} outside [{}, {k}]", k.div_ceil(2)),
                    });
                }
            }
        }
    }
}

/// Returns a message if any vertex pair admits more than `limit` mutually
/// node-disjoint paths of length <= max_len (None = unbounded). The class
/// definitions count disjoint paths: the block construction itself has
/// common-neighbor pairs whose plain simple-path count exceeds eta once
/// eta >= 3, so the disjoint reading is the one the constructions satisfy.
fn max_pairwise_paths_exceeds(g: &Graph, max_len: Option<usize>, limit: usize) -> Option<String> {
    let cap = max_len.unwrap_or_else(|| g.num_vertices().saturating_sub(1).max(1));
    for a in 0..g.num_vertices() {
        for b in (a + 1)..g.num_vertices() {
            match max_disjoint_paths(g, a, b, cap) {
                Ok((count, _)) => {
                    if count > limit {
                        return Some(format!(
                            "pair ({a},{b}) has {count} disjoint paths, limit {limit}"
                        ));
                    }
                }
                Err(err) => return Some(format!("path search failed at ({a},{b}): {err}")),
            }
        }
    }
    None
}

/// The single differing edge of a Hamming-1 member.
fn modified_pair(member: &Graph, center: &Graph) -> (usize, usize) {
    for &(u, v) in center.edges() {
        if !member.has_edge(u, v) {
            return (u, v);
        }
    }
    for &(u, v) in member.edges() {
        if !center.has_edge(u, v) {
            return (u, v);
        }
    }
    (0, 1)
}

/// Directory layout: center.edgelist, member_<i>.edgelist, manifest.json.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    class_tag: ClassTag,
    kind: EnsembleKind,
    rho: f64,
    lambda: f64,
    params: EnsembleParams,
    member_count: usize,
}

pub fn write_ensemble_dir(e: &HardEnsemble, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("center.edgelist"), e.center.to_edgelist())?;
    for (i, m) in e.members.iter().enumerate() {
        fs::write(dir.join(format!("member_{i}.edgelist")), m.to_edgelist())?;
    }
    let manifest = Manifest {
        class_tag: e.class_tag,
        kind: e.kind,
        rho: e.rho,
        lambda: e.lambda,
        params: e.params.clone(),
        member_count: e.members.len(),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

pub fn read_ensemble_dir(dir: &Path) -> Result<HardEnsemble> {
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let center = Graph::parse(&fs::read_to_string(dir.join("center.edgelist"))?)?;
    let mut members = Vec::with_capacity(manifest.member_count);
    for i in 0..manifest.member_count {
        let path = dir.join(format!("member_{i}.edgelist"));
        members.push(Graph::parse(&fs::read_to_string(path)?)?);
    }
    Ok(HardEnsemble {
        center,
        members,
        rho: manifest.rho,
        lambda: manifest.lambda,
        class_tag: manifest.class_tag,
        kind: manifest.kind,
        params: manifest.params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_restricted_counts() {
        let e = build_path_restricted(10, 4, 0.5, EnsembleKind::Connectivity).unwrap();
        assert_eq!(e.params.blocks, 2);
        assert_eq!(e.members.len(), 2);
        let e = build_path_restricted(10, 4, 0.5, EnsembleKind::Hamming1).unwrap();
        assert_eq!(e.members.len(), 14);
        assert!((e.rho - 0.5 * 0.5f64.tanh()).abs() < 1e-12);
    }

    #[test]
    fn path_restricted_connectivity_certified() {
        let e = build_path_restricted(10, 4, 0.5, EnsembleKind::Connectivity).unwrap();
        for m in &e.members {
            let (s, t) = modified_pair(m, &e.center);
            let (d, _) = max_disjoint_paths(m, s, t, 2).unwrap();
            assert_eq!(d, 3);
        }
    }

    #[test]
    fn path_length_block_shape() {
        let e = build_path_length(14, 2, 2, 0.3, 0.4, EnsembleKind::Connectivity).unwrap();
        // alpha = floor(14^0.3) = 2, k = floor((14^0.7 - 3)/2) = 1
        assert_eq!(e.params.blocks, 2);
        assert_eq!(e.params.paths_per_block, Some(1));
        // block: k*gamma + eta + 1 = 5 nodes, k(gamma+1) + 2 eta - 1 = 6 edges
        assert_eq!(e.center.num_edges(), 2 * 6);
        // endpoints have exactly eta = 2 paths of length <= gamma
        assert_eq!(count_simple_paths(&e.center, 0, 1, Some(2)).unwrap(), 2);
        let h = build_path_length(14, 2, 2, 0.3, 0.4, EnsembleKind::Hamming1).unwrap();
        assert_eq!(h.members.len(), 2 * 6);
    }

    #[test]
    fn girth_block_shape() {
        let e = build_girth(14, 4, 3, 0.3, 0.4, EnsembleKind::Connectivity).unwrap();
        assert_eq!(e.params.blocks, 2);
        assert_eq!(e.params.paths_per_block, Some(1));
        assert_eq!(e.center.girth(), Some(4));
        // member with the direct edge removed: block cycle opens up
        let member = &e.members[0];
        assert!(member.girth().map_or(true, |g| g >= 4));
    }

    #[test]
    fn girth_member_cycle_doubles() {
        // single block so removal leaves a forest; with two paths the
        // removed-edge block has girth 2(g-1)
        let e = build_girth(14, 4, 2, 0.2, 0.4, EnsembleKind::Connectivity).unwrap();
        assert_eq!(e.params.paths_per_block, Some(2));
        assert_eq!(e.center.girth(), Some(4));
        let member = &e.members[0];
        assert_eq!(member.girth(), Some(6));
    }

    #[test]
    fn dregular_counts() {
        let e = build_dregular(12, 3, 0.1).unwrap();
        assert_eq!(e.params.blocks, 3);
        assert_eq!(e.members.len(), 18);
        assert!(e.members.len() >= 12 * 3 / 4);
        // rho at lambda = 0.1, d = 3: hamming branch wins
        let clique_branch = 2.0 * 0.1 * 3.0 * (0.1f64 - 0.3).exp();
        let hamming = 0.1 * 0.1f64.tanh();
        assert!(hamming < clique_branch);
        assert!((e.rho - hamming).abs() < 1e-15);
    }

    #[test]
    fn edge_bounded_counts() {
        let e = build_edge_bounded(8, 10, 0.3).unwrap();
        // m = 5, C(5,2) = 10 members of 9 edges each
        assert_eq!(e.members.len(), 10);
        for m in &e.members {
            assert_eq!(m.num_edges(), 9);
        }
        let e9 = build_edge_bounded(8, 9, 0.3).unwrap();
        assert_eq!(e9.members.len(), 6); // m = 4
        assert!(build_edge_bounded(8, 8, 0.3).is_err());
    }

    #[test]
    fn validation_clean_on_fresh_ensembles() {
        let ensembles = vec![
            build_path_restricted(10, 4, 0.5, EnsembleKind::Connectivity).unwrap(),
            build_path_restricted(10, 4, 0.5, EnsembleKind::Hamming1).unwrap(),
            build_dregular(12, 3, 0.5).unwrap(),
            build_edge_bounded(8, 10, 0.3).unwrap(),
        ];
        for e in ensembles {
            let report = validate_ensemble(&e);
            assert!(
                report.is_clean(),
                "{:?}/{:?}: {:?}",
                e.class_tag,
                e.kind,
                report.violations
            );
        }
    }

    #[test]
    fn validation_flags_halved_rho() {
        let mut e = build_dregular(12, 3, 0.5).unwrap();
        e.rho /= 2.0e3;
        let report = validate_ensemble(&e);
        assert!(report.kl_checked);
        assert!(!report.is_clean());
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("exceeds certified rho")));
    }

    #[test]
    fn validation_flags_duplicate_member() {
        let mut e = build_path_restricted(10, 4, 0.5, EnsembleKind::Connectivity).unwrap();
        e.members[1] = e.members[0].clone();
        let report = validate_ensemble(&e);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("duplicates")));
    }

    #[test]
    fn deterministic_serialization() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let e1 = build_dregular(12, 3, 0.5).unwrap();
        let e2 = build_dregular(12, 3, 0.5).unwrap();
        write_ensemble_dir(&e1, dir1.path()).unwrap();
        write_ensemble_dir(&e2, dir2.path()).unwrap();
        for name in ["center.edgelist", "member_0.edgelist", "manifest.json"] {
            let a = std::fs::read(dir1.path().join(name)).unwrap();
            let b = std::fs::read(dir2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
        let back = read_ensemble_dir(dir1.path()).unwrap();
        assert_eq!(back.center, e1.center);
        assert_eq!(back.members, e1.members);
    }

    #[test]
    fn leftover_vertices_flagged() {
        let e = build_path_restricted(11, 4, 0.5, EnsembleKind::Connectivity).unwrap();
        assert_eq!(e.params.leftover_vertices, 1);
    }
}
