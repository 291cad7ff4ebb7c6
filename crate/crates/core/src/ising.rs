//! Exact inference for zero-field ferromagnetic Ising models with uniform
//! coupling: log-partition, full pairwise correlation matrix, exact KL
//! divergence, and the symmetric-divergence edge expansion.
//!
//! Everything here works in natural-log units and brute-forces the 2^p
//! state space, so it is the desk-scale oracle the bound calculators are
//! checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Enumeration caps. Defaults keep worst-case memory and time at desk
/// scale; `ISING_LB_MAX_P` overrides both.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Maximum p for log-partition / correlation / KL enumeration.
    pub enumeration: usize,
    /// Maximum p for building the exact sampling table.
    pub sampling: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 24,
            sampling: 20,
        }
    }
}

impl Caps {
    /// Default caps, overridden by the `ISING_LB_MAX_P` environment
    /// variable when set.
    pub fn from_env() -> Self {
        match std::env::var("ISING_LB_MAX_P")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
        {
            Some(p) => Caps {
                enumeration: p,
                sampling: p.min(26),
            },
            None => Caps::default(),
        }
    }
}

/// A zero-field ferromagnetic Ising model: a graph plus a uniform positive
/// edge weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    graph: Graph,
    lambda: f64,
}

impl IsingModel {
    pub fn new(graph: Graph, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(IsingModel { graph, lambda })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Sufficient statistic: sum over edges of x_i * x_j for the state
    /// encoded as a bitmask (bit set = spin +1).
    pub fn agreement(&self, state: u64) -> i64 {
        let mut agree: i64 = 0;
        for &(i, j) in self.graph.edges() {
            if ((state >> i) ^ (state >> j)) & 1 == 0 {
                agree += 1;
            } else {
                agree -= 1;
            }
        }
        agree
    }

    /// Same statistic for an explicit ±1 vector.
    pub fn agreement_spins(&self, spins: &[i8]) -> i64 {
        self.graph
            .edges()
            .iter()
            .map(|&(i, j)| (spins[i] as i64) * (spins[j] as i64))
            .sum()
    }
}

/// Exact inference output: log Z (nats) and the full correlation matrix
/// E[x_s x_t].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactInference {
    pub log_partition: f64,
    pub correlations: Vec<Vec<f64>>,
}

impl ExactInference {
    pub fn correlation(&self, s: usize, t: usize) -> f64 {
        self.correlations[s][t]
    }
}

fn check_cap(p: usize, cap: usize, what: &str) -> Result<()> {
    if p > cap {
        return Err(Error::Capacity(format!(
            "{what}: p = {p} exceeds enumeration cap {cap} (set ISING_LB_MAX_P to override)"
        )));
    }
    Ok(())
}

/// Brute-force log-partition and correlation matrix by enumerating all 2^p
/// states with a running-max log-sum-exp (lambda * p can reach hundreds, a
/// naive exp overflows).
pub fn infer_exact(m: &IsingModel) -> Result<ExactInference> {
    infer_exact_with_caps(m, Caps::from_env())
}

pub fn infer_exact_with_caps(m: &IsingModel, caps: Caps) -> Result<ExactInference> {
    let p = m.num_vertices();
    check_cap(p, caps.enumeration, "infer_exact")?;
    let lambda = m.lambda();
    let n_states: u64 = 1u64 << p;

    // max energy is lambda * |E| (the all-aligned states), no scan needed
    let e_max = lambda * m.graph().num_edges() as f64;

    let mut z_sum = 0.0f64;
    let npairs = p * (p - 1) / 2;
    let mut pair_sums = vec![0.0f64; npairs];
    for state in 0..n_states {
        let w = (lambda * m.agreement(state) as f64 - e_max).exp();
        z_sum += w;
        let mut k = 0;
        for s in 0..p {
            let xs = ((state >> s) & 1) as i64 * 2 - 1;
            for t in (s + 1)..p {
                let xt = ((state >> t) & 1) as i64 * 2 - 1;
                pair_sums[k] += w * (xs * xt) as f64;
                k += 1;
            }
        }
    }

    let mut correlations = vec![vec![0.0f64; p]; p];
    let mut k = 0;
    for s in 0..p {
        correlations[s][s] = 1.0;
        for t in (s + 1)..p {
            let c = pair_sums[k] / z_sum;
            correlations[s][t] = c;
            correlations[t][s] = c;
            k += 1;
        }
    }
    Ok(ExactInference {
        log_partition: e_max + z_sum.ln(),
        correlations,
    })
}

fn check_same_p(m1: &IsingModel, m2: &IsingModel, what: &str) -> Result<()> {
    if m1.num_vertices() != m2.num_vertices() {
        return Err(Error::Dimension(format!(
            "{what}: {} vs {} vertices",
            m1.num_vertices(),
            m2.num_vertices()
        )));
    }
    Ok(())
}

/// Exact KL divergence D(f1 || f2) in nats.
///
/// Uses the identity
/// D = lambda1 * E1[agree1] - lambda2 * E1[agree2] - log Z1 + log Z2,
/// where all expectations come from the exact correlation matrix of m1.
pub fn kl_exact(m1: &IsingModel, m2: &IsingModel) -> Result<f64> {
    kl_exact_with_caps(m1, m2, Caps::from_env())
}

pub fn kl_exact_with_caps(m1: &IsingModel, m2: &IsingModel, caps: Caps) -> Result<f64> {
    check_same_p(m1, m2, "kl_exact")?;
    let inf1 = infer_exact_with_caps(m1, caps)?;
    let inf2 = infer_exact_with_caps(m2, caps)?;
    Ok(kl_from_inference(m1, &inf1, m2, &inf2))
}

/// KL from precomputed inference results (the decoder path reuses these).
pub fn kl_from_inference(
    m1: &IsingModel,
    inf1: &ExactInference,
    m2: &IsingModel,
    inf2: &ExactInference,
) -> f64 {
    let e1_agree1: f64 = m1
        .graph()
        .edges()
        .iter()
        .map(|&(i, j)| inf1.correlations[i][j])
        .sum();
    let e1_agree2: f64 = m2
        .graph()
        .edges()
        .iter()
        .map(|&(i, j)| inf1.correlations[i][j])
        .sum();
    m1.lambda() * e1_agree1 - m2.lambda() * e1_agree2 - inf1.log_partition + inf2.log_partition
}

/// Symmetric divergence via the edge-set expansion:
/// lambda * sum over E1\E2 of (E1 - E2 correlation) + lambda * sum over
/// E2\E1 of (E2 - E1 correlation). An identity for the symmetric KL when
/// both models share the same coupling.
pub fn symmetric_kl_edge_form(m1: &IsingModel, m2: &IsingModel) -> Result<f64> {
    symmetric_kl_edge_form_with_caps(m1, m2, Caps::from_env())
}

pub fn symmetric_kl_edge_form_with_caps(
    m1: &IsingModel,
    m2: &IsingModel,
    caps: Caps,
) -> Result<f64> {
    check_same_p(m1, m2, "symmetric_kl_edge_form")?;
    if m1.lambda() != m2.lambda() {
        return Err(Error::InvalidArgument(format!(
            "symmetric_kl_edge_form requires equal couplings, got {} vs {}",
            m1.lambda(),
            m2.lambda()
        )));
    }
    let lambda = m1.lambda();
    let inf1 = infer_exact_with_caps(m1, caps)?;
    let inf2 = infer_exact_with_caps(m2, caps)?;
    let mut total = 0.0;
    for &(i, j) in m1.graph().edges() {
        if !m2.graph().has_edge(i, j) {
            total += lambda * (inf1.correlations[i][j] - inf2.correlations[i][j]);
        }
    }
    for &(i, j) in m2.graph().edges() {
        if !m1.graph().has_edge(i, j) {
            total += lambda * (inf2.correlations[i][j] - inf1.correlations[i][j]);
        }
    }
    Ok(total)
}
