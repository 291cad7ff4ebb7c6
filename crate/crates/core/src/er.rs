//! Dense Erdős–Rényi lower bounds and structural diagnostics.
//!
//! Entropy quantities are in bits, coupling terms in nats; the report
//! records both where they mix. Unspecified asymptotic slack terms are
//! evaluated as zero and flagged.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::log_add_exp;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ERParams {
    pub p: usize,
    /// Density parameter: edge probability is c/p.
    pub c: f64,
    pub lambda: f64,
    pub p_avg_target: f64,
    /// Typicality slack, default 1/2.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    0.5
}

impl ERParams {
    pub fn validate(&self) -> Result<()> {
        let density = self.c / self.p as f64;
        if !(0.0..1.0).contains(&density) || !density.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "edge probability c/p = {density} must lie in [0,1)"
            )));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Density hypothesis c >= p^(3/4), reported rather than enforced.
    pub fn dense_regime(&self) -> bool {
        self.c >= (self.p as f64).powf(0.75)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    HighLambda,
    LowLambda,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ERQuantities {
    /// H(c/p) in bits.
    pub entropy_bits: f64,
    /// gamma = c^2 / (6p), the connectivity count the constructions lean on.
    pub gamma: f64,
    pub b_p: f64,
    pub r_c: f64,
    pub n1: f64,
    /// ln n1; stays finite when n1 itself overflows.
    pub log_n1: f64,
    pub n2: f64,
    pub lower_bound: f64,
    pub regime: Regime,
    /// Which of the three denominator terms of n1 is largest.
    pub dominant_denominator_term: String,
    pub dense_regime: bool,
    /// Unspecified O(1/p) slack evaluated as exactly zero.
    pub asymptotic_slack_dropped: bool,
}

/// Binary entropy in bits, with 0 log 0 = 0.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "entropy argument must lie in [0,1], got {q}"
        )));
    }
    let part = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(part(q) + part(1.0 - q))
}

/// Concentration constants: b_p = (p/3) exp(-p/36) and
/// r_c = 2 exp(-c^2 eps^2 / 36).
pub fn er_concentration_constants(params: &ERParams) -> (f64, f64) {
    let p = params.p as f64;
    let b_p = (p / 3.0) * (-p / 36.0).exp();
    let r_c = 2.0 * (-params.c * params.c * params.epsilon * params.epsilon / 36.0).exp();
    (b_p, r_c)
}

/// Sample-complexity lower bounds n1 and n2; requires p_avg_target <= 1/90.
pub fn er_lower_bound(params: &ERParams) -> Result<ERQuantities> {
    params.validate()?;
    if params.p_avg_target <= 0.0 || params.p_avg_target > 1.0 / 90.0 {
        return Err(Error::InvalidArgument(format!(
            "p_avg target {} violates the hypothesis p_avg <= 1/90",
            params.p_avg_target
        )));
    }
    let p = params.p as f64;
    let c = params.c;
    let lambda = params.lambda;
    let p_avg = params.p_avg_target;

    let entropy_bits = binary_entropy(c / p)?;
    let gamma = c * c / (6.0 * p);
    let (b_p, r_c) = er_concentration_constants(params);

    // denominator of n1, each term kept in log space
    let log_d1 = (4.0 * lambda * p / 3.0).ln() - p / 36.0;
    let log_d2 = 4.0f64.ln() - p.powf(1.5) / 144.0;
    // 4 lambda / (9 (1 + cosh(2 lambda)^gamma))
    let log_big = log_add_exp(0.0, gamma * (2.0 * lambda).cosh().ln());
    let log_d3 = (4.0 * lambda / 9.0).ln() - log_big;
    let log_denom = log_add_exp(log_add_exp(log_d1, log_d2), log_d3);
    let dominant = [("exp(-p/36)", log_d1), ("exp(-p^1.5/144)", log_d2), ("connectivity", log_d3)]
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
        .to_string();

    let numerator = entropy_bits * (3.0 / 80.0) * (1.0 - 80.0 * p_avg);
    let log_n1 = numerator.ln() - log_denom;
    let n1 = log_n1.exp();

    let n2 = (p / 4.0) * entropy_bits * (1.0 - 3.0 * p_avg);

    let lower_bound = n1.max(n2);
    Ok(ERQuantities {
        entropy_bits,
        gamma,
        b_p,
        r_c,
        n1,
        log_n1,
        n2,
        lower_bound,
        regime: er_regime(params),
        dominant_denominator_term: dominant,
        dense_regime: params.dense_regime(),
        asymptotic_slack_dropped: true,
    })
}

/// High-coupling iff lambda >= sqrt(p)/c (boundary counts as high).
pub fn er_regime(params: &ERParams) -> Regime {
    if params.lambda >= (params.p as f64).sqrt() / params.c {
        Regime::HighLambda
    } else {
        Regime::LowLambda
    }
}

/// Scale of samples the regime implies.
pub fn regime_sample_scale(regime: Regime) -> &'static str {
    match regime {
        Regime::HighLambda => "exponential via n1",
        Regime::LowLambda => "c log p from prior work",
    }
}

/// G(p, c/p): every pair independently with probability c/p.
pub fn sample_er_graph(p: usize, c: f64, seed: u64) -> Result<Graph> {
    let density = c / p as f64;
    if !(0.0..1.0).contains(&density) || !density.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "edge probability c/p = {density} must lie in [0,1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..p {
        for v in (u + 1)..p {
            if rng.gen::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::new(p, edges)
}

/// Structural audit of a (sampled) dense graph: tripartition A, B, C,
/// common-neighbor counts through B for every A x C pair, and the
/// typicality of the average degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ERDiagnostics {
    pub p: usize,
    pub part_size: usize,
    /// Vertices dropped because p is not a multiple of 3.
    pub truncated_vertices: usize,
    pub c: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub pair_count: usize,
    /// Histogram of n_{a,c} values over A x C.
    pub path_count_histogram: BTreeMap<usize, usize>,
    pub mean_pair_paths: f64,
    /// Pairs with n_{a,c} >= gamma.
    pub m_ac: usize,
    pub fraction_at_least_gamma: f64,
    pub avg_degree: f64,
    /// Average degree within (1 +- epsilon) c.
    pub typical: bool,
    /// Concentration floor gamma_low = c^2/(3p) - sqrt(4 p ln p); pairs
    /// are expected above it in the dense regime.
    pub pair_floor: f64,
    /// Cap (1/2)(p/3)^2 on the pair count used by the counting argument.
    pub pair_cap: f64,
    pub m_ac_within_cap: bool,
}

pub fn er_structure_diagnostics(
    g: &Graph,
    c: f64,
    epsilon: f64,
    gamma_override: Option<f64>,
) -> ERDiagnostics {
    let p = g.num_vertices();
    let q = p / 3;
    let adj = g.adjacency();
    let pf = p as f64;
    let gamma = gamma_override.unwrap_or(c * c / (6.0 * pf));

    let in_b = |v: usize| v >= q && v < 2 * q;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total_paths = 0usize;
    let mut m_ac = 0usize;
    for a in 0..q {
        for cc in (2 * q)..(3 * q) {
            let n_ac = adj[a]
                .iter()
                .filter(|&&w| in_b(w) && adj[w].binary_search(&cc).is_ok())
                .count();
            *histogram.entry(n_ac).or_insert(0) += 1;
            total_paths += n_ac;
            if (n_ac as f64) >= gamma {
                m_ac += 1;
            }
        }
    }
    let pair_count = q * q;
    let avg_degree = 2.0 * g.num_edges() as f64 / pf;
    let pair_cap = 0.5 * (pf / 3.0) * (pf / 3.0);
    ERDiagnostics {
        p,
        part_size: q,
        truncated_vertices: p - 3 * q,
        c,
        epsilon,
        gamma,
        pair_count,
        path_count_histogram: histogram,
        mean_pair_paths: total_paths as f64 / pair_count as f64,
        m_ac,
        fraction_at_least_gamma: m_ac as f64 / pair_count as f64,
        avg_degree,
        typical: (avg_degree - c).abs() <= epsilon * c,
        pair_floor: c * c / (3.0 * pf) - (4.0 * pf * pf.ln()).sqrt(),
        pair_cap,
        m_ac_within_cap: (m_ac as f64) <= pair_cap,
    }
}
