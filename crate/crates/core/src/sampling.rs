//! Sampling from Ising models: exact inverse-CDF draws from the enumerated
//! distribution at small p, and single-site Gibbs sweeps beyond that.
//! Everything is deterministic given a 64-bit seed, and the generator
//! identity rides along in the sample set for provenance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{infer_exact_with_caps, Caps, IsingModel};
use crate::numerics::{splitmix64, u64_to_unit};

pub const GENERATOR_EXACT: &str = "splitmix64-inverse-cdf";
pub const GENERATOR_GIBBS: &str = "chacha8-gibbs";

/// A set of n i.i.d. (or Gibbs) samples in {+1,-1}^p with seed provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub num_vertices: usize,
    pub seed: u64,
    pub generator: String,
    /// One vector of ±1 entries per sample.
    pub samples: Vec<Vec<i8>>,
}

impl SampleSet {
    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    /// Text form: header line "n p seed generator-id", then one sample of
    /// space-separated ±1 per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.samples.len(),
            self.num_vertices,
            self.seed,
            self.generator
        );
        for s in &self.samples {
            let row: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be \"n p seed generator-id\"".into(),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: 1,
            msg: "bad sample count".into(),
        })?;
        let p: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: 1,
            msg: "bad dimension".into(),
        })?;
        let seed: u64 = fields[2].parse().map_err(|_| Error::Parse {
            line: 1,
            msg: "bad seed".into(),
        })?;
        let generator = fields[3].to_string();
        let mut samples = Vec::with_capacity(n);
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<i8>> = line
                .split_whitespace()
                .map(|tok| match tok {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1i8),
                    _ => Err(Error::Parse {
                        line: idx + 2,
                        msg: format!("expected ±1, got {tok:?}"),
                    }),
                })
                .collect();
            let row = row?;
            if row.len() != p {
                return Err(Error::Parse {
                    line: idx + 2,
                    msg: format!("expected {p} entries, got {}", row.len()),
                });
            }
            samples.push(row);
        }
        if samples.len() != n {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header says {n} samples, found {}", samples.len()),
            });
        }
        Ok(SampleSet {
            num_vertices: p,
            seed,
            generator,
            samples,
        })
    }

    /// Empirical correlation of a vertex pair.
    pub fn empirical_correlation(&self, s: usize, t: usize) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum: i64 = self
            .samples
            .iter()
            .map(|x| (x[s] as i64) * (x[t] as i64))
            .sum();
        sum as f64 / self.samples.len() as f64
    }
}

fn state_to_spins(state: u64, p: usize) -> Vec<i8> {
    (0..p)
        .map(|i| if (state >> i) & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// Exact i.i.d. sampling via the enumerated CDF. Per-sample seeds are
/// splitmix64(seed ^ index), so draws are reproducible and
/// order-independent.
pub fn sample_exact(m: &IsingModel, n: usize, seed: u64) -> Result<SampleSet> {
    sample_exact_with_caps(m, n, seed, Caps::from_env())
}

pub fn sample_exact_with_caps(m: &IsingModel, n: usize, seed: u64, caps: Caps) -> Result<SampleSet> {
    let table = ExactSampler::build(m, caps)?;
    Ok(table.sample(n, seed))
}

/// Precomputed CDF table for exact sampling; build once, draw many.
pub struct ExactSampler {
    num_vertices: usize,
    cdf: Vec<f64>,
}

impl ExactSampler {
    pub fn build(m: &IsingModel, caps: Caps) -> Result<Self> {
        let p = m.num_vertices();
        if p > caps.sampling {
            return Err(Error::Capacity(format!(
                "sample_exact: p = {p} exceeds sampling cap {} (set ISING_LB_MAX_P to override)",
                caps.sampling
            )));
        }
        let lambda = m.lambda();
        let e_max = lambda * m.graph().num_edges() as f64;
        let n_states = 1u64 << p;
        let mut cdf = Vec::with_capacity(n_states as usize);
        let mut acc = 0.0f64;
        for state in 0..n_states {
            acc += (lambda * m.agreement(state) as f64 - e_max).exp();
            cdf.push(acc);
        }
        let total = acc;
        for v in &mut cdf {
            *v /= total;
        }
        Ok(ExactSampler {
            num_vertices: p,
            cdf,
        })
    }

    pub fn sample(&self, n: usize, seed: u64) -> SampleSet {
        let samples = (0..n)
            .map(|i| {
                let u = u64_to_unit(splitmix64(seed ^ i as u64));
                let state = self.cdf.partition_point(|&c| c <= u) as u64;
                state_to_spins(state.min(self.cdf.len() as u64 - 1), self.num_vertices)
            })
            .collect();
        SampleSet {
            num_vertices: self.num_vertices,
            seed,
            generator: GENERATOR_EXACT.to_string(),
            samples,
        }
    }
}

/// Single-site Gibbs sampler with systematic site scan 0..p-1.
/// Conditional update: P(x_i = +1 | rest) = sigmoid(2 * lambda * sum of
/// neighboring spins).
pub fn gibbs_sample(
    m: &IsingModel,
    n: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
) -> Result<SampleSet> {
    if burn_in == 0 || thinning == 0 {
        return Err(Error::InvalidArgument(
            "burn_in and thinning must be at least 1".into(),
        ));
    }
    let p = m.num_vertices();
    let lambda = m.lambda();
    let adj = m.graph().adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spins: Vec<i8> = (0..p)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();

    let sweep = |spins: &mut Vec<i8>, rng: &mut ChaCha8Rng| {
        for i in 0..p {
            let field: i64 = adj[i].iter().map(|&j| spins[j] as i64).sum();
            let arg = 2.0 * lambda * field as f64;
            let p_plus = 1.0 / (1.0 + (-arg).exp());
            spins[i] = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        }
    };

    for _ in 0..burn_in {
        sweep(&mut spins, &mut rng);
    }
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..thinning {
            sweep(&mut spins, &mut rng);
        }
        samples.push(spins.clone());
    }
    Ok(SampleSet {
        num_vertices: p,
        seed,
        generator: GENERATOR_GIBBS.to_string(),
        samples,
    })
}

/// Total log-likelihood of a sample set under a model:
/// sum over samples of lambda * agree(x) - log Z.
pub fn log_likelihood(m: &IsingModel, s: &SampleSet) -> Result<f64> {
    log_likelihood_with_caps(m, s, Caps::from_env())
}

pub fn log_likelihood_with_caps(m: &IsingModel, s: &SampleSet, caps: Caps) -> Result<f64> {
    if s.num_vertices != m.num_vertices() {
        return Err(Error::Dimension(format!(
            "log_likelihood: model has {} vertices, samples have {}",
            m.num_vertices(),
            s.num_vertices
        )));
    }
    let log_z = infer_exact_with_caps(m, caps)?.log_partition;
    Ok(log_likelihood_cached(m, log_z, s))
}

/// Log-likelihood with a precomputed log-partition (the decoder computes
/// each candidate's log Z once and reuses it across trials).
pub fn log_likelihood_cached(m: &IsingModel, log_partition: f64, s: &SampleSet) -> f64 {
    let n = s.samples.len() as f64;
    let lambda = m.lambda();
    let agree_total: i64 = s.samples.iter().map(|x| m.agreement_spins(x)).sum();
    lambda * agree_total as f64 - n * log_partition
}
