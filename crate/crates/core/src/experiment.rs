//! Empirical hardness experiments: draw a graph from a hard ensemble,
//! sample it, decode with exact maximum likelihood over the finite
//! hypothesis family, and compare the measured error to the Fano floor.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::fano_error_floor;
use crate::ensembles::{validate_ensemble, HardEnsemble};
use crate::error::{Error, Result};
use crate::ising::{infer_exact_with_caps, kl_from_inference, Caps, IsingModel};
use crate::numerics::{splitmix64, wilson_interval};
use crate::sampling::{ExactSampler, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoder {
    MlExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMetric {
    /// p_avg: truth drawn uniformly from the family each trial.
    Avg,
    /// p_max: every member plays truth for the full trial count.
    Max,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Directory produced by the ensemble writer; ignored when the
    /// experiment is run with an in-memory ensemble.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ensemble_dir: Option<String>,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_decoder")]
    pub decoder: Decoder,
    #[serde(default = "default_metric")]
    pub error_metric: ErrorMetric,
}

fn default_decoder() -> Decoder {
    Decoder::MlExact
}

fn default_metric() -> ErrorMetric {
    ErrorMetric::Avg
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 1) {
            return Err(Error::InvalidArgument(
                "sample sizes must be non-empty and all at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One row per sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub trials: usize,
    pub errors: u64,
    pub p_hat: f64,
    /// Wilson score interval at 95%.
    pub ci_low: f64,
    pub ci_high: f64,
    pub fano_floor_certified: f64,
    pub fano_floor_exact: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub hypothesis_count: usize,
    pub rho_certified: f64,
    /// Max exact KL(member || center), the desk-scale radius.
    pub rho_exact: f64,
    pub interval_method: String,
    pub rows: Vec<ExperimentRow>,
}

/// Hypothesis family with cached log-partition values and samplers.
struct Candidates {
    models: Vec<IsingModel>,
    log_z: Vec<f64>,
    samplers: Vec<ExactSampler>,
}

fn prepare_candidates(e: &HardEnsemble, caps: Caps) -> Result<Candidates> {
    let mut models = Vec::with_capacity(e.members.len() + 1);
    for g in e.members.iter().chain(std::iter::once(&e.center)) {
        models.push(IsingModel::new(g.clone(), e.lambda)?);
    }
    let mut log_z = Vec::with_capacity(models.len());
    let mut samplers = Vec::with_capacity(models.len());
    for m in &models {
        log_z.push(infer_exact_with_caps(m, caps)?.log_partition);
        samplers.push(ExactSampler::build(m, caps)?);
    }
    Ok(Candidates {
        models,
        log_z,
        samplers,
    })
}

/// Argmax log-likelihood over the family; ties go to the lowest index.
pub fn ml_decode(candidates: &[IsingModel], log_z: &[f64], samples: &SampleSet) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidates".into()));
    }
    if candidates.len() != log_z.len() {
        return Err(Error::Dimension(
            "candidate and partition-value counts differ".into(),
        ));
    }
    let mut best = 0usize;
    let mut best_ll = f64::NEG_INFINITY;
    for (i, m) in candidates.iter().enumerate() {
        if samples.num_vertices != m.num_vertices() {
            return Err(Error::Dimension(format!(
                "ml_decode: model has {} vertices, samples have {}",
                m.num_vertices(),
                samples.num_vertices
            )));
        }
        let ll = crate::sampling::log_likelihood_cached(m, log_z[i], samples);
        if ll > best_ll {
            best_ll = ll;
            best = i;
        }
    }
    Ok(best)
}

/// Stable per-trial seed from (experiment seed, sample-size index, trial).
fn trial_seed(seed: u64, n_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(seed ^ (n_index as u64).rotate_left(32)) ^ trial as u64)
}

pub fn run_experiment(e: &HardEnsemble, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with_caps(e, cfg, Caps::from_env())
}

pub fn run_experiment_with_caps(
    e: &HardEnsemble,
    cfg: &ExperimentConfig,
    caps: Caps,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let report = validate_ensemble(e);
    if !report.is_clean() {
        return Err(Error::InvalidArgument(format!(
            "ensemble fails validation: {}",
            report.violations[0].message
        )));
    }
    let family = e.members.len();
    let cands = prepare_candidates(e, caps)?;

    // exact radius: max KL(member || center) at desk scale
    let center_inf = infer_exact_with_caps(
        &IsingModel::new(e.center.clone(), e.lambda)?,
        caps,
    )?;
    let center_model = IsingModel::new(e.center.clone(), e.lambda)?;
    let mut rho_exact = 0.0f64;
    for i in 0..family {
        let member_inf = infer_exact_with_caps(&cands.models[i], caps)?;
        let kl = kl_from_inference(&cands.models[i], &member_inf, &center_model, &center_inf);
        rho_exact = rho_exact.max(kl);
    }

    let mut rows = Vec::with_capacity(cfg.sample_sizes.len());
    for (n_index, &n) in cfg.sample_sizes.iter().enumerate() {
        let started = Instant::now();
        let (trials, errors) = match cfg.error_metric {
            ErrorMetric::Avg => {
                let errors: u64 = (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let s = trial_seed(cfg.seed, n_index, trial);
                        let truth = (splitmix64(s) % family as u64) as usize;
                        let samples = cands.samplers[truth].sample(n, splitmix64(s ^ 1));
                        let decoded =
                            ml_decode(&cands.models, &cands.log_z, &samples).expect("dims fixed");
                        u64::from(decoded != truth)
                    })
                    .sum();
                (cfg.trials, errors)
            }
            ErrorMetric::Max => {
                // worst member decides; report its trial count
                let per_member: Vec<u64> = (0..family)
                    .into_par_iter()
                    .map(|truth| {
                        (0..cfg.trials)
                            .map(|trial| {
                                let s = trial_seed(cfg.seed, n_index, truth * cfg.trials + trial);
                                let samples = cands.samplers[truth].sample(n, splitmix64(s ^ 1));
                                let decoded = ml_decode(&cands.models, &cands.log_z, &samples)
                                    .expect("dims fixed");
                                u64::from(decoded != truth)
                            })
                            .sum()
                    })
                    .collect();
                (cfg.trials, per_member.into_iter().max().unwrap_or(0))
            }
        };
        let p_hat = errors as f64 / trials as f64;
        let (ci_low, ci_high) = wilson_interval(errors, trials as u64, 1.96);
        rows.push(ExperimentRow {
            n,
            trials,
            errors,
            p_hat,
            ci_low,
            ci_high,
            fano_floor_certified: fano_error_floor(n as f64, e.rho, family as u64),
            fano_floor_exact: fano_error_floor(n as f64, rho_exact, family as u64),
            wall_time_secs: started.elapsed().as_secs_f64(),
        });
    }

    Ok(ExperimentResult {
        config: cfg.clone(),
        hypothesis_count: family,
        rho_certified: e.rho,
        rho_exact,
        interval_method: "wilson-95".into(),
        rows,
    })
}

/// CSV with the fixed column schema; wall time is deliberately excluded
/// so reruns are byte-identical.
pub fn result_to_csv(r: &ExperimentResult) -> String {
    let mut out =
        String::from("n,trials,errors,p_hat,ci_low,ci_high,fano_floor_certified,fano_floor_exact\n");
    for row in &r.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.n,
            row.trials,
            row.errors,
            row.p_hat,
            row.ci_low,
            row.ci_high,
            row.fano_floor_certified,
            row.fano_floor_exact
        ));
    }
    out
}

pub fn write_result_csv(r: &ExperimentResult, path: &Path) -> Result<()> {
    std::fs::write(path, result_to_csv(r))?;
    Ok(())
}

pub fn write_result_json(r: &ExperimentResult, path: &Path) -> Result<()> {
    let mut stripped = r.clone();
    for row in &mut stripped.rows {
        row.wall_time_secs = 0.0;
    }
    let mut json = serde_json::to_string_pretty(&stripped)?;
    json.push('\n');
    std::fs::write(path, json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::build_dregular;
    use crate::sampling::sample_exact_with_caps;

    const CAPS: Caps = Caps {
        enumeration: 24,
        sampling: 20,
    };

    fn small_ensemble() -> HardEnsemble {
        build_dregular(8, 3, 0.5).unwrap()
    }

    #[test]
    fn decode_recovers_separated_truth() {
        // moderate coupling, many samples: truth beats every rival
        // including the center (KL gaps are all strictly positive)
        let e = build_dregular(8, 3, 0.5).unwrap();
        let cands = prepare_candidates(&e, CAPS).unwrap();
        for truth in [0usize, 5, 11] {
            let samples = sample_exact_with_caps(&cands.models[truth], 2000, 99, CAPS).unwrap();
            let decoded = ml_decode(&cands.models, &cands.log_z, &samples).unwrap();
            assert_eq!(decoded, truth);
        }
    }

    #[test]
    fn decode_empty_sample_ties_to_zero() {
        let e = small_ensemble();
        let cands = prepare_candidates(&e, CAPS).unwrap();
        let samples = SampleSet {
            num_vertices: 8,
            seed: 0,
            generator: "none".into(),
            samples: vec![],
        };
        assert_eq!(ml_decode(&cands.models, &cands.log_z, &samples).unwrap(), 0);
    }

    #[test]
    fn experiment_deterministic() {
        let e = small_ensemble();
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![2, 5],
            trials: 40,
            seed: 7,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let a = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        let b = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        assert_eq!(result_to_csv(&a), result_to_csv(&b));
    }

    #[test]
    fn near_zero_coupling_errs_at_chance() {
        let e = build_dregular(8, 3, 1e-6).unwrap();
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![3],
            trials: 300,
            seed: 11,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        // 12 indistinguishable hypotheses: error approximately 1 - 1/12
        let p_hat = r.rows[0].p_hat;
        assert!(p_hat > 0.80, "p_hat = {p_hat}");
    }

    #[test]
    fn large_n_drives_error_down() {
        let e = build_dregular(8, 3, 1.0).unwrap();
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![400],
            trials: 60,
            seed: 3,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        assert!(r.rows[0].p_hat < 0.1, "p_hat = {}", r.rows[0].p_hat);
    }

    #[test]
    fn pmax_dominates_pavg() {
        let e = small_ensemble();
        let mut cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![4],
            trials: 120,
            seed: 5,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let avg = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        cfg.error_metric = ErrorMetric::Max;
        let max = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        // worst member cannot beat the average by more than noise
        assert!(max.rows[0].p_hat + 0.12 >= avg.rows[0].p_hat);
    }

    #[test]
    fn rho_exact_below_certified() {
        let e = small_ensemble();
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![1],
            trials: 1,
            seed: 0,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        assert!(r.rho_exact <= r.rho_certified + 1e-12);
        assert!(r.rho_exact > 0.0);
    }

    #[test]
    fn csv_schema_and_files() {
        let e = small_ensemble();
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![2],
            trials: 10,
            seed: 1,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        let csv = result_to_csv(&r);
        assert!(csv.starts_with(
            "n,trials,errors,p_hat,ci_low,ci_high,fano_floor_certified,fano_floor_exact\n"
        ));
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_result_csv(&r, &p1).unwrap();
        let r2 = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        write_result_csv(&r2, &p2).unwrap();
        assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
        let j = dir.path().join("a.json");
        write_result_json(&r, &j).unwrap();
        let parsed: ExperimentResult =
            serde_json::from_str(&std::fs::read_to_string(j).unwrap()).unwrap();
        assert_eq!(parsed.rows.len(), 1);
    }

    #[test]
    fn config_validation() {
        let bad = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![],
            trials: 10,
            seed: 0,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        assert!(bad.validate().is_err());
    }
}
