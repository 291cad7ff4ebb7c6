//! Closed-form bound calculators: the connectivity correlation/KL bounds
//! and every Fano-derived sample-complexity threshold.
//!
//! Large exponential factors (cosh(2*lambda)^(eta-1), e^(lambda*d)) are
//! handled in log space; a term that is not representable as an f64 is
//! reported through its log together with an overflow marker rather than
//! as infinity alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::log_add_exp;

/// Inputs for the single-KL-ball Fano threshold.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FanoInputs {
    /// |T|, the hypothesis family size (>= 2).
    pub hypothesis_count: u64,
    /// Certified KL radius in nats (> 0).
    pub kl_radius: f64,
    /// Target error probability in (0,1).
    pub target_error: f64,
}

/// One named term of a max{.,.} threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermValue {
    pub name: String,
    /// f64 value; +inf when the term overflows.
    pub value: f64,
    /// Natural log of the term, always finite for positive terms.
    pub log_value: f64,
    pub overflow: bool,
}

impl TermValue {
    fn from_log(name: &str, log_value: f64) -> Self {
        let value = log_value.exp();
        TermValue {
            name: name.to_string(),
            value,
            log_value,
            overflow: !value.is_finite(),
        }
    }

    fn from_value(name: &str, value: f64) -> Self {
        TermValue {
            name: name.to_string(),
            value,
            log_value: if value > 0.0 { value.ln() } else { f64::NEG_INFINITY },
            overflow: false,
        }
    }
}

/// Per-theorem output: both max terms, the winner, and the sample
/// threshold (1 - delta) * max(terms). Thresholds are reals, not floored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub term_values: Vec<TermValue>,
    pub winning_term: String,
    /// (1 - delta) * max(term values); +inf if the winner overflowed.
    pub n_threshold: f64,
    /// log of the threshold, finite even on overflow.
    pub log_n_threshold: f64,
    pub vacuous: bool,
    /// Construction parameters echoed for provenance.
    pub inputs: serde_json::Value,
}

impl BoundReport {
    fn from_terms(terms: Vec<TermValue>, delta: f64, inputs: serde_json::Value) -> Self {
        let winner = terms
            .iter()
            .max_by(|a, b| a.log_value.total_cmp(&b.log_value))
            .expect("at least one term");
        let log_n_threshold = (1.0 - delta).ln() + winner.log_value;
        let n_threshold = (1.0 - delta) * winner.value;
        BoundReport {
            winning_term: winner.name.clone(),
            vacuous: !(n_threshold > 0.0),
            term_values: terms,
            n_threshold,
            log_n_threshold,
            inputs,
        }
    }
}

fn check_positive(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in [0,1), got {delta}"
        )));
    }
    Ok(())
}

/// log of ((1 + tanh(lambda)^l) / (1 - tanh(lambda)^l))^d, the
/// connectivity amplification ratio, evaluated stably.
fn log_connectivity_ratio(lambda: f64, l: f64, d: f64) -> f64 {
    let t = lambda.tanh();
    // t^l can underflow for large l; ln(t)*l keeps the scale
    let log_tl = l * t.ln();
    let tl = log_tl.exp();
    d * (tl.ln_1p() - (-tl).ln_1p())
}

/// Correlation lower bound for an (l,d)-connected pair:
/// 1 - 2 / (1 + ratio) where ratio = ((1+tanh^l)/(1-tanh^l))^d.
/// Equals tanh(log_ratio / 2), which is how it is evaluated.
pub fn corr_lower_bound_ld(lambda: f64, l: usize, d: usize) -> Result<f64> {
    check_positive(lambda, "lambda")?;
    if l == 0 || d == 0 {
        return Err(Error::InvalidArgument("l and d must be positive".into()));
    }
    let log_r = log_connectivity_ratio(lambda, l as f64, d as f64);
    Ok((log_r / 2.0).tanh())
}

/// KL upper bound for graphs whose differing pairs are all (l,d)-connected:
/// 2 * lambda * |E delta E'| / (1 + ratio).
pub fn kl_upper_bound_ld(lambda: f64, l: usize, d: usize, sym_diff_size: usize) -> Result<f64> {
    check_positive(lambda, "lambda")?;
    if l == 0 || d == 0 {
        return Err(Error::InvalidArgument("l and d must be positive".into()));
    }
    if sym_diff_size == 0 {
        return Ok(0.0);
    }
    let log_r = log_connectivity_ratio(lambda, l as f64, d as f64);
    // 2 / (1 + e^L) = 2 * sigmoid(-L)
    let two_over = 2.0 * (-log_add_exp(0.0, log_r)).exp();
    Ok(lambda * sym_diff_size as f64 * two_over)
}

/// KL upper bound between models differing in exactly one edge:
/// lambda * tanh(lambda).
pub fn kl_upper_bound_hamming1(lambda: f64) -> Result<f64> {
    check_positive(lambda, "lambda")?;
    Ok(lambda * lambda.tanh())
}

/// Counting-only Fano threshold:
/// (ln|G| / p) * ((1 - delta) - ln 2 / ln|G|).
/// Negative (vacuous) values are returned as-is with the vacuous flag.
pub fn fano_counting_threshold(class_size_ln: f64, p: usize, delta: f64) -> Result<BoundReport> {
    if !(class_size_ln >= 2.0f64.ln()) {
        return Err(Error::InvalidArgument(format!(
            "class size must be at least 2 (ln size {class_size_ln})"
        )));
    }
    check_delta(delta)?;
    let value = (class_size_ln / p as f64) * ((1.0 - delta) - 2.0f64.ln() / class_size_ln);
    let term = TermValue::from_value("counting-term", value);
    Ok(BoundReport {
        winning_term: term.name.clone(),
        vacuous: !(value > 0.0),
        n_threshold: value,
        log_n_threshold: term.log_value,
        term_values: vec![term],
        inputs: serde_json::json!({
            "ln_class_size": class_size_ln, "p": p, "delta": delta
        }),
    })
}

/// Single-KL-ball Fano threshold:
/// (ln|T| / rho) * ((1 - delta) - ln 2 / ln|T|).
pub fn fano_single_center_threshold(inputs: FanoInputs) -> Result<BoundReport> {
    if inputs.hypothesis_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "hypothesis count must be at least 2, got {}",
            inputs.hypothesis_count
        )));
    }
    check_positive(inputs.kl_radius, "kl radius rho")?;
    check_delta(inputs.target_error)?;
    let log_t = (inputs.hypothesis_count as f64).ln();
    let value = (log_t / inputs.kl_radius)
        * ((1.0 - inputs.target_error) - 2.0f64.ln() / log_t);
    let term = TermValue::from_value("single-center-term", value);
    Ok(BoundReport {
        winning_term: term.name.clone(),
        vacuous: !(value > 0.0),
        n_threshold: value,
        log_n_threshold: term.log_value,
        term_values: vec![term],
        inputs: serde_json::to_value(inputs)?,
    })
}

/// Exact finite error floor for the single-KL-ball argument:
/// p_avg >= 1 - (n * rho + ln 2) / ln|T|.
pub fn fano_error_floor(n: f64, rho: f64, hypothesis_count: u64) -> f64 {
    let log_t = (hypothesis_count as f64).ln();
    1.0 - (n * rho + 2.0f64.ln()) / log_t
}

/// Path-restricted class: at most eta simple paths between any two
/// vertices. Threshold terms:
///   hamming-term      = ln(p/2) / (lambda tanh lambda)
///   connectivity-term = (1 + cosh(2 lambda)^(eta-1)) / (2 lambda)
///                       * ln(p / (2 (eta + 1)))
pub fn threshold_path_restricted(
    p: usize,
    eta: usize,
    lambda: f64,
    delta: f64,
) -> Result<BoundReport> {
    check_positive(lambda, "lambda")?;
    check_delta(delta)?;
    if eta < 1 {
        return Err(Error::InvalidArgument("eta must be at least 1".into()));
    }
    if eta + 1 > p / 2 {
        return Err(Error::Infeasible(format!(
            "need eta + 1 <= p/2 for at least one block, got eta = {eta}, p = {p}"
        )));
    }
    let pf = p as f64;
    let term1 = TermValue::from_value("hamming-term", (pf / 2.0).ln() / (lambda * lambda.tanh()));
    // log of (1 + cosh(2l)^(eta-1))
    let log_big = log_add_exp(0.0, (eta as f64 - 1.0) * (2.0 * lambda).cosh().ln());
    let log_factor = (pf / (2.0 * (eta as f64 + 1.0))).ln();
    let term2 = TermValue::from_log(
        "connectivity-term",
        log_big - (2.0 * lambda).ln() + log_factor_log(log_factor),
    );
    let inputs = serde_json::json!({"p": p, "eta": eta, "lambda": lambda, "delta": delta});
    Ok(BoundReport::from_terms(vec![term1, term2], delta, inputs))
}

// log of a positive multiplicative factor; NEG_INFINITY for factor <= 0
// keeps vacuous regimes explicit instead of NaN.
fn log_factor_log(factor: f64) -> f64 {
    if factor > 0.0 {
        factor.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Path-length-restricted class: at most eta paths of length at most gamma
/// between any two vertices. t_nu = (p^(1-nu) - (eta+1)) / gamma.
pub fn threshold_path_length(
    p: usize,
    eta: usize,
    gamma: usize,
    nu: f64,
    lambda: f64,
    delta: f64,
) -> Result<BoundReport> {
    check_positive(lambda, "lambda")?;
    check_delta(delta)?;
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!("nu must lie in (0,1), got {nu}")));
    }
    if eta < 1 || gamma < 1 {
        return Err(Error::InvalidArgument("eta and gamma must be at least 1".into()));
    }
    let pf = p as f64;
    let t_nu = (pf.powf(1.0 - nu) - (eta as f64 + 1.0)) / gamma as f64;
    if t_nu < 1.0 {
        return Err(Error::Infeasible(format!(
            "t_nu = (p^(1-nu) - (eta+1))/gamma = {t_nu:.4} < 1; need p^(1-nu) >= eta + 1 + gamma"
        )));
    }
    let term1 = TermValue::from_value("hamming-term", (pf / 2.0).ln() / (lambda * lambda.tanh()));
    let log_big = log_add_exp(
        0.0,
        (eta as f64 - 1.0) * (2.0 * lambda).cosh().ln()
            + log_connectivity_ratio(lambda, gamma as f64 + 1.0, t_nu),
    );
    let term2 = TermValue::from_log(
        "connectivity-term",
        log_big - (2.0 * lambda).ln() + log_factor_log(nu * pf.ln()),
    );
    let inputs = serde_json::json!({
        "p": p, "eta": eta, "gamma": gamma, "nu": nu, "lambda": lambda,
        "delta": delta, "t_nu": t_nu
    });
    Ok(BoundReport::from_terms(vec![term1, term2], delta, inputs))
}

/// Girth-and-degree-bounded class. d_nu = min(d, p^(1-nu)/g).
pub fn threshold_girth(
    p: usize,
    g: usize,
    d: usize,
    nu: f64,
    lambda: f64,
    delta: f64,
) -> Result<BoundReport> {
    check_positive(lambda, "lambda")?;
    check_delta(delta)?;
    if g < 3 {
        return Err(Error::InvalidArgument(format!("girth must be at least 3, got {g}")));
    }
    if d < 1 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!("nu must lie in (0,1), got {nu}")));
    }
    let pf = p as f64;
    let d_nu = (d as f64).min(pf.powf(1.0 - nu) / g as f64);
    if d_nu < 1.0 {
        return Err(Error::Infeasible(format!(
            "d_nu = min(d, p^(1-nu)/g) = {d_nu:.4} < 1"
        )));
    }
    let term1 = TermValue::from_value("hamming-term", (pf / 2.0).ln() / (lambda * lambda.tanh()));
    let log_big = log_add_exp(0.0, log_connectivity_ratio(lambda, g as f64 - 1.0, d_nu));
    let term2 = TermValue::from_log(
        "connectivity-term",
        log_big - (2.0 * lambda).ln() + log_factor_log(nu * pf.ln()),
    );
    let inputs = serde_json::json!({
        "p": p, "g": g, "d": d, "nu": nu, "lambda": lambda, "delta": delta,
        "d_nu": d_nu
    });
    Ok(BoundReport::from_terms(vec![term1, term2], delta, inputs))
}

/// Approximately d-regular class (every degree d or d-1).
pub fn threshold_dregular(p: usize, d: usize, lambda: f64, delta: f64) -> Result<BoundReport> {
    check_positive(lambda, "lambda")?;
    check_delta(delta)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    let pf = p as f64;
    let df = d as f64;
    let log_count = log_factor_log(pf * df / 4.0);
    let term1 = TermValue::from_value("hamming-term", log_count / (lambda * lambda.tanh()));
    // e^(lambda d) / (2 lambda d e^lambda) * ln(pd/4)
    let term2 = TermValue::from_log(
        "connectivity-term",
        lambda * df - (2.0 * lambda * df).ln() - lambda + log_factor_log(log_count),
    );
    let inputs = serde_json::json!({"p": p, "d": d, "lambda": lambda, "delta": delta});
    Ok(BoundReport::from_terms(vec![term1, term2], delta, inputs))
}

/// Approximately edge-bounded class (edge count in [k/2, k]), k >= 9.
pub fn threshold_edge_bounded(p: usize, k: usize, lambda: f64, delta: f64) -> Result<BoundReport> {
    check_positive(lambda, "lambda")?;
    check_delta(delta)?;
    if k < 9 {
        return Err(Error::InvalidArgument(format!(
            "theorem hypothesis requires k >= 9, got {k}"
        )));
    }
    let m = largest_clique_order(k);
    if m < 2 || m > p {
        return Err(Error::Infeasible(format!(
            "clique order m = {m} not realizable on p = {p} vertices"
        )));
    }
    let kf = k as f64;
    let sq = (2.0 * kf).sqrt();
    let log_count = log_factor_log(kf / 2.0);
    let term1 = TermValue::from_value("hamming-term", log_count / (lambda * lambda.tanh()));
    // e^(lambda (sqrt(2k)-1)) / (2 lambda e^lambda (sqrt(2k)+1)) * ln(k/2)
    let term2 = TermValue::from_log(
        "connectivity-term",
        lambda * (sq - 1.0) - (2.0 * lambda).ln() - lambda - (sq + 1.0).ln()
            + log_factor_log(log_count),
    );
    let inputs = serde_json::json!({"p": p, "k": k, "lambda": lambda, "delta": delta, "m": m});
    Ok(BoundReport::from_terms(vec![term1, term2], delta, inputs))
}

/// Largest m with C(m,2) <= k.
pub fn largest_clique_order(k: usize) -> usize {
    let mut m = 2;
    while (m + 1) * m / 2 <= k {
        m += 1;
    }
    m
}
