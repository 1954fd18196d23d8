//! Monte Carlo estimators for the quantities that can be checked at
//! laptop scale: laws of large numbers, scaling exponents, tails in the
//! polynomial regime, strategy lower bounds and the non-asymptotic
//! local-time bounds.
//!
//! Replicas draw from independent streams keyed by (master seed, replica
//! index) and are reduced in index order, so results do not depend on the
//! thread count.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ctrw::{log_bessel_kernel, run_vsrw, srw_log_transition};
use crate::error::{ensure, Error, Result};
use crate::exponents::{self, Regime};
use crate::functional::Tape1d;
use crate::lattice::{box_size, BoxIter, Site};
use crate::rng::{derive_seed, purpose, purpose_seed, replica_stream};
use crate::scenery::{Scenery, SceneryField, SceneryLaw};
use crate::stats::{mean_stderr, quantile, slope_fit, wilson_interval, CompensatedSum, SlopeFit, Z95};

/// A Monte Carlo probability with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub replicas: u64,
    pub log_t: f64,
}

impl TailEstimate {
    pub fn from_counts(successes: u64, replicas: u64, log_t: f64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, replicas, Z95);
        TailEstimate {
            probability: successes as f64 / replicas as f64,
            ci_low,
            ci_high,
            successes,
            replicas,
            log_t,
        }
    }

    /// Binomial standard error of the frequency.
    pub fn stderr(&self) -> f64 {
        let p = self.probability;
        (p * (1.0 - p) / self.replicas as f64).sqrt()
    }

    /// Delta-method variance of ln p̂.
    pub fn log_variance(&self) -> f64 {
        let p = self.probability;
        (1.0 - p) / (self.replicas as f64 * p)
    }
}

fn walk_stream(seed: u64, replica: u64) -> rand_chacha::ChaCha8Rng {
    replica_stream(purpose_seed(seed, purpose::WALK), replica)
}

fn field_seed(seed: u64, replica: u64) -> u64 {
    derive_seed(purpose_seed(seed, purpose::FIELD), replica)
}

/// A_u at each checkpoint (sorted, ascending) along one simple random walk
/// from `start`.
pub fn functional_checkpoints<S: Scenery + ?Sized, R: Rng + ?Sized>(
    field: &S,
    start: Site,
    total_rate: f64,
    checkpoints: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let d = start.dim();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = CompensatedSum::new();
    let mut x = start;
    let mut z = field.value(&x);
    let mut t = 0.0;
    let mut next = 0;
    while next < checkpoints.len() {
        let hold: f64 = rng.sample(Exp1);
        let t_jump = t + hold / total_rate;
        while next < checkpoints.len() && checkpoints[next] < t_jump {
            out.push(acc.value() + z * (checkpoints[next] - t));
            next += 1;
        }
        acc.add(z * (t_jump - t));
        t = t_jump;
        let k = rng.random_range(0..2 * d);
        x = x.step(k >> 1, k & 1 == 1);
        z = field.value(&x);
    }
    out
}

/// Local time at the origin at each checkpoint along one walk on Z^dim.
pub fn origin_local_times<R: Rng + ?Sized>(
    dim: usize,
    total_rate: f64,
    checkpoints: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut x = Site::origin(dim);
    let mut at_origin = true;
    let mut ell = 0.0;
    let mut t = 0.0;
    let mut next = 0;
    while next < checkpoints.len() {
        let hold: f64 = rng.sample(Exp1);
        let t_jump = t + hold / total_rate;
        while next < checkpoints.len() && checkpoints[next] < t_jump {
            out.push(if at_origin { ell + checkpoints[next] - t } else { ell });
            next += 1;
        }
        if at_origin {
            ell += t_jump - t;
        }
        t = t_jump;
        let k = rng.random_range(0..2 * dim);
        x = x.step(k >> 1, k & 1 == 1);
        at_origin = x.coords().iter().all(|&c| c == 0);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlnReport {
    pub alpha: f64,
    pub dim: usize,
    pub t: f64,
    pub replicas: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub target: f64,
    pub z_score: f64,
    pub within_3sigma: bool,
}

/// Mean of A_t/t over replicas, each with a fresh Pareto field, against E z = α/(α−1).
pub fn lln_check(alpha: f64, dim: usize, t: f64, replicas: u64, seed: u64) -> Result<LlnReport> {
    ensure(alpha > 1.0, || format!("the law of large numbers needs alpha > 1, got {alpha}"))?;
    lln_check_law(SceneryLaw::ParetoExact, alpha, dim, t, replicas, seed)
}

/// As [`lln_check`] for any scenery law.
pub fn lln_check_law(
    law: SceneryLaw,
    alpha: f64,
    dim: usize,
    t: f64,
    replicas: u64,
    seed: u64,
) -> Result<LlnReport> {
    ensure(replicas >= 2, || "need at least two replicas".into())?;
    ensure(t > 0.0, || format!("t must be positive, got {t}"))?;
    let template = SceneryField { alpha, dim, seed: 0, law };
    template.validate()?;
    let target = template.mean();
    ensure(target.is_finite(), || "the scenery has infinite mean".into())?;
    let ratios: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let field = template.with_seed(field_seed(seed, i));
            let mut rng = walk_stream(seed, i);
            functional_checkpoints(&field, Site::origin(dim), 1.0, &[t], &mut rng)[0] / t
        })
        .collect();
    let (mean, stderr) = mean_stderr(&ratios);
    let z_score = if stderr > 0.0 {
        (mean - target) / stderr
    } else if mean == target {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(LlnReport {
        alpha,
        dim,
        t,
        replicas,
        seed,
        mean,
        stderr,
        ci_low: mean - Z95 * stderr,
        ci_high: mean + Z95 * stderr,
        target,
        z_score,
        within_3sigma: z_score.abs() <= 3.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub alpha: f64,
    pub dim: usize,
    pub quantile: f64,
    pub replicas: u64,
    pub t_grid: Vec<f64>,
    /// Empirical quantile of A_t at each t.
    pub quantiles: Vec<f64>,
    pub fit: SlopeFit,
    /// (α+1)/(2α) for d = 1; the upper bound d/(2α) ∨ 1 for d ≥ 2.
    pub predicted: f64,
    /// True when `predicted` is only an upper bound.
    pub one_sided: bool,
}

/// Checks a t grid for scaling fits: increasing, geometric, at least five points.
pub fn check_geometric_grid(t_grid: &[f64]) -> Result<()> {
    ensure(t_grid.len() >= 5, || format!("t grid needs ≥ 5 points, got {}", t_grid.len()))?;
    ensure(t_grid.iter().all(|&t| t >= 1.0) && t_grid.windows(2).all(|w| w[1] > w[0]), || {
        "t grid must be increasing and ≥ 1".into()
    })?;
    let r0 = t_grid[1] / t_grid[0];
    ensure(
        t_grid.windows(2).all(|w| ((w[1] / w[0]) / r0 - 1.0).abs() < 1e-6),
        || "t grid must be geometric".into(),
    )
}

/// Geometric grid from `lo` to `hi` with `points` entries.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo * (step * i as f64).exp() })
        .collect()
}

/// Standard error of ln of the empirical `q`-quantile from the spread of
/// neighbouring order statistics. `sorted` must be ascending and positive.
fn log_quantile_stderr(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len() as f64;
    let half = Z95 * (n * q * (1.0 - q)).sqrt();
    let lo = ((n * q - half).floor().max(0.0) as usize).min(sorted.len() - 1);
    let hi = ((n * q + half).ceil() as usize).min(sorted.len() - 1);
    (sorted[hi].ln() - sorted[lo].ln()) / (2.0 * Z95)
}

/// Fits the growth exponent of a quantile of A_t. Each replica is one path
/// observed at every t of the grid in a fresh field.
pub fn scaling_exponent_estimate(
    alpha: f64,
    dim: usize,
    t_grid: &[f64],
    replicas: u64,
    q: f64,
    seed: u64,
) -> Result<ScalingReport> {
    scaling_exponent_estimate_law(SceneryLaw::ParetoExact, alpha, dim, t_grid, replicas, q, seed)
}

pub fn scaling_exponent_estimate_law(
    law: SceneryLaw,
    alpha: f64,
    dim: usize,
    t_grid: &[f64],
    replicas: u64,
    q: f64,
    seed: u64,
) -> Result<ScalingReport> {
    check_geometric_grid(t_grid)?;
    ensure(q > 0.0 && q < 1.0, || format!("quantile must lie in (0, 1), got {q}"))?;
    ensure(replicas >= 10, || "need at least ten replicas".into())?;
    let template = SceneryField { alpha, dim, seed: 0, law };
    template.validate()?;
    let paths: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let field = template.with_seed(field_seed(seed, i));
            let mut rng = walk_stream(seed, i);
            functional_checkpoints(&field, Site::origin(dim), 1.0, t_grid, &mut rng)
        })
        .collect();
    let mut quantiles = Vec::with_capacity(t_grid.len());
    let mut vars = Vec::with_capacity(t_grid.len());
    for j in 0..t_grid.len() {
        let mut col: Vec<f64> = paths.iter().map(|p| p[j]).collect();
        quantiles.push(quantile(&mut col, q));
        vars.push(log_quantile_stderr(&col, q).powi(2));
    }
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = quantiles.iter().map(|v| v.ln()).collect();
    let fit = slope_fit(&xs, &ys, &vars);
    let d = dim as f64;
    let (predicted, one_sided) = if dim == 1 {
        ((alpha + 1.0) / (2.0 * alpha), false)
    } else {
        ((d / (2.0 * alpha)).max(1.0), true)
    };
    Ok(ScalingReport {
        alpha,
        dim,
        quantile: q,
        replicas,
        t_grid: t_grid.to_vec(),
        quantiles,
        fit,
        predicted,
        one_sided,
    })
}

/// Which tail event to scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailModel {
    /// {A_t ≥ t^ρ} for the walk in random scenery.
    Rwrs { rho: f64 },
    /// {X_t = t^δ e₁ + t^γ e₂} for the variable speed walk in the layered field.
    Rcm { delta: f64, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailScan {
    pub model: TailModel,
    pub alpha: f64,
    pub dim: usize,
    pub field_seed: u64,
    pub t_grid: Vec<f64>,
    pub estimates: Vec<TailEstimate>,
    /// Slope of ln p̂ against ln t; NaN if some frequency is zero.
    pub fit: Option<SlopeFit>,
    pub floor_exponent: f64,
    /// Whether the lower confidence bound stays above t^(−floor_exponent).
    pub above_floor: Vec<bool>,
}

/// Refuses tail scans outside the regimes where the probability decays polynomially.
pub fn check_polynomial_regime(model: TailModel, alpha: f64, dim: usize) -> Result<()> {
    match model {
        TailModel::Rwrs { rho } => {
            let r = exponents::p_exponent(alpha, rho, dim)?;
            if r.regime != Regime::Polynomial {
                return Err(Error::Refused(format!(
                    "rho = {rho} is in the {} regime where the tail is stretched-exponential; \
                     use the strategy lower bound instead",
                    r.regime
                )));
            }
        }
        TailModel::Rcm { delta, gamma } => {
            let r = exponents::q_closed_form(alpha, delta, dim)?;
            if r.regime != Regime::First || gamma > 0.5 {
                return Err(Error::Refused(format!(
                    "delta = {delta}, gamma = {gamma} is outside the polynomial regime \
                     (need the first q-regime and gamma ≤ 1/2); use the strategy lower bound instead"
                )));
            }
        }
    }
    Ok(())
}

/// Positions of a variable speed walk at each checkpoint.
fn vsrw_checkpoints<S: Scenery + ?Sized, R: Rng + ?Sized>(
    field: &S,
    checkpoints: &[f64],
    rng: &mut R,
) -> Vec<Site> {
    let horizon = *checkpoints.last().expect("nonempty checkpoints");
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut pos = Site::origin(field.dim() + 1);
    let end = run_vsrw(field, pos, horizon, rng, |time, x| {
        while out.len() < checkpoints.len() && checkpoints[out.len()] < time {
            out.push(pos);
        }
        pos = *x;
    });
    while out.len() < checkpoints.len() {
        out.push(end);
    }
    out
}

/// Quenched tail frequencies in one field along a t grid. Each replica is
/// one path observed at every t.
pub fn tail_prob_scan(
    model: TailModel,
    alpha: f64,
    dim: usize,
    t_grid: &[f64],
    replicas: u64,
    field_seed: u64,
    seed: u64,
    floor_exponent: f64,
) -> Result<TailScan> {
    ensure(replicas >= 1, || "replicas must be ≥ 1".into())?;
    ensure(!t_grid.is_empty() && t_grid.windows(2).all(|w| w[1] > w[0]) && t_grid[0] >= 1.0, || {
        "t grid must be nonempty, increasing and ≥ 1".into()
    })?;
    check_polynomial_regime(model, alpha, dim)?;
    let field = SceneryField::pareto(alpha, dim, field_seed)?;
    let counts: Vec<u64> = match model {
        TailModel::Rwrs { rho } => {
            let levels: Vec<f64> = t_grid.iter().map(|t| t.powf(rho)).collect();
            let hits: Vec<Vec<bool>> = (0..replicas)
                .into_par_iter()
                .map(|i| {
                    let mut rng = walk_stream(seed, i);
                    functional_checkpoints(&field, Site::origin(dim), 1.0, t_grid, &mut rng)
                        .iter()
                        .zip(&levels)
                        .map(|(a, l)| a >= l)
                        .collect()
                })
                .collect();
            column_counts(&hits, t_grid.len())
        }
        TailModel::Rcm { delta, gamma } => {
            let targets: Vec<Site> = t_grid
                .iter()
                .map(|&t| crate::chemdist::chemdist_target(t, delta, gamma, dim))
                .collect();
            let hits: Vec<Vec<bool>> = (0..replicas)
                .into_par_iter()
                .map(|i| {
                    let mut rng = walk_stream(seed, i);
                    vsrw_checkpoints(&field, t_grid, &mut rng)
                        .iter()
                        .zip(&targets)
                        .map(|(x, y)| x == y)
                        .collect()
                })
                .collect();
            column_counts(&hits, t_grid.len())
        }
    };
    let estimates: Vec<TailEstimate> = counts
        .iter()
        .zip(t_grid)
        .map(|(&k, t)| TailEstimate::from_counts(k, replicas, t.ln()))
        .collect();
    let above_floor = estimates
        .iter()
        .zip(t_grid)
        .map(|(e, t)| e.ci_low > t.powf(-floor_exponent))
        .collect();
    let fit = (t_grid.len() >= 2 && estimates.iter().all(|e| e.successes > 0)).then(|| {
        let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = estimates.iter().map(|e| e.probability.ln()).collect();
        let vs: Vec<f64> = estimates.iter().map(TailEstimate::log_variance).collect();
        slope_fit(&xs, &ys, &vs)
    });
    Ok(TailScan {
        model,
        alpha,
        dim,
        field_seed,
        t_grid: t_grid.to_vec(),
        estimates,
        fit,
        floor_exponent,
        above_floor,
    })
}

fn column_counts(hits: &[Vec<bool>], cols: usize) -> Vec<u64> {
    let mut c = vec![0u64; cols];
    for row in hits {
        for (j, &h) in row.iter().enumerate() {
            c[j] += h as u64;
        }
    }
    c
}

/// Empirical law of ℓ_w(0) for the simple random walk started at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeTail {
    pub dim: usize,
    pub total_rate: f64,
    pub window: f64,
    /// Sorted ascending.
    pub samples: Vec<f64>,
}

impl LocalTimeTail {
    pub fn simulate(dim: usize, total_rate: f64, window: f64, replicas: u64, seed: u64) -> Self {
        let mut samples: Vec<f64> = (0..replicas)
            .into_par_iter()
            .map(|i| {
                let mut rng = walk_stream(seed, i);
                origin_local_times(dim, total_rate, &[window], &mut rng)[0]
            })
            .collect();
        samples.sort_by(|a, b| a.total_cmp(b));
        LocalTimeTail {
            dim,
            total_rate,
            window,
            samples,
        }
    }

    /// ln of the Wilson lower bound on P(ℓ_w(0) ≥ level).
    pub fn log_tail_lower(&self, level: f64) -> f64 {
        let n = self.samples.len() as u64;
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        let below = self.samples.partition_point(|&v| v < level) as u64;
        wilson_interval(n - below, n, Z95).0.ln()
    }
}

/// ln P₀(ℓ_w(0) ≥ level) for the walk on Z, computed exactly.
///
/// Local time L at 0 is reached by time w iff the excursions away from 0
/// started during the first L units of local time end by w − L. Their number
/// is Poisson(rate·L) and k of them last as long as the hitting time of 0
/// from k, whose law follows from reflection:
/// P(T_k ≤ s) = P(S_s ≥ k) + P(S_s ≥ k + 1). Truncating either series only
/// lowers the result.
pub fn local_time_log_tail_1d(total_rate: f64, window: f64, level: f64) -> f64 {
    if level <= 0.0 {
        return 0.0;
    }
    if level > window {
        return f64::NEG_INFINITY;
    }
    let m = total_rate * level;
    let s = total_rate * (window - level);
    let k_max = (m + 12.0 * m.sqrt() + 30.0).ceil() as usize;
    let n_max = k_max + 1 + (12.0 * s.sqrt() + 30.0).ceil() as usize;
    let log_p: Vec<f64> = (0..=n_max).map(|n| log_bessel_kernel(s, n as i64)).collect();
    let mut tail = vec![f64::NEG_INFINITY; n_max + 2];
    for n in (0..=n_max).rev() {
        tail[n] = log_add(tail[n + 1], log_p[n]);
    }
    let terms = (0..=k_max).map(|k| {
        let log_pmf = -m + k as f64 * m.ln() - statrs::function::gamma::ln_gamma(k as f64 + 1.0);
        let hit = if k == 0 { 0.0 } else { log_add(tail[k], tail[k + 1]) };
        log_pmf + hit
    });
    log_sum(terms)
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn log_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Tuning of the strategy lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub total_rate: f64,
    /// Evaluate at most `top_k` candidate sites; 0 means all.
    pub top_k: usize,
    /// Also require the walk to be back at 0 at time t.
    pub bridge: bool,
    pub site_budget: u128,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            total_rate: 1.0,
            top_k: 0,
            bridge: false,
            site_budget: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyBound {
    pub alpha: f64,
    pub dim: usize,
    pub rho: f64,
    pub t: f64,
    pub field_seed: u64,
    /// ln of the lower bound on P₀(A_t ≥ t^ρ).
    pub log_bound: f64,
    /// ln(−log_bound)/ln t, the stretched-exponential exponent the bound certifies.
    pub exponent: f64,
    pub p_exponent: f64,
    pub site: Site,
    pub z: f64,
    pub local_time_needed: f64,
    pub search_radius: u64,
    pub candidates: usize,
}

/// Lower bound on ln P₀(A_t ≥ t^ρ) in a fixed field from the strategy:
/// travel to a site x with a large value z(x) by time t/4, then collect the
/// local time L = t^ρ/z(x) there in the remaining time. Since z ≥ 1 this
/// forces A_t ≥ z(x)L = t^ρ.
///
/// For each candidate x the bound is `ln p_{t/4}(0, x) + ln P_x(ℓ_{3t/4}(x) ≥ L)`.
/// The local-time probability is exact in d = 1; for d ≥ 2 it is the larger
/// of the stay probability e^{−rate·L} and the Wilson lower bound from a
/// supplied tail sample of window 3t/4. With `bridge` the walk instead stays
/// put for L and then returns: `ln p_{t/4}(0, x) − rate·L + ln p_{3t/4−L}(x, 0)`,
/// with L ≤ t/4.
///
/// Candidates are the sites in the box of radius ⌈t^μ⌉, μ the optimal search
/// exponent, whose value beats every site closer to 0 in ℓ¹; the box doubles
/// until a feasible site appears. Dropping candidates only weakens the bound.
pub fn strategy_lower_bound(
    alpha: f64,
    dim: usize,
    rho: f64,
    t: f64,
    field_seed: u64,
    cfg: &StrategyConfig,
    tail: Option<&LocalTimeTail>,
) -> Result<StrategyBound> {
    let field = SceneryField::pareto(alpha, dim, field_seed)?;
    strategy_lower_bound_in(&field, alpha, rho, t, field_seed, cfg, tail)
}

pub fn strategy_lower_bound_in<S: Scenery + ?Sized>(
    field: &S,
    alpha: f64,
    rho: f64,
    t: f64,
    field_seed: u64,
    cfg: &StrategyConfig,
    tail: Option<&LocalTimeTail>,
) -> Result<StrategyBound> {
    let dim = field.dim();
    ensure(t >= 4.0, || format!("strategy needs t ≥ 4, got {t}"))?;
    let p = exponents::p_exponent(alpha, rho, dim)?;
    let mu = match p.regime {
        Regime::First => exponents::optimal_mu(alpha, rho, dim)?,
        Regime::Second => alpha * (rho - 1.0) / dim as f64,
        other => {
            return Err(Error::RegimeMismatch {
                message: format!("rho = {rho} is in the {other} regime"),
                hint: "the strategy bound covers the first and second p-regimes".into(),
            })
        }
    };
    let rate = cfg.total_rate;
    let travel = t / 4.0;
    let window = if cfg.bridge { t / 4.0 } else { t - travel };
    if let Some(tail) = tail {
        ensure(
            tail.dim == dim && tail.total_rate == rate && tail.window == window,
            || "local-time tail sample does not match (dim, rate, 3t/4)".into(),
        )?;
    }
    let hold = |need: f64, w: f64| -> f64 {
        if cfg.bridge {
            -rate * need
        } else if dim == 1 {
            local_time_log_tail_1d(rate, w, need)
        } else {
            let sampled = tail
                .filter(|s| s.window == w)
                .map_or(f64::NEG_INFINITY, |s| s.log_tail_lower(need));
            sampled.max(-rate * need)
        }
    };
    let level = t.powf(rho);
    let min_z = level / window;
    let mut radius = t.powf(mu).ceil() as u64;
    let candidates = loop {
        let needed = box_size(dim, radius);
        if needed > cfg.site_budget {
            return Err(Error::Resource {
                needed,
                budget: cfg.site_budget,
            });
        }
        let mut c: Vec<(i64, f64, Site)> = BoxIter::cube(dim, radius)
            .filter_map(|x| {
                let z = field.value(&x);
                (z >= min_z).then(|| (x.l1(), z, x))
            })
            .collect();
        if !c.is_empty() {
            c.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
            let mut record = 0.0;
            c.retain(|&(_, z, _)| {
                let keep = z > record;
                record = record.max(z);
                keep
            });
            if cfg.top_k > 0 {
                c.truncate(cfg.top_k);
            }
            break c;
        }
        radius *= 2;
    };
    let mut best = (f64::NEG_INFINITY, candidates[0].2, candidates[0].1);
    for &(_, z, x) in &candidates {
        let need = level / z;
        let mut lb = srw_log_transition(rate, travel, &x) + hold(need, window);
        if cfg.bridge {
            lb += srw_log_transition(rate, t - travel - need, &x);
        }
        if x.l1() == 0 {
            // Collecting from time 0 needs no travel.
            let direct = if cfg.bridge {
                -rate * need + srw_log_transition(rate, t - need, &x)
            } else {
                hold(need, t)
            };
            lb = lb.max(direct);
        }
        if lb > best.0 {
            best = (lb, x, z);
        }
    }
    let (log_bound, site, z) = best;
    let exponent = if log_bound < 0.0 {
        (-log_bound).ln() / t.ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(StrategyBound {
        alpha,
        dim,
        rho,
        t,
        field_seed,
        log_bound,
        exponent,
        p_exponent: p.value_or_zero(),
        site,
        z,
        local_time_needed: level / z,
        search_radius: radius,
        candidates: candidates.len(),
    })
}

/// Parameters of the non-asymptotic local-time tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChenParams {
    pub lambda: f64,
    /// Upper bound a(t/b) on sup_{x ∈ supp f} E_x ∫₀^{t/b} f(S_u) du.
    pub a_value: f64,
    pub b_value: f64,
}

/// ln of 2^{1/2} e^{1/(24(b−1))} (λe/4)^{−b+1}.
pub fn chen_log_bound(params: &ChenParams) -> Result<f64> {
    let ChenParams { lambda, b_value: b, .. } = *params;
    ensure(b > 1.0, || format!("b must exceed 1, got {b}"))?;
    ensure(lambda > 0.0, || format!("lambda must be positive, got {lambda}"))?;
    Ok(0.5 * std::f64::consts::LN_2 + 1.0 / (24.0 * (b - 1.0))
        - (b - 1.0) * (lambda.ln() + 1.0 - 4f64.ln()))
}

/// 2^{1/2} e^{1/(24(b−1))} (λe/4)^{−b+1}; may exceed 1.
pub fn chen_bound(params: &ChenParams) -> Result<f64> {
    Ok(chen_log_bound(params)?.exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChenCheck {
    pub t: f64,
    pub b_value: f64,
    pub lambda: f64,
    pub a_value: f64,
    pub threshold: f64,
    pub mc: TailEstimate,
    pub bound: f64,
    pub violated: bool,
}

/// a(t/b) for f = 1_{0}: a pilot estimate of E₀ ℓ_{t/b}(0) plus three
/// standard errors, floored just above 1 as the bound requires a > 1.
pub fn chen_a_values(
    dim: usize,
    t: f64,
    b_values: &[f64],
    pilot_replicas: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    ensure(b_values.iter().all(|&b| b > 1.0), || "every b must exceed 1".into())?;
    ensure(pilot_replicas >= 2, || "pilot needs at least two replicas".into())?;
    let mut order: Vec<usize> = (0..b_values.len()).collect();
    order.sort_by(|&i, &j| b_values[j].total_cmp(&b_values[i]));
    let checkpoints: Vec<f64> = order.iter().map(|&i| t / b_values[i]).collect();
    let pilot_seed = purpose_seed(seed, purpose::PILOT);
    let samples: Vec<Vec<f64>> = (0..pilot_replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_stream(pilot_seed, i);
            origin_local_times(dim, 1.0, &checkpoints, &mut rng)
        })
        .collect();
    let mut a = vec![0.0; b_values.len()];
    for (j, &i) in order.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|s| s[j]).collect();
        let (m, se) = mean_stderr(&col);
        a[i] = (m + 3.0 * se).max(1.0 + f64::EPSILON);
    }
    Ok(a)
}

/// Samples of ℓ_t(0) at each t of a list, one path per replica.
pub fn origin_local_time_samples(dim: usize, ts: &[f64], replicas: u64, seed: u64) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_stream(seed, i);
            origin_local_times(dim, 1.0, ts, &mut rng)
        })
        .collect();
    (0..ts.len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

/// Compares the frequency of {ℓ_t(0) ≥ λ a b} from `samples` of ℓ_t(0)
/// with the bound, for every (b, λ).
pub fn chen_verify_samples(
    t: f64,
    samples: &[f64],
    b_values: &[f64],
    a_values: &[f64],
    lambdas: &[f64],
) -> Result<Vec<ChenCheck>> {
    let n = samples.len() as u64;
    let mut out = Vec::new();
    for (&b, &a) in b_values.iter().zip(a_values) {
        for &lambda in lambdas {
            let params = ChenParams { lambda, a_value: a, b_value: b };
            let bound = chen_bound(&params)?;
            let threshold = lambda * a * b;
            let k = samples.iter().filter(|&&v| v >= threshold).count() as u64;
            let mc = TailEstimate::from_counts(k, n, t.ln());
            out.push(ChenCheck {
                t,
                b_value: b,
                lambda,
                a_value: a,
                threshold,
                bound,
                violated: mc.probability > bound,
                mc,
            });
        }
    }
    Ok(out)
}

/// Runs the local-time tail check for f = 1_{0} at one t.
pub fn chen_verify(
    dim: usize,
    t: f64,
    b_values: &[f64],
    lambdas: &[f64],
    replicas: u64,
    seed: u64,
) -> Result<Vec<ChenCheck>> {
    ensure(replicas >= 1, || "replicas must be ≥ 1".into())?;
    let pilot = (replicas / 10).max(1000);
    let a = chen_a_values(dim, t, b_values, pilot, seed)?;
    let samples = origin_local_time_samples(dim, &[t], replicas, seed).remove(0);
    chen_verify_samples(t, &samples, b_values, &a, lambdas)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhasminskiiCheck {
    pub t: f64,
    pub m: u32,
    /// max over support sites of the MC estimate of E_x[(∫₀ᵗ f)^m].
    pub lhs: f64,
    pub lhs_rel_stderr: f64,
    /// m! (max_x MC E_x ∫₀ᵗ f)^m.
    pub rhs_raw: f64,
    /// `rhs_raw` inflated by three relative standard errors.
    pub rhs: f64,
    pub ratio: f64,
    pub violated: bool,
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Moment bound check from samples of ∫₀ᵗ f: `samples[k]` holds the samples
/// started from the k-th support site.
pub fn khasminskii_from_samples(t: f64, samples: &[Vec<f64>], m: u32) -> Result<KhasminskiiCheck> {
    ensure(!samples.is_empty() && samples.iter().all(|s| s.len() >= 2), || {
        "need samples from at least one site".into()
    })?;
    ensure((1..=4).contains(&m), || format!("m must lie in 1..=4, got {m}"))?;
    let mut lhs = (f64::NEG_INFINITY, 0.0);
    let mut first = (f64::NEG_INFINITY, 0.0);
    for s in samples {
        let powers: Vec<f64> = s.iter().map(|v| v.powi(m as i32)).collect();
        let (mm, mse) = mean_stderr(&powers);
        if mm > lhs.0 {
            lhs = (mm, mse);
        }
        let (m1, se1) = mean_stderr(s);
        if m1 > first.0 {
            first = (m1, se1);
        }
    }
    let rel = |(v, se): (f64, f64)| if v > 0.0 { se / v } else { 0.0 };
    let rel_total = rel(lhs).hypot(m as f64 * rel(first));
    let rhs_raw = factorial(m) * first.0.powi(m as i32);
    let rhs = rhs_raw * (1.0 + 3.0 * rel_total);
    Ok(KhasminskiiCheck {
        t,
        m,
        lhs: lhs.0,
        lhs_rel_stderr: rel(lhs),
        rhs_raw,
        rhs,
        ratio: if rhs_raw > 0.0 { lhs.0 / rhs_raw } else { f64::NAN },
        violated: lhs.0 > rhs,
    })
}

/// Samples of ∫₀ᵗ 1_{support}(S_u) du from each support site.
pub fn occupation_samples(
    support: &[Site],
    t: f64,
    replicas: u64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let set: std::collections::HashSet<Site> = support.iter().copied().collect();
    support
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let s = derive_seed(seed, k as u64);
            (0..replicas)
                .into_par_iter()
                .map(|i| {
                    let mut rng = walk_stream(s, i);
                    occupation_of(&set, x, 1.0, t, &mut rng)
                })
                .collect()
        })
        .collect()
}

fn occupation_of<R: Rng + ?Sized>(
    set: &std::collections::HashSet<Site>,
    start: Site,
    total_rate: f64,
    t: f64,
    rng: &mut R,
) -> f64 {
    let d = start.dim();
    let mut x = start;
    let mut inside = set.contains(&x);
    let mut now = 0.0;
    let mut acc = 0.0;
    loop {
        let hold: f64 = rng.sample(Exp1);
        let next = (now + hold / total_rate).min(t);
        if inside {
            acc += next - now;
        }
        if next >= t {
            return acc;
        }
        now = next;
        let k = rng.random_range(0..2 * d);
        x = x.step(k >> 1, k & 1 == 1);
        inside = set.contains(&x);
    }
}

/// Moment bound check for f = 1_{support}.
pub fn khasminskii_verify(
    support: &[Site],
    t: f64,
    m: u32,
    replicas: u64,
    seed: u64,
) -> Result<KhasminskiiCheck> {
    ensure(replicas >= 2, || "need at least two replicas".into())?;
    khasminskii_from_samples(t, &occupation_samples(support, t, replicas, seed), m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOccupationPoint {
    pub t: f64,
    pub threshold: f64,
    pub box_radius: u64,
    /// Mean over fields of sup_{x ∈ H_k, |x| ≤ box} of the MC estimate of E_x ℓ_{t^η}(H_k).
    pub mean_sup: f64,
    pub stderr: f64,
    pub mean_level_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOccupationReport {
    pub alpha: f64,
    pub dim: usize,
    pub eta: f64,
    pub k_eps: f64,
    pub points: Vec<LevelOccupationPoint>,
    pub fit: SlopeFit,
    /// η/2 for d = 1, 0 for d ≥ 2 (up to logarithms and t^{ε'}).
    pub rate_exponent: f64,
}

/// Tuning of [`level_mean_occupation`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOccupationConfig {
    /// Search box radius ⌈t^box_exponent⌉.
    pub box_exponent: f64,
    pub fields: u64,
    pub paths_per_site: u64,
    /// Largest number of level-set sites evaluated per field (largest values first); 0 means all.
    pub max_sites: usize,
}

impl Default for LevelOccupationConfig {
    fn default() -> Self {
        LevelOccupationConfig {
            box_exponent: 1.0,
            fields: 10,
            paths_per_site: 200,
            max_sites: 0,
        }
    }
}

/// Whether (η, kε) satisfy the hypothesis kε > η/(2α) (d = 1) or kε > η/α (d ≥ 2).
pub fn level_hypothesis_holds(alpha: f64, dim: usize, eta: f64, k_eps: f64) -> bool {
    if dim == 1 {
        k_eps > eta / (2.0 * alpha)
    } else {
        k_eps > eta / alpha
    }
}

/// Membership in {z ≥ threshold}, cached on a box and hashed outside it.
struct LevelMembership<'a, S: Scenery + ?Sized> {
    field: &'a S,
    threshold: f64,
    radius: i64,
    side: usize,
    dense: Vec<bool>,
}

impl<'a, S: Scenery + ?Sized> LevelMembership<'a, S> {
    fn new(field: &'a S, threshold: f64, radius: u64, dense_budget: u128) -> Self {
        let dim = field.dim();
        let side = 2 * radius as usize + 1;
        let dense = if box_size(dim, radius) <= dense_budget {
            BoxIter::cube(dim, radius)
                .map(|x| field.value(&x) >= threshold)
                .collect()
        } else {
            Vec::new()
        };
        LevelMembership {
            field,
            threshold,
            radius: radius as i64,
            side,
            dense,
        }
    }

    #[inline]
    fn contains(&self, x: &Site) -> bool {
        if !self.dense.is_empty() && x.linf() <= self.radius {
            let idx = x
                .coords()
                .iter()
                .fold(0usize, |acc, &c| acc * self.side + (c + self.radius) as usize);
            return self.dense[idx];
        }
        self.field.value(x) >= self.threshold
    }
}

fn level_occupation_path<S: Scenery + ?Sized, R: Rng + ?Sized>(
    h: &LevelMembership<'_, S>,
    start: Site,
    horizon: f64,
    rng: &mut R,
) -> f64 {
    let d = start.dim();
    let mut x = start;
    let mut inside = h.contains(&x);
    let mut now = 0.0;
    let mut acc = 0.0;
    loop {
        let hold: f64 = rng.sample(Exp1);
        let next = (now + hold).min(horizon);
        if inside {
            acc += next - now;
        }
        if next >= horizon {
            return acc;
        }
        now = next;
        let k = rng.random_range(0..2 * d);
        x = x.step(k >> 1, k & 1 == 1);
        inside = h.contains(&x);
    }
}

/// Growth of sup_x E_x ℓ_{t^η}(H_k) with H_k = {z ≥ t^{kε}}, over a t grid.
///
/// Starting outside H_k the walk must first hit it, so by the strong Markov
/// property the supremum over the box is attained at a start inside H_k.
pub fn level_mean_occupation(
    alpha: f64,
    dim: usize,
    eta: f64,
    k_eps: f64,
    t_grid: &[f64],
    cfg: &LevelOccupationConfig,
    seed: u64,
) -> Result<LevelOccupationReport> {
    ensure(alpha > 0.0 && eta > 0.0, || "alpha and eta must be positive".into())?;
    if !level_hypothesis_holds(alpha, dim, eta, k_eps) {
        return Err(crate::error::domain(format!(
            "k·eps = {k_eps} violates the hypothesis k·eps > {}",
            if dim == 1 { eta / (2.0 * alpha) } else { eta / alpha }
        )));
    }
    ensure(t_grid.len() >= 2 && t_grid.iter().all(|&t| t > 1.0), || {
        "t grid needs at least two points above 1".into()
    })?;
    ensure(cfg.fields >= 1 && cfg.paths_per_site >= 1, || "fields and paths must be ≥ 1".into())?;
    let mut points = Vec::with_capacity(t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let threshold = t.powf(k_eps);
        let radius = t.powf(cfg.box_exponent).ceil() as u64;
        let horizon = t.powf(eta);
        let per_field: Vec<(f64, usize)> = (0..cfg.fields)
            .map(|s| {
                let fs = field_seed(derive_seed(seed, ti as u64), s);
                let field = SceneryField::pareto(alpha, dim, fs).expect("validated");
                let h = LevelMembership::new(&field, threshold, radius, 1 << 26);
                let mut sites: Vec<(f64, Site)> = BoxIter::cube(dim, radius)
                    .filter(|x| h.contains(x))
                    .map(|x| (field.value(&x), x))
                    .collect();
                sites.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                let count = sites.len();
                if cfg.max_sites > 0 {
                    sites.truncate(cfg.max_sites);
                }
                let walk_seed = derive_seed(derive_seed(seed, ti as u64), s);
                let sup = sites
                    .iter()
                    .enumerate()
                    .map(|(k, &(_, x))| {
                        let ss = derive_seed(walk_seed, k as u64);
                        let occ: Vec<f64> = (0..cfg.paths_per_site)
                            .into_par_iter()
                            .map(|i| {
                                let mut rng = walk_stream(ss, i);
                                level_occupation_path(&h, x, horizon, &mut rng)
                            })
                            .collect();
                        occ.iter().copied().collect::<CompensatedSum>().value() / occ.len() as f64
                    })
                    .fold(0.0, f64::max);
                (sup, count)
            })
            .collect();
        let sups: Vec<f64> = per_field.iter().map(|p| p.0).collect();
        let (mean_sup, stderr) = if sups.len() >= 2 {
            mean_stderr(&sups)
        } else {
            (sups[0], 0.0)
        };
        points.push(LevelOccupationPoint {
            t,
            threshold,
            box_radius: radius,
            mean_sup,
            stderr,
            mean_level_size: per_field.iter().map(|p| p.1 as f64).sum::<f64>() / per_field.len() as f64,
        });
    }
    ensure(points.iter().all(|p| p.mean_sup > 0.0), || {
        "some level set was empty in every field; enlarge the box or the field count".into()
    })?;
    let xs: Vec<f64> = points.iter().map(|p| p.t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_sup.ln()).collect();
    let vs: Vec<f64> = points.iter().map(|p| (p.stderr / p.mean_sup).powi(2)).collect();
    Ok(LevelOccupationReport {
        alpha,
        dim,
        eta,
        k_eps,
        points,
        fit: slope_fit(&xs, &ys, &vs),
        rate_exponent: if dim == 1 { eta / 2.0 } else { 0.0 },
    })
}

/// Exact p_t(0, x) on Z for total rate 1, re-exported for reports.
pub fn exact_transition_1d(t: f64, n: i64) -> f64 {
    log_bessel_kernel(t, n).exp()
}

/// Dense local times on Z along one walk, for reports and debugging.
pub fn local_time_tape_1d<R: Rng + ?Sized>(total_rate: f64, horizon: f64, rng: &mut R) -> Tape1d {
    let mut tape = Tape1d::new();
    let mut x = 0i64;
    let mut t = 0.0;
    loop {
        let hold: f64 = rng.sample(Exp1);
        let next = (t + hold / total_rate).min(horizon);
        tape.add(x, next - t);
        if next >= horizon {
            return tape;
        }
        t = next;
        x += if rng.random::<bool>() { 1 } else { -1 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chen_examples() {
        let p = ChenParams { lambda: 4.0 / std::f64::consts::E, a_value: 2.0, b_value: 2.0 };
        let want = 2f64.sqrt() * (1.0f64 / 24.0).exp();
        assert!((chen_bound(&p).unwrap() - want).abs() < 1e-12);
        assert!((want - 1.4744).abs() < 1e-4);
        let p = ChenParams { lambda: 4.0, a_value: 2.0, b_value: 11.0 };
        let want = 2f64.sqrt() * (1.0f64 / 240.0).exp() * (-10.0f64).exp();
        assert!((chen_bound(&p).unwrap() - want).abs() < 1e-17);
        let p = ChenParams { lambda: 1e12, a_value: 2.0, b_value: 3.0 };
        assert!(chen_bound(&p).unwrap() < 1e-20);
        let p = ChenParams { lambda: 4.0, a_value: 2.0, b_value: 1.0 };
        assert!(chen_bound(&p).is_err());
    }

    #[test]
    fn checkpoints_match_path_functional() {
        let f = SceneryField::pareto(0.7, 1, 11).unwrap();
        let cps = [1.0, 5.0, 20.0];
        let a = functional_checkpoints(&f, Site::origin(1), 1.0, &cps, &mut replica_stream(4, 0));
        let path = crate::ctrw::simulate_srw(1, 1.0, 20.0, &mut replica_stream(4, 0));
        for (k, &c) in cps.iter().enumerate() {
            let b = crate::functional::additive_functional(&f, &path, c).unwrap();
            assert!((a[k] - b).abs() <= 1e-9 * b, "{} vs {}", a[k], b);
        }
    }

    #[test]
    fn origin_local_time_matches_path() {
        let cps = [3.0, 30.0];
        let a = origin_local_times(2, 1.0, &cps, &mut replica_stream(9, 2));
        let path = crate::ctrw::simulate_srw(2, 1.0, 30.0, &mut replica_stream(9, 2));
        for (k, &c) in cps.iter().enumerate() {
            let lt = crate::functional::local_times(&path, c).unwrap();
            assert!((a[k] - lt.get(&Site::origin(2))).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_field_lln_is_exact() {
        let r = lln_check_law(SceneryLaw::Constant { value: 1.0 }, 1.0, 1, 100.0, 20, 3).unwrap();
        assert!(r.mean == 1.0 && r.stderr == 0.0 && r.within_3sigma);
        assert!(lln_check(1.0, 1, 100.0, 20, 3).is_err());
    }

    #[test]
    fn refusal_outside_polynomial_regime() {
        let e = tail_prob_scan(TailModel::Rwrs { rho: 1.6 }, 0.5, 1, &[10.0, 20.0], 10, 1, 1, 6.0);
        assert!(matches!(e, Err(Error::Refused(_))));
        let e = tail_prob_scan(TailModel::Rcm { delta: 1.0, gamma: 0.0 }, 1.0, 1, &[10.0], 10, 1, 1, 6.0);
        assert!(matches!(e, Err(Error::Refused(_))));
    }

    #[test]
    fn trivial_tail_below_one() {
        let s = tail_prob_scan(TailModel::Rwrs { rho: 0.9 }, 0.5, 1, &[2.0, 10.0, 50.0], 200, 1, 1, 6.0)
            .unwrap();
        assert!(s.estimates.iter().all(|e| e.probability == 1.0));
    }

    #[test]
    fn exact_local_time_tail_matches_simulation() {
        let w = 30.0;
        let mc = LocalTimeTail::simulate(1, 1.0, w, 200_000, 8);
        for level in [0.5, 2.0, 5.0, 10.0] {
            let exact = local_time_log_tail_1d(1.0, w, level).exp();
            let k = mc.samples.iter().filter(|&&v| v >= level).count() as u64;
            let est = TailEstimate::from_counts(k, 200_000, 0.0);
            let sigma = (exact * (1.0 - exact) / 200_000.0).sqrt();
            assert!((est.probability - exact).abs() < 4.0 * sigma, "L = {level}: {} vs {exact}", est.probability);
        }
        assert_eq!(local_time_log_tail_1d(1.0, w, 0.0), 0.0);
        assert_eq!(local_time_log_tail_1d(1.0, w, 31.0), f64::NEG_INFINITY);
        // Holding for the whole window is the k = 0 term alone.
        assert!((local_time_log_tail_1d(2.0, w, w) - (-2.0 * w)).abs() < 1e-9);
    }

    #[test]
    fn strategy_at_origin_is_the_stay_probability() {
        let mut f = crate::scenery::TableScenery::new(2, 1.0);
        f.set(Site::origin(2), 1e6);
        let t = 16.0;
        let b = strategy_lower_bound_in(&f, 1.0, 1.5, t, 0, &StrategyConfig::default(), None).unwrap();
        assert_eq!(b.site, Site::origin(2));
        assert!((b.log_bound + t.powf(1.5) / 1e6).abs() < 1e-15);
    }

    #[test]
    fn strategy_is_a_lower_bound_on_a_toy_field() {
        // z = 40 at the origin only; t^ρ = 8^1.5 ≈ 22.6 needs ℓ_8(0) ≥ 0.57.
        let mut f = crate::scenery::TableScenery::new(1, 1.0);
        f.set(Site::origin(1), 40.0);
        let b = strategy_lower_bound_in(&f, 1.0, 1.5, 8.0, 0, &StrategyConfig::default(), None).unwrap();
        let n = 100_000;
        let hits = (0..n)
            .filter(|&i| {
                let a = functional_checkpoints(&f, Site::origin(1), 1.0, &[8.0], &mut replica_stream(12, i));
                a[0] >= 8f64.powf(1.5)
            })
            .count() as u64;
        let mc = TailEstimate::from_counts(hits, n, 0.0);
        assert!(b.log_bound.exp() <= mc.ci_high, "{} > {}", b.log_bound.exp(), mc.ci_high);
    }

    #[test]
    fn grids() {
        let g = geometric_grid(1e2, 1e5, 7);
        assert_eq!(g.len(), 7);
        assert!((g[2] - 1e3).abs() < 1e-9);
        check_geometric_grid(&g).unwrap();
        assert!(check_geometric_grid(&[1.0, 2.0, 3.0, 4.0, 5.0]).is_err());
        assert!(check_geometric_grid(&g[..4]).is_err());
    }
}
