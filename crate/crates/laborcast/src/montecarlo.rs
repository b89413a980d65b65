//! Seeded simulation experiments: ADF size and power, Johansen rank
//! selection, and the residual battery on white noise.
//!
//! Trial `i` of experiment `e` draws from the ChaCha8 stream
//! `(e << 32) | i` of the master seed, so results do not depend on the
//! order in which trials run or on how many other experiments ran before.

use laborcast_core::cointegration::{engle_granger, johansen_columns, JohansenTrend};
use laborcast_core::critical::Significance;
use laborcast_core::unitroot::{adf, Deterministic};
use laborcast_core::{Period, Series};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::MonteCarloConfig;
use crate::error::Result;

const ADF_SIZE: u64 = 1;
const ADF_POWER: u64 = 2;
const JOHANSEN_COINTEGRATED: u64 = 3;
const JOHANSEN_INDEPENDENT: u64 = 4;
const EG_WHITE_NOISE: u64 = 5;

pub fn trial_rng(seed: u64, experiment: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((experiment << 32) | trial as u64);
    rng
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    normals(rng, n)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

/// Zero-mean AR(1) started from its stationary distribution.
pub fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64) -> Vec<f64> {
    let e = normals(rng, n);
    let mut x = Vec::with_capacity(n);
    let mut prev = e[0] / (1.0 - phi * phi).sqrt();
    x.push(prev);
    for v in &e[1..] {
        prev = phi * prev + v;
        x.push(prev);
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfRates {
    /// 5% rejection frequency on driftless random walks.
    pub size: f64,
    /// 5% rejection frequency on stationary AR(1) series.
    pub power: f64,
}

pub fn adf_size_power(seed: u64, cfg: &MonteCarloConfig) -> Result<AdfRates> {
    let mut size = 0usize;
    let mut power = 0usize;
    for i in 0..cfg.trials {
        let w = random_walk(&mut trial_rng(seed, ADF_SIZE, i), cfg.length);
        size += adf(&w, Deterministic::Constant, cfg.adf_lags)?.reject_at(Significance::Five) as usize;
        let a = ar1(&mut trial_rng(seed, ADF_POWER, i), cfg.length, cfg.ar_coefficient);
        power += adf(&a, Deterministic::Constant, cfg.adf_lags)?.reject_at(Significance::Five) as usize;
    }
    let n = cfg.trials.max(1) as f64;
    Ok(AdfRates { size: size as f64 / n, power: power as f64 / n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohansenRates {
    /// Share of rank-1 systems where rank 1 is selected.
    pub cointegrated_rank1: f64,
    /// Share of independent random-walk pairs where rank 0 is selected.
    pub independent_rank0: f64,
    /// Largest relative gap between a trace statistic and its value rebuilt
    /// from the stored eigenvalues, over all trials.
    pub max_trace_discrepancy: f64,
}

fn trace_discrepancy(r: &laborcast_core::cointegration::JohansenReport) -> f64 {
    let n = r.nobs as f64;
    r.rows
        .iter()
        .filter_map(|row| {
            let t = row.trace_stat?;
            let rebuilt: f64 = r.eigenvalues[row.rank..].iter().map(|l| -n * (1.0 - l).ln()).sum();
            Some((t - rebuilt).abs() / (1.0 + t.abs()))
        })
        .fold(0.0, f64::max)
}

/// `x` a random walk and `y = x + e` with white `e` (rank 1), against two
/// independent walks (rank 0). No deterministic terms.
pub fn johansen_rank_rates(seed: u64, cfg: &MonteCarloConfig) -> Result<JohansenRates> {
    let n = cfg.johansen_length;
    let mut hits1 = 0usize;
    let mut hits0 = 0usize;
    let mut worst = 0.0f64;
    for i in 0..cfg.johansen_trials {
        let mut rng = trial_rng(seed, JOHANSEN_COINTEGRATED, i);
        let x = random_walk(&mut rng, n);
        let y: Vec<f64> = x.iter().zip(normals(&mut rng, n)).map(|(a, e)| a + e).collect();
        let r = johansen_columns(&[x, y], cfg.johansen_max_lag, JohansenTrend::None)?;
        hits1 += (r.selected_rank == 1) as usize;
        worst = worst.max(trace_discrepancy(&r));

        let mut rng = trial_rng(seed, JOHANSEN_INDEPENDENT, i);
        let a = random_walk(&mut rng, n);
        let b = random_walk(&mut rng, n);
        let r = johansen_columns(&[a, b], cfg.johansen_max_lag, JohansenTrend::None)?;
        hits0 += (r.selected_rank == 0) as usize;
        worst = worst.max(trace_discrepancy(&r));
    }
    let t = cfg.johansen_trials.max(1) as f64;
    Ok(JohansenRates { cointegrated_rank1: hits1 as f64 / t, independent_rank0: hits0 as f64 / t, max_trace_discrepancy: worst })
}

/// Share of white-noise "residuals" on which the battery's ADF and PP rows
/// both reject at 1%.
pub fn residual_battery_on_white_noise(seed: u64, cfg: &MonteCarloConfig) -> Result<f64> {
    let mut hits = 0usize;
    for i in 0..cfg.trials {
        let e = normals(&mut trial_rng(seed, EG_WHITE_NOISE, i), cfg.length);
        let s = Series::from_values("u", Period::annual(1900), &e)?;
        hits += engle_granger(&s, 2)?.cointegrated_at_1pct as usize;
    }
    Ok(hits as f64 / cfg.trials.max(1) as f64)
}
