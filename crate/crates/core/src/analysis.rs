//! Closed-form load calculators and Monte Carlo checks of the coded scheme's message count.

use num_integer::binomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{er_allocate, MultiplicityProfile};
use crate::error::{Error, Result};
use crate::graphs::gen_er;
use crate::shuffle::{all_records, build_z_set};
use crate::workers::WorkerSet;

/// Normalized loads for one parameter point. `lower` is `None` where no converse is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSet {
    pub uncoded: f64,
    pub coded_upper: f64,
    pub lower: Option<f64>,
}

fn check_workers(workers: usize, load: usize) -> Result<()> {
    if workers == 0 || load == 0 || load > workers {
        return Err(Error::param(format!("need 1 <= r <= K, got r = {load}, K = {workers}")));
    }
    Ok(())
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::param(format!("{name} = {x} must lie in (0, 1]")));
    }
    Ok(())
}

/// `(1/r)(1 - r/K)`, the coded scaling shared by every model.
fn coded_factor(workers: usize, load: usize) -> f64 {
    (1.0 - load as f64 / workers as f64) / load as f64
}

/// Erdos-Renyi: uncoded `p(1 - r/K)`, coded and converse both `(1/r) p (1 - r/K)`.
pub fn er_bounds(p: f64, workers: usize, load: usize) -> Result<BoundSet> {
    check_probability("p", p)?;
    check_workers(workers, load)?;
    let coded = p * coded_factor(workers, load);
    Ok(BoundSet {
        uncoded: p * (1.0 - load as f64 / workers as f64),
        coded_upper: coded,
        lower: Some(coded),
    })
}

/// Balanced random bipartite graph: upper `(1/(2r)) q (1 - 2r/K)`, lower a quarter of that.
pub fn rb_bounds(q: f64, workers: usize, load: usize) -> Result<BoundSet> {
    check_probability("q", q)?;
    check_workers(workers, load)?;
    if 2 * load > workers {
        return Err(Error::param(format!("the bipartite bounds need 2r <= K, got r = {load}, K = {workers}")));
    }
    let shrink = 1.0 - 2.0 * load as f64 / workers as f64;
    let upper = q * shrink / (2.0 * load as f64);
    Ok(BoundSet {
        uncoded: q * shrink / 2.0,
        coded_upper: upper,
        lower: Some(upper / 4.0),
    })
}

/// Two-block model: upper `(1/r)(1 - r/K) (p n1^2 + p n2^2 + 2 q n1 n2) / n^2`,
/// lower `(q/r)(1 - r/K)`.
pub fn sbm_bounds(n1: usize, n2: usize, p: f64, q: f64, workers: usize, load: usize) -> Result<BoundSet> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    if q >= p {
        return Err(Error::param(format!("need q < p, got p = {p}, q = {q}")));
    }
    check_workers(workers, load)?;
    let (a, b) = (n1 as f64, n2 as f64);
    let density = (p * a * a + p * b * b + 2.0 * q * a * b) / ((a + b) * (a + b));
    let factor = coded_factor(workers, load);
    Ok(BoundSet {
        uncoded: (1.0 - load as f64 / workers as f64) * density,
        coded_upper: factor * density,
        lower: Some(q * factor),
    })
}

/// Power-law model, on the `n L` scale: `(1/r)(1 - r/K) (gamma - 1)/(gamma - 2)` coded and
/// `(1 - r/K) (gamma - 1)/(gamma - 2)` uncoded.
pub fn pl_bounds(gamma: f64, workers: usize, load: usize) -> Result<BoundSet> {
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(Error::param(format!("gamma = {gamma} must exceed 2")));
    }
    check_workers(workers, load)?;
    let mean_degree = (gamma - 1.0) / (gamma - 2.0);
    Ok(BoundSet {
        uncoded: (1.0 - load as f64 / workers as f64) * mean_degree,
        coded_upper: coded_factor(workers, load) * mean_degree,
        lower: None,
    })
}

/// `p * sum_j (a[j]/n) (K - j)/(K j)` for any Map allocation with profile `a`.
pub fn allocation_lower_bound(profile: &MultiplicityProfile, p: f64, workers: usize, n: usize) -> Result<f64> {
    check_probability("p", p)?;
    if profile.workers() != workers {
        return Err(Error::param(format!(
            "profile has {} entries for K = {workers}",
            profile.workers()
        )));
    }
    if profile.vertices() != n || n == 0 {
        return Err(Error::param(format!("profile counts {} vertices, expected n = {n}", profile.vertices())));
    }
    let k = workers as f64;
    Ok(p * (1..=workers)
        .map(|j| profile.get(j) as f64 / n as f64 * (k - j as f64) / (k * j as f64))
        .sum::<f64>())
}

/// Largest possible Z-set size `n^2 / (K C(K, r))`.
pub fn max_z_size(n: usize, workers: usize, load: usize) -> f64 {
    (n as f64).powi(2) / (workers as f64 * binomial(workers, load) as f64)
}

/// Upper edge `1 + 3 sqrt(ln r / (g p))` of the finite-size window for the message-count ratio.
pub fn q_ratio_window(n: usize, p: f64, workers: usize, load: usize) -> f64 {
    1.0 + 3.0 * ((load as f64).ln() / (max_z_size(n, workers, load) * p)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QEstimate {
    pub trials: usize,
    pub max_z_size: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `mean / (p g)`.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// Samples `ER(n, p)` graphs and averages the message count of worker 0 in group
/// `{0, .., r}` under the batch allocation: the longest of its `r` table rows.
///
/// Trial `t` uses graph seed `seed + t`.
pub fn expected_q_monte_carlo(n: usize, p: f64, workers: usize, load: usize, trials: usize, seed: u64) -> Result<QEstimate> {
    check_probability("p", p)?;
    check_workers(workers, load)?;
    if load == workers {
        return Err(Error::param("no multicast group exists when r = K"));
    }
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let alloc = er_allocate(n, workers, load)?;
    let group = WorkerSet::first(load + 1);
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let graph = gen_er(n, p, seed.wrapping_add(t))?;
            let mut q = 0;
            for k in 1..=load {
                q = q.max(build_z_set(&alloc, &graph, group, k, &all_records)?.len());
            }
            Ok(q as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&samples);
    let scale = p * max_z_size(n, workers, load);
    Ok(QEstimate {
        trials,
        max_z_size: max_z_size(n, workers, load),
        mean,
        stderr,
        ratio: mean / scale,
        ratio_stderr: stderr / scale,
    })
}

/// Sample mean and standard error (zero for a single sample).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Computation load balancing measured Map and Shuffle times: `sqrt(t_shuffle / t_map)`.
pub fn r_star(t_map: f64, t_shuffle: f64) -> Result<f64> {
    if !(t_map > 0.0) {
        return Err(Error::param(format!("Map time {t_map} must be positive")));
    }
    if !(t_shuffle >= 0.0) {
        return Err(Error::param(format!("Shuffle time {t_shuffle} must be non-negative")));
    }
    Ok((t_shuffle / t_map).sqrt())
}
