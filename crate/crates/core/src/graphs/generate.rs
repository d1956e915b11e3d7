//! Seeded random graph models: Erdős–Rényi, random bipartite, two-block SBM and power law.
//!
//! Every vertex row `u` draws its pairs `{u, v}` (`v > u`) from its own ChaCha stream, so the
//! sample does not depend on how rows are scheduled across threads.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder, GraphMeta, GraphModel, VertexId};
use crate::error::{Error, Result};

pub(crate) const STREAM_EDGES: u64 = 0;
pub(crate) const STREAM_DEGREES: u64 = 1;
pub(crate) const STREAM_WEIGHTS: u64 = 2;

/// Independent generator for one block of work under one seed.
pub(crate) fn block_rng(seed: u64, domain: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 40) | block);
    rng
}

/// Edge-probability parameter of the power-law model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rho {
    Fixed(f64),
    /// `1 / sum(d_i)` of the drawn degrees, so expected degrees match the drawn ones.
    Auto,
}

/// A random graph model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GraphModelParams {
    Er { n: usize, p: f64 },
    Rb { n1: usize, n2: usize, q: f64 },
    Sbm { n1: usize, n2: usize, p: f64, q: f64 },
    Pl { n: usize, gamma: f64, rho: Rho },
}

impl GraphModelParams {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GraphModelParams::Er { n, p } => gen_er(n, p, seed),
            GraphModelParams::Rb { n1, n2, q } => gen_rb(n1, n2, q, seed),
            GraphModelParams::Sbm { n1, n2, p, q } => gen_sbm(n1, n2, p, q, seed),
            GraphModelParams::Pl { n, gamma, rho } => gen_pl(n, gamma, rho, seed),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            GraphModelParams::Er { n, .. } | GraphModelParams::Pl { n, .. } => n,
            GraphModelParams::Rb { n1, n2, .. } | GraphModelParams::Sbm { n1, n2, .. } => n1 + n2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphModelParams::Er { .. } => "er",
            GraphModelParams::Rb { .. } => "rb",
            GraphModelParams::Sbm { .. } => "sbm",
            GraphModelParams::Pl { .. } => "pl",
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {p} is not a probability in [0, 1]")))
    }
}

fn check_count(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param(format!("{name} must be at least 1")));
    }
    if n > u32::MAX as usize {
        return Err(Error::param(format!("{name} = {n} is too large")));
    }
    Ok(())
}

/// Samples every pair `{u, v}`, `u < v`, with probability `prob(u, v)`.
///
/// Pairs with probability 0 consume no randomness. Returns the builder and the number of
/// pairs whose raw probability exceeded 1 and was clamped.
fn sample_pairs<F>(n: usize, seed: u64, prob: F) -> (GraphBuilder, u64)
where
    F: Fn(VertexId, VertexId) -> f64 + Sync,
{
    let rows: Vec<(Vec<VertexId>, u64)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut rng = block_rng(seed, STREAM_EDGES, u as u64);
            let mut upper = Vec::new();
            let mut clamped = 0;
            for v in u + 1..n {
                let mut p = prob(u, v);
                if p <= 0.0 {
                    continue;
                }
                if p > 1.0 {
                    clamped += 1;
                    p = 1.0;
                }
                if rng.gen_bool(p) {
                    upper.push(v);
                }
            }
            (upper, clamped)
        })
        .collect();
    let mut builder = GraphBuilder::new(n);
    let mut clamped_total = 0;
    for (u, (upper, clamped)) in rows.iter().enumerate() {
        builder.add_row(u, upper);
        clamped_total += clamped;
    }
    (builder, clamped_total)
}

/// Erdős–Rényi `ER(n, p)`. `p = 0` yields the empty graph.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_count("n", n)?;
    check_probability("p", p)?;
    let (builder, _) = sample_pairs(n, seed, |_, _| p);
    Ok(builder.finish(GraphMeta {
        model: GraphModel::Er { p },
        seed: Some(seed),
        clamped_pairs: 0,
    }))
}

/// Random bipartite `RB(n1, n2, q)`: clusters `0..n1` and `n1..n1+n2`, cross edges only.
pub fn gen_rb(n1: usize, n2: usize, q: f64, seed: u64) -> Result<Graph> {
    check_count("n1", n1)?;
    check_count("n2", n2)?;
    check_probability("q", q)?;
    let (builder, _) = sample_pairs(n1 + n2, seed, |u, v| if (u < n1) != (v < n1) { q } else { 0.0 });
    Ok(builder.finish(GraphMeta {
        model: GraphModel::Rb { n1, n2, q },
        seed: Some(seed),
        clamped_pairs: 0,
    }))
}

/// Two-block stochastic block model: intra-cluster pairs with `p`, cross pairs with `q < p`.
///
/// `q = 0` is accepted and yields two disconnected ER blocks.
pub fn gen_sbm(n1: usize, n2: usize, p: f64, q: f64, seed: u64) -> Result<Graph> {
    check_count("n1", n1)?;
    check_count("n2", n2)?;
    check_probability("p", p)?;
    check_probability("q", q)?;
    if !(q < p) {
        return Err(Error::param(format!("stochastic block model needs q < p, got q = {q}, p = {p}")));
    }
    let (builder, _) = sample_pairs(n1 + n2, seed, |u, v| if (u < n1) == (v < n1) { p } else { q });
    Ok(builder.finish(GraphMeta {
        model: GraphModel::Sbm { n1, n2, p, q },
        seed: Some(seed),
        clamped_pairs: 0,
    }))
}

/// Probabilities `c * d^-gamma` for `d = 1..=cap`, normalized over the truncated support.
pub fn pl_degree_law(cap: usize, gamma: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=cap).map(|d| (d as f64).powf(-gamma)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Power-law model `PL(n, gamma, rho)`.
///
/// Expected degrees are drawn i.i.d. from `Pr[d] ∝ d^-gamma` truncated to `1..=n`; the pair
/// `{u, v}` is an edge with probability `min(1, rho * d_u * d_v)`. Clamped pairs are counted in
/// the graph metadata.
pub fn gen_pl(n: usize, gamma: f64, rho: Rho, seed: u64) -> Result<Graph> {
    check_count("n", n)?;
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(Error::param(format!(
            "power-law exponent gamma = {gamma} must exceed 2 (the mean degree is unbounded otherwise)"
        )));
    }
    if let Rho::Fixed(r) = rho {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::param(format!("rho = {r} must be positive")));
        }
    }
    let law = WeightedIndex::new(pl_degree_law(n, gamma)).map_err(|e| Error::param(e.to_string()))?;
    let mut rng = block_rng(seed, STREAM_DEGREES, 0);
    let degrees: Vec<u32> = (0..n).map(|_| law.sample(&mut rng) as u32 + 1).collect();
    let rho = match rho {
        Rho::Fixed(r) => r,
        Rho::Auto => 1.0 / degrees.iter().map(|&d| d as f64).sum::<f64>(),
    };
    let (builder, clamped) = sample_pairs(n, seed, |u, v| rho * degrees[u] as f64 * degrees[v] as f64);
    Ok(builder.finish(GraphMeta {
        model: GraphModel::Pl {
            gamma,
            rho,
            degree_cap: n,
            degrees,
        },
        seed: Some(seed),
        clamped_pairs: clamped,
    }))
}
