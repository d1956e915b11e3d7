//! Plain-text edge lists: optional `n=<count>` header, then `u v [w]` per line with 1-based ids.
//! Lines starting with `#` are comments. A leading `# er|rb|sbm key=value ...` comment, as written
//! by [`write_edgelist`], restores the generating model so cluster-aware plans work on reloaded files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Graph, GraphBuilder, GraphMeta, GraphModel, VertexId};
use crate::error::{Error, Result};

pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edgelist(&text, path)
}

/// Parses edge-list text; `origin` only labels error messages.
pub fn parse_edgelist(text: &str, origin: &Path) -> Result<Graph> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut declared_n: Option<usize> = None;
    let mut seen_edge = false;
    let mut meta = GraphMeta::explicit();
    let mut edges: Vec<(usize, VertexId, VertexId, Option<f64>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if !seen_edge && declared_n.is_none() && meta.model == GraphModel::Explicit {
                if let Some(m) = model_from_comment(comment) {
                    meta = m;
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if let Some(count) = line.strip_prefix("n=") {
            if seen_edge || declared_n.is_some() {
                return Err(err(line_no, "header `n=` must come before any edge".into()));
            }
            let n = count
                .trim()
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad vertex count `{count}`")))?;
            declared_n = Some(n);
            continue;
        }
        seen_edge = true;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(err(line_no, format!("expected `u v [w]`, got `{line}`")));
        }
        let id = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(0) | Err(_) => Err(err(line_no, format!("bad vertex id `{s}` (ids are 1-based)"))),
                Ok(v) => Ok(v),
            }
        };
        let u = id(fields[0])?;
        let v = id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => {
                let w = s.parse::<f64>().map_err(|_| err(line_no, format!("bad weight `{s}`")))?;
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(err(line_no, format!("weight {w} must be finite and >= 0")));
                }
                Some(w)
            }
            None => None,
        };
        if let Some(n) = declared_n {
            if u > n || v > n {
                return Err(err(line_no, format!("vertex id {} exceeds n={n}", u.max(v))));
            }
        }
        edges.push((line_no, u - 1, v - 1, w));
    }

    let n = declared_n.unwrap_or_else(|| edges.iter().map(|e| e.1.max(e.2) + 1).max().unwrap_or(0));
    let mut seen: HashMap<(VertexId, VertexId), Option<f64>> = HashMap::new();
    let mut builder = GraphBuilder::new(n);
    for (line_no, u, v, w) in edges {
        let key = (u.min(v), u.max(v));
        match seen.get(&key) {
            Some(prev) if *prev == w => continue,
            Some(_) => {
                return Err(err(
                    line_no,
                    format!("edge {}-{} repeated with a conflicting weight", u + 1, v + 1),
                ))
            }
            None => {
                seen.insert(key, w);
            }
        }
        builder.add_edge(u, v, w).map_err(|e| err(line_no, e.to_string()))?;
    }
    if let Some((n1, n2)) = match meta.model {
        GraphModel::Rb { n1, n2, .. } | GraphModel::Sbm { n1, n2, .. } => Some((n1, n2)),
        _ => None,
    } {
        if n1 + n2 != n {
            meta = GraphMeta::explicit();
        }
    }
    Ok(builder.finish(meta))
}

fn model_from_comment(comment: &str) -> Option<GraphMeta> {
    let mut words = comment.split_whitespace();
    let kind = words.next()?;
    let fields: HashMap<&str, &str> = words.filter_map(|w| w.split_once('=')).collect();
    let f = |k: &str| fields.get(k)?.parse::<f64>().ok();
    let u = |k: &str| fields.get(k)?.parse::<usize>().ok();
    let model = match kind {
        "er" => GraphModel::Er { p: f("p")? },
        "rb" => GraphModel::Rb {
            n1: u("n1")?,
            n2: u("n2")?,
            q: f("q")?,
        },
        "sbm" => GraphModel::Sbm {
            n1: u("n1")?,
            n2: u("n2")?,
            p: f("p")?,
            q: f("q")?,
        },
        _ => return None,
    };
    Some(GraphMeta {
        model,
        seed: fields.get("seed").and_then(|s| s.parse().ok()),
        clamped_pairs: 0,
    })
}

/// Renders a graph in edge-list format. Weights are written only for weighted graphs.
pub fn write_edgelist(graph: &Graph) -> String {
    let mut out = String::new();
    if let Some(seed) = graph.meta().seed {
        let _ = writeln!(out, "# {} seed={seed}", model_summary(graph));
    }
    let _ = writeln!(out, "n={}", graph.vertex_count());
    for (u, v, w) in graph.edges() {
        if graph.is_weighted() {
            let _ = writeln!(out, "{} {} {w}", u + 1, v + 1);
        } else {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
    }
    out
}

fn model_summary(graph: &Graph) -> String {
    use super::GraphModel::*;
    match &graph.meta().model {
        Er { p } => format!("er p={p}"),
        Rb { n1, n2, q } => format!("rb n1={n1} n2={n2} q={q}"),
        Sbm { n1, n2, p, q } => format!("sbm n1={n1} n2={n2} p={p} q={q}"),
        Pl {
            gamma, rho, degree_cap, ..
        } => format!(
            "pl gamma={gamma} rho={rho} degree_cap={degree_cap} clamped_pairs={}",
            graph.meta().clamped_pairs
        ),
        Explicit => "explicit".to_string(),
    }
}

pub fn save_edgelist(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path: PathBuf = path.as_ref().to_path_buf();
    std::fs::write(&path, write_edgelist(graph)).map_err(|source| Error::Io { path, source })
}
