//! Seeded random graph models: Erdős–Rényi, Watts–Strogatz,
//! Barabási–Albert and the hyperbolic geometric graph at zero temperature.
//!
//! A model is written as `family:key=value,...`, for example
//! `er:n=1000,p=0.004`, `ws:n=1000,k=4,p=0.5`, `ba:n=1000,m=2` or
//! `hgg:n=1000,k=4,gamma=2,t=0` (`gamma=inf` gives the circular limit).

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    Er { n: usize, p: f64 },
    Ws { n: usize, k: usize, p: f64 },
    Ba { n: usize, m: usize },
    Hgg { n: usize, k: f64, gamma: f64, t: f64 },
}

impl ModelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Er { .. } => "er",
            ModelSpec::Ws { .. } => "ws",
            ModelSpec::Ba { .. } => "ba",
            ModelSpec::Hgg { .. } => "hgg",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            ModelSpec::Er { n, .. }
            | ModelSpec::Ws { n, .. }
            | ModelSpec::Ba { n, .. }
            | ModelSpec::Hgg { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Argument(msg));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        match *self {
            ModelSpec::Er { p, .. } if !unit(p) => bad(format!("er: p = {p} outside [0, 1]")),
            ModelSpec::Ws { n, k, p } => {
                if k % 2 != 0 || k >= n {
                    bad(format!("ws: k = {k} must be even and below n = {n}"))
                } else if !unit(p) {
                    bad(format!("ws: p = {p} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            ModelSpec::Ba { n, m } if m < 1 || m >= n => {
                bad(format!("ba: m = {m} must satisfy 1 <= m < n = {n}"))
            }
            ModelSpec::Hgg { k, gamma, t, n } => {
                if k.is_nan() || k <= 0.0 || k.is_infinite() {
                    bad(format!("hgg: k = {k} must be positive"))
                } else if n > 1 && k > (n - 1) as f64 {
                    bad(format!("hgg: k = {k} exceeds n - 1"))
                } else if gamma.is_nan() || gamma < 2.0 {
                    bad(format!("hgg: gamma = {gamma} must be at least 2"))
                } else if t.is_nan() || t < 0.0 {
                    bad(format!("hgg: T = {t} must be non-negative"))
                } else if t != 0.0 {
                    Err(Error::Unsupported(format!(
                        "hgg: only T = 0 is implemented, got T = {t}"
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        Ok(match *self {
            ModelSpec::Er { n, p } => gen_er(n, p, seed),
            ModelSpec::Ws { n, k, p } => gen_ws(n, k, p, seed),
            ModelSpec::Ba { n, m } => gen_ba(n, m, seed),
            ModelSpec::Hgg { n, k, gamma, t } => gen_hgg(n, k, gamma, t, seed)?,
        })
    }

    /// Parameters in a stable order, for provenance records.
    pub fn params(&self) -> BTreeMap<&'static str, serde_json::Value> {
        let mut out = BTreeMap::new();
        out.insert("n", self.n().into());
        match *self {
            ModelSpec::Er { p, .. } => {
                out.insert("p", p.into());
            }
            ModelSpec::Ws { k, p, .. } => {
                out.insert("k", k.into());
                out.insert("p", p.into());
            }
            ModelSpec::Ba { m, .. } => {
                out.insert("m", m.into());
            }
            ModelSpec::Hgg { k, gamma, t, .. } => {
                out.insert("k", k.into());
                out.insert(
                    "gamma",
                    if gamma.is_infinite() {
                        "inf".into()
                    } else {
                        gamma.into()
                    },
                );
                out.insert("t", t.into());
            }
        }
        out
    }

    /// JSON record of the model, seed and resulting size.
    pub fn provenance(&self, seed: u64, g: &Graph) -> serde_json::Value {
        serde_json::json!({
            "model": self.to_string(),
            "family": self.family(),
            "params": self.params(),
            "seed": seed,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelSpec::Er { n, p } => write!(f, "er:n={n},p={p}"),
            ModelSpec::Ws { n, k, p } => write!(f, "ws:n={n},k={k},p={p}"),
            ModelSpec::Ba { n, m } => write!(f, "ba:n={n},m={m}"),
            ModelSpec::Hgg { n, k, gamma, t } => {
                let gamma = if gamma.is_infinite() {
                    "inf".to_owned()
                } else {
                    gamma.to_string()
                };
                write!(f, "hgg:n={n},k={k},gamma={gamma},t={t}")
            }
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (family, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("model '{text}' must look like family:key=value,...")))?;
        let mut params: BTreeMap<String, String> = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("model parameter '{item}' lacks '='")))?;
            let key = key.trim().to_ascii_lowercase();
            if params.insert(key.clone(), value.trim().to_owned()).is_some() {
                return Err(Error::Argument(format!("model parameter '{key}' repeated")));
            }
        }
        let mut take = |key: &str| params.remove(key);
        let family = family.trim().to_ascii_lowercase();
        let spec = match family.as_str() {
            "er" => ModelSpec::Er {
                n: required(&mut take, "n")?,
                p: required(&mut take, "p")?,
            },
            "ws" => ModelSpec::Ws {
                n: required(&mut take, "n")?,
                k: required(&mut take, "k")?,
                p: required(&mut take, "p")?,
            },
            "ba" => ModelSpec::Ba {
                n: required(&mut take, "n")?,
                m: required(&mut take, "m")?,
            },
            "hgg" => ModelSpec::Hgg {
                n: required(&mut take, "n")?,
                k: required(&mut take, "k")?,
                gamma: required(&mut take, "gamma")?,
                t: take("t").map_or(Ok(0.0), |v| parse_value("t", &v))?,
            },
            other => return Err(Error::Argument(format!("unknown model family '{other}'"))),
        };
        if let Some(key) = params.keys().next() {
            return Err(Error::Argument(format!("unknown parameter '{key}' for {family}")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn required<T: FromStr>(take: &mut impl FnMut(&str) -> Option<String>, key: &str) -> Result<T> {
    let value = take(key).ok_or_else(|| Error::Argument(format!("missing model parameter '{key}'")))?;
    parse_value(key, &value)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Argument(format!("invalid value '{value}' for '{key}'")))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each of the n(n−1)/2 edges present independently with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("ids in range")
}

/// Ring lattice of degree `k`, each edge rewired with probability `p`.
///
/// A rewired endpoint is drawn uniformly, re-drawing self-loops and
/// duplicates up to `n` times before leaving the edge in place.
pub fn gen_ws(n: usize, k: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let mut adjacency: Vec<HashSet<VertexId>> = vec![HashSet::new(); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let v = (i + j) % n;
            adjacency[i].insert(v as VertexId);
            adjacency[v].insert(i as VertexId);
        }
    }
    for j in 1..=k / 2 {
        for i in 0..n {
            if !rng.gen_bool(p) {
                continue;
            }
            let old = ((i + j) % n) as VertexId;
            if !adjacency[i].contains(&old) {
                continue;
            }
            for _ in 0..n {
                let w = rng.gen_range(0..n) as VertexId;
                if w as usize == i || adjacency[i].contains(&w) {
                    continue;
                }
                adjacency[i].remove(&old);
                adjacency[old as usize].remove(&(i as VertexId));
                adjacency[i].insert(w);
                adjacency[w as usize].insert(i as VertexId);
                break;
            }
        }
    }
    let edges: Vec<(VertexId, VertexId)> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().map(move |&v| (u as VertexId, v)))
        .filter(|(u, v)| u < v)
        .collect();
    Graph::from_edges(n, &edges).expect("ids in range")
}

/// Preferential attachment from `m` isolated seeds; `m(n − m)` edges.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(m * n.saturating_sub(m));
    // every edge endpoint, so a uniform pick is degree-proportional
    let mut endpoints: Vec<VertexId> = Vec::with_capacity(2 * m * n);
    let mut chosen: Vec<VertexId> = Vec::with_capacity(m);
    for v in m..n {
        chosen.clear();
        if v == m {
            chosen.extend(0..m as VertexId);
        } else {
            while chosen.len() < m {
                let t = endpoints[rng.gen_range(0..endpoints.len())];
                if !chosen.contains(&t) {
                    chosen.push(t);
                }
            }
        }
        for &t in &chosen {
            edges.push((t, v as VertexId));
            endpoints.push(t);
            endpoints.push(v as VertexId);
        }
    }
    Graph::from_edges(n, &edges).expect("ids in range")
}

/// Hyperbolic random graph at zero temperature.
///
/// Radii follow the density `α sinh(αr) / (cosh(αR) − 1)` on `[0, R]` with
/// `α = (γ − 1) / 2`, angles are uniform, and two points are joined when
/// their hyperbolic distance is below `R`. `R` is calibrated so the expected
/// mean degree is `k`. For `γ = ∞` every point sits on the boundary circle
/// and the graph joins points within angular distance `π k / (n − 1)`.
pub fn gen_hgg(n: usize, k: f64, gamma: f64, t: f64, seed: u64) -> Result<Graph> {
    ModelSpec::Hgg { n, k, gamma, t }.validate()?;
    let mut rng = rng(seed);
    if n < 2 {
        return Ok(Graph::empty(n));
    }
    let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let angular_gap = |i: usize, j: usize| {
        let d = (angles[i] - angles[j]).abs();
        d.min(2.0 * PI - d)
    };
    let mut edges = Vec::new();
    if gamma.is_infinite() {
        let theta = PI * k / (n - 1) as f64;
        for i in 0..n {
            for j in i + 1..n {
                if angular_gap(i, j) < theta {
                    edges.push((i as VertexId, j as VertexId));
                }
            }
        }
        return Graph::from_edges(n, &edges);
    }
    let alpha = (gamma - 1.0) / 2.0;
    let radius = calibrate_radius(n, k, alpha);
    let radii: Vec<f64> = (0..n)
        .map(|_| radial_quantile(rng.gen::<f64>(), alpha, radius))
        .collect();
    let ch: Vec<f64> = radii.iter().map(|r| r.cosh()).collect();
    let sh: Vec<f64> = radii.iter().map(|r| r.sinh()).collect();
    let limit = radius.cosh();
    for i in 0..n {
        for j in i + 1..n {
            let cosh_d = ch[i] * ch[j] - sh[i] * sh[j] * angular_gap(i, j).cos();
            if cosh_d < limit {
                edges.push((i as VertexId, j as VertexId));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Inverse of the radial distribution function at `u ∈ [0, 1)`.
fn radial_quantile(u: f64, alpha: f64, radius: f64) -> f64 {
    let ar = alpha * radius;
    let r = if ar > 50.0 {
        // cosh(αr) − 1 ≈ e^{αr} / 2 near the rim
        radius + u.max(f64::MIN_POSITIVE).ln() / alpha
    } else {
        (1.0 + u * (ar.cosh() - 1.0)).acosh() / alpha
    };
    r.clamp(0.0, radius)
}

/// Largest angular difference at which two points are still joined, from
/// the hyperbolic cosines and sines of their radii.
fn max_angle(r1: f64, r2: f64, (ch1, sh1): (f64, f64), (ch2, sh2): (f64, f64), radius: f64) -> f64 {
    if r1 + r2 <= radius {
        return PI;
    }
    let c = (ch1 * ch2 - radius.cosh()) / (sh1 * sh2);
    c.clamp(-1.0, 1.0).acos()
}

/// Expected mean degree for disk radius `radius`, by midpoint quadrature in
/// the radial quantile.
pub fn expected_degree(n: usize, alpha: f64, radius: f64) -> f64 {
    const M: usize = 160;
    let r: Vec<f64> = (0..M)
        .map(|i| radial_quantile((i as f64 + 0.5) / M as f64, alpha, radius))
        .collect();
    let hyp: Vec<(f64, f64)> = r.iter().map(|x| (x.cosh(), x.sinh())).collect();
    let mut total = 0.0;
    for i in 0..M {
        total += max_angle(r[i], r[i], hyp[i], hyp[i], radius);
        for j in i + 1..M {
            total += 2.0 * max_angle(r[i], r[j], hyp[i], hyp[j], radius);
        }
    }
    (n - 1) as f64 * total / (PI * (M * M) as f64)
}

/// Disk radius giving expected mean degree `k`, by bisection.
pub fn calibrate_radius(n: usize, k: f64, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6_f64, 100.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if expected_degree(n, alpha, mid) > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
