//! Bottleneck and q-Wasserstein distances between persistence diagrams.
//!
//! Points are compared in the L∞ norm and may be matched to the diagonal at
//! cost half their persistence. Bottleneck distances are exact: the answer
//! is the smallest realized cost at which the threshold graph admits a
//! matching covering every point too far from the diagonal. Wasserstein
//! distances solve the assignment problem with the Hungarian method.

use std::fmt::Write as _;

use crate::par::{self, Execution};
use crate::persistence::PersistenceDiagram;
use crate::{Error, Result};

pub type Point = (f64, f64);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Bottleneck,
    Wasserstein(f64),
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Bottleneck => "bottleneck",
            Metric::Wasserstein(_) => "wasserstein",
        }
    }

    /// The exponent, infinite for the bottleneck distance.
    pub fn q(&self) -> f64 {
        match self {
            Metric::Bottleneck => f64::INFINITY,
            Metric::Wasserstein(q) => *q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Metric::Wasserstein(q) if q.is_nan() || *q < 1.0 => {
                Err(Error::Argument(format!("Wasserstein exponent must be at least 1, got {q}")))
            }
            _ => Ok(()),
        }
    }
}

/// Which points take part in a comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scope {
    /// Union over all dimensions.
    #[default]
    Total,
    Dimension(usize),
}

/// Treatment of classes that never die.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Essentials {
    /// Both diagrams are scaled into the unit square and essential classes
    /// become ordinary points with death 1.
    #[default]
    Normalized,
    /// Essential classes are matched only among themselves by birth; unequal
    /// counts give an infinite distance.
    Raw,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DistanceOptions {
    pub scope: Scope,
    pub essentials: Essentials,
}

/// Finite points (one per unit of multiplicity) and essential births.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PreparedDiagram {
    pub finite: Vec<Point>,
    pub essential: Vec<f64>,
}

impl PreparedDiagram {
    pub fn new(d: &PersistenceDiagram, opts: &DistanceOptions) -> Result<Self> {
        let scaled;
        let source = match opts.essentials {
            Essentials::Normalized if d.normalized => d,
            Essentials::Normalized => {
                let w_n = d.w_n.ok_or_else(|| {
                    Error::Argument(
                        "diagram has no normalization constant; compare with raw essentials".into(),
                    )
                })?;
                scaled = d.normalized(w_n)?;
                &scaled
            }
            Essentials::Raw => d,
        };
        let mut out = PreparedDiagram::default();
        for p in source.points() {
            if let Scope::Dimension(dim) = opts.scope {
                if p.dim != dim {
                    continue;
                }
            }
            for _ in 0..p.multiplicity {
                if p.is_essential() {
                    out.essential.push(p.birth);
                } else {
                    out.finite.push((p.birth, p.death));
                }
            }
        }
        out.essential.sort_by(f64::total_cmp);
        Ok(out)
    }
}

pub fn distance(
    x: &PersistenceDiagram,
    y: &PersistenceDiagram,
    metric: Metric,
    opts: &DistanceOptions,
) -> Result<f64> {
    metric.validate()?;
    let a = PreparedDiagram::new(x, opts)?;
    let b = PreparedDiagram::new(y, opts)?;
    prepared_distance(&a, &b, metric)
}

/// Bottleneck distance between total normalized diagrams.
pub fn bottleneck(x: &PersistenceDiagram, y: &PersistenceDiagram) -> Result<f64> {
    distance(x, y, Metric::Bottleneck, &DistanceOptions::default())
}

/// q-Wasserstein distance between total normalized diagrams.
pub fn wasserstein(x: &PersistenceDiagram, y: &PersistenceDiagram, q: f64) -> Result<f64> {
    distance(x, y, Metric::Wasserstein(q), &DistanceOptions::default())
}

pub fn prepared_distance(a: &PreparedDiagram, b: &PreparedDiagram, metric: Metric) -> Result<f64> {
    metric.validate()?;
    if a.essential.len() != b.essential.len() {
        return Ok(f64::INFINITY);
    }
    let gaps = a.essential.iter().zip(&b.essential).map(|(s, t)| (s - t).abs());
    Ok(match metric {
        Metric::Bottleneck => gaps.fold(bottleneck_points(&a.finite, &b.finite), f64::max),
        Metric::Wasserstein(q) => {
            let essential: f64 = gaps.map(|g| g.powf(q)).sum();
            let finite = wasserstein_points(&a.finite, &b.finite, q)?;
            (finite.powf(q) + essential).powf(1.0 / q)
        }
    })
}

fn linf(a: Point, b: Point) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half_persistence(a: Point) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Exact bottleneck distance between finite point sets.
pub fn bottleneck_points(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let graph = ThresholdGraph::new(a, b);
    // matching everything to the diagonal is always feasible
    let mut hi = a
        .iter()
        .chain(b)
        .map(|&p| half_persistence(p))
        .fold(0.0, f64::max);
    let mut lo = -1.0_f64;
    // narrow the interval before enumerating the realized costs inside it
    for _ in 0..BISECTION_STEPS {
        let mid = lo.max(0.0) / 2.0 + hi / 2.0;
        if mid <= lo.max(0.0) || mid >= hi {
            break;
        }
        if graph.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut candidates = graph.candidates(lo, hi);
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();
    let (mut left, mut right) = (0, candidates.len());
    while left < right {
        let mid = (left + right) / 2;
        if graph.feasible(candidates[mid]) {
            right = mid;
        } else {
            left = mid + 1;
        }
    }
    // the optimum is a realized cost in (lo, hi]
    candidates.get(left).copied().unwrap_or(hi)
}

const BISECTION_STEPS: usize = 14;

/// Both point sets sorted by birth, for window queries.
struct ThresholdGraph {
    a: Vec<Point>,
    b: Vec<Point>,
    a_births: Vec<f64>,
    b_births: Vec<f64>,
}

fn sorted_by_birth(points: &[Point]) -> (Vec<Point>, Vec<f64>) {
    let mut points = points.to_vec();
    points.sort_by(|s, t| s.0.total_cmp(&t.0).then(s.1.total_cmp(&t.1)));
    let births = points.iter().map(|p| p.0).collect();
    (points, births)
}

/// Indices of `points` within L∞ distance `t` of `p`.
fn neighbors(points: &[Point], births: &[f64], p: Point, t: f64, out: &mut Vec<u32>) {
    out.clear();
    let start = births.partition_point(|&x| x < p.0 - t);
    for (j, &q) in points[start..].iter().enumerate() {
        if q.0 - p.0 > t {
            break;
        }
        if (q.1 - p.1).abs() <= t {
            out.push((start + j) as u32);
        }
    }
}

impl ThresholdGraph {
    fn new(a: &[Point], b: &[Point]) -> Self {
        let (a, a_births) = sorted_by_birth(a);
        let (b, b_births) = sorted_by_birth(b);
        ThresholdGraph {
            a,
            b,
            a_births,
            b_births,
        }
    }

    /// Realized costs in `(lo, hi]`.
    fn candidates(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .a
            .iter()
            .chain(&self.b)
            .map(|&p| half_persistence(p))
            .filter(|&c| c > lo && c <= hi)
            .collect();
        let mut scratch = Vec::new();
        for &p in &self.a {
            neighbors(&self.b, &self.b_births, p, hi, &mut scratch);
            out.extend(
                scratch
                    .iter()
                    .map(|&j| linf(p, self.b[j as usize]))
                    .filter(|&c| c > lo),
            );
        }
        out
    }

    /// Whether some matching in the threshold graph covers every point whose
    /// diagonal cost exceeds `t`. Such a matching exists iff one covers those
    /// points of each side separately.
    fn feasible(&self, t: f64) -> bool {
        covers(&self.a, &self.b, &self.b_births, t) && covers(&self.b, &self.a, &self.a_births, t)
    }
}

/// Whether the points of `from` far from the diagonal can all be matched
/// into `to` within distance `t`.
fn covers(from: &[Point], to: &[Point], to_births: &[f64], t: f64) -> bool {
    let mut adjacency: Vec<Vec<u32>> = Vec::new();
    let mut scratch = Vec::new();
    for &p in from.iter().filter(|&&p| half_persistence(p) > t) {
        neighbors(to, to_births, p, t, &mut scratch);
        if scratch.is_empty() {
            return false;
        }
        adjacency.push(scratch.clone());
    }
    let rows: Vec<&[u32]> = adjacency.iter().map(Vec::as_slice).collect();
    hopcroft_karp(&rows, to.len()) == rows.len()
}

/// Maximum bipartite matching size; `adjacency[u]` lists right vertices.
pub fn hopcroft_karp(adjacency: &[&[u32]], right: usize) -> usize {
    const NONE: u32 = u32::MAX;
    let n = adjacency.len();
    let mut match_l = vec![NONE; n];
    let mut match_r = vec![NONE; right];
    let mut size = 0;
    // greedy start
    for u in 0..n {
        if let Some(&v) = adjacency[u].iter().find(|&&v| match_r[v as usize] == NONE) {
            match_l[u] = v;
            match_r[v as usize] = u as u32;
            size += 1;
        }
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = Vec::with_capacity(n);
    let mut next_edge = vec![0usize; n];
    let mut stack: Vec<u32> = Vec::new();
    loop {
        // layered BFS from free left vertices
        queue.clear();
        for u in 0..n {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &v in adjacency[u] {
                let w = match_r[v as usize];
                if w == NONE {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            return size;
        }
        // iterative DFS along the layers
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..n {
            if match_l[root] != NONE {
                continue;
            }
            stack.clear();
            stack.push(root as u32);
            while let Some(&u) = stack.last() {
                let u = u as usize;
                let mut advanced = false;
                while next_edge[u] < adjacency[u].len() {
                    let v = adjacency[u][next_edge[u]];
                    next_edge[u] += 1;
                    let w = match_r[v as usize];
                    if w == NONE {
                        // augment along the stack
                        let mut v = v;
                        for &x in stack.iter().rev() {
                            let prev = match_l[x as usize];
                            match_l[x as usize] = v;
                            match_r[v as usize] = x;
                            v = prev;
                        }
                        size += 1;
                        stack.clear();
                        advanced = true;
                        break;
                    }
                    if dist[w as usize] == dist[u] + 1 {
                        stack.push(w);
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    dist[u] = u32::MAX;
                    stack.pop();
                }
            }
        }
    }
}

/// Exact q-Wasserstein distance between finite point sets.
pub fn wasserstein_points(a: &[Point], b: &[Point], q: f64) -> Result<f64> {
    Metric::Wasserstein(q).validate()?;
    let (rows, cols) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let col_diag: Vec<f64> = cols.iter().map(|&p| half_persistence(p).powf(q)).collect();
    let base: f64 = col_diag.iter().sum();
    if rows.is_empty() {
        return Ok(base.powf(1.0 / q));
    }
    // rows pick a column point or a private diagonal slot; an unpicked column
    // point pays its own diagonal cost, folded into `base`
    let width = cols.len() + rows.len();
    let cost = |i: usize, j: usize| -> f64 {
        if j < cols.len() {
            linf(rows[i], cols[j]).powf(q) - col_diag[j]
        } else {
            half_persistence(rows[i]).powf(q)
        }
    };
    let total = base + hungarian(rows.len(), width, cost);
    Ok(total.max(0.0).powf(1.0 / q))
}

/// Minimum-cost assignment of `n` rows into `m >= n` columns.
pub fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> f64 {
    debug_assert!(n <= m);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut way = vec![0usize; m + 1];
    // p[j] = 1-based row assigned to column j
    let mut p = vec![0usize; m + 1];
    let mut minv = vec![0.0; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| cost(p[j] - 1, j - 1))
        .sum()
}

/// A labelled sample of diagrams.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub label: String,
    pub diagrams: Vec<PersistenceDiagram>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairDistance {
    pub a: usize,
    pub i: usize,
    pub b: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEntry {
    pub a: String,
    pub b: String,
    pub mean: f64,
    pub stderr: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub metric: Metric,
    /// Blocks `(a, b)` with `a <= b`, row-major.
    pub entries: Vec<MatrixEntry>,
    pub pairs: Vec<PairDistance>,
}

impl DistanceMatrix {
    pub fn entry(&self, a: &str, b: &str) -> Option<&MatrixEntry> {
        self.entries
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    /// CSV `modelA,modelB,mean,stderr,metric,q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("modelA,modelB,mean,stderr,metric,q\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&e.a),
                csv_field(&e.b),
                format_value(e.mean),
                format_value(e.stderr),
                self.metric.name(),
                format_value(self.metric.q())
            );
        }
        out
    }
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_field(text: &str) -> std::borrow::Cow<'_, str> {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\"")).into()
    } else {
        text.into()
    }
}

fn format_value(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_owned()
    } else {
        x.to_string()
    }
}

/// Mean and standard error of every block of pairwise distances.
///
/// Off-diagonal blocks use all cross pairs; a diagonal block uses the
/// unordered pairs of distinct samples, or the lone self-pair for a
/// single-sample ensemble.
pub fn distance_matrix(
    ensembles: &[Ensemble],
    metric: Metric,
    opts: &DistanceOptions,
    exec: Execution,
) -> Result<DistanceMatrix> {
    metric.validate()?;
    if ensembles.is_empty() {
        return Err(Error::Argument("no ensembles to compare".into()));
    }
    if let Some(e) = ensembles.iter().find(|e| e.diagrams.is_empty()) {
        return Err(Error::Argument(format!("ensemble {} is empty", e.label)));
    }
    let prepared: Vec<Vec<PreparedDiagram>> = ensembles
        .iter()
        .map(|e| {
            e.diagrams
                .iter()
                .map(|d| PreparedDiagram::new(d, opts))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for a in 0..ensembles.len() {
        for b in a..ensembles.len() {
            let (na, nb) = (prepared[a].len(), prepared[b].len());
            for i in 0..na {
                for j in 0..nb {
                    // diagonal blocks use i < j, or the self-pair of a singleton
                    if a != b || na == 1 || i < j {
                        jobs.push((a, i, b, j));
                    }
                }
            }
        }
    }
    let distances = par::map_slice_with(exec, &jobs, |&(a, i, b, j)| {
        prepared_distance(&prepared[a][i], &prepared[b][j], metric)
    });
    let mut pairs = Vec::with_capacity(jobs.len());
    for (&(a, i, b, j), d) in jobs.iter().zip(distances) {
        pairs.push(PairDistance { a, i, b, j, distance: d? });
    }

    let mut entries = Vec::new();
    for a in 0..ensembles.len() {
        for b in a..ensembles.len() {
            let values: Vec<f64> = pairs
                .iter()
                .filter(|p| p.a == a && p.b == b)
                .map(|p| p.distance)
                .collect();
            let (mean, stderr) = mean_stderr(&values);
            entries.push(MatrixEntry {
                a: ensembles[a].label.clone(),
                b: ensembles[b].label.clone(),
                mean,
                stderr,
                pairs: values.len(),
            });
        }
    }
    Ok(DistanceMatrix {
        metric,
        entries,
        pairs,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if mean.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
