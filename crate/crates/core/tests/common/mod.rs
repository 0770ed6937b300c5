//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use morseph::complex::CliqueComplex;
use morseph::graph::Graph;
use morseph::morse::{CriticalReport, MorseAssignment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Reconstruction of the nine-vertex example network: two triangles, one
/// pendant vertex, one cycle through both triangles.
pub fn example_network() -> Graph {
    let text = include_str!("../data/example.edges");
    morseph::graph::parse_edge_list(text).unwrap()
}

/// Every clique with at most `cap + 1` vertices, by subset enumeration.
pub fn brute_force_cliques(g: &Graph, cap: usize) -> Vec<Vec<Vec<u32>>> {
    let n = g.vertex_count();
    assert!(n <= 20);
    let mut out = vec![Vec::new(); cap + 1];
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > cap + 1 {
            continue;
        }
        let verts: Vec<u32> = (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
        let clique = verts
            .iter()
            .enumerate()
            .all(|(i, &u)| verts[i + 1..].iter().all(|&v| g.has_edge(u, v)));
        if clique {
            out[size - 1].push(verts);
        }
    }
    for list in &mut out {
        list.sort();
    }
    out
}

/// Rank over Z/2 of a dense matrix whose rows are bit vectors.
pub fn rank_z2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..width {
        let (word, bit) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[word] >> bit & 1 == 1 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers from dense boundary-matrix ranks, from the vertex lists alone.
pub fn dense_betti(cliques: &[Vec<Vec<u32>>]) -> Vec<usize> {
    let dims = cliques.len();
    let mut ranks = vec![0; dims + 1];
    for p in 1..dims {
        let faces = &cliques[p - 1];
        let words = faces.len().div_ceil(64).max(1);
        let rows: Vec<Vec<u64>> = cliques[p]
            .iter()
            .map(|s| {
                let mut row = vec![0u64; words];
                for skip in 0..s.len() {
                    let face: Vec<u32> = s
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    let idx = faces.binary_search(&face).expect("face present");
                    row[idx / 64] ^= 1 << (idx % 64);
                }
                row
            })
            .collect();
        ranks[p] = rank_z2(rows);
    }
    (0..dims)
        .map(|p| cliques[p].len() - ranks[p] - ranks[p + 1])
        .collect()
}

/// Filtration weights by the literal sweep: at each critical weight, add
/// every unadded simplex with weight at most it, together with all its
/// faces; anything left gets the last critical weight.
pub fn literal_filtration(k: &CliqueComplex, m: &MorseAssignment, c: &CriticalReport) -> (Vec<f64>, usize) {
    let n = k.len();
    let mut weight = vec![f64::NAN; n];
    let mut added = vec![false; n];
    for &w in &c.critical_weights {
        for index in 0..n {
            if !added[index] && m.weights[index] <= w {
                let (p, pos) = k.locate(index);
                let simplex = k.simplex(p, pos);
                // closure: every face of every dimension
                let verts = simplex.vertices().to_vec();
                for mask in 1u32..(1 << verts.len()) {
                    let sub: Vec<u32> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect();
                    let (fp, fpos) = k.position(&sub).expect("face in complex");
                    let fi = k.global(fp, fpos);
                    if !added[fi] {
                        added[fi] = true;
                        weight[fi] = w;
                    }
                }
            }
        }
    }
    let last = c.critical_weights.last().copied().unwrap_or(f64::NAN);
    let mut leftovers = 0;
    for index in 0..n {
        if !added[index] {
            weight[index] = last;
            leftovers += 1;
        }
    }
    (weight, leftovers)
}

pub type Point = (f64, f64);

pub type PointMetric = dyn Fn(&[Point], &[Point]) -> f64;

fn linf(a: Point, b: Point) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half(a: Point) -> f64 {
    (a.1 - a.0) / 2.0
}

/// All bijections between `A ∪ diag` and `B ∪ diag` of equal size, each
/// point allowed to go to the diagonal; returns every cost vector's reduction.
fn enumerate<F: FnMut(&[f64])>(a: &[Point], b: &[Point], mut visit: F) {
    let size = a.len() + b.len();
    // left: a[0..], then diagonal slots; right: b[0..], then diagonal slots
    let cost = |l: usize, r: usize| -> f64 {
        match (l < a.len(), r < b.len()) {
            (true, true) => linf(a[l], b[r]),
            (true, false) => half(a[l]),
            (false, true) => half(b[r]),
            (false, false) => 0.0,
        }
    };
    let mut perm: Vec<usize> = (0..size).collect();
    let mut costs = vec![0.0; size];
    permute(&mut perm, 0, &mut |p| {
        for (l, &r) in p.iter().enumerate() {
            costs[l] = cost(l, r);
        }
        visit(&costs);
    });
}

fn permute(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

pub fn brute_bottleneck(a: &[Point], b: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    enumerate(a, b, |c| best = best.min(c.iter().copied().fold(0.0, f64::max)));
    if a.is_empty() && b.is_empty() {
        0.0
    } else {
        best
    }
}

pub fn brute_wasserstein(a: &[Point], b: &[Point], q: f64) -> f64 {
    let mut best = f64::INFINITY;
    enumerate(a, b, |c| best = best.min(c.iter().map(|x| x.powf(q)).sum::<f64>()));
    if a.is_empty() && b.is_empty() {
        0.0
    } else {
        best.powf(1.0 / q)
    }
}

/// Random finite diagram with up to `max` points, some on a coarse grid so
/// that ties and repeated points occur.
pub fn random_points(rng: &mut impl Rng, max: usize) -> Vec<Point> {
    let count = rng.gen_range(0..=max);
    (0..count)
        .map(|_| {
            if rng.gen_bool(0.3) {
                let b = rng.gen_range(0..5) as f64 / 10.0;
                (b, b + rng.gen_range(1..6) as f64 / 10.0)
            } else {
                let b: f64 = rng.gen();
                (b, b + rng.gen::<f64>() + 1e-3)
            }
        })
        .collect()
}
