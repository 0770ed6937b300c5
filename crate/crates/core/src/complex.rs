//! Clique (flag) complexes truncated at a dimension cap.
//!
//! Simplices are stored per dimension as flat vertex arrays sorted
//! lexicographically, which fixes the canonical order used everywhere else:
//! dimension-major, then lexicographic. The codimension-1 faces of every
//! simplex are resolved to positions once at build time.

use std::fmt::Write as _;

use crate::graph::{Graph, VertexId};
use crate::{par, Error, Result};

/// A simplex given by its strictly increasing vertex list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<VertexId>,
}

impl Simplex {
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Argument("a simplex needs at least one vertex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument("repeated vertex in simplex".into()));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-1 faces; face `i` omits vertex `i`. Empty for vertices.
    pub fn faces(&self) -> Vec<Simplex> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| Simplex {
                vertices: self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            })
            .collect()
    }
}

/// Compressed adjacency: `items[offsets[i]..offsets[i + 1]]` belongs to row `i`.
#[derive(Clone, Debug)]
pub struct Csr {
    pub offsets: Vec<usize>,
    pub items: Vec<u32>,
}

impl Csr {
    pub fn row(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Clone, Debug)]
pub struct CliqueComplex {
    cap: usize,
    /// Per dimension `p`, consecutive chunks of `p + 1` vertices.
    vertices: Vec<Vec<VertexId>>,
    /// Per dimension `p >= 1`, chunks of `p + 1` face positions in dimension `p - 1`.
    boundary: Vec<Vec<u32>>,
    offsets: Vec<usize>,
}

/// Validating entry point for callers holding a signed cap.
pub fn build_clique_complex(g: &Graph, cap: i64) -> Result<CliqueComplex> {
    if cap < 0 {
        return Err(Error::Argument(format!("dimension cap must be >= 0, got {cap}")));
    }
    Ok(CliqueComplex::build(g, cap as usize))
}

impl CliqueComplex {
    /// Enumerates every clique of at most `cap + 1` vertices.
    pub fn build(g: &Graph, cap: usize) -> Self {
        let order = degeneracy_order(g);
        let mut rank = vec![0u32; g.vertex_count()];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        // Each clique is grown exactly once, from its earliest vertex in the
        // degeneracy order; the forward lists stay short on sparse graphs.
        let forward: Vec<Vec<VertexId>> = (0..g.vertex_count())
            .map(|v| {
                let mut out: Vec<VertexId> = g
                    .neighbors(v as VertexId)
                    .iter()
                    .copied()
                    .filter(|&w| rank[w as usize] > rank[v])
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();

        let per_vertex: Vec<Vec<Vec<VertexId>>> =
            par::map_range(g.vertex_count(), |v| cliques_from(v as VertexId, g, &forward, cap));

        let mut raw: Vec<Vec<VertexId>> = vec![Vec::new(); cap + 1];
        for lists in per_vertex {
            for (p, flat) in lists.into_iter().enumerate() {
                raw[p].extend(flat);
            }
        }
        let vertices: Vec<Vec<VertexId>> = raw
            .into_iter()
            .enumerate()
            .map(|(p, flat)| sort_chunks(flat, p + 1))
            .collect();
        Self::from_sorted(cap, vertices)
    }

    /// Builds a complex from explicit simplices, checking face closure.
    ///
    /// The cap is the largest dimension present.
    pub fn from_simplices(simplices: &[Simplex]) -> Result<Self> {
        let cap = simplices.iter().map(Simplex::dimension).max().unwrap_or(0);
        let mut raw: Vec<Vec<VertexId>> = vec![Vec::new(); cap + 1];
        for s in simplices {
            raw[s.dimension()].extend_from_slice(s.vertices());
        }
        let vertices: Vec<Vec<VertexId>> = raw
            .into_iter()
            .enumerate()
            .map(|(p, flat)| dedup_chunks(sort_chunks(flat, p + 1), p + 1))
            .collect();
        for p in 1..=cap {
            for chunk in vertices[p].chunks(p + 1) {
                for skip in 0..=p {
                    let face: Vec<VertexId> = chunk
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    if find_chunk(&vertices[p - 1], p, &face).is_none() {
                        return Err(Error::Structure(format!(
                            "face {face:?} of {chunk:?} is missing"
                        )));
                    }
                }
            }
        }
        Ok(Self::from_sorted(cap, vertices))
    }

    fn from_sorted(cap: usize, vertices: Vec<Vec<VertexId>>) -> Self {
        let mut offsets = Vec::with_capacity(cap + 2);
        let mut acc = 0;
        for (p, flat) in vertices.iter().enumerate() {
            offsets.push(acc);
            acc += flat.len() / (p + 1);
        }
        offsets.push(acc);

        let mut boundary = vec![Vec::new()];
        for p in 1..=cap {
            let lower = &vertices[p - 1];
            let faces = par::flat_map_chunks(&vertices[p], p + 1, |simplex, out| {
                let mut face = Vec::with_capacity(p);
                for skip in 0..=p {
                    face.clear();
                    face.extend(
                        simplex
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v),
                    );
                    let pos = find_chunk(lower, p, &face).expect("clique complex is face-closed");
                    out.push(pos as u32);
                }
            });
            boundary.push(faces);
        }
        CliqueComplex {
            cap,
            vertices,
            boundary,
            offsets,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Largest dimension holding at least one simplex, if any.
    pub fn dimension(&self) -> Option<usize> {
        (0..=self.cap).rev().find(|&p| self.count(p) > 0)
    }

    pub fn count(&self, p: usize) -> usize {
        self.vertices.get(p).map_or(0, |v| v.len() / (p + 1))
    }

    /// `n_p` for `p = 0..=cap`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.cap).map(|p| self.count(p)).collect()
    }

    pub fn len(&self) -> usize {
        self.offsets[self.cap + 1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global index of the first simplex of dimension `p`.
    pub fn offset(&self, p: usize) -> usize {
        self.offsets[p]
    }

    pub fn global(&self, p: usize, pos: usize) -> usize {
        self.offsets[p] + pos
    }

    /// Dimension and in-dimension position of a global index.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        let p = self.offsets.partition_point(|&o| o <= index) - 1;
        (p, index - self.offsets[p])
    }

    pub fn simplex_vertices(&self, p: usize, pos: usize) -> &[VertexId] {
        &self.vertices[p][pos * (p + 1)..(pos + 1) * (p + 1)]
    }

    pub fn simplex(&self, p: usize, pos: usize) -> Simplex {
        Simplex {
            vertices: self.simplex_vertices(p, pos).to_vec(),
        }
    }

    /// Positions (in dimension `p - 1`) of the faces of simplex `pos` of
    /// dimension `p`, in deleted-vertex order.
    pub fn face_positions(&self, p: usize, pos: usize) -> &[u32] {
        if p == 0 {
            return &[];
        }
        &self.boundary[p][pos * (p + 1)..(pos + 1) * (p + 1)]
    }

    pub fn position(&self, vertices: &[VertexId]) -> Option<(usize, usize)> {
        let p = vertices.len().checked_sub(1)?;
        if p > self.cap {
            return None;
        }
        find_chunk(&self.vertices[p], p + 1, vertices).map(|pos| (p, pos))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.position(s.vertices()).is_some()
    }

    /// Cofaces of every simplex of dimension `p`, as positions in `p + 1`.
    pub fn cofaces(&self, p: usize) -> Csr {
        let n = self.count(p);
        let mut counts = vec![0usize; n + 1];
        if p < self.cap {
            for &f in &self.boundary[p + 1] {
                counts[f as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut items = vec![0u32; counts[n]];
        let mut fill = counts.clone();
        if p < self.cap {
            for (coface, chunk) in self.boundary[p + 1].chunks(p + 2).enumerate() {
                for &f in chunk {
                    items[fill[f as usize]] = coface as u32;
                    fill[f as usize] += 1;
                }
            }
        }
        Csr {
            offsets: counts,
            items,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.cap).flat_map(move |p| (0..self.count(p)).map(move |pos| (p, pos)))
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.counts())
    }

    /// One `p v0 .. vp` line per simplex in canonical order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (p, pos) in self.iter() {
            let _ = write!(out, "{p}");
            for v in self.simplex_vertices(p, pos) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn alternating_sum(values: &[usize]) -> i64 {
    values
        .iter()
        .enumerate()
        .map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// Smallest-last vertex ordering.
pub fn degeneracy_order(g: &Graph) -> Vec<VertexId> {
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v as VertexId)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].push(v as VertexId);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    while order.len() < n {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().unwrap();
        // stale entry: degree dropped after it was bucketed
        if removed[v as usize] || degree[v as usize] != low {
            continue;
        }
        removed[v as usize] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w as usize] {
                degree[w as usize] -= 1;
                buckets[degree[w as usize]].push(w);
                if degree[w as usize] < low {
                    low = degree[w as usize];
                }
            }
        }
    }
    order
}

fn cliques_from(v: VertexId, g: &Graph, forward: &[Vec<VertexId>], cap: usize) -> Vec<Vec<VertexId>> {
    let mut out: Vec<Vec<VertexId>> = vec![Vec::new(); cap + 1];
    let mut clique = vec![v];
    extend_clique(&mut clique, &forward[v as usize], g, cap, &mut out);
    out
}

// `candidates` holds the common neighbours of `clique` that may still be
// appended: forward of the root and after the last appended vertex.
fn extend_clique(
    clique: &mut Vec<VertexId>,
    candidates: &[VertexId],
    g: &Graph,
    cap: usize,
    out: &mut [Vec<VertexId>],
) {
    let p = clique.len() - 1;
    let start = out[p].len();
    out[p].extend_from_slice(clique);
    out[p][start..].sort_unstable();
    if p == cap {
        return;
    }
    for (i, &w) in candidates.iter().enumerate() {
        let next = intersect_sorted(&candidates[i + 1..], g.neighbors(w));
        clique.push(w);
        extend_clique(clique, &next, g, cap, out);
        clique.pop();
    }
}

fn intersect_sorted(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn sort_chunks(flat: Vec<VertexId>, width: usize) -> Vec<VertexId> {
    let n = flat.len() / width;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| flat[a * width..(a + 1) * width].cmp(&flat[b * width..(b + 1) * width]));
    let mut out = Vec::with_capacity(flat.len());
    for i in idx {
        out.extend_from_slice(&flat[i * width..(i + 1) * width]);
    }
    out
}

fn dedup_chunks(flat: Vec<VertexId>, width: usize) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = Vec::with_capacity(flat.len());
    for chunk in flat.chunks(width) {
        if out.len() < width || &out[out.len() - width..] != chunk {
            out.extend_from_slice(chunk);
        }
    }
    out
}

fn find_chunk(flat: &[VertexId], width: usize, key: &[VertexId]) -> Option<usize> {
    let n = flat.len() / width;
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * width..(mid + 1) * width].cmp(key) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Some(mid),
        }
    }
    None
}
