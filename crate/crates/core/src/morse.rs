//! Discrete Morse functions on clique complexes.
//!
//! [`assign_morse`] walks the simplices in canonical order, giving each one a
//! weight derived from its two heaviest faces, and pairs at most one face per
//! simplex through a `flag` so the result is always a discrete Morse function.
//! [`critical_simplices`] recovers the unpaired simplices and their weights,
//! and [`assign_filtration`] turns the critical weights into a filtration by
//! level subcomplexes.
//!
//! Randomness: vertex noise and simplex noise come from two independent
//! streams of one ChaCha generator seeded by the caller, consumed in
//! canonical order. A `(graph, seed, cap)` triple therefore fixes every weight.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{alternating_sum, CliqueComplex};
use crate::graph::Graph;
use crate::{Error, Result};

/// Upper end of the open noise interval `(0, EPSILON_MAX)`.
pub const EPSILON_MAX: f64 = 0.5;

const VERTEX_STREAM: u64 = 0;
const SIMPLEX_STREAM: u64 = 1;

/// Weights on every simplex of a complex, indexed by global simplex index.
#[derive(Clone, Debug)]
pub struct MorseAssignment {
    pub weights: Vec<f64>,
    pub vertex_base: Vec<f64>,
    /// Set when a simplex was paired with a coface during construction.
    pub flag: Vec<bool>,
    /// How often each flag went from 0 to 1. Never above one.
    pub flag_transitions: Vec<u32>,
    pub seed: Option<u64>,
    /// Faces whose top two weights tied while sorting.
    pub ties: usize,
}

impl MorseAssignment {
    /// Wraps externally supplied weights (e.g. for verification).
    pub fn from_weights(k: &CliqueComplex, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != k.len() {
            return Err(Error::Argument(format!(
                "expected {} weights, got {}",
                k.len(),
                weights.len()
            )));
        }
        let n0 = k.count(0);
        Ok(MorseAssignment {
            vertex_base: weights[..n0].to_vec(),
            flag: vec![false; weights.len()],
            flag_transitions: vec![0; weights.len()],
            weights,
            seed: None,
            ties: 0,
        })
    }

    pub fn weight(&self, k: &CliqueComplex, p: usize, pos: usize) -> f64 {
        self.weights[k.global(p, pos)]
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.weights.iter().copied().reduce(f64::max)
    }
}

fn draw_epsilon<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let e = rng.gen::<f64>() * EPSILON_MAX;
        if e > 0.0 {
            return e;
        }
    }
}

/// Hashes `f64` bit patterns with one multiply; the keys are already
/// well mixed, so a keyed hash buys nothing.
#[derive(Default)]
struct BitsHasher(u64);

impl Hasher for BitsHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(u64::from(b));
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0 ^ x ^ (x >> 29)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

type BitSet = HashSet<u64, BuildHasherDefault<BitsHasher>>;

/// `deg_max - degree(v) + eps` for every vertex, with `eps` uniform on `(0, 0.5)`.
///
/// A value that collides bit-for-bit with an earlier vertex is re-drawn.
pub fn vertex_function(g: &Graph, seed: u64) -> Vec<f64> {
    let summary = g.degree_summary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(VERTEX_STREAM);
    let mut seen = BitSet::with_capacity_and_hasher(g.vertex_count(), Default::default());
    summary
        .degrees
        .iter()
        .map(|&d| {
            let base = (summary.deg_max - d) as f64;
            loop {
                let value = base + draw_epsilon(&mut rng);
                if seen.insert(value.to_bits()) {
                    return value;
                }
            }
        })
        .collect()
}

/// Runs the construction with the default uniform `(0, 0.5)` noise.
pub fn assign_morse(k: &CliqueComplex, base: &[f64], seed: u64) -> Result<MorseAssignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SIMPLEX_STREAM);
    let mut m = assign_morse_with(k, base, || draw_epsilon(&mut rng))?;
    m.seed = Some(seed);
    Ok(m)
}

/// Runs the construction drawing the noise term from `epsilon`.
///
/// `epsilon` must return strictly positive values.
pub fn assign_morse_with<E>(k: &CliqueComplex, base: &[f64], mut epsilon: E) -> Result<MorseAssignment>
where
    E: FnMut() -> f64,
{
    let n0 = k.count(0);
    if base.len() != n0 {
        return Err(Error::Structure(format!(
            "vertex function covers {} vertices, complex has {n0}",
            base.len()
        )));
    }
    // Bit collisions are rare, so build without the collision set and check
    // uniqueness with one sort; on a collision, replay the recorded draws
    // through the checked construction, which then re-draws exactly where a
    // checked run from the start would have.
    let mut drawn = Vec::with_capacity(k.len() - n0);
    let mut raw = construct(k, base, &mut || {
        let e = epsilon();
        drawn.push(e);
        e
    }, None);
    let mut bits: Vec<u64> = raw.weights.iter().map(|w| w.to_bits()).collect();
    bits.sort_unstable();
    if bits.windows(2).any(|w| w[0] == w[1]) {
        let mut replay = drawn.into_iter();
        let mut used = BitSet::with_capacity_and_hasher(k.len(), Default::default());
        raw = construct(k, base, &mut || replay.next().unwrap_or_else(&mut epsilon), Some(&mut used));
    }
    if raw.ties > 0 {
        log::warn!("{} simplices have tied heaviest faces", raw.ties);
    }
    Ok(MorseAssignment {
        weights: raw.weights,
        vertex_base: base.to_vec(),
        flag: raw.flag,
        flag_transitions: raw.flag_transitions,
        seed: None,
        ties: raw.ties,
    })
}

struct Construction {
    weights: Vec<f64>,
    flag: Vec<bool>,
    flag_transitions: Vec<u32>,
    ties: usize,
}

/// One pass of the construction; with `used`, a draw whose weight collides
/// bit-for-bit with an earlier weight is re-drawn.
fn construct(
    k: &CliqueComplex,
    base: &[f64],
    epsilon: &mut dyn FnMut() -> f64,
    mut used: Option<&mut BitSet>,
) -> Construction {
    let n0 = base.len();
    let total = k.len();
    let mut weights = vec![0.0; total];
    let mut flag = vec![false; total];
    let mut flag_transitions = vec![0u32; total];
    let mut ties = 0;

    weights[..n0].copy_from_slice(base);
    if let Some(used) = used.as_deref_mut() {
        used.extend(base.iter().map(|w| w.to_bits()));
    }

    let mut faces: Vec<(f64, usize)> = Vec::with_capacity(k.cap() + 1);
    for p in 1..=k.cap() {
        let lower = k.offset(p - 1);
        for pos in 0..k.count(p) {
            faces.clear();
            faces.extend(
                k.face_positions(p, pos)
                    .iter()
                    .map(|&f| (weights[lower + f as usize], lower + f as usize)),
            );
            // heaviest first; equal weights fall back to lexicographic order,
            // which is the order of global indices within a dimension
            faces.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let (top, top_index) = faces[0];
            let (second, _) = faces[1];
            if top == second {
                ties += 1;
                log::debug!("faces of {:?} tie at weight {top}", k.simplex_vertices(p, pos));
            }
            let index = k.global(p, pos);
            if !flag[top_index] && top > second {
                weights[index] = (top + second) / 2.0;
                flag[top_index] = true;
                flag_transitions[top_index] += 1;
            } else {
                weights[index] = loop {
                    let w = top + epsilon();
                    match used.as_deref() {
                        Some(used) if used.contains(&w.to_bits()) => continue,
                        _ => break w,
                    }
                };
            }
            if let Some(used) = used.as_deref_mut() {
                used.insert(weights[index].to_bits());
            }
        }
    }
    Construction {
        weights,
        flag,
        flag_transitions,
        ties,
    }
}

/// The dimension function, `f(alpha) = dim(alpha)`.
pub fn dimension_function(k: &CliqueComplex) -> MorseAssignment {
    let weights = k.iter().map(|(p, _)| p as f64).collect();
    MorseAssignment::from_weights(k, weights).expect("one weight per simplex")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// More than one coface with weight at most the simplex's.
    Cofaces,
    /// More than one face with weight at least the simplex's.
    Faces,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub dimension: usize,
    pub position: usize,
    pub kind: ViolationKind,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct MorseCheck {
    pub is_morse: bool,
    pub violations: Vec<Violation>,
}

/// Sizes of the `U` (cofaces no heavier) and `V` (faces no lighter) sets of
/// every simplex, by exhaustive face scan.
pub fn uv_counts(k: &CliqueComplex, m: &MorseAssignment) -> (Vec<usize>, Vec<usize>) {
    let mut u = vec![0usize; k.len()];
    let mut v = vec![0usize; k.len()];
    for p in 1..=k.cap() {
        let lower = k.offset(p - 1);
        for pos in 0..k.count(p) {
            let index = k.global(p, pos);
            let w = m.weights[index];
            for &f in k.face_positions(p, pos) {
                let face = lower + f as usize;
                if w <= m.weights[face] {
                    v[index] += 1;
                    u[face] += 1;
                }
            }
        }
    }
    (u, v)
}

pub fn verify_morse(k: &CliqueComplex, m: &MorseAssignment) -> MorseCheck {
    let (u, v) = uv_counts(k, m);
    let mut violations = Vec::new();
    for (index, (&cu, &cv)) in u.iter().zip(&v).enumerate() {
        let (p, pos) = k.locate(index);
        if cu > 1 {
            violations.push(Violation {
                dimension: p,
                position: pos,
                kind: ViolationKind::Cofaces,
                count: cu,
            });
        }
        if cv > 1 {
            violations.push(Violation {
                dimension: p,
                position: pos,
                kind: ViolationKind::Faces,
                count: cv,
            });
        }
    }
    MorseCheck {
        is_morse: violations.is_empty(),
        violations,
    }
}

/// Number of face/coface pairs carrying identical weights.
pub fn strictness_violations(k: &CliqueComplex, m: &MorseAssignment) -> usize {
    let mut count = 0;
    for p in 1..=k.cap() {
        let lower = k.offset(p - 1);
        for pos in 0..k.count(p) {
            let w = m.weights[k.global(p, pos)];
            count += k
                .face_positions(p, pos)
                .iter()
                .filter(|&&f| m.weights[lower + f as usize] == w)
                .count();
        }
    }
    count
}

#[derive(Clone, Debug)]
pub struct CriticalReport {
    pub is_critical: Vec<bool>,
    /// Critical simplices per dimension.
    pub counts: Vec<usize>,
    /// Sorted, de-duplicated weights of critical simplices.
    pub critical_weights: Vec<f64>,
}

impl CriticalReport {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Marks a simplex and its heaviest face non-critical whenever that face is
/// at least as heavy as the simplex.
pub fn critical_simplices(k: &CliqueComplex, m: &MorseAssignment) -> CriticalReport {
    let mut is_critical = vec![true; k.len()];
    for p in 1..=k.cap() {
        let lower = k.offset(p - 1);
        for pos in 0..k.count(p) {
            let index = k.global(p, pos);
            let top = k
                .face_positions(p, pos)
                .iter()
                .map(|&f| lower + f as usize)
                .min_by(|&a, &b| m.weights[b].total_cmp(&m.weights[a]).then(a.cmp(&b)))
                .expect("simplices of positive dimension have faces");
            if m.weights[top] >= m.weights[index] {
                is_critical[index] = false;
                is_critical[top] = false;
            }
        }
    }
    report_from_flags(k, m, is_critical)
}

pub(crate) fn report_from_flags(
    k: &CliqueComplex,
    m: &MorseAssignment,
    is_critical: Vec<bool>,
) -> CriticalReport {
    let mut counts = vec![0; k.cap() + 1];
    let mut critical_weights = Vec::new();
    for (index, &c) in is_critical.iter().enumerate() {
        if c {
            counts[k.locate(index).0] += 1;
            critical_weights.push(m.weights[index]);
        }
    }
    critical_weights.sort_unstable_by(f64::total_cmp);
    critical_weights.dedup();
    CriticalReport {
        is_critical,
        counts,
        critical_weights,
    }
}

/// Filtration weight per simplex plus the order used for reduction.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub weights: Vec<f64>,
    /// Global simplex indices sorted by (weight, dimension, canonical position).
    pub order: Vec<u32>,
    /// The increasing stage values the weights are drawn from.
    pub stages: Vec<f64>,
    /// Simplices that only received a weight from the trailing catch-all.
    pub leftovers: usize,
}

impl Filtration {
    pub fn from_weights(weights: Vec<f64>, stages: Vec<f64>, leftovers: usize) -> Self {
        let mut order: Vec<u32> = (0..weights.len() as u32).collect();
        // global indices are already dimension-major and canonical within a dimension
        order.sort_by(|&a, &b| weights[a as usize].total_cmp(&weights[b as usize]));
        Filtration {
            weights,
            order,
            stages,
            leftovers,
        }
    }

    /// Checks that faces never enter after their cofaces.
    pub fn is_face_monotone(&self, k: &CliqueComplex) -> bool {
        (1..=k.cap()).all(|p| {
            let lower = k.offset(p - 1);
            (0..k.count(p)).all(|pos| {
                let w = self.weights[k.global(p, pos)];
                k.face_positions(p, pos)
                    .iter()
                    .all(|&f| self.weights[lower + f as usize] <= w)
            })
        })
    }
}

/// Smallest `f` over each simplex and all of its cofaces, i.e. the first
/// value at which it enters a level subcomplex.
fn entry_values(k: &CliqueComplex, values: &[f64]) -> Vec<f64> {
    let mut entry = values.to_vec();
    for p in (1..=k.cap()).rev() {
        let lower = k.offset(p - 1);
        for pos in 0..k.count(p) {
            let w = entry[k.global(p, pos)];
            for &f in k.face_positions(p, pos) {
                let face = &mut entry[lower + f as usize];
                if w < *face {
                    *face = w;
                }
            }
        }
    }
    entry
}

/// Assigns each simplex the first critical weight whose level subcomplex
/// contains it. Simplices outside every such level subcomplex receive the
/// last critical weight.
pub fn assign_filtration(
    k: &CliqueComplex,
    m: &MorseAssignment,
    c: &CriticalReport,
) -> Result<Filtration> {
    if k.is_empty() {
        return Ok(Filtration::from_weights(Vec::new(), c.critical_weights.clone(), 0));
    }
    let stages = &c.critical_weights;
    let last = *stages.last().ok_or_else(|| {
        Error::Invariant("non-empty complex without critical weights".into())
    })?;
    let entry = entry_values(k, &m.weights);
    let mut leftovers = 0;
    let weights = entry
        .iter()
        .map(|&e| {
            let i = stages.partition_point(|&w| w < e);
            if i == stages.len() {
                leftovers += 1;
                last
            } else {
                stages[i]
            }
        })
        .collect();
    if leftovers > 0 {
        log::debug!("{leftovers} simplices placed at the last critical weight");
    }
    Ok(Filtration::from_weights(weights, stages.clone(), leftovers))
}

/// Level subcomplexes at every distinct weight value.
pub fn full_weight_filtration(k: &CliqueComplex, m: &MorseAssignment) -> Filtration {
    let weights = entry_values(k, &m.weights);
    let mut stages = m.weights.clone();
    stages.sort_unstable_by(f64::total_cmp);
    stages.dedup();
    Filtration::from_weights(weights, stages, 0)
}

/// Baseline filtration where every simplex enters at its dimension.
pub fn dimension_filtration(k: &CliqueComplex) -> Filtration {
    let weights: Vec<f64> = k.iter().map(|(p, _)| p as f64).collect();
    let stages = (0..=k.cap()).filter(|&p| k.count(p) > 0).map(|p| p as f64).collect();
    Filtration::from_weights(weights, stages, 0)
}

/// `(sum n - sum m) / (sum n - sum beta)`: 1 when the critical count meets
/// the Betti lower bound, 0 when every simplex is critical.
pub fn optimality_mu(n: &[usize], m: &[usize], beta: &[usize]) -> Result<f64> {
    if n.len() != m.len() || n.len() != beta.len() {
        return Err(Error::Argument(format!(
            "count vectors differ in length: {}, {}, {}",
            n.len(),
            m.len(),
            beta.len()
        )));
    }
    let total_n: usize = n.iter().sum();
    let total_m: usize = m.iter().sum();
    let total_beta: usize = beta.iter().sum();
    if total_n <= total_beta {
        return Err(Error::Argument(
            "optimality indicator undefined: every simplex generates homology".into(),
        ));
    }
    Ok((total_n as f64 - total_m as f64) / (total_n as f64 - total_beta as f64))
}

/// Forman's weak and strong inequalities against a Betti vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormanCheck {
    pub lower_bound_holds: bool,
    pub euler_simplices: i64,
    pub euler_critical: i64,
    pub euler_betti: i64,
}

impl FormanCheck {
    pub fn new(n: &[usize], m: &[usize], beta: &[usize]) -> Self {
        FormanCheck {
            lower_bound_holds: m.iter().zip(beta).all(|(m, b)| m >= b),
            euler_simplices: alternating_sum(n),
            euler_critical: alternating_sum(m),
            euler_betti: alternating_sum(beta),
        }
    }

    pub fn holds(&self) -> bool {
        self.lower_bound_holds
            && self.euler_simplices == self.euler_critical
            && self.euler_critical == self.euler_betti
    }
}

/// One `p v0 .. vp weight is_critical filtration_weight` line per simplex,
/// weights with 17 significant digits.
pub fn dump(k: &CliqueComplex, m: &MorseAssignment, c: &CriticalReport, filt: &Filtration) -> String {
    let mut out = String::new();
    for (p, pos) in k.iter() {
        let index = k.global(p, pos);
        let _ = write!(out, "{p}");
        for v in k.simplex_vertices(p, pos) {
            let _ = write!(out, " {v}");
        }
        let _ = writeln!(
            out,
            " {:.16e} {} {:.16e}",
            m.weights[index],
            u8::from(c.is_critical[index]),
            filt.weights[index]
        );
    }
    out
}
