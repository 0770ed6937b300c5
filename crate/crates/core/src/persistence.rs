//! Persistent homology over Z/2 of a filtered complex.
//!
//! Columns of the boundary matrix are sorted index lists; adding two columns
//! is a symmetric difference. Dimensions are reduced top-down so that a
//! column known to be a pivot row can be skipped outright (clearing).

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::complex::CliqueComplex;
use crate::morse::Filtration;
use crate::{Error, Result};

/// A (birth, death) pair with multiplicity. `death` is `f64::INFINITY` for
/// classes that never die.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub multiplicity: usize,
}

impl DiagramPoint {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    /// Sorted by (dim, birth, death); no two entries share all three.
    points: Vec<DiagramPoint>,
    /// Number of homology dimensions tracked (cap + 1).
    dims: usize,
    /// `1 + max simplex weight`, when known.
    pub w_n: Option<f64>,
    /// Coordinates already lie in the unit square with essential deaths at 1.
    pub normalized: bool,
}

/// Betti numbers of the final complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub beta: Vec<usize>,
}

impl PersistenceDiagram {
    /// Builds a diagram, merging equal points and dropping zero-persistence ones.
    pub fn from_points(dims: usize, points: impl IntoIterator<Item = DiagramPoint>) -> Self {
        let mut raw: Vec<DiagramPoint> = points
            .into_iter()
            .filter(|p| p.multiplicity > 0 && p.birth < p.death)
            .collect();
        raw.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(raw.len());
        for p in raw {
            match merged.last_mut() {
                Some(last) if last.dim == p.dim && last.birth == p.birth && last.death == p.death => {
                    last.multiplicity += p.multiplicity;
                }
                _ => merged.push(p),
            }
        }
        let dims = dims.max(merged.iter().map(|p| p.dim + 1).max().unwrap_or(0));
        PersistenceDiagram {
            points: merged,
            dims,
            w_n: None,
            normalized: false,
        }
    }

    pub fn empty(dims: usize) -> Self {
        Self::from_points(dims, [])
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn in_dimension(&self, dim: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    /// Total number of points counted with multiplicity.
    pub fn len(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn betti(&self) -> BettiVector {
        let mut beta = vec![0; self.dims];
        for p in self.points.iter().filter(|p| p.is_essential()) {
            beta[p.dim] += p.multiplicity;
        }
        BettiVector { beta }
    }

    pub fn max_finite_value(&self) -> Option<f64> {
        self.points
            .iter()
            .flat_map(|p| [p.birth, p.death])
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }

    /// Rescales into the unit square: coordinates divided by `w_n`, essential
    /// deaths mapped to 1.
    pub fn normalized(&self, w_n: f64) -> Result<PersistenceDiagram> {
        if let Some(max) = self.max_finite_value() {
            if w_n <= max {
                return Err(Error::Argument(format!(
                    "normalization constant {w_n} must exceed every weight (max {max})"
                )));
            }
        }
        if w_n.is_nan() || w_n <= 0.0 {
            return Err(Error::Argument(format!("normalization constant {w_n} must be positive")));
        }
        let mut d = Self::from_points(
            self.dims,
            self.points.iter().map(|p| DiagramPoint {
                birth: p.birth / w_n,
                death: if p.is_essential() { 1.0 } else { p.death / w_n },
                ..*p
            }),
        );
        d.w_n = Some(w_n);
        d.normalized = true;
        Ok(d)
    }

    /// CSV with header `dim,birth,death,multiplicity`; deaths of essential
    /// classes render as `inf`. Values use the shortest exact representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death,multiplicity\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.dim,
                p.birth,
                format_death(p.death),
                p.multiplicity
            );
        }
        out
    }

    pub fn from_csv<R: BufRead>(reader: R, dims: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut lines = reader.lines().enumerate();
        expect_header(lines.next(), "dim,birth,death,multiplicity")?;
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 4 {
                return Err(parse_err(format!("expected 4 fields, found {}", fields.len())));
            }
            let dim = fields[0].parse().map_err(|e| parse_err(format!("dim: {e}")))?;
            let birth = fields[1].parse().map_err(|e| parse_err(format!("birth: {e}")))?;
            let death = parse_death(fields[2]).map_err(|e| parse_err(format!("death: {e}")))?;
            let multiplicity = fields[3]
                .parse()
                .map_err(|e| parse_err(format!("multiplicity: {e}")))?;
            points.push(DiagramPoint {
                dim,
                birth,
                death,
                multiplicity,
            });
        }
        Ok(Self::from_points(dims, points))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DiagramJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiagramJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

fn expect_header(
    first: Option<(usize, std::io::Result<String>)>,
    expected: &str,
) -> Result<()> {
    let header = first.map(|(_, line)| line).transpose()?;
    if header.as_deref().map(str::trim) == Some(expected) {
        return Ok(());
    }
    Err(Error::Parse {
        line: 1,
        message: format!("expected header {expected}"),
    })
}

fn format_death(death: f64) -> String {
    if death.is_infinite() {
        "inf".to_owned()
    } else {
        death.to_string()
    }
}

fn parse_death(text: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    match text {
        "inf" => Ok(f64::INFINITY),
        other => other.parse(),
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    dims: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    w_n: Option<f64>,
    #[serde(default)]
    normalized: bool,
    points: Vec<PointJson>,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    dim: usize,
    birth: f64,
    /// A number, or the string "inf".
    death: serde_json::Value,
    multiplicity: usize,
}

impl From<&PersistenceDiagram> for DiagramJson {
    fn from(d: &PersistenceDiagram) -> Self {
        DiagramJson {
            dims: d.dims,
            w_n: d.w_n,
            normalized: d.normalized,
            points: d
                .points
                .iter()
                .map(|p| PointJson {
                    dim: p.dim,
                    birth: p.birth,
                    death: if p.is_essential() {
                        serde_json::Value::from("inf")
                    } else {
                        serde_json::Value::from(p.death)
                    },
                    multiplicity: p.multiplicity,
                })
                .collect(),
        }
    }
}

impl TryFrom<DiagramJson> for PersistenceDiagram {
    type Error = Error;

    fn try_from(raw: DiagramJson) -> Result<Self> {
        let mut points = Vec::with_capacity(raw.points.len());
        for p in raw.points {
            let death = match &p.death {
                serde_json::Value::String(s) if s == "inf" => f64::INFINITY,
                serde_json::Value::Number(n) => n
                    .as_f64()
                    .ok_or_else(|| Error::Argument("death out of range".into()))?,
                other => return Err(Error::Argument(format!("invalid death value {other}"))),
            };
            points.push(DiagramPoint {
                dim: p.dim,
                birth: p.birth,
                death,
                multiplicity: p.multiplicity,
            });
        }
        let mut d = PersistenceDiagram::from_points(raw.dims, points);
        d.w_n = raw.w_n;
        d.normalized = raw.normalized;
        Ok(d)
    }
}

/// Normalized intervals in `[0, 1]`; a death of 1 means the class never dies.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode {
    /// `intervals[p]` lists `(birth, death)` for dimension `p`, one per class.
    pub intervals: Vec<Vec<(f64, f64)>>,
    pub w_n: f64,
}

impl Barcode {
    pub fn is_empty(&self) -> bool {
        self.intervals.iter().all(Vec::is_empty)
    }

    /// CSV `dim,birth,death` with six decimals, one row per class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for (dim, bars) in self.intervals.iter().enumerate() {
            for (b, d) in bars {
                let _ = writeln!(out, "{dim},{b:.6},{d:.6}");
            }
        }
        out
    }

    /// Reads the CSV written by [`Barcode::to_csv`] back as a normalized diagram.
    pub fn diagram_from_csv<R: BufRead>(reader: R, dims: usize) -> Result<PersistenceDiagram> {
        let mut points = Vec::new();
        let mut lines = reader.lines().enumerate();
        expect_header(lines.next(), "dim,birth,death")?;
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            let bad = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            }
            points.push(DiagramPoint {
                dim: fields[0].parse().map_err(|e| bad(format!("dim: {e}")))?,
                birth: fields[1].parse().map_err(|e| bad(format!("birth: {e}")))?,
                death: fields[2].parse().map_err(|e| bad(format!("death: {e}")))?,
                multiplicity: 1,
            });
        }
        let mut d = PersistenceDiagram::from_points(dims, points);
        d.w_n = Some(1.0);
        d.normalized = true;
        Ok(d)
    }
}

/// Divides every coordinate by `w_n` and maps infinite deaths to 1.
pub fn normalize(d: &PersistenceDiagram, w_n: f64) -> Result<Barcode> {
    let scaled = d.normalized(w_n)?;
    let mut intervals = vec![Vec::new(); d.dims()];
    for p in scaled.points() {
        for _ in 0..p.multiplicity {
            intervals[p.dim].push((p.birth, p.death));
        }
    }
    Ok(Barcode { intervals, w_n })
}

/// Pairing produced by the reduction, in filtration positions.
#[derive(Clone, Debug, Default)]
pub struct Pairing {
    /// `(birth position, death position)`.
    pub pairs: Vec<(usize, usize)>,
    pub essential: Vec<usize>,
}

/// Reduces the filtered boundary matrix and reads off the diagram.
pub fn compute_persistence(k: &CliqueComplex, filt: &Filtration) -> Result<PersistenceDiagram> {
    let pairing = reduce(k, filt)?;
    let weight_at = |slot: usize| filt.weights[filt.order[slot] as usize];
    let dim_at = |slot: usize| k.locate(filt.order[slot] as usize).0;
    let finite = pairing.pairs.iter().map(|&(b, d)| DiagramPoint {
        dim: dim_at(b),
        birth: weight_at(b),
        death: weight_at(d),
        multiplicity: 1,
    });
    let essential = pairing.essential.iter().map(|&b| DiagramPoint {
        dim: dim_at(b),
        birth: weight_at(b),
        death: f64::INFINITY,
        multiplicity: 1,
    });
    let mut d = PersistenceDiagram::from_points(k.cap() + 1, finite.chain(essential));
    d.w_n = Some(1.0 + filt.weights.iter().copied().fold(0.0, f64::max));
    Ok(d)
}

/// Column reduction with clearing, processing dimensions from the top down.
pub fn reduce(k: &CliqueComplex, filt: &Filtration) -> Result<Pairing> {
    let n = k.len();
    if filt.weights.len() != n || filt.order.len() != n {
        return Err(Error::Structure(format!(
            "filtration covers {} simplices, complex has {n}",
            filt.order.len()
        )));
    }
    let mut slot_of = vec![u32::MAX; n];
    for (slot, &index) in filt.order.iter().enumerate() {
        let index = index as usize;
        if index >= n || slot_of[index] != u32::MAX {
            return Err(Error::Structure("filtration order is not a permutation".into()));
        }
        slot_of[index] = slot as u32;
    }

    // boundary columns in filtration positions, grouped by dimension
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); k.cap() + 1];
    for (slot, &index) in filt.order.iter().enumerate() {
        by_dim[k.locate(index as usize).0].push(slot);
    }

    let mut pivot_of: Vec<u32> = vec![u32::MAX; n];
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut cleared = vec![false; n];
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();

    for p in (1..=k.cap()).rev() {
        let lower = k.offset(p - 1);
        for &slot in &by_dim[p] {
            if cleared[slot] {
                continue;
            }
            let index = filt.order[slot] as usize;
            let pos = index - k.offset(p);
            let mut col: Vec<u32> = k
                .face_positions(p, pos)
                .iter()
                .map(|&f| slot_of[lower + f as usize])
                .collect();
            col.sort_unstable();
            if col.last().is_some_and(|&low| low as usize >= slot) {
                return Err(Error::Structure(format!(
                    "simplex {:?} precedes one of its faces",
                    k.simplex_vertices(p, pos)
                )));
            }
            while let Some(&low) = col.last() {
                let other = pivot_of[low as usize];
                if other == u32::MAX {
                    break;
                }
                symmetric_difference(&col, &columns[other as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_of[low as usize] = slot as u32;
                cleared[low as usize] = true;
                pairs.push((low as usize, slot));
                columns[slot] = col;
            }
        }
        // columns of this dimension are only ever added to each other
        for &slot in &by_dim[p] {
            columns[slot] = Vec::new();
        }
    }

    let mut negative = vec![false; n];
    for &(_, death) in &pairs {
        negative[death] = true;
    }
    let essential = (0..n)
        .filter(|&slot| pivot_of[slot] == u32::MAX && !negative[slot])
        .collect();
    pairs.sort_unstable();
    Ok(Pairing { pairs, essential })
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
