//! End-to-end analysis of one graph: complex, Morse function, critical
//! simplices, filtration, persistence and the summary statistics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::complex::CliqueComplex;
use crate::graph::Graph;
use crate::morse::{self, CriticalReport, Filtration, FormanCheck, MorseAssignment};
use crate::persistence::{self, PersistenceDiagram};
use crate::{Error, Result};

pub const DEFAULT_CAP: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationKind {
    /// Level subcomplexes at the critical weights of the Morse function.
    #[default]
    Morse,
    /// Every simplex enters at its dimension.
    Dimension,
}

impl fmt::Display for FiltrationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiltrationKind::Morse => "morse",
            FiltrationKind::Dimension => "dimension",
        })
    }
}

impl FromStr for FiltrationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "morse" => Ok(FiltrationKind::Morse),
            "dimension" => Ok(FiltrationKind::Dimension),
            other => Err(Error::Argument(format!("unknown filtration '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub cap: usize,
    pub seed: u64,
    pub filtration: FiltrationKind,
}

impl PipelineConfig {
    pub fn new(seed: u64) -> Self {
        PipelineConfig {
            cap: DEFAULT_CAP,
            seed,
            filtration: FiltrationKind::Morse,
        }
    }
}

/// Alternating sums of simplex, critical and Betti counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    pub simplices: i64,
    pub critical: i64,
    pub betti: i64,
    pub weak_inequalities: bool,
    pub consistent: bool,
}

impl From<&FormanCheck> for EulerCheck {
    fn from(f: &FormanCheck) -> Self {
        EulerCheck {
            simplices: f.euler_simplices,
            critical: f.euler_critical,
            betti: f.euler_betti,
            weak_inequalities: f.lower_bound_holds,
            consistent: f.holds(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub vertices: usize,
    pub edges: usize,
    pub cap: usize,
    pub seed: u64,
    pub filtration: FiltrationKind,
    /// Simplices per dimension.
    pub n: Vec<usize>,
    /// Critical simplices per dimension.
    pub m: Vec<usize>,
    pub beta: Vec<usize>,
    /// Optimality indicator; absent when every simplex carries homology.
    pub mu: Option<f64>,
    pub euler: EulerCheck,
    pub critical_weights: usize,
    pub leftovers: usize,
    pub w_n: f64,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub complex: CliqueComplex,
    pub morse: MorseAssignment,
    pub critical: CriticalReport,
    pub filtration: Filtration,
    pub diagram: PersistenceDiagram,
    pub summary: Summary,
}

pub fn analyze(g: &Graph, config: &PipelineConfig) -> Result<Analysis> {
    let complex = CliqueComplex::build(g, config.cap);
    let (morse, filtration, critical) = match config.filtration {
        FiltrationKind::Morse => {
            let base = morse::vertex_function(g, config.seed);
            let m = morse::assign_morse(&complex, &base, config.seed)?;
            let check = morse::verify_morse(&complex, &m);
            if !check.is_morse {
                return Err(Error::Invariant(format!(
                    "constructed function is not Morse: {} violations, first {:?}",
                    check.violations.len(),
                    check.violations.first()
                )));
            }
            let c = morse::critical_simplices(&complex, &m);
            let f = morse::assign_filtration(&complex, &m, &c)?;
            (m, f, c)
        }
        FiltrationKind::Dimension => {
            let m = morse::dimension_function(&complex);
            let c = morse::critical_simplices(&complex, &m);
            (m, morse::dimension_filtration(&complex), c)
        }
    };
    let mut diagram = persistence::compute_persistence(&complex, &filtration)?;
    let w_n = 1.0 + morse.max_weight().unwrap_or(0.0);
    diagram.w_n = Some(w_n);

    let n = complex.counts();
    let m = critical.counts.clone();
    let beta = diagram.betti().beta;
    let forman = FormanCheck::new(&n, &m, &beta);
    if !forman.holds() {
        return Err(Error::Invariant(format!(
            "Forman identities fail: n = {n:?}, m = {m:?}, beta = {beta:?}"
        )));
    }
    let mu = morse::optimality_mu(&n, &m, &beta).ok();
    let summary = Summary {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        cap: config.cap,
        seed: config.seed,
        filtration: config.filtration,
        euler: EulerCheck::from(&forman),
        critical_weights: critical.critical_weights.len(),
        leftovers: filtration.leftovers,
        n,
        m,
        beta,
        mu,
        w_n,
    };
    Ok(Analysis {
        complex,
        morse,
        critical,
        filtration,
        diagram,
        summary,
    })
}

/// Only the diagram, for ensemble work.
pub fn diagram(g: &Graph, config: &PipelineConfig) -> Result<PersistenceDiagram> {
    analyze(g, config).map(|a| a.diagram)
}
