//! Persistent homology of unweighted, undirected networks.
//!
//! A graph is lifted to its clique (flag) complex, a discrete Morse function is
//! built on the simplices starting from degree-based vertex weights, and the
//! level subcomplexes at the critical weights form the filtration whose
//! persistence diagrams are computed over Z/2. Diagrams can be compared with
//! the bottleneck and q-Wasserstein distances.
//!
//! ```
//! use morseph::{graph::Graph, complex::CliqueComplex, morse, persistence};
//!
//! let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
//! let k = CliqueComplex::build(&g, 3);
//! let base = morse::vertex_function(&g, 7);
//! let f = morse::assign_morse(&k, &base, 7).unwrap();
//! let report = morse::critical_simplices(&k, &f);
//! let filt = morse::assign_filtration(&k, &f, &report).unwrap();
//! let diagram = persistence::compute_persistence(&k, &filt).unwrap();
//! assert_eq!(diagram.betti().beta, vec![1, 1, 0, 0]);
//! ```

pub mod complex;
pub mod distance;
mod error;
pub mod graph;
pub mod models;
pub mod morse;
pub mod par;
pub mod persistence;
pub mod pipeline;

pub use error::{Error, Result};
