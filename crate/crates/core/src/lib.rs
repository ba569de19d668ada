//! Scattering theory for finite weighted graphs with semi-infinite paths
//! attached: S-matrices and their analytic continuation, bound-state
//! census, winding-number checks, completeness of the eigenbasis and
//! wave-packet dynamics.

pub mod cli;
pub mod completeness;
pub mod dynamics;
pub mod error;
pub mod fuzz;
pub mod gallery;
pub mod graph;
pub mod levinson;
mod linalg;
pub mod quadrature;
pub mod report;
pub mod smatrix;
pub mod spectra;
pub mod tolerance;

pub use error::{Error, Result};
pub use graph::{load_graph, projector_pn, ScatteringGraph};
pub use tolerance::ToleranceConfig;
