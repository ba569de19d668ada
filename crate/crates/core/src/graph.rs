//! Gadget representation: the finite Hermitian graph whose first `n` vertices
//! each carry one semi-infinite path.
//!
//! Vertex ordering is fixed: indices `0..n` are attachment vertices (position
//! `x = 1` on path `j`), indices `n..n+m` are internal vertices.

use std::path::Path;

use nalgebra::{DMatrix, DMatrixView};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringGraph {
    n: usize,
    m: usize,
    hhat: DMatrix<Complex64>,
}

impl ScatteringGraph {
    /// Builds a graph from a full matrix, validating Hermiticity against
    /// `eps_herm` relative to the largest entry.
    pub fn new(n: usize, m: usize, hhat: DMatrix<Complex64>, eps_herm: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Validation("at least one attachment vertex is required".into()));
        }
        let dim = n + m;
        if hhat.nrows() != dim || hhat.ncols() != dim {
            return Err(Error::Validation(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                hhat.nrows(),
                hhat.ncols()
            )));
        }
        if hhat.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Validation("matrix entries must be finite".into()));
        }
        let scale = max_abs(&hhat);
        for i in 0..dim {
            for j in i..dim {
                let dev = (hhat[(i, j)] - hhat[(j, i)].conj()).norm();
                if dev > eps_herm * scale {
                    return Err(Error::Validation(format!(
                        "entries ({i},{j}) and ({j},{i}) are not conjugate (deviation {dev:.3e})"
                    )));
                }
            }
        }
        Ok(Self { n, m, hhat })
    }

    /// Builds a graph from the upper triangle of `hhat`, mirroring it by
    /// conjugation so the stored matrix is exactly Hermitian.
    pub fn from_upper(n: usize, m: usize, hhat: &DMatrix<Complex64>) -> Result<Self> {
        let dim = n + m;
        if hhat.nrows() != dim || hhat.ncols() != dim {
            return Err(Error::Validation(format!("matrix must be {dim}x{dim}")));
        }
        let full = DMatrix::from_fn(dim, dim, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => hhat[(i, j)],
            std::cmp::Ordering::Equal => Complex64::new(hhat[(i, i)].re, 0.0),
            std::cmp::Ordering::Greater => hhat[(j, i)].conj(),
        });
        Self::new(n, m, full, ToleranceConfig::default().eps_herm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn hhat(&self) -> &DMatrix<Complex64> {
        &self.hhat
    }

    /// Attachment block `A` (n x n).
    pub fn a_block(&self) -> DMatrixView<'_, Complex64> {
        self.hhat.view((0, 0), (self.n, self.n))
    }

    /// Internal-to-attachment block `B` (m x n).
    pub fn b_block(&self) -> DMatrixView<'_, Complex64> {
        self.hhat.view((self.n, 0), (self.m, self.n))
    }

    /// Internal block `D` (m x m).
    pub fn d_block(&self) -> DMatrixView<'_, Complex64> {
        self.hhat.view((self.n, self.n), (self.m, self.m))
    }

    /// Largest entry magnitude, at least one. Used as the scale for
    /// relative tolerances.
    pub fn scale(&self) -> f64 {
        max_abs(&self.hhat).max(1.0)
    }

    pub fn to_file(&self) -> GraphFile {
        let dim = self.dim();
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let c = self.hhat[(i, j)];
                if c != Complex64::new(0.0, 0.0) {
                    entries.push(Entry { i, j, re: c.re, im: c.im });
                }
            }
        }
        GraphFile { n: self.n, m: self.m, entries, tolerances: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph serialization cannot fail")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Diagonal projector onto the attachment vertices.
pub fn projector_pn(graph: &ScatteringGraph) -> DMatrix<f64> {
    let dim = graph.dim();
    DMatrix::from_fn(dim, dim, |i, j| if i == j && i < graph.n() { 1.0 } else { 0.0 })
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl GraphFile {
    /// Validates the entry list and performs Hermitian completion.
    pub fn into_graph(self) -> Result<(ScatteringGraph, ToleranceConfig)> {
        let tol = self.tolerances.unwrap_or_default();
        tol.validate()?;
        if self.n < 1 {
            return Err(Error::Validation("n must be at least 1".into()));
        }
        let dim = self.n + self.m;
        let mut given: Vec<Vec<Option<Complex64>>> = vec![vec![None; dim]; dim];
        for e in &self.entries {
            if e.i >= dim || e.j >= dim {
                return Err(Error::Validation(format!(
                    "entry ({}, {}) out of range for {dim} vertices",
                    e.i, e.j
                )));
            }
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::Validation(format!("entry ({}, {}) is not finite", e.i, e.j)));
            }
            if given[e.i][e.j].is_some() {
                return Err(Error::Validation(format!("entry ({}, {}) given twice", e.i, e.j)));
            }
            given[e.i][e.j] = Some(Complex64::new(e.re, e.im));
        }
        let scale = self
            .entries
            .iter()
            .map(|e| Complex64::new(e.re, e.im).norm())
            .fold(0.0, f64::max);
        let limit = tol.eps_herm * scale;
        let zero = Complex64::new(0.0, 0.0);
        let mut hhat = DMatrix::from_element(dim, dim, zero);
        for i in 0..dim {
            if let Some(d) = given[i][i] {
                if d.im.abs() > limit {
                    return Err(Error::Validation(format!(
                        "diagonal entry ({i}, {i}) has imaginary part {}",
                        d.im
                    )));
                }
                hhat[(i, i)] = Complex64::new(d.re, 0.0);
            }
            for j in i + 1..dim {
                let value = match (given[i][j], given[j][i]) {
                    (Some(u), Some(l)) => {
                        if (u - l.conj()).norm() > limit {
                            return Err(Error::Validation(format!(
                                "entries ({i}, {j}) = {u} and ({j}, {i}) = {l} are not conjugate"
                            )));
                        }
                        u
                    }
                    (Some(u), None) => u,
                    (None, Some(l)) => l.conj(),
                    (None, None) => zero,
                };
                hhat[(i, j)] = value;
                hhat[(j, i)] = value.conj();
            }
        }
        let graph = ScatteringGraph::new(self.n, self.m, hhat, tol.eps_herm)?;
        Ok((graph, tol))
    }
}

pub fn parse_graph(text: &str) -> Result<(ScatteringGraph, ToleranceConfig)> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_graph()
}

/// Loads a graph, ignoring any tolerance block in the file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<ScatteringGraph> {
    load_graph_with_tolerances(path).map(|(g, _)| g)
}

/// Loads a graph together with the tolerances embedded in the file
/// (defaults where absent).
pub fn load_graph_with_tolerances(
    path: impl AsRef<Path>,
) -> Result<(ScatteringGraph, ToleranceConfig)> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_gadget() {
        let (g, _) = parse_graph(r#"{"n":1,"m":0,"entries":[{"i":0,"j":0,"re":0,"im":0}]}"#).unwrap();
        assert_eq!(g.hhat(), &DMatrix::from_element(1, 1, c(0.0, 0.0)));
        assert_eq!(projector_pn(&g), DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn single_edge_is_mirrored() {
        let (g, _) = parse_graph(r#"{"n":2,"m":0,"entries":[{"i":0,"j":1,"re":1,"im":0}]}"#).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert_eq!(g.hhat(), &expected);
        assert_eq!(projector_pn(&g), DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn lower_entry_must_be_conjugate() {
        let text = r#"{"n":2,"m":0,"entries":[{"i":0,"j":1,"re":1,"im":1},{"i":1,"j":0,"re":1,"im":1}]}"#;
        assert!(matches!(parse_graph(text), Err(Error::Validation(_))));
        let ok = r#"{"n":2,"m":0,"entries":[{"i":0,"j":1,"re":1,"im":1},{"i":1,"j":0,"re":1,"im":-1}]}"#;
        assert!(parse_graph(ok).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_graph("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_graph(r#"{"n":0,"m":1,"entries":[]}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_graph(r#"{"n":1,"m":0,"entries":[{"i":0,"j":3,"re":1,"im":0}]}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_graph(r#"{"n":1,"m":0,"entries":[{"i":0,"j":0,"re":1,"im":0.5}]}"#),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn blocks_and_projector() {
        let (g, _) = parse_graph(
            r#"{"n":2,"m":1,"entries":[{"i":0,"j":2,"re":1},{"i":1,"j":2,"re":1}]}"#,
        )
        .unwrap();
        assert_eq!(g.a_block().shape(), (2, 2));
        assert_eq!(g.b_block().shape(), (1, 2));
        assert_eq!(g.d_block().shape(), (1, 1));
        assert_eq!(g.b_block()[(0, 1)], c(1.0, 0.0));
        let p = projector_pn(&g);
        assert_eq!(p, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0])));
        assert_eq!(&p * &p, p);
    }

    #[test]
    fn file_tolerances_override() {
        let (_, tol) = parse_graph(
            r#"{"n":1,"m":0,"entries":[],"tolerances":{"eps_snap":1e-6}}"#,
        )
        .unwrap();
        assert_eq!(tol.eps_snap, 1e-6);
        assert_eq!(tol.eps_rank, 1e-9);
    }
}
