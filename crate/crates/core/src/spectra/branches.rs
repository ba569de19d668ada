use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bound::confined_states;
use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::linalg::{hermitian_eigen, orthogonal_complement, CMatrix, CVector};
use crate::smatrix::gamma;
use crate::tolerance::ToleranceConfig;

pub const DEFAULT_GRID_SIZE: usize = 201;
pub const DEFAULT_BRANCH_DELTA: f64 = 0.1;

/// Overlap below which adjacent samples cannot be matched.
const MATCH_THRESHOLD: f64 = 0.7;
/// Step for the central-difference derivative.
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub values: Vec<f64>,
    /// Unit eigenvectors in gadget coordinates, one per grid point.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Eigenvalues of `gamma(x)` on the complement of the confined states,
/// followed continuously across a real grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenbranchTable {
    pub grid: Vec<f64>,
    pub branches: Vec<Branch>,
    /// `(lambda_c, gadget vector)` of each deflated confined direction.
    pub confined: Vec<(f64, Vec<Complex64>)>,
    /// Smallest overlap between matched vectors at adjacent samples.
    pub min_adjacent_overlap: f64,
}

struct Deflation {
    /// Orthonormal basis of the complement of the confined states.
    basis: CMatrix,
    confined: Vec<(f64, Vec<Complex64>)>,
}

fn deflation(graph: &ScatteringGraph, tol: &ToleranceConfig) -> Result<Deflation> {
    let n = graph.n();
    let dim = graph.dim();
    let states = confined_states(graph, tol)?;
    let confined: Vec<(f64, Vec<Complex64>)> =
        states.states.iter().map(|s| (s.lambda, s.gadget_vector(n))).collect();
    let cols: Vec<CVector> =
        confined.iter().map(|(_, v)| CVector::from_column_slice(v)).collect();
    let c = if cols.is_empty() { CMatrix::zeros(dim, 0) } else { CMatrix::from_columns(&cols) };
    Ok(Deflation { basis: orthogonal_complement(&c, dim), confined })
}

fn restricted(graph: &ScatteringGraph, basis: &CMatrix, x: f64) -> CMatrix {
    basis.adjoint() * gamma(graph, Complex64::new(x, 0.0)) * basis
}

/// Matches new eigenpairs to the previous branch vectors. Degenerate groups
/// of new eigenvalues are resolved by projecting the previous vectors into
/// the group's eigenspace.
fn match_step(
    prev: &[CVector],
    values: &[f64],
    vectors: &CMatrix,
    degeneracy: f64,
) -> (Vec<f64>, Vec<CVector>, f64) {
    let r = values.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..r {
        match groups.last_mut() {
            Some(g) if values[j] - values[*g.last().unwrap()] <= degeneracy => g.push(j),
            _ => groups.push(vec![j]),
        }
    }
    let overlap = |b: usize, j: usize| -> Complex64 { vectors.column(j).dotc(&prev[b]) };
    let mut weights: Vec<(f64, usize, usize)> = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        for b in 0..prev.len() {
            let w: f64 = g.iter().map(|&j| overlap(b, j).norm_sqr()).sum();
            weights.push((w, b, gi));
        }
    }
    weights.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut capacity: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let mut owner: Vec<Option<usize>> = vec![None; prev.len()];
    for (_, b, gi) in weights {
        if owner[b].is_none() && capacity[gi] > 0 {
            owner[b] = Some(gi);
            capacity[gi] -= 1;
        }
    }
    let mut new_values = vec![0.0; prev.len()];
    let mut new_vectors = vec![CVector::zeros(vectors.nrows()); prev.len()];
    let mut worst: f64 = 1.0;
    for (gi, g) in groups.iter().enumerate() {
        let members: Vec<usize> = (0..prev.len()).filter(|&b| owner[b] == Some(gi)).collect();
        if g.len() == 1 {
            let j = g[0];
            let b = members[0];
            let ov = overlap(b, j);
            let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
            new_values[b] = values[j];
            new_vectors[b] = vectors.column(j) * phase;
            worst = worst.min(ov.norm());
            continue;
        }
        let span = vectors.select_columns(g.iter());
        let mut done: Vec<CVector> = Vec::new();
        for &b in &members {
            let mut q = &span * (span.adjoint() * &prev[b]);
            for d in &done {
                let c = d.dotc(&q);
                q -= d * c;
            }
            let norm = q.norm();
            let q = if norm > 1e-12 { q.unscale(norm) } else { vectors.column(g[done.len()]).into_owned() };
            worst = worst.min(q.dotc(&prev[b]).norm());
            done.push(q.clone());
            let mean = g.iter().map(|&j| values[j]).sum::<f64>() / g.len() as f64;
            new_values[b] = mean;
            new_vectors[b] = q;
        }
    }
    (new_values, new_vectors, worst)
}

/// Tracks the eigenvalues of `gamma(x)` (with confined states deflated) over
/// `grid_size` points covering `[-1 - delta, 1 + delta]`.
pub fn eigenbranches(
    graph: &ScatteringGraph,
    grid_size: usize,
    delta: f64,
    tol: &ToleranceConfig,
) -> Result<EigenbranchTable> {
    if grid_size < 16 {
        return Err(Error::Domain(format!("grid_size must be at least 16, got {grid_size}")));
    }
    let defl = deflation(graph, tol)?;
    let lo = -1.0 - delta;
    let hi = 1.0 + delta;
    let grid: Vec<f64> = (0..grid_size)
        .map(|t| lo + (hi - lo) * t as f64 / (grid_size - 1) as f64)
        .collect();
    let r = defl.basis.ncols();
    let degeneracy = 1e-9 * graph.scale().max(hi * hi);
    let mut branches: Vec<Branch> =
        (0..r).map(|_| Branch { values: Vec::new(), vectors: Vec::new() }).collect();
    let mut prev: Vec<CVector> = Vec::new();
    let mut min_overlap: f64 = 1.0;
    for (t, &x) in grid.iter().enumerate() {
        let (values, vectors) = hermitian_eigen(&restricted(graph, &defl.basis, x));
        let (vals, vecs) = if t == 0 {
            (values, (0..r).map(|j| vectors.column(j).into_owned()).collect::<Vec<_>>())
        } else {
            let (v, u, worst) = match_step(&prev, &values, &vectors, degeneracy);
            if worst < MATCH_THRESHOLD {
                return Err(Error::MatchingAmbiguous { x, overlap: worst });
            }
            min_overlap = min_overlap.min(worst);
            (v, u)
        };
        for (b, branch) in branches.iter_mut().enumerate() {
            branch.values.push(vals[b]);
            branch.vectors.push((&defl.basis * &vecs[b]).iter().copied().collect());
        }
        prev = vecs;
    }
    Ok(EigenbranchTable {
        grid,
        branches,
        confined: defl.confined,
        min_adjacent_overlap: min_overlap,
    })
}

impl EigenbranchTable {
    /// Largest entrywise deviation of the spectral reconstruction from
    /// `gamma(x)` at grid point `t`.
    pub fn reconstruction_defect(&self, graph: &ScatteringGraph, t: usize) -> f64 {
        let x = self.grid[t];
        let dim = graph.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for branch in &self.branches {
            let v = CVector::from_column_slice(&branch.vectors[t]);
            sum += (&v * v.adjoint()) * Complex64::new(branch.values[t], 0.0);
        }
        for (lambda, psi) in &self.confined {
            let v = CVector::from_column_slice(psi);
            sum += (&v * v.adjoint()) * Complex64::new(x * lambda - x * x - 1.0, 0.0);
        }
        crate::linalg::max_abs_diff(&sum, &gamma(graph, Complex64::new(x, 0.0)))
    }
}

/// A zero of one eigenbranch, located to roundoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchCrossing {
    pub branch: usize,
    pub x0: f64,
    pub value: f64,
    /// Unit eigenvector of `gamma(x0)` for this branch (gadget coordinates).
    pub vector: Vec<Complex64>,
}

/// Eigenpair of the Hermitian matrix closest (by overlap) to `reference`.
fn follow(matrix: &CMatrix, reference: &CVector) -> (f64, CVector) {
    let (values, vectors) = hermitian_eigen(matrix);
    let best = (0..values.len())
        .max_by(|&a, &b| {
            let oa = vectors.column(a).dotc(reference).norm();
            let ob = vectors.column(b).dotc(reference).norm();
            oa.total_cmp(&ob)
        })
        .expect("non-empty matrix");
    (values[best], vectors.column(best).into_owned())
}

/// Sign changes of every branch, refined by bisection.
pub fn find_crossings(
    graph: &ScatteringGraph,
    table: &EigenbranchTable,
    tol: &ToleranceConfig,
) -> Result<Vec<BranchCrossing>> {
    let defl = deflation(graph, tol)?;
    let basis = &defl.basis;
    let mut out = Vec::new();
    for (b, branch) in table.branches.iter().enumerate() {
        for t in 0..table.grid.len() - 1 {
            let (fa, fb) = (branch.values[t], branch.values[t + 1]);
            let exact_zero = fa == 0.0;
            if !(exact_zero || fa * fb < 0.0) {
                continue;
            }
            let (mut lo, mut hi) = (table.grid[t], table.grid[t + 1]);
            let mut reference = basis.adjoint() * CVector::from_column_slice(&branch.vectors[t]);
            let mut f_lo = fa;
            if !exact_zero {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (f_mid, v_mid) = follow(&restricted(graph, basis, mid), &reference);
                    reference = v_mid;
                    if f_mid == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (f_mid < 0.0) == (f_lo < 0.0) {
                        lo = mid;
                        f_lo = f_mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            let x0 = if exact_zero { lo } else { 0.5 * (lo + hi) };
            let (value, v) = follow(&restricted(graph, basis, x0), &reference);
            out.push(BranchCrossing {
                branch: b,
                x0,
                value,
                vector: (basis * v).iter().copied().collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub branch: usize,
    pub x0: f64,
    /// `(1/x0 - x0) + x0 <v|P_n|v>`
    pub analytic: f64,
    pub finite_difference: f64,
    /// `Some(true)` when `x0` lies in `(-1, 1) \ {0}` and the slope has the
    /// sign of `x0`; `None` outside that interval.
    pub sign_matches: Option<bool>,
    pub pass: bool,
}

/// Compares the closed-form slope of a branch at its zero with a central
/// difference of the full `gamma(x)` spectrum.
pub fn derivative_check(
    graph: &ScatteringGraph,
    crossing: &BranchCrossing,
) -> Result<DerivativeReport> {
    let x0 = crossing.x0;
    let v = CVector::from_column_slice(&crossing.vector);
    let v = v.unscale(v.norm());
    let g0 = gamma(graph, Complex64::new(x0, 0.0));
    let value = v.dotc(&(&g0 * &v)).re;
    if value.abs() > 1e-8 || x0 == 0.0 {
        return Err(Error::NoCrossing { branch: crossing.branch, x0, value });
    }
    let attach: f64 = (0..graph.n()).map(|i| v[i].norm_sqr()).sum();
    let analytic = (1.0 / x0 - x0) + x0 * attach;
    let (e_plus, _) = follow(&gamma(graph, Complex64::new(x0 + FD_STEP, 0.0)), &v);
    let (e_minus, _) = follow(&gamma(graph, Complex64::new(x0 - FD_STEP, 0.0)), &v);
    let finite_difference = (e_plus - e_minus) / (2.0 * FD_STEP);
    let sign_matches = (x0.abs() < 1.0).then(|| analytic != 0.0 && analytic.signum() == x0.signum());
    let agrees = (analytic - finite_difference).abs() <= 1e-6 * (1.0 + analytic.abs());
    Ok(DerivativeReport {
        branch: crossing.branch,
        x0,
        analytic,
        finite_difference,
        sign_matches,
        pass: agrees && sign_matches.unwrap_or(true),
    })
}
