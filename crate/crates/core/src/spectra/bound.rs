use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::{root_census, w_polynomial, RootCensus, RootClass};
use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::linalg::{hermitian_eigen, svd_split, weighted_gram_schmidt, CMatrix, SvdSplit};
use crate::smatrix::gamma;
use crate::tolerance::ToleranceConfig;

/// Relative width used to group degenerate eigenvalues of `D`.
const EIGEN_CLUSTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfinedClass {
    /// `|lambda| > 2`
    CGreater,
    /// `|lambda| < 2`
    CLess,
    /// `|lambda| = 2`
    CEqual,
}

/// A state living on internal vertices only: `D beta = lambda beta`,
/// `B^dagger beta = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfinedState {
    pub lambda: f64,
    /// Unit vector on the internal vertices.
    pub beta: Vec<Complex64>,
    pub class: ConfinedClass,
}

impl ConfinedState {
    /// The state on all gadget vertices (zero on attachments).
    pub fn gadget_vector(&self, n: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v.extend_from_slice(&self.beta);
        v
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfinedStates {
    pub states: Vec<ConfinedState>,
    pub dim_c_greater: usize,
    pub dim_c_less: usize,
    pub dim_c_equal: usize,
}

/// Normalisable state with tails `N_v alpha_j x0^(x-1)` on the paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnconfinedState {
    pub x0: f64,
    pub energy: f64,
    /// Attachment amplitudes; `(alpha, beta)` is a unit vector.
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// `(|alpha|^2 / (1 - x0^2) + |beta|^2)^(-1/2)`.
    pub norm_const: f64,
}

/// Threshold state at `x0 = +-1`; not normalisable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfBoundState {
    pub x0: f64,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
}

/// Null-space bookkeeping at one real root of `W`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootNullSpace {
    pub x0: f64,
    pub multiplicity: usize,
    pub null_dim: usize,
    pub confined_dim: usize,
    pub unconfined_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundStateCatalog {
    pub confined: Vec<ConfinedState>,
    pub unconfined: Vec<UnconfinedState>,
    pub half_bound: Vec<HalfBoundState>,
    pub n_c: usize,
    pub n_b: usize,
    pub n_h: usize,
    pub dim_c_greater: usize,
    pub dim_c_less: usize,
    pub dim_c_equal: usize,
    /// `n_c + n_b + n_h / 2`.
    pub bound_state_count: f64,
    pub real_roots: Vec<RootNullSpace>,
    pub census: RootCensus,
}

/// Confined states from the eigenspaces of `D` intersected with the kernel of
/// `B^dagger`. Degenerate eigenvalues are handled cluster by cluster.
pub fn confined_states(graph: &ScatteringGraph, tol: &ToleranceConfig) -> Result<ConfinedStates> {
    let m = graph.m();
    let mut out = ConfinedStates::default();
    if m == 0 {
        return Ok(out);
    }
    let scale = graph.scale();
    let d = graph.d_block().into_owned();
    let b_adj = graph.b_block().adjoint();
    let (values, vectors) = hermitian_eigen(&d);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && values[end] - values[end - 1] <= EIGEN_CLUSTER * scale {
            end += 1;
        }
        let lambda = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let basis = vectors.columns(start, end - start).into_owned();
        let split = svd_split(&(&b_adj * &basis), tol.eps_rank * scale);
        if split.ambiguous {
            return Err(Error::RankAmbiguous(format!(
                "B^dagger restricted to the eigenspace at lambda = {lambda}: singular values {:?}",
                split.singular_values
            )));
        }
        let confined = &basis * &split.null;
        let class = if lambda.abs() > 2.0 + tol.eps_snap {
            ConfinedClass::CGreater
        } else if (lambda.abs() - 2.0).abs() <= tol.eps_snap {
            ConfinedClass::CEqual
        } else {
            ConfinedClass::CLess
        };
        for c in 0..confined.ncols() {
            out.states.push(ConfinedState {
                lambda,
                beta: confined.column(c).iter().copied().collect(),
                class,
            });
            match class {
                ConfinedClass::CGreater => out.dim_c_greater += 1,
                ConfinedClass::CLess => out.dim_c_less += 1,
                ConfinedClass::CEqual => out.dim_c_equal += 1,
            }
        }
        start = end;
    }
    Ok(out)
}

fn null_space_at(
    graph: &ScatteringGraph,
    z: Complex64,
    tol: &ToleranceConfig,
) -> Result<SvdSplit> {
    let g = gamma(graph, z);
    let top = svd_split(&g, 0.0).singular_values.first().copied().unwrap_or(0.0);
    let split = svd_split(&g, tol.eps_rank * top.max(1.0));
    if split.ambiguous {
        return Err(Error::RankAmbiguous(format!(
            "null space of gamma({z}): singular values {:?}",
            split.singular_values
        )));
    }
    Ok(split)
}

/// Newton steps on the eigenvalue of the Hermitian `gamma(x)` closest to
/// zero, with slope `<v| 2x (P_n - 1) + H |v>`. Roots taken from the
/// coefficients of `W` carry the coefficient noise; this brings them to
/// roundoff of `gamma` itself.
fn refine_real_root(graph: &ScatteringGraph, x0: f64) -> f64 {
    let smallest = |x: f64| -> (f64, f64) {
        let (values, vectors) = hermitian_eigen(&gamma(graph, Complex64::new(x, 0.0)));
        let i = (0..values.len()).min_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs())).expect("non-empty");
        let v = vectors.column(i);
        let mut slope = 0.0;
        for r in 0..graph.dim() {
            for c in 0..graph.dim() {
                let mut d = graph.hhat()[(r, c)];
                if r == c && r >= graph.n() {
                    d -= 2.0 * x;
                }
                slope += (v[r].conj() * d * v[c]).re;
            }
        }
        (values[i], slope)
    };
    let (mut value, _) = smallest(x0);
    let mut x = x0;
    for _ in 0..8 {
        let (e, slope) = smallest(x);
        if slope == 0.0 {
            break;
        }
        let next = x - e / slope;
        if (next - x0).abs() > 1e-6 {
            break;
        }
        let (e_next, _) = smallest(next);
        if e_next.abs() >= value.abs() {
            break;
        }
        x = next;
        value = e_next;
    }
    x
}

/// Splits a null-space basis into directions with and without support on
/// the attachment vertices. Returns `(confined, unconfined)` bases.
fn split_attachment(
    graph: &ScatteringGraph,
    null: &CMatrix,
    tol: &ToleranceConfig,
) -> Result<(CMatrix, CMatrix)> {
    let n = graph.n();
    let attach = null.rows(0, n).into_owned();
    let split = svd_split(&attach, tol.eps_rank);
    if split.ambiguous {
        return Err(Error::RankAmbiguous(format!(
            "attachment weight of null vectors: singular values {:?}",
            split.singular_values
        )));
    }
    Ok((null * &split.null, null * &split.range))
}

fn column(m: &CMatrix, c: usize, rows: std::ops::Range<usize>) -> Vec<Complex64> {
    rows.map(|r| m[(r, c)]).collect()
}

/// Full catalog of bound and half-bound states.
pub fn bound_state_catalog(
    graph: &ScatteringGraph,
    tol: &ToleranceConfig,
) -> Result<BoundStateCatalog> {
    let census = root_census(&w_polynomial(graph), tol);
    catalog_from_census(graph, census, tol)
}

pub(crate) fn catalog_from_census(
    graph: &ScatteringGraph,
    census: RootCensus,
    tol: &ToleranceConfig,
) -> Result<BoundStateCatalog> {
    let n = graph.n();
    let dim = graph.dim();
    let confined = confined_states(graph, tol)?;
    let mut unconfined = Vec::new();
    let mut half_bound = Vec::new();
    let mut real_roots = Vec::new();
    for root in census.roots.iter().filter(|r| {
        matches!(r.class, RootClass::InsideReal | RootClass::AtPlusMinusOne)
    }) {
        let x0 = if root.class == RootClass::InsideReal {
            refine_real_root(graph, root.value.re)
        } else {
            root.value.re
        };
        let split = null_space_at(graph, Complex64::new(x0, 0.0), tol)?;
        if split.null.ncols() == 0 {
            return Err(Error::RankAmbiguous(format!(
                "root {x0} of W has no numerical null vector (singular values {:?})",
                split.singular_values
            )));
        }
        let (conf, unconf) = split_attachment(graph, &split.null, tol)?;
        real_roots.push(RootNullSpace {
            x0,
            multiplicity: root.multiplicity,
            null_dim: split.null.ncols(),
            confined_dim: conf.ncols(),
            unconfined_dim: unconf.ncols(),
        });
        if root.class == RootClass::AtPlusMinusOne {
            for c in 0..unconf.ncols() {
                half_bound.push(HalfBoundState {
                    x0,
                    alpha: column(&unconf, c, 0..n),
                    beta: column(&unconf, c, n..dim),
                });
            }
            continue;
        }
        // orthonormal in the full Hilbert space: path tails add 1/(1 - x0^2)
        let weights: Vec<f64> =
            (0..dim).map(|i| if i < n { 1.0 / (1.0 - x0 * x0) } else { 1.0 }).collect();
        let states = weighted_gram_schmidt(&unconf, &weights);
        for c in 0..states.ncols() {
            let v = states.column(c);
            let unit = v.unscale(v.norm());
            let alpha: Vec<Complex64> = unit.rows(0, n).iter().copied().collect();
            let beta: Vec<Complex64> = unit.rows(n, dim - n).iter().copied().collect();
            unconfined.push(UnconfinedState {
                x0,
                energy: x0 + 1.0 / x0,
                norm_const: normalizing_constant(&alpha, &beta, x0),
                alpha,
                beta,
            });
        }
    }
    let n_c = confined.states.len();
    let n_b = unconfined.len();
    let n_h = half_bound.len();
    Ok(BoundStateCatalog {
        confined: confined.states,
        unconfined,
        half_bound,
        n_c,
        n_b,
        n_h,
        dim_c_greater: confined.dim_c_greater,
        dim_c_less: confined.dim_c_less,
        dim_c_equal: confined.dim_c_equal,
        bound_state_count: n_c as f64 + n_b as f64 + 0.5 * n_h as f64,
        real_roots,
        census,
    })
}

/// `N_v = (|alpha|^2 / (1 - x0^2) + |beta|^2)^(-1/2)`.
pub(crate) fn normalizing_constant(alpha: &[Complex64], beta: &[Complex64], x0: f64) -> f64 {
    let a: f64 = alpha.iter().map(|c| c.norm_sqr()).sum();
    let b: f64 = beta.iter().map(|c| c.norm_sqr()).sum();
    (a / (1.0 - x0 * x0) + b).powf(-0.5)
}

/// Integer identities tying the root census to the state counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountIdentityReport {
    pub alpha1: usize,
    pub alpha2: usize,
    pub alpha3: usize,
    pub n_b: usize,
    pub n_c: usize,
    pub n_h: usize,
    pub dim_c_greater: usize,
    pub dim_c_less: usize,
    pub dim_c_equal: usize,
    /// `alpha1 = n_b + dim C_>`
    pub inside_identity: bool,
    /// `alpha2 = dim C_<`
    pub circle_identity: bool,
    /// `alpha3 = n_h + 2 dim C_=`
    pub threshold_identity: bool,
    /// `alpha1 + alpha2 + alpha3 / 2`
    pub alpha_side: f64,
    /// `n_b + n_c + n_h / 2`
    pub state_side: f64,
    pub pass: bool,
}

impl CountIdentityReport {
    pub fn from_catalog(catalog: &BoundStateCatalog) -> Self {
        let c = &catalog.census;
        let inside_identity = c.alpha1 == catalog.n_b + catalog.dim_c_greater;
        let circle_identity = c.alpha2 == catalog.dim_c_less;
        let threshold_identity = c.alpha3 == catalog.n_h + 2 * catalog.dim_c_equal;
        let alpha_twice = 2 * c.alpha1 + 2 * c.alpha2 + c.alpha3;
        let state_twice = 2 * catalog.n_b + 2 * catalog.n_c + catalog.n_h;
        Self {
            alpha1: c.alpha1,
            alpha2: c.alpha2,
            alpha3: c.alpha3,
            n_b: catalog.n_b,
            n_c: catalog.n_c,
            n_h: catalog.n_h,
            dim_c_greater: catalog.dim_c_greater,
            dim_c_less: catalog.dim_c_less,
            dim_c_equal: catalog.dim_c_equal,
            inside_identity,
            circle_identity,
            threshold_identity,
            alpha_side: alpha_twice as f64 / 2.0,
            state_side: state_twice as f64 / 2.0,
            pass: inside_identity
                && circle_identity
                && threshold_identity
                && alpha_twice == state_twice,
        }
    }
}

pub fn count_identity_check(graph: &ScatteringGraph, tol: &ToleranceConfig) -> Result<CountIdentityReport> {
    Ok(CountIdentityReport::from_catalog(&bound_state_catalog(graph, tol)?))
}

/// Numerical form of the root-location laws: inside-disk roots are real and
/// null vectors at non-real unit-circle roots avoid the attachment vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootLocationReport {
    /// Largest `|Im z|` of an inside-disk root before snapping.
    pub max_inside_imaginary: f64,
    /// Largest `|P_n v|` over unit null vectors at non-real circle roots.
    pub max_circle_attachment_weight: f64,
    pub circle_roots_checked: usize,
}

pub fn root_location_report(
    graph: &ScatteringGraph,
    census: &RootCensus,
    tol: &ToleranceConfig,
) -> Result<RootLocationReport> {
    let n = graph.n();
    let mut weight: f64 = 0.0;
    let mut checked = 0;
    for root in census.roots_of(RootClass::OnCircleConjugatePair) {
        let split = null_space_at(graph, root.value, tol)?;
        for c in 0..split.null.ncols() {
            let w: f64 = (0..n).map(|i| split.null[(i, c)].norm_sqr()).sum::<f64>().sqrt();
            weight = weight.max(w);
        }
        checked += 1;
    }
    Ok(RootLocationReport {
        max_inside_imaginary: census.max_inside_imaginary(),
        max_circle_attachment_weight: weight,
        circle_roots_checked: checked,
    })
}
