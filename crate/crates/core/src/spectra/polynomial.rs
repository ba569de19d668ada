use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::ScatteringGraph;
use crate::linalg::determinant;
use crate::smatrix::gamma;
use crate::tolerance::ToleranceConfig;

/// Leading coefficients below this fraction of the largest one are dropped.
pub const TRIM_RELATIVE: f64 = 1e-10;

/// Relative coefficient noise assumed when deciding whether nearby
/// companion eigenvalues are one perturbed multiple root.
const COEFF_NOISE: f64 = 1e-14;

/// `W(z) = det gamma(z)` in monomial form, lowest degree first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WPolynomial {
    pub coeffs: Vec<Complex64>,
    pub degree: usize,
    /// Absolute trim threshold that was applied to leading coefficients.
    pub trim_threshold: f64,
    /// Largest magnitude among the trimmed coefficients (zero if none).
    pub largest_trimmed: f64,
}

impl WPolynomial {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients of `W(c + t)` in powers of `t`.
    fn taylor_at(&self, c: Complex64) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let len = work.len();
        for start in 0..len {
            for i in (start..len - 1).rev() {
                let next = work[i + 1];
                work[i] += c * next;
            }
        }
        work
    }

    fn scale_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }
}

/// Interpolates `det gamma(z)` at the `(2m + n + 1)`-th roots of unity and
/// recovers the coefficients with an inverse DFT.
pub fn w_polynomial(graph: &ScatteringGraph) -> WPolynomial {
    let points = 2 * graph.m() + graph.n() + 1;
    let values: Vec<Complex64> = (0..points)
        .map(|t| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * t as f64 / points as f64);
            determinant(&gamma(graph, z))
        })
        .collect();
    let mut coeffs: Vec<Complex64> = (0..points)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(t, &v)| {
                    let angle = -2.0 * PI * ((j * t) % points) as f64 / points as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum();
            sum / points as f64
        })
        .collect();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let trim_threshold = TRIM_RELATIVE * max;
    let mut largest_trimmed: f64 = 0.0;
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() < trim_threshold) {
        largest_trimmed = largest_trimmed.max(coeffs.pop().unwrap().norm());
    }
    let degree = coeffs.len() - 1;
    WPolynomial { coeffs, degree, trim_threshold, largest_trimmed }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootClass {
    InsideReal,
    OnCircleConjugatePair,
    AtPlusMinusOne,
    Outside,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Root {
    /// Snapped value.
    pub value: Complex64,
    /// Cluster centroid before snapping.
    pub raw: Complex64,
    pub multiplicity: usize,
    pub class: RootClass,
    /// Largest distance of a companion eigenvalue from the centroid.
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootCensus {
    pub roots: Vec<Root>,
    pub degree: usize,
    /// Multiplicity inside the open unit disk.
    pub alpha1: usize,
    /// Half the multiplicity on the unit circle away from +-1.
    pub alpha2: usize,
    /// Multiplicity at +-1.
    pub alpha3: usize,
}

impl RootCensus {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Largest `|Im z|` among inside-disk roots before snapping.
    pub fn max_inside_imaginary(&self) -> f64 {
        self.roots
            .iter()
            .filter(|r| r.class == RootClass::InsideReal)
            .map(|r| r.raw.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn roots_of(&self, class: RootClass) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(move |r| r.class == class)
    }
}

struct Cluster {
    members: Vec<Complex64>,
}

impl Cluster {
    fn centroid(&self) -> Complex64 {
        self.members.iter().sum::<Complex64>() / self.members.len() as f64
    }

    fn spread(&self) -> f64 {
        let c = self.centroid();
        self.members.iter().map(|z| (z - c).norm()).fold(0.0, f64::max)
    }
}

fn companion_roots(w: &WPolynomial) -> Vec<Complex64> {
    let k = w.degree;
    let lead = w.coeffs[k];
    // W is real on the real axis, so its coefficients are real up to roundoff
    let monic: Vec<f64> = w.coeffs.iter().map(|c| (c / lead).re).collect();
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if j == k - 1 {
            -monic[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for z in roots.iter_mut() {
        *z = polish(w, *z);
    }
    roots
}

/// A few guarded Newton steps; only accepted while they reduce `|W|`.
fn polish(w: &WPolynomial, mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let t = w.taylor_at(z);
        let (value, slope) = (t[0], t.get(1).copied().unwrap_or_default());
        if slope.norm() == 0.0 {
            break;
        }
        let step = value / slope;
        if step.norm() > 1e-6 * (1.0 + z.norm()) {
            break;
        }
        let candidate = z - step;
        if w.eval(candidate).norm() < value.norm() {
            z = candidate;
        } else {
            break;
        }
    }
    z
}

/// Whether `cluster` is consistent with a single root of its size perturbed
/// by coefficient noise.
fn plausible_multiple_root(w: &WPolynomial, cluster: &Cluster, radius: f64) -> bool {
    let mult = cluster.members.len();
    let centre = cluster.centroid();
    let taylor = w.taylor_at(centre);
    let Some(lead) = taylor.get(mult) else {
        return false;
    };
    if lead.norm() == 0.0 {
        return false;
    }
    let noise = (COEFF_NOISE * w.scale_at(centre) / lead.norm()).powf(1.0 / mult as f64);
    cluster.spread() <= 10.0 * noise + radius
}

fn cluster_roots(w: &WPolynomial, raw: Vec<Complex64>, radius: f64) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    // single linkage at the clustering radius
    for z in raw {
        let hits: Vec<usize> = clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.members.iter().any(|m| (m - z).norm() <= radius))
            .map(|(i, _)| i)
            .collect();
        let mut merged = Cluster { members: vec![z] };
        for &i in hits.iter().rev() {
            merged.members.extend(clusters.swap_remove(i).members);
        }
        clusters.push(merged);
    }
    // merge neighbours whose spread matches a perturbed multiple root
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let d = (clusters[a].centroid() - clusters[b].centroid()).norm();
                if d < 1e-3 && best.is_none_or(|(_, _, bd)| d < bd) {
                    let trial = Cluster {
                        members: clusters[a]
                            .members
                            .iter()
                            .chain(clusters[b].members.iter())
                            .copied()
                            .collect(),
                    };
                    if plausible_multiple_root(w, &trial, radius) {
                        best = Some((a, b, d));
                    }
                }
            }
        }
        let Some((a, b, _)) = best else { break };
        let moved = clusters.swap_remove(b).members;
        clusters[a].members.extend(moved);
    }
    clusters
}

/// Finds, clusters and classifies the roots of `W`.
///
/// Roots inside the unit disk are snapped onto the real axis, roots within
/// `eps_snap` of the unit circle onto the circle, and roots within `eps_snap`
/// of `+-1` onto `+-1`. A degree-zero polynomial yields an empty census.
pub fn root_census(w: &WPolynomial, tol: &ToleranceConfig) -> RootCensus {
    if w.degree == 0 {
        return RootCensus { roots: Vec::new(), degree: 0, alpha1: 0, alpha2: 0, alpha3: 0 };
    }
    let raw = companion_roots(w);
    let clusters = cluster_roots(w, raw, tol.eps_root_cluster);
    let mut roots: Vec<Root> = clusters
        .iter()
        .map(|c| {
            let raw = c.centroid();
            let one = Complex64::new(1.0, 0.0);
            let (class, value) = if (raw - one).norm() <= tol.eps_snap {
                (RootClass::AtPlusMinusOne, one)
            } else if (raw + one).norm() <= tol.eps_snap {
                (RootClass::AtPlusMinusOne, -one)
            } else if raw.norm() < 1.0 - tol.eps_snap {
                (RootClass::InsideReal, Complex64::new(raw.re, 0.0))
            } else if (raw.norm() - 1.0).abs() <= tol.eps_snap {
                (RootClass::OnCircleConjugatePair, raw / raw.norm())
            } else {
                (RootClass::Outside, raw)
            };
            Root { value, raw, multiplicity: c.members.len(), class, spread: c.spread() }
        })
        .collect();
    roots.sort_by(|a, b| {
        a.value
            .norm()
            .total_cmp(&b.value.norm())
            .then(a.value.arg().total_cmp(&b.value.arg()))
    });
    let count = |class| -> usize {
        roots.iter().filter(|r| r.class == class).map(|r| r.multiplicity).sum()
    };
    let alpha1 = count(RootClass::InsideReal);
    let alpha2 = count(RootClass::OnCircleConjugatePair) / 2;
    let alpha3 = count(RootClass::AtPlusMinusOne);
    RootCensus { roots, degree: w.degree, alpha1, alpha2, alpha3 }
}
