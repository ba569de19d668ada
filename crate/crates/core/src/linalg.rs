//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub(crate) type CMatrix = DMatrix<Complex64>;
pub(crate) type CVector = DVector<Complex64>;

pub(crate) fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// LU-based inverse with the 1-norm condition number. `None` when the
/// factorization breaks down outright.
pub(crate) fn inverse_with_condition(m: &CMatrix) -> Option<(CMatrix, f64)> {
    let inv = m.clone().lu().try_inverse()?;
    if inv.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return None;
    }
    let cond = norm1(m) * norm1(&inv);
    Some((inv, cond))
}

pub(crate) fn determinant(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let dim = m.nrows();
    if dim == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    // symmetrize to suppress roundoff asymmetry
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Result of a rank-revealing SVD split of the column space of `m`'s input side.
#[derive(Debug, Clone)]
pub(crate) struct SvdSplit {
    /// Orthonormal basis (columns) of the numerical null space.
    pub null: CMatrix,
    /// Orthonormal basis (columns) of the complement (row space).
    pub range: CMatrix,
    /// Singular values, descending, padded with zeros to the column count.
    pub singular_values: Vec<f64>,
    /// Some singular value lies within a factor of ten of the cutoff.
    pub ambiguous: bool,
}

/// Splits `C^{ncols}` into the numerical null space of `m` and its
/// orthogonal complement. Singular values at or below `cutoff` count as zero.
pub(crate) fn svd_split(m: &CMatrix, cutoff: f64) -> SvdSplit {
    let cols = m.ncols();
    if cols == 0 {
        return SvdSplit {
            null: CMatrix::zeros(0, 0),
            range: CMatrix::zeros(0, 0),
            singular_values: Vec::new(),
            ambiguous: false,
        };
    }
    // pad to at least square so the SVD yields a full right basis
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    let ambiguous = singular_values
        .iter()
        .any(|&s| s > cutoff / 10.0 && s <= cutoff * 10.0);
    let column = |k: usize| v_t.row(order[k]).adjoint();
    let range = CMatrix::from_fn(cols, rank, |r, c| column(c)[r]);
    let null = CMatrix::from_fn(cols, cols - rank, |r, c| column(rank + c)[r]);
    SvdSplit { null, range, singular_values, ambiguous }
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `basis` (assumed orthonormal) inside `C^dim`.
pub(crate) fn orthogonal_complement(basis: &CMatrix, dim: usize) -> CMatrix {
    if basis.ncols() == 0 {
        return CMatrix::identity(dim, dim);
    }
    svd_split(&basis.adjoint(), 0.5).null
}

/// Gram-Schmidt on the columns of `vectors` under the inner product
/// `<u, v> = sum_i weight_i conj(u_i) v_i`. Columns are normalised in that
/// metric.
pub(crate) fn weighted_gram_schmidt(vectors: &CMatrix, weight: &[f64]) -> CMatrix {
    let inner = |u: &CVector, v: &CVector| -> Complex64 {
        u.iter()
            .zip(v.iter())
            .zip(weight.iter())
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum()
    };
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.ncols());
    for k in 0..vectors.ncols() {
        let mut v: CVector = vectors.column(k).into_owned();
        for _ in 0..2 {
            for q in &out {
                let proj = inner(q, &v);
                v -= q * proj;
            }
        }
        let norm = inner(&v, &v).re.sqrt();
        out.push(v.unscale(norm));
    }
    if out.is_empty() {
        return CMatrix::zeros(vectors.nrows(), 0);
    }
    CMatrix::from_columns(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn svd_split_rank_deficient() {
        // rank one, null vector (1, -1)/sqrt(2)
        let m = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let split = svd_split(&m, 1e-9);
        assert_eq!(split.null.ncols(), 1);
        assert_eq!(split.range.ncols(), 1);
        let v = split.null.column(0);
        assert!((v[0] + v[1]).norm() < 1e-14);
        assert!(!split.ambiguous);
    }

    #[test]
    fn complement_is_orthogonal() {
        let s = 0.5f64.sqrt();
        let b = CMatrix::from_column_slice(3, 1, &[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)]);
        let q = orthogonal_complement(&b, 3);
        assert_eq!(q.ncols(), 2);
        assert!((b.adjoint() * &q).iter().all(|x| x.norm() < 1e-14));
        let gram = q.adjoint() * &q;
        assert!(max_abs_diff(&gram, &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn hermitian_eigen_sorted() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let resid = &m * vecs.column(1) - vecs.column(1) * c(vals[1], 0.0);
        assert!(resid.norm() < 1e-14);
    }

    #[test]
    fn weighted_metric_normalises() {
        let v = CMatrix::from_column_slice(2, 2, &[c(1., 0.), c(0., 0.), c(1., 0.), c(1., 0.)]);
        let q = weighted_gram_schmidt(&v, &[2.0, 1.0]);
        let w = [2.0, 1.0];
        for a in 0..2 {
            for b in 0..2 {
                let ip: Complex64 =
                    (0..2).map(|i| q[(i, a)].conj() * q[(i, b)] * w[i]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-14);
            }
        }
    }
}
