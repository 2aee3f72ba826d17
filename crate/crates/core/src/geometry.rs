//! Linear-algebra primitives shared by every module: regular simplex vertex
//! frames, generalized cross products, determinants and small helpers for
//! working inside proper subspaces.

use nalgebra as na;

use crate::{GeometryError, Result};

/// Coordinate vector in ℝⁿ.
pub type Vector = na::DVector<f64>;
/// Dense square matrix.
pub type Matrix = na::DMatrix<f64>;

/// Builds a vector from a coordinate slice.
pub fn vec_from(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}

/// The `i`-th standard basis vector of ℝⁿ.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

/// Vertices `v_1, …, v_{n+1}` of the regular simplex in ℝⁿ: unit vectors with
/// pairwise inner product −1/n and zero sum.
///
/// The representative is fixed by the recursive construction
/// `v_1 = e_1`, `v_i = (−1/n, √(1−1/n²)·w_{i−1})` with `w_j` the vertices of
/// the regular simplex one dimension down. For n = 2 this yields
/// (1,0), (−1/2, √3/2), (−1/2, −√3/2).
pub fn simplex_vertices(n: usize) -> Result<Vec<Vector>> {
    if n < 1 {
        return Err(GeometryError::InvalidArgument(
            "simplex dimension must be at least 1".into(),
        ));
    }
    if n == 1 {
        return Ok(vec![vec_from(&[1.0]), vec_from(&[-1.0])]);
    }
    let lower = simplex_vertices(n - 1)?;
    let nf = n as f64;
    let scale = (1.0 - 1.0 / (nf * nf)).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    out.push(unit(n, 0));
    for w in lower {
        let mut v = Vector::zeros(n);
        v[0] = -1.0 / nf;
        for j in 0..n - 1 {
            v[j + 1] = scale * w[j];
        }
        out.push(v);
    }
    Ok(out)
}

/// Generalized cross product of n−1 vectors in ℝⁿ: the unique `N` with
/// `N·x = det(x, a_1, …, a_{n−1})` for all `x`.
///
/// Returns the zero vector when the inputs are linearly dependent.
pub fn generalized_cross(args: &[Vector]) -> Result<Vector> {
    if args.is_empty() {
        return Err(GeometryError::InvalidArgument(
            "generalized cross product needs at least one vector".into(),
        ));
    }
    let n = args[0].len();
    if args.len() != n - 1 || args.iter().any(|a| a.len() != n) {
        return Err(GeometryError::InvalidArgument(format!(
            "expected {} vectors of dimension {}",
            n - 1,
            n
        )));
    }
    // N_i = det of the matrix with e_i in the first column, expanded by
    // cofactors of that column.
    let mut out = Vector::zeros(n);
    for i in 0..n {
        let mut minor = Matrix::zeros(n - 1, n - 1);
        for (col, a) in args.iter().enumerate() {
            let mut r = 0;
            for row in 0..n {
                if row == i {
                    continue;
                }
                minor[(r, col)] = a[row];
                r += 1;
            }
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * determinant(&minor);
    }
    Ok(out)
}

/// Determinant by LU with partial pivoting. Adequate for the n ≤ 8 range this
/// crate works in; exact in sign for permutation-like matrices.
pub fn determinant(m: &Matrix) -> f64 {
    debug_assert_eq!(m.nrows(), m.ncols());
    match m.nrows() {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.clone().lu().determinant(),
    }
}

/// Determinant of the matrix whose columns are the given vectors.
pub fn det_of_columns(cols: &[Vector]) -> f64 {
    let n = cols.len();
    let mut m = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    determinant(&m)
}

/// `‖MᵀM − I‖_max`, the orthogonality residual of a square matrix.
pub fn orthogonality_residual(m: &Matrix) -> f64 {
    let g = m.transpose() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Orthonormal basis of the span of the given vectors (modified Gram–Schmidt,
/// dropping directions below `tol`).
pub fn orthonormal_span(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
        }
    }
    basis
}

/// Orthogonal projection of `x` onto the span of an orthonormal basis.
pub fn project_onto(basis: &[Vector], x: &Vector) -> Vector {
    let mut out = Vector::zeros(x.len());
    for b in basis {
        out += b * b.dot(x);
    }
    out
}

/// Coordinates of `x` in an orthonormal basis of a subspace.
pub fn coords_in(basis: &[Vector], x: &Vector) -> Vector {
    Vector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(x)))
}

/// √det(Gram matrix) of the vectors, i.e. the k-volume of the parallelepiped
/// they span.
pub fn gram_volume(vectors: &[Vector]) -> f64 {
    let k = vectors.len();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = vectors[i].dot(&vectors[j]);
        }
    }
    determinant(&g).max(0.0).sqrt()
}

/// A frame of k unit vectors in ℝⁿ with pairwise inner product α.
///
/// Requires |α| < 1 and α ≠ −1/(k−1) so that the Gram matrix is positive
/// definite. For α = 0 this is the standard basis; for α = −1/n it matches
/// the Gram relations of the regular simplex vertex frame.
pub fn equiangular_frame(n: usize, k: usize, alpha: f64) -> Result<Vec<Vector>> {
    if k > n || k < 1 {
        return Err(GeometryError::InvalidArgument(
            "frame size must satisfy 1 <= k <= n".into(),
        ));
    }
    if alpha.abs() >= 1.0 || (k > 1 && (alpha + 1.0 / (k as f64 - 1.0)).abs() < 1e-12) {
        return Err(GeometryError::InvalidArgument(
            "alpha must satisfy |alpha| < 1 and alpha != -1/(k-1)".into(),
        ));
    }
    let kf = k as f64;
    let a = (1.0 - alpha).sqrt();
    let b = (1.0 + (kf - 1.0) * alpha).sqrt();
    let c = (b - a) / kf;
    let mut frame = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = Vector::zeros(n);
        for j in 0..k {
            v[j] = c + if i == j { a } else { 0.0 };
        }
        frame.push(v);
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simplex_vertices_n2_representative() {
        let v = simplex_vertices(2).unwrap();
        let expected = [
            [1.0, 0.0],
            [-0.5, 3f64.sqrt() / 2.0],
            [-0.5, -3f64.sqrt() / 2.0],
        ];
        for (got, want) in v.iter().zip(expected.iter()) {
            assert!((got - vec_from(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn simplex_vertices_gram_and_sum() {
        for n in 1..=8 {
            let v = simplex_vertices(n).unwrap();
            assert_eq!(v.len(), n + 1);
            let mut sum = Vector::zeros(n);
            for vi in &v {
                sum += vi;
            }
            assert!(sum.norm() < 1e-12, "vertex sum nonzero for n={n}");
            for i in 0..=n {
                for j in 0..=n {
                    let want = if i == j { 1.0 } else { -1.0 / n as f64 };
                    assert!(
                        (v[i].dot(&v[j]) - want).abs() < 1e-12,
                        "gram entry off for n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn simplex_vertices_rejects_zero() {
        assert!(simplex_vertices(0).is_err());
    }

    #[test]
    fn cross_product_basis_cases() {
        let e = |i| unit(3, i);
        let n = generalized_cross(&[e(1), e(2)]).unwrap();
        assert!((n - e(0)).norm() < 1e-15);
        let n = generalized_cross(&[e(2), e(1)]).unwrap();
        assert!((n + e(0)).norm() < 1e-15);
        let n = generalized_cross(&[e(0), e(0)]).unwrap();
        assert!(n.norm() < 1e-15);
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&Matrix::identity(3, 3)), 1.0);
        let d = Matrix::from_diagonal(&vec_from(&[1.0, 1.0, -1.0]));
        assert_eq!(determinant(&d), -1.0);
    }

    #[test]
    fn simplex_reflection_has_det_minus_one() {
        // The matrix swapping v_1 and v_2 while fixing the other vertices.
        let g = crate::symmetry::permutation_to_matrix(&simplex_vertices(3).unwrap(), &[1, 0, 2, 3])
            .unwrap();
        assert!((determinant(&g) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn equiangular_frame_gram() {
        for &(n, k, alpha) in &[(3, 2, 0.0), (3, 3, -1.0 / 3.0), (5, 4, 0.3), (4, 3, -0.25)] {
            let f = equiangular_frame(n, k, alpha).unwrap();
            for i in 0..k {
                for j in 0..k {
                    let want = if i == j { 1.0 } else { alpha };
                    assert!((f[i].dot(&f[j]) - want).abs() < 1e-12);
                }
            }
        }
    }

    fn arb_vec3() -> impl Strategy<Value = Vector> {
        prop::collection::vec(-10.0..10.0f64, 3).prop_map(|c| vec_from(&c))
    }

    proptest! {
        #[test]
        fn cross_defines_determinant(x in arb_vec3(), a in arb_vec3(), b in arb_vec3()) {
            let n = generalized_cross(&[a.clone(), b.clone()]).unwrap();
            let det = det_of_columns(&[x.clone(), a, b]);
            prop_assert!((n.dot(&x) - det).abs() < 1e-9 * (1.0 + det.abs()));
        }

        #[test]
        fn cross_alternates(a in arb_vec3(), b in arb_vec3()) {
            let n1 = generalized_cross(&[a.clone(), b.clone()]).unwrap();
            let n2 = generalized_cross(&[b.clone(), a.clone()]).unwrap();
            prop_assert!((&n1 + &n2).norm() < 1e-9 * (1.0 + n1.norm()));
            prop_assert!(n1.dot(&a).abs() < 1e-9 * (1.0 + n1.norm() * a.norm()));
            prop_assert!(n1.dot(&b).abs() < 1e-9 * (1.0 + n1.norm() * b.norm()));
        }

        #[test]
        fn cross_is_multilinear(a in arb_vec3(), b in arb_vec3(), c in arb_vec3(), s in -5.0..5.0f64) {
            let lhs = generalized_cross(&[&a * s + &b, c.clone()]).unwrap();
            let rhs = generalized_cross(&[a, c.clone()]).unwrap() * s
                + generalized_cross(&[b, c]).unwrap();
            prop_assert!((lhs - &rhs).norm() < 1e-8 * (1.0 + rhs.norm()));
        }
    }
}
