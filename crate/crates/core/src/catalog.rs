//! Standard presentations and deformations used throughout the tests and CLI.

use crate::deformation::DeformationData;
use crate::linalg::{Field, Matrix, Scalar};
use crate::quadratic::QuadraticPresentation;

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `S(V)`: commutators `x_i x_j - x_j x_i`, `i < j`.
pub fn symmetric(field: Field, n: usize) -> QuadraticPresentation {
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut r = vec![field.zero(); n * n];
            r[i * n + j] = field.one();
            r[j * n + i] = field.int(-1);
            rows.push(r);
        }
    }
    let m = Matrix::from_rows(field, n * n, &rows).expect("well-formed rows");
    QuadraticPresentation::new(field, names(n), None, m).expect("valid presentation")
}

/// The exterior algebra: squares and anticommutators.
pub fn exterior(field: Field, n: usize) -> QuadraticPresentation {
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut r = vec![field.zero(); n * n];
            r[i * n + j] = field.one();
            if i != j {
                r[j * n + i] = field.one();
            }
            rows.push(r);
        }
    }
    let m = Matrix::from_rows(field, n * n, &rows).expect("well-formed rows");
    QuadraticPresentation::new(field, names(n), None, m).expect("valid presentation")
}

/// The free algebra on `n` generators.
pub fn free(field: Field, n: usize) -> QuadraticPresentation {
    QuadraticPresentation::new(field, names(n), None, Matrix::zeros(field, 0, n * n))
        .expect("valid presentation")
}

/// `k[x]/(x^2)`.
pub fn dual_numbers(field: Field) -> QuadraticPresentation {
    QuadraticPresentation::new(field, names(1), None, Matrix::identity(field, 1)).expect("valid presentation")
}

/// Enveloping algebra of a Lie algebra given by brackets `[x_i, x_j] = sum c_k x_k`, `i < j`.
///
/// The relations are `x_i x_j - x_j x_i - [x_i, x_j]`, so `alpha(x ^ y) = [y, x]`.
pub fn lie_algebra(field: Field, n: usize, brackets: &[(usize, usize, Vec<i64>)]) -> DeformationData {
    let q = n * n;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut r = vec![field.zero(); q + n + 1];
            r[i * n + j] = field.one();
            r[j * n + i] = field.int(-1);
            if let Some((_, _, c)) = brackets.iter().find(|(a, b, _)| (*a, *b) == (i, j)) {
                for (k, &ck) in c.iter().enumerate() {
                    r[q + k] = field.int(-ck);
                }
            }
            rows.push(r);
        }
    }
    let m = Matrix::from_rows(field, q + n + 1, &rows).expect("well-formed rows");
    DeformationData::from_relations(field, names(n), None, &m).expect("valid deformation")
}

/// The Heisenberg Lie algebra `[x1, x2] = x3`.
pub fn heisenberg(field: Field) -> DeformationData {
    lie_algebra(field, 3, &[(0, 1, vec![0, 0, 1])])
}

/// `k[x]/(x^2 - (a+b)x + ab)`.
pub fn two_point(field: Field, a: Scalar, b: Scalar) -> DeformationData {
    let row = vec![field.one(), a.add(&b).neg(), a.mul(&b)];
    let m = Matrix::from_rows(field, 3, &[row]).expect("well-formed row");
    DeformationData::from_relations(field, names(1), None, &m).expect("valid deformation")
}
