//! Seeded random data for property tests and the self-test corpus.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dgmod::{UComplex, UModule};
use crate::error::Result;
use crate::linalg::{Field, Matrix, Scalar};
use crate::quadratic::QuadraticPresentation;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small integer in `[-2, 2]`, reduced into the field.
pub fn scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    field.int(rng.gen_range(-2..=2))
}

pub fn matrix(field: Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, scalar(field, rng));
        }
    }
    m
}

/// Random relation space of random dimension in `V (x) V`.
pub fn presentation(field: Field, n: usize, rng: &mut impl Rng) -> QuadraticPresentation {
    let r = rng.gen_range(0..=n * n);
    let m = matrix(field, r, n * n, rng);
    QuadraticPresentation::with_default_names(field, n, m).expect("square relations are valid")
}

/// A module over a commutative `U` on `ngens` generators with the
/// generators acting by polynomials in one nilpotent matrix.
pub fn commuting_module(field: Field, ngens: usize, dim: usize, rng: &mut impl Rng) -> UModule {
    let mut n = Matrix::zeros(field, dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            n.set(i, j, scalar(field, rng));
        }
    }
    let n2 = n.mul(&n);
    let acts = (0..ngens)
        .map(|_| n.scale(&scalar(field, rng)).add(&n2.scale(&scalar(field, rng))))
        .collect();
    UModule::new(field, dim, acts).expect("sizes agree")
}

/// Random element of `{ D in Hom_U(src, tgt) : D prev = 0 }`.
pub fn u_map(src: &UModule, tgt: &UModule, prev: Option<&Matrix>, rng: &mut impl Rng) -> Matrix {
    let f = src.field();
    let (s, t) = (src.dim(), tgt.dim());
    let mut rows = Matrix::zeros(f, 0, s * t);
    for g in 0..src.ngens() {
        let c = tgt.action(g).kron(&Matrix::identity(f, s)).sub(&Matrix::identity(f, t).kron(&src.action(g).transpose()));
        rows = rows.vstack(&c);
    }
    if let Some(p) = prev {
        rows = rows.vstack(&Matrix::identity(f, t).kron(&p.transpose()));
    }
    let basis = rows.kernel_basis();
    let mut v = vec![f.zero(); s * t];
    for c in 0..basis.cols() {
        let k = scalar(f, rng);
        for (i, x) in basis.col(c).iter().enumerate() {
            v[i] = v[i].add(&x.mul(&k));
        }
    }
    let mut m = Matrix::zeros(f, t, s);
    for i in 0..t {
        for j in 0..s {
            m.set(i, j, v[i * s + j].clone());
        }
    }
    m
}

/// A complex `start..=start+len-1` of commuting modules of dimension at most `max_dim`.
pub fn commuting_complex(
    field: Field,
    ngens: usize,
    start: i64,
    len: usize,
    max_dim: usize,
    rng: &mut impl Rng,
) -> Result<UComplex> {
    let modules: Vec<UModule> =
        (0..len).map(|_| commuting_module(field, ngens, rng.gen_range(1..=max_dim), rng)).collect();
    let mut d: Vec<Matrix> = Vec::new();
    for p in 0..len.saturating_sub(1) {
        let m = u_map(&modules[p], &modules[p + 1], d.last(), rng);
        d.push(m);
    }
    UComplex::new(start, modules, d, ngens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::deformation::DeformationData;

    #[test]
    fn random_complexes_are_valid() {
        let f = Field::prime(5).unwrap();
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let mut r = rng(7);
        for _ in 0..10 {
            let c = commuting_complex(f, 2, -2, 3, 3, &mut r).unwrap();
            assert!(c.validate(&data).is_ok());
        }
    }
}
