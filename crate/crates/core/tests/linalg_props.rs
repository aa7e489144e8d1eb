use koszul_core::linalg::{Field, Matrix};
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::prime(7).unwrap()), Just(Field::prime(2).unwrap())]
}

fn entries(rows: usize, cols: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, rows * cols)
}

fn build(f: Field, rows: usize, cols: usize, v: &[i64]) -> Matrix {
    let rs: Vec<&[i64]> = v.chunks(cols.max(1)).take(rows).collect();
    if cols == 0 {
        return Matrix::zeros(f, rows, 0);
    }
    Matrix::from_i64(f, &rs)
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (fields(), 1usize..5, 1usize..5)
        .prop_flat_map(|(f, r, c)| entries(r, c).prop_map(move |v| build(f, r, c, &v)))
}

proptest! {
    #[test]
    fn rref_is_idempotent(a in matrix()) {
        let (r, piv) = a.rref();
        let (r2, piv2) = r.rref();
        prop_assert_eq!(r, r2);
        prop_assert_eq!(piv, piv2);
    }

    #[test]
    fn rank_of_transpose(a in matrix()) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn kernel_is_annihilated(a in matrix()) {
        let k = a.kernel_basis();
        prop_assert_eq!(k.cols(), a.cols() - a.rank());
        prop_assert!(a.mul(&k).is_zero());
        prop_assert_eq!(k.rank(), k.cols());
    }

    #[test]
    fn solve_round_trip(a in matrix(), x in prop::collection::vec(-3i64..=3, 4)) {
        let f = a.field();
        let x: Vec<_> = x.into_iter().take(a.cols()).map(|v| f.int(v)).chain(std::iter::repeat(f.zero())).take(a.cols()).collect();
        let b = a.apply(&x);
        let y = a.solve(&b).unwrap().expect("b lies in the image");
        prop_assert_eq!(a.apply(&y), b);
    }

    #[test]
    fn multiplication_is_associative(
        f in fields(),
        (n, m, k, l) in (1usize..4, 1usize..4, 1usize..4, 1usize..4),
        seed in prop::collection::vec(-3i64..=3, 64),
    ) {
        let a = build(f, n, m, &seed[..n * m]);
        let b = build(f, m, k, &seed[16..16 + m * k]);
        let c = build(f, k, l, &seed[32..32 + k * l]);
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn inverse_when_full_rank(f in fields(), n in 1usize..4, v in entries(3, 3)) {
        let a = build(f, n, n, &v[..n * n]);
        match a.inverse() {
            Some(inv) => prop_assert_eq!(a.mul(&inv), Matrix::identity(f, n)),
            None => prop_assert!(a.rank() < n),
        }
    }
}
