//! Exact linear algebra over `Q` and `F_p`.

mod matrix;
mod scalar;

pub use matrix::{intersection, intersection_dim, Matrix};
pub use scalar::{Field, Scalar};

/// `x = sum_i c_i v_i` for vectors of equal length.
pub fn lin_comb(field: Field, len: usize, terms: &[(Scalar, &[Scalar])]) -> Vec<Scalar> {
    let mut out = vec![field.zero(); len];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o = o.add(&c.mul(x));
        }
    }
    out
}
