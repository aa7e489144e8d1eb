//! Koszulness in a degree window: strand exactness of `A (x) (A!)^*` and
//! Ext of `k` from a minimal graded free resolution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::par;
use crate::quadratic::{GradedAlgebra, QuadraticPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandResult {
    pub n: usize,
    pub dims: Vec<usize>,
    pub exact: bool,
    /// First homological position with nonzero homology.
    pub failing_position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulnessReport {
    pub bound: usize,
    pub strands: Vec<StrandResult>,
    /// `betti[i][j] = dim Ext^i_A(k, k)` in internal degree `j`.
    pub betti: Vec<Vec<usize>>,
    pub ext_diagonal: bool,
    pub ext_matches_dual: bool,
}

impl KoszulnessReport {
    pub fn pass(&self) -> bool {
        self.strands.iter().all(|s| s.exact) && self.ext_diagonal && self.ext_matches_dual
    }

    pub fn witness(&self) -> Option<&StrandResult> {
        self.strands.iter().find(|s| !s.exact)
    }
}

/// Differentials `A_{n-i} (x) (A!_i)^* -> A_{n-i+1} (x) (A!_{i-1})^*`,
/// `u (x) a* -> sum u x_a (x) x^_a a*`, indexed by `i = 1..=n`.
pub fn strand(a: &GradedAlgebra, dual: &GradedAlgebra, n: usize) -> Result<Vec<Matrix>> {
    let mut ds = Vec::new();
    for i in 1..=n {
        let mut d = Matrix::zeros(a.field(), a.dim(n - i + 1) * dual.dim(i - 1), a.dim(n - i) * dual.dim(i));
        for g in 0..a.ngens() {
            let ra = a.right_gen(n - i, g)?;
            let rd = dual.right_gen(i - 1, g)?.transpose();
            d = d.add(&ra.kron(&rd));
        }
        ds.push(d);
    }
    Ok(ds)
}

fn strand_result(a: &GradedAlgebra, dual: &GradedAlgebra, n: usize) -> Result<StrandResult> {
    let ds = strand(a, dual, n)?;
    let dims: Vec<usize> = (0..=n).map(|i| a.dim(n - i) * dual.dim(i)).collect();
    let ranks: Vec<usize> = ds.iter().map(Matrix::rank).collect();
    let rank = |i: usize| if i == 0 || i > n { 0 } else { ranks[i - 1] };
    let failing = (0..=n).find(|&i| rank(i) + rank(i + 1) != dims[i]);
    Ok(StrandResult { n, dims, exact: failing.is_none(), failing_position: failing })
}

/// Minimal graded free resolution of `k`; returns `betti[i][j]` for
/// `i <= max_hom`, `j <= a.bound()`.
pub fn ext_betti(a: &GradedAlgebra, max_hom: usize) -> Result<Vec<Vec<usize>>> {
    let top = a.bound();
    let f = a.field();
    let mut mu = vec![vec![None; top + 1]; top + 1];
    for i in 0..=top {
        for j in 0..=top - i {
            mu[i][j] = Some(a.mu(i, j)?);
        }
    }
    // Layout of a free module in degree j.
    let layout = |gens: &[usize], j: usize| -> (Vec<usize>, usize) {
        let mut offs = Vec::new();
        let mut off = 0;
        for &g in gens {
            offs.push(off);
            if g <= j {
                off += a.dim(j - g);
            }
        }
        (offs, off)
    };
    // Matrix in degree j of the map sending generator k to images[k].
    let map_at = |gens: &[usize], images: &[Vec<crate::linalg::Scalar>], tgt: &[usize], j: usize| -> Matrix {
        let (soffs, sdim) = layout(gens, j);
        let (toffs, tdim) = layout(tgt, j);
        let mut m = Matrix::zeros(f, tdim, sdim);
        for (k, &g) in gens.iter().enumerate() {
            if g > j {
                continue;
            }
            let s = j - g;
            for (h, &t) in tgt.iter().enumerate() {
                if t > g {
                    continue;
                }
                let e = g - t;
                let de = a.dim(e);
                let v = &images[k][toffs_at(tgt, h, g, a)..toffs_at(tgt, h, g, a) + de];
                let table = mu[s][e].as_ref().expect("within bound");
                for ai in 0..a.dim(s) {
                    for (l, x) in v.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        for r in 0..a.dim(j - t) {
                            let y = table.get(r, ai * de + l);
                            if !y.is_zero() {
                                m.add_at(toffs[h] + r, soffs[k] + ai, &y.mul(x));
                            }
                        }
                    }
                }
            }
        }
        m
    };

    let mut betti = vec![vec![0; top + 1]; max_hom + 1];
    betti[0][0] = 1;
    let mut gens: Vec<usize> = vec![0];
    // Kernel of the augmentation, per degree, as columns.
    let mut kernels: Vec<Matrix> =
        (0..=top).map(|j| if j == 0 { Matrix::zeros(f, 1, 0) } else { Matrix::identity(f, a.dim(j)) }).collect();
    for i in 1..=max_hom {
        let mut new_gens: Vec<usize> = Vec::new();
        let mut images: Vec<Vec<crate::linalg::Scalar>> = Vec::new();
        for j in 0..=top {
            let span = map_at(&new_gens, &images, &gens, j);
            let mut rank = span.rank();
            let mut acc = span;
            let k = &kernels[j];
            for c in 0..k.cols() {
                let col = Matrix::column(f, &k.col(c));
                let next = acc.hstack(&col);
                let r = next.rank();
                if r > rank {
                    rank = r;
                    acc = next;
                    new_gens.push(j);
                    images.push(k.col(c));
                    betti[i][j] += 1;
                }
            }
        }
        kernels = (0..=top).map(|j| map_at(&new_gens, &images, &gens, j).kernel_basis()).collect();
        gens = new_gens;
        if gens.is_empty() {
            break;
        }
    }
    Ok(betti)
}

/// Offset of generator `h` of `tgt` inside the degree-`g` layout.
fn toffs_at(tgt: &[usize], h: usize, g: usize, a: &GradedAlgebra) -> usize {
    tgt[..h].iter().filter(|&&t| t <= g).map(|&t| a.dim(g - t)).sum()
}

/// Strands only, stopping at the first inexact one.
pub fn first_inexact_strand(p: &QuadraticPresentation, bound: usize) -> Result<Option<StrandResult>> {
    let a = p.truncate(bound)?;
    let dual = p.quadratic_dual().truncate(bound)?;
    for n in 1..=bound {
        let s = strand_result(&a, &dual, n)?;
        if !s.exact {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Randomized search for a presentation with an inexact strand `n <= bound`.
pub fn search_non_koszul(
    field: crate::linalg::Field,
    ngens: usize,
    bound: usize,
    tries: usize,
    rng: &mut impl rand::Rng,
) -> Result<Option<(QuadraticPresentation, StrandResult)>> {
    for _ in 0..tries {
        let p = super::random::presentation(field, ngens, rng);
        if let Some(s) = first_inexact_strand(&p, bound)? {
            return Ok(Some((p, s)));
        }
    }
    Ok(None)
}

/// Strands `1 <= n <= bound` and Ext through homological degree `bound`.
pub fn koszulness_check(p: &QuadraticPresentation, bound: usize) -> Result<KoszulnessReport> {
    let a = p.truncate(bound)?;
    let dual = p.quadratic_dual().truncate(bound)?;
    let ns: Vec<usize> = (1..=bound).collect();
    let strands = par::map_collect(&ns, |&n| strand_result(&a, &dual, n)).into_iter().collect::<Result<Vec<_>>>()?;
    let betti = ext_betti(&a, bound)?;
    let ext_diagonal = betti.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &b)| j == i || b == 0));
    let ext_matches_dual = (0..=bound).all(|i| betti[i][i] == dual.dim(i));
    Ok(KoszulnessReport { bound, strands, betti, ext_diagonal, ext_matches_dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::Field;

    #[test]
    fn symmetric_and_exterior_are_koszul() {
        let f = Field::Rational;
        for p in [catalog::symmetric(f, 2), catalog::exterior(f, 2), catalog::symmetric(f, 3)] {
            let rep = koszulness_check(&p, 4).unwrap();
            assert!(rep.pass(), "{rep:?}");
        }
    }

    #[test]
    fn random_search_finds_a_non_koszul_presentation() {
        let f = Field::prime(2).unwrap();
        let mut r = crate::suite::random::rng(11);
        let (p, s) = search_non_koszul(f, 3, 4, 200, &mut r).unwrap().expect("found");
        let rep = koszulness_check(&p, 4).unwrap();
        assert!(!rep.pass());
        assert_eq!(rep.witness().unwrap().n, s.n);
        println!("{} relations, strand {} fails at {:?}", p.relation_dim(), s.n, s.failing_position);
    }

    #[test]
    fn dual_numbers_have_one_dimensional_ext_everywhere() {
        let f = Field::Rational;
        let a = catalog::dual_numbers(f).truncate(5).unwrap();
        let b = ext_betti(&a, 5).unwrap();
        for i in 0..=5 {
            assert_eq!(b[i][i], 1);
        }
    }

    #[test]
    fn monomial_relation_has_short_resolution() {
        // k<x, y>/(xy): Koszul, Ext is 1, 2, 1.
        let f = Field::prime(2).unwrap();
        let r = Matrix::from_i64(f, &[&[0, 1, 0, 0]]);
        let p = QuadraticPresentation::with_default_names(f, 2, r).unwrap();
        let rep = koszulness_check(&p, 4).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.betti[2][2], 1);
        assert_eq!(rep.betti[3].iter().sum::<usize>(), 0);
    }
}
