//! Nonhomogeneous quadratic data `P = {x + alpha(x) + beta(x) : x in R}`.

use serde::{Deserialize, Serialize};

use crate::algebra::{FilteredAlgebra, Relation};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::quadratic::{GradedAlgebra, QuadraticPresentation};

/// `alpha: R -> V` and `beta: R -> k`, stored on the echelon basis of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationData {
    base: QuadraticPresentation,
    // column i is alpha(r_i)
    alpha: Matrix,
    beta: Vec<Scalar>,
}

impl DeformationData {
    /// Values are given on the rows of `base.relations()`.
    pub fn new(base: QuadraticPresentation, alpha: Matrix, beta: Vec<Scalar>) -> Result<Self> {
        let (n, r) = (base.ngens(), base.relation_dim());
        if alpha.shape() != (n, r) || beta.len() != r {
            return Err(Error::Dimension(format!(
                "alpha must be {n}x{r} and beta of length {r}"
            )));
        }
        let data = DeformationData { base, alpha, beta };
        data.check_weights()?;
        Ok(data)
    }

    /// Zero deformation: `U = A`.
    pub fn trivial(base: QuadraticPresentation) -> Self {
        let (n, r) = (base.ngens(), base.relation_dim());
        let f = base.field();
        DeformationData { base, alpha: Matrix::zeros(f, n, r), beta: vec![f.zero(); r] }
    }

    /// Builds the data from rows `[quadratic | linear | constant]` spanning `P`.
    pub fn from_relations(
        field: Field,
        generators: Vec<String>,
        weights: Option<Vec<u32>>,
        rows: &Matrix,
    ) -> Result<Self> {
        let n = generators.len();
        let q = n * n;
        if rows.cols() != q + n + 1 {
            return Err(Error::Dimension(format!(
                "relation rows need {} columns, got {}",
                q + n + 1,
                rows.cols()
            )));
        }
        let (rr, pivots) = rows.rref();
        if pivots.iter().any(|&p| p >= q) {
            return Err(Error::InconsistentData(
                "P meets k + V nontrivially: some relation has no quadratic part".into(),
            ));
        }
        let quad = rr.block(0, pivots.len(), 0, q);
        let base = QuadraticPresentation::new(field, generators, weights, quad.clone())?;
        // `base.relations()` is again the echelon form of `quad`, so rows align.
        debug_assert_eq!(base.relations(), &quad);
        let r = pivots.len();
        let alpha = rr.block(0, r, q, n).transpose();
        let beta = (0..r).map(|i| rr.get(i, q + n)).collect();
        Self::new(base, alpha, beta)
    }

    fn check_weights(&self) -> Result<()> {
        if self.base.has_trivial_weights() {
            return Ok(());
        }
        let n = self.base.ngens();
        let w = self.base.weights();
        for i in 0..self.base.relation_dim() {
            let rw = (0..n * n)
                .find(|&c| !self.base.relations().is_entry_zero(i, c))
                .map(|c| w[c / n] + w[c % n])
                .unwrap_or(0);
            for g in 0..n {
                if !self.alpha.is_entry_zero(g, i) && w[g] != rw {
                    return Err(Error::InconsistentData(format!(
                        "alpha of relation {i} changes the weight"
                    )));
                }
            }
            if !self.beta[i].is_zero() {
                return Err(Error::InconsistentData(format!(
                    "beta of relation {i} changes the weight"
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &QuadraticPresentation {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.base.field()
    }

    pub fn ngens(&self) -> usize {
        self.base.ngens()
    }

    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn beta(&self) -> &[Scalar] {
        &self.beta
    }

    pub fn is_augmented(&self) -> bool {
        self.beta.iter().all(|b| b.is_zero())
    }

    /// Relations of `U` for the algebra engine.
    pub fn engine_relations(&self) -> Vec<Relation> {
        let rel = self.base.relations();
        (0..rel.rows())
            .map(|i| Relation {
                quad: rel.row(i),
                lin: self.alpha.col(i),
                constant: self.beta[i].clone(),
            })
            .collect()
    }

    /// Braverman-Gaitsgory conditions on `(R (x) V) ∩ (V (x) R)`.
    pub fn pbw_check(&self) -> PbwReport {
        let f = self.field();
        let n = self.ngens();
        let rel = self.base.relations();
        let m = rel.rows();
        let n3 = n * n * n;
        // Columns r_i (x) e_c at i * n + c, and e_a (x) r_i at a * m + i.
        let mut rv = Matrix::zeros(f, n3, m * n);
        let mut vr = Matrix::zeros(f, n3, n * m);
        for i in 0..m {
            for ab in 0..n * n {
                if rel.is_entry_zero(i, ab) {
                    continue;
                }
                let x = rel.get(i, ab);
                for c in 0..n {
                    rv.set(ab * n + c, i * n + c, x.clone());
                    vr.set(c * n * n + ab, c * m + i, x.clone());
                }
            }
        }
        let ker = rv.hstack(&vr.neg()).kernel_basis();
        let mut report = PbwReport {
            intersection_dim: ker.cols(),
            cond1: true,
            cond2: true,
            cond3: true,
            all_pass: true,
        };
        let rt = rel.transpose();
        for k in 0..ker.cols() {
            let s = |i: usize, c: usize| ker.get(i * n + c, k);
            let t = |a: usize, i: usize| ker.get(m * n + a * m + i, k);
            // phi = (alpha (x) id - id (x) alpha)(x) in V (x) V
            let mut phi = vec![f.zero(); n * n];
            let mut beta_diff = vec![f.zero(); n];
            for i in 0..m {
                for c in 0..n {
                    let sc = s(i, c);
                    let ta = t(c, i);
                    for g in 0..n {
                        let al = self.alpha.get(g, i);
                        phi[g * n + c] = phi[g * n + c].add(&sc.mul(&al));
                        phi[c * n + g] = phi[c * n + g].sub(&ta.mul(&al));
                    }
                    beta_diff[c] = beta_diff[c].add(&sc.mul(&self.beta[i]));
                    beta_diff[c] = beta_diff[c].sub(&ta.mul(&self.beta[i]));
                }
            }
            let Some(y) = rt.solve(&phi).expect("shapes agree") else {
                report.cond1 = false;
                report.cond2 = false;
                report.cond3 = false;
                continue;
            };
            let alpha_phi = self.alpha.apply(&y);
            if alpha_phi != beta_diff {
                report.cond2 = false;
            }
            let beta_phi = y.iter().zip(&self.beta).fold(f.zero(), |acc, (a, b)| acc.add(&a.mul(b)));
            if !beta_phi.is_zero() {
                report.cond3 = false;
            }
        }
        report.all_pass = report.cond1 && report.cond2 && report.cond3;
        report
    }

    /// `U_{<=bound}` by exact quotient, with graded dimensions against `A`.
    pub fn build_u(&self, bound: usize) -> Result<FilteredAlgebraReport> {
        let u = FilteredAlgebra::build(self.field(), self.ngens(), &self.engine_relations(), bound)?;
        let a = self.base.truncate(bound)?;
        Ok(FilteredAlgebraReport {
            gr_dims: u.gr_dims().to_vec(),
            a_dims: a.dims(),
            pbw_through_bound: u.gr_dims() == a.dims().as_slice(),
            algebra: u,
        })
    }

    /// `(A!, d, c)`, checking that `d` descends and the curved identities hold.
    pub fn build_cdga(&self, bound: usize) -> Result<CdgAlgebra> {
        let cdga = self.build_cdga_unchecked(bound)?;
        let report = cdga.invariants()?;
        if !report.all_hold() {
            return Err(Error::WellDefinedness(format!("cdga invariants fail: {report:?}")));
        }
        Ok(cdga)
    }

    /// Builds `(A!, d, c)`; only fails if `d` does not preserve the relations.
    pub fn build_cdga_unchecked(&self, bound: usize) -> Result<CdgAlgebra> {
        self.build_cdga_signed(bound, self.field().int(-1))
    }

    /// Debug hook: extends `d` with `+1` in place of `(-1)^i`. Only the
    /// self-test negative control uses it.
    #[doc(hidden)]
    pub fn build_cdga_corrupted(&self, bound: usize) -> Result<CdgAlgebra> {
        self.build_cdga_signed(bound, self.field().one())
    }

    fn build_cdga_signed(&self, bound: usize, odd: Scalar) -> Result<CdgAlgebra> {
        let f = self.field();
        let n = self.ngens();
        let bound = bound.max(3);
        let dual = self.base.quadratic_dual().truncate(bound)?;
        let rel = self.base.relations();
        let m = rel.rows();
        // pairing[i][(a,b)] = <x^_a x^_b, r_i> = r_i[(b,a)]
        let mut pairing = Matrix::zeros(f, m, n * n);
        for i in 0..m {
            for a in 0..n {
                for b in 0..n {
                    if !rel.is_entry_zero(i, b * n + a) {
                        pairing.set(i, a * n + b, rel.get(i, b * n + a));
                    }
                }
            }
        }
        let proj2 = dual.projection(2)?;
        let lift = |target: Vec<Scalar>| -> Vec<Scalar> {
            let xi = pairing.solve(&target).expect("shapes agree").expect("relations independent");
            proj2.apply(&xi)
        };
        let d1: Vec<Vec<Scalar>> = (0..n).map(|g| lift(self.alpha.row(g))).collect();
        let c = lift(self.beta.clone());

        let alg = dual.inner();
        let d1_full: Vec<Vec<Scalar>> = d1.iter().map(|v| dual.to_full(2, v)).collect();
        // d on a word by the Leibniz rule.
        let d_word = |w: &[usize]| -> Result<Vec<Scalar>> {
            let mut out = vec![f.zero(); alg.dim()];
            for i in 0..w.len() {
                let pre = alg.word_vector(&w[..i])?;
                let suf = alg.word_vector(&w[i + 1..])?;
                let t = alg.mul(&alg.mul(&pre, &d1_full[w[i]])?, &suf)?;
                let sign = if i % 2 == 0 { f.one() } else { odd.clone() };
                for (o, x) in out.iter_mut().zip(t) {
                    *o = o.add(&sign.mul(&x));
                }
            }
            Ok(out)
        };

        // d(R^perp) must vanish in A!_3.
        let drel = dual.presentation().relations();
        for i in 0..drel.rows() {
            let mut acc = vec![f.zero(); alg.dim()];
            for ab in 0..n * n {
                if drel.is_entry_zero(i, ab) {
                    continue;
                }
                let coef = drel.get(i, ab);
                for (o, x) in acc.iter_mut().zip(d_word(&[ab / n, ab % n])?) {
                    *o = o.add(&coef.mul(&x));
                }
            }
            if acc.iter().any(|x| !x.is_zero()) {
                return Err(Error::WellDefinedness(format!(
                    "d does not preserve dual relation {i}"
                )));
            }
        }

        let mut d = Vec::with_capacity(bound);
        for k in 0..bound {
            let mut mat = Matrix::zeros(f, dual.dim(k + 1), dual.dim(k));
            for (j, w) in dual.basis_words(k).iter().enumerate() {
                let v = dual.component(k + 1, &d_word(w)?);
                for (i, x) in v.into_iter().enumerate() {
                    if !x.is_zero() {
                        mat.set(i, j, x);
                    }
                }
            }
            d.push(mat);
        }
        Ok(CdgAlgebra { dual, d, c })
    }

    /// Checks that `sum x_a x_b (x) x^_b x^_a + sum x_a (x) d(x^_a) + 1 (x) c`
    /// and its mirror in `A!_2 (x) U` vanish.
    pub fn vanishing_witness(&self, cdga: &CdgAlgebra) -> Result<bool> {
        let f = self.field();
        let n = self.ngens();
        let u = FilteredAlgebra::build(f, n, &self.engine_relations(), 2)?;
        let a = &cdga.dual;
        let du = u.dim();
        let da = a.dim(2);
        let mut left = Matrix::zeros(f, du, da);
        let mut right = Matrix::zeros(f, da, du);
        let mut add = |uv: &[Scalar], av: &[Scalar]| {
            for (i, x) in uv.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in av.iter().enumerate() {
                    if !y.is_zero() {
                        let p = x.mul(y);
                        left.add_at(i, j, &p);
                        right.add_at(j, i, &p);
                    }
                }
            }
        };
        for al in 0..n {
            for be in 0..n {
                add(&u.word_vector(&[al, be])?, &a.word(&[be, al])?);
            }
            add(&u.word_vector(&[al])?, &cdga.d1(al));
        }
        add(&u.unit(), &cdga.c);
        // `right` is the transpose of `left`, so both vanish together; the
        // mirror is still checked explicitly as its own element.
        Ok(left.is_zero() && right.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbwReport {
    pub intersection_dim: usize,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub all_pass: bool,
}

/// Result of `build_u`.
#[derive(Clone, Debug)]
pub struct FilteredAlgebraReport {
    pub algebra: FilteredAlgebra,
    pub gr_dims: Vec<usize>,
    pub a_dims: Vec<usize>,
    pub pbw_through_bound: bool,
}

/// `(A!, d, c)` truncated at the bound of `dual`.
#[derive(Clone, Debug)]
pub struct CdgAlgebra {
    dual: GradedAlgebra,
    // d[k]: A!_k -> A!_{k+1}
    d: Vec<Matrix>,
    c: Vec<Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdgaReport {
    pub leibniz: bool,
    pub d_of_c: bool,
    pub d_squared: bool,
}

impl CdgaReport {
    pub fn all_hold(&self) -> bool {
        self.leibniz && self.d_of_c && self.d_squared
    }
}

impl CdgAlgebra {
    pub fn dual(&self) -> &GradedAlgebra {
        &self.dual
    }

    pub fn field(&self) -> Field {
        self.dual.field()
    }

    pub fn bound(&self) -> usize {
        self.dual.bound()
    }

    pub fn ngens(&self) -> usize {
        self.dual.ngens()
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dual.dim(n)
    }

    /// `d: A!_k -> A!_{k+1}` (zero map past the bound).
    pub fn d(&self, k: usize) -> Matrix {
        if k < self.d.len() {
            self.d[k].clone()
        } else {
            Matrix::zeros(self.field(), self.dim(k + 1), self.dim(k))
        }
    }

    /// `d(x^_g)` in `A!_2`.
    pub fn d1(&self, g: usize) -> Vec<Scalar> {
        self.d[1].col(g)
    }

    /// The curvature in `A!_2`.
    pub fn curvature(&self) -> &[Scalar] {
        &self.c
    }

    pub fn is_flat(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.is_flat() && self.d.iter().all(|m| m.is_zero())
    }

    /// Leibniz on basis pairs, `d(c) = 0` and `d^2 = [c, -]` within the bound.
    pub fn invariants(&self) -> Result<CdgaReport> {
        let a = &self.dual;
        let f = self.field();
        let top = self.bound();
        let mut leibniz = true;
        for i in 0..top {
            for j in 0..top - i {
                for k in 0..a.dim(i) {
                    for l in 0..a.dim(j) {
                        let x = a.basis(i, k);
                        let y = a.basis(j, l);
                        let lhs = self.d(i + j).apply(&a.multiply(i, &x, j, &y)?);
                        let t1 = a.multiply(i + 1, &self.d(i).apply(&x), j, &y)?;
                        let t2 = a.multiply(i, &x, j + 1, &self.d(j).apply(&y))?;
                        let rhs: Vec<Scalar> =
                            t1.iter().zip(&t2).map(|(p, q)| p.add(&q.signed(i as i64))).collect();
                        if lhs != rhs {
                            leibniz = false;
                        }
                    }
                }
            }
        }
        let d_of_c = top < 3 || self.d(2).apply(&self.c).iter().all(|x| x.is_zero());
        let mut d_squared = true;
        for k in 0..top.saturating_sub(1) {
            let dd = self.d(k + 1).mul(&self.d(k));
            for l in 0..a.dim(k) {
                let b = a.basis(k, l);
                let cb = a.multiply(2, &self.c, k, &b)?;
                let bc = a.multiply(k, &b, 2, &self.c)?;
                let comm: Vec<Scalar> = cb.iter().zip(&bc).map(|(x, y)| x.sub(y)).collect();
                if dd.col(l) != comm {
                    d_squared = false;
                }
            }
        }
        let _ = f;
        Ok(CdgaReport { leibniz, d_of_c, d_squared })
    }

    /// `A!_n -> A!_{n+1}` left multiplication by `x^_g`.
    pub fn left_gen(&self, n: usize, g: usize) -> Result<Matrix> {
        self.dual.left_gen(n, g)
    }

    /// `A!_n -> A!_{n+1}` right multiplication by `x^_g`.
    pub fn right_gen(&self, n: usize, g: usize) -> Result<Matrix> {
        self.dual.right_gen(n, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn two_point_cdga_matches_hand_computation() {
        let f = Field::Rational;
        let data = catalog::two_point(f, f.int(1), f.int(2));
        assert!(data.pbw_check().all_pass);
        let cdga = data.build_cdga(5).unwrap();
        assert_eq!(cdga.curvature(), &[f.int(2)]);
        for k in 1..5 {
            let expected = if k % 2 == 1 { f.int(-3) } else { f.zero() };
            assert_eq!(cdga.d(k).get(0, 0), expected, "d on degree {k}");
        }
        assert!(data.vanishing_witness(&cdga).unwrap());
        let u = data.build_u(2).unwrap();
        assert_eq!(u.gr_dims, vec![1, 1, 0]);
        assert_eq!(u.algebra.dim(), 2);
    }

    #[test]
    fn heisenberg_differential() {
        let f = Field::Rational;
        let data = catalog::heisenberg(f);
        let report = data.pbw_check();
        assert!(report.all_pass);
        assert_eq!(report.intersection_dim, 1);
        let cdga = data.build_cdga(4).unwrap();
        assert!(cdga.is_flat());
        // d(x^3) = x^1 x^2 in the word basis of the exterior algebra.
        let dual = cdga.dual();
        assert_eq!(cdga.d1(2), dual.word(&[0, 1]).unwrap());
        assert!(cdga.d1(0).iter().all(|x| x.is_zero()));
        assert!(data.vanishing_witness(&cdga).unwrap());
        assert_eq!(data.build_u(3).unwrap().gr_dims, vec![1, 3, 6, 10]);
    }

    #[test]
    fn jacobi_violation_fails_second_condition() {
        let f = Field::Rational;
        // [x1,x2] = x3, [x1,x3] = x2, [x2,x3] = x2
        let data = catalog::lie_algebra(f, 3, &[(0, 1, vec![0, 0, 1]), (0, 2, vec![0, 1, 0]), (1, 2, vec![0, 1, 0])]);
        // Jacobiator by hand: [x1,[x2,x3]] + [x2,[x3,x1]] + [x3,[x1,x2]]
        //   = [x1,x2] + [x2,-x2] + [x3,x3] = x3 != 0
        let r = data.pbw_check();
        assert!(r.cond1);
        assert!(!r.cond2);
        assert!(data.build_cdga(3).is_err());
    }

    #[test]
    fn associative_multiplication_on_v_is_pbw() {
        // R = V (x) V and alpha = multiplication of k x k (idempotents e1, e2).
        let f = Field::Rational;
        let n = 2;
        let mut rows = Matrix::zeros(f, 4, n * n + n + 1);
        for a in 0..n {
            for b in 0..n {
                let i = a * n + b;
                rows.set(i, i, f.one());
                if a == b {
                    rows.set(i, n * n + a, f.int(-1));
                }
            }
        }
        let data = DeformationData::from_relations(f, vec!["e1".into(), "e2".into()], None, &rows).unwrap();
        assert!(data.pbw_check().all_pass);
        assert!(data.build_cdga(4).is_ok());
    }

    #[test]
    fn random_lie_type_data_agree_on_both_criteria() {
        use rand::{Rng, SeedableRng};
        let f = Field::prime(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let base = catalog::symmetric(f, 3);
        let (mut pass, mut fail) = (0, 0);
        for _ in 0..60 {
            let mut alpha = Matrix::zeros(f, 3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    alpha.set(i, j, f.int(rng.gen_range(0..3)));
                }
            }
            let beta = (0..3).map(|_| f.int(rng.gen_range(0..3))).collect();
            let data = DeformationData::new(base.clone(), alpha, beta).unwrap();
            let pbw = data.pbw_check().all_pass;
            let cdga = data.build_cdga(4).is_ok();
            assert_eq!(pbw, cdga);
            if pbw { pass += 1 } else { fail += 1 }
        }
        assert!(pass > 0 && fail > 0, "{pass} {fail}");
    }

    #[test]
    fn trivial_deformation_has_zero_structure() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(3).unwrap();
        assert!(cdga.is_trivial());
        assert!(data.vanishing_witness(&cdga).unwrap());
    }
}
