//! Bigraded complexes of `A!`-modules and the regrading `p' = p + (r' - r) q`.
//!
//! Generator `a` acts with bidegree `(r w_a, w_a)`, the differential with
//! `(1, 0)`. Regrading twists the action by a sign cocycle so the Leibniz
//! rule `d a = (-1)^{r w_a} a d` survives; the twist is exact for unit
//! generator weights, where the relations of `A!` are unaffected.

use std::collections::BTreeMap;

use rand::Rng;

use crate::complex::{HomologyEntry, HomologyReport};
use crate::deformation::CdgAlgebra;
use crate::dgmod::CdgModule;
use crate::error::{Error, Result};
use crate::functors::GModule;
use crate::linalg::{Field, Matrix};
use crate::par;

use super::random;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedComplex {
    field: Field,
    r: i64,
    gen_weights: Vec<i64>,
    dims: BTreeMap<(i64, i64), usize>,
    /// `(p, q) -> (p + 1, q)`.
    d: BTreeMap<(i64, i64), Matrix>,
    /// `(p, q, a) -> (p + r w_a, q + w_a)`.
    actions: BTreeMap<(i64, i64, usize), Matrix>,
}

fn sign_bit(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

impl BigradedComplex {
    pub fn new(field: Field, r: i64, gen_weights: Vec<i64>) -> Result<Self> {
        if gen_weights.contains(&0) {
            return Err(Error::MissingWeights("generator weights must be nonzero".into()));
        }
        Ok(BigradedComplex { field, r, gen_weights, dims: BTreeMap::new(), d: BTreeMap::new(), actions: BTreeMap::new() })
    }

    pub fn set_dim(&mut self, p: i64, q: i64, n: usize) {
        if n == 0 {
            self.dims.remove(&(p, q));
        } else {
            self.dims.insert((p, q), n);
        }
    }

    pub fn set_d(&mut self, p: i64, q: i64, m: Matrix) -> Result<()> {
        if m.shape() != (self.dim(p + 1, q), self.dim(p, q)) {
            return Err(Error::Dimension(format!("differential at ({p}, {q})")));
        }
        if !m.is_zero() {
            self.d.insert((p, q), m);
        }
        Ok(())
    }

    pub fn set_action(&mut self, p: i64, q: i64, a: usize, m: Matrix) -> Result<()> {
        let (tp, tq) = self.action_target(p, q, a);
        if a >= self.ngens() || m.shape() != (self.dim(tp, tq), self.dim(p, q)) {
            return Err(Error::Dimension(format!("action of generator {a} at ({p}, {q})")));
        }
        if !m.is_zero() {
            self.actions.insert((p, q, a), m);
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn ngens(&self) -> usize {
        self.gen_weights.len()
    }

    pub fn gen_weights(&self) -> &[i64] {
        &self.gen_weights
    }

    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Nonzero components in `(p, q)` order.
    pub fn support(&self) -> Vec<((i64, i64), usize)> {
        self.dims.iter().map(|(&k, &n)| (k, n)).collect()
    }

    pub fn d(&self, p: i64, q: i64) -> Matrix {
        self.d.get(&(p, q)).cloned().unwrap_or_else(|| Matrix::zeros(self.field, self.dim(p + 1, q), self.dim(p, q)))
    }

    pub fn action_target(&self, p: i64, q: i64, a: usize) -> (i64, i64) {
        let w = self.gen_weights.get(a).copied().unwrap_or(0);
        (p + self.r * w, q + w)
    }

    pub fn action(&self, p: i64, q: i64, a: usize) -> Matrix {
        let (tp, tq) = self.action_target(p, q, a);
        self.actions.get(&(p, q, a)).cloned().unwrap_or_else(|| Matrix::zeros(self.field, self.dim(tp, tq), self.dim(p, q)))
    }

    /// Every stored differential has bidegree `(1, 0)` and matches the
    /// component sizes; every action has bidegree `(r w_a, w_a)`.
    pub fn degrees_consistent(&self) -> bool {
        self.d.iter().all(|(&(p, q), m)| m.shape() == (self.dim(p + 1, q), self.dim(p, q)))
            && self.actions.iter().all(|(&(p, q, a), m)| {
                let (tp, tq) = self.action_target(p, q, a);
                m.shape() == (self.dim(tp, tq), self.dim(p, q))
            })
    }

    /// `d^2 = 0` and `d a = (-1)^{r w_a} a d` on every component.
    pub fn is_valid(&self) -> bool {
        let f = self.field;
        self.degrees_consistent()
            && self.dims.keys().all(|&(p, q)| {
                self.d(p + 1, q).mul(&self.d(p, q)).is_zero()
                    && (0..self.ngens()).all(|a| {
                        let (tp, tq) = self.action_target(p, q, a);
                        let sign = f.one().signed(self.r * self.gen_weights[a]);
                        self.d(tp, tq).mul(&self.action(p, q, a))
                            == self.action(p + 1, q, a).mul(&self.d(p, q)).scale(&sign)
                    })
            })
    }

    /// Re-indexes to action degree `target`. Applying `regrade(old r)`
    /// afterwards recovers `self` exactly.
    pub fn regrade(&self, target: i64) -> BigradedComplex {
        let k = target - self.r;
        let f = self.field;
        let tw = k * (k - 1) / 2;
        let mv = |(p, q): (i64, i64)| (p + k * q, q);
        let mut out = BigradedComplex {
            field: f,
            r: target,
            gen_weights: self.gen_weights.clone(),
            dims: self.dims.iter().map(|(&pq, &n)| (mv(pq), n)).collect(),
            d: self.d.iter().map(|(&pq, m)| (mv(pq), m.clone())).collect(),
            actions: BTreeMap::new(),
        };
        for (&(p, q, a), m) in &self.actions {
            let w = self.gen_weights[a];
            let m = if sign_bit(w * (k * p + tw * q)) { m.neg() } else { m.clone() };
            let (np, nq) = mv((p, q));
            out.actions.insert((np, nq, a), m);
        }
        out
    }

    /// Homology per `(p, q)` for `p` in `[lo, hi]`.
    pub fn homology(&self, lo: i64, hi: i64) -> HomologyReport {
        let jobs: Vec<(i64, i64)> = self.dims.keys().copied().filter(|&(p, _)| lo <= p && p <= hi).collect();
        let entries = par::map_collect(&jobs, |&(p, q)| HomologyEntry {
            degree: p,
            weight: Some(q),
            dim: self.dim(p, q) - self.d(p, q).rank() - self.d(p - 1, q).rank(),
            edge: false,
        });
        HomologyReport { window: (lo, hi), entries, stabilized: None }
    }

    /// The socle `Hom_{A!}(k, -)` as a bigraded complex without action.
    pub fn socle(&self) -> Result<BigradedComplex> {
        let f = self.field;
        let basis: BTreeMap<(i64, i64), Matrix> = self
            .dims
            .iter()
            .map(|(&(p, q), &n)| {
                let stacked = (0..self.ngens()).fold(Matrix::zeros(f, 0, n), |acc, a| acc.vstack(&self.action(p, q, a)));
                ((p, q), stacked.kernel_basis())
            })
            .collect();
        let mut out = BigradedComplex::new(f, self.r, self.gen_weights.clone())?;
        for (&(p, q), k) in &basis {
            out.set_dim(p, q, k.cols());
        }
        for (&(p, q), k) in &basis {
            if k.cols() == 0 {
                continue;
            }
            if let Some(t) = basis.get(&(p + 1, q)).filter(|t| t.cols() > 0) {
                let image = self.d(p, q).mul(k);
                let m = t.solve_matrix(&image)?.ok_or_else(|| {
                    Error::InconsistentData("the differential does not preserve the socle".into())
                })?;
                out.set_d(p, q, m)?;
            }
        }
        Ok(out)
    }

    /// Total complex with `q` as internal weight; needs `r w_a = 1`.
    pub fn to_module(&self) -> Result<CdgModule> {
        if self.gen_weights.iter().any(|&w| self.r * w != 1) {
            return Err(Error::InconsistentData(format!(
                "generators must raise the cohomological degree by one (r = {})",
                self.r
            )));
        }
        let f = self.field;
        let Some(lo) = self.dims.keys().map(|k| k.0).min() else {
            return Ok(CdgModule::zero(f, self.ngens()));
        };
        let hi = self.dims.keys().map(|k| k.0).max().unwrap_or(lo);
        let offsets = |p: i64| -> Vec<(i64, usize, usize)> {
            let mut off = 0;
            self.dims
                .range((p, i64::MIN)..=(p, i64::MAX))
                .map(|(&(_, q), &n)| {
                    let e = (q, off, n);
                    off += n;
                    e
                })
                .collect()
        };
        let total = |p: i64| -> usize { offsets(p).iter().map(|e| e.2).sum() };
        let place = |p: i64, q: i64| offsets(p).into_iter().find(|e| e.0 == q).map(|e| e.1);
        let mut dims = Vec::new();
        let mut weights = Vec::new();
        let mut ds = Vec::new();
        let mut acts = Vec::new();
        for p in lo..=hi {
            dims.push(total(p));
            weights.push(offsets(p).iter().flat_map(|&(q, _, n)| std::iter::repeat_n(q, n)).collect::<Vec<_>>());
            let mut dm = Matrix::zeros(f, total(p + 1), total(p));
            let mut am = vec![Matrix::zeros(f, total(p + 1), total(p)); self.ngens()];
            for (q, off, _) in offsets(p) {
                if let Some(t) = place(p + 1, q) {
                    dm.set_block(t, off, &self.d(p, q));
                }
                for (a, slot) in am.iter_mut().enumerate() {
                    let (tp, tq) = self.action_target(p, q, a);
                    if let Some(t) = place(tp, tq) {
                        slot.set_block(t, off, &self.action(p, q, a));
                    }
                }
            }
            if p < hi {
                ds.push(dm);
            }
            acts.push(am);
        }
        let complex = crate::complex::Complex::new(f, lo, dims, ds)?.with_weights(weights)?;
        CdgModule::new(complex, acts, self.ngens())
    }

    /// Splits a weighted module (generators of weight one) by weight.
    /// Regrading needs `d_{A!} = 0` and `c = 0`.
    pub fn from_module(m: &CdgModule, cdga: &CdgAlgebra) -> Result<Self> {
        if !cdga.is_trivial() {
            return Err(Error::CurvedInput("regrading needs d = 0 and c = 0 on A!".into()));
        }
        let c = m.complex();
        if !c.has_weights() && !c.is_zero() {
            return Err(Error::MissingWeights("module components carry no weights".into()));
        }
        let f = m.field();
        let mut out = BigradedComplex::new(f, 1, vec![1; m.ngens()])?;
        if c.is_zero() {
            return Ok(out);
        }
        let split = |p: i64| -> BTreeMap<i64, Vec<usize>> {
            let mut by: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
            for (i, &w) in c.weights(p).unwrap_or(&[]).iter().enumerate() {
                by.entry(w).or_default().push(i);
            }
            by
        };
        for p in c.degrees() {
            for (q, idx) in split(p) {
                out.set_dim(p, q, idx.len());
            }
        }
        for p in c.degrees() {
            let (src, tgt) = (split(p), split(p + 1));
            let restrict = |m: &Matrix, q: i64, tq: i64| -> Matrix {
                let rows = tgt.get(&tq).cloned().unwrap_or_default();
                m.select_rows(&rows).select_cols(&src[&q])
            };
            let dp = m.d(p);
            let acts: Vec<Matrix> = (0..m.ngens()).map(|a| m.action(p, a)).collect();
            for (&q, idx) in &src {
                // Anything leaving the expected weight is an error.
                let stray = |mat: &Matrix, tq: i64| {
                    tgt.iter().filter(|(&w, _)| w != tq).any(|(_, rows)| !mat.select_rows(rows).select_cols(idx).is_zero())
                };
                if stray(&dp, q) || acts.iter().any(|a| stray(a, q + 1)) {
                    return Err(Error::InconsistentData(format!("degree {p} weight {q} is not homogeneous")));
                }
                out.set_d(p, q, restrict(&dp, q, q))?;
                for (a, am) in acts.iter().enumerate() {
                    out.set_action(p, q, a, restrict(am, q, q + 1))?;
                }
            }
        }
        Ok(out)
    }

    /// `G(M)` for `M` with zero `U`-action: the block `Hom(A!_r, M^{p+r})`
    /// sits at `q = -r`, so generators have bidegree `(1, 1)`.
    pub fn from_g(g: &GModule, cdga: &CdgAlgebra) -> Result<Self> {
        if !cdga.is_trivial() {
            return Err(Error::CurvedInput("regrading needs d = 0 and c = 0 on A!".into()));
        }
        let gm = &g.module;
        let f = gm.field();
        let mut out = BigradedComplex::new(f, 1, vec![1; gm.ngens()])?;
        if gm.complex().is_zero() {
            return Ok(out);
        }
        let size = |r: usize, n: usize| cdga.dim(r) * n;
        for p in gm.complex().degrees() {
            for &(r, _, n) in g.blocks(p) {
                out.set_dim(p, -(r as i64), size(r, n));
            }
        }
        for p in gm.complex().degrees() {
            for &(r, off, n) in g.blocks(p) {
                let q = -(r as i64);
                let cols: Vec<usize> = (off..off + size(r, n)).collect();
                let pick = |mat: &Matrix, tr: usize| -> Option<Matrix> {
                    g.blocks(p + 1)
                        .iter()
                        .find(|b| b.0 == tr)
                        .map(|&(_, toff, tn)| mat.select_rows(&(toff..toff + size(tr, tn)).collect::<Vec<_>>()).select_cols(&cols))
                };
                let dp = gm.d(p);
                // Off-block entries of d mean the U-action was nonzero.
                for &(tr, toff, tn) in g.blocks(p + 1) {
                    let blk = dp.select_rows(&(toff..toff + size(tr, tn)).collect::<Vec<_>>()).select_cols(&cols);
                    if tr != r && !blk.is_zero() {
                        return Err(Error::InconsistentData("the U-action mixes A! degrees".into()));
                    }
                }
                if let Some(m) = pick(&dp, r) {
                    out.set_d(p, q, m)?;
                }
                if r > 0 {
                    for a in 0..gm.ngens() {
                        if let Some(m) = pick(&gm.action(p, a), r - 1) {
                            out.set_action(p, q, a, m)?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A random complex of vector spaces with `d^2 = 0` and zero `U`-action.
pub fn random_plain_complex(
    field: Field,
    ngens: usize,
    start: i64,
    len: usize,
    max_dim: usize,
    rng: &mut impl Rng,
) -> Result<crate::dgmod::UComplex> {
    let dims: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=max_dim)).collect();
    let mut d: Vec<Matrix> = Vec::new();
    for p in 0..len.saturating_sub(1) {
        let m = match d.last() {
            // Rows killing the previous image keep d^2 = 0.
            Some(prev) => {
                let q = prev.transpose().kernel_basis().transpose();
                random::matrix(field, dims[p + 1], q.rows(), rng).mul(&q)
            }
            None => random::matrix(field, dims[p + 1], dims[p], rng),
        };
        d.push(m);
    }
    let modules = dims.iter().map(|&n| crate::dgmod::UModule::new(field, n, vec![Matrix::zeros(field, n, n); ngens])).collect::<Result<Vec<_>>>()?;
    crate::dgmod::UComplex::new(start, modules, d, ngens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::deformation::DeformationData;
    use crate::functors::apply_g;

    fn g_bigraded(seed: u64) -> (BigradedComplex, CdgAlgebra) {
        let f = Field::prime(5).unwrap();
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(6).unwrap();
        let mut r = random::rng(seed);
        let m = random_plain_complex(f, 2, -1, 3, 2, &mut r).unwrap();
        let g = apply_g(&m, &cdga, 0, -4).unwrap();
        (BigradedComplex::from_g(&g, &cdga).unwrap(), cdga)
    }

    #[test]
    fn round_trip_is_exact() {
        for seed in 0..6 {
            let (x, _) = g_bigraded(seed);
            assert!(x.is_valid());
            for r in [-1, 0, 1, 2] {
                let y = x.regrade(r);
                assert!(y.degrees_consistent() && y.is_valid(), "r = {r}");
                assert_eq!(y.regrade(1), x);
            }
        }
    }

    #[test]
    fn r_one_is_identity_and_module_round_trip() {
        let (x, cdga) = g_bigraded(3);
        assert_eq!(x.regrade(1), x);
        let m = x.to_module().unwrap();
        assert!(m.validate(&cdga).is_ok());
        assert_eq!(BigradedComplex::from_module(&m, &cdga).unwrap(), x);
    }

    #[test]
    fn r_two_shifts_by_weight() {
        let (x, _) = g_bigraded(4);
        let y = x.regrade(2);
        for ((p, q), n) in x.support() {
            assert_eq!(y.dim(p + q, q), n);
        }
    }

    #[test]
    fn unweighted_module_is_rejected() {
        let f = Field::Rational;
        let cdga = DeformationData::trivial(catalog::symmetric(f, 2)).build_cdga(4).unwrap();
        let c = crate::complex::Complex::new(f, 0, vec![1, 1], vec![Matrix::zeros(f, 1, 1)]).unwrap();
        let m = CdgModule::new(c, vec![vec![Matrix::identity(f, 1); 2], vec![Matrix::zeros(f, 0, 1); 2]], 2).unwrap();
        assert!(matches!(BigradedComplex::from_module(&m, &cdga), Err(Error::MissingWeights(_))));
        let curved = catalog::two_point(f, f.int(1), f.int(2)).build_cdga(4).unwrap();
        assert!(matches!(BigradedComplex::from_module(&m, &curved), Err(Error::CurvedInput(_))));
    }
}
