//! Bounded cochain complexes of finite-dimensional vector spaces, chain maps,
//! cones, windowed homology and exact homotopy search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::par;

/// `C^start -> C^{start+1} -> ...` with `d^p: C^p -> C^{p+1}`.
///
/// Optional integer weights on basis vectors give an internal grading that
/// every map is expected to preserve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    field: Field,
    start: i64,
    dims: Vec<usize>,
    d: Vec<Matrix>,
    weights: Option<Vec<Vec<i64>>>,
    reliable: Option<(i64, i64)>,
}

impl Complex {
    /// `d[k]` maps degree `start + k` to `start + k + 1`; missing maps are zero.
    pub fn new(field: Field, start: i64, dims: Vec<usize>, mut d: Vec<Matrix>) -> Result<Self> {
        let len = dims.len();
        if d.len() > len {
            return Err(Error::Dimension(format!("{} differentials for {len} components", d.len())));
        }
        for k in d.len()..len.saturating_sub(1) {
            d.push(Matrix::zeros(field, dims[k + 1], dims[k]));
        }
        d.truncate(len.saturating_sub(1));
        for (k, m) in d.iter().enumerate() {
            if m.shape() != (dims[k + 1], dims[k]) || m.field() != field {
                return Err(Error::Dimension(format!(
                    "differential in degree {} is {:?}, expected {:?}",
                    start + k as i64,
                    m.shape(),
                    (dims[k + 1], dims[k])
                )));
            }
        }
        Ok(Complex { field, start, dims, d, weights: None, reliable: None })
    }

    pub fn zero(field: Field) -> Self {
        Complex { field, start: 0, dims: vec![], d: vec![], weights: None, reliable: None }
    }

    /// A single space in degree `p`.
    pub fn concentrated(field: Field, p: i64, dim: usize) -> Self {
        Complex::new(field, p, vec![dim], vec![]).expect("single component")
    }

    pub fn with_weights(mut self, weights: Vec<Vec<i64>>) -> Result<Self> {
        if weights.len() != self.dims.len() || weights.iter().zip(&self.dims).any(|(w, &n)| w.len() != n) {
            return Err(Error::Dimension("weights do not match component dimensions".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Degrees outside this range are reported as edge-unreliable.
    pub fn with_reliable(mut self, lo: i64, hi: i64) -> Self {
        self.reliable = Some((lo, hi));
        self
    }

    pub fn reliable(&self) -> Option<(i64, i64)> {
        self.reliable
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last degree with a stored component (`start - 1` when empty).
    pub fn end(&self) -> i64 {
        self.start + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.end()
    }

    fn slot(&self, p: i64) -> Option<usize> {
        if p < self.start || p > self.end() {
            None
        } else {
            Some((p - self.start) as usize)
        }
    }

    pub fn dim(&self, p: i64) -> usize {
        self.slot(p).map_or(0, |k| self.dims[k])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// `d^p`, with zero matrices outside the support.
    pub fn d(&self, p: i64) -> Matrix {
        match self.slot(p) {
            Some(k) if k < self.d.len() => self.d[k].clone(),
            _ => Matrix::zeros(self.field, self.dim(p + 1), self.dim(p)),
        }
    }

    pub fn weights(&self, p: i64) -> Option<&[i64]> {
        let k = self.slot(p)?;
        self.weights.as_ref().map(|w| w[k].as_slice())
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    pub fn d_squared_zero(&self) -> bool {
        self.degrees().all(|p| self.d(p + 1).mul(&self.d(p)).is_zero())
    }

    /// `C[k]^p = C^{p+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> Complex {
        let sign = self.field.int(-1).signed(k + 1);
        let mut out = self.clone();
        out.start -= k;
        out.d = self.d.iter().map(|m| m.scale(&sign)).collect();
        out.reliable = self.reliable.map(|(a, b)| (a - k, b - k));
        out
    }

    /// Homology dimension in degree `p` (or of weight `w` there).
    pub fn homology_dim(&self, p: i64, weight: Option<i64>) -> usize {
        let sel = |q: i64| -> Vec<usize> {
            match (weight, self.weights(q)) {
                (Some(w), Some(ws)) => (0..ws.len()).filter(|&i| ws[i] == w).collect(),
                _ => (0..self.dim(q)).collect(),
            }
        };
        let (here, next, prev) = (sel(p), sel(p + 1), sel(p - 1));
        let out = self.d(p).select_rows(&next).select_cols(&here);
        let inc = self.d(p - 1).select_rows(&here).select_cols(&prev);
        here.len() - out.rank() - inc.rank()
    }

    /// Homology over `[lo, hi]`, per weight when weights are present.
    pub fn homology(&self, lo: i64, hi: i64) -> HomologyReport {
        let jobs: Vec<(i64, Option<i64>)> = (lo..=hi)
            .flat_map(|p| {
                let ws: Vec<Option<i64>> = match self.weights(p) {
                    Some(ws) => {
                        let mut v: Vec<i64> = ws.to_vec();
                        v.sort_unstable();
                        v.dedup();
                        v.into_iter().map(Some).collect()
                    }
                    None => vec![None],
                };
                ws.into_iter().map(move |w| (p, w))
            })
            .collect();
        let entries = par::map_collect(&jobs, |&(p, w)| HomologyEntry {
            degree: p,
            weight: w,
            dim: self.homology_dim(p, w),
            edge: self.reliable.is_some_and(|(a, b)| p < a || p > b),
        });
        HomologyReport { window: (lo, hi), entries, stabilized: None }
    }

    /// Homology over the whole support.
    pub fn full_homology(&self) -> HomologyReport {
        self.homology(self.start, self.end())
    }

    /// `(sigma^{>p}, sigma^{<=p})`: the subcomplex in degrees `> p` and the quotient in degrees `<= p`.
    pub fn sigma_truncate(&self, p: i64) -> (Complex, Complex) {
        let keep = |lo: i64, hi: i64| -> Complex {
            let lo = lo.max(self.start);
            let hi = hi.min(self.end());
            if lo > hi {
                return Complex::zero(self.field);
            }
            let dims = (lo..=hi).map(|q| self.dim(q)).collect();
            let d = (lo..hi).map(|q| self.d(q)).collect();
            let mut c = Complex::new(self.field, lo, dims, d).expect("shapes from a valid complex");
            if let Some(w) = &self.weights {
                c.weights = Some((lo..=hi).map(|q| w[(q - self.start) as usize].clone()).collect());
            }
            c.reliable = self.reliable;
            c
        };
        (keep(p + 1, i64::MAX), keep(i64::MIN, p))
    }
}

/// A degree-preserving family of linear maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainMap {
    maps: BTreeMap<i64, Matrix>,
}

impl ChainMap {
    pub fn new() -> Self {
        ChainMap::default()
    }

    pub fn from_maps(maps: BTreeMap<i64, Matrix>) -> Self {
        ChainMap { maps }
    }

    pub fn insert(&mut self, p: i64, m: Matrix) {
        self.maps.insert(p, m);
    }

    /// Component in degree `p`, zero if absent.
    pub fn at(&self, p: i64, src: &Complex, tgt: &Complex) -> Matrix {
        self.maps.get(&p).cloned().unwrap_or_else(|| Matrix::zeros(src.field(), tgt.dim(p), src.dim(p)))
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap { maps: c.degrees().map(|p| (p, Matrix::identity(c.field(), c.dim(p)))).collect() }
    }

    pub fn zero() -> ChainMap {
        ChainMap::default()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.maps.keys().copied()
    }

    /// Checks shapes and `d f = f d` on every degree of either complex.
    pub fn is_chain_map(&self, src: &Complex, tgt: &Complex) -> bool {
        let lo = src.start().min(tgt.start()) - 1;
        let hi = src.end().max(tgt.end()) + 1;
        for (&p, m) in &self.maps {
            if m.shape() != (tgt.dim(p), src.dim(p)) {
                return false;
            }
        }
        (lo..=hi).all(|p| tgt.d(p).mul(&self.at(p, src, tgt)) == self.at(p + 1, src, tgt).mul(&src.d(p)))
    }

    /// `self ∘ other`, for `other: a -> b` and `self: b -> c`.
    pub fn compose(&self, other: &ChainMap, a: &Complex, b: &Complex, c: &Complex) -> ChainMap {
        let lo = a.start().min(c.start());
        let hi = a.end().max(c.end());
        ChainMap { maps: (lo..=hi).map(|p| (p, self.at(p, b, c).mul(&other.at(p, a, b)))).collect() }
    }

    pub fn sub(&self, other: &ChainMap, src: &Complex, tgt: &Complex) -> ChainMap {
        let lo = src.start().min(tgt.start());
        let hi = src.end().max(tgt.end());
        ChainMap {
            maps: (lo..=hi).map(|p| (p, self.at(p, src, tgt).sub(&other.at(p, src, tgt)))).collect(),
        }
    }
}

/// `C(f)^p = src^{p+1} (+) tgt^p`, `d(x, y) = (-d x, f x + d y)`.
pub fn cone(f: &ChainMap, src: &Complex, tgt: &Complex) -> Complex {
    let field = src.field();
    let lo = (src.start() - 1).min(tgt.start());
    let hi = (src.end() - 1).max(tgt.end());
    if src.is_zero() && tgt.is_zero() {
        return Complex::zero(field);
    }
    let dims: Vec<usize> = (lo..=hi).map(|p| src.dim(p + 1) + tgt.dim(p)).collect();
    let d = (lo..hi)
        .map(|p| {
            let (a, b) = (src.dim(p + 1), tgt.dim(p));
            let (a2, b2) = (src.dim(p + 2), tgt.dim(p + 1));
            let mut m = Matrix::zeros(field, a2 + b2, a + b);
            m.set_block(0, 0, &src.d(p + 1).neg());
            m.set_block(a2, 0, &f.at(p + 1, src, tgt));
            m.set_block(a2, a, &tgt.d(p));
            m
        })
        .collect();
    let mut c = Complex::new(field, lo, dims, d).expect("cone shapes");
    if let (true, true) = (src.has_weights(), tgt.has_weights()) {
        let w = (lo..=hi)
            .map(|p| {
                let mut v = src.weights(p + 1).map(<[i64]>::to_vec).unwrap_or_default();
                v.extend(tgt.weights(p).map(<[i64]>::to_vec).unwrap_or_default());
                v
            })
            .collect();
        c = c.with_weights(w).expect("cone weights");
    }
    match (src.reliable(), tgt.reliable()) {
        (Some((a, b)), Some((x, y))) => c.with_reliable((a - 1).max(x), (b - 1).min(y)),
        (Some((a, b)), None) => c.with_reliable(a - 1, b - 1),
        (None, Some(r)) => c.with_reliable(r.0, r.1),
        (None, None) => c,
    }
}

/// Inclusion `tgt -> C(f)` and projection `C(f) -> src[1]`.
pub fn cone_maps(src: &Complex, tgt: &Complex, cone: &Complex) -> (ChainMap, ChainMap) {
    let field = src.field();
    let mut inc = ChainMap::new();
    let mut proj = ChainMap::new();
    for p in cone.degrees() {
        let (a, b) = (src.dim(p + 1), tgt.dim(p));
        let mut i = Matrix::zeros(field, a + b, b);
        i.set_block(a, 0, &Matrix::identity(field, b));
        inc.insert(p, i);
        let mut q = Matrix::zeros(field, a, a + b);
        q.set_block(0, 0, &Matrix::identity(field, a));
        proj.insert(p, q);
    }
    (inc, proj)
}

/// A pair of module actions that a homotopy must intertwine:
/// `s^{p+shift} ∘ src_act^p = tgt_act^{p-1} ∘ s^p` for every `p`.
pub struct Linearity<'a> {
    pub shift: i64,
    pub src: &'a dyn Fn(i64) -> Matrix,
    pub tgt: &'a dyn Fn(i64) -> Matrix,
}

/// Degree `-1` maps `s^p: src^p -> tgt^{p-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub maps: BTreeMap<i64, Matrix>,
}

impl Homotopy {
    pub fn at(&self, p: i64, src: &Complex, tgt: &Complex) -> Matrix {
        self.maps.get(&p).cloned().unwrap_or_else(|| Matrix::zeros(src.field(), tgt.dim(p - 1), src.dim(p)))
    }

    /// `f^n - g^n = (-1)^n d s^n + (-1)^{n+1} s^{n+1} d`.
    pub fn certifies(&self, f: &ChainMap, g: &ChainMap, src: &Complex, tgt: &Complex) -> bool {
        let lo = src.start().min(tgt.start()) - 1;
        let hi = src.end().max(tgt.end()) + 1;
        (lo..=hi).all(|n| {
            let lhs = f.at(n, src, tgt).sub(&g.at(n, src, tgt));
            let sign = src.field().one().signed(n);
            let a = tgt.d(n - 1).mul(&self.at(n, src, tgt)).scale(&sign);
            let b = self.at(n + 1, src, tgt).mul(&src.d(n)).scale(&sign.neg());
            lhs == a.add(&b)
        })
    }
}

/// Solves for a homotopy from `f` to `g` by one exact linear system over
/// all degrees, including the linearity constraints. With weights on both
/// complexes only weight-preserving entries are used, which loses nothing
/// because the weight-zero part of any homotopy is again a homotopy.
pub fn nullhomotopy(
    f: &ChainMap,
    g: &ChainMap,
    src: &Complex,
    tgt: &Complex,
    linear: &[Linearity<'_>],
) -> Option<Homotopy> {
    let field = src.field();
    let lo = src.start().min(tgt.start() + 1);
    let hi = src.end().max(tgt.end() + 1);
    // Unknown entries of s^p.
    let mut var: BTreeMap<(i64, usize, usize), usize> = BTreeMap::new();
    for p in lo..=hi {
        let (rows, cols) = (tgt.dim(p - 1), src.dim(p));
        for i in 0..rows {
            for j in 0..cols {
                let ok = match (tgt.weights(p - 1), src.weights(p)) {
                    (Some(a), Some(b)) => a[i] == b[j],
                    _ => true,
                };
                if ok {
                    let k = var.len();
                    var.insert((p, i, j), k);
                }
            }
        }
    }
    let nvar = var.len();
    let mut rows: Vec<Vec<(usize, Scalar)>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    // Identity in each degree n.
    for n in lo - 1..=hi {
        let diff = f.at(n, src, tgt).sub(&g.at(n, src, tgt));
        let sign = field.one().signed(n);
        let dt = tgt.d(n - 1);
        let ds = src.d(n);
        for i in 0..tgt.dim(n) {
            for j in 0..src.dim(n) {
                let mut row = Vec::new();
                // (d s^n)_{ij} = sum_k dt[i][k] s^n[k][j]
                for k in 0..tgt.dim(n - 1) {
                    if !dt.is_entry_zero(i, k) {
                        if let Some(&v) = var.get(&(n, k, j)) {
                            row.push((v, dt.get(i, k).mul(&sign)));
                        }
                    }
                }
                // (s^{n+1} d)_{ij} = sum_k s^{n+1}[i][k] ds[k][j]
                for k in 0..src.dim(n + 1) {
                    if !ds.is_entry_zero(k, j) {
                        if let Some(&v) = var.get(&(n + 1, i, k)) {
                            row.push((v, ds.get(k, j).mul(&sign).neg()));
                        }
                    }
                }
                let r = diff.get(i, j);
                if row.is_empty() && r.is_zero() {
                    continue;
                }
                if row.is_empty() {
                    return None;
                }
                rows.push(row);
                rhs.push(r);
            }
        }
    }
    for lin in linear {
        for p in lo..=hi {
            let a = (lin.src)(p);
            let b = (lin.tgt)(p - 1);
            let q = p + lin.shift;
            for i in 0..tgt.dim(q - 1) {
                for j in 0..src.dim(p) {
                    let mut row = Vec::new();
                    for k in 0..src.dim(q) {
                        if !a.is_entry_zero(k, j) {
                            if let Some(&v) = var.get(&(q, i, k)) {
                                row.push((v, a.get(k, j)));
                            }
                        }
                    }
                    for k in 0..tgt.dim(p - 1) {
                        if !b.is_entry_zero(i, k) {
                            if let Some(&v) = var.get(&(p, k, j)) {
                                row.push((v, b.get(i, k).neg()));
                            }
                        }
                    }
                    if !row.is_empty() {
                        rows.push(row);
                        rhs.push(field.zero());
                    }
                }
            }
        }
    }
    let mut system = Matrix::zeros(field, rows.len(), nvar);
    for (r, row) in rows.iter().enumerate() {
        for (v, x) in row {
            system.add_at(r, *v, x);
        }
    }
    let sol = system.solve(&rhs).expect("shapes agree")?;
    let mut maps = BTreeMap::new();
    for p in lo..=hi {
        let mut m = Matrix::zeros(field, tgt.dim(p - 1), src.dim(p));
        for i in 0..tgt.dim(p - 1) {
            for j in 0..src.dim(p) {
                if let Some(&v) = var.get(&(p, i, j)) {
                    if !sol[v].is_zero() {
                        m.set(i, j, sol[v].clone());
                    }
                }
            }
        }
        maps.insert(p, m);
    }
    Some(Homotopy { maps })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyEntry {
    pub degree: i64,
    pub weight: Option<i64>,
    pub dim: usize,
    pub edge: bool,
}

/// Windowed homology with edge flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub window: (i64, i64),
    pub entries: Vec<HomologyEntry>,
    pub stabilized: Option<bool>,
}

impl HomologyReport {
    /// Total dimension per degree over the window.
    pub fn dims(&self) -> Vec<usize> {
        (self.window.0..=self.window.1).map(|p| self.dim(p)).collect()
    }

    pub fn dim(&self, p: i64) -> usize {
        self.entries.iter().filter(|e| e.degree == p).map(|e| e.dim).sum()
    }

    /// Zero homology at every degree not flagged as edge.
    pub fn acyclic_interior(&self) -> bool {
        self.entries.iter().all(|e| e.edge || e.dim == 0)
    }

    pub fn nonzero(&self) -> Vec<(i64, Option<i64>, usize)> {
        self.entries.iter().filter(|e| e.dim > 0).map(|e| (e.degree, e.weight, e.dim)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn identity_two_term_complex_is_acyclic() {
        let c = Complex::new(q(), 0, vec![2, 2], vec![Matrix::identity(q(), 2)]).unwrap();
        assert!(c.d_squared_zero());
        assert!(c.full_homology().acyclic_interior());
    }

    #[test]
    fn zero_differentials_give_component_dims() {
        let c = Complex::new(q(), -1, vec![1, 3, 2], vec![]).unwrap();
        assert_eq!(c.full_homology().dims(), vec![1, 3, 2]);
    }

    #[test]
    fn cone_of_identity_and_zero() {
        let m = Complex::concentrated(q(), 0, 2);
        let id = ChainMap::identity(&m);
        let c = cone(&id, &m, &m);
        assert!(c.d_squared_zero());
        assert!(c.full_homology().acyclic_interior());
        let (inc, proj) = cone_maps(&m, &m, &c);
        assert!(inc.is_chain_map(&m, &c));
        assert!(proj.is_chain_map(&c, &m.shift(1)));

        let c0 = cone(&ChainMap::zero(), &m, &m);
        assert_eq!(c0.full_homology().dims(), vec![2, 2]);

        // The cone of an isomorphism is contractible.
        let cid = ChainMap::identity(&c);
        let s = nullhomotopy(&cid, &ChainMap::zero(), &c, &c, &[]).unwrap();
        assert!(s.certifies(&cid, &ChainMap::zero(), &c, &c));
    }

    #[test]
    fn homotopy_absent_for_nonzero_homology() {
        let m = Complex::concentrated(q(), 0, 1);
        let id = ChainMap::identity(&m);
        assert!(nullhomotopy(&id, &ChainMap::zero(), &m, &m, &[]).is_none());
        let s = nullhomotopy(&id, &id, &m, &m, &[]).unwrap();
        assert!(s.maps.values().all(|x| x.is_zero()));
    }

    #[test]
    fn sigma_truncation_splits_components() {
        let c = Complex::new(q(), 0, vec![1, 1, 1], vec![]).unwrap();
        let (hi, lo) = c.sigma_truncate(0);
        assert_eq!((lo.total_dim(), hi.total_dim()), (1, 2));
        let (hi, lo) = c.sigma_truncate(5);
        assert_eq!((lo.total_dim(), hi.total_dim()), (3, 0));
        let (hi, lo) = c.sigma_truncate(-5);
        assert_eq!((lo.total_dim(), hi.total_dim()), (0, 3));
    }
}
