//! Complexes of U-modules and curved dg-modules over `(A!, d, c)`.

use crate::algebra::FilteredAlgebra;
use crate::complex::{self, ChainMap, Complex, Homotopy, HomologyReport, Linearity};
use crate::deformation::{CdgAlgebra, DeformationData};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

/// Outcome of a structural check: the first violated invariant, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub violation: Option<String>,
}

impl Validation {
    pub fn ok() -> Self {
        Validation { violation: None }
    }

    pub fn fail(msg: impl Into<String>) -> Self {
        Validation { violation: Some(msg.into()) }
    }

    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// A finite-dimensional left U-module given by generator actions `X_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UModule {
    field: Field,
    dim: usize,
    actions: Vec<Matrix>,
    weights: Option<Vec<i64>>,
}

impl UModule {
    pub fn new(field: Field, dim: usize, actions: Vec<Matrix>) -> Result<Self> {
        if actions.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::Dimension(format!("actions must be {dim}x{dim}")));
        }
        Ok(UModule { field, dim, actions, weights: None })
    }

    /// The module `k` with every generator acting by zero.
    pub fn trivial(field: Field, ngens: usize) -> Self {
        UModule { field, dim: 1, actions: vec![Matrix::zeros(field, 1, 1); ngens], weights: None }
    }

    /// One-dimensional module with `x_a` acting by `values[a]`.
    pub fn character(field: Field, values: &[Scalar]) -> Self {
        let actions = values.iter().map(|v| Matrix::from_rows(field, 1, &[vec![v.clone()]]).unwrap()).collect();
        UModule { field, dim: 1, actions, weights: None }
    }

    pub fn zero(field: Field, ngens: usize) -> Self {
        UModule { field, dim: 0, actions: vec![Matrix::zeros(field, 0, 0); ngens], weights: None }
    }

    pub fn with_weights(mut self, w: Vec<i64>) -> Result<Self> {
        if w.len() != self.dim {
            return Err(Error::Dimension("one weight per basis vector".into()));
        }
        self.weights = Some(w);
        Ok(self)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ngens(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, g: usize) -> &Matrix {
        &self.actions[g]
    }

    pub fn weights(&self) -> Option<&[i64]> {
        self.weights.as_deref()
    }

    /// Action of the word `w_1 ... w_k`, i.e. `X_{w_1} ... X_{w_k}`.
    pub fn word_action(&self, w: &[usize]) -> Matrix {
        let mut m = Matrix::identity(self.field, self.dim);
        for &g in w.iter().rev() {
            m = self.actions[g].mul(&m);
        }
        m
    }

    /// Action of an element of `U` given in the coordinates of `u`.
    pub fn element_action(&self, u: &FilteredAlgebra, v: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.dim, self.dim);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.word_action(&u.words()[i]).scale(c));
            }
        }
        m
    }

    /// Every element of `P` acts by zero.
    pub fn validate(&self, data: &DeformationData) -> Validation {
        if self.ngens() != data.ngens() {
            return Validation::fail("generator count differs from the algebra");
        }
        for (i, r) in data.engine_relations().iter().enumerate() {
            let n = self.ngens();
            let mut acc = Matrix::identity(self.field, self.dim).scale(&r.constant);
            for a in 0..n {
                acc = acc.add(&self.actions[a].scale(&r.lin[a]));
                for b in 0..n {
                    let q = &r.quad[a * n + b];
                    if !q.is_zero() {
                        acc = acc.add(&self.actions[a].mul(&self.actions[b]).scale(q));
                    }
                }
            }
            if !acc.is_zero() {
                return Validation::fail(format!("relation {i} does not act by zero"));
            }
        }
        Validation::ok()
    }
}

/// A bounded complex of finite-dimensional U-modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UComplex {
    complex: Complex,
    // actions[k][g] on the component of degree start + k
    actions: Vec<Vec<Matrix>>,
    ngens: usize,
}

impl UComplex {
    /// Modules `M^start, M^{start+1}, ...` and the differentials between them.
    pub fn new(start: i64, modules: Vec<UModule>, d: Vec<Matrix>, ngens: usize) -> Result<Self> {
        let field = modules.first().map_or(Field::Rational, |m| m.field);
        let field = d.first().map_or(field, |m| m.field());
        if modules.iter().any(|m| m.ngens() != ngens) {
            return Err(Error::Dimension("modules disagree on the number of generators".into()));
        }
        let dims = modules.iter().map(|m| m.dim).collect();
        let mut complex = Complex::new(field, start, dims, d)?;
        if modules.iter().all(|m| m.weights.is_some()) && !modules.is_empty() {
            complex = complex.with_weights(modules.iter().map(|m| m.weights.clone().unwrap()).collect())?;
        }
        let actions = modules.into_iter().map(|m| m.actions).collect();
        Ok(UComplex { complex, actions, ngens })
    }

    pub fn from_module(p: i64, m: UModule) -> Self {
        let ngens = m.ngens();
        UComplex::new(p, vec![m], vec![], ngens).expect("single module")
    }

    pub fn zero(field: Field, ngens: usize) -> Self {
        UComplex { complex: Complex::zero(field), actions: vec![], ngens }
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn start(&self) -> i64 {
        self.complex.start()
    }

    pub fn end(&self) -> i64 {
        self.complex.end()
    }

    pub fn dim(&self, p: i64) -> usize {
        self.complex.dim(p)
    }

    pub fn d(&self, p: i64) -> Matrix {
        self.complex.d(p)
    }

    pub fn action(&self, p: i64, g: usize) -> Matrix {
        if p < self.start() || p > self.end() {
            return Matrix::zeros(self.field(), 0, 0);
        }
        self.actions[(p - self.start()) as usize][g].clone()
    }

    pub fn module(&self, p: i64) -> UModule {
        let actions = (0..self.ngens).map(|g| self.action(p, g)).collect();
        UModule {
            field: self.field(),
            dim: self.dim(p),
            actions,
            weights: self.complex.weights(p).map(<[i64]>::to_vec),
        }
    }

    pub fn validate(&self, data: &DeformationData) -> Validation {
        for p in self.complex.degrees() {
            let v = self.module(p).validate(data);
            if !v.is_ok() {
                return Validation::fail(format!("degree {p}: {}", v.violation.unwrap()));
            }
        }
        if !self.complex.d_squared_zero() {
            return Validation::fail("d^2 != 0");
        }
        for p in self.complex.degrees() {
            for g in 0..self.ngens {
                if self.d(p).mul(&self.action(p, g)) != self.action(p + 1, g).mul(&self.d(p)) {
                    return Validation::fail(format!("d^{p} is not U-linear for generator {g}"));
                }
            }
        }
        Validation::ok()
    }

    pub fn homology(&self, lo: i64, hi: i64) -> HomologyReport {
        self.complex.homology(lo, hi)
    }

    /// Checks `f` commutes with differentials and the U-action.
    pub fn is_morphism(&self, f: &ChainMap, tgt: &UComplex) -> bool {
        f.is_chain_map(&self.complex, &tgt.complex)
            && self.complex.degrees().all(|p| {
                (0..self.ngens).all(|g| {
                    let fp = f.at(p, &self.complex, &tgt.complex);
                    fp.mul(&self.action(p, g)) == tgt.action(p, g).mul(&fp)
                })
            })
    }

    pub fn cone(f: &ChainMap, src: &UComplex, tgt: &UComplex) -> UComplex {
        let c = complex::cone(f, &src.complex, &tgt.complex);
        let actions = c
            .degrees()
            .map(|p| (0..src.ngens).map(|g| src.action_or_zero(p + 1, g).direct_sum(&tgt.action_or_zero(p, g))).collect())
            .collect();
        UComplex { complex: c, actions, ngens: src.ngens }
    }

    fn action_or_zero(&self, p: i64, g: usize) -> Matrix {
        if self.dim(p) == 0 {
            Matrix::zeros(self.field(), 0, 0)
        } else {
            self.action(p, g)
        }
    }

    /// U-linear homotopy between `f` and `g`, if one exists.
    pub fn nullhomotopy(f: &ChainMap, g: &ChainMap, src: &UComplex, tgt: &UComplex) -> Option<Homotopy> {
        let srcs: Vec<Box<dyn Fn(i64) -> Matrix + '_>> =
            (0..src.ngens).map(|a| Box::new(move |p| src.action_or_zero(p, a)) as Box<dyn Fn(i64) -> Matrix>).collect();
        let tgts: Vec<Box<dyn Fn(i64) -> Matrix + '_>> =
            (0..src.ngens).map(|a| Box::new(move |p| tgt.action_or_zero(p, a)) as Box<dyn Fn(i64) -> Matrix>).collect();
        let lin: Vec<Linearity<'_>> = (0..src.ngens)
            .map(|a| Linearity { shift: 0, src: srcs[a].as_ref(), tgt: tgts[a].as_ref() })
            .collect();
        complex::nullhomotopy(f, g, &src.complex, &tgt.complex, &lin)
    }

    pub fn sigma_truncate(&self, p: i64) -> (UComplex, UComplex) {
        let (hi, lo) = self.complex.sigma_truncate(p);
        let pick = |c: Complex| {
            let actions = c.degrees().map(|q| (0..self.ngens).map(|g| self.action(q, g)).collect()).collect();
            UComplex { complex: c, actions, ngens: self.ngens }
        };
        (pick(hi), pick(lo))
    }
}

/// A graded `A!`-module with a degree-one anti-derivation `d`, `d^2 = c ·`.
///
/// The action of `x^_a` is stored as maps `N^p -> N^{p+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgModule {
    complex: Complex,
    actions: Vec<Vec<Matrix>>,
    ngens: usize,
}

impl CdgModule {
    /// `actions[k][a]` maps degree `start + k` to `start + k + 1`.
    pub fn new(complex: Complex, actions: Vec<Vec<Matrix>>, ngens: usize) -> Result<Self> {
        let len = complex.degrees().count();
        if actions.len() != len {
            return Err(Error::Dimension("one action list per component".into()));
        }
        for (k, acts) in actions.iter().enumerate() {
            let p = complex.start() + k as i64;
            if acts.len() != ngens || acts.iter().any(|m| m.shape() != (complex.dim(p + 1), complex.dim(p))) {
                return Err(Error::Dimension(format!("actions in degree {p} have the wrong shape")));
            }
        }
        Ok(CdgModule { complex, actions, ngens })
    }

    pub fn zero(field: Field, ngens: usize) -> Self {
        CdgModule { complex: Complex::zero(field), actions: vec![], ngens }
    }

    /// `k` in degree 0.
    pub fn trivial(field: Field, ngens: usize) -> Self {
        CdgModule {
            complex: Complex::concentrated(field, 0, 1),
            actions: vec![vec![Matrix::zeros(field, 0, 1); ngens]],
            ngens,
        }
    }

    /// `A!` itself in degrees `0..=top`, acting on the left; needs `c = 0`
    /// for `d_{A!}` to satisfy the curvature law.
    pub fn free(cdga: &CdgAlgebra, top: usize) -> Result<Self> {
        if !cdga.is_flat() {
            return Err(Error::CurvedInput("A! is not a cdg module over itself when c != 0".into()));
        }
        let f = cdga.field();
        let top = top.min(cdga.bound());
        let dims: Vec<usize> = (0..=top).map(|k| cdga.dim(k)).collect();
        let d = (0..top).map(|k| cdga.d(k)).collect();
        let mut complex = Complex::new(f, 0, dims, d)?;
        let weights = (0..=top)
            .map(|k| (0..cdga.dim(k)).map(|i| cdga.dual().basis_weight(k, i) as i64).collect())
            .collect();
        complex = complex.with_weights(weights)?;
        let actions = (0..=top)
            .map(|k| {
                (0..cdga.ngens())
                    .map(|g| {
                        if k < top {
                            cdga.left_gen(k, g)
                        } else {
                            Ok(Matrix::zeros(f, 0, cdga.dim(k)))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CdgModule::new(complex, actions, cdga.ngens())
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn into_complex(self) -> Complex {
        self.complex
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn start(&self) -> i64 {
        self.complex.start()
    }

    pub fn end(&self) -> i64 {
        self.complex.end()
    }

    pub fn dim(&self, p: i64) -> usize {
        self.complex.dim(p)
    }

    pub fn d(&self, p: i64) -> Matrix {
        self.complex.d(p)
    }

    /// `x^_g: N^p -> N^{p+1}`.
    pub fn action(&self, p: i64, g: usize) -> Matrix {
        if p < self.start() || p > self.end() {
            return Matrix::zeros(self.field(), self.dim(p + 1), self.dim(p));
        }
        self.actions[(p - self.start()) as usize][g].clone()
    }

    /// `x^_{w_1} ... x^_{w_k}: N^p -> N^{p+k}`.
    pub fn word_action(&self, p: i64, w: &[usize]) -> Matrix {
        let mut m = Matrix::identity(self.field(), self.dim(p));
        let mut q = p;
        for &g in w.iter().rev() {
            m = self.action(q, g).mul(&m);
            q += 1;
        }
        m
    }

    /// Action of `b` in `A!_r` (degree coordinates) on `N^p`.
    pub fn element_action(&self, cdga: &CdgAlgebra, r: usize, b: &[Scalar], p: i64) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(p + r as i64), self.dim(p));
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.word_action(p, &cdga.dual().basis_words(r)[i]).scale(c));
            }
        }
        m
    }

    /// Relations of `A!`, the module anti-derivation rule and `d^2 = c ·`.
    pub fn validate(&self, cdga: &CdgAlgebra) -> Validation {
        if self.ngens != cdga.ngens() {
            return Validation::fail("generator count differs from the algebra");
        }
        let n = self.ngens;
        let drel = cdga.dual().presentation().relations();
        let lo = self.start();
        let hi = self.end();
        for p in lo..=hi {
            for i in 0..drel.rows() {
                let mut acc = Matrix::zeros(self.field(), self.dim(p + 2), self.dim(p));
                for ab in 0..n * n {
                    if !drel.is_entry_zero(i, ab) {
                        acc = acc.add(&self.word_action(p, &[ab / n, ab % n]).scale(&drel.get(i, ab)));
                    }
                }
                if !acc.is_zero() {
                    return Validation::fail(format!("dual relation {i} does not act by zero on degree {p}"));
                }
            }
        }
        for p in lo..=hi {
            for g in 0..n {
                let lhs = self.d(p + 1).mul(&self.action(p, g));
                let dx = self.element_action(cdga, 2, &cdga.d1(g), p);
                let rhs = dx.sub(&self.action(p + 1, g).mul(&self.d(p)));
                if lhs != rhs {
                    return Validation::fail(format!(
                        "anti-derivation rule fails for generator {g} on degree {p}"
                    ));
                }
            }
        }
        for p in lo..=hi {
            let dd = self.d(p + 1).mul(&self.d(p));
            if dd != self.element_action(cdga, 2, cdga.curvature(), p) {
                return Validation::fail(format!("d^2 != c on degree {p}"));
            }
        }
        Validation::ok()
    }

    /// Homology, defined only when the curvature vanishes.
    pub fn homology(&self, cdga: &CdgAlgebra, lo: i64, hi: i64) -> Result<HomologyReport> {
        if !cdga.is_flat() {
            return Err(Error::CurvedInput("homology needs c = 0".into()));
        }
        Ok(self.complex.homology(lo, hi))
    }

    pub fn is_morphism(&self, f: &ChainMap, tgt: &CdgModule) -> bool {
        f.is_chain_map(&self.complex, &tgt.complex)
            && self.complex.degrees().all(|p| {
                (0..self.ngens).all(|g| {
                    f.at(p + 1, &self.complex, &tgt.complex).mul(&self.action(p, g))
                        == tgt.action(p, g).mul(&f.at(p, &self.complex, &tgt.complex))
                })
            })
    }

    /// Cone with `x^ · (x, y) = (-x^ x, x^ y)`.
    pub fn cone(f: &ChainMap, src: &CdgModule, tgt: &CdgModule) -> CdgModule {
        let c = complex::cone(f, &src.complex, &tgt.complex);
        let actions = c
            .degrees()
            .map(|p| {
                (0..src.ngens)
                    .map(|g| src.action(p + 1, g).neg().direct_sum(&tgt.action(p, g)))
                    .collect()
            })
            .collect();
        CdgModule { complex: c, actions, ngens: src.ngens }
    }

    /// `A!`-linear homotopy (`s(x^ n) = x^ s(n)`) between `f` and `g`.
    pub fn nullhomotopy(f: &ChainMap, g: &ChainMap, src: &CdgModule, tgt: &CdgModule) -> Option<Homotopy> {
        let srcs: Vec<Box<dyn Fn(i64) -> Matrix + '_>> =
            (0..src.ngens).map(|a| Box::new(move |p| src.action(p, a)) as Box<dyn Fn(i64) -> Matrix>).collect();
        let tgts: Vec<Box<dyn Fn(i64) -> Matrix + '_>> =
            (0..src.ngens).map(|a| Box::new(move |p| tgt.action(p, a)) as Box<dyn Fn(i64) -> Matrix>).collect();
        let lin: Vec<Linearity<'_>> = (0..src.ngens)
            .map(|a| Linearity { shift: 1, src: srcs[a].as_ref(), tgt: tgts[a].as_ref() })
            .collect();
        complex::nullhomotopy(f, g, &src.complex, &tgt.complex, &lin)
    }

    pub fn sigma_truncate(&self, p: i64) -> (CdgModule, CdgModule) {
        let (hi, lo) = self.complex.sigma_truncate(p);
        let pick = |c: Complex| {
            let actions = c
                .degrees()
                .map(|q| (0..self.ngens).map(|g| self.action(q, g).block(0, c.dim(q + 1), 0, c.dim(q))).collect())
                .collect();
            CdgModule { complex: c, actions, ngens: self.ngens }
        };
        (pick(hi), pick(lo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn trivial_module_valid_iff_augmented() {
        let f = Field::Rational;
        let heis = catalog::heisenberg(f);
        assert!(UModule::trivial(f, 3).validate(&heis).is_ok());
        let two = catalog::two_point(f, f.int(1), f.int(2));
        assert!(!UModule::trivial(f, 1).validate(&two).is_ok());
        assert!(UModule::character(f, &[f.int(1)]).validate(&two).is_ok());
        assert!(UModule::character(f, &[f.int(2)]).validate(&two).is_ok());
        assert!(!UModule::character(f, &[f.int(3)]).validate(&two).is_ok());
    }

    #[test]
    fn free_dual_module_is_valid_when_flat() {
        let f = Field::Rational;
        let data = crate::deformation::DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(3).unwrap();
        let n = CdgModule::free(&cdga, 3).unwrap();
        assert!(n.validate(&cdga).is_ok());
        assert!(CdgModule::trivial(f, 2).validate(&cdga).is_ok());
    }

    #[test]
    fn cdg_cone_of_identity_is_valid_and_contractible() {
        let f = Field::Rational;
        let data = catalog::heisenberg(f);
        let cdga = data.build_cdga(4).unwrap();
        let n = CdgModule::free(&cdga, 3).unwrap();
        let id = ChainMap::identity(n.complex());
        assert!(n.is_morphism(&id, &n));
        let c = CdgModule::cone(&id, &n, &n);
        assert!(c.validate(&cdga).is_ok());
        let cid = ChainMap::identity(c.complex());
        let s = CdgModule::nullhomotopy(&cid, &ChainMap::zero(), &c, &c).unwrap();
        assert!(s.certifies(&cid, &ChainMap::zero(), c.complex(), c.complex()));
    }
}
