//! The Koszul bimodule `T = U (x) A!` and the functors `F`, `G`, `F'`, with
//! unit, counit and the adjunction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::FilteredAlgebra;
use crate::complex::{ChainMap, Complex, HomologyReport};
use crate::deformation::{CdgAlgebra, DeformationData};
use crate::dgmod::{CdgModule, UComplex};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};

/// Truncation data carried by every functor output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorBounds {
    /// Cohomological degrees reported.
    pub window: (i64, i64),
    /// Filtration index `i` of `F_i` and `(GF)_i`.
    pub filtration: i64,
    /// Largest `A!` degree used.
    pub adeg: usize,
    /// Extra degrees computed past the window.
    pub guard: i64,
}

impl Default for FunctorBounds {
    fn default() -> Self {
        FunctorBounds { window: (-8, 2), filtration: 8, adeg: 6, guard: 2 }
    }
}

impl FunctorBounds {
    pub fn validate(&self) -> Result<()> {
        if self.window.0 > self.window.1 || self.filtration < 0 || self.guard < 0 {
            return Err(Error::InconsistentData(format!("invalid bounds {self:?}")));
        }
        Ok(())
    }
}

/// `U` truncated at a filtration level, with its monomial basis compatible
/// with the filtration (so `U_{<=j}` is a coordinate prefix).
#[derive(Clone, Debug)]
pub struct UAlgebra {
    data: DeformationData,
    alg: FilteredAlgebra,
    left: Vec<Matrix>,
}

impl UAlgebra {
    pub fn new(data: &DeformationData, bound: usize) -> Result<Self> {
        let alg = FilteredAlgebra::build(data.field(), data.ngens(), &data.engine_relations(), bound)?;
        if !alg.has_monomial_filtration() {
            return Err(Error::InconsistentData("U is not of PBW type within the bound".into()));
        }
        let left = (0..data.ngens()).map(|g| alg.left_gen(g)).collect::<Result<_>>()?;
        Ok(UAlgebra { data: data.clone(), alg, left })
    }

    pub fn data(&self) -> &DeformationData {
        &self.data
    }

    pub fn algebra(&self) -> &FilteredAlgebra {
        &self.alg
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn ngens(&self) -> usize {
        self.alg.ngens()
    }

    pub fn bound(&self) -> usize {
        self.alg.bound()
    }

    /// `dim U_{<=level}`; zero for negative levels.
    pub fn dim(&self, level: i64) -> usize {
        if level < 0 {
            0
        } else {
            assert!(level as usize <= self.bound(), "level {level} beyond bound {}", self.bound());
            self.alg.dim_upto(level as usize)
        }
    }

    /// `U_{<=l} -> U_{<=l+1}`, `u -> u x_g`.
    pub fn right(&self, g: usize, level: i64) -> Matrix {
        self.alg.right_gen(g).block(0, self.dim(level + 1), 0, self.dim(level))
    }

    /// `U_{<=l} -> U_{<=l+1}`, `u -> x_g u`.
    pub fn left(&self, g: usize, level: i64) -> Matrix {
        self.left[g].block(0, self.dim(level + 1), 0, self.dim(level))
    }

    /// Inclusion `U_{<=l} -> U_{<=m}`.
    pub fn incl(&self, level: i64, to: i64) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(to), self.dim(level));
        for k in 0..self.dim(level).min(self.dim(to)) {
            m.set(k, k, self.field().one());
        }
        m
    }
}

/// A bounded complex of U-modules, possibly filtered by `U_{<=level}`.
pub trait ModuleComplex {
    fn field(&self) -> Field;
    fn ngens(&self) -> usize;
    /// Degrees that may be nonzero.
    fn support(&self) -> (i64, i64);
    fn dim(&self, q: i64, level: i64) -> usize;
    /// `M^q_{<=l} -> M^{q+1}_{<=l+1}`.
    fn d(&self, q: i64, level: i64) -> Matrix;
    /// `x_g: M^q_{<=l} -> M^q_{<=l+1}`.
    fn act(&self, q: i64, g: usize, level: i64) -> Matrix;
    /// `M^q_{<=l} -> M^q_{<=l+1}`.
    fn incl(&self, q: i64, level: i64) -> Matrix;
}

impl ModuleComplex for UComplex {
    fn field(&self) -> Field {
        UComplex::field(self)
    }
    fn ngens(&self) -> usize {
        UComplex::ngens(self)
    }
    fn support(&self) -> (i64, i64) {
        (self.start(), self.end())
    }
    fn dim(&self, q: i64, _: i64) -> usize {
        UComplex::dim(self, q)
    }
    fn d(&self, q: i64, _: i64) -> Matrix {
        UComplex::d(self, q)
    }
    fn act(&self, q: i64, g: usize, _: i64) -> Matrix {
        if UComplex::dim(self, q) == 0 {
            Matrix::zeros(UComplex::field(self), 0, 0)
        } else {
            self.action(q, g)
        }
    }
    fn incl(&self, q: i64, _: i64) -> Matrix {
        Matrix::identity(UComplex::field(self), UComplex::dim(self, q))
    }
}

/// `F(N)^p = U (x) N^p` with `u (x) n -> sum u x_a (x) x^_a n + u (x) d n`.
///
/// The component of degree `p` in `F_i(N)` is `U_{<=p+i} (x) N^p`.
#[derive(Clone, Debug)]
pub struct FComplex {
    u: Arc<UAlgebra>,
    n: CdgModule,
}

impl FComplex {
    pub fn new(u: Arc<UAlgebra>, n: CdgModule) -> Self {
        FComplex { u, n }
    }

    pub fn source(&self) -> &CdgModule {
        &self.n
    }

    pub fn u(&self) -> &Arc<UAlgebra> {
        &self.u
    }

    /// The vector-space complex `F_i(N)`.
    pub fn truncation(&self, i: i64) -> Result<Complex> {
        let (lo, hi) = (self.n.start(), self.n.end());
        if hi + i + 1 > self.u.bound() as i64 {
            return Err(Error::DegreeOverflow(format!(
                "F_{i} needs U up to level {}, truncation has {}",
                hi + i + 1,
                self.u.bound()
            )));
        }
        if lo > hi {
            return Ok(Complex::zero(self.n.field()));
        }
        let dims = (lo..=hi).map(|p| self.dim(p, p + i)).collect();
        let d = (lo..hi).map(|p| self.d(p, p + i)).collect();
        Complex::new(self.n.field(), lo, dims, d)
    }

    /// Homology of `F_j(N)` for `j = 0..=i`, flagged stabilized when the
    /// last three levels agree on the window.
    pub fn homology_by_filtration(&self, i: i64, window: (i64, i64)) -> Result<Vec<HomologyReport>> {
        let mut out = Vec::new();
        for j in 0..=i {
            out.push(self.truncation(j)?.homology(window.0, window.1));
        }
        let stable = out.len() >= 3 && {
            let k = out.len();
            out[k - 1].entries == out[k - 2].entries && out[k - 2].entries == out[k - 3].entries
        };
        if let Some(last) = out.last_mut() {
            last.stabilized = Some(stable);
        }
        Ok(out)
    }
}

impl ModuleComplex for FComplex {
    fn field(&self) -> Field {
        self.n.field()
    }
    fn ngens(&self) -> usize {
        self.n.ngens()
    }
    fn support(&self) -> (i64, i64) {
        (self.n.start(), self.n.end())
    }
    fn dim(&self, q: i64, level: i64) -> usize {
        self.u.dim(level) * self.n.dim(q)
    }
    fn d(&self, q: i64, level: i64) -> Matrix {
        let mut m = self.u.incl(level, level + 1).kron(&self.n.d(q));
        for g in 0..self.n.ngens() {
            m = m.add(&self.u.right(g, level).kron(&self.n.action(q, g)));
        }
        m
    }
    fn act(&self, q: i64, g: usize, level: i64) -> Matrix {
        self.u.left(g, level).kron(&Matrix::identity(self.n.field(), self.n.dim(q)))
    }
    fn incl(&self, q: i64, level: i64) -> Matrix {
        self.u.incl(level, level + 1).kron(&Matrix::identity(self.n.field(), self.n.dim(q)))
    }
}

/// `G(M)` together with the block layout `(r, offset, dim M^{p+r})` per degree.
#[derive(Clone, Debug)]
pub struct GModule {
    pub module: CdgModule,
    layout: Vec<Vec<(usize, usize, usize)>>,
    levels: Vec<i64>,
}

impl GModule {
    /// Blocks `(r, offset, dim M^{p+r})` of degree `p`.
    pub fn blocks(&self, p: i64) -> &[(usize, usize, usize)] {
        let k = p - self.module.start();
        if k < 0 || k as usize >= self.layout.len() {
            &[]
        } else {
            &self.layout[k as usize]
        }
    }

    /// Filtration level used in degree `p`.
    pub fn level(&self, p: i64) -> i64 {
        self.levels[(p - self.module.start()) as usize]
    }
}

/// `G(M)^p = (+)_r (A!_r)^* (x) M^{p+r}`; for filtered `M` the component
/// uses `M^{p+r}_{<= p + offset}`. Degrees start at `lo` (at the latest).
///
/// `(d phi)(b) = (-1)^{|b|} [sum x_a phi(x^_a b) + phi(d b) + d_M phi(b)]`
/// and `(x^ phi)(b) = -phi(b x^)`.
pub fn apply_g(m: &dyn ModuleComplex, cdga: &CdgAlgebra, offset: i64, lo: i64) -> Result<GModule> {
    let f = m.field();
    let n = cdga.ngens();
    let (mlo, mhi) = m.support();
    let top = cdga.bound();
    let finite = cdga.dim(top) == 0;
    if mlo > mhi {
        return Ok(GModule { module: CdgModule::zero(f, n), layout: vec![], levels: vec![] });
    }
    let exact_from = if finite { mlo - top as i64 } else { mhi - top as i64 };
    let pmin = lo.max(exact_from);
    let pmax = mhi;
    let rmax = |p: i64| -> usize { ((mhi - p) as usize).min(top) };
    let level = |p: i64| p + offset;

    let mut layout = Vec::new();
    let mut dims = Vec::new();
    for p in pmin..=pmax {
        let mut blocks = Vec::new();
        let mut off = 0;
        for r in 0..=rmax(p) {
            let dm = m.dim(p + r as i64, level(p));
            blocks.push((r, off, dm));
            off += cdga.dim(r) * dm;
        }
        layout.push(blocks);
        dims.push(off);
    }
    let ls: Vec<Vec<Matrix>> = (0..top).map(|r| (0..n).map(|g| cdga.left_gen(r, g)).collect()).collect::<Result<_>>()?;
    let rs: Vec<Vec<Matrix>> = (0..top).map(|r| (0..n).map(|g| cdga.right_gen(r, g)).collect()).collect::<Result<_>>()?;

    let mut ds = Vec::new();
    let mut actions = Vec::new();
    for p in pmin..=pmax {
        let k = (p - pmin) as usize;
        let src = &layout[k];
        let tgt: &[(usize, usize, usize)] = if p < pmax { &layout[k + 1] } else { &[] };
        let rows = if p < pmax { dims[k + 1] } else { 0 };
        let mut d = Matrix::zeros(f, rows, dims[k]);
        let mut acts = vec![Matrix::zeros(f, rows, dims[k]); n];
        for &(r, toff, _) in tgt {
            let sign = f.one().signed(r as i64);
            let q = p + r as i64;
            // from block r: d_M phi_r(b)
            if let Some(&(_, soff, _)) = src.iter().find(|b| b.0 == r) {
                let blk = Matrix::identity(f, cdga.dim(r)).kron(&m.d(q, level(p)));
                d.add_block(toff, soff, &blk.scale(&sign));
            }
            // from block r+1
            if let Some(&(_, soff, _)) = src.iter().find(|b| b.0 == r + 1) {
                let q1 = p + r as i64 + 1;
                let inc = m.incl(q1, level(p));
                let mut blk = cdga.d(r).transpose().kron(&inc);
                for g in 0..n {
                    blk = blk.add(&ls[r][g].transpose().kron(&m.act(q1, g, level(p))));
                }
                d.add_block(toff, soff, &blk.scale(&sign));
                for (g, a) in acts.iter_mut().enumerate() {
                    a.add_block(toff, soff, &rs[r][g].transpose().kron(&inc).neg());
                }
            }
        }
        ds.push(d);
        actions.push(acts);
    }
    ds.pop();
    let complex = Complex::new(f, pmin, dims, ds)?;
    let complex = if pmin > exact_from { complex.with_reliable(pmin + 1, i64::MAX) } else { complex };
    let module = CdgModule::new(complex, actions, n)?;
    Ok(GModule { module, layout, levels: (pmin..=pmax).map(level).collect() })
}

/// `F_i(N)` as a vector-space complex and as a filtered module complex.
pub fn apply_f(u: &Arc<UAlgebra>, n: &CdgModule, i: i64) -> Result<(FComplex, Complex)> {
    let fc = FComplex::new(u.clone(), n.clone());
    let c = fc.truncation(i)?;
    Ok((fc, c))
}

/// Counit `F_i G(M) -> M`, `u (x) phi -> u · phi_0(1)`.
pub struct Counit {
    pub g: GModule,
    pub fg: Complex,
    pub target: Complex,
    pub map: ChainMap,
}

pub fn counit(u: &Arc<UAlgebra>, cdga: &CdgAlgebra, m: &UComplex, i: i64, lo: i64) -> Result<Counit> {
    let f = m.field();
    let g = apply_g(m, cdga, 0, lo)?;
    let fc = FComplex::new(u.clone(), g.module.clone());
    let fg = fc.truncation(i)?;
    let mut map = ChainMap::new();
    let words = u.algebra().words();
    for p in fg.degrees() {
        let du = u.dim(p + i);
        let dg = g.module.dim(p);
        let mut mat = Matrix::zeros(f, m.dim(p), du * dg);
        if let Some(&(_, off, dm)) = g.blocks(p).iter().find(|b| b.0 == 0) {
            let ms = m.module(p);
            for (ui, w) in words.iter().take(du).enumerate() {
                let act = ms.word_action(w);
                for mi in 0..dm {
                    for row in 0..m.dim(p) {
                        if !act.is_entry_zero(row, mi) {
                            mat.set(row, ui * dg + off + mi, act.get(row, mi));
                        }
                    }
                }
            }
        }
        map.insert(p, mat);
    }
    Ok(Counit { g, fg, target: m.complex().clone(), map })
}

/// Unit `N -> (GF)_i(N)`, `n -> (b -> (-1)^{|b|} 1 (x) b n)`.
pub struct Unit {
    pub f: FComplex,
    pub gf: GModule,
    pub map: ChainMap,
}

pub fn unit(u: &Arc<UAlgebra>, cdga: &CdgAlgebra, n: &CdgModule, i: i64, lo: i64) -> Result<Unit> {
    let f = n.field();
    if n.start() <= n.end() && n.start() + i < 0 {
        return Err(Error::InconsistentData(format!(
            "filtration index {i} leaves degree {} at a negative level",
            n.start()
        )));
    }
    let fc = FComplex::new(u.clone(), n.clone());
    let gf = apply_g(&fc, cdga, i, lo)?;
    let mut map = ChainMap::new();
    for p in n.start()..=n.end() {
        let mut mat = Matrix::zeros(f, gf.module.dim(p), n.dim(p));
        if p + i >= 0 {
            for &(r, off, dm) in gf.blocks(p) {
                let q = p + r as i64;
                let dn = n.dim(q);
                let sign = f.one().signed(r as i64);
                for (bi, w) in cdga.dual().basis_words(r).iter().enumerate() {
                    let act = n.word_action(p, w);
                    for ni in 0..n.dim(p) {
                        for row in 0..dn {
                            if !act.is_entry_zero(row, ni) {
                                // U-coordinate 0 is the unit.
                                mat.set(off + bi * dm + row, ni, act.get(row, ni).mul(&sign));
                            }
                        }
                    }
                }
            }
        }
        map.insert(p, mat);
    }
    Ok(Unit { f: fc, gf, map })
}

/// `F'(M) = A! (x) M` with
/// `d(a (x) m) = -(-1)^{|a|} sum a x^_a (x) x_a m + d(a) (x) m + (-1)^{|a|} a (x) d_M m`.
pub fn apply_fprime(cdga: &CdgAlgebra, m: &UComplex) -> Result<CdgModule> {
    if !cdga.is_flat() {
        return Err(Error::CurvedInput("F' needs c = 0".into()));
    }
    let f = m.field();
    let n = cdga.ngens();
    let top = cdga.bound();
    if m.start() > m.end() {
        return Ok(CdgModule::zero(f, n));
    }
    let lo = m.start();
    let hi = m.end() + top as i64;
    // blocks (r, q = p - r, offset)
    let layout: Vec<Vec<(usize, i64, usize)>> = (lo..=hi)
        .map(|p| {
            let mut off = 0;
            let mut v = Vec::new();
            for r in 0..=top {
                let q = p - r as i64;
                if q >= m.start() && q <= m.end() {
                    v.push((r, q, off));
                    off += cdga.dim(r) * m.dim(q);
                }
            }
            v
        })
        .collect();
    let dims: Vec<usize> = layout.iter().map(|v| v.iter().map(|&(r, q, _)| cdga.dim(r) * m.dim(q)).sum()).collect();
    let find = |p: i64, r: usize| -> Option<usize> {
        if p < lo || p > hi {
            return None;
        }
        layout[(p - lo) as usize].iter().find(|b| b.0 == r).map(|b| b.2)
    };
    let mut ds = Vec::new();
    let mut actions = Vec::new();
    for p in lo..=hi {
        let k = (p - lo) as usize;
        let rows = if p < hi { dims[k + 1] } else { 0 };
        let mut d = Matrix::zeros(f, rows, dims[k]);
        let mut acts = vec![Matrix::zeros(f, rows, dims[k]); n];
        for &(r, q, off) in &layout[k] {
            let sr = f.one().signed(r as i64);
            if r < top {
                if let Some(t) = find(p + 1, r + 1) {
                    let mut blk = cdga.d(r).kron(&Matrix::identity(f, m.dim(q)));
                    for g in 0..n {
                        let a = cdga.right_gen(r, g)?.kron(&m.action(q, g));
                        blk = blk.sub(&a.scale(&sr));
                    }
                    d.add_block(t, off, &blk);
                    for (g, a) in acts.iter_mut().enumerate() {
                        a.add_block(t, off, &cdga.left_gen(r, g)?.kron(&Matrix::identity(f, m.dim(q))));
                    }
                }
            }
            if let Some(t) = find(p + 1, r) {
                if q < m.end() {
                    d.add_block(t, off, &Matrix::identity(f, cdga.dim(r)).kron(&m.d(q)).scale(&sr));
                }
            }
        }
        ds.push(d);
        actions.push(acts);
    }
    ds.pop();
    let complex = Complex::new(f, lo, dims, ds)?;
    let finite = cdga.dim(top) == 0;
    let complex = if finite { complex } else { complex.with_reliable(i64::MIN, lo + top as i64 - 1) };
    CdgModule::new(complex, actions, n)
}

/// `T_r = U_{<=L} (x) A!_r` with `delta(u (x) a) = sum u x_a (x) x^_a a + u (x) d a`.
#[derive(Clone, Debug)]
pub struct KoszulBimodule {
    u: Arc<UAlgebra>,
    cdga: CdgAlgebra,
    adeg: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleReport {
    pub formula: bool,
    pub right_compatible: bool,
    pub curvature: bool,
    pub delta_squared_zero: bool,
}

impl KoszulBimodule {
    /// Builds `T` and verifies its identities within the bounds.
    pub fn build(u: Arc<UAlgebra>, cdga: CdgAlgebra, adeg: usize) -> Result<(Self, BimoduleReport)> {
        if u.data().ngens() != cdga.ngens() || u.field() != cdga.field() {
            return Err(Error::InconsistentData("U and A! come from different data".into()));
        }
        let adeg = adeg.min(cdga.bound());
        let t = KoszulBimodule { u, cdga, adeg };
        let report = t.verify()?;
        if !(report.formula && report.right_compatible && report.curvature) {
            return Err(Error::InconsistentData(format!("bimodule identities fail: {report:?}")));
        }
        Ok((t, report))
    }

    /// `delta: U_{<=l} (x) A!_r -> U_{<=l+1} (x) A!_{r+1}`.
    pub fn delta(&self, r: usize, level: i64) -> Result<Matrix> {
        let mut m = self.u.incl(level, level + 1).kron(&self.cdga.d(r));
        for g in 0..self.cdga.ngens() {
            m = m.add(&self.u.right(g, level).kron(&self.cdga.left_gen(r, g)?));
        }
        Ok(m)
    }

    /// Right multiplication by `b` in `A!_s` on `U_{<=l} (x) A!_r`.
    fn right_mul(&self, r: usize, s: usize, b: &[crate::linalg::Scalar], level: i64) -> Result<Matrix> {
        let a = self.cdga.dual();
        let mut rm = Matrix::zeros(self.cdga.field(), a.dim(r + s), a.dim(r));
        for k in 0..a.dim(r) {
            let p = a.multiply(r, &a.basis(r, k), s, b)?;
            for (i, x) in p.into_iter().enumerate() {
                if !x.is_zero() {
                    rm.set(i, k, x);
                }
            }
        }
        Ok(Matrix::identity(self.u.field(), self.u.dim(level)).kron(&rm))
    }

    fn verify(&self) -> Result<BimoduleReport> {
        let f = self.u.field();
        let top = self.u.bound() as i64;
        let a = self.cdga.dual();
        let mut report = BimoduleReport { formula: true, right_compatible: true, curvature: true, delta_squared_zero: true };
        // Formula on basis elements, computed through words.
        let uw = self.u.algebra();
        for r in 0..self.adeg {
            let lvl = top - 1;
            let dm = self.delta(r, lvl)?;
            for (ui, _) in uw.words().iter().enumerate().take(self.u.dim(lvl)) {
                for ai in 0..a.dim(r) {
                    let mut expect = vec![f.zero(); self.u.dim(lvl + 1) * a.dim(r + 1)];
                    let uvec = uw.basis_vector(ui);
                    for g in 0..self.cdga.ngens() {
                        let ux = uw.mul(&uvec, &uw.word_vector(&[g])?)?;
                        let xa = a.multiply(1, &a.word(&[g])?, r, &a.basis(r, ai))?;
                        for (i, x) in ux.iter().enumerate().take(self.u.dim(lvl + 1)) {
                            for (j, y) in xa.iter().enumerate() {
                                let k = i * a.dim(r + 1) + j;
                                expect[k] = expect[k].add(&x.mul(y));
                            }
                        }
                    }
                    let da = self.cdga.d(r).col(ai);
                    for (j, y) in da.iter().enumerate() {
                        let k = ui * a.dim(r + 1) + j;
                        expect[k] = expect[k].add(y);
                    }
                    if dm.col(ui * a.dim(r) + ai) != expect {
                        report.formula = false;
                    }
                }
            }
        }
        // Right compatibility with generators and delta^2 = -(. c).
        for r in 0..self.adeg.saturating_sub(1) {
            let lvl = top - 2;
            for s in 1..=(self.adeg - 1 - r).min(2) {
                for bi in 0..a.dim(s) {
                    let b = a.basis(s, bi);
                    let lhs = self.delta(r + s, lvl)?.mul(&self.right_mul(r, s, &b, lvl)?);
                    let t1 = self.right_mul(r + 1, s, &b, lvl + 1)?.mul(&self.delta(r, lvl)?);
                    let db = self.cdga.d(s).col(bi);
                    let t2 = self
                        .u
                        .incl(lvl, lvl + 1)
                        .kron(&Matrix::identity(f, a.dim(r + s + 1)))
                        .mul(&self.right_mul(r, s + 1, &db, lvl)?);
                    let sign = f.one().signed(r as i64);
                    if lhs != t1.add(&t2.scale(&sign)) {
                        report.right_compatible = false;
                    }
                }
            }
            let dd = self.delta(r + 1, lvl + 1)?.mul(&self.delta(r, lvl)?);
            let c = self.right_mul(r, 2, self.cdga.curvature(), lvl)?;
            let c = self.u.incl(lvl, lvl + 2).kron(&Matrix::identity(f, a.dim(r + 2))).mul(&c);
            if dd != c.neg() {
                report.curvature = false;
            }
            if !dd.is_zero() {
                report.delta_squared_zero = false;
            }
        }
        Ok(report)
    }
}

/// Both sides of the adjunction in one degree range, compared entrywise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionReport {
    pub degrees: Vec<i64>,
    pub dims_u_side: Vec<usize>,
    pub dims_a_side: Vec<usize>,
    pub image_linear: bool,
    pub bijective: bool,
    pub differentials_agree: bool,
    pub degree_zero_cycles: usize,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.image_linear && self.bijective && self.differentials_agree && self.dims_u_side == self.dims_a_side
    }
}

/// `Hom_U(F N, M) = (+)_r Hom(N^r, M^{p+r})` against `Hom_{A!}(N, G M)`.
///
/// The U-side differential is `(-1)^r d_M f + (-1)^{r+1} f d_{F N}` on the
/// `N^r` component, the A!-side one is the same formula with `G M` and `N`,
/// and the identification is `g_f(n)(b) = (-1)^{|b|} f(b n)`.
pub fn adjunction_check(cdga: &CdgAlgebra, n: &CdgModule, m: &UComplex) -> Result<AdjunctionReport> {
    let fld = m.field();
    let ng = cdga.ngens();
    if n.start() > n.end() || m.start() > m.end() {
        return Ok(AdjunctionReport {
            degrees: vec![],
            dims_u_side: vec![],
            dims_a_side: vec![],
            image_linear: true,
            bijective: true,
            differentials_agree: true,
            degree_zero_cycles: 0,
        });
    }
    let g = apply_g(m, cdga, 0, n.start() + m.start() - n.end() - cdga.bound() as i64)?;
    let gm = &g.module;
    let plo = m.start() - n.end();
    let phi = m.end() - n.start();

    // U side: blocks (r, offset) with Hom(N^r, M^{p+r}) as dim M x dim N row-major.
    let u_layout = |p: i64| -> (Vec<(i64, usize)>, usize) {
        let mut v = Vec::new();
        let mut off = 0;
        for r in n.start()..=n.end() {
            v.push((r, off));
            off += n.dim(r) * m.dim(p + r);
        }
        (v, off)
    };
    // Ambient A side: (+)_r Hom_k(N^r, G^{p+r}).
    let a_layout = |p: i64| -> (Vec<(i64, usize)>, usize) {
        let mut v = Vec::new();
        let mut off = 0;
        for r in n.start()..=n.end() {
            v.push((r, off));
            off += n.dim(r) * gm.dim(p + r);
        }
        (v, off)
    };

    // delta on the U side: Hom^p -> Hom^{p+1}
    let u_delta = |p: i64| -> Matrix {
        let (src, sdim) = u_layout(p);
        let (tgt, tdim) = u_layout(p + 1);
        let mut out = Matrix::zeros(fld, tdim, sdim);
        for &(r, toff) in &tgt {
            let sign = fld.one().signed(r);
            let (dn, dmt) = (n.dim(r), m.dim(p + 1 + r));
            // (-1)^r d_M f_r
            if let Some(&(_, soff)) = src.iter().find(|b| b.0 == r) {
                let dmm = m.d(p + r);
                // f as matrix (dim M^{p+r} x dn), vec index row * dn + col
                let blk = dmm.kron(&Matrix::identity(fld, dn));
                out.add_block(toff, soff, &blk.scale(&sign));
            }
            // (-1)^{r+1} f_{r+1} (d_N + sum x_a x^_a) restricted to N^r
            if let Some(&(_, soff)) = src.iter().find(|b| b.0 == r + 1) {
                let dn1 = n.dim(r + 1);
                let _ = dn1;
                let dnn = n.d(r);
                let blk = Matrix::identity(fld, dmt).kron(&dnn.transpose());
                out.add_block(toff, soff, &blk.scale(&sign.neg()));
                for a in 0..ng {
                    let x = m.action(p + 1 + r, a);
                    let blk = x.kron(&n.action(r, a).transpose());
                    out.add_block(toff, soff, &blk.scale(&sign.neg()));
                }
            }
        }
        out
    };
    // delta on the ambient A side.
    let a_delta = |p: i64| -> Matrix {
        let (src, sdim) = a_layout(p);
        let (tgt, tdim) = a_layout(p + 1);
        let mut out = Matrix::zeros(fld, tdim, sdim);
        for &(r, toff) in &tgt {
            let sign = fld.one().signed(r);
            let dn = n.dim(r);
            if let Some(&(_, soff)) = src.iter().find(|b| b.0 == r) {
                let blk = gm.d(p + r).kron(&Matrix::identity(fld, dn));
                out.add_block(toff, soff, &blk.scale(&sign));
            }
            if let Some(&(_, soff)) = src.iter().find(|b| b.0 == r + 1) {
                let blk = Matrix::identity(fld, gm.dim(p + 1 + r)).kron(&n.d(r).transpose());
                out.add_block(toff, soff, &blk.scale(&sign.neg()));
            }
        }
        out
    };
    // Linearity constraints g(x^ n) = x^ g(n) on the ambient space.
    let a_linear = |p: i64| -> Matrix {
        let (src, sdim) = a_layout(p);
        let mut rows: Vec<Matrix> = Vec::new();
        for &(r, off) in &src {
            let next = src.iter().find(|b| b.0 == r + 1);
            for a in 0..ng {
                // rows indexed by Hom(N^r, G^{p+r+1})
                let h = gm.dim(p + r + 1);
                let mut blk = Matrix::zeros(fld, h * n.dim(r), sdim);
                if let Some(&(_, noff)) = next {
                    blk.add_block(0, noff, &Matrix::identity(fld, h).kron(&n.action(r, a).transpose()));
                }
                blk.add_block(0, off, &gm.action(p + r, a).kron(&Matrix::identity(fld, n.dim(r))).neg());
                rows.push(blk);
            }
        }
        rows.into_iter().fold(Matrix::zeros(fld, 0, sdim), |acc, b| acc.vstack(&b))
    };
    // Identification Phi: U side -> ambient A side.
    let phi_map = |p: i64| -> Matrix {
        let (src, sdim) = u_layout(p);
        let (tgt, tdim) = a_layout(p);
        let mut out = Matrix::zeros(fld, tdim, sdim);
        for &(r, toff) in &tgt {
            let dn = n.dim(r);
            for &(s, boff, dm) in g.blocks(p + r) {
                let q = r + s as i64;
                let Some(&(_, soff)) = src.iter().find(|b| b.0 == q) else { continue };
                let sign = fld.one().signed(s as i64);
                let dq = n.dim(q);
                debug_assert_eq!(dm, m.dim(p + q));
                for (bi, w) in cdga.dual().basis_words(s).iter().enumerate() {
                    let act = n.word_action(r, w);
                    // g(n)(b)_mi = sign * sum_j f[mi][j] act[j][n]
                    for ni in 0..dn {
                        for mi in 0..dm {
                            let row = toff + (boff + bi * dm + mi) * dn + ni;
                            for j in 0..dq {
                                if !act.is_entry_zero(j, ni) {
                                    let col = soff + mi * dq + j;
                                    out.add_at(row, col, &act.get(j, ni).mul(&sign));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    };

    let mut report = AdjunctionReport {
        degrees: (plo..=phi).collect(),
        dims_u_side: vec![],
        dims_a_side: vec![],
        image_linear: true,
        bijective: true,
        differentials_agree: true,
        degree_zero_cycles: 0,
    };
    for p in plo..=phi {
        let ph = phi_map(p);
        let lin = a_linear(p);
        let du = ph.cols();
        let da = lin.kernel_basis().cols();
        report.dims_u_side.push(du);
        report.dims_a_side.push(da);
        if !lin.mul(&ph).is_zero() {
            report.image_linear = false;
        }
        if ph.rank() != du || du != da {
            report.bijective = false;
        }
        if a_delta(p).mul(&ph) != phi_map(p + 1).mul(&u_delta(p)) {
            report.differentials_agree = false;
        }
        if p == 0 {
            report.degree_zero_cycles = du - u_delta(0).rank();
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::dgmod::UModule;

    #[test]
    fn g_of_a_character_is_the_alternating_complex() {
        let f = Field::Rational;
        let data = catalog::two_point(f, f.int(1), f.int(2));
        let cdga = data.build_cdga(6).unwrap();
        let m = UComplex::from_module(0, UModule::character(f, &[f.int(1)]));
        assert!(m.validate(&data).is_ok());
        let g = apply_g(&m, &cdga, 0, -5).unwrap();
        let gm = &g.module;
        let v = gm.validate(&cdga);
        assert!(v.is_ok(), "{v:?}");
        // G^{-r} is spanned by the dual of x^r; d alternates 1, 2 (up to sign).
        for p in -5..0 {
            assert_eq!(gm.dim(p), 1);
            let d = gm.d(p).get(0, 0);
            let r = -p;
            let expect = if r % 2 == 1 { f.int(1) } else { f.int(2) };
            assert!(d == expect || d == expect.neg(), "degree {p}: {d}");
        }
    }

    #[test]
    fn f_of_trivial_module_is_u() {
        let f = Field::Rational;
        let data = catalog::heisenberg(f);
        let cdga = data.build_cdga(4).unwrap();
        let u = Arc::new(UAlgebra::new(&data, 4).unwrap());
        let (_, c) = apply_f(&u, &CdgModule::trivial(f, 3), 2).unwrap();
        assert_eq!(c.dim(0), u.dim(2));
        assert!(c.d(0).is_zero());
        let _ = cdga;
    }

    #[test]
    fn bimodule_identities() {
        let f = Field::Rational;
        for (data, flat) in [
            (catalog::two_point(f, f.int(1), f.int(2)), false),
            (catalog::heisenberg(f), true),
            (DeformationData::trivial(catalog::symmetric(f, 2)), true),
        ] {
            let cdga = data.build_cdga(5).unwrap();
            let u = Arc::new(UAlgebra::new(&data, 4).unwrap());
            let (_, rep) = KoszulBimodule::build(u, cdga, 4).unwrap();
            assert!(rep.curvature && rep.right_compatible && rep.formula);
            assert_eq!(rep.delta_squared_zero, flat);
        }
    }

    #[test]
    fn unit_and_counit_are_chain_maps_and_quasi_isomorphisms() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let u = Arc::new(UAlgebra::new(&data, 6).unwrap());
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let c = counit(&u, &cdga, &k, 3, -6).unwrap();
        assert!(c.map.is_chain_map(&c.fg, &c.target));
        let cone = crate::complex::cone(&c.map, &c.fg, &c.target);
        assert!(cone.full_homology().acyclic_interior(), "{:?}", cone.full_homology());

        let n = CdgModule::trivial(f, 2);
        let un = unit(&u, &cdga, &n, 3, -6).unwrap();
        assert!(un.gf.module.validate(&cdga).is_ok());
        assert!(n.is_morphism(&un.map, &un.gf.module));
        let cone = crate::complex::cone(&un.map, n.complex(), un.gf.module.complex());
        assert!(cone.full_homology().acyclic_interior(), "{:?}", cone.full_homology());
    }

    #[test]
    fn adjunction_on_trivial_modules() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let rep = adjunction_check(&cdga, &CdgModule::trivial(f, 2), &k).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.degree_zero_cycles, 1);
    }

    #[test]
    fn fprime_of_trivial_module_computes_ext() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let fp = apply_fprime(&cdga, &k).unwrap();
        assert!(fp.validate(&cdga).is_ok());
        assert_eq!(fp.homology(&cdga, 0, 2).unwrap().dims(), vec![1, 2, 1]);
    }

    fn heisenberg_rep(f: Field) -> UModule {
        let e = |i: usize, j: usize| {
            let mut m = Matrix::zeros(f, 3, 3);
            m.set(i, j, f.one());
            m
        };
        UModule::new(f, 3, vec![e(0, 1), e(1, 2), e(0, 2)]).unwrap()
    }

    #[test]
    fn curved_unit_and_counit() {
        let f = Field::Rational;
        let data = catalog::two_point(f, f.int(1), f.int(2));
        let cdga = data.build_cdga(8).unwrap();
        let u = Arc::new(UAlgebra::new(&data, 8).unwrap());
        let m = UComplex::from_module(0, UModule::character(f, &[f.int(1)]));
        let c = counit(&u, &cdga, &m, 2, -6).unwrap();
        assert!(c.map.is_chain_map(&c.fg, &c.target));
        let cone = crate::complex::cone(&c.map, &c.fg, &c.target);
        assert!(cone.homology(-4, 1).acyclic_interior(), "{:?}", cone.homology(-4, 1));

        assert!(CdgModule::free(&cdga, 3).is_err());
        let n = apply_g(&m, &cdga, 0, -4).unwrap().module;
        assert!(unit(&u, &cdga, &n, 2, -6).is_err());
        let un = unit(&u, &cdga, &n, 4, -8).unwrap();
        let v = un.gf.module.validate(&cdga);
        assert!(v.is_ok(), "{v:?}");
        assert!(n.is_morphism(&un.map, &un.gf.module));
    }

    #[test]
    fn adjunction_with_nontrivial_modules() {
        let f = Field::prime(5).unwrap();
        let data = catalog::heisenberg(f);
        let cdga = data.build_cdga(4).unwrap();
        let m = UComplex::from_module(0, heisenberg_rep(f));
        assert!(m.validate(&data).is_ok());
        for n in [CdgModule::trivial(f, 3), CdgModule::free(&cdga, 1).unwrap()] {
            assert!(n.validate(&cdga).is_ok());
            let rep = adjunction_check(&cdga, &n, &m).unwrap();
            assert!(rep.holds(), "{rep:?}");
        }

        let g = Field::Rational;
        let data = catalog::two_point(g, g.int(1), g.int(2));
        let cdga = data.build_cdga(6).unwrap();
        let m = UComplex::from_module(1, UModule::character(g, &[g.int(2)]));
        let n = apply_g(&UComplex::from_module(0, UModule::character(g, &[g.int(1)])), &cdga, 0, -3).unwrap().module;
        let rep = adjunction_check(&cdga, &n, &m).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn counit_on_heisenberg_representation() {
        let f = Field::prime(5).unwrap();
        let data = catalog::heisenberg(f);
        let cdga = data.build_cdga(4).unwrap();
        let u = Arc::new(UAlgebra::new(&data, 7).unwrap());
        let m = UComplex::from_module(0, heisenberg_rep(f));
        let c = counit(&u, &cdga, &m, 3, -4).unwrap();
        assert!(c.map.is_chain_map(&c.fg, &c.target));
        let cone = crate::complex::cone(&c.map, &c.fg, &c.target);
        assert!(cone.full_homology().acyclic_interior(), "{:?}", cone.full_homology());
    }
}
