//! Socles, cofree decompositions and the t-truncation of cofree modules.

use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::deformation::CdgAlgebra;
use crate::dgmod::CdgModule;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Basis (as columns) of `{v in I^p : x^_g v = 0 for all g}`; weight
/// homogeneous when the module carries weights.
pub fn socle(i: &CdgModule, p: i64) -> (Matrix, Option<Vec<i64>>) {
    let f = i.field();
    let n = i.dim(p);
    let mut stacked = Matrix::zeros(f, 0, n);
    for g in 0..i.ngens() {
        stacked = stacked.vstack(&i.action(p, g));
    }
    match i.complex().weights(p) {
        Some(ws) => {
            let mut distinct: Vec<i64> = ws.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            let mut basis = Matrix::zeros(f, n, 0);
            let mut out_w = Vec::new();
            for w in distinct {
                let idx: Vec<usize> = (0..n).filter(|&k| ws[k] == w).collect();
                let k = stacked.select_cols(&idx).kernel_basis();
                let mut emb = Matrix::zeros(f, n, k.cols());
                for (r, &row) in idx.iter().enumerate() {
                    for c in 0..k.cols() {
                        emb.set(row, c, k.get(r, c));
                    }
                }
                out_w.extend(std::iter::repeat_n(w, k.cols()));
                basis = basis.hstack(&emb);
            }
            (basis, Some(out_w))
        }
        None => (stacked.kernel_basis(), None),
    }
}

/// The socle complex `Hom_{A!}(k, I)` and its embedding into `I`.
#[derive(Clone, Debug)]
pub struct SocleComplex {
    pub complex: Complex,
    pub basis: Vec<Matrix>,
}

impl SocleComplex {
    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Matrix::cols).collect()
    }

    pub fn differential_is_zero(&self) -> bool {
        self.complex.degrees().all(|p| self.complex.d(p).is_zero())
    }
}

pub fn socle_complex(i: &CdgModule) -> Result<SocleComplex> {
    let f = i.field();
    if i.start() > i.end() {
        return Ok(SocleComplex { complex: Complex::zero(f), basis: vec![] });
    }
    let parts: Vec<(Matrix, Option<Vec<i64>>)> = (i.start()..=i.end()).map(|p| socle(i, p)).collect();
    let mut d = Vec::new();
    for (k, p) in (i.start()..i.end()).enumerate() {
        let img = i.d(p).mul(&parts[k].0);
        let x = parts[k + 1]
            .0
            .solve_matrix(&img)?
            .ok_or_else(|| Error::InconsistentData(format!("d does not preserve the socle in degree {p}")))?;
        d.push(x);
    }
    let dims = parts.iter().map(|(b, _)| b.cols()).collect();
    let mut complex = Complex::new(f, i.start(), dims, d)?;
    if parts.iter().all(|(_, w)| w.is_some()) {
        complex = complex.with_weights(parts.iter().map(|(_, w)| w.clone().unwrap_or_default()).collect())?;
    }
    if let Some((a, b)) = i.complex().reliable() {
        complex = complex.with_reliable(a, b);
    }
    let basis = parts.into_iter().map(|(b, _)| b).collect();
    Ok(SocleComplex { complex, basis })
}

/// Socle dimensions against the injective-hull count
/// `dim I^p = sum_r dim A!_r * dim soc^{p+r}`, checked where it is decidable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofreeReport {
    pub degrees: Vec<i64>,
    pub dims: Vec<usize>,
    pub hull_dims: Vec<usize>,
    pub cofree: bool,
}

pub fn cofree_report(i: &CdgModule, cdga: &CdgAlgebra) -> Result<CofreeReport> {
    let sc = socle_complex(i)?;
    let top = cdga.bound();
    let finite = cdga.dim(top) == 0;
    let lo = if finite { i.start() } else { i.start().max(i.end() - top as i64) };
    let mut rep = CofreeReport { degrees: vec![], dims: vec![], hull_dims: vec![], cofree: true };
    for p in lo..=i.end() {
        let mut hull = 0;
        for r in 0..=top {
            let q = p + r as i64;
            if q > i.end() {
                break;
            }
            hull += cdga.dim(r) * sc.basis[(q - i.start()) as usize].cols();
        }
        rep.degrees.push(p);
        rep.dims.push(i.dim(p));
        rep.hull_dims.push(hull);
        if hull != i.dim(p) {
            rep.cofree = false;
        }
    }
    Ok(rep)
}

/// Socle `N^p`, kernel `K^p` of the socle differential, and a retraction
/// `pi_p: I^p -> N^p` identifying `I` with `prod Hom_k(A!, N^p)`.
#[derive(Clone, Debug)]
pub struct CofreeDecomposition {
    pub start: i64,
    pub socle: Vec<Matrix>,
    /// `K^p` in socle coordinates.
    pub kernels: Vec<Matrix>,
    pub retraction: Vec<Matrix>,
}

impl CofreeDecomposition {
    pub fn socle_dims(&self) -> Vec<usize> {
        self.socle.iter().map(Matrix::cols).collect()
    }
}

pub fn cofree_decomposition(i: &CdgModule, cdga: &CdgAlgebra) -> Result<CofreeDecomposition> {
    let rep = cofree_report(i, cdga)?;
    if !rep.cofree {
        return Err(Error::NotCofree(format!("dimensions {:?} against hull {:?}", rep.dims, rep.hull_dims)));
    }
    let sc = socle_complex(i)?;
    let f = i.field();
    let mut retraction = Vec::new();
    for (k, p) in (i.start()..=i.end()).enumerate() {
        let b = &sc.basis[k];
        let full = b.hstack(&Matrix::identity(f, i.dim(p)));
        let pivots = full.rref().1;
        let basis = full.select_cols(&pivots);
        let inv = basis.inverse().expect("completed basis");
        retraction.push(inv.select_rows(&(0..b.cols()).collect::<Vec<_>>()));
    }
    let kernels = sc.complex.degrees().map(|p| sc.complex.d(p).kernel_basis()).collect();
    Ok(CofreeDecomposition { start: i.start(), socle: sc.basis, kernels, retraction })
}

/// Sub-module and sub-complex spanned by column bases `b[p]`.
pub fn submodule(i: &CdgModule, b: &[Matrix]) -> Result<CdgModule> {
    let f = i.field();
    if b.is_empty() {
        return Ok(CdgModule::zero(f, i.ngens()));
    }
    let restrict = |m: &Matrix, k: usize| -> Result<Matrix> {
        let img = m.mul(&b[k]);
        let next = if k + 1 < b.len() { b[k + 1].clone() } else { Matrix::zeros(f, 0, 0) };
        next.solve_matrix(&img)?.ok_or_else(|| Error::InconsistentData("not a submodule".into()))
    };
    let mut d = Vec::new();
    let mut acts = Vec::new();
    for (k, p) in (i.start()..=i.end()).enumerate() {
        if p < i.end() {
            d.push(restrict(&i.d(p), k)?);
        }
        acts.push(
            (0..i.ngens())
                .map(|g| if p < i.end() { restrict(&i.action(p, g), k) } else { Ok(Matrix::zeros(f, 0, b[k].cols())) })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let complex = Complex::new(f, i.start(), b.iter().map(Matrix::cols).collect(), d)?;
    CdgModule::new(complex, acts, i.ngens())
}

/// Quotient by the submodule spanned by `b[p]`.
pub fn quotient(i: &CdgModule, b: &[Matrix]) -> Result<CdgModule> {
    let f = i.field();
    if b.is_empty() {
        return Ok(CdgModule::zero(f, i.ngens()));
    }
    // Projections I^p -> I^p / B^p from a completed basis [B | C].
    let mut proj = Vec::new();
    let mut comp = Vec::new();
    for (k, p) in (i.start()..=i.end()).enumerate() {
        let full = b[k].hstack(&Matrix::identity(f, i.dim(p)));
        let pivots = full.rref().1;
        let basis = full.select_cols(&pivots);
        let inv = basis.inverse().expect("completed basis");
        let nb = b[k].cols();
        let rest: Vec<usize> = (nb..basis.cols()).collect();
        proj.push(inv.select_rows(&rest));
        comp.push(basis.select_cols(&rest));
    }
    let mut d = Vec::new();
    let mut acts = Vec::new();
    for (k, p) in (i.start()..=i.end()).enumerate() {
        let induced = |m: &Matrix| -> Matrix {
            if p < i.end() {
                proj[k + 1].mul(&m.mul(&comp[k]))
            } else {
                Matrix::zeros(f, 0, comp[k].cols())
            }
        };
        if p < i.end() {
            d.push(induced(&i.d(p)));
        }
        acts.push((0..i.ngens()).map(|g| induced(&i.action(p, g))).collect());
    }
    let complex = Complex::new(f, i.start(), comp.iter().map(Matrix::cols).collect(), d)?;
    CdgModule::new(complex, acts, i.ngens())
}

/// Rows whose common kernel is the column span of `k`.
fn complement_rows(k: &Matrix) -> Matrix {
    k.transpose().kernel_basis().transpose()
}

/// `t^{<=p} I` and `t_{>p} I` for a cofree `I` with `c = 0`.
pub fn t_truncate(i: &CdgModule, cdga: &CdgAlgebra, p: i64) -> Result<(CdgModule, CdgModule)> {
    if !cdga.is_flat() {
        return Err(Error::CurvedInput("t-truncation needs c = 0".into()));
    }
    let f = i.field();
    let dec = cofree_decomposition(i, cdga)?;
    let s0 = i.start();
    let mut bases = Vec::new();
    for s in i.start()..=i.end() {
        let mut cond = Matrix::zeros(f, 0, i.dim(s));
        for r in 0..=cdga.bound() {
            let q = s + r as i64;
            if q > i.end() || cdga.dim(r) == 0 {
                break;
            }
            let k = (q - s0) as usize;
            let pi = &dec.retraction[k];
            let filter = if q > p {
                pi.clone()
            } else if q == p {
                complement_rows(&dec.kernels[k]).mul(pi)
            } else {
                continue;
            };
            for w in cdga.dual().basis_words(r) {
                cond = cond.vstack(&filter.mul(&i.word_action(s, w)));
            }
        }
        bases.push(cond.kernel_basis());
    }
    let sub = submodule(i, &bases)?;
    let quo = quotient(i, &bases)?;
    Ok((sub, quo))
}
