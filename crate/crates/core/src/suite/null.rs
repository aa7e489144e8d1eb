//! Null-system membership on the free and cofree sides.
//!
//! A free complex `P` is null when `P` and `k (x)_U P` are acyclic; a
//! cofree `I` when `I` and its socle complex are. "Acyclic" is always
//! judged on the interior window passed in.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{ChainMap, HomologyReport};
use crate::deformation::CdgAlgebra;
use crate::dgmod::{CdgModule, UComplex};
use crate::error::{Error, Result};
use crate::functors::{FComplex, UAlgebra};
use crate::linalg::{Field, Matrix};

use super::cofree::{cofree_report, socle_complex};
use super::regrade::BigradedComplex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullReport {
    pub window: (i64, i64),
    pub homology: Vec<(i64, Option<i64>, usize)>,
    /// Fiber `k (x)_U P` on the free side, socle complex on the cofree side.
    pub test_homology: Vec<(i64, Option<i64>, usize)>,
    pub acyclic: bool,
    pub test_acyclic: bool,
    pub in_null_system: bool,
    /// Whether `id ~ 0` by a linear homotopy, when it was searched for.
    pub nullhomotopic: Option<bool>,
    /// `H F_i(I)` against the socle homology, when requested.
    pub f_matches_socle: Option<bool>,
}

impl NullReport {
    fn new(window: (i64, i64), h: &HomologyReport, t: &HomologyReport) -> Self {
        let (acyclic, test_acyclic) = (h.acyclic_interior(), t.acyclic_interior());
        NullReport {
            window,
            homology: h.nonzero(),
            test_homology: t.nonzero(),
            acyclic,
            test_acyclic,
            in_null_system: acyclic && test_acyclic,
            nullhomotopic: None,
            f_matches_socle: None,
        }
    }
}

/// `U` is finite when its filtration stops growing before the bound.
fn finite_dim(u: &UAlgebra) -> Option<usize> {
    let b = u.bound() as i64;
    (b >= 1 && u.dim(b) == u.dim(b - 1)).then(|| u.dim(b))
}

/// `M -> M / U_+ M` as a row-reduced projection together with a section.
fn fiber_maps(m: &crate::dgmod::UModule) -> (Matrix, Matrix) {
    let f = m.field();
    let n = m.dim();
    let span = (0..m.ngens()).fold(Matrix::zeros(f, n, 0), |acc, g| acc.hstack(m.action(g))).column_space();
    let full = span.hstack(&Matrix::identity(f, n));
    let piv = full.rref().1;
    let basis = full.select_cols(&piv);
    let k = span.cols();
    let inv = basis.inverse().expect("completed basis");
    let proj = inv.select_rows(&(k..n).collect::<Vec<_>>());
    let sec = basis.select_cols(&(k..n).collect::<Vec<_>>());
    (proj, sec)
}

/// Free side for a finite-dimensional `U`, with `P` given as `U`-modules.
pub fn null_test_free(u: &UAlgebra, p: &UComplex, window: (i64, i64), homotopy: bool) -> Result<NullReport> {
    let f = p.field();
    let du = finite_dim(u).ok_or_else(|| {
        Error::NonFreeComponent("freeness is decided only for finite-dimensional U; pass P as F(N)".into())
    })?;
    let c = p.complex();
    let maps: Vec<(Matrix, Matrix)> = c.degrees().map(|q| fiber_maps(&p.module(q))).collect();
    for (q, (proj, _)) in c.degrees().zip(&maps) {
        if proj.rows() * du != c.dim(q) {
            return Err(Error::NonFreeComponent(format!(
                "degree {q}: dimension {} with {} generators over dim U = {du}",
                c.dim(q),
                proj.rows()
            )));
        }
    }
    let fiber = if c.is_zero() {
        crate::complex::Complex::zero(f)
    } else {
        let at = |q: i64| &maps[(q - c.start()) as usize];
        let dims = c.degrees().map(|q| at(q).0.rows()).collect();
        let ds = c.degrees().filter(|&q| q < c.end()).map(|q| at(q + 1).0.mul(&c.d(q)).mul(&at(q).1)).collect();
        crate::complex::Complex::new(f, c.start(), dims, ds)?
    };
    let mut rep = NullReport::new(window, &c.homology(window.0, window.1), &fiber.homology(window.0, window.1));
    if homotopy {
        rep.nullhomotopic = Some(UComplex::nullhomotopy(&ChainMap::identity(c), &ChainMap::zero(), p, p).is_some());
    }
    Ok(rep)
}

/// Free side for `P = F(N)`, judged through the truncation `F_i`.
pub fn null_test_free_f(p: &FComplex, i: i64, window: (i64, i64)) -> Result<NullReport> {
    let h = p.truncation(i)?.homology(window.0, window.1);
    let fiber = p.source().complex().homology(window.0, window.1);
    Ok(NullReport::new(window, &h, &fiber))
}

#[derive(Clone, Debug)]
pub struct CofreeTest {
    /// Action degree of the grading in which the window is read.
    pub r: i64,
    pub window: (i64, i64),
    /// Compare `H F_i(I)` with the socle homology for this `U` and `i`.
    pub f_check: Option<(Arc<UAlgebra>, i64)>,
    pub homotopy: bool,
}

impl CofreeTest {
    pub fn new(window: (i64, i64)) -> Self {
        CofreeTest { r: 1, window, f_check: None, homotopy: false }
    }
}

pub fn null_test_cofree(i: &CdgModule, cdga: &CdgAlgebra, opts: &CofreeTest) -> Result<NullReport> {
    if !cofree_report(i, cdga)?.cofree {
        return Err(Error::NotCofree("injective hull dimensions disagree with the module".into()));
    }
    let (lo, hi) = opts.window;
    let sc = socle_complex(i)?;
    let socle_h = sc.complex.homology(lo, hi);
    let mut rep = if opts.r == 1 {
        NullReport::new(opts.window, &i.complex().homology(lo, hi), &socle_h)
    } else {
        let bg = BigradedComplex::from_module(i, cdga)?.regrade(opts.r);
        NullReport::new(opts.window, &bg.homology(lo, hi), &bg.socle()?.homology(lo, hi))
    };
    if let Some((u, idx)) = &opts.f_check {
        let fh = FComplex::new(u.clone(), i.clone()).truncation(*idx)?.homology(lo, hi);
        rep.f_matches_socle = Some((lo..=hi).all(|p| fh.dim(p) == socle_h.dim(p)));
    }
    if opts.homotopy {
        rep.nullhomotopic = Some(CdgModule::nullhomotopy(&ChainMap::identity(i.complex()), &ChainMap::zero(), i, i).is_some());
    }
    Ok(rep)
}

/// Divided-power contractions `W_j -> W_{j-1}` (`up = false`) or their
/// transposes `W*_j -> W*_{j+1}` (`up = true`), one per variable; basis
/// index is the exponent of the first variable.
fn shifts(f: Field, j: usize, up: bool) -> [Matrix; 2] {
    let (src, tgt) = if up { (j + 1, j + 2) } else { (j + 1, j) };
    let mut a = Matrix::zeros(f, tgt, src);
    let mut b = Matrix::zeros(f, tgt, src);
    for e in 0..src {
        // (e, j - e): lowering hits (e-1, j-e) and (e, j-e-1); raising (e+1, ..) and (e, ..+1).
        if up {
            a.set(e + 1, e, f.one());
            b.set(e, e, f.one());
        } else {
            if e > 0 {
                a.set(e - 1, e, f.one());
            }
            if e < j {
                b.set(e, e, f.one());
            }
        }
    }
    [a, b]
}

/// The acyclic complex of free `E(V*)`-modules, `dim V = 2`, obtained by
/// splicing the Koszul resolution of `k` with its coresolution through
/// `E -> E`, `l -> l y1 y2`. Terms run over `p` in `[-depth, depth]`
/// with generators acting in bidegree `(0, 1)`; regrade to `r = 1` before
/// treating it as a module. The end terms carry truncation homology.
pub fn spliced_exterior(field: Field, depth: usize) -> Result<(BigradedComplex, CdgAlgebra)> {
    let data = crate::deformation::DeformationData::trivial(crate::catalog::symmetric(field, 2));
    let cdga = data.build_cdga(3)?;
    let e = |n: i64| if (0..=2).contains(&n) { cdga.dim(n as usize) } else { 0 };
    let mut out = BigradedComplex::new(field, 0, vec![1, 1])?;
    // (p, generator weight shift c, rank of W)
    let mut terms: Vec<(i64, i64, usize)> = Vec::new();
    for j in (0..=depth).rev() {
        terms.push((-(j as i64), j as i64, j + 1));
    }
    for j in 0..depth {
        terms.push((j as i64 + 1, -2 - j as i64, j + 1));
    }
    for &(p, c, w) in &terms {
        for n in 0..=2 {
            out.set_dim(p, n + c, e(n) * w);
        }
    }
    let id_w = |w: usize| Matrix::identity(field, w);
    for &(p, c, w) in &terms {
        for n in 0..=2i64 {
            let q = n + c;
            for a in 0..2 {
                if n < 2 {
                    out.set_action(p, q, a, cdga.left_gen(n as usize, a)?.kron(&id_w(w)))?;
                }
            }
            if n == 2 && p != 0 {
                continue;
            }
            let right = |k: i64, a: usize| cdga.right_gen(k as usize, a);
            let d = if p < 0 {
                let s = shifts(field, w - 1, false);
                right(n, 0)?.kron(&s[0]).add(&right(n, 1)?.kron(&s[1]))
            } else if p == 0 {
                if n > 0 {
                    continue;
                }
                right(1, 1)?.mul(&right(0, 0)?)
            } else if p < depth as i64 {
                let s = shifts(field, w - 1, true);
                right(n, 0)?.kron(&s[0]).add(&right(n, 1)?.kron(&s[1]))
            } else {
                continue;
            };
            out.set_d(p, q, d)?;
        }
    }
    Ok((out, cdga))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::deformation::DeformationData;
    use crate::dgmod::UModule;
    use crate::functors::apply_g;

    #[test]
    fn spliced_complex_is_acyclic_but_not_null() {
        let f = Field::Rational;
        let (x, cdga) = spliced_exterior(f, 3).unwrap();
        assert!(x.is_valid());
        let h = x.homology(-2, 2);
        assert!(h.acyclic_interior(), "{:?}", h.nonzero());
        assert!(!x.homology(-3, 3).acyclic_interior());
        let m = x.regrade(1).to_module().unwrap();
        assert!(m.validate(&cdga).is_ok());
        let opts = CofreeTest { r: 0, window: (-2, 2), f_check: None, homotopy: true };
        let rep = null_test_cofree(&m, &cdga, &opts).unwrap();
        assert!(rep.acyclic && !rep.test_acyclic && !rep.in_null_system, "{rep:?}");
        assert_eq!(rep.nullhomotopic, Some(false));
    }

    #[test]
    fn cone_of_identity_is_null_on_both_sides() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let g = apply_g(&k, &cdga, 0, -4).unwrap().module;
        let cone = CdgModule::cone(&ChainMap::identity(g.complex()), &g, &g);
        let u = Arc::new(UAlgebra::new(&data, 6).unwrap());
        let opts = CofreeTest { r: 1, window: (-3, 0), f_check: Some((u, 4)), homotopy: true };
        let rep = null_test_cofree(&cone, &cdga, &opts).unwrap();
        assert!(rep.in_null_system, "{rep:?}");
        assert_eq!(rep.nullhomotopic, Some(true));
        assert_eq!(rep.f_matches_socle, Some(true));
        let zero = null_test_cofree(&CdgModule::zero(f, 2), &cdga, &CofreeTest::new((0, 0))).unwrap();
        assert!(zero.in_null_system);
    }

    #[test]
    fn g_of_k_matches_f_homology_and_is_not_null() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let g = apply_g(&k, &cdga, 0, -4).unwrap().module;
        let u = Arc::new(UAlgebra::new(&data, 6).unwrap());
        let opts = CofreeTest { r: 1, window: (-2, 0), f_check: Some((u, 4)), homotopy: false };
        let rep = null_test_cofree(&g, &cdga, &opts).unwrap();
        assert_eq!(rep.f_matches_socle, Some(true));
        assert!(!rep.in_null_system);
    }

    fn dual_numbers() -> (DeformationData, UAlgebra) {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::dual_numbers(f));
        let u = UAlgebra::new(&data, 3).unwrap();
        (data, u)
    }

    #[test]
    fn free_side_over_dual_numbers() {
        let f = Field::Rational;
        let (_, u) = dual_numbers();
        let x = Matrix::from_i64(f, &[&[0, 0], &[1, 0]]);
        let free = UModule::new(f, 2, vec![x.clone()]).unwrap();
        // ... -> U -x-> U -x-> U: acyclic inside, fiber has zero differential.
        let p = UComplex::new(0, vec![free.clone(); 5], vec![x.clone(); 4], 1).unwrap();
        let rep = null_test_free(&u, &p, (1, 3), true).unwrap();
        assert!(rep.acyclic && !rep.test_acyclic && !rep.in_null_system, "{rep:?}");
        assert_eq!(rep.nullhomotopic, Some(false));
        let cone = UComplex::cone(&ChainMap::identity(p.complex()), &p, &p);
        let rep = null_test_free(&u, &cone, (-1, 4), true).unwrap();
        assert!(rep.in_null_system && rep.nullhomotopic == Some(true));
        assert!(null_test_free(&u, &UComplex::zero(f, 1), (0, 0), false).unwrap().in_null_system);
        let k = UComplex::from_module(0, UModule::trivial(f, 1));
        assert!(matches!(null_test_free(&u, &k, (0, 0), false), Err(Error::NonFreeComponent(_))));
    }

    #[test]
    fn fg_of_k_has_tor_fiber() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let cdga = data.build_cdga(4).unwrap();
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        let g = apply_g(&k, &cdga, 0, -4).unwrap().module;
        let u = Arc::new(UAlgebra::new(&data, 6).unwrap());
        let rep = null_test_free_f(&FComplex::new(u, g), 4, (-2, 0)).unwrap();
        assert_eq!(rep.test_homology.iter().map(|e| e.2).sum::<usize>(), 4);
        assert!(!rep.in_null_system);
    }
}
