//! Minimal cofree model of `G(M)` by the perturbation lemma.
//!
//! A deformation retract of `(M, d_M)` onto its homology is extended
//! blockwise over `Hom_k(A!, -)`, then perturbed by the part of `d_G`
//! that lowers the `A!` degree. The output is checked, not trusted.

use serde::{Deserialize, Serialize};

use crate::complex::{ChainMap, Complex, Homotopy};
use crate::deformation::{CdgAlgebra, DeformationData};
use crate::dgmod::{CdgModule, UComplex};
use crate::error::{Error, Result};
use crate::functors::{apply_g, GModule};
use crate::linalg::Matrix;

use super::cofree::socle_complex;

/// `i: H -> M`, `p: M -> H`, `h: M -> M[-1]` with `pi = 1`, `1 - ip = dh + hd`.
struct Retract {
    start: i64,
    i: Vec<Matrix>,
    p: Vec<Matrix>,
    h: Vec<Matrix>,
}

fn retract(c: &Complex) -> Retract {
    let f = c.field();
    let mut out = Retract { start: c.start(), i: vec![], p: vec![], h: vec![] };
    let mut prev_c: Option<Matrix> = None;
    for q in c.degrees() {
        let n = c.dim(q);
        let b = match &prev_c {
            Some(cm) => c.d(q - 1).mul(cm),
            None => Matrix::zeros(f, n, 0),
        };
        let z = c.d(q).kernel_basis();
        let bz = b.hstack(&z);
        let piv = bz.rref().1;
        let hz: Vec<usize> = piv.iter().copied().filter(|&k| k >= b.cols()).collect();
        let hbasis = bz.select_cols(&hz);
        let bh = b.hstack(&hbasis);
        let full = bh.hstack(&Matrix::identity(f, n));
        let piv = full.rref().1;
        let basis = full.select_cols(&piv);
        let cbasis = basis.select_cols(&(bh.cols()..basis.cols()).collect::<Vec<_>>());
        let inv = basis.inverse().expect("completed basis");
        let (nb, nh) = (b.cols(), hbasis.cols());
        out.i.push(hbasis);
        out.p.push(inv.select_rows(&(nb..nb + nh).collect::<Vec<_>>()));
        let h = match &prev_c {
            Some(cm) => cm.mul(&inv.select_rows(&(0..nb).collect::<Vec<_>>())),
            None => Matrix::zeros(f, 0, n),
        };
        out.h.push(h);
        prev_c = Some(cbasis);
    }
    out
}

impl Retract {
    fn at<'a>(&self, v: &'a [Matrix], q: i64) -> Option<&'a Matrix> {
        let k = q - self.start;
        if k < 0 {
            None
        } else {
            v.get(k as usize)
        }
    }
    fn hdim(&self, q: i64) -> usize {
        self.at(&self.i, q).map_or(0, Matrix::cols)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimizationReport {
    pub socle_dims: Vec<(i64, usize)>,
    pub homology_dims: Vec<(i64, usize)>,
    pub socle_matches_homology: bool,
    pub socle_differential_zero: bool,
    pub minimal_valid: bool,
    pub maps_are_morphisms: bool,
    pub retraction_exact: bool,
    pub homotopy_certified: bool,
}

impl MinimizationReport {
    pub fn verified(&self) -> bool {
        self.socle_matches_homology
            && self.socle_differential_zero
            && self.minimal_valid
            && self.maps_are_morphisms
            && self.retraction_exact
            && self.homotopy_certified
    }
}

pub struct Minimization {
    pub g: CdgModule,
    pub minimal: CdgModule,
    pub to_minimal: ChainMap,
    pub from_minimal: ChainMap,
    /// Witness for `from_minimal . to_minimal ~ id` on `G(M)`.
    pub homotopy: Homotopy,
    pub report: MinimizationReport,
}

pub fn minimize_g(data: &DeformationData, m: &UComplex, lo: i64) -> Result<Minimization> {
    let span = (m.end() - lo).max(0) as usize;
    let cdga = data.build_cdga(span.max(3))?;
    if !cdga.is_flat() {
        return Err(Error::CurvedInput("minimization needs c = 0".into()));
    }
    let g = apply_g(m, &cdga, 0, lo)?;
    minimize_module(&cdga, m, &g)
}

fn minimize_module(cdga: &CdgAlgebra, m: &UComplex, g: &GModule) -> Result<Minimization> {
    let f = m.field();
    let gm = &g.module;
    let rt = retract(m.complex());
    let (s, e) = (gm.start(), gm.end());
    if s > e {
        let z = CdgModule::zero(f, cdga.ngens());
        return Ok(Minimization {
            g: gm.clone(),
            minimal: z,
            to_minimal: ChainMap::new(),
            from_minimal: ChainMap::new(),
            homotopy: Homotopy { maps: Default::default() },
            report: MinimizationReport {
                socle_dims: vec![],
                homology_dims: vec![],
                socle_matches_homology: true,
                socle_differential_zero: true,
                minimal_valid: true,
                maps_are_morphisms: true,
                retraction_exact: true,
                homotopy_certified: true,
            },
        });
    }
    let idx = |p: i64| (p - s) as usize;
    let gdim = |p: i64| if p < s || p > e { 0 } else { gm.dim(p) };
    // Layout of I: same blocks as G with H in place of M.
    let ilayout: Vec<Vec<(usize, usize, usize)>> = (s..=e)
        .map(|p| {
            let mut off = 0;
            g.blocks(p)
                .iter()
                .map(|&(r, _, _)| {
                    let dh = rt.hdim(p + r as i64);
                    let b = (r, off, dh);
                    off += cdga.dim(r) * dh;
                    b
                })
                .collect()
        })
        .collect();
    let idim = |p: i64| -> usize {
        if p < s || p > e {
            0
        } else {
            ilayout[idx(p)].iter().map(|&(r, _, dh)| cdga.dim(r) * dh).sum()
        }
    };
    let one = f.one();
    let sign = |r: usize| one.signed(r as i64);

    let mut ig = Vec::new();
    let mut pg = Vec::new();
    let mut hg = Vec::new();
    let mut d0 = Vec::new();
    for p in s..=e {
        let mut i_m = Matrix::zeros(f, gdim(p), idim(p));
        let mut p_m = Matrix::zeros(f, idim(p), gdim(p));
        let mut h_m = Matrix::zeros(f, gdim(p - 1), gdim(p));
        let mut d_m = Matrix::zeros(f, gdim(p + 1), gdim(p));
        for (&(r, goff, _), &(_, ioff, _)) in g.blocks(p).iter().zip(&ilayout[idx(p)]) {
            let q = p + r as i64;
            let id = Matrix::identity(f, cdga.dim(r));
            if let Some(x) = rt.at(&rt.i, q) {
                i_m.set_block(goff, ioff, &id.kron(x));
            }
            if let Some(x) = rt.at(&rt.p, q) {
                p_m.set_block(ioff, goff, &id.kron(x));
            }
            if p > s {
                if let Some(&(_, toff, _)) = g.blocks(p - 1).iter().find(|b| b.0 == r) {
                    if let Some(x) = rt.at(&rt.h, q) {
                        // h = -H with H = (-1)^r h_M blockwise.
                        h_m.set_block(toff, goff, &id.kron(x).scale(&sign(r + 1)));
                    }
                }
            }
            if p < e {
                if let Some(&(_, toff, _)) = g.blocks(p + 1).iter().find(|b| b.0 == r) {
                    d_m.set_block(toff, goff, &id.kron(&m.d(q)).scale(&sign(r)));
                }
            }
        }
        ig.push(i_m);
        pg.push(p_m);
        hg.push(h_m);
        d0.push(d_m);
    }
    let delta: Vec<Matrix> = (s..=e).map(|p| gm.d(p).sub(&d0[idx(p)])).collect();
    // (1 - delta h)^{-1} on G^p, as a finite geometric series.
    let series: Vec<Matrix> = (s..=e)
        .map(|p| {
            let id = Matrix::identity(f, gdim(p));
            if p == s {
                return id;
            }
            let x = delta[idx(p - 1)].mul(&hg[idx(p)]);
            let mut acc = id.clone();
            let mut pow = id;
            loop {
                pow = pow.mul(&x);
                if pow.is_zero() {
                    break acc;
                }
                acc = acc.add(&pow);
            }
        })
        .collect();
    let a: Vec<Matrix> = (s..=e)
        .map(|p| if p < e { series[idx(p + 1)].mul(&delta[idx(p)]) } else { Matrix::zeros(f, 0, gdim(p)) })
        .collect();
    let mut d_i = Vec::new();
    let mut to_min = ChainMap::new();
    let mut from_min = ChainMap::new();
    let mut homotopy = Homotopy { maps: Default::default() };
    let mut actions = Vec::new();
    for p in s..=e {
        let k = idx(p);
        if p < e {
            d_i.push(pg[k + 1].mul(&a[k]).mul(&ig[k]));
        }
        let i1 = if p < e { ig[k].add(&hg[k + 1].mul(&a[k]).mul(&ig[k])) } else { ig[k].clone() };
        let (p1, h1) = if p > s {
            (pg[k].add(&pg[k].mul(&a[k - 1]).mul(&hg[k])), hg[k].add(&hg[k].mul(&a[k - 1]).mul(&hg[k])))
        } else {
            (pg[k].clone(), hg[k].clone())
        };
        from_min.insert(p, i1);
        to_min.insert(p, p1);
        homotopy.maps.insert(p, h1.scale(&sign(p.rem_euclid(2) as usize)));
        actions.push(
            (0..cdga.ngens())
                .map(|gi| if p < e { pg[k + 1].mul(&gm.action(p, gi)).mul(&ig[k]) } else { Matrix::zeros(f, 0, idim(p)) })
                .collect(),
        );
    }
    let complex = Complex::new(f, s, (s..=e).map(idim).collect(), d_i)?;
    let minimal = CdgModule::new(complex, actions, cdga.ngens())?;

    let sc = socle_complex(&minimal)?;
    let hom = m.complex().full_homology();
    let socle_dims: Vec<(i64, usize)> = (s..=e).zip(sc.dims()).filter(|&(_, d)| d > 0).collect();
    let homology_dims: Vec<(i64, usize)> =
        m.complex().degrees().map(|p| (p, hom.dim(p))).filter(|&(p, d)| d > 0 && p >= s).collect();
    let ident = ChainMap::identity(minimal.complex());
    let retraction_exact = (s..=e).all(|p| {
        to_min.at(p, gm.complex(), minimal.complex()).mul(&from_min.at(p, minimal.complex(), gm.complex()))
            == ident.at(p, minimal.complex(), minimal.complex())
    });
    let round = from_min.compose(&to_min, gm.complex(), minimal.complex(), gm.complex());
    let linear = (s..=e).all(|p| {
        (0..cdga.ngens()).all(|gi| {
            let sp1 = homotopy.at(p + 1, gm.complex(), gm.complex());
            let sp = homotopy.at(p, gm.complex(), gm.complex());
            let lhs = if p < e { sp1.mul(&gm.action(p, gi)) } else { Matrix::zeros(f, gdim(p), gdim(p)) };
            let rhs = if p > s { gm.action(p - 1, gi).mul(&sp) } else { Matrix::zeros(f, gdim(p), gdim(p)) };
            lhs == rhs
        })
    });
    let report = MinimizationReport {
        socle_matches_homology: socle_dims == homology_dims,
        socle_dims,
        homology_dims,
        socle_differential_zero: sc.differential_is_zero(),
        minimal_valid: minimal.validate(cdga).is_ok(),
        maps_are_morphisms: gm.is_morphism(&to_min, &minimal) && minimal.is_morphism(&from_min, gm),
        retraction_exact,
        homotopy_certified: linear
            && homotopy.certifies(&round, &ChainMap::identity(gm.complex()), gm.complex(), gm.complex()),
    };
    Ok(Minimization { g: gm.clone(), minimal, to_minimal: to_min, from_minimal: from_min, homotopy, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::catalog;
    use crate::dgmod::UModule;
    use crate::suite::random;

    fn s2() -> DeformationData {
        DeformationData::trivial(catalog::symmetric(Field::Rational, 2))
    }

    #[test]
    fn single_module_minimizes_to_itself() {
        let f = Field::Rational;
        let m = UComplex::from_module(0, UModule::trivial(f, 2));
        let min = minimize_g(&s2(), &m, -3).unwrap();
        assert!(min.report.verified(), "{:?}", min.report);
        assert_eq!(min.report.socle_dims, vec![(0, 1)]);
    }

    #[test]
    fn two_term_complex_keeps_both_homology_classes() {
        let f = Field::Rational;
        // k -> k with zero map: H^0 = k, H^1 = k
        let k = UModule::trivial(f, 2);
        let m = UComplex::new(0, vec![k.clone(), k], vec![Matrix::zeros(f, 1, 1)], 2).unwrap();
        let min = minimize_g(&s2(), &m, -3).unwrap();
        assert!(min.report.verified(), "{:?}", min.report);
        assert_eq!(min.report.socle_dims, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn acyclic_complex_minimizes_to_zero() {
        let f = Field::Rational;
        let k = UModule::trivial(f, 2);
        let m = UComplex::new(0, vec![k.clone(), k], vec![Matrix::identity(f, 1)], 2).unwrap();
        let min = minimize_g(&s2(), &m, -3).unwrap();
        assert!(min.report.verified(), "{:?}", min.report);
        assert_eq!(min.minimal.complex().total_dim(), 0);
    }

    #[test]
    fn random_complexes_minimize() {
        let f = Field::prime(5).unwrap();
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let mut r = random::rng(5);
        for _ in 0..5 {
            let m = random::commuting_complex(f, 2, -2, 3, 3, &mut r).unwrap();
            let min = minimize_g(&data, &m, -5).unwrap();
            assert!(min.report.verified(), "{:?}", min.report);
        }
    }
}
