//! Tor and Ext through `G` and `F'`, and the generalized Koszul complex.

use std::sync::Arc;

use crate::complex::{ChainMap, Complex, HomologyEntry, HomologyReport};
use crate::deformation::{CdgAlgebra, DeformationData};
use crate::dgmod::{UComplex, UModule};
use crate::error::{Error, Result};
use crate::functors::{apply_fprime, apply_g, counit, UAlgebra};

fn flat_cdga(data: &DeformationData, bound: usize) -> Result<CdgAlgebra> {
    let cdga = data.build_cdga(bound.max(3))?;
    if !cdga.is_flat() {
        return Err(Error::CurvedInput("the curvature c is nonzero".into()));
    }
    Ok(cdga)
}

/// `Tor_p^U(k, M) = H^{-p} G(M)` for `p` in `range`.
pub fn tor(data: &DeformationData, m: &UComplex, range: (i64, i64)) -> Result<HomologyReport> {
    let span = (m.end() - m.start()).max(0);
    let cdga = flat_cdga(data, (range.1 + span + 1).max(0) as usize)?;
    let g = apply_g(m, &cdga, 0, -range.1 - 1)?;
    let h = g.module.complex().homology(-range.1, -range.0);
    let mut entries: Vec<HomologyEntry> =
        h.entries.into_iter().map(|e| HomologyEntry { degree: -e.degree, ..e }).collect();
    entries.sort_by_key(|e| (e.degree, e.weight));
    Ok(HomologyReport { window: range, entries, stabilized: None })
}

/// `Ext_U^p(k, M) = H^p F'(M)` for `p` in `range`.
pub fn ext(data: &DeformationData, m: &UComplex, range: (i64, i64)) -> Result<HomologyReport> {
    let need = (range.1 - m.start() + 1).max(0) as usize;
    let cdga = flat_cdga(data, need)?;
    Ok(apply_fprime(&cdga, m)?.complex().homology(range.0, range.1))
}

/// `... -> U (x) (A!_p)^* (x) M -> ...`, i.e. `F_i G(M)`, with its augmentation to `M`.
pub struct KoszulComplex {
    pub complex: Complex,
    pub augmentation: ChainMap,
    pub target: Complex,
}

pub fn koszul_ce_complex(data: &DeformationData, m: &UModule, filtration: i64) -> Result<KoszulComplex> {
    let cdga = flat_cdga(data, 3)?;
    let top = (0..=cdga.bound()).rev().find(|&r| cdga.dim(r) > 0).unwrap_or(0) as i64;
    let i = filtration.max(top);
    let u = Arc::new(UAlgebra::new(data, (i + 1) as usize)?);
    let mc = UComplex::from_module(0, m.clone());
    let c = counit(&u, &cdga, &mc, i, -(cdga.bound() as i64))?;
    Ok(KoszulComplex { complex: c.fg, augmentation: c.map, target: c.target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{Field, Matrix};

    /// Chevalley-Eilenberg ranks from structure constants, on subsets.
    fn ce_homology(f: Field, n: usize, bracket: &dyn Fn(usize, usize) -> Vec<i64>) -> Vec<usize> {
        let subsets = |p: usize| -> Vec<u32> { (0u32..1 << n).filter(|s| s.count_ones() as usize == p).collect() };
        let boundary = |p: usize| -> Matrix {
            let (src, tgt) = (subsets(p), subsets(p.saturating_sub(1)));
            let mut m = Matrix::zeros(f, tgt.len(), src.len());
            if p < 2 {
                return m;
            }
            for (c, &s) in src.iter().enumerate() {
                let idx: Vec<usize> = (0..n).filter(|k| s >> k & 1 == 1).collect();
                for a in 0..idx.len() {
                    for b in a + 1..idx.len() {
                        let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                        let rest = s & !(1 << idx[a]) & !(1 << idx[b]);
                        for (k, &ck) in bracket(idx[a], idx[b]).iter().enumerate() {
                            if ck == 0 || rest >> k & 1 == 1 {
                                continue;
                            }
                            // x_k placed in front of the remaining sorted wedge
                            let pos = (0..k).filter(|j| rest >> j & 1 == 1).count();
                            let sgn = sign * ck * if pos % 2 == 0 { 1 } else { -1 };
                            let r = tgt.iter().position(|&t| t == rest | 1 << k).unwrap();
                            m.add_at(r, c, &f.int(sgn));
                        }
                    }
                }
            }
            m
        };
        (0..=n)
            .map(|p| subsets(p).len() - boundary(p).rank() - if p < n { boundary(p + 1).rank() } else { 0 })
            .collect()
    }

    #[test]
    fn heisenberg_tor_matches_ce_oracle() {
        let f = Field::Rational;
        let data = catalog::heisenberg(f);
        let k = UComplex::from_module(0, UModule::trivial(f, 3));
        let t = tor(&data, &k, (0, 3)).unwrap();
        let oracle = ce_homology(f, 3, &|i, j| if (i, j) == (0, 1) { vec![0, 0, 1] } else { vec![0, 0, 0] });
        assert_eq!(oracle, vec![1, 2, 2, 1]);
        assert_eq!(t.dims(), oracle);
    }

    #[test]
    fn symmetric_tor_and_ext() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let k = UComplex::from_module(0, UModule::trivial(f, 2));
        assert_eq!(tor(&data, &k, (0, 3)).unwrap().dims(), vec![1, 2, 1, 0]);
        assert_eq!(ext(&data, &k, (0, 3)).unwrap().dims(), vec![1, 2, 1, 0]);
    }

    #[test]
    fn dual_numbers_ext_is_periodic() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::dual_numbers(f));
        let k = UComplex::from_module(0, UModule::trivial(f, 1));
        let e = ext(&data, &k, (0, 5)).unwrap();
        assert_eq!(e.dims(), vec![1; 6]);
    }

    #[test]
    fn curved_data_is_rejected() {
        let f = Field::Rational;
        let data = catalog::two_point(f, f.int(1), f.int(2));
        let m = UComplex::from_module(0, UModule::character(f, &[f.int(1)]));
        assert!(matches!(tor(&data, &m, (0, 2)), Err(Error::CurvedInput(_))));
    }

    #[test]
    fn koszul_complex_resolves_k() {
        let f = Field::Rational;
        let data = DeformationData::trivial(catalog::symmetric(f, 2));
        let kc = koszul_ce_complex(&data, &UModule::trivial(f, 2), 3).unwrap();
        assert!(kc.augmentation.is_chain_map(&kc.complex, &kc.target));
        assert_eq!(kc.complex.full_homology().nonzero(), vec![(0, None, 1)]);
    }
}
