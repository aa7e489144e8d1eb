//! Truncated quotients of a tensor algebra by (possibly nonhomogeneous)
//! quadratic relations, computed level by level as exact spans.
//!
//! Level `m` is `T_{<=m} / I_{<=m}`. It is presented as a quotient of
//! `k (+) level(m-1) (x) V`, so every basis element remembers the
//! previous-level element and the generator it was built from.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

pub type Word = Vec<usize>;

/// One relation `sum q_ab x_a x_b + sum l_a x_a + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub quad: Vec<Scalar>,
    pub lin: Vec<Scalar>,
    pub constant: Scalar,
}

impl Relation {
    pub fn homogeneous(field: Field, quad: Vec<Scalar>) -> Self {
        let n = (quad.len() as f64).sqrt() as usize;
        Relation { quad, lin: vec![field.zero(); n], constant: field.zero() }
    }
}

#[derive(Clone, Debug)]
struct Level {
    words: Vec<Word>,
    // class of the empty word
    unit: Vec<Scalar>,
    // previous level -> this level
    incl: Matrix,
    right: Vec<Matrix>,
}

/// `T(V)/(P)` truncated at filtration level `bound`.
#[derive(Clone, Debug)]
pub struct FilteredAlgebra {
    field: Field,
    ngens: usize,
    bound: usize,
    levels: Vec<Level>,
    gr_dims: Vec<usize>,
    prefix_ok: bool,
    index: HashMap<Word, usize>,
    top_right: Vec<Matrix>,
}

fn word_order(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

// Class of the word `w` at level `m`.
fn class_at(levels: &[Level], m: usize, w: &[usize]) -> Vec<Scalar> {
    let start = m - w.len();
    let mut v = levels[start].unit.clone();
    for (i, &g) in w.iter().enumerate() {
        v = levels[start + i + 1].right[g].apply(&v);
    }
    v
}

impl FilteredAlgebra {
    pub fn build(field: Field, ngens: usize, relations: &[Relation], bound: usize) -> Result<Self> {
        for r in relations {
            if r.quad.len() != ngens * ngens || r.lin.len() != ngens {
                return Err(Error::Dimension(format!(
                    "relation has {} quadratic and {} linear coordinates for {ngens} generators",
                    r.quad.len(),
                    r.lin.len()
                )));
            }
        }
        let n = ngens;
        let mut levels = vec![Level {
            words: vec![vec![]],
            unit: vec![field.one()],
            incl: Matrix::zeros(field, 1, 0),
            right: vec![],
        }];
        // Every word that was a basis word at some level. Multiplying the
        // relations by these on the left spans the new part of the ideal.
        let mut multipliers: Vec<Word> = vec![vec![]];
        let mut seen: HashSet<Word> = multipliers.iter().cloned().collect();
        for m in 0..bound {
            let dm = levels[m].words.len();
            let fdim = 1 + dm * n;
            let words: Vec<Word> = (0..fdim)
                .map(|c| {
                    if c == 0 {
                        vec![]
                    } else {
                        let mut w = levels[m].words[(c - 1) / n].clone();
                        w.push((c - 1) % n);
                        w
                    }
                })
                .collect();
            // Largest words first so that pivots eliminate them.
            let mut order: Vec<usize> = (0..fdim).collect();
            order.sort_by(|&a, &b| word_order(&words[b], &words[a]));
            let mut pos = vec![0; fdim];
            for (k, &c) in order.iter().enumerate() {
                pos[c] = k;
            }

            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            // Adds `coef * (class_m(w) (x) x_g)` to `row`.
            let place = |row: &mut Vec<Scalar>, coef: &Scalar, w: &[usize], g: usize| {
                let v = class_at(&levels, m, w);
                for (i, vi) in v.iter().enumerate() {
                    if !vi.is_zero() {
                        let c = pos[1 + i * n + g];
                        row[c] = row[c].add(&coef.mul(vi));
                    }
                }
            };
            for a in multipliers.iter().filter(|a| a.len() < m) {
                for r in relations {
                    let mut row = vec![field.zero(); fdim];
                    let mut ag = a.clone();
                    ag.push(0);
                    for g in 0..n {
                        *ag.last_mut().unwrap() = g;
                        for d in 0..n {
                            let q = &r.quad[g * n + d];
                            if !q.is_zero() {
                                place(&mut row, q, &ag, d);
                            }
                        }
                        if !r.lin[g].is_zero() {
                            place(&mut row, &r.lin[g], a, g);
                        }
                    }
                    if !r.constant.is_zero() {
                        match a.split_last() {
                            None => row[pos[0]] = row[pos[0]].add(&r.constant),
                            Some((&g, head)) => place(&mut row, &r.constant, head, g),
                        }
                    }
                    rows.push(row);
                }
            }
            let rel = Matrix::from_rows(field, fdim, &rows)?;
            let (rr, pivots) = rel.rref();
            let mut is_pivot = vec![None; fdim];
            for (r, &p) in pivots.iter().enumerate() {
                is_pivot[p] = Some(r);
            }
            // Basis: non-pivot coordinates, in canonical word order.
            let mut basis: Vec<usize> = (0..fdim).filter(|&c| is_pivot[pos[c]].is_none()).collect();
            basis.sort_by(|&a, &b| word_order(&words[a], &words[b]));
            let mut bidx = vec![usize::MAX; fdim];
            for (k, &c) in basis.iter().enumerate() {
                bidx[c] = k;
            }
            let dnext = basis.len();
            // Projection F_{m+1} -> level m+1.
            let mut pi = Matrix::zeros(field, dnext, fdim);
            for c in 0..fdim {
                match is_pivot[pos[c]] {
                    None => pi.set(bidx[c], c, field.one()),
                    Some(r) => {
                        for &b in &basis {
                            if !rr.is_entry_zero(r, pos[b]) {
                                pi.set(bidx[b], c, rr.get(r, pos[b]).neg());
                            }
                        }
                    }
                }
            }
            let right = (0..n)
                .map(|g| pi.select_cols(&(0..dm).map(|k| 1 + k * n + g).collect::<Vec<_>>()))
                .collect();
            levels.push(Level {
                words: basis.iter().map(|&c| words[c].clone()).collect(),
                unit: pi.col(0),
                incl: Matrix::zeros(field, dnext, dm),
                right,
            });
            let mut incl = Matrix::zeros(field, dnext, dm);
            for (k, w) in levels[m].words.iter().enumerate() {
                for (i, x) in class_at(&levels, m + 1, w).into_iter().enumerate() {
                    if !x.is_zero() {
                        incl.set(i, k, x);
                    }
                }
            }
            levels[m + 1].incl = incl;
            for w in &levels[m + 1].words {
                if seen.insert(w.clone()) {
                    multipliers.push(w.clone());
                }
            }
        }

        let mut gr_dims = vec![levels[0].words.len()];
        for m in 1..=bound {
            gr_dims.push(levels[m].words.len() - levels[m].incl.rank());
        }

        let top = &levels[bound];
        let index: HashMap<Word, usize> =
            top.words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let dtop = top.words.len();

        // embed[m]: level m -> top
        let mut embed = vec![Matrix::identity(field, dtop); bound + 1];
        for m in (0..bound).rev() {
            embed[m] = embed[m + 1].mul(&levels[m + 1].incl);
        }
        let mut prefix_ok = true;
        for (m, level) in levels.iter().enumerate() {
            let expect: Vec<&Word> = top.words.iter().filter(|w| w.len() <= m).collect();
            if expect.len() != level.words.len()
                || expect.iter().zip(&level.words).any(|(a, b)| *a != b)
            {
                prefix_ok = false;
                break;
            }
            let mut inc = Matrix::zeros(field, dtop, level.words.len());
            for k in 0..level.words.len() {
                inc.set(k, k, field.one());
            }
            if embed[m] != inc {
                prefix_ok = false;
                break;
            }
        }

        let mut top_right = vec![Matrix::zeros(field, dtop, dtop); n];
        if prefix_ok {
            for (t, w) in top.words.iter().enumerate() {
                let l = w.len();
                if l >= bound {
                    continue;
                }
                for (g, tr) in top_right.iter_mut().enumerate() {
                    // level-l index equals top index under the prefix property
                    let col = levels[l + 1].right[g].col(t);
                    let v = embed[l + 1].apply(&col);
                    for (i, x) in v.into_iter().enumerate() {
                        if !x.is_zero() {
                            tr.set(i, t, x);
                        }
                    }
                }
            }
        }

        Ok(FilteredAlgebra { field, ngens, bound, levels, gr_dims, prefix_ok, index, top_right })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `dim gr_m` for `m = 0..=bound`.
    pub fn gr_dims(&self) -> &[usize] {
        &self.gr_dims
    }

    /// `dim U_{<=m}` as computed at level `m`.
    pub fn level_dim(&self, m: usize) -> usize {
        self.levels[m].words.len()
    }

    /// True when each level embeds into the next as a coordinate prefix.
    /// All multiplication below requires this.
    pub fn has_monomial_filtration(&self) -> bool {
        self.prefix_ok
    }

    fn require_prefix(&self) -> Result<()> {
        if self.prefix_ok {
            Ok(())
        } else {
            Err(Error::InconsistentData(
                "truncation is not of PBW type; the monomial basis is not compatible with the filtration".into(),
            ))
        }
    }

    /// Basis words of the top level in canonical order (length, then lex).
    pub fn words(&self) -> &[Word] {
        &self.levels[self.bound].words
    }

    pub fn dim(&self) -> usize {
        self.words().len()
    }

    /// Number of basis words of length `<= m` (a prefix of the basis).
    pub fn dim_upto(&self, m: usize) -> usize {
        self.words().iter().filter(|w| w.len() <= m).count()
    }

    /// Indices of basis words of length exactly `n`.
    pub fn degree_range(&self, n: usize) -> std::ops::Range<usize> {
        let lo = self.dim_upto_signed(n as i64 - 1);
        let hi = self.dim_upto_signed(n as i64);
        lo..hi
    }

    fn dim_upto_signed(&self, m: i64) -> usize {
        if m < 0 {
            0
        } else {
            self.dim_upto(m as usize)
        }
    }

    pub fn word_index(&self, w: &[usize]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn word_len(&self, i: usize) -> usize {
        self.words()[i].len()
    }

    /// Right multiplication by generator `g` (columns for top-degree words are zero).
    pub fn right_gen(&self, g: usize) -> &Matrix {
        &self.top_right[g]
    }

    /// Largest word length with a nonzero coefficient; `None` for zero.
    pub fn filtration_degree(&self, v: &[Scalar]) -> Option<usize> {
        v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| self.word_len(i)).max()
    }

    pub fn unit(&self) -> Vec<Scalar> {
        self.levels[self.bound].unit.clone()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    /// The image of an arbitrary word.
    pub fn word_vector(&self, w: &[usize]) -> Result<Vec<Scalar>> {
        self.require_prefix()?;
        if w.len() > self.bound {
            return Err(Error::DegreeOverflow(format!("word of length {} exceeds bound {}", w.len(), self.bound)));
        }
        let mut v = self.unit();
        for &g in w {
            v = self.top_right[g].apply(&v);
        }
        Ok(v)
    }

    /// Product `u * v`, refusing results beyond the bound.
    pub fn mul(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
        self.require_prefix()?;
        let (Some(du), Some(dv)) = (self.filtration_degree(u), self.filtration_degree(v)) else {
            return Ok(vec![self.field.zero(); self.dim()]);
        };
        if du + dv > self.bound {
            return Err(Error::DegreeOverflow(format!(
                "product of filtration degrees {du} and {dv} exceeds bound {}",
                self.bound
            )));
        }
        let mut out = vec![self.field.zero(); self.dim()];
        for (j, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut w = u.to_vec();
            for &g in &self.words()[j] {
                w = self.top_right[g].apply(&w);
            }
            for (o, x) in out.iter_mut().zip(w) {
                *o = o.add(&c.mul(&x));
            }
        }
        Ok(out)
    }

    /// Matrix of `v -> x_g * v` on the whole truncation (top-degree columns zero).
    pub fn left_gen(&self, g: usize) -> Result<Matrix> {
        self.require_prefix()?;
        let d = self.dim();
        let mut m = Matrix::zeros(self.field, d, d);
        let xg = self.word_vector(&[g])?;
        for j in 0..d {
            if self.word_len(j) + 1 > self.bound {
                continue;
            }
            let col = self.mul(&xg, &self.basis_vector(j))?;
            for (i, x) in col.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x);
                }
            }
        }
        Ok(m)
    }
}
