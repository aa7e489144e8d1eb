//! Quadratic presentations `T(V)/(R)`, the quadratic dual and graded truncations.

use serde::{Deserialize, Serialize};

use crate::algebra::{FilteredAlgebra, Relation, Word};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

/// Generators `x_a` with positive weights and a relation space `R` in `V (x) V`.
///
/// Relation coordinates are indexed by `a * n + b` for `x_a (x) x_b`. The
/// relations are stored as the rows of their reduced echelon form, so two
/// presentations of the same subspace compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticPresentation {
    field: Field,
    generators: Vec<String>,
    weights: Vec<u32>,
    relations: Matrix,
}

impl QuadraticPresentation {
    pub fn new(
        field: Field,
        generators: Vec<String>,
        weights: Option<Vec<u32>>,
        relations: Matrix,
    ) -> Result<Self> {
        let n = generators.len();
        if relations.cols() != n * n {
            return Err(Error::Dimension(format!(
                "relations have {} columns, expected {} for {n} generators",
                relations.cols(),
                n * n
            )));
        }
        if relations.field() != field {
            return Err(Error::InvalidField("relations are over a different field".into()));
        }
        let weights = weights.unwrap_or_else(|| vec![1; n]);
        if weights.len() != n || weights.contains(&0) {
            return Err(Error::InconsistentData("weights must be positive, one per generator".into()));
        }
        for i in 0..relations.rows() {
            let mut seen = None;
            for c in 0..n * n {
                if relations.is_entry_zero(i, c) {
                    continue;
                }
                let w = weights[c / n] + weights[c % n];
                if *seen.get_or_insert(w) != w {
                    return Err(Error::InconsistentData(format!("relation {i} is not weight-homogeneous")));
                }
            }
        }
        let relations = relations.row_space();
        Ok(QuadraticPresentation { field, generators, weights, relations })
    }

    /// Generators named `x1..xn` with unit weights.
    pub fn with_default_names(field: Field, n: usize, relations: Matrix) -> Result<Self> {
        Self::new(field, (1..=n).map(|i| format!("x{i}")).collect(), None, relations)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn has_trivial_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    pub fn word_weight(&self, w: &[usize]) -> u32 {
        w.iter().map(|&g| self.weights[g]).sum()
    }

    /// Rows spanning `R`, in reduced echelon form.
    pub fn relations(&self) -> &Matrix {
        &self.relations
    }

    pub fn relation_dim(&self) -> usize {
        self.relations.rows()
    }

    /// Relations in the form used by the algebra engine.
    pub fn engine_relations(&self) -> Vec<Relation> {
        (0..self.relations.rows())
            .map(|i| Relation::homogeneous(self.field, self.relations.row(i)))
            .collect()
    }

    /// The dual presentation on `V*` with relations `R^perp`.
    ///
    /// `x^_w` pairs with `x_{w'}` when `w` is the reverse of `w'`, so
    /// `R^perp` is the transposed annihilator of `R`. With this pairing the
    /// canonical element `sum x_a (x) x^_a` behaves as in the Koszul complex.
    pub fn quadratic_dual(&self) -> QuadraticPresentation {
        let n = self.ngens();
        let ann = self.relations.kernel_basis();
        let mut rows = Matrix::zeros(self.field, ann.cols(), n * n);
        for k in 0..ann.cols() {
            for a in 0..n {
                for b in 0..n {
                    if !ann.is_entry_zero(b * n + a, k) {
                        rows.set(k, a * n + b, ann.get(b * n + a, k));
                    }
                }
            }
        }
        let generators = self
            .generators
            .iter()
            .map(|g| match g.strip_suffix('*') {
                Some(base) => base.to_string(),
                None => format!("{g}*"),
            })
            .collect();
        QuadraticPresentation {
            field: self.field,
            generators,
            weights: self.weights.clone(),
            relations: rows.row_space(),
        }
    }

    pub fn truncate(&self, bound: usize) -> Result<GradedAlgebra> {
        let alg = FilteredAlgebra::build(self.field, self.ngens(), &self.engine_relations(), bound)?;
        Ok(GradedAlgebra { presentation: self.clone(), alg })
    }

    /// `(R^perp)^perp = R` and the double dual has the same graded dimensions.
    pub fn double_dual_check(&self, bound: usize) -> Result<bool> {
        let dd = self.quadratic_dual().quadratic_dual();
        if dd.relations != self.relations {
            return Ok(false);
        }
        Ok(dd.truncate(bound)?.dims() == self.truncate(bound)?.dims())
    }
}

/// Pieces `A_0, ..., A_N` of a quadratic algebra with exact multiplication.
///
/// Elements of `A_n` are coordinate vectors on the basis words of length `n`
/// (the lexicographically least independent monomials).
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    presentation: QuadraticPresentation,
    alg: FilteredAlgebra,
}

impl GradedAlgebra {
    pub fn presentation(&self) -> &QuadraticPresentation {
        &self.presentation
    }

    pub fn field(&self) -> Field {
        self.presentation.field
    }

    pub fn ngens(&self) -> usize {
        self.presentation.ngens()
    }

    pub fn bound(&self) -> usize {
        self.alg.bound()
    }

    /// The underlying truncation with all degrees in one coordinate space.
    pub fn inner(&self) -> &FilteredAlgebra {
        &self.alg
    }

    pub fn dim(&self, n: usize) -> usize {
        if n > self.bound() {
            0
        } else {
            self.alg.degree_range(n).len()
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.bound()).map(|n| self.dim(n)).collect()
    }

    pub fn basis_words(&self, n: usize) -> &[Word] {
        &self.alg.words()[self.alg.degree_range(n)]
    }

    /// Weight of basis element `i` of `A_n`.
    pub fn basis_weight(&self, n: usize, i: usize) -> u32 {
        self.presentation.word_weight(&self.basis_words(n)[i])
    }

    pub fn basis(&self, n: usize, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field().zero(); self.dim(n)];
        v[i] = self.field().one();
        v
    }

    /// Embeds a degree-`n` vector into the full coordinate space.
    pub fn to_full(&self, n: usize, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.alg.dim()];
        let r = self.alg.degree_range(n);
        out[r].clone_from_slice(v);
        out
    }

    /// Degree-`n` part of a full vector.
    pub fn component(&self, n: usize, full: &[Scalar]) -> Vec<Scalar> {
        full[self.alg.degree_range(n)].to_vec()
    }

    /// The image of a word, in `A_{len}` coordinates.
    pub fn word(&self, w: &[usize]) -> Result<Vec<Scalar>> {
        Ok(self.component(w.len(), &self.alg.word_vector(w)?))
    }

    pub fn multiply(&self, i: usize, a: &[Scalar], j: usize, b: &[Scalar]) -> Result<Vec<Scalar>> {
        if i + j > self.bound() {
            return Err(Error::DegreeOverflow(format!(
                "A_{i} * A_{j} exceeds bound {}",
                self.bound()
            )));
        }
        if a.len() != self.dim(i) || b.len() != self.dim(j) {
            return Err(Error::Dimension("element length does not match its degree".into()));
        }
        let p = self.alg.mul(&self.to_full(i, a), &self.to_full(j, b))?;
        Ok(self.component(i + j, &p))
    }

    /// Matrix of `A_i (x) A_j -> A_{i+j}`; column `k * dim A_j + l` is `e_k * e_l`.
    pub fn mu(&self, i: usize, j: usize) -> Result<Matrix> {
        let (di, dj) = (self.dim(i), self.dim(j));
        let mut m = Matrix::zeros(self.field(), self.dim(i + j), di * dj);
        for k in 0..di {
            for l in 0..dj {
                let p = self.multiply(i, &self.basis(i, k), j, &self.basis(j, l))?;
                for (r, x) in p.into_iter().enumerate() {
                    if !x.is_zero() {
                        m.set(r, k * dj + l, x);
                    }
                }
            }
        }
        Ok(m)
    }

    /// `A_n -> A_{n+1}`, right multiplication by generator `g`.
    pub fn right_gen(&self, n: usize, g: usize) -> Result<Matrix> {
        self.gen_map(n, g, false)
    }

    /// `A_n -> A_{n+1}`, left multiplication by generator `g`.
    pub fn left_gen(&self, n: usize, g: usize) -> Result<Matrix> {
        self.gen_map(n, g, true)
    }

    fn gen_map(&self, n: usize, g: usize, left: bool) -> Result<Matrix> {
        let xg = self.word(&[g])?;
        let mut m = Matrix::zeros(self.field(), self.dim(n + 1), self.dim(n));
        for k in 0..self.dim(n) {
            let e = self.basis(n, k);
            let p = if left { self.multiply(1, &xg, n, &e)? } else { self.multiply(n, &e, 1, &xg)? };
            for (r, x) in p.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(r, k, x);
                }
            }
        }
        Ok(m)
    }

    /// Matrix of `V^{(x)n} -> A_n`; column index is the base-`dim V` word.
    pub fn projection(&self, n: usize) -> Result<Matrix> {
        let g = self.ngens();
        let total = g.pow(n as u32);
        let mut m = Matrix::zeros(self.field(), self.dim(n), total);
        for idx in 0..total {
            let mut w = vec![0; n];
            let mut x = idx;
            for slot in w.iter_mut().rev() {
                *slot = x % g;
                x /= g;
            }
            for (r, v) in self.word(&w)?.into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(r, idx, v);
                }
            }
        }
        Ok(m)
    }
}

/// Serializable view of a presentation (scalars as strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSummary {
    pub field: String,
    pub generators: Vec<String>,
    pub weights: Vec<u32>,
    pub relations: Vec<Vec<String>>,
}

impl From<&QuadraticPresentation> for PresentationSummary {
    fn from(p: &QuadraticPresentation) -> Self {
        PresentationSummary {
            field: p.field.to_string(),
            generators: p.generators.clone(),
            weights: p.weights.clone(),
            relations: (0..p.relations.rows())
                .map(|i| p.relations.row(i).iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}
