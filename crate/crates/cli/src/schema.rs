//! The problem-file format. Scalars are JSON integers or strings such as
//! `"-3"` and `"2/5"`; matrices are lists of rows.

use std::collections::BTreeMap;

use koszul_core::dgmod::{CdgModule, UComplex, UModule};
use koszul_core::complex::Complex;
use koszul_core::deformation::DeformationData;
use koszul_core::linalg::{Field, Matrix, Scalar};
use koszul_core::quadratic::QuadraticPresentation;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn scalar(&self, f: Field) -> Result<Scalar, CliError> {
        match self {
            Num::Int(n) => Ok(f.int(*n)),
            Num::Str(s) => Ok(f.parse(s)?),
        }
    }

    pub fn from_scalar(s: &Scalar) -> Num {
        match s.to_i64() {
            Some(n) => Num::Int(n),
            None => Num::Str(s.to_string()),
        }
    }
}

pub type Rows = Vec<Vec<Num>>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub dim: usize,
    /// One square matrix per generator.
    pub actions: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub start: i64,
    /// Names from `modules`; `k` is the trivial module.
    pub modules: Vec<String>,
    #[serde(default)]
    pub d: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdgModuleSpec {
    pub start: i64,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub d: Vec<Rows>,
    /// `actions[k][a]` maps degree `start + k` to `start + k + 1`.
    pub actions: Vec<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: String,
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    /// Rows over `V (x) V`, or `[quadratic | linear | constant]` rows.
    pub relations: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cdg_modules: BTreeMap<String, CdgModuleSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub bounds: Bounds,
}

fn is_default(b: &Bounds) -> bool {
    *b == Bounds::default()
}

/// `Q`, `QQ`, `rational`, `F_5`, `F5`, `GF(5)` or a bare prime.
pub fn parse_field(s: &str) -> Result<Field, CliError> {
    let t = s.trim();
    if matches!(t.to_ascii_lowercase().as_str(), "q" | "qq" | "rational" | "rationals") {
        return Ok(Field::Rational);
    }
    let digits = t
        .strip_prefix("GF(")
        .and_then(|x| x.strip_suffix(')'))
        .or_else(|| t.strip_prefix("F_"))
        .or_else(|| t.strip_prefix('F'))
        .unwrap_or(t);
    let p: u64 = digits.parse().map_err(|_| CliError::Input(format!("unknown field {s:?}")))?;
    Ok(Field::prime(p)?)
}

/// `[]` stands for the zero matrix of the expected shape.
pub fn matrix(f: Field, rows: usize, cols: usize, spec: &Rows, what: &str) -> Result<Matrix, CliError> {
    if spec.is_empty() {
        return Ok(Matrix::zeros(f, rows, cols));
    }
    if spec.len() != rows || spec.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input(format!("{what}: expected a {rows}x{cols} matrix")));
    }
    let rows: Vec<Vec<Scalar>> =
        spec.iter().map(|r| r.iter().map(|x| x.scalar(f)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    Ok(Matrix::from_rows(f, cols, &rows)?)
}

pub fn rows_of(m: &Matrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).iter().map(Num::from_scalar).collect()).collect()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(CliError::Json)
    }

    pub fn field(&self) -> Result<Field, CliError> {
        parse_field(&self.field)
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    fn homogeneous(&self) -> bool {
        let n = self.ngens();
        self.relations.iter().all(|r| r.len() == n * n)
    }

    pub fn presentation(&self) -> Result<QuadraticPresentation, CliError> {
        let f = self.field()?;
        let n = self.ngens();
        let rel = if self.homogeneous() {
            matrix(f, self.relations.len(), n * n, &self.relations, "relations")?
        } else {
            // The quadratic parts of inhomogeneous rows.
            self.deformation()?.base().relations().clone()
        };
        Ok(QuadraticPresentation::new(f, self.generators.clone(), self.weights.clone(), rel)?)
    }

    pub fn deformation(&self) -> Result<DeformationData, CliError> {
        let f = self.field()?;
        let n = self.ngens();
        if !self.homogeneous() {
            if self.alpha.is_some() || self.beta.is_some() {
                return Err(CliError::Input("give alpha/beta or inhomogeneous relations, not both".into()));
            }
            let width = n * n + n + 1;
            let m = matrix(f, self.relations.len(), width, &self.relations, "relations")?;
            return Ok(DeformationData::from_relations(f, self.generators.clone(), self.weights.clone(), &m)?);
        }
        let base = self.presentation()?;
        let r = base.relation_dim();
        let alpha = match &self.alpha {
            Some(a) => matrix(f, n, r, a, "alpha")?,
            None => Matrix::zeros(f, n, r),
        };
        let beta = match &self.beta {
            Some(b) if b.len() == r => b.iter().map(|x| x.scalar(f)).collect::<Result<_, _>>()?,
            Some(b) => return Err(CliError::Input(format!("beta has {} entries, expected {r}", b.len()))),
            None => vec![f.zero(); r],
        };
        Ok(DeformationData::new(base, alpha, beta)?)
    }

    pub fn module(&self, name: &str) -> Result<UModule, CliError> {
        let f = self.field()?;
        let n = self.ngens();
        match self.modules.get(name) {
            Some(spec) => {
                if spec.actions.len() != n {
                    return Err(CliError::Input(format!("module {name}: one action per generator")));
                }
                let acts = spec
                    .actions
                    .iter()
                    .enumerate()
                    .map(|(a, m)| matrix(f, spec.dim, spec.dim, m, &format!("module {name}, action {a}")))
                    .collect::<Result<_, _>>()?;
                let m = UModule::new(f, spec.dim, acts)?;
                Ok(match &spec.weights {
                    Some(w) => m.with_weights(w.clone())?,
                    None => m,
                })
            }
            None if name == "k" => Ok(UModule::trivial(f, n)),
            None => Err(CliError::Input(format!("no module named {name:?}"))),
        }
    }

    /// A named complex, or a named module placed in degree 0.
    pub fn complex(&self, name: &str) -> Result<UComplex, CliError> {
        let n = self.ngens();
        let Some(spec) = self.complexes.get(name) else {
            return Ok(UComplex::from_module(0, self.module(name)?));
        };
        let f = self.field()?;
        let mods: Vec<UModule> = spec.modules.iter().map(|m| self.module(m)).collect::<Result<_, _>>()?;
        if spec.d.len() >= mods.len().max(1) {
            return Err(CliError::Input(format!("complex {name}: more differentials than gaps between terms")));
        }
        let d = spec
            .d
            .iter()
            .enumerate()
            .map(|(k, m)| matrix(f, mods[k + 1].dim(), mods[k].dim(), m, &format!("complex {name}, d{k}")))
            .collect::<Result<_, _>>()?;
        Ok(UComplex::new(spec.start, mods, d, n)?)
    }

    pub fn cdg_module(&self, name: &str) -> Result<CdgModule, CliError> {
        let f = self.field()?;
        let n = self.ngens();
        let Some(spec) = self.cdg_modules.get(name) else {
            return match name {
                "k" => Ok(CdgModule::trivial(f, n)),
                _ => Err(CliError::Input(format!("no cdg module named {name:?}"))),
            };
        };
        let len = spec.dims.len();
        if spec.d.len() >= len.max(1) || spec.actions.len() != len {
            return Err(CliError::Input(format!("cdg module {name}: differentials or actions do not match dims")));
        }
        let dim = |k: usize| spec.dims.get(k).copied().unwrap_or(0);
        let d = spec
            .d
            .iter()
            .enumerate()
            .map(|(k, m)| matrix(f, dim(k + 1), dim(k), m, &format!("cdg module {name}, d{k}")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut complex = Complex::new(f, spec.start, spec.dims.clone(), d)?;
        if let Some(w) = &spec.weights {
            complex = complex.with_weights(w.clone())?;
        }
        let actions = spec
            .actions
            .iter()
            .enumerate()
            .map(|(k, per)| {
                if per.len() != n {
                    return Err(CliError::Input(format!("cdg module {name}: one action per generator in degree {k}")));
                }
                per.iter()
                    .enumerate()
                    .map(|(a, m)| matrix(f, dim(k + 1), dim(k), m, &format!("cdg module {name}, action {a} in degree {k}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CdgModule::new(complex, actions, n)?)
    }

    pub fn cdg_module_spec(m: &CdgModule) -> CdgModuleSpec {
        let c = m.complex();
        let degrees: Vec<i64> = if c.is_zero() { vec![] } else { c.degrees().collect() };
        CdgModuleSpec {
            start: if degrees.is_empty() { 0 } else { c.start() },
            dims: degrees.iter().map(|&p| c.dim(p)).collect(),
            d: degrees.iter().filter(|&&p| p < c.end()).map(|&p| rows_of(&c.d(p))).collect(),
            actions: degrees.iter().map(|&p| (0..m.ngens()).map(|a| rows_of(&m.action(p, a))).collect()).collect(),
            weights: c.has_weights().then(|| degrees.iter().map(|&p| c.weights(p).unwrap_or(&[]).to_vec()).collect()),
        }
    }

    /// The problem file of a bare quadratic presentation.
    pub fn from_presentation(p: &QuadraticPresentation) -> ProblemFile {
        ProblemFile {
            field: p.field().to_string(),
            generators: p.generators().to_vec(),
            weights: (!p.has_trivial_weights()).then(|| p.weights().to_vec()),
            relations: rows_of(p.relations()),
            alpha: None,
            beta: None,
            modules: BTreeMap::new(),
            complexes: BTreeMap::new(),
            cdg_modules: BTreeMap::new(),
            bounds: Bounds::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"{
        "field": "F_5",
        "generators": ["x1", "x2", "x3"],
        "relations": [
            [0, 1, 0, -1, 0, 0, 0, 0, 0, 0, 0, -1, 0],
            [0, 0, 1, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 0, 0, 0]
        ]
    }"#;

    #[test]
    fn fields() {
        assert_eq!(parse_field("Q").unwrap(), Field::Rational);
        for s in ["F_7", "F7", "GF(7)", "7"] {
            assert_eq!(parse_field(s).unwrap(), Field::Prime(7));
        }
        assert!(parse_field("F_6").is_err());
        assert!(parse_field("R").is_err());
    }

    #[test]
    fn heisenberg_file_is_pbw() {
        let p = ProblemFile::parse(HEIS).unwrap();
        let d = p.deformation().unwrap();
        assert!(d.pbw_check().all_pass);
        assert_eq!(p.presentation().unwrap().relation_dim(), 3);
    }

    #[test]
    fn round_trip() {
        let p = ProblemFile::parse(HEIS).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(ProblemFile::parse(&text).unwrap(), p);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = ProblemFile::parse("{\n  \"field\": \"Q\",\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
