use std::collections::BTreeMap;
use std::fmt::Write as _;

use koszul_core::complex::HomologyReport;
use koszul_core::linalg::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedBounds {
    pub degree: usize,
    pub window: (i64, i64),
    pub filtration: i64,
}

impl Default for ResolvedBounds {
    fn default() -> Self {
        ResolvedBounds { degree: 6, window: (-8, 2), filtration: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub input: Option<String>,
    pub field: Option<String>,
    pub bounds: ResolvedBounds,
    pub flags: BTreeMap<String, String>,
}

/// What every command prints: a JSON document and a human rendering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub provenance: Provenance,
    pub result: serde_json::Value,
}

pub struct Outcome {
    pub report: Report,
    pub text: String,
}

impl Outcome {
    pub fn render(&self, json: bool) -> String {
        if json {
            // Through `Value` so keys come out sorted and re-emission is byte-identical.
            let v = serde_json::to_value(&self.report).expect("reports serialize");
            let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
            s.push('\n');
            return s;
        }
        let mut s = String::new();
        let p = &self.report.provenance;
        let _ = writeln!(s, "# {} ({})", self.report.command, if self.report.pass { "ok" } else { "FAILED" });
        if let Some(f) = &p.field {
            let _ = writeln!(s, "# field {f}, degree {}, window {:?}, filtration {}", p.bounds.degree, p.bounds.window, p.bounds.filtration);
        }
        s.push_str(&self.text);
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

/// `x*x*y*` as `x*²y*`.
pub fn word(names: &[String], w: &[usize]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        out.push_str(&names[w[i]]);
        if j - i > 1 {
            out.push_str(&superscript(j - i));
        }
        i = j;
    }
    out
}

/// A linear combination of basis words, `0` when empty.
pub fn element(names: &[String], basis: &[Vec<usize>], coeffs: &[Scalar]) -> String {
    let mut out = String::new();
    for (c, w) in coeffs.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        let s = c.to_string();
        let (neg, mag) = match s.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, s),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != "1" {
            out.push_str(&mag);
            out.push('·');
        }
        out.push_str(&word(names, w));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Degree-by-degree table of a homology report.
pub fn homology_table(h: &HomologyReport) -> String {
    let mut s = String::from("degree  dim\n");
    for p in h.window.0..=h.window.1 {
        let edge = h.entries.iter().any(|e| e.degree == p && e.edge);
        let _ = writeln!(s, "{p:>6}  {}{}", h.dim(p), if edge { "  (edge)" } else { "" });
    }
    s
}

pub fn dims_line(label: &str, start: i64, dims: &[usize]) -> String {
    let body: Vec<String> = dims.iter().enumerate().map(|(k, d)| format!("{}:{d}", start + k as i64)).collect();
    format!("{label}: {}\n", if body.is_empty() { "0".to_string() } else { body.join(" ") })
}
