//! File formats.
//!
//! * Matrices: a JSON object `{"n": N, "entries": [[re, im], ...]}` with `n²`
//!   row-major pairs. Writers emit every real with 17 significant digits so a
//!   write/read cycle is lossless.
//! * Loop-graphs: first line `n`, then one edge `i j` per line (`i i` for a loop).
//! * Functions on `Z_n` (and vertex labelings): first line `n`, second line the
//!   `n` values.
//! * Factor lists: one linear form per line as integer coefficients; `#` starts a comment.

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{bail, Error, Result};
use crate::labelings::{LoopGraph, ZnFunction};
use crate::linalg::{CMatrix, C64};
use crate::recovery::LinearForm;

fn push_real(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

/// Serializes a matrix in the bit-exact text format.
pub fn matrix_to_string(m: &CMatrix) -> String {
    let mut out = String::with_capacity(48 * m.entries().len() + 32);
    let _ = write!(out, "{{\"n\": {}, \"entries\": [", m.n());
    for (k, z) in m.entries().iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push('[');
        push_real(&mut out, z.re);
        out.push_str(", ");
        push_real(&mut out, z.im);
        out.push(']');
    }
    out.push_str("]}");
    out
}

#[derive(Deserialize)]
struct RawMatrix {
    n: usize,
    entries: Vec<[f64; 2]>,
}

pub fn matrix_from_str(s: &str) -> Result<CMatrix> {
    let raw: RawMatrix = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    CMatrix::try_new(raw.n, raw.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect())
        .map_err(|e| Error::Parse(e.to_string()))
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw =
            serde_json::value::RawValue::from_string(matrix_to_string(self)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(deserializer)?;
        CMatrix::try_new(raw.n, raw.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(D::Error::custom)
    }
}

fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines().enumerate().map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty())
}

fn parse_ints<T: std::str::FromStr>(line: &str, lineno: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("line {lineno}: bad integer {t:?}"))))
        .collect()
}

pub fn loopgraph_from_str(s: &str) -> Result<LoopGraph> {
    let mut lines = content_lines(s);
    let Some((ln, first)) = lines.next() else {
        bail!(Parse, "empty loop-graph file");
    };
    let header: Vec<usize> = parse_ints(first, ln)?;
    if header.len() != 1 {
        bail!(Parse, "line {ln}: expected the vertex count alone");
    }
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let e: Vec<usize> = parse_ints(line, ln)?;
        if e.len() != 2 {
            bail!(Parse, "line {ln}: expected `i j`");
        }
        edges.push((e[0], e[1]));
    }
    LoopGraph::new(header[0], &edges)
}

pub fn loopgraph_to_string(g: &LoopGraph) -> String {
    let mut out = format!("{}\n", g.n());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// Reads `n` followed by `n` values; used for functions and labelings.
pub fn values_from_str(s: &str) -> Result<Vec<usize>> {
    let mut lines = content_lines(s);
    let Some((ln, first)) = lines.next() else {
        bail!(Parse, "empty file");
    };
    let header: Vec<usize> = parse_ints(first, ln)?;
    if header.len() != 1 {
        bail!(Parse, "line {ln}: expected the length alone");
    }
    let mut values = Vec::new();
    for (ln, line) in lines {
        values.extend(parse_ints::<usize>(line, ln)?);
    }
    if values.len() != header[0] {
        bail!(Parse, "expected {} values, found {}", header[0], values.len());
    }
    Ok(values)
}

pub fn function_from_str(s: &str) -> Result<ZnFunction> {
    ZnFunction::new(values_from_str(s)?)
}

pub fn values_to_string(values: &[usize]) -> String {
    let body: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("{}\n{}\n", values.len(), body.join(" "))
}

pub fn factors_from_str(s: &str) -> Result<Vec<LinearForm>> {
    let mut forms = Vec::new();
    for (ln, line) in content_lines(s) {
        let coeffs: Vec<i64> = parse_ints(line, ln)?;
        forms.push(LinearForm::new(coeffs).map_err(|e| Error::Parse(format!("line {ln}: {e}")))?);
    }
    if let Some(w) = forms.windows(2).find(|w| w[0].n() != w[1].n()) {
        bail!(Parse, "factor lengths differ ({} vs {})", w[0].n(), w[1].n());
    }
    Ok(forms)
}

pub fn factors_to_string(forms: &[LinearForm]) -> String {
    let mut out = String::new();
    for f in forms {
        let c: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", c.join(" "));
    }
    out
}
