//! Plain-text file formats.
//!
//! Polynomial file:
//!
//! ```text
//! # x1 x2 + x3
//! n=3
//! 1 2
//! 3
//! ```
//!
//! One monomial per line as space-separated 1-based indices, `const` for the
//! constant-1 monomial, `#` starting a comment. Repeated monomials cancel.
//!
//! Truth-table file: `n=<int>` followed by one line of `2^n` characters
//! `0`/`1`, character `x` holding `f(x)` with variable 1 least significant.

use super::{canonicalize, Monomial, SparsePoly, TruthTable};
use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_header(line_no: usize, line: &str) -> Result<usize> {
    let value = line
        .strip_prefix("n=")
        .or_else(|| line.strip_prefix("n =").map(str::trim_start))
        .ok_or_else(|| Error::Parse { line: line_no, message: "expected `n=<int>`".into() })?;
    value
        .trim()
        .parse()
        .map_err(|e| Error::Parse { line: line_no, message: format!("bad variable count: {e}") })
}

pub fn parse_poly(text: &str) -> Result<SparsePoly> {
    let mut lines = content_lines(text);
    let (line_no, header) =
        lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty polynomial file".into() })?;
    let n = parse_header(line_no, header)?;
    let mut raw = Vec::new();
    for (line_no, line) in lines {
        if line == "const" {
            raw.push(Monomial::constant());
            continue;
        }
        let mut vars = Vec::new();
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::Parse { line: line_no, message: format!("bad index `{tok}`") })?;
            if v == 0 || v > n {
                return Err(Error::Parse { line: line_no, message: format!("index {v} outside 1..={n}") });
            }
            vars.push(v);
        }
        raw.push(Monomial::new(vars));
    }
    canonicalize(raw, n)
}

pub fn format_poly(p: &SparsePoly) -> String {
    let mut out = format!("n={}\n", p.n());
    for m in p.monomials() {
        if m.is_constant() {
            out.push_str("const\n");
        } else {
            let vars: Vec<String> = m.vars().iter().map(usize::to_string).collect();
            out.push_str(&vars.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn parse_table(text: &str) -> Result<TruthTable> {
    let mut lines = content_lines(text);
    let (line_no, header) =
        lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty truth-table file".into() })?;
    let n = parse_header(line_no, header)?;
    let (line_no, body) =
        lines.next().ok_or_else(|| Error::Parse { line: line_no + 1, message: "missing table line".into() })?;
    if let Some((extra, _)) = lines.next() {
        return Err(Error::Parse { line: extra, message: "unexpected content after table".into() });
    }
    let bits = body
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse { line: line_no, message: format!("unexpected character `{other}`") }),
        })
        .collect::<Result<Vec<bool>>>()?;
    if n >= 32 || bits.len() as u64 != 1u64 << n {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 2^{n} characters, found {}", bits.len()),
        });
    }
    TruthTable::from_bits(n, &bits)
}

pub fn format_table(t: &TruthTable) -> String {
    let mut out = format!("n={}\n", t.n());
    out.extend((0..t.len()).map(|x| if t.get(x) { '1' } else { '0' }));
    out.push('\n');
    out
}
