//! String keys for catalog functions, e.g. `trace_quadratic:S=diag(1,2,3,4)`.

use super::catalog::{make_test_function, FunctionKind, InvariantFunction};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::manifolds::Frame;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

/// Split on top-level commas (commas inside brackets are kept).
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.into_iter().filter(|p| !p.is_empty()).collect()
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("not a number: '{t}'"))))
        .collect()
}

fn inner(s: &str, open: char, close: char) -> Option<&str> {
    s.strip_prefix(open).and_then(|r| r.strip_suffix(close))
}

/// Coordinate index from `e<i>` (1-based).
fn coord(s: &str, n: usize) -> Result<usize> {
    let i: usize = s.strip_prefix('e').and_then(|r| r.parse().ok()).ok_or_else(|| bad(format!("expected e<i>, got '{s}'")))?;
    if i == 0 || i > n {
        return Err(bad(format!("coordinate e{i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

/// `I`, `e<i>` (projector onto a coordinate), `diag(a,b,…)`, or `[a,b;c,d]`.
fn parse_symmetric(s: &str, n: usize) -> Result<Matrix> {
    if s == "I" {
        return Ok(Matrix::identity(n));
    }
    if s.starts_with('e') {
        let i = coord(s, n)?;
        return Ok(Matrix::from_fn(n, n, |a, b| if a == i && b == i { 1.0 } else { 0.0 }));
    }
    if let Some(body) = s.strip_prefix("diag").and_then(|r| inner(r, '(', ')')) {
        let d = numbers(body)?;
        if d.len() != n {
            return Err(bad(format!("diag needs {n} entries, got {}", d.len())));
        }
        return Ok(Matrix::diag(&d));
    }
    if let Some(body) = inner(s, '[', ']') {
        let rows: Vec<Vec<f64>> = body.split(';').map(numbers).collect::<Result<_>>()?;
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        return Matrix::from_rows(&refs);
    }
    Err(bad(format!("cannot parse matrix '{s}'")))
}

/// `top(k)`, `bottom(k)` or `e<i>`.
fn parse_frame(s: &str, n: usize) -> Result<Frame> {
    let size = |body: &str| -> Result<usize> {
        let k: usize = body.trim().parse().map_err(|_| bad(format!("bad frame size '{body}'")))?;
        if k == 0 || k > n {
            return Err(bad(format!("frame size {k} out of range")));
        }
        Ok(k)
    };
    if let Some(b) = s.strip_prefix("top").and_then(|r| inner(r, '(', ')')) {
        return Ok(Frame::top(n, size(b)?));
    }
    if let Some(b) = s.strip_prefix("bottom").and_then(|r| inner(r, '(', ')')) {
        return Ok(Frame::bottom(n, size(b)?));
    }
    if s.starts_with('e') {
        let i = coord(s, n)?;
        return Frame::new(Matrix::from_fn(n, 1, |a, _| if a == i { 1.0 } else { 0.0 }));
    }
    Err(bad(format!("cannot parse frame '{s}'")))
}

fn parse_direction(s: &str, n: usize) -> Result<Vec<f64>> {
    if s.starts_with('e') {
        let i = coord(s, n)?;
        return Ok((0..n).map(|a| if a == i { 1.0 } else { 0.0 }).collect());
    }
    let body = inner(s, '(', ')').ok_or_else(|| bad(format!("cannot parse direction '{s}'")))?;
    let v = numbers(body)?;
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if v.len() != n || norm == 0.0 {
        return Err(bad("direction must have n entries and be nonzero"));
    }
    Ok(v.into_iter().map(|x| x / norm).collect())
}

/// Parse a catalog key into a function on `V(n,m)`.
///
/// ```
/// use stiefel::testfuncs::parse_function_key;
/// let f = parse_function_key("trace_quadratic:S=diag(1,2,3,4)", 4, 2).unwrap();
/// assert_eq!(f.m(), 2);
/// ```
pub fn parse_function_key(key: &str, n: usize, m: usize) -> Result<InvariantFunction> {
    let key = key.trim();
    let (name, rest) = key.split_once(':').unwrap_or((key, ""));
    let mut args = std::collections::BTreeMap::new();
    for part in split_top(rest) {
        let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected name=value, got '{part}'")))?;
        args.insert(k.trim().to_string(), v.trim().to_string());
    }
    let take = |k: &str| args.get(k).map(|s| s.as_str());
    let need = |k: &str| take(k).ok_or_else(|| bad(format!("'{name}' needs parameter '{k}'")));
    let kind = match name {
        "constant" | "one" => FunctionKind::Constant,
        "trace_quadratic" => FunctionKind::TraceQuadratic { s: parse_symmetric(need("S")?, n)? },
        "det_quadratic" => FunctionKind::DetQuadratic { s: parse_symmetric(need("S")?, n)? },
        "cosine_power" => {
            let a = parse_frame(need("a")?, n)?;
            let p = take("p").unwrap_or("1").parse().map_err(|_| bad("p must be a positive integer"))?;
            FunctionKind::CosinePower { a, p }
        }
        "sphere_harmonic" => {
            let d = need("d")?.parse().map_err(|_| bad("d must be a nonnegative integer"))?;
            let direction = parse_direction(take("e").unwrap_or("e1"), n)?;
            FunctionKind::SphereHarmonic { d, direction }
        }
        other => return Err(bad(format!("unknown function '{other}'"))),
    };
    make_test_function(n, m, kind)
}

/// Catalog names with their parameters, for help output.
pub const CATALOG_KEYS: &[&str] = &[
    "constant",
    "trace_quadratic:S=<I|e<i>|diag(..)|[..;..]>",
    "det_quadratic:S=<diag(..)|[..;..]>",
    "cosine_power:a=<top(k)|bottom(k)|e<i>>,p=<int>",
    "sphere_harmonic:d=<even>,e=<e<i>|(x1,..,xn)>",
];
