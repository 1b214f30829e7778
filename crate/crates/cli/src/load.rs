//! Reading input files into core objects.

use hocalc::algebra::parse::parse_algebra;
use hocalc::algebra::{Algebra, QuasiFree};
use hocalc::chain::parse::parse_complex;
use hocalc::chain::WindowedComplex;
use hocalc::linalg::Field;
use hocalc::operad::parse::{parse_operad, parse_operad_unchecked};
use hocalc::operad::{builtin_operad, Operad};
use hocalc::Error;
use std::path::Path;
use std::sync::Arc;

/// Input errors: exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn located(path: &Path, e: Error) -> InputError {
    match e {
        Error::Parse { line, col, msg } => InputError(format!("{}:{line}:{col}: {msg}", path.display())),
        other => InputError(format!("{}: {other}", path.display())),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Replaces the field named on the header line, leaving line numbers intact.
fn retarget(src: &str, field: Option<Field>) -> String {
    let Some(f) = field else { return src.to_string() };
    let mut done = false;
    let mut out = String::new();
    for l in src.lines() {
        let body = l.split('#').next().unwrap_or("").trim();
        if !done && !body.is_empty() {
            done = true;
            let mut w: Vec<String> = body.split_whitespace().map(String::from).collect();
            if let Some(i) = w.iter().position(|x| x == "field") {
                if i + 1 < w.len() {
                    w[i + 1] = f.to_string();
                }
            }
            out.push_str(&w.join(" "));
        } else {
            out.push_str(l);
        }
        out.push('\n');
    }
    out
}

/// `builtin:NAME:N` names a built-in operad; anything else is a file.
fn builtin(spec: &str, field: Option<Field>) -> Option<Result<Operad, InputError>> {
    let rest = spec.strip_prefix("builtin:")?;
    let (name, n) = rest.split_once(':').unwrap_or((rest, "3"));
    let Ok(n) = n.parse::<usize>() else {
        return Some(Err(InputError(format!("{spec}: truncation must be a natural number"))));
    };
    Some(builtin_operad(name, n, field.unwrap_or(Field::Q)).map_err(|e| InputError(format!("{spec}: {e}"))))
}

pub fn operad(spec: &str, field: Option<Field>) -> Result<Arc<Operad>, InputError> {
    if let Some(b) = builtin(spec, field) {
        return b.map(Arc::new);
    }
    let p = Path::new(spec);
    let src = retarget(&read(p)?, field);
    parse_operad(&src).map(Arc::new).map_err(|e| located(p, e))
}

/// For `validate`: parses without the axiom checks.
pub fn operad_unchecked(spec: &str, field: Option<Field>) -> Result<Operad, InputError> {
    if let Some(b) = builtin(spec, field) {
        return b;
    }
    let p = Path::new(spec);
    let src = retarget(&read(p)?, field);
    parse_operad_unchecked(&src).map_err(|e| located(p, e))
}

pub fn presentation(path: &Path, op: Arc<Operad>) -> Result<(String, QuasiFree), InputError> {
    parse_algebra(&read(path)?, op).map_err(|e| located(path, e))
}

pub fn algebra(path: &Path, op: Arc<Operad>, top: i64) -> Result<Arc<Algebra>, InputError> {
    let (name, qf) = presentation(path, op)?;
    Algebra::free(name, qf, top).map(Arc::new).map_err(|e| located(path, e))
}

pub fn complex(path: &Path, field: Option<Field>) -> Result<(String, Arc<WindowedComplex>), InputError> {
    let src = retarget(&read(path)?, field);
    let nc = parse_complex(&src).map_err(|e| located(path, e))?;
    Ok((nc.name, Arc::new(nc.complex)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retarget_keeps_lines() {
        let s = "# c\ncomplex k field Q\ngen e deg 0\n";
        assert_eq!(retarget(s, Some(Field::fp(2).unwrap())), "# c\ncomplex k field F2\ngen e deg 0\n");
    }
}
