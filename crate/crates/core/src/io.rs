//! Metric and generator file formats.
//!
//! Metric files are line oriented:
//!
//! ```text
//! # comment
//! param s
//! coords t r theta phi
//! angles theta phi
//! function M(t)
//! g 0 0 = -(1 - M(t)/r + Q(t)/r^2)
//! ```
//!
//! Indices are 0-based with `i <= j`; the lower triangle is mirrored.
//!
//! Generator files hold `gen <name> = <xi> | <eta_0> | ... | <eta_{n-1}>`
//! lines, optionally followed by `gauge <name> = <expr>` for Noether
//! fields. A JSON report written by `liesym analyze --format json` is also
//! accepted in place of a generator file.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use crate::geometry::{CoordChart, FunctionDecl, GeometryError, Metric};
use crate::jets::BundleVectorField;
use crate::symexpr::{canonicalize, Atom, ParseError, Parser, RatExpr, Symbol};
use crate::symmetry::Mode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("{file}: cannot read: {cause}")]
    Read { file: String, cause: String },
    /// `line` is 1-based; 0 means the file as a whole.
    #[error("{file}:{line}: {cause}")]
    Format { file: String, line: usize, cause: String },
}

impl LoadError {
    fn at(file: &str, line: usize, cause: impl Into<String>) -> Self {
        LoadError::Format {
            file: file.to_string(),
            line,
            cause: cause.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|e| LoadError::Read {
        file: path.display().to_string(),
        cause: e.to_string(),
    })
}

fn parse_with(parser: &Parser, text: &str, file: &str, line: usize, offset: usize) -> Result<RatExpr, LoadError> {
    let e = parser.parse(text).map_err(|ParseError { column, message, kind }| {
        let label = ParseError {
            kind,
            column: column + offset,
            message,
        };
        LoadError::at(file, line, label.to_string())
    })?;
    canonicalize(&e).map_err(|e| LoadError::at(file, line, e.to_string()))
}

/// Strip a trailing `#` comment and surrounding whitespace.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Column (0-based) where `part` starts inside `line`.
fn offset_of(line: &str, part: &str) -> usize {
    line[..(part.as_ptr() as usize - line.as_ptr() as usize)].chars().count()
}

fn parse_decl(rest: &str) -> Option<(String, Vec<String>)> {
    let open = rest.find('(')?;
    let close = rest.rfind(')')?;
    if close != rest.len() - 1 || close < open {
        return None;
    }
    let name = rest[..open].trim();
    let ok = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok(name) {
        return None;
    }
    let args: Vec<String> = rest[open + 1..close].split(',').map(|a| a.trim().to_string()).collect();
    args.iter().all(|a| ok(a)).then(|| (name.to_string(), args))
}

/// Parse metric text; `file` labels error messages.
pub fn parse_metric(text: &str, file: &str) -> Result<Metric, LoadError> {
    let mut param: Option<(String, usize)> = None;
    let mut coords: Option<Vec<String>> = None;
    let mut angles: Vec<String> = Vec::new();
    let mut funcs: Vec<(FunctionDecl, usize)> = Vec::new();
    let mut entries: Vec<(usize, usize, String, usize, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let words = || rest.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        match kw {
            "param" => {
                let w = words();
                if w.len() != 1 {
                    return Err(LoadError::at(file, line, "param takes exactly one name"));
                }
                if param.is_some() {
                    return Err(LoadError::at(file, line, "param declared twice"));
                }
                param = Some((w[0].clone(), line));
            }
            "coords" => {
                if coords.is_some() {
                    return Err(LoadError::at(file, line, "coords declared twice"));
                }
                coords = Some(words());
            }
            "angles" => angles.extend(words()),
            "function" => {
                let (name, args) = parse_decl(rest)
                    .ok_or_else(|| LoadError::at(file, line, format!("malformed function declaration '{rest}'")))?;
                let args = args.iter().map(|a| Symbol::new(a)).collect();
                funcs.push((FunctionDecl { name, args }, line));
            }
            "g" => {
                let (idx, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| LoadError::at(file, line, "expected 'g <i> <j> = <expr>'"))?;
                let ix: Vec<&str> = idx.split_whitespace().collect();
                let parse_ix = |s: &str| s.parse::<usize>().ok();
                let (i, j) = match ix.as_slice() {
                    [a, b] => match (parse_ix(a), parse_ix(b)) {
                        (Some(i), Some(j)) => (i, j),
                        _ => return Err(LoadError::at(file, line, format!("bad indices '{}'", idx.trim()))),
                    },
                    _ => return Err(LoadError::at(file, line, "expected two indices")),
                };
                if i > j {
                    return Err(LoadError::at(file, line, format!("index pair ({i}, {j}) must satisfy i <= j")));
                }
                let expr_trim = expr.trim_start();
                entries.push((i, j, expr_trim.to_string(), line, offset_of(raw, expr_trim)));
            }
            other => return Err(LoadError::at(file, line, format!("unknown keyword '{other}'"))),
        }
    }
    let (param, _) = param.ok_or_else(|| LoadError::at(file, 0, "missing 'param' line"))?;
    let coords = coords.ok_or_else(|| LoadError::at(file, 0, "missing 'coords' line"))?;
    let c: Vec<&str> = coords.iter().map(String::as_str).collect();
    let a: Vec<&str> = angles.iter().map(String::as_str).collect();
    let chart = CoordChart::new(&param, &c, &a).map_err(|e| LoadError::at(file, 0, e.to_string()))?;
    for (f, line) in &funcs {
        if let Some(bad) = f.args.iter().find(|s| !chart.coords().contains(s)) {
            return Err(LoadError::at(file, *line, format!("argument {bad} of {} is not a coordinate", f.name)));
        }
    }
    let decls: Vec<(String, Vec<Symbol>)> = funcs.iter().map(|(f, _)| (f.name.clone(), f.args.clone())).collect();
    let parser = Parser::new().with_functions(&decls);
    let n = chart.dim();
    let mut lines: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut parsed = Vec::new();
    for (i, j, text, line, off) in &entries {
        if *j >= n {
            return Err(LoadError::at(file, *line, format!("index ({i}, {j}) out of range for {n} coordinates")));
        }
        if let Some(prev) = lines.insert((*i, *j), *line) {
            return Err(LoadError::at(file, *line, format!("g {i} {j} already given on line {prev}")));
        }
        parsed.push((*i, *j, parse_with(&parser, text, file, *line, *off)?));
    }
    let functions = funcs.into_iter().map(|(f, _)| f).collect();
    Metric::from_upper(chart, &parsed, functions).map_err(|e| {
        let line = match &e {
            GeometryError::Undeclared(i, j, _) | GeometryError::NotPointFunction(i, j) => {
                lines.get(&((*i).min(*j), (*i).max(*j))).copied().unwrap_or(0)
            }
            _ => 0,
        };
        LoadError::at(file, line, e.to_string())
    })
}

pub fn load_metric(path: impl AsRef<Path>) -> Result<Metric, LoadError> {
    let path = path.as_ref();
    parse_metric(&read(path)?, &path.display().to_string())
}

/// A generator together with its optional Noether gauge term.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub field: BundleVectorField,
    pub gauge: Option<RatExpr>,
}

fn field_parser(metric: &Metric) -> Parser {
    let decls: Vec<(String, Vec<Symbol>)> = metric
        .functions()
        .iter()
        .map(|f| (f.name.clone(), f.args.clone()))
        .collect();
    Parser::new().with_functions(&decls)
}

fn check_base(e: &RatExpr, chart: &CoordChart, file: &str, line: usize) -> Result<(), LoadError> {
    let base = chart.base_symbols();
    for a in e.atoms_deep() {
        match a {
            Atom::Sym(s) if !base.contains(&s) => {
                return Err(LoadError::at(file, line, format!("undeclared symbol {s}")));
            }
            Atom::Jet(_) => return Err(LoadError::at(file, line, "generators may not contain jet variables")),
            _ => {}
        }
    }
    Ok(())
}

/// Parse generator text (or an analyze JSON report) against `metric`.
/// For JSON, `mode` picks the section; otherwise the first present one.
pub fn parse_generators(text: &str, file: &str, metric: &Metric, mode: Option<Mode>) -> Result<Vec<Generator>, LoadError> {
    if text.trim_start().starts_with('{') {
        return parse_report(text, file, metric, mode);
    }
    let chart = metric.chart();
    let parser = field_parser(metric);
    let mut out: Vec<Generator> = Vec::new();
    let mut gauge_lines: Vec<(String, RatExpr, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let (name, rhs) = rest
            .split_once('=')
            .ok_or_else(|| LoadError::at(file, line, format!("expected '{kw} <name> = ...'")))?;
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(LoadError::at(file, line, format!("bad generator name '{name}'")));
        }
        match kw {
            "gen" => {
                let parts: Vec<&str> = rhs.split('|').collect();
                if parts.len() != chart.dim() + 1 {
                    return Err(LoadError::at(
                        file,
                        line,
                        format!(
                            "generator {name} has {} fields, expected {} (xi and one eta per coordinate)",
                            parts.len(),
                            chart.dim() + 1
                        ),
                    ));
                }
                let mut comps = Vec::new();
                for p in parts {
                    let t = p.trim();
                    let e = parse_with(&parser, t, file, line, offset_of(raw, t))?;
                    check_base(&e, chart, file, line)?;
                    comps.push(e);
                }
                if out.iter().any(|g| g.field.name == name) {
                    return Err(LoadError::at(file, line, format!("generator {name} defined twice")));
                }
                let field = BundleVectorField::from_components(chart, name, comps)
                    .map_err(|e| LoadError::at(file, line, e.to_string()))?;
                out.push(Generator { field, gauge: None });
            }
            "gauge" => {
                let t = rhs.trim();
                let e = parse_with(&parser, t, file, line, offset_of(raw, t))?;
                check_base(&e, chart, file, line)?;
                gauge_lines.push((name.to_string(), e, line));
            }
            other => return Err(LoadError::at(file, line, format!("unknown keyword '{other}'"))),
        }
    }
    for (name, e, line) in gauge_lines {
        let g = out
            .iter_mut()
            .find(|g| g.field.name == name)
            .ok_or_else(|| LoadError::at(file, line, format!("gauge for unknown generator {name}")))?;
        g.gauge = Some(e);
    }
    if out.is_empty() {
        return Err(LoadError::at(file, 0, "no generators"));
    }
    Ok(out)
}

fn parse_report(text: &str, file: &str, metric: &Metric, mode: Option<Mode>) -> Result<Vec<Generator>, LoadError> {
    let v: Value = serde_json::from_str(text).map_err(|e| LoadError::at(file, e.line(), e.to_string()))?;
    let order = match mode {
        Some(m) => vec![m],
        None => vec![Mode::LiePoint, Mode::Noether],
    };
    let section = order
        .iter()
        .find_map(|m| v.get(m.name()).filter(|s| s.get("fields").is_some()))
        .ok_or_else(|| LoadError::at(file, 0, "report has no generator section for the requested mode"))?;
    let parser = field_parser(metric);
    let chart = metric.chart();
    let str_at = |x: &Value, what: &str| -> Result<String, LoadError> {
        x.as_str()
            .map(str::to_string)
            .ok_or_else(|| LoadError::at(file, 0, format!("{what} must be a string")))
    };
    let mut out = Vec::new();
    for f in section["fields"].as_array().into_iter().flatten() {
        let name = str_at(&f["name"], "name")?;
        let mut comps = vec![str_at(&f["xi"], "xi")?];
        for e in f["eta"].as_array().into_iter().flatten() {
            comps.push(str_at(e, "eta")?);
        }
        let comps: Vec<RatExpr> = comps
            .iter()
            .map(|c| parse_with(&parser, c, file, 0, 0))
            .collect::<Result<_, _>>()?;
        for c in &comps {
            check_base(c, chart, file, 0)?;
        }
        let field = BundleVectorField::from_components(chart, &name, comps)
            .map_err(|e| LoadError::at(file, 0, format!("{name}: {e}")))?;
        let gauge = match f.get("gauge") {
            Some(g) => Some(parse_with(&parser, &str_at(g, "gauge")?, file, 0, 0)?),
            None => None,
        };
        out.push(Generator { field, gauge });
    }
    if out.is_empty() {
        return Err(LoadError::at(file, 0, "no generators"));
    }
    Ok(out)
}

pub fn load_generators(path: impl AsRef<Path>, metric: &Metric, mode: Option<Mode>) -> Result<Vec<Generator>, LoadError> {
    let path = path.as_ref();
    parse_generators(&read(path)?, &path.display().to_string(), metric, mode)
}

/// Generator file text for `fields` (round-trips through [`parse_generators`]).
pub fn write_generators(fields: &[BundleVectorField], gauges: &[RatExpr]) -> String {
    let mut s = String::new();
    for (i, f) in fields.iter().enumerate() {
        let comps: Vec<String> = f.components().iter().map(|c| c.to_string()).collect();
        s.push_str(&format!("gen {} = {}\n", f.name, comps.join(" | ")));
        if let Some(g) = gauges.get(i).filter(|g| !g.is_zero()) {
            s.push_str(&format!("gauge {} = {}\n", f.name, g));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const VB: &str = "\
# test metric
param s
coords t r theta phi
angles theta phi
function M(t)
function Q(t)
g 0 0 = -(1 - M(t)/r + Q(t)/r^2)
g 0 1 = -1
g 2 2 = r^2
g 3 3 = r^2*sin(theta)^2
";

    fn err_line(e: LoadError) -> usize {
        match e {
            LoadError::Format { line, .. } => line,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metric_loads() {
        let m = parse_metric(VB, "vb").unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.functions().len(), 2);
        assert_eq!(m.component(3, 3).to_string(), "r^2*sin(theta)^2");
    }

    #[test]
    fn metric_errors_carry_lines() {
        let bad = VB.replace("g 2 2 = r^2", "g 2 2 = (r^2");
        let e = parse_metric(&bad, "vb").unwrap_err();
        assert_eq!(err_line(e.clone()), 9);
        assert!(e.to_string().contains("column"), "{e}");
        let undeclared = VB.replace("g 2 2 = r^2", "g 2 2 = r^2*k");
        assert_eq!(err_line(parse_metric(&undeclared, "vb").unwrap_err()), 9);
        let range = VB.replace("g 3 3", "g 3 4");
        assert_eq!(err_line(parse_metric(&range, "vb").unwrap_err()), 10);
        let lower = VB.replace("g 2 2", "g 2 1");
        assert_eq!(err_line(parse_metric(&lower, "vb").unwrap_err()), 9);
        let unknown_fn = VB.replace("function Q(t)\n", "");
        assert!(parse_metric(&unknown_fn, "vb").is_err());
        assert_eq!(err_line(parse_metric("coords t\n", "x").unwrap_err()), 0);
        assert_eq!(err_line(parse_metric("param s\nfoo bar\n", "x").unwrap_err()), 2);
    }

    #[test]
    fn generators_load_and_round_trip() {
        let m = parse_metric(VB, "vb").unwrap();
        let text = "gen X1 = 1 | 0 | 0 | 0 | 0\ngen X4 = 0 | 0 | 0 | -cos(phi) | cot(theta)*sin(phi)\ngauge X1 = 0\n";
        let g = parse_generators(text, "g", &m, None).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].field.eta[3].to_string(), e("cot(theta)*sin(phi)").to_string());
        let fields: Vec<_> = g.iter().map(|x| x.field.clone()).collect();
        let again = parse_generators(&write_generators(&fields, &[]), "g", &m, None).unwrap();
        assert_eq!(again, g.iter().map(|x| Generator { gauge: None, ..x.clone() }).collect::<Vec<_>>());
        let arity = parse_generators("gen X = 1 | 0 | 0\n", "g", &m, None).unwrap_err();
        assert_eq!(err_line(arity.clone()), 1);
        assert!(arity.to_string().contains("expected 5"), "{arity}");
        assert!(parse_generators("gen X = k | 0 | 0 | 0 | 0\n", "g", &m, None).is_err());
        assert!(parse_generators("gauge Y = 1\n", "g", &m, None).is_err());
    }

    fn e(s: &str) -> RatExpr {
        canonicalize(&crate::symexpr::parse_expr(s).unwrap()).unwrap()
    }

    #[test]
    fn report_json_is_accepted() {
        let m = parse_metric(VB, "vb").unwrap();
        let json = r#"{"liepoint": {"fields": [{"name": "Y1", "xi": "1", "eta": ["0", "0", "0", "0"]}]},
                       "noether": {"fields": [{"name": "Z1", "xi": "0", "eta": ["0", "0", "0", "1"], "gauge": "0"}]}}"#;
        let lp = parse_generators(json, "r", &m, None).unwrap();
        assert_eq!(lp[0].field.name, "Y1");
        let no = parse_generators(json, "r", &m, Some(Mode::Noether)).unwrap();
        assert_eq!(no[0].field.name, "Z1");
        assert_eq!(no[0].gauge, Some(RatExpr::zero()));
    }
}
