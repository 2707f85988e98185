use std::fmt::Write as _;
use std::path::Path;

use liesym::geometry::{geodesic_lagrangian, geodesic_system, integrate_geodesic, GeodesicSystem, Metric};
use liesym::io::{load_generators, load_metric, Generator};
use liesym::jets::BundleVectorField;
use liesym::liealg::{adjoint_exp, commutator_table_latex, commutator_table_text, structure_constants, structure_json, LieAlgebra};
use liesym::linalg::QMatrix;
use liesym::optimal::{standard_reps, verify_optimal_cover, Reducer};
use liesym::symexpr::{canonicalize, parse_expr, to_latex, Bindings, LatexStyle, RatExpr, Rational};
use liesym::symmetry::{
    determining_system, noether_charge, noether_residual, solve_determining, verify_liepoint_system, verify_noether,
    Ansatz, Mode, SymmetryReport, SymmetrySolution, Target,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{Command, Format};

/// Rendered report and exit code.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn new(text: String, ok: bool) -> Self {
        Output {
            text,
            code: if ok { 0 } else { 1 },
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn latex(e: &RatExpr) -> String {
    to_latex(&e.to_expr(), LatexStyle::default())
}

pub fn run(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Analyze {
            metric,
            noether,
            liepoint,
            ansatz_degree,
            format,
        } => analyze(metric, *noether, *liepoint, *ansatz_degree, *format),
        Command::Verify {
            metric,
            gens,
            noether,
            format,
            ..
        } => verify(metric, gens, if *noether { Mode::Noether } else { Mode::LiePoint }, *format),
        Command::Algebra { gens, metric, format } => algebra(gens, metric, *format),
        Command::Optimal {
            gens,
            metric,
            samples,
            seed,
            reduce,
            format,
        } => optimal(gens, metric, *samples as usize, *seed, reduce.as_deref(), *format),
        Command::Integrate {
            metric,
            binds,
            init,
            step,
            span,
            gens,
            format,
        } => integrate(metric, binds, init, *step, *span, gens.as_deref(), *format),
    }
}

fn metric_json(g: &Metric, path: &Path) -> Value {
    let ch = g.chart();
    json!({
        "file": path.display().to_string(),
        "param": ch.param().to_string(),
        "coords": ch.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "angles": ch.angles().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "functions": g.functions().iter().map(|f| {
            format!("{}({})", f.name, f.args.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "))
        }).collect::<Vec<_>>(),
    })
}

fn components_text(f: &BundleVectorField) -> String {
    f.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ")
}

struct ModeResult {
    solution: SymmetrySolution,
    verified: Vec<bool>,
    charges: Vec<RatExpr>,
    algebra: Result<LieAlgebra, String>,
}

fn solve_mode(g: &Metric, sys: &GeodesicSystem, mode: Mode, degree: u32) -> Result<ModeResult, CliError> {
    let ds = determining_system(&Target::for_mode(g, mode)?)?;
    let solution = solve_determining(&ds, &Ansatz::for_metric(g, degree))?;
    let l = geodesic_lagrangian(g);
    let zero = RatExpr::zero();
    let mut verified = Vec::new();
    let mut charges = Vec::new();
    for (i, f) in solution.fields.iter().enumerate() {
        let gauge = solution.gauges.get(i).unwrap_or(&zero);
        let ok = match mode {
            Mode::Noether => verify_noether(f, g, Some(gauge))?.pass,
            Mode::LiePoint => verify_liepoint_system(f, sys)?.pass,
        };
        verified.push(ok);
        if mode == Mode::Noether {
            charges.push(noether_charge(f, &l, gauge));
        }
    }
    let algebra = structure_constants(&solution.fields).map_err(|e| e.to_string());
    Ok(ModeResult {
        solution,
        verified,
        charges,
        algebra,
    })
}

fn analyze(path: &Path, noether: bool, liepoint: bool, degree: u32, format: Format) -> Result<Output, CliError> {
    let g = load_metric(path)?;
    let sys = geodesic_system(&g)?;
    let lagrangian = geodesic_lagrangian(&g);
    let modes: Vec<Mode> = [(Mode::Noether, noether), (Mode::LiePoint, liepoint)]
        .iter()
        .filter(|(_, on)| *on || (!noether && !liepoint))
        .map(|(m, _)| *m)
        .collect();
    let mut results = Vec::new();
    for &m in &modes {
        results.push((m, solve_mode(&g, &sys, m, degree)?));
    }
    let ok = results.iter().all(|(_, r)| r.verified.iter().all(|b| *b));
    let ch = g.chart();
    let text = match format {
        Format::Json => {
            let mut v = json!({
                "metric": metric_json(&g, path),
                "lagrangian": lagrangian.to_string(),
                "geodesics": (0..ch.dim()).map(|i| json!({
                    "coordinate": ch.coords()[i].to_string(),
                    "acceleration": sys.rhs()[i].to_string(),
                })).collect::<Vec<_>>(),
            });
            for (m, r) in &results {
                let mut s = r.solution.to_json();
                for (i, f) in s["fields"].as_array_mut().into_iter().flatten().enumerate() {
                    f["verified"] = json!(r.verified[i]);
                    if let Some(c) = r.charges.get(i) {
                        f["first_integral"] = json!(c.to_string());
                    }
                }
                s["algebra"] = match &r.algebra {
                    Ok(a) => structure_json(a),
                    Err(e) => json!({ "error": e }),
                };
                v[m.name()] = s;
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "metric: {}", path.display());
            let _ = writeln!(
                s,
                "chart: parameter {}, coordinates {}",
                ch.param(),
                ch.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            );
            let _ = writeln!(s, "lagrangian: {lagrangian}");
            let _ = writeln!(s, "geodesic equations:");
            for i in 0..ch.dim() {
                let _ = writeln!(s, "  D({}, {}, 2) = {}", ch.coords()[i], ch.param(), sys.rhs()[i]);
            }
            for (m, r) in &results {
                let sol = &r.solution;
                let _ = writeln!(s);
                let _ = writeln!(
                    s,
                    "[{}] dimension {} ({} equations, {} unknown coefficients, rank {})",
                    m.name(),
                    sol.dim(),
                    sol.equations,
                    sol.columns,
                    sol.rank
                );
                for (i, f) in sol.fields.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "  {} = {}{}",
                        f.name,
                        components_text(f),
                        if r.verified[i] { "" } else { "  (verification FAILED)" }
                    );
                    if let Some(a) = sol.gauges.get(i).filter(|a| !a.is_zero()) {
                        let _ = writeln!(s, "    gauge: {a}");
                    }
                    if let Some(c) = r.charges.get(i) {
                        let _ = writeln!(s, "    first integral: {c}");
                    }
                }
                match &r.algebra {
                    Ok(a) => {
                        let _ = writeln!(s, "  commutator table:");
                        for line in commutator_table_text(a).lines() {
                            let _ = writeln!(s, "    {line}");
                        }
                    }
                    Err(e) => {
                        let _ = writeln!(s, "  algebra: {e}");
                    }
                }
            }
            s
        }
        Format::Latex => {
            let mut s = String::from("\\begin{align}\n");
            let eqs = sys.equations();
            for (i, e) in eqs.iter().enumerate() {
                let end = if i + 1 < eqs.len() { " \\\\" } else { "" };
                let _ = writeln!(s, "E_{}: {} &= 0{end}", i + 1, latex(e));
            }
            s.push_str("\\end{align}\n");
            for (m, r) in &results {
                let _ = writeln!(s, "% {} symmetries: dimension {}", m.name(), r.solution.dim());
                if let Ok(a) = &r.algebra {
                    s.push_str(&commutator_table_latex(a));
                }
            }
            s
        }
    };
    Ok(Output::new(text, ok))
}

fn report_json(r: &SymmetryReport) -> Value {
    r.to_json()
}

fn verify(metric: &Path, gens: &Path, mode: Mode, format: Format) -> Result<Output, CliError> {
    let g = load_metric(metric)?;
    let gens = load_generators(gens, &g, Some(mode))?;
    let sys = geodesic_system(&g)?;
    let mut reports = Vec::new();
    for Generator { field, gauge } in &gens {
        reports.push(match mode {
            Mode::Noether => verify_noether(field, &g, gauge.as_ref())?,
            Mode::LiePoint => verify_liepoint_system(field, &sys)?,
        });
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let ok = passed == reports.len();
    let text = match format {
        Format::Json => pretty(&json!({
            "metric": metric_json(&g, metric),
            "mode": mode.name(),
            "passed": passed,
            "total": reports.len(),
            "generators": reports.iter().map(report_json).collect::<Vec<_>>(),
        })),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "mode: {}", mode.name());
            for r in &reports {
                let _ = writeln!(s, "{}: {}", r.field.name, if r.pass { "PASS" } else { "FAIL" });
                if let Some(i) = &r.first_integral {
                    let _ = writeln!(s, "  first integral: {i}");
                }
                for (k, res) in r.residuals.iter().enumerate().filter(|(_, e)| !e.is_zero()) {
                    let label = match mode {
                        Mode::Noether => "residual".to_string(),
                        Mode::LiePoint => format!("residual E{}", k + 1),
                    };
                    let _ = writeln!(s, "  {label}: {res}");
                }
            }
            let _ = writeln!(s, "{passed}/{} generators pass", reports.len());
            s
        }
    };
    Ok(Output::new(text, ok))
}

fn matrix_strings(m: &QMatrix) -> Vec<Vec<String>> {
    m.row_vecs()
        .iter()
        .map(|r| r.iter().map(Rational::to_string).collect())
        .collect()
}

fn load_algebra(gens: &Path, metric: &Path) -> Result<LieAlgebra, CliError> {
    let g = load_metric(metric)?;
    let fields: Vec<BundleVectorField> = load_generators(gens, &g, None)?.into_iter().map(|x| x.field).collect();
    Ok(structure_constants(&fields)?)
}

fn algebra(gens: &Path, metric: &Path, format: Format) -> Result<Output, CliError> {
    let a = load_algebra(gens, metric)?;
    let killing = a.killing_form();
    let series = a.derived_series();
    let radical = a.radical()?;
    let (r, h) = a.levi_heuristic()?;
    let levi_ok = a.levi_check(&r, &h)?;
    let adjoint = (0..a.dim())
        .map(|i| adjoint_exp(&a, i, "q"))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match format {
        Format::Json => pretty(&json!({
            "structure": structure_json(&a),
            "killing_form": matrix_strings(&killing),
            "derived_series": series.iter().map(|s| a.describe_space(s)).collect::<Vec<_>>(),
            "solvable": a.is_solvable(),
            "semisimple": a.is_semisimple(),
            "radical": a.describe_space(&radical),
            "levi": { "radical": a.describe_space(&r), "complement": a.describe_space(&h), "valid": levi_ok },
            "adjoint": adjoint.iter().map(|m| json!({
                "generator": a.names()[m.generator],
                "param": m.param.to_string(),
                "matrix": m.matrix.iter().map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = commutator_table_text(&a);
            let _ = writeln!(s, "\nKilling form:");
            for row in matrix_strings(&killing) {
                let _ = writeln!(s, "  [{}]", row.join(", "));
            }
            let _ = writeln!(s, "derived series:");
            for (k, sub) in series.iter().enumerate() {
                let _ = writeln!(s, "  g^({k}) = <{}>", a.describe_space(sub).join(", "));
            }
            let _ = writeln!(s, "solvable: {}", a.is_solvable());
            let _ = writeln!(s, "semisimple: {}", a.is_semisimple());
            let _ = writeln!(s, "radical: <{}>", a.describe_space(&radical).join(", "));
            let _ = writeln!(
                s,
                "Levi split: r = <{}>, h = <{}> ({})",
                a.describe_space(&r).join(", "),
                a.describe_space(&h).join(", "),
                if levi_ok { "verified" } else { "not verified" }
            );
            for m in &adjoint {
                let _ = writeln!(s, "Ad(exp({} {})):", m.param, a.names()[m.generator]);
                for row in &m.matrix {
                    let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                    let _ = writeln!(s, "  [{}]", cells.join(", "));
                }
            }
            s
        }
        Format::Latex => {
            let mut s = commutator_table_latex(&a);
            let bmatrix = |rows: Vec<Vec<String>>| {
                let body: Vec<String> = rows.iter().map(|r| r.join(" & ")).collect();
                format!("\\begin{{bmatrix}}\n{}\n\\end{{bmatrix}}\n", body.join(" \\\\\n"))
            };
            s.push_str("$$ k=\n");
            s.push_str(&bmatrix(matrix_strings(&killing)));
            s.push_str("$$\n");
            for m in &adjoint {
                let _ = writeln!(s, "$$ M_{{{}}}^{{{}}} =", m.generator + 1, m.param);
                s.push_str(&bmatrix(
                    m.matrix.iter().map(|r| r.iter().map(latex).collect()).collect(),
                ));
                s.push_str("$$\n");
            }
            s
        }
    };
    Ok(Output::new(text, levi_ok))
}

fn parse_vector(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|p| {
            let e = parse_expr(p.trim()).map_err(|e| CliError::Usage(format!("--reduce: {e}")))?;
            canonicalize(&e)
                .ok()
                .and_then(|r| r.as_constant())
                .ok_or_else(|| CliError::Usage(format!("--reduce: '{}' is not a rational number", p.trim())))
        })
        .collect()
}

fn optimal(
    gens: &Path,
    metric: &Path,
    samples: usize,
    seed: u64,
    reduce: Option<&str>,
    format: Format,
) -> Result<Output, CliError> {
    let a = load_algebra(gens, metric)?;
    let reps = standard_reps();
    let names = a.names().to_vec();
    if let Some(v) = reduce {
        let v = parse_vector(v)?;
        let t = Reducer::new(&a)?.reduce(&v, &reps)?;
        let ok = t.matched.is_some();
        let text = match format {
            Format::Json => pretty(&t.to_json(&names)),
            _ => {
                let mut s = String::new();
                for m in &t.moves {
                    let angle = match &m.exact {
                        Some((c, sn)) => format!("cos = {c}, sin = {sn}"),
                        None => format!("{:.12}", m.angle),
                    };
                    let _ = writeln!(s, "move Ad(exp(q {})) with q = {} ({angle})", names[m.generator], m.rule);
                }
                let scale = t.scale_exact.as_ref().map_or(format!("{:.12}", t.scale), |q| q.to_string());
                let _ = writeln!(s, "scale by {scale}");
                match &t.matched {
                    Some((id, p)) => {
                        let rep = reps.iter().find(|r| r.id == *id).expect("matched representative");
                        let params: Vec<String> = rep
                            .free
                            .iter()
                            .zip(p)
                            .map(|(f, x)| match &t.output_exact {
                                Some(e) => format!("a{} = {}", f + 1, e[*f]),
                                None => format!("a{} = {x:.12}", f + 1),
                            })
                            .collect();
                        let _ = writeln!(s, "case {id}: {} [{}]", rep.pattern(&names), params.join(", "));
                    }
                    None => {
                        let _ = writeln!(s, "no representative matches {:?}", t.output);
                    }
                }
                s
            }
        };
        return Ok(Output::new(text, ok));
    }
    let report = verify_optimal_cover(&a, &reps, samples, seed)?;
    let ok = report.unmatched.is_empty() && report.invariant_drift_max < 1e-9;
    let text = match format {
        Format::Json => pretty(&report.to_json(&reps, &names)),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "samples: {} (seed {}), invalid: {}", report.samples, report.seed, report.invalid);
            for (case, n) in &report.matched {
                let rep = reps.iter().find(|r| r.id == *case).expect("listed representative");
                let _ = writeln!(s, "  case {case} ({}): {n}", rep.pattern(&names));
            }
            let _ = writeln!(s, "unmatched: {}", report.unmatched.len());
            let _ = writeln!(s, "invariant drift max: {:e}", report.invariant_drift_max);
            let pairs: Vec<String> = report.separation_failures.iter().map(|(x, y)| format!("({x},{y})")).collect();
            let _ = writeln!(s, "separation failures: {}", pairs.join(" "));
            let conj: Vec<String> = report.confirmed_conjugate.iter().map(|(x, y)| format!("({x},{y})")).collect();
            let _ = writeln!(s, "confirmed conjugate: {}", conj.join(" "));
            s
        }
    };
    Ok(Output::new(text, ok))
}

fn parse_binding(g: &Metric, text: &str, b: &mut Bindings) -> Result<String, CliError> {
    let (name, body) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--bind expects NAME=EXPR, got '{text}'")))?;
    let name = name.trim();
    let decl = g
        .functions()
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| CliError::Usage(format!("--bind: metric declares no function {name}")))?;
    let e = parse_expr(body.trim()).map_err(|e| CliError::Usage(format!("--bind {name}: {e}")))?;
    let e = canonicalize(&e)?;
    b.bind_function(name, &decl.args, e);
    Ok(name.to_string())
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    metric: &Path,
    binds: &[String],
    init: &[f64],
    step: f64,
    span: f64,
    gens: Option<&Path>,
    format: Format,
) -> Result<Output, CliError> {
    let g = load_metric(metric)?;
    let mut b = Bindings::new();
    let mut bound = Vec::new();
    for t in binds {
        bound.push(parse_binding(&g, t, &mut b)?);
    }
    let keep = g.functions().iter().filter(|f| !bound.contains(&f.name)).cloned().collect();
    let specialized = g.specialize(&b, keep)?;
    let sys = geodesic_system(&specialized)?;
    let trace = integrate_geodesic(&sys, init, step, span)?;
    let l = geodesic_lagrangian(&specialized);
    let ch = specialized.chart();
    let gens: Vec<Generator> = match gens {
        Some(p) => load_generators(p, &specialized, Some(Mode::Noether))?,
        None => std::iter::once(None)
            .chain((0..ch.dim()).map(Some))
            .map(|i| Generator {
                field: BundleVectorField::coordinate(ch, i),
                gauge: None,
            })
            .collect(),
    };
    let zero = RatExpr::zero();
    let mut rows = Vec::new();
    for Generator { field, gauge } in &gens {
        let a = gauge.as_ref().unwrap_or(&zero);
        let charge = noether_charge(field, &l, a);
        let symmetric = noether_residual(field, &l, a)?.is_zero();
        let drift = trace.drift(&charge)?;
        rows.push((field.name.clone(), symmetric, drift, charge));
    }
    let text = match format {
        Format::Json => pretty(&json!({
            "metric": metric_json(&specialized, metric),
            "step": step,
            "span": span,
            "samples": trace.len(),
            "final": { "x": trace.x.last(), "xdot": trace.xdot.last() },
            "integrals": rows.iter().map(|(n, sym, d, c)| json!({
                "generator": n, "noether_symmetry": sym, "drift": d, "charge": c.to_string(),
            })).collect::<Vec<_>>(),
        })),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "RK4: {} steps of {step} over span {span}", trace.len().saturating_sub(1));
            for (n, sym, d, c) in &rows {
                let _ = writeln!(
                    s,
                    "{n}: drift {d:.3e} ({}) charge {c}",
                    if *sym { "Noether symmetry" } else { "not a symmetry" }
                );
            }
            s
        }
    };
    Ok(Output::new(text, true))
}
