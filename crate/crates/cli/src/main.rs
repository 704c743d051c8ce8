use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kahler::contour::{integrate_closed_with, integrate_real_line_with, CircleContour, HalfPlane};
use kahler::function::{classify_one_form, one_form, OneForm, Parser as ExprParser};
use kahler::oracle::differential_check;
use kahler::regression::run_checks;
use kahler::residue::{cauchy_derivative_integral, laurent_expand, residues, ResidueMethod, APPLICABILITY_TOL};
use kahler::{function_from_str, EvenElement, Mode, Pole};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(
    name = "kahler",
    version,
    about = "Residues and contour integrals with z = x + y·dxdy"
)]
struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Bind a named constant, e.g. `--bind t=1`. May be repeated.
    #[arg(long = "bind", value_name = "NAME=VALUE", global = true, value_parser = parse_binding)]
    bindings: Vec<(String, f64)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the poles of f(z) with their orders and residues.
    Residues {
        expr: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Series)]
        method: MethodArg,
    },
    /// Laurent coefficients a_from ..= a_to about a point.
    Laurent {
        expr: String,
        /// Expansion point, `u,v` or a constant expression such as `I`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        from: i32,
        #[arg(long, allow_hyphen_values = true)]
        to: i32,
    },
    /// ∮ f(z) dx around a circle.
    IntegrateContour {
        expr: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        clockwise: bool,
        /// Minimum distance kept between the circle and every pole
        /// [default: 1e-6 × radius].
        #[arg(long)]
        clearance: Option<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Series)]
        method: MethodArg,
        /// Cross-check against direct quadrature.
        #[arg(long)]
        verify: bool,
        /// Relative tolerance for `--verify`.
        #[arg(long, default_value_t = 1e-8)]
        verify_tol: f64,
    },
    /// ∫ h(x) dx over the real line, closed in a half-plane.
    IntegrateLine {
        expr: String,
        #[arg(long, value_enum, default_value_t = HalfPlaneArg::Auto)]
        half_plane: HalfPlaneArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Series)]
        method: MethodArg,
    },
    /// Cauchy's formula: ∮ f/(z−z₀)ⁿ⁺¹ dx from the n-th derivative at z₀.
    Cauchy {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    /// Classify α = k dx + g dy as not closed, closed, or closed and CR.
    Classify {
        #[command(flatten)]
        form: FormArgs,
        /// Sample point `x,y`. May be repeated.
        #[arg(long = "sample", allow_hyphen_values = true)]
        samples: Vec<String>,
    },
    /// Run the built-in reference checks.
    Check,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = true)]
struct FormArgs {
    #[arg(long, requires = "g", conflicts_with = "w")]
    k: Option<String>,
    #[arg(long, requires = "k", conflicts_with = "w")]
    g: Option<String>,
    /// The form `w dx`, with k = u(w) and g = −v(w).
    #[arg(long)]
    w: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Series,
    OrderReduction,
    Derivative,
}

impl From<MethodArg> for ResidueMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Series => ResidueMethod::Series,
            MethodArg::OrderReduction => ResidueMethod::OrderReduction,
            MethodArg::Derivative => ResidueMethod::DerivativeFormula,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HalfPlaneArg {
    Auto,
    Upper,
    Lower,
}

impl From<HalfPlaneArg> for HalfPlane {
    fn from(h: HalfPlaneArg) -> Self {
        match h {
            HalfPlaneArg::Auto => HalfPlane::Auto,
            HalfPlaneArg::Upper => HalfPlane::Upper,
            HalfPlaneArg::Lower => HalfPlane::Lower,
        }
    }
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<kahler::Error> for Failure {
    fn from(e: kahler::Error) -> Self {
        if e.is_parse_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

fn compute<E: Into<kahler::Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

/// What a command produced: text lines, a JSON payload and whether every
/// check it ran held.
struct Report {
    text: Vec<String>,
    json: Value,
    ok: bool,
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("invalid constant name `{name}`"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{name}`"))?;
    Ok((name.to_string(), value))
}

fn even_json(e: EvenElement) -> Value {
    json!([e.u, e.v])
}

fn pole_json(p: &Pole) -> Value {
    json!({ "location": even_json(p.location), "order": p.order })
}

fn bindings_json(b: &[(String, f64)]) -> Value {
    Value::Object(b.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

/// `u,v` or a constant expression.
fn parse_point(text: &str, bindings: &[(&str, f64)]) -> Result<EvenElement, Failure> {
    if let Some((u, v)) = text.split_once(',') {
        if let (Ok(u), Ok(v)) = (u.trim().parse(), v.trim().parse()) {
            return Ok(EvenElement::new(u, v));
        }
    }
    let mut parser = ExprParser::new(Mode::Contour);
    for (name, value) in bindings {
        parser = parser.bind(*name, *value);
    }
    let expr = parser
        .parse(text)
        .map_err(|e| Failure::Usage(format!("point `{text}`: {e}")))?;
    expr.constant_value()
        .ok_or_else(|| Failure::Usage(format!("point `{text}` is not a constant")))
}

fn parse_sample(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("sample `{text}` is not of the form x,y"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let bindings: Vec<(&str, f64)> = cli.bindings.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let b = &bindings[..];
    match &cli.command {
        Command::Residues { expr, method } => {
            let f = function_from_str(expr, Mode::Contour, b)?;
            let method = ResidueMethod::from(*method);
            let reports = residues(&f, method).map_err(compute)?;
            let mut text = Vec::new();
            if reports.is_empty() {
                text.push("no poles".to_string());
            }
            for r in &reports {
                text.push(format!(
                    "pole {} (order {}): residue {}",
                    r.pole.location, r.pole.order, r.a_minus_1
                ));
            }
            let poles: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let mut p = pole_json(&r.pole);
                    p["residue"] = even_json(r.a_minus_1);
                    p
                })
                .collect();
            Ok(Report {
                text,
                json: json!({
                    "command": "residues",
                    "input": { "expr": expr, "bindings": bindings_json(&cli.bindings), "method": method.name() },
                    "poles": poles,
                    "warnings": [],
                    "tolerances": {},
                }),
                ok: true,
            })
        }
        Command::Laurent { expr, at, from, to } => {
            let f = function_from_str(expr, Mode::Contour, b)?;
            let z0 = parse_point(at, b)?;
            let l = laurent_expand(&f, z0, *from, *to).map_err(compute)?;
            let coeffs = l.coefficients();
            let mut text = vec![format!("about {z0} (pole order {})", l.pole_order)];
            text.extend(coeffs.iter().map(|(n, c)| format!("a[{n}] = {c}")));
            Ok(Report {
                text,
                json: json!({
                    "command": "laurent",
                    "input": { "expr": expr, "bindings": bindings_json(&cli.bindings), "at": even_json(z0), "from": from, "to": to },
                    "pole_order": l.pole_order,
                    "coefficients": coeffs.iter().map(|(n, c)| json!({ "n": n, "value": even_json(*c) })).collect::<Vec<_>>(),
                    "warnings": [],
                    "tolerances": {},
                }),
                ok: true,
            })
        }
        Command::IntegrateContour {
            expr,
            center,
            radius,
            clockwise,
            clearance,
            method,
            verify,
            verify_tol,
        } => {
            let f = function_from_str(expr, Mode::Contour, b)?;
            let c0 = parse_point(center, b)?;
            let mut c = CircleContour::new(c0, *radius).map_err(compute)?;
            if let Some(band) = clearance {
                c = c.with_clearance(*band);
            }
            if *clockwise {
                c = c.clockwise();
            }
            let method = ResidueMethod::from(*method);
            let r = integrate_closed_with(&f, &c, method).map_err(compute)?;
            let mut text = vec![
                format!("real value: {}", r.real_value),
                format!("imaginary defect: {}", r.imaginary_defect),
            ];
            for (p, res) in r.enclosed.iter().zip(&r.residues) {
                text.push(format!(
                    "enclosed pole {} (order {}): residue {}",
                    p.location, p.order, res
                ));
            }
            text.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
            let mut ok = true;
            let mut verification = Value::Null;
            if *verify {
                let d = differential_check(&f, &c, *verify_tol);
                ok = d.passed;
                text.push(d.message.clone());
                verification = json!({
                    "passed": d.passed,
                    "quadrature": d.quadrature,
                    "quadrature_defect": d.quadrature_defect,
                    "message": d.message,
                });
            }
            Ok(Report {
                text,
                json: json!({
                    "command": "integrate-contour",
                    "input": {
                        "expr": expr,
                        "bindings": bindings_json(&cli.bindings),
                        "center": even_json(c0),
                        "radius": radius,
                        "orientation": if *clockwise { "clockwise" } else { "counterclockwise" },
                        "method": method.name(),
                    },
                    "real_value": r.real_value,
                    "imaginary_defect": r.imaginary_defect,
                    "poles": r.enclosed.iter().map(pole_json).collect::<Vec<_>>(),
                    "residues": r.residues.iter().map(|e| even_json(*e)).collect::<Vec<_>>(),
                    "verification": verification,
                    "warnings": r.warnings,
                    "tolerances": { "pole_clearance": c.pole_clearance, "verify": verify_tol },
                }),
                ok,
            })
        }
        Command::IntegrateLine {
            expr,
            half_plane,
            method,
        } => {
            let h = function_from_str(expr, Mode::RealLine, b)?;
            let method = ResidueMethod::from(*method);
            let half = HalfPlane::from(*half_plane);
            let r = integrate_real_line_with(&h, half, method).map_err(compute)?;
            let mut text = vec![format!("value: {}", r.real_value)];
            for (p, res) in r.enclosed.iter().zip(&r.residues) {
                text.push(format!("pole {} (order {}): residue {}", p.location, p.order, res));
            }
            text.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
            Ok(Report {
                text,
                json: json!({
                    "command": "integrate-line",
                    "input": { "expr": expr, "bindings": bindings_json(&cli.bindings), "half_plane": half.name(), "method": method.name() },
                    "real_value": r.real_value,
                    "imaginary_defect": r.imaginary_defect,
                    "poles": r.enclosed.iter().map(pole_json).collect::<Vec<_>>(),
                    "residues": r.residues.iter().map(|e| even_json(*e)).collect::<Vec<_>>(),
                    "warnings": r.warnings,
                    "tolerances": {},
                }),
                ok: true,
            })
        }
        Command::Cauchy { expr, at, n } => {
            let f = function_from_str(expr, Mode::Contour, b)?;
            let z0 = parse_point(at, b)?;
            let e = cauchy_derivative_integral(&f, z0, *n).map_err(compute)?;
            let mut warnings = Vec::new();
            if !e.applicable {
                warnings.push(format!(
                    "f^({n})(z0) = {} is not a pure 2-form; the contour value keeps only its dxdy part",
                    e.value
                ));
            }
            let mut text = vec![
                format!("f^({n})(z0) = {}", e.value),
                format!("contour value: {}", e.contour_value),
            ];
            text.extend(warnings.iter().map(|w| format!("warning: {w}")));
            Ok(Report {
                text,
                json: json!({
                    "command": "cauchy",
                    "input": { "expr": expr, "bindings": bindings_json(&cli.bindings), "at": even_json(z0), "n": n },
                    "derivative": even_json(e.value),
                    "applicable": e.applicable,
                    "contour_value": e.contour_value,
                    "warnings": warnings,
                    "tolerances": { "applicability": APPLICABILITY_TOL },
                }),
                ok: true,
            })
        }
        Command::Classify { form, samples } => {
            let mut parser = ExprParser::new(Mode::Plane);
            for (name, value) in b {
                parser = parser.bind(*name, *value);
            }
            let parse = |t: &str| parser.parse(t).map_err(|e| Failure::from(kahler::Error::from(e)));
            let (one_form, input) = match (&form.w, &form.k, &form.g) {
                (Some(w), _, _) => (OneForm::from_w_expr(parse(w)?), json!({ "w": w })),
                (None, Some(k), Some(g)) => (OneForm::from_exprs(parse(k)?, parse(g)?), json!({ "k": k, "g": g })),
                _ => return Err(Failure::Usage("give either --w or both --k and --g".into())),
            };
            let points: Vec<(f64, f64)> = if samples.is_empty() {
                DEFAULT_SAMPLES.to_vec()
            } else {
                samples.iter().map(|s| parse_sample(s)).collect::<Result<_, _>>()?
            };
            let class = classify_one_form(&one_form, &points).map_err(compute)?;
            let mut input = input;
            input["bindings"] = bindings_json(&cli.bindings);
            input["samples"] = json!(points.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>());
            Ok(Report {
                text: vec![class.to_string()],
                json: json!({
                    "command": "classify",
                    "input": input,
                    "classification": class.name(),
                    "warnings": [],
                    "tolerances": { "step": one_form::DIFF_STEP, "relative": one_form::CLASSIFY_TOL },
                }),
                ok: true,
            })
        }
        Command::Check => {
            let results = run_checks();
            let passed = results.iter().filter(|r| r.passed).count();
            let mut text: Vec<String> = results
                .iter()
                .map(|r| {
                    format!(
                        "{} {}: expected {}, got {} (deviation {:e}, tol {:e})",
                        if r.passed { "PASS" } else { "FAIL" },
                        r.name,
                        r.expected,
                        r.actual,
                        r.deviation,
                        r.tolerance
                    )
                })
                .collect();
            text.push(format!("{passed} of {} checks passed", results.len()));
            let checks: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "expected": r.expected,
                        "actual": r.actual,
                        "deviation": if r.deviation.is_finite() { json!(r.deviation) } else { Value::Null },
                        "tolerance": r.tolerance,
                        "passed": r.passed,
                    })
                })
                .collect();
            Ok(Report {
                text,
                json: json!({
                    "command": "check",
                    "input": {},
                    "checks": checks,
                    "passed": passed,
                    "total": results.len(),
                    "warnings": [],
                    "tolerances": {},
                }),
                ok: passed == results.len(),
            })
        }
    }
}

/// Spread over the plane, away from the usual test singularities at 0 and ±I.
const DEFAULT_SAMPLES: [(f64, f64); 6] = [
    (0.5, 0.3),
    (-1.2, 0.7),
    (2.0, -1.5),
    (0.1, -0.9),
    (1.7, 1.3),
    (-0.8, -2.1),
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                let mut doc = report.json;
                doc["schema_version"] = json!(SCHEMA_VERSION);
                doc["ok"] = json!(report.ok);
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                for line in &report.text {
                    println!("{line}");
                }
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            let (code, kind, message) = match failure {
                Failure::Usage(m) => (2, "usage", m),
                Failure::Compute(m) => (1, "computation", m),
            };
            if cli.json {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "ok": false,
                    "error": { "kind": kind, "message": message },
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_parse() {
        assert_eq!(parse_binding("t=1.5").unwrap(), ("t".to_string(), 1.5));
        assert!(parse_binding("t").is_err());
        assert!(parse_binding("=1").is_err());
        assert!(parse_binding("t=abc").is_err());
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1,-2", &[]).ok().map(|p| (p.u, p.v)), Some((1.0, -2.0)));
        let p = parse_point("2*I + a", &[("a", 0.5)]).ok().unwrap();
        assert_eq!((p.u, p.v), (0.5, 2.0));
        assert!(matches!(parse_point("z", &[]), Err(Failure::Usage(_))));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
