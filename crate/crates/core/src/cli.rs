//! Command-line orchestration: parse → analyze → leading → reduce → solve →
//! residual → majorant, rendered as text or as one JSON document.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{check_assumptions, dichotomy_mismatches};
use crate::catalog::{examples, find_example, prepare_log, run_log, run_prescribed, ExampleMode, Prescription};
use crate::error::{Error, Result};
use crate::fuchsian::{residual, ResonancePolicy, SolveResult, FORMAT_VERSION};
use crate::leading::build_leading_equation;
use crate::majorant::certify;
use crate::parser::{parse_equation_with, parse_xpoly, ParseOptions, PDESpec};
use crate::scalar::{fmt_q, parse_q, Q};
use crate::series::xpoly_to_doc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Solve,
    Verify,
    Majorant,
    Examples,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Inline(String),
    File(PathBuf),
    Example(String),
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Input,
    pub order: u32,
    /// `None` keeps the example's own setting (or the parser default).
    pub max_deg: Option<u32>,
    pub root_index: usize,
    pub b: String,
    pub policy: ResonancePolicy,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Prescribed leading term `(ρ, coefficient)`; switches `solve` to prescribed mode.
    pub lead: Option<(String, String)>,
    pub data: Vec<(String, String)>,
    pub big_r: String,
    pub r: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Analyze,
            input: Input::None,
            order: 12,
            max_deg: None,
            root_index: 0,
            b: "0".into(),
            policy: ResonancePolicy::Error,
            format: Format::Human,
            out: None,
            lead: None,
            data: Vec::new(),
            big_r: "1".into(),
            r: "1/2".into(),
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::Assumption(_) | Error::Cancellation(_) | Error::Valuation(_) | Error::DominantBalance(_) => 3,
        Error::DegenerateRoot(_) | Error::NoRoot(_) => 4,
        Error::Resonance { .. } | Error::Compatibility { .. } | Error::MissingResonanceData(_) => 5,
        Error::Residual(_) | Error::Truncation(_) | Error::Certificate(_) => 6,
        _ => 1,
    }
}

pub struct Outcome {
    pub code: i32,
    pub text: String,
}

struct Loaded {
    source: String,
    spec: PDESpec,
    example: Option<crate::catalog::Example>,
}

fn load(cfg: &RunConfig) -> Result<Loaded> {
    let (source, example) = match &cfg.input {
        Input::Inline(s) => (s.clone(), None),
        Input::File(p) => (std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?, None),
        Input::Example(name) => {
            let ex = find_example(name).ok_or_else(|| Error::Domain(format!("unknown example {name}")))?;
            (ex.source(), Some(ex))
        }
        Input::None => return Err(Error::Domain("no equation given".into())),
    };
    let max_deg = cfg.max_deg.or(example.as_ref().map(|e| e.max_deg)).unwrap_or(crate::parser::DEFAULT_MAX_DEG);
    let spec = parse_equation_with(&source, &ParseOptions { n: None, max_deg })?;
    Ok(Loaded { source, spec, example })
}

fn rational(s: &str, what: &str) -> Result<Q> {
    parse_q(s.trim()).ok_or_else(|| Error::Parse { line: 1, col: 1, msg: format!("{what}: expected a rational, got {s:?}") })
}

fn prescription(cfg: &RunConfig, loaded: &Loaded) -> Result<Option<Prescription>> {
    let n = loaded.spec.n;
    if let Some((rho, coeff)) = &cfg.lead {
        let mut data = BTreeMap::new();
        for (r, p) in &cfg.data {
            data.insert(rational(r, "resonance exponent")?, parse_xpoly(p, n)?);
        }
        return Ok(Some(Prescription { lead_rho: rational(rho, "leading exponent")?, lead_coeff: parse_xpoly(coeff, n)?, data }));
    }
    match &loaded.example {
        Some(ex) => ex.prescription(n),
        None => Ok(None),
    }
}

/// Root index, `b` and resonance policy; an example supplies its own unless overridden.
fn log_settings(cfg: &RunConfig, loaded: &Loaded) -> (usize, String, ResonancePolicy) {
    if let Some(ExampleMode::Log { root_index, b, policy, .. }) = loaded.example.as_ref().map(|e| &e.mode) {
        let policy = if cfg.policy == ResonancePolicy::Frobenius { cfg.policy } else { *policy };
        if cfg.b == "0" && cfg.root_index == 0 {
            return (*root_index, b.to_string(), policy);
        }
        return (cfg.root_index, cfg.b.clone(), policy);
    }
    (cfg.root_index, cfg.b.clone(), cfg.policy)
}

fn solve_any(cfg: &RunConfig, loaded: &Loaded) -> Result<(Value, Vec<String>, SolveResult)> {
    let spec = &loaded.spec;
    if let Some(p) = prescription(cfg, loaded)? {
        let res = run_prescribed(spec, &p, cfg.order)?;
        let mut lines = vec![format!("prescribed leading term: ({}) t^{}", p.lead_coeff, fmt_q(&p.lead_rho))];
        lines.extend(resonance_lines(&res));
        lines.push("u =".into());
        lines.extend(res.u.to_rows().into_iter().map(|r| format!("  {r}")));
        lines.push(residual_line(&res));
        let doc = json!({ "solution": res.to_doc() });
        return Ok((doc, lines, res));
    }
    let (root_index, b, policy) = log_settings(cfg, loaded);
    let b = parse_xpoly(&b, spec.n)?;
    let run = run_log(spec, root_index, &b, cfg.order, policy)?;
    let roots: Vec<String> = run.leading.roots.iter().map(|r| r.value.to_dsl()).collect();
    let mut lines = vec![
        format!("l = {}", run.report.l.unwrap_or(0)),
        format!("leading equation: {}", run.equation),
        format!("roots at x = 0: {}", roots.join(", ")),
        format!("a(x) = {}", run.leading.a),
        format!("C(λ) = {}", lambda_text(&run.reduced)),
    ];
    lines.extend(resonance_lines(&run.result));
    lines.push("u =".into());
    lines.extend(run.result.u.to_rows().into_iter().map(|r| format!("  {r}")));
    lines.push(residual_line(&run.result));
    let doc = json!({
        "leading": {
            "equation": run.equation.to_string(),
            "roots": roots,
            "root_index": root_index,
            "a": xpoly_to_doc(&run.leading.a),
        },
        "solution": run.result.to_doc(),
    });
    Ok((doc, lines, run.result))
}

fn lambda_text(red: &crate::fuchsian::ReducedEquation) -> String {
    let coeffs = red.op.monomial_coeffs();
    let mut parts = Vec::new();
    for (d, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match d {
            0 => String::new(),
            1 => "λ".to_string(),
            _ => format!("λ^{d}"),
        };
        let cs = if c.len() == 1 { c.to_dsl() } else { format!("({})", c.to_dsl()) };
        parts.push(match (mono.is_empty(), cs.as_str()) {
            (true, _) => cs,
            (false, "1") => mono,
            (false, "-1") => format!("-{mono}"),
            _ => format!("{cs}*{mono}"),
        });
    }
    crate::xpoly::join_signed(&parts)
}

fn resonance_lines(res: &SolveResult) -> Vec<String> {
    res.resonances
        .iter()
        .map(|r| format!("resonance at {} (multiplicity {}): {}", fmt_q(&r.rho), r.multiplicity, r.action))
        .collect()
}

fn residual_line(res: &SolveResult) -> String {
    match &res.residual.valuation {
        None => format!("residual: zero through t^{} (x-degree {})", res.residual.certified, res.residual.xprec),
        Some(v) => format!("residual valuation: {} (known through t^{})", fmt_q(v), res.residual.certified),
    }
}

fn analyze(loaded: &Loaded) -> Result<(Value, Vec<String>)> {
    let spec = &loaded.spec;
    let report = check_assumptions(spec);
    let mismatches = if report.all_hold() { dichotomy_mismatches(spec, &report) } else { Vec::new() };
    let leading = if report.all_hold() { build_leading_equation(spec, &report).ok().map(|e| e.to_string()) } else { None };
    let doc = report.to_doc();
    let mut lines = vec![
        format!("m = {}, n = {}", spec.m, spec.n),
        format!("sigma_c = {}", doc.sigma_c),
        format!("l = {}", report.l.map(|l| l.to_string()).unwrap_or_else(|| "none".into())),
        format!("M0 = {{{}}}", doc.m0.join(", ")),
        format!("A0 {} | A1 {} | A2 {} | A3 {}", report.a0_holds, report.a1_holds, report.a2_holds, report.a3_holds),
    ];
    if let Some(c) = &doc.a3_constant {
        lines.push(format!("A3 constant = {c}"));
    }
    if let Some(e) = &leading {
        lines.push(format!("leading equation: {e}"));
    }
    lines.extend(doc.diagnostics.iter().map(|d| format!("note: {d}")));
    lines.extend(mismatches.iter().map(|m| format!("mismatch: {m}")));
    let value = json!({ "analysis": doc, "dichotomy_mismatches": mismatches, "leading_equation": leading });
    Ok((value, lines))
}

fn list_examples() -> (Value, Vec<String>) {
    let ex = examples();
    let w = ex.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let lines = ex.iter().map(|e| format!("{:<w$}  {}\n{:<w$}  {}", e.name, e.source(), "", e.summary, w = w)).collect();
    let docs: Vec<Value> = ex
        .iter()
        .map(|e| json!({ "name": e.name, "equation": e.source(), "summary": e.summary, "order": e.order() }))
        .collect();
    (json!({ "examples": docs }), lines)
}

fn execute(cfg: &RunConfig) -> Result<(Value, Vec<String>, i32)> {
    if cfg.order < 1 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    if cfg.command == Command::Examples {
        let (v, l) = list_examples();
        return Ok((v, l, 0));
    }
    let loaded = load(cfg)?;
    let mut lines = vec![format!("equation: {}", loaded.spec.to_dsl())];
    let mut doc = serde_json::Map::new();
    doc.insert("equation".into(), Value::String(loaded.spec.to_dsl()));
    if loaded.source.trim() != loaded.spec.to_dsl() {
        doc.insert("input".into(), Value::String(loaded.source.clone()));
    }
    let mut code = 0;
    match cfg.command {
        Command::Analyze => {
            let (v, l) = analyze(&loaded)?;
            merge(&mut doc, v);
            lines.extend(l);
        }
        Command::Solve => {
            let (v, l, _) = solve_any(cfg, &loaded)?;
            merge(&mut doc, v);
            lines.extend(l);
        }
        Command::Verify => {
            let (v, l, res) = solve_any(cfg, &loaded)?;
            merge(&mut doc, v);
            lines.extend(l);
            let check = residual(&loaded.spec, &res.u, cfg.order as i64)?;
            let ok = check.exceeds(cfg.order as i64);
            lines.push(format!("independent residual check through t^{}: {}", cfg.order, if ok { "pass" } else { "FAIL" }));
            doc.insert(
                "verification".into(),
                json!({
                    "order": cfg.order,
                    "valuation": check.valuation.as_ref().map(fmt_q),
                    "certified_through": check.certified.to_string(),
                    "passed": ok,
                }),
            );
            if !ok {
                code = 6;
            }
        }
        Command::Majorant => {
            let (root_index, b, _) = log_settings(cfg, &loaded);
            let b = parse_xpoly(&b, loaded.spec.n)?;
            let (_, _, _, red) = prepare_log(&loaded.spec, root_index, &b, cfg.order)?;
            let big_r = rational(&cfg.big_r, "R")?;
            let r = rational(&cfg.r, "r")?;
            let cert = certify(&red, &big_r, &r, cfg.order)?;
            let p = &cert.params;
            lines.push(format!("R = {}, r = {}, M = {}, beta = {}", fmt_q(&p.big_r), fmt_q(&p.r), fmt_q(&p.big_m), fmt_q(&p.beta)));
            lines.push(format!("A1 = {}", fmt_q(&p.a1)));
            for (d, v) in &p.b {
                lines.push(format!("B[{}] = {}", d.to_dsl(), fmt_q(v)));
            }
            for (nu, v) in &p.g {
                lines.push(format!("G[{}] = {}", nu.to_dsl(), fmt_q(v)));
            }
            for (k, c) in cert.c.iter().enumerate() {
                lines.push(format!("C_{} = {}", k + 1, fmt_q(c)));
            }
            lines.push(format!("delta = {} (~{:.6e})", fmt_q(&cert.radius.delta), crate::scalar::q_to_f64(&cert.radius.delta)));
            lines.push(format!(
                "bounds checked: {}, violations: {}",
                cert.report.checked,
                cert.report.violations.len()
            ));
            for v in &cert.report.violations {
                lines.push(format!("  k = {} {}: {} > {}", v.k, v.index, v.norm, v.bound));
            }
            lines.push("note: M and the norms are coefficient surrogates, not the analytic constants".into());
            doc.insert("certificate".into(), serde_json::to_value(cert.to_doc()).expect("serializable"));
            if !cert.report.ok() {
                code = 6;
            }
        }
        Command::Examples => unreachable!(),
    }
    Ok((Value::Object(doc), lines, code))
}

fn merge(doc: &mut serde_json::Map<String, Value>, v: Value) {
    if let Value::Object(m) = v {
        doc.extend(m);
    }
}

/// Runs one command and renders its output; never panics on bad input.
pub fn run(cfg: &RunConfig) -> Outcome {
    let (body, lines, code) = match execute(cfg) {
        Ok(x) => x,
        Err(e) => {
            let code = exit_code(&e);
            (json!({ "error": e.to_string() }), vec![format!("error: {e}")], code)
        }
    };
    let text = match cfg.format {
        Format::Human => lines.join("\n") + "\n",
        Format::Structured => {
            let mut doc = serde_json::Map::new();
            doc.insert("version".into(), json!(FORMAT_VERSION));
            doc.insert("command".into(), serde_json::to_value(cfg.command).expect("serializable"));
            doc.insert("exit_code".into(), json!(code));
            merge(&mut doc, body);
            serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable") + "\n"
        }
    };
    Outcome { code, text }
}

/// Parses `RHO=POLY` pairs.
pub fn split_pair(s: &str) -> Option<(String, String)> {
    let (a, b) = s.split_once('=')?;
    Some((a.trim().to_string(), b.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, input: Input) -> RunConfig {
        RunConfig { command, input, ..RunConfig::default() }
    }

    #[test]
    fn analyze_prototype() {
        let out = run(&cfg(Command::Analyze, Input::Inline("D[t,2](u) = D[t,1](u)^2".into())));
        assert_eq!(out.code, 0);
        assert!(out.text.contains("l = 0"));
        assert!(out.text.contains("A0 true | A1 true | A2 true | A3 true"));
    }

    #[test]
    fn exit_codes() {
        let parse = run(&cfg(Command::Analyze, Input::Inline("D[t,2](u) = 1/u".into())));
        assert_eq!(parse.code, 2);
        let assumption = run(&cfg(Command::Solve, Input::Inline("D[t,2](u) = u".into())));
        assert_eq!(assumption.code, 3);
    }

    #[test]
    fn structured_output_is_deterministic() {
        let mut c = cfg(Command::Solve, Input::Example("m3-cubic".into()));
        c.format = Format::Structured;
        c.order = 6;
        let a = run(&c);
        let b = run(&c);
        assert_eq!(a.code, 0, "{}", a.text);
        assert_eq!(a.text, b.text);
        let v: Value = serde_json::from_str(&a.text).unwrap();
        assert_eq!(v["version"], json!(FORMAT_VERSION));
        assert_eq!(v["solution"]["l"], json!(1));
    }
}
