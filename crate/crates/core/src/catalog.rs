//! Pipeline glue and the built-in example equations.

use std::collections::BTreeMap;

use crate::analysis::{check_assumptions, AnalysisReport};
use crate::error::{Error, Result};
use crate::fuchsian::{reduce, solve_formal, solve_prescribed, x_budget, ReducedEquation, ResonancePolicy, SolveResult};
use crate::leading::{build_leading_equation, solve_leading, LeadingEquation, LeadingSolution};
use crate::parser::{parse_equation_with, parse_xpoly, ParseOptions, PDESpec};
use crate::scalar::{parse_q, q_frac, Q};
use crate::series::LogSeries;
use crate::wave::quadratic_example;
use crate::xpoly::XPoly;

/// Everything produced on the way to a log-mode solution.
#[derive(Clone, Debug)]
pub struct LogRun {
    pub report: AnalysisReport,
    pub equation: LeadingEquation,
    pub leading: LeadingSolution,
    pub reduced: ReducedEquation,
    pub result: SolveResult,
}

/// Leading equation, root and reduced equation for target order `k`.
pub fn prepare_log(spec: &PDESpec, root_index: usize, b: &XPoly, k: u32) -> Result<(AnalysisReport, LeadingEquation, LeadingSolution, ReducedEquation)> {
    let report = check_assumptions(spec);
    let l = report.require_all()?;
    let equation = build_leading_equation(spec, &report)?;
    let k_int = k as i64 + spec.m as i64 - l as i64;
    let leading = solve_leading(&equation, root_index, x_budget(spec, k_int).max(0) as u32)?;
    if !leading.exact {
        return Err(Error::Cancellation(format!(
            "root {} of the leading equation is irrational; only exact roots are supported",
            leading.roots[root_index].value
        )));
    }
    let reduced = reduce(spec, &report, &leading.a, b)?;
    Ok((report, equation, leading, reduced))
}

pub fn run_log(spec: &PDESpec, root_index: usize, b: &XPoly, k: u32, policy: ResonancePolicy) -> Result<LogRun> {
    let (report, equation, leading, reduced) = prepare_log(spec, root_index, b, k)?;
    let result = solve_formal(&reduced, k, policy)?;
    Ok(LogRun { report, equation, leading, reduced, result })
}

/// Prescribed-mode input: `coeff · t^rho` plus data at resonant exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prescription {
    pub lead_rho: Q,
    pub lead_coeff: XPoly,
    pub data: BTreeMap<Q, XPoly>,
}

impl Prescription {
    pub fn lead(&self) -> LogSeries {
        LogSeries::monomial(self.lead_rho.clone(), 0, self.lead_coeff.clone())
    }
}

pub fn run_prescribed(spec: &PDESpec, p: &Prescription, k: u32) -> Result<SolveResult> {
    solve_prescribed(spec, &p.lead(), &p.data, k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExampleMode {
    Log { root_index: usize, b: &'static str, order: u32, policy: ResonancePolicy },
    Prescribed { lead_rho: i64, lead_coeff: &'static str, data: &'static [(i64, &'static str)], order: u32 },
    AnalyzeOnly,
}

/// Stored outcome every fresh run must reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub sigma_c: Option<&'static str>,
    pub l: Option<u32>,
    pub all_hold: bool,
    /// `a(0)` in DSL form, log mode only.
    pub a: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    source: Option<&'static str>,
    pub max_deg: u32,
    pub mode: ExampleMode,
    pub expected: Expected,
}

impl Example {
    pub fn source(&self) -> String {
        match self.source {
            Some(s) => s.to_string(),
            None => quadratic_example(q_frac(1, 2)).to_spec(self.max_deg).expect("valid wave problem").to_dsl(),
        }
    }

    pub fn spec(&self) -> Result<PDESpec> {
        parse_equation_with(&self.source(), &ParseOptions { n: None, max_deg: self.max_deg })
    }

    pub fn prescription(&self, n: usize) -> Result<Option<Prescription>> {
        let ExampleMode::Prescribed { lead_rho, lead_coeff, data, .. } = &self.mode else {
            return Ok(None);
        };
        let mut map = BTreeMap::new();
        for (rho, poly) in data.iter() {
            map.insert(Q::from_integer((*rho).into()), parse_xpoly(poly, n)?);
        }
        Ok(Some(Prescription {
            lead_rho: Q::from_integer((*lead_rho).into()),
            lead_coeff: parse_xpoly(lead_coeff, n)?,
            data: map,
        }))
    }

    pub fn order(&self) -> Option<u32> {
        match self.mode {
            ExampleMode::Log { order, .. } | ExampleMode::Prescribed { order, .. } => Some(order),
            ExampleMode::AnalyzeOnly => None,
        }
    }
}

pub fn examples() -> Vec<Example> {
    let log = |root_index, b, order| ExampleMode::Log { root_index, b, order, policy: ResonancePolicy::Error };
    let exp = |sigma_c, l, all_hold, a| Expected { sigma_c, l, all_hold, a };
    vec![
        Example {
            name: "prototype",
            summary: "ODE u'' = (u')^2 with u ~ -log t",
            source: Some("D[t,2](u) = D[t,1](u)^2"),
            max_deg: 8,
            mode: log(0, "0", 20),
            expected: exp(Some("0"), Some(0), true, Some("-1")),
        },
        Example {
            name: "prototype-pde",
            summary: "prototype with a perturbing x-derivative term",
            source: Some("D[t,2](u) = D[t,1](u)^2 + t*D[x1,1](u)^2"),
            max_deg: 4,
            mode: log(0, "x1", 6),
            expected: exp(Some("0"), Some(0), true, Some("-1")),
        },
        Example {
            name: "m3-l0",
            summary: "third order, l = 0; resonance at 2 resolved with log t",
            source: Some("D[t,3](u) = D[t,2](u)*D[t,1](u) + D[x1,1](u)^2"),
            max_deg: 4,
            mode: ExampleMode::Log { root_index: 0, b: "0", order: 6, policy: ResonancePolicy::Frobenius },
            expected: exp(Some("0"), Some(0), true, Some("-2")),
        },
        Example {
            name: "m3-cubic",
            summary: "third order cubic, u ~ i t log t",
            source: Some("D[t,3](u) = t*D[t,2](u)^3"),
            max_deg: 4,
            mode: log(0, "0", 12),
            expected: exp(Some("1"), Some(1), true, Some("i")),
        },
        Example {
            name: "m4-l0",
            summary: "fourth order, l = 0",
            source: Some("D[t,4](u) = D[t,3](u)*D[t,1](u) + D[x1,1](u)^2"),
            max_deg: 4,
            mode: log(0, "0", 6),
            expected: exp(Some("0"), Some(0), true, Some("-3")),
        },
        Example {
            name: "m4-l1",
            summary: "fourth order, l = 1; a maximizer contains u itself",
            source: Some("D[t,4](u) = D[t,3](u)^2*u + D[t,2](u)*D[t,1](u)*D[x1,1](u)"),
            max_deg: 4,
            mode: ExampleMode::AnalyzeOnly,
            expected: exp(Some("1"), Some(1), false, None),
        },
        Example {
            name: "m4-l2",
            summary: "fourth order, l = 2",
            source: Some("D[t,4](u) = D[t,3](u)^2 + u^2"),
            max_deg: 4,
            mode: log(0, "0", 6),
            expected: exp(Some("2"), Some(2), true, Some("-1/2")),
        },
        Example {
            name: "wave-quadratic",
            summary: "wave equation with g = (u_s)^2 near s = y/2",
            source: None,
            max_deg: 4,
            mode: log(0, "0", 8),
            expected: exp(Some("0"), Some(0), true, Some("-3/4")),
        },
        Example {
            name: "kdv-laurent",
            summary: "KdV Laurent series 2/t^2 + ... with resonances at 2 and 4",
            source: Some("D[t,3](u) = 6*u*D[t,1](u) - D[x1,1](u)"),
            max_deg: 4,
            mode: ExampleMode::Prescribed { lead_rho: -2, lead_coeff: "2", data: &[(2, "x1"), (4, "0")], order: 4 },
            expected: exp(Some("-2"), None, false, None),
        },
    ]
}

pub fn find_example(name: &str) -> Option<Example> {
    examples().into_iter().find(|e| e.name == name)
}

/// Differences between a fresh run and the stored expectation.
pub fn check_example(ex: &Example) -> Result<Vec<String>> {
    let spec = ex.spec()?;
    let report = check_assumptions(&spec);
    let mut diffs = Vec::new();
    let sigma = report.sigma_c.clone();
    let want_sigma = ex.expected.sigma_c.and_then(parse_q);
    if sigma != want_sigma {
        diffs.push(format!("sigma_c {sigma:?} != {want_sigma:?}"));
    }
    if report.l != ex.expected.l {
        diffs.push(format!("l {:?} != {:?}", report.l, ex.expected.l));
    }
    if report.all_hold() != ex.expected.all_hold {
        diffs.push(format!("assumptions {} != {}", report.all_hold(), ex.expected.all_hold));
    }
    match &ex.mode {
        ExampleMode::Log { root_index, b, order, policy } => {
            let b = parse_xpoly(b, spec.n)?;
            let run = run_log(&spec, *root_index, &b, *order, *policy)?;
            let a0 = run.leading.a.constant_term().to_dsl();
            let want = ex.expected.a.unwrap_or("");
            let want_val = parse_xpoly(want, spec.n)?.constant_term();
            if run.leading.a.constant_term() != want_val {
                diffs.push(format!("a(0) = {a0}, expected {want}"));
            }
            if !run.result.residual.exceeds(*order as i64) {
                diffs.push("residual does not exceed the order".into());
            }
        }
        ExampleMode::Prescribed { order, .. } => {
            let p = ex.prescription(spec.n)?.expect("prescribed mode");
            let res = run_prescribed(&spec, &p, *order)?;
            if !res.residual.exceeds(*order as i64) {
                diffs.push("residual does not exceed the order".into());
            }
        }
        ExampleMode::AnalyzeOnly => {}
    }
    Ok(diffs)
}
