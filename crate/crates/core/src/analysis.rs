//! Characteristic exponent, the maximizing set `M0`, and the structural
//! assumptions needed by the logarithmic pipeline.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::MuIndex;
use crate::parser::PDESpec;
use crate::scalar::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub m: u32,
    /// `None` stands for `−∞` (no term with `|μ| >= 2`).
    pub sigma_c: Option<Q>,
    pub l: Option<u32>,
    pub m0: Vec<MuIndex>,
    pub a0_holds: bool,
    pub a1_holds: bool,
    pub a2_holds: bool,
    pub a3_holds: bool,
    /// Best admissible constant; `None` when vacuous (`+∞`) or when `l` is absent.
    pub a3_constant: Option<Q>,
    pub a3_vacuous: bool,
    pub delta_table: BTreeMap<MuIndex, i64>,
    pub mu_l_table: BTreeMap<MuIndex, u32>,
    pub diagnostics: Vec<String>,
}

impl AnalysisReport {
    pub fn all_hold(&self) -> bool {
        self.a0_holds && self.a1_holds && self.a2_holds && self.a3_holds
    }

    /// Error naming the first failed assumption, if any.
    pub fn require_all(&self) -> Result<u32> {
        let fail = |name: &str| {
            let detail = self.diagnostics.join("; ");
            Err(Error::Assumption(format!("{name} fails: {detail}")))
        };
        if !self.a0_holds {
            return fail("A0");
        }
        if !self.a1_holds {
            return fail("A1");
        }
        if !self.a2_holds {
            return fail("A2");
        }
        if !self.a3_holds {
            return fail("A3");
        }
        Ok(self.l.expect("A0 implies l"))
    }

    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            m: self.m,
            sigma_c: self.sigma_c.as_ref().map(fmt_q).unwrap_or_else(|| "-inf".into()),
            l: self.l,
            m0: self.m0.iter().map(|mu| mu.to_dsl()).collect(),
            a0_holds: self.a0_holds,
            a1_holds: self.a1_holds,
            a2_holds: self.a2_holds,
            a3_holds: self.a3_holds,
            a3_constant: match (&self.a3_constant, self.a3_vacuous) {
                (_, true) => Some("inf".into()),
                (Some(c), false) => Some(fmt_q(c)),
                (None, false) => None,
            },
            delta_table: self.delta_table.iter().map(|(mu, d)| (mu.to_dsl(), *d)).collect(),
            mu_l_table: self.mu_l_table.iter().map(|(mu, d)| (mu.to_dsl(), *d)).collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("report serializes")
    }
}

/// Structured form of an [`AnalysisReport`]; rationals are `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportDoc {
    pub m: u32,
    pub sigma_c: String,
    pub l: Option<u32>,
    pub m0: Vec<String>,
    pub a0_holds: bool,
    pub a1_holds: bool,
    pub a2_holds: bool,
    pub a3_holds: bool,
    pub a3_constant: Option<String>,
    pub delta_table: BTreeMap<String, i64>,
    pub mu_l_table: BTreeMap<String, u32>,
    pub diagnostics: Vec<String>,
}

fn quotient(spec: &PDESpec, mu: &MuIndex, k: i64) -> Q {
    let num = mu.gamma() as i64 - spec.m as i64 - k;
    Q::new(num.into(), (mu.abs() as i64 - 1).into())
}

/// `sup_{|μ|>=2} (γ(μ) − m − k_μ)/(|μ| − 1)`, or `None` for `−∞`.
pub fn characteristic_exponent(spec: &PDESpec) -> Option<Q> {
    spec.terms
        .iter()
        .filter(|t| t.mu.abs() >= 2)
        .map(|t| quotient(spec, &t.mu, t.k))
        .max()
}

/// The maximizers with `|μ| >= 2` for the exponent `l`.
pub fn classify_m0(spec: &PDESpec, l: i64) -> Result<Vec<MuIndex>> {
    let lq = Q::from_integer(l.into());
    let m0: Vec<MuIndex> = spec
        .terms
        .iter()
        .filter(|t| t.mu.abs() >= 2 && quotient(spec, &t.mu, t.k) == lq)
        .map(|t| t.mu.clone())
        .collect();
    if m0.is_empty() {
        return Err(Error::Assumption(format!("A1: no term with |mu| >= 2 attains exponent {l}")));
    }
    Ok(m0)
}

/// `δ(μ) = m − l + k_μ − γ(μ) + l|μ|`.
pub fn delta(m: u32, l: u32, mu: &MuIndex, k: i64) -> i64 {
    m as i64 - l as i64 + k - mu.gamma() as i64 + (l * mu.abs()) as i64
}

pub fn check_assumptions(spec: &PDESpec) -> AnalysisReport {
    let m = spec.m;
    let sigma_c = characteristic_exponent(spec);
    let mut diagnostics = Vec::new();
    let mut report = AnalysisReport {
        m,
        sigma_c: sigma_c.clone(),
        l: None,
        m0: Vec::new(),
        a0_holds: false,
        a1_holds: false,
        a2_holds: false,
        a3_holds: false,
        a3_constant: None,
        a3_vacuous: false,
        delta_table: BTreeMap::new(),
        mu_l_table: BTreeMap::new(),
        diagnostics: Vec::new(),
    };
    let l = match &sigma_c {
        None => {
            diagnostics.push("no nonlinear term (|mu| >= 2): sigma_c = -inf".into());
            None
        }
        Some(s) if !s.is_integer() => {
            diagnostics.push(format!(
                "fractional regime: sigma_c = {} is not an integer; fractional-power expansions apply and the log pipeline is blocked",
                fmt_q(s)
            ));
            None
        }
        Some(s) if s.is_negative() || s > &Q::from_integer((m as i64 - 2).into()) => {
            diagnostics.push(format!(
                "out-of-range regime: sigma_c = {} lies outside 0..={}; the log pipeline is blocked",
                fmt_q(s),
                m as i64 - 2
            ));
            if s == &Q::from_integer((m as i64 - 1).into()) {
                diagnostics.push("sigma_c = m - 1 (recorded only)".into());
            }
            None
        }
        Some(s) => s.to_integer().to_u32(),
    };
    report.l = l;
    report.a0_holds = l.is_some();
    let Some(l) = l else {
        report.diagnostics = diagnostics;
        return report;
    };

    match classify_m0(spec, l as i64) {
        Ok(m0) => {
            report.m0 = m0;
            report.a1_holds = true;
        }
        Err(e) => diagnostics.push(e.to_string()),
    }

    for t in &spec.terms {
        report.delta_table.insert(t.mu.clone(), delta(m, l, &t.mu, t.k));
        report.mu_l_table.insert(t.mu.clone(), t.mu.abs_l(l));
    }

    // Equivalent form: sup over all μ of γ − l|μ| − k equals m − l.
    let sup_all = spec.terms.iter().map(|t| t.mu.gamma() as i64 - (l * t.mu.abs()) as i64 - t.k).max();
    if sup_all != Some(m as i64 - l as i64) {
        let low: Vec<String> = spec
            .terms
            .iter()
            .filter(|t| t.mu.abs() < 2 && t.mu.gamma() as i64 - (l * t.mu.abs()) as i64 - t.k >= m as i64 - l as i64)
            .map(|t| t.mu.to_dsl())
            .collect();
        if !low.is_empty() {
            report.a1_holds = false;
            diagnostics.push(format!("terms with |mu| < 2 reach the critical weight: {}", low.join(", ")));
        }
    }

    let mut a2 = report.a1_holds;
    for mu in &report.m0 {
        for (d, _) in mu.entries() {
            if d.j < l + 1 || !d.is_t_only() {
                a2 = false;
                diagnostics.push(format!("A2: {} in M0 uses {} (need j >= {} and alpha = 0)", mu.to_dsl(), d.to_dsl(), l + 1));
            }
        }
    }
    report.a2_holds = a2;

    let mut best: Option<Q> = None;
    for t in &spec.terms {
        if report.m0.contains(&t.mu) {
            continue;
        }
        let ml = t.mu.abs_l(l);
        if ml == 0 {
            continue;
        }
        let c = Q::new(report.delta_table[&t.mu].into(), (ml as i64).into());
        best = Some(match best {
            Some(b) if b <= c => b,
            _ => c,
        });
    }
    match best {
        None => {
            report.a3_vacuous = true;
            report.a3_holds = true;
        }
        Some(c) => {
            report.a3_holds = c > Q::zero();
            if !report.a3_holds {
                diagnostics.push(format!("A3: best constant C = {} is not positive", fmt_q(&c)));
            }
            report.a3_constant = Some(c);
        }
    }
    report.diagnostics = diagnostics;
    report
}

/// Mismatches of the δ dichotomy and of the equivalent sup formulation on an accepted spec.
pub fn dichotomy_mismatches(spec: &PDESpec, report: &AnalysisReport) -> Vec<String> {
    let mut out = Vec::new();
    let Some(l) = report.l else {
        return vec!["no integral exponent".into()];
    };
    for t in &spec.terms {
        let d = delta(spec.m, l, &t.mu, t.k);
        let in_m0 = report.m0.contains(&t.mu);
        if in_m0 && d != 0 {
            out.push(format!("{}: delta = {d} on M0", t.mu.to_dsl()));
        }
        if !in_m0 && d < 1 {
            out.push(format!("{}: delta = {d} off M0", t.mu.to_dsl()));
        }
        if in_m0 && t.mu.abs() < 2 {
            out.push(format!("{}: |mu| < 2 in M0", t.mu.to_dsl()));
        }
    }
    let sup_all = spec.terms.iter().map(|t| t.mu.gamma() as i64 - (l * t.mu.abs()) as i64 - t.k).max();
    if sup_all != Some(spec.m as i64 - l as i64) {
        out.push(format!("sup of gamma - l|mu| - k is {sup_all:?}, expected {}", spec.m - l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::DerivIndex;
    use crate::parser::parse_equation;
    use crate::scalar::q;

    fn report(src: &str) -> AnalysisReport {
        check_assumptions(&parse_equation(src).unwrap())
    }

    #[test]
    fn prototype_passes() {
        let r = report("D[t,2](u) = D[t,1](u)^2");
        assert_eq!(r.sigma_c, Some(q(0)));
        assert_eq!(r.l, Some(0));
        assert_eq!(r.m0, vec![MuIndex::single(DerivIndex::t_only(1, 1), 2)]);
        assert!(r.all_hold());
        assert!(r.a3_vacuous);
    }

    #[test]
    fn cubic_and_perturbation() {
        let r = report("D[t,3](u) = t*D[t,2](u)^3");
        assert_eq!(r.l, Some(1));
        assert_eq!(r.m0, vec![MuIndex::single(DerivIndex::t_only(2, 1), 3)]);
        let spec = parse_equation("D[t,3](u) = t*D[t,2](u)^3 + t^4*D[t,1](u)^3").unwrap();
        let r = check_assumptions(&spec);
        assert!(r.all_hold());
        let pert = MuIndex::single(DerivIndex::t_only(1, 1), 3);
        assert_eq!(r.delta_table[&pert], 6);
        assert_eq!(r.mu_l_table[&pert], 3);
        assert_eq!(r.a3_constant, Some(q(2)));
        assert!(dichotomy_mismatches(&spec, &r).is_empty());
    }

    #[test]
    fn kdv_is_outside_log_regime() {
        let r = report("D[t,3](u) = 6*u*D[t,1](u) - D[x1,1](u)");
        assert_eq!(r.sigma_c, Some(q(-2)));
        assert!(!r.a0_holds);
        assert!(r.diagnostics.iter().any(|d| d.contains("out-of-range regime")));
    }

    #[test]
    fn a2_violation() {
        let r = report("D[t,2](u) = D[t,1]D[x1,1](u)^2");
        assert!(r.a0_holds && r.a1_holds);
        assert!(!r.a2_holds);
        let r = report("D[t,4](u) = D[t,3](u)^2*u + D[t,2](u)*D[t,1](u)*D[x1,1](u)");
        assert_eq!(r.l, Some(1));
        assert!(!r.a2_holds);
    }

    #[test]
    fn non_integral_exponent() {
        let r = report("D[t,3](u) = D[t,2](u)^2*D[t,1](u)");
        assert_eq!(r.sigma_c, Some(crate::scalar::q_frac(1, 1)));
        let r = report("D[t,3](u) = D[t,1](u)^3*t^0 + D[t,2](u)*u^2");
        assert_eq!(r.sigma_c, Some(crate::scalar::q_frac(0, 1)));
        let r = report("D[t,2](u) = D[t,1](u)^2*u");
        assert_eq!(r.sigma_c, Some(q(0)));
        let r = report("D[t,3](u) = D[t,2](u)^2*D[t,1](u)*u");
        assert_eq!(r.sigma_c, Some(crate::scalar::q_frac(2, 3)));
        assert!(!r.a0_holds);
        assert!(r.diagnostics[0].contains("not an integer"));
    }

    #[test]
    fn invariant_under_term_splitting() {
        let a = parse_equation("D[t,2](u) = D[t,1](u)^2 + u").unwrap();
        let b = parse_equation("D[t,2](u) = u + 1/2*D[t,1](u)^2 + 1/2*D[t,1](u)^2").unwrap();
        assert_eq!(characteristic_exponent(&a), characteristic_exponent(&b));
    }
}
