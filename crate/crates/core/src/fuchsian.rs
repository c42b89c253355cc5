//! Reduction to a Fuchsian equation for `v` and order-by-order solving.
//!
//! With `u = t^l (a log t + b + v)` the equation multiplied by `t^{m−l}`
//! becomes `C(θ, x) v = E(v)`, where `C` is the characteristic operator and
//! `E` collects everything of positive t-valuation. Each order `t^k` is
//! then a finite triangular system in the powers of `log t`.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::AnalysisReport;
use crate::error::{Error, Result};
use crate::index::{DerivIndex, MuIndex};
use crate::leading::{b_lower, beta, falling_int};
use crate::parser::PDESpec;
use crate::scalar::{binom, factorial, fmt_q, Q, Scalar};
use crate::series::{compose_polynomial_in, xpoly_to_doc, CoeffDoc, LogSeries, SeriesDoc, TOrder};
use crate::xpoly::{XOrder, XPoly};

/// Version tag carried by every serialized result.
pub const FORMAT_VERSION: u32 = 1;

fn qi(k: i64) -> Q {
    Q::from_integer(k.into())
}

/// Polynomial in `λ` with coefficients in `x`, stored low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPoly {
    pub n: usize,
    pub coeffs: Vec<XPoly>,
}

impl LambdaPoly {
    pub fn zero(n: usize) -> Self {
        LambdaPoly { n, coeffs: Vec::new() }
    }

    /// `[λ + s; j]`.
    pub fn falling(n: usize, s: i64, j: u32) -> Self {
        let mut c = vec![Scalar::one()];
        for i in 0..j as i64 {
            let shift = Scalar::from_int(s - i);
            let mut next = vec![Scalar::zero(); c.len() + 1];
            for (d, cd) in c.iter().enumerate() {
                next[d + 1] += cd;
                next[d] += &(cd * &shift);
            }
            c = next;
        }
        LambdaPoly { n, coeffs: c.into_iter().map(|s| XPoly::constant(n, s, XOrder::Exact)).collect() }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn coeff(&self, d: usize) -> XPoly {
        self.coeffs.get(d).cloned().unwrap_or_else(|| XPoly::zero(self.n, XOrder::Exact))
    }

    pub fn add(&self, o: &LambdaPoly) -> LambdaPoly {
        let len = self.coeffs.len().max(o.coeffs.len());
        LambdaPoly { n: self.n, coeffs: (0..len).map(|d| self.coeff(d).add(&o.coeff(d))).collect() }
    }

    pub fn sub(&self, o: &LambdaPoly) -> LambdaPoly {
        self.add(&o.scale_x(&XPoly::constant(self.n, -Scalar::one(), XOrder::Exact)))
    }

    pub fn scale_x(&self, p: &XPoly) -> LambdaPoly {
        LambdaPoly { n: self.n, coeffs: self.coeffs.iter().map(|c| c.mul(p)).collect() }
    }

    pub fn truncated(&self, p: XOrder) -> LambdaPoly {
        LambdaPoly { n: self.n, coeffs: self.coeffs.iter().map(|c| c.truncated(p)).collect() }
    }

    pub fn eval(&self, lambda: &Scalar) -> XPoly {
        let mut acc = XPoly::zero(self.n, XOrder::Exact);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda).add(c);
        }
        acc
    }

    /// Taylor coefficients `P^{(i)}(ρ, x) / i!` for `i = 0..=deg`.
    pub fn taylor(&self, rho: &Scalar) -> Vec<XPoly> {
        let deg = self.coeffs.len();
        (0..deg)
            .map(|i| {
                let mut acc = XPoly::zero(self.n, XOrder::Exact);
                for k in i..deg {
                    let w = rho.pow((k - i) as u32).scale(&binom(k as u32, i as u32));
                    acc = acc.add(&self.coeffs[k].scale(&w));
                }
                acc
            })
            .collect()
    }
}

/// `C(λ, x) = [λ+l; m] − Σ_j L_j(x) [λ+l; j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharOperator {
    pub m: u32,
    pub l: u32,
    pub n: usize,
    pub lin: BTreeMap<u32, XPoly>,
}

impl CharOperator {
    pub fn poly(&self) -> LambdaPoly {
        let mut p = LambdaPoly::falling(self.n, self.l as i64, self.m);
        for (&j, lj) in &self.lin {
            p = p.sub(&LambdaPoly::falling(self.n, self.l as i64, j).scale_x(lj));
        }
        p
    }

    pub fn eval(&self, lambda: &Scalar) -> XPoly {
        self.poly().eval(lambda)
    }

    /// Monomial coefficients in `λ`, low degree first; the top one is 1.
    pub fn monomial_coeffs(&self) -> Vec<XPoly> {
        self.poly().coeffs
    }

    /// Inverse of [`monomial_coeffs`](Self::monomial_coeffs): recovers the `L_j`
    /// from a monic polynomial of degree `m`.
    pub fn from_monomial(m: u32, l: u32, coeffs: &[XPoly]) -> Result<CharOperator> {
        let n = coeffs.first().map(|c| c.n()).unwrap_or(1);
        if coeffs.len() != m as usize + 1 || !coeffs[m as usize].is_one() {
            return Err(Error::Domain(format!("expected a monic polynomial of degree {m}")));
        }
        let given = LambdaPoly { n, coeffs: coeffs.to_vec() };
        let mut rest = LambdaPoly::falling(n, l as i64, m).sub(&given);
        let mut lin = BTreeMap::new();
        for j in (0..m).rev() {
            let lj = rest.coeff(j as usize);
            if !lj.is_zero() {
                rest = rest.sub(&LambdaPoly::falling(n, l as i64, j).scale_x(&lj));
                lin.insert(j, lj);
            }
        }
        Ok(CharOperator { m, l, n, lin })
    }

    /// `C(θ, x) v`.
    pub fn apply(&self, v: &LogSeries) -> LogSeries {
        let mut acc = v.falling_apply(self.l as i64, self.m);
        for (&j, lj) in &self.lin {
            acc = acc.sub_aligned(&v.falling_apply(self.l as i64, j).scale_x(lj));
        }
        acc
    }

    /// Positive integers `k <= upto` with `C(k, 0) = 0`.
    pub fn resonances(&self, upto: i64) -> Vec<i64> {
        let p = self.poly();
        (1..=upto).filter(|&k| p.eval(&Scalar::from_int(k)).constant_term().is_zero()).collect()
    }

    pub fn truncated(&self, p: XOrder) -> CharOperator {
        CharOperator { lin: self.lin.iter().map(|(&j, c)| (j, c.truncated(p))).collect(), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonancePolicy {
    #[default]
    Error,
    Frobenius,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceRecord {
    pub rho: Q,
    pub multiplicity: u32,
    pub action: String,
    pub data: Option<XPoly>,
}

/// Solves `P(ρ + D_L) Q(L) = R(L)` for the log-polynomial coefficient of `t^ρ`,
/// where `rhs` holds only terms at exponent `rho` and `D_L = d/d(log t)`.
///
/// At a root of `P(·, 0)` the Frobenius policy needs the root to be
/// x-independent with multiplicity `r`; the log power is then raised by `r`
/// and the free coefficient is set to zero.
pub fn solve_log_block(
    p: &LambdaPoly,
    rho: &Q,
    rhs: &LogSeries,
    policy: ResonancePolicy,
    xcap: i64,
) -> Result<(LogSeries, Option<ResonanceRecord>)> {
    let n = p.n;
    let c = p.taylor(&Scalar::real(rho.clone()));
    let r = c.iter().position(|ci| !ci.constant_term().is_zero()).ok_or_else(|| Error::Resonance {
        rho: rho.clone(),
        msg: "characteristic polynomial vanishes identically".into(),
    })?;
    let mut record = None;
    if r > 0 {
        if policy == ResonancePolicy::Error {
            return Err(Error::Resonance { rho: rho.clone(), msg: format!("C({}, 0) = 0", fmt_q(rho)) });
        }
        if c[..r].iter().any(|ci| !ci.is_zero()) {
            return Err(Error::Resonance { rho: rho.clone(), msg: "resonance depends on x".into() });
        }
        record = Some(ResonanceRecord {
            rho: rho.clone(),
            multiplicity: r as u32,
            action: format!("log power raised by {r}, free coefficient set to 0"),
            data: None,
        });
    }
    let e = &c[r..];
    let inv = if e[0].is_constant() {
        XPoly::constant(n, e[0].constant_term().inv().expect("nonzero constant term"), XOrder::Exact)
    } else {
        e[0].inverse(xcap).expect("nonzero constant term")
    };
    let d = rhs.max_log_power() as usize;
    let mut s: Vec<XPoly> = vec![XPoly::zero(n, XOrder::Exact); d + 1];
    for qq in (0..=d).rev() {
        let mut acc = rhs.coeff_at(rho, qq as u32);
        for (i, ei) in e.iter().enumerate().skip(1) {
            if qq + i > d {
                break;
            }
            let w = Q::from_integer(factorial((qq + i) as u32) / factorial(qq as u32));
            acc = acc.sub(&ei.mul(&s[qq + i]).scale(&Scalar::real(w)));
        }
        s[qq] = acc.mul(&inv);
    }
    let xprec = rhs.xprec().min(inv.prec()).min(e.iter().map(|c| c.prec()).min().unwrap_or(XOrder::Exact));
    let mut out = LogSeries::zero(n, xprec, TOrder::Exact);
    for (qq, sq) in s.into_iter().enumerate() {
        let w = Q::from_integer(factorial(qq as u32)) / Q::from_integer(factorial((qq + r) as u32));
        out.insert(rho.clone(), (qq + r) as u32, sq.scale(&Scalar::real(w)));
    }
    Ok((out, record))
}

/// `C(θ, x) v = E(v)` with `E(v) = forcing + Σ linear·W + Σ nonlinear·W^ν`,
/// `W_{j,α} = [θ+l; j] ∂_x^α v`.
#[derive(Clone, Debug)]
pub struct ReducedEquation {
    pub spec: PDESpec,
    pub l: u32,
    pub a: XPoly,
    pub b: XPoly,
    pub op: CharOperator,
    pub vars: Vec<DerivIndex>,
    pub forcing: LogSeries,
    pub linear: BTreeMap<DerivIndex, LogSeries>,
    pub nonlinear: BTreeMap<MuIndex, LogSeries>,
    /// Smallest t-valuation any monomial of `E(v)` can have when `val(v) >= 1`.
    pub s_min: Option<Q>,
}

/// `t^{j−l} ∂_t^j ∂_x^α (t^l (a log t + b))`.
fn known_part(n: usize, l: u32, d: &DerivIndex, a: &XPoly, b: &XPoly) -> Result<LogSeries> {
    let da = a.d_alpha(&d.alpha);
    if d.j > l {
        return Ok(LogSeries::constant(da.scale(&beta(d.j, l)?)));
    }
    let lj = falling_int(l as i64, d.j);
    let db = b.d_alpha(&d.alpha);
    let mut s = LogSeries::zero(n, da.prec().min(db.prec()), TOrder::Exact);
    s.insert(Q::zero(), 1, da.scale(&lj));
    s.insert(Q::zero(), 0, da.scale(&b_lower(d.j, l)).add(&db.scale(&lj)));
    Ok(s)
}

fn l_coefficients(spec: &PDESpec, report: &AnalysisReport, l: u32, a: &XPoly) -> Result<BTreeMap<u32, XPoly>> {
    let mut lin: BTreeMap<u32, XPoly> = BTreeMap::new();
    for mu in &report.m0 {
        let term = spec.term(mu).expect("M0 entries come from the spec");
        let f0 = term.f0();
        let mut weight = Scalar::one();
        for (d, &p) in mu.entries() {
            weight = &weight * &beta(d.j, l)?.pow(p);
        }
        let apow = a.pow(mu.abs() - 1);
        for (d, &p) in mu.entries() {
            let w = &(&weight / &beta(d.j, l)?) * &Scalar::from_int(p as i64);
            let add = f0.mul(&apow).scale(&w);
            let e = lin.entry(d.j).or_insert_with(|| XPoly::zero(spec.n, XOrder::Exact));
            *e = e.add(&add);
        }
    }
    lin.retain(|_, c| !c.is_zero());
    Ok(lin)
}

/// Expands `t^{m−l} f(t, x, U)` around `u = t^l(a log t + b)` as a polynomial
/// in the `W_{j,α}` and splits off the characteristic operator.
pub fn reduce(spec: &PDESpec, report: &AnalysisReport, a: &XPoly, b: &XPoly) -> Result<ReducedEquation> {
    let l = report.require_all()?;
    let (m, n) = (spec.m, spec.n);
    let vars = spec.used_indices();
    let mut known = BTreeMap::new();
    for d in &vars {
        known.insert(d.clone(), known_part(n, l, d, a, b)?);
    }
    let mut g: BTreeMap<MuIndex, LogSeries> = BTreeMap::new();
    for term in &spec.terms {
        let e = m as i64 - l as i64 - term.mu.gamma() as i64 + (l * term.mu.abs()) as i64;
        let mut partial: BTreeMap<MuIndex, LogSeries> = BTreeMap::new();
        partial.insert(MuIndex::new(), term.f.mul_t_pow(&qi(e)));
        for (d, &p) in term.mu.entries() {
            let kd = &known[d];
            let kpows: Vec<LogSeries> = (0..=p).map(|s| kd.pow(s)).collect();
            let mut next: BTreeMap<MuIndex, LogSeries> = BTreeMap::new();
            for (nu, c) in &partial {
                for s in 0..=p {
                    let coeff = c.mul_aligned(&kpows[(p - s) as usize]).scale(&Scalar::real(binom(p, s)));
                    let key = nu.combined(&MuIndex::single(d.clone(), s));
                    let slot = next.remove(&key);
                    next.insert(key, match slot {
                        Some(old) => old.add_aligned(&coeff),
                        None => coeff,
                    });
                }
            }
            partial = next;
        }
        for (nu, c) in partial {
            let slot = g.remove(&nu);
            g.insert(nu, match slot {
                Some(old) => old.add_aligned(&c),
                None => c,
            });
        }
    }
    g.retain(|_, c| !c.is_zero());
    for (nu, c) in &g {
        if let Some(v) = c.valuation() {
            if v < Q::zero() {
                return Err(Error::Valuation(format!("coefficient of W^{} has t-valuation {}", nu.to_dsl(), fmt_q(&v))));
            }
        }
    }

    let lin = l_coefficients(spec, report, l, a)?;
    let op = CharOperator { m, l, n, lin };
    let zero = Q::zero();

    let g0 = g.remove(&MuIndex::new()).unwrap_or_else(|| LogSeries::zero(n, XOrder::Exact, TOrder::Exact));
    let beta_a = LogSeries::constant(a.scale(&beta(m, l)?));
    if !g0.slice(&zero).agrees_with(&beta_a) {
        return Err(Error::Cancellation(format!(
            "order-0 part of the v-independent terms is not β_(m,l)·a = {}",
            a.scale(&beta(m, l)?)
        )));
    }
    let forcing = g0.sub_aligned(&g0.slice(&zero));

    let mut linear = BTreeMap::new();
    let mut nonlinear = BTreeMap::new();
    for (nu, c) in g {
        let head = c.slice(&zero);
        if nu.abs() == 1 {
            let (d, _) = nu.entries().next().expect("one entry");
            let expect = match op.lin.get(&d.j) {
                Some(lj) if d.is_t_only() && d.j > l => LogSeries::constant(lj.clone()),
                _ => LogSeries::zero(n, XOrder::Exact, TOrder::Exact),
            };
            if !head.agrees_with(&expect) {
                return Err(Error::Valuation(format!("linear coefficient of {} has an unexpected order-0 part", d.to_dsl())));
            }
            let rest = c.sub_aligned(&head);
            if !rest.is_zero() {
                linear.insert(d.clone(), rest);
            }
        } else {
            if !head.is_log_free() {
                return Err(Error::Valuation(format!("coefficient of W^{} carries log t at order 0", nu.to_dsl())));
            }
            nonlinear.insert(nu, c);
        }
    }
    for d in op.lin.keys() {
        let idx = DerivIndex::t_only(*d, n);
        if !vars.contains(&idx) {
            return Err(Error::Valuation(format!("{} enters C but not the equation", idx.to_dsl())));
        }
    }

    let mut s_min: Option<Q> = forcing.valuation();
    let mut bump = |v: Option<Q>, add: u32| {
        if let Some(v) = v {
            let v = v + qi(add as i64);
            s_min = Some(match s_min.take() {
                Some(s) if s < v => s,
                _ => v,
            });
        }
    };
    for c in linear.values() {
        bump(c.valuation(), 1);
    }
    for (nu, c) in &nonlinear {
        bump(c.valuation(), nu.abs());
    }

    Ok(ReducedEquation { spec: spec.clone(), l, a: a.clone(), b: b.clone(), op, vars, forcing, linear, nonlinear, s_min })
}

impl ReducedEquation {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn w_value(&self, v: &LogSeries, d: &DerivIndex) -> LogSeries {
        v.d_alpha(&d.alpha).falling_apply(self.l as i64, d.j)
    }

    /// `E(v)`.
    pub fn rhs(&self, v: &LogSeries) -> LogSeries {
        let mut assign = BTreeMap::new();
        for d in &self.vars {
            assign.insert(d.clone(), self.w_value(v, d));
        }
        let mut terms: Vec<(MuIndex, LogSeries)> = vec![(MuIndex::new(), self.forcing.clone())];
        for (d, c) in &self.linear {
            terms.push((MuIndex::single(d.clone(), 1), c.clone()));
        }
        for (nu, c) in &self.nonlinear {
            terms.push((nu.clone(), c.clone()));
        }
        compose_polynomial_in(self.n(), &terms, &assign).expect("every W variable is assigned")
    }

    /// `C(θ, x) v − E(v)`.
    pub fn reduced_residual(&self, v: &LogSeries) -> LogSeries {
        self.op.apply(v).sub_aligned(&self.rhs(v))
    }

    pub fn truncated_x(&self, p: XOrder) -> ReducedEquation {
        ReducedEquation {
            op: self.op.truncated(p),
            forcing: self.forcing.truncate_x(p),
            linear: self.linear.iter().map(|(d, c)| (d.clone(), c.truncate_x(p))).collect(),
            nonlinear: self.nonlinear.iter().map(|(nu, c)| (nu.clone(), c.truncate_x(p))).collect(),
            ..self.clone()
        }
    }

    /// `t^l (a log t + b + v)`.
    pub fn assemble(&self, v: &LogSeries) -> LogSeries {
        let n = self.n();
        let mut base = LogSeries::zero(n, self.a.prec().min(self.b.prec()), TOrder::Exact);
        base.insert(Q::zero(), 1, self.a.clone());
        base.insert(Q::zero(), 0, self.b.clone());
        base.add_aligned(v).mul_t_pow(&qi(self.l as i64))
    }
}

/// Raw residual `∂_t^m u − f(t, x, U)` and the orders it certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    /// Lowest exponent with a nonzero term; `None` when no term survives.
    pub valuation: Option<Q>,
    /// t-order through which the residual is known.
    pub certified: TOrder,
    pub xprec: XOrder,
    pub series: LogSeries,
}

impl ResidualReport {
    /// True when the residual vanishes through `t^k`.
    pub fn exceeds(&self, k: i64) -> bool {
        self.certified.admits(&qi(k)) && self.valuation.as_ref().is_none_or(|v| v > &qi(k))
    }
}

/// Substitutes `u` into the original equation.
pub fn residual(spec: &PDESpec, u: &LogSeries, k: i64) -> Result<ResidualReport> {
    let mut assign = BTreeMap::new();
    for d in spec.used_indices() {
        assign.insert(d.clone(), u.d_t_n(d.j).d_alpha(&d.alpha));
    }
    let f = compose_polynomial_in(spec.n, &spec.rhs_terms(), &assign)?;
    let r = u.d_t_n(spec.m).sub_aligned(&f);
    if !r.tprec().admits(&qi(k)) {
        return Err(Error::Truncation(format!("residual known only through t^{}, order {k} requested", r.tprec())));
    }
    if !r.xprec().admits(spec.max_deg) {
        return Err(Error::Truncation(format!("residual known only to x-degree {}, {} requested", r.xprec(), spec.max_deg)));
    }
    let r = r.truncate_x(XOrder::Deg(spec.max_deg as i64));
    Ok(ResidualReport { valuation: r.valuation(), certified: r.tprec().clone(), xprec: r.xprec(), series: r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Log,
    Prescribed,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub mode: SolveMode,
    pub l: Option<u32>,
    pub a: Option<XPoly>,
    pub b: Option<XPoly>,
    /// Correction `v`, log mode only.
    pub v: Option<LogSeries>,
    pub u: LogSeries,
    pub resonances: Vec<ResonanceRecord>,
    pub order: u32,
    pub internal_order: i64,
    pub residual: ResidualReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceDoc {
    pub rho: String,
    pub multiplicity: u32,
    pub action: String,
    pub data: Option<Vec<CoeffDoc>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveDoc {
    pub version: u32,
    pub mode: SolveMode,
    pub l: Option<u32>,
    pub a: Option<Vec<CoeffDoc>>,
    pub b: Option<Vec<CoeffDoc>>,
    pub resonances: Vec<ResonanceDoc>,
    pub achieved_order: u32,
    pub internal_order: i64,
    pub residual_valuation: Option<String>,
    pub residual_certified_through: String,
    pub series: SeriesDoc,
}

impl SolveResult {
    pub fn to_doc(&self) -> SolveDoc {
        SolveDoc {
            version: FORMAT_VERSION,
            mode: self.mode,
            l: self.l,
            a: self.a.as_ref().map(xpoly_to_doc),
            b: self.b.as_ref().map(xpoly_to_doc),
            resonances: self
                .resonances
                .iter()
                .map(|r| ResonanceDoc {
                    rho: fmt_q(&r.rho),
                    multiplicity: r.multiplicity,
                    action: r.action.clone(),
                    data: r.data.as_ref().map(xpoly_to_doc),
                })
                .collect(),
            achieved_order: self.order,
            internal_order: self.internal_order,
            residual_valuation: self.residual.valuation.as_ref().map(fmt_q),
            residual_certified_through: self.residual.certified.to_string(),
            series: self.u.to_doc(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("result serializes")
    }
}

/// x-degree carried internally so that `order` t-steps of losing `α_max`
/// degrees each still leave `max_deg` certified.
pub fn x_budget(spec: &PDESpec, internal_order: i64) -> i64 {
    spec.max_deg as i64 + spec.alpha_max() as i64 * (internal_order.max(0) + 2)
}

/// Solves the reduced equation through `t^{K+m−l}` so that the residual of
/// the original equation vanishes through `t^K`.
pub fn solve_formal(red: &ReducedEquation, k: u32, policy: ResonancePolicy) -> Result<SolveResult> {
    let (m, l, n) = (red.spec.m, red.l, red.n());
    let k_int = k as i64 + m as i64 - l as i64;
    let d_int = x_budget(&red.spec, k_int);
    let xp = XOrder::Deg(d_int);
    let red_t = red.truncated_x(xp);
    let p = red_t.op.poly();
    let mut v = LogSeries::zero(n, xp, TOrder::Exact);
    let mut resonances = Vec::new();
    for step in 1..=k_int {
        let work = v.clone().truncate_t(TOrder::upto(step));
        let e = red_t.rhs(&work);
        if !e.tprec().admits(&qi(step)) {
            return Err(Error::Truncation(format!("right-hand side at order {step} is not determined")));
        }
        if let (Some(s), Some(val)) = (&red.s_min, e.valuation()) {
            if &val < s {
                return Err(Error::Valuation(format!("right-hand side has valuation {} below {}", fmt_q(&val), fmt_q(s))));
            }
        }
        let fk = e.slice(&qi(step));
        let (vk, rec) = solve_log_block(&p, &qi(step), &fk, policy, d_int)?;
        v = v.add_aligned(&vk);
        resonances.extend(rec);
    }
    let v = v.truncate_t(TOrder::upto(k_int));
    let u = red_t.assemble(&v);
    let spec = red.spec.clone();
    let res = residual(&spec, &u, k as i64)?;
    if !res.exceeds(k as i64) {
        return Err(Error::Residual(format!(
            "residual has valuation {} which does not exceed {k}",
            res.valuation.as_ref().map(fmt_q).unwrap_or_else(|| "+inf".into())
        )));
    }
    Ok(SolveResult {
        mode: SolveMode::Log,
        l: Some(l),
        a: Some(red.a.clone()),
        b: Some(red.b.clone()),
        v: Some(v),
        u,
        resonances,
        order: k,
        internal_order: k_int,
        residual: res,
    })
}

/// `∂f/∂U_d` as a polynomial in `U`.
fn partial_terms(spec: &PDESpec, d: &DerivIndex) -> Vec<(MuIndex, LogSeries)> {
    spec.terms
        .iter()
        .filter(|t| t.mu.get(d) > 0)
        .map(|t| {
            let p = t.mu.get(d);
            let rest = MuIndex::from_entries(t.mu.entries().map(|(e, &q)| (e.clone(), if e == d { q - 1 } else { q })));
            (rest, t.f.scale(&Scalar::from_int(p as i64)))
        })
        .collect()
}

/// Dominant indicial polynomial `P(ρ, x)` of the linearization at `u_lead`:
/// the terms of `∂f/∂U_{j,0}` whose valuation is exactly `j − m`.
pub fn indicial_polynomial(spec: &PDESpec, u_lead: &LogSeries) -> Result<LambdaPoly> {
    let (m, n) = (spec.m, spec.n);
    let mut assign = BTreeMap::new();
    for d in spec.used_indices() {
        assign.insert(d.clone(), u_lead.d_t_n(d.j).d_alpha(&d.alpha));
    }
    let mut p = LambdaPoly::falling(n, 0, m);
    for d in spec.used_indices() {
        let h = compose_polynomial_in(n, &partial_terms(spec, &d), &assign)?;
        let Some(v) = h.valuation() else { continue };
        let shift = &v - qi(d.j as i64);
        if shift < qi(-(m as i64)) {
            return Err(Error::DominantBalance(format!(
                "linearization in {} is more singular than the t-derivative of order {m}",
                d.to_dsl()
            )));
        }
        if shift == qi(-(m as i64)) {
            let head = h.slice(&v);
            if !d.is_t_only() || !head.is_log_free() {
                return Err(Error::DominantBalance(format!("dominant linear term in {} is not a pure t-derivative", d.to_dsl())));
            }
            let c = head.coeff_at(&v, 0);
            p = p.sub(&LambdaPoly::falling(n, 0, d.j).scale_x(&c));
        }
    }
    Ok(p)
}

/// Builds a series solution `u_lead + Σ c_ρ t^ρ` order by order, injecting
/// `resonance_data[ρ]` wherever the dominant indicial polynomial vanishes.
pub fn solve_prescribed(spec: &PDESpec, u_lead: &LogSeries, resonance_data: &BTreeMap<Q, XPoly>, k: u32) -> Result<SolveResult> {
    let m = spec.m;
    let rho0 = u_lead
        .valuation()
        .ok_or_else(|| Error::DominantBalance("leading term is zero".into()))?;
    let top = qi(k as i64 + m as i64);
    let span = (&top - &rho0).ceil().to_integer().to_i64().unwrap_or(0);
    let d_int = spec.max_deg as i64 + spec.alpha_max() as i64 * (span + 2);
    let xp = XOrder::Deg(d_int);
    let p = indicial_polynomial(spec, u_lead)?.truncated(xp);

    let mut pad = 0i64;
    for t in &spec.terms {
        let lead = t.mu.gamma() as i64 - t.k - m as i64;
        let extra = qi(lead) - rho0.clone() * qi(t.mu.abs() as i64 - 1);
        pad = pad.max(extra.ceil().to_integer().to_i64().unwrap_or(0));
    }

    let mut u = u_lead.clone().into_exact_t().truncate_x(xp);
    let first = residual_series(spec, &u.clone().truncate_t(TOrder::Upto(rho0.clone() + qi(pad.max(0) + m as i64))))?;
    let lead_order = &rho0 - qi(m as i64);
    if first.tprec().admits(&lead_order) && !first.slice(&lead_order).is_zero() {
        return Err(Error::DominantBalance("leading term does not balance the equation".into()));
    }

    let mut resonances = Vec::new();
    let mut rho = &rho0 + Q::one();
    while rho <= top {
        let target = &rho - qi(m as i64);
        let r = residual_series(spec, &u.clone().truncate_t(TOrder::Upto(&rho + qi(pad.max(0)))))?;
        if !r.tprec().admits(&target) {
            return Err(Error::Truncation(format!("residual at t^{} is not determined", fmt_q(&target))));
        }
        let rhs = r.slice(&target).neg().mul_t_pow(&qi(m as i64));
        let c = p.taylor(&Scalar::real(rho.clone()));
        let mult = c.iter().take_while(|ci| ci.is_zero()).count();
        if mult > 0 {
            if !rhs.is_zero() {
                return Err(Error::Compatibility { rho: rho.clone(), msg: "nonzero right-hand side at a resonance".into() });
            }
            let data = resonance_data.get(&rho).ok_or_else(|| Error::MissingResonanceData(rho.clone()))?;
            u.insert(rho.clone(), 0, data.truncated(xp));
            resonances.push(ResonanceRecord {
                rho: rho.clone(),
                multiplicity: mult as u32,
                action: "prescribed data injected".into(),
                data: Some(data.clone()),
            });
        } else {
            if c[0].constant_term().is_zero() {
                return Err(Error::Resonance { rho: rho.clone(), msg: "resonance depends on x".into() });
            }
            let (corr, _) = solve_log_block(&p, &rho, &rhs, ResonancePolicy::Error, d_int)?;
            u = u.add_aligned(&corr);
        }
        rho += Q::one();
    }
    let u = u.truncate_t(TOrder::Upto(top));
    let res = residual(spec, &u, k as i64)?;
    if !res.exceeds(k as i64) {
        return Err(Error::Residual(format!(
            "residual has valuation {} which does not exceed {k}",
            res.valuation.as_ref().map(fmt_q).unwrap_or_else(|| "+inf".into())
        )));
    }
    Ok(SolveResult {
        mode: SolveMode::Prescribed,
        l: None,
        a: None,
        b: None,
        v: None,
        u,
        resonances,
        order: k,
        internal_order: k as i64 + m as i64,
        residual: res,
    })
}

fn residual_series(spec: &PDESpec, u: &LogSeries) -> Result<LogSeries> {
    let mut assign = BTreeMap::new();
    for d in spec.used_indices() {
        assign.insert(d.clone(), u.d_t_n(d.j).d_alpha(&d.alpha));
    }
    let f = compose_polynomial_in(spec.n, &spec.rhs_terms(), &assign)?;
    Ok(u.d_t_n(spec.m).sub_aligned(&f))
}
