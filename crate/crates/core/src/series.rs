//! Truncated log-power series `Σ c_{ρ,q}(x) t^ρ (log t)^q`.
//!
//! A [`LogSeries`] records two precisions: the t-order `Θ` (terms with
//! `ρ > Θ` are unknown and never stored) and the x-precision shared by all
//! coefficients. Every operation computes the precision its output is
//! guaranteed to have; consumers check it rather than trusting the data.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{DerivIndex, MuIndex};
use crate::scalar::{fmt_q, parse_q, Q, Scalar};
use crate::xpoly::{XOrder, XPoly};

/// Precision in t.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TOrder {
    /// Terms with `ρ <= Θ` are exact.
    Upto(Q),
    Exact,
}

impl TOrder {
    pub fn upto(k: i64) -> TOrder {
        TOrder::Upto(Q::from_integer(k.into()))
    }

    pub fn admits(&self, rho: &Q) -> bool {
        match self {
            TOrder::Exact => true,
            TOrder::Upto(t) => rho <= t,
        }
    }

    pub fn shifted(&self, by: &Q) -> TOrder {
        match self {
            TOrder::Exact => TOrder::Exact,
            TOrder::Upto(t) => TOrder::Upto(t + by),
        }
    }

    pub fn as_q(&self) -> Option<&Q> {
        match self {
            TOrder::Exact => None,
            TOrder::Upto(t) => Some(t),
        }
    }
}

impl fmt::Display for TOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TOrder::Exact => write!(f, "exact"),
            TOrder::Upto(t) => write!(f, "{}", fmt_q(t)),
        }
    }
}

/// One monomial `coeff(x) t^rho (log t)^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogTerm {
    pub rho: Q,
    pub q: u32,
    pub coeff: XPoly,
}

#[derive(Clone, PartialEq, Eq)]
pub struct LogSeries {
    n: usize,
    xprec: XOrder,
    tprec: TOrder,
    terms: BTreeMap<(Q, u32), XPoly>,
}

impl LogSeries {
    pub fn zero(n: usize, xprec: XOrder, tprec: TOrder) -> Self {
        LogSeries { n, xprec, tprec, terms: BTreeMap::new() }
    }

    /// Exact series `c(x) t^rho (log t)^q`.
    pub fn monomial(rho: Q, q: u32, coeff: XPoly) -> Self {
        let mut s = LogSeries::zero(coeff.n(), coeff.prec(), TOrder::Exact);
        s.insert(rho, q, coeff);
        s
    }

    pub fn constant(coeff: XPoly) -> Self {
        LogSeries::monomial(Q::zero(), 0, coeff)
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        LogSeries::constant(XPoly::constant(n, c, XOrder::Exact))
    }

    pub fn one(n: usize) -> Self {
        LogSeries::scalar(n, Scalar::one())
    }

    /// `t^rho` (exact, x-independent).
    pub fn t_pow(n: usize, rho: Q) -> Self {
        LogSeries::monomial(rho, 0, XPoly::one(n))
    }

    /// `log t`.
    pub fn log_t(n: usize) -> Self {
        LogSeries::monomial(Q::zero(), 1, XPoly::one(n))
    }

    pub fn from_terms<I: IntoIterator<Item = LogTerm>>(n: usize, xprec: XOrder, tprec: TOrder, terms: I) -> Self {
        let mut s = LogSeries::zero(n, xprec, tprec);
        for t in terms {
            s.insert(t.rho, t.q, t.coeff);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xprec(&self) -> XOrder {
        self.xprec
    }

    pub fn tprec(&self) -> &TOrder {
        &self.tprec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c t^rho log^q` in place, respecting both precisions.
    pub fn insert(&mut self, rho: Q, q: u32, c: XPoly) {
        assert_eq!(c.n(), self.n, "coefficient dimension does not match series");
        if !self.tprec.admits(&rho) {
            return;
        }
        if c.prec() < self.xprec {
            self.lower_xprec(c.prec());
        }
        let c = c.truncated(self.xprec);
        if c.is_zero() {
            return;
        }
        let key = (rho, q);
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    fn lower_xprec(&mut self, p: XOrder) {
        self.xprec = p;
        let old = std::mem::take(&mut self.terms);
        for (k, c) in old {
            let c = c.truncated(p);
            if !c.is_zero() {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = LogTerm> + '_ {
        self.terms.iter().map(|((rho, q), c)| LogTerm { rho: rho.clone(), q: *q, coeff: c.clone() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Q, u32), &XPoly)> {
        self.terms.iter()
    }

    /// Coefficient of `t^rho (log t)^q`, zero if absent.
    pub fn coeff_at(&self, rho: &Q, q: u32) -> XPoly {
        self.terms
            .get(&(rho.clone(), q))
            .cloned()
            .unwrap_or_else(|| XPoly::zero(self.n, self.xprec))
    }

    /// Minimal exponent present; `None` for the empty series (+∞).
    pub fn valuation(&self) -> Option<Q> {
        self.terms.keys().next().map(|(r, _)| r.clone())
    }

    /// Lower bound for the valuation of the represented function.
    fn val_bound(&self) -> Option<Q> {
        match (self.valuation(), &self.tprec) {
            (Some(v), _) => Some(v),
            (None, TOrder::Upto(t)) => Some(t.clone()),
            (None, TOrder::Exact) => None,
        }
    }

    /// Distinct exponents present, ascending.
    pub fn exponents(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.terms.keys().map(|(r, _)| r.clone()).collect();
        v.dedup();
        v
    }

    pub fn max_log_power(&self) -> u32 {
        self.terms.keys().map(|(_, q)| *q).max().unwrap_or(0)
    }

    pub fn is_log_free(&self) -> bool {
        self.terms.keys().all(|(_, q)| *q == 0)
    }

    /// All terms at exponent `rho`, as an exact series.
    pub fn slice(&self, rho: &Q) -> LogSeries {
        let mut s = LogSeries::zero(self.n, self.xprec, TOrder::Exact);
        for ((r, q), c) in self.terms.range((rho.clone(), 0)..) {
            if r != rho {
                break;
            }
            s.terms.insert((r.clone(), *q), c.clone());
        }
        s
    }

    /// Keeps terms with `lo <= ρ <= hi`; precision becomes `min(Θ, hi)`.
    pub fn band(&self, lo: &Q, hi: &Q) -> LogSeries {
        let tprec = self.tprec.clone().min(TOrder::Upto(hi.clone()));
        let mut s = LogSeries::zero(self.n, self.xprec, tprec);
        for ((r, q), c) in &self.terms {
            if r >= lo && r <= hi {
                s.terms.insert((r.clone(), *q), c.clone());
            }
        }
        s
    }

    pub fn truncate_t(&self, theta: TOrder) -> LogSeries {
        let tprec = self.tprec.clone().min(theta);
        let mut s = LogSeries::zero(self.n, self.xprec, tprec.clone());
        for ((r, q), c) in &self.terms {
            if tprec.admits(r) {
                s.terms.insert((r.clone(), *q), c.clone());
            }
        }
        s
    }

    pub fn truncate_x(&self, p: XOrder) -> LogSeries {
        let mut s = self.clone();
        if p < s.xprec {
            s.lower_xprec(p);
        }
        s
    }

    /// Declares the stored data to be the whole function in t.
    pub fn into_exact_t(mut self) -> LogSeries {
        self.tprec = TOrder::Exact;
        self
    }

    /// Declares the stored data to be exact in x.
    pub fn into_exact_x(mut self) -> LogSeries {
        self.xprec = XOrder::Exact;
        for c in self.terms.values_mut() {
            *c = c.clone().into_exact();
        }
        self
    }

    fn check_config(&self, o: &LogSeries, op: &str) -> Result<()> {
        if self.n != o.n || self.xprec != o.xprec || self.tprec != o.tprec {
            return Err(Error::ConfigMismatch(format!(
                "{op}: (n={}, max_deg={}, t_order={}) vs (n={}, max_deg={}, t_order={})",
                self.n, self.xprec, self.tprec, o.n, o.xprec, o.tprec
            )));
        }
        Ok(())
    }

    /// Sum of two series sharing `n`, x-precision and `Θ`.
    pub fn add(&self, o: &LogSeries) -> Result<LogSeries> {
        self.check_config(o, "add")?;
        Ok(self.add_aligned(o))
    }

    /// Product of two series sharing `n`, x-precision and `Θ`.
    pub fn mul(&self, o: &LogSeries) -> Result<LogSeries> {
        self.check_config(o, "mul")?;
        Ok(self.mul_aligned(o))
    }

    /// Sum at the coarser of the two precisions.
    pub fn add_aligned(&self, o: &LogSeries) -> LogSeries {
        assert_eq!(self.n, o.n, "series dimension mismatch");
        let tprec = self.tprec.clone().min(o.tprec.clone());
        let xprec = self.xprec.min(o.xprec);
        let mut r = LogSeries::zero(self.n, xprec, tprec);
        for ((rho, q), c) in self.terms.iter().chain(o.terms.iter()) {
            r.insert(rho.clone(), *q, c.clone());
        }
        r
    }

    pub fn sub_aligned(&self, o: &LogSeries) -> LogSeries {
        self.add_aligned(&o.neg())
    }

    pub fn neg(&self) -> LogSeries {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = c.neg();
        }
        r
    }

    /// Product; the output is valid up to `min(Θ1 + v2, Θ2 + v1)`.
    pub fn mul_aligned(&self, o: &LogSeries) -> LogSeries {
        assert_eq!(self.n, o.n, "series dimension mismatch");
        let xprec = self.xprec.min(o.xprec);
        let tprec = match (&self.tprec, &o.tprec) {
            (TOrder::Exact, TOrder::Exact) => TOrder::Exact,
            (TOrder::Exact, TOrder::Upto(t2)) => match self.valuation() {
                Some(v1) => TOrder::Upto(t2 + v1),
                None => TOrder::Exact,
            },
            (TOrder::Upto(t1), TOrder::Exact) => match o.valuation() {
                Some(v2) => TOrder::Upto(t1 + v2),
                None => TOrder::Exact,
            },
            (TOrder::Upto(t1), TOrder::Upto(t2)) => {
                let v1 = self.val_bound().expect("truncated series has a valuation bound");
                let v2 = o.val_bound().expect("truncated series has a valuation bound");
                TOrder::Upto((t1 + &v2).min(t2 + &v1))
            }
        };
        let mut r = LogSeries::zero(self.n, xprec, tprec);
        for ((r1, q1), c1) in &self.terms {
            for ((r2, q2), c2) in &o.terms {
                let rho = r1 + r2;
                if !r.tprec.admits(&rho) {
                    continue;
                }
                r.insert(rho, q1 + q2, c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> LogSeries {
        let mut acc = LogSeries::constant(XPoly::constant(self.n, Scalar::one(), XOrder::Exact));
        for _ in 0..e {
            acc = acc.mul_aligned(self);
        }
        acc
    }

    pub fn scale(&self, k: &Scalar) -> LogSeries {
        let mut r = LogSeries::zero(self.n, self.xprec, self.tprec.clone());
        if k.is_zero() {
            return r;
        }
        for ((rho, q), c) in &self.terms {
            r.terms.insert((rho.clone(), *q), c.scale(k));
        }
        r
    }

    /// Multiplies every coefficient by `p(x)`.
    pub fn scale_x(&self, p: &XPoly) -> LogSeries {
        self.mul_aligned(&LogSeries::constant(p.clone()))
    }

    /// Multiplication by `t^r`.
    pub fn mul_t_pow(&self, r: &Q) -> LogSeries {
        LogSeries {
            n: self.n,
            xprec: self.xprec,
            tprec: self.tprec.shifted(r),
            terms: self.terms.iter().map(|((rho, q), c)| ((rho + r, *q), c.clone())).collect(),
        }
    }

    /// `∂_t`; `Θ` drops by one.
    pub fn d_t(&self) -> LogSeries {
        let mut r = LogSeries::zero(self.n, self.xprec, self.tprec.shifted(&-Q::one()));
        for ((rho, q), c) in &self.terms {
            let rho1 = rho - Q::one();
            if !rho.is_zero() {
                r.insert(rho1.clone(), *q, c.scale(&Scalar::real(rho.clone())));
            }
            if *q > 0 {
                r.insert(rho1, q - 1, c.scale(&Scalar::from_int(*q as i64)));
            }
        }
        r
    }

    pub fn d_t_n(&self, j: u32) -> LogSeries {
        let mut r = self.clone();
        for _ in 0..j {
            r = r.d_t();
        }
        r
    }

    /// Euler operator `θ = t∂_t`; `Θ` is preserved.
    pub fn theta(&self) -> LogSeries {
        let mut r = LogSeries::zero(self.n, self.xprec, self.tprec.clone());
        for ((rho, q), c) in &self.terms {
            if !rho.is_zero() {
                r.insert(rho.clone(), *q, c.scale(&Scalar::real(rho.clone())));
            }
            if *q > 0 {
                r.insert(rho.clone(), q - 1, c.scale(&Scalar::from_int(*q as i64)));
            }
        }
        r
    }

    pub fn theta_n(&self, j: u32) -> LogSeries {
        let mut r = self.clone();
        for _ in 0..j {
            r = r.theta();
        }
        r
    }

    /// `∂/∂x_axis` (1-based); the x-precision drops by one.
    pub fn d_x(&self, axis: usize) -> Result<LogSeries> {
        if axis == 0 || axis > self.n {
            return Err(Error::AxisOutOfRange { axis, n: self.n });
        }
        let mut r = LogSeries::zero(self.n, self.xprec.lowered(1), self.tprec.clone());
        for ((rho, q), c) in &self.terms {
            r.insert(rho.clone(), *q, c.d_x(axis));
        }
        Ok(r)
    }

    /// `∂_x^alpha`.
    pub fn d_alpha(&self, alpha: &[u32]) -> LogSeries {
        let mut r = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                r = r.d_x(i + 1).expect("alpha length matches n");
            }
        }
        r
    }

    /// Applies `[θ + l; j] = (θ+l)(θ+l-1)…(θ+l-j+1)`.
    pub fn falling_apply(&self, l: i64, j: u32) -> LogSeries {
        let mut r = self.clone();
        for i in 0..j as i64 {
            let shift = Scalar::from_int(l - i);
            r = r.theta().add_aligned(&r.scale(&shift));
        }
        r
    }

    /// Coefficient-norm surrogate summed over all terms.
    pub fn norm(&self, radius: &Q) -> Q {
        self.terms.values().map(|c| c.norm(radius)).fold(Q::zero(), |a, b| a + b)
    }

    /// True when both agree on every term both precisions certify.
    pub fn agrees_with(&self, o: &LogSeries) -> bool {
        self.sub_aligned(o).is_zero()
    }
}

/// Evaluates `Σ_μ coeff_μ Π assignment[(j,α)]^{μ_{j,α}}`.
pub fn compose_polynomial(terms: &[(MuIndex, LogSeries)], assignment: &BTreeMap<DerivIndex, LogSeries>) -> Result<LogSeries> {
    let n = terms
        .first()
        .map(|(_, c)| c.n())
        .or_else(|| assignment.values().next().map(|s| s.n()))
        .unwrap_or(1);
    compose_polynomial_in(n, terms, assignment)
}

pub fn compose_polynomial_in(
    n: usize,
    terms: &[(MuIndex, LogSeries)],
    assignment: &BTreeMap<DerivIndex, LogSeries>,
) -> Result<LogSeries> {
    let mut powers: BTreeMap<DerivIndex, Vec<LogSeries>> = BTreeMap::new();
    let mut acc = LogSeries::zero(n, XOrder::Exact, TOrder::Exact);
    for (mu, coeff) in terms {
        let mut prod = coeff.clone();
        for (d, &p) in mu.entries() {
            let base = assignment.get(d).ok_or_else(|| Error::MissingAssignment(d.to_dsl()))?;
            let cache = powers.entry(d.clone()).or_insert_with(|| vec![LogSeries::one(n)]);
            while cache.len() <= p as usize {
                let next = cache.last().expect("nonempty").mul_aligned(base);
                cache.push(next);
            }
            prod = prod.mul_aligned(&cache[p as usize]);
        }
        acc = acc.add_aligned(&prod);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDoc {
    pub alpha: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub rho: String,
    pub logpow: u32,
    pub coeff: Vec<CoeffDoc>,
}

/// Structured form of a [`LogSeries`]; `None` precisions mean exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub n: usize,
    pub max_deg: Option<i64>,
    pub t_order: Option<String>,
    pub terms: Vec<TermDoc>,
}

pub fn xpoly_to_doc(p: &XPoly) -> Vec<CoeffDoc> {
    p.terms()
        .map(|(a, c)| CoeffDoc { alpha: a.clone(), re: fmt_q(&c.re), im: fmt_q(&c.im) })
        .collect()
}

pub fn xpoly_from_doc(n: usize, prec: XOrder, doc: &[CoeffDoc]) -> Result<XPoly> {
    let mut p = XPoly::zero(n, prec);
    for cd in doc {
        if cd.alpha.len() != n {
            return Err(Error::Serialization(format!("alpha {:?} has wrong length for n = {n}", cd.alpha)));
        }
        let c = Scalar::from_parts_str(&cd.re, &cd.im)
            .ok_or_else(|| Error::Serialization(format!("bad scalar ({}, {})", cd.re, cd.im)))?;
        p.add_term(cd.alpha.clone(), c);
    }
    Ok(p)
}

impl LogSeries {
    pub fn to_doc(&self) -> SeriesDoc {
        SeriesDoc {
            n: self.n,
            max_deg: self.xprec.as_deg(),
            t_order: self.tprec.as_q().map(fmt_q),
            terms: self
                .terms
                .iter()
                .map(|((rho, q), c)| TermDoc { rho: fmt_q(rho), logpow: *q, coeff: xpoly_to_doc(c) })
                .collect(),
        }
    }

    pub fn from_doc(doc: &SeriesDoc) -> Result<LogSeries> {
        let xprec = doc.max_deg.map(XOrder::Deg).unwrap_or(XOrder::Exact);
        let tprec = match &doc.t_order {
            None => TOrder::Exact,
            Some(s) => TOrder::Upto(parse_q(s).ok_or_else(|| Error::Serialization(format!("bad t_order {s}")))?),
        };
        let mut s = LogSeries::zero(doc.n, xprec, tprec);
        for t in &doc.terms {
            let rho = parse_q(&t.rho).ok_or_else(|| Error::Serialization(format!("bad rho {}", t.rho)))?;
            let c = xpoly_from_doc(doc.n, xprec, &t.coeff)?;
            s.insert(rho, t.logpow, c);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("series document serializes")
    }

    pub fn from_json(src: &str) -> Result<LogSeries> {
        let doc: SeriesDoc = serde_json::from_str(src).map_err(|e| Error::Serialization(e.to_string()))?;
        LogSeries::from_doc(&doc)
    }

    /// Aligned rows `coeff · t^ρ · log^q t`, sorted by ρ.
    pub fn to_rows(&self) -> Vec<String> {
        let cells: Vec<(String, String)> = self
            .terms
            .iter()
            .map(|((rho, q), c)| {
                let mono = match q {
                    0 => format!("t^{}", fmt_q(rho)),
                    1 => format!("t^{} · log t", fmt_q(rho)),
                    _ => format!("t^{} · log^{} t", fmt_q(rho), q),
                };
                (format!("{c}"), mono)
            })
            .collect();
        let w = cells.iter().map(|(c, _)| c.chars().count()).max().unwrap_or(0);
        cells
            .into_iter()
            .map(|(c, mono)| format!("{c:>w$} · {mono}", w = w))
            .collect()
    }
}

impl fmt::Display for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        let mut first = true;
        for ((rho, q), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if !rho.is_zero() {
                write!(f, "*t^{}", fmt_q(rho))?;
            }
            match q {
                0 => {}
                1 => write!(f, "*log(t)")?,
                _ => write!(f, "*log(t)^{q}")?,
            }
        }
        if let TOrder::Upto(t) = &self.tprec {
            write!(f, " + O(t^>{})", fmt_q(t))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogSeries[{}; n={}, max_deg={}]", self, self.n, self.xprec)
    }
}
