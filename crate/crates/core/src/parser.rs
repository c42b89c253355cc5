//! Equation DSL and the validated [`PDESpec`].
//!
//! ```text
//! let g = 2*x1 + 1/3
//! D[t,3](u) = t*D[t,2](u)^3 + g*D[t,1]D[x1,1](u)
//! ```
//!
//! The right-hand side is expanded into `Σ_μ f_μ(t,x) U^μ` with finite
//! polynomial coefficients; like terms are merged and vanishing ones dropped.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::index::{DerivIndex, MuIndex};
use crate::scalar::{Q, Scalar};
use crate::series::{LogSeries, TOrder};
use crate::xpoly::{XOrder, XPoly};

pub const DEFAULT_MAX_DEG: u32 = 8;

/// One entry `f_μ(t,x) U^μ` of the expanded right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecTerm {
    pub mu: MuIndex,
    /// Log-free, exact coefficient series.
    pub f: LogSeries,
    /// Valuation of `f`.
    pub k: i64,
}

impl SpecTerm {
    /// `f_{μ,0}(x)`, the coefficient of `t^{k_μ}`.
    pub fn f0(&self) -> XPoly {
        self.f.coeff_at(&Q::from_integer(self.k.into()), 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDESpec {
    pub m: u32,
    pub n: usize,
    /// x-degree to which solutions are certified.
    pub max_deg: u32,
    /// Sorted by `μ`, one entry per distinct `μ`.
    pub terms: Vec<SpecTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightRow {
    pub mu: MuIndex,
    pub abs: u32,
    pub gamma: u32,
    pub k: i64,
}

impl PDESpec {
    /// Builds a spec from raw `(μ, f_μ)` pairs, merging like terms.
    pub fn from_terms<I: IntoIterator<Item = (MuIndex, LogSeries)>>(m: u32, n: usize, max_deg: u32, terms: I) -> Result<PDESpec> {
        let mut merged: BTreeMap<MuIndex, LogSeries> = BTreeMap::new();
        for (mu, f) in terms {
            if !mu.all_in_im(m) {
                return Err(Error::Domain(format!("{} has an entry outside I_{m}", mu.to_dsl())));
            }
            if !f.is_log_free() {
                return Err(Error::Domain(format!("coefficient of {} contains log t", mu.to_dsl())));
            }
            let mu = mu.with_n(n);
            let entry = merged.remove(&mu);
            let sum = match entry {
                Some(old) => old.add_aligned(&f),
                None => f,
            };
            merged.insert(mu, sum);
        }
        let mut out = Vec::new();
        for (mu, f) in merged {
            if let Some(v) = f.valuation() {
                let k = v
                    .to_integer()
                    .to_i64()
                    .filter(|_| v.is_integer())
                    .ok_or_else(|| Error::Domain(format!("non-integral t-power in coefficient of {}", mu.to_dsl())))?;
                out.push(SpecTerm { mu, f, k });
            }
        }
        Ok(PDESpec { m, n, max_deg, terms: out })
    }

    pub fn with_max_deg(mut self, d: u32) -> PDESpec {
        self.max_deg = d;
        self
    }

    /// `(μ, |μ|, γ(μ), k_μ)` for every term.
    pub fn spec_weights(&self) -> Vec<WeightRow> {
        self.terms
            .iter()
            .map(|t| WeightRow { mu: t.mu.clone(), abs: t.mu.abs(), gamma: t.mu.gamma(), k: t.k })
            .collect()
    }

    pub fn term(&self, mu: &MuIndex) -> Option<&SpecTerm> {
        self.terms.iter().find(|t| &t.mu == mu)
    }

    /// `(μ, f_μ)` pairs for `compose_polynomial`.
    pub fn rhs_terms(&self) -> Vec<(MuIndex, LogSeries)> {
        self.terms.iter().map(|t| (t.mu.clone(), t.f.clone())).collect()
    }

    /// Every derivative index used by some term.
    pub fn used_indices(&self) -> Vec<DerivIndex> {
        let mut v: Vec<DerivIndex> = self.terms.iter().flat_map(|t| t.mu.entries().map(|(d, _)| d.clone())).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Largest `|α|` among used derivative indices.
    pub fn alpha_max(&self) -> u32 {
        self.used_indices().iter().map(|d| d.alpha_deg()).max().unwrap_or(0)
    }

    /// Canonical DSL text; parsing it gives back an equal spec.
    pub fn to_dsl(&self) -> String {
        let mut rhs = String::new();
        for t in &self.terms {
            let (coeff, single) = render_coeff(&t.f);
            let u = t.mu.to_dsl();
            let piece = if t.mu.is_empty() {
                if single { coeff } else { format!("({coeff})") }
            } else if coeff == "1" {
                u
            } else if coeff == "-1" {
                format!("-{u}")
            } else if single {
                format!("{coeff}*{u}")
            } else {
                format!("({coeff})*{u}")
            };
            if rhs.is_empty() {
                rhs = piece;
            } else if let Some(rest) = piece.strip_prefix('-') {
                rhs.push_str(" - ");
                rhs.push_str(rest);
            } else {
                rhs.push_str(" + ");
                rhs.push_str(&piece);
            }
        }
        if rhs.is_empty() {
            rhs.push('0');
        }
        let mut s = format!("D[t,{}](u) = {}", self.m, rhs);
        if self.n > 1 && !self.mentions_axis(self.n) {
            // keep n explicit when the highest axis is otherwise unused
            s.push_str(&format!(" + 0*x{}", self.n));
        }
        s
    }

    fn mentions_axis(&self, axis: usize) -> bool {
        self.terms.iter().any(|t| {
            t.mu.entries().any(|(d, _)| d.alpha.get(axis - 1).copied().unwrap_or(0) > 0)
                || t.f.iter().any(|(_, c)| c.terms().any(|(a, _)| a[axis - 1] > 0))
        })
    }
}

/// Coefficient text and whether it is a single monomial.
fn render_coeff(f: &LogSeries) -> (String, bool) {
    let mut parts = Vec::new();
    for ((rho, _), c) in f.iter() {
        let tk = rho.to_integer().to_i64().unwrap_or(0);
        for (alpha, s) in c.terms() {
            let mut mono = Vec::new();
            match tk {
                0 => {}
                1 => mono.push("t".to_string()),
                _ => mono.push(format!("t^{tk}")),
            }
            for (i, &a) in alpha.iter().enumerate() {
                match a {
                    0 => {}
                    1 => mono.push(format!("x{}", i + 1)),
                    _ => mono.push(format!("x{}^{}", i + 1, a)),
                }
            }
            let piece = if mono.is_empty() {
                s.to_dsl()
            } else if s.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", s.to_dsl(), mono.join("*"))
            };
            parts.push(piece);
        }
    }
    match parts.len() {
        0 => ("0".to_string(), true),
        1 => (parts.pop().expect("one part"), true),
        _ => (parts.join(" + "), false),
    }
}

impl fmt::Display for PDESpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dsl())
    }
}

/// Parser settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Forces the x-dimension; otherwise the highest axis used (at least 1).
    pub n: Option<usize>,
    pub max_deg: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { n: None, max_deg: DEFAULT_MAX_DEG }
    }
}

pub fn parse_equation(src: &str) -> Result<PDESpec> {
    parse_equation_with(src, &ParseOptions::default())
}

pub fn parse_equation_with(src: &str, opts: &ParseOptions) -> Result<PDESpec> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, m: None, params: BTreeMap::new(), max_axis: 0 };
    let (m, rhs) = p.program()?;
    let n = match opts.n {
        Some(n) if n < p.max_axis => {
            return Err(Error::Parse {
                line: 1,
                col: 1,
                msg: format!("x{} used but n = {n}", p.max_axis),
            })
        }
        Some(n) => n.max(1),
        None => p.max_axis.max(1),
    };
    let mut by_mu: BTreeMap<MuIndex, LogSeries> = BTreeMap::new();
    for ((mu, tpow, alpha), c) in rhs.0 {
        let mut a = alpha.clone();
        a.resize(n, 0);
        let term = LogSeries::monomial(Q::from_integer(tpow.into()), 0, XPoly::from_terms(n, XOrder::Exact, [(a, c)]));
        let mu = mu.with_n(n);
        let e = by_mu.entry(mu).or_insert_with(|| LogSeries::zero(n, XOrder::Exact, TOrder::Exact));
        *e = e.add_aligned(&term);
    }
    PDESpec::from_terms(m, n, opts.max_deg, by_mu)
}

/// Parses a u-free polynomial in `x` (for `b(x)` and similar data).
pub fn parse_xpoly(src: &str, n: usize) -> Result<XPoly> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, m: None, params: BTreeMap::new(), max_axis: 0 };
    let e = p.expr()?;
    p.expect_end()?;
    if p.max_axis > n {
        return Err(Error::Parse { line: 1, col: 1, msg: format!("x{} used but n = {n}", p.max_axis) });
    }
    let mut out = XPoly::zero(n, XOrder::Exact);
    for ((mu, tpow, alpha), c) in e.0 {
        if !mu.is_empty() || tpow != 0 {
            return Err(Error::Parse { line: 1, col: 1, msg: "expected a polynomial in x only".into() });
        }
        let mut a = alpha;
        a.resize(n, 0);
        out.add_term(a, c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Semi,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let simple = match c {
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(Token { tok: t, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            if i < chars.len() && chars[i] == '.' {
                return Err(Error::Parse { line, col, msg: "decimal literals are not supported; write a rational p/q".into() });
            }
            out.push(Token { tok: Tok::Num(s.parse().expect("digits")), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        return Err(Error::Parse { line, col, msg: format!("unexpected character '{c}'") });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

type Mono = (MuIndex, u32, Vec<u32>);

/// Polynomial in `(U, t, x)` used during parsing; x-exponent vectors carry no trailing zeros.
#[derive(Clone, Debug, Default)]
struct RPoly(BTreeMap<Mono, Scalar>);

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

impl RPoly {
    fn constant(c: Scalar) -> RPoly {
        let mut p = RPoly::default();
        p.push((MuIndex::new(), 0, vec![]), c);
        p
    }

    fn mono(m: Mono) -> RPoly {
        let mut p = RPoly::default();
        p.push(m, Scalar::one());
        p
    }

    fn push(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m.clone()).or_default();
        *e += &c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    fn add(mut self, o: RPoly) -> RPoly {
        for (m, c) in o.0 {
            self.push(m, c);
        }
        self
    }

    fn neg(self) -> RPoly {
        RPoly(self.0.into_iter().map(|(m, c)| (m, -c)).collect())
    }

    fn mul(&self, o: &RPoly) -> RPoly {
        let mut r = RPoly::default();
        for ((mu1, t1, a1), c1) in &self.0 {
            for ((mu2, t2, a2), c2) in &o.0 {
                let len = a1.len().max(a2.len());
                let a: Vec<u32> = (0..len).map(|i| a1.get(i).unwrap_or(&0) + a2.get(i).unwrap_or(&0)).collect();
                r.push((mu1.combined(mu2), t1 + t2, trim(a)), c1 * c2);
            }
        }
        r
    }

    fn is_u_free(&self) -> bool {
        self.0.keys().all(|(mu, _, _)| mu.is_empty())
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    m: Option<u32>,
    params: BTreeMap<String, RPoly>,
    max_axis: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: tok.line, col: tok.col, msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            self.err(&t, format!("expected {what}, found {}", describe(&t.tok)))
        }
    }

    fn expect_ident(&mut self, want: &str) -> Result<Token> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == want => Ok(t),
            other => self.err(&t, format!("expected '{want}', found {}", describe(other))),
        }
    }

    fn nat(&mut self) -> Result<u32> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => n.to_u32().map_or_else(|| self.err(&t, "integer too large"), Ok),
            Tok::Minus => self.err(&t, "negative values are not allowed here"),
            other => self.err(&t, format!("expected a natural number, found {}", describe(other))),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        let t = self.next();
        match t.tok {
            Tok::End => Ok(()),
            Tok::Slash => self.err(&t, "division is only allowed inside a rational literal p/q"),
            ref other => self.err(&t, format!("unexpected {}", describe(other))),
        }
    }

    fn program(&mut self) -> Result<(u32, RPoly)> {
        loop {
            while self.peek().tok == Tok::Semi {
                self.next();
            }
            match &self.peek().tok {
                Tok::Ident(s) if s == "let" => self.let_stmt()?,
                _ => break,
            }
        }
        let lhs_tok = self.peek().clone();
        let (j, alpha) = self.deriv_prefix()?;
        self.expect(Tok::LParen, "'('")?;
        self.expect_ident("u")?;
        self.expect(Tok::RParen, "')'")?;
        if j == 0 || alpha.iter().any(|&a| a > 0) {
            return self.err(&lhs_tok, "left-hand side must be D[t,m](u) with m >= 1");
        }
        self.m = Some(j);
        self.expect(Tok::Eq, "'='")?;
        let rhs = self.expr()?;
        while self.peek().tok == Tok::Semi {
            self.next();
        }
        self.expect_end()?;
        Ok((j, rhs))
    }

    fn let_stmt(&mut self) -> Result<()> {
        self.next();
        let t = self.next();
        let name = match &t.tok {
            Tok::Ident(s) if !is_reserved(s) => s.clone(),
            Tok::Ident(s) => return self.err(&t, format!("'{s}' is reserved")),
            other => return self.err(&t, format!("expected a parameter name, found {}", describe(other))),
        };
        self.expect(Tok::Eq, "'='")?;
        let start = self.peek().clone();
        let e = self.expr()?;
        if !e.is_u_free() {
            return self.err(&start, format!("parameter '{name}' must not depend on u"));
        }
        self.params.insert(name, e);
        Ok(())
    }

    fn expr(&mut self) -> Result<RPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Tok::Slash => {
                    let t = self.peek().clone();
                    return self.err(&t, "division is only allowed inside a rational literal p/q");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RPoly> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(self.factor()?.neg());
        }
        let base = if self.peek().tok == Tok::LParen {
            self.next();
            let e = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            e
        } else {
            self.atom()?
        };
        if self.peek().tok == Tok::Caret {
            self.next();
            if self.peek().tok == Tok::Minus {
                let t = self.peek().clone();
                return self.err(&t, "negative powers are not allowed");
            }
            let e = self.nat()?;
            let mut acc = RPoly::constant(Scalar::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RPoly> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(_) => {
                self.next();
                let num = match t.tok {
                    Tok::Num(ref n) => n.clone(),
                    _ => unreachable!(),
                };
                if self.peek().tok == Tok::Slash {
                    self.next();
                    let dt = self.next();
                    let den = match dt.tok {
                        Tok::Num(ref d) => d.clone(),
                        _ => return self.err(&dt, "division is only allowed inside a rational literal p/q"),
                    };
                    if den.is_zero() {
                        return self.err(&dt, "zero denominator");
                    }
                    return Ok(RPoly::constant(Scalar::real(Q::new(num, den))));
                }
                Ok(RPoly::constant(Scalar::real(Q::from_integer(num))))
            }
            Tok::Ident(name) => {
                let name = name.clone();
                if name == "D" {
                    return self.deriv_atom();
                }
                self.next();
                if self.peek().tok == Tok::LParen {
                    return self.err(&t, format!("function '{name}(...)' is not a polynomial construct"));
                }
                match name.as_str() {
                    "i" => Ok(RPoly::constant(Scalar::i())),
                    "t" => Ok(RPoly::mono((MuIndex::new(), 1, vec![]))),
                    "u" => self.u_atom(&t, DerivIndex::new(0, vec![])),
                    _ => {
                        if let Some(axis) = x_axis(&name) {
                            self.max_axis = self.max_axis.max(axis);
                            let mut a = vec![0; axis];
                            a[axis - 1] = 1;
                            return Ok(RPoly::mono((MuIndex::new(), 0, a)));
                        }
                        match self.params.get(&name) {
                            Some(p) => Ok(p.clone()),
                            None => self.err(&t, format!("unknown identifier '{name}'")),
                        }
                    }
                }
            }
            other => self.err(&t, format!("unexpected {}", describe(other))),
        }
    }

    /// `D[t,j]` followed by `D[xi,a]` groups, or `D[xi,a]` groups alone.
    fn deriv_prefix(&mut self) -> Result<(u32, Vec<u32>)> {
        let mut j = 0u32;
        let mut alpha: Vec<u32> = Vec::new();
        let mut seen_any = false;
        while let Tok::Ident(s) = &self.peek().tok {
            if s != "D" {
                break;
            }
            let dtok = self.next();
            self.expect(Tok::LBrack, "'['")?;
            let vt = self.next();
            let var = match &vt.tok {
                Tok::Ident(v) => v.clone(),
                other => return self.err(&vt, format!("expected t or x<k>, found {}", describe(other))),
            };
            self.expect(Tok::Comma, "','")?;
            let k = self.nat()?;
            self.expect(Tok::RBrack, "']'")?;
            if var == "t" {
                if seen_any {
                    return self.err(&dtok, "D[t,j] must come first");
                }
                j = k;
            } else if let Some(axis) = x_axis(&var) {
                self.max_axis = self.max_axis.max(axis);
                if alpha.len() < axis {
                    alpha.resize(axis, 0);
                }
                alpha[axis - 1] += k;
            } else {
                return self.err(&vt, format!("unknown derivative variable '{var}'"));
            }
            seen_any = true;
        }
        if !seen_any {
            let t = self.peek().clone();
            return self.err(&t, "expected D[t,m](u)");
        }
        Ok((j, trim(alpha)))
    }

    fn deriv_atom(&mut self) -> Result<RPoly> {
        let start = self.peek().clone();
        let (j, alpha) = self.deriv_prefix()?;
        self.expect(Tok::LParen, "'('")?;
        self.expect_ident("u")?;
        self.expect(Tok::RParen, "')'")?;
        self.u_atom(&start, DerivIndex::new(j, alpha))
    }

    fn u_atom(&mut self, at: &Token, d: DerivIndex) -> Result<RPoly> {
        let m = match self.m {
            Some(m) => m,
            None => return self.err(at, "u may not appear before the equation"),
        };
        if !d.in_im(m) {
            return self.err(
                at,
                format!("derivative {} is outside I_{m}: need j < {m} and j + |alpha| <= {m}", d.to_dsl()),
            );
        }
        Ok(RPoly::mono((MuIndex::single(d, 1), 0, vec![])))
    }
}

fn x_axis(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    let k: usize = rest.parse().ok()?;
    (k >= 1 && !rest.starts_with('0')).then_some(k)
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "t" | "u" | "i" | "D" | "let") || x_axis(s).is_some()
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::LBrack => "'['".into(),
        Tok::RBrack => "']'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::Eq => "'='".into(),
        Tok::Semi => "';'".into(),
        Tok::End => "end of input".into(),
    }
}
