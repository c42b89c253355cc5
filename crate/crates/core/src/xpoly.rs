//! Truncated polynomials in `x = (x_1, ..., x_n)` with [`Scalar`] coefficients.
//!
//! An [`XPoly`] stands for a Taylor expansion at `x = 0`. Its precision
//! [`XOrder`] records up to which total degree the stored coefficients are
//! exact: exact polynomial data carries [`XOrder::Exact`], truncated data
//! carries `XOrder::Deg(d)`. Products truncate at the smaller precision and
//! each `d/dx_i` lowers a finite precision by one.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::scalar::{Q, Scalar};

/// Exponent multi-index of an x-monomial.
pub type Alpha = Vec<u32>;

pub fn alpha_deg(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// Precision of x-data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XOrder {
    /// Coefficients of total degree `<= d` are exact; `d < 0` means nothing is known.
    Deg(i64),
    /// Exact (finite) polynomial.
    Exact,
}

impl XOrder {
    pub fn lowered(self, by: u32) -> XOrder {
        match self {
            XOrder::Exact => XOrder::Exact,
            XOrder::Deg(d) => XOrder::Deg(d - by as i64),
        }
    }

    pub fn admits(self, deg: u32) -> bool {
        match self {
            XOrder::Exact => true,
            XOrder::Deg(d) => (deg as i64) <= d,
        }
    }

    pub fn as_deg(self) -> Option<i64> {
        match self {
            XOrder::Exact => None,
            XOrder::Deg(d) => Some(d),
        }
    }
}

impl fmt::Display for XOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XOrder::Exact => write!(f, "exact"),
            XOrder::Deg(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct XPoly {
    n: usize,
    prec: XOrder,
    coeffs: BTreeMap<Alpha, Scalar>,
}

impl XPoly {
    pub fn zero(n: usize, prec: XOrder) -> Self {
        XPoly { n, prec, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar, prec: XOrder) -> Self {
        let mut p = XPoly::zero(n, prec);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn one(n: usize) -> Self {
        XPoly::constant(n, Scalar::one(), XOrder::Exact)
    }

    /// The coordinate function `x_i` (1-based axis).
    pub fn var(n: usize, axis: usize) -> Self {
        assert!(axis >= 1 && axis <= n, "axis {axis} out of range for n = {n}");
        let mut alpha = vec![0; n];
        alpha[axis - 1] = 1;
        let mut p = XPoly::zero(n, XOrder::Exact);
        p.add_term(alpha, Scalar::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Alpha, Scalar)>>(n: usize, prec: XOrder, terms: I) -> Self {
        let mut p = XPoly::zero(n, prec);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prec(&self) -> XOrder {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Alpha, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &[u32]) -> Scalar {
        self.coeffs.get(alpha).cloned().unwrap_or_default()
    }

    /// Value at `x = 0`.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.n])
    }

    /// Highest total degree present.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|a| alpha_deg(a)).max()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|a| alpha_deg(a) == 0)
    }

    /// Adds `c x^alpha`, dropping it if it lies beyond the precision.
    pub fn add_term(&mut self, alpha: Alpha, c: Scalar) {
        assert_eq!(alpha.len(), self.n, "multi-index length does not match n");
        if c.is_zero() || !self.prec.admits(alpha_deg(&alpha)) {
            return;
        }
        match self.coeffs.get_mut(&alpha) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.coeffs.remove(&alpha);
                }
            }
            None => {
                self.coeffs.insert(alpha, c);
            }
        }
    }

    /// Restricts to a lower precision (never raises it).
    pub fn truncated(&self, prec: XOrder) -> XPoly {
        let prec = prec.min(self.prec);
        XPoly::from_terms(self.n, prec, self.coeffs.iter().map(|(a, c)| (a.clone(), c.clone())))
    }

    /// Reinterprets as exact data. Only meaningful when the caller knows the
    /// stored polynomial is the whole function.
    pub fn into_exact(mut self) -> XPoly {
        self.prec = XOrder::Exact;
        self
    }

    pub fn add(&self, o: &XPoly) -> XPoly {
        debug_assert_eq!(self.n, o.n);
        let prec = self.prec.min(o.prec);
        let mut r = self.truncated(prec);
        for (a, c) in &o.coeffs {
            r.add_term(a.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &XPoly) -> XPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> XPoly {
        XPoly {
            n: self.n,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> XPoly {
        if k.is_zero() {
            return XPoly::zero(self.n, self.prec);
        }
        XPoly {
            n: self.n,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &XPoly) -> XPoly {
        debug_assert_eq!(self.n, o.n);
        let prec = self.prec.min(o.prec);
        let mut r = XPoly::zero(self.n, prec);
        for (a1, c1) in &self.coeffs {
            let d1 = alpha_deg(a1);
            for (a2, c2) in &o.coeffs {
                if !prec.admits(d1 + alpha_deg(a2)) {
                    continue;
                }
                let a: Alpha = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                r.add_term(a, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> XPoly {
        let mut acc = XPoly::constant(self.n, Scalar::one(), self.prec);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `d/dx_axis` with a 1-based axis; lowers a finite precision by one.
    pub fn d_x(&self, axis: usize) -> XPoly {
        assert!(axis >= 1 && axis <= self.n, "axis {axis} out of range for n = {}", self.n);
        let i = axis - 1;
        let mut r = XPoly::zero(self.n, self.prec.lowered(1));
        for (a, c) in &self.coeffs {
            if a[i] == 0 {
                continue;
            }
            let mut b = a.clone();
            b[i] -= 1;
            r.add_term(b, c.scale(&Q::from_integer(a[i].into())));
        }
        r
    }

    /// `∂_x^alpha`.
    pub fn d_alpha(&self, alpha: &[u32]) -> XPoly {
        let mut r = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                r = r.d_x(i + 1);
            }
        }
        r
    }

    /// Multiplicative inverse as a Taylor series. The result is truncated at
    /// the own precision, or at `cap` when the input is exact and non-constant.
    pub fn inverse(&self, cap: i64) -> Option<XPoly> {
        let c0 = self.constant_term();
        let c0_inv = c0.inv()?;
        if self.is_constant() {
            return Some(XPoly::constant(self.n, c0_inv, self.prec));
        }
        let prec = match self.prec {
            XOrder::Exact => XOrder::Deg(cap),
            XOrder::Deg(d) => XOrder::Deg(d),
        };
        // 1/p = c0^{-1} Σ (-h)^k with h = p/c0 - 1 (no constant term).
        let mut h = self.truncated(prec).scale(&c0_inv);
        h.add_term(vec![0; self.n], -Scalar::one());
        let mut sum = XPoly::constant(self.n, Scalar::one(), prec);
        let mut power = XPoly::constant(self.n, Scalar::one(), prec);
        let minus_h = h.neg();
        let max_k = prec.as_deg().unwrap_or(0).max(0);
        for _ in 0..max_k {
            power = power.mul(&minus_h);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
        }
        Some(sum.scale(&c0_inv))
    }

    /// Evaluates at a point.
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, c) in &self.coeffs {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(a) {
                m = &m * &xi.pow(k);
            }
            acc += &m;
        }
        acc
    }

    /// Coefficient-norm surrogate `N_r(p) = Σ |c_α| r^{|α|}`, an upper bound
    /// for the sup of `|p|` on the polydisc of radius `r`.
    pub fn norm(&self, r: &Q) -> Q {
        let mut acc = Q::zero();
        for (a, c) in &self.coeffs {
            let mut w = c.abs_upper();
            for _ in 0..alpha_deg(a) {
                w *= r;
            }
            acc += w;
        }
        acc
    }

    /// True when this polynomial equals `other` on all degrees both know.
    pub fn agrees_with(&self, other: &XPoly) -> bool {
        self.sub(other).is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.constant_term().is_one()
    }
}

fn fmt_monomial(alpha: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in alpha.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, k)),
        }
    }
    parts.join("*")
}

impl XPoly {
    /// Renders in the equation DSL.
    pub fn to_dsl(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(a, c)| {
                let mono = fmt_monomial(a);
                match (mono.is_empty(), c.is_one()) {
                    (true, _) => c.to_dsl(),
                    (false, true) => mono,
                    (false, false) => format!("{}*{}", c.to_dsl(), mono),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = fmt_monomial(a);
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XPoly[{}; prec {}]", self, self.prec)
    }
}

impl From<Scalar> for XPoly {
    /// Exact constant in one variable; callers needing another `n` use [`XPoly::constant`].
    fn from(c: Scalar) -> Self {
        XPoly::constant(1, c, XOrder::Exact)
    }
}

/// Joins rendered terms with `+`, turning a leading minus into ` - `.
pub(crate) fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        match (i, p.strip_prefix('-')) {
            (0, _) => out.push_str(p),
            (_, Some(rest)) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            (_, None) => {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn x(n: usize, i: usize) -> XPoly {
        XPoly::var(n, i)
    }

    #[test]
    fn truncating_product() {
        let p = x(1, 1).add(&XPoly::one(1)).truncated(XOrder::Deg(2));
        let sq = p.mul(&p).mul(&p);
        // (1+x)^3 truncated at degree 2
        assert_eq!(sq.coeff(&[0]), Scalar::from_int(1));
        assert_eq!(sq.coeff(&[1]), Scalar::from_int(3));
        assert_eq!(sq.coeff(&[2]), Scalar::from_int(3));
        assert_eq!(sq.coeff(&[3]), Scalar::zero());
        assert_eq!(sq.prec(), XOrder::Deg(2));
    }

    #[test]
    fn derivative_lowers_precision() {
        let p = x(2, 1).mul(&x(2, 1)).truncated(XOrder::Deg(4));
        let d = p.d_x(1);
        assert_eq!(d.coeff(&[1, 0]), Scalar::from_int(2));
        assert_eq!(d.prec(), XOrder::Deg(3));
        assert!(p.d_x(2).is_zero());
        assert_eq!(XPoly::one(2).d_x(1).prec(), XOrder::Exact);
    }

    #[test]
    fn series_inverse() {
        let p = XPoly::one(1).add(&x(1, 1)); // 1 + x
        let inv = p.inverse(5).unwrap();
        for k in 0..=5u32 {
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff(&[k]), Scalar::from_int(expect));
        }
        let prod = inv.mul(&p);
        assert!(prod.agrees_with(&XPoly::one(1)));
        assert!(XPoly::zero(1, XOrder::Exact).inverse(3).is_none());
    }

    #[test]
    fn norm_is_submultiplicative_on_sample() {
        let r = crate::scalar::q_frac(1, 2);
        let p = XPoly::from_terms(1, XOrder::Exact, [(vec![0], Scalar::new(q(1), q(-2))), (vec![2], Scalar::from_int(3))]);
        let s = XPoly::from_terms(1, XOrder::Exact, [(vec![1], Scalar::new(q(0), q(5))), (vec![0], Scalar::from_int(-1))]);
        assert!(p.mul(&s).norm(&r) <= p.norm(&r) * s.norm(&r));
    }
}
