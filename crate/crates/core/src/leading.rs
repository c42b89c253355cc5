//! Combinatorial constants and the leading-coefficient equation for `a(x)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::analysis::AnalysisReport;
use crate::error::{Error, Result};
use crate::parser::PDESpec;
use crate::scalar::{factorial, q_from_f64, q_round_to, Q, Scalar};
use crate::xpoly::{XOrder, XPoly};

/// `β_{j,l} = (−1)^{j−l−1} l! (j−l−1)!`, defined for `j >= l + 1`.
pub fn beta(j: u32, l: u32) -> Result<Scalar> {
    if j <= l {
        return Err(Error::Domain(format!("beta({j},{l}) needs j >= l + 1")));
    }
    let mag = factorial(l) * factorial(j - l - 1);
    let v = Q::from_integer(if (j - l - 1) % 2 == 0 { mag } else { -mag });
    Ok(Scalar::real(v))
}

/// `[ρ; j] = ρ(ρ−1)…(ρ−j+1)`.
pub fn falling(rho: &Scalar, j: u32) -> Scalar {
    let mut acc = Scalar::one();
    for i in 0..j {
        acc = &acc * &(rho - &Scalar::from_int(i as i64));
    }
    acc
}

pub fn falling_int(rho: i64, j: u32) -> Scalar {
    falling(&Scalar::from_int(rho), j)
}

/// `b_{0,l} = 0`, `b_{j+1,l} = [l; j] + (l − j) b_{j,l}`.
pub fn b_lower(j: u32, l: u32) -> Scalar {
    let mut b = Scalar::zero();
    for i in 0..j {
        b = &falling_int(l as i64, i) + &b.scale(&Q::from_integer((l as i64 - i as i64).into()));
    }
    b
}

/// `Σ_d coeffs[d](x) A^d = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingEquation {
    pub l: u32,
    pub m: u32,
    pub n: usize,
    pub coeffs: BTreeMap<u32, XPoly>,
}

impl LeadingEquation {
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().copied().max().unwrap_or(0)
    }

    pub fn coeff(&self, d: u32) -> XPoly {
        self.coeffs.get(&d).cloned().unwrap_or_else(|| XPoly::zero(self.n, XOrder::Exact))
    }

    /// Value at `A = a(x)`.
    pub fn eval(&self, a: &XPoly) -> XPoly {
        let mut acc = XPoly::zero(self.n, a.prec());
        let mut pw = XPoly::constant(self.n, Scalar::one(), a.prec());
        for d in 0..=self.degree() {
            if d > 0 {
                pw = pw.mul(a);
            }
            if let Some(c) = self.coeffs.get(&d) {
                acc = acc.add(&c.mul(&pw));
            }
        }
        acc
    }

    /// `∂/∂A` of the equation, evaluated at `A = a(x)`.
    pub fn eval_derivative(&self, a: &XPoly) -> XPoly {
        let mut acc = XPoly::zero(self.n, a.prec());
        let mut pw = XPoly::constant(self.n, Scalar::one(), a.prec());
        for d in 1..=self.degree() {
            if d > 1 {
                pw = pw.mul(a);
            }
            if let Some(c) = self.coeffs.get(&d) {
                acc = acc.add(&c.mul(&pw).scale(&Scalar::from_int(d as i64)));
            }
        }
        acc
    }

    /// Scalar polynomial at `x = 0`, low degree first, trailing zeros removed.
    pub fn at_origin(&self) -> Vec<Scalar> {
        let mut v: Vec<Scalar> = (0..=self.degree()).map(|d| self.coeff(d).constant_term()).collect();
        while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
}

impl fmt::Display for LeadingEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (d, c) in self.coeffs.iter().rev() {
            let cs = if c.len() == 1 && c.is_constant() { format!("{}", c.constant_term()) } else { format!("({c})") };
            let a = match d {
                0 => String::new(),
                1 => "A".to_string(),
                _ => format!("A^{d}"),
            };
            parts.push(match (d, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => a,
                (_, "-1") => format!("-{a}"),
                _ => format!("{cs}*{a}"),
            });
        }
        write!(f, "{} = 0", crate::xpoly::join_signed(&parts))
    }
}

/// Assembles `Σ_{M0} f_{μ,0} (Π β_{j,l}^{μ_{j,0}}) A^{|μ|−1} − β_{m,l}`.
pub fn build_leading_equation(spec: &PDESpec, report: &AnalysisReport) -> Result<LeadingEquation> {
    let l = report.l.ok_or_else(|| Error::Assumption("no integral characteristic exponent".into()))?;
    if report.m0.is_empty() {
        return Err(Error::Assumption("M0 is empty".into()));
    }
    let n = spec.n;
    let mut coeffs: BTreeMap<u32, XPoly> = BTreeMap::new();
    for mu in &report.m0 {
        let term = spec.term(mu).ok_or_else(|| Error::Domain(format!("{} not in spec", mu.to_dsl())))?;
        let mut w = Scalar::one();
        for (d, &p) in mu.entries() {
            w = &w * &beta(d.j, l)?.pow(p);
        }
        let d = mu.abs() - 1;
        let c = term.f0().scale(&w);
        let e = coeffs.entry(d).or_insert_with(|| XPoly::zero(n, XOrder::Exact));
        *e = e.add(&c);
    }
    let c0 = coeffs.entry(0).or_insert_with(|| XPoly::zero(n, XOrder::Exact));
    *c0 = c0.sub(&XPoly::constant(n, beta(spec.m, l)?, XOrder::Exact));
    coeffs.retain(|_, c| !c.is_zero());
    Ok(LeadingEquation { l, m: spec.m, n, coeffs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInfo {
    pub value: Scalar,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingSolution {
    pub a: XPoly,
    /// False when the order-0 root is only a rational approximation.
    pub exact: bool,
    pub roots: Vec<RootInfo>,
    pub root_index: usize,
}

/// Denominator exponent of the rational grid used for approximate roots.
const APPROX_BITS: u32 = 110;

fn peval(p: &[Scalar], z: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in p.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

fn pderiv(p: &[Scalar]) -> Vec<Scalar> {
    p.iter().enumerate().skip(1).map(|(d, c)| c.scale(&Q::from_integer((d as i64).into()))).collect()
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Durand–Kerner iteration on the monic normalization of `p`.
fn numeric_roots(p: &[Scalar]) -> Vec<C64> {
    let deg = p.len() - 1;
    let lead = p[deg].to_f64_pair();
    let mon: Vec<C64> = p.iter().map(|c| cdiv(c.to_f64_pair(), lead)).collect();
    let eval = |z: C64| {
        let mut acc = (0.0, 0.0);
        for c in mon.iter().rev() {
            let m = cmul(acc, z);
            acc = (m.0 + c.0, m.1 + c.1);
        }
        acc
    };
    let radius = 1.0 + mon.iter().take(deg).map(|c| (c.0 * c.0 + c.1 * c.1).sqrt()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let ang = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64;
            (radius * ang.cos(), radius * ang.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut den = (1.0, 0.0);
            for k in 0..deg {
                if k != i {
                    den = cmul(den, (z[i].0 - z[k].0, z[i].1 - z[k].1));
                }
            }
            let step = cdiv(eval(z[i]), den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.abs() + step.1.abs());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Best rational approximations of `x` with denominator up to `max_den`.
fn convergents(x: &Q, max_den: i64) -> Vec<Q> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(Q::new(h2.clone(), k2.clone()));
        let frac = &rest - Q::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
    }
    out
}

fn round_scalar(z: &Scalar, den: &BigInt) -> Scalar {
    Scalar::new(q_round_to(&z.re, den), q_round_to(&z.im, den))
}

/// Refines a numeric seed by Newton steps in `Q(i)`, then tries an exact reconstruction.
fn refine_root(p: &[Scalar], seed: C64) -> RootInfo {
    let dp = pderiv(p);
    let den = BigInt::one() << APPROX_BITS as usize;
    let mut z = Scalar::new(q_from_f64(seed.0, 60), q_from_f64(seed.1, 60));
    for _ in 0..12 {
        let d = peval(&dp, &z);
        let Some(inv) = d.inv() else { break };
        z = round_scalar(&(&z - &(&peval(p, &z) * &inv)), &den);
    }
    let re_c = convergents(&z.re, 1_000_000);
    let im_c = convergents(&z.im, 1_000_000);
    for re in re_c.iter().rev().take(4) {
        for im in im_c.iter().rev().take(4) {
            let cand = Scalar::new(re.clone(), im.clone());
            if peval(p, &cand).is_zero() {
                return RootInfo { value: cand, exact: true };
            }
        }
    }
    RootInfo { value: z, exact: false }
}

/// Root order: ascending real part, then descending imaginary part, so the
/// member of a conjugate pair with positive imaginary part comes first.
pub fn root_order(a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
    a.re.cmp(&b.re).then_with(|| b.im.cmp(&a.im))
}

/// Order-0 roots sorted by [`root_order`].
pub fn origin_roots(eq: &LeadingEquation) -> Result<Vec<RootInfo>> {
    let p = eq.at_origin();
    let deg = p.len() - 1;
    if deg == 0 {
        return Err(Error::NoRoot(format!("leading equation {eq} has no A-dependence at x = 0")));
    }
    let mut roots: Vec<RootInfo> = match deg {
        1 => vec![RootInfo { value: (-&p[0]) / p[1].clone(), exact: true }],
        2 => {
            let disc = &(&p[1] * &p[1]) - &(&Scalar::from_int(4) * &(&p[0] * &p[2]));
            match disc.sqrt() {
                Some(s) => {
                    let two_a = &Scalar::from_int(2) * &p[2];
                    vec![
                        RootInfo { value: &(&(-&p[1]) + &s) / &two_a, exact: true },
                        RootInfo { value: &(&(-&p[1]) - &s) / &two_a, exact: true },
                    ]
                }
                None => numeric_roots(&p).into_iter().map(|z| refine_root(&p, z)).collect(),
            }
        }
        _ => numeric_roots(&p).into_iter().map(|z| refine_root(&p, z)).collect(),
    };
    roots.sort_by(|a, b| root_order(&a.value, &b.value));
    Ok(roots)
}

fn is_simple(p: &[Scalar], roots: &[RootInfo], idx: usize) -> bool {
    let r = &roots[idx];
    if r.exact {
        return !peval(&pderiv(p), &r.value).is_zero();
    }
    let (x, y) = r.value.to_f64_pair();
    roots.iter().enumerate().all(|(k, o)| {
        if k == idx {
            return true;
        }
        let (ox, oy) = o.value.to_f64_pair();
        ((x - ox).powi(2) + (y - oy).powi(2)).sqrt() > 1e-8
    })
}

/// Chooses the order-0 root `root_index` and extends it to `a(x)` modulo degree `max_deg + 1`.
pub fn solve_leading(eq: &LeadingEquation, root_index: usize, max_deg: u32) -> Result<LeadingSolution> {
    let roots = origin_roots(eq)?;
    if root_index >= roots.len() {
        return Err(Error::NoRoot(format!("root index {root_index} requested but only {} roots exist", roots.len())));
    }
    let p = eq.at_origin();
    if !is_simple(&p, &roots, root_index) {
        return Err(Error::DegenerateRoot(format!("root {} of {eq} is not simple", roots[root_index].value)));
    }
    let root = roots[root_index].clone();
    let n = eq.n;
    let x_free = eq.coeffs.values().all(|c| c.is_constant());
    if x_free && root.exact {
        let a = XPoly::constant(n, root.value.clone(), XOrder::Exact);
        return Ok(LeadingSolution { a, exact: true, roots, root_index });
    }
    let prec = XOrder::Deg(max_deg as i64);
    let mut a = XPoly::constant(n, root.value.clone(), prec);
    let den = BigInt::one() << APPROX_BITS as usize;
    for _ in 0..(2 * max_deg + 4) {
        let r = eq.eval(&a).truncated(prec);
        if r.is_zero() {
            break;
        }
        let d = eq.eval_derivative(&a).truncated(prec);
        let inv = d.inverse(max_deg as i64).ok_or_else(|| Error::DegenerateRoot("derivative vanishes".into()))?;
        a = a.sub(&r.mul(&inv));
        if !root.exact {
            a = XPoly::from_terms(n, prec, a.terms().map(|(al, c)| (al.clone(), round_scalar(c, &den))));
        }
    }
    if root.exact && !eq.eval(&a).truncated(prec).is_zero() {
        return Err(Error::NoRoot("series extension of the leading root did not converge".into()));
    }
    Ok(LeadingSolution { a, exact: root.exact, roots, root_index })
}

/// Magnitude check used for approximate roots: `|P(a)|` at `x = 0` in f64.
pub fn approx_residual(eq: &LeadingEquation, a: &XPoly) -> f64 {
    let v = eq.eval(a).constant_term();
    let (x, y) = v.to_f64_pair();
    (x * x + y * y).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_assumptions;
    use crate::parser::parse_equation;
    use crate::scalar::{q, q_frac};
    use num_traits::Signed;

    fn leading(src: &str) -> LeadingEquation {
        let s = parse_equation(src).unwrap();
        let r = check_assumptions(&s);
        build_leading_equation(&s, &r).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(beta(2, 0).unwrap(), Scalar::from_int(-1));
        assert_eq!(beta(1, 0).unwrap(), Scalar::from_int(1));
        assert_eq!(beta(3, 1).unwrap(), Scalar::from_int(-1));
        assert_eq!(beta(3, 2).unwrap(), Scalar::from_int(2));
        assert!(beta(2, 2).is_err());
        for l in 0..6 {
            assert_eq!(b_lower(0, l), Scalar::zero());
            assert_eq!(b_lower(1, l), Scalar::one());
        }
        assert_eq!(b_lower(2, 2), Scalar::from_int(3));
        assert_eq!(falling_int(3, 2), Scalar::from_int(6));
        assert_eq!(falling_int(2, 3), Scalar::zero());
        assert_eq!(falling(&Scalar::frac(1, 2), 0), Scalar::one());
        for l in 0..7i64 {
            for j in 0..9u32 {
                assert_eq!(falling_int(l, j).is_zero(), (j as i64) > l);
            }
        }
    }

    #[test]
    fn prototype_equation() {
        let eq = leading("D[t,2](u) = D[t,1](u)^2");
        assert_eq!(eq.at_origin(), vec![Scalar::from_int(1), Scalar::from_int(1)]);
        let sol = solve_leading(&eq, 0, 8).unwrap();
        assert_eq!(sol.a, XPoly::constant(1, Scalar::from_int(-1), XOrder::Exact));
        assert!(sol.exact);
    }

    #[test]
    fn cubic_equation() {
        let eq = leading("D[t,3](u) = t*D[t,2](u)^3");
        assert_eq!(eq.at_origin(), vec![Scalar::one(), Scalar::zero(), Scalar::one()]);
        let sol = solve_leading(&eq, 0, 4).unwrap();
        assert_eq!(sol.a.constant_term(), Scalar::i());
        let sol1 = solve_leading(&eq, 1, 4).unwrap();
        assert_eq!(sol1.a.constant_term(), -Scalar::i());
        assert!(solve_leading(&eq, 2, 4).is_err());
    }

    #[test]
    fn other_families() {
        assert_eq!(solve_leading(&leading("D[t,3](u) = D[t,2](u)*D[t,1](u) + D[t,1](u)*D[x1,1](u)"), 0, 4).unwrap().a.constant_term(), Scalar::from_int(-2));
        assert_eq!(solve_leading(&leading("D[t,4](u) = D[t,3](u)*D[t,1](u) + D[t,2](u)*D[x1,1](u)"), 0, 4).unwrap().a.constant_term(), Scalar::from_int(-3));
        assert_eq!(solve_leading(&leading("D[t,4](u) = D[t,3](u)^2 + u^2"), 0, 4).unwrap().a.constant_term(), Scalar::frac(-1, 2));
    }

    #[test]
    fn x_dependent_root_extends_by_newton() {
        let eq = leading("D[t,2](u) = (1 + x1)*D[t,1](u)^2");
        let sol = solve_leading(&eq, 0, 6).unwrap();
        // (1+x) A + 1 = 0 → A = -1/(1+x)
        for k in 0..=6u32 {
            let expect = if k % 2 == 0 { -1 } else { 1 };
            assert_eq!(sol.a.coeff(&[k]), Scalar::from_int(expect));
        }
        assert!(eq.eval(&sol.a).is_zero());
    }

    #[test]
    fn degenerate_and_missing_roots() {
        let eq = LeadingEquation {
            l: 0,
            m: 2,
            n: 1,
            coeffs: [(0, XPoly::one(1)), (1, XPoly::constant(1, Scalar::from_int(2), XOrder::Exact)), (2, XPoly::one(1))]
                .into_iter()
                .collect(),
        };
        assert!(matches!(solve_leading(&eq, 0, 3), Err(Error::DegenerateRoot(_))));
        let eq = LeadingEquation { l: 0, m: 2, n: 1, coeffs: [(0, XPoly::one(1)), (1, XPoly::var(1, 1))].into_iter().collect() };
        assert!(matches!(solve_leading(&eq, 0, 3), Err(Error::NoRoot(_))));
    }

    #[test]
    fn cubic_with_rational_roots_is_exact() {
        // (A - 1)(A + 2)(A - 1/3) = A^3 + 2/3 A^2 - 7/3 A + 2/3
        let c = |x: Q| XPoly::constant(1, Scalar::real(x), XOrder::Exact);
        let eq = LeadingEquation {
            l: 0,
            m: 2,
            n: 1,
            coeffs: [(0, c(q_frac(2, 3))), (1, c(q_frac(-7, 3))), (2, c(q_frac(2, 3))), (3, c(q(1)))].into_iter().collect(),
        };
        let roots = origin_roots(&eq).unwrap();
        let vals: Vec<Scalar> = roots.iter().map(|r| r.value.clone()).collect();
        assert_eq!(vals, vec![Scalar::from_int(-2), Scalar::frac(1, 3), Scalar::from_int(1)]);
        assert!(roots.iter().all(|r| r.exact));
    }

    #[test]
    fn irrational_roots_are_approximated_to_1e30() {
        // A^2 - 2 = 0
        let c = |x: i64| XPoly::constant(1, Scalar::from_int(x), XOrder::Exact);
        let eq = LeadingEquation { l: 0, m: 2, n: 1, coeffs: [(0, c(-2)), (2, c(1))].into_iter().collect() };
        let sol = solve_leading(&eq, 1, 2).unwrap();
        assert!(!sol.exact);
        let err = &sol.a.constant_term().re * &sol.a.constant_term().re - q(2);
        assert!(err.abs() < q_frac(1, 1_000_000_000_000_000) * q_frac(1, 1_000_000_000_000_000));
        assert!(approx_residual(&eq, &sol.a) < 1e-29);
    }
}
