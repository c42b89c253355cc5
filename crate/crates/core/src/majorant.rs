//! Majorant sequences bounding the order-by-order components of `v`.
//!
//! The reduced equation is rewritten in the variables `Z_{j,α} = θ^j ∂_x^α v`
//! as `C(θ,x) v = a + Σ b_{j,α} Z_{j,α} + Σ g_ν Z^ν`. Grading by the number
//! of forcing insertions gives components `u_k` with `C u_1 = a` and
//! `C u_k = f_k(u_1, …, u_{k−1})`. Norms are the coefficient surrogates
//! `N_r`, summed over all t-monomials (so `|t| <= 1` is implicit).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuchsian::{solve_log_block, LambdaPoly, ReducedEquation, ResonancePolicy, FORMAT_VERSION};
use crate::index::{DerivIndex, MuIndex};
use crate::scalar::{e_upper, fmt_q, Q, Scalar};
use crate::series::{LogSeries, TOrder};
use crate::xpoly::XOrder;

fn qi(k: i64) -> Q {
    Q::from_integer(k.into())
}

/// The reduced equation in the `Z` variables.
#[derive(Clone, Debug)]
pub struct ZForm {
    pub m: u32,
    pub n: usize,
    pub c: LambdaPoly,
    pub forcing: LogSeries,
    pub linear: BTreeMap<DerivIndex, LogSeries>,
    pub nonlinear: BTreeMap<MuIndex, LogSeries>,
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, LogSeries>, key: K, s: LogSeries) {
    let merged = match map.remove(&key) {
        Some(old) => old.add_aligned(&s),
        None => s,
    };
    if !merged.is_zero() {
        map.insert(key, merged);
    }
}

/// `W_{j,α} = Σ_i T_{j,i} Z_{i,α}` with `[λ+l; j] = Σ_i T_{j,i} λ^i`.
fn w_in_z(n: usize, l: u32, d: &DerivIndex) -> Vec<(DerivIndex, Scalar)> {
    LambdaPoly::falling(n, l as i64, d.j)
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (DerivIndex::new(i as u32, d.alpha.clone()), c.constant_term()))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

pub fn z_form(red: &ReducedEquation) -> ZForm {
    let (n, l) = (red.n(), red.l);
    let mut linear = BTreeMap::new();
    for (d, g) in &red.linear {
        for (z, c) in w_in_z(n, l, d) {
            add_into(&mut linear, z, g.scale(&c));
        }
    }
    let mut nonlinear = BTreeMap::new();
    for (nu, g) in &red.nonlinear {
        let mut poly: BTreeMap<MuIndex, Scalar> = BTreeMap::new();
        poly.insert(MuIndex::new(), Scalar::one());
        for (d, &p) in nu.entries() {
            let lin = w_in_z(n, l, d);
            for _ in 0..p {
                let mut next: BTreeMap<MuIndex, Scalar> = BTreeMap::new();
                for (mono, c) in &poly {
                    for (z, t) in &lin {
                        let key = mono.combined(&MuIndex::single(z.clone(), 1));
                        *next.entry(key).or_insert_with(Scalar::zero) += &(c * t);
                    }
                }
                poly = next;
            }
        }
        for (mono, c) in poly {
            if !c.is_zero() {
                add_into(&mut nonlinear, mono, g.scale(&c));
            }
        }
    }
    ZForm { m: red.spec.m, n, c: red.op.poly(), forcing: red.forcing.clone(), linear, nonlinear }
}

impl ZForm {
    pub fn z_value(&self, u: &LogSeries, d: &DerivIndex) -> LogSeries {
        u.d_alpha(&d.alpha).theta_n(d.j)
    }

    /// `C(θ,x)^{-1}` applied exponent by exponent.
    pub fn invert(&self, s: &LogSeries, xcap: i64) -> Result<LogSeries> {
        let mut out = LogSeries::zero(self.n, s.xprec(), s.tprec().clone());
        for rho in s.exponents() {
            let (block, _) = solve_log_block(&self.c, &rho, &s.slice(&rho), ResonancePolicy::Error, xcap)
                .map_err(|e| Error::Certificate(format!("cannot invert C: {e}")))?;
            out = out.add_aligned(&block);
        }
        Ok(out)
    }
}

/// Components `u_1, …, u_K`, each truncated at `t^K` and x-degree `xcap`.
pub fn components(red: &ReducedEquation, k: u32, xcap: i64) -> Result<Vec<LogSeries>> {
    let zf = z_form(&red.truncated_x(XOrder::Deg(xcap)));
    let theta = TOrder::upto(k as i64);
    let vars = DerivIndex::all_in_im(zf.m, zf.n);
    let mut us: Vec<LogSeries> = Vec::new();
    let mut zs: BTreeMap<DerivIndex, Vec<LogSeries>> = BTreeMap::new();
    for kk in 1..=k as usize {
        let rhs = if kk == 1 {
            zf.forcing.truncate_t(theta.clone())
        } else {
            let mut acc = LogSeries::zero(zf.n, XOrder::Deg(xcap), theta.clone());
            for (d, b) in &zf.linear {
                acc = acc.add_aligned(&b.mul_aligned(&zs[d][kk - 2]));
            }
            for (nu, g) in &zf.nonlinear {
                if nu.abs() as usize > kk {
                    continue;
                }
                let mut graded: Vec<Option<LogSeries>> = vec![None; kk + 1];
                graded[0] = Some(LogSeries::one(zf.n));
                for (d, &p) in nu.entries() {
                    for _ in 0..p {
                        let mut next: Vec<Option<LogSeries>> = vec![None; kk + 1];
                        for (d1, a) in graded.iter().enumerate() {
                            let Some(a) = a else { continue };
                            for d2 in 1..kk {
                                if d1 + d2 > kk {
                                    break;
                                }
                                let prod = a.mul_aligned(&zs[d][d2 - 1]).truncate_t(theta.clone());
                                next[d1 + d2] = Some(match next[d1 + d2].take() {
                                    Some(s) => s.add_aligned(&prod),
                                    None => prod,
                                });
                            }
                        }
                        graded = next;
                    }
                }
                if let Some(top) = graded[kk].take() {
                    acc = acc.add_aligned(&g.mul_aligned(&top));
                }
            }
            acc.truncate_t(theta.clone())
        };
        let uk = zf.invert(&rhs, xcap)?.truncate_t(theta.clone());
        for d in &vars {
            zs.entry(d.clone()).or_default().push(zf.z_value(&uk, d));
        }
        us.push(uk);
    }
    Ok(us)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorantParams {
    pub m: u32,
    pub big_r: Q,
    pub r: Q,
    /// Grading step in t.
    pub a: Q,
    pub big_m: Q,
    pub beta: Q,
    pub a1: Q,
    pub b: BTreeMap<DerivIndex, Q>,
    pub g: BTreeMap<MuIndex, Q>,
}

/// `β = (e·m)^m` with a rational upper bound for `e`.
pub fn nagumo_bound(m: u32) -> Q {
    let base = e_upper() * qi(m as i64);
    let mut acc = Q::one();
    for _ in 0..m {
        acc *= &base;
    }
    acc
}

fn q_pow(x: &Q, e: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Majorant constants from the reduced equation. `M` bounds
/// `ρ^m N_R(C(ρ,·)^{-1})` over the exponents `1..=K` and is at least `2a^{−m}`.
pub fn derive_params(red: &ReducedEquation, big_r: &Q, r: &Q, k: u32, xcap: i64) -> Result<MajorantParams> {
    if !(r.is_positive() && r < big_r) {
        return Err(Error::Domain(format!("need 0 < r < R, got r = {}, R = {}", fmt_q(r), fmt_q(big_r))));
    }
    let m = red.spec.m;
    let zf = z_form(&red.truncated_x(XOrder::Deg(xcap)));
    let mut big_m = qi(2);
    for rho in 1..=k as i64 {
        let c = zf.c.eval(&Scalar::from_int(rho));
        if c.constant_term().is_zero() {
            return Err(Error::Certificate(format!("C({rho}, 0) = 0: resonance, no certificate")));
        }
        let inv = c.inverse(xcap).expect("nonzero constant term");
        let cand = q_pow(&qi(rho), m) * inv.norm(big_r);
        if cand > big_m {
            big_m = cand;
        }
    }
    let u1 = zf.invert(&zf.forcing.truncate_t(TOrder::upto(k as i64)), xcap)?;
    let a1 = DerivIndex::all_in_im(m, zf.n)
        .iter()
        .map(|d| zf.z_value(&u1, d).norm(big_r))
        .max()
        .unwrap_or_else(Q::zero);
    Ok(MajorantParams {
        m,
        big_r: big_r.clone(),
        r: r.clone(),
        a: Q::one(),
        big_m,
        beta: nagumo_bound(m),
        a1,
        b: zf.linear.iter().map(|(d, s)| (d.clone(), s.norm(big_r))).collect(),
        g: zf.nonlinear.iter().map(|(nu, s)| (nu.clone(), s.norm(big_r))).collect(),
    })
}

/// `[z^k] (Σ_i c_i z^i)^p` with `c` indexed from grade 1.
fn power_coeff(c: &[Q], p: u32, k: usize) -> Q {
    let mut cur = vec![Q::zero(); k + 1];
    cur[0] = Q::one();
    for _ in 0..p {
        let mut next = vec![Q::zero(); k + 1];
        for (d1, a) in cur.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, ci) in c.iter().enumerate() {
                let d = d1 + i + 1;
                if d > k {
                    break;
                }
                next[d] += a * ci;
            }
        }
        cur = next;
    }
    cur[k].clone()
}

/// `Y_1, …, Y_K` evaluated at `params.r`.
pub fn majorant_sequence(params: &MajorantParams, k: u32) -> Vec<Q> {
    let gap = q_pow(&(&params.big_r - &params.r), params.m);
    let bsum: Q = params.b.values().fold(Q::zero(), |a, b| a + b);
    let mut y: Vec<Q> = vec![params.a1.clone()];
    for kk in 2..=k as usize {
        let by: Vec<Q> = y.iter().map(|v| &params.beta * v).collect();
        let mut acc = &bsum * &by[kk - 2] / &gap;
        for (nu, g) in &params.g {
            let p = nu.abs();
            if p as usize > kk || g.is_zero() {
                continue;
            }
            acc += g / q_pow(&gap, p - 1) * power_coeff(&by, p, kk);
        }
        y.push(&params.big_m * acc);
    }
    y
}

/// `C_k = Y_k (R−r)^{m(k−1)}`, independent of `r`.
pub fn normalized(params: &MajorantParams, y: &[Q]) -> Vec<Q> {
    let gap = q_pow(&(&params.big_r - &params.r), params.m);
    y.iter().enumerate().map(|(i, v)| v * q_pow(&gap, i as u32)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusEstimate {
    /// Largest observed ratio `C_{k+1}/C_k`; `None` when `C_k = 0` for `k >= 2`.
    pub growth: Option<Q>,
    pub delta: Q,
}

/// `δ^a = (R−r)^m / (2 ρ̂)` with `ρ̂ = max_k C_{k+1}/C_k`.
pub fn radius_estimate(c: &[Q], params: &MajorantParams) -> Result<RadiusEstimate> {
    if c.len() < 4 {
        return Err(Error::Certificate(format!("need at least 4 terms for a growth estimate, got {}", c.len())));
    }
    let mut growth: Option<Q> = None;
    for w in c.windows(2) {
        if w[0].is_zero() {
            if !w[1].is_zero() {
                return Err(Error::Certificate("a zero majorant term is followed by a nonzero one".into()));
            }
            continue;
        }
        let ratio = &w[1] / &w[0];
        if growth.as_ref().is_none_or(|g| &ratio > g) {
            growth = Some(ratio);
        }
    }
    let growth = growth.filter(|g| g.is_positive());
    let delta = match &growth {
        None => params.big_r.clone(),
        Some(g) => q_pow(&(&params.big_r - &params.r), params.m) / (qi(2) * g),
    };
    Ok(RadiusEstimate { growth, delta })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub k: u32,
    pub index: String,
    pub norm: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `N_r(θ^j ∂^α u_k) <= β Y_k(r)` for every `k` and `(j, α) ∈ I_m`.
pub fn verify_majorant(us: &[LogSeries], y: &[Q], params: &MajorantParams) -> VerifyReport {
    let n = us.first().map(|u| u.n()).unwrap_or(1);
    let vars = DerivIndex::all_in_im(params.m, n);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (i, (u, yk)) in us.iter().zip(y).enumerate() {
        let bound = &params.beta * yk;
        for d in &vars {
            let norm = u.d_alpha(&d.alpha).theta_n(d.j).norm(&params.r);
            checked += 1;
            if norm > bound {
                violations.push(Violation {
                    k: i as u32 + 1,
                    index: d.to_dsl(),
                    norm: fmt_q(&norm),
                    bound: fmt_q(&bound),
                });
            }
        }
    }
    VerifyReport { checked, violations }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub params: MajorantParams,
    pub order: u32,
    pub y: Vec<Q>,
    pub c: Vec<Q>,
    pub radius: RadiusEstimate,
    pub report: VerifyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateDoc {
    pub version: u32,
    pub order: u32,
    pub big_r: String,
    pub r: String,
    pub a: String,
    pub big_m: String,
    pub beta: String,
    pub a1: String,
    pub b: BTreeMap<String, String>,
    pub g: BTreeMap<String, String>,
    pub c: Vec<String>,
    pub growth: Option<String>,
    pub delta: String,
    pub delta_f64: f64,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl Certificate {
    pub fn to_doc(&self) -> CertificateDoc {
        let p = &self.params;
        CertificateDoc {
            version: FORMAT_VERSION,
            order: self.order,
            big_r: fmt_q(&p.big_r),
            r: fmt_q(&p.r),
            a: fmt_q(&p.a),
            big_m: fmt_q(&p.big_m),
            beta: fmt_q(&p.beta),
            a1: fmt_q(&p.a1),
            b: p.b.iter().map(|(d, v)| (d.to_dsl(), fmt_q(v))).collect(),
            g: p.g.iter().map(|(nu, v)| (nu.to_dsl(), fmt_q(v))).collect(),
            c: self.c.iter().map(fmt_q).collect(),
            growth: self.radius.growth.as_ref().map(fmt_q),
            delta: fmt_q(&self.radius.delta),
            delta_f64: crate::scalar::q_to_f64(&self.radius.delta),
            checked: self.report.checked,
            violations: self.report.violations.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("certificate serializes")
    }
}

/// Parameters, sequence, radius and verification in one pass.
pub fn certify(red: &ReducedEquation, big_r: &Q, r: &Q, k: u32) -> Result<Certificate> {
    let xcap = red.spec.max_deg as i64;
    let params = derive_params(red, big_r, r, k, xcap)?;
    let y = majorant_sequence(&params, k);
    let c = normalized(&params, &y);
    let radius = radius_estimate(&c, &params)?;
    let us = components(red, k, xcap)?;
    let report = verify_majorant(&us, &y, &params);
    Ok(Certificate { params, order: k, y, c, radius, report })
}

/// Sum of the components, for comparison with the directly solved `v`.
pub fn component_sum(us: &[LogSeries]) -> LogSeries {
    let n = us.first().map(|u| u.n()).unwrap_or(1);
    us.iter().fold(LogSeries::zero(n, XOrder::Exact, TOrder::Exact), |acc, u| acc.add_aligned(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_assumptions;
    use crate::fuchsian::{reduce, solve_formal};
    use crate::leading::{build_leading_equation, solve_leading};
    use crate::parser::parse_equation;
    use crate::xpoly::XPoly;
    use crate::scalar::{q, q_frac};

    fn reduced(src: &str, deg: u32) -> ReducedEquation {
        let spec = parse_equation(src).unwrap().with_max_deg(deg);
        let rep = check_assumptions(&spec);
        let eq = build_leading_equation(&spec, &rep).unwrap();
        let sol = solve_leading(&eq, 0, 40).unwrap();
        reduce(&spec, &rep, &sol.a, &XPoly::zero(spec.n, XOrder::Exact)).unwrap()
    }

    fn params(m: u32, a1: Q, b: Q, g: Option<(MuIndex, Q)>) -> MajorantParams {
        MajorantParams {
            m,
            big_r: q(1),
            r: q_frac(1, 2),
            a: q(1),
            big_m: q(2),
            beta: nagumo_bound(m),
            a1,
            b: [(DerivIndex::t_only(0, 1), b)].into(),
            g: g.into_iter().collect(),
        }
    }

    #[test]
    fn beta_exceeds_the_true_constant() {
        let e = std::f64::consts::E;
        for m in 1..6u32 {
            let exact = (e * m as f64).powi(m as i32);
            assert!(crate::scalar::q_to_f64(&nagumo_bound(m)) >= exact);
        }
    }

    #[test]
    fn zero_forcing_gives_zero_sequence() {
        let p = params(2, q(0), q(3), Some((MuIndex::single(DerivIndex::t_only(1, 1), 2), q(5))));
        let y = majorant_sequence(&p, 6);
        assert!(y.iter().all(|v| v.is_zero()));
        let est = radius_estimate(&normalized(&p, &y), &p).unwrap();
        assert_eq!(est.delta, q(1));
    }

    #[test]
    fn single_quadratic_term() {
        let mu = MuIndex::single(DerivIndex::t_only(1, 1), 2);
        let p = params(2, q(3), q(0), Some((mu, q(5))));
        let y = majorant_sequence(&p, 2);
        let gap = q_frac(1, 4);
        let expect = &p.big_m * q(5) * (&p.beta * q(3)) * (&p.beta * q(3)) / gap;
        assert_eq!(y[1], expect);
    }

    #[test]
    fn geometric_growth() {
        let p = params(2, q(1), q_frac(1, 3), None);
        let y = majorant_sequence(&p, 6);
        let c = normalized(&p, &y);
        let ratio = &p.big_m * &p.beta * q_frac(1, 3);
        for w in c.windows(2) {
            assert_eq!(&w[1] / &w[0], ratio);
        }
        let est = radius_estimate(&c, &p).unwrap();
        assert_eq!(est.delta, q_frac(1, 4) / (q(2) * ratio));
    }

    #[test]
    fn normalized_is_r_independent() {
        let mu = MuIndex::single(DerivIndex::t_only(1, 1), 3);
        let mut p = params(3, q(2), q_frac(1, 5), Some((mu, q(7))));
        let c1 = normalized(&p, &majorant_sequence(&p, 6));
        p.r = q_frac(1, 3);
        let c2 = normalized(&p, &majorant_sequence(&p, 6));
        assert_eq!(c1, c2);
    }

    #[test]
    fn short_or_broken_sequences_fail() {
        let p = params(2, q(1), q(1), None);
        assert!(radius_estimate(&[q(1), q(1), q(1)], &p).is_err());
        assert!(radius_estimate(&[q(1), q(0), q(1), q(1)], &p).is_err());
    }

    #[test]
    fn components_sum_to_direct_solution() {
        let red = reduced("D[t,2](u) = D[t,1](u)^2 + t + t*D[t,1](u)", 2);
        let k = 6;
        let direct = solve_formal(&red, k, ResonancePolicy::Error).unwrap();
        let us = components(&red, k, 2).unwrap();
        for (i, u) in us.iter().enumerate() {
            if let Some(v) = u.valuation() {
                assert!(v >= q(i as i64 + 1));
            }
        }
        let v = direct.v.unwrap().truncate_t(TOrder::upto(k as i64));
        assert!(component_sum(&us).agrees_with(&v));
    }

    #[test]
    fn prototype_with_forcing_certifies() {
        let red = reduced("D[t,2](u) = D[t,1](u)^2 + t", 2);
        let cert = certify(&red, &q(1), &q_frac(1, 2), 8).unwrap();
        assert!(cert.report.ok(), "{:?}", cert.report.violations);
        assert!(cert.radius.delta.is_positive());
        assert_eq!(cert.params.big_m, q(2));
    }

    #[test]
    fn undersized_a1_is_flagged() {
        let red = reduced("D[t,2](u) = D[t,1](u)^2 + t", 2);
        let mut p = derive_params(&red, &q(1), &q_frac(1, 2), 6, 2).unwrap();
        p.a1 = &p.a1 / (q(2) * &p.beta);
        let y = majorant_sequence(&p, 6);
        let us = components(&red, 6, 2).unwrap();
        let rep = verify_majorant(&us, &y, &p);
        assert!(rep.violations.iter().any(|v| v.k == 1));
    }
}
