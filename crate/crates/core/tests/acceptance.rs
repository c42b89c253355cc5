//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use logsing::analysis::{check_assumptions, dichotomy_mismatches};
use logsing::catalog::{find_example, prepare_log, run_log};
use logsing::fuchsian::{solve_formal, solve_prescribed, ResonancePolicy};
use logsing::index::{DerivIndex, MuIndex};
use logsing::leading::{b_lower, beta, build_leading_equation, falling_int};
use logsing::majorant::{components, derive_params, majorant_sequence, normalized, verify_majorant};
use logsing::parser::{parse_equation_with, parse_xpoly, ParseOptions};
use logsing::scalar::{q_frac, Scalar};
use logsing::wave::quadratic_example;
use logsing::{parse_equation, LogSeries, XOrder, XPoly, Q};

type Outcome = Result<String, String>;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{out} ({took:.2?})"))
}

fn zero_b(n: usize) -> XPoly {
    XPoly::zero(n, XOrder::Exact)
}

fn prototype_ode() -> Outcome {
    timed(Duration::from_secs(1), || {
        let spec = parse_equation("D[t,2](u) = D[t,1](u)^2").map_err(|e| e.to_string())?;
        let rep = check_assumptions(&spec);
        ensure(rep.sigma_c == Some(q(0)) && rep.l == Some(0), "sigma_c or l is not 0")?;
        ensure(rep.m0 == vec![MuIndex::single(DerivIndex::t_only(1, 1), 2)], "M0 differs")?;
        ensure(rep.a0_holds && rep.a1_holds && rep.a2_holds && rep.a3_holds, "an assumption fails")?;
        let eq = build_leading_equation(&spec, &rep).map_err(|e| e.to_string())?;
        ensure(eq.to_string() == "A + 1 = 0", format!("leading equation {eq}"))?;
        let run = run_log(&spec, 0, &zero_b(1), 20, ResonancePolicy::Error).map_err(|e| e.to_string())?;
        ensure(run.leading.a.is_constant() && run.leading.a.constant_term() == Scalar::from_int(-1), "a is not -1")?;
        ensure(run.result.v.as_ref().is_some_and(|v| v.is_zero()), "v is not identically zero")?;
        ensure(run.result.residual.valuation.is_none(), "residual is not zero")?;
        ensure(run.result.residual.exceeds(20), "residual not certified through t^20")?;
        Ok("a = -1, v = 0, residual zero through t^20".into())
    })
}

fn cubic() -> Outcome {
    timed(Duration::from_secs(10), || {
        let spec = parse_equation_with("D[t,3](u) = t*D[t,2](u)^3", &ParseOptions { n: None, max_deg: 4 })
            .map_err(|e| e.to_string())?;
        let rep = check_assumptions(&spec);
        ensure(rep.l == Some(1), "l is not 1")?;
        let eq = build_leading_equation(&spec, &rep).map_err(|e| e.to_string())?;
        ensure(eq.to_string() == "A^2 + 1 = 0", format!("leading equation {eq}"))?;
        let run = run_log(&spec, 0, &zero_b(1), 12, ResonancePolicy::Error).map_err(|e| e.to_string())?;
        ensure(run.leading.a.is_constant() && run.leading.a.constant_term() == Scalar::i(), "a is not i")?;
        let res = &run.result.residual;
        ensure(res.exceeds(12), format!("residual valuation {:?}", res.valuation))?;
        let val = res.valuation.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "+inf".into());
        Ok(format!("a = i, residual valuation {val} > 12"))
    })
}

fn wave() -> Outcome {
    let problem = quadratic_example(q_frac(1, 2));
    let predicted = problem.predicted_leading().map_err(|e| e.to_string())?;
    // −(1 − c²) / g₂ with g₂(0, 1, −c) = 1 for g = σ²
    let by_hand = Scalar::real(-(q(1) - q_frac(1, 4)));
    ensure(predicted == by_hand, format!("predicted {} != -3/4", predicted.to_dsl()))?;
    let spec = problem.to_spec(4).map_err(|e| e.to_string())?;
    let run = run_log(&spec, 0, &zero_b(1), 8, ResonancePolicy::Error).map_err(|e| e.to_string())?;
    let a = &run.leading.a;
    ensure(a.is_constant() && a.constant_term() == predicted, format!("a = {}", a.to_dsl()))?;
    ensure(run.result.residual.exceeds(8), "residual does not exceed 8")?;
    Ok("a = -3/4 equals the predicted coefficient, residual > 8".into())
}

/// Laurent series in `t` with polynomial-in-`x` coefficients, kept deliberately
/// separate from the library's series type.
#[derive(Clone, Default)]
struct Laurent(BTreeMap<i64, Vec<Q>>);

fn padd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pscale(a: &[Q], k: &Q) -> Vec<Q> {
    a.iter().map(|c| c * k).collect()
}

fn pdx(a: &[Q]) -> Vec<Q> {
    a.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()
}

impl Laurent {
    fn term(e: i64, p: Vec<Q>) -> Laurent {
        Laurent([(e, p)].into())
    }

    fn add(&self, o: &Laurent) -> Laurent {
        let mut out = self.0.clone();
        for (e, p) in &o.0 {
            let cur = out.remove(e).unwrap_or_default();
            out.insert(*e, padd(&cur, p));
        }
        Laurent(out)
    }

    fn scale(&self, k: &Q) -> Laurent {
        Laurent(self.0.iter().map(|(e, p)| (*e, pscale(p, k))).collect())
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (e1, p1) in &self.0 {
            for (e2, p2) in &o.0 {
                out = out.add(&Laurent::term(e1 + e2, pmul(p1, p2)));
            }
        }
        out
    }

    fn dt(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, p)| (e - 1, pscale(p, &q(*e)))).collect())
    }

    fn dx(&self) -> Laurent {
        Laurent(self.0.iter().map(|(e, p)| (*e, pdx(p))).collect())
    }

    fn valuation(&self) -> Option<i64> {
        self.0.iter().find(|(_, p)| p.iter().any(|c| !c.is_zero())).map(|(e, _)| *e)
    }
}

/// Substitutes `2/t² + g t² + h t⁴ − g_x t⁵/24` into
/// `u_ttt = s1·6·u·∂_V u + s2·∂_W u` for every sign and variable choice and
/// returns the conventions under which the residual vanishes through `t²`.
fn kdv_orientations() -> Vec<(i64, i64, char, char)> {
    let g = vec![q(1), q(1), q(1)];
    let h = vec![q(2), q(-1)];
    let u = Laurent::term(-2, vec![q(2)])
        .add(&Laurent::term(2, g.clone()))
        .add(&Laurent::term(4, h))
        .add(&Laurent::term(5, pscale(&pdx(&g), &q_frac(-1, 24))));
    let d = |v: char| if v == 't' { u.dt() } else { u.dx() };
    let mut hits = Vec::new();
    for s1 in [1, -1] {
        for s2 in [1, -1] {
            for v in ['t', 'x'] {
                for w in ['t', 'x'] {
                    let rhs = u.mul(&d(v)).scale(&q(6 * s1)).add(&d(w).scale(&q(s2)));
                    let r = u.dt().dt().dt().add(&rhs.scale(&q(-1)));
                    if r.valuation().is_none_or(|e| e >= 3) {
                        hits.push((s1, s2, v, w));
                    }
                }
            }
        }
    }
    hits
}

fn kdv() -> Outcome {
    let hits = kdv_orientations();
    ensure(hits == vec![(1, -1, 't', 'x')], format!("orientation oracle found {hits:?}"))?;
    let ex = find_example("kdv-laurent").ok_or("missing example")?;
    let spec = ex.spec().map_err(|e| e.to_string())?;
    let oriented = parse_equation_with("D[t,3](u) = 6*u*D[t,1](u) - D[x1,1](u)", &ParseOptions { n: None, max_deg: ex.max_deg })
        .map_err(|e| e.to_string())?;
    ensure(spec == oriented, "catalog equation does not match the oracle's orientation")?;

    let n = spec.n;
    let lead = LogSeries::monomial(q(-2), 0, XPoly::constant(n, Scalar::from_int(2), XOrder::Exact));
    let px = |s: &str| parse_xpoly(s, n).map_err(|e| e.to_string());
    let data: BTreeMap<Q, XPoly> = [(q(2), px("x1")?), (q(4), px("0")?)].into();
    let res = solve_prescribed(&spec, &lead, &data, 4).map_err(|e| e.to_string())?;
    let c5 = res.u.coeff_at(&q(5), 0);
    ensure(c5.len() == 1 && c5.constant_term() == Scalar::frac(-1, 24), format!("t^5 coefficient {}", c5.to_dsl()))?;
    let rhos: Vec<Q> = res.resonances.iter().map(|r| r.rho.clone()).collect();
    ensure(rhos == vec![q(2), q(4)], format!("resonances {rhos:?}"))?;
    ensure(res.residual.exceeds(4), "residual does not exceed 4")?;

    // generic data: the t^5 coefficient is −g_x/24
    let data: BTreeMap<Q, XPoly> = [(q(2), px("1 + x1 + x1^2")?), (q(4), px("2 - x1")?)].into();
    let res = solve_prescribed(&spec, &lead, &data, 4).map_err(|e| e.to_string())?;
    let want = px("-1/24 - 1/12*x1")?;
    ensure(res.u.coeff_at(&q(5), 0).agrees_with(&want), "generic t^5 coefficient differs from -g_x/24")?;
    Ok("orientation u_ttt = 6 u u_t - u_x, t^5 coefficient -1/24, resonances {2, 4}".into())
}

fn log_derivatives() -> Outcome {
    let mut checked = 0;
    for l in 0..=6u32 {
        // t^e (p log t + c), differentiated by hand
        let (mut e, mut p, mut c) = (l as i64, q(1), q(0));
        let mut s = LogSeries::monomial(q(l as i64), 1, XPoly::one(1));
        for j in 0..=8u32 {
            if j > 0 {
                let (np, nc) = (&p * q(e), &p + &c * q(e));
                e -= 1;
                p = np;
                c = nc;
                s = s.d_t();
            }
            let (want_log, want_const) = if j <= l {
                (falling_int(l as i64, j), b_lower(j, l))
            } else {
                (Scalar::zero(), beta(j, l).map_err(|e| e.to_string())?)
            };
            let at = q(l as i64 - j as i64);
            ensure(
                Scalar::real(p.clone()) == want_log && Scalar::real(c.clone()) == want_const,
                format!("closed form differs at l = {l}, j = {j}"),
            )?;
            ensure(
                s.coeff_at(&at, 1).constant_term() == want_log && s.coeff_at(&at, 0).constant_term() == want_const,
                format!("iterated d_t differs at l = {l}, j = {j}"),
            )?;
            ensure(s.len() <= 2, format!("stray terms at l = {l}, j = {j}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (l, j) pairs, zero mismatches"))
}

fn dichotomy() -> Outcome {
    let mut rng = common::rng(0x5eed_0006);
    let mut checked = 0;
    while checked < 20 {
        let g = common::random_accepted(&mut rng, 4, false);
        let src = g.to_dsl();
        let spec = parse_equation(&src).map_err(|e| format!("{src}: {e}"))?;
        let rep = check_assumptions(&spec);
        ensure(rep.all_hold(), format!("{src}: generated spec rejected: {:?}", rep.diagnostics))?;
        // oracle from the generator's own bookkeeping
        let sigma = g
            .terms
            .iter()
            .filter(|t| t.abs() >= 2)
            .map(|t| Q::new((t.gamma() as i64 - g.m as i64 - t.k).into(), (t.abs() as i64 - 1).into()))
            .max();
        ensure(sigma == Some(q(g.l as i64)) && rep.sigma_c == sigma, format!("{src}: sigma_c mismatch"))?;
        ensure(rep.m0.len() == g.lead, format!("{src}: |M0| = {}, expected {}", rep.m0.len(), g.lead))?;
        for (i, t) in g.terms.iter().enumerate() {
            let delta = g.m as i64 - g.l as i64 + t.k - t.gamma() as i64 + (g.l * t.abs()) as i64;
            let lead = i < g.lead;
            ensure(if lead { delta == 0 } else { delta >= 1 }, format!("{src}: delta {delta} on term {i}"))?;
        }
        let sup = g.terms.iter().map(|t| t.gamma() as i64 - (g.l * t.abs()) as i64 - t.k).max();
        ensure(sup == Some(g.m as i64 - g.l as i64), format!("{src}: sup formulation fails"))?;
        let mism = dichotomy_mismatches(&spec, &rep);
        ensure(mism.is_empty(), format!("{src}: {mism:?}"))?;
        checked += 1;
    }
    Ok(format!("{checked} random specs, zero mismatches"))
}

fn residual_order() -> Outcome {
    let mut rng = common::rng(0x5eed_0007);
    let (mut clean, mut resonant) = (0, 0);
    for _ in 0..20 {
        let g = common::random_accepted(&mut rng, 3, true);
        let src = g.to_dsl();
        let spec = parse_equation_with(&src, &ParseOptions { n: None, max_deg: 3 }).map_err(|e| format!("{src}: {e}"))?;
        let b = zero_b(spec.n);
        let (_, _, _, red) = prepare_log(&spec, 0, &b, 8).map_err(|e| format!("{src}: {e}"))?;
        match solve_formal(&red, 8, ResonancePolicy::Error) {
            Ok(res) => {
                ensure(res.residual.exceeds(8), format!("{src}: residual {:?}", res.residual.valuation))?;
                clean += 1;
            }
            Err(logsing::Error::Resonance { rho, .. }) => {
                ensure(rho.is_integer() && rho >= q(1) && rho <= q(8 + g.m as i64 - g.l as i64), format!("{src}: bad exponent {rho}"))?;
                let c_at = |k: &Q| red.op.eval(&Scalar::real(k.clone())).constant_term();
                ensure(c_at(&rho).is_zero(), format!("{src}: C({rho}, 0) != 0"))?;
                let mut k = q(1);
                while k < rho {
                    ensure(!c_at(&k).is_zero(), format!("{src}: earlier root {k} skipped"))?;
                    k += Q::one();
                }
                let res = solve_formal(&red, 8, ResonancePolicy::Frobenius).map_err(|e| format!("{src}: {e}"))?;
                ensure(res.residual.exceeds(8), format!("{src}: residual with log raising"))?;
                resonant += 1;
            }
            Err(e) => return Err(format!("{src}: {e}")),
        }
    }
    Ok(format!("{clean} residuals > 8, {resonant} exact resonance aborts"))
}

fn majorant_case(src: &str) -> Result<(), String> {
    let spec = parse_equation_with(src, &ParseOptions { n: None, max_deg: 4 }).map_err(|e| e.to_string())?;
    let (_, _, _, red) = prepare_log(&spec, 0, &zero_b(spec.n), 8).map_err(|e| e.to_string())?;
    let xcap = spec.max_deg as i64;
    let big_r = q(1);
    let us = components(&red, 8, xcap).map_err(|e| e.to_string())?;
    let mut cs = Vec::new();
    for r in [q_frac(1, 2), q_frac(1, 3)] {
        let p = derive_params(&red, &big_r, &r, 8, xcap).map_err(|e| e.to_string())?;
        let y = majorant_sequence(&p, 8);
        let rep = verify_majorant(&us, &y, &p);
        ensure(rep.ok(), format!("{src}: {} violations at r = {r}", rep.violations.len()))?;
        cs.push(normalized(&p, &y));
    }
    ensure(cs[0] == cs[1], format!("{src}: C_k depends on r"))?;
    let mut p = derive_params(&red, &big_r, &q_frac(1, 2), 8, xcap).map_err(|e| e.to_string())?;
    p.a1 = &p.a1 / (q(2) * &p.beta);
    let rep = verify_majorant(&us, &majorant_sequence(&p, 8), &p);
    ensure(rep.violations.iter().any(|v| v.k == 1), format!("{src}: undersized A1 not flagged"))?;
    Ok(())
}

fn majorant() -> Outcome {
    timed(Duration::from_secs(10), || {
        majorant_case("D[t,2](u) = D[t,1](u)^2 + t")?;
        majorant_case("D[t,3](u) = t*D[t,2](u)^3 + t")?;
        Ok("both equations verified, C_k equal at r = R/2 and R/3, undersized A1 flagged".into())
    })
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("prototype ODE", prototype_ode),
        ("third order cubic", cubic),
        ("wave reduction", wave),
        ("KdV Laurent series", kdv),
        ("log derivatives", log_derivatives),
        ("dichotomy", dichotomy),
        ("residual order", residual_order),
        ("majorant", majorant),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let line = match f() {
            Ok(msg) => format!("criterion {} [{name}]: PASS: {msg}", i + 1),
            Err(msg) => {
                failed.push(i + 1);
                format!("criterion {} [{name}]: FAIL: {msg}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
