#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One generated monomial `coeff · t^k · Π D[t,j]D[x1,α](u)`.
#[derive(Clone, Debug)]
pub struct GenTerm {
    pub coeff: (i64, i64),
    pub k: i64,
    /// `(j, α)` factors, repeated by multiplicity.
    pub factors: Vec<(u32, u32)>,
}

impl GenTerm {
    pub fn abs(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn gamma(&self) -> u32 {
        self.factors.iter().map(|f| f.0).sum()
    }

    pub fn abs_l(&self, l: u32) -> u32 {
        self.factors.iter().filter(|f| f.0 <= l).count() as u32
    }

    fn key(&self) -> Vec<(u32, u32)> {
        let mut f = self.factors.clone();
        f.sort();
        f
    }

    fn to_dsl(&self) -> String {
        let (p, q) = self.coeff;
        let mut s = if q == 1 { format!("{p}") } else { format!("({p}/{q})") };
        if self.k > 0 {
            s.push_str(&format!("*t^{}", self.k));
        }
        for &(j, a) in &self.factors {
            let atom = match (j, a) {
                (0, 0) => "u".to_string(),
                (0, a) => format!("D[x1,{a}](u)"),
                (j, 0) => format!("D[t,{j}](u)"),
                (j, a) => format!("D[t,{j}]D[x1,{a}](u)"),
            };
            s.push('*');
            s.push_str(&atom);
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub m: u32,
    pub l: u32,
    /// The first `lead` terms are the intended maximizers.
    pub lead: usize,
    pub terms: Vec<GenTerm>,
}

impl GenSpec {
    pub fn to_dsl(&self) -> String {
        let rhs: Vec<String> = self.terms.iter().map(GenTerm::to_dsl).collect();
        format!("D[t,{}](u) = {}", self.m, rhs.join(" + "))
    }
}

const POOL: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (3, 1)];

fn falling(l: i64, j: u32) -> i64 {
    (0..j as i64).map(|i| l - i).product()
}

fn fact(n: i64) -> i64 {
    (1..=n).product()
}

/// `d^j/dt^j (t^l log t) = β t^{l−j}` for `j > l`.
fn beta(j: u32, l: u32) -> i64 {
    let s = if (j - l - 1) % 2 == 0 { 1 } else { -1 };
    s * fact(l as i64) * fact((j - l - 1) as i64)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn reduced(p: i64, q: i64) -> (i64, i64) {
    let g = gcd(p, q).max(1);
    let s = if q < 0 { -1 } else { 1 };
    (s * p / g, s * q / g)
}

fn random_factor(rng: &mut ChaCha8Rng, m: u32, j_min: u32, x_ok: bool) -> (u32, u32) {
    let j = rng.gen_range(j_min..m);
    let a = if x_ok && rng.gen_bool(0.3) { 1 } else { 0 };
    (j, a)
}

/// A random spec built to pass every structural assumption: the maximizers use
/// only `j >= l + 1` t-derivatives and every other term has `δ >= 1`.
///
/// With `solvable` there is a single maximizer whose coefficient is chosen so
/// that the leading root is a Gaussian rational.
pub fn random_accepted(rng: &mut ChaCha8Rng, m_max: u32, solvable: bool) -> GenSpec {
    loop {
        let m = rng.gen_range(2..=m_max);
        let l = rng.gen_range(0..=m - 2);
        let n_lead = if solvable { 1 } else { rng.gen_range(1..=2) };
        let mut terms: Vec<GenTerm> = Vec::new();
        let mut ok = true;
        for _ in 0..n_lead {
            let p = rng.gen_range(2..=3u32);
            let factors: Vec<(u32, u32)> = (0..p).map(|_| random_factor(rng, m, l + 1, false)).collect();
            let t = GenTerm { coeff: (1, 1), k: 0, factors };
            let k = t.gamma() as i64 - (l * p) as i64 - m as i64 + l as i64;
            if k < 0 || terms.iter().any(|o| o.key() == t.key()) {
                ok = false;
                break;
            }
            let coeff = if solvable {
                // c Π β A^{p−1} = β_{m,l}; pick c so that A^{p−1} = ±s^{p−1}
                let prod: i64 = t.factors.iter().map(|f| beta(f.0, l)).product();
                let s: i64 = *[1, 2].choose(rng).unwrap();
                let sign: i64 = *[1, -1].choose(rng).unwrap();
                reduced(sign * beta(m, l), prod * s.pow(p - 1))
            } else {
                *POOL.choose(rng).unwrap()
            };
            terms.push(GenTerm { coeff, k, ..t });
        }
        if !ok {
            continue;
        }
        for _ in 0..rng.gen_range(0..=3) {
            let p = rng.gen_range(0..=3u32);
            let factors: Vec<(u32, u32)> = (0..p).map(|_| random_factor(rng, m, 0, true)).collect();
            let mut t = GenTerm { coeff: *POOL.choose(rng).unwrap(), k: 0, factors };
            let delta = rng.gen_range(1..=3i64);
            t.k = delta - m as i64 + l as i64 + t.gamma() as i64 - (l * p) as i64;
            if t.k < 0 || terms.iter().any(|o| o.key() == t.key()) {
                continue;
            }
            terms.push(t);
        }
        return GenSpec { m, l, lead: n_lead, terms };
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn falling_i(l: i64, j: u32) -> i64 {
    falling(l, j)
}

pub fn beta_i(j: u32, l: u32) -> i64 {
    beta(j, l)
}
