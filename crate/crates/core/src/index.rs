//! Derivative indices `(j, α)` and nonlinearity multi-indices `μ`.

use std::collections::BTreeMap;
use std::fmt;

use crate::xpoly::alpha_deg;

/// The derivative `∂_t^j ∂_x^α u`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivIndex {
    pub j: u32,
    pub alpha: Vec<u32>,
}

impl DerivIndex {
    pub fn new(j: u32, alpha: Vec<u32>) -> Self {
        DerivIndex { j, alpha }
    }

    pub fn t_only(j: u32, n: usize) -> Self {
        DerivIndex { j, alpha: vec![0; n] }
    }

    pub fn alpha_deg(&self) -> u32 {
        alpha_deg(&self.alpha)
    }

    /// Membership in `I_m`: `j + |α| <= m` and `j < m`.
    pub fn in_im(&self, m: u32) -> bool {
        self.j < m && self.j + self.alpha_deg() <= m
    }

    pub fn is_t_only(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0)
    }

    pub fn with_n(&self, n: usize) -> Self {
        let mut alpha = self.alpha.clone();
        alpha.resize(n, 0);
        DerivIndex { j: self.j, alpha }
    }

    /// DSL rendering, e.g. `D[t,2]D[x1,1](u)` or `u`.
    pub fn to_dsl(&self) -> String {
        if self.j == 0 && self.is_t_only() {
            return "u".to_string();
        }
        let mut s = String::new();
        if self.j > 0 || self.is_t_only() {
            s.push_str(&format!("D[t,{}]", self.j));
        }
        for (i, &a) in self.alpha.iter().enumerate() {
            if a > 0 {
                s.push_str(&format!("D[x{},{}]", i + 1, a));
            }
        }
        s.push_str("(u)");
        s
    }

    /// Every index of `I_m` in dimension `n`, sorted.
    pub fn all_in_im(m: u32, n: usize) -> Vec<DerivIndex> {
        let mut out = Vec::new();
        for j in 0..m {
            let budget = m - j;
            for alpha in alphas_up_to(n, budget) {
                out.push(DerivIndex { j, alpha });
            }
        }
        out.sort();
        out
    }
}

/// All multi-indices of length `n` with total degree `<= d`.
pub fn alphas_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=d {
            cur.push(k);
            rec(n, d - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for DerivIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{:?})", self.j, self.alpha)
    }
}

impl fmt::Debug for DerivIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Nonlinearity multi-index `μ = (μ_{j,α})`; zero entries are never stored.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MuIndex {
    entries: BTreeMap<DerivIndex, u32>,
}

impl MuIndex {
    pub fn new() -> Self {
        MuIndex::default()
    }

    pub fn single(d: DerivIndex, power: u32) -> Self {
        let mut mu = MuIndex::new();
        mu.add(d, power);
        mu
    }

    pub fn from_entries<I: IntoIterator<Item = (DerivIndex, u32)>>(it: I) -> Self {
        let mut mu = MuIndex::new();
        for (d, p) in it {
            mu.add(d, p);
        }
        mu
    }

    pub fn add(&mut self, d: DerivIndex, power: u32) {
        if power == 0 {
            return;
        }
        *self.entries.entry(d).or_insert(0) += power;
    }

    /// Product of monomials `U^μ U^ν = U^{μ+ν}`.
    pub fn combined(&self, other: &MuIndex) -> MuIndex {
        let mut r = self.clone();
        for (d, &p) in &other.entries {
            r.add(d.clone(), p);
        }
        r
    }

    pub fn entries(&self) -> impl Iterator<Item = (&DerivIndex, &u32)> {
        self.entries.iter()
    }

    pub fn get(&self, d: &DerivIndex) -> u32 {
        self.entries.get(d).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|μ| = Σ μ_{j,α}`.
    pub fn abs(&self) -> u32 {
        self.entries.values().sum()
    }

    /// `γ(μ) = Σ j μ_{j,α}`.
    pub fn gamma(&self) -> u32 {
        self.entries.iter().map(|(d, &p)| d.j * p).sum()
    }

    /// `|μ|_l = Σ_{j <= l} μ_{j,α}`.
    pub fn abs_l(&self, l: u32) -> u32 {
        self.entries.iter().filter(|(d, _)| d.j <= l).map(|(_, &p)| p).sum()
    }

    pub fn all_in_im(&self, m: u32) -> bool {
        self.entries.keys().all(|d| d.in_im(m))
    }

    pub fn max_j(&self) -> Option<u32> {
        self.entries.keys().map(|d| d.j).max()
    }

    pub fn with_n(&self, n: usize) -> MuIndex {
        MuIndex::from_entries(self.entries.iter().map(|(d, &p)| (d.with_n(n), p)))
    }

    /// DSL rendering of `U^μ`, e.g. `D[t,1](u)^2*u`; `1` for the empty index.
    pub fn to_dsl(&self) -> String {
        if self.entries.is_empty() {
            return "1".to_string();
        }
        self.entries
            .iter()
            .map(|(d, &p)| if p == 1 { d.to_dsl() } else { format!("{}^{}", d.to_dsl(), p) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for MuIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(d, p)| format!("{d}:{p}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for MuIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let mu = MuIndex::from_entries([(DerivIndex::t_only(2, 1), 3)]);
        assert_eq!(mu.abs(), 3);
        assert_eq!(mu.gamma(), 6);
        assert_eq!(mu.abs_l(1), 0);
        let kdv = MuIndex::from_entries([(DerivIndex::t_only(0, 1), 1), (DerivIndex::t_only(1, 1), 1)]);
        assert_eq!((kdv.abs(), kdv.gamma(), kdv.abs_l(0)), (2, 1, 1));
    }

    #[test]
    fn im_membership() {
        assert!(DerivIndex::new(1, vec![1]).in_im(2));
        assert!(!DerivIndex::new(2, vec![0]).in_im(2));
        assert!(!DerivIndex::new(1, vec![2]).in_im(2));
        assert!(DerivIndex::new(0, vec![2]).in_im(2));
        // I_2 in one variable: (0,0),(0,1),(0,2),(1,0),(1,1)
        assert_eq!(DerivIndex::all_in_im(2, 1).len(), 5);
    }

    #[test]
    fn dsl_rendering() {
        assert_eq!(DerivIndex::new(0, vec![0]).to_dsl(), "u");
        assert_eq!(DerivIndex::new(2, vec![0]).to_dsl(), "D[t,2](u)");
        assert_eq!(DerivIndex::new(0, vec![1]).to_dsl(), "D[x1,1](u)");
        assert_eq!(DerivIndex::new(1, vec![0, 2]).to_dsl(), "D[t,1]D[x2,2](u)");
    }
}
