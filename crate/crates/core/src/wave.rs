//! Nonlinear wave equations `□u = g(u, ∂_s u, ∇_y u)` near a characteristic-free
//! hyperplane `s = ψ(y) = c·y`, rewritten in `t = s − ψ(y)`, `x = y`.
//!
//! With `Ψ = 1 − |c|^2` the box operator becomes
//! `Ψ ∂_t^2 + 2 Σ c_i ∂_{x_i} ∂_t − Δ_x`, so
//! `∂_t^2 u = Ψ^{-1} (g − 2 Σ c_i ∂_{x_i}∂_t u + Δ_x u)` with
//! `∂_s → ∂_t` and `∂_{y_i} → ∂_{x_i} − c_i ∂_t`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::index::{DerivIndex, MuIndex};
use crate::parser::PDESpec;
use crate::scalar::{Q, Scalar};
use crate::series::LogSeries;

/// One monomial `coeff · z^z σ^sigma Π η_i^{eta_i}` of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMonomial {
    pub z: u32,
    pub sigma: u32,
    pub eta: Vec<u32>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveProblem {
    pub n: usize,
    /// Constant gradient of `ψ`.
    pub grad_psi: Vec<Q>,
    pub g: Vec<GMonomial>,
}

type Poly = BTreeMap<MuIndex, Scalar>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            *out.entry(ma.combined(mb)).or_insert_with(Scalar::zero) += &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn var(d: DerivIndex) -> Poly {
    [(MuIndex::single(d, 1), Scalar::one())].into()
}

impl WaveProblem {
    /// `Ψ = 1 − |∇ψ|^2`.
    pub fn psi_factor(&self) -> Q {
        self.grad_psi.iter().fold(Q::from_integer(1.into()), |acc, c| acc - c * c)
    }

    fn check(&self) -> Result<()> {
        if self.grad_psi.len() != self.n {
            return Err(Error::Domain(format!("gradient has {} entries, n = {}", self.grad_psi.len(), self.n)));
        }
        for mono in &self.g {
            if mono.eta.len() != self.n {
                return Err(Error::Domain("η exponent vector has the wrong length".into()));
            }
            if mono.sigma + mono.eta.iter().sum::<u32>() > 2 {
                return Err(Error::Domain("g must have degree at most 2 in (σ, η)".into()));
            }
        }
        if self.psi_factor().is_zero() {
            return Err(Error::Domain("1 − |∇ψ|^2 vanishes: the hyperplane is characteristic".into()));
        }
        Ok(())
    }

    /// `g_2(0, 1, −∇ψ)`, the quadratic part of `g` at `z = 0`.
    pub fn g2_on_conormal(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for mono in &self.g {
            if mono.z != 0 || mono.sigma + mono.eta.iter().sum::<u32>() != 2 {
                continue;
            }
            let mut v = mono.coeff.clone();
            for (c, &e) in self.grad_psi.iter().zip(&mono.eta) {
                v = &v * &Scalar::real(-c.clone()).pow(e);
            }
            acc += &v;
        }
        acc
    }

    /// `−Ψ / g_2(0, 1, −∇ψ)`.
    pub fn predicted_leading(&self) -> Result<Scalar> {
        let g2 = self.g2_on_conormal();
        if g2.is_zero() {
            return Err(Error::Domain("g_2 vanishes on the conormal direction".into()));
        }
        Ok(&Scalar::real(-self.psi_factor()) / &g2)
    }

    /// The equation in `(t, x)` solved for `∂_t^2 u`.
    pub fn to_spec(&self, max_deg: u32) -> Result<PDESpec> {
        self.check()?;
        let n = self.n;
        let u = var(DerivIndex::t_only(0, n));
        let ut = var(DerivIndex::t_only(1, n));
        let unit = |i: usize| {
            let mut a = vec![0; n];
            a[i] = 1;
            a
        };
        let mut rhs = Poly::new();
        let mut add = |p: Poly, k: &Scalar| {
            for (mu, c) in p {
                *rhs.entry(mu).or_insert_with(Scalar::zero) += &(&c * k);
            }
        };
        for mono in &self.g {
            let mut p: Poly = [(MuIndex::new(), mono.coeff.clone())].into();
            for _ in 0..mono.z {
                p = poly_mul(&p, &u);
            }
            for _ in 0..mono.sigma {
                p = poly_mul(&p, &ut);
            }
            for (i, &e) in mono.eta.iter().enumerate() {
                let mut eta = var(DerivIndex::new(0, unit(i)));
                eta.insert(MuIndex::single(DerivIndex::t_only(1, n), 1), Scalar::real(-self.grad_psi[i].clone()));
                for _ in 0..e {
                    p = poly_mul(&p, &eta);
                }
            }
            add(p, &Scalar::one());
        }
        for i in 0..n {
            let c = &self.grad_psi[i];
            if !c.is_zero() {
                add(var(DerivIndex::new(1, unit(i))), &Scalar::real(-c * Q::from_integer(2.into())));
            }
            let mut a = vec![0; n];
            a[i] = 2;
            add(var(DerivIndex::new(0, a)), &Scalar::one());
        }
        let inv = Scalar::real(self.psi_factor().recip());
        let terms = rhs
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mu, c)| (mu, LogSeries::scalar(n, &c * &inv)));
        PDESpec::from_terms(2, n, max_deg, terms)
    }
}

/// `g = (∂_s u)^2` with `ψ(y) = c y` in one space dimension.
pub fn quadratic_example(c: Q) -> WaveProblem {
    WaveProblem {
        n: 1,
        grad_psi: vec![c],
        g: vec![GMonomial { z: 0, sigma: 2, eta: vec![0], coeff: Scalar::one() }],
    }
}
