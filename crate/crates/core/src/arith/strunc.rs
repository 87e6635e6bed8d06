//! S/Fil^p S ≅ W[u]/E(u)^p with K0 coefficients allowed (so the same type
//! carries S_{K0} modulo Fil^p).

use std::fmt;
use std::sync::Arc;

use super::config::RingConfig;
use super::kelem::KElem;
use super::tilde::TildePoly;
use super::witt::Witt;
use crate::error::{precision, Result};
use crate::impl_ring_ops;
use crate::ring::{Poly, Ring};

#[derive(Clone)]
pub struct STrunc {
    ctx: Arc<RingConfig>,
    poly: Poly<Witt>,
}

impl STrunc {
    /// Class of an arbitrary polynomial.
    pub fn from_poly(ctx: &Arc<RingConfig>, poly: &Poly<Witt>) -> STrunc {
        let poly = if poly.len() > ctx.ep() {
            poly.rem_monic(ctx.eisenstein_pow(ctx.p() as usize))
        } else {
            poly.clone()
        };
        STrunc {
            ctx: ctx.clone(),
            poly,
        }
    }

    pub fn constant(ctx: &Arc<RingConfig>, a: Witt) -> STrunc {
        STrunc::from_poly(ctx, &Poly::constant(a))
    }

    pub fn from_int(ctx: &Arc<RingConfig>, n: i64) -> STrunc {
        STrunc::constant(ctx, ctx.w_int(n))
    }

    pub fn u(ctx: &Arc<RingConfig>) -> STrunc {
        STrunc::from_poly(ctx, &Poly::var(&ctx.zero_w()))
    }

    pub fn u_pow(ctx: &Arc<RingConfig>, k: usize) -> STrunc {
        STrunc::from_poly(ctx, &Poly::monomial(ctx.witt().one(), k))
    }

    /// E(u).
    pub fn eisenstein(ctx: &Arc<RingConfig>) -> STrunc {
        STrunc::from_poly(ctx, ctx.eisenstein())
    }

    /// The unit c = φ(E(u))/p.
    pub fn c(ctx: &Arc<RingConfig>) -> STrunc {
        STrunc::from_poly(ctx, ctx.c_poly())
    }

    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }

    /// Representative of degree < e·p.
    pub fn poly(&self) -> &Poly<Witt> {
        &self.poly
    }

    /// Exactly e·p coefficients.
    pub fn coeffs(&self) -> Vec<Witt> {
        self.poly.padded(self.ctx.ep())
    }

    pub fn coeff(&self, i: usize) -> Witt {
        self.poly.coeff(i)
    }

    pub fn scale(&self, a: &Witt) -> STrunc {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.scale(a),
        }
    }

    pub fn div_p_pow(&self, k: i32) -> STrunc {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.map(|c| c.div_p_pow(k)),
        }
    }

    pub fn mul_p_pow(&self, k: i32) -> STrunc {
        self.div_p_pow(-k)
    }

    /// Caps every coefficient at absolute precision `abs`.
    pub fn with_abs(&self, abs: i32) -> STrunc {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.map(|c| c.with_abs(abs)),
        }
    }

    /// Smallest p-adic valuation of a coefficient, `None` for zero.
    pub fn p_valuation(&self) -> Option<i32> {
        self.poly.coeffs().iter().filter_map(|c| c.valuation()).min()
    }

    pub fn is_integral(&self) -> bool {
        self.poly.coeffs().iter().all(|c| c.is_integral())
    }

    /// Lowest absolute precision among the coefficients.
    pub fn abs_prec(&self) -> i32 {
        self.poly
            .coeffs()
            .iter()
            .map(|c| c.abs_prec())
            .min()
            .unwrap_or(i32::MAX / 4)
    }

    /// Frobenius: σ on coefficients and u ↦ u^p. Fil^p S maps into
    /// p^(p−1) S, so the result is capped at absolute precision p − 1.
    pub fn phi(&self) -> STrunc {
        let zero = self.ctx.zero_w();
        let table = self.ctx.frob_table();
        let mut acc = Poly::zero(&zero);
        for (i, a) in self.poly.coeffs().iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            acc = acc.add(&table[i].scale(&a.frobenius()));
        }
        STrunc {
            ctx: self.ctx.clone(),
            poly: acc,
        }
        .with_abs(self.ctx.p() as i32 - 1)
    }

    /// Monodromy u^n ↦ −n·u^n applied to the representative; meaningful
    /// modulo Fil^(p−1).
    pub fn monodromy(&self) -> STrunc {
        let coeffs = self
            .poly
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| a.mul(&self.ctx.w_int(-(n as i64))))
            .collect();
        STrunc {
            ctx: self.ctx.clone(),
            poly: Poly::new(coeffs, &self.ctx.zero_w()),
        }
    }

    /// Unique representative of degree < e·s congruent modulo Fil^s.
    pub fn tronc(&self, s: usize) -> Poly<Witt> {
        tronc_poly(&self.ctx, &self.poly, s)
    }

    /// Largest i ≤ p with E(u)^i dividing the element.
    pub fn val_e(&self) -> Result<u32> {
        let eis = self.ctx.eisenstein();
        let p = self.ctx.p() as u32;
        let mut cur = self.poly.clone();
        for i in 0..p {
            if cur.is_zero() {
                if cur.coeffs().iter().any(|c| !c.is_exact_zero() && c.abs_prec() < 1) {
                    return Err(precision("E-adic valuation", "coefficients carry no p-adic digit"));
                }
                return Ok(p);
            }
            let (q, r) = cur.divrem_monic(eis);
            if !r.is_zero() {
                return Ok(i);
            }
            cur = q;
        }
        Ok(p)
    }

    /// Image in K under u ↦ π.
    pub fn f_pi(&self) -> KElem {
        KElem::from_poly(&self.ctx, &self.poly)
    }

    /// Image in K0 under u ↦ 0.
    pub fn f_zero(&self) -> Witt {
        self.poly.coeff(0)
    }

    /// Reduction to k[u]/u^(e·p); requires integral coefficients.
    pub fn reduce(&self) -> Result<TildePoly> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|c| c.reduce())
            .collect::<Result<Vec<_>>>()?;
        Ok(TildePoly::new(&self.ctx, coeffs))
    }

    /// Inverse of an element whose image mod (p, u) is nonzero, by Newton
    /// iteration from the constant term.
    pub fn unit_inverse(&self) -> Result<STrunc> {
        let a0 = self.poly.coeff(0);
        if a0.valuation() != Some(0) {
            return Err(precision("inverse in S", "constant term is not a unit"));
        }
        let two = STrunc::from_int(&self.ctx, 2);
        let mut y = STrunc::constant(&self.ctx, a0.inv()?);
        // Each step doubles the (p, u)-adic order of 1 − x·y.
        let target = self.ctx.ep() as u32 + self.ctx.prec() + 2;
        let steps = u32::BITS - target.leading_zeros() + 1;
        for _ in 0..steps {
            y = y.mul(&two.sub(&self.mul(&y)));
        }
        Ok(y)
    }
}

/// Reduction of a polynomial modulo E(u)^s.
pub fn tronc_poly(ctx: &Arc<RingConfig>, poly: &Poly<Witt>, s: usize) -> Poly<Witt> {
    poly.rem_monic(ctx.eisenstein_pow(s))
}

impl Ring for STrunc {
    fn zero_like(&self) -> Self {
        STrunc::from_poly(&self.ctx, &Poly::zero(&self.ctx.zero_w()))
    }
    fn one_like(&self) -> Self {
        STrunc::from_int(&self.ctx, 1)
    }
    fn from_int_like(&self, n: i64) -> Self {
        STrunc::from_int(&self.ctx, n)
    }
    fn add(&self, other: &Self) -> Self {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.add(&other.poly),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.sub(&other.poly),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        STrunc::from_poly(&self.ctx, &self.poly.mul(&other.poly))
    }
    fn neg(&self) -> Self {
        STrunc {
            ctx: self.ctx.clone(),
            poly: self.poly.neg(),
        }
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.poly.is_exact_zero()
    }
}

impl_ring_ops!(STrunc);

pub(crate) fn fmt_poly(poly: &Poly<Witt>, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let terms: Vec<String> = poly
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("{c}"),
            1 => format!("{c}*{var}"),
            _ => format!("{c}*{var}^{i}"),
        })
        .collect();
    if terms.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Display for STrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(&self.poly, "u", f)
    }
}

impl fmt::Debug for STrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O({}^{})", self.ctx.p(), self.abs_prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<RingConfig> {
        RingConfig::standard(7, 1, 2, 2).unwrap()
    }

    #[test]
    fn phi_of_u_is_u_to_the_p() {
        let ctx = ctx();
        let u = STrunc::u(&ctx);
        assert!(u.phi().eq_at_prec(&STrunc::u_pow(&ctx, 7)));
    }

    #[test]
    fn phi_of_eisenstein_is_p_times_c() {
        let ctx = ctx();
        let e = STrunc::eisenstein(&ctx);
        let c = STrunc::c(&ctx);
        assert!(e.phi().eq_at_prec(&c.mul_p_pow(1)));
        assert!(e.mul(&e).phi().eq_at_prec(&c.mul(&c).mul_p_pow(2)));
        assert!(c.unit_inverse().is_ok());
        // c ≡ −1 mod (p, u) for E = u^2 − p
        assert_eq!(c.reduce().unwrap().coeff(0), ctx.witt().fq_from_int(-1));
    }

    #[test]
    fn monodromy_on_monomials() {
        let ctx = ctx();
        let u3 = STrunc::u_pow(&ctx, 3);
        assert!(u3.monodromy().eq_at_prec(&u3.scale(&ctx.w_int(-3))));
        assert!(STrunc::from_int(&ctx, 5).monodromy().is_zero());
    }

    #[test]
    fn e_adic_valuation() {
        let ctx = ctx();
        let e = STrunc::eisenstein(&ctx);
        let unit = STrunc::from_int(&ctx, 1).add(&STrunc::u(&ctx));
        assert_eq!(e.pow(3).mul(&unit).val_e().unwrap(), 3);
        assert_eq!(STrunc::from_int(&ctx, 0).val_e().unwrap(), 7);
        let t = STrunc::from_int(&ctx, 3);
        let x = STrunc::from_int(&ctx, 7).add(&t.mul(&e));
        assert_eq!(x.val_e().unwrap(), 0);
    }

    #[test]
    fn tronc_kills_eisenstein_powers() {
        let ctx = ctx();
        let e = STrunc::eisenstein(&ctx);
        assert!(e.pow(2).tronc(2).is_zero());
        let t = STrunc::from_int(&ctx, 3).add(&STrunc::u(&ctx));
        let x = STrunc::from_int(&ctx, 7).add(&t.mul(&e));
        assert!(Poly::sub(&x.tronc(2), x.poly()).is_zero());
    }
}
