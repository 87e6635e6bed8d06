//! K = K0[u]/E(u), elements stored as polynomials of degree < e.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::config::RingConfig;
use super::witt::Witt;
use crate::error::{precision, Result};
use crate::impl_ring_ops;
use crate::ring::{charpoly, det, Matrix, Poly, Ring};

/// p-adic valuation of an element of K, normalized by v_p(p) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KVal {
    Finite(BigRational),
    /// Vanishes at working precision; `at_least` is the certified lower
    /// bound (`None` for a structurally exact zero).
    Infinite { at_least: Option<BigRational> },
}

impl KVal {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            KVal::Finite(v) => Some(v),
            KVal::Infinite { .. } => None,
        }
    }
}

impl fmt::Display for KVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KVal::Finite(v) => write!(f, "{v}"),
            KVal::Infinite { at_least: None } => write!(f, "inf"),
            KVal::Infinite { at_least: Some(b) } => write!(f, "inf (>= {b} at working precision)"),
        }
    }
}

#[derive(Clone)]
pub struct KElem {
    ctx: Arc<RingConfig>,
    poly: Poly<Witt>,
}

impl KElem {
    pub fn from_poly(ctx: &Arc<RingConfig>, poly: &Poly<Witt>) -> KElem {
        let poly = if poly.len() > ctx.e() {
            poly.rem_monic(ctx.eisenstein())
        } else {
            poly.clone()
        };
        KElem {
            ctx: ctx.clone(),
            poly,
        }
    }

    pub fn from_witt(ctx: &Arc<RingConfig>, a: Witt) -> KElem {
        KElem::from_poly(ctx, &Poly::constant(a))
    }

    pub fn from_int(ctx: &Arc<RingConfig>, n: i64) -> KElem {
        KElem::from_witt(ctx, ctx.w_int(n))
    }

    /// The uniformizer π, class of u.
    pub fn pi(ctx: &Arc<RingConfig>) -> KElem {
        KElem::from_poly(ctx, &Poly::var(&ctx.zero_w()))
    }

    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }

    /// The representative L_0 of degree < e with L_0(π) = self.
    pub fn poly(&self) -> &Poly<Witt> {
        &self.poly
    }

    pub fn coeff(&self, i: usize) -> Witt {
        self.poly.coeff(i)
    }

    pub fn scale(&self, a: &Witt) -> KElem {
        KElem {
            ctx: self.ctx.clone(),
            poly: self.poly.scale(a),
        }
    }

    pub fn div_p_pow(&self, k: i32) -> KElem {
        KElem {
            ctx: self.ctx.clone(),
            poly: self.poly.map(|c| c.div_p_pow(k)),
        }
    }

    /// Matrix of multiplication by `self` on the basis 1, π, …, π^(e−1)
    /// (column j holds self·π^j).
    pub fn mult_matrix(&self) -> Matrix<Witt> {
        let e = self.ctx.e();
        let mut cols = Vec::with_capacity(e);
        let mut cur = self.poly.clone();
        for _ in 0..e {
            cols.push(cur.padded(e));
            cur = cur.shift(1).rem_monic(self.ctx.eisenstein());
        }
        (0..e).map(|i| (0..e).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// N_{K/K0}(self), the determinant of the multiplication matrix.
    pub fn norm(&self) -> Witt {
        det(&self.mult_matrix(), &self.ctx.zero_w())
    }

    /// Inverse through the characteristic polynomial of multiplication.
    pub fn inv(&self) -> Result<KElem> {
        let cp = charpoly(&self.mult_matrix(), &self.ctx.zero_w());
        let c0 = &cp[0];
        if c0.is_zero() {
            return Err(precision("inverse in K", "norm vanishes at working precision"));
        }
        let mut acc = KElem::from_int(&self.ctx, 0);
        for k in (1..cp.len()).rev() {
            acc = acc.mul(self).add(&KElem::from_witt(&self.ctx, cp[k].clone()));
        }
        Ok(acc.scale(&c0.inv()?.neg()))
    }

    pub fn div(&self, other: &KElem) -> Result<KElem> {
        Ok(self.mul(&other.inv()?))
    }

    /// v_p through the norm, after pulling out the largest power of p that
    /// divides every coefficient.
    pub fn val_p(&self) -> KVal {
        let e = self.ctx.e() as i64;
        if self.poly.is_exact_zero() {
            return KVal::Infinite { at_least: None };
        }
        let coeffs = self.poly.coeffs();
        let k = coeffs.iter().filter_map(|c| c.valuation()).min();
        let k = match k {
            Some(k) => k,
            None => {
                let bound = coeffs.iter().map(|c| c.abs_prec()).min().unwrap();
                return KVal::Infinite {
                    at_least: Some(BigRational::from_integer(BigInt::from(bound))),
                };
            }
        };
        let norm = self.div_p_pow(k).norm();
        let base = BigRational::from_integer(BigInt::from(k));
        match norm.valuation() {
            Some(v) => KVal::Finite(base + BigRational::new(BigInt::from(v), BigInt::from(e))),
            None => KVal::Infinite {
                at_least: Some(base + BigRational::new(BigInt::from(norm.abs_prec()), BigInt::from(e))),
            },
        }
    }
}

impl Ring for KElem {
    fn zero_like(&self) -> Self {
        KElem::from_int(&self.ctx, 0)
    }
    fn one_like(&self) -> Self {
        KElem::from_int(&self.ctx, 1)
    }
    fn from_int_like(&self, n: i64) -> Self {
        KElem::from_int(&self.ctx, n)
    }
    fn add(&self, other: &Self) -> Self {
        KElem {
            ctx: self.ctx.clone(),
            poly: self.poly.add(&other.poly),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        KElem {
            ctx: self.ctx.clone(),
            poly: self.poly.sub(&other.poly),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        KElem::from_poly(&self.ctx, &self.poly.mul(&other.poly))
    }
    fn neg(&self) -> Self {
        KElem {
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

impl_ring_ops!(KElem);

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::strunc::fmt_poly(&self.poly, "pi", f)
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> KVal {
        KVal::Finite(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn basic_valuations() {
        let ctx = RingConfig::standard(7, 1, 2, 2).unwrap();
        let pi = KElem::pi(&ctx);
        assert_eq!(pi.val_p(), q(1, 2));
        assert_eq!(KElem::from_int(&ctx, 7).val_p(), q(1, 1));
        let x = KElem::from_int(&ctx, 7).div(&pi.scale(&ctx.w_int(2))).unwrap();
        assert_eq!(x.val_p(), q(1, 2));
        assert_eq!(KElem::from_int(&ctx, 0).val_p(), KVal::Infinite { at_least: None });
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = RingConfig::standard(7, 2, 2, 2).unwrap();
        let w = ctx.witt().omega();
        let x = KElem::from_witt(&ctx, w).add(&KElem::pi(&ctx).scale(&ctx.w_int(3)));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).eq_at_prec(&KElem::from_int(&ctx, 1)));
    }
}
