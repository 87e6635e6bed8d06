//! k[u]/u^(e·p), the coefficient ring of the mod-p objects.

use std::fmt;
use std::sync::Arc;

use super::config::RingConfig;
use super::witt::Fq;
use crate::error::{Error, Result};
use crate::impl_ring_ops;
use crate::ring::Ring;

#[derive(Clone)]
pub struct TildePoly {
    ctx: Arc<RingConfig>,
    coeffs: Vec<Fq>,
}

impl TildePoly {
    /// Pads or truncates `coeffs` to length e·p.
    pub fn new(ctx: &Arc<RingConfig>, mut coeffs: Vec<Fq>) -> TildePoly {
        let ep = ctx.ep();
        coeffs.resize(ep, ctx.witt().fq_zero());
        TildePoly {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn zero(ctx: &Arc<RingConfig>) -> TildePoly {
        TildePoly::new(ctx, Vec::new())
    }

    pub fn constant(ctx: &Arc<RingConfig>, a: Fq) -> TildePoly {
        TildePoly::new(ctx, vec![a])
    }

    pub fn from_int(ctx: &Arc<RingConfig>, n: i64) -> TildePoly {
        TildePoly::constant(ctx, ctx.witt().fq_from_int(n))
    }

    /// a·u^k (zero when k ≥ e·p).
    pub fn monomial(ctx: &Arc<RingConfig>, a: Fq, k: usize) -> TildePoly {
        let mut coeffs = vec![ctx.witt().fq_zero(); k.min(ctx.ep())];
        coeffs.push(a);
        TildePoly::new(ctx, coeffs)
    }

    pub fn u_pow(ctx: &Arc<RingConfig>, k: usize) -> TildePoly {
        TildePoly::monomial(ctx, ctx.witt().fq_from_int(1), k)
    }

    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.ctx.witt().fq_zero())
    }

    pub fn scale(&self, a: &Fq) -> TildePoly {
        TildePoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul(a)).collect(),
        }
    }

    /// u-adic valuation; e·p for zero.
    pub fn val_u(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Multiplication by u^k.
    pub fn shift(&self, k: usize) -> TildePoly {
        let mut coeffs = vec![self.ctx.witt().fq_zero(); k.min(self.ctx.ep())];
        coeffs.extend(self.coeffs.iter().cloned());
        TildePoly::new(&self.ctx, coeffs)
    }

    /// Division by u^k. The top k coefficients of the quotient are not
    /// determined by the input and are returned as zero.
    pub fn unshift(&self, k: usize) -> Result<TildePoly> {
        if self.val_u() < k {
            return Err(Error::Invalid(format!("not divisible by u^{k}")));
        }
        Ok(TildePoly::new(
            &self.ctx,
            self.coeffs.iter().skip(k).cloned().collect(),
        ))
    }

    /// Frobenius: x ↦ x^p on coefficients and u ↦ u^p.
    pub fn phi(&self) -> TildePoly {
        let p = self.ctx.p() as usize;
        let mut out = vec![self.ctx.witt().fq_zero(); self.ctx.ep()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * p >= out.len() {
                break;
            }
            out[i * p] = c.frobenius();
        }
        TildePoly::new(&self.ctx, out)
    }

    /// Monodromy u^n ↦ −n·u^n.
    pub fn monodromy(&self) -> TildePoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.mul(&c.from_int_like(-(n as i64))))
            .collect();
        TildePoly::new(&self.ctx, coeffs)
    }

    pub fn inv(&self) -> Result<TildePoly> {
        if !self.is_unit() {
            return Err(Error::Invalid("inverse of a non-unit in k[u]/u^(ep)".into()));
        }
        let n = self.coeffs.len();
        let a0inv = self.coeffs[0].inv()?;
        let mut out = vec![self.ctx.witt().fq_zero(); n];
        out[0] = a0inv.clone();
        for k in 1..n {
            let mut s = self.ctx.witt().fq_zero();
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out[k] = s.neg().mul(&a0inv);
        }
        Ok(TildePoly::new(&self.ctx, out))
    }
}

impl Ring for TildePoly {
    fn zero_like(&self) -> Self {
        TildePoly::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        TildePoly::from_int(&self.ctx, 1)
    }
    fn from_int_like(&self, n: i64) -> Self {
        TildePoly::from_int(&self.ctx, n)
    }
    fn add(&self, other: &Self) -> Self {
        TildePoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        TildePoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![self.ctx.witt().fq_zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        TildePoly {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
    }
    fn neg(&self) -> Self {
        TildePoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl_ring_ops!(TildePoly);

impl PartialEq for TildePoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for TildePoly {}

impl fmt::Display for TildePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*u"),
                _ => format!("{c}*u^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for TildePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_and_truncation() {
        let ctx = RingConfig::standard(7, 2, 2, 2).unwrap();
        let w = ctx.witt().fq_generator();
        let x = TildePoly::monomial(&ctx, w.clone(), 1);
        assert_eq!(x.phi(), TildePoly::monomial(&ctx, w.frobenius(), 7));
        assert!(TildePoly::u_pow(&ctx, 2).phi().is_zero());
        assert_eq!(x.val_u(), 1);
        assert_eq!(TildePoly::zero(&ctx).val_u(), 14);
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = RingConfig::standard(7, 1, 2, 2).unwrap();
        let a = TildePoly::from_int(&ctx, 3).add(&TildePoly::u_pow(&ctx, 1)).add(&TildePoly::u_pow(&ctx, 5));
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), TildePoly::from_int(&ctx, 1));
        assert!(TildePoly::u_pow(&ctx, 1).inv().is_err());
    }
}
