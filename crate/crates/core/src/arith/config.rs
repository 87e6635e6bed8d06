use std::sync::Arc;

use num_bigint::BigInt;

use super::witt::{Witt, WittRing};
use crate::error::{Error, Result};
use crate::ring::{Poly, Ring};

/// User-facing parameters; see [`RingConfig::new`].
#[derive(Clone, Debug)]
pub struct RingParams {
    pub p: i64,
    pub m: usize,
    pub e: usize,
    pub r: usize,
    /// Absolute p-adic precision; defaults to `min(p, r + 6)`.
    pub prec: Option<u32>,
    /// Monic integer lift of the residue field's defining polynomial.
    pub minpoly: Option<Vec<i64>>,
    /// Coefficients of E(u), lowest degree first, each given by its
    /// ω-coordinates. Defaults to `u^e - p`.
    pub eisenstein: Option<Vec<Vec<BigInt>>>,
}

impl RingParams {
    pub fn new(p: i64, m: usize, e: usize, r: usize) -> Self {
        RingParams {
            p,
            m,
            e,
            r,
            prec: None,
            minpoly: None,
            eisenstein: None,
        }
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = Some(prec);
        self
    }

    pub fn with_eisenstein_ints(mut self, coeffs: &[i64]) -> Self {
        self.eisenstein = Some(coeffs.iter().map(|&c| vec![BigInt::from(c)]).collect());
        self
    }

    pub fn effective_prec(&self) -> u32 {
        self.prec
            .unwrap_or_else(|| (self.p as u32).min(self.r as u32 + 6))
    }

    /// The coefficient ring alone, for parsing coefficients before the full
    /// configuration exists.
    pub fn witt_ring(&self) -> Result<Arc<WittRing>> {
        WittRing::new(self.p, self.m, self.effective_prec() + 2, self.minpoly.clone())
    }
}

/// Fixed data shared by all arithmetic: W, E(u), precision, and the tables
/// used by Frobenius on S/Fil^p S.
#[derive(Debug)]
pub struct RingConfig {
    p: i64,
    e: usize,
    r: usize,
    prec: u32,
    witt: Arc<WittRing>,
    eis: Poly<Witt>,
    eis_pow: Vec<Poly<Witt>>,
    c0: Witt,
    /// u^(p·k) mod E(u)^p for k < e·p.
    frob_table: Vec<Poly<Witt>>,
    /// φ(E(u))/p as a representative of degree < e·p.
    c: Poly<Witt>,
}

impl RingConfig {
    pub fn new(params: &RingParams) -> Result<Arc<RingConfig>> {
        let witt = params.witt_ring()?;
        let (p, e, r) = (params.p, params.e, params.r);
        let prec = params.effective_prec();
        if e == 0 {
            return Err(Error::Config("ramification index must be positive".into()));
        }
        if (e * r) as i64 >= p - 1 {
            return Err(Error::Config(format!("e·r = {} must be below p − 1 = {}", e * r, p - 1)));
        }
        if prec > p as u32 {
            return Err(Error::Config(format!("precision {prec} exceeds p = {p}")));
        }
        let floor = (r as u32 + 4).min(p as u32);
        if prec < floor {
            return Err(Error::Config(format!("precision {prec} below the minimum {floor}")));
        }
        let coeffs: Vec<Witt> = match &params.eisenstein {
            Some(cs) => cs
                .iter()
                .map(|c| witt.from_big_coords(c, 1 << 16))
                .collect(),
            None => {
                let mut v = vec![witt.zero(); e + 1];
                v[0] = witt.from_int(-(p as i128));
                v[e] = witt.one();
                v
            }
        };
        if coeffs.len() != e + 1 {
            return Err(Error::Config(format!(
                "Eisenstein polynomial needs {} coefficients, got {}",
                e + 1,
                coeffs.len()
            )));
        }
        if !coeffs[e].eq_at_prec(&witt.one()) {
            return Err(Error::Config("Eisenstein polynomial must be monic".into()));
        }
        for (i, c) in coeffs.iter().enumerate().take(e) {
            let v = c.valuation_floor();
            if v < 1 || (i == 0 && c.valuation() != Some(1)) {
                return Err(Error::Config(format!(
                    "E(u) is not Eisenstein at the coefficient of u^{i}"
                )));
            }
        }
        let zero = witt.zero();
        let mut fixed = coeffs.clone();
        fixed[e] = witt.one();
        let eis = Poly::new(fixed, &zero);
        let c0 = eis.coeff(0).div_p_pow(1);
        let mut eis_pow = vec![Poly::constant(witt.one())];
        for _ in 0..p {
            let next = eis_pow.last().unwrap().mul(&eis);
            eis_pow.push(next);
        }
        let ep = e * p as usize;
        let modulus = eis_pow[p as usize].clone();
        let step = Poly::monomial(witt.one(), p as usize);
        let mut frob_table = Vec::with_capacity(ep);
        let mut cur = Poly::constant(witt.one());
        for _ in 0..ep {
            frob_table.push(cur.clone());
            cur = cur.mul(&step).rem_monic(&modulus);
        }
        // φ(E) = E^σ(u^p) has the same leading term as E^p, and the two agree
        // mod p, so the difference divided by p is the exact representative.
        let sigma_eis_up = Poly::new(
            (0..=ep)
                .map(|k| {
                    if k % p as usize == 0 {
                        eis.coeff(k / p as usize).frobenius()
                    } else {
                        zero.clone()
                    }
                })
                .collect(),
            &zero,
        );
        let diff = sigma_eis_up.sub(&modulus);
        let c = diff.truncate(ep).map(|x| x.div_p_pow(1));
        Ok(Arc::new(RingConfig {
            p,
            e,
            r,
            prec,
            witt,
            eis,
            eis_pow,
            c0,
            frob_table,
            c,
        }))
    }

    /// Default ring: `E(u) = u^e − p`.
    pub fn standard(p: i64, m: usize, e: usize, r: usize) -> Result<Arc<RingConfig>> {
        RingConfig::new(&RingParams::new(p, m, e, r))
    }

    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn m(&self) -> usize {
        self.witt.m()
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn r(&self) -> usize {
        self.r
    }
    /// Degree bound e·p of the truncated models.
    pub fn ep(&self) -> usize {
        self.e * self.p as usize
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn witt(&self) -> &Arc<WittRing> {
        &self.witt
    }
    pub fn eisenstein(&self) -> &Poly<Witt> {
        &self.eis
    }
    /// E(u)^k for k ≤ p.
    pub fn eisenstein_pow(&self, k: usize) -> &Poly<Witt> {
        &self.eis_pow[k]
    }
    /// The unit c_0 with E(0) = p·c_0.
    pub fn c0(&self) -> &Witt {
        &self.c0
    }
    pub(crate) fn frob_table(&self) -> &[Poly<Witt>] {
        &self.frob_table
    }
    pub(crate) fn c_poly(&self) -> &Poly<Witt> {
        &self.c
    }
    pub fn zero_w(&self) -> Witt {
        self.witt.zero()
    }
    /// A W-element read at the working precision.
    pub fn w_int(&self, n: i64) -> Witt {
        self.witt.from_int(n as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(RingConfig::standard(7, 1, 3, 2).is_err());
        assert!(RingConfig::new(&RingParams::new(7, 1, 2, 2).with_eisenstein_ints(&[-49, 0, 1])).is_err());
        assert!(RingConfig::new(&RingParams::new(7, 1, 2, 2).with_eisenstein_ints(&[-7, 1, 1])).is_err());
        assert!(RingConfig::new(&RingParams::new(7, 1, 2, 2).with_prec(9)).is_err());
        assert!(RingConfig::new(&RingParams::new(7, 1, 2, 2).with_prec(5)).is_err());
    }

    #[test]
    fn default_precision() {
        let ctx = RingConfig::standard(7, 1, 2, 2).unwrap();
        assert_eq!(ctx.prec(), 7);
        let ctx = RingConfig::standard(13, 1, 5, 2).unwrap();
        assert_eq!(ctx.prec(), 8);
        assert_eq!(ctx.ep(), 65);
    }
}
