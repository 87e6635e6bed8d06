//! W(F_q) = Z_p[ω]/(h) at capped relative precision, and the residue field
//! F_q = F_p[ω̄]/(h̄).
//!
//! An element is stored as `p^val · unit` with the unit known modulo
//! `p^rel`. Absolute precision is `val + rel`; division by `p` lowers it by
//! one, as does any quotient with a non-unit.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{precision, Error, Result};
use crate::impl_ring_ops;
use crate::ring::Ring;

pub const MAX_M: usize = 6;
type Coords = [i64; MAX_M];

/// Sentinel valuation for a structurally exact zero.
const EXACT: i32 = i32::MAX / 4;

fn md(x: i128, m: i128) -> i128 {
    let r = x % m;
    if r < 0 {
        r + m
    } else {
        r
    }
}

fn vp_i128(mut x: i128, p: i128, bound: u32) -> u32 {
    if x == 0 {
        return bound;
    }
    let mut v = 0;
    while v < bound && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

#[derive(Debug)]
pub struct WittRing {
    p: i64,
    m: usize,
    cap: u32,
    pow: Vec<i128>,
    minpoly: Vec<i64>,
    /// ω^(m+k) in the power basis, modulo p^cap.
    red: Vec<Coords>,
    /// σ(ω^i) in the power basis, modulo p^cap.
    frob: Vec<Coords>,
}

impl WittRing {
    /// Builds W(F_{p^m}) with relative precision cap `cap`. `minpoly`, when
    /// given, is a monic integer polynomial (lowest degree first) whose
    /// reduction must be irreducible and separable mod p; otherwise a
    /// default primitive polynomial is searched.
    pub fn new(p: i64, m: usize, cap: u32, minpoly: Option<Vec<i64>>) -> Result<Arc<WittRing>> {
        if p < 3 || !is_prime(p) {
            return Err(Error::Config(format!("p = {p} must be an odd prime")));
        }
        if m == 0 || m > MAX_M {
            return Err(Error::Config(format!("residue degree m = {m} outside 1..={MAX_M}")));
        }
        let mut pow = vec![1i128];
        for _ in 0..cap + 1 {
            let next = pow.last().unwrap().checked_mul(p as i128);
            match next {
                Some(v) if v < (1i128 << 62) => pow.push(v),
                _ => {
                    return Err(Error::Config(format!(
                        "p^{} exceeds the 62-bit coefficient budget; lower the precision",
                        cap + 1
                    )))
                }
            }
        }
        let h = match minpoly {
            Some(h) => {
                if h.len() != m + 1 || h[m] != 1 {
                    return Err(Error::Config(format!(
                        "minimal polynomial must be monic of degree {m}"
                    )));
                }
                let hbar = fp_reduce(&h, p);
                if !fp_is_irreducible(&hbar, p) {
                    return Err(Error::Config(
                        "minimal polynomial is not irreducible mod p".into(),
                    ));
                }
                h
            }
            None => default_minpoly(p, m),
        };
        let hbar = fp_reduce(&h, p);
        if fp_degree(&fp_gcd(&hbar, &fp_derivative(&hbar, p), p)) != Some(0) {
            return Err(Error::Config(
                "minimal polynomial is inseparable mod p".into(),
            ));
        }
        let modulus = pow[cap as usize];
        let mut red = Vec::new();
        let mut cur = [0i64; MAX_M];
        for i in 0..m {
            cur[i] = md(-(h[i] as i128), modulus) as i64;
        }
        for _ in 0..m.saturating_sub(1) {
            red.push(cur);
            let top = cur[m - 1] as i128;
            let mut next = [0i64; MAX_M];
            for i in (1..m).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..m {
                let add = md(-(h[i] as i128) * top, modulus);
                next[i] = md(next[i] as i128 + add, modulus) as i64;
            }
            cur = next;
        }
        let mut identity = vec![[0i64; MAX_M]; m];
        for (i, row) in identity.iter_mut().enumerate() {
            row[i] = 1;
        }
        let draft = Arc::new(WittRing {
            p,
            m,
            cap,
            pow: pow.clone(),
            minpoly: h.clone(),
            red: red.clone(),
            frob: identity,
        });
        let frob = if m == 1 {
            vec![{
                let mut c = [0i64; MAX_M];
                c[0] = 1;
                c
            }]
        } else {
            let sigma_omega = hensel_frobenius(&draft)?;
            let mut out = Vec::with_capacity(m);
            let mut acc = draft.one();
            for _ in 0..m {
                out.push(acc.coords_at_cap());
                acc = acc.mul(&sigma_omega);
            }
            out
        };
        Ok(Arc::new(WittRing {
            p,
            m,
            cap,
            pow,
            minpoly: h,
            red,
            frob,
        }))
    }

    pub fn p(&self) -> i64 {
        self.p
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn cap(&self) -> u32 {
        self.cap
    }
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.m as u32)
    }
    pub fn minpoly(&self) -> &[i64] {
        &self.minpoly
    }
    fn pw(&self, k: u32) -> i128 {
        self.pow[k as usize]
    }

    fn mul_coords(&self, a: &Coords, b: &Coords, modulus: i128) -> Coords {
        let m = self.m;
        let mut conv = [0i128; 2 * MAX_M];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                conv[i + j] = md(conv[i + j] + (a[i] as i128) * (b[j] as i128) % modulus, modulus);
            }
        }
        let mut out = [0i64; MAX_M];
        for i in 0..m {
            let mut s = conv[i];
            for k in m..2 * m - 1 {
                if conv[k] != 0 {
                    s = md(s + conv[k] * (self.red[k - m][i] as i128 % modulus) % modulus, modulus);
                }
            }
            out[i] = s as i64;
        }
        out
    }

    /// Normalizes `p^shift · Σ c_i ω^i`, known modulo `p^abs`.
    fn normalize(self: &Arc<Self>, shift: i32, c: [i128; MAX_M], abs: i32) -> Witt {
        if abs <= shift {
            return Witt::inexact_zero(self, abs);
        }
        let relmax = ((abs - shift) as u32).min(self.cap);
        let modulus = self.pw(relmax);
        let mut red = [0i128; MAX_M];
        for i in 0..self.m {
            red[i] = md(c[i], modulus);
        }
        let p = self.p as i128;
        let v = (0..self.m)
            .map(|i| vp_i128(red[i], p, relmax))
            .min()
            .unwrap_or(relmax);
        if v >= relmax {
            return Witt::inexact_zero(self, shift + relmax as i32);
        }
        let rel = relmax - v;
        let m2 = self.pw(rel);
        let div = self.pw(v);
        let mut u = [0i64; MAX_M];
        for i in 0..self.m {
            u[i] = md(red[i] / div, m2) as i64;
        }
        Witt {
            ring: self.clone(),
            val: shift + v as i32,
            rel,
            u,
        }
    }

    pub fn zero(self: &Arc<Self>) -> Witt {
        Witt {
            ring: self.clone(),
            val: EXACT,
            rel: 0,
            u: [0; MAX_M],
        }
    }

    pub fn one(self: &Arc<Self>) -> Witt {
        self.from_int(1)
    }

    /// Exact integer (relative precision at the cap).
    pub fn from_int(self: &Arc<Self>, n: i128) -> Witt {
        if n == 0 {
            return self.zero();
        }
        let v = vp_i128(n, self.p as i128, 200) as i32;
        let mut c = [0i128; MAX_M];
        c[0] = n;
        self.normalize(0, c, v + self.cap as i32)
    }

    /// Integer known modulo `p^abs`.
    pub fn from_bigint(self: &Arc<Self>, n: &BigInt, abs: i32) -> Witt {
        self.from_big_coords(std::slice::from_ref(n), abs)
    }

    /// `Σ c_i ω^i` known modulo `p^abs`.
    pub fn from_big_coords(self: &Arc<Self>, coords: &[BigInt], abs: i32) -> Witt {
        let p = BigInt::from(self.p);
        let mut v: Option<i32> = None;
        for c in coords.iter() {
            if c.is_zero() {
                continue;
            }
            let mut x = c.clone();
            let mut k = 0;
            while k < abs && x.is_multiple_of(&p) {
                x /= &p;
                k += 1;
            }
            v = Some(v.map_or(k, |w: i32| w.min(k)));
        }
        let v = match v {
            None => return Witt::inexact_zero(self, abs),
            Some(v) => v,
        };
        if v >= abs {
            return Witt::inexact_zero(self, abs);
        }
        let rel = ((abs - v) as u32).min(self.cap);
        let modulus = BigInt::from(self.pw(rel));
        let pv = p.pow(v as u32);
        let mut c = [0i128; MAX_M];
        for (i, x) in coords.iter().enumerate().take(self.m) {
            let r = (x / &pv).mod_floor(&modulus);
            c[i] = r.to_i128().unwrap();
        }
        self.normalize(v, c, v + rel as i32)
    }

    pub fn from_coords(self: &Arc<Self>, coords: &[i128], abs: i32) -> Witt {
        let big: Vec<BigInt> = coords.iter().map(|&c| BigInt::from(c)).collect();
        self.from_big_coords(&big, abs)
    }

    /// Exact rational `num/den`.
    pub fn from_ratio(self: &Arc<Self>, num: i128, den: i128) -> Result<Witt> {
        self.from_int(num).div(&self.from_int(den))
    }

    /// The generator ω (zero when m = 1, where the default polynomial is x).
    pub fn omega(self: &Arc<Self>) -> Witt {
        if self.m == 1 {
            return self.from_int(-(self.minpoly[0] as i128));
        }
        let mut c = [0i128; MAX_M];
        c[1] = 1;
        self.normalize(0, c, self.cap as i32)
    }

    /// Teichmüller representative of a residue.
    pub fn teichmuller(self: &Arc<Self>, x: &Fq) -> Witt {
        let mut c = [0i128; MAX_M];
        for (i, ci) in c.iter_mut().enumerate().take(self.m) {
            *ci = x.c[i] as i128;
        }
        let mut y = self.normalize(0, c, self.cap as i32);
        if y.is_zero() {
            return self.zero();
        }
        let q = self.q();
        for _ in 0..=self.cap {
            y = y.pow(q);
        }
        y
    }

    pub fn fq_zero(self: &Arc<Self>) -> Fq {
        Fq {
            ring: self.clone(),
            c: [0; MAX_M],
        }
    }

    pub fn fq_from_coords(self: &Arc<Self>, coords: &[i64]) -> Fq {
        let mut c = [0i64; MAX_M];
        for (i, x) in coords.iter().enumerate().take(self.m) {
            c[i] = x.rem_euclid(self.p);
        }
        Fq {
            ring: self.clone(),
            c,
        }
    }

    pub fn fq_from_int(self: &Arc<Self>, n: i64) -> Fq {
        self.fq_from_coords(&[n])
    }

    /// Residue of ω.
    pub fn fq_generator(self: &Arc<Self>) -> Fq {
        self.omega().reduce().expect("ω is integral")
    }

    /// All elements of F_q in a fixed order (used by small exhaustive checks).
    pub fn fq_elements(self: &Arc<Self>) -> Vec<Fq> {
        let q = self.q() as i64;
        (0..q)
            .map(|mut k| {
                let mut c = [0i64; MAX_M];
                for ci in c.iter_mut().take(self.m) {
                    *ci = k % self.p;
                    k /= self.p;
                }
                Fq {
                    ring: self.clone(),
                    c,
                }
            })
            .collect()
    }
}

fn hensel_frobenius(ring: &Arc<WittRing>) -> Result<Witt> {
    let h: Vec<Witt> = ring.minpoly.iter().map(|&c| ring.from_int(c as i128)).collect();
    let dh: Vec<Witt> = (1..h.len())
        .map(|i| h[i].mul(&ring.from_int(i as i128)))
        .collect();
    let eval = |coeffs: &[Witt], x: &Witt| {
        let mut acc = ring.zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let mut y = ring.omega().pow(ring.p as u64);
    for _ in 0..=ring.cap + 1 {
        let num = eval(&h, &y);
        if num.is_zero() {
            break;
        }
        let den = eval(&dh, &y);
        y = y.sub(&num.div(&den)?);
    }
    if !eval(&h, &y).is_zero() {
        return Err(Error::Config("Hensel lifting of the Frobenius root failed".into()));
    }
    Ok(y)
}

/// Element of W(F_q) ⊗ Q at capped relative precision.
#[derive(Clone)]
pub struct Witt {
    ring: Arc<WittRing>,
    val: i32,
    rel: u32,
    u: Coords,
}

impl Witt {
    fn inexact_zero(ring: &Arc<WittRing>, abs: i32) -> Witt {
        Witt {
            ring: ring.clone(),
            val: abs,
            rel: 0,
            u: [0; MAX_M],
        }
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    /// p-adic valuation, or `None` when the element vanishes at its precision.
    pub fn valuation(&self) -> Option<i32> {
        if self.rel == 0 {
            None
        } else {
            Some(self.val)
        }
    }

    /// Valuation, reading a zero at precision as its absolute precision.
    pub fn valuation_floor(&self) -> i32 {
        self.val
    }

    /// Absolute precision (`i32::MAX / 4` for an exact zero).
    pub fn abs_prec(&self) -> i32 {
        if self.val == EXACT {
            EXACT
        } else {
            self.val + self.rel as i32
        }
    }

    pub fn rel_prec(&self) -> u32 {
        self.rel
    }

    pub fn is_unit(&self) -> bool {
        self.rel > 0 && self.val == 0
    }

    /// True when the element is known to lie in W.
    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    /// Lowers the absolute precision to at most `abs`.
    pub fn with_abs(&self, abs: i32) -> Witt {
        if self.val == EXACT || abs >= self.abs_prec() {
            return self.clone();
        }
        if self.rel == 0 || abs <= self.val {
            return Witt::inexact_zero(&self.ring, abs.min(self.abs_prec()));
        }
        let rel = (abs - self.val) as u32;
        let modulus = self.ring.pw(rel);
        let mut u = self.u;
        for x in u.iter_mut().take(self.ring.m) {
            *x = md(*x as i128, modulus) as i64;
        }
        Witt {
            ring: self.ring.clone(),
            val: self.val,
            rel,
            u,
        }
    }

    /// Unit part coordinates modulo p^cap (only meaningful for exact values).
    fn coords_at_cap(&self) -> Coords {
        let mut out = [0i64; MAX_M];
        if self.rel == 0 {
            return out;
        }
        let modulus = self.ring.pw(self.ring.cap);
        let scale = if self.val >= 0 && (self.val as u32) < self.ring.cap {
            self.ring.pw(self.val as u32)
        } else {
            return out;
        };
        for i in 0..self.ring.m {
            out[i] = md(self.u[i] as i128 * scale, modulus) as i64;
        }
        out
    }

    pub fn mul_p_pow(&self, k: i32) -> Witt {
        if self.val == EXACT {
            return self.clone();
        }
        let mut out = self.clone();
        out.val += k;
        out
    }

    pub fn div_p_pow(&self, k: i32) -> Witt {
        self.mul_p_pow(-k)
    }

    pub fn frobenius(&self) -> Witt {
        if self.rel == 0 || self.ring.m == 1 {
            return self.clone();
        }
        let modulus = self.ring.pw(self.rel);
        let mut c = [0i128; MAX_M];
        for i in 0..self.ring.m {
            if self.u[i] == 0 {
                continue;
            }
            for j in 0..self.ring.m {
                c[j] = md(
                    c[j] + (self.u[i] as i128) * (self.ring.frob[i][j] as i128 % modulus) % modulus,
                    modulus,
                );
            }
        }
        let mut u = [0i64; MAX_M];
        for j in 0..self.ring.m {
            u[j] = c[j] as i64;
        }
        Witt {
            ring: self.ring.clone(),
            val: self.val,
            rel: self.rel,
            u,
        }
    }

    /// σ applied `k` times.
    pub fn frobenius_pow(&self, k: usize) -> Witt {
        let mut x = self.clone();
        for _ in 0..k % self.ring.m {
            x = x.frobenius();
        }
        x
    }

    fn unit_inverse(&self) -> Coords {
        let ring = &self.ring;
        let ubar = Fq {
            ring: ring.clone(),
            c: {
                let mut c = [0i64; MAX_M];
                for i in 0..ring.m {
                    c[i] = (self.u[i]).rem_euclid(ring.p);
                }
                c
            },
        };
        let inv0 = ubar.inv().expect("unit residue is invertible");
        let modulus = ring.pw(self.rel);
        let mut y = inv0.c;
        let mut known = 1u32;
        while known < self.rel {
            // y <- y (2 - u y)
            let uy = ring.mul_coords(&self.u, &y, modulus);
            let mut two_minus = [0i64; MAX_M];
            for i in 0..ring.m {
                let base = if i == 0 { 2 } else { 0 };
                two_minus[i] = md(base - uy[i] as i128, modulus) as i64;
            }
            y = ring.mul_coords(&y, &two_minus, modulus);
            known *= 2;
        }
        y
    }

    pub fn inv(&self) -> Result<Witt> {
        if self.rel == 0 {
            return Err(precision("inverse", "element vanishes at working precision"));
        }
        Ok(Witt {
            ring: self.ring.clone(),
            val: -self.val,
            rel: self.rel,
            u: self.unit_inverse(),
        })
    }

    pub fn div(&self, other: &Witt) -> Result<Witt> {
        Ok(self.mul(&other.inv()?))
    }

    /// Image in the residue field; requires integrality.
    pub fn reduce(&self) -> Result<Fq> {
        let ring = &self.ring;
        if self.rel == 0 {
            if self.val >= 1 {
                return Ok(ring.fq_zero());
            }
            return Err(precision("reduction mod p", "no p-adic digit left"));
        }
        if self.val < 0 {
            return Err(Error::Invalid("reduction of a non-integral element".into()));
        }
        if self.val > 0 {
            return Ok(ring.fq_zero());
        }
        let mut c = [0i64; MAX_M];
        for i in 0..ring.m {
            c[i] = self.u[i].rem_euclid(ring.p);
        }
        Ok(Fq {
            ring: ring.clone(),
            c,
        })
    }

    /// Power-basis coordinates of `p^(-shift) · self` as integers modulo
    /// `p^(abs - shift)` where `shift = min(val, 0)`. Returns the coordinates
    /// and the power of p dividing out (non-positive means integral).
    pub fn residue_coords(&self) -> (Vec<BigInt>, i32) {
        let m = self.ring.m;
        if self.rel == 0 {
            return (vec![BigInt::zero(); m], 0);
        }
        let p = BigInt::from(self.ring.p);
        let den_exp = (-self.val).max(0);
        let scale = p.pow((self.val + den_exp) as u32);
        let coords = (0..m).map(|i| BigInt::from(self.u[i]) * &scale).collect();
        (coords, den_exp)
    }

    /// Rational value when m = 1 (or when only the first coordinate is
    /// nonzero): numerator and denominator exponent of p.
    pub fn rational_parts(&self) -> (BigInt, i32) {
        let (c, d) = self.residue_coords();
        (c[0].clone(), d)
    }
}

impl Ring for Witt {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn from_int_like(&self, n: i64) -> Self {
        self.ring.from_int(n as i128)
    }
    fn add(&self, other: &Self) -> Self {
        if self.val == EXACT {
            return other.clone();
        }
        if other.val == EXACT {
            return self.clone();
        }
        let abs = self.abs_prec().min(other.abs_prec());
        if self.rel == 0 {
            return other.with_abs(abs);
        }
        if other.rel == 0 {
            return self.with_abs(abs);
        }
        let s = self.val.min(other.val);
        let relmax = (abs - s) as u32;
        if relmax == 0 {
            return Witt::inexact_zero(&self.ring, abs);
        }
        let modulus = self.ring.pw(relmax.min(self.ring.cap));
        let mut c = [0i128; MAX_M];
        for (x, shift) in [(self, self.val - s), (other, other.val - s)] {
            if shift as u32 >= relmax {
                continue;
            }
            let sc = self.ring.pw(shift as u32);
            for i in 0..self.ring.m {
                c[i] = md(c[i] + md(x.u[i] as i128 * sc, modulus), modulus);
            }
        }
        self.ring.normalize(s, c, abs)
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.val == EXACT || other.val == EXACT {
            return self.ring.zero();
        }
        match (self.rel == 0, other.rel == 0) {
            (true, true) => Witt::inexact_zero(&self.ring, self.val + other.val),
            (true, false) => Witt::inexact_zero(&self.ring, self.val + other.val),
            (false, true) => Witt::inexact_zero(&self.ring, self.val + other.val),
            (false, false) => {
                let rel = self.rel.min(other.rel);
                let modulus = self.ring.pw(rel);
                Witt {
                    ring: self.ring.clone(),
                    val: self.val + other.val,
                    rel,
                    u: self.ring.mul_coords(&self.u, &other.u, modulus),
                }
            }
        }
    }
    fn neg(&self) -> Self {
        if self.rel == 0 {
            return self.clone();
        }
        let modulus = self.ring.pw(self.rel);
        let mut u = self.u;
        for x in u.iter_mut().take(self.ring.m) {
            *x = md(-(*x as i128), modulus) as i64;
        }
        Witt {
            ring: self.ring.clone(),
            val: self.val,
            rel: self.rel,
            u,
        }
    }
    fn is_zero(&self) -> bool {
        self.rel == 0
    }
    fn is_exact_zero(&self) -> bool {
        self.val == EXACT
    }
}

impl_ring_ops!(Witt);

fn fmt_coords(coords: &[BigInt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let terms: Vec<String> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => c.to_string(),
            1 => format!("{c}*w"),
            _ => format!("{c}*w^{i}"),
        })
        .collect();
    if terms.is_empty() {
        write!(f, "0")
    } else if terms.len() == 1 {
        write!(f, "{}", terms[0])
    } else {
        write!(f, "({})", terms.join(" + "))
    }
}

impl fmt::Display for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (coords, den) = self.residue_coords();
        fmt_coords(&coords, f)?;
        if den > 0 {
            write!(f, "/{}^{}", self.ring.p, den)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.val == EXACT {
            return write!(f, "0");
        }
        write!(f, "{} + O({}^{})", self, self.ring.p, self.abs_prec())
    }
}

/// Element of the residue field F_q.
#[derive(Clone)]
pub struct Fq {
    ring: Arc<WittRing>,
    c: Coords,
}

impl Fq {
    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.ring.m]
    }

    pub fn frobenius(&self) -> Fq {
        self.pow(self.ring.p as u64)
    }

    pub fn inv(&self) -> Result<Fq> {
        if self.is_zero() {
            return Err(Error::Invalid("inverse of zero in the residue field".into()));
        }
        Ok(self.pow(self.ring.q() - 2))
    }

    /// True when the element lies in the prime field F_p.
    pub fn in_prime_field(&self) -> bool {
        self.c[1..self.ring.m].iter().all(|&x| x == 0)
    }
}

impl Ring for Fq {
    fn zero_like(&self) -> Self {
        self.ring.fq_zero()
    }
    fn one_like(&self) -> Self {
        self.ring.fq_from_int(1)
    }
    fn from_int_like(&self, n: i64) -> Self {
        self.ring.fq_from_int(n)
    }
    fn add(&self, other: &Self) -> Self {
        let mut c = [0i64; MAX_M];
        for i in 0..self.ring.m {
            c[i] = (self.c[i] + other.c[i]).rem_euclid(self.ring.p);
        }
        Fq {
            ring: self.ring.clone(),
            c,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        let mut c = [0i64; MAX_M];
        for i in 0..self.ring.m {
            c[i] = (self.c[i] - other.c[i]).rem_euclid(self.ring.p);
        }
        Fq {
            ring: self.ring.clone(),
            c,
        }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.ring.m == 1 {
            let mut c = [0i64; MAX_M];
            c[0] = (self.c[0] * other.c[0]).rem_euclid(self.ring.p);
            return Fq {
                ring: self.ring.clone(),
                c,
            };
        }
        let c = self.ring.mul_coords(&self.c, &other.c, self.ring.p as i128);
        Fq {
            ring: self.ring.clone(),
            c,
        }
    }
    fn neg(&self) -> Self {
        let mut c = [0i64; MAX_M];
        for i in 0..self.ring.m {
            c[i] = (-self.c[i]).rem_euclid(self.ring.p);
        }
        Fq {
            ring: self.ring.clone(),
            c,
        }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

impl_ring_ops!(Fq);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}
impl Eq for Fq {}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<BigInt> = self.coords().iter().map(|&x| BigInt::from(x)).collect();
        fmt_coords(&coords, f)
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---- small F_p[x] toolkit for choosing and checking minimal polynomials ----

fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn fp_reduce(f: &[i64], p: i64) -> Vec<i64> {
    let mut v: Vec<i64> = f.iter().map(|c| c.rem_euclid(p)).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_degree(f: &[i64]) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

fn fp_inv(a: i64, p: i64) -> i64 {
    let mut r = 1i64;
    let mut b = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[i64], b: &[i64], p: i64) -> Vec<i64> {
    let mut r = fp_reduce(a, p);
    let db = b.len() - 1;
    let inv = fp_inv(b[db], p);
    while r.len() > db {
        let k = r.len() - 1;
        let coef = r[k] * inv % p;
        for j in 0..=db {
            r[k - db + j] = (r[k - db + j] - coef * b[j]).rem_euclid(p);
        }
        r = fp_reduce(&r, p);
    }
    r
}

fn fp_mulmod(a: &[i64], b: &[i64], f: &[i64], p: i64) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y).rem_euclid(p);
        }
    }
    fp_rem(&out, f, p)
}

fn fp_powmod(base: &[i64], mut e: u128, f: &[i64], p: i64) -> Vec<i64> {
    let mut acc = vec![1i64];
    let mut b = fp_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, f, p);
        }
        b = fp_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn fp_sub(a: &[i64], b: &[i64], p: i64) -> Vec<i64> {
    let n = a.len().max(b.len());
    let v: Vec<i64> = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) - b.get(i).copied().unwrap_or(0))
        .collect();
    fp_reduce(&v, p)
}

fn fp_gcd(a: &[i64], b: &[i64], p: i64) -> Vec<i64> {
    let mut a = fp_reduce(a, p);
    let mut b = fp_reduce(b, p);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_derivative(f: &[i64], p: i64) -> Vec<i64> {
    let v: Vec<i64> = f.iter().enumerate().skip(1).map(|(i, c)| c * i as i64).collect();
    fp_reduce(&v, p)
}

fn fp_is_irreducible(f: &[i64], p: i64) -> bool {
    let n = match fp_degree(f) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    let x = vec![0i64, 1];
    let mut xp = x.clone();
    for i in 1..=n {
        xp = fp_powmod(&xp, p as u128, f, p);
        if i <= n / 2 {
            let g = fp_gcd(f, &fp_sub(&xp, &x, p), p);
            if fp_degree(&g) != Some(0) {
                return false;
            }
        }
    }
    fp_sub(&xp, &x, p).is_empty() || fp_rem(&fp_sub(&xp, &x, p), f, p).is_empty()
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn fp_is_primitive(f: &[i64], p: i64) -> bool {
    let n = f.len() - 1;
    let order = (p as u128).pow(n as u32) - 1;
    let x = vec![0i64, 1];
    prime_factors(order)
        .into_iter()
        .all(|l| fp_powmod(&x, order / l, f, p) != vec![1])
}

/// First monic primitive polynomial of degree m over F_p, scanning the
/// lower coefficients lexicographically (x for m = 1).
fn default_minpoly(p: i64, m: usize) -> Vec<i64> {
    if m == 1 {
        return vec![0, 1];
    }
    let total = (p as u128).pow(m as u32);
    for k in 0..total {
        let mut rest = k;
        let mut f = vec![0i64; m + 1];
        f[m] = 1;
        for i in (0..m).rev() {
            f[i] = (rest % p as u128) as i64;
            rest /= p as u128;
        }
        if f[0] == 0 {
            continue;
        }
        if fp_is_irreducible(&f, p) && fp_is_primitive(&f, p) {
            return f;
        }
    }
    unreachable!("a primitive polynomial always exists")
}

/// Exact p-adic valuation of a big integer, `None` for zero.
pub fn bigint_vp(n: &BigInt, p: i64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = n.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: i64, m: usize) -> Arc<WittRing> {
        WittRing::new(p, m, 8, None).unwrap()
    }

    #[test]
    fn frobenius_is_identity_on_zp() {
        let r = ring(7, 1);
        let x = r.from_int(5);
        assert!(x.frobenius().eq_at_prec(&x));
        assert!(r.zero().frobenius().is_exact_zero());
    }

    #[test]
    fn frobenius_of_generator_is_other_root() {
        let r = ring(7, 2);
        let w = r.omega();
        let s = w.frobenius();
        // h(σ(ω)) = 0 at full precision, σ(ω) ≡ ω^7 mod p, σ(ω) ≠ ω
        let h = r.minpoly().to_vec();
        let mut acc = r.zero();
        for c in h.iter().rev() {
            acc = acc.mul(&s).add(&r.from_int(*c as i128));
        }
        assert!(acc.is_zero());
        assert_eq!(acc.abs_prec(), 8);
        assert_eq!(s.reduce().unwrap(), w.pow(7).reduce().unwrap());
        assert!(!s.eq_at_prec(&w));
        assert!(s.frobenius().eq_at_prec(&w));
    }

    #[test]
    fn division_by_p_lowers_absolute_precision() {
        let r = ring(7, 1);
        let x = r.from_bigint(&BigInt::from(14), 6);
        let y = x.div_p_pow(1);
        assert_eq!(y.abs_prec(), 5);
        assert!(y.eq_at_prec(&r.from_int(2)));
    }

    #[test]
    fn relative_precision_of_sums() {
        let r = ring(7, 1);
        let a = r.from_bigint(&BigInt::from(1), 5);
        let b = r.from_bigint(&BigInt::from(-1 + 7 * 7 * 7), 6);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(3));
        assert_eq!(s.abs_prec(), 5);
    }

    #[test]
    fn inverse_round_trip() {
        let r = ring(13, 3);
        let x = r.from_coords(&[3, 5, 11], 8).mul_p_pow(2);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).eq_at_prec(&r.one()));
        assert_eq!(y.valuation(), Some(-2));
    }

    #[test]
    fn teichmuller_is_fixed_by_q_power() {
        let r = ring(7, 2);
        let g = r.fq_generator();
        let t = r.teichmuller(&g);
        assert!(t.pow(49).eq_at_prec(&t));
        assert_eq!(t.reduce().unwrap(), g);
        assert!(!t.reduce().unwrap().in_prime_field());
    }

    #[test]
    fn default_polynomial_is_primitive() {
        let r = ring(7, 2);
        let g = r.fq_generator();
        let mut x = g.clone();
        let mut order = 1;
        while !x.eq_at_prec(&g.one_like()) {
            x = x.mul(&g);
            order += 1;
        }
        assert_eq!(order, 48);
    }

    #[test]
    fn rejects_reducible_polynomial() {
        assert!(WittRing::new(7, 2, 6, Some(vec![-1, 0, 1])).is_err());
        assert!(WittRing::new(9, 1, 6, None).is_err());
    }
}
