//! Elementary-divisor exponents over the quotients A/𝔭^N of a principal
//! ring, adapted bases, and Hodge weights read from them.

use std::sync::Arc;

use itertools::Itertools;

use crate::arith::{Fq, RingConfig, STrunc, TildePoly, Witt, WittRing};
use crate::error::{precision, Error, Result};
use crate::polygons::{q, qi, Q};
use crate::ring::{det, submatrix, Matrix, Poly, Ring};

/// A quotient A/𝔭^N together with the untruncated ring used for lifts.
pub trait Carrier {
    type Elem: Ring;
    type Lift: Ring;

    fn name(&self) -> &'static str;
    /// The exponent N.
    fn cap(&self) -> u32;
    /// 𝔭-adic valuation in the quotient, N for zero.
    fn val(&self, x: &Self::Elem) -> Result<u32>;
    /// Exact quotient by 𝔭^k; requires `val(x) ≥ k`.
    fn div_prime_pow(&self, x: &Self::Elem, k: u32) -> Result<Self::Elem>;
    fn prime_pow(&self, k: u32) -> Self::Elem;
    fn unit_inv(&self, x: &Self::Elem) -> Result<Self::Elem>;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn lift(&self, x: &Self::Elem) -> Self::Lift;
    fn lift_zero(&self) -> Self::Lift;
    /// 𝔭-adic valuation of a lift, capped at `cap`.
    fn lift_val(&self, x: &Self::Lift, cap: u32) -> Result<u32>;
}

/// W/p^N with 𝔭 = p.
#[derive(Clone)]
pub struct WittCarrier {
    ring: Arc<WittRing>,
    n: u32,
}

impl WittCarrier {
    pub fn new(ring: &Arc<WittRing>, n: u32) -> Self {
        WittCarrier {
            ring: ring.clone(),
            n,
        }
    }

    fn cap_val(&self, x: &Witt) -> Result<u32> {
        match x.valuation() {
            Some(v) if v < 0 => Err(Error::Invalid("non-integral entry".into())),
            Some(v) => Ok((v as u32).min(self.n)),
            None if x.abs_prec() >= self.n as i32 => Ok(self.n),
            None => Err(precision("p-adic valuation", "entry vanishes below the modulus")),
        }
    }
}

impl Carrier for WittCarrier {
    type Elem = Witt;
    type Lift = Witt;

    fn name(&self) -> &'static str {
        "W"
    }
    fn cap(&self) -> u32 {
        self.n
    }
    fn val(&self, x: &Witt) -> Result<u32> {
        self.cap_val(x)
    }
    fn div_prime_pow(&self, x: &Witt, k: u32) -> Result<Witt> {
        Ok(x.div_p_pow(k as i32))
    }
    fn prime_pow(&self, k: u32) -> Witt {
        self.ring.from_int(1).mul_p_pow(k as i32)
    }
    fn unit_inv(&self, x: &Witt) -> Result<Witt> {
        x.inv()
    }
    fn zero(&self) -> Witt {
        self.ring.zero()
    }
    fn one(&self) -> Witt {
        self.ring.one()
    }
    fn lift(&self, x: &Witt) -> Witt {
        x.clone()
    }
    fn lift_zero(&self) -> Witt {
        self.ring.zero()
    }
    fn lift_val(&self, x: &Witt, cap: u32) -> Result<u32> {
        match x.valuation() {
            Some(v) if v < 0 => Err(Error::Invalid("non-integral entry".into())),
            Some(v) => Ok((v as u32).min(cap)),
            None if x.abs_prec() >= cap as i32 => Ok(cap),
            None => Err(precision("p-adic valuation", "minor vanishes below the requested bound")),
        }
    }
}

/// k[u]/u^(ep) with 𝔭 = u.
#[derive(Clone)]
pub struct TildeCarrier {
    ctx: Arc<RingConfig>,
}

impl TildeCarrier {
    pub fn new(ctx: &Arc<RingConfig>) -> Self {
        TildeCarrier { ctx: ctx.clone() }
    }
}

impl Carrier for TildeCarrier {
    type Elem = TildePoly;
    type Lift = Poly<Fq>;

    fn name(&self) -> &'static str {
        "k[u]/u^ep"
    }
    fn cap(&self) -> u32 {
        self.ctx.ep() as u32
    }
    fn val(&self, x: &TildePoly) -> Result<u32> {
        Ok(x.val_u() as u32)
    }
    fn div_prime_pow(&self, x: &TildePoly, k: u32) -> Result<TildePoly> {
        x.unshift(k as usize)
    }
    fn prime_pow(&self, k: u32) -> TildePoly {
        TildePoly::u_pow(&self.ctx, k as usize)
    }
    fn unit_inv(&self, x: &TildePoly) -> Result<TildePoly> {
        x.inv()
    }
    fn zero(&self) -> TildePoly {
        TildePoly::zero(&self.ctx)
    }
    fn one(&self) -> TildePoly {
        TildePoly::from_int(&self.ctx, 1)
    }
    fn lift(&self, x: &TildePoly) -> Poly<Fq> {
        Poly::new(x.coeffs().to_vec(), &self.ctx.witt().fq_zero())
    }
    fn lift_zero(&self) -> Poly<Fq> {
        Poly::zero(&self.ctx.witt().fq_zero())
    }
    fn lift_val(&self, x: &Poly<Fq>, cap: u32) -> Result<u32> {
        let v = x.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX);
        Ok(v.min(cap as usize) as u32)
    }
}

/// K0[u]/E(u)^p with 𝔭 = E(u); entries are represented by polynomials with
/// p-adically integral coefficients.
#[derive(Clone)]
pub struct EisensteinCarrier {
    ctx: Arc<RingConfig>,
}

impl EisensteinCarrier {
    pub fn new(ctx: &Arc<RingConfig>) -> Self {
        EisensteinCarrier { ctx: ctx.clone() }
    }
}

impl Carrier for EisensteinCarrier {
    type Elem = STrunc;
    type Lift = Poly<Witt>;

    fn name(&self) -> &'static str {
        "K0[u]/E^p"
    }
    fn cap(&self) -> u32 {
        self.ctx.p() as u32
    }
    fn val(&self, x: &STrunc) -> Result<u32> {
        x.val_e()
    }
    fn div_prime_pow(&self, x: &STrunc, k: u32) -> Result<STrunc> {
        let (quo, rem) = x.poly().divrem_monic(self.ctx.eisenstein_pow(k as usize));
        if !rem.is_zero() {
            return Err(Error::Invalid(format!("not divisible by E(u)^{k}")));
        }
        Ok(STrunc::from_poly(&self.ctx, &quo))
    }
    fn prime_pow(&self, k: u32) -> STrunc {
        STrunc::from_poly(&self.ctx, self.ctx.eisenstein_pow(k as usize))
    }
    fn unit_inv(&self, x: &STrunc) -> Result<STrunc> {
        let y0 = x.f_pi().inv()?;
        let mut y = STrunc::from_poly(&self.ctx, y0.poly());
        let two = STrunc::from_int(&self.ctx, 2);
        let mut order = 1;
        while order < self.ctx.p() {
            y = y.mul(&two.sub(&x.mul(&y)));
            order *= 2;
        }
        Ok(y)
    }
    fn zero(&self) -> STrunc {
        STrunc::from_int(&self.ctx, 0)
    }
    fn one(&self) -> STrunc {
        STrunc::from_int(&self.ctx, 1)
    }
    fn lift(&self, x: &STrunc) -> Poly<Witt> {
        x.poly().clone()
    }
    fn lift_zero(&self) -> Poly<Witt> {
        Poly::zero(&self.ctx.zero_w())
    }
    fn lift_val(&self, x: &Poly<Witt>, cap: u32) -> Result<u32> {
        let mut cur = x.clone();
        for i in 0..cap {
            if cur.is_zero() {
                return Ok(cap);
            }
            let (quo, rem) = cur.divrem_monic(self.ctx.eisenstein());
            if !rem.is_zero() {
                return Ok(i);
            }
            cur = quo;
        }
        Ok(cap)
    }
}

/// Basis of the ambient module (columns) with its exponents.
#[derive(Clone, Debug)]
pub struct AdaptedBasis<E: Ring> {
    pub basis: Matrix<E>,
    pub exponents: Vec<u32>,
}

/// Exponents n_1 ≤ … ≤ n_d by minor enumeration on lifts. With m_j the
/// least 𝔭-valuation of a j×j minor of the lifted generators, the module
/// they span together with 𝔭^N has n_1 + … + n_k = min_s (s·N + m_(k−s)).
/// Limited to d ≤ 4.
pub fn exponents_by_minors<C: Carrier>(carrier: &C, gens: &Matrix<C::Elem>) -> Result<Vec<u32>> {
    let d = gens.len();
    if d > 4 {
        return Err(Error::Unsupported(format!("minor enumeration needs d ≤ 4, got {d}")));
    }
    let cols = gens.first().map_or(0, |r| r.len());
    if cols < d {
        return Err(Error::Invalid("fewer generators than the rank".into()));
    }
    let lifted: Matrix<C::Lift> = gens
        .iter()
        .map(|row| row.iter().map(|x| carrier.lift(x)).collect())
        .collect();
    let proto = carrier.lift_zero();
    let n = carrier.cap();
    let mut least = vec![0u32];
    for j in 1..=d {
        let bound = n * j as u32;
        let mut best = bound;
        for rows in (0..d).combinations(j) {
            for cs in (0..cols).combinations(j) {
                let minor = det(&submatrix(&lifted, &rows, &cs), &proto);
                best = best.min(carrier.lift_val(&minor, bound)?);
            }
        }
        least.push(best);
    }
    let sums: Vec<u32> = (0..=d)
        .map(|k| (0..=k).map(|s| s as u32 * n + least[k - s]).min().unwrap_or(0))
        .collect();
    Ok(sums.windows(2).map(|w| w[1].saturating_sub(w[0])).collect())
}

struct Reduction<E> {
    exponents: Vec<u32>,
    basis: Matrix<E>,
}

/// Fraction-free Smith reduction. Pivots are taken by least valuation,
/// leftmost column first; rows of the pivot's column and columns of its row
/// are cleared by `x ← w·x − (b/𝔭^v)·pivot_line` with `w` the pivot's unit
/// part. The inverse row operations are applied to an identity matrix to
/// recover the adapted basis.
fn reduce<C: Carrier>(carrier: &C, gens: &Matrix<C::Elem>, want_basis: bool) -> Result<Reduction<C::Elem>> {
    let d = gens.len();
    let cols = gens.first().map_or(0, |r| r.len());
    let mut a = gens.clone();
    let mut basis: Matrix<C::Elem> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { carrier.one() } else { carrier.zero() })
                .collect()
        })
        .collect();
    let mut vals: Vec<Vec<u32>> = a
        .iter()
        .map(|row| row.iter().map(|x| carrier.val(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut exponents = Vec::with_capacity(d);
    for s in 0..d {
        let mut best: Option<(u32, usize, usize)> = None;
        for j in s..cols {
            for i in s..d {
                if best.is_none_or(|(v, _, _)| vals[i][j] < v) {
                    best = Some((vals[i][j], i, j));
                }
            }
        }
        let (v, pi, pj) = match best {
            Some(b) => b,
            None => {
                exponents.push(carrier.cap());
                continue;
            }
        };
        if v >= carrier.cap() {
            exponents.extend(std::iter::repeat_n(carrier.cap(), d - s));
            break;
        }
        a.swap(s, pi);
        vals.swap(s, pi);
        if want_basis {
            for row in basis.iter_mut() {
                row.swap(s, pi);
            }
        }
        for row in a.iter_mut() {
            row.swap(s, pj);
        }
        for row in vals.iter_mut() {
            row.swap(s, pj);
        }
        let unit = carrier.div_prime_pow(&a[s][s], v)?;
        let unit_inv = if want_basis {
            Some(carrier.unit_inv(&unit)?)
        } else {
            None
        };
        for i in s + 1..d {
            if vals[i][s] >= carrier.cap() {
                continue;
            }
            let factor = carrier.div_prime_pow(&a[i][s], v)?;
            for j in s..cols {
                a[i][j] = unit.mul(&a[i][j]).sub(&factor.mul(&a[s][j]));
            }
            if let Some(winv) = &unit_inv {
                // basis ← basis·R^{-1}, with R = identity except row i
                // (w at (i,i), −factor at (i,s)).
                let coeff = factor.mul(winv);
                for row in basis.iter_mut() {
                    row[s] = row[s].add(&row[i].mul(&coeff));
                    row[i] = row[i].mul(winv);
                }
            }
        }
        for j in s + 1..cols {
            if vals[s][j] >= carrier.cap() {
                continue;
            }
            let factor = carrier.div_prime_pow(&a[s][j], v)?;
            for row in a.iter_mut().skip(s) {
                row[j] = unit.mul(&row[j]).sub(&factor.mul(&row[s]));
            }
        }
        for i in s..d {
            for j in s..cols {
                vals[i][j] = carrier.val(&a[i][j])?;
            }
        }
        exponents.push(v);
    }
    Ok(Reduction { exponents, basis })
}

/// Exponents n_1 ≤ … ≤ n_d of the submodule generated by the columns of
/// `gens` (a d×D matrix), by Smith reduction.
pub fn divisor_exponents<C: Carrier>(carrier: &C, gens: &Matrix<C::Elem>) -> Result<Vec<u32>> {
    let mut e = reduce(carrier, gens, false)?.exponents;
    e.sort();
    Ok(e)
}

/// A basis (e_i) of the ambient module with the submodule generated by the
/// columns of `gens` equal to Σ 𝔭^(n_i) e_i.
pub fn adapted_basis<C: Carrier>(carrier: &C, gens: &Matrix<C::Elem>) -> Result<AdaptedBasis<C::Elem>> {
    let red = reduce(carrier, gens, true)?;
    if red.exponents.iter().any(|&n| n >= carrier.cap()) {
        return Err(Error::Invalid(
            "generators are rank deficient modulo the carrier's modulus".into(),
        ));
    }
    Ok(AdaptedBasis {
        basis: red.basis,
        exponents: red.exponents,
    })
}

/// Generators 𝔭^(n_i) e_i of the submodule described by an adapted basis.
pub fn regenerate<C: Carrier>(carrier: &C, ab: &AdaptedBasis<C::Elem>) -> Matrix<C::Elem> {
    ab.basis
        .iter()
        .map(|row| {
            row.iter()
                .zip(&ab.exponents)
                .map(|(x, &n)| x.mul(&carrier.prime_pow(n)))
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// h_i = r − n_i.
    Integral,
    /// h'_i = r − n'_i/e.
    ModP,
}

pub fn hodge_weights(exponents: &[u32], r: u32, e: u32, mode: WeightMode) -> Result<Vec<Q>> {
    let bound = match mode {
        WeightMode::Integral => r,
        WeightMode::ModP => e * r,
    };
    if let Some(n) = exponents.iter().find(|&&n| n > bound) {
        return Err(Error::Invalid(format!("exponent {n} exceeds {bound}")));
    }
    let mut w: Vec<Q> = exponents
        .iter()
        .map(|&n| match mode {
            WeightMode::Integral => qi(r as i64 - n as i64),
            WeightMode::ModP => qi(r as i64) - q(n as i64, e as i64),
        })
        .collect();
    w.sort();
    Ok(w)
}

/// One instance of the first comparison step: with exponents sorted
/// ascending, e·(sum of the k smallest integral exponents) ≤ (sum of the k
/// smallest mod-p exponents), equality for k = d.
#[derive(Clone, Debug)]
pub struct FirstStepCheck {
    pub k: usize,
    pub lhs: u32,
    pub rhs: u32,
    pub holds: bool,
}

pub fn first_step_checks(integral: &[u32], mod_p: &[u32], e: u32) -> Result<Vec<FirstStepCheck>> {
    if integral.len() != mod_p.len() {
        return Err(Error::WidthMismatch(integral.len(), mod_p.len()));
    }
    let mut a = integral.to_vec();
    let mut b = mod_p.to_vec();
    a.sort();
    b.sort();
    let d = a.len();
    Ok((1..=d)
        .map(|k| {
            let lhs = e * a[..k].iter().sum::<u32>();
            let rhs = b[..k].iter().sum::<u32>();
            let holds = if k == d { lhs == rhs } else { lhs <= rhs };
            FirstStepCheck { k, lhs, rhs, holds }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tilde_ctx() -> Arc<RingConfig> {
        RingConfig::standard(7, 1, 1, 2).unwrap()
    }

    #[test]
    fn identity_has_zero_exponents() {
        let ctx = tilde_ctx();
        let c = TildeCarrier::new(&ctx);
        let id = vec![vec![c.one(), c.zero()], vec![c.zero(), c.one()]];
        assert_eq!(divisor_exponents(&c, &id).unwrap(), vec![0, 0]);
        assert_eq!(exponents_by_minors(&c, &id).unwrap(), vec![0, 0]);
    }

    #[test]
    fn scalar_power_of_u() {
        let ctx = tilde_ctx();
        let c = TildeCarrier::new(&ctx);
        for n in 0..4 {
            let un = c.prime_pow(n);
            let m = vec![vec![un.clone(), c.zero()], vec![c.zero(), un]];
            assert_eq!(divisor_exponents(&c, &m).unwrap(), vec![n, n]);
        }
    }

    #[test]
    fn adapted_basis_of_diagonal() {
        let ctx = RingConfig::standard(7, 1, 2, 2).unwrap();
        let c = EisensteinCarrier::new(&ctx);
        let gens = vec![vec![c.prime_pow(2), c.zero()], vec![c.zero(), c.one()]];
        let ab = adapted_basis(&c, &gens).unwrap();
        let mut ex = ab.exponents.clone();
        ex.sort();
        assert_eq!(ex, vec![0, 2]);
    }

    #[test]
    fn weights_and_first_step() {
        assert_eq!(
            hodge_weights(&[0, 2], 2, 1, WeightMode::Integral).unwrap(),
            vec![qi(0), qi(2)]
        );
        assert_eq!(
            hodge_weights(&[1, 3], 2, 2, WeightMode::ModP).unwrap(),
            vec![q(1, 2), q(3, 2)]
        );
        assert!(hodge_weights(&[5], 2, 2, WeightMode::ModP).is_err());
        let checks = first_step_checks(&[0, 2], &[0, 4], 2).unwrap();
        assert!(checks.iter().all(|c| c.holds));
        let checks = first_step_checks(&[0, 2], &[1, 3], 2).unwrap();
        assert!(checks.iter().all(|c| c.holds));
    }
}
