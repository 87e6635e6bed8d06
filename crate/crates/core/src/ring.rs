//! Commutative ring abstraction shared by the coefficient rings, plus dense
//! univariate polynomials and division-free determinants over any of them.

use std::fmt;

pub trait Ring: Clone + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_int_like(&self, n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// True when the element vanishes at the precision it carries.
    fn is_zero(&self) -> bool;
    /// True only for a structurally exact zero. Defaults to `is_zero` for
    /// rings without precision.
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn eq_at_prec(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
    fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Operator sugar on references and values, forwarding to [`Ring`].
#[macro_export]
macro_rules! impl_ring_ops {
    ($t:ty) => {
        impl<'a> ::std::ops::Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, o: &'a $t) -> $t {
                $crate::ring::Ring::add(self, o)
            }
        }
        impl<'a> ::std::ops::Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, o: &'a $t) -> $t {
                $crate::ring::Ring::sub(self, o)
            }
        }
        impl<'a> ::std::ops::Mul<&'a $t> for &'a $t {
            type Output = $t;
            fn mul(self, o: &'a $t) -> $t {
                $crate::ring::Ring::mul(self, o)
            }
        }
        impl<'a> ::std::ops::Neg for &'a $t {
            type Output = $t;
            fn neg(self) -> $t {
                $crate::ring::Ring::neg(self)
            }
        }
        impl ::std::ops::Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $crate::ring::Ring::add(&self, &o)
            }
        }
        impl ::std::ops::Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                $crate::ring::Ring::sub(&self, &o)
            }
        }
        impl ::std::ops::Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                $crate::ring::Ring::mul(&self, &o)
            }
        }
        impl ::std::ops::Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $crate::ring::Ring::neg(&self)
            }
        }
    };
}

/// Dense polynomial with coefficients in `R`, lowest degree first.
#[derive(Clone, Debug)]
pub struct Poly<R: Ring> {
    coeffs: Vec<R>,
    zero: R,
}

impl<R: Ring> Poly<R> {
    pub fn new(coeffs: Vec<R>, proto: &R) -> Self {
        let mut p = Poly {
            coeffs,
            zero: proto.zero_like(),
        };
        p.trim();
        p
    }

    pub fn zero(proto: &R) -> Self {
        Poly {
            coeffs: Vec::new(),
            zero: proto.zero_like(),
        }
    }

    pub fn constant(c: R) -> Self {
        let zero = c.zero_like();
        Poly::new(vec![c], &zero)
    }

    pub fn monomial(c: R, k: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero.clone(); k];
        coeffs.push(c);
        Poly::new(coeffs, &zero)
    }

    /// The variable itself.
    pub fn var(proto: &R) -> Self {
        Poly::monomial(proto.one_like(), 1)
    }

    pub fn proto(&self) -> &R {
        &self.zero
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Coefficient of `u^i`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> R {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    /// Number of stored coefficients (one more than the degree bound).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drops trailing coefficients that are exactly zero.
    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Poly::new(self.coeffs.iter().map(f).collect(), &self.zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![self.zero.clone(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs, &self.zero)
    }

    /// Exact division by `u^k`, dropping the low coefficients.
    pub fn unshift(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect(), &self.zero)
    }

    /// Reduction modulo `u^n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect(), &self.zero)
    }

    /// Coefficient vector padded or cut to exactly `n` entries.
    pub fn padded(&self, n: usize) -> Vec<R> {
        (0..n).map(|i| self.coeff(i)).collect()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&c.from_int_like(i as i64)))
            .collect();
        Poly::new(coeffs, &self.zero)
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Evaluation at a polynomial argument, reduced by `reduce` after every
    /// Horner step.
    pub fn compose_with(&self, x: &Poly<R>, reduce: impl Fn(&Poly<R>) -> Poly<R>) -> Poly<R> {
        let mut acc = Poly::zero(&self.zero);
        for c in self.coeffs.iter().rev() {
            acc = reduce(&acc.mul(x).add(&Poly::constant(c.clone())));
        }
        acc
    }

    /// Euclidean division by a monic polynomial: returns `(q, r)` with
    /// `self = q * m + r` and `r` of length below `m.len() - 1`.
    pub fn divrem_monic(&self, m: &Poly<R>) -> (Poly<R>, Poly<R>) {
        let dm = m.len() - 1;
        if self.coeffs.len() <= dm {
            return (Poly::zero(&self.zero), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quo = vec![self.zero.clone(); rem.len() - dm];
        for k in (dm..rem.len()).rev() {
            let lead = rem[k].clone();
            if lead.is_exact_zero() {
                continue;
            }
            quo[k - dm] = lead.clone();
            for (j, mc) in m.coeffs.iter().enumerate().take(dm) {
                let idx = k - dm + j;
                rem[idx] = rem[idx].sub(&lead.mul(mc));
            }
            rem[k] = self.zero.clone();
        }
        rem.truncate(dm);
        (Poly::new(quo, &self.zero), Poly::new(rem, &self.zero))
    }

    pub fn rem_monic(&self, m: &Poly<R>) -> Poly<R> {
        self.divrem_monic(m).1
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero_like(&self) -> Self {
        Poly::zero(&self.zero)
    }
    fn one_like(&self) -> Self {
        Poly::constant(self.zero.one_like())
    }
    fn from_int_like(&self, n: i64) -> Self {
        Poly::constant(self.zero.from_int_like(n))
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(coeffs, &self.zero)
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero(&self.zero);
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out, &self.zero)
    }
    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Ring> std::ops::Add<&Poly<R>> for &Poly<R> {
    type Output = Poly<R>;
    fn add(self, o: &Poly<R>) -> Poly<R> {
        Ring::add(self, o)
    }
}
impl<R: Ring> std::ops::Sub<&Poly<R>> for &Poly<R> {
    type Output = Poly<R>;
    fn sub(self, o: &Poly<R>) -> Poly<R> {
        Ring::sub(self, o)
    }
}
impl<R: Ring> std::ops::Mul<&Poly<R>> for &Poly<R> {
    type Output = Poly<R>;
    fn mul(self, o: &Poly<R>) -> Poly<R> {
        Ring::mul(self, o)
    }
}

/// Square matrix helpers over a ring, rows of entries.
pub type Matrix<R> = Vec<Vec<R>>;

/// Characteristic polynomial `det(X·I − A)` by Berkowitz's division-free
/// algorithm. Returns coefficients lowest degree first (monic, length n+1).
pub fn charpoly<R: Ring>(a: &Matrix<R>, proto: &R) -> Vec<R> {
    let n = a.len();
    let one = proto.one_like();
    let mut v = vec![one.clone()];
    for r in 0..n {
        let mut t = Vec::with_capacity(r + 2);
        t.push(one.clone());
        t.push(a[r][r].neg());
        let mut w: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 2..r + 2 {
            let mut dot = proto.zero_like();
            for j in 0..r {
                dot = dot.add(&a[r][j].mul(&w[j]));
            }
            t.push(dot.neg());
            w = (0..r)
                .map(|i| {
                    let mut s = proto.zero_like();
                    for j in 0..r {
                        s = s.add(&a[i][j].mul(&w[j]));
                    }
                    s
                })
                .collect();
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut s = proto.zero_like();
            for j in 0..=i.min(r) {
                s = s.add(&t[i - j].mul(&v[j]));
            }
            next.push(s);
        }
        v = next;
    }
    v.reverse();
    v
}

pub fn det<R: Ring>(a: &Matrix<R>, proto: &R) -> R {
    let n = a.len();
    let cp = charpoly(a, proto);
    if n % 2 == 0 {
        cp[0].clone()
    } else {
        cp[0].neg()
    }
}

pub fn submatrix<R: Ring>(a: &Matrix<R>, rows: &[usize], cols: &[usize]) -> Matrix<R> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul<R: Ring>(a: &Matrix<R>, b: &Matrix<R>, proto: &R) -> Matrix<R> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = proto.zero_like();
                    for k in 0..inner {
                        s = s.add(&row[k].mul(&b[k][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn transpose<R: Ring>(a: &Matrix<R>) -> Matrix<R> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug, PartialEq)]
    struct Z(i64);
    impl Ring for Z {
        fn zero_like(&self) -> Self {
            Z(0)
        }
        fn one_like(&self) -> Self {
            Z(1)
        }
        fn from_int_like(&self, n: i64) -> Self {
            Z(n)
        }
        fn add(&self, o: &Self) -> Self {
            Z(self.0 + o.0)
        }
        fn sub(&self, o: &Self) -> Self {
            Z(self.0 - o.0)
        }
        fn mul(&self, o: &Self) -> Self {
            Z(self.0 * o.0)
        }
        fn neg(&self) -> Self {
            Z(-self.0)
        }
        fn is_zero(&self) -> bool {
            self.0 == 0
        }
    }

    fn m(rows: &[&[i64]]) -> Matrix<Z> {
        rows.iter().map(|r| r.iter().map(|&x| Z(x)).collect()).collect()
    }

    fn leibniz(a: &[Vec<i64>]) -> i64 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[0][j] * leibniz(&minor)
            })
            .sum()
    }

    #[test]
    fn charpoly_of_companion_recovers_polynomial() {
        // companion of x^3 - 2x^2 + 3x - 5
        let a = m(&[&[0, 0, 5], &[1, 0, -3], &[0, 1, 2]]);
        let cp = charpoly(&a, &Z(0));
        assert_eq!(cp, vec![Z(-5), Z(3), Z(-2), Z(1)]);
    }

    #[test]
    fn det_agrees_with_cofactor_expansion() {
        let rows = vec![
            vec![2, -1, 3, 4],
            vec![0, 5, -2, 1],
            vec![7, 1, 1, -3],
            vec![1, 2, 0, 6],
        ];
        let a: Matrix<Z> = rows.iter().map(|r| r.iter().map(|&x| Z(x)).collect()).collect();
        assert_eq!(det(&a, &Z(0)), Z(leibniz(&rows)));
        assert_eq!(det(&Vec::<Vec<Z>>::new(), &Z(0)), Z(1));
    }

    #[test]
    fn monic_division_round_trips() {
        let f = Poly::new(vec![Z(3), Z(0), Z(-2), Z(5), Z(1)], &Z(0));
        let g = Poly::new(vec![Z(-7), Z(0), Z(1)], &Z(0));
        let (q, r) = f.divrem_monic(&g);
        assert!(r.len() <= 2);
        let back = q.mul(&g).add(&r);
        assert!(back.sub(&f).is_zero());
    }
}
