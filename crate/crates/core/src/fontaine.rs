//! Filtered (φ, N)-modules over K0, their polygons and weak admissibility in
//! dimension ≤ 2, and the passage to S_{K0}-modules for the two-dimensional
//! family D(L).

use std::sync::Arc;

use num_bigint::BigInt;
use itertools::Itertools;
use num_traits::Zero;

use crate::arith::{KElem, RingConfig, STrunc, Witt};
use crate::error::{precision, Error, Result};
use crate::polygons::{newton_polygon, q, qi, Polygon, Q};
use crate::ring::{charpoly, det, mat_mul, Matrix, Poly, Ring};

/// Fil^s D_K equals the span of `basis` for every s in (previous t, t].
#[derive(Clone, Debug)]
pub struct FilStep {
    pub t: i64,
    pub basis: Vec<Vec<KElem>>,
}

#[derive(Clone, Debug)]
pub struct FilteredModule {
    ctx: Arc<RingConfig>,
    dim: usize,
    /// Column j holds φ(e_j); φ is σ-semilinear.
    phi: Matrix<Witt>,
    /// Column j holds N(e_j).
    monodromy: Matrix<Witt>,
    steps: Vec<FilStep>,
}

impl FilteredModule {
    /// Steps must have increasing jumps and strictly decreasing dimensions,
    /// the first one spanning D_K.
    pub fn new(
        ctx: &Arc<RingConfig>,
        phi: Matrix<Witt>,
        monodromy: Matrix<Witt>,
        steps: Vec<FilStep>,
    ) -> Result<FilteredModule> {
        let dim = phi.len();
        let square = |m: &Matrix<Witt>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !square(&phi) || !square(&monodromy) {
            return Err(Error::Invalid("φ and N must be square of the same size".into()));
        }
        if steps.is_empty() || steps[0].basis.len() != dim {
            return Err(Error::Invalid("the first filtration step must span D_K".into()));
        }
        for w in steps.windows(2) {
            if w[1].t <= w[0].t || w[1].basis.len() >= w[0].basis.len() {
                return Err(Error::Invalid("filtration steps must increase in t and drop in dimension".into()));
            }
        }
        if steps.iter().any(|s| s.basis.iter().any(|v| v.len() != dim)) {
            return Err(Error::Invalid("filtration vectors have the wrong length".into()));
        }
        let zero = ctx.zero_w();
        if det(&phi, &zero).is_zero() {
            return Err(Error::Invalid("φ is not injective".into()));
        }
        // N φ = p φ N, i.e. N·A = p·A·σ(N) on matrices.
        let sigma_n: Matrix<Witt> = monodromy
            .iter()
            .map(|r| r.iter().map(|x| x.frobenius()).collect())
            .collect();
        let lhs = mat_mul(&monodromy, &phi, &zero);
        let rhs = mat_mul(&phi, &sigma_n, &zero);
        for i in 0..dim {
            for j in 0..dim {
                if !lhs[i][j].eq_at_prec(&rhs[i][j].mul_p_pow(1)) {
                    return Err(Error::Invalid("N φ ≠ p φ N".into()));
                }
            }
        }
        Ok(FilteredModule {
            ctx: ctx.clone(),
            dim,
            phi,
            monodromy,
            steps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }
    pub fn phi(&self) -> &Matrix<Witt> {
        &self.phi
    }
    pub fn monodromy(&self) -> &Matrix<Witt> {
        &self.monodromy
    }
    pub fn steps(&self) -> &[FilStep] {
        &self.steps
    }

    pub fn hodge_polygon(&self) -> Polygon {
        let mut slopes = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let next = self.steps.get(i + 1).map_or(0, |n| n.basis.len());
            for _ in 0..s.basis.len() - next {
                slopes.push(qi(s.t));
            }
        }
        Polygon::from_slopes(slopes)
    }

    /// Matrix of the K0-linear map φ^m.
    pub fn linearized_phi(&self) -> Matrix<Witt> {
        let zero = self.ctx.zero_w();
        let mut acc = self.phi.clone();
        let mut twist = self.phi.clone();
        for _ in 1..self.ctx.m() {
            twist = twist
                .iter()
                .map(|r| r.iter().map(|x| x.frobenius()).collect())
                .collect();
            acc = mat_mul(&acc, &twist, &zero);
        }
        acc
    }

    /// Frobenius slopes: Newton polygon of the characteristic polynomial of
    /// φ^m, divided by m.
    pub fn newton_polygon(&self) -> Result<Polygon> {
        let cp = charpoly(&self.linearized_phi(), &self.ctx.zero_w());
        let vals: Vec<Option<Q>> = cp
            .iter()
            .map(|c| c.valuation().map(|v| qi(v as i64)))
            .collect();
        let np = newton_polygon(&vals)?;
        Ok(np.scaled(&q(1, self.ctx.m() as i64)))
    }

    /// (t_H, t_N): sums of the Hodge and Newton slopes.
    pub fn t_numbers(&self) -> Result<(Q, Q)> {
        let h = self.hodge_polygon();
        let n = self.newton_polygon()?;
        Ok((h.endpoint().1, n.endpoint().1))
    }

    fn step_for(&self, s: i64) -> Option<&FilStep> {
        self.steps.iter().find(|st| st.t >= s)
    }

    /// Whether `v` lies in Fil^s D_K.
    pub fn fil_contains(&self, s: i64, v: &[KElem]) -> bool {
        match self.step_for(s) {
            None => v.iter().all(|x| x.is_zero()),
            Some(step) => in_span(&step.basis, v),
        }
    }

    /// Largest t with v ∈ Fil^t D_K (for nonzero v).
    pub fn hodge_level(&self, v: &[KElem]) -> i64 {
        let mut best = self.steps[0].t;
        for st in &self.steps {
            if in_span(&st.basis, v) {
                best = st.t;
            }
        }
        best
    }

    /// Membership of x = Σ x_j e_j ∈ S_{K0} ⊗ D in Fil^t, through
    /// f_π(N^i x) ∈ Fil^(t−i) D_K for all i ≥ 0.
    pub fn breuil_fil_contains(&self, x: &[STrunc], t: i64) -> bool {
        let floor = self.steps[0].t;
        let mut y = x.to_vec();
        let mut i = 0;
        while t - i > floor {
            let image: Vec<KElem> = y.iter().map(|c| c.f_pi()).collect();
            if !self.fil_contains(t - i, &image) {
                return false;
            }
            y = self.breuil_monodromy(&y);
            i += 1;
        }
        true
    }

    /// N on S_{K0} ⊗ D: N_S on coordinates plus N_D on the basis.
    pub fn breuil_monodromy(&self, x: &[STrunc]) -> Vec<STrunc> {
        (0..self.dim)
            .map(|i| {
                let mut acc = x[i].monodromy();
                for j in 0..self.dim {
                    let n = &self.monodromy[i][j];
                    if !n.is_exact_zero() {
                        acc = acc.add(&x[j].scale(n));
                    }
                }
                acc
            })
            .collect()
    }

    /// Weak admissibility in dimension ≤ 2. For m > 1 only the diagonal
    /// shape φ = diag(p^a, p^b), N = 0 is handled.
    pub fn weakly_admissible(&self) -> Result<bool> {
        let (th, tn) = self.t_numbers()?;
        if th != tn {
            return Ok(false);
        }
        match self.dim {
            1 => Ok(true),
            2 => {
                for (line, slope) in self.stable_lines()? {
                    let h = qi(self.hodge_level(&line));
                    if h > slope {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            d => Err(Error::Unsupported(format!("weak admissibility in dimension {d}"))),
        }
    }

    /// (φ, N)-stable K0-lines with the Newton slope of each; a whole
    /// family of lines is represented by its best candidate for the
    /// Hodge level.
    fn stable_lines(&self) -> Result<Vec<(Vec<KElem>, Q)>> {
        let ctx = &self.ctx;
        let a = &self.phi;
        let zero = ctx.zero_w();
        let n_zero = self.monodromy.iter().flatten().all(|x| x.is_zero());
        let to_k = |v: &[Witt]| -> Vec<KElem> { v.iter().map(|x| KElem::from_witt(ctx, x.clone())).collect() };
        let n_stable = |v: &[Witt]| -> bool {
            let nv: Vec<Witt> = (0..2)
                .map(|i| self.monodromy[i][0].mul(&v[0]).add(&self.monodromy[i][1].mul(&v[1])))
                .collect();
            v[0].mul(&nv[1]).sub(&v[1].mul(&nv[0])).is_zero()
        };
        let off_diag_zero = a[0][1].is_zero() && a[1][0].is_zero();
        let mut out = Vec::new();
        if ctx.m() > 1 {
            let pure = |x: &Witt| -> Option<i32> {
                let v = x.valuation()?;
                x.eq_at_prec(&ctx.witt().one().mul_p_pow(v)).then_some(v)
            };
            let (v1, v2) = match (pure(&a[0][0]), pure(&a[1][1])) {
                (Some(v1), Some(v2)) if off_diag_zero && n_zero => (v1, v2),
                _ => {
                    return Err(Error::Unsupported(
                        "weak admissibility for m > 1 needs φ = diag(p^a, p^b) and N = 0".into(),
                    ))
                }
            };
            out.push((to_k(&[ctx.w_int(1), zero.clone()]), qi(v1 as i64)));
            out.push((to_k(&[zero.clone(), ctx.w_int(1)]), qi(v2 as i64)));
            if v1 == v2 {
                // every Q_p-rational line is stable
                if let Some(line) = self.rational_line_in_top_step(true) {
                    out.push((line, qi(v1 as i64)));
                }
            }
            return Ok(out);
        }
        let tr = a[0][0].add(&a[1][1]);
        let dt = det(a, &zero);
        let disc = tr.mul(&tr).sub(&dt.mul(&ctx.w_int(4)));
        let half = ctx.witt().from_ratio(1, 2)?;
        let mut eigen: Vec<Witt> = Vec::new();
        if disc.is_zero() {
            let lambda = tr.mul(&half);
            let scalar = off_diag_zero && a[0][0].sub(&lambda).is_zero() && a[1][1].sub(&lambda).is_zero();
            let slope = val_q(&lambda)?;
            if scalar {
                if n_zero {
                    out.push((to_k(&[ctx.w_int(1), zero.clone()]), slope.clone()));
                    if let Some(line) = self.rational_line_in_top_step(false) {
                        out.push((line, slope));
                    }
                } else {
                    let kernel = kernel_vector(&self.monodromy, &zero)?;
                    out.push((to_k(&kernel), slope));
                }
                return Ok(out);
            }
            eigen.push(lambda);
        } else if let Some(root) = witt_sqrt(&disc)? {
            eigen.push(tr.add(&root).mul(&half));
            eigen.push(tr.sub(&root).mul(&half));
        }
        for lambda in eigen {
            let shifted: Matrix<Witt> = (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| if i == j { a[i][j].sub(&lambda) } else { a[i][j].clone() })
                        .collect()
                })
                .collect();
            let v = kernel_vector(&shifted, &zero)?;
            if n_stable(&v) {
                out.push((to_k(&v), val_q(&lambda)?));
            }
        }
        Ok(out)
    }

    /// A K0-rational (or Q_p-rational when `qp_only`) line inside the
    /// highest one-dimensional filtration step, if there is one.
    fn rational_line_in_top_step(&self, qp_only: bool) -> Option<Vec<KElem>> {
        let step = self.steps.iter().rev().find(|s| s.basis.len() == 1)?;
        let v = &step.basis[0];
        let (num, den) = (&v[0], &v[1]);
        let ctx = &self.ctx;
        let one = KElem::from_int(ctx, 1);
        let zero = KElem::from_int(ctx, 0);
        if den.is_zero() {
            return Some(vec![one, zero]);
        }
        let ratio = num.div(den).ok()?;
        let degree_zero = (1..ctx.e()).all(|i| ratio.coeff(i).is_zero());
        if !degree_zero {
            return None;
        }
        let c = ratio.coeff(0);
        if qp_only && !c.frobenius().eq_at_prec(&c) {
            return None;
        }
        Some(vec![KElem::from_witt(ctx, c), one])
    }
}

fn val_q(x: &Witt) -> Result<Q> {
    x.valuation()
        .map(|v| qi(v as i64))
        .ok_or_else(|| precision("eigenvalue valuation", "eigenvalue vanishes at working precision"))
}

/// Nonzero vector in the kernel of a singular 2×2 matrix, read from the row
/// of least valuation.
fn kernel_vector(m: &Matrix<Witt>, zero: &Witt) -> Result<Vec<Witt>> {
    let row_val = |r: &Vec<Witt>| r.iter().filter_map(|x| x.valuation()).min();
    let pick = [&m[0], &m[1]]
        .into_iter()
        .filter(|r| row_val(r).is_some())
        .min_by_key(|r| row_val(r).unwrap());
    match pick {
        Some(r) => Ok(vec![r[1].clone(), r[0].neg()]),
        None => Ok(vec![zero.one_like(), zero.clone()]),
    }
}

/// Square root in Q_p (m = 1), `None` when none exists.
fn witt_sqrt(x: &Witt) -> Result<Option<Witt>> {
    let v = match x.valuation() {
        None => return Ok(Some(x.clone())),
        Some(v) => v,
    };
    if v % 2 != 0 {
        return Ok(None);
    }
    let ring = x.ring();
    let unit = x.div_p_pow(v);
    let ubar = unit.reduce()?;
    let p = ring.p();
    let root = (1..p).find(|s| ring.fq_from_int(*s).mul(&ring.fq_from_int(*s)) == ubar);
    let s0 = match root {
        Some(s) => s,
        None => return Ok(None),
    };
    let half = ring.from_ratio(1, 2)?;
    let mut s = ring.from_int(s0 as i128).with_abs(unit.abs_prec());
    for _ in 0..=ring.cap() {
        s = s.add(&unit.div(&s)?).mul(&half);
    }
    Ok(Some(s.mul_p_pow(v / 2)))
}

/// v ∈ span(basis) over K, through vanishing of the maximal minors of
/// [basis | v].
fn in_span(basis: &[Vec<KElem>], v: &[KElem]) -> bool {
    let d = v.len();
    let k = basis.len();
    if k >= d {
        return true;
    }
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if k == 0 {
        return false;
    }
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    let proto = v[0].zero_like();
    (0..d).combinations(k + 1).all(|rows| {
        let m: Matrix<KElem> = rows
            .iter()
            .map(|&i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        det(&m, &proto).is_zero()
    })
}

/// T_π(P) = (P(π), P'(π), …, P^(r−1)(π)).
pub fn t_pi(ctx: &Arc<RingConfig>, poly: &Poly<Witt>, r: usize) -> Vec<KElem> {
    let mut out = Vec::with_capacity(r);
    let mut cur = poly.clone();
    for _ in 0..r {
        out.push(KElem::from_poly(ctx, &cur));
        cur = cur.derivative();
    }
    out
}

/// Inverse modulo E(u)^r of a polynomial that is a unit modulo E(u).
fn inverse_mod_eis_pow(ctx: &Arc<RingConfig>, a: &Poly<Witt>, r: usize) -> Result<Poly<Witt>> {
    let modulus = ctx.eisenstein_pow(r);
    let y0 = KElem::from_poly(ctx, a).inv()?;
    let mut y = y0.poly().clone();
    let two = Poly::constant(ctx.w_int(2));
    let mut order = 1;
    while order < r {
        y = y.mul(&two.sub(&a.mul(&y).rem_monic(modulus))).rem_monic(modulus);
        order *= 2;
    }
    Ok(y)
}

/// The unique polynomial of degree < e·r with T_π = (L, 0, …, 0). It equals
/// L_0(θ) mod E(u)^r, where θ is the root of E lifting u in K0[u]/E(u)^r.
pub fn hermite_interpolant(l: &KElem, r: usize) -> Result<Poly<Witt>> {
    let ctx = l.ctx();
    if r == 0 {
        return Err(Error::Invalid("r must be positive".into()));
    }
    let modulus = ctx.eisenstein_pow(r);
    let reduce = |x: &Poly<Witt>| x.rem_monic(modulus);
    let eis = ctx.eisenstein();
    let deis = eis.derivative();
    let mut theta = Poly::var(&ctx.zero_w());
    let mut order = 1;
    while order < r {
        let value = eis.compose_with(&theta, reduce);
        let slope = deis.compose_with(&theta, reduce);
        let inv = inverse_mod_eis_pow(ctx, &slope, r)?;
        theta = reduce(&theta.sub(&value.mul(&inv)));
        order *= 2;
    }
    Ok(l.poly().compose_with(&theta, reduce))
}

/// L_1 of degree < e with L_1(π) = −p·L_0'(π)/E'(π).
pub fn hermite_l1(l: &KElem) -> Result<Poly<Witt>> {
    let ctx = l.ctx();
    let num = KElem::from_poly(ctx, &l.poly().derivative()).scale(&ctx.w_int(-ctx.p()));
    let den = KElem::from_poly(ctx, &ctx.eisenstein().derivative());
    Ok(num.div(&den)?.poly().clone())
}

/// 𝓛_2 = L_0 + (1/p)·L_1·E(u).
pub fn hermite_closed_form_r2(l: &KElem) -> Result<Poly<Witt>> {
    let ctx = l.ctx();
    let l1 = hermite_l1(l)?;
    Ok(l.poly().add(&l1.mul(ctx.eisenstein()).map(|c| c.div_p_pow(1))))
}

/// Parameters of D(L): φ(e_i) = p^(n_i) e_i, N = 0, Fil^1 = … = Fil^r =
/// K(L e_1 + e_2) with r = n_1 + n_2.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub n1: u32,
    pub n2: u32,
    pub l: KElem,
}

impl FamilyParams {
    pub fn r(&self) -> u32 {
        self.n1 + self.n2
    }

    /// Whether L lies in Q_p at working precision.
    pub fn l_in_qp(&self) -> bool {
        let ctx = self.l.ctx();
        (1..ctx.e()).all(|i| self.l.coeff(i).is_zero()) && {
            let c = self.l.coeff(0);
            c.frobenius().eq_at_prec(&c)
        }
    }

    /// Closed-form admissibility criterion of the family.
    pub fn admissible(&self) -> bool {
        if self.n1 == self.n2 {
            !self.l_in_qp()
        } else {
            !(self.n1 > 0 && self.l.is_zero())
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = self.l.ctx();
        if self.n1 > self.n2 {
            return Err(Error::Invalid("family needs n1 ≤ n2".into()));
        }
        if (ctx.e() as u32 * self.r()) as i64 >= ctx.p() - 1 {
            return Err(Error::Config("e(n1 + n2) must be below p − 1".into()));
        }
        if ctx.r() as u32 != self.r() {
            return Err(Error::Config(format!(
                "ring configured with r = {} but n1 + n2 = {}",
                ctx.r(),
                self.r()
            )));
        }
        if !self.admissible() {
            return Err(Error::Inadmissible(if self.n1 == self.n2 {
                "L lies in Q_p".into()
            } else {
                "n1 > 0 and L = 0".into()
            }));
        }
        Ok(())
    }

    pub fn filtered_module(&self) -> Result<FilteredModule> {
        let ctx = self.l.ctx();
        let w = |n: u32| ctx.witt().one().mul_p_pow(n as i32);
        let zero = ctx.zero_w();
        let phi = vec![vec![w(self.n1), zero.clone()], vec![zero.clone(), w(self.n2)]];
        let mono = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]];
        let one = KElem::from_int(ctx, 1);
        let zk = KElem::from_int(ctx, 0);
        let mut steps = vec![FilStep {
            t: 0,
            basis: vec![vec![one.clone(), zk.clone()], vec![zk, one.clone()]],
        }];
        if self.r() > 0 {
            steps.push(FilStep {
                t: self.r() as i64,
                basis: vec![vec![self.l.clone(), one]],
            });
        }
        FilteredModule::new(ctx, phi, mono, steps)
    }
}

/// S_{K0} ⊗ D(L) with Fil^r generated by 𝓛_r e_1 + e_2 and Fil^r S_{K0}.
#[derive(Clone, Debug)]
pub struct BreuilFamily {
    pub params: FamilyParams,
    pub module: FilteredModule,
    /// 𝓛_r, of degree < e·r.
    pub hermite: Poly<Witt>,
}

impl BreuilFamily {
    /// Coordinates of the generator 𝓛_r e_1 + e_2.
    pub fn generator(&self) -> [STrunc; 2] {
        let ctx = self.params.l.ctx();
        [STrunc::from_poly(ctx, &self.hermite), STrunc::from_int(ctx, 1)]
    }
}

pub fn to_breuil_family(params: &FamilyParams) -> Result<BreuilFamily> {
    params.validate()?;
    let module = params.filtered_module()?;
    let hermite = hermite_interpolant(&params.l, params.r() as usize)?;
    Ok(BreuilFamily {
        params: params.clone(),
        module,
        hermite,
    })
}

/// Rank-one module φ(e) = p^s e with a single jump at s.
pub fn rank_one(ctx: &Arc<RingConfig>, s: i64) -> Result<FilteredModule> {
    let phi = vec![vec![ctx.witt().one().mul_p_pow(s as i32)]];
    let mono = vec![vec![ctx.zero_w()]];
    let steps = vec![FilStep {
        t: s,
        basis: vec![vec![KElem::from_int(ctx, 1)]],
    }];
    FilteredModule::new(ctx, phi, mono, steps)
}

/// Integer residue helper used by reports: the rational value of an m = 1
/// element.
pub fn witt_to_rational(x: &Witt) -> Q {
    let (num, den) = x.rational_parts();
    let p = BigInt::from(x.ring().p());
    if den > 0 {
        Q::new(num, p.pow(den as u32))
    } else if num.is_zero() {
        Q::zero()
    } else {
        Q::from_integer(num)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize) -> Arc<RingConfig> {
        RingConfig::standard(7, m, 2, 2).unwrap()
    }

    #[test]
    fn hermite_example() {
        let ctx = ctx(1);
        let pi = KElem::pi(&ctx);
        let h = hermite_interpolant(&pi, 2).unwrap();
        let half = ctx.witt().from_ratio(1, 2).unwrap();
        let expect = Poly::new(
            vec![
                ctx.zero_w(),
                ctx.w_int(3).mul(&half),
                ctx.zero_w(),
                half.neg().div_p_pow(1),
            ],
            &ctx.zero_w(),
        );
        assert!(h.sub(&expect).is_zero());
        let tp = t_pi(&ctx, &h, 2);
        assert!(tp[0].eq_at_prec(&pi));
        assert!(tp[1].is_zero());
        assert!(hermite_closed_form_r2(&pi).unwrap().sub(&h).is_zero());
    }

    #[test]
    fn hermite_of_constant() {
        let ctx = ctx(1);
        let a = KElem::from_int(&ctx, 5);
        let h = hermite_interpolant(&a, 2).unwrap();
        assert!(h.sub(&Poly::constant(ctx.w_int(5))).is_zero());
    }

    #[test]
    fn family_polygons() {
        let ctx = ctx(2);
        let l = KElem::pi(&ctx);
        let params = FamilyParams { n1: 1, n2: 1, l };
        let d = params.filtered_module().unwrap();
        assert_eq!(d.hodge_polygon(), Polygon::from_ints(&[0, 2]));
        assert_eq!(d.newton_polygon().unwrap(), Polygon::from_ints(&[1, 1]));
        assert_eq!(d.t_numbers().unwrap(), (qi(2), qi(2)));
        assert!(d.weakly_admissible().unwrap());
        let bad = FamilyParams { n1: 1, n2: 1, l: KElem::from_int(&ctx, 3) };
        assert!(!bad.filtered_module().unwrap().weakly_admissible().unwrap());
        assert!(!bad.admissible());
        let teich = ctx.witt().teichmuller(&ctx.witt().fq_generator());
        let good = FamilyParams { n1: 1, n2: 1, l: KElem::from_witt(&ctx, teich) };
        assert!(good.admissible());
        assert!(good.filtered_module().unwrap().weakly_admissible().unwrap());
    }

    #[test]
    fn family_admissibility_over_qp_matches_closed_form() {
        let ctx = ctx(1);
        for (n1, n2, l) in [
            (1, 1, KElem::pi(&ctx)),
            (1, 1, KElem::from_int(&ctx, 3)),
            (0, 2, KElem::from_int(&ctx, 0)),
        ] {
            let params = FamilyParams { n1, n2, l };
            let d = params.filtered_module().unwrap();
            assert_eq!(d.weakly_admissible().unwrap(), params.admissible(), "{n1} {n2}");
        }
        let ctx3 = RingConfig::standard(11, 1, 1, 3).unwrap();
        let params = FamilyParams { n1: 1, n2: 2, l: KElem::from_int(&ctx3, 0) };
        assert!(!params.admissible());
        assert!(!params.filtered_module().unwrap().weakly_admissible().unwrap());
    }

    #[test]
    fn semilinear_newton_polygon() {
        // φ = diag(1, p) conjugated by a matrix P with σ(P) ≠ P: the
        // semilinear slopes stay (0, 1).
        let ctx = ctx(2);
        let w = ctx.witt().omega();
        let one = ctx.w_int(1);
        let zero = ctx.zero_w();
        let pmat = vec![vec![one.clone(), w.clone()], vec![zero.clone(), one.clone()]];
        let pinv = vec![vec![one.clone(), w.neg()], vec![zero.clone(), one.clone()]];
        let a = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), ctx.w_int(7)]];
        let sp: Matrix<Witt> = pmat.iter().map(|r| r.iter().map(|x| x.frobenius()).collect()).collect();
        let conj = mat_mul(&mat_mul(&pinv, &a, &zero), &sp, &zero);
        let mono = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero.clone()]];
        let kone = KElem::from_int(&ctx, 1);
        let kz = KElem::from_int(&ctx, 0);
        let steps = vec![FilStep { t: 0, basis: vec![vec![kone.clone(), kz.clone()], vec![kz, kone]] }];
        let d = FilteredModule::new(&ctx, conj, mono, steps).unwrap();
        assert_eq!(d.newton_polygon().unwrap(), Polygon::from_ints(&[0, 1]));
    }

    #[test]
    fn rank_one_numbers() {
        let ctx = ctx(1);
        let d = rank_one(&ctx, 2).unwrap();
        assert_eq!(d.t_numbers().unwrap(), (qi(2), qi(2)));
        assert!(d.weakly_admissible().unwrap());
    }

    #[test]
    fn breuil_generator_in_fil() {
        let ctx = ctx(1);
        let params = FamilyParams { n1: 1, n2: 1, l: KElem::pi(&ctx) };
        let fam = to_breuil_family(&params).unwrap();
        let g = fam.generator();
        assert!(fam.module.breuil_fil_contains(&g, 2));
        assert!(!fam.module.breuil_fil_contains(&g, 3));
        let e = STrunc::eisenstein(&ctx);
        let eg = [g[0].mul(&e), g[1].mul(&e)];
        assert!(fam.module.breuil_fil_contains(&eg, 3));
        let l0 = [STrunc::from_poly(&ctx, params.l.poly()), STrunc::from_int(&ctx, 1)];
        assert!(!fam.module.breuil_fil_contains(&l0, 2));
        assert!(fam.module.breuil_fil_contains(&l0, 1));
    }
}
