//! Randomized cross-checks: each computes a quantity two independent ways
//! (or checks an algebraic identity) over seeded random instances.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adapted::{divisor_exponents, exponents_by_minors, Carrier, EisensteinCarrier, TildeCarrier, WittCarrier};
use crate::arith::{Fq, KElem, RingConfig, RingParams, STrunc, TildePoly, Witt, WittRing};
use crate::breuil::{eqx_lhs, solve_eqx};
use crate::error::Result;
use crate::fontaine::{t_pi, to_breuil_family, FamilyParams};
use crate::polygons::{merge_min_formula, q, Polygon};
use crate::ring::{Matrix, Poly, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl OracleOutcome {
    fn new(name: impl Into<String>) -> OracleOutcome {
        OracleOutcome {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn record_result(&mut self, res: Result<bool>, detail: impl FnOnce() -> String) {
        match res {
            Ok(ok) => self.record(ok, detail),
            Err(err) => self.record(false, || format!("{}: {err}", detail())),
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures == 0
    }
}

impl fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{} agree", self.name, self.cases - self.failures, self.cases)?;
        if let Some(d) = &self.first_failure {
            write!(f, " (first failure: {d})")?;
        }
        Ok(())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integral element of W(F_q) known modulo p^abs.
pub fn random_witt(ring: &Arc<WittRing>, rng: &mut impl Rng, abs: i32) -> Witt {
    let p = ring.p() as i128;
    let bound = p.pow(abs.max(1) as u32);
    let coords: Vec<i128> = (0..ring.m()).map(|_| rng.gen_range(0..bound)).collect();
    ring.from_coords(&coords, abs)
}

pub fn random_unit_witt(ring: &Arc<WittRing>, rng: &mut impl Rng, abs: i32) -> Witt {
    loop {
        let w = random_witt(ring, rng, abs);
        if w.is_unit() {
            return w;
        }
    }
}

pub fn random_fq(ctx: &Arc<RingConfig>, rng: &mut impl Rng) -> Fq {
    let coords: Vec<i64> = (0..ctx.m()).map(|_| rng.gen_range(0..ctx.p())).collect();
    ctx.witt().fq_from_coords(&coords)
}

/// Integral element of S/Fil^p S, coefficients known to the working precision.
pub fn random_strunc(ctx: &Arc<RingConfig>, rng: &mut impl Rng) -> STrunc {
    let abs = ctx.prec() as i32;
    let coeffs: Vec<Witt> = (0..ctx.ep()).map(|_| random_witt(ctx.witt(), rng, abs)).collect();
    STrunc::from_poly(ctx, &Poly::new(coeffs, &ctx.zero_w()))
}

pub fn random_tilde(ctx: &Arc<RingConfig>, rng: &mut impl Rng) -> TildePoly {
    let coeffs = (0..ctx.ep()).map(|_| random_fq(ctx, rng)).collect();
    TildePoly::new(ctx, coeffs)
}

pub fn random_tilde_unit(ctx: &Arc<RingConfig>, rng: &mut impl Rng) -> TildePoly {
    loop {
        let x = random_tilde(ctx, rng);
        if x.is_unit() {
            return x;
        }
    }
}

/// Polygon with `width` slopes drawn from {k/2 : 0 ≤ k ≤ 8}.
pub fn random_polygon(rng: &mut impl Rng, width: usize) -> Polygon {
    Polygon::from_slopes((0..width).map(|_| q(rng.gen_range(0..=8), 2)).collect())
}

/// 3×4 generator matrix of random entries, with probability 1/3 a third
/// row dependent on the first two.
fn random_matrix<E: Ring>(rng: &mut ChaCha8Rng, mut entry: impl FnMut(&mut ChaCha8Rng) -> E) -> Matrix<E> {
    let mut m: Matrix<E> = (0..3).map(|_| (0..4).map(|_| entry(rng)).collect()).collect();
    if rng.gen_range(0..3) == 0 {
        let (a, b) = (entry(rng), entry(rng));
        m[2] = (0..4).map(|j| a.mul(&m[0][j]).add(&b.mul(&m[1][j]))).collect();
    }
    m
}

fn compare_exponents<C: Carrier>(out: &mut OracleOutcome, carrier: &C, mat: &Matrix<C::Elem>) {
    let fast = divisor_exponents(carrier, mat);
    let slow = exponents_by_minors(carrier, mat);
    let detail = || format!("{} matrix: reduction {fast:?}, minors {slow:?}", carrier.name());
    match (&fast, &slow) {
        (Ok(a), Ok(b)) => out.record(a == b, detail),
        _ => out.record(false, detail),
    }
}

/// Elementary-divisor exponents by reduction against minor enumeration,
/// over W/p^4, k[u]/u^(ep) and S_{K0}/Fil^p, on 3×4 matrices.
pub fn snf_vs_minors(p: i64, count: usize, seed: u64) -> Result<Vec<OracleOutcome>> {
    let ctx = RingConfig::new(&RingParams::new(p, 2, 2, 2).with_prec(6))?;
    let mut rng = rng(seed);
    let mut outcomes = Vec::new();

    // 3×3 minors are needed to p-adic precision 3N.
    let n = 4;
    let abs = 3 * n as i32 + 2;
    let wide = WittRing::new(p, 2, abs as u32, None)?;
    let witt = WittCarrier::new(&wide, n);
    let mut out = OracleOutcome::new("exponents over W/p^4");
    for _ in 0..count {
        let mat = random_matrix(&mut rng, |rng| {
            let k = rng.gen_range(0..=n) as i32;
            random_unit_witt(&wide, rng, abs).mul_p_pow(k)
        });
        compare_exponents(&mut out, &witt, &mat);
    }
    outcomes.push(out);

    let tilde = TildeCarrier::new(&ctx);
    let mut out = OracleOutcome::new("exponents over k[u]/u^(ep)");
    for _ in 0..count {
        let cap = ctx.ep() as u32;
        let mat = random_matrix(&mut rng, |rng| {
            let k = rng.gen_range(0..=cap) as usize;
            random_tilde_unit(&ctx, rng).shift(k)
        });
        compare_exponents(&mut out, &tilde, &mat);
    }
    outcomes.push(out);

    let eis = EisensteinCarrier::new(&ctx);
    let e = STrunc::eisenstein(&ctx);
    let mut out = OracleOutcome::new("exponents over S_K0/Fil^p");
    for _ in 0..count {
        let mat = random_matrix(&mut rng, |rng| {
            let k = rng.gen_range(0..=3u64);
            let mut unit = random_strunc(&ctx, rng);
            while !unit.f_zero().is_unit() {
                unit = unit.add(&STrunc::from_int(&ctx, 1));
            }
            unit.mul(&e.pow(k))
        });
        compare_exponents(&mut out, &eis, &mat);
    }
    outcomes.push(out);
    Ok(outcomes)
}

/// Random L ∈ K \ Q_p with v_p(L) ∈ {−1/2, 0, 1/2, 1}.
pub fn random_family_l(ctx: &Arc<RingConfig>, rng: &mut impl Rng) -> KElem {
    let abs = ctx.prec() as i32;
    loop {
        let coeffs: Vec<Witt> = (0..ctx.e()).map(|_| random_witt(ctx.witt(), rng, abs)).collect();
        let l = KElem::from_poly(ctx, &Poly::new(coeffs, &ctx.zero_w())).div_p_pow(rng.gen_range(-1..=1));
        let params = FamilyParams {
            n1: 1,
            n2: 1,
            l: l.clone(),
        };
        if !l.is_zero() && params.admissible() {
            return l;
        }
    }
}

/// T_π(𝓛_2) = (L, 0) and the Fil^2 generator (𝓛_2, 1), checked against the
/// filtration recursion on S_{K0} ⊗ D, for random L at p = 7, e = 2.
pub fn hermite_roundtrip(count: usize, seed: u64) -> Result<Vec<OracleOutcome>> {
    let ctx = RingConfig::new(&RingParams::new(7, 2, 2, 2).with_prec(7))?;
    let mut rng = rng(seed);
    let mut taylor = OracleOutcome::new("T_π(𝓛_2) = (L, 0)");
    let mut levels = OracleOutcome::new("generator in Fil^2, E·gen in Fil^3, E^2·gen in Fil^4, gen not in Fil^3");
    let mut spans = OracleOutcome::new("x in Fil^2 iff E^2 | x_1 − x_2·𝓛_2");
    let e = STrunc::eisenstein(&ctx);
    let e2 = e.mul(&e);
    for _ in 0..count {
        let l = random_family_l(&ctx, &mut rng);
        let fam = to_breuil_family(&FamilyParams {
            n1: 1,
            n2: 1,
            l: l.clone(),
        })?;
        let jets = t_pi(&ctx, &fam.hermite, 2);
        taylor.record(
            jets.len() == 2 && jets[0].eq_at_prec(&l) && jets[1].is_zero(),
            || format!("L = {l}: jets {:?}", jets.iter().map(|j| j.to_string()).collect::<Vec<_>>()),
        );

        let g = fam.generator();
        let times = |s: &STrunc| [g[0].mul(s), g[1].mul(s)];
        let m = &fam.module;
        levels.record(
            m.breuil_fil_contains(&g, 2)
                && m.breuil_fil_contains(&times(&e), 3)
                && m.breuil_fil_contains(&times(&e2), 4)
                && !m.breuil_fil_contains(&g, 3),
            || format!("L = {l}"),
        );

        let herm = STrunc::from_poly(&ctx, &fam.hermite);
        for k in 0..3u64 {
            let a = random_strunc(&ctx, &mut rng);
            let noise = random_strunc(&ctx, &mut rng).mul(&e.pow(k));
            let x = [a.mul(&herm).add(&noise), a];
            let closed = x[0].sub(&x[1].mul(&herm)).tronc(2).coeffs().iter().all(|c| c.is_zero());
            let recursive = m.breuil_fil_contains(&x, 2);
            spans.record(closed == recursive, || {
                format!("L = {l}, E^{k}-noise: closed form {closed}, recursion {recursive}")
            });
        }
    }
    Ok(vec![taylor, levels, spans])
}

/// ρX(−φ(α) + φ(X)u^k) = μ after solving, at p = 13, e = 5, j = 4.
pub fn eqx_substitution(count: usize, seed: u64) -> Result<OracleOutcome> {
    let (e, j) = (5, 4);
    let ctx = RingConfig::new(&RingParams::new(13, 1, e, 2).with_prec(6))?;
    let mut rng = rng(seed);
    let mut out = OracleOutcome::new("substitution into the X-equation at p = 13, e = 5, j = 4");
    for _ in 0..count {
        let rho = random_tilde_unit(&ctx, &mut rng);
        let alpha = random_tilde_unit(&ctx, &mut rng);
        let mu = random_tilde_unit(&ctx, &mut rng);
        let res = solve_eqx(&rho, &alpha, &mu, e, j).and_then(|x| Ok(eqx_lhs(&rho, &alpha, &x, e, j)? == mu));
        out.record_result(res, || format!("ρ = {rho}, α = {alpha}, μ = {mu}"));
    }
    Ok(out)
}

/// Polygon order, merge formula, Leibniz and semilinearity, troncation
/// idempotence and σ^m = id on random inputs.
pub fn property_suites(count: usize, seed: u64) -> Result<Vec<OracleOutcome>> {
    let ctx = RingConfig::new(&RingParams::new(7, 2, 2, 2).with_prec(6))?;
    let mut rng = rng(seed);

    let mut order = OracleOutcome::new("polygon partial order");
    for _ in 0..count {
        let (a, b, c) = (
            random_polygon(&mut rng, 3),
            random_polygon(&mut rng, 3),
            random_polygon(&mut rng, 3),
        );
        let res = (|| -> Result<bool> {
            let refl = a.lies_above(&a)?;
            let anti = !(a.lies_above(&b)? && b.lies_above(&a)?) || a == b;
            let trans = !(a.lies_above(&b)? && b.lies_above(&c)?) || a.lies_above(&c)?;
            Ok(refl && anti && trans)
        })();
        order.record_result(res, || format!("{a}, {b}, {c}"));
    }

    let mut merge = OracleOutcome::new("merge equals min formula");
    for _ in 0..count {
        let (wa, wb) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let a = random_polygon(&mut rng, wa);
        let b = random_polygon(&mut rng, wb);
        let m = a.merge(&b);
        let ok = (0..=m.width()).all(|k| m.ordinate(k) == merge_min_formula(&a, &b, k));
        merge.record(ok, || format!("{a} merged with {b}"));
    }

    let mut leibniz = OracleOutcome::new("Leibniz rule and semilinearity");
    let sigma_shift = |x: &STrunc| -> STrunc {
        let coeffs: Vec<Witt> = x.poly().coeffs().iter().map(|c| c.frobenius()).collect();
        STrunc::from_poly(&ctx, &Poly::new(coeffs, &ctx.zero_w()))
    };
    for _ in 0..count {
        let x = random_strunc(&ctx, &mut rng);
        let y = random_strunc(&ctx, &mut rng);
        let a = random_witt(ctx.witt(), &mut rng, ctx.prec() as i32);
        // N only descends to S/Fil^p → S/Fil^(p−1).
        let below = ctx.p() as usize - 1;
        let agree = |a: &STrunc, b: &STrunc| a.sub(b).tronc(below).coeffs().iter().all(|c| c.is_zero());
        let leib = agree(&x.mul(&y).monodromy(), &x.monodromy().mul(&y).add(&x.mul(&y.monodromy())));
        let mult = x.mul(&y).phi().eq_at_prec(&x.phi().mul(&y.phi()));
        let semi = x.scale(&a).phi().eq_at_prec(&x.phi().scale(&a.frobenius()));
        let commute = agree(&x.phi().monodromy(), &x.monodromy().phi().mul_p_pow(1));
        let u = STrunc::u(&ctx);
        let on_u = x.phi().eq_at_prec(&{
            // φ(Σ a_i u^i) = Σ σ(a_i) u^(pi)
            let s = sigma_shift(&x);
            let mut acc = STrunc::from_int(&ctx, 0);
            for (i, c) in s.poly().coeffs().iter().enumerate() {
                acc = acc.add(&u.pow((ctx.p() as u64) * i as u64).scale(c));
            }
            acc
        });
        let tx = random_tilde(&ctx, &mut rng);
        let ty = random_tilde(&ctx, &mut rng);
        let tilde_leib = tx.mul(&ty).monodromy() == tx.monodromy().mul(&ty).add(&tx.mul(&ty.monodromy()));
        let tilde_mult = tx.mul(&ty).phi() == tx.phi().mul(&ty.phi());
        leibniz.record(leib && mult && semi && commute && on_u && tilde_leib && tilde_mult, || {
            format!(
                "x = {x}, y = {y}: N-Leibniz {leib}, φ multiplicative {mult}, semilinear {semi}, Nφ = pφN {commute}, φ on u {on_u}, tilde {tilde_leib}/{tilde_mult}"
            )
        });
    }

    let mut tronc = OracleOutcome::new("troncation idempotent with E^s | x − tronc_s(x)");
    for _ in 0..count {
        let x = random_strunc(&ctx, &mut rng);
        let s = rng.gen_range(1..=ctx.p() as usize);
        let t = x.tronc(s);
        let again = STrunc::from_poly(&ctx, &t).tronc(s);
        let diff = x.sub(&STrunc::from_poly(&ctx, &t)).poly().clone();
        let divisible = diff.rem_monic(ctx.eisenstein_pow(s)).coeffs().iter().all(|c| c.is_zero());
        let deg_ok = t.len() <= ctx.e() * s;
        tronc.record(
            again.coeffs().iter().zip(t.coeffs()).all(|(a, b)| a.eq_at_prec(b)) && again.len() == t.len() && divisible && deg_ok,
            || format!("x = {x}, s = {s}"),
        );
    }

    let mut sigma = OracleOutcome::new("σ^m = id on W(F_q)");
    for _ in 0..count {
        let m = rng.gen_range(1..=4usize);
        let local = RingConfig::new(&RingParams::new(7, m, 1, 1).with_prec(6))?;
        let x = random_witt(local.witt(), &mut rng, 6);
        sigma.record(x.frobenius_pow(m).eq_at_prec(&x), || format!("m = {m}, x = {x}"));
    }
    Ok(vec![order, merge, leibniz, tronc, sigma])
}

/// Every oracle at its default size.
pub fn run_all(seed: u64) -> Result<Vec<OracleOutcome>> {
    let mut out = snf_vs_minors(7, 200, seed)?;
    out.extend(hermite_roundtrip(10, seed.wrapping_add(1))?);
    out.push(eqx_substitution(20, seed.wrapping_add(2))?);
    out.extend(property_suites(100, seed.wrapping_add(3))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for o in snf_vs_minors(7, 20, 5).unwrap() {
            assert!(o.passed(), "{o}");
        }
        for o in hermite_roundtrip(2, 5).unwrap() {
            assert!(o.passed(), "{o}");
        }
        assert!(eqx_substitution(3, 5).unwrap().passed());
        for o in property_suites(10, 5).unwrap() {
            assert!(o.passed(), "{o}");
        }
    }

    #[test]
    fn outcome_counts_failures() {
        let mut o = OracleOutcome::new("x");
        assert!(!o.passed());
        o.record(true, String::new);
        o.record(false, || "bad".into());
        o.record(false, || "worse".into());
        assert_eq!((o.cases, o.failures), (3, 2));
        assert_eq!(o.first_failure.as_deref(), Some("bad"));
    }
}
