//! Strongly divisible lattices in the filtered S_{K0}-modules attached to
//! D(L) with n1 = n2 = 1, their reduction modulo p, and the tame inertia
//! polygons read off the reduction. Also the pseudo-module (no monodromy)
//! whose Newton polygon falls strictly below the inertia bound.

use std::fmt;
use std::sync::Arc;

use crate::adapted::{
    divisor_exponents, first_step_checks, hodge_weights, EisensteinCarrier, FirstStepCheck, TildeCarrier,
    WeightMode,
};
use crate::arith::{KElem, KVal, RingConfig, RingParams, STrunc, TildePoly, Witt};
use crate::error::{precision, Error, Result};
use crate::fontaine::{hermite_interpolant, hermite_l1, FamilyParams, FilteredModule};
use crate::polygons::{newton_polygon, q, qi, Polygon, Q};
use crate::ring::{charpoly, Poly, Ring};

/// A named boolean together with the instance it was computed on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    pub evidence: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, holds: bool, evidence: impl Into<String>) -> Verdict {
        Verdict {
            name: name.into(),
            holds,
            evidence: evidence.into(),
        }
    }
}

fn require(checks: &[Verdict]) -> Result<()> {
    match checks.iter().find(|c| !c.holds) {
        Some(c) => Err(Error::Verification(format!("{}: {}", c.name, c.evidence))),
        None => Ok(()),
    }
}

/// Isomorphisms D(L) ≅ D(L + a) (a ∈ Q_p) and D(L) ≅ D(p^n L).
#[derive(Clone, Debug)]
pub enum Transform {
    Translate(Witt),
    Rescale(i32),
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Translate(a) => write!(f, "L -> L + {a}"),
            Transform::Rescale(n) => write!(f, "L -> p^{n} L"),
        }
    }
}

/// The two normal forms: (i) v_p(L) = 0 with residue outside F_p,
/// (ii) 0 < v_p(L) < 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    UnitResidue,
    Fractional,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::UnitResidue => write!(f, "i"),
            CaseTag::Fractional => write!(f, "ii"),
        }
    }
}

fn finite_val(l: &KElem) -> Result<Q> {
    match l.val_p() {
        KVal::Finite(v) => Ok(v),
        KVal::Infinite { .. } => Err(precision("normalize L", "L lies in Q_p at working precision")),
    }
}

/// Case tag of an already normalized L, with j = e·v_p(L) in case (ii).
pub fn case_of(l: &KElem) -> Result<(CaseTag, Option<usize>)> {
    let v = finite_val(l)?;
    let e = l.ctx().e() as i64;
    if v == qi(0) {
        let residue = l.coeff(0).reduce()?;
        if residue.in_prime_field() {
            return Err(Error::Invalid("residue of L lies in F_p; normalize first".into()));
        }
        Ok((CaseTag::UnitResidue, None))
    } else if v > qi(0) && v < qi(1) {
        let j = &v * qi(e);
        if !j.is_integer() {
            return Err(Error::Invalid(format!("e·v_p(L) = {j} is not an integer")));
        }
        Ok((CaseTag::Fractional, Some(j.to_integer().try_into().unwrap_or(0))))
    } else {
        Err(Error::Invalid(format!("v_p(L) = {v} is outside [0, 1); normalize first")))
    }
}

/// Moves L into case (i) or (ii) by translations by integers and rescaling
/// by powers of p.
pub fn normalize_l(l: &KElem) -> Result<(KElem, Vec<Transform>)> {
    let ctx = l.ctx();
    let mut cur = l.clone();
    let mut log = Vec::new();
    for _ in 0..4 * ctx.prec() + 8 {
        let v = finite_val(&cur)?;
        let n: i32 = v
            .floor()
            .to_integer()
            .try_into()
            .map_err(|_| Error::Invalid("valuation out of range".into()))?;
        if n != 0 {
            cur = cur.div_p_pow(n);
            log.push(Transform::Rescale(-n));
            continue;
        }
        if v > qi(0) {
            return Ok((cur, log));
        }
        let residue = cur.coeff(0).reduce()?;
        if !residue.in_prime_field() {
            return Ok((cur, log));
        }
        let a = ctx.w_int(residue.coords()[0]);
        cur = cur.sub(&KElem::from_witt(ctx, a.clone()));
        log.push(Transform::Translate(a.neg()));
    }
    Err(precision("normalize L", "no normal form reached"))
}

/// The auxiliary elements of the construction for a normalized L.
#[derive(Clone, Debug)]
pub struct FamilyElements {
    ctx: Arc<RingConfig>,
    pub module: FilteredModule,
    pub l: KElem,
    pub case: CaseTag,
    pub j: Option<usize>,
    /// Representative of degree < e with L_0(π) = L.
    pub l0: Poly<Witt>,
    /// L_1(π) = −p·L_0'(π)/E'(π).
    pub l1: Poly<Witt>,
    pub lambda: Witt,
    pub sigma_lambda: Witt,
    pub mu: Witt,
    /// 𝓛_2 = L_0 + (1/p)·L_1·E(u).
    pub hermite: Poly<Witt>,
    /// t = tronc_1(t), degree < e.
    pub t: Poly<Witt>,
    /// v = v_p(t(π)).
    pub t_val: KElem,
    pub z: STrunc,
    /// U and V with U·(L_0 − σ(λ)) = p + V·E(u).
    pub u_cofactor: Poly<Witt>,
    pub v_cofactor: Poly<Witt>,
    pub b1: Poly<Witt>,
    pub b2: Option<Poly<Witt>>,
    pub checks: Vec<Verdict>,
}

impl FamilyElements {
    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }

    pub fn v(&self) -> KVal {
        self.t_val.val_p()
    }

    fn s(&self, poly: &Poly<Witt>) -> STrunc {
        STrunc::from_poly(&self.ctx, poly)
    }

    /// 1 + c·φ(t).
    pub fn one_plus_c_phi_t(&self) -> STrunc {
        let c = STrunc::c(&self.ctx);
        STrunc::from_int(&self.ctx, 1).add(&c.mul(&self.s(&self.t).phi()))
    }
}

fn integral_poly(p: &Poly<Witt>) -> bool {
    p.coeffs().iter().all(|c| c.is_integral())
}

fn divisible_by_p(w: &Witt, k: i32) -> bool {
    match w.valuation() {
        Some(v) => v >= k,
        None => true,
    }
}

/// Every coefficient of the representative divisible by p^k; an error when
/// a coefficient vanishes at an absolute precision below k.
pub fn p_divisible(x: &STrunc, k: i32) -> Result<bool> {
    for c in x.poly().coeffs() {
        match c.valuation() {
            Some(v) if v < k => return Ok(false),
            Some(_) => {}
            None if c.abs_prec() < k => {
                return Err(precision("p-divisibility", format!("coefficient known only mod p^{}", c.abs_prec())))
            }
            None => {}
        }
    }
    Ok(true)
}

/// Builds t, Z, U, V, B_1, B_2 for a normalized L and checks their defining
/// properties; any failed check is an error.
pub fn build_elements(params: &FamilyParams) -> Result<FamilyElements> {
    if params.n1 != 1 || params.n2 != 1 {
        return Err(Error::Unsupported("the lattice is constructed for n1 = n2 = 1 only".into()));
    }
    params.validate()?;
    let module = params.filtered_module()?;
    let l = params.l.clone();
    let ctx = l.ctx().clone();
    let e = ctx.e();
    let (case, j) = case_of(&l)?;
    let s = |p: &Poly<Witt>| STrunc::from_poly(&ctx, p);

    let l0 = l.poly().clone();
    if !integral_poly(&l0) {
        return Err(Error::Invalid("L_0 must have integral coefficients".into()));
    }
    let lambda = l0.coeff(0);
    let sigma_lambda = lambda.frobenius();
    let mu = sigma_lambda.sub(&lambda);
    let l1 = hermite_l1(&l)?;
    let hermite = hermite_interpolant(&l, 2)?;
    // σ(λ) − L_0
    let gap = Poly::constant(sigma_lambda.clone()).sub(&l0);
    let t = match case {
        CaseTag::UnitResidue => s(&l1).mul(&s(&gap).unit_inverse()?).tronc(1),
        CaseTag::Fractional => KElem::from_poly(&ctx, &l1)
            .div(&KElem::from_poly(&ctx, &gap))?
            .poly()
            .clone(),
    };
    let t_val = KElem::from_poly(&ctx, &t);
    let mut checks = Vec::new();
    checks.push(Verdict::new("t integral", integral_poly(&t), format!("t = {t_val}")));
    let first = KElem::from_poly(&ctx, &gap.mul(&t).sub(&l1));
    checks.push(Verdict::new(
        "(σ(λ) − L_0)·t ≡ L_1 mod Fil^1",
        first.is_zero(),
        format!("difference at π: {first}"),
    ));
    let c = STrunc::c(&ctx);
    let phi_t = s(&t).phi();
    let one_plus = STrunc::from_int(&ctx, 1).add(&c.mul(&phi_t));
    checks.push(Verdict::new(
        "1 + c·φ(t) invertible",
        one_plus.f_zero().valuation() == Some(0),
        format!("constant term {}", one_plus.f_zero()),
    ));
    if case == CaseTag::UnitResidue {
        checks.push(Verdict::new(
            "t ∈ uS + pS",
            divisible_by_p(&t.coeff(0), 1),
            format!("constant term {}", t.coeff(0)),
        ));
    }
    if let Some(j) = j {
        let expected = ctx.w_int(j as i64).div(&ctx.w_int(e as i64).mul(ctx.c0()))?.neg();
        checks.push(Verdict::new(
            "t(0) ≡ −j/(e·c_0) mod p",
            divisible_by_p(&t.coeff(0).sub(&expected), 1),
            format!("t(0) = {}, −j/(e·c_0) = {expected}", t.coeff(0)),
        ));
    }
    require(&checks)?;

    let numer = s(&l0).phi().add(&c.mul(&phi_t.scale(&sigma_lambda.frobenius())));
    let z = numer.mul(&one_plus.unit_inverse()?);
    let z_gap = z.sub(&STrunc::constant(&ctx, sigma_lambda.clone()));
    let z_tr = z_gap.tronc(2);
    checks.push(Verdict::new(
        "Z − σ(λ) ∈ pS + Fil^2 S",
        z_tr.coeffs().iter().all(|c| divisible_by_p(c, 1)),
        format!("tronc_2(Z − σ(λ)) = {}", s(&z_tr)),
    ));

    let l_gap = l0.sub(&Poly::constant(sigma_lambda.clone()));
    let u_cofactor = KElem::from_int(&ctx, ctx.p())
        .div(&KElem::from_poly(&ctx, &l_gap))?
        .poly()
        .clone();
    let (v_cofactor, rem) = u_cofactor
        .mul(&l_gap)
        .sub(&Poly::constant(ctx.w_int(ctx.p())))
        .divrem_monic(ctx.eisenstein());
    checks.push(Verdict::new(
        "U·(L_0 − σ(λ)) = p + V·E(u)",
        rem.is_zero() && integral_poly(&u_cofactor) && integral_poly(&v_cofactor),
        format!("U = {}, V = {}", s(&u_cofactor), s(&v_cofactor)),
    ));
    if case == CaseTag::Fractional {
        let expected = ctx.c0().inv()?.neg();
        checks.push(Verdict::new(
            "V(0) ≡ −1/c_0 mod p",
            divisible_by_p(&v_cofactor.coeff(0).sub(&expected), 1),
            format!("V(0) = {}", v_cofactor.coeff(0)),
        ));
    }

    let sl = STrunc::constant(&ctx, sigma_lambda.clone());
    let b1_tail = s(&t).mul(&sl.sub(&z)).tronc(1).map(|x| x.div_p_pow(1));
    let b1 = l_gap.add(&b1_tail.shift(e));
    checks.push(Verdict::new("B_1 integral", integral_poly(&b1), format!("B_1 = {}", s(&b1))));
    let b2 = if case == CaseTag::Fractional {
        let tail = s(&u_cofactor).mul(&sl.sub(&z)).tronc(1).map(|x| x.div_p_pow(1));
        let b2 = Poly::constant(ctx.w_int(1)).add(&tail).shift(e);
        checks.push(Verdict::new("B_2 integral", integral_poly(&b2), format!("B_2 = {}", s(&b2))));
        Some(b2)
    } else {
        None
    };
    require(&checks)?;
    Ok(FamilyElements {
        ctx,
        module,
        l,
        case,
        j,
        l0,
        l1,
        lambda,
        sigma_lambda,
        mu,
        hermite,
        t,
        t_val,
        z,
        u_cofactor,
        v_cofactor,
        b1,
        b2,
        checks,
    })
}

/// A f_1 + B f_2.
#[derive(Clone, Debug)]
pub struct LatticeGen {
    pub label: String,
    pub a: STrunc,
    pub b: STrunc,
}

/// The S-module spanned by f_1 = Z e_1 + e_2 and f_2 = p^n e_1, with
/// generators of Fil^2.
#[derive(Clone, Debug)]
pub struct StrongLattice {
    pub elements: FamilyElements,
    pub z: STrunc,
    pub shift: i32,
    pub fil_gens: Vec<LatticeGen>,
}

pub const GEN_MAIN: &str = "m(p + tE)";
pub const GEN_U: &str = "m(UE)";
pub const GEN_E2_F1: &str = "E^2 f1";
pub const GEN_E2_F2: &str = "E^2 f2";

impl StrongLattice {
    /// The lattice for an arbitrary Z, without integrality checks (used for
    /// negative controls).
    pub fn with_z(elements: &FamilyElements, z: STrunc, shift: i32) -> StrongLattice {
        let ctx = elements.ctx();
        let s = |p: &Poly<Witt>| STrunc::from_poly(ctx, p);
        let eis = STrunc::eisenstein(ctx);
        let e2 = eis.mul(&eis);
        let main = STrunc::from_int(ctx, ctx.p()).add(&s(&elements.t).mul(&eis));
        let ue = s(&elements.u_cofactor).mul(&eis);
        let mut lat = StrongLattice {
            elements: elements.clone(),
            z,
            shift,
            fil_gens: Vec::new(),
        };
        let gens = vec![
            lat.m_of(GEN_MAIN, &main),
            lat.m_of(GEN_U, &ue),
            lat.m_of(GEN_E2_F1, &e2),
            LatticeGen {
                label: GEN_E2_F2.into(),
                a: STrunc::from_int(ctx, 0),
                b: e2,
            },
        ];
        lat.fil_gens = gens;
        lat
    }

    fn ctx(&self) -> &Arc<RingConfig> {
        self.elements.ctx()
    }

    /// m(A) = A·f_1 + p^(−n)·tronc_2(A(𝓛_2 − Z))·f_2.
    pub fn m_of(&self, label: &str, a: &STrunc) -> LatticeGen {
        let ctx = self.ctx();
        let gap = STrunc::from_poly(ctx, &self.elements.hermite).sub(&self.z);
        let b = STrunc::from_poly(ctx, &a.mul(&gap).tronc(2)).div_p_pow(self.shift);
        LatticeGen {
            label: label.into(),
            a: a.clone(),
            b,
        }
    }

    pub fn gen(&self, label: &str) -> Option<&LatticeGen> {
        self.fil_gens.iter().find(|g| g.label == label)
    }

    /// Coordinates on e_1, e_2.
    pub fn to_ambient(&self, g: &LatticeGen) -> [STrunc; 2] {
        [g.a.mul(&self.z).add(&g.b.mul_p_pow(self.shift)), g.a.clone()]
    }

    /// φ(A f_1 + B f_2) on f_1, f_2:
    /// (p·φ(A), p^(1−n)·φ(A)(φ(Z) − Z) + p·φ(B)).
    pub fn phi(&self, g: &LatticeGen) -> [STrunc; 2] {
        let phi_a = g.a.phi();
        let drift = self.z.phi().sub(&self.z).div_p_pow(self.shift - 1);
        [
            phi_a.mul_p_pow(1),
            phi_a.mul(&drift).add(&g.b.phi().mul_p_pow(1)),
        ]
    }

    /// φ(g)/p^2 reduced to k[u]/u^(ep), when divisible.
    pub fn phi2_direct(&self, g: &LatticeGen) -> Result<[TildePoly; 2]> {
        let [x, y] = self.phi(g);
        if !(p_divisible(&x, 2)? && p_divisible(&y, 2)?) {
            return Err(Error::Verification(format!("φ({}) is not divisible by p^2", g.label)));
        }
        Ok([x.div_p_pow(2).reduce()?, y.div_p_pow(2).reduce()?])
    }
}

pub fn strong_lattice(elements: &FamilyElements, shift: i32) -> Result<StrongLattice> {
    let z_ok = shift <= 1
        || elements
            .z
            .poly()
            .coeffs()
            .iter()
            .all(|c| divisible_by_p(c, shift - 1));
    if !z_ok {
        return Err(Error::Invalid(format!("Z is not in p^{} S", shift - 1)));
    }
    let lat = StrongLattice::with_z(elements, elements.z.clone(), shift);
    for g in &lat.fil_gens {
        if !g.b.is_integral() {
            return Err(Error::Verification(format!(
                "(1/p^{shift})·tronc_2(A(𝓛_2 − Z)) is not integral for {}",
                g.label
            )));
        }
    }
    Ok(lat)
}

#[derive(Clone, Debug)]
pub struct DivisibilityReport {
    pub entries: Vec<Verdict>,
    /// Reduced φ_2-images of the generators that passed.
    pub images: Vec<(String, [TildePoly; 2])>,
    pub generates: bool,
}

impl DivisibilityReport {
    pub fn all_pass(&self) -> bool {
        self.generates && self.entries.iter().all(|v| v.holds)
    }
}

/// Generator by generator: integrality, membership in Fil^2 𝒟, φ(g) ∈
/// p^2 ℳ; then whether the reduced φ_2-images generate ℳ/pℳ.
pub fn verify_strong_divisibility(lat: &StrongLattice) -> Result<DivisibilityReport> {
    let ctx = lat.ctx();
    let mut entries = Vec::new();
    let mut images = Vec::new();
    for g in &lat.fil_gens {
        let integral = g.a.is_integral() && g.b.is_integral();
        let in_fil = lat.elements.module.breuil_fil_contains(&lat.to_ambient(g), 2);
        let [x, y] = lat.phi(g);
        let divisible = integral && p_divisible(&x, 2)? && p_divisible(&y, 2)?;
        let evidence = format!(
            "integral: {integral}, in Fil^2: {in_fil}, v_p of φ-coordinates: {:?}, {:?}",
            x.p_valuation(),
            y.p_valuation()
        );
        entries.push(Verdict::new(
            format!("φ({}) ∈ p^2 M", g.label),
            integral && in_fil && divisible,
            evidence,
        ));
        if integral && divisible {
            images.push((g.label.clone(), [x.div_p_pow(2).reduce()?, y.div_p_pow(2).reduce()?]));
        }
    }
    let generates = if images.is_empty() {
        false
    } else {
        let mat = vec![
            images.iter().map(|(_, v)| v[0].clone()).collect(),
            images.iter().map(|(_, v)| v[1].clone()).collect(),
        ];
        let ex = divisor_exponents(&TildeCarrier::new(ctx), &mat)?;
        ex.iter().all(|&n| n == 0)
    };
    Ok(DivisibilityReport {
        entries,
        images,
        generates,
    })
}

/// The reduction of A ∈ 𝒜 ↦ φ_2(m̄(A)) through (φ(A)/p)·f_1 + C·f_2 with
/// C = (φ∘tronc_2(A𝓛_2) − φ(A)Z + φ(σ(λ))·φ(A − tronc_2 A))/p^2.
pub fn phi2_image(lat: &StrongLattice, a: &STrunc) -> Result<[TildePoly; 2]> {
    if lat.shift != 1 {
        return Err(Error::Unsupported("the C-formula assumes n = 1".into()));
    }
    if ideal_decompose(&lat.elements, a)?.is_none() {
        return Err(Error::Invalid("A is not in the ideal 𝒜".into()));
    }
    let ctx = lat.ctx();
    let el = &lat.elements;
    let s = |p: &Poly<Witt>| STrunc::from_poly(ctx, p);
    let phi_a = a.phi();
    let first = s(&a.mul(&s(&el.hermite)).tronc(2)).phi();
    let second = phi_a.mul(&lat.z);
    let tail = a.sub(&s(&a.tronc(2))).phi().scale(&el.sigma_lambda.frobenius());
    let num = first.sub(&second).add(&tail);
    if !(p_divisible(&num, 2)? && p_divisible(&phi_a, 1)?) {
        return Err(Error::Verification("C is not integral".into()));
    }
    Ok([phi_a.div_p_pow(1).reduce()?, num.div_p_pow(2).reduce()?])
}

/// Writes A ≡ A_0·(p + tE) + W·(UE) modulo Fil^2 S when A ∈ 𝒜, by
/// reduction against these generators; `None` when A ∉ 𝒜.
pub fn ideal_decompose(el: &FamilyElements, a: &STrunc) -> Result<Option<(Poly<Witt>, Poly<Witt>)>> {
    let ctx = el.ctx();
    let (a1, a0) = a.tronc(2).divrem_monic(ctx.eisenstein());
    if !a0.coeffs().iter().all(|c| divisible_by_p(c, 1)) {
        return Ok(None);
    }
    let a0 = a0.map(|c| c.div_p_pow(1));
    let rest = a1.sub(&a0.mul(&el.t)).rem_monic(ctx.eisenstein());
    let w = KElem::from_poly(ctx, &rest).div(&KElem::from_poly(ctx, &el.u_cofactor))?;
    let ok = match w.val_p() {
        KVal::Finite(v) => v >= qi(0),
        KVal::Infinite { .. } => true,
    };
    Ok(ok.then(|| (a0, w.poly().clone())))
}

/// A ∈ 𝒜 from the definition: A(Z − 𝓛_2) ∈ pS + Fil^2 S_{K0}.
pub fn ideal_contains_direct(el: &FamilyElements, a: &STrunc) -> bool {
    let ctx = el.ctx();
    let gap = el.z.sub(&STrunc::from_poly(ctx, &el.hermite));
    a.mul(&gap).tronc(2).coeffs().iter().all(|c| divisible_by_p(c, 1))
}

type Pair = [TildePoly; 2];

fn scale_pair(x: &Pair, a: &TildePoly) -> Pair {
    [x[0].mul(a), x[1].mul(a)]
}

fn add_pair(x: &Pair, y: &Pair) -> Pair {
    [x[0].add(&y[0]), x[1].add(&y[1])]
}

fn sub_pair(x: &Pair, y: &Pair) -> Pair {
    [x[0].sub(&y[0]), x[1].sub(&y[1])]
}

/// Rank-two object over k[u]/u^(ep): Fil^r spanned by two generators (and
/// u^(er) times the module), with their φ_r-images.
#[derive(Clone, Debug)]
pub struct TildeObject {
    ctx: Arc<RingConfig>,
    pub fil_gens: [Pair; 2],
    pub phi_images: [Pair; 2],
    /// Images N(f_1), N(f_2) of the basis, when known.
    pub monodromy: Option<[Pair; 2]>,
    det_exponent: usize,
    det_unit_inv: TildePoly,
}

impl TildeObject {
    pub fn new(ctx: &Arc<RingConfig>, fil_gens: [Pair; 2], phi_images: [Pair; 2]) -> Result<TildeObject> {
        let [g1, g2] = &fil_gens;
        let d = g1[0].mul(&g2[1]).sub(&g2[0].mul(&g1[1]));
        let k = d.val_u();
        let bound = ctx.e() * ctx.r();
        if k > bound {
            return Err(Error::Invalid(format!(
                "generators span no multiple of u^{bound}·M (determinant has u-valuation {k})"
            )));
        }
        let det_unit_inv = d.unshift(k)?.inv()?;
        let [h1, h2] = &phi_images;
        let dphi = h1[0].mul(&h2[1]).sub(&h2[0].mul(&h1[1]));
        if !dphi.is_unit() {
            return Err(Error::Verification("φ_r-images do not generate the module".into()));
        }
        Ok(TildeObject {
            ctx: ctx.clone(),
            fil_gens,
            phi_images,
            monodromy: None,
            det_exponent: k,
            det_unit_inv,
        })
    }

    pub fn ctx(&self) -> &Arc<RingConfig> {
        &self.ctx
    }

    pub fn with_monodromy(mut self, basis_images: [Pair; 2]) -> TildeObject {
        self.monodromy = Some(basis_images);
        self
    }

    /// N(a f_1 + b f_2) = N(a) f_1 + N(b) f_2 + a N(f_1) + b N(f_2).
    pub fn apply_monodromy(&self, x: &Pair) -> Option<Pair> {
        let [n1, n2] = self.monodromy.as_ref()?;
        let own = [x[0].monodromy(), x[1].monodromy()];
        Some(add_pair(&own, &add_pair(&scale_pair(n1, &x[0]), &scale_pair(n2, &x[1]))))
    }

    /// u-valuation of the determinant of the generators.
    pub fn det_exponent(&self) -> usize {
        self.det_exponent
    }

    /// Coordinates on the generators, determined modulo u^(ep − k).
    fn coordinates(&self, x: &Pair) -> Option<Pair> {
        let [g1, g2] = &self.fil_gens;
        let k = self.det_exponent;
        let y1 = g2[1].mul(&x[0]).sub(&g2[0].mul(&x[1]));
        let y2 = g1[0].mul(&x[1]).sub(&g1[1].mul(&x[0]));
        let y1 = y1.unshift(k).ok()?.mul(&self.det_unit_inv);
        let y2 = y2.unshift(k).ok()?.mul(&self.det_unit_inv);
        Some([y1, y2])
    }

    pub fn fil_contains(&self, x: &Pair) -> bool {
        self.coordinates(x).is_some()
    }

    /// φ_r of an element of Fil^r.
    pub fn phi_r(&self, x: &Pair) -> Result<Pair> {
        let y = self
            .coordinates(x)
            .ok_or_else(|| Error::Invalid("element is not in Fil^r".into()))?;
        Ok(add_pair(
            &scale_pair(&self.phi_images[0], &y[0].phi()),
            &scale_pair(&self.phi_images[1], &y[1].phi()),
        ))
    }

    /// Exponents of an adapted basis for Fil^r, as r − n/e.
    pub fn hodge_polygon(&self) -> Result<Polygon> {
        let ctx = &self.ctx;
        let top = TildePoly::u_pow(ctx, ctx.e() * ctx.r());
        let z = TildePoly::zero(ctx);
        let [g1, g2] = &self.fil_gens;
        let mat = vec![
            vec![g1[0].clone(), g2[0].clone(), top.clone(), z.clone()],
            vec![g1[1].clone(), g2[1].clone(), z, top],
        ];
        let ex = divisor_exponents(&TildeCarrier::new(ctx), &mat)?;
        let w = hodge_weights(&ex, ctx.r() as u32, ctx.e() as u32, WeightMode::ModP)?;
        Ok(Polygon::from_slopes(w))
    }
}

/// ℳ/pℳ with the generators g_1 = m̄(p + tE) and g_2 = E^2 f̄_1 (case i)
/// or m̄(UE) (case ii), φ_2 computed on the lattice.
pub fn reduce_mod_p(lat: &StrongLattice) -> Result<TildeObject> {
    let second = match lat.elements.case {
        CaseTag::UnitResidue => GEN_E2_F1,
        CaseTag::Fractional => GEN_U,
    };
    let mut gens = Vec::new();
    let mut images = Vec::new();
    for label in [GEN_MAIN, second] {
        let g = lat.gen(label).ok_or_else(|| Error::Invalid(format!("missing generator {label}")))?;
        gens.push([g.a.reduce()?, g.b.reduce()?]);
        images.push(lat.phi2_direct(g)?);
    }
    let gens: [Pair; 2] = gens.try_into().expect("two generators");
    let images: [Pair; 2] = images.try_into().expect("two images");
    // N(e_i) = 0, so N(f_1) = N(Z) e_1 = p^(−n) N(Z) f_2 and N(f_2) = 0.
    let nz = lat.z.monodromy();
    if !p_divisible(&nz, lat.shift)? {
        return Err(Error::Verification(format!("N(Z) is not in p^{} S", lat.shift)));
    }
    let ctx = lat.ctx();
    let zero = TildePoly::zero(ctx);
    let n_f1 = [zero.clone(), nz.div_p_pow(lat.shift).reduce()?];
    Ok(TildeObject::new(ctx, gens, images)?.with_monodromy([n_f1, [zero.clone(), zero]]))
}

/// Unique X with ρ·X·(−φ(α) + φ(X)·u^(p((p+1)(e−j)−2e))) = μ, by fixed-point
/// iteration from −μ/(ρφ(α)).
pub fn solve_eqx(rho: &TildePoly, alpha: &TildePoly, mu: &TildePoly, e: usize, j: usize) -> Result<TildePoly> {
    let ctx = rho.ctx();
    if !(rho.is_unit() && alpha.is_unit() && mu.is_unit()) {
        return Err(Error::Invalid("ρ, α, μ must be units".into()));
    }
    if j >= e {
        return Err(Error::Invalid(format!("need j < e, got j = {j}, e = {e}")));
    }
    let twist = eqx_twist(ctx, e, j)?;
    let phi_alpha = alpha.phi();
    let mut x = mu.mul(&rho.mul(&phi_alpha).inv()?).neg();
    for _ in 0..=ctx.ep() {
        let bracket = phi_alpha.neg().add(&x.phi().mul(&twist));
        let next = mu.mul(&rho.mul(&bracket).inv()?);
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::Verification("fixed-point iteration did not stabilize".into()))
}

/// u^(p((p+1)(e−j)−2e)), zero when the exponent reaches e·p.
pub fn eqx_twist(ctx: &Arc<RingConfig>, e: usize, j: usize) -> Result<TildePoly> {
    let p = ctx.p();
    let k = p * ((p + 1) * (e - j) as i64 - 2 * e as i64);
    if k <= 0 {
        return Err(Error::Invalid(format!("exponent {k} is not positive")));
    }
    Ok(TildePoly::u_pow(ctx, (k as usize).min(ctx.ep())))
}

/// Left-hand side ρX(−φ(α) + φ(X)u^k) of the equation.
pub fn eqx_lhs(rho: &TildePoly, alpha: &TildePoly, x: &TildePoly, e: usize, j: usize) -> Result<TildePoly> {
    let twist = eqx_twist(rho.ctx(), e, j)?;
    Ok(rho.mul(x).mul(&alpha.phi().neg().add(&x.phi().mul(&twist))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Fil^2 = ⟨e_2, u^(2e) e_1⟩.
    Zero,
    /// Fil^2 = ⟨α u^(e+j) e_1 + e_2, u^(2e) e_1⟩.
    One,
    /// Fil^2 = ⟨α u^e e_1 + β u^j e_2, γ u^(2e−j) e_1 + δ u^e e_2⟩.
    Two,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Zero => write!(f, "0"),
            Shape::One => write!(f, "1"),
            Shape::Two => write!(f, "2"),
        }
    }
}

/// Rank-one sub-object generated by m with Fil^2 = u^s·(sub-object).
#[derive(Clone, Debug)]
pub struct SubObject {
    pub generator: Pair,
    pub fil_exponent: usize,
    pub checks: Vec<Verdict>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub shape: Shape,
    pub j: Option<usize>,
    pub irreducible: bool,
    pub sub_object: Option<SubObject>,
    pub slopes: Polygon,
}

fn sub_object(obj: &TildeObject, m: Pair, s: usize) -> Result<SubObject> {
    let ctx = obj.ctx();
    let us = TildePoly::u_pow(ctx, s);
    let x = scale_pair(&m, &us);
    let mut checks = Vec::new();
    let in_fil = obj.fil_contains(&x);
    checks.push(Verdict::new(format!("u^{s}·m ∈ Fil^2"), in_fil, format!("m = ({}, {})", m[0], m[1])));
    if s > 0 {
        let below = scale_pair(&m, &TildePoly::u_pow(ctx, s - 1));
        checks.push(Verdict::new(
            format!("u^{}·m ∉ Fil^2", s - 1),
            !obj.fil_contains(&below),
            String::new(),
        ));
    }
    if in_fil {
        let y = obj.phi_r(&x)?;
        let kappa = y[1].mul(&m[1].inv()?);
        let stable = kappa.is_unit() && y[0] == kappa.mul(&m[0]);
        checks.push(Verdict::new(
            format!("φ_2(u^{s}·m) is a unit multiple of m"),
            stable,
            format!("φ_2(u^{s}·m) = ({}, {})", y[0], y[1]),
        ));
    }
    if let Some(nm) = obj.apply_monodromy(&m) {
        let scalar = nm[1].mul(&m[1].inv()?);
        checks.push(Verdict::new(
            "N(m) is a multiple of m",
            nm[0] == scalar.mul(&m[0]),
            format!("N(m) = ({}, {})", nm[0], nm[1]),
        ));
    }
    require(&checks)?;
    Ok(SubObject {
        generator: m,
        fil_exponent: s,
        checks,
    })
}

fn split_slopes(ctx: &Arc<RingConfig>, total: &Q, s: usize) -> Result<Polygon> {
    let sub = rank1_inertia_weight(s, ctx.e(), ctx.r())?;
    Ok(Polygon::from_slopes(vec![total - &sub, sub]))
}

fn try_shape_one(obj: &TildeObject) -> Result<Option<Classification>> {
    let ctx = obj.ctx();
    let e = ctx.e();
    let one = TildePoly::from_int(ctx, 1);
    for (i, o) in [(0, 1), (1, 0)] {
        let gi = &obj.fil_gens[i];
        let go = &obj.fil_gens[o];
        if !gi[1].is_unit() {
            continue;
        }
        let binv = gi[1].inv()?;
        let g1 = [gi[0].mul(&binv), one.clone()];
        let im1 = scale_pair(&obj.phi_images[i], &binv.phi());
        let bo = &go[1];
        let g2_first = go[0].sub(&bo.mul(&g1[0]));
        let im2 = sub_pair(&obj.phi_images[o], &scale_pair(&im1, &bo.phi()));
        if g2_first.val_u() != 2 * e {
            continue;
        }
        let winv = g2_first.unshift(2 * e)?.inv()?;
        let im2 = scale_pair(&im2, &winv.phi());
        if !(im1[1].is_zero() && im1[0].is_unit() && im2[0].is_zero() && im2[1].is_unit()) {
            continue;
        }
        let (mu, rho) = (&im1[0], &im2[1]);
        let a = &g1[0];
        let irreducible_slopes = Polygon::from_ints(&[0, 2]);
        if a.val_u() >= 2 * e {
            return Ok(Some(Classification {
                shape: Shape::Zero,
                j: None,
                irreducible: true,
                sub_object: None,
                slopes: irreducible_slopes,
            }));
        }
        if a.val_u() < e {
            continue;
        }
        let j = a.val_u() - e;
        if j >= e {
            return Ok(Some(Classification {
                shape: Shape::One,
                j: Some(j),
                irreducible: true,
                sub_object: None,
                slopes: irreducible_slopes,
            }));
        }
        let alpha = a.unshift(e + j)?;
        let x = solve_eqx(rho, &alpha, mu, e, j)?;
        let p = ctx.p() as usize;
        let m = [x.shift(p * (e - j)), one.clone()];
        let sub = sub_object(obj, m, e - j)?;
        let slopes = split_slopes(ctx, &qi(2), e - j)?;
        return Ok(Some(Classification {
            shape: Shape::One,
            j: Some(j),
            irreducible: false,
            sub_object: Some(sub),
            slopes,
        }));
    }
    Ok(None)
}

fn try_shape_two(obj: &TildeObject) -> Result<Option<Classification>> {
    let ctx = obj.ctx();
    let e = ctx.e();
    let p = ctx.p() as usize;
    for (i, o) in [(0, 1), (1, 0)] {
        let (pg, qg) = (&obj.fil_gens[i], &obj.fil_gens[o]);
        let (pim, qim) = (&obj.phi_images[i], &obj.phi_images[o]);
        let j = pg[1].val_u();
        if pg[0].val_u() != e || j >= e || qg[0].val_u() != 2 * e - j || qg[1].val_u() != e {
            continue;
        }
        let alpha = pg[0].unshift(e)?;
        let beta = pg[1].unshift(j)?;
        let gamma = qg[0].unshift(2 * e - j)?;
        let delta = qg[1].unshift(e)?;
        if !alpha.mul(&delta).sub(&beta.mul(&gamma)).is_unit() {
            continue;
        }
        let shift = p * (e - j);
        if !(pim[1].is_zero() && pim[0].is_unit() && qim[1].is_unit() && qim[0].val_u() >= shift) {
            continue;
        }
        let mu = &pim[0];
        let rho = &qim[1];
        let sigma = qim[0].unshift(shift)?;
        let pa = alpha.phi();
        let x = pa.mul(&sigma).sub(&gamma.phi().mul(mu)).mul(&rho.mul(&pa).inv()?);
        let m = [x.shift(shift), TildePoly::from_int(ctx, 1)];
        let sub = sub_object(obj, m, e)?;
        let slopes = split_slopes(ctx, &qi(2), e)?;
        return Ok(Some(Classification {
            shape: Shape::Two,
            j: Some(j),
            irreducible: false,
            sub_object: Some(sub),
            slopes,
        }));
    }
    Ok(None)
}

/// Recognizes one of the normalized shapes (0), (1), (2) after unit
/// rescaling and elimination, and returns the inertia slopes.
pub fn classify_rank2(obj: &TildeObject) -> Result<Classification> {
    if obj.ctx().r() != 2 {
        return Err(Error::Unsupported("classification is for r = 2".into()));
    }
    if let Some(c) = try_shape_one(obj)? {
        return Ok(c);
    }
    if let Some(c) = try_shape_two(obj)? {
        return Ok(c);
    }
    let [g1, g2] = &obj.fil_gens;
    Err(Error::Shape(format!(
        "generators ({}, {}), ({}, {})",
        g1[0], g1[1], g2[0], g2[1]
    )))
}

/// Inertia slopes (1 − v, 1 + v) for v < 1 and (0, 2) otherwise.
pub fn inertia_polygon(v: &KVal) -> Result<Polygon> {
    let one = qi(1);
    match v {
        KVal::Finite(v) if *v < qi(0) => Err(Error::Invalid(format!("v = {v} is negative"))),
        KVal::Finite(v) if *v < one => Ok(Polygon::from_slopes(vec![&one - v, &one + v])),
        KVal::Finite(_) | KVal::Infinite { at_least: None } => Ok(Polygon::from_ints(&[0, 2])),
        KVal::Infinite { at_least: Some(b) } if *b >= one => Ok(Polygon::from_ints(&[0, 2])),
        KVal::Infinite { at_least: Some(b) } => Err(precision(
            "inertia polygon",
            format!("v is only known to lie in [{b}, ∞]"),
        )),
    }
}

/// Tame inertia weight r − s/e of a rank-one object with Fil^r = u^s·M.
pub fn rank1_inertia_weight(s: usize, e: usize, r: usize) -> Result<Q> {
    if s > e * r {
        return Err(Error::Invalid(format!("s = {s} exceeds e·r = {}", e * r)));
    }
    Ok(qi(r as i64) - q(s as i64, e as i64))
}

#[derive(Clone, Debug)]
pub struct InequalityCheck {
    pub k: usize,
    pub lhs: Q,
    pub rhs: Q,
    pub equality: bool,
    pub holds: bool,
}

impl fmt::Display for InequalityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.equality { "=" } else { "<=" };
        write!(f, "k={}: {} {rel} {}", self.k, self.lhs, self.rhs)
    }
}

/// e·(h_1 + … + h_k) ≤ i_1 + … + i_k with i = e·(inertia slopes), equality
/// at k = d.
pub fn hodge_inertia_checks(hodge: &Polygon, inertia: &Polygon, e: usize) -> Result<Vec<InequalityCheck>> {
    if hodge.width() != inertia.width() {
        return Err(Error::WidthMismatch(hodge.width(), inertia.width()));
    }
    let eq = qi(e as i64);
    let d = hodge.width();
    Ok((1..=d)
        .map(|k| {
            let lhs = &eq * hodge.ordinate(k);
            let rhs = &eq * inertia.ordinate(k);
            let equality = k == d;
            let holds = if equality { lhs == rhs } else { lhs <= rhs };
            InequalityCheck {
                k,
                lhs,
                rhs,
                equality,
                holds,
            }
        })
        .collect())
}

/// For every k such that h_k' = n_k' for all k' ≤ k: i_k = e·h_k.
pub fn newton_inertia_checks(
    hodge: &Polygon,
    newton: &Polygon,
    inertia: &Polygon,
    e: usize,
) -> Result<Vec<InequalityCheck>> {
    if hodge.width() != newton.width() {
        return Err(Error::WidthMismatch(hodge.width(), newton.width()));
    }
    if hodge.width() != inertia.width() {
        return Err(Error::WidthMismatch(hodge.width(), inertia.width()));
    }
    let eq = qi(e as i64);
    let mut out = Vec::new();
    for k in 0..hodge.width() {
        if hodge.slopes()[k] != newton.slopes()[k] {
            break;
        }
        let lhs = &eq * &hodge.slopes()[k];
        let rhs = &eq * &inertia.slopes()[k];
        out.push(InequalityCheck {
            k: k + 1,
            holds: lhs == rhs,
            lhs,
            rhs,
            equality: true,
        });
    }
    Ok(out)
}

/// Everything computed for one member of the family.
#[derive(Clone, Debug)]
pub struct FamilyRun {
    pub original: FamilyParams,
    pub transforms: Vec<Transform>,
    pub elements: FamilyElements,
    pub hodge_v: Polygon,
    pub newton_v: Polygon,
    pub lattice: StrongLattice,
    pub divisibility: DivisibilityReport,
    pub sabotage: DivisibilityReport,
    pub reduction: TildeObject,
    pub hodge_mbar: Polygon,
    pub classification: Classification,
    /// From v when determined, else from the classification.
    pub inertia: Polygon,
    pub hodge_checks: Vec<InequalityCheck>,
    pub newton_checks: Vec<InequalityCheck>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
}

impl FamilyRun {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

fn pair_str(x: &Pair) -> String {
    format!("({}, {})", x[0], x[1])
}

/// Closed forms for g_1, g_2 and their φ_2-images from the structure of
/// ℳ/pℳ, compared with the reduction.
pub fn structure_checks(lat: &StrongLattice, obj: &TildeObject) -> Result<Vec<Verdict>> {
    let el = &lat.elements;
    let ctx = el.ctx();
    let e = ctx.e();
    let s = |p: &Poly<Witt>| STrunc::from_poly(ctx, p);
    let red = |p: &Poly<Witt>| s(p).reduce();
    let c = STrunc::c(ctx);
    let one_plus = el.one_plus_c_phi_t();
    let inv = one_plus.unit_inverse()?;
    let zero = TildePoly::zero(ctx);
    let mut out = Vec::new();

    let g1 = [red(&el.t)?.shift(e), red(&el.b1)?];
    out.push(Verdict::new(
        "g_1 = u^e t̄ f_1 + B̄_1 f_2",
        obj.fil_gens[0] == g1,
        pair_str(&obj.fil_gens[0]),
    ));
    let im1 = [one_plus.reduce()?, zero.clone()];
    out.push(Verdict::new(
        "φ_2(g_1) = (1 + cφ(t)) f_1",
        obj.phi_images[0] == im1,
        pair_str(&obj.phi_images[0]),
    ));
    let c2 = c.mul(&c);
    match el.case {
        CaseTag::UnitResidue => {
            let g2 = [TildePoly::u_pow(ctx, 2 * e), zero.clone()];
            out.push(Verdict::new("g_2 = u^(2e) f_1", obj.fil_gens[1] == g2, pair_str(&obj.fil_gens[1])));
            let gap = STrunc::constant(ctx, el.sigma_lambda.clone()).sub(&s(&el.l0));
            let coef = c2.mul(&gap.phi()).mul(&inv);
            let im2 = [zero.clone(), coef.reduce()?];
            out.push(Verdict::new(
                "φ_2(g_2) = c²φ(σ(λ) − L_0)/(1 + cφ(t)) f_2",
                obj.phi_images[1] == im2 && im2[1].is_unit(),
                pair_str(&obj.phi_images[1]),
            ));
            out.push(Verdict::new("B̄_1 is a unit", g1[1].is_unit(), g1[1].to_string()));
        }
        CaseTag::Fractional => {
            let b2 = el.b2.as_ref().expect("case ii has B_2");
            let ubar = red(&el.u_cofactor)?;
            let g2 = [ubar.shift(e), red(b2)?];
            out.push(Verdict::new(
                "g_2 = u^e Ū f_1 + B̄_2 f_2",
                obj.fil_gens[1] == g2,
                pair_str(&obj.fil_gens[1]),
            ));
            let tv = s(&el.t).sub(&s(&el.v_cofactor));
            let im2 = [
                c.mul(&s(&el.u_cofactor).phi()).reduce()?,
                c2.mul(&tv.phi()).mul(&inv).reduce()?,
            ];
            out.push(Verdict::new(
                "φ_2(g_2) = cφ(U) f_1 + c²φ(t − V)/(1 + cφ(t)) f_2",
                obj.phi_images[1] == im2 && im2[1].is_unit(),
                pair_str(&obj.phi_images[1]),
            ));
            let tbar = red(&el.t)?;
            let mix = tbar.mul(&g2[1]).sub(&g1[1].mul(&ubar));
            let lhs = mix.coeff(e);
            let rhs = tbar.sub(&red(&el.v_cofactor)?).coeff(0);
            out.push(Verdict::new(
                "u^e-coefficient of t̄B̄_2 − B̄_1Ū equals (t̄ − V̄)(0) ≠ 0",
                lhs == rhs && !rhs.is_zero(),
                format!("{lhs} vs {rhs}"),
            ));
        }
    }
    Ok(out)
}

/// Runs the whole pipeline on D(L) with n1 = n2 = 1.
pub fn run_family(params: &FamilyParams) -> Result<FamilyRun> {
    params.validate()?;
    let module = params.filtered_module()?;
    let hodge_v = module.hodge_polygon();
    let newton_v = module.newton_polygon()?;
    let mut verdicts = Vec::new();
    let mut warnings = Vec::new();
    verdicts.push(Verdict::new(
        "D(L) weakly admissible",
        module.weakly_admissible()?,
        format!("Hodge {hodge_v}, Newton {newton_v}"),
    ));

    let (l_norm, transforms) = normalize_l(&params.l)?;
    let norm_params = FamilyParams {
        n1: 1,
        n2: 1,
        l: l_norm.clone(),
    };
    let elements = build_elements(&norm_params)?;
    let lattice = strong_lattice(&elements, 1)?;
    let divisibility = verify_strong_divisibility(&lattice)?;
    verdicts.push(Verdict::new(
        "strong divisibility",
        divisibility.all_pass(),
        format!(
            "{} generators checked, φ_2-images generate: {}",
            divisibility.entries.len(),
            divisibility.generates
        ),
    ));
    let ctx = elements.ctx().clone();
    let sabotaged_z = elements.z.add(&STrunc::from_int(&ctx, 1));
    let sabotage = verify_strong_divisibility(&StrongLattice::with_z(&elements, sabotaged_z, 1))?;
    let failing: Vec<&str> = sabotage
        .entries
        .iter()
        .filter(|v| !v.holds)
        .map(|v| v.name.as_str())
        .collect();
    verdicts.push(Verdict::new(
        "sabotaged lattice (Z + 1) fails",
        !sabotage.all_pass(),
        format!("failing: {}", failing.join(", ")),
    ));

    let reduction = reduce_mod_p(&lattice)?;
    for v in structure_checks(&lattice, &reduction)? {
        verdicts.push(v);
    }
    let second = match elements.case {
        CaseTag::UnitResidue => {
            let e = STrunc::eisenstein(&ctx);
            e.mul(&e)
        }
        CaseTag::Fractional => {
            STrunc::from_poly(&ctx, &elements.u_cofactor).mul(&STrunc::eisenstein(&ctx))
        }
    };
    let main = STrunc::from_int(&ctx, ctx.p())
        .add(&STrunc::from_poly(&ctx, &elements.t).mul(&STrunc::eisenstein(&ctx)));
    for (i, a) in [main, second].iter().enumerate() {
        let via_c = phi2_image(&lattice, a)?;
        let direct = &reduction.phi_images[i];
        verdicts.push(Verdict::new(
            format!("φ_2(g_{}) direct = C-formula", i + 1),
            &via_c == direct,
            format!("{} vs {}", pair_str(direct), pair_str(&via_c)),
        ));
    }

    let hodge_mbar = reduction.hodge_polygon()?;
    let vl = match l_norm.val_p() {
        KVal::Finite(v) => v,
        _ => return Err(precision("v_p(L)", "L vanishes at working precision")),
    };
    let expected = Polygon::from_slopes(vec![vl.clone(), qi(2) - &vl]);
    verdicts.push(Verdict::new(
        "Hodge(M/pM) = (v_p(L), 2 − v_p(L))",
        hodge_mbar == expected,
        format!("{hodge_mbar} vs {expected}"),
    ));

    let classification = classify_rank2(&reduction)?;
    if let KVal::Infinite { at_least: Some(b) } = elements.v() {
        warnings.push(format!("t(π) vanishes at working precision: v ∈ [{b}, ∞]"));
    }
    let inertia = match inertia_polygon(&elements.v()) {
        Ok(poly) => {
            verdicts.push(Verdict::new(
                "inertia from v = inertia from classification",
                poly == classification.slopes,
                format!("v = {}: {poly}; shape ({}): {}", elements.v(), classification.shape, classification.slopes),
            ));
            poly
        }
        Err(err) => {
            warnings.push(err.to_string());
            classification.slopes.clone()
        }
    };
    verdicts.push(Verdict::new(
        "inertia lies above Hodge(M/pM) with the same endpoint",
        inertia.lies_above(&hodge_mbar)? && inertia.same_endpoint(&hodge_mbar)?,
        format!("{inertia} vs {hodge_mbar}"),
    ));
    let e = ctx.e();
    let hodge_checks = hodge_inertia_checks(&hodge_v, &inertia, e)?;
    verdicts.push(Verdict::new(
        "e·Hodge(V) below inertia weights",
        hodge_checks.iter().all(|c| c.holds),
        hodge_checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "),
    ));
    let newton_checks = newton_inertia_checks(&hodge_v, &newton_v, &inertia, e)?;
    verdicts.push(Verdict::new(
        "inertia agrees with Hodge while Hodge = Newton",
        newton_checks.iter().all(|c| c.holds),
        if newton_checks.is_empty() {
            "Hodge and Newton differ at k = 1".to_string()
        } else {
            newton_checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
        },
    ));
    Ok(FamilyRun {
        original: params.clone(),
        transforms,
        elements,
        hodge_v,
        newton_v,
        lattice,
        divisibility,
        sabotage,
        reduction,
        hodge_mbar,
        classification,
        inertia,
        hodge_checks,
        newton_checks,
        verdicts,
        warnings,
    })
}

/// The pseudo strongly divisible module without monodromy: ℳ = Se_1 ⊕ Se_2,
/// Fil^(2n) spanned by E^n e_1 and p e_1 + E^n e_2, φ(e_1) = c^n p^n e_2,
/// φ(e_2) = c^n p^n e_1 − p e_2, with e = 1 and E(u) = u − p.
#[derive(Clone, Debug)]
pub struct PseudoReport {
    pub p: i64,
    pub n: u32,
    pub phi_at_zero: Vec<Vec<Witt>>,
    pub hodge_mod_p: Polygon,
    pub hodge_integral: Polygon,
    pub newton: Polygon,
    pub first_step: Vec<FirstStepCheck>,
    pub verdicts: Vec<Verdict>,
}

pub fn pseudo_counterexample(p: i64, n: u32) -> Result<PseudoReport> {
    let r = 2 * n as usize;
    if n == 0 || r as i64 >= p - 1 {
        return Err(Error::Config(format!("need 0 < 2n < p − 1, got n = {n}, p = {p}")));
    }
    let ctx = RingConfig::new(&RingParams::new(p, 1, 1, r).with_eisenstein_ints(&[-p, 1]))?;
    let eis = STrunc::eisenstein(&ctx);
    let en = (0..n).fold(STrunc::from_int(&ctx, 1), |acc, _| acc.mul(&eis));
    let zero = STrunc::from_int(&ctx, 0);
    let pe = STrunc::from_int(&ctx, p);
    let gens: [[STrunc; 2]; 2] = [[en.clone(), zero.clone()], [pe, en.clone()]];
    let cn = (0..n).fold(STrunc::from_int(&ctx, 1), |acc, _| acc.mul(&STrunc::c(&ctx)));
    let cnpn = cn.mul_p_pow(n as i32);
    // φ(a e_1 + b e_2) = (φ(b)·c^n p^n, φ(a)·c^n p^n − p·φ(b))
    let phi = |x: &[STrunc; 2]| -> [STrunc; 2] {
        let (pa, pb) = (x[0].phi(), x[1].phi());
        [pb.mul(&cnpn), pa.mul(&cnpn).sub(&pb.mul_p_pow(1))]
    };
    let mut verdicts = Vec::new();
    let mut images = Vec::new();
    let mut divisible = true;
    for g in &gens {
        let [x, y] = phi(g);
        let ok = p_divisible(&x, r as i32)? && p_divisible(&y, r as i32)?;
        divisible &= ok;
        if ok {
            images.push([x.div_p_pow(r as i32).reduce()?, y.div_p_pow(r as i32).reduce()?]);
        }
    }
    let generates = images.len() == 2 && {
        let d = images[0][0].mul(&images[1][1]).sub(&images[1][0].mul(&images[0][1]));
        d.is_unit()
    };
    verdicts.push(Verdict::new(
        "φ(Fil^r M) ⊂ p^r M and φ_r-images generate",
        divisible && generates,
        format!("divisible: {divisible}, generate: {generates}"),
    ));

    let tilde = TildeCarrier::new(&ctx);
    let top = TildePoly::u_pow(&ctx, r);
    let tz = TildePoly::zero(&ctx);
    let red: Vec<[TildePoly; 2]> = gens
        .iter()
        .map(|g| Ok([g[0].reduce()?, g[1].reduce()?]))
        .collect::<Result<_>>()?;
    let mat = vec![
        vec![red[0][0].clone(), red[1][0].clone(), top.clone(), tz.clone()],
        vec![red[0][1].clone(), red[1][1].clone(), tz, top],
    ];
    let mod_p_ex = divisor_exponents(&tilde, &mat)?;
    let hodge_mod_p = Polygon::from_slopes(hodge_weights(&mod_p_ex, r as u32, 1, WeightMode::ModP)?);

    let eis_carrier = EisensteinCarrier::new(&ctx);
    let er = STrunc::from_poly(&ctx, ctx.eisenstein_pow(r));
    let imat = vec![
        vec![gens[0][0].clone(), gens[1][0].clone(), er.clone(), zero.clone()],
        vec![gens[0][1].clone(), gens[1][1].clone(), zero, er],
    ];
    let int_ex = divisor_exponents(&eis_carrier, &imat)?;
    let hodge_integral = Polygon::from_slopes(hodge_weights(&int_ex, r as u32, 1, WeightMode::Integral)?);
    let first_step = first_step_checks(&int_ex, &mod_p_ex, 1)?;

    let entry = cnpn.f_zero();
    let w0 = ctx.zero_w();
    let phi_at_zero = vec![
        vec![w0.clone(), entry.clone()],
        vec![entry, ctx.w_int(-p)],
    ];
    let cp = charpoly(&phi_at_zero, &w0);
    let vals: Vec<Option<Q>> = cp.iter().map(|c| c.valuation().map(|v| qi(v as i64))).collect();
    let newton = newton_polygon(&vals)?;

    let nn = n as i64;
    verdicts.push(Verdict::new(
        "Hodge(M/pM) = (n, n)",
        hodge_mod_p == Polygon::from_ints(&[nn, nn]),
        hodge_mod_p.to_string(),
    ));
    verdicts.push(Verdict::new(
        "Newton = (1, r − 1)",
        newton == Polygon::from_ints(&[1, 2 * nn - 1]),
        newton.to_string(),
    ));
    verdicts.push(Verdict::new(
        "Hodge(M/pM) lies above Newton",
        hodge_mod_p.lies_above(&newton)?,
        format!("{hodge_mod_p} vs {newton}"),
    ));
    verdicts.push(Verdict::new(
        "Newton strictly below inertia at k = 1",
        hodge_mod_p.strictly_above_at(&newton, 1)?,
        format!("{} > {}", hodge_mod_p.ordinate(1), newton.ordinate(1)),
    ));
    verdicts.push(Verdict::new(
        "first comparison step",
        first_step.iter().all(|c| c.holds),
        first_step
            .iter()
            .map(|c| format!("k={}: {} vs {}", c.k, c.lhs, c.rhs))
            .collect::<Vec<_>>()
            .join("; "),
    ));
    Ok(PseudoReport {
        p,
        n,
        phi_at_zero,
        hodge_mod_p,
        hodge_integral,
        newton,
        first_step,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize, e: usize) -> Arc<RingConfig> {
        RingConfig::new(&RingParams::new(7, m, e, 2).with_prec(7)).unwrap()
    }

    fn teich(ctx: &Arc<RingConfig>) -> Witt {
        ctx.witt().teichmuller(&ctx.witt().fq_generator())
    }

    fn params(l: KElem) -> FamilyParams {
        FamilyParams { n1: 1, n2: 1, l }
    }

    #[test]
    fn slope_table() {
        let ctx = ctx(2, 2);
        let x = KElem::from_witt(&ctx, teich(&ctx));
        let pi = KElem::pi(&ctx);
        for (l, v, slopes) in [
            (pi.clone(), KVal::Finite(qi(0)), [qi(1), qi(1)]),
            (x.clone(), KVal::Infinite { at_least: None }, [qi(0), qi(2)]),
            (x.add(&pi), KVal::Finite(q(1, 2)), [q(1, 2), q(3, 2)]),
        ] {
            let run = run_family(&params(l.clone())).unwrap();
            assert_eq!(run.elements.v(), v, "{l}");
            assert_eq!(run.inertia, Polygon::from_slopes(slopes.to_vec()), "{l}");
            if let Some(sub) = &run.classification.sub_object {
                assert!(sub.checks.iter().any(|c| c.name.starts_with("N(m)")));
            }
            for v in &run.verdicts {
                assert!(v.holds, "{l}: {} ({})", v.name, v.evidence);
            }
        }
    }

    #[test]
    fn normalization() {
        let ctx = ctx(2, 2);
        let x = KElem::from_witt(&ctx, teich(&ctx));
        let p = KElem::from_int(&ctx, 7);
        let l = p.mul(&x).add(&p.mul(&p));
        let (n, log) = normalize_l(&l).unwrap();
        assert!(n.eq_at_prec(&x.add(&p)));
        assert_eq!(case_of(&n).unwrap().0, CaseTag::UnitResidue);
        assert_eq!(log.len(), 1);
        let (same, log) = normalize_l(&KElem::pi(&ctx)).unwrap();
        assert!(log.is_empty());
        assert_eq!(case_of(&same).unwrap(), (CaseTag::Fractional, Some(1)));
        assert!(normalize_l(&KElem::from_int(&ctx, 3)).is_err());
        let shifted = KElem::from_int(&ctx, 3).add(&KElem::pi(&ctx).scale(&ctx.w_int(7)));
        let (n, log) = normalize_l(&shifted).unwrap();
        assert_eq!(case_of(&n).unwrap(), (CaseTag::Fractional, Some(1)));
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn e_equals_one_has_no_t() {
        let ctx = RingConfig::new(&RingParams::new(7, 2, 1, 2).with_prec(7)).unwrap();
        let x = KElem::from_witt(&ctx, teich(&ctx));
        let el = build_elements(&params(x)).unwrap();
        assert!(el.t.is_zero());
        assert_eq!(el.v(), KVal::Infinite { at_least: None });
    }

    #[test]
    fn ideal_membership_agrees() {
        let ctx = ctx(2, 2);
        let l = KElem::pi(&ctx);
        let el = build_elements(&params(l)).unwrap();
        let eis = STrunc::eisenstein(&ctx);
        let main = STrunc::from_int(&ctx, 7).add(&STrunc::from_poly(&ctx, &el.t).mul(&eis));
        let ue = STrunc::from_poly(&ctx, &el.u_cofactor).mul(&eis);
        for (a, inside) in [
            (main, true),
            (ue, true),
            (eis.mul(&eis), true),
            (STrunc::from_int(&ctx, 1), false),
            (eis.clone(), false),
            (STrunc::from_int(&ctx, 7), false),
        ] {
            assert_eq!(ideal_decompose(&el, &a).unwrap().is_some(), inside, "{a}");
            assert_eq!(ideal_contains_direct(&el, &a), inside, "{a}");
        }
    }

    #[test]
    fn eqx_vanishing_twist() {
        let ctx = ctx(2, 2);
        let w = ctx.witt().fq_generator();
        let rho = TildePoly::constant(&ctx, w.clone()).add(&TildePoly::u_pow(&ctx, 3));
        let alpha = TildePoly::from_int(&ctx, 2).add(&TildePoly::u_pow(&ctx, 1));
        let mu = TildePoly::from_int(&ctx, 5);
        let x = solve_eqx(&rho, &alpha, &mu, 2, 1).unwrap();
        let direct = mu.mul(&rho.mul(&alpha.phi()).inv().unwrap()).neg();
        assert_eq!(x, direct);
        let mu2 = rho.mul(&alpha.phi()).neg();
        assert_eq!(solve_eqx(&rho, &alpha, &mu2, 2, 1).unwrap(), TildePoly::from_int(&ctx, 1));
    }

    #[test]
    fn eqx_substitution() {
        let ctx = RingConfig::new(&RingParams::new(13, 1, 5, 2).with_prec(6)).unwrap();
        let rho = TildePoly::from_int(&ctx, 3).add(&TildePoly::u_pow(&ctx, 2));
        let alpha = TildePoly::from_int(&ctx, 5).add(&TildePoly::u_pow(&ctx, 1).scale(&ctx.witt().fq_from_int(4)));
        let mu = TildePoly::from_int(&ctx, 7).add(&TildePoly::u_pow(&ctx, 9));
        let x = solve_eqx(&rho, &alpha, &mu, 5, 4).unwrap();
        assert_eq!(eqx_lhs(&rho, &alpha, &x, 5, 4).unwrap(), mu);
        let x0 = mu.mul(&rho.mul(&alpha.phi()).inv().unwrap()).neg();
        assert_eq!(x.coeff(0), x0.coeff(0));
        assert_ne!(x, x0);
    }

    #[test]
    fn inertia_table() {
        assert_eq!(inertia_polygon(&KVal::Finite(qi(0))).unwrap(), Polygon::from_ints(&[1, 1]));
        assert_eq!(
            inertia_polygon(&KVal::Finite(q(1, 2))).unwrap(),
            Polygon::from_slopes(vec![q(1, 2), q(3, 2)])
        );
        assert_eq!(
            inertia_polygon(&KVal::Infinite { at_least: None }).unwrap(),
            Polygon::from_ints(&[0, 2])
        );
        assert!(inertia_polygon(&KVal::Infinite { at_least: Some(q(1, 2)) }).is_err());
        assert_eq!(rank1_inertia_weight(0, 2, 2).unwrap(), qi(2));
        assert_eq!(rank1_inertia_weight(4, 2, 2).unwrap(), qi(0));
        assert_eq!(rank1_inertia_weight(1, 2, 2).unwrap(), q(3, 2));
        assert!(rank1_inertia_weight(5, 2, 2).is_err());
    }

    #[test]
    fn pseudo_module() {
        for (p, n, hodge, newton) in [(7, 2, [2, 2], [1, 3]), (11, 2, [2, 2], [1, 3]), (7, 1, [1, 1], [1, 1])] {
            let rep = pseudo_counterexample(p, n).unwrap();
            assert_eq!(rep.hodge_mod_p, Polygon::from_ints(&hodge));
            assert_eq!(rep.newton, Polygon::from_ints(&newton));
            assert_eq!(rep.hodge_integral, Polygon::from_ints(&[0, 2 * n as i64]));
            let strict = rep.verdicts.iter().find(|v| v.name.starts_with("Newton strictly")).unwrap();
            assert_eq!(strict.holds, n > 1);
            assert!(rep.verdicts.iter().filter(|v| !v.name.starts_with("Newton strictly")).all(|v| v.holds));
        }
        assert!(pseudo_counterexample(7, 3).is_err());
    }

    #[test]
    fn rank_one_lattice_analogue() {
        let ctx = ctx(1, 2);
        let eis = STrunc::eisenstein(&ctx);
        let img = eis.mul(&eis).phi();
        let c = STrunc::c(&ctx);
        assert!(img.sub(&c.mul(&c).mul_p_pow(2)).is_zero());
        assert!(p_divisible(&img, 2).unwrap());
    }
}
