//! Reports: named polygons, verdicts with evidence, element echoes and
//! warnings. Serialized as JSON with a fixed key order.

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use serde::{Deserialize, Serialize};

use hodge_inertia::adapted::{divisor_exponents, exponents_by_minors, Carrier, EisensteinCarrier, TildeCarrier, WittCarrier};
use hodge_inertia::arith::{STrunc, TildePoly, Witt};
use hodge_inertia::breuil::{pseudo_counterexample, run_family, FamilyRun, PseudoReport, Verdict};
use hodge_inertia::fontaine::FilteredModule;
use hodge_inertia::polygons::{Polygon, Q};
use hodge_inertia::ring::Matrix;

use crate::doc::{self, CarrierKind, InstanceDoc, Mode};
use crate::expr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedPolygon {
    pub name: String,
    /// Vertices (k, ordinate) as rational strings "num/den".
    pub vertices: Vec<[String; 2]>,
}

impl NamedPolygon {
    pub fn new(name: &str, poly: &Polygon) -> NamedPolygon {
        NamedPolygon {
            name: name.into(),
            vertices: poly.vertices().iter().map(|(k, y)| [k.to_string(), y.to_string()]).collect(),
        }
    }

    pub fn points(&self) -> Result<Vec<(Q, Q)>> {
        self.vertices
            .iter()
            .map(|[x, y]| {
                let parse = |s: &str| s.parse::<Q>().map_err(|_| anyhow!("polygon {}: bad rational \"{s}\"", self.name));
                Ok((parse(x)?, parse(y)?))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub name: String,
    pub holds: bool,
    pub evidence: String,
}

impl From<&Verdict> for VerdictRow {
    fn from(v: &Verdict) -> VerdictRow {
        VerdictRow {
            name: v.name.clone(),
            holds: v.holds,
            evidence: v.evidence.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub mode: String,
    pub polygons: Vec<NamedPolygon>,
    pub verdicts: Vec<VerdictRow>,
    pub elements: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(mode: &str) -> Report {
        Report {
            mode: mode.into(),
            polygons: Vec::new(),
            verdicts: Vec::new(),
            elements: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn polygon(&mut self, name: &str, poly: &Polygon) {
        self.polygons.push(NamedPolygon::new(name, poly));
    }

    fn element(&mut self, key: &str, value: impl ToString) {
        self.elements.insert(key.into(), value.to_string());
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

pub fn analyze(doc: &InstanceDoc, prec: Option<u32>) -> Result<Report> {
    match doc.mode {
        Mode::Family => family_report(&run_family(&doc::family_params(doc, prec)?)?),
        Mode::Pseudo => {
            let (p, n) = doc::pseudo_n(doc)?;
            Ok(pseudo_report(&pseudo_counterexample(p, n)?))
        }
        Mode::Filtered => filtered_report(doc, prec),
        Mode::Matrix => matrix_report(doc, prec),
    }
}

fn strunc(run: &FamilyRun, p: &hodge_inertia::ring::Poly<Witt>) -> String {
    STrunc::from_poly(run.elements.ctx(), p).to_string()
}

pub fn family_report(run: &FamilyRun) -> Result<Report> {
    let mut rep = Report::new("family");
    rep.polygon("Hodge(D)", &run.hodge_v);
    rep.polygon("Newton(D)", &run.newton_v);
    rep.polygon("Hodge(M/pM)", &run.hodge_mbar);
    rep.polygon("inertia", &run.inertia);
    rep.verdicts = run.verdicts.iter().map(VerdictRow::from).collect();
    let el = &run.elements;
    rep.element("L", &run.original.l);
    rep.element("L_normalized", &el.l);
    rep.element(
        "transforms",
        run.transforms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("; "),
    );
    rep.element("case", el.case);
    if let Some(j) = el.j {
        rep.element("j", j);
    }
    rep.element("lambda", &el.lambda);
    rep.element("t", strunc(run, &el.t));
    rep.element("v", el.v());
    rep.element("Z", &el.z);
    rep.element("U", strunc(run, &el.u_cofactor));
    rep.element("V", strunc(run, &el.v_cofactor));
    rep.element("B_1", strunc(run, &el.b1));
    if let Some(b2) = &el.b2 {
        rep.element("B_2", strunc(run, b2));
    }
    rep.element("hermite", strunc(run, &el.hermite));
    let pair = |x: &[TildePoly; 2]| format!("({}, {})", x[0], x[1]);
    for (i, (g, img)) in run.reduction.fil_gens.iter().zip(&run.reduction.phi_images).enumerate() {
        rep.element(&format!("g_{}", i + 1), pair(g));
        rep.element(&format!("phi_2(g_{})", i + 1), pair(img));
    }
    let cls = &run.classification;
    rep.element("shape", cls.shape);
    rep.element("irreducible", cls.irreducible);
    if let Some(sub) = &cls.sub_object {
        rep.element("sub_object", pair(&sub.generator));
        rep.element("sub_object_fil_exponent", sub.fil_exponent);
    }
    rep.warnings = run.warnings.clone();
    Ok(rep)
}

pub fn pseudo_report(pr: &PseudoReport) -> Report {
    let mut rep = Report::new("pseudo");
    rep.polygon("Hodge(M/pM)", &pr.hodge_mod_p);
    rep.polygon("Hodge(M)", &pr.hodge_integral);
    rep.polygon("Newton", &pr.newton);
    rep.verdicts = pr.verdicts.iter().map(VerdictRow::from).collect();
    rep.element("p", pr.p);
    rep.element("n", pr.n);
    let rows: Vec<String> = pr
        .phi_at_zero
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    rep.element("phi_at_u=0", format!("[{}]", rows.join(", ")));
    rep
}

fn filtered_report(doc: &InstanceDoc, prec: Option<u32>) -> Result<Report> {
    let input = doc::filtered_input(doc, prec)?;
    let module = FilteredModule::new(&input.ctx, input.phi, input.monodromy, input.steps)?;
    let mut rep = Report::new("filtered");
    rep.polygon("Hodge", &module.hodge_polygon());
    rep.polygon("Newton", &module.newton_polygon()?);
    let (th, tn) = module.t_numbers()?;
    rep.element("t_H", th);
    rep.element("t_N", tn);
    match module.weakly_admissible() {
        Ok(wa) => rep.element("weakly_admissible", wa),
        Err(err) => rep.warnings.push(format!("weak admissibility: {err}")),
    }
    Ok(rep)
}

fn exponents_report<C: Carrier>(carrier: &C, mat: &Matrix<C::Elem>) -> Result<Report> {
    let mut rep = Report::new("matrix");
    let ex = divisor_exponents(carrier, mat)?;
    rep.element("carrier", carrier.name());
    rep.element("modulus_exponent", carrier.cap());
    rep.element("exponents", format!("{ex:?}"));
    if mat.len() <= 4 {
        let minors = exponents_by_minors(carrier, mat)?;
        rep.verdicts.push(VerdictRow {
            name: "reduction agrees with minor enumeration".into(),
            holds: minors == ex,
            evidence: format!("reduction {ex:?}, minors {minors:?}"),
        });
    } else {
        rep.warnings.push("rank above 4: minor enumeration skipped".into());
    }
    Ok(rep)
}

fn matrix_report(doc: &InstanceDoc, prec: Option<u32>) -> Result<Report> {
    let (ctx, m) = doc::matrix_input(doc, prec)?;
    fn entries<T: expr::Target>(
        ctx: &std::sync::Arc<hodge_inertia::arith::RingConfig>,
        rows: &[Vec<String>],
    ) -> Result<Matrix<T>> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, s)| expr::value::<T>(ctx, &format!("matrix.entries[{i}][{j}]"), s))
                    .collect()
            })
            .collect()
    }
    match m.carrier {
        CarrierKind::Witt => {
            let n = match &m.modulus {
                Some(n) => u32::try_from(n.get("matrix.modulus")?).map_err(|_| anyhow!("matrix.modulus out of range"))?,
                None => ctx.prec(),
            };
            exponents_report(&WittCarrier::new(ctx.witt(), n), &entries::<Witt>(&ctx, &m.entries)?)
        }
        CarrierKind::Tilde => exponents_report(&TildeCarrier::new(&ctx), &entries::<TildePoly>(&ctx, &m.entries)?),
        CarrierKind::Eisenstein => {
            exponents_report(&EisensteinCarrier::new(&ctx), &entries::<STrunc>(&ctx, &m.entries)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> InstanceDoc {
        doc::parse_doc(text).unwrap()
    }

    #[test]
    fn family_pi() {
        let rep = analyze(
            &doc("mode = \"family\"\n[ring]\np = 7\nm = 2\ne = 2\nprec = 7\n[family]\nn1 = 1\nn2 = 1\nL = \"pi\"\n"),
            None,
        )
        .unwrap();
        let get = |n: &str| rep.polygons.iter().find(|p| p.name == n).unwrap().vertices.clone();
        let pts: Vec<[String; 2]> = [("0", "0"), ("1", "1"), ("2", "2")].iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect();
        assert_eq!(get("inertia"), pts);
        assert_eq!(get("Hodge(M/pM)")[1], ["1".to_string(), "1/2".to_string()]);
        assert!(rep.all_hold());
        assert_eq!(rep.elements["v"], "0");
    }

    #[test]
    fn pseudo_and_matrix() {
        let rep = analyze(&doc("mode = \"pseudo\"\n[ring]\np = 7\n[pseudo]\nn = 2\n"), None).unwrap();
        assert!(rep.all_hold());
        let newton = rep.polygons.iter().find(|p| p.name == "Newton").unwrap();
        assert_eq!(newton.vertices[1], ["1".to_string(), "1".to_string()]);
        let rep = analyze(
            &doc("mode = \"matrix\"\n[ring]\np = 7\n[matrix]\ncarrier = \"witt\"\nentries = [[\"1\", \"0\"], [\"0\", \"1\"]]\n"),
            None,
        )
        .unwrap();
        assert_eq!(rep.elements["exponents"], "[0, 0]");
        assert!(rep.all_hold());
    }

    #[test]
    fn filtered_rank_two() {
        let rep = analyze(
            &doc(
                "mode = \"filtered\"\n[ring]\np = 7\n[filtered]\nphi = [[\"1\", \"0\"], [\"0\", \"7\"]]\njumps = [{ t = 0, basis = [[\"1\", \"0\"], [\"0\", \"1\"]] }, { t = 1, basis = [[\"1\", \"1\"]] }]\n",
            ),
            None,
        )
        .unwrap();
        assert_eq!(rep.elements["t_H"], "1");
        assert_eq!(rep.elements["t_N"], "1");
        assert_eq!(rep.elements["weakly_admissible"], "true");
    }
}
