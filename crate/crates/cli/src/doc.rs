//! Instance documents (TOML).
//!
//! ```toml
//! mode = "family"
//! [ring]
//! p = 7
//! m = 2
//! e = 2
//! E = ["-7", "0", "1"]   # optional, lowest degree first; default u^e − p
//! prec = 7
//! [family]
//! n1 = 1
//! n2 = 1
//! L = "x + pi"            # or a list of coefficients of 1, π, π², …
//! ```

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use hodge_inertia::arith::{KElem, RingConfig, RingParams, Witt};
use hodge_inertia::fontaine::{FamilyParams, FilStep};
use hodge_inertia::ring::{Matrix, Ring};

use crate::expr;

/// An integer written either as a TOML integer or as a decimal string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Num(i64),
    Text(String),
}

impl Int {
    pub fn get(&self, field: &str) -> Result<i64> {
        match self {
            Int::Num(n) => Ok(*n),
            Int::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| anyhow!("{field}: \"{s}\" is not a decimal integer")),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Family,
    Pseudo,
    Filtered,
    Matrix,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    pub p: Int,
    pub m: Option<Int>,
    pub e: Option<Int>,
    #[serde(rename = "E")]
    pub eisenstein: Option<Vec<Int>>,
    pub prec: Option<Int>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum LValue {
    Expr(String),
    Coeffs(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub n1: Int,
    pub n2: Int,
    #[serde(rename = "L")]
    pub l: LValue,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoSection {
    pub n: Int,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSection {
    pub t: Int,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredSection {
    pub phi: Vec<Vec<String>>,
    #[serde(rename = "N")]
    pub monodromy: Option<Vec<Vec<String>>>,
    pub jumps: Vec<JumpSection>,
    pub r: Option<Int>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CarrierKind {
    Witt,
    Tilde,
    Eisenstein,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSection {
    pub carrier: CarrierKind,
    /// Rows are coordinates, columns are generators.
    pub entries: Vec<Vec<String>>,
    /// Exponent N of W/p^N (witt carrier only).
    pub modulus: Option<Int>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub mode: Mode,
    pub ring: RingSection,
    pub family: Option<FamilySection>,
    pub pseudo: Option<PseudoSection>,
    pub filtered: Option<FilteredSection>,
    pub matrix: Option<MatrixSection>,
}

pub fn parse_doc(text: &str) -> Result<InstanceDoc> {
    toml::from_str(text).map_err(|e| anyhow!("{e}"))
}

fn small(field: &str, v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| anyhow!("{field}: {v} must be non-negative"))
}

impl InstanceDoc {
    pub fn section<'a, T>(&self, name: &str, s: &'a Option<T>) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| anyhow!("mode = {:?} needs a [{name}] section", self.mode))
    }

    /// Ring for this document with filtration bound r, `prec` overriding
    /// the document's precision.
    pub fn ring(&self, r: usize, prec: Option<u32>) -> Result<Arc<RingConfig>> {
        let ring = &self.ring;
        let p = ring.p.get("ring.p")?;
        let m = small("ring.m", ring.m.as_ref().map_or(Ok(1), |x| x.get("ring.m"))?)?;
        let e = small("ring.e", ring.e.as_ref().map_or(Ok(1), |x| x.get("ring.e"))?)?;
        let mut params = RingParams::new(p, m, e, r);
        if let Some(coeffs) = &ring.eisenstein {
            let ints = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.get(&format!("ring.E[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            params = params.with_eisenstein_ints(&ints);
        }
        let doc_prec = ring.prec.as_ref().map(|x| x.get("ring.prec")).transpose()?;
        if let Some(pr) = prec.map(i64::from).or(doc_prec) {
            params = params.with_prec(u32::try_from(pr).map_err(|_| anyhow!("ring.prec: {pr} out of range"))?);
        }
        RingConfig::new(&params).context("ring")
    }
}

pub fn family_params(doc: &InstanceDoc, prec: Option<u32>) -> Result<FamilyParams> {
    let fam = doc.section("family", &doc.family)?;
    let n1 = u32::try_from(fam.n1.get("family.n1")?).map_err(|_| anyhow!("family.n1 must be non-negative"))?;
    let n2 = u32::try_from(fam.n2.get("family.n2")?).map_err(|_| anyhow!("family.n2 must be non-negative"))?;
    let ctx = doc.ring((n1 + n2) as usize, prec)?;
    let l = l_value(&ctx, &fam.l)?;
    Ok(FamilyParams { n1, n2, l })
}

pub fn l_value(ctx: &Arc<RingConfig>, l: &LValue) -> Result<KElem> {
    match l {
        LValue::Expr(s) => expr::value(ctx, "family.L", s),
        LValue::Coeffs(cs) => {
            let pi = KElem::pi(ctx);
            let mut acc = KElem::from_int(ctx, 0);
            for (i, c) in cs.iter().enumerate().rev() {
                let term: KElem = expr::value(ctx, &format!("family.L[{i}]"), c)?;
                acc = acc.mul(&pi).add(&term);
            }
            Ok(acc)
        }
    }
}

pub fn pseudo_n(doc: &InstanceDoc) -> Result<(i64, u32)> {
    let ps = doc.section("pseudo", &doc.pseudo)?;
    let n = u32::try_from(ps.n.get("pseudo.n")?).map_err(|_| anyhow!("pseudo.n must be positive"))?;
    Ok((doc.ring.p.get("ring.p")?, n))
}

fn witt_matrix(ctx: &Arc<RingConfig>, field: &str, rows: &[Vec<String>]) -> Result<Matrix<Witt>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| expr::value::<Witt>(ctx, &format!("{field}[{i}][{j}]"), s))
                .collect()
        })
        .collect()
}

pub struct FilteredInput {
    pub ctx: Arc<RingConfig>,
    pub phi: Matrix<Witt>,
    pub monodromy: Matrix<Witt>,
    pub steps: Vec<FilStep>,
}

pub fn filtered_input(doc: &InstanceDoc, prec: Option<u32>) -> Result<FilteredInput> {
    let f = doc.section("filtered", &doc.filtered)?;
    let r = match &f.r {
        Some(r) => small("filtered.r", r.get("filtered.r")?)?,
        None => {
            let ts = f.jumps.iter().map(|j| j.t.get("filtered.jumps.t")).collect::<Result<Vec<_>>>()?;
            ts.into_iter().max().unwrap_or(1).max(1) as usize
        }
    };
    let ctx = doc.ring(r, prec)?;
    let phi = witt_matrix(&ctx, "filtered.phi", &f.phi)?;
    let d = phi.len();
    let monodromy = match &f.monodromy {
        Some(n) => witt_matrix(&ctx, "filtered.N", n)?,
        None => vec![vec![ctx.zero_w(); d]; d],
    };
    let mut steps = Vec::new();
    for (k, j) in f.jumps.iter().enumerate() {
        let basis = j
            .basis
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() != d {
                    bail!("filtered.jumps[{k}].basis[{i}]: expected {d} coordinates, got {}", v.len());
                }
                v.iter()
                    .enumerate()
                    .map(|(c, s)| expr::value::<KElem>(&ctx, &format!("filtered.jumps[{k}].basis[{i}][{c}]"), s))
                    .collect()
            })
            .collect::<Result<Vec<Vec<KElem>>>>()?;
        steps.push(FilStep {
            t: j.t.get(&format!("filtered.jumps[{k}].t"))?,
            basis,
        });
    }
    Ok(FilteredInput {
        ctx,
        phi,
        monodromy,
        steps,
    })
}

pub fn matrix_input(doc: &InstanceDoc, prec: Option<u32>) -> Result<(Arc<RingConfig>, &MatrixSection)> {
    let m = doc.section("matrix", &doc.matrix)?;
    let ctx = doc.ring(2, prec)?;
    let width = m.entries.first().map_or(0, |r| r.len());
    if m.entries.iter().any(|r| r.len() != width) {
        bail!("matrix.entries: rows have different lengths");
    }
    Ok((ctx, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_document() {
        let doc = parse_doc(
            r#"
mode = "family"
[ring]
p = "7"
m = 2
e = 2
prec = 7
[family]
n1 = 1
n2 = 1
L = ["0", "1"]
"#,
        )
        .unwrap();
        let params = family_params(&doc, None).unwrap();
        assert!(params.l.eq_at_prec(&KElem::pi(params.l.ctx())));
        assert_eq!(params.l.ctx().prec(), 7);
        assert_eq!(family_params(&doc, Some(6)).unwrap().l.ctx().prec(), 6);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = parse_doc("mode = \"family\"\n[ring]\np = 7\nq = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 4") || err.contains("unknown field"), "{err}");
        let doc = parse_doc("mode = \"family\"\n[ring]\np = \"seven\"\n[family]\nn1 = 1\nn2 = 1\nL = \"pi\"\n").unwrap();
        let err = family_params(&doc, None).unwrap_err().to_string();
        assert!(err.contains("ring.p"), "{err}");
        let doc = parse_doc("mode = \"pseudo\"\n[ring]\np = 7\n").unwrap();
        assert!(pseudo_n(&doc).unwrap_err().to_string().contains("[pseudo]"));
    }
}
