//! Parameter sweeps over (p, e, L) for the n1 = n2 = 1 family.
//!
//! ```toml
//! [sweep]
//! p = [7]
//! e = [2]
//! m = 2
//! prec = 7
//! L = ["pi", "x", "x + pi"]
//! ```

use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hodge_inertia::arith::{RingConfig, RingParams};
use hodge_inertia::breuil::run_family;
use hodge_inertia::fontaine::FamilyParams;

use crate::doc::Int;
use crate::expr;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub p: Vec<Int>,
    pub e: Vec<Int>,
    pub m: Option<Int>,
    pub prec: Option<Int>,
    #[serde(rename = "L")]
    pub l: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub sweep: SweepSection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: i64,
    pub e: i64,
    #[serde(rename = "L")]
    pub l: String,
    pub v: Option<String>,
    pub inertia: Option<String>,
    pub hodge_mod_p: Option<String>,
    pub failed_verdicts: Vec<String>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn status(&self) -> &'static str {
        if self.error.is_some() {
            "error"
        } else if self.failed_verdicts.is_empty() {
            "ok"
        } else {
            "fail"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub ok: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

pub fn parse_sweep(text: &str) -> Result<SweepDoc> {
    toml::from_str(text).map_err(|e| anyhow!("{e}"))
}

fn evaluate(p: i64, e: i64, m: usize, prec: Option<u32>, l_src: &str) -> SweepRow {
    let mut row = SweepRow {
        p,
        e,
        l: l_src.to_string(),
        v: None,
        inertia: None,
        hodge_mod_p: None,
        failed_verdicts: Vec::new(),
        error: None,
    };
    let result = (|| -> Result<()> {
        let mut params = RingParams::new(p, m, usize::try_from(e).map_err(|_| anyhow!("e = {e} is negative"))?, 2);
        if let Some(pr) = prec {
            params = params.with_prec(pr);
        }
        let ctx = RingConfig::new(&params)?;
        let l = expr::value(&ctx, "L", l_src)?;
        let run = run_family(&FamilyParams { n1: 1, n2: 1, l })?;
        row.v = Some(run.elements.v().to_string());
        row.inertia = Some(run.inertia.to_string());
        row.hodge_mod_p = Some(run.hodge_mbar.to_string());
        row.failed_verdicts = run.verdicts.iter().filter(|v| !v.holds).map(|v| v.name.clone()).collect();
        Ok(())
    })();
    if let Err(err) = result {
        row.error = Some(err.to_string());
    }
    row
}

/// Rows in grid order (p, then e, then L), evaluated in parallel.
pub fn run_sweep(doc: &SweepDoc, prec: Option<u32>) -> Result<SweepTable> {
    let s = &doc.sweep;
    let ps = s.p.iter().map(|x| x.get("sweep.p")).collect::<Result<Vec<_>>>()?;
    let es = s.e.iter().map(|x| x.get("sweep.e")).collect::<Result<Vec<_>>>()?;
    let m = s.m.as_ref().map_or(Ok(1), |x| x.get("sweep.m"))?;
    let m = usize::try_from(m).map_err(|_| anyhow!("sweep.m must be positive"))?;
    let doc_prec = s.prec.as_ref().map(|x| x.get("sweep.prec")).transpose()?;
    let prec = match prec.map(i64::from).or(doc_prec) {
        Some(pr) => Some(u32::try_from(pr).map_err(|_| anyhow!("sweep.prec out of range"))?),
        None => None,
    };
    let grid: Vec<(i64, i64, &str)> = ps
        .iter()
        .flat_map(|&p| es.iter().flat_map(move |&e| s.l.iter().map(move |l| (p, e, l.as_str()))))
        .collect();
    let rows: Vec<SweepRow> = grid.par_iter().map(|&(p, e, l)| evaluate(p, e, m, prec, l)).collect();
    let count = |st: &str| rows.iter().filter(|r| r.status() == st).count();
    let summary = SweepSummary {
        rows: rows.len(),
        ok: count("ok"),
        failed: count("fail"),
        errors: count("error"),
    };
    Ok(SweepTable { rows, summary })
}

pub fn ascii_table(t: &SweepTable) -> String {
    let header = ["p", "e", "L", "v", "inertia", "Hodge(M/pM)", "status"];
    let cells: Vec<[String; 7]> = t
        .rows
        .iter()
        .map(|r| {
            let dash = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
            [
                r.p.to_string(),
                r.e.to_string(),
                r.l.clone(),
                dash(&r.v),
                dash(&r.inertia),
                dash(&r.hodge_mod_p),
                r.status().to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |vals: &[String]| -> String {
        vals.iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v}{}", " ".repeat(w - v.chars().count())))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", line(&header.map(String::from)));
    for row in &cells {
        let _ = writeln!(out, "{}", line(row));
    }
    for r in &t.rows {
        if let Some(err) = &r.error {
            let _ = writeln!(out, "error at p = {}, e = {}, L = {}: {err}", r.p, r.e, r.l);
        }
        for v in &r.failed_verdicts {
            let _ = writeln!(out, "failed at p = {}, e = {}, L = {}: {v}", r.p, r.e, r.l);
        }
    }
    let s = &t.summary;
    let _ = writeln!(out, "{} rows: {} ok, {} failed, {} errors", s.rows, s.ok, s.failed, s.errors);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_column() {
        let doc = parse_sweep("[sweep]\np = [7]\ne = [2]\nm = 2\nprec = 7\nL = [\"pi\", \"x\", \"x + pi\", \"3\"]\n").unwrap();
        let t = run_sweep(&doc, None).unwrap();
        let v: Vec<_> = t.rows.iter().map(|r| r.v.clone()).collect();
        assert_eq!(v[..3], [Some("0".into()), Some("inf".into()), Some("1/2".into())]);
        assert_eq!(t.rows[3].status(), "error");
        assert_eq!(t.summary, SweepSummary { rows: 4, ok: 3, failed: 0, errors: 1 });
        assert!(ascii_table(&t).contains("4 rows: 3 ok, 0 failed, 1 errors"));
    }

    #[test]
    fn empty_grid() {
        let doc = parse_sweep("[sweep]\np = [7]\ne = [2]\nL = []\n").unwrap();
        let t = run_sweep(&doc, None).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.summary.rows, 0);
    }
}
