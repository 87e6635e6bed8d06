use std::fmt::Write as _;

use anyhow::{bail, Result};
use clap::ValueEnum;
use hodge_inertia::polygons::Q;
use num_traits::ToPrimitive;

use crate::report::{NamedPolygon, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ascii,
    Svg,
    Json,
}

const MARKS: [char; 5] = ['*', 'o', '+', 'x', '#'];
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Plotted {
    name: String,
    exact: Vec<(Q, Q)>,
    pts: Vec<(f64, f64)>,
}

fn plotted(polys: &[NamedPolygon]) -> Result<Vec<Plotted>> {
    polys
        .iter()
        .map(|p| {
            let exact = p.points()?;
            let f = |x: &Q| x.to_f64().unwrap_or(f64::NAN);
            let pts = exact.iter().map(|(x, y)| (f(x), f(y))).collect();
            Ok(Plotted {
                name: p.name.clone(),
                exact,
                pts,
            })
        })
        .collect()
}

fn bounds(ps: &[Plotted]) -> (f64, f64, f64) {
    let all = ps.iter().flat_map(|p| p.pts.iter());
    let (mut xmax, mut ymin, mut ymax) = (1.0f64, 0.0f64, 1.0f64);
    for &(x, y) in all {
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    (xmax, ymin, ymax)
}

fn vertex_list(p: &Plotted) -> String {
    p.exact.iter().map(|(x, y)| format!("({x}, {y})")).collect::<Vec<_>>().join(" ")
}

/// Polygons on a character grid, overlapping marks drawn as '@', followed
/// by the exact vertices of each polygon.
pub fn ascii_polygons(polys: &[NamedPolygon]) -> Result<String> {
    let ps = plotted(polys)?;
    let mut out = String::new();
    if ps.iter().all(|p| p.pts.len() < 2) {
        for (i, p) in ps.iter().enumerate() {
            writeln!(out, "  {} {}: {}", MARKS[i % MARKS.len()], p.name, vertex_list(p))?;
        }
        return Ok(out);
    }
    let (xmax, ymin, ymax) = bounds(&ps);
    let cols_per_unit = 10.0;
    let width = (xmax * cols_per_unit).round() as usize + 1;
    let height = 17usize;
    let yscale = (height - 1) as f64 / (ymax - ymin).max(1e-9);
    let mut grid = vec![vec![' '; width]; height];
    for (i, p) in ps.iter().enumerate() {
        let mark = MARKS[i % MARKS.len()];
        for w in p.pts.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let steps = (((x1 - x0) * cols_per_unit).abs().max(((y1 - y0) * yscale).abs()) * 2.0).ceil() as usize + 1;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
                let c = (x * cols_per_unit).round() as usize;
                let r = height - 1 - ((y - ymin) * yscale).round() as usize;
                let cell = &mut grid[r.min(height - 1)][c.min(width - 1)];
                *cell = if *cell == ' ' || *cell == mark { mark } else { '@' };
            }
        }
    }
    let label = |y: f64| format!("{y:>6.2} |");
    for (r, row) in grid.iter().enumerate() {
        let y = ymax - r as f64 / yscale;
        let prefix = if r == 0 || r == height - 1 || r == height / 2 {
            label(y)
        } else {
            "       |".to_string()
        };
        writeln!(out, "{prefix}{}", row.iter().collect::<String>().trim_end())?;
    }
    writeln!(out, "       +{}", "-".repeat(width))?;
    let mut axis = vec![' '; width + 2];
    for k in 0..=xmax.floor() as usize {
        let c = (k as f64 * cols_per_unit).round() as usize;
        for (i, ch) in k.to_string().chars().enumerate() {
            if c + i < axis.len() {
                axis[c + i] = ch;
            }
        }
    }
    writeln!(out, "        {}", axis.iter().collect::<String>().trim_end())?;
    for (i, p) in ps.iter().enumerate() {
        writeln!(out, "  {} {}: {}", MARKS[i % MARKS.len()], p.name, vertex_list(p))?;
    }
    Ok(out)
}

pub fn ascii_report(rep: &Report) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "mode: {}", rep.mode)?;
    if !rep.polygons.is_empty() {
        writeln!(out)?;
        out.push_str(&ascii_polygons(&rep.polygons)?);
    }
    if !rep.verdicts.is_empty() {
        writeln!(out, "\nverdicts:")?;
        for v in &rep.verdicts {
            let tag = if v.holds { "ok  " } else { "FAIL" };
            writeln!(out, "  [{tag}] {} :: {}", v.name, v.evidence)?;
        }
    }
    if !rep.elements.is_empty() {
        writeln!(out, "\nelements:")?;
        for (k, v) in &rep.elements {
            writeln!(out, "  {k} = {v}")?;
        }
    }
    if !rep.warnings.is_empty() {
        writeln!(out, "\nwarnings:")?;
        for w in &rep.warnings {
            writeln!(out, "  {w}")?;
        }
    }
    Ok(out)
}

/// One `<path>` per polygon; a polygon with fewer than two vertices gets an
/// empty path.
pub fn svg_report(rep: &Report) -> Result<String> {
    let ps = plotted(&rep.polygons)?;
    let (xmax, ymin, ymax) = bounds(&ps);
    let (w, h, margin) = (480.0, 360.0, 40.0);
    let sx = (w - 2.0 * margin) / xmax;
    let sy = (h - 2.0 * margin) / (ymax - ymin).max(1e-9);
    let tx = |x: f64| margin + x * sx;
    let ty = |y: f64| h - margin - (y - ymin) * sy;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )?;
    writeln!(
        out,
        r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        tx(0.0),
        ty(ymin),
        tx(xmax),
        ty(ymin)
    )?;
    writeln!(
        out,
        r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        tx(0.0),
        ty(ymin),
        tx(0.0),
        ty(ymax)
    )?;
    for (i, p) in ps.iter().enumerate() {
        let d = if p.pts.len() < 2 {
            String::new()
        } else {
            p.pts
                .iter()
                .enumerate()
                .map(|(j, &(x, y))| format!("{}{:.2} {:.2}", if j == 0 { "M" } else { " L" }, tx(x), ty(y)))
                .collect()
        };
        let color = COLORS[i % COLORS.len()];
        writeln!(
            out,
            r#"  <path id="{}" d="{d}" fill="none" stroke="{color}" stroke-width="2"><title>{}: {}</title></path>"#,
            escape(&p.name),
            escape(&p.name),
            escape(&vertex_list(p))
        )?;
        writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            margin + 4.0,
            margin / 2.0 + 14.0 * i as f64,
            escape(&p.name)
        )?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn render(rep: &Report, format: Format) -> Result<String> {
    match format {
        Format::Ascii => ascii_report(rep),
        Format::Svg => svg_report(rep),
        Format::Json => json(rep),
    }
}

pub fn parse_report(text: &str) -> Result<Report> {
    match serde_json::from_str(text) {
        Ok(r) => Ok(r),
        Err(e) => bail!("report JSON, line {}, column {}: {e}", e.line(), e.column()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hodge_inertia::polygons::{q, Polygon};

    fn report(polys: &[(&str, Polygon)]) -> Report {
        Report {
            mode: "family".into(),
            polygons: polys.iter().map(|(n, p)| NamedPolygon::new(n, p)).collect(),
            verdicts: Vec::new(),
            elements: Default::default(),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn ascii_shares_endpoints() {
        let rep = report(&[
            ("Hodge", Polygon::from_ints(&[0, 2])),
            ("inertia", Polygon::from_slopes(vec![q(1, 2), q(3, 2)])),
        ]);
        let text = ascii_polygons(&rep.polygons).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        // (0, 0) bottom-left and (2, 2) top-right are drawn by both polygons.
        assert!(lines[16].starts_with("  0.00 |@"), "{text}");
        assert!(lines[0].ends_with('@'), "{text}");
        assert!(text.contains("* Hodge: (0, 0) (1, 0) (2, 2)"));
        assert!(text.contains("o inertia: (0, 0) (1, 1/2) (2, 2)"));
    }

    #[test]
    fn svg_paths() {
        let rep = report(&[("empty", Polygon::empty()), ("h", Polygon::from_ints(&[0, 2]))]);
        let svg = svg_report(&rep).unwrap();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains(r#"<path id="empty" d="""#));
        assert!(svg.contains(r#"d="M40.00 320.00 L240.00 320.00 L440.00 40.00""#), "{svg}");
    }

    #[test]
    fn json_round_trip() {
        let mut rep = report(&[("inertia", Polygon::from_slopes(vec![q(1, 2), q(3, 2)]))]);
        rep.elements.insert("v".into(), "1/2".into());
        rep.warnings.push("w".into());
        let text = render(&rep, Format::Json).unwrap();
        assert_eq!(parse_report(&text).unwrap(), rep);
        assert!(parse_report("{").is_err());
    }
}
