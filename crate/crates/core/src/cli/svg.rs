use std::fmt::Write;

use crate::error::{Error, Result};
use crate::polytope::CSetPolytope;

const CANVAS: f64 = 400.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Vertices in counter-clockwise order around their centroid.
fn polygon(c: &CSetPolytope) -> Result<Vec<[f64; 2]>> {
    let v = c.vertices()?;
    let n = v.len() as f64;
    let cx = v.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = v.iter().map(|p| p[1]).sum::<f64>() / n;
    let mut pts: Vec<[f64; 2]> = v.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    Ok(pts)
}

fn area(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Planar sets as an SVG document, largest first so smaller sets stay
/// visible. Identical inputs give identical bytes.
pub fn render_svg(sets: &[CSetPolytope]) -> Result<String> {
    if let Some(bad) = sets.iter().find(|s| s.dim() != 2) {
        return Err(Error::DimensionMismatch {
            context: "SVG rendering",
            expected: 2,
            found: bad.dim(),
        });
    }
    let mut polys: Vec<(usize, Vec<[f64; 2]>)> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| polygon(s).map(|p| (i, p)))
        .collect::<Result<_>>()?;
    polys.sort_by(|a, b| area(&b.1).total_cmp(&area(&a.1)).then(a.0.cmp(&b.0)));

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (_, p) in &polys {
        for q in p {
            xmin = xmin.min(q[0]);
            xmax = xmax.max(q[0]);
            ymin = ymin.min(q[1]);
            ymax = ymax.max(q[1]);
        }
    }
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let s = (CANVAS - 2.0 * MARGIN) / span;
    let tx = |x: f64| MARGIN + (x - xmin) * s;
    let ty = |y: f64| CANVAS - MARGIN - (y - ymin) * s;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (rank, (idx, p)) in polys.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let pts: Vec<String> = p.iter().map(|q| format!("{:.3},{:.3}", tx(q[0]), ty(q[1]))).collect();
        let _ = writeln!(
            out,
            r#"<polygon data-set="{idx}" data-rank="{rank}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        for q in p {
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="2" fill="{color}"/>"#, tx(q[0]), ty(q[1]));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_canvas() {
        let s = render_svg(&[]).unwrap();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(!s.contains("<polygon"));
    }

    #[test]
    fn nested_boxes_outermost_first() {
        let small = CSetPolytope::hypercube(2, 1.0).unwrap();
        let big = CSetPolytope::symmetric_box(&[5.0, 3.0]).unwrap();
        let s = render_svg(&[small.clone(), big.clone()]).unwrap();
        let first = s.find("data-set=\"1\"").unwrap();
        let second = s.find("data-set=\"0\"").unwrap();
        assert!(first < second);
        assert_eq!(s.matches("<polygon").count(), 2);
        assert_eq!(s, render_svg(&[small, big]).unwrap());
    }

    #[test]
    fn rejects_other_dimensions() {
        let line = CSetPolytope::hypercube(1, 1.0).unwrap();
        assert!(matches!(render_svg(&[line]), Err(Error::DimensionMismatch { .. })));
    }
}
