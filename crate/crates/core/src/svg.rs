//! Static SVG pictures of planar trees and their most-crossed lines.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geom::{Hyperplane, PointSet};
use crate::num::to_f64;
use crate::range_space::{crossings_per_range, RangeSpace};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(points: &PointSet) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points.points() {
            for k in 0..2 {
                let v = to_f64(&p.coords[k]);
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]);
        let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 1.0 };
        Self { min, scale }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.min[0]) * self.scale, SIZE - MARGIN - (y - self.min[1]) * self.scale)
    }

    fn unmap(&self, sx: f64, sy: f64) -> (f64, f64) {
        ((sx - MARGIN) / self.scale + self.min[0], (SIZE - MARGIN - sy) / self.scale + self.min[1])
    }
}

/// Endpoints of the line where it meets the border of the canvas, in canvas
/// coordinates.
fn clip(h: &Hyperplane, frame: &Frame) -> Option<[(f64, f64); 2]> {
    let (a, b, c) = (to_f64(&h.normal[0]), to_f64(&h.normal[1]), to_f64(&h.offset));
    let (x0, y1) = frame.unmap(0.0, 0.0);
    let (x1, y0) = frame.unmap(SIZE, SIZE);
    let mut hits: Vec<(f64, f64)> = Vec::new();
    if b != 0.0 {
        for x in [x0, x1] {
            let y = (c - a * x) / b;
            if (y0..=y1).contains(&y) {
                hits.push((x, y));
            }
        }
    }
    if a != 0.0 {
        for y in [y0, y1] {
            let x = (c - b * y) / a;
            if (x0..=x1).contains(&x) {
                hits.push((x, y));
            }
        }
    }
    hits.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
    if hits.len() < 2 {
        return None;
    }
    Some([frame.map(hits[0].0, hits[0].1), frame.map(hits[1].0, hits[1].1)])
}

/// Renders `points` as circles and `edges` as segments. With `k_lines > 0`
/// the `k_lines` ranges crossed most often by `edges` are drawn dashed
/// through their representative lines, labeled with their crossing counts.
pub fn render_svg(points: &PointSet, edges: &[(usize, usize)], space: Option<&RangeSpace>, k_lines: usize) -> Result<String> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension(points.dim()));
    }
    let frame = Frame::new(points);
    let pos: Vec<(f64, f64)> =
        points.points().iter().map(|p| frame.map(to_f64(&p.coords[0]), to_f64(&p.coords[1]))).collect();
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();

    if let (Some(space), true) = (space, k_lines > 0) {
        let counts = crossings_per_range(edges, space);
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&i, &j| counts[j].cmp(&counts[i]).then(i.cmp(&j)));
        writeln!(out, r##"<g class="lines" stroke="#c0392b" stroke-width="1" stroke-dasharray="6 4">"##).unwrap();
        let mut drawn = 0;
        for i in order {
            if drawn == k_lines {
                break;
            }
            let Some(h) = &space.ranges()[i].rep else { continue };
            let Some([(ax, ay), (bx, by)]) = clip(h, &frame) else { continue };
            writeln!(out, r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"/>"#).unwrap();
            writeln!(
                out,
                r##"<text x="{:.3}" y="{:.3}" font-size="12" fill="#c0392b" stroke="none">{}</text>"##,
                (ax + bx) / 2.0,
                (ay + by) / 2.0,
                counts[i]
            )
            .unwrap();
            drawn += 1;
        }
        writeln!(out, "</g>").unwrap();
    }

    writeln!(out, r#"<g class="edges" stroke="black" stroke-width="2">"#).unwrap();
    for &(a, b) in edges {
        let ((ax, ay), (bx, by)) = (pos[a], pos[b]);
        writeln!(out, r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r##"<g class="points" fill="#2c3e50">"##).unwrap();
    for (x, y) in &pos {
        writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Kind};
    use crate::num::int;
    use crate::range_space::canonical_ranges;

    fn snake(n: usize, w: usize) -> Vec<(usize, usize)> {
        // row-major lattice, boustrophedon order
        let order: Vec<usize> = (0..n / w)
            .flat_map(|r| {
                let row: Vec<usize> = (0..w).map(|c| r * w + c).collect();
                if r % 2 == 0 { row } else { row.into_iter().rev().collect() }
            })
            .collect();
        order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect()
    }

    #[test]
    fn grid_snake_picture() {
        let p = generate(Kind::Grid, 9, 0, 2).unwrap();
        let svg = render_svg(&p, &snake(9, 3), None, 0).unwrap();
        assert_eq!(svg.matches("<circle").count(), 9);
        assert_eq!(svg.matches("<line").count(), 8);
        assert_eq!(svg, render_svg(&p, &snake(9, 3), None, 0).unwrap());
    }

    #[test]
    fn single_point() {
        let p = PointSet::from_coords(vec![vec![int(3), int(4)]]).unwrap();
        let svg = render_svg(&p, &[], None, 0).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<line").count(), 0);
    }

    #[test]
    fn dashed_lines() {
        let p = generate(Kind::Grid, 9, 0, 2).unwrap();
        let space = canonical_ranges(&p).unwrap();
        let svg = render_svg(&p, &snake(9, 3), Some(&space), 3).unwrap();
        assert_eq!(svg.matches("<line").count(), 11);
        assert_eq!(svg.matches("<text").count(), 3);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn rejects_three_dimensions() {
        let p = generate(Kind::MomentCurve, 4, 0, 3).unwrap();
        assert!(matches!(render_svg(&p, &[], None, 0), Err(Error::UnsupportedDimension(3))));
    }
}
