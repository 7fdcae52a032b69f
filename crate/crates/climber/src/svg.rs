//! Deterministic SVG rendering of free-space diagrams.
//!
//! The picture is the parameter box [0, 1]^2 with the first chain along x
//! and the second along y: cell grid lines, the free region of each cell
//! as a sampled polygon outline, and any axis-parallel segments overlaid
//! on top. Output depends only on the inputs, so renders can be diffed.

use std::fmt::Write as _;

use crate::free_space::{AxisSegment, FreeSpaceDiagram, Orientation};

/// Pixel size of the unit box.
const SIDE: f64 = 640.0;
const MARGIN: f64 = 20.0;
/// Samples per cell in x when tracing a free region's outline.
const SAMPLES: usize = 24;

struct Canvas {
    out: String,
}

impl Canvas {
    /// x right, y up, both in [0, 1]; the flip happens here.
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + x * SIDE, MARGIN + (1.0 - y) * SIDE)
    }

    fn poly(&mut self, pts: &[(f64, f64)], style: &str) {
        if pts.len() < 3 {
            return;
        }
        let mut path = String::new();
        for (k, &(x, y)) in pts.iter().enumerate() {
            let (px, py) = self.px(x, y);
            let _ = write!(path, "{}{px:.2},{py:.2}", if k == 0 { "M" } else { " L" });
        }
        path.push('Z');
        let _ = writeln!(self.out, "  <path d=\"{path}\" {style}/>");
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let (x1, y1) = self.px(a.0, a.1);
        let (x2, y2) = self.px(b.0, b.1);
        let _ = writeln!(
            self.out,
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" {style}/>"
        );
    }
}

/// Renders the diagram with `segments` drawn on top. Pass an empty slice
/// for a plain free-space picture.
pub fn render_free_space(d: &FreeSpaceDiagram, segments: &[AxisSegment]) -> String {
    let (m, n) = (d.m(), d.n());
    let total = SIDE + 2.0 * MARGIN;
    let mut c = Canvas { out: String::new() };
    let _ = writeln!(
        c.out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {total} {total}\" \
         width=\"{total}\" height=\"{total}\">"
    );
    let _ = writeln!(
        c.out,
        "  <rect width=\"{total}\" height=\"{total}\" fill=\"#ffffff\"/>"
    );

    // Free region of every cell, traced as lower boundary left to right
    // and upper boundary back. The region is convex, so per x-slice it is
    // a single interval and the outline closes up.
    let eff_sq = d.eff_sq();
    for i in 0..m {
        for j in 0..n {
            let cell = d.cell(i, j);
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for k in 0..=SAMPLES {
                let s = k as f64 / SAMPLES as f64;
                if let Some(iv) = cell.free_t_interval(s, eff_sq) {
                    let (lo, hi) = (iv.lo.clamp(0.0, 1.0), iv.hi.clamp(0.0, 1.0));
                    if lo <= hi {
                        let x = (i as f64 + s) / m as f64;
                        lower.push((x, (j as f64 + lo) / n as f64));
                        upper.push((x, (j as f64 + hi) / n as f64));
                    }
                }
            }
            upper.reverse();
            lower.extend(upper);
            c.poly(
                &lower,
                "fill=\"#7da7d9\" fill-opacity=\"0.55\" stroke=\"#3f6fa5\" stroke-width=\"0.8\"",
            );
        }
    }

    // Cell grid, then the unit box on top.
    let grid = "stroke=\"#cccccc\" stroke-width=\"0.5\"";
    for i in 1..m {
        let x = i as f64 / m as f64;
        c.line((x, 0.0), (x, 1.0), grid);
    }
    for j in 1..n {
        let y = j as f64 / n as f64;
        c.line((0.0, y), (1.0, y), grid);
    }
    let (bx, by) = c.px(0.0, 1.0);
    let _ = writeln!(
        c.out,
        "  <rect x=\"{bx:.2}\" y=\"{by:.2}\" width=\"{SIDE}\" height=\"{SIDE}\" \
         fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>"
    );

    for seg in segments {
        let (a, b) = match seg.orientation {
            Orientation::Horizontal => ((seg.span.lo, seg.fixed), (seg.span.hi, seg.fixed)),
            Orientation::Vertical => ((seg.fixed, seg.span.lo), (seg.fixed, seg.span.hi)),
        };
        let color = match seg.orientation {
            Orientation::Horizontal => "#c23b22",
            Orientation::Vertical => "#1b7837",
        };
        c.line(
            a,
            b,
            &format!("stroke=\"{color}\" stroke-width=\"3\" stroke-linecap=\"round\""),
        );
    }

    c.out.push_str("</svg>\n");
    c.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_space::AxisSegment;
    use crate::geom::PolyChain;

    fn slab() -> (PolyChain, PolyChain) {
        (
            PolyChain::from_coords(&[(0.0, 0.0), (4.0, 0.0)]).unwrap(),
            PolyChain::from_coords(&[(0.0, 1.0), (4.0, 1.0)]).unwrap(),
        )
    }

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let (p, q) = slab();
        let d = FreeSpaceDiagram::new(&p, &q, 1.2, 0.0).unwrap();
        let segs = vec![
            AxisSegment::horizontal(0.5, 0.0, 1.0),
            AxisSegment::vertical(0.25, 0.0, 0.75),
        ];
        let a = render_free_space(&d, &segs);
        let b = render_free_space(&d, &segs);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg ") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<path").count(), 1);
        assert!(a.matches("<line").count() >= 2);
    }

    #[test]
    fn empty_free_space_draws_no_regions() {
        let (p, q) = slab();
        let d = FreeSpaceDiagram::new(&p, &q, 0.5, 0.0).unwrap();
        let svg = render_free_space(&d, &[]);
        assert_eq!(svg.matches("<path").count(), 0);
    }

    #[test]
    fn multi_cell_diagrams_trace_every_free_cell() {
        let p = PolyChain::from_coords(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)]).unwrap();
        let q = PolyChain::from_coords(&[(0.0, 0.5), (2.0, 0.5), (2.0, 1.5)]).unwrap();
        let d = FreeSpaceDiagram::new(&p, &q, 1.0, 0.0).unwrap();
        let svg = render_free_space(&d, &[]);
        assert!(svg.matches("<path").count() >= 2);
    }
}
