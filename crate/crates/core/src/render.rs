//! SVG drawings of packings.

use std::fmt::Write as _;

use crate::geometry::{Packing, Violation};

/// Pixels along the longer bin side.
const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const FOOTER: f64 = 30.0;

const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

/// Draws a feasible packing; infeasible packings are refused.
pub fn render_svg(packing: &Packing) -> Result<String, Violation> {
    packing.check()?;
    let (w, h) = (packing.bin.width.to_f64(), packing.bin.height.to_f64());
    let scale = CANVAS / w.max(h);
    let (pw, ph) = (w * scale, h * scale);
    let total_w = pw + 2.0 * MARGIN;
    let total_h = ph + 2.0 * MARGIN + FOOTER;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.2}" height="{total_h:.2}" viewBox="0 0 {total_w:.2} {total_h:.2}">"#
    );
    let _ = writeln!(
        out,
        r##"  <rect class="bin" x="{MARGIN:.2}" y="{MARGIN:.2}" width="{pw:.2}" height="{ph:.2}" fill="#ffffff" stroke="#000000" stroke-width="2"/>"##
    );
    for (i, p) in packing.placements.iter().enumerate() {
        let side = p.square.side.to_f64() * scale;
        let x = MARGIN + p.x.to_f64() * scale;
        // the bin origin is the lower-left corner
        let y = MARGIN + ph - p.y.to_f64() * scale - side;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r##"  <rect class="item" x="{x:.2}" y="{y:.2}" width="{side:.2}" height="{side:.2}" fill="{color}" fill-opacity="0.7" stroke="#222222" stroke-width="1"/>"##
        );
        let font = (side / 4.0).clamp(4.0, 16.0);
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-size="{font:.2}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            x + side / 2.0,
            y + side / 2.0,
            escape(&p.square.id)
        );
    }
    let _ = writeln!(
        out,
        r#"  <text x="{MARGIN:.2}" y="{:.2}" font-size="14">profit {} ({} squares)</text>"#,
        MARGIN + ph + FOOTER * 0.7,
        escape(&packing.profit().to_string()),
        packing.len()
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bin, Placement, Square};
    use crate::scalar::q;

    #[test]
    fn empty_and_single() {
        let empty = render_svg(&Packing::empty(Bin::unit())).unwrap();
        assert_eq!(empty.matches("class=\"item\"").count(), 0);
        assert_eq!(empty.matches("class=\"bin\"").count(), 1);
        let sq = Square::new("a<b", q("1/2"), q("3")).unwrap();
        let one = Packing::new(Bin::unit(), vec![Placement::new(sq, q("0"), q("0"))]);
        let svg = render_svg(&one).unwrap();
        assert_eq!(svg.matches("class=\"item\"").count(), 1);
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg, render_svg(&one).unwrap());
    }

    #[test]
    fn refuses_overlap() {
        let a = Square::new("a", q("1/2"), q("1")).unwrap();
        let b = Square::new("b", q("1/2"), q("1")).unwrap();
        let p = Packing::new(Bin::unit(), vec![Placement::new(a, q("0"), q("0")), Placement::new(b, q("1/4"), q("0"))]);
        assert!(render_svg(&p).is_err());
    }
}
