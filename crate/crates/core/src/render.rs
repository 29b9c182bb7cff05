//! Static SVG rendering of a window, optionally overlaid with a certificate.

use std::fmt::Write;

use crate::recurrence::WitnessCertificate;
use crate::tiling::{PlacedTile, TilingWindow};

fn num(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn color(i: usize, n: usize) -> String {
    let hue = (i as f64 * 360.0 / n.max(1) as f64).round() as i64;
    let light = if i.is_multiple_of(2) { 72 } else { 58 };
    format!("hsl({hue},55%,{light}%)")
}

fn points(t: &PlacedTile) -> String {
    t.vertices.iter().map(|v| format!("{},{}", num(v.x), num(-v.y))).collect::<Vec<_>>().join(" ")
}

/// Tiles as filled polygons colored by prototile. With a certificate, the
/// base patch and each moved copy are outlined in their own group and the
/// vectors `n u_i` are drawn as arrows from the base point.
pub fn render_svg(w: &TilingWindow, cert: Option<&WitnessCertificate>) -> String {
    let mut extent = w.radius;
    let copies = cert.and_then(|c| c.moved_copies()).unwrap_or_default();
    for t in cert.iter().flat_map(|c| c.patch.tiles.iter()).chain(copies.iter().flatten()) {
        extent = extent.max(t.max_norm());
    }
    let pad = extent * 0.02 + 0.5;
    let side = 2.0 * (extent + pad);
    let stroke = (extent / 400.0).max(0.005);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
        num(-extent - pad),
        num(-extent - pad),
        num(side),
        num(side)
    );
    let _ = writeln!(
        s,
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="black"/></marker></defs>"#
    );
    let _ = writeln!(s, r#"<g class="tiles" stroke="black" stroke-width="{}">"#, num(stroke));
    for t in &w.tiles {
        let idx = w.prototiles.iter().position(|p| p.id == t.proto.id).unwrap_or(0);
        let _ = writeln!(s, r#"<polygon points="{}" fill="{}"/>"#, points(t), color(idx, w.prototiles.len()));
    }
    let _ = writeln!(s, "</g>");
    if let Some(c) = cert {
        let regions = std::iter::once(&c.patch.tiles).chain(copies.iter());
        for (k, tiles) in regions.enumerate() {
            let (col, width) = if k == 0 { ("blue", 4.0) } else { ("red", 3.0) };
            let _ = writeln!(
                s,
                r#"<g class="patch-region" fill="none" stroke="{col}" stroke-width="{}">"#,
                num(stroke * width)
            );
            for t in tiles {
                let _ = writeln!(s, r#"<polygon points="{}"/>"#, points(t));
            }
            let _ = writeln!(s, "</g>");
        }
        for u in c.pattern.vectors() {
            let end = c.base + *u * c.n as f64;
            let _ = writeln!(
                s,
                r#"<line class="pattern-vector" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{}" marker-end="url(#arrow)"/>"#,
                num(c.base.x),
                num(-c.base.y),
                num(end.x),
                num(-end.y),
                num(stroke * 3.0)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
