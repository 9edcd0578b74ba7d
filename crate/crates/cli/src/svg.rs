//! SVG rendering of a hexagon tiling.

use std::fmt::Write as _;

use mixbench::lattice::{HexRouting, LozengeKind};

const SCALE: f64 = 24.0;
const MARGIN: f64 = 8.0;

fn fill(kind: LozengeKind) -> &'static str {
    match kind {
        LozengeKind::Up => "#e4a33a",
        LozengeKind::Down => "#3a7ca5",
        LozengeKind::Flat => "#d9dcd6",
    }
}

fn class(kind: LozengeKind) -> &'static str {
    match kind {
        LozengeKind::Up => "up",
        LozengeKind::Down => "down",
        LozengeKind::Flat => "flat",
    }
}

/// One `<polygon>` per lozenge. Columns are `sqrt(3)/2` apart so every
/// lozenge has unit sides.
pub fn render(r: &HexRouting) -> String {
    let loz = r.lozenges();
    let kx = 3f64.sqrt() / 2.0 * SCALE;
    let pts: Vec<(f64, f64)> = loz.iter().flat_map(|l| l.vertices).collect();
    let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ymin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let width = r.w() as f64 * kx + 2.0 * MARGIN;
    let height = (ymax - ymin) * SCALE + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r##"<g stroke="#222" stroke-width="1" stroke-linejoin="round">"##);
    for l in &loz {
        let coords: Vec<String> = l
            .vertices
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", MARGIN + x * kx, MARGIN + (ymax - y) * SCALE))
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon class="{}" fill="{}" points="{}"/>"##,
            class(l.kind),
            fill(l.kind),
            coords.join(" ")
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
