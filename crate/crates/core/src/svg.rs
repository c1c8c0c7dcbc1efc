//! SVG rendering of 2-D region partitions.

use std::fmt::Write as _;

use crate::geometry::{clip_to_polygon, BoundingBox, GeometryError};
use crate::regions::RegionSet;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stable fill colour for a pattern string.
pub fn pattern_color(pattern: &str) -> String {
    let h = fnv1a(pattern.as_bytes());
    let hue = h % 360;
    let saturation = 55 + (h >> 16) % 30;
    let lightness = 50 + (h >> 32) % 20;
    format!("hsl({hue},{saturation}%,{lightness}%)")
}

/// A pattern string with its clipped polygon.
pub type PatternPolygon = (String, Vec<[f64; 2]>);

/// Each region's polygon clipped to `rect`, skipping regions that miss it.
pub fn region_polygons(set: &RegionSet, rect: &BoundingBox) -> Result<Vec<PatternPolygon>, GeometryError> {
    let mut out = Vec::new();
    for r in &set.regions {
        let poly = clip_to_polygon(&r.halfspaces, rect)?;
        if !poly.is_empty() {
            out.push((r.pattern.to_string(), poly));
        }
    }
    Ok(out)
}

/// An SVG 1.1 document with one `<polygon>` per region. Points are written
/// in input coordinates; the flip to screen orientation is a group transform,
/// so the `points` attributes can be read back as data.
pub fn render_svg(set: &RegionSet, rect: &BoundingBox, pixels: u32) -> Result<String, GeometryError> {
    let polys = region_polygons(set, rect)?;
    let (x0, y0, x1, y1) = (rect.lo[0], rect.lo[1], rect.hi[0], rect.hi[1]);
    let (w, h) = (x1 - x0, y1 - y0);
    let height = ((pixels as f64) * h / w).round().max(1.0) as u32;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    s.push_str(
        "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n",
    );
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{pixels}\" height=\"{height}\" viewBox=\"{} {} {} {}\">",
        num(x0),
        num(-y1),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(s, "<g transform=\"scale(1,-1)\" stroke=\"#ffffff\" stroke-width=\"{}\">", num(w / pixels as f64)).unwrap();
    for (pattern, poly) in &polys {
        let points: Vec<String> = poly.iter().map(|p| format!("{},{}", num(p[0]), num(p[1]))).collect();
        writeln!(
            s,
            "<polygon data-pattern=\"{pattern}\" fill=\"{}\" points=\"{}\"><title>{pattern}</title></polygon>",
            pattern_color(pattern),
            points.join(" ")
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

/// Fixed-precision number with trailing zeros trimmed, so output bytes are
/// stable.
fn num(v: f64) -> String {
    let mut t = format!("{v:.9}");
    if t.contains('.') {
        while t.ends_with('0') {
            t.pop();
        }
        if t.ends_with('.') {
            t.pop();
        }
    }
    if t == "-0" {
        t = "0".into();
    }
    t
}
