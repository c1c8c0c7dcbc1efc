use super::{BoundingBox, GeometryError, HalfSpace};

/// Polygons whose area falls below this fraction of the box area are empty.
const MIN_RELATIVE_AREA: f64 = 1e-14;

/// Clips the box rectangle by every half-space in turn (Sutherland-Hodgman
/// against half-planes). Returns the vertices counterclockwise, or an empty
/// list if the intersection has zero area.
pub fn clip_to_polygon(halfspaces: &[HalfSpace], rect: &BoundingBox) -> Result<Vec<[f64; 2]>, GeometryError> {
    if rect.dim() != 2 {
        return Err(GeometryError::Dimension {
            expected: 2,
            got: rect.dim(),
        });
    }
    let (x0, y0, x1, y1) = (rect.lo[0], rect.lo[1], rect.hi[0], rect.hi[1]);
    let mut poly = vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]];

    for h in halfspaces {
        if h.dim() != 2 {
            return Err(GeometryError::Dimension { expected: 2, got: h.dim() });
        }
        if h.is_degenerate() {
            if h.is_trivially_true() {
                continue;
            }
            return Ok(Vec::new());
        }
        poly = clip_one(&poly, h);
        if poly.len() < 3 {
            return Ok(Vec::new());
        }
    }

    if polygon_area(&poly) <= MIN_RELATIVE_AREA * rect.volume() {
        return Ok(Vec::new());
    }
    Ok(poly)
}

fn clip_one(poly: &[[f64; 2]], h: &HalfSpace) -> Vec<[f64; 2]> {
    let value = |p: &[f64; 2]| h.alpha[0] * p[0] + h.alpha[1] * p[1] + h.beta;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (va, vb) = (value(&a), value(&b));
        let a_in = va <= 0.0;
        let b_in = vb <= 0.0;
        if a_in {
            out.push(a);
        }
        if a_in != b_in {
            let t = va / (va - vb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out.dedup_by(|p, q| (p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
    out
}

/// Shoelace area; 0 for fewer than three vertices.
pub fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..vertices.len())
        .map(|i| {
            let p = vertices[i];
            let q = vertices[(i + 1) % vertices.len()];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    (twice / 2.0).abs()
}
