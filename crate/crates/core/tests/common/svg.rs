//! Minimal reader for the tessellation SVG: recovers each region's label and
//! flattens its arc path into a polygon in drawing coordinates.

use std::f64::consts::PI;

pub struct SvgRegion {
    pub k: i64,
    pub l: i64,
    pub clipped: bool,
    pub polygon: Vec<(f64, f64)>,
    /// (xmin, ymin, xmax, ymax)
    pub bbox: (f64, f64, f64, f64),
}

impl SvgRegion {
    pub fn contains_bbox(&self, p: (f64, f64)) -> bool {
        p.0 >= self.bbox.0 && p.0 <= self.bbox.2 && p.1 >= self.bbox.1 && p.1 <= self.bbox.3
    }
}

const SEGMENTS_PER_ARC: usize = 128;

fn attr<'a>(elem: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let start = elem.find(&key)? + key.len();
    let len = elem[start..].find('"')?;
    Some(&elem[start..start + len])
}

pub fn parse_regions(svg: &str) -> Vec<SvgRegion> {
    svg.split("<path")
        .skip(1)
        .map(|rest| {
            let elem = &rest[..rest.find("/>").expect("self-closing path")];
            let k = attr(elem, "data-k").unwrap().parse().unwrap();
            let l = attr(elem, "data-l").unwrap().parse().unwrap();
            let clipped = attr(elem, "clip-path").is_some();
            let polygon = flatten(attr(elem, "d").unwrap());
            let bbox = polygon.iter().fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |b, &(x, y)| (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y)),
            );
            SvgRegion { k, l, clipped, polygon, bbox }
        })
        .collect()
}

/// Flattens `M x y (A r r 0 large sweep x y)* Z` into a polygon.
pub fn flatten(d: &str) -> Vec<(f64, f64)> {
    let tokens: Vec<&str> = d.split_whitespace().collect();
    let num = |i: usize| -> f64 { tokens[i].parse().unwrap() };
    assert_eq!(tokens[0], "M");
    let mut cur = (num(1), num(2));
    let mut pts = vec![cur];
    let mut i = 3;
    while tokens[i] != "Z" {
        assert_eq!(tokens[i], "A", "unexpected path command in {d}");
        let (rx, ry) = (num(i + 1), num(i + 2));
        assert_eq!(rx, ry, "arcs are circular");
        let large = tokens[i + 4] == "1";
        let sweep = tokens[i + 5] == "1";
        let end = (num(i + 6), num(i + 7));
        pts.extend(arc_points(cur, end, rx, large, sweep));
        cur = end;
        i += 8;
    }
    pts.pop(); // closes onto the start point
    pts
}

/// Endpoint-to-centre conversion for a circular arc, then uniform sampling.
fn arc_points(p1: (f64, f64), p2: (f64, f64), r: f64, large: bool, sweep: bool) -> Vec<(f64, f64)> {
    let (x1p, y1p) = ((p1.0 - p2.0) / 2.0, (p1.1 - p2.1) / 2.0);
    let d2 = x1p * x1p + y1p * y1p;
    let r = r.max(d2.sqrt());
    let mut coef = ((r * r - d2) / d2).max(0.0).sqrt();
    if large == sweep {
        coef = -coef;
    }
    let (cxp, cyp) = (coef * y1p, -coef * x1p);
    let c = (cxp + (p1.0 + p2.0) / 2.0, cyp + (p1.1 + p2.1) / 2.0);
    let t1 = (y1p - cyp).atan2(x1p - cxp);
    let t2 = (-y1p - cyp).atan2(-x1p - cxp);
    let mut dt = t2 - t1;
    if sweep && dt < 0.0 {
        dt += 2.0 * PI;
    } else if !sweep && dt > 0.0 {
        dt -= 2.0 * PI;
    }
    (1..=SEGMENTS_PER_ARC)
        .map(|j| {
            let t = t1 + dt * j as f64 / SEGMENTS_PER_ARC as f64;
            (c.0 + r * t.cos(), c.1 + r * t.sin())
        })
        .collect()
}

/// Even-odd ray casting.
pub fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a.1 > p.1) != (b.1 > p.1) && p.0 < (b.0 - a.0) * (p.1 - a.1) / (b.1 - a.1) + a.0 {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the polygon boundary.
pub fn polygon_distance(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
        };
        let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
        best = best.min((p.0 - qx).hypot(p.1 - qy));
    }
    best
}
