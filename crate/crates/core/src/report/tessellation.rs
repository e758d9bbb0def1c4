//! SVG rendering of the first-level cylinders `U_{k,ℓ}`.
//!
//! `U_{k,ℓ}` is the image under `w ↦ 1/w` of the square `k + ℓi + [-½, ½]²`,
//! clipped to `U` when the digit is exceptional. Each side of the square lies
//! on a line `x = a` or `y = b`. Its image is an arc of the circle through the
//! origin with centre `1/(2a)` and radius `1/|2a|`, or centre `-i/(2b)` and
//! radius `1/|2b|`. With `a = k ± ½` these are `1/(2k ± 1)` and `1/|2k ± 1|`.
//!
//! The drawing uses mathematical coordinates with the y axis flipped
//! (`y_svg = -y`) inside `viewBox="-0.5 -0.5 1 1"`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::EXCEPTIONAL_DIGITS;
use crate::gaussian::LatticePoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TessellationSpec {
    pub norm_sq_max: u64,
    pub include_exceptional: bool,
    /// Stroke width in units of the box side.
    pub stroke_width: f64,
    /// Width and height of the image in pixels.
    pub size_px: u32,
}

impl Default for TessellationSpec {
    fn default() -> Self {
        TessellationSpec {
            norm_sq_max: 25,
            include_exceptional: true,
            stroke_width: 0.001,
            size_px: 800,
        }
    }
}

/// A circle in mathematical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// One arc of a region boundary, from `from` to `to` along `circle`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub circle: Circle,
    pub from: (f64, f64),
    pub to: (f64, f64),
    /// Image of the midpoint of the square's side; lies on the arc.
    pub through: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub k: i64,
    pub l: i64,
    pub exceptional: bool,
    pub arcs: [Arc; 4],
}

impl Region {
    pub fn new(k: i64, l: i64) -> Self {
        let (kf, lf) = (k as f64, l as f64);
        let corners = [
            Complex64::new(kf - 0.5, lf - 0.5),
            Complex64::new(kf + 0.5, lf - 0.5),
            Complex64::new(kf + 0.5, lf + 0.5),
            Complex64::new(kf - 0.5, lf + 0.5),
        ];
        let arcs = std::array::from_fn(|e| {
            let (p, q) = (corners[e], corners[(e + 1) % 4]);
            // Sides 0 and 2 are horizontal (y = const), 1 and 3 vertical.
            let circle = if e % 2 == 0 {
                let two_b = 2.0 * p.im;
                Circle {
                    cx: 0.0,
                    cy: -1.0 / two_b,
                    r: 1.0 / two_b.abs(),
                }
            } else {
                let two_a = 2.0 * p.re;
                Circle {
                    cx: 1.0 / two_a,
                    cy: 0.0,
                    r: 1.0 / two_a.abs(),
                }
            };
            let inv = |z: Complex64| {
                let w = z.inv();
                (w.re, w.im)
            };
            Arc {
                circle,
                from: inv(p),
                to: inv(q),
                through: inv((p + q) / 2.0),
            }
        });
        Region {
            k,
            l,
            exceptional: EXCEPTIONAL_DIGITS.contains(&(k, l)),
            arcs,
        }
    }

    pub fn norm_sq(&self) -> u64 {
        LatticePoint::new(self.k, self.l).norm_sq()
    }

    /// SVG path data in flipped coordinates.
    pub fn path_data(&self) -> String {
        let mut d = String::new();
        let (x0, y0) = self.arcs[0].from;
        let _ = write!(d, "M {} {}", fmt(x0), fmt(-y0));
        for a in &self.arcs {
            let (large, sweep) = arc_flags(a);
            let _ = write!(
                d,
                " A {r} {r} 0 {large} {sweep} {} {}",
                fmt(a.to.0),
                fmt(-a.to.1),
                r = fmt(a.circle.r)
            );
        }
        d.push_str(" Z");
        d
    }
}

/// Large-arc and sweep flags for `a` in flipped coordinates.
fn arc_flags(a: &Arc) -> (u8, u8) {
    let c = (a.circle.cx, -a.circle.cy);
    let ang = |p: (f64, f64)| (-p.1 - c.1).atan2(p.0 - c.0);
    let norm = |t: f64| t.rem_euclid(2.0 * PI);
    let (tp, tm, tq) = (ang(a.from), ang(a.through), ang(a.to));
    let to_mid = norm(tm - tp);
    let to_end = norm(tq - tp);
    let (sweep, span) = if to_mid < to_end { (1, to_end) } else { (0, 2.0 * PI - to_end) };
    (u8::from(span > PI), sweep)
}

/// Shortest decimal that round-trips.
fn fmt(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

/// The regions drawn for `spec`, in norm order.
pub fn regions(spec: &TessellationSpec) -> Result<Vec<Region>> {
    if spec.norm_sq_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "norm_sq_max = {} must be at least 2",
            spec.norm_sq_max
        )));
    }
    let min = if spec.include_exceptional { 2 } else { 8 };
    Ok(crate::gaussian::NormOrderedLattice::starting_at(min)
        .take_while(|p| p.norm_sq() <= spec.norm_sq_max)
        .map(|p| Region::new(p.re, p.im))
        .collect())
}

/// The tessellation as a standalone SVG document (no timestamps).
pub fn render_svg(spec: &TessellationSpec) -> Result<String> {
    let regions = regions(spec)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" viewBox="-0.5 -0.5 1 1" data-norm-sq-max="{}" data-regions="{}">"#,
        spec.norm_sq_max,
        regions.len(),
        px = spec.size_px
    );
    out.push_str(
        "<defs><clipPath id=\"unit-box\"><rect x=\"-0.5\" y=\"-0.5\" width=\"1\" height=\"1\"/></clipPath></defs>\n",
    );
    let _ = writeln!(
        out,
        r#"<rect x="-0.5" y="-0.5" width="1" height="1" fill="none" stroke="black" stroke-width="{}"/>"#,
        fmt(spec.stroke_width)
    );
    for r in &regions {
        let circles = r
            .arcs
            .iter()
            .map(|a| format!("{},{},{}", fmt(a.circle.cx), fmt(a.circle.cy), fmt(a.circle.r)))
            .collect::<Vec<_>>()
            .join(";");
        let clip = if r.exceptional { r#" clip-path="url(#unit-box)""# } else { "" };
        let fill = if r.exceptional { "#f4c7a1" } else { "#a8c8e8" };
        let _ = writeln!(
            out,
            r#"<path class="cylinder" data-k="{}" data-l="{}" data-norm-sq="{}" data-exceptional="{}" data-circles="{circles}" d="{}" fill="{fill}" fill-opacity="0.6" stroke="black" stroke-width="{}"{clip}/>"#,
            r.k,
            r.l,
            r.norm_sq(),
            r.exceptional,
            r.path_data(),
            fmt(spec.stroke_width)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_circle(p: (f64, f64), c: &Circle) -> bool {
        ((p.0 - c.cx).hypot(p.1 - c.cy) - c.r).abs() < 1e-12
    }

    #[test]
    fn arcs_lie_on_their_circles() {
        for (k, l) in [(2, 2), (-3, 1), (0, 3), (1, 1), (-2, 0)] {
            let r = Region::new(k, l);
            for a in &r.arcs {
                assert!(on_circle(a.from, &a.circle));
                assert!(on_circle(a.to, &a.circle));
                assert!(on_circle(a.through, &a.circle));
            }
        }
    }

    #[test]
    fn circle_parameters_are_exact() {
        let r = Region::new(3, 0);
        // Vertical sides x = 5/2 and x = 7/2.
        assert_eq!(r.arcs[1].circle, Circle { cx: 1.0 / 7.0, cy: 0.0, r: 1.0 / 7.0 });
        assert_eq!(r.arcs[3].circle, Circle { cx: 1.0 / 5.0, cy: 0.0, r: 1.0 / 5.0 });
        // Horizontal sides y = -1/2 and y = 1/2.
        assert_eq!(r.arcs[0].circle, Circle { cx: 0.0, cy: 1.0, r: 1.0 });
        assert_eq!(r.arcs[2].circle, Circle { cx: 0.0, cy: -1.0, r: 1.0 });
    }

    #[test]
    fn region_counts() {
        let spec = |n, ex| TessellationSpec {
            norm_sq_max: n,
            include_exceptional: ex,
            ..TessellationSpec::default()
        };
        let r8 = regions(&spec(8, true)).unwrap();
        assert_eq!(r8.len(), 20);
        assert_eq!(r8.iter().filter(|r| r.exceptional).count(), 16);
        assert_eq!(regions(&spec(2, true)).unwrap().len(), 4);
        assert_eq!(regions(&spec(8, false)).unwrap().len(), 4);
        assert!(regions(&spec(1, true)).is_err());
    }

    #[test]
    fn svg_marks_exceptional_regions_clipped() {
        let svg = render_svg(&TessellationSpec {
            norm_sq_max: 8,
            ..TessellationSpec::default()
        })
        .unwrap();
        assert_eq!(svg.matches("<path").count(), 20);
        assert_eq!(svg.matches("clip-path=\"url(#unit-box)\"").count(), 16);
        assert!(svg.contains("data-k=\"-2\" data-l=\"-2\""));
    }
}
