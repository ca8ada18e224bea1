//! SVG frames of planar (`n = 2`) domains and schedules.

use std::fmt::Write as _;

use crate::domains::NDomain;
use crate::error::{Error, Result};
use crate::geometry::Cube;
use crate::rational::{to_f64, Rational};
use crate::schedule::CubeSchedule;

/// Cubes present in one picture.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub time: Option<Rational>,
    pub cubes: Vec<(usize, Cube)>,
}

fn planar(n: usize) -> Result<()> {
    if n != 2 {
        return Err(Error::Unsupported(format!("rendering needs n = 2, got {n}")));
    }
    Ok(())
}

impl Frame {
    /// The cubes `{R_k}` with `k <= bound`.
    pub fn of_domain(domain: &NDomain, bound: usize) -> Result<Self> {
        planar(domain.dim())?;
        let cubes = domain.indices().upto(bound).into_iter().map(|k| (k, domain.cube(k))).collect();
        Ok(Self { time: None, cubes })
    }

    /// The cubes `{H_k(t)}` with `k <= bound`.
    pub fn of_schedule(schedule: &CubeSchedule, t: &Rational, bound: usize) -> Result<Self> {
        planar(schedule.dim())?;
        Ok(Self {
            time: Some(t.clone()),
            cubes: schedule.state_at(t, bound),
        })
    }

    /// Axis 1 runs left to right, axis 2 bottom to top.
    pub fn to_svg(&self, size: u32) -> String {
        let s = f64::from(size);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff" stroke="#000000"/>"##);
        if let Some(t) = &self.time {
            let _ = writeln!(out, "<title>t = {t}</title>");
        }
        for (k, c) in &self.cubes {
            let (x0, x1) = (to_f64(c.lo(0)) * s, to_f64(c.hi(0)) * s);
            let (y0, y1) = (to_f64(c.lo(1)) * s, to_f64(c.hi(1)) * s);
            let _ = writeln!(
                out,
                r##"<rect data-index="{k}" x="{x0:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" fill-opacity="0.8" stroke="#202020" stroke-width="0.5"/>"##,
                s - y1,
                x1 - x0,
                y1 - y0,
                color(*k)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Stable color for index `k` (golden-angle hue walk).
pub fn color(k: usize) -> String {
    let hue = (k as f64 * 137.507_764) % 360.0;
    let (s, l) = (0.6, 0.55);
    let c = (1.0 - (2.0 * l - 1.0_f64).abs()) * s;
    let h = hue / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::standard_domain;
    use crate::rational::rat;

    #[test]
    fn domain_frame() {
        let f = Frame::of_domain(&standard_domain(2).unwrap(), 5).unwrap();
        assert_eq!(f.cubes.len(), 5);
        let svg = f.to_svg(100);
        assert_eq!(svg.matches("data-index").count(), 5);
        assert!(svg.contains(r#"x="50.000" y="0.000" width="16.667" height="100.000""#));
        assert!(Frame::of_domain(&standard_domain(3).unwrap(), 5).is_err());
    }

    #[test]
    fn schedule_frame() {
        let std = standard_domain(2).unwrap();
        let s = CubeSchedule::constant(&std, vec![]);
        let f = Frame::of_schedule(&s, &rat(1, 2), 4).unwrap();
        assert_eq!(f.time, Some(rat(1, 2)));
        assert!(f.to_svg(64).contains("<title>t = 1/2</title>"));
    }

    #[test]
    fn colors_are_stable() {
        assert_eq!(color(3), color(3));
        assert_ne!(color(1), color(2));
        assert_eq!(color(7).len(), 7);
    }
}
