//! Minimal SVG charts: inventory time series and cost/service frontier.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::entity::Role;
use crate::error::{Error, Result};
use crate::harness::FrontierPoint;
use crate::scalar::Scalar;
use crate::world::DayRecord;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn role_colour(role: Role) -> &'static str {
    match role {
        Role::Supplier => "#7f7f7f",
        Role::Manufacturer => "#1f77b4",
        Role::Retailer => "#ff7f0e",
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Step of roughly `span / target` rounded to 1, 2 or 5 times a power of ten.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = (span / target).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6.0);
    let mut v = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        v.push(t);
        t += step;
    }
    v
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else if v.fract().abs() < 1e-9 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let widen = |a: f64, b: f64| {
            if b - a > 0.0 {
                (a, b)
            } else {
                (a - 0.5, a + 0.5)
            }
        };
        let (x0, x1) = widen(x0, x1);
        let (y0, y1) = widen(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, r) = (LEFT, WIDTH - RIGHT);
        let (t, b) = (TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            (l + r) / 2.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{l:.1}" y="{t:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            r - l,
            b - t
        );
        for x in ticks(self.x0, self.x1) {
            let px = self.px(x);
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.1}" y1="{b:.1}" x2="{px:.1}" y2="{:.1}" stroke="#333"/><text x="{px:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"##,
                b + 5.0,
                b + 18.0,
                fmt_tick(x)
            );
        }
        for y in ticks(self.y0, self.y1) {
            let py = self.py(y);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.1}" y1="{py:.1}" x2="{l:.1}" y2="{py:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"##,
                l - 5.0,
                l - 8.0,
                py + 4.0,
                fmt_tick(y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            (l + r) / 2.0,
            HEIGHT - 12.0,
            escape(xlabel)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(ylabel)
        );
    }
}

fn open() -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// On-hand inventory per entity over time. `window` is an inclusive-exclusive
/// day range to shade, typically the disruption window.
pub fn inventory_chart<T: Scalar>(
    trace: &[DayRecord<T>],
    window: Option<(u32, u32)>,
    title: &str,
) -> Result<String> {
    if trace.is_empty() {
        return Err(Error::Chart("trace is empty".into()));
    }
    let first = trace.iter().map(|r| r.day).min().unwrap_or(0) as f64;
    let last = trace.iter().map(|r| r.day).max().unwrap_or(0) as f64;
    let top = trace.iter().map(|r| r.on_hand).max().unwrap_or(0).max(1) as f64;
    let frame = Frame::new(first, last, 0.0, top * 1.05);

    let mut svg = open();
    if let Some((start, end)) = window {
        let a = (start as f64).clamp(frame.x0, frame.x1);
        let b = (end as f64).clamp(frame.x0, frame.x1);
        if b > a {
            let _ = writeln!(
                svg,
                r##"<rect class="window" x="{:.1}" y="{TOP:.1}" width="{:.1}" height="{:.1}" fill="#d62728" fill-opacity="0.12"/>"##,
                frame.px(a),
                frame.px(b) - frame.px(a),
                HEIGHT - TOP - BOTTOM
            );
        }
    }
    frame.axes(&mut svg, title, "day", "on-hand units");

    for (i, role) in Role::ALL.into_iter().enumerate() {
        let pts: Vec<String> = trace
            .iter()
            .filter(|r| r.entity == role)
            .map(|r| {
                format!(
                    "{:.1},{:.1}",
                    frame.px(r.day as f64),
                    frame.py(r.on_hand as f64)
                )
            })
            .collect();
        if pts.is_empty() {
            continue;
        }
        let colour = role_colour(role);
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-entity="{}" fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            role.name().to_lowercase(),
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="3"/><text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            role.name()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Cost (x) against service level (y), one labelled marker per strategy.
/// Dominated points are drawn hollow. No points yields empty axes.
pub fn frontier_chart<T: Scalar>(points: &[FrontierPoint<T>], title: &str) -> Result<String> {
    let xs: Vec<f64> = points.iter().map(|p| p.total_cost.to_f64_lossy()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| p.service_level.to_f64_lossy())
        .collect();
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(Error::Chart("frontier contains non-finite values".into()));
    }
    let frame = if points.is_empty() {
        Frame::new(0.0, 1.0, 0.0, 100.0)
    } else {
        let (xmin, xmax) = xs
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let (ymin, ymax) = ys
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &y| (a.min(y), b.max(y)));
        let px = ((xmax - xmin) * 0.1).max(xmax.abs() * 0.01).max(1.0);
        let py = ((ymax - ymin) * 0.1).max(0.5);
        Frame::new(xmin - px, xmax + px, ymin - py, ymax + py)
    };

    let mut svg = open();
    frame.axes(&mut svg, title, "total cost", "service level (%)");
    for (p, (&x, &y)) in points.iter().zip(xs.iter().zip(&ys)) {
        let fill = if p.dominated { "white" } else { "#1f77b4" };
        let (cx, cy) = (frame.px(x), frame.py(y));
        let _ = writeln!(
            svg,
            r##"<circle class="point" cx="{cx:.1}" cy="{cy:.1}" r="6" fill="{fill}" stroke="#1f77b4" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="12">{} ({}, {})</text>"##,
            cx + 9.0,
            cy - 8.0,
            escape(&p.strategy_name),
            p.cost_rating.label(),
            p.speed_rating.label()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{CostRating, SpeedRating};

    fn rec(day: u32, entity: Role, on_hand: u64) -> DayRecord<f64> {
        DayRecord {
            day,
            entity,
            on_hand,
            backorders: 0,
            on_order: 0,
            demand: 0,
            fulfilled: 0,
            holding_cost: 0.0,
            backorder_cost: 0.0,
            premium_cost: 0.0,
        }
    }

    #[test]
    fn empty_trace_is_an_error() {
        assert!(matches!(
            inventory_chart::<f64>(&[], None, "x"),
            Err(Error::Chart(_))
        ));
    }

    #[test]
    fn single_day_renders() {
        let trace: Vec<_> = Role::ALL.into_iter().map(|r| rec(0, r, 5)).collect();
        let svg = inventory_chart(&trace, Some((60, 80)), "one day").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(!svg.contains("NaN"));
        roxmltree::Document::parse(&svg).unwrap();
    }

    #[test]
    fn window_and_escaping() {
        let trace: Vec<_> = (0..100).map(|d| rec(d, Role::Retailer, d as u64)).collect();
        let svg = inventory_chart(&trace, Some((60, 80)), "A & <B>").unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert!(doc
            .descendants()
            .any(|n| n.attribute("class") == Some("window")));
        assert!(doc.descendants().any(|n| n.text() == Some("A & <B>")));
    }

    #[test]
    fn frontier_points_and_empty() {
        let p = |name: &str, c: f64, dominated| FrontierPoint {
            strategy_name: name.into(),
            total_cost: c,
            service_level: 99.0,
            cost_rating: CostRating::High,
            speed_rating: SpeedRating::Slow,
            dominated,
        };
        let svg = frontier_chart(&[p("A", 10.0, false), p("B", 20.0, true)], "f").unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let circles = doc
            .descendants()
            .filter(|n| n.has_tag_name("circle"))
            .count();
        assert_eq!(circles, 2);
        let empty = frontier_chart::<f64>(&[], "f").unwrap();
        roxmltree::Document::parse(&empty).unwrap();
        assert!(!empty.contains("<circle"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(150.0, 6.0), 50.0);
        assert_eq!(nice_step(1.0, 6.0), 0.2);
        assert_eq!(ticks(0.0, 150.0), vec![0.0, 50.0, 100.0, 150.0]);
    }
}
