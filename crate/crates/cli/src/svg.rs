//! Minimal SVG line charts for quick inspection of the CSV outputs.

use std::fmt::Write;

use crate::report::fmt_sig;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

pub struct Series<'a> {
    pub label: &'a str,
    /// `None` values break the line.
    pub points: Vec<(f64, Option<f64>)>,
}

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl Chart<'_> {
    pub fn render(&self) -> String {
        let ty = |y: f64| if self.log_y { y.log10() } else { y };
        let usable = |y: f64| y.is_finite() && (!self.log_y || y > 0.0);
        let pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter_map(|(x, y)| y.filter(|v| usable(*v)).map(|v| (*x, ty(v))));
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        let y_tick = |v: f64| if self.log_y { 10f64.powf(v) } else { v };
        for (v, anchor_y) in [(y0, py(y0)), (y1, py(y1))] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                MARGIN - 4.0,
                anchor_y + 4.0,
                fmt_sig(round3(y_tick(v)))
            );
        }
        for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
            let _ = writeln!(
                s,
                r#"<text x="{anchor_x}" y="{}" text-anchor="middle">{}</text>"#,
                HEIGHT - MARGIN + 16.0,
                fmt_sig(round3(v))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&format!("{}{}", self.y_label, if self.log_y { " (log scale)" } else { "" }))
        );

        for (k, series) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mut segment: Vec<String> = Vec::new();
            let flush = |segment: &mut Vec<String>, s: &mut String| {
                if segment.len() > 1 {
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                        segment.join(" ")
                    );
                } else if let Some(p) = segment.first() {
                    let (cx, cy) = p.split_once(',').expect("point");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>"#);
                }
                segment.clear();
            };
            for (x, y) in &series.points {
                match y.filter(|v| usable(*v)) {
                    Some(v) => segment.push(format!("{:.2},{:.2}", px(*x), py(ty(v)))),
                    None => flush(&mut segment, &mut s),
                }
            }
            flush(&mut segment, &mut s);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
                MARGIN + 8.0,
                MARGIN + 16.0 + 14.0 * k as f64,
                escape(series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn round3(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let scale = 10f64.powi(2 - v.abs().log10().floor() as i32);
    (v * scale).round() / scale
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_split_polylines() {
        let chart = Chart {
            title: "t <1>",
            x_label: "x",
            y_label: "y",
            log_y: false,
            series: vec![Series {
                label: "s",
                points: vec![(0.0, Some(1.0)), (1.0, Some(2.0)), (2.0, None), (3.0, Some(1.5)), (4.0, Some(0.5))],
            }],
        };
        let svg = chart.render();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("t &lt;1&gt;"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn log_scale_skips_non_positive() {
        let chart = Chart {
            title: "t",
            x_label: "x",
            y_label: "y",
            log_y: true,
            series: vec![Series { label: "s", points: vec![(0.0, Some(0.0)), (1.0, Some(10.0))] }],
        };
        let svg = chart.render();
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
