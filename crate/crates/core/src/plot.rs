//! Minimal SVG line charts: one polyline per series with standard-error
//! bars, plus an optional dashed vertical marker.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    /// `(x, mean, standard error)`
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub marker: Option<f64>,
    /// Fixed y range; NMI charts use `[0, 1]`.
    pub y_range: (f64, f64),
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl Chart {
    pub fn to_svg(&self) -> String {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0));
        let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
        if let Some(m) = self.marker {
            x0 = x0.min(m);
            x1 = x1.max(m);
        }
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        let (y0, y1) = self.y_range;
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let py = |y: f64| H - BOTTOM - (y.clamp(y0, y1) - y0) / (y1 - y0) * (H - TOP - BOTTOM);

        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        )
        .unwrap();
        // axes
        writeln!(
            s,
            r#"<path d="M{LEFT:.1},{TOP:.1} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
            H - BOTTOM,
            W - RIGHT
        )
        .unwrap();
        for i in 0..=5 {
            let y = y0 + (y1 - y0) * i as f64 / 5.0;
            writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.2}</text>"#,
                LEFT - 6.0,
                py(y) + 4.0
            )
            .unwrap();
            let x = x0 + (x1 - x0) * i as f64 / 5.0;
            writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                px(x),
                H - BOTTOM + 16.0,
                short(x)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            H - 12.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (TOP + H - BOTTOM) / 2.0,
            (TOP + H - BOTTOM) / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        if let Some(m) = self.marker {
            writeln!(
                s,
                r#"<line x1="{0:.1}" y1="{TOP:.1}" x2="{0:.1}" y2="{1:.1}" stroke="gray" stroke-dasharray="5,4"/>"#,
                px(m),
                H - BOTTOM
            )
            .unwrap();
        }
        for (idx, series) in self.series.iter().enumerate() {
            let color = COLORS[idx % COLORS.len()];
            let path: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y, _)| format!("{:.1},{:.1}", px(x), py(y)))
                .collect();
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                path.join(" ")
            )
            .unwrap();
            for &(x, y, se) in &series.points {
                writeln!(
                    s,
                    r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="{color}"/><circle cx="{0:.1}" cy="{3:.1}" r="3" fill="{color}"/>"#,
                    px(x),
                    py(y - se),
                    py(y + se),
                    py(y)
                )
                .unwrap();
            }
            let ly = TOP + 8.0 + 16.0 * idx as f64;
            writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="12" height="3" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                W - RIGHT - 110.0,
                ly - 4.0,
                W - RIGHT - 92.0,
                ly,
                escape(&series.name)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

fn short(x: f64) -> String {
    if x.abs() >= 0.1 || x == 0.0 {
        format!("{x:.2}")
    } else {
        format!("{x:.4}")
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_marker() {
        let chart = Chart {
            title: "NMI <sweep>".into(),
            x_label: "x".into(),
            y_label: "mean NMI".into(),
            series: vec![Series {
                name: "ML".into(),
                points: vec![(0.0, 0.1, 0.01), (1.0, 0.9, 0.02)],
            }],
            marker: Some(0.5),
            y_range: (0.0, 1.0),
        };
        let svg = chart.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("NMI &lt;sweep&gt;"));
        assert_eq!(svg, chart.to_svg());
    }
}
