//! Minimal static SVG charts. They are meant for eyeballing results; the
//! CSV files are the data of record.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    /// `(x, y, half_width)` triples; a zero half width draws no bar.
    pub points: Vec<(f64, f64, f64)>,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self { x: pad(x), y: pad(y) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>
"#,
        (W - RIGHT + LEFT) / 2.0,
        escape(title),
        (W - RIGHT + LEFT) / 2.0,
        H - 12.0,
        escape(xlabel),
        H / 2.0,
        H / 2.0,
        escape(ylabel),
    );
}

fn axes(out: &mut String, f: &Frame, xticks: &[(f64, String)]) {
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(out, r#"<path d="M{x0},{y0} V{y1} H{x1}" stroke="black" fill="none"/>"#);
    for k in 0..=4 {
        let v = f.y.0 + (f.y.1 - f.y.0) * k as f64 / 4.0;
        let y = f.py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            x0 - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    for (v, label) in xticks {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, f.px(*v), y1 + 18.0, escape(label));
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Lines with markers and optional error bars, one color per series.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let pts = || series.iter().flat_map(|s| s.points.iter());
    let x = bounds(pts().map(|p| p.0));
    let y = bounds(pts().flat_map(|p| [p.1 - p.2, p.1 + p.2]));
    let f = Frame::new(x, y);
    let mut xs: Vec<f64> = pts().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ticks: Vec<(f64, String)> = xs.iter().map(|&v| (v, format!("{v}"))).collect();

    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel);
    axes(&mut out, &f, &ticks);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = s.points.iter().map(|p| format!("{:.1},{:.1}", f.px(p.0), f.py(p.1))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, path.join(" "));
        for &(px, py, hw) in &s.points {
            let (cx, cy) = (f.px(px), f.py(py));
            if hw > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="{color}"/>"#,
                    f.py(py - hw),
                    f.py(py + hw)
                );
            }
            let _ = writeln!(out, r#"<circle cx="{cx:.1}" cy="{cy:.1}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="4" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT + 12.0,
            ly,
            W - RIGHT + 30.0,
            ly + 6.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bars from zero to each mean, with whiskers of the given half widths.
pub fn bar_chart(title: &str, ylabel: &str, bars: &[(String, f64, f64)]) -> String {
    let y = bounds(bars.iter().flat_map(|b| [0.0, b.1 - b.2, b.1 + b.2]));
    let f = Frame::new((0.0, bars.len() as f64), y);
    let ticks: Vec<(f64, String)> = bars.iter().enumerate().map(|(k, b)| (k as f64 + 0.5, b.0.clone())).collect();

    let mut out = String::new();
    header(&mut out, title, "", ylabel);
    axes(&mut out, &f, &ticks);
    for (k, (_, mean, hw)) in bars.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let (xa, xb) = (f.px(k as f64 + 0.2), f.px(k as f64 + 0.8));
        let (ya, yb) = (f.py(*mean), f.py(0.0));
        let _ = writeln!(
            out,
            r#"<rect x="{xa:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}"/>"#,
            ya.min(yb),
            xb - xa,
            (ya - yb).abs()
        );
        let cx = f.px(k as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black" stroke-width="1.5"/>"#,
            f.py(mean - hw),
            f.py(mean + hw)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Equal-width histogram of `values`.
pub fn histogram(title: &str, xlabel: &str, values: &[f64], bins: usize) -> String {
    let bins = bins.max(1);
    let (lo, hi) = bounds(values.iter().copied());
    let (lo, hi) = if values.is_empty() { (0.0, 1.0) } else if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let top = *counts.iter().max().unwrap_or(&1) as f64;
    let f = Frame::new((lo, hi), (0.0, top.max(1.0)));
    let ticks = [(lo, tick_label(lo)), (hi, tick_label(hi))];

    let mut out = String::new();
    header(&mut out, title, xlabel, "count");
    axes(&mut out, &f, &ticks);
    for (k, &c) in counts.iter().enumerate() {
        let (xa, xb) = (f.px(lo + k as f64 * width), f.px(lo + (k + 1) as f64 * width));
        let ya = f.py(c as f64);
        let _ = writeln!(
            out,
            r#"<rect x="{xa:.1}" y="{ya:.1}" width="{:.1}" height="{:.1}" fill="{}" stroke="white"/>"#,
            xb - xa,
            f.py(0.0) - ya,
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}
