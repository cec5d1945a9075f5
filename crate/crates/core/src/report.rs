//! Text and SVG renderings. Every figure uses the same 800x240 canvas.

use std::fmt::Write as _;

use crate::scalar::{render, Scalar};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 240.0;
const MARGIN: f64 = 40.0;

/// One point per line: exact coordinates, a tab, float coordinates.
pub fn points_text<S: Scalar>(points: &[Vec<S>]) -> String {
    let mut out = String::new();
    for p in points {
        let exact: Vec<String> = p.iter().map(render).collect();
        let float: Vec<String> = p.iter().map(|v| format!("{}", v.to_f64())).collect();
        let _ = writeln!(out, "{}\t{}", exact.join(", "), float.join(", "));
    }
    out
}

/// Float coordinates from the points text format (exact column ignored).
pub fn parse_points_text(text: &str) -> Result<Vec<Vec<f64>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let float = line.rsplit('\t').next().unwrap_or(line);
            float
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| format!("line {}: cannot read {v:?}", i + 1)))
                .collect()
        })
        .collect()
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(body, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(body, r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="13">{}</text>"#, escape(title));
        Canvas { body }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{fill}"/>"#, w.max(0.5));
    }

    fn text(&mut self, x: f64, y: f64, size: u32, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size}">{}</text>"#, escape(s));
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn scale(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let span = if hi > lo { hi - lo } else { 1.0 };
    move |v| MARGIN + (v - lo) / span * (WIDTH - 2.0 * MARGIN)
}

fn extent<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    values.fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)))
}

/// 1D point sets as rows of ticks on a shared axis.
pub fn tick_rows_svg(title: &str, rows: &[(String, Vec<f64>)]) -> String {
    let mut c = Canvas::new(title);
    let (lo, hi) = extent(rows.iter().flat_map(|r| r.1.iter()));
    let x = scale(lo, hi);
    let n = rows.len().max(1) as f64;
    let band = (HEIGHT - 2.0 * MARGIN) / n;
    for (k, (label, pts)) in rows.iter().enumerate() {
        let y = MARGIN + band * (k as f64 + 0.5);
        c.line(MARGIN, y, WIDTH - MARGIN, y, "#bbbbbb", 1.0);
        for &p in pts {
            c.line(x(p), y - band * 0.3, x(p), y + band * 0.3, "black", 1.0);
        }
        c.text(MARGIN, y - band * 0.35, 11, label);
    }
    c.text(MARGIN, HEIGHT - 12.0, 11, &format!("{lo:.4}"));
    c.text(WIDTH - MARGIN - 60.0, HEIGHT - 12.0, 11, &format!("{hi:.4}"));
    c.finish()
}

/// Window as a bar, acceptance domain as highlighted sub-bars, star values
/// of hits as ticks underneath.
pub fn domain_bars_svg(title: &str, window: &[(f64, f64)], domain: &[(f64, f64)], ticks: &[f64]) -> String {
    let mut c = Canvas::new(title);
    let (lo, hi) = extent(window.iter().flat_map(|(a, b)| [a, b]).chain(domain.iter().flat_map(|(a, b)| [a, b])));
    let x = scale(lo, hi);
    let (bar_y, bar_h) = (90.0, 30.0);
    for &(a, b) in window {
        c.rect(x(a), bar_y, x(b) - x(a), bar_h, "#dddddd");
    }
    for &(a, b) in domain {
        c.rect(x(a), bar_y + 5.0, x(b) - x(a), bar_h - 10.0, "#d62728");
    }
    for &t in ticks {
        c.line(x(t), 140.0, x(t), 160.0, "black", 0.7);
    }
    c.text(MARGIN, 80.0, 11, "window (grey), acceptance domain (red), star values (ticks)");
    c.text(MARGIN, HEIGHT - 12.0, 11, &format!("{lo:.4}"));
    c.text(WIDTH - MARGIN - 60.0, HEIGHT - 12.0, 11, &format!("{hi:.4}"));
    c.finish()
}

/// Log-scale polylines of `(x, gap)` series.
pub fn gap_decay_svg(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut c = Canvas::new(title);
    let pts: Vec<(f64, f64)> =
        series.iter().flat_map(|s| s.1.iter().copied()).filter(|p| p.1 > 0.0 && p.1.is_finite()).collect();
    if pts.is_empty() {
        c.text(MARGIN, HEIGHT / 2.0, 12, "no positive gaps");
        return c.finish();
    }
    let (x_lo, x_hi) = extent(pts.iter().map(|p| &p.0));
    let logs: Vec<f64> = pts.iter().map(|p| p.1.log10()).collect();
    let (y_lo, y_hi) = extent(logs.iter());
    let (y_lo, y_hi) = if y_hi > y_lo { (y_lo, y_hi) } else { (y_lo - 0.5, y_hi + 0.5) };
    let x = scale(x_lo, x_hi);
    let y = |v: f64| HEIGHT - MARGIN - (v.log10() - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    c.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, "black", 1.0);
    c.line(MARGIN, MARGIN, MARGIN, HEIGHT - MARGIN, "black", 1.0);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    for (k, (label, s)) in series.iter().enumerate() {
        let color = colors[k % colors.len()];
        let coords: Vec<String> = s
            .iter()
            .filter(|p| p.1 > 0.0 && p.1.is_finite())
            .map(|&(a, b)| format!("{:.2},{:.2}", x(a), y(b)))
            .collect();
        let _ = writeln!(
            c.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        c.text(WIDTH - MARGIN - 220.0, MARGIN + 14.0 * (k as f64 + 1.0), 11, label);
        c.line(WIDTH - MARGIN - 240.0, MARGIN + 14.0 * (k as f64 + 1.0) - 4.0, WIDTH - MARGIN - 225.0, MARGIN + 14.0 * (k as f64 + 1.0) - 4.0, color, 2.0);
    }
    c.text(4.0, MARGIN + 4.0, 10, &format!("1e{y_hi:.1}"));
    c.text(4.0, HEIGHT - MARGIN, 10, &format!("1e{y_lo:.1}"));
    c.text(MARGIN, HEIGHT - 12.0, 11, &format!("{x_lo}"));
    c.text(WIDTH - MARGIN - 30.0, HEIGHT - 12.0, 11, &format!("{x_hi}"));
    c.finish()
}

/// Tiles `(start, length, letter)` as a coloured strip.
pub fn tiling_strip_svg(title: &str, tiles: &[(f64, f64, String)]) -> String {
    let mut c = Canvas::new(title);
    let (lo, hi) = extent(tiles.iter().flat_map(|t| [&t.0]).chain(tiles.last().map(|t| &t.0)));
    let end = tiles.last().map_or(hi, |t| t.0 + t.1);
    let x = scale(lo, end);
    let mut letters: Vec<&str> = tiles.iter().map(|t| t.2.as_str()).collect();
    letters.sort();
    letters.dedup();
    let colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    for (start, len, letter) in tiles {
        let k = letters.iter().position(|l| l == letter).unwrap_or(0);
        c.rect(x(*start), 100.0, x(start + len) - x(*start), 40.0, colors[k % colors.len()]);
        c.line(x(*start), 95.0, x(*start), 145.0, "white", 0.8);
    }
    for (k, l) in letters.iter().enumerate() {
        c.rect(MARGIN + 70.0 * k as f64, 170.0, 12.0, 12.0, colors[k % colors.len()]);
        c.text(MARGIN + 70.0 * k as f64 + 16.0, 181.0, 11, l);
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;

    #[test]
    fn points_round_trip() {
        let f = QuadField::GOLDEN;
        let text = points_text(&[vec![f.phi()], vec![f.int(2)]]);
        assert!(text.starts_with("1/2 + 1/2*sqrt(5)\t1.618"));
        let back = parse_points_text(&text).unwrap();
        assert_eq!(back[1], vec![2.0]);
    }

    #[test]
    fn fixed_canvas() {
        for svg in [
            tick_rows_svg("t", &[("a".into(), vec![0.0, 1.0])]),
            domain_bars_svg("t", &[(-1.0, 0.6)], &[(0.0, 0.2)], &[0.1]),
            gap_decay_svg("t", &[("g".into(), vec![(1.0, 0.1), (2.0, 0.01)])]),
            tiling_strip_svg("t", &[(0.0, 1.6, "a".into()), (1.6, 1.0, "b".into())]),
        ] {
            assert!(svg.starts_with(r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="240""#));
            assert!(svg.trim_end().ends_with("</svg>"));
        }
    }
}
