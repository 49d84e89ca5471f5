//! Minimal SVG line charts for impulse responses.

use std::fmt::Write as _;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 40.0;

/// One response path against horizon 0..n−1, with a zero line.
pub fn line_chart(title: &str, values: &[f64]) -> String {
    let n = values.len().max(2);
    let lo = values.iter().copied().fold(0.0_f64, f64::min);
    let hi = values.iter().copied().fold(0.0_f64, f64::max);
    let span = if hi - lo > 0.0 { hi - lo } else { 1.0 };
    let pw = WIDTH - 2.0 * MARGIN;
    let ph = HEIGHT - 2.0 * MARGIN;
    let x = |i: usize| MARGIN + pw * i as f64 / (n - 1) as f64;
    let y = |v: f64| MARGIN + ph * (hi - v) / span;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(
        s,
        r##"<text x="{}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"##,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#999"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{0:.3}" x2="{1}" y2="{0:.3}" stroke="#999" stroke-dasharray="4 3"/>"##,
        y(0.0),
        WIDTH - MARGIN
    );
    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.3},{:.3}", x(i), y(v)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f4e99" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );
    let label = |s: &mut String, yy: f64, v: f64| {
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{:.3}" font-family="sans-serif" font-size="10" text-anchor="end">{:.4}</text>"##,
            MARGIN - 4.0,
            yy + 3.0,
            v
        );
    };
    label(&mut s, y(hi), hi);
    label(&mut s, y(lo), lo);
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">horizon 0..{}</text>"##,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        values.len().saturating_sub(1)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
