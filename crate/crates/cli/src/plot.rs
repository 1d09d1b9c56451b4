//! Minimal SVG output for Kaplan-Meier step curves.

use std::fmt::Write;

use tailcheck::survival::KmCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Vertices of the right-continuous step function, from `(0, 1)` to
/// `(t_end, S(t_end))`.
pub fn step_points(curve: &KmCurve, t_end: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, 1.0)];
    let mut level = 1.0;
    for (&t, &s) in curve.times.iter().zip(&curve.survival) {
        if t > t_end {
            break;
        }
        pts.push((t, level));
        pts.push((t, s));
        level = s;
    }
    pts.push((t_end, level));
    pts
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One polyline per `(label, curve)`, drawn on `[0, t_end] x [0, 1]`.
pub fn km_svg(title: &str, curves: &[(&str, &KmCurve)], t_end: f64) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |t: f64| MARGIN_LEFT + plot_w * t / t_end;
    let sy = |s: f64| MARGIN_TOP + plot_h * (1.0 - s);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes and ticks
    let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(t_end), sy(1.0));
    let _ = writeln!(svg, r#"<g stroke="black" fill="none">"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(svg, "</g>");
    for i in 0..=5 {
        let s = i as f64 / 5.0;
        let y = sy(s);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{s:.1}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    for i in 0..=5 {
        let t = t_end * i as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            trim_num(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">time</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">survival</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = step_points(curve, t_end)
            .into_iter()
            .map(|(t, s)| format!("{:.2},{:.2}", sx(t), sy(s)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            escape(label)
        );
        let ly = MARGIN_TOP + 12.0 + 16.0 * i as f64;
        let lx = x1 - 90.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn trim_num(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_go_across_then_down() {
        let curve = KmCurve {
            times: vec![1.0, 2.0],
            survival: vec![0.5, 0.25],
            at_risk: vec![4, 2],
            events: vec![2, 1],
        };
        assert_eq!(
            step_points(&curve, 3.0),
            vec![
                (0.0, 1.0),
                (1.0, 1.0),
                (1.0, 0.5),
                (2.0, 0.5),
                (2.0, 0.25),
                (3.0, 0.25)
            ]
        );
        assert_eq!(trim_num(2.5), "2.5");
        assert_eq!(trim_num(3.0), "3");
    }
}
