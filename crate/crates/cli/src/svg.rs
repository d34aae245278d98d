//! Minimal SVG scatter plot with an optional limit-set overlay.

use std::fmt::Write as _;

use meplot_core::setgeom::Point;

const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

pub struct PlotDocument {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<Point>,
    /// Polyline drawn over the points (the clipped limit set).
    pub overlay: Option<Vec<Point>>,
    /// Data box ((x0, x1), (y0, y1)); `None` fits the points.
    pub bounds: Option<((f64, f64), (f64, f64))>,
    pub width: u32,
    pub height: u32,
    /// Free-form `key=value` notes for the leading comment.
    pub notes: Vec<(String, String)>,
    /// Exact invocation, stored in `<metadata>`.
    pub command_line: String,
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// XML comments may not contain `--` or end in `-`.
fn comment_safe(s: &str) -> String {
    let mut out = s.replace("--", "- -");
    while out.contains("--") {
        out = out.replace("--", "- -");
    }
    if out.ends_with('-') {
        out.push(' ');
    }
    out
}

fn fit(points: &[Point]) -> ((f64, f64), (f64, f64)) {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = xs;
    for p in points {
        xs = (xs.0.min(p.x), xs.1.max(p.x));
        ys = (ys.0.min(p.y), ys.1.max(p.y));
    }
    let pad = |(lo, hi): (f64, f64)| {
        let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    (pad(xs), pad(ys))
}

impl PlotDocument {
    pub fn render(&self) -> String {
        let (w, h) = (self.width as f64, self.height as f64);
        let ((x0, x1), (y0, y1)) = self.bounds.unwrap_or_else(|| fit(&self.points));
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (w - 2.0 * MARGIN);
        let sy = |y: f64| h - MARGIN - (y - y0) / (y1 - y0) * (h - 2.0 * MARGIN);
        let inside = |p: &Point| (x0..=x1).contains(&p.x) && (y0..=y1).contains(&p.y);

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let notes: Vec<String> = self.notes.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "<!-- meplot {} -->", comment_safe(&notes.join(" ")));
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(
            s,
            "<metadata><command>{}</command></metadata>",
            escape(&self.command_line)
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

        // Axes and ticks.
        let (left, right, top, bottom) = (MARGIN, w - MARGIN, MARGIN, h - MARGIN);
        let _ = writeln!(
            s,
            r#"<g stroke="black" stroke-width="1"><line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/><line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/></g>"#
        );
        let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
        for j in 0..=TICKS {
            let f = j as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                sx(xv),
                bottom + 16.0,
                tick_label(xv)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 6.0,
                sy(yv) + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            w / 2.0,
            h - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(s, "</g>");

        if let Some(line) = &self.overlay {
            let pts: Vec<String> = line
                .iter()
                .map(|p| format!("{:.3},{:.3}", sx(p.x), sy(p.y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="limit" fill="none" stroke="crimson" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let _ = writeln!(s, r#"<g class="points" fill="steelblue" fill-opacity="0.7">"#);
        for p in self.points.iter().filter(|p| inside(p)) {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="2"/>"#, sx(p.x), sy(p.y));
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "</svg>");
        s
    }
}

fn tick_label(v: f64) -> String {
    let r = format!("{v:.3}");
    let r = r.trim_end_matches('0').trim_end_matches('.');
    if r == "-0" { "0".into() } else { r.into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_never_hold_double_dash() {
        assert_eq!(comment_safe("a---b-"), "a- - -b- ");
        assert!(!comment_safe("----").contains("--"));
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(1.0), "1");
        assert_eq!(tick_label(2.5), "2.5");
        assert_eq!(tick_label(-0.0001), "0");
    }
}
