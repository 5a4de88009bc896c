//! Standalone SVG plots of selection curves: log-scaled time on x, selection
//! probability on y, one line and one shaded confidence band per arm.
//!
//! Lines and bands are the only `<path>` elements in the document; axes,
//! ticks and legend swatches use `<line>`, `<rect>` and `<text>`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harness::SelectionCurve;

#[derive(Debug, Clone)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    /// Defaults to the curve label.
    pub title: Option<String>,
    pub palette: Vec<String>,
    pub band_opacity: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 400.0,
            title: None,
            palette: [
                "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                "#7f7f7f",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            band_opacity: 0.2,
        }
    }
}

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
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

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, t: u64) -> f64 {
        let u = ((t as f64).log10() - self.lo) / (self.hi - self.lo);
        self.x0 + u * (self.x1 - self.x0)
    }

    fn y(&self, p: f64) -> f64 {
        self.y1 - p.clamp(0.0, 1.0) * (self.y1 - self.y0)
    }
}

pub fn render_svg(curve: &SelectionCurve, style: &SvgStyle) -> Result<String> {
    if curve.checkpoints.is_empty() {
        return Err(Error::Precondition("curve has no checkpoints".into()));
    }
    let first = curve.checkpoints[0] as f64;
    let last = *curve.checkpoints.last().unwrap() as f64;
    let (mut lo, mut hi) = (first.log10().floor(), last.log10().ceil());
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let frame = Frame {
        x0: MARGIN_LEFT,
        x1: style.width - MARGIN_RIGHT,
        y0: MARGIN_TOP,
        y1: style.height - MARGIN_BOTTOM,
        lo,
        hi,
    };
    let title = style.title.clone().unwrap_or_else(|| curve.label.clone());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        style.width / 2.0,
        escape(&title)
    );

    // Decade grid on x, quarter grid on y.
    let mut decade = lo.ceil() as i32;
    while decade as f64 <= hi {
        let x = frame.x0 + (decade as f64 - lo) / (hi - lo) * (frame.x1 - frame.x0);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>",
            frame.y0, frame.y1
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">10<tspan dy="-5" font-size="9">{decade}</tspan></text>"#,
            frame.y1 + 18.0
        );
        decade += 1;
    }
    for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = frame.y(q);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>",
            frame.x0, frame.x1
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{q}</text>"#,
            frame.x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.2}" y1="{y1:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="black"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#,
        x0 = frame.x0,
        x1 = frame.x1,
        y0 = frame.y0,
        y1 = frame.y1
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">round t (log scale)</text>"#,
        (frame.x0 + frame.x1) / 2.0,
        style.height - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">P[a_t = a]</text>"#,
        (frame.y0 + frame.y1) / 2.0,
        (frame.y0 + frame.y1) / 2.0
    );

    let colour = |arm: usize| style.palette[arm % style.palette.len()].as_str();
    for arm in 0..curve.arm_count() {
        let mut d = String::new();
        for (c, &t) in curve.checkpoints.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2} ", if c == 0 { 'M' } else { 'L' }, frame.x(t), frame.y(curve.ci_hi[c][arm]));
        }
        for (c, &t) in curve.checkpoints.iter().enumerate().rev() {
            let _ = write!(d, "L{:.2},{:.2} ", frame.x(t), frame.y(curve.ci_lo[c][arm]));
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r#"<path class="band" d="{d}" fill="{}" fill-opacity="{}" stroke="none"/>"#,
            colour(arm),
            style.band_opacity
        );
    }
    for arm in 0..curve.arm_count() {
        let points: Vec<String> = curve
            .checkpoints
            .iter()
            .enumerate()
            .map(|(c, &t)| format!("{:.2},{:.2}", frame.x(t), frame.y(curve.p_hat[c][arm])))
            .collect();
        let d = format!("M{}", points.join(" L"));
        let _ = writeln!(
            s,
            r#"<path class="line" d="{d}" fill="none" stroke="{}" stroke-width="2"/>"#,
            colour(arm)
        );
    }

    for (arm, label) in curve.arm_labels.iter().enumerate() {
        let y = frame.y0 + 8.0 + 18.0 * arm as f64;
        let x = frame.x1 - 150.0;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{x:.1}" y="{:.1}" width="14" height="4" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 2.0,
            colour(arm),
            x + 20.0,
            y + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
