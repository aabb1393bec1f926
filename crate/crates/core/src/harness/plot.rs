//! Static SVG convergence plots rendered from trace rows.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::saddle::TraceRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

/// Series drawn, with their colours.
const SERIES: [(&str, &str); 4] = [("S_x", "#1f77b4"), ("S_y", "#d62728"), ("W_x", "#2ca02c"), ("W_y", "#ff7f0e")];

fn column(row: &TraceRow, name: &str) -> f64 {
    match name {
        "S_x" => row.s_x,
        "S_y" => row.s_y,
        "W_x" => row.w_x,
        _ => row.w_y,
    }
}

/// Renders the four stationarity measures against `outer_t` on a log-scale y-axis.
pub fn render_trace_svg(rows: &[TraceRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(invalid("cannot plot an empty trace"));
    }
    let positive = rows
        .iter()
        .flat_map(|r| SERIES.iter().map(move |(n, _)| column(r, n)))
        .filter(|v| *v > 0.0 && v.is_finite());
    let (mut lo, mut hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        lo = 1e-16;
        hi = 1.0;
    }
    let (dec_lo, mut dec_hi) = (lo.log10().floor(), hi.log10().ceil());
    if dec_hi <= dec_lo {
        dec_hi = dec_lo + 1.0;
    }
    let t_max = rows.iter().map(|r| r.outer_t).max().unwrap_or(1).max(2) as f64;
    let t_min = rows.iter().map(|r| r.outer_t).min().unwrap_or(1) as f64;
    let t_span = (t_max - t_min).max(1.0);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |t: f64| MARGIN_L + (t - t_min) / t_span * pw;
    let sy = |v: f64| {
        let l = v.max(10f64.powf(dec_lo)).log10();
        MARGIN_T + (dec_hi - l) / (dec_hi - dec_lo) * ph
    };

    let mut s = String::new();
    let w = |s: &mut String, text: String| s.push_str(&text);
    w(
        &mut s,
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ),
    );
    w(&mut s, format!("<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"));
    w(&mut s, format!("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", MARGIN_L, escape(title)));
    w(
        &mut s,
        format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n"
        ),
    );
    let mut d = dec_lo;
    while d <= dec_hi + 0.5 {
        let y = sy(10f64.powf(d));
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{}</text>",
            MARGIN_L + pw,
            MARGIN_L - 6.0,
            y + 4.0,
            d as i64
        );
        d += 1.0;
    }
    let ticks = 5usize;
    for k in 0..=ticks {
        let t = t_min + t_span * k as f64 / ticks as f64;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            sx(t),
            MARGIN_T + ph + 18.0,
            t.round() as i64
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">outer iteration</text>",
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0
    );
    for (k, (name, colour)) in SERIES.iter().enumerate() {
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.outer_t as f64), sy(column(r, name))))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        let ly = MARGIN_T + 16.0 + 18.0 * k as f64;
        let lx = MARGIN_L + pw + 12.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\">{name}</text>",
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_trace_svg(rows: &[TraceRow], title: &str, path: &Path) -> Result<()> {
    let svg = render_trace_svg(rows, title)?;
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
