//! Minimal SVG figures: line panels, time–period heatmaps and scatter
//! plots with fitted curves. Output is plain text with fixed numeric
//! precision so identical inputs give identical bytes.

use std::fmt::Write as _;

use ucurve::wavelet::Matrix;

const W: f64 = 820.0;
const PLOT_X: f64 = 70.0;
const PLOT_W: f64 = 700.0;

/// Blue → red quartile palette.
pub const QUARTILE_COLORS: [&str; 4] = ["#2c7bb6", "#abd9e9", "#fdae61", "#d7191c"];

struct Doc {
    body: String,
}

impl Doc {
    fn new(height: f64, title: &str, meta: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{height}\" viewBox=\"0 0 {W} {height}\" font-family=\"sans-serif\" font-size=\"11\">"
        );
        let _ = writeln!(body, "<metadata>{}</metadata>", esc(meta));
        let _ = writeln!(body, "<rect width=\"{W}\" height=\"{height}\" fill=\"white\"/>");
        let _ = writeln!(body, "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">{}</text>", W / 2.0, esc(title));
        Self { body }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.body, "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\">{}</text>", esc(s));
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{stroke}\"/>"
        );
    }

    fn frame(&mut self, y0: f64, h: f64) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{PLOT_X}\" y=\"{y0:.1}\" width=\"{PLOT_W}\" height=\"{h:.1}\" fill=\"none\" stroke=\"black\"/>"
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let mut p = String::new();
        for (x, y) in pts {
            let _ = write!(p, "{x:.1},{y:.1} ");
        }
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            p.trim_end()
        );
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Linear map of `v` from [lo, hi] to [a, b].
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn year_ticks(doc: &mut Doc, t0: f64, t1: f64, y: f64) {
    let step = if t1 - t0 > 20.0 { 5.0 } else { 1.0 };
    let mut t = (t0 / step).ceil() * step;
    while t <= t1 {
        let x = scale(t, t0, t1, PLOT_X, PLOT_X + PLOT_W);
        doc.line(x, y, x, y + 4.0, "black");
        doc.text(x, y + 15.0, "middle", &format!("{t:.0}"));
        t += step;
    }
}

/// One panel per series, stacked vertically, on a shared time axis.
pub fn line_panels(title: &str, meta: &str, times: &[f64], panels: &[(String, Vec<f64>)]) -> String {
    let ph = 90.0;
    let gap = 16.0;
    let height = 40.0 + panels.len() as f64 * (ph + gap) + 20.0;
    let mut doc = Doc::new(height, title, meta);
    let (t0, t1) = bounds(times);
    for (k, (name, ys)) in panels.iter().enumerate() {
        let y0 = 30.0 + k as f64 * (ph + gap);
        doc.frame(y0, ph);
        let (lo, hi) = bounds(ys);
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(ys)
            .filter(|(_, v)| v.is_finite())
            .map(|(&t, &v)| (scale(t, t0, t1, PLOT_X, PLOT_X + PLOT_W), scale(v, lo, hi, y0 + ph, y0)))
            .collect();
        doc.polyline(&pts, "#1f4e79", 1.0);
        doc.text(PLOT_X + 6.0, y0 + 13.0, "start", name);
        doc.text(PLOT_X - 4.0, y0 + 10.0, "end", &format!("{hi:.4}"));
        doc.text(PLOT_X - 4.0, y0 + ph, "end", &format!("{lo:.4}"));
    }
    year_ticks(&mut doc, t0, t1, height - 30.0);
    doc.finish()
}

/// Time × period heatmap. `bucket` holds values in [0, 1] (e.g. quantile
/// ranks) coloured by quartile; `mask` marks cells to hatch (significant);
/// `coi` shades the edge-affected region. Rows are periods, ascending.
pub fn heatmap(
    title: &str,
    meta: &str,
    times: &[f64],
    periods: &[f64],
    bucket: &Matrix,
    mask: Option<&Vec<Vec<bool>>>,
    coi: &[f64],
) -> String {
    let ph = 340.0;
    let y0 = 30.0;
    let height = y0 + ph + 70.0;
    let mut doc = Doc::new(height, title, meta);
    doc.body.push_str(
        "<defs><pattern id=\"hatch\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\"><path d=\"M0,4 L4,0\" stroke=\"black\" stroke-width=\"0.6\"/></pattern></defs>\n",
    );
    let n = times.len();
    let (t0, t1) = bounds(times);
    let step = if n > 1 { (t1 - t0) / (n - 1) as f64 } else { 1.0 };
    let xl = |t: f64| scale(t - step / 2.0, t0 - step / 2.0, t1 + step / 2.0, PLOT_X, PLOT_X + PLOT_W);
    let lp: Vec<f64> = periods.iter().map(|p| p.log2()).collect();
    let dlp = if lp.len() > 1 { lp[1] - lp[0] } else { 1.0 };
    let (plo, phi) = (lp[0] - dlp / 2.0, lp[lp.len() - 1] + dlp / 2.0);
    let yp = |l: f64| scale(l, plo, phi, y0 + ph, y0);
    // Run-length encode each row by colour bucket.
    for (i, row) in bucket.iter().enumerate() {
        let (ya, yb) = (yp(lp[i] + dlp / 2.0), yp(lp[i] - dlp / 2.0));
        let mut j = 0;
        while j < n {
            let q = quartile(row[j]);
            let mut k = j + 1;
            while k < n && quartile(row[k]) == q {
                k += 1;
            }
            let (xa, xb) = (xl(times[j]), xl(times[k - 1] + step));
            let fill = q.map_or("#dddddd", |q| QUARTILE_COLORS[q]);
            let _ = writeln!(
                doc.body,
                "<rect x=\"{xa:.2}\" y=\"{ya:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                xb - xa,
                yb - ya
            );
            j = k;
        }
    }
    if let Some(mask) = mask {
        for (i, row) in mask.iter().enumerate() {
            let (ya, yb) = (yp(lp[i] + dlp / 2.0), yp(lp[i] - dlp / 2.0));
            let mut j = 0;
            while j < n {
                if !row[j] {
                    j += 1;
                    continue;
                }
                let mut k = j + 1;
                while k < n && row[k] {
                    k += 1;
                }
                let (xa, xb) = (xl(times[j]), xl(times[k - 1] + step));
                let _ = writeln!(
                    doc.body,
                    "<rect x=\"{xa:.2}\" y=\"{ya:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"url(#hatch)\"/>",
                    xb - xa,
                    yb - ya
                );
                j = k;
            }
        }
    }
    // Cone of influence: shade periods above the cone.
    let top = y0;
    let mut poly = format!("{:.2},{top:.2} ", xl(times[0]));
    for (t, c) in times.iter().zip(coi) {
        let y = yp(c.log2().clamp(plo, phi));
        let _ = write!(poly, "{:.2},{y:.2} ", xl(*t) + PLOT_W / n as f64 / 2.0);
    }
    let _ = write!(poly, "{:.2},{top:.2}", xl(times[n - 1] + step));
    let _ = writeln!(doc.body, "<polygon points=\"{poly}\" fill=\"white\" fill-opacity=\"0.55\" stroke=\"black\" stroke-width=\"0.8\"/>");
    doc.frame(y0, ph);
    // Period axis at powers of two.
    let mut p = 2f64.powf(plo.ceil());
    while p.log2() <= phi {
        let y = yp(p.log2());
        doc.line(PLOT_X - 4.0, y, PLOT_X, y, "black");
        doc.text(PLOT_X - 6.0, y + 4.0, "end", &format!("{p}"));
        p *= 2.0;
    }
    doc.text(18.0, y0 + ph / 2.0, "middle", "period (years)");
    year_ticks(&mut doc, t0, t1, y0 + ph);
    // Legend.
    for (q, c) in QUARTILE_COLORS.iter().enumerate() {
        let x = PLOT_X + q as f64 * 90.0;
        let _ = writeln!(doc.body, "<rect x=\"{x}\" y=\"{}\" width=\"14\" height=\"10\" fill=\"{c}\"/>", height - 22.0);
        doc.text(x + 18.0, height - 13.0, "start", &format!("Q{}", q + 1));
    }
    doc.finish()
}

fn quartile(v: f64) -> Option<usize> {
    if v.is_finite() {
        Some(((v * 4.0).floor() as usize).min(3))
    } else {
        None
    }
}

/// Scatter of (x, y) with fitted curves overlaid.
pub fn scatter_fit(title: &str, meta: &str, x: &[f64], y: &[f64], curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let ph = 380.0;
    let y0 = 30.0;
    let height = y0 + ph + 60.0 + 16.0 * curves.len() as f64;
    let mut doc = Doc::new(height, title, meta);
    let (xlo, xhi) = bounds(x);
    let all_y: Vec<f64> = y.iter().copied().chain(curves.iter().flat_map(|c| c.1.iter().map(|p| p.1))).collect();
    let (ylo, yhi) = bounds(&all_y);
    let sx = |v: f64| scale(v, xlo, xhi, PLOT_X, PLOT_X + PLOT_W);
    let sy = |v: f64| scale(v, ylo, yhi, y0 + ph, y0);
    doc.frame(y0, ph);
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(doc.body, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"1.6\" fill=\"#555555\"/>", sx(*a), sy(*b));
    }
    let colors = ["#d7191c", "#1a9641", "#2c7bb6", "#7b3294"];
    for (k, (label, pts)) in curves.iter().enumerate() {
        let c = colors[k % colors.len()];
        let p: Vec<(f64, f64)> = pts.iter().map(|&(a, b)| (sx(a), sy(b))).collect();
        doc.polyline(&p, c, 1.6);
        let ly = y0 + ph + 40.0 + 16.0 * k as f64;
        doc.line(PLOT_X, ly - 4.0, PLOT_X + 20.0, ly - 4.0, c);
        doc.text(PLOT_X + 26.0, ly, "start", label);
    }
    doc.text(PLOT_X - 4.0, y0 + 10.0, "end", &format!("{yhi:.0}"));
    doc.text(PLOT_X - 4.0, y0 + ph, "end", &format!("{ylo:.0}"));
    doc.text(PLOT_X, y0 + ph + 16.0, "start", &format!("{xlo:.0}"));
    doc.text(PLOT_X + PLOT_W, y0 + ph + 16.0, "end", &format!("{xhi:.0}"));
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_is_wellformed() {
        let times: Vec<f64> = (0..6).map(|t| 2000.0 + t as f64 / 12.0).collect();
        let periods = vec![0.5, 1.0, 2.0];
        let v = vec![vec![0.0, 0.1, 0.5, 0.6, 0.9, 1.0]; 3];
        let mask = vec![vec![false, true, true, false, false, true]; 3];
        let s = heatmap("t", "m", &times, &periods, &v, Some(&mask), &[0.4; 6]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("url(#hatch)"));
        // One lowest-quartile run per row, plus the legend swatch.
        assert_eq!(s.matches(QUARTILE_COLORS[0]).count(), 3 + 1);
    }

    #[test]
    fn escapes_text() {
        let s = line_panels("a<b", "x&y", &[0.0, 1.0], &[("s".into(), vec![1.0, 2.0])]);
        assert!(s.contains("a&lt;b") && s.contains("x&amp;y"));
    }

    #[test]
    fn quartile_edges() {
        assert_eq!(quartile(0.0), Some(0));
        assert_eq!(quartile(0.25), Some(1));
        assert_eq!(quartile(1.0), Some(3));
        assert_eq!(quartile(f64::NAN), None);
    }
}
