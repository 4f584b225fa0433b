//! Self-contained SVG line plots with a log-scaled x axis. Iterates whose
//! gap reaches the threshold are drawn as translucent red bands.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotData {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub gap: Vec<f64>,
}

/// Reads the named columns from CSV text with a header row.
pub fn read_columns(csv: &str, t_col: &str, y_col: &str, gap_col: &str) -> Result<PlotData, String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().ok_or("empty CSV")?.split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| format!("CSV has no column '{name}'"))
    };
    let (ti, yi, gi) = (col(t_col)?, col(y_col)?, col(gap_col)?);
    let mut data = PlotData::default();
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64, String> {
            fields
                .get(i)
                .ok_or_else(|| format!("row {} is short", n + 2))?
                .parse()
                .map_err(|e| format!("row {}: {e}", n + 2))
        };
        data.t.push(get(ti)?);
        data.y.push(get(yi)?);
        data.gap.push(get(gi)?);
    }
    if data.t.is_empty() {
        return Err("CSV has no data rows".into());
    }
    Ok(data)
}

struct Axes {
    log_lo: f64,
    log_hi: f64,
    y_hi: f64,
}

impl Axes {
    fn px(&self, t: f64) -> f64 {
        LEFT + (t.max(1.0).log10() - self.log_lo) / (self.log_hi - self.log_lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.y_hi * (HEIGHT - TOP - BOTTOM)
    }
}

/// Index ranges `[start, end]` of consecutive rows with `gap >= threshold`.
fn bands(gap: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, g) in gap.iter().enumerate() {
        match (start, *g >= threshold) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, gap.len() - 1));
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(data: &PlotData, title: &str, y_label: &str, gap_threshold: f64) -> String {
    let t_max = data.t.iter().copied().fold(1.0, f64::max);
    let y_max = data.y.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let axes = Axes {
        log_lo: 0.0,
        log_hi: t_max.log10().max(1.0),
        y_hi: if y_max > 0.0 { y_max * 1.05 } else { 1.0 },
    };
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for (a, b) in bands(&data.gap, gap_threshold) {
        let left = axes.px(data.t[a]);
        let right = axes.px(data.t[b] + 1.0).min(x1).max(left + 0.5);
        let _ = writeln!(
            s,
            r#"<rect class="bad" x="{left:.2}" y="{y1}" width="{:.2}" height="{}" fill="red" fill-opacity="0.2"/>"#,
            right - left,
            y0 - y1
        );
    }

    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} V{y0} H{x1}" fill="none" stroke="black"/>"#
    );
    let mut decade = 0;
    while decade as f64 <= axes.log_hi + 1e-9 {
        let x = axes.px(10f64.powi(decade));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">1e{decade}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
        decade += 1;
    }
    for k in 0..=4 {
        let v = axes.y_hi * k as f64 / 4.0;
        let y = axes.py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">iteration t</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );

    // One vertex per quarter pixel is enough at this size.
    let mut points = String::new();
    let mut last_x = f64::NEG_INFINITY;
    let n = data.t.len();
    for (i, (t, y)) in data.t.iter().zip(&data.y).enumerate() {
        let x = axes.px(*t);
        if x - last_x >= 0.25 || i + 1 == n {
            let _ = write!(points, "{x:.2},{:.2} ", axes.py(*y));
            last_x = x;
        }
    }
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.trim_end()
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_cover_runs() {
        assert_eq!(bands(&[0.0, 0.2, 0.3, 0.0, 0.1], 0.1), vec![(1, 2), (4, 4)]);
        assert!(bands(&[0.0; 3], 0.1).is_empty());
    }

    #[test]
    fn reads_named_columns() {
        let d = read_columns("t,a,gap,b\n1,0.5,0.2,9\n2,0.25,0.0,9\n", "t", "a", "gap").unwrap();
        assert_eq!(d.y, vec![0.5, 0.25]);
        assert!(read_columns("t,a\n1,2\n", "t", "a", "gap").is_err());
    }

    #[test]
    fn renders_band_and_line() {
        let d = PlotData {
            t: vec![1.0, 2.0, 3.0, 4.0],
            y: vec![0.25, 0.2, 0.15, 0.1],
            gap: vec![0.25, 0.15, 0.05, 0.0],
        };
        let svg = render(&d, "a < b", "avg", 0.1);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"bad\"").count(), 1);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("href"));
    }
}
