//! CSV tables and optional SVG line plots in the output directory.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::PathBuf;

/// Scientific notation with 13 significant digits.
pub fn e(x: f64) -> String {
    format!("{x:.12e}")
}

pub struct Out {
    pub dir: PathBuf,
    pub plots: bool,
}

pub type Series = (String, Vec<(f64, f64)>);

impl Out {
    pub fn new(dir: PathBuf, plots: bool) -> io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, plots })
    }

    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(format!("{name}.csv")))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn text(&self, name: &str, body: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), body)
    }

    /// Writes `name.svg` when plots are enabled. Non-positive points are
    /// dropped on logarithmic axes.
    pub fn plot(&self, name: &str, title: &str, axes: (&str, &str), series: &[Series], log: bool) -> io::Result<()> {
        if !self.plots {
            return Ok(());
        }
        fs::write(self.dir.join(format!("{name}.svg")), svg(title, axes, series, log))
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn svg(title: &str, (xl, yl): (&str, &str), series: &[Series], log: bool) -> String {
    let (w, h, ml, mr, mt, mb) = (640.0, 420.0, 80.0, 150.0, 40.0, 50.0);
    let tf = |v: f64| if log { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, p)| p.iter().filter(|(x, y)| x.is_finite() && y.is_finite() && (!log || (*x > 0.0 && *y > 0.0))).map(|&(x, y)| (tf(x), tf(y))).collect())
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 < 1e-300 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
    let label = |v: f64| format!("{:.3e}", if log { 10f64.powf(v) } else { v });
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(
        s,
        r#"<rect width="100%" height="100%" fill="white"/><text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(s, r#"<path d="M{ml},{mt} V{} H{}" stroke="black" fill="none"/>"#, h - mb, w - mr);
    let _ = writeln!(
        s,
        r#"<text x="{ml}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        h - mb + 16.0,
        label(x0),
        w - mr,
        h - mb + 16.0,
        label(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
        ml - 4.0,
        h - mb,
        label(y0),
        ml - 4.0,
        mt + 4.0,
        label(y1)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ml + w - mr) / 2.0, h - 12.0, escape(xl));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
        escape(yl)
    );
    for (i, ((name, _), p)) in series.iter().zip(&pts).enumerate() {
        let c = COLORS[i % COLORS.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{c}" fill="none" stroke-width="1.5"/>"#, path.join(" "));
        let ly = mt + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="12" height="3" fill="{c}"/><text x="{}" y="{}">{}</text>"#,
            w - mr + 10.0,
            ly + 4.0,
            w - mr + 26.0,
            ly + 9.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
