//! Static log-log convergence chart.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{Method, StudyReport};
use crate::error::{Error, Result};
use crate::ls_stencil::Quantity;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn color(q: Quantity) -> &'static str {
    match q {
        Quantity::Fx => "#1f77b4",
        Quantity::Fy => "#ff7f0e",
        Quantity::Fxx => "#2ca02c",
        Quantity::Fxy => "#d62728",
        Quantity::Fyy => "#9467bd",
    }
}

fn dash(m: Method) -> &'static str {
    match m {
        Method::Ddin => "none",
        Method::Ddinw => "7 3",
        Method::Fd => "2 3",
    }
}

struct Series {
    method: Method,
    quantity: Quantity,
    points: Vec<(f64, f64)>,
}

struct Axes {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Axes {
    /// Decade-aligned bounds around the data, in log10 units.
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Axes {
        let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (x, y) in points {
            let (lx, ly) = (x.log10(), y.log10());
            x_lo = x_lo.min(lx);
            x_hi = x_hi.max(lx);
            y_lo = y_lo.min(ly);
            y_hi = y_hi.max(ly);
        }
        let (mut x_lo, mut x_hi) = (x_lo.floor(), x_hi.ceil());
        let (mut y_lo, mut y_hi) = (y_lo.floor(), y_hi.ceil());
        if x_hi <= x_lo {
            x_lo -= 1.0;
            x_hi += 1.0;
        }
        if y_hi <= y_lo {
            y_lo -= 1.0;
            y_hi += 1.0;
        }
        Axes {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x.log10() - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT
            - BOTTOM
            - (y.log10() - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - TOP - BOTTOM)
    }
}

pub fn to_svg(report: &StudyReport) -> String {
    let mut plotted = Vec::new();
    let mut skipped = Vec::new();
    for f in &report.fits {
        let cells = report.series(f.method, f.quantity);
        let positive = cells.len() >= 2 && cells.iter().all(|c| c.rms > 0.0 && c.rms.is_finite());
        if positive {
            plotted.push(Series {
                method: f.method,
                quantity: f.quantity,
                points: cells.iter().map(|c| (c.dx, c.rms)).collect(),
            });
        } else {
            skipped.push(format!("{} {}", f.method, f.quantity));
        }
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let cfg = &report.config;
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="24" font-size="14">RMS error vs spacing: {} (dr = {}dx, r = {}dx, weight {})</text>"#,
        cfg.function.name(),
        cfg.dr_frac,
        cfg.r_frac,
        cfg.weight
    );

    if plotted.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no plottable series</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        write_warnings(&mut s, &skipped);
        s.push_str("</svg>\n");
        return s;
    }

    let anchor = plotted
        .iter()
        .find(|p| p.method == Method::Ddin && p.quantity == Quantity::Fx)
        .unwrap_or(&plotted[0]);
    let (ax, ay) =
        anchor
            .points
            .iter()
            .copied()
            .fold((0.0, 0.0), |acc, p| if p.0 > acc.0 { p } else { acc });
    let x_min = plotted
        .iter()
        .flat_map(|p| p.points.iter().map(|q| q.0))
        .fold(f64::INFINITY, f64::min);
    let references: Vec<(f64, Vec<(f64, f64)>)> = [1.0, 2.0]
        .iter()
        .map(|&order| {
            let y_at = |x: f64| ay * (x / ax).powf(order);
            (order, vec![(ax, ay), (x_min, y_at(x_min))])
        })
        .collect();

    let axes = Axes::fit(
        plotted
            .iter()
            .flat_map(|p| p.points.iter().copied())
            .chain(references.iter().flat_map(|r| r.1.iter().copied())),
    );

    // frame and decade grid
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y1}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for e in (axes.x_lo as i32)..=(axes.x_hi as i32) {
        let x = axes.px(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"##,
            y0 + 18.0
        );
    }
    for e in (axes.y_lo as i32)..=(axes.y_hi as i32) {
        let y = axes.py(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">dx</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">rms error</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (order, line) in &references {
        let (a, b) = (line[0], line[1]);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888888" stroke-dasharray="5 5"/><text x="{:.2}" y="{:.2}" fill="#555555">slope {order}</text>"##,
            axes.px(a.0),
            axes.py(a.1),
            axes.px(b.0),
            axes.py(b.1),
            axes.px(b.0) + 4.0,
            axes.py(b.1)
        );
    }

    for series in &plotted {
        let path: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", axes.px(x), axes.py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="{}"/>"#,
            path.join(" "),
            color(series.quantity),
            dash(series.method)
        );
        for &(x, y) in &series.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                axes.px(x),
                axes.py(y),
                color(series.quantity)
            );
        }
    }

    // legend
    let lx = WIDTH - RIGHT + 16.0;
    for (k, series) in plotted.iter().enumerate() {
        let y = TOP + 10.0 + 16.0 * k as f64;
        let slope = report
            .slope(series.method, series.quantity)
            .map(|v| format!(" ({v:.2})"))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="{}"/><text x="{:.2}" y="{:.2}">{} {}{}</text>"#,
            lx + 24.0,
            color(series.quantity),
            dash(series.method),
            lx + 30.0,
            y + 4.0,
            series.method,
            series.quantity,
            slope
        );
    }
    write_warnings(&mut s, &skipped);
    s.push_str("</svg>\n");
    s
}

fn write_warnings(s: &mut String, skipped: &[String]) {
    for (k, name) in skipped.iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<text x="{LEFT}" y="{:.2}" fill="#aa0000" font-size="10">warning: skipped {name} (non-positive rms)</text>"##,
            HEIGHT - 4.0 - 11.0 * (skipped.len() - 1 - k) as f64
        );
    }
}

pub fn emit_svg_plot(report: &StudyReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_svg(report)).map_err(|e| Error::io(path, e))
}
