//! Self-contained SVG line charts on log-log axes, one file per chart.
//! Plot failures must never affect a command's exit status; callers wrap
//! emission in [`warn_only`].

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliResult;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

/// One named series of (x, y) points; non-positive coordinates are
/// dropped (log axes).
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Render a log-log chart to `path`.
pub fn write_loglog_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    series: &[Series],
) -> CliResult<()> {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if x > 0.0 && y > 0.0 {
                xs.push(x.log10());
                ys.push(y.log10());
            }
        }
    }
    if xs.len() < 2 {
        return Err(crate::error::CliError::Runtime("not enough positive points to plot".into()));
    }
    let (x_min, x_max) = padded_range(&xs);
    let (y_min, y_max) = padded_range(&ys);

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);
        (px, py)
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = write!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        escape(title)
    );

    // axes
    let (x0, y0) = to_px(x_min, y_min);
    let (x1, _) = to_px(x_max, y_min);
    let (_, y1) = to_px(x_min, y_max);
    let _ = write!(
        svg,
        r#"<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" stroke="black" fill="none" stroke-width="1"/>"#
    );

    // decade ticks
    for d in (x_min.floor() as i64)..=(x_max.ceil() as i64) {
        let xd = d as f64;
        if xd < x_min || xd > x_max {
            continue;
        }
        let (px, py) = to_px(xd, y_min);
        let _ = write!(svg, r#"<line x1="{px}" y1="{py}" x2="{px}" y2="{}" stroke="black"/>"#, py + 5.0);
        let _ = write!(
            svg,
            r#"<text x="{px}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{d}</text>"#,
            py + 18.0
        );
        let (_, py_top) = to_px(xd, y_max);
        let _ = write!(
            svg,
            r##"<line x1="{px}" y1="{py}" x2="{px}" y2="{py_top}" stroke="#dddddd" stroke-width="0.5"/>"##
        );
    }
    for d in (y_min.floor() as i64)..=(y_max.ceil() as i64) {
        let yd = d as f64;
        if yd < y_min || yd > y_max {
            continue;
        }
        let (px, py) = to_px(x_min, yd);
        let _ = write!(svg, r#"<line x1="{}" y1="{py}" x2="{px}" y2="{py}" stroke="black"/>"#, px - 5.0);
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#,
            px - 8.0,
            py + 4.0
        );
        let (px_right, _) = to_px(x_max, yd);
        let _ = write!(
            svg,
            r##"<line x1="{px}" y1="{py}" x2="{px_right}" y2="{py}" stroke="#dddddd" stroke-width="0.5"/>"##
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );

    // series polylines and legend
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        let mut first = true;
        for &(x, y) in &s.points {
            if x <= 0.0 || y <= 0.0 {
                continue;
            }
            let (px, py) = to_px(x.log10(), y.log10());
            let _ = write!(d, "{}{px:.2} {py:.2} ", if first { "M " } else { "L " });
            first = false;
        }
        if d.is_empty() {
            continue;
        }
        let _ = write!(svg, r#"<path d="{}" stroke="{color}" fill="none" stroke-width="1.8"/>"#, d.trim());
        let ly = MARGIN_T + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = write!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
            lx + 22.0
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, svg)?;
    Ok(())
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Emit a chart, downgrading any failure to a stderr warning so plotting
/// never changes an exit status.
pub fn warn_only(result: CliResult<()>, what: &str) {
    if let Err(e) = result {
        eprintln!("warning: failed to write {what}: {e}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_self_contained_svg() {
        let dir = std::env::temp_dir().join("gibbs_lab_svg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("chart.svg");
        let series = vec![
            Series { name: "a".into(), points: (1..50).map(|i| (i as f64, 1.0 / i as f64)).collect() },
            Series { name: "b".into(), points: (1..50).map(|i| (i as f64, 2.0 / (i as f64).sqrt())).collect() },
        ];
        write_loglog_chart(&path, "decay", "n", &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains(">a<") && text.contains(">b<"), "legend names the series");
    }

    #[test]
    fn too_few_points_is_an_error_for_the_caller_to_downgrade() {
        let path = std::env::temp_dir().join("gibbs_lab_svg_empty.svg");
        let series = vec![Series { name: "a".into(), points: vec![(1.0, -3.0)] }];
        assert!(write_loglog_chart(&path, "t", "x", &series).is_err());
    }
}
