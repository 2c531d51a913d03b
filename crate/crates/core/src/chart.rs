//! Grouped bar chart of class-mean energy shares as a standalone SVG.

use std::fmt::Write as _;

use crate::energy::FEATURE_NAMES;
use crate::features::ClassSummary;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;
const COLORS: [&str; 3] = ["#4c72b0", "#dd8452", "#c44e52"];

pub fn energy_distribution_svg(summaries: &[ClassSummary]) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let peak = summaries
        .iter()
        .flat_map(|s| s.mean)
        .fold(0.0f64, f64::max);
    // Round the axis up to the next 10 %.
    let y_max = ((peak * 10.0).ceil() / 10.0).clamp(0.1, 1.0);
    let group_w = plot_w / FEATURE_NAMES.len() as f64;
    let bar_w = group_w * 0.8 / summaries.len().max(1) as f64;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">Energy distribution (%) by band, class mean</text>"#,
        WIDTH / 2.0
    )
    .unwrap();

    for tick in 0..=((y_max * 10.0).round() as usize) {
        let v = tick as f64 / 10.0;
        let y = MARGIN_TOP + plot_h * (1.0 - v / y_max);
        writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}</text>"##,
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            v * 100.0
        )
        .unwrap();
    }

    for (b, name) in FEATURE_NAMES.iter().enumerate() {
        let gx = MARGIN_LEFT + group_w * b as f64 + group_w * 0.1;
        for (c, s) in summaries.iter().enumerate() {
            let h = plot_h * s.mean[b] / y_max;
            writeln!(
                svg,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="{}"><title>{} {name}: {:.1}%</title></rect>"#,
                gx + bar_w * c as f64,
                MARGIN_TOP + plot_h - h,
                bar_w,
                COLORS[s.class.index()],
                s.class.caption(),
                s.mean[b] * 100.0
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{name}</text>"#,
            MARGIN_LEFT + group_w * (b as f64 + 0.5),
            HEIGHT - MARGIN_BOTTOM + 18.0
        )
        .unwrap();
    }

    for (c, s) in summaries.iter().enumerate() {
        let x = MARGIN_LEFT + 10.0 + 180.0 * c as f64;
        let y = HEIGHT - 12.0;
        writeln!(
            svg,
            r#"<rect x="{x}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{y}">{}</text>"#,
            y - 10.0,
            COLORS[s.class.index()],
            x + 16.0,
            s.class.caption()
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}
