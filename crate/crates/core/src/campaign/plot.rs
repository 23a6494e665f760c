use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::commands::{load_archive, load_baselines, Baseline, ARCHIVE_FILE, BASELINES_FILE};
use crate::error::{Error, Result};
use crate::objectives::ObjectiveVector;

pub const FRONT_SVG_FILE: &str = "front.svg";
pub const HV_SVG_FILE: &str = "hv.svg";

const PANEL: f64 = 300.0;
const MARGIN: f64 = 50.0;
const BASELINE_STYLES: [(&str, &str); 3] = [("square", "#d62728"), ("triangle", "#2ca02c"), ("diamond", "#9467bd")];

fn axis_value(o: &ObjectiveVector, axis: usize) -> f64 {
    match axis {
        0 => o.utility_loss,
        1 => o.cost,
        _ => o.leakage,
    }
}

const AXIS_NAMES: [&str; 3] = ["UL", "TC", "PL"];

struct Scale {
    lo: f64,
    hi: f64,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo < 1e-12 {
            let pad = if lo.abs() > 1e-12 { lo.abs() * 0.1 } else { 0.5 };
            return Self {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        let pad = (hi - lo) * 0.05;
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

fn marker(svg: &mut String, shape: &str, x: f64, y: f64, color: &str) {
    let r = 5.0;
    match shape {
        "square" => write!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        "triangle" => write!(
            svg,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        "diamond" => write!(
            svg,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - r,
            x + r,
            y,
            x,
            y + r,
            x - r,
            y
        ),
        _ => write!(
            svg,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}" fill-opacity="0.8"/>"##
        ),
    }
    .expect("write to string");
    svg.push('\n');
}

fn frame(svg: &mut String, x0: f64, y0: f64, xs: &Scale, ys: &Scale, xname: &str, yname: &str) {
    let (x1, y1) = (x0 + PANEL, y0 + PANEL);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xname}</text>"#,
        x0 + PANEL / 2.0,
        y1 + 35.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{yname}</text>"#,
        x0 - 35.0,
        y0 + PANEL / 2.0,
        x0 - 35.0,
        y0 + PANEL / 2.0
    );
    for (v, anchor) in [(xs.lo, "start"), (xs.hi, "end")] {
        let x = xs.map(v, x0, x1);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="{anchor}">{v:.3}</text>"#,
            y1 + 14.0
        );
    }
    for v in [ys.lo, ys.hi] {
        let y = ys.map(v, y1, y0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-size="10" text-anchor="end">{v:.3}</text>"#,
            x0 - 4.0
        );
    }
}

/// Three pairwise projections of the front (circles) with the baselines
/// as distinct markers.
pub fn front_svg(front: &[ObjectiveVector], baselines: &[Baseline]) -> Result<String> {
    if front.is_empty() {
        return Err(Error::Schema("front is empty".into()));
    }
    let pairs = [(0usize, 2usize), (0, 1), (1, 2)];
    let width = 3.0 * (PANEL + 2.0 * MARGIN);
    let height = PANEL + 2.0 * MARGIN + 20.0 * baselines.len() as f64 + 20.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    for (k, &(xa, ya)) in pairs.iter().enumerate() {
        let all = || front.iter().copied().chain(baselines.iter().map(|b| b.objectives));
        let xs = Scale::fit(all().map(|o| axis_value(&o, xa)));
        let ys = Scale::fit(all().map(|o| axis_value(&o, ya)));
        let x0 = MARGIN + k as f64 * (PANEL + 2.0 * MARGIN);
        let y0 = MARGIN;
        frame(&mut svg, x0, y0, &xs, &ys, AXIS_NAMES[xa], AXIS_NAMES[ya]);
        for o in front {
            let x = xs.map(axis_value(o, xa), x0, x0 + PANEL);
            let y = ys.map(axis_value(o, ya), y0 + PANEL, y0);
            marker(&mut svg, "circle", x, y, "#1f77b4");
        }
        for (b, (shape, color)) in baselines.iter().zip(BASELINE_STYLES.iter().cycle()) {
            let x = xs.map(axis_value(&b.objectives, xa), x0, x0 + PANEL);
            let y = ys.map(axis_value(&b.objectives, ya), y0 + PANEL, y0);
            marker(&mut svg, shape, x, y, color);
        }
    }
    let legend_y = PANEL + 2.0 * MARGIN;
    for (i, (b, (shape, color))) in baselines.iter().zip(BASELINE_STYLES.iter().cycle()).enumerate() {
        let y = legend_y + 20.0 * i as f64;
        marker(&mut svg, shape, MARGIN, y, color);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            MARGIN + 12.0,
            y + 4.0,
            b.name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Hypervolume against generation as a polyline.
pub fn hv_svg(trace: &[f64]) -> Result<String> {
    if trace.is_empty() {
        return Err(Error::Schema("hypervolume trace is empty".into()));
    }
    let xs = Scale::fit([0.0, (trace.len() - 1).max(1) as f64].into_iter());
    let ys = Scale::fit(trace.iter().copied());
    let (x0, y0) = (MARGIN, MARGIN);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">"#,
        PANEL + 2.0 * MARGIN,
        PANEL + 2.0 * MARGIN
    );
    frame(&mut svg, x0, y0, &xs, &ys, "generation", "HV");
    let points: Vec<String> = trace
        .iter()
        .enumerate()
        .map(|(g, &h)| {
            format!(
                "{:.2},{:.2}",
                xs.map(g as f64, x0, x0 + PANEL),
                ys.map(h, y0 + PANEL, y0)
            )
        })
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        points.join(" ")
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads `archive.json` (and `baselines.json` when present) from `dir` and
/// writes `front.svg` and `hv.svg` next to them. Nothing is written when
/// the input is unusable.
pub fn cmd_plot(dir: &Path) -> Result<Vec<PathBuf>> {
    let result = load_archive(&dir.join(ARCHIVE_FILE))?;
    let baselines_path = dir.join(BASELINES_FILE);
    let baselines = if baselines_path.is_file() {
        load_baselines(&baselines_path)?
    } else {
        Vec::new()
    };
    let front: Vec<ObjectiveVector> = result.front.iter().map(|s| s.objectives).collect();
    let front_doc = front_svg(&front, &baselines)?;
    let hv_doc = hv_svg(&result.hv_trace)?;
    let (f, h) = (dir.join(FRONT_SVG_FILE), dir.join(HV_SVG_FILE));
    std::fs::write(&f, front_doc)?;
    std::fs::write(&h, hv_doc)?;
    Ok(vec![f, h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::commands::baseline_configs;

    #[test]
    fn single_point_front() {
        let svg = front_svg(&[ObjectiveVector::new(0.1, 5.0, 0.5)], &[]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        for name in AXIS_NAMES {
            assert!(svg.contains(&format!(">{name}</text>")));
        }
    }

    #[test]
    fn baselines_get_distinct_markers() {
        let baselines: Vec<Baseline> = baseline_configs()
            .into_iter()
            .enumerate()
            .map(|(i, (name, config))| Baseline {
                name,
                config,
                objectives: ObjectiveVector::new(0.1 * i as f64, 10.0, 0.9),
            })
            .collect();
        let svg = front_svg(&[ObjectiveVector::new(0.1, 5.0, 0.5)], &baselines).unwrap();
        assert_eq!(svg.matches("<rect x=").count() - 3, 4); // 3 frames, 3 panels + legend
        assert_eq!(svg.matches("fill=\"#2ca02c\"").count(), 4);
        assert_eq!(svg.matches("fill=\"#9467bd\"").count(), 4);
    }

    #[test]
    fn empty_front_rejected() {
        assert!(front_svg(&[], &[]).is_err());
    }
}
