//! SVG chart emitters.
//!
//! The cascade plot draws, per configuration, its platform efficiencies in
//! the configured order (one polyline, one small square per vertex) and the
//! running performance portability as filled circles; a series that hits an
//! unsupported platform ends with its marker at zero. The navigation chart
//! scatters configurations by code convergence (x) against performance
//! portability (y) on the unit square.

use std::fmt::Write as _;

use perfport_core::CascadeData;

use super::{coord, escape, metric, RenderError, PALETTE};

const WIDTH: u32 = 860;
const HEIGHT: u32 = 480;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 560.0;
const PLOT_H: f64 = 380.0;
const LEGEND_X: f64 = 650.0;

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn y_axis(out: &mut String, label: &str) {
    let bottom = TOP + PLOT_H;
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        coord(LEFT),
        coord(TOP),
        coord(LEFT),
        coord(bottom)
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = bottom - tick * PLOT_H;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            coord(LEFT - 4.0),
            coord(y),
            coord(LEFT),
            coord(y)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end" font-family="sans-serif">{}</text>"#,
            coord(LEFT - 8.0),
            coord(y + 4.0),
            format_args!("{tick:.2}")
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" font-size="12" font-family="sans-serif" transform="rotate(-90 16 {})" text-anchor="middle">{}</text>"#,
        coord(TOP + PLOT_H / 2.0),
        coord(TOP + PLOT_H / 2.0),
        escape(label)
    );
}

fn x_axis_line(out: &mut String) {
    let bottom = TOP + PLOT_H;
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        coord(LEFT),
        coord(bottom),
        coord(LEFT + PLOT_W),
        coord(bottom)
    );
}

/// Cascade plot: one efficiency polyline and one cumulative-PP circle per
/// plotted platform, per configuration.
pub fn emit_cascade_svg(data: &CascadeData) -> Result<String, RenderError> {
    if data.series.is_empty() {
        return Err(RenderError::EmptyCascade);
    }
    let slots = data.platforms.len().max(1);
    let slot_x = |rank: usize| -> f64 { LEFT + (rank as f64 + 0.5) * PLOT_W / slots as f64 };
    let bottom = TOP + PLOT_H;
    let value_y = |value: f64| -> f64 { bottom - value.clamp(0.0, 1.0) * PLOT_H };

    let mut out = String::new();
    header(&mut out);
    y_axis(&mut out, "efficiency / PP");
    x_axis_line(&mut out);
    // Rank ticks: orderings differ per series, so ticks count platforms.
    for rank in 0..slots {
        let x = slot_x(rank);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            coord(x),
            coord(bottom),
            coord(x),
            coord(bottom + 4.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            coord(x),
            coord(bottom + 18.0),
            rank + 1
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif">platforms</text>"#,
        coord(LEFT + PLOT_W / 2.0),
        coord(bottom + 36.0)
    );

    for (idx, series) in data.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let efficiency_points: Vec<(usize, f64)> = series
            .points
            .iter()
            .enumerate()
            .filter_map(|(rank, p)| p.efficiency.map(|e| (rank, e)))
            .collect();
        if !efficiency_points.is_empty() {
            let vertices: Vec<String> = efficiency_points
                .iter()
                .map(|(rank, e)| format!("{},{}", coord(slot_x(*rank)), coord(value_y(*e))))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline class="eff" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                vertices.join(" ")
            );
            for (rank, e) in &efficiency_points {
                let _ = writeln!(
                    out,
                    r#"<rect class="pt" x="{}" y="{}" width="6" height="6" fill="{color}"/>"#,
                    coord(slot_x(*rank) - 3.0),
                    coord(value_y(*e) - 3.0)
                );
            }
        }
        for (rank, point) in series.points.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<circle class="pp" cx="{}" cy="{}" r="4" fill="{color}"/>"#,
                coord(slot_x(rank)),
                coord(value_y(point.cumulative_pp))
            );
        }
        // Legend row.
        let ly = TOP + 8.0 + idx as f64 * 20.0;
        let _ = writeln!(
            out,
            r#"<rect class="swatch" x="{}" y="{}" width="12" height="12" fill="{color}"/>"#,
            coord(LEGEND_X),
            coord(ly)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif">{} (PP={})</text>"#,
            coord(LEGEND_X + 18.0),
            coord(ly + 10.0),
            escape(&series.label),
            metric(series.final_pp)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One navigation chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationPoint {
    pub label: String,
    pub pp: f64,
    pub convergence: f64,
}

/// Navigation chart: labeled scatter of PP against code convergence on the
/// unit square.
pub fn emit_navigation_svg(points: &[NavigationPoint]) -> Result<String, RenderError> {
    if points.is_empty() {
        return Err(RenderError::EmptyNavigation);
    }
    for p in points {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v) && v.is_finite();
        if !in_unit(p.pp) || !in_unit(p.convergence) {
            return Err(RenderError::OutOfRange {
                label: p.label.clone(),
                pp: p.pp,
                convergence: p.convergence,
            });
        }
    }

    // Square plot area for the unit square.
    let side = PLOT_H;
    let bottom = TOP + side;
    let x_of = |convergence: f64| LEFT + convergence * side;
    let y_of = |pp: f64| bottom - pp * side;

    let mut out = String::new();
    header(&mut out);
    y_axis(&mut out, "performance portability");
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        coord(LEFT),
        coord(bottom),
        coord(LEFT + side),
        coord(bottom)
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let x = x_of(tick);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            coord(x),
            coord(bottom),
            coord(x),
            coord(bottom + 4.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            coord(x),
            coord(bottom + 18.0),
            format_args!("{tick:.2}")
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" font-family="sans-serif">code convergence</text>"#,
        coord(LEFT + side / 2.0),
        coord(bottom + 36.0)
    );

    for (idx, point) in points.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let x = x_of(point.convergence);
        let y = y_of(point.pp);
        let _ = writeln!(
            out,
            r#"<circle class="pt" cx="{}" cy="{}" r="5" fill="{color}"/>"#,
            coord(x),
            coord(y)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif">{}</text>"#,
            coord(x + 8.0),
            coord(y + 4.0),
            escape(&point.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use perfport_core::{
        cascade_series, Assignment, KernelTimingMatrix, PlatformId, PlatformOrder,
    };
    use std::collections::BTreeSet;

    fn pid(name: &str) -> PlatformId {
        PlatformId::new(name).unwrap()
    }

    fn two_platform_data() -> CascadeData {
        let matrix = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "v", 1.0),
            ("k", pid("x"), "w", 1.0),
            ("k", pid("y"), "v", 2.0),
            ("k", pid("y"), "w", 1.0),
        ])
        .unwrap();
        let assignment = Assignment::PerPlatform(
            [(pid("x"), "v".to_owned()), (pid("y"), "v".to_owned())].into(),
        );
        let platforms: BTreeSet<PlatformId> = [pid("x"), pid("y")].into();
        cascade_series(
            &matrix,
            &[("v".to_owned(), assignment)],
            &platforms,
            PlatformOrder::PerConfiguration,
        )
        .unwrap()
    }

    #[test]
    fn cascade_structure_matches_input_shape() {
        let svg = emit_cascade_svg(&two_platform_data()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let polyline = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        let vertex_count = polyline
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap()
            .split(' ')
            .count();
        assert_eq!(vertex_count, 2);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(">platforms<"));
        assert!(svg.contains("efficiency / PP"));
    }

    /// Minimal XML well-formedness: every tag self-closes or nests
    /// properly.
    fn assert_balanced_xml(svg: &str) {
        let mut stack: Vec<&str> = Vec::new();
        let mut rest = svg;
        while let Some(open) = rest.find('<') {
            rest = &rest[open + 1..];
            let end = rest.find('>').expect("closed tag");
            let tag = &rest[..end];
            rest = &rest[end + 1..];
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop(), Some(name), "mismatched close </{name}>");
            } else if !tag.ends_with('/') {
                let name = tag.split_whitespace().next().unwrap();
                stack.push(name);
            }
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn emitted_svg_is_well_formed() {
        assert_balanced_xml(&emit_cascade_svg(&two_platform_data()).unwrap());
        assert_balanced_xml(
            &emit_navigation_svg(&[
                NavigationPoint {
                    label: "a<b&c".into(),
                    pp: 0.5,
                    convergence: 0.25,
                },
                NavigationPoint {
                    label: "plain".into(),
                    pp: 1.0,
                    convergence: 1.0,
                },
            ])
            .unwrap(),
        );
    }

    #[test]
    fn cascade_is_deterministic() {
        let data = two_platform_data();
        assert_eq!(
            emit_cascade_svg(&data).unwrap(),
            emit_cascade_svg(&data).unwrap()
        );
    }

    #[test]
    fn cascade_truncates_unsupported_series_at_zero() {
        let matrix = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "v", 1.0),
            ("k", pid("y"), "w", 1.0),
        ])
        .unwrap();
        let assignment = Assignment::PerPlatform([(pid("x"), "v".to_owned())].into());
        let platforms: BTreeSet<PlatformId> = [pid("x"), pid("y")].into();
        let data = cascade_series(
            &matrix,
            &[("v".to_owned(), assignment)],
            &platforms,
            PlatformOrder::PerConfiguration,
        )
        .unwrap();
        let svg = emit_cascade_svg(&data).unwrap();
        // Two PP markers (second at zero), polyline with a single vertex.
        assert_eq!(svg.matches("<circle").count(), 2);
        let bottom = coord(TOP + PLOT_H);
        assert!(svg
            .lines()
            .any(|l| l.contains("class=\"pp\"") && l.contains(&format!("cy=\"{bottom}\""))));
    }

    #[test]
    fn navigation_corner_point_lands_top_right() {
        let svg = emit_navigation_svg(&[NavigationPoint {
            label: "best".into(),
            pp: 1.0,
            convergence: 1.0,
        }])
        .unwrap();
        let x = coord(LEFT + PLOT_H);
        let y = coord(TOP);
        assert!(svg.contains(&format!(r#"cx="{x}" cy="{y}""#)));
    }

    #[test]
    fn navigation_counts_markers_and_labels() {
        let points: Vec<NavigationPoint> = (0..3)
            .map(|i| NavigationPoint {
                label: format!("cfg{i}"),
                pp: 0.25 * i as f64,
                convergence: 0.3,
            })
            .collect();
        let svg = emit_navigation_svg(&points).unwrap();
        assert_eq!(svg.matches(r#"<circle class="pt""#).count(), 3);
        for i in 0..3 {
            assert!(svg.contains(&format!(">cfg{i}<")));
        }
    }

    #[test]
    fn navigation_rejects_empty_and_out_of_range() {
        assert_eq!(emit_navigation_svg(&[]), Err(RenderError::EmptyNavigation));
        let bad = NavigationPoint {
            label: "bad".into(),
            pp: 1.5,
            convergence: 0.5,
        };
        assert!(matches!(
            emit_navigation_svg(&[bad]),
            Err(RenderError::OutOfRange { .. })
        ));
    }
}
