//! SVG figures from an aggregated summary: mean hypervolume with 95%
//! confidence bands, and in-context example divergence per trial.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::aggregate::{CurvePoint, GroupSummary, Summary};
use crate::HarnessError;

const SIZE: (u32, u32) = (900, 600);

struct Series<'a> {
    label: &'a str,
    points: &'a [CurvePoint],
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 {
        0.05 * span
    } else {
        lo.abs().max(1.0) * 0.05
    };
    (lo - pad, hi + pad)
}

fn draw(
    path: &Path,
    caption: &str,
    x_desc: &str,
    y_desc: &str,
    series: &[Series<'_>],
) -> Result<(), HarnessError> {
    let fail =
        |e: &dyn std::fmt::Display| HarnessError::Aggregate(format!("{}: {e}", path.display()));
    let all = series.iter().flat_map(|s| s.points.iter());
    let (x_lo, x_hi) = all
        .clone()
        .fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let (y_lo, y_hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.estimate.lower()), hi.max(p.estimate.upper()))
    });
    let (y_lo, y_hi) = padded(y_lo, y_hi);
    let x_hi = x_hi.max(x_lo + 1);

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| fail(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(x_lo as f64..x_hi as f64, y_lo..y_hi)
        .map_err(|e| fail(&e))?;
    chart
        .configure_mesh()
        .x_desc(x_desc)
        .y_desc(y_desc)
        .draw()
        .map_err(|e| fail(&e))?;

    for (i, s) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let upper = s.points.iter().map(|p| (p.x as f64, p.estimate.upper()));
        let lower = s
            .points
            .iter()
            .rev()
            .map(|p| (p.x as f64, p.estimate.lower()));
        chart
            .draw_series(std::iter::once(Polygon::new(
                upper.chain(lower).collect::<Vec<_>>(),
                color.mix(0.2).filled(),
            )))
            .map_err(|e| fail(&e))?;
        chart
            .draw_series(LineSeries::new(
                s.points.iter().map(|p| (p.x as f64, p.estimate.mean)),
                color.stroke_width(2),
            ))
            .map_err(|e| fail(&e))?
            .label(s.label)
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::LowerRight)
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(|e| fail(&e))?;
    root.present().map_err(|e| fail(&e))?;
    Ok(())
}

fn file_stem(benchmark: &str) -> String {
    benchmark
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Draws one figure per benchmark and curve kind. Groups without points are
/// skipped; each skip is reported in the returned warnings.
pub fn plot_summary(
    summary: &Summary,
    out: &Path,
) -> Result<(Vec<PathBuf>, Vec<String>), HarnessError> {
    std::fs::create_dir_all(out)?;
    let mut by_benchmark: BTreeMap<&str, Vec<&GroupSummary>> = BTreeMap::new();
    for g in &summary.groups {
        by_benchmark
            .entry(g.benchmark.as_str())
            .or_default()
            .push(g);
    }
    let mut written = Vec::new();
    let mut warnings = Vec::new();
    type Pick = fn(&GroupSummary) -> &[CurvePoint];
    let kinds: [(&str, &str, &str, Pick); 2] = [
        ("hv", "Function evaluations", "Hypervolume", |g| &g.hv),
        ("icl_divergence", "Trial", "ICL divergence", |g| {
            &g.icl_divergence
        }),
    ];
    for (benchmark, groups) in by_benchmark {
        for (kind, x_desc, y_desc, pick) in kinds {
            let mut series = Vec::new();
            for g in &groups {
                let points = pick(g);
                if points.is_empty() {
                    warnings.push(format!(
                        "{benchmark} {}: no {kind} points, skipped",
                        g.method
                    ));
                } else {
                    series.push(Series {
                        label: &g.method,
                        points,
                    });
                }
            }
            if series.is_empty() {
                continue;
            }
            let path = out.join(format!("{kind}_{}.svg", file_stem(benchmark)));
            draw(&path, benchmark, x_desc, y_desc, &series)?;
            written.push(path);
        }
    }
    Ok((written, warnings))
}
