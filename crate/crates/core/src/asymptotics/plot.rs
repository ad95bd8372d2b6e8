use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// One named two-column series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub name: String,
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        PlotSeries {
            name: name.into(),
            points,
        }
    }
}

#[derive(Serialize)]
struct SeriesEntry<'a> {
    name: &'a str,
    file: String,
    points: usize,
}

#[derive(Serialize)]
struct Figure<'a> {
    figure: &'a str,
    x_axis: &'a str,
    y_axis: &'a str,
    series: Vec<SeriesEntry<'a>>,
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `<figure>_<series>.dat` files of whitespace-separated `x y` lines
/// and `<figure>.json` naming the axes and series. Returns the description
/// path.
pub fn emit_plot(
    dir: &Path,
    figure: &str,
    axes: (&str, &str),
    series: &[PlotSeries],
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem = file_stem(figure);
    let mut entries = Vec::with_capacity(series.len());
    for s in series {
        let file = format!("{stem}_{}.dat", file_stem(&s.name));
        let mut out = std::io::BufWriter::new(fs::File::create(dir.join(&file))?);
        writeln!(out, "# {} {}", axes.0, axes.1)?;
        for (x, y) in &s.points {
            writeln!(out, "{x:e} {y:e}")?;
        }
        out.flush()?;
        entries.push(SeriesEntry {
            name: &s.name,
            file,
            points: s.points.len(),
        });
    }
    let desc = Figure {
        figure,
        x_axis: axes.0,
        y_axis: axes.1,
        series: entries,
    };
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, serde_json::to_string_pretty(&desc)? + "\n")?;
    Ok(path)
}
