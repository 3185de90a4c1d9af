//! Circle traces of a geodesic and their CSV form.

use std::f64::consts::TAU;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use tube_geodesics::{DiscMap, Geodesic, TubeDomain};

use crate::doc::TraceDoc;
use crate::CliError;

/// How far the staircase half-lines are drawn past the end vertices.
const HALF_LINE_EXTENT: f64 = 2.0;

/// `samples` rows `(t, Re φ₁, Im φ₁, …)` along `|λ| = radius`; one row when the
/// radius is zero.
pub fn sample(g: &Geodesic, samples: usize, radius: f64) -> TraceDoc {
    let n = g.dim();
    let mut columns = vec!["t".to_string()];
    for l in 1..=n {
        columns.push(format!("re_phi{l}"));
        columns.push(format!("im_phi{l}"));
    }
    let count = if radius == 0.0 { 1 } else { samples };
    let rows = (0..count)
        .map(|k| {
            let t = TAU * k as f64 / samples as f64;
            let mut row = vec![t];
            for z in g.eval(Complex::from_polar(radius, t)) {
                row.push(z.re);
                row.push(z.im);
            }
            row
        })
        .collect();
    TraceDoc { radius, columns, rows, boundary: base_boundary(g.domain()) }
}

fn base_boundary(d: &TubeDomain) -> Vec<[f64; 2]> {
    match d {
        TubeDomain::Staircase(s) => s.boundary_polyline(HALF_LINE_EXTENT),
        TubeDomain::DiscBase => (0..=256).map(|k| TAU * k as f64 / 256.0).map(|t| [t.cos(), t.sin()]).collect(),
        _ => Vec::new(),
    }
}

/// `<stem>.boundary.csv` next to `out`.
pub fn boundary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    out.with_file_name(format!("{stem}.boundary.csv"))
}

fn csv(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}

pub fn rows_csv(t: &TraceDoc) -> String {
    csv(&t.columns, t.rows.iter().cloned())
}

pub fn boundary_csv(t: &TraceDoc) -> String {
    csv(&["x1".into(), "x2".into()], t.boundary.iter().map(|p| p.to_vec()))
}

/// Parses a CSV written by [`rows_csv`] into its header and rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().ok_or_else(|| CliError::Malformed("empty CSV".into()))?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Malformed(format!("row {}: {e}", i + 1)))?;
        if row.len() != header.len() {
            return Err(CliError::Malformed(format!("row {} has {} cells, header has {}", i + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tube_geodesics::geodesic::canonical_staircase_spec;
    use tube_geodesics::{GeodesicSpec, StaircaseDomain};

    fn canonical() -> Geodesic {
        let d = TubeDomain::Staircase(StaircaseDomain::canonical());
        Geodesic::new(GeodesicSpec::Staircase(canonical_staircase_spec()), d).unwrap()
    }

    #[test]
    fn rows_follow_the_circle() {
        let g = canonical();
        let t = sample(&g, 8, 0.5);
        assert_eq!(t.columns, ["t", "re_phi1", "im_phi1", "re_phi2", "im_phi2"]);
        assert_eq!(t.rows.len(), 8);
        for row in &t.rows {
            let z = g.eval(Complex::from_polar(0.5, row[0]));
            assert_eq!(&row[1..], &[z[0].re, z[0].im, z[1].re, z[1].im]);
        }
        assert!((t.rows[2][0] - TAU / 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_gives_centre() {
        let t = sample(&canonical(), 360, 0.0);
        assert_eq!(t.rows, vec![vec![0.0, -1.5, 0.0, -1.5, 0.0]]);
    }

    #[test]
    fn csv_round_trips_exactly() {
        let t = sample(&canonical(), 32, 0.9);
        let (header, rows) = parse_csv(&rows_csv(&t)).unwrap();
        assert_eq!(header, t.columns);
        assert_eq!(rows, t.rows);
        let (_, boundary) = parse_csv(&boundary_csv(&t)).unwrap();
        assert_eq!(boundary.len(), t.boundary.len());
        assert!(parse_csv("a,b\n1,2,3\n").is_err());
        assert!(parse_csv("a\nx\n").is_err());
    }

    #[test]
    fn boundary_file_sits_beside_output() {
        assert_eq!(boundary_path(Path::new("/tmp/run/trace.csv")), Path::new("/tmp/run/trace.boundary.csv"));
        let disc = base_boundary(&TubeDomain::DiscBase);
        assert_eq!(disc.len(), 257);
        assert_eq!(disc.first(), Some(&[1.0, 0.0]));
        assert!(base_boundary(&TubeDomain::Strip).is_empty());
    }
}
