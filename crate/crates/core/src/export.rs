//! Byte-exact writers for point sets, shadows and verification reports.
//!
//! All text is ASCII decimal with LF line endings.
//!
//! | format | point sets                  | shadows                       |
//! |--------|-----------------------------|-------------------------------|
//! | csv    | header `x0,..`, one row/pt  | header, rows `cell..,count`   |
//! | jsonl  | one JSON array per line     | -                             |
//! | obj    | `v x y z` per point, d = 3  | -                             |
//! | svg    | unit squares, d = 2         | grey cells, 2-D grids only    |

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fractal::PointSet;
use crate::geometry::ShadowGrid;
use crate::nim::parse_coordinate;
use crate::verify::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExportFormat {
    Csv,
    Jsonl,
    Obj,
    Svg,
}

impl ExportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Jsonl => "jsonl",
            ExportFormat::Obj => "obj",
            ExportFormat::Svg => "svg",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "jsonl" => Ok(ExportFormat::Jsonl),
            "obj" => Ok(ExportFormat::Obj),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(format!("unknown format {other:?}, expected csv, jsonl, obj or svg")),
        }
    }
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn svg_open<W: Write + ?Sized>(out: &mut W, side: u64) -> Result<()> {
    write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {side} {side}\" shape-rendering=\"crispEdges\">\n\
         <rect x=\"0\" y=\"0\" width=\"{side}\" height=\"{side}\" fill=\"#ffffff\"/>\n"
    )?;
    Ok(())
}

/// Unit square with its lower-left corner at lattice point `(x, y)`, y up.
fn svg_cell<W: Write + ?Sized>(out: &mut W, side: u64, x: u64, y: u64, grey: u8) -> Result<()> {
    writeln!(
        out,
        "<rect x=\"{x}\" y=\"{}\" width=\"1\" height=\"1\" fill=\"#{grey:02x}{grey:02x}{grey:02x}\"/>",
        side - 1 - y
    )?;
    Ok(())
}

pub fn write_pointset<W: Write + ?Sized>(ps: &PointSet, fmt: ExportFormat, out: &mut W) -> Result<()> {
    let d = ps.dim();
    match fmt {
        ExportFormat::Csv => {
            let header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
            writeln!(out, "{}", header.join(","))?;
            for p in ps {
                writeln!(out, "{}", join(p))?;
            }
        }
        ExportFormat::Jsonl => {
            for p in ps {
                writeln!(out, "[{}]", join(p))?;
            }
        }
        ExportFormat::Obj => {
            if d != 3 {
                return Err(Error::IncompatibleFormat { format: "obj", d });
            }
            for p in ps {
                writeln!(out, "v {} {} {}", p[0], p[1], p[2])?;
            }
        }
        ExportFormat::Svg => {
            if d != 2 {
                return Err(Error::IncompatibleFormat { format: "svg", d });
            }
            let side = 1u64 << ps.exponent();
            svg_open(out, side)?;
            for p in ps {
                svg_cell(out, side, p[0], p[1], 0)?;
            }
            writeln!(out, "</svg>")?;
        }
    }
    Ok(())
}

/// Grey level for a hit count: 1 is black, higher counts are lighter.
fn grey_for(count: u64) -> u8 {
    (255 - 255 / count) as u8
}

pub fn write_shadow<W: Write + ?Sized>(g: &ShadowGrid, fmt: ExportFormat, out: &mut W) -> Result<()> {
    match fmt {
        ExportFormat::Csv => {
            let header: Vec<String> = g.kept_axes().iter().map(|a| format!("x{a}")).collect();
            writeln!(out, "{},count", header.join(","))?;
            for (cell, count) in g.cells() {
                writeln!(out, "{},{count}", join(&cell))?;
            }
        }
        ExportFormat::Svg => {
            if g.d_reduced() != 2 {
                return Err(Error::IncompatibleFormat {
                    format: "svg",
                    d: g.d_reduced(),
                });
            }
            let side = 1u64 << g.exponent();
            svg_open(out, side)?;
            for (cell, count) in g.cells().filter(|&(_, c)| c > 0) {
                svg_cell(out, side, cell[0], cell[1], grey_for(count))?;
            }
            writeln!(out, "</svg>")?;
        }
        other => {
            return Err(Error::IncompatibleFormat {
                format: other.name(),
                d: g.d_reduced(),
            })
        }
    }
    Ok(())
}

/// Reads a csv point-set export. Without an explicit bounding exponent, the
/// smallest one covering every coordinate is used.
pub fn read_pointset_csv<R: BufRead>(input: R, n: Option<u32>) -> Result<PointSet> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.ok_or(Error::MalformedCsv {
        line: 1,
        reason: "missing header".into(),
    })?;
    let d = header.split(',').count();
    for (i, name) in header.split(',').enumerate() {
        if name != format!("x{i}") {
            return Err(Error::MalformedCsv {
                line: 1,
                reason: format!("expected column x{i}, found {name:?}"),
            });
        }
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let row = line
            .split(',')
            .map(parse_coordinate)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::MalformedCsv {
                line: i + 2,
                reason: e.to_string(),
            })?;
        if row.len() != d {
            return Err(Error::MalformedCsv {
                line: i + 2,
                reason: format!("expected {d} fields, found {}", row.len()),
            });
        }
        points.push(row);
    }
    let n = n.unwrap_or_else(|| {
        let max = points.iter().flatten().copied().max().unwrap_or(0);
        64 - max.leading_zeros()
    });
    PointSet::from_points(d, n, points)
}

pub fn write_reports_text<W: Write + ?Sized>(reports: &[VerificationReport], out: &mut W) -> Result<()> {
    writeln!(
        out,
        "{:>3} {:>3} {:>12} {:>12} {:>12}  {:<9} {:>10}",
        "d", "n", "recursive", "filtered", "expected", "result", "ms"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:>3} {:>3} {:>12} {:>12} {:>12}  {:<9} {:>10.3}",
            r.d,
            r.n,
            r.cardinality_recursive,
            r.cardinality_filtered,
            r.expected_cardinality,
            if r.passed() { "equal" } else { "MISMATCH" },
            r.elapsed.as_secs_f64() * 1e3
        )?;
        if let Some(diff) = &r.first_discrepancy {
            writeln!(
                out,
                "        first difference at index {}: recursive {:?}, filtered {:?}",
                diff.index, diff.recursive, diff.filtered
            )?;
        }
    }
    Ok(())
}

pub fn write_reports_jsonl<W: Write + ?Sized>(reports: &[VerificationReport], out: &mut W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut *out, r).map_err(std::io::Error::from)?;
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::{base_demihypercube, generate_filtered, Budget, IterationSpec};
    use crate::geometry::shadow;
    use proptest::prelude::*;

    fn spec(d: usize, n: u32) -> IterationSpec {
        IterationSpec::new(d, n).unwrap()
    }

    fn render_points(ps: &PointSet, fmt: ExportFormat) -> String {
        let mut buf = Vec::new();
        write_pointset(ps, fmt, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn render_shadow(g: &ShadowGrid, fmt: ExportFormat) -> String {
        let mut buf = Vec::new();
        write_shadow(g, fmt, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_of_base() {
        let csv = render_points(&base_demihypercube(3).unwrap(), ExportFormat::Csv);
        assert_eq!(csv, "x0,x1,x2\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
    }

    #[test]
    fn csv_of_empty_set_is_header_only() {
        let empty = PointSet::from_points(3, 2, Vec::<Vec<u64>>::new()).unwrap();
        assert_eq!(render_points(&empty, ExportFormat::Csv), "x0,x1,x2\n");
    }

    #[test]
    fn jsonl_and_obj() {
        let base = base_demihypercube(3).unwrap();
        assert_eq!(
            render_points(&base, ExportFormat::Jsonl),
            "[0,0,0]\n[0,1,1]\n[1,0,1]\n[1,1,0]\n"
        );
        assert_eq!(
            render_points(&base, ExportFormat::Obj),
            "v 0 0 0\nv 0 1 1\nv 1 0 1\nv 1 1 0\n"
        );
    }

    #[test]
    fn svg_draws_diagonal() {
        let ps = generate_filtered(spec(2, 2), Budget::default()).unwrap();
        let svg = render_points(&ps, ExportFormat::Svg);
        let expected = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 4 4\" shape-rendering=\"crispEdges\">\n\
<rect x=\"0\" y=\"0\" width=\"4\" height=\"4\" fill=\"#ffffff\"/>\n\
<rect x=\"0\" y=\"3\" width=\"1\" height=\"1\" fill=\"#000000\"/>\n\
<rect x=\"1\" y=\"2\" width=\"1\" height=\"1\" fill=\"#000000\"/>\n\
<rect x=\"2\" y=\"1\" width=\"1\" height=\"1\" fill=\"#000000\"/>\n\
<rect x=\"3\" y=\"0\" width=\"1\" height=\"1\" fill=\"#000000\"/>\n\
</svg>\n";
        assert_eq!(svg, expected);
    }

    #[test]
    fn incompatible_formats() {
        let d3 = base_demihypercube(3).unwrap();
        let d2 = base_demihypercube(2).unwrap();
        let mut sink = Vec::new();
        assert!(matches!(
            write_pointset(&d3, ExportFormat::Svg, &mut sink),
            Err(Error::IncompatibleFormat { format: "svg", d: 3 })
        ));
        assert!(matches!(
            write_pointset(&d2, ExportFormat::Obj, &mut sink),
            Err(Error::IncompatibleFormat { format: "obj", d: 2 })
        ));
        let g = shadow(spec(4, 1), 0, Budget::default()).unwrap();
        assert!(write_shadow(&g, ExportFormat::Svg, &mut sink).is_err());
        assert!(write_shadow(&g, ExportFormat::Jsonl, &mut sink).is_err());
        assert!(write_shadow(&g, ExportFormat::Obj, &mut sink).is_err());
    }

    #[test]
    fn shadow_csv_examples() {
        let csv = render_shadow(&shadow(spec(3, 2), 2, Budget::default()).unwrap(), ExportFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x0,x1,count"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.ends_with(",1")));
        assert_eq!(rows[0], "0,0,1");
        assert_eq!(rows[15], "3,3,1");

        let csv = render_shadow(&shadow(spec(1, 3), 0, Budget::default()).unwrap(), ExportFormat::Csv);
        assert_eq!(csv, ",count\n,1\n");

        let csv = render_shadow(&shadow(spec(4, 2), 0, Budget::default()).unwrap(), ExportFormat::Csv);
        assert!(csv.starts_with("x1,x2,x3,count\n"));
        assert_eq!(csv.lines().skip(1).filter(|r| r.ends_with(",1")).count(), 64);
        assert_eq!(csv.lines().count(), 65);
    }

    #[test]
    fn shadow_svg_is_black_for_single_hits() {
        let svg = render_shadow(&shadow(spec(3, 1), 1, Budget::default()).unwrap(), ExportFormat::Svg);
        assert_eq!(svg.matches("fill=\"#000000\"").count(), 4);
        assert_eq!(grey_for(1), 0);
        assert_eq!(grey_for(2), 128);
    }

    #[test]
    fn csv_reader_rejects_garbage() {
        assert!(read_pointset_csv("".as_bytes(), None).is_err());
        assert!(read_pointset_csv("x0,y1\n".as_bytes(), None).is_err());
        assert!(read_pointset_csv("x0,x1\n1\n".as_bytes(), None).is_err());
        assert!(read_pointset_csv("x0,x1\n1,-2\n".as_bytes(), None).is_err());
        assert!(read_pointset_csv("x0,x1\n1,1\n0,0\n".as_bytes(), None).is_err());
        let ps = read_pointset_csv("x0,x1\n0,0\n3,3\n".as_bytes(), None).unwrap();
        assert_eq!(ps.exponent(), 2);
    }

    proptest! {
        #[test]
        fn csv_round_trip(d in 1usize..5, n in 1u32..4) {
            let ps = generate_filtered(spec(d, n), Budget::default()).unwrap();
            let csv = render_points(&ps, ExportFormat::Csv);
            let back = read_pointset_csv(csv.as_bytes(), Some(n)).unwrap();
            prop_assert_eq!(back, ps);
        }

        #[test]
        fn csv_round_trip_arbitrary(mut points in proptest::collection::vec(proptest::collection::vec(0u64..1000, 3), 0..40)) {
            points.sort();
            points.dedup();
            let ps = PointSet::from_points(3, 10, &points).unwrap();
            let back = read_pointset_csv(render_points(&ps, ExportFormat::Csv).as_bytes(), Some(10)).unwrap();
            prop_assert_eq!(back, ps);
        }
    }
}
