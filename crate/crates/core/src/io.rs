//! Plain-text formats: measures as `coords..., weight` rows and sample paths
//! as `index, coords...` rows. Numbers are written with 9 decimals.
//!
//! Blank lines and lines starting with `#` are skipped; a first row that
//! does not parse as numbers is taken as a header.

use std::fmt::Write as _;

use crate::measures::{DiscreteMeasure, Point, SamplePath, MAX_DIM};
use crate::{Error, Result};

/// Fixed-point rendering used by every text output.
pub fn fmt9(x: f64) -> String {
    format!("{x:.9}")
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("`{f}` is not a finite number"),
                })
        })
        .collect()
}

fn is_header(fields: &[&str]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

/// Parses a measure; weights are nonnegative masses normalized to 1.
pub fn parse_measure_csv(text: &str) -> Result<DiscreteMeasure<Point>> {
    let mut points = Vec::new();
    let mut masses = Vec::new();
    let mut dim = None;
    for (k, (line, fields)) in rows(text).enumerate() {
        if k == 0 && is_header(&fields) {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "expected at least one coordinate and a weight".into(),
            });
        }
        let v = numbers(line, &fields)?;
        let (coords, w) = v.split_at(v.len() - 1);
        if *dim.get_or_insert(coords.len()) != coords.len() {
            return Err(Error::Parse {
                line,
                message: format!("{} coordinates, expected {}", coords.len(), dim.unwrap()),
            });
        }
        if coords.len() > MAX_DIM {
            return Err(Error::Parse {
                line,
                message: format!("at most {MAX_DIM} coordinates are supported"),
            });
        }
        if w[0] < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("negative weight {}", w[0]),
            });
        }
        points.push(Point::new(coords));
        masses.push(w[0]);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no atoms".into(),
        });
    }
    DiscreteMeasure::from_masses(points, masses)
}

fn coord_names(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".into()]
    } else {
        (1..=dim).map(|k| format!("x{k}")).collect()
    }
}

pub fn write_measure_csv(m: &DiscreteMeasure<Point>) -> String {
    let dim = m.support().first().map_or(1, Point::dim);
    let mut s = coord_names(dim).join(",");
    s.push_str(",weight\n");
    for (p, w) in m.iter() {
        for c in p.coords() {
            s.push_str(&fmt9(*c));
            s.push(',');
        }
        let _ = writeln!(s, "{}", fmt9(w));
    }
    s
}

/// Parses a path; the index column is checked to count up from 0.
pub fn parse_path_csv(text: &str, origin: &str) -> Result<SamplePath<Point>> {
    let mut values = Vec::new();
    let mut dim = None;
    for (k, (line, fields)) in rows(text).enumerate() {
        if k == 0 && is_header(&fields) {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "expected an index and at least one coordinate".into(),
            });
        }
        let index: usize = fields[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid index `{}`", fields[0]),
        })?;
        if index != values.len() {
            return Err(Error::Parse {
                line,
                message: format!("index {index}, expected {}", values.len()),
            });
        }
        let coords = numbers(line, &fields[1..])?;
        if *dim.get_or_insert(coords.len()) != coords.len() || coords.len() > MAX_DIM {
            return Err(Error::Parse {
                line,
                message: format!("{} coordinates is inconsistent or unsupported", coords.len()),
            });
        }
        values.push(Point::new(&coords));
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty path".into(),
        });
    }
    SamplePath::new(values, origin, 0)
}

pub fn write_path_csv(path: &SamplePath<Point>) -> String {
    let dim = path.values().first().map_or(1, Point::dim);
    let mut s = String::from("index,");
    s.push_str(&coord_names(dim).join(","));
    s.push('\n');
    for (i, p) in path.values().iter().enumerate() {
        let cs: Vec<String> = p.coords().iter().map(|c| fmt9(*c)).collect();
        let _ = writeln!(s, "{i},{}", cs.join(","));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_round_trip() {
        let m = parse_measure_csv("x,weight\n0.0,1\n# comment\n\n1.0,3\n").unwrap();
        assert_eq!(m.weights(), &[0.25, 0.75]);
        let again = parse_measure_csv(&write_measure_csv(&m)).unwrap();
        assert!(again.same_measure(&m));
    }

    #[test]
    fn malformed_weight_reports_its_line() {
        let e = parse_measure_csv("0.0,0.5\n1.0,abc\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, message: "`abc` is not a finite number".into() });
        assert!(matches!(parse_measure_csv("0.0,-1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_measure_csv("0.0,1\n0.1,0.2,1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn path_round_trip() {
        let p = SamplePath::new(vec![Point::new(&[0.1, 0.2]), Point::new(&[0.3, 0.4])], "t", 0).unwrap();
        let text = write_path_csv(&p);
        assert!(text.starts_with("index,x1,x2\n0,0.100000000,0.200000000\n"));
        assert_eq!(parse_path_csv(&text, "t").unwrap().values(), p.values());
        assert!(matches!(parse_path_csv("index,x\n1,0.5\n", "t"), Err(Error::Parse { line: 2, .. })));
    }
}
