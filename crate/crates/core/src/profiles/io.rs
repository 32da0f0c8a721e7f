//! Delimited-text profile files.
//!
//! Layout: a header row `timestamp, demand, <source1>, <source2>, …` followed
//! by one row per time step. Row order defines the time index; timestamps are
//! carried along but never interpreted. Lines starting with `#` are comments.
//!
//! Exported files start with the marker line `# re100-profiles v1 normalized`
//! and hold normalized values with 12 significant digits. Files carrying the
//! marker are read verbatim instead of being re-normalized, so that
//! export → ingest → export reproduces the file byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{normalize, Profile, ProfileKind, ProfileSet};
use crate::error::{Error, Result};

pub const NORMALIZED_MARKER: &str = "# re100-profiles v1 normalized";

/// Longest run of missing steps that is filled by interpolation.
pub const MAX_GAP: usize = 3;

const HOURS_PER_YEAR: usize = 8760;
const HOURS_PER_LEAP_YEAR: usize = 8784;

/// Reads a profile file of any length.
pub fn ingest_csv(path: &Path, region: &str, year: &str) -> Result<ProfileSet> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text, region, year)
}

/// Reads one region-year of hourly system data: demand plus one column per source.
///
/// The file must cover a whole year of hours, either 8760 or 8784 rows; leap
/// years are kept at their native length.
pub fn ingest_occto(path: &Path, region: &str, year: &str) -> Result<ProfileSet> {
    let set = ingest_csv(path, region, year)?;
    if set.len() != HOURS_PER_YEAR && set.len() != HOURS_PER_LEAP_YEAR {
        return Err(Error::Ingest {
            row: set.len() + 1,
            column: "*".into(),
            message: format!(
                "expected {HOURS_PER_YEAR} or {HOURS_PER_LEAP_YEAR} hourly rows, found {}",
                set.len()
            ),
        });
    }
    Ok(set)
}

fn detect_delimiter(header: &str) -> u8 {
    if header.contains('\t') {
        b'\t'
    } else if header.contains(';') && !header.contains(',') {
        b';'
    } else {
        b','
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "N/A" | "NaN" | "nan" | "-")
}

pub(crate) fn parse(text: &str, region: &str, year: &str) -> Result<ProfileSet> {
    let normalized = text.lines().next().map(str::trim_end) == Some(NORMALIZED_MARKER);
    let (header_index, header_line) = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .ok_or_else(|| Error::Ingest {
            row: 1,
            column: "*".into(),
            message: "empty file".into(),
        })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(header_line))
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(e, &[]))?
        .iter()
        .map(str::to_string)
        .collect();
    let header_row = header_index + 1;
    if header.len() < 3 {
        return Err(Error::Ingest {
            row: header_row,
            column: header.last().cloned().unwrap_or_default(),
            message: format!(
                "expected columns `timestamp, demand, <source>…`, found {} column(s)",
                header.len()
            ),
        });
    }
    if !header[1].eq_ignore_ascii_case("demand") {
        return Err(Error::Ingest {
            row: header_row,
            column: header[1].clone(),
            message: "second column must be `demand`".into(),
        });
    }

    let mut timestamps = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); header.len() - 1];
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, &header))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        lines.push(line);
        timestamps.push(record[0].to_string());
        for (c, column) in columns.iter_mut().enumerate() {
            let cell = &record[c + 1];
            let name = &header[c + 1];
            if is_missing(cell) {
                column.push(None);
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Ingest {
                row: line,
                column: name.clone(),
                message: format!("non-numeric value `{cell}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Ingest {
                    row: line,
                    column: name.clone(),
                    message: format!("non-finite value `{cell}`"),
                });
            }
            if value < 0.0 {
                return Err(Error::Ingest {
                    row: line,
                    column: name.clone(),
                    message: format!("negative value {value}"),
                });
            }
            column.push(Some(value));
        }
    }
    if timestamps.len() < 2 {
        return Err(Error::Ingest {
            row: header_row + 1,
            column: "*".into(),
            message: format!("need at least 2 data rows, found {}", timestamps.len()),
        });
    }

    let mut profiles = Vec::with_capacity(columns.len());
    for (c, column) in columns.into_iter().enumerate() {
        let name = &header[c + 1];
        let raw = fill_gaps(&column, name, &lines)?;
        let kind = if c == 0 {
            ProfileKind::Demand
        } else {
            ProfileKind::Generation
        };
        let label = format!("{region}/{year}/{name}");
        let profile = if normalized {
            Profile::from_normalized(raw, kind, label)
        } else {
            normalize(&raw, kind, label)
        }
        .map_err(|e| Error::Ingest {
            row: header_row,
            column: name.clone(),
            message: e.to_string(),
        })?;
        profiles.push((name.clone(), profile));
    }
    let mut profiles = profiles.into_iter();
    let (_, demand) = profiles.next().expect("demand column present");
    ProfileSet::new(demand, profiles.collect(), region, year, timestamps)
}

fn csv_error(e: csv::Error, header: &[String]) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} cells, found {len}")
        }
        _ => e.to_string(),
    };
    let column = if header.is_empty() {
        "*".into()
    } else {
        header.join(",")
    };
    Error::Ingest {
        row,
        column,
        message,
    }
}

/// Linearly interpolates runs of at most [`MAX_GAP`] missing steps, wrapping
/// around the period boundary.
fn fill_gaps(column: &[Option<f64>], name: &str, lines: &[usize]) -> Result<Vec<f64>> {
    let n = column.len();
    let known: Vec<usize> = (0..n).filter(|&t| column[t].is_some()).collect();
    if known.is_empty() {
        return Err(Error::Ingest {
            row: lines.first().copied().unwrap_or(0),
            column: name.into(),
            message: "column has no values".into(),
        });
    }
    let mut out: Vec<f64> = column.iter().map(|v| v.unwrap_or(0.0)).collect();
    for (k, &left) in known.iter().enumerate() {
        let right = known[(k + 1) % known.len()];
        let gap = (right + n - left - 1) % n;
        if gap == 0 && known.len() > 1 {
            continue;
        }
        let gap = if known.len() == 1 { n - 1 } else { gap };
        if gap == 0 {
            continue;
        }
        let first_missing = (left + 1) % n;
        if gap > MAX_GAP {
            return Err(Error::Ingest {
                row: lines[first_missing],
                column: name.into(),
                message: format!("{gap} consecutive missing values (at most {MAX_GAP} are filled)"),
            });
        }
        let (a, b) = (out[left], out[right]);
        for s in 1..=gap {
            let t = (left + s) % n;
            let w = s as f64 / (gap + 1) as f64;
            out[t] = a + (b - a) * w;
        }
        log::warn!(
            "column `{name}`: interpolated {gap} missing value(s) starting at line {}",
            lines[first_missing]
        );
    }
    Ok(out)
}

fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Serializes a profile set in the exported layout.
pub fn write_profiles<W: Write>(set: &ProfileSet, out: W) -> Result<()> {
    let mut out = out;
    writeln!(out, "{NORMALIZED_MARKER}")?;
    writeln!(out, "# region={} year={}", set.region, set.year)?;
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    let mut header = vec!["timestamp".to_string(), "demand".to_string()];
    header.extend(set.generations.iter().map(|(n, _)| n.clone()));
    writer
        .write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;
    for t in 0..set.len() {
        let mut row = Vec::with_capacity(header.len());
        row.push(
            set.timestamps
                .get(t)
                .cloned()
                .unwrap_or_else(|| t.to_string()),
        );
        row.push(format_value(set.demand.values()[t]));
        for (_, g) in &set.generations {
            row.push(format_value(g.values()[t]));
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn export(set: &ProfileSet, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_profiles(set, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "timestamp,demand,pv,wt\n\
        0,1,2,0\n\
        1,1,2,1\n\
        2,1,0,1\n\
        3,1,0,2\n";

    #[test]
    fn parses_and_normalizes() {
        let set = parse(SMALL, "r", "y").unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set.demand.values(), &[0.25; 4]);
        assert_eq!(
            set.generation("pv").unwrap().values(),
            &[0.5, 0.5, 0.0, 0.0]
        );
        assert_eq!(
            set.generation("wt").unwrap().values(),
            &[0.0, 0.25, 0.25, 0.5]
        );
    }

    #[test]
    fn negative_cell_is_located() {
        let text = "timestamp,demand,pv\n0,1,1\n1,-2,1\n";
        match parse(text, "r", "y").unwrap_err() {
            Error::Ingest { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "demand");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_is_located() {
        let text = "timestamp,demand,pv\n0,1,1\n1,2,abc\n";
        match parse(text, "r", "y").unwrap_err() {
            Error::Ingest {
                row,
                column,
                message,
            } => {
                assert_eq!((row, column.as_str()), (3, "pv"));
                assert!(message.contains("abc"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn missing_columns() {
        assert!(matches!(
            parse("timestamp,demand\n0,1\n1,1\n", "r", "y"),
            Err(Error::Ingest { row: 1, .. })
        ));
    }

    #[test]
    fn ragged_row() {
        let text = "timestamp,demand,pv\n0,1,1\n1,2\n";
        assert!(matches!(
            parse(text, "r", "y"),
            Err(Error::Ingest { row: 3, .. })
        ));
    }

    #[test]
    fn short_gap_is_interpolated() {
        let text = "timestamp,demand,pv\n0,1,1\n1,,2\n2,,3\n3,4,4\n4,1,1\n";
        let set = parse(text, "r", "y").unwrap();
        let total = 1.0 + 2.0 + 3.0 + 4.0 + 1.0;
        let d = set.demand.values();
        assert!((d[1] - 2.0 / total).abs() < 1e-15);
        assert!((d[2] - 3.0 / total).abs() < 1e-15);
    }

    #[test]
    fn gap_wraps_around_boundary() {
        let text = "timestamp,demand,pv\n0,NA,1\n1,2,1\n2,2,1\n3,4,1\n";
        let set = parse(text, "r", "y").unwrap();
        // Step 0 sits between step 3 (value 4) and step 1 (value 2).
        let d = set.demand.values();
        assert!((d[0] / d[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn long_gap_is_an_error() {
        let text = "timestamp,demand,pv\n0,1,1\n1,,1\n2,,1\n3,,1\n4,,1\n5,1,1\n";
        assert!(matches!(
            parse(text, "r", "y"),
            Err(Error::Ingest { row: 3, .. })
        ));
    }

    #[test]
    fn tab_delimited() {
        let text = "timestamp\tdemand\tpv\n0\t1\t1\n1\t1\t3\n";
        let set = parse(text, "r", "y").unwrap();
        assert_eq!(set.generation("pv").unwrap().values(), &[0.25, 0.75]);
    }

    #[test]
    fn export_round_trip_is_byte_identical() {
        let set = parse(SMALL, "r", "y").unwrap();
        let mut first = Vec::new();
        write_profiles(&set, &mut first).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        let again = parse(&text, "r", "y").unwrap();
        let mut second = Vec::new();
        write_profiles(&again, &mut second).unwrap();
        assert_eq!(first, second);
    }
}
