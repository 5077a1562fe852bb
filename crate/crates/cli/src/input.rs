//! Numeric column ingestion. Files hold one numeric column, optionally with
//! a header; wider files need `--column NAME`.

use std::fs::File;
use std::path::Path;

use crate::CliError;

fn open(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file))
}

fn parse_error(path: &Path, line: u64, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Reads one numeric column from `path`. Without `column` the file must be
/// a single column; a first row that does not parse as a number is taken
/// as a header. With `column` the first row must be a header naming it.
pub fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let mut reader = open(path)?;
    let mut records = reader.records();
    let mut values = Vec::new();
    let mut index = 0;
    let mut first = true;
    while let Some(record) = records.next() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            match column {
                Some(name) => {
                    index = record.iter().position(|h| h == name).ok_or_else(|| {
                        let found: Vec<_> = record.iter().collect();
                        parse_error(path, line, format!("no column {name:?} in header [{}]", found.join(", ")))
                    })?;
                    continue;
                }
                None => {
                    if record.len() > 1 {
                        return Err(parse_error(
                            path,
                            line,
                            format!("{} columns found; choose one with --column NAME", record.len()),
                        ));
                    }
                    if record[0].parse::<f64>().is_err() {
                        continue;
                    }
                }
            }
        }
        let field = record
            .get(index)
            .ok_or_else(|| parse_error(path, line, format!("row has {} fields, expected column {}", record.len(), index + 1)))?;
        let v: f64 = field.parse().map_err(|_| parse_error(path, line, format!("cannot parse {field:?} as a number")))?;
        if !v.is_finite() {
            return Err(parse_error(path, line, format!("value {field:?} is not finite")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Usage(format!("{}: no numeric values", path.display())));
    }
    Ok(values)
}

/// A single value stored in a file.
pub fn read_single(path: &Path) -> Result<f64, CliError> {
    let v = read_column(path, None)?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Usage(format!("{}: expected exactly one value, found {}", path.display(), v.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_is_optional() {
        assert_eq!(read_column(file("1\n2.5\n-3\n").path(), None).unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(read_column(file("score\n1\n2\n").path(), None).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn named_column() {
        let f = file("id,score\na,1.5\nb,2\n");
        assert_eq!(read_column(f.path(), Some("score")).unwrap(), vec![1.5, 2.0]);
        assert!(read_column(f.path(), None).unwrap_err().to_string().contains("--column"));
        assert!(read_column(f.path(), Some("nope")).unwrap_err().to_string().contains("nope"));
    }

    #[test]
    fn bad_value_names_the_line() {
        let err = read_column(file("x\n1\n2\noops\n").path(), None).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("oops"));
    }

    #[test]
    fn empty_file() {
        assert!(read_column(file("").path(), None).is_err());
        assert!(read_single(file("1\n2\n").path()).is_err());
        assert_eq!(read_single(file("3.25\n").path()).unwrap(), 3.25);
    }
}
