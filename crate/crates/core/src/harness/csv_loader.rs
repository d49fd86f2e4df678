use std::path::Path;

use crate::data::{ClassLabel, Column, Dataset, TaskKind, Targets};
use crate::error::{Error, Result};

/// How to interpret a CSV file.
#[derive(Clone, Debug, Default)]
pub struct CsvOptions {
    /// Target column. Empty means the file has no target: every column is a
    /// feature and the targets are set to zero (enough for fitting grids).
    pub target: String,
    /// Forces the task; otherwise a numeric target means regression.
    pub task: Option<TaskKind>,
    /// Columns read as categorical even when numeric.
    pub categorical: Vec<String>,
    /// Columns that must parse as numbers.
    pub continuous: Vec<String>,
    /// Dataset name; defaults to the file stem.
    pub name: Option<String>,
}

impl CsvOptions {
    pub fn new(target: impl Into<String>) -> Self {
        CsvOptions {
            target: target.into(),
            ..Default::default()
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load a headed CSV (RFC 4180 quoting). Empty cells are rejected.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let parse_err = |row: usize, column: &str, message: String| Error::ParseError {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    };

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, "-", e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let no_target = opts.target.is_empty();
    let target_idx = if no_target {
        usize::MAX
    } else {
        headers
            .iter()
            .position(|h| *h == opts.target)
            .ok_or_else(|| Error::UnknownTarget {
                path: path.to_path_buf(),
                target: opts.target.clone(),
            })?
    };
    for (list, option) in [(&opts.categorical, "categorical"), (&opts.continuous, "continuous")] {
        if let Some(missing) = list.iter().find(|c| !headers.contains(c)) {
            return Err(Error::UnknownColumn {
                path: path.to_path_buf(),
                column: missing.clone(),
                option,
            });
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    // Line number of each record, for error locations.
    let mut lines: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, "-", e.to_string())
        })?;
        let line = record.position().map_or(lines.len() + 2, |p| p.line() as usize);
        for (j, cell) in record.iter().enumerate() {
            if cell.trim().is_empty() {
                return Err(Error::MissingValues {
                    path: path.to_path_buf(),
                    row: line,
                    column: headers[j].clone(),
                });
            }
            cells[j].push(cell.trim().to_string());
        }
        lines.push(line);
    }

    let numeric = |j: usize| -> std::result::Result<Vec<f64>, (usize, String)> {
        cells[j]
            .iter()
            .enumerate()
            .map(|(i, s)| parse_number(s).ok_or((lines[i], s.clone())))
            .collect()
    };

    let mut features = Vec::with_capacity(headers.len());
    for (j, name) in headers.iter().enumerate() {
        if j == target_idx {
            continue;
        }
        let column = if opts.categorical.contains(name) {
            Column::categorical(name.clone(), &cells[j])
        } else {
            match numeric(j) {
                Ok(v) => Column::continuous(name.clone(), v),
                Err((line, cell)) if opts.continuous.contains(name) => {
                    return Err(parse_err(line, name, format!("'{cell}' is not a finite number")))
                }
                Err(_) => Column::categorical(name.clone(), &cells[j]),
            }
        };
        features.push(column);
    }

    let target_categorical = opts.categorical.contains(&opts.target);
    let task = match opts.task {
        _ if no_target => TaskKind::Regression,
        Some(t) => t,
        None if target_categorical => TaskKind::Classification,
        None if numeric(target_idx).is_ok() => TaskKind::Regression,
        None => TaskKind::Classification,
    };
    let targets = match task {
        _ if no_target => Targets::Real(vec![0.0; lines.len()]),
        TaskKind::Regression => match numeric(target_idx) {
            Ok(v) => Targets::Real(v),
            Err((line, cell)) => {
                return Err(parse_err(
                    line,
                    &opts.target,
                    format!("regression target '{cell}' is not a finite number"),
                ))
            }
        },
        TaskKind::Classification => {
            Targets::Class(cells[target_idx].iter().map(|s| ClassLabel::new(s.as_str())).collect())
        }
    };

    let name = opts.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let data = Dataset::new(name, features, opts.target.clone(), targets)?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnData, FeatureKind};
    use std::io::Write;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn numeric_csv() {
        let f = write("a,b,y\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n");
        let d = load_csv(f.path(), &CsvOptions::new("y")).unwrap();
        assert_eq!((d.n(), d.d()), (4, 2));
        assert_eq!(d.task(), TaskKind::Regression);
        assert_eq!(d.targets(), &Targets::Real(vec![3.0, 6.0, 9.0, 1.0]));
    }

    #[test]
    fn empty_cell_is_reported_with_location() {
        let f = write("a,b,y\n1,2,3\n4,,6\n");
        match load_csv(f.path(), &CsvOptions::new("y")) {
            Err(Error::MissingValues { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "b");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn declared_categorical_and_inference() {
        let f = write("code,color,y\n1,red,a\n2,blue,b\n1,red,a\n");
        let opts = CsvOptions {
            categorical: vec!["code".into()],
            ..CsvOptions::new("y")
        };
        let d = load_csv(f.path(), &opts).unwrap();
        assert!(matches!(d.schema().kinds[0], FeatureKind::Categorical { .. }));
        assert!(matches!(d.feature(1).data, ColumnData::Categorical { .. }));
        assert_eq!(d.task(), TaskKind::Classification);
    }

    #[test]
    fn table_without_target() {
        let f = write("a,b\n1,x\n2,y\n");
        let d = load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!((d.n(), d.d()), (2, 2));
    }

    #[test]
    fn errors() {
        let f = write("a,y\n1,2\n");
        assert!(matches!(load_csv(f.path(), &CsvOptions::new("z")), Err(Error::UnknownTarget { .. })));
        let f = write("a,y\n1,2\nx,3\n");
        let opts = CsvOptions {
            continuous: vec!["a".into()],
            ..CsvOptions::new("y")
        };
        match load_csv(f.path(), &opts) {
            Err(Error::ParseError { row, column, .. }) => assert_eq!((row, column.as_str()), (3, "a")),
            other => panic!("unexpected {other:?}"),
        }
        let f = write("a,y\n1,2\n3\n");
        assert!(matches!(load_csv(f.path(), &CsvOptions::new("y")), Err(Error::ParseError { .. })));
        let f = write("a,y\n1,2\n3,lots\n");
        let opts = CsvOptions {
            task: Some(TaskKind::Regression),
            ..CsvOptions::new("y")
        };
        assert!(matches!(load_csv(f.path(), &opts), Err(Error::ParseError { .. })));
    }
}
