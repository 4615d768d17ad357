//! Delimited-text ingestion, schema sidecars and partition files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cobweb_core::{AttributeDecl, AttributeKind, Dataset, Instance, Partition, Schema, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read `{path}`")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("`{0}` is empty")]
    EmptyFile(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column `{column}`: {message}")]
    ParseError {
        line: usize,
        column: String,
        message: String,
    },
    #[error("schema sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error("instance {0} is not assigned to any cluster")]
    UnassignedInstance(usize),
    #[error("instance id {id} is out of range for {count} instances")]
    UnknownInstanceId { id: usize, count: usize },
    #[error("instance {0} is assigned twice")]
    DuplicateInstance(usize),
    #[error(transparent)]
    Model(#[from] cobweb_core::Error),
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Declared kind of one column in a sidecar.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Numeric,
    /// Nominal; `None` takes the observed values.
    Nominal(Option<Vec<String>>),
}

/// Parses a schema sidecar: one `name kind [value ...]` line per attribute,
/// whitespace separated. `#` starts a comment.
pub fn parse_sidecar(text: &str) -> Result<BTreeMap<String, ColumnKind>, DataError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| DataError::Sidecar {
            line: idx + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let name = fields.next().expect("non-empty line").to_string();
        let kind = match fields.next() {
            Some("numeric") => {
                if fields.next().is_some() {
                    return Err(err("numeric attributes take no value set".into()));
                }
                ColumnKind::Numeric
            }
            Some("nominal") => {
                let values: Vec<String> = fields.map(str::to_string).collect();
                ColumnKind::Nominal((!values.is_empty()).then_some(values))
            }
            Some(other) => return Err(err(format!("unknown kind `{other}`"))),
            None => return Err(err("missing kind".into())),
        };
        if out.insert(name.clone(), kind).is_some() {
            return Err(err(format!("attribute `{name}` declared twice")));
        }
    }
    Ok(out)
}

/// Raw header and cells of a delimited file.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path, delimiter: u8) -> Result<Table, DataError> {
    let text = read(path)?;
    let name = path.display().to_string();
    if text.trim().is_empty() {
        return Err(DataError::EmptyFile(name));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::ParseError {
            line: 1,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| DataError::ParseError {
            line,
            column: String::new(),
            message: e.to_string(),
        })?;
        if record.len() != header.len() {
            return Err(DataError::RaggedRows {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(DataError::EmptyFile(name));
    }
    Ok(Table { header, rows })
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn observed(rows: &[Vec<String>], j: usize) -> Vec<String> {
    let mut values: Vec<String> = Vec::new();
    for row in rows {
        if !values.contains(&row[j]) {
            values.push(row[j].clone());
        }
    }
    values
}

/// Loads a delimited file with a header row.
///
/// Without a sidecar a column is numeric iff every cell parses as a finite
/// number; otherwise it is nominal over its observed values.
pub fn load_csv(
    path: &Path,
    delimiter: u8,
    sidecar: Option<&Path>,
) -> Result<Dataset<f64>, DataError> {
    let table = read_table(path, delimiter)?;
    let declared = sidecar
        .map(|p| read(p).and_then(|t| parse_sidecar(&t)))
        .transpose()?;
    if let Some(declared) = &declared {
        if let Some(extra) = declared.keys().find(|k| !table.header.contains(k)) {
            return Err(DataError::Sidecar {
                line: 0,
                message: format!("attribute `{extra}` is not a column of the input"),
            });
        }
    }

    let mut attrs = Vec::with_capacity(table.header.len());
    for (j, name) in table.header.iter().enumerate() {
        let kind = match declared.as_ref().and_then(|d| d.get(name)) {
            Some(ColumnKind::Numeric) => ColumnKind::Numeric,
            Some(ColumnKind::Nominal(values)) => ColumnKind::Nominal(values.clone()),
            None if table.rows.iter().all(|r| parse_number(&r[j]).is_some()) => ColumnKind::Numeric,
            None => ColumnKind::Nominal(None),
        };
        attrs.push(match kind {
            ColumnKind::Numeric => AttributeDecl::numeric(name.clone()),
            ColumnKind::Nominal(values) => AttributeDecl {
                name: name.clone(),
                kind: AttributeKind::Nominal {
                    values: values.unwrap_or_else(|| observed(&table.rows, j)),
                },
            },
        });
    }
    let schema = Schema::new(attrs)?;

    let mut instances = Vec::with_capacity(table.rows.len());
    for (idx, row) in table.rows.iter().enumerate() {
        let line = idx + 2;
        let values = row
            .iter()
            .zip(schema.attributes())
            .map(|(cell, attr)| match &attr.kind {
                AttributeKind::Numeric => {
                    parse_number(cell)
                        .map(Value::Numeric)
                        .ok_or_else(|| DataError::ParseError {
                            line,
                            column: attr.name.clone(),
                            message: format!("`{cell}` is not a finite number"),
                        })
                }
                AttributeKind::Nominal { values } => {
                    if values.contains(cell) {
                        Ok(Value::Nominal(cell.clone()))
                    } else {
                        Err(DataError::ParseError {
                            line,
                            column: attr.name.clone(),
                            message: format!("`{cell}` is not a declared value"),
                        })
                    }
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        instances.push(Instance::new(values));
    }
    Ok(Dataset::new(schema, instances)?)
}

/// Reinterprets every numeric column as nominal over its observed values,
/// printed the way they were parsed.
pub fn to_nominal(dataset: &Dataset<f64>) -> Result<Dataset<f64>, DataError> {
    let cells: Vec<Vec<String>> = dataset
        .instances()
        .iter()
        .map(|inst| inst.values.iter().map(|v| v.to_string()).collect())
        .collect();
    let attrs = dataset
        .schema()
        .attributes()
        .iter()
        .enumerate()
        .map(|(j, attr)| match &attr.kind {
            AttributeKind::Nominal { .. } => attr.clone(),
            AttributeKind::Numeric => AttributeDecl {
                name: attr.name.clone(),
                kind: AttributeKind::Nominal {
                    values: observed(&cells, j),
                },
            },
        })
        .collect();
    let instances = cells.into_iter().map(Instance::nominal).collect();
    Ok(Dataset::new(Schema::new(attrs)?, instances)?)
}

/// Parses a partition file: `id label` per line (comma, tab or space
/// separated), an optional header, every id in `0..count` exactly once.
/// Clusters and their members keep the order they appear in.
pub fn parse_partition(text: &str, count: usize) -> Result<Partition, DataError> {
    let mut seen = vec![false; count];
    let mut labels: Vec<String> = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split([',', '\t', ' ']).filter(|f| !f.is_empty());
        let (Some(id), Some(label), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(DataError::ParseError {
                line: idx + 1,
                column: "partition".into(),
                message: "expected `id label`".into(),
            });
        };
        let Ok(id) = id.parse::<usize>() else {
            if labels.is_empty() && clusters.is_empty() && id.parse::<f64>().is_err() {
                continue;
            }
            return Err(DataError::ParseError {
                line: idx + 1,
                column: "id".into(),
                message: format!("`{id}` is not an instance id"),
            });
        };
        let slot = seen
            .get_mut(id)
            .ok_or(DataError::UnknownInstanceId { id, count })?;
        if std::mem::replace(slot, true) {
            return Err(DataError::DuplicateInstance(id));
        }
        match labels.iter().position(|l| l == label) {
            Some(k) => clusters[k].push(id),
            None => {
                labels.push(label.to_string());
                clusters.push(vec![id]);
            }
        }
    }
    if let Some(m) = seen.iter().position(|&s| !s) {
        return Err(DataError::UnassignedInstance(m));
    }
    Ok(Partition::new(clusters)?)
}

pub fn load_partition(path: &Path, count: usize) -> Result<Partition, DataError> {
    parse_partition(&read(path)?, count)
}

/// Partition file text: `id<TAB>label`, grouped by cluster, labels `C1..Cn`.
pub fn format_partition(partition: &Partition) -> String {
    let mut out = String::from("id\tcluster\n");
    for (k, cluster) in partition.clusters().iter().enumerate() {
        for m in cluster {
            out.push_str(&format!("{m}\tC{}\n", k + 1));
        }
    }
    out
}
