//! CSV input.
//!
//! * series: a single column of numbers, no header;
//! * multichannel: one column per channel, preceded by a header row holding
//!   each channel's length; cells past a channel's length must be empty;
//! * field: a plain numeric matrix, row `i`, column `j` holding `f(i, j)`.

use std::fs::File;
use std::path::Path;

use autossa::{Field2D, MultiSeries, TimeSeries};
use nalgebra::DMatrix;

use crate::error::{data, usage, CliError, CliResult};

/// Parsed input data.
#[derive(Debug, Clone)]
pub enum Data {
    Series(TimeSeries),
    Multi(MultiSeries),
    Field(Field2D),
}

impl Data {
    pub fn kind(&self) -> &'static str {
        match self {
            Data::Series(_) => "series",
            Data::Multi(_) => "multichannel",
            Data::Field(_) => "field",
        }
    }

    /// Values in output order: samples, channel after channel, or the field
    /// column by column.
    pub fn flat(&self) -> Vec<f64> {
        match self {
            Data::Series(s) => s.values().to_vec(),
            Data::Multi(m) => m.channels().iter().flat_map(|c| c.values().to_vec()).collect(),
            Data::Field(f) => f.values().as_slice().to_vec(),
        }
    }
}

/// Requested interpretation of the input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputLayout {
    /// `field` when a 2D window is given, `multi` for more than one column,
    /// `series` otherwise.
    Auto,
    Series,
    Multi,
    Field,
}

type Rows = Vec<Vec<String>>;

fn read_rows(path: &Path) -> CliResult<Rows> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open input {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return data(format!("{}: no data", path.display()));
    }
    Ok(rows)
}

fn number(cell: &str, row: usize, col: usize) -> CliResult<f64> {
    cell.parse::<f64>().map_err(|_| {
        CliError::Data(format!(
            "row {}, column {}: '{cell}' is not a number",
            row + 1,
            col + 1
        ))
    })
}

fn parse_series(rows: &Rows) -> CliResult<Data> {
    let values = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != 1 {
                return data(format!(
                    "row {}: series input needs exactly one column, found {}",
                    r + 1,
                    row.len()
                ));
            }
            number(&row[0], r, 0)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Data::Series(TimeSeries::new(values)?))
}

fn parse_multi(rows: &Rows) -> CliResult<Data> {
    let lengths = rows[0]
        .iter()
        .map(|c| {
            c.parse::<usize>().map_err(|_| {
                CliError::Data(format!(
                    "header row must hold the channel lengths, found '{c}'"
                ))
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let body = &rows[1..];
    let mut channels = vec![Vec::new(); lengths.len()];
    for (r, row) in body.iter().enumerate() {
        if row.len() > lengths.len() {
            return data(format!(
                "row {}: {} cells for {} channels",
                r + 2,
                row.len(),
                lengths.len()
            ));
        }
        for (p, &len) in lengths.iter().enumerate() {
            let cell = row.get(p).map_or("", String::as_str);
            match (r < len, cell.is_empty()) {
                (true, true) => {
                    return data(format!("row {}: channel {} is missing a value", r + 2, p + 1))
                }
                (true, false) => channels[p].push(number(cell, r + 1, p)?),
                (false, false) => {
                    return data(format!(
                        "row {}: channel {} has more values than its declared length {len}",
                        r + 2,
                        p + 1
                    ))
                }
                (false, true) => {}
            }
        }
    }
    if let Some(p) = (0..lengths.len()).find(|&p| channels[p].len() != lengths[p]) {
        return data(format!(
            "channel {} declares {} values but has {}",
            p + 1,
            lengths[p],
            channels[p].len()
        ));
    }
    Ok(Data::Multi(MultiSeries::from_vecs(channels)?))
}

fn parse_field(rows: &Rows) -> CliResult<Data> {
    let ny = rows[0].len();
    let mut values = Vec::with_capacity(rows.len() * ny);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ny {
            return data(format!(
                "row {}: field rows need {ny} columns, found {}",
                r + 1,
                row.len()
            ));
        }
        for (c, cell) in row.iter().enumerate() {
            values.push(number(cell, r, c)?);
        }
    }
    let m = DMatrix::from_row_slice(rows.len(), ny, &values);
    Ok(Data::Field(Field2D::new(m)?))
}

/// Reads `path` with the given layout; `field_hint` resolves `Auto` to a field.
pub fn load(path: &Path, layout: InputLayout, field_hint: bool) -> CliResult<Data> {
    let rows = read_rows(path)?;
    let layout = match layout {
        InputLayout::Auto if field_hint => InputLayout::Field,
        InputLayout::Auto if rows.iter().any(|r| r.len() > 1) => InputLayout::Multi,
        InputLayout::Auto => InputLayout::Series,
        other => other,
    };
    match layout {
        InputLayout::Series => parse_series(&rows),
        InputLayout::Multi => parse_multi(&rows),
        InputLayout::Field => parse_field(&rows),
        InputLayout::Auto => usage("unresolved input layout"),
    }
}
