//! Reading series from text.
//!
//! Values may be integers or decimals. Integer series are ranked exactly as
//! `i64`; anything else is parsed as `f64` and ranked by exact value, so
//! near-equal decimals stay distinct unless quantized beforehand.

use std::str::FromStr;

use crate::codes::{remap_alphabet, Series};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(k) => Column::Index(k),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

impl Default for Column {
    fn default() -> Self {
        Column::Index(0)
    }
}

/// A parsed series and what the raw values looked like.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSeries {
    pub series: Series,
    pub integer: bool,
    pub raw_min: f64,
    pub raw_max: f64,
}

impl ParsedSeries {
    /// `max - min + 1` for integer input, `max - min` otherwise.
    pub fn raw_span(&self) -> f64 {
        let span = self.raw_max - self.raw_min;
        if self.integer {
            span + 1.0
        } else {
            span
        }
    }
}

/// Ranks textual values, preferring exact integer order.
pub fn series_from_tokens<'a, I>(tokens: I) -> Result<ParsedSeries>
where
    I: IntoIterator<Item = (usize, &'a str)>,
{
    let tokens: Vec<(usize, &str)> = tokens.into_iter().collect();
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Ok(ints) = tokens.iter().map(|(_, t)| t.parse::<i64>()).collect::<std::result::Result<Vec<_>, _>>() {
        let series = Series::from_ordered(&ints)?;
        let (lo, hi) = (ints.iter().min().unwrap(), ints.iter().max().unwrap());
        return Ok(ParsedSeries {
            series,
            integer: true,
            raw_min: *lo as f64,
            raw_max: *hi as f64,
        });
    }
    let values = tokens
        .iter()
        .map(|&(line, t)| {
            t.parse::<f64>()
                .map_err(|_| Error::MalformedInput(format!("line {line}: not a number: {t:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let series = remap_alphabet(&values)?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(ParsedSeries {
        series,
        integer: false,
        raw_min: lo,
        raw_max: hi,
    })
}

/// Whitespace- or comma-separated numbers; `#` starts a comment.
pub fn parse_plain(text: &str) -> Result<ParsedSeries> {
    let tokens = text.lines().enumerate().flat_map(|(k, line)| {
        let content = line.split('#').next().unwrap_or("");
        content
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|t| !t.is_empty())
            .map(move |t| (k + 1, t))
    });
    series_from_tokens(tokens)
}

/// One column of a CSV file. A first row whose selected cell is not numeric
/// is taken as the header; selecting by name requires one.
pub fn parse_csv(text: &str, column: &Column) -> Result<ParsedSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::MalformedInput(format!("csv: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(rec);
    }
    let first = records.first().ok_or(Error::EmptyInput)?;
    let (col, skip) = match column {
        Column::Index(k) => {
            let header = first.get(*k).is_some_and(|f| f.parse::<f64>().is_err());
            (*k, header as usize)
        }
        Column::Name(name) => {
            let k = first
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| Error::MalformedInput(format!("no column named {name:?}")))?;
            (k, 1)
        }
    };
    let mut tokens = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate().skip(skip) {
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        let cell = rec
            .get(col)
            .ok_or_else(|| Error::MalformedInput(format!("line {line}: no column {col}")))?;
        if cell.is_empty() {
            return Err(Error::MalformedInput(format!("line {line}: empty cell")));
        }
        tokens.push((line, cell));
    }
    series_from_tokens(tokens)
}
