//! OHLC price files and daily return series.

use std::io::Read;

use chrono::NaiveDate;

use crate::error::{domain, Error, Result};

/// Closing prices on strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    /// Sorts by date; duplicate dates and nonpositive prices are rejected.
    pub fn new(points: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let mut points = points;
        points.sort_by_key(|p| p.0);
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!("duplicate date {}", w[0].0)));
        }
        if let Some((d, c)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::Validation(format!(
                "close on {d} must be positive, got {c}"
            )));
        }
        let (dates, closes) = points.into_iter().unzip();
        Ok(PriceSeries { dates, closes })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    /// `Date,Close` CSV that [`parse_ohlc_csv`] reads back to the same series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Date,Close\n");
        for (d, c) in self.dates.iter().zip(&self.closes) {
            out.push_str(&format!("{},{}\n", d.format("%Y-%m-%d"), c));
        }
        out
    }
}

/// A parsed file plus the number of rows dropped for a missing close.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPrices {
    pub series: PriceSeries,
    pub skipped_rows: usize,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("null") || f.eq_ignore_ascii_case("nan")
}

/// Reads a comma-separated file with a header naming at least `Date` and
/// `Close` (Yahoo-style exports work as is). Rows whose close is empty or
/// `null` are skipped and counted.
pub fn parse_ohlc_csv<R: Read>(content: R) -> Result<ParsedPrices> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(content);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("cannot read header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Format(format!("missing required column {name:?}")))
    };
    let date_col = column("Date")?;
    let close_col = column("Close")?;

    let mut points = Vec::new();
    let mut skipped_rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| Error::Row { line, message };
        let date_field = record.get(date_col).unwrap_or("");
        let close_field = record.get(close_col).unwrap_or("");
        if is_missing(close_field) {
            skipped_rows += 1;
            continue;
        }
        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d")
            .map_err(|e| row_err(format!("bad date {date_field:?}: {e}")))?;
        let close: f64 = close_field
            .parse()
            .map_err(|e| row_err(format!("bad close {close_field:?}: {e}")))?;
        if !(close > 0.0 && close.is_finite()) {
            return Err(row_err(format!("close must be positive, got {close}")));
        }
        points.push((date, close));
    }
    if skipped_rows > 0 {
        log::warn!("skipped {skipped_rows} rows without a close price");
    }
    Ok(ParsedPrices {
        series: PriceSeries::new(points)?,
        skipped_rows,
    })
}

/// How consecutive closes are turned into a return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnKind {
    /// `100 · (c_t / c_{t-1} - 1)`
    #[default]
    Simple,
    /// `100 · ln(c_t / c_{t-1})`
    Log,
}

/// Close-to-close returns in percent, one shorter than the series.
pub fn daily_returns(series: &PriceSeries, kind: ReturnKind) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(domain(format!(
            "need at least 2 prices for returns, got {}",
            series.len()
        )));
    }
    Ok(series
        .closes
        .windows(2)
        .map(|w| {
            let ratio = w[1] / w[0];
            match kind {
                ReturnKind::Simple => 100.0 * (ratio - 1.0),
                ReturnKind::Log => 100.0 * ratio.ln(),
            }
        })
        .collect())
}
