//! Dump date parsing and partial-date completion.

use chrono::NaiveDate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DateError {
    #[error("unrecognized date format: {0:?} (expected YYYY, YYYY-MM, or YYYY-MM-DD)")]
    Format(String),
    #[error("date {0} outside the plausible range [1500-01-01, today + 1 year]")]
    OutOfRange(NaiveDate),
}

/// Complete a partial date: `"YYYY"` becomes July 1st, `"YYYY-MM"` the 15th.
/// The midpoint minimizes expected temporal error in window tests.
pub fn complete_date(s: &str) -> Result<NaiveDate, DateError> {
    let s = s.trim();
    let parts: Vec<&str> = s.split('-').collect();
    let parsed = match parts.as_slice() {
        [y] => ymd(y, "7", "1"),
        [y, m] => ymd(y, m, "15"),
        [y, m, d] => ymd(y, m, d),
        _ => None,
    };
    parsed.ok_or_else(|| DateError::Format(s.to_string()))
}

fn ymd(y: &str, m: &str, d: &str) -> Option<NaiveDate> {
    if y.len() != 4 {
        return None;
    }
    let year: i32 = y.parse().ok()?;
    let month: u32 = m.parse().ok()?;
    let day: u32 = d.parse().ok()?;
    NaiveDate::from_ymd_opt(year, month, day)
}

/// Parse and validate a dump date against `[1500-01-01, max_date]`, where
/// `max_date` is captured once per ingestion run as today + 1 year.
pub fn parse_dump_date(s: &str, max_date: NaiveDate) -> Result<NaiveDate, DateError> {
    let date = complete_date(s)?;
    let min = NaiveDate::from_ymd_opt(1500, 1, 1).unwrap();
    if date < min || date > max_date {
        return Err(DateError::OutOfRange(date));
    }
    Ok(date)
}

/// Upper bound for plausible dates: one year past today.
pub fn max_plausible_date() -> NaiveDate {
    let today = chrono::Local::now().date_naive();
    today
        .checked_add_months(chrono::Months::new(12))
        .unwrap_or(today)
}
