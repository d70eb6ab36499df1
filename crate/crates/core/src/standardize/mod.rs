//! Type-specific clean functions.
//!
//! Every supported [`ColumnType`] has a parser (split + validate) and a
//! renderer (transform). A cell that fails to parse becomes [`Cell::Missing`].
//! [`clean_column`] applies one clean function to every cell of a column.

pub mod address;
pub mod color;
pub mod date;
pub mod duration;
pub mod ip;
pub mod location;
pub mod name;
pub mod phone;
pub mod temperature;
pub mod url;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::Execution;
use crate::table::{Cell, Table};

pub use date::{DateComponents, DateFormat, DEFAULT_DATE_FORMAT};
pub use phone::CallingCode;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StandardizeError {
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column type {0} has no clean function")]
    UnsupportedType(ColumnType),
    #[error("bad target format {format:?}: {reason}")]
    BadTargetFormat { format: String, reason: String },
    #[error("bad default region {0:?}")]
    BadRegion(String),
    #[error("unknown column type {0:?}")]
    UnknownTypeName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Date,
    Address,
    PhoneNumber,
    Location,
    Ip,
    Url,
    Duration,
    Temperature,
    Color,
    Name,
    Unknown,
}

impl ColumnType {
    /// The ten types that have clean functions, in declaration order.
    pub const SUPPORTED: [ColumnType; 10] = [
        ColumnType::Date,
        ColumnType::Address,
        ColumnType::PhoneNumber,
        ColumnType::Location,
        ColumnType::Ip,
        ColumnType::Url,
        ColumnType::Duration,
        ColumnType::Temperature,
        ColumnType::Color,
        ColumnType::Name,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ColumnType::Date => "date",
            ColumnType::Address => "address",
            ColumnType::PhoneNumber => "phone_number",
            ColumnType::Location => "location",
            ColumnType::Ip => "ip",
            ColumnType::Url => "url",
            ColumnType::Duration => "duration",
            ColumnType::Temperature => "temperature",
            ColumnType::Color => "color",
            ColumnType::Name => "name",
            ColumnType::Unknown => "unknown",
        }
    }

    /// Name of the clean function for this type, as used in cleaning plans.
    pub fn clean_function(self) -> Option<&'static str> {
        Some(match self {
            ColumnType::Date => "clean_date",
            ColumnType::Address => "clean_address",
            ColumnType::PhoneNumber => "clean_phone_number",
            ColumnType::Location => "clean_location",
            ColumnType::Ip => "clean_ip",
            ColumnType::Url => "clean_url",
            ColumnType::Duration => "clean_duration",
            ColumnType::Temperature => "clean_temperature",
            ColumnType::Color => "clean_color",
            ColumnType::Name => "clean_name",
            ColumnType::Unknown => return None,
        })
    }

    pub fn from_clean_function(name: &str) -> Option<ColumnType> {
        Self::SUPPORTED
            .into_iter()
            .find(|t| t.clean_function() == Some(name))
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ColumnType {
    type Err = StandardizeError;

    /// Case-insensitive; accepts the plural and spaced spellings that
    /// language models tend to produce.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c })
            .collect();
        Ok(match key.as_str() {
            "date" | "datetime" | "dates" => ColumnType::Date,
            "address" | "addresses" => ColumnType::Address,
            "phone_number" | "phone" | "phone_numbers" | "phonenumber" => ColumnType::PhoneNumber,
            "location" | "locations" => ColumnType::Location,
            "ip" | "ip_address" | "ips" => ColumnType::Ip,
            "url" | "urls" => ColumnType::Url,
            "duration" | "durations" => ColumnType::Duration,
            "temperature" | "temperatures" => ColumnType::Temperature,
            "color" | "colors" | "colour" | "colours" => ColumnType::Color,
            "name" | "names" => ColumnType::Name,
            "unknown" => ColumnType::Unknown,
            _ => return Err(StandardizeError::UnknownTypeName(s.to_owned())),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DateOrder {
    /// `a/b/c` read as month/day/year.
    #[default]
    #[serde(alias = "mdy")]
    MonthFirst,
    /// `a/b/c` read as day/month/year.
    #[serde(alias = "dmy")]
    DayFirst,
}

impl FromStr for DateOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mdy" | "month-first" => Ok(DateOrder::MonthFirst),
            "dmy" | "day-first" => Ok(DateOrder::DayFirst),
            other => Err(format!("unknown date order {other:?} (expected mdy or dmy)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StandardizeOptions {
    /// Country calling code for phone numbers written without one.
    pub default_region: CallingCode,
    pub date_order: DateOrder,
    /// Year used for dates written without one. `None` makes them missing.
    pub reference_year: Option<i32>,
}

/// A user-requested output pattern. Only dates interpret it; the other
/// types have a single fixed output shape and ignore it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetFormat(pub String);

impl TargetFormat {
    pub fn new(pattern: impl Into<String>) -> Self {
        Self(pattern.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// A clean function bound to its type, target format and options.
#[derive(Debug, Clone)]
pub struct Cleaner {
    kind: ColumnType,
    date_format: DateFormat,
    options: StandardizeOptions,
}

impl Cleaner {
    pub fn new(
        kind: ColumnType,
        target_format: Option<&TargetFormat>,
        options: &StandardizeOptions,
    ) -> Result<Self, StandardizeError> {
        if kind == ColumnType::Unknown {
            return Err(StandardizeError::UnsupportedType(kind));
        }
        let date_format = match (kind, target_format) {
            (ColumnType::Date, Some(f)) => DateFormat::parse(f.as_str())?,
            _ => DateFormat::default(),
        };
        Ok(Self {
            kind,
            date_format,
            options: options.clone(),
        })
    }

    pub fn kind(&self) -> ColumnType {
        self.kind
    }

    /// Split + validate only.
    pub fn is_valid(&self, value: &str) -> bool {
        let opts = &self.options;
        match self.kind {
            ColumnType::Date => {
                self.date_format.match_exact(value.trim()).is_some()
                    || date::parse_date(value, opts).is_some()
            }
            ColumnType::Address => address::parse_address(value).is_some(),
            ColumnType::PhoneNumber => phone::parse_phone(value, &opts.default_region).is_some(),
            ColumnType::Location => location::parse_location(value).is_some(),
            ColumnType::Ip => ip::parse_ip(value).is_some(),
            ColumnType::Url => url::parse_url(value).is_some(),
            ColumnType::Duration => duration::parse_duration(value).is_some(),
            ColumnType::Temperature => temperature::parse_temperature(value).is_some(),
            ColumnType::Color => color::parse_color(value).is_some(),
            ColumnType::Name => name::standardize_name(value).is_some(),
            ColumnType::Unknown => false,
        }
    }

    pub fn clean_str(&self, value: &str) -> Option<String> {
        let opts = &self.options;
        match self.kind {
            ColumnType::Date => date::standardize_date(value, &self.date_format, opts),
            ColumnType::Address => address::standardize_address(value),
            ColumnType::PhoneNumber => phone::standardize_phone(value, &opts.default_region),
            ColumnType::Location => location::standardize_location(value),
            ColumnType::Ip => ip::standardize_ip(value),
            ColumnType::Url => url::standardize_url(value),
            ColumnType::Duration => duration::standardize_duration(value),
            ColumnType::Temperature => temperature::standardize_temperature(value),
            ColumnType::Color => color::standardize_color(value),
            ColumnType::Name => name::standardize_name(value),
            ColumnType::Unknown => None,
        }
    }

    pub fn clean(&self, cell: &Cell) -> Cell {
        match cell {
            Cell::Text(s) => self.clean_str(s).into(),
            Cell::Missing => Cell::Missing,
        }
    }
}

/// Cleans a single value. `target_format` is only consulted for dates.
pub fn clean_value(
    value: &Cell,
    kind: ColumnType,
    target_format: Option<&TargetFormat>,
    options: &StandardizeOptions,
) -> Result<Cell, StandardizeError> {
    Ok(Cleaner::new(kind, target_format, options)?.clean(value))
}

pub fn clean_date(value: &str, target_format: &TargetFormat, options: &StandardizeOptions) -> Result<Cell, StandardizeError> {
    let format = DateFormat::parse(target_format.as_str())?;
    Ok(date::standardize_date(value, &format, options).into())
}

pub fn clean_address(value: &str) -> Cell {
    address::standardize_address(value).into()
}

pub fn clean_phone_number(value: &str, options: &StandardizeOptions) -> Cell {
    phone::standardize_phone(value, &options.default_region).into()
}

pub fn clean_location(value: &str) -> Cell {
    location::standardize_location(value).into()
}

pub fn clean_ip(value: &str) -> Cell {
    ip::standardize_ip(value).into()
}

pub fn clean_url(value: &str) -> Cell {
    url::standardize_url(value).into()
}

pub fn clean_duration(value: &str) -> Cell {
    duration::standardize_duration(value).into()
}

pub fn clean_temperature(value: &str) -> Cell {
    temperature::standardize_temperature(value).into()
}

pub fn clean_color(value: &str) -> Cell {
    color::standardize_color(value).into()
}

pub fn clean_name(value: &str) -> Cell {
    name::standardize_name(value).into()
}

/// True iff the clean function for `kind` would produce a value, using the
/// default options and date format.
pub fn validate(value: &str, kind: ColumnType) -> Result<bool, StandardizeError> {
    validate_with(value, kind, &StandardizeOptions::default())
}

pub fn validate_with(value: &str, kind: ColumnType, options: &StandardizeOptions) -> Result<bool, StandardizeError> {
    Ok(Cleaner::new(kind, None, options)?.is_valid(value))
}

/// Returns a new table where every cell of `column_name` has been cleaned.
pub fn clean_column(
    table: &Table,
    column_name: &str,
    kind: ColumnType,
    target_format: Option<&TargetFormat>,
    options: &StandardizeOptions,
) -> Result<Table, StandardizeError> {
    clean_column_with(table, column_name, kind, target_format, options, Execution::default())
}

pub fn clean_column_with(
    table: &Table,
    column_name: &str,
    kind: ColumnType,
    target_format: Option<&TargetFormat>,
    options: &StandardizeOptions,
    execution: Execution,
) -> Result<Table, StandardizeError> {
    let index = table
        .column_index(column_name)
        .ok_or_else(|| StandardizeError::UnknownColumn(column_name.to_owned()))?;
    let cleaner = Cleaner::new(kind, target_format, options)?;
    let cells = execution.map(table.rows(), |row| cleaner.clean(&row[index]));
    Ok(table.with_column(index, cells))
}
