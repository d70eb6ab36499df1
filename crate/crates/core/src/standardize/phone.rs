//! E.164 phone numbers.

use super::StandardizeError;

/// A country calling code such as `+1` or `44`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallingCode(String);

impl CallingCode {
    pub fn parse(code: &str) -> Result<Self, StandardizeError> {
        let digits = code.trim().trim_start_matches('+');
        let ok = (1..=3).contains(&digits.len())
            && digits.bytes().all(|b| b.is_ascii_digit())
            && !digits.starts_with('0');
        if ok {
            Ok(Self(digits.to_owned()))
        } else {
            Err(StandardizeError::BadRegion(code.to_owned()))
        }
    }

    pub fn digits(&self) -> &str {
        &self.0
    }

    fn is_nanp(&self) -> bool {
        self.0 == "1"
    }
}

impl Default for CallingCode {
    fn default() -> Self {
        Self("1".to_owned())
    }
}

/// Total digit count bounds (country code included). E.164 allows at most
/// 15; anything shorter than 8 is not a dialable international number.
const MIN_DIGITS: usize = 8;
const MAX_DIGITS: usize = 15;

/// Returns the E.164 digits (without `+`) for `value`.
pub fn parse_phone(value: &str, region: &CallingCode) -> Option<String> {
    let value = value.trim();
    let (international, body) = if let Some(rest) = value.strip_prefix('+') {
        (true, rest)
    } else if let Some(rest) = value.strip_prefix("00") {
        (true, rest)
    } else {
        (false, value)
    };
    if !body
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, ' ' | '-' | '.' | '(' | ')'))
    {
        return None;
    }
    if body.matches('(').count() > 1 || body.matches('(').count() != body.matches(')').count() {
        return None;
    }
    let digits: String = body.chars().filter(char::is_ascii_digit).collect();

    let full = if international {
        digits
    } else if region.is_nanp() {
        // NANP numbers are ten digits; a leading 1 is the country code.
        match digits.len() {
            10 => format!("1{digits}"),
            11 if digits.starts_with('1') => digits,
            _ => return None,
        }
    } else {
        let national = digits.strip_prefix('0').unwrap_or(&digits);
        if national.len() < 6 {
            return None;
        }
        format!("{}{national}", region.digits())
    };

    let ok = (MIN_DIGITS..=MAX_DIGITS).contains(&full.len()) && !full.starts_with('0');
    ok.then_some(full)
}

pub fn standardize_phone(value: &str, region: &CallingCode) -> Option<String> {
    parse_phone(value, region).map(|d| format!("+{d}"))
}
