//! Durations rendered as `hh:mm:ss` (hours may exceed two digits).

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Unit {
    Second = 1,
    Minute = 60,
    Hour = 3600,
}

fn unit_from_word(word: &str) -> Option<Unit> {
    match word.to_ascii_lowercase().as_str() {
        "h" | "hr" | "hrs" | "hour" | "hours" => Some(Unit::Hour),
        "m" | "min" | "mins" | "minute" | "minutes" => Some(Unit::Minute),
        "s" | "sec" | "secs" | "second" | "seconds" => Some(Unit::Second),
        _ => None,
    }
}

/// Decimal quantity times unit, in whole seconds. Fractions must resolve to
/// an integral number of seconds.
fn quantity_seconds(number: &str, unit: Unit) -> Option<u64> {
    let (int, frac) = number.split_once('.').unwrap_or((number, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 6 {
        return None;
    }
    let scale = 10u64.pow(frac.len() as u32);
    let whole: u64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let part: u64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let scaled = whole.checked_mul(scale)?.checked_add(part)?;
    let total = scaled.checked_mul(unit as u64)?;
    (total % scale == 0).then(|| total / scale)
}

fn parse_clock(s: &str) -> Option<u64> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) || parts.iter().any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    let hours: u64 = parts[0].parse().ok()?;
    let mut total = hours.checked_mul(3600)?;
    for (p, mult) in parts[1..].iter().zip([60u64, 1]) {
        if p.len() != 2 {
            return None;
        }
        let v: u64 = p.parse().ok()?;
        if v >= 60 {
            return None;
        }
        total += v * mult;
    }
    Some(total)
}

/// `PT1H30M5S`
fn parse_iso(s: &str) -> Option<u64> {
    let body = s.strip_prefix("PT").or_else(|| s.strip_prefix("pt"))?;
    parse_units(body, false)
}

/// Number/unit pairs in strictly descending unit order.
fn parse_units(s: &str, allow_separators: bool) -> Option<u64> {
    let mut total: u64 = 0;
    let mut last: Option<Unit> = None;
    let mut rest = s;
    loop {
        if allow_separators {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if let Some(r) = rest.strip_prefix("and ") {
                rest = r.trim_start();
            }
        }
        if rest.is_empty() {
            break;
        }
        let num_len = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(rest.len());
        if num_len == 0 {
            return None;
        }
        let number = &rest[..num_len];
        rest = &rest[num_len..];
        if allow_separators {
            rest = rest.trim_start();
        }
        let word_len = rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(rest.len());
        let unit = unit_from_word(&rest[..word_len])?;
        rest = &rest[word_len..];
        if last.is_some_and(|l| unit >= l) {
            return None;
        }
        last = Some(unit);
        total = total.checked_add(quantity_seconds(number, unit)?)?;
    }
    last.map(|_| total)
}

pub fn parse_duration(value: &str) -> Option<u64> {
    let s = value.trim();
    if s.is_empty() || s.contains('-') {
        return None;
    }
    if s.contains(':') {
        return parse_clock(s);
    }
    parse_iso(s).or_else(|| parse_units(s, true))
}

pub fn format_duration(total_seconds: u64) -> String {
    let h = total_seconds / 3600;
    let m = (total_seconds % 3600) / 60;
    let s = total_seconds % 60;
    format!("{h:02}:{m:02}:{s:02}")
}

pub fn standardize_duration(value: &str) -> Option<String> {
    parse_duration(value).map(format_duration)
}
