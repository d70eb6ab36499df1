//! Latitude/longitude pairs rendered as `(lat,lon)`.
//!
//! Decimal digits are carried through from the input verbatim; only sign,
//! hemisphere letters, degree symbols and spacing are normalized.

#[derive(Debug, Clone, PartialEq)]
pub struct Coordinate {
    /// Signed decimal text as it will be emitted, e.g. `-74.0060`.
    pub text: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Lat,
    Lon,
}

fn parse_part(part: &str) -> Option<(Coordinate, Option<Axis>)> {
    let mut s = part.trim();
    let mut hemisphere = None;
    let take_hemi = |c: char| match c.to_ascii_uppercase() {
        'N' => Some((Axis::Lat, false)),
        'S' => Some((Axis::Lat, true)),
        'E' => Some((Axis::Lon, false)),
        'W' => Some((Axis::Lon, true)),
        _ => None,
    };
    if let Some(c) = s.chars().last() {
        if let Some(h) = take_hemi(c) {
            hemisphere = Some(h);
            s = s[..s.len() - 1].trim_end();
        }
    }
    if hemisphere.is_none() {
        if let Some(c) = s.chars().next() {
            if let Some(h) = take_hemi(c) {
                hemisphere = Some(h);
                s = s[1..].trim_start();
            }
        }
    }
    s = s.trim_end_matches('°').trim_end();

    let (negative, digits) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let numeric = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !numeric(int) || frac.is_some_and(|f| !numeric(f)) {
        return None;
    }
    let (axis, flip) = match hemisphere {
        Some((axis, flip)) => {
            if negative && flip {
                return None;
            }
            (Some(axis), flip)
        }
        None => (None, false),
    };
    let negative = negative || flip;
    let text = format!("{}{}", if negative { "-" } else { "" }, digits);
    let value: f64 = text.parse().ok()?;
    Some((Coordinate { text, value }, axis))
}

/// `34.05 N 118.24 W`: no comma, so split right after the first hemisphere
/// letter that follows a number.
fn split_on_hemisphere(s: &str) -> Option<(&str, &str)> {
    let mut seen_digit = false;
    for (i, c) in s.char_indices() {
        if c.is_ascii_digit() {
            seen_digit = true;
        } else if seen_digit && matches!(c.to_ascii_uppercase(), 'N' | 'S' | 'E' | 'W') {
            let (a, b) = s.split_at(i + 1);
            return (!b.trim().is_empty()).then_some((a, b));
        }
    }
    None
}

pub fn parse_location(value: &str) -> Option<(Coordinate, Coordinate)> {
    let mut s = value.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        s = inner;
    } else if let Some(inner) = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        s = inner;
    }
    let (a, b) = match s.split_once(',') {
        Some(pair) => pair,
        None => split_on_hemisphere(s)?,
    };
    if b.contains(',') {
        return None;
    }
    let (first, first_axis) = parse_part(a)?;
    let (second, second_axis) = parse_part(b)?;
    if !s.contains(',') && (first_axis.is_none() || second_axis.is_none()) {
        return None;
    }
    let (lat, lon) = match (first_axis, second_axis) {
        (Some(Axis::Lon), Some(Axis::Lat)) | (Some(Axis::Lon), None) | (None, Some(Axis::Lat)) => {
            (second, first)
        }
        (Some(x), Some(y)) if x == y => return None,
        _ => (first, second),
    };
    (lat.value.abs() <= 90.0 && lon.value.abs() <= 180.0).then_some((lat, lon))
}

pub fn standardize_location(value: &str) -> Option<String> {
    parse_location(value).map(|(lat, lon)| format!("({},{})", lat.text, lon.text))
}
