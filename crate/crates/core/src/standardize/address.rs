//! US-shaped street addresses.
//!
//! Output order is fixed: `Apt {unit}, {house}, {street}, {city}, {state},
//! {country}, {zip}`. Absent parts are dropped together with their separator.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AddressComponents {
    pub apartment: Option<String>,
    pub house_number: Option<String>,
    pub street_name: Option<String>,
    pub city: Option<String>,
    pub state_abbreviation: Option<String>,
    pub country: Option<String>,
    pub zipcode: Option<String>,
}

impl AddressComponents {
    pub fn render(&self) -> String {
        let unit = self.apartment.as_ref().map(|a| format!("Apt {a}"));
        [
            unit.as_ref(),
            self.house_number.as_ref(),
            self.street_name.as_ref(),
            self.city.as_ref(),
            self.state_abbreviation.as_ref(),
            self.country.as_ref(),
            self.zipcode.as_ref(),
        ]
        .into_iter()
        .flatten()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(", ")
    }
}

const USPS_CODES: [&str; 59] = [
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "HI", "ID", "IL", "IN", "IA",
    "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
    "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT",
    "VA", "WA", "WV", "WI", "WY", "DC", "PR", "GU", "VI", "AS", "MP", "AA", "AE", "AP",
];

const STREET_SUFFIXES: [&str; 38] = [
    "st", "street", "ave", "av", "avenue", "rd", "road", "blvd", "boulevard", "dr", "drive",
    "ln", "lane", "way", "ct", "court", "pl", "place", "pkwy", "parkway", "hwy", "highway",
    "ter", "terrace", "cir", "circle", "sq", "square", "trl", "trail", "loop", "row", "plaza",
    "aly", "alley", "crescent", "cres", "walk",
];

pub fn is_state_code(token: &str) -> bool {
    USPS_CODES.contains(&token)
}

fn is_zip(token: &str) -> bool {
    let b = token.as_bytes();
    match b.len() {
        5 => b.iter().all(u8::is_ascii_digit),
        10 => {
            b[..5].iter().all(u8::is_ascii_digit)
                && b[5] == b'-'
                && b[6..].iter().all(u8::is_ascii_digit)
        }
        _ => false,
    }
}

fn is_house_number(token: &str) -> bool {
    let digits = token.bytes().take_while(u8::is_ascii_digit).count();
    digits > 0
        && digits <= 6
        && (digits == token.len()
            || (digits + 1 == token.len() && token.as_bytes()[digits].is_ascii_alphabetic()))
}

fn is_street_suffix(token: &str) -> bool {
    let t = token.trim_end_matches('.').to_ascii_lowercase();
    STREET_SUFFIXES.contains(&t.as_str())
}

fn is_unit_keyword(token: &str) -> bool {
    matches!(
        token.trim_end_matches('.').to_ascii_lowercase().as_str(),
        "apt" | "apartment"
    )
}

fn is_wordy(tokens: &[&str]) -> bool {
    !tokens.is_empty()
        && tokens.iter().all(|t| {
            t.chars().any(char::is_alphabetic)
                && t.chars().all(|c| c.is_alphabetic() || matches!(c, '.' | '-' | '\''))
        })
}

/// Splits a unit designator off a token list: `["Apt", "4B"]`, `["#4B"]`,
/// `["#", "4B"]`. Returns the unit and the number of tokens consumed.
fn take_unit(tokens: &[&str]) -> Option<(String, usize)> {
    let first = *tokens.first()?;
    if is_unit_keyword(first) {
        let unit = tokens.get(1)?.trim_start_matches('#');
        return (!unit.is_empty() && tokens.len() == 2).then(|| (unit.to_owned(), 2));
    }
    if let Some(rest) = first.strip_prefix('#') {
        if !rest.is_empty() {
            return (tokens.len() == 1).then(|| (rest.to_owned(), 1));
        }
        let unit = tokens.get(1)?;
        return (tokens.len() == 2).then(|| (unit.to_string(), 2));
    }
    None
}

fn join(tokens: &[&str]) -> String {
    tokens.join(" ")
}

/// Split and validate. `None` unless the value carries a state code, or a
/// ZIP code plus some other part, or a house number with a recognizable
/// street name.
pub fn parse_address(value: &str) -> Option<AddressComponents> {
    let value = value.trim();
    if value.is_empty()
        || !value
            .chars()
            .all(|c| c.is_alphanumeric() || c.is_whitespace() || matches!(c, ',' | '.' | '-' | '#' | '\'' | '/' | '&'))
    {
        return None;
    }
    let segments: Vec<Vec<&str>> = value
        .split(',')
        .map(|s| s.split_whitespace().collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    if segments.is_empty()
        || segments
            .iter()
            .any(|s| !s.iter().any(|t| t.chars().any(char::is_alphanumeric)))
    {
        return None;
    }

    let mut out = AddressComponents::default();

    // The first segment that ends in a state code (optionally followed by a
    // ZIP) and has no digits before it.
    let state_at = segments.iter().position(|seg| {
        let body = match seg.as_slice() {
            [body @ .., st, zip] if is_state_code(st) && is_zip(zip) => body,
            [body @ .., st] if is_state_code(st) => body,
            _ => return false,
        };
        body.is_empty() || is_wordy(body)
    });

    let mut pre: &[Vec<&str>] = &segments;
    if let Some(i) = state_at {
        pre = &segments[..i];
        let seg = &segments[i];
        let (body, state, zip) = match seg.as_slice() {
            [body @ .., st, zip] if is_state_code(st) && is_zip(zip) => (body, *st, Some(*zip)),
            [body @ .., st] => (body, *st, None),
            [] => unreachable!(),
        };
        out.state_abbreviation = Some(state.to_owned());
        out.zipcode = zip.map(str::to_owned);
        if !body.is_empty() {
            out.city = Some(join(body));
        }
        for seg in &segments[i + 1..] {
            match seg.as_slice() {
                [z] if is_zip(z) && out.zipcode.is_none() => out.zipcode = Some(z.to_string()),
                words if is_wordy(words) && out.country.is_none() => out.country = Some(join(words)),
                _ => return None,
            }
        }
    } else if let Some([z]) = segments.last().map(Vec::as_slice) {
        if is_zip(z) {
            out.zipcode = Some(z.to_string());
            pre = &segments[..segments.len() - 1];
        }
    }

    let mut cities = Vec::new();
    for seg in pre {
        if let Some((unit, used)) = take_unit(seg) {
            if out.apartment.is_some() || used != seg.len() {
                return None;
            }
            out.apartment = Some(unit);
            continue;
        }
        if out.street_name.is_none() && cities.is_empty() {
            if let [num] = seg.as_slice() {
                if is_house_number(num) && out.house_number.is_none() {
                    out.house_number = Some(num.to_string());
                    continue;
                }
            }
            let mut words = seg.as_slice();
            if out.house_number.is_none() && words.len() > 1 && is_house_number(words[0]) {
                out.house_number = Some(words[0].to_owned());
                words = &words[1..];
            }
            let unit_at = words
                .iter()
                .position(|t| is_unit_keyword(t) || t.starts_with('#'));
            if let Some(k) = unit_at {
                let (unit, used) = take_unit(&words[k..])?;
                if out.apartment.is_some() || k + used != words.len() {
                    return None;
                }
                out.apartment = Some(unit);
                words = &words[..k];
            }
            if words.is_empty() {
                return None;
            }
            out.street_name = Some(join(words));
            continue;
        }
        if !is_wordy(seg) {
            return None;
        }
        cities.push(join(seg));
    }
    match cities.len() {
        0 => {}
        1 if out.city.is_none() => out.city = cities.pop(),
        _ => return None,
    }

    let has_street = out.house_number.is_some()
        && out
            .street_name
            .as_deref()
            .is_some_and(|s| s.split(' ').any(is_street_suffix));
    let others = out.house_number.is_some()
        || out.street_name.is_some()
        || out.city.is_some()
        || out.apartment.is_some();
    let valid = out.state_abbreviation.is_some() || (out.zipcode.is_some() && others) || has_street;
    valid.then_some(out)
}

pub fn standardize_address(value: &str) -> Option<String> {
    parse_address(value).map(|a| a.render())
}
