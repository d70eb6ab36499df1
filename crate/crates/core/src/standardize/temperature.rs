//! Temperatures converted to Celsius and rendered as `{number}℃`.
//!
//! Arithmetic is exact: inputs are decimal fractions, conversions are
//! rational, and the result is rounded half away from zero to two decimals.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureUnit {
    Celsius,
    Fahrenheit,
    Kelvin,
}

/// An exact rational number `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: i128,
    den: i128,
}

const MAX_DIGITS: usize = 18;

fn parse_decimal(s: &str) -> Option<Ratio> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || int.len() + frac.len() > MAX_DIGITS
        || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let den = 10i128.pow(frac.len() as u32);
    let int_v: i128 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_v: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int_v * den + frac_v;
    Some(Ratio { num: if negative { -num } else { num }, den })
}

fn unit_from_suffix(suffix: &str) -> Option<TemperatureUnit> {
    let mut s = suffix.to_lowercase();
    for noise in ["degrees", "degree", "deg", "°", "º", " "] {
        s = s.replace(noise, "");
    }
    match s.as_str() {
        "" | "c" | "celsius" | "centigrade" | "℃" => Some(TemperatureUnit::Celsius),
        "f" | "fahrenheit" | "℉" => Some(TemperatureUnit::Fahrenheit),
        "k" | "kelvin" | "kelvins" => Some(TemperatureUnit::Kelvin),
        _ => None,
    }
}

fn to_celsius(value: Ratio, unit: TemperatureUnit) -> Option<Ratio> {
    let Ratio { num, den } = value;
    let c = match unit {
        TemperatureUnit::Celsius => value,
        TemperatureUnit::Fahrenheit => Ratio {
            num: (num - 32 * den) * 5,
            den: den * 9,
        },
        TemperatureUnit::Kelvin => {
            if num < 0 {
                return None;
            }
            Ratio {
                num: num * 100 - 27315 * den,
                den: den * 100,
            }
        }
    };
    // below absolute zero
    (c.num * 100 >= -27315 * c.den).then_some(c)
}

/// Hundredths of a degree, rounded half away from zero.
fn round_cents(c: Ratio) -> i128 {
    let scaled = c.num * 100;
    let magnitude = (2 * scaled.abs() + c.den) / (2 * c.den);
    if scaled < 0 {
        -magnitude
    } else {
        magnitude
    }
}

fn format_cents(cents: i128) -> String {
    let sign = if cents < 0 { "-" } else { "" };
    let abs = cents.abs();
    let (int, frac) = (abs / 100, abs % 100);
    match frac {
        0 => format!("{sign}{int}"),
        f if f % 10 == 0 => format!("{sign}{int}.{}", f / 10),
        f => format!("{sign}{int}.{f:02}"),
    }
}

/// Returns the Celsius value in hundredths of a degree.
pub fn parse_temperature(value: &str) -> Option<i128> {
    let s = value.trim();
    let end = s
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+'))))
        .map_or(s.len(), |(i, _)| i);
    let number = parse_decimal(&s[..end])?;
    let unit = unit_from_suffix(s[end..].trim())?;
    Some(round_cents(to_celsius(number, unit)?))
}

pub fn standardize_temperature(value: &str) -> Option<String> {
    parse_temperature(value).map(|cents| format!("{}\u{2103}", format_cents(cents)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(standardize_temperature("73.4 F").as_deref(), Some("23℃"));
        assert_eq!(standardize_temperature("23°C").as_deref(), Some("23℃"));
        assert_eq!(standardize_temperature("300K").as_deref(), Some("26.85℃"));
        assert_eq!(standardize_temperature("212 degrees Fahrenheit").as_deref(), Some("100℃"));
        assert_eq!(standardize_temperature("-40°F").as_deref(), Some("-40℃"));
        assert_eq!(standardize_temperature("21.5").as_deref(), Some("21.5℃"));
        assert_eq!(standardize_temperature("0 K").as_deref(), Some("-273.15℃"));
        assert_eq!(standardize_temperature("23℃").as_deref(), Some("23℃"));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(standardize_temperature("1.005").as_deref(), Some("1.01℃"));
        assert_eq!(standardize_temperature("-1.005").as_deref(), Some("-1.01℃"));
        assert_eq!(standardize_temperature("1.004").as_deref(), Some("1℃"));
        assert_eq!(standardize_temperature("-0.001").as_deref(), Some("0℃"));
        // 100 F = 37.777... C
        assert_eq!(standardize_temperature("100F").as_deref(), Some("37.78℃"));
    }

    #[test]
    fn rejects() {
        for v in ["hot", "", "12 parsecs", "-5 K", "-300 C", "1.2.3 C", "C"] {
            assert_eq!(standardize_temperature(v), None, "{v}");
        }
    }
}
