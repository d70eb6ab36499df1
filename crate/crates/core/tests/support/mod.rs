//! Seeded generators of messy but valid inputs, one family per column type.
//!
//! Each generator returns the raw text and, where it is cheap to know, the
//! exact standardized value expected back.

#![allow(dead_code)]

use colstd_core::ColumnType;
use rand::seq::IndexedRandom;
use rand::Rng;

pub struct Sample {
    pub raw: String,
    pub expected: Option<String>,
}

fn sample(raw: String, expected: impl Into<Option<String>>) -> Sample {
    Sample { raw, expected: expected.into() }
}

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
    "December",
];
const WEEKDAYS: [&str; 7] = ["Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"];

fn days_in(y: i32, m: u32) -> u32 {
    match m {
        2 if (y % 4 == 0 && y % 100 != 0) || y % 400 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

/// 0 is Sunday.
fn weekday(y: i32, m: u32, d: u32) -> usize {
    const T: [i32; 12] = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4];
    let y = if m < 3 { y - 1 } else { y };
    ((y + y / 4 - y / 100 + y / 400 + T[m as usize - 1] + d as i32).rem_euclid(7)) as usize
}

fn abbr(s: &str) -> &str {
    &s[..3]
}

fn meridiem(h: u32) -> (u32, &'static str) {
    let ap = if h < 12 { "AM" } else { "PM" };
    let h12 = match h % 12 {
        0 => 12,
        x => x,
    };
    (h12, ap)
}

pub fn date(rng: &mut impl Rng) -> Sample {
    let y = rng.random_range(1970..=2035);
    let mo = rng.random_range(1..=12u32);
    let d = rng.random_range(1..=days_in(y, mo));
    let (h, mi, s) = (rng.random_range(0..24u32), rng.random_range(0..60u32), rng.random_range(0..60u32));
    let month = MONTHS[mo as usize - 1];
    let wd = WEEKDAYS[weekday(y, mo, d)];
    let (h12, ap) = meridiem(h);
    let (raw, (h, mi, s)) = match rng.random_range(0..10) {
        0 => (format!("{y}-{mo:02}-{d:02} {h:02}:{mi:02}:{s:02}"), (h, mi, s)),
        1 => (format!("{} {} {d:02} {h:02}:{mi:02}:{s:02} {y}", abbr(wd), abbr(month)), (h, mi, s)),
        2 => (format!("{mo:02}/{d:02}/{y} {h:02}:{mi:02}:{s:02}"), (h, mi, s)),
        3 => (format!("{d:02}-{}-{y} {h:02}:{mi:02}", abbr(month)), (h, mi, 0)),
        4 => (format!("{month} {d}, {y}"), (0, 0, 0)),
        5 => (format!("{y}.{mo:02}.{d:02} AD at {h:02}:{mi:02}:{s:02}"), (h, mi, s)),
        6 => (format!("{h12:02}:{mi:02} {ap} {} {d:02}-{}-{y}", abbr(wd), abbr(month)), (h, mi, 0)),
        7 => (format!("{y}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}Z"), (h, mi, s)),
        8 => (format!("{y}{mo:02}{d:02}"), (0, 0, 0)),
        _ => (format!("{y}-{mo:02}-{d:02} {h12}:{mi:02}:{s:02} {ap}"), (h, mi, s)),
    };
    sample(raw, format!("{y}-{mo:02}-{d:02} {h:02}:{mi:02}:{s:02}"))
}

const STREETS: [&str; 8] =
    ["Main St", "Oak Avenue", "Pine Rd", "Elm Street", "Lake Shore Dr", "Sunset Blvd", "Maple Lane", "Harbor Way"];
const CITIES: [&str; 8] =
    ["Springfield", "Baton Rouge", "Austin", "New York", "San Diego", "Portland", "Omaha", "Salt Lake City"];
const STATES: [&str; 10] = ["IL", "LA", "TX", "NY", "CA", "OR", "NE", "UT", "WA", "MA"];

pub fn address(rng: &mut impl Rng) -> Sample {
    let house = rng.random_range(1..=9999);
    let street = STREETS.choose(rng).unwrap();
    let city = CITIES.choose(rng).unwrap();
    let state = STATES.choose(rng).unwrap();
    let zip = format!("{:05}", rng.random_range(0..100_000));
    let apt = rng
        .random_bool(0.4)
        .then(|| format!("{}{}", rng.random_range(1..100), ["", "A", "B", "C"].choose(rng).unwrap()));
    let country = rng.random_bool(0.3).then_some("USA");
    let mut raw = format!("{house} {street}");
    if let Some(a) = &apt {
        raw.push_str(if rng.random_bool(0.5) { " Apt " } else { ", Apt " });
        raw.push_str(a);
    }
    raw.push_str(&format!(", {city}, {state} {zip}"));
    if let Some(c) = country {
        raw.push_str(&format!(", {c}"));
    }
    let mut parts: Vec<String> = Vec::new();
    if let Some(a) = apt {
        parts.push(format!("Apt {a}"));
    }
    parts.extend([house.to_string(), street.to_string(), city.to_string(), state.to_string()]);
    if let Some(c) = country {
        parts.push(c.to_owned());
    }
    parts.push(zip);
    sample(raw, parts.join(", "))
}

fn digits(rng: &mut impl Rng, len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(len);
    (0..n).map(|_| char::from(b'0' + rng.random_range(0..10u8))).collect()
}

pub fn phone(rng: &mut impl Rng) -> Sample {
    if rng.random_bool(0.7) {
        let area = format!("{}{}", rng.random_range(2..10), digits(rng, 2..=2));
        let exch = format!("{}{}", rng.random_range(2..10), digits(rng, 2..=2));
        let line = digits(rng, 4..=4);
        let raw = match rng.random_range(0..6) {
            0 => format!("({area}) {exch}-{line}"),
            1 => format!("{area}.{exch}.{line}"),
            2 => format!("{area}-{exch}-{line}"),
            3 => format!("1-{area}-{exch}-{line}"),
            4 => format!("+1 {area} {exch} {line}"),
            _ => format!("{area} {exch} {line}"),
        };
        sample(raw, format!("+1{area}{exch}{line}"))
    } else {
        let cc = ["44", "49", "33", "81", "61", "91"].choose(rng).unwrap();
        let rest = format!("{}{}", rng.random_range(1..10), digits(rng, 7..=9));
        let (a, b) = rest.split_at(rest.len() / 2);
        let raw = if rng.random_bool(0.5) { format!("+{cc} {a} {b}") } else { format!("00 {cc} {a} {b}") };
        sample(raw, format!("+{cc}{rest}"))
    }
}

fn coordinate(rng: &mut impl Rng, limit: u32) -> (bool, String) {
    let int = rng.random_range(0..limit);
    let frac = digits(rng, 1..=4);
    (rng.random_bool(0.5), format!("{int}.{frac}"))
}

pub fn location(rng: &mut impl Rng) -> Sample {
    let (lat_neg, lat) = coordinate(rng, 90);
    let (lon_neg, lon) = coordinate(rng, 180);
    let signed = |neg: bool, t: &str| format!("{}{t}", if neg { "-" } else { "" });
    let (slat, slon) = (signed(lat_neg, &lat), signed(lon_neg, &lon));
    let ns = if lat_neg { "S" } else { "N" };
    let ew = if lon_neg { "W" } else { "E" };
    let raw = match rng.random_range(0..5) {
        0 => format!("({slat}, {slon})"),
        1 => format!("{slat}, {slon}"),
        2 => format!("[{slat},{slon}]"),
        3 => format!("{lat}° {ns}, {lon}° {ew}"),
        _ => format!("{lat} {ns} {lon} {ew}"),
    };
    sample(raw, format!("({slat},{slon})"))
}

pub fn ip(rng: &mut impl Rng) -> Sample {
    if rng.random_bool(0.6) {
        let octets: [u8; 4] = rng.random();
        let shown: Vec<String> = octets
            .iter()
            .map(|o| if rng.random_bool(0.1) { format!("{o:03}") } else { o.to_string() })
            .collect();
        let mut raw = shown.join(".");
        if rng.random_bool(0.3) {
            raw.push_str(&format!("/{}", rng.random_range(0..=32)));
        }
        sample(raw, std::net::Ipv4Addr::from(octets).to_string())
    } else {
        let groups: [u16; 8] = std::array::from_fn(|_| if rng.random_bool(0.3) { 0 } else { rng.random() });
        let addr = std::net::Ipv6Addr::from(groups);
        let mut raw = if rng.random_bool(0.5) {
            groups.iter().map(|g| format!("{g:04X}")).collect::<Vec<_>>().join(":")
        } else {
            addr.to_string()
        };
        if rng.random_bool(0.3) {
            raw.push_str("/64");
        }
        sample(raw, addr.to_string())
    }
}

fn word(rng: &mut impl Rng, len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(len);
    (0..n).map(|_| char::from(b'a' + rng.random_range(0..26u8))).collect()
}

fn shout(rng: &mut impl Rng, s: &str) -> String {
    s.chars().map(|c| if rng.random_bool(0.3) { c.to_ascii_uppercase() } else { c }).collect()
}

pub fn url(rng: &mut impl Rng) -> Sample {
    let scheme = ["http", "https", "ftp"].choose(rng).unwrap();
    let labels: Vec<String> = (0..rng.random_range(1..=3)).map(|_| word(rng, 2..=8)).collect();
    let host = format!("{}.{}", labels.join("."), ["com", "org", "net", "io"].choose(rng).unwrap());
    let path: String = (0..rng.random_range(0..=3)).map(|_| format!("/{}", word(rng, 1..=6))).collect();
    let pairs: Vec<(String, String)> =
        (0..rng.random_range(0..=3)).map(|i| (format!("k{i}"), word(rng, 1..=5))).collect();
    let mut raw = format!("{}://{}{path}", shout(rng, scheme), shout(rng, &host));
    if !pairs.is_empty() {
        let q: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        raw.push('?');
        raw.push_str(&q.join("&"));
    }
    let queries: serde_json::Map<String, serde_json::Value> =
        pairs.into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
    let expected = serde_json::json!({
        "scheme": scheme,
        "host": host,
        "url_clean": format!("{scheme}://{host}{path}"),
        "queries": queries,
    });
    sample(raw, expected.to_string())
}

pub fn duration(rng: &mut impl Rng) -> Sample {
    let total: u64 = rng.random_range(0..360_000);
    let (h, m, s) = (total / 3600, total / 60 % 60, total % 60);
    let expected = format!("{h:02}:{m:02}:{s:02}");
    let plural = |n: u64, unit: &str| format!("{n} {unit}{}", if n == 1 { "" } else { "s" });
    let raw = match rng.random_range(0..6) {
        0 => {
            let parts: Vec<String> = [(h, "h"), (m, "m"), (s, "s")]
                .iter()
                .filter(|(v, _)| *v > 0)
                .map(|(v, u)| format!("{v}{u}"))
                .collect();
            if parts.is_empty() { "0s".to_owned() } else { parts.join(" ") }
        }
        1 => format!("{} {} {}", plural(h, "hour"), plural(m, "minute"), plural(s, "second")),
        2 => format!("{h}:{m:02}:{s:02}"),
        3 => return sample(plural(total / 60, "minute"), format!("{h:02}:{m:02}:00")),
        4 => format!("{total} sec"),
        _ => format!("PT{h}H{m}M{s}S"),
    };
    sample(raw, expected)
}

pub fn temperature(rng: &mut impl Rng) -> Sample {
    let whole: i32 = rng.random_range(-60..=150);
    let value = match rng.random_range(0..3) {
        0 => whole.to_string(),
        1 => format!("{whole}.{}", rng.random_range(1..10)),
        _ => format!("{whole}.{}{}", rng.random_range(0..10), rng.random_range(1..10)),
    };
    match rng.random_range(0..9) {
        0 => sample(format!("{value}°C"), format!("{value}℃")),
        1 => sample(format!("{value} C"), format!("{value}℃")),
        2 => sample(format!("{value} celsius"), format!("{value}℃")),
        3 => sample(format!("{value}℃"), format!("{value}℃")),
        4 => sample(format!("{value}°F"), None),
        5 => sample(format!("{value} F"), None),
        6 => sample(format!("{value} fahrenheit"), None),
        7 => sample(format!("{} K", whole + 273), None),
        _ => sample(format!("{} kelvin", whole.abs() + 60), None),
    }
}

pub fn color(rng: &mut impl Rng) -> Sample {
    let [r, g, b]: [u8; 3] = rng.random();
    let hex = format!("#{r:02x}{g:02x}{b:02x}");
    match rng.random_range(0..4) {
        0 => sample(shout(rng, &hex), hex),
        1 => {
            let (r, g, b) = (r >> 4, g >> 4, b >> 4);
            sample(shout(rng, &format!("#{r:x}{g:x}{b:x}")), format!("#{r:x}{r:x}{g:x}{g:x}{b:x}{b:x}"))
        }
        2 => {
            let sep = [",", ", ", " , "].choose(rng).unwrap();
            sample(format!("rgb({r}{sep}{g}{sep}{b})"), hex)
        }
        _ => {
            let (name, hex) = [
                ("red", "#ff0000"),
                ("navy", "#000080"),
                ("Teal", "#008080"),
                ("black", "#000000"),
                ("White", "#ffffff"),
                ("gold", "#ffd700"),
                ("salmon", "#fa8072"),
                ("RebeccaPurple", "#663399"),
            ]
            .choose(rng)
            .copied()
            .unwrap();
            sample(name.to_owned(), hex.to_owned())
        }
    }
}

const FIRST: [&str; 8] = ["John", "Ada", "Grace", "Alan", "Barbara", "Edsger", "Radia", "Ken"];
const LAST: [&str; 8] = ["Smith", "Lovelace", "Hopper", "Turing", "Liskov", "Dijkstra", "Perlman", "van Rossum"];

pub fn name(rng: &mut impl Rng) -> Sample {
    let first = FIRST.choose(rng).unwrap();
    let last = LAST.choose(rng).unwrap();
    let raw = match rng.random_range(0..3) {
        0 => format!("{first} {last}"),
        1 => format!("  {first}   {last} "),
        _ => format!("{last}, {first}"),
    };
    sample(raw, format!("{first} {last}"))
}

pub fn valid(kind: ColumnType, rng: &mut impl Rng) -> Sample {
    match kind {
        ColumnType::Date => date(rng),
        ColumnType::Address => address(rng),
        ColumnType::PhoneNumber => phone(rng),
        ColumnType::Location => location(rng),
        ColumnType::Ip => ip(rng),
        ColumnType::Url => url(rng),
        ColumnType::Duration => duration(rng),
        ColumnType::Temperature => temperature(rng),
        ColumnType::Color => color(rng),
        ColumnType::Name => name(rng),
        ColumnType::Unknown => unreachable!("no valid unknown values"),
    }
}

/// Strings no type should accept: random punctuation and consonant runs.
pub fn gibberish(rng: &mut impl Rng) -> String {
    const ALPHABET: &[u8] = b"bcdfghjklmnpqrstvwxz!?*&%~^";
    let n = rng.random_range(3..12);
    (0..n).map(|_| char::from(*ALPHABET.choose(rng).unwrap())).collect()
}
