//! Datetime standardization.
//!
//! Input is split into number and word tokens, each token is checked
//! (month names, weekday names, ranges, meridiem), and the surviving
//! components are rendered through a [`DateFormat`].

use super::{DateOrder, StandardizeError, StandardizeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateComponents {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
    pub second: u32,
}

impl DateComponents {
    pub fn new(year: i32, month: u32, day: u32, hour: u32, minute: u32, second: u32) -> Option<Self> {
        let c = Self { year, month, day, hour, minute, second };
        c.is_valid().then_some(c)
    }

    pub fn is_valid(&self) -> bool {
        (1..=9999).contains(&self.year)
            && (1..=12).contains(&self.month)
            && self.day >= 1
            && self.day <= days_in_month(self.year, self.month)
            && self.hour < 24
            && self.minute < 60
            && self.second < 60
    }
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FormatToken {
    Year,
    Month,
    Day,
    Hour,
    Minute,
    Second,
    Literal(char),
}

/// A compiled date target format such as `YYYY-MM-DD hh:mm:ss`.
///
/// Tokens are case-insensitive. `MM` before the first `HH` is the month,
/// after it the minute. Any other character is copied literally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateFormat {
    tokens: Vec<FormatToken>,
}

pub const DEFAULT_DATE_FORMAT: &str = "YYYY-MM-DD hh:mm:ss";

impl Default for DateFormat {
    fn default() -> Self {
        Self::parse(DEFAULT_DATE_FORMAT).expect("default format is valid")
    }
}

impl DateFormat {
    pub fn parse(pattern: &str) -> Result<Self, StandardizeError> {
        let bad = |why: &str| StandardizeError::BadTargetFormat {
            format: pattern.to_owned(),
            reason: why.to_owned(),
        };
        let chars: Vec<char> = pattern.chars().collect();
        let mut tokens = Vec::new();
        let mut seen_hour = false;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let upper = c.to_ascii_uppercase();
            if matches!(upper, 'Y' | 'M' | 'D' | 'H' | 'S') {
                let run = chars[i..]
                    .iter()
                    .take_while(|x| x.to_ascii_uppercase() == upper)
                    .count();
                let token = match (upper, run) {
                    ('Y', 4) => FormatToken::Year,
                    ('M', 2) if seen_hour => FormatToken::Minute,
                    ('M', 2) => FormatToken::Month,
                    ('D', 2) => FormatToken::Day,
                    ('H', 2) => {
                        seen_hour = true;
                        FormatToken::Hour
                    }
                    ('S', 2) => FormatToken::Second,
                    _ => return Err(bad(&format!("unsupported token {:?}", chars[i..i + run].iter().collect::<String>()))),
                };
                if tokens.contains(&token) {
                    return Err(bad("repeated token"));
                }
                tokens.push(token);
                i += run;
            } else {
                tokens.push(FormatToken::Literal(c));
                i += 1;
            }
        }
        for (required, name) in [
            (FormatToken::Year, "YYYY"),
            (FormatToken::Month, "MM (month)"),
            (FormatToken::Day, "DD"),
        ] {
            if !tokens.contains(&required) {
                return Err(bad(&format!("missing {name}")));
            }
        }
        Ok(Self { tokens })
    }

    pub fn render(&self, c: &DateComponents) -> String {
        let mut out = String::with_capacity(self.tokens.len() + 4);
        for t in &self.tokens {
            match t {
                FormatToken::Year => out.push_str(&format!("{:04}", c.year)),
                FormatToken::Month => out.push_str(&format!("{:02}", c.month)),
                FormatToken::Day => out.push_str(&format!("{:02}", c.day)),
                FormatToken::Hour => out.push_str(&format!("{:02}", c.hour)),
                FormatToken::Minute => out.push_str(&format!("{:02}", c.minute)),
                FormatToken::Second => out.push_str(&format!("{:02}", c.second)),
                FormatToken::Literal(ch) => out.push(*ch),
            }
        }
        out
    }

    /// Parses `value` when it is exactly an instance of this format.
    pub fn match_exact(&self, value: &str) -> Option<DateComponents> {
        let bytes = value.as_bytes();
        let mut pos = 0;
        let mut c = DateComponents { year: 0, month: 0, day: 0, hour: 0, minute: 0, second: 0 };
        let digits = |pos: &mut usize, n: usize| -> Option<u32> {
            let s = value.get(*pos..*pos + n)?;
            if !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            *pos += n;
            s.parse().ok()
        };
        for t in &self.tokens {
            match t {
                FormatToken::Year => c.year = digits(&mut pos, 4)? as i32,
                FormatToken::Month => c.month = digits(&mut pos, 2)?,
                FormatToken::Day => c.day = digits(&mut pos, 2)?,
                FormatToken::Hour => c.hour = digits(&mut pos, 2)?,
                FormatToken::Minute => c.minute = digits(&mut pos, 2)?,
                FormatToken::Second => c.second = digits(&mut pos, 2)?,
                FormatToken::Literal(ch) => {
                    let mut buf = [0u8; 4];
                    let lit = ch.encode_utf8(&mut buf).as_bytes();
                    if !bytes[pos..].starts_with(lit) {
                        return None;
                    }
                    pos += lit.len();
                }
            }
        }
        (pos == bytes.len() && c.is_valid()).then_some(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Num(&'a str),
    Word(&'a str),
}

#[derive(Debug, Clone, Copy)]
struct Item<'a> {
    tok: Tok<'a>,
    /// Separator characters between the previous token and this one.
    sep: &'a str,
}

fn is_separator(c: char) -> bool {
    matches!(c, ' ' | '\t' | ',' | '.' | '/' | '-' | ':' | '+')
}

fn lex(value: &str) -> Option<Vec<Item<'_>>> {
    let mut items = Vec::new();
    let mut sep_start = 0;
    let mut chars = value.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if is_separator(c) {
            chars.next();
            continue;
        }
        let digit = c.is_ascii_digit();
        if !digit && !c.is_ascii_alphabetic() {
            return None;
        }
        let mut end = start;
        while let Some(&(i, d)) = chars.peek() {
            if (digit && d.is_ascii_digit()) || (!digit && d.is_ascii_alphabetic()) {
                end = i + d.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let text = &value[start..end];
        items.push(Item {
            tok: if digit { Tok::Num(text) } else { Tok::Word(text) },
            sep: &value[sep_start..start],
        });
        sep_start = end;
    }
    // Trailing separators other than dots and spaces are noise we do not accept.
    if !value[sep_start..].chars().all(|c| matches!(c, '.' | ' ' | '\t')) {
        return None;
    }
    Some(items)
}

fn month_from_word(word: &str) -> Option<u32> {
    const MONTHS: [(&str, &str); 12] = [
        ("jan", "january"),
        ("feb", "february"),
        ("mar", "march"),
        ("apr", "april"),
        ("may", "may"),
        ("jun", "june"),
        ("jul", "july"),
        ("aug", "august"),
        ("sep", "september"),
        ("oct", "october"),
        ("nov", "november"),
        ("dec", "december"),
    ];
    let w = word.to_ascii_lowercase();
    if w == "sept" {
        return Some(9);
    }
    MONTHS
        .iter()
        .position(|(short, long)| w == *short || w == *long)
        .map(|i| i as u32 + 1)
}

fn is_weekday(word: &str) -> bool {
    const DAYS: [&str; 19] = [
        "mon", "monday", "tue", "tues", "tuesday", "wed", "weds", "wednesday", "thu", "thur",
        "thurs", "thursday", "fri", "friday", "sat", "saturday", "sun", "sunday", "tu",
    ];
    DAYS.contains(&word.to_ascii_lowercase().as_str())
}

fn is_filler(word: &str) -> bool {
    matches!(word.to_ascii_lowercase().as_str(), "ad" | "at" | "on" | "of" | "t")
}

fn is_timezone(word: &str) -> bool {
    matches!(
        word.to_ascii_lowercase().as_str(),
        "z" | "utc" | "gmt" | "est" | "edt" | "cst" | "cdt" | "mst" | "mdt" | "pst" | "pdt"
    )
}

fn is_known_word(word: &str) -> bool {
    month_from_word(word).is_some() || is_weekday(word) || is_filler(word) || is_timezone(word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Meridiem {
    Am,
    Pm,
}

/// Splits a meridiem marker off the front of `word`, returning the marker and
/// whatever follows it (e.g. `pDec` → `p` + `Dec`).
fn split_meridiem(word: &str) -> Option<(Meridiem, &str)> {
    let lower = word.to_ascii_lowercase();
    let kind = match lower.as_bytes().first()? {
        b'a' => Meridiem::Am,
        b'p' => Meridiem::Pm,
        _ => return None,
    };
    for len in [2usize, 1] {
        if word.len() < len || (len == 2 && &lower[1..2] != "m") {
            continue;
        }
        let rest = &word[len..];
        if rest.is_empty() || is_known_word(rest) {
            return Some((kind, rest));
        }
    }
    None
}

struct TimeOfDay {
    hour: u32,
    minute: u32,
    second: u32,
}

fn fold_meridiem(hour: u32, meridiem: Option<Meridiem>) -> Option<u32> {
    match meridiem {
        None => (hour < 24).then_some(hour),
        Some(_) if !(1..=12).contains(&hour) => None,
        Some(Meridiem::Am) => Some(hour % 12),
        Some(Meridiem::Pm) => Some(hour % 12 + 12),
    }
}

/// Removes the time-of-day tokens from `items`, returning the parsed time.
/// Returns `Err(())` when the tokens contain an invalid time.
fn extract_time<'a>(items: &mut Vec<Item<'a>>) -> Result<Option<TimeOfDay>, ()> {
    let num = |items: &[Item<'a>], i: usize| match items.get(i) {
        Some(Item { tok: Tok::Num(n), sep }) => Some((*n, *sep)),
        _ => None,
    };

    let mut start = None;
    for i in 0..items.len() {
        if let (Some((h, _)), Some((m, ":"))) = (num(items, i), num(items, i + 1)) {
            if (1..=2).contains(&h.len()) && m.len() == 2 {
                start = Some(i);
                break;
            }
        }
    }

    let (start, mut end, hour, minute, second) = match start {
        Some(i) => {
            let hour: u32 = num(items, i).unwrap().0.parse().map_err(|_| ())?;
            let minute: u32 = num(items, i + 1).unwrap().0.parse().map_err(|_| ())?;
            let mut end = i + 2;
            let mut second = 0;
            if let Some((s, ":")) = num(items, end) {
                if s.len() != 2 {
                    return Err(());
                }
                second = s.parse().map_err(|_| ())?;
                end += 1;
                // fractional seconds are dropped
                if let Some((_, ".")) = num(items, end) {
                    end += 1;
                }
            }
            (i, end, hour, minute, second)
        }
        None => {
            // bare hour with a meridiem, e.g. "3 PM"
            let found = (0..items.len()).find(|&i| {
                matches!(num(items, i), Some((h, _)) if h.len() <= 2)
                    && matches!(items.get(i + 1), Some(Item { tok: Tok::Word(w), .. })
                        if split_meridiem(w).is_some_and(|(_, rest)| rest.is_empty()))
            });
            match found {
                Some(i) => (i, i + 1, num(items, i).unwrap().0.parse().map_err(|_| ())?, 0, 0),
                None => return Ok(None),
            }
        }
    };

    let mut meridiem = None;
    let mut remainder: Option<Item<'a>> = None;
    if let Some(Item { tok: Tok::Word(w), sep }) = items.get(end).copied() {
        if sep.chars().all(char::is_whitespace) {
            if let Some((kind, rest)) = split_meridiem(w) {
                meridiem = Some(kind);
                end += 1;
                if !rest.is_empty() {
                    remainder = Some(Item { tok: Tok::Word(rest), sep: "" });
                } else if let Some(Item { tok: Tok::Word(m), sep: "." }) = items.get(end) {
                    // "a.m." / "p.m."
                    if w.len() == 1 && m.eq_ignore_ascii_case("m") {
                        end += 1;
                    }
                }
            }
        }
    }
    // numeric offset directly after the time: "+05:00", "-0800"
    if remainder.is_none() {
        let mut probe = end;
        if let Some(Item { tok: Tok::Word(w), sep: "" }) = items.get(probe) {
            if is_timezone(w) {
                probe += 1;
            }
        }
        if let Some((off, sep)) = num(items, probe) {
            if sep == "+" || sep == "-" {
                match off.len() {
                    4 => end = probe + 1,
                    2 if matches!(num(items, probe + 1), Some((mm, ":")) if mm.len() == 2) => {
                        end = probe + 2
                    }
                    _ => {}
                }
            }
        }
    }

    let hour = fold_meridiem(hour, meridiem).ok_or(())?;
    if minute >= 60 || second >= 60 {
        return Err(());
    }
    match remainder {
        Some(r) => {
            items.splice(start..end, [r]);
        }
        None => {
            items.drain(start..end);
        }
    }
    Ok(Some(TimeOfDay { hour, minute, second }))
}

fn expand_year(text: &str) -> Option<i32> {
    let y: i32 = text.parse().ok()?;
    match text.len() {
        4 => Some(y),
        2 if y <= 68 => Some(2000 + y),
        2 => Some(1900 + y),
        _ => None,
    }
}

fn small(text: &str) -> Option<u32> {
    if text.len() <= 2 {
        text.parse().ok()
    } else {
        None
    }
}

/// Split and validate: returns the calendar components of `value`, or `None`
/// when the value is not a recognizable, calendar-valid datetime.
pub fn parse_date(value: &str, options: &StandardizeOptions) -> Option<DateComponents> {
    let value = value.trim();
    if value.is_empty() {
        return None;
    }
    let mut items = lex(value)?;
    let time = extract_time(&mut items).ok()?;

    let mut month_word = None;
    let mut numbers: Vec<&str> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        if item.sep.contains('+') {
            return None;
        }
        match item.tok {
            Tok::Num(n) => numbers.push(n),
            Tok::Word(w) => {
                let lower = w.to_ascii_lowercase();
                if let Some(m) = month_from_word(w) {
                    if month_word.replace(m).is_some() {
                        return None;
                    }
                } else if lower == "bc" {
                    return None;
                } else if matches!(lower.as_str(), "st" | "nd" | "rd" | "th")
                    && item.sep.is_empty()
                    && i > 0
                    && matches!(items[i - 1].tok, Tok::Num(_))
                {
                    // ordinal suffix
                } else if !(is_weekday(w) || is_filler(w) || is_timezone(w)) {
                    return None;
                }
            }
        }
    }

    let (year, month, day) = match (month_word, numbers.as_slice()) {
        (Some(m), [a, b]) => {
            // "Dec 25 2011" and "2011 Dec 25"; a two-digit pair reads day first
            if a.len() == 4 {
                (expand_year(a)?, m, small(b)?)
            } else {
                (expand_year(b)?, m, small(a)?)
            }
        }
        (Some(m), [d]) => (options.reference_year?, m, small(d)?),
        (None, [ymd]) if ymd.len() == 8 => (
            ymd[0..4].parse().ok()?,
            ymd[4..6].parse().ok()?,
            ymd[6..8].parse().ok()?,
        ),
        (None, [a, b, c]) => {
            if a.len() == 4 {
                (expand_year(a)?, small(b)?, small(c)?)
            } else {
                let year = expand_year(c)?;
                let (x, y) = (small(a)?, small(b)?);
                let (month, day) = order_month_day(x, y, options.date_order);
                (year, month, day)
            }
        }
        (None, [a, b]) => {
            let year = options.reference_year?;
            let (month, day) = order_month_day(small(a)?, small(b)?, options.date_order);
            (year, month, day)
        }
        _ => return None,
    };

    let time = time.unwrap_or(TimeOfDay { hour: 0, minute: 0, second: 0 });
    DateComponents::new(year, month, day, time.hour, time.minute, time.second)
}

/// Orders two numeric date fields as (month, day). When the configured order
/// puts an impossible month first but the swap is possible, the swap wins.
fn order_month_day(first: u32, second: u32, order: DateOrder) -> (u32, u32) {
    let (m, d) = match order {
        DateOrder::MonthFirst => (first, second),
        DateOrder::DayFirst => (second, first),
    };
    if m > 12 && d <= 12 {
        (d, m)
    } else {
        (m, d)
    }
}

/// Full clean: exact instances of `format` are accepted as-is, everything
/// else goes through the general parser.
pub fn standardize_date(value: &str, format: &DateFormat, options: &StandardizeOptions) -> Option<String> {
    let trimmed = value.trim();
    format
        .match_exact(trimmed)
        .or_else(|| parse_date(trimmed, options))
        .map(|c| format.render(&c))
}
