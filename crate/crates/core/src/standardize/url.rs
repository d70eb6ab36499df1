//! URLs rendered as one-line JSON objects with keys `scheme`, `host`,
//! `url_clean`, `queries`, in that order.

use indexmap::IndexMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlComponents {
    pub scheme: String,
    /// Lowercased host, including `:port` when present.
    pub host: String,
    pub path: String,
    pub queries: IndexMap<String, String>,
}

impl UrlComponents {
    pub fn url_clean(&self) -> String {
        format!("{}://{}{}", self.scheme, self.host, self.path)
    }

    pub fn to_json(&self) -> String {
        let s = |v: &str| serde_json::to_string(v).expect("strings always serialize");
        let queries = self
            .queries
            .iter()
            .map(|(k, v)| format!("{}:{}", s(k), s(v)))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{{\"scheme\":{},\"host\":{},\"url_clean\":{},\"queries\":{{{}}}}}",
            s(&self.scheme),
            s(&self.host),
            s(&self.url_clean()),
            queries
        )
    }
}

fn valid_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn valid_host(host: &str) -> bool {
    if host.is_empty() {
        return false;
    }
    let (name, port) = match host.strip_prefix('[') {
        Some(rest) => {
            let Some((v6, after)) = rest.split_once(']') else {
                return false;
            };
            if v6.parse::<std::net::Ipv6Addr>().is_err() {
                return false;
            }
            match after {
                "" => return true,
                p => ("v6", p.strip_prefix(':').unwrap_or("x")),
            }
        }
        None => match host.rsplit_once(':') {
            Some((n, p)) => (n, p),
            None => (host, ""),
        },
    };
    let port_ok = port.is_empty() || (port.len() <= 5 && port.bytes().all(|b| b.is_ascii_digit()));
    let name_ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '-' | '.' | '_'));
    port_ok && name_ok
}

/// Parses `scheme://host[:port]/path?query#fragment`. The fragment and any
/// userinfo are dropped.
pub fn parse_url_text(value: &str) -> Option<UrlComponents> {
    let value = value.trim();
    if value.chars().any(char::is_whitespace) {
        return None;
    }
    let (scheme, rest) = value.split_once("://")?;
    if !valid_scheme(scheme) {
        return None;
    }
    let rest = rest.split_once('#').map_or(rest, |(r, _)| r);
    let (before_query, query) = match rest.split_once('?') {
        Some((b, q)) => (b, Some(q)),
        None => (rest, None),
    };
    let (authority, path) = match before_query.find('/') {
        Some(i) => before_query.split_at(i),
        None => (before_query, ""),
    };
    let host = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    if !valid_host(host) {
        return None;
    }
    let mut queries = IndexMap::new();
    for pair in query.unwrap_or("").split('&').filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').unwrap_or((pair, ""));
        // last occurrence wins; position of first occurrence is kept
        queries.insert(k.to_owned(), v.to_owned());
    }
    Some(UrlComponents {
        scheme: scheme.to_ascii_lowercase(),
        host: host.to_lowercase(),
        path: path.to_owned(),
        queries,
    })
}

/// Accepts the canonical JSON payload as input so cleaning is idempotent.
fn parse_url_json(value: &str) -> Option<UrlComponents> {
    let obj: serde_json::Map<String, serde_json::Value> = serde_json::from_str(value).ok()?;
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    if keys != ["scheme", "host", "url_clean", "queries"] {
        return None;
    }
    let base = parse_url_text(obj["url_clean"].as_str()?)?;
    if base.scheme != obj["scheme"].as_str()? || base.host != obj["host"].as_str()? {
        return None;
    }
    if !base.queries.is_empty() {
        return None;
    }
    let mut queries = IndexMap::new();
    for (k, v) in obj["queries"].as_object()? {
        queries.insert(k.clone(), v.as_str()?.to_owned());
    }
    Some(UrlComponents { queries, ..base })
}

pub fn parse_url(value: &str) -> Option<UrlComponents> {
    let trimmed = value.trim();
    if trimmed.starts_with('{') {
        parse_url_json(trimmed)
    } else {
        parse_url_text(trimmed)
    }
}

pub fn standardize_url(value: &str) -> Option<String> {
    parse_url(value).map(|u| u.to_json())
}
