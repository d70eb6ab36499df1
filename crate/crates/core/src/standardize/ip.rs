//! IPv4/IPv6 addresses without subnet masks.

use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};

/// Dotted quad with optional leading zeros per octet.
fn parse_v4(s: &str) -> Option<Ipv4Addr> {
    let mut octets = [0u8; 4];
    let mut parts = s.split('.');
    for slot in &mut octets {
        let p = parts.next()?;
        if p.is_empty() || p.len() > 3 || !p.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        *slot = p.parse::<u16>().ok().filter(|v| *v <= 255)? as u8;
    }
    parts.next().is_none().then(|| Ipv4Addr::from(octets))
}

pub fn parse_ip(value: &str) -> Option<IpAddr> {
    let value = value.trim();
    let (addr, prefix) = match value.split_once('/') {
        Some((a, p)) => (a, Some(p)),
        None => (value, None),
    };
    let ip = if addr.contains(':') {
        IpAddr::V6(addr.parse::<Ipv6Addr>().ok()?)
    } else {
        IpAddr::V4(parse_v4(addr)?)
    };
    if let Some(p) = prefix {
        let max = if ip.is_ipv4() { 32 } else { 128 };
        let ok = !p.is_empty()
            && p.len() <= 3
            && p.bytes().all(|b| b.is_ascii_digit())
            && p.parse::<u32>().is_ok_and(|n| n <= max);
        if !ok {
            return None;
        }
    }
    Some(ip)
}

/// `Display` for std addresses is already the canonical form: no leading
/// zeros for IPv4, lowercase compressed RFC 5952 text for IPv6.
pub fn standardize_ip(value: &str) -> Option<String> {
    parse_ip(value).map(|ip| ip.to_string())
}
