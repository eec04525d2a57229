//! URL equality for counting mentions.
//!
//! The canonical form drops the scheme, lowercases the host, strips query,
//! fragment and trailing slashes, and keeps the path byte-for-byte.
//! Shortener links are not resolved.

use alloc::string::String;

use crate::error::{Error, Result};

pub fn canonicalize_url(raw: &str) -> Result<String> {
    let trimmed = raw.trim();
    let not_a_url = || Error::NotAUrl(raw.into());
    if trimmed.is_empty() || trimmed.chars().any(char::is_whitespace) {
        return Err(not_a_url());
    }

    let rest = strip_scheme(trimmed);
    let rest = rest.trim_start_matches('/');
    let rest = match rest.find(['?', '#']) {
        Some(i) => &rest[..i],
        None => rest,
    };
    let (authority, path) = match rest.find('/') {
        Some(i) => rest.split_at(i),
        None => (rest, ""),
    };
    // user:pass@host
    let host = match authority.rfind('@') {
        Some(i) => &authority[i + 1..],
        None => authority,
    };
    let host = host.to_ascii_lowercase();
    if !is_host(&host) {
        return Err(not_a_url());
    }

    let mut out = host;
    out.push_str(path.trim_end_matches('/'));
    Ok(out)
}

/// Removes a leading `scheme://`, if any.
fn strip_scheme(s: &str) -> &str {
    if let Some(i) = s.find("://") {
        let scheme = &s[..i];
        let mut chars = scheme.chars();
        let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if valid {
            return &s[i + 3..];
        }
    }
    s
}

fn is_host(host_port: &str) -> bool {
    let host = match host_port.rsplit_once(':') {
        Some((h, port)) if !port.is_empty() && port.bytes().all(|b| b.is_ascii_digit()) => h,
        Some(_) => return false,
        None => host_port,
    };
    let labels: alloc::vec::Vec<&str> = host.split('.').collect();
    if labels.len() < 2 {
        return false;
    }
    let label_ok = |l: &&str| {
        !l.is_empty()
            && !l.starts_with('-')
            && !l.ends_with('-')
            && l.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
    };
    if !labels.iter().all(label_ok) {
        return false;
    }
    let is_ipv4 = labels.len() == 4
        && labels
            .iter()
            .all(|l| l.len() <= 3 && l.bytes().all(|b| b.is_ascii_digit()) && l.parse::<u16>().is_ok_and(|v| v <= 255));
    let tld = labels[labels.len() - 1];
    is_ipv4 || (tld.len() >= 2 && tld.bytes().all(|b| b.is_ascii_alphabetic()))
}
