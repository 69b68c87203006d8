//! Single-line parsers for the supported source formats.
//!
//! Parsing is total: a line that does not match its declared format falls
//! back to `plain` with the raw text as the message, and the caller counts
//! the fallback. Only lines whose message normalizes to empty are dropped.

use super::{LogLevel, RawLogLine, SourceFormat};

/// Parse one line (without its terminator) according to `format`.
///
/// Returns `None` when the message normalizes to empty; such lines are
/// dropped and counted by the caller. Unparseable lines degrade to
/// `SourceFormat::Plain` with `message == trim(raw)` and `raw` untouched.
pub fn parse_line(raw: &str, format: SourceFormat) -> Option<RawLogLine> {
    let parsed = match format {
        SourceFormat::Syslog => parse_syslog(raw),
        SourceFormat::Json => parse_json(raw),
        SourceFormat::ApacheCommon => parse_apache_common(raw),
        SourceFormat::Plain => None,
    };
    let line = parsed.unwrap_or_else(|| plain_fallback(raw));
    if line.message.is_empty() {
        None
    } else {
        Some(line)
    }
}

fn plain_fallback(raw: &str) -> RawLogLine {
    RawLogLine {
        source_format: SourceFormat::Plain,
        timestamp: None,
        level: None,
        component: None,
        message: raw.trim().to_string(),
        raw: raw.to_string(),
    }
}

/// Syslog-ish lines. Two shapes are recognized:
///
/// * RFC 3164: `Jun 14 15:16:01 host service[pid]: message`
/// * level-first: `INFO dfs.FSNamesystem : message`, optionally preceded by
///   purely numeric header tokens (LogHub exports date/time/pid that way)
fn parse_syslog(raw: &str) -> Option<RawLogLine> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return None;
    }
    parse_rfc3164(raw, trimmed).or_else(|| parse_level_first(raw, trimmed))
}

const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

fn parse_rfc3164(raw: &str, trimmed: &str) -> Option<RawLogLine> {
    let mut parts = trimmed.splitn(5, char::is_whitespace).filter(|p| !p.is_empty());
    let month = parts.next()?;
    if !MONTHS.contains(&month) {
        return None;
    }
    let day = parts.next()?;
    if day.is_empty() || day.len() > 2 || !day.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let time = parts.next()?;
    if !is_hh_mm_ss(time) {
        return None;
    }
    let _host = parts.next()?;
    let rest = trimmed
        .match_indices(time)
        .next()
        .map(|(i, _)| &trimmed[i + time.len()..])?
        .trim_start();
    // skip the hostname token
    let rest = rest.split_once(char::is_whitespace).map(|(_, r)| r).unwrap_or("");
    let rest = rest.trim_start();
    if rest.is_empty() {
        return None;
    }

    // service[pid]: message, service: message, or bare message
    let (component, message) = match rest.split_once(':') {
        Some((tag, msg)) if !tag.contains(char::is_whitespace) => {
            let service = tag.split('[').next().unwrap_or(tag).trim();
            let component = if service.is_empty() { None } else { Some(service.to_string()) };
            (component, msg.trim())
        }
        _ => (None, rest),
    };

    Some(RawLogLine {
        source_format: SourceFormat::Syslog,
        // BSD syslog timestamps carry no year, so they cannot be rendered as
        // ISO-8601 faithfully; the timestamp stays absent.
        timestamp: None,
        level: None,
        component,
        message: message.trim().to_string(),
        raw: raw.to_string(),
    })
}

fn is_hh_mm_ss(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 8
        && b[2] == b':'
        && b[5] == b':'
        && [0, 1, 3, 4, 6, 7].iter().all(|&i| b[i].is_ascii_digit())
}

fn parse_level_first(raw: &str, trimmed: &str) -> Option<RawLogLine> {
    let mut rest = trimmed;
    // LogHub-style numeric header tokens (date, time, pid) before the level.
    for _ in 0..3 {
        if let Some(first) = rest.split_whitespace().next() {
            if LogLevel::parse(first).is_some() {
                break;
            }
            if !first.is_empty() && first.bytes().all(|b| b.is_ascii_digit()) {
                rest = rest[first.len()..].trim_start();
                continue;
            }
        }
        break;
    }

    let first = rest.split_whitespace().next()?;
    let level = LogLevel::parse(first)?;
    let after_level = rest[first.len()..].trim_start();

    let (component, message) = split_component(after_level);
    let message = message.trim();
    if message.is_empty() && component.is_none() {
        return None;
    }

    Some(RawLogLine {
        source_format: SourceFormat::Syslog,
        timestamp: None,
        level: Some(level),
        component,
        message: message.to_string(),
        raw: raw.to_string(),
    })
}

/// Split `component : message` / `component: message` off the front of a
/// level-first line. The component token must not itself contain whitespace.
fn split_component(rest: &str) -> (Option<String>, &str) {
    if let Some((head, tail)) = rest.split_once(" : ") {
        if !head.is_empty() && !head.contains(char::is_whitespace) {
            return (Some(head.to_string()), tail);
        }
    }
    if let Some((head, tail)) = rest.split_once(": ") {
        if !head.is_empty() && !head.contains(char::is_whitespace) {
            return (Some(head.to_string()), tail);
        }
    }
    (None, rest)
}

/// Structured JSON records, one object per line.
fn parse_json(raw: &str) -> Option<RawLogLine> {
    let value: serde_json::Value = serde_json::from_str(raw.trim()).ok()?;
    let obj = value.as_object()?;

    let message = ["message", "msg", "text", "log"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(|v| v.as_str()))?
        .trim()
        .to_string();

    let level = ["level", "lvl", "severity"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(|v| v.as_str()))
        .map(|s| LogLevel::parse(s).unwrap_or(LogLevel::Unknown));

    let timestamp = ["timestamp", "time", "ts", "@timestamp", "datetime"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(|v| v.as_str()))
        .filter(|s| looks_iso8601(s))
        .map(str::to_string);

    let component = ["component", "logger", "module", "service", "source"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(|v| v.as_str()))
        .map(str::to_string);

    Some(RawLogLine {
        source_format: SourceFormat::Json,
        timestamp,
        level,
        component,
        message,
        raw: raw.to_string(),
    })
}

fn looks_iso8601(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() >= 10
        && b[..4].iter().all(|c| c.is_ascii_digit())
        && b[4] == b'-'
        && b[5].is_ascii_digit()
        && b[6].is_ascii_digit()
        && b[7] == b'-'
        && b[8].is_ascii_digit()
        && b[9].is_ascii_digit()
}

/// Apache Common Log Format:
/// `host ident authuser [day/Mon/year:HH:MM:SS zone] "request" status bytes`
fn parse_apache_common(raw: &str) -> Option<RawLogLine> {
    let trimmed = raw.trim();
    let bracket_open = trimmed.find('[')?;
    let bracket_close = trimmed[bracket_open..].find(']')? + bracket_open;
    let head: Vec<&str> = trimmed[..bracket_open].split_whitespace().collect();
    if head.len() != 3 {
        return None;
    }

    let timestamp = apache_time_to_iso8601(&trimmed[bracket_open + 1..bracket_close]);

    let after = trimmed[bracket_close + 1..].trim_start();
    let request_start = after.find('"')?;
    let request_end = after[request_start + 1..].find('"')? + request_start + 1;
    let request = &after[request_start + 1..request_end];

    let mut tail = after[request_end + 1..].split_whitespace();
    let status = tail.next()?;
    if status.len() != 3 || !status.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let size = tail.next().unwrap_or("-");

    Some(RawLogLine {
        source_format: SourceFormat::ApacheCommon,
        timestamp,
        level: None,
        component: None,
        message: format!("{request} {status} {size}"),
        raw: raw.to_string(),
    })
}

/// `10/Oct/2000:13:55:36 -0700` -> `2000-10-10T13:55:36-07:00`
fn apache_time_to_iso8601(s: &str) -> Option<String> {
    let (datetime, zone) = match s.split_once(' ') {
        Some((d, z)) => (d, Some(z)),
        None => (s, None),
    };
    let mut fields = datetime.splitn(3, ':');
    let date = fields.next()?;
    let mut date_parts = date.split('/');
    let day = date_parts.next()?;
    let month = date_parts.next()?;
    let year = date_parts.next()?;
    let month_num = MONTHS.iter().position(|m| *m == month)? + 1;
    if day.is_empty() || day.len() > 2 || !day.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let hour = fields.next()?;
    let min_sec = fields.next()?;
    let time = format!("{hour}:{min_sec}");
    if !is_hh_mm_ss(&time) {
        return None;
    }

    let zone_suffix = match zone {
        Some(z)
            if z.len() == 5
                && (z.starts_with('+') || z.starts_with('-'))
                && z.as_bytes()[1..].iter().all(|b| b.is_ascii_digit()) =>
        {
            format!("{}:{}", &z[..3], &z[3..])
        }
        _ => String::new(),
    };
    Some(format!("{year}-{month_num:02}-{day:0>2}T{time}{zone_suffix}"))
}
