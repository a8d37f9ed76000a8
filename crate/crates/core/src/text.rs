//! Percent-escaping for whitespace-delimited text formats.

/// Escape characters that would break a space, tab, `|` or `=` delimited
/// field. `_` is escaped too so a bare `_` can mean "absent".
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            '|' => out.push_str("%7C"),
            '=' => out.push_str("%3D"),
            '_' if s == "_" => out.push_str("%5F"),
            _ => out.push(ch),
        }
    }
    if out.is_empty() {
        out.push_str("%00");
    }
    out
}

pub fn unescape(s: &str) -> Option<String> {
    if s == "%00" {
        return Some(String::new());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

/// `None` ↔ `_`.
pub fn escape_opt(s: Option<&str>) -> String {
    s.map(escape).unwrap_or_else(|| "_".to_string())
}

pub fn unescape_opt(s: &str) -> Option<Option<String>> {
    if s == "_" {
        Some(None)
    } else {
        unescape(s).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn underscore_is_distinct_from_absent() {
        assert_eq!(escape_opt(None), "_");
        assert_eq!(escape_opt(Some("_")), "%5F");
        assert_eq!(unescape_opt("%5F"), Some(Some("_".to_string())));
        assert_eq!(escape("a_b"), "a_b");
    }

    proptest! {
        #[test]
        fn escape_round_trips(s in ".*") {
            let e = escape(&s);
            prop_assert!(!e.contains([' ', '\t', '\n', '|', '=']));
            prop_assert_eq!(unescape(&e), Some(s));
        }
    }
}
