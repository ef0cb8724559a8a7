//! Serialization helpers shared by the library and the CLI.
//!
//! Numbers are emitted with 17 significant digits so every f64 round-trips
//! exactly through its decimal form; report writers build JSON by hand to
//! keep key order and float formatting deterministic across runs.

/// 17-significant-digit decimal form of a finite f64 (scientific notation,
/// valid as a JSON number).
pub fn format_f64(v: f64) -> String {
    debug_assert!(v.is_finite(), "refusing to serialize non-finite {v}");
    format!("{:.16e}", v)
}

/// Renders `"key":value` pairs into a single-line JSON object.
pub fn json_object(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("{");
    for (i, (key, value)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('"');
        out.push_str(key);
        out.push_str("\":");
        out.push_str(value);
    }
    out.push('}');
    out
}

pub fn json_bool(v: bool) -> String {
    if v { "true".into() } else { "false".into() }
}

pub fn json_string(v: &str) -> String {
    let mut out = String::from("\"");
    for ch in v.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
