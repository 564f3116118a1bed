pub mod floquet;
pub mod gershgorin;
pub mod msf;
pub mod reproduce;
pub mod simulate;
pub mod topo;
pub mod wien;

use serde::Serialize;

/// Envelope shared by every JSON artifact: the command, its resolved
/// configuration, then the command-specific result fields.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    #[serde(flatten)]
    pub result: &'a R,
}

pub fn report<'a, C: Serialize, R: Serialize>(command: &'a str, config: &'a C, result: &'a R) -> Report<'a, C, R> {
    Report {
        command,
        config,
        result,
    }
}

/// Fixed-point formatting that prints values rounding to zero as unsigned zero.
pub fn fixed(v: f64, digits: usize) -> String {
    let s = format!("{:.*}", digits, v);
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// The serialized (snake_case) name of a unit enum variant.
pub fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}
