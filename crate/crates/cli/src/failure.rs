use std::fmt;

use cylbill::io::FormatError;
use cylbill::Error;
use serde_json::{json, Value};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

/// A failed command: exit code plus a JSON diagnostic for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub field: Option<String>,
    pub detail: Option<Box<Value>>,
}

impl Failure {
    pub fn input(message: impl Into<String>, field: Option<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            kind: "input",
            message: message.into(),
            field,
            detail: None,
        }
    }

    pub fn validation(message: impl Into<String>, field: Option<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            kind: "validation",
            message: message.into(),
            field,
            detail: None,
        }
    }

    pub fn missing(field: &str) -> Self {
        Self::input(
            format!("missing field `{field}` required by this command"),
            Some(field.to_string()),
        )
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        Self::input(format!("{}: {err}", path.display()), None)
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(Box::new(detail));
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": self.kind,
            "exit_code": self.code,
            "message": self.message,
        });
        if let Some(f) = &self.field {
            v["field"] = json!(f);
        }
        if let Some(d) = &self.detail {
            v["detail"] = (**d).clone();
        }
        v
    }

    /// Core errors raised while running a command, with `context` naming the
    /// scenario field the offending value came from.
    pub fn from_core(err: Error, context: &str) -> Self {
        let message = err.to_string();
        match err {
            Error::SingularSegment(_) | Error::TangentialEvent { .. } => Self {
                code: EXIT_SINGULAR,
                kind: "singularity",
                message,
                field: None,
                detail: None,
            },
            Error::SingularityEncountered { partial } => Self {
                code: EXIT_SINGULAR,
                kind: "singularity",
                message,
                field: None,
                detail: serde_json::to_value(&*partial).ok().map(Box::new),
            },
            _ => Self::input(message, Some(context.to_string())),
        }
    }

    /// Table files: syntax and schema problems are input errors, tables
    /// that parse but violate a geometric condition fail validation.
    pub fn from_format(err: FormatError, prefix: &str) -> Self {
        match err {
            FormatError::Parse(msg) => {
                Self::input(format!("{prefix}: {msg}"), backticked(&msg))
            }
            FormatError::Invalid { field, source } => {
                Self::validation(source.to_string(), Some(format!("{prefix}.{field}")))
            }
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// First identifier quoted in backticks, which is how serde names the field
/// in unknown/missing-field messages.
pub fn backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_is_extracted_from_serde_message() {
        assert_eq!(
            backticked("unknown field `radios`, expected one of `generator`"),
            Some("radios".into())
        );
        assert_eq!(backticked("invalid type: string"), None);
    }

    #[test]
    fn singular_errors_map_to_exit_4() {
        let f = Failure::from_core(Error::SingularSegment("double(2)".into()), "start");
        assert_eq!(f.code, EXIT_SINGULAR);
        let f = Failure::from_core(Error::InvalidVelocity { norm: 2.0 }, "start");
        assert_eq!(f.code, EXIT_INPUT);
        assert_eq!(f.field.as_deref(), Some("start"));
    }
}
