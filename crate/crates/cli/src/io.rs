use std::fmt;
use std::io::Read;
use std::path::Path;

use monotone_core::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Input(m) => write!(f, "input: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_document(path: Option<&Path>) -> CliResult<Doc> {
    let (text, origin) = match path {
        Some(p) if p.as_os_str() != "-" => (
            std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            (s, "stdin".to_string())
        }
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{origin}: malformed JSON: {e}")))?;
    Ok(Doc { value, origin })
}

/// The parsed input document.
pub struct Doc {
    pub value: Value,
    pub origin: String,
}

impl Doc {
    pub fn whole<T: DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_value(self.value.clone())
            .map_err(|e| CliError::Input(format!("{}: {e}", self.origin)))
    }

    pub fn has(&self, name: &str) -> bool {
        self.value.get(name).is_some_and(|v| !v.is_null())
    }

    pub fn field<T: DeserializeOwned>(&self, name: &str) -> CliResult<T> {
        let v = self
            .value
            .get(name)
            .ok_or_else(|| CliError::Input(format!("{}: missing field `{name}`", self.origin)))?;
        serde_json::from_value(v.clone())
            .map_err(|e| CliError::Input(format!("{}: field `{name}`: {e}", self.origin)))
    }

    pub fn optional<T: DeserializeOwned>(&self, name: &str) -> CliResult<Option<T>> {
        if self.has(name) {
            self.field(name).map(Some)
        } else {
            Ok(None)
        }
    }
}

/// What a command produced: the JSON result, and the verdict when the
/// command is a check.
pub struct Outcome {
    pub value: Value,
    pub verdict: Option<bool>,
    pub table: Option<String>,
}

impl Outcome {
    pub fn data(v: impl Serialize) -> CliResult<Self> {
        Ok(Outcome {
            value: to_value(v)?,
            verdict: None,
            table: None,
        })
    }

    pub fn check(v: impl Serialize, verdict: bool) -> CliResult<Self> {
        Ok(Outcome {
            value: to_value(v)?,
            verdict: Some(verdict),
            table: None,
        })
    }
}

fn to_value(v: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v)
        .map_err(|e| CliError::Core(Error::Parse(format!("cannot encode output: {e}"))))
}

/// `path: value` lines for every leaf.
pub fn flatten(v: &Value) -> String {
    fn go(prefix: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    go(&p, x, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = a.iter().map(scalar_text).collect();
                out.push(format!("{prefix}: [{}]", items.join(", ")));
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    go(&format!("{prefix}[{i}]"), x, out);
                }
            }
            other => out.push(format!(
                "{}: {}",
                if prefix.is_empty() { "value" } else { prefix },
                scalar_text(other)
            )),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out.join("\n") + "\n"
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
