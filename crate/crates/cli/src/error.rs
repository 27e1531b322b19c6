use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Validation,
    Certificate,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Kind::Usage, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(Kind::Validation, message)
    }

    pub fn certificate(message: impl Into<String>) -> Self {
        Self::new(Kind::Certificate, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Usage | Kind::Io => 1,
            Kind::Validation => 2,
            Kind::Certificate => 3,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Usage => "usage",
            Kind::Io => "io",
            Kind::Validation => "validation",
            Kind::Certificate => "certificate",
        }
    }
}

/// One line: `error kind=<kind> code=<code> msg=<json string>`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "error kind={} code={} msg={}",
            self.kind_name(),
            self.exit_code(),
            serde_json::Value::String(self.message.clone())
        )
    }
}

impl From<vck::Error> for CliError {
    fn from(e: vck::Error) -> Self {
        let kind = if e.is_validation() {
            Kind::Validation
        } else {
            Kind::Certificate
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(Kind::Io, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
