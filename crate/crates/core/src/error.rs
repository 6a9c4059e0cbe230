use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied parameters outside an operation's domain.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Inputs were individually valid but inconsistent with each other
    /// (e.g. an alignment path that indexes past the end of a series).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(csv::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        match e.io_error_kind() {
            Some(kind) => Error::Io(std::io::Error::new(kind, e)),
            None => Error::Json(e),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!("checked by is_io_error"),
            }
        } else {
            Error::Csv(e)
        }
    }
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Process exit status used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Json(_) | Error::Csv(_) => 2,
            Error::Contract(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn io_failures_inside_serializers_are_io_errors() {
        struct Closed;
        impl std::io::Write for Closed {
            fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
                Err(std::io::ErrorKind::BrokenPipe.into())
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let e: Error = serde_json::to_writer(Closed, &[1, 2]).unwrap_err().into();
        assert_eq!(e.exit_code(), 1);
        let mut w = csv::Writer::from_writer(Closed);
        w.write_record(["a"]).unwrap();
        let e: Error = csv::Error::from(w.flush().unwrap_err()).into();
        assert_eq!(e.exit_code(), 1);
        let e: Error = serde_json::from_str::<u8>("x").unwrap_err().into();
        assert_eq!(e.exit_code(), 2);
    }
}
