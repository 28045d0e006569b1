use std::fmt;
use std::io;

use sensefold::compress::CompressError;
use sensefold::corpus::CorpusError;
use sensefold::eval::EvalError;
use sensefold::model::ModelError;
use sensefold::wordnet::WordNetError;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_DATA, msg: msg.into() }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, msg: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

fn io_code(e: &io::Error) -> i32 {
    match e.kind() {
        io::ErrorKind::NotFound | io::ErrorKind::PermissionDenied => EXIT_USAGE,
        io::ErrorKind::InvalidData | io::ErrorKind::UnexpectedEof => EXIT_DATA,
        _ => EXIT_INTERNAL,
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError { code: io_code(&e), msg: e.to_string() }
    }
}

impl From<WordNetError> for CliError {
    fn from(e: WordNetError) -> Self {
        let code = match &e {
            WordNetError::MissingFile(_) => EXIT_USAGE,
            WordNetError::Io { source, .. } => io_code(source),
            _ => EXIT_DATA,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<CompressError> for CliError {
    fn from(e: CompressError) -> Self {
        let code = match &e {
            CompressError::Io(io) => io_code(io),
            CompressError::WordNet(WordNetError::MissingFile(_)) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(io) => io.into(),
            CorpusError::Compress(c) => c.into(),
            CorpusError::Xml { .. } => CliError::data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io(io) => io.into(),
            EvalError::Corpus(c) => c.into(),
            EvalError::Compress(c) => c.into(),
            EvalError::LevelMismatch { .. } => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(io) => io.into(),
            ModelError::Corpus(c) => c.into(),
            ModelError::Compress(c) => c.into(),
            ModelError::Eval(c) => c.into(),
            ModelError::InvalidConfig(_) => CliError::usage(e.to_string()),
            ModelError::NonFiniteLoss { .. } => CliError::internal(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}
