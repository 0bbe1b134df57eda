use std::fmt;

/// Errors raised by the analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error{}: {message}", Location(*frame, *line))]
    Parse {
        frame: Option<usize>,
        line: Option<usize>,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("typing error: {0}")]
    Typing(String),
    #[error("empty segment: {0}")]
    EmptySegment(String),
    #[error("degenerate frame: all confidences are zero")]
    DegenerateFrame,
    #[error("too few items for projection: {found} (need at least 3)")]
    TooFewItems { found: usize },
    #[error("glyph error: {0}")]
    Glyph(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            frame: None,
            line: None,
            message: message.into(),
        }
    }

    /// Stable short name of the error kind, used in structured diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::Config(_) => "ConfigError",
            Error::Normalization(_) => "NormalizationError",
            Error::Typing(_) => "TypingError",
            Error::EmptySegment(_) => "EmptySegmentError",
            Error::DegenerateFrame => "DegenerateFrameError",
            Error::TooFewItems { .. } => "TooFewItemsError",
            Error::Glyph(_) => "GlyphError",
            Error::Io(_) => "IoError",
        }
    }
}

struct Location(Option<usize>, Option<usize>);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.0, self.1) {
            (Some(frame), _) => write!(f, " at frame {frame}"),
            (None, Some(line)) => write!(f, " at line {line}"),
            (None, None) => Ok(()),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
