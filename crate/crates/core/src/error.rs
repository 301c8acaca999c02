use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed cell at row {row}, column {column}: {reason}")]
    MalformedCell {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("derived column `{column}` disagrees with base columns at row {row}: supplied {supplied}, computed {computed}")]
    DerivedMismatch {
        column: String,
        row: usize,
        supplied: i64,
        computed: i64,
    },
    #[error("insufficient data: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular design matrix in {0}")]
    Singular(&'static str),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_len(got: usize, needed: usize) -> Result<()> {
    if got < needed {
        Err(Error::TooShort { needed, got })
    } else {
        Ok(())
    }
}
