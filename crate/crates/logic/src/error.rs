use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("translation disagreement on {sentence}: {detail}")]
    TranslationDisagreement { sentence: String, detail: String },
    #[error(transparent)]
    Core(#[from] hyperval_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
