use std::fmt;

/// Coarse error class printed as `error[<category>]: ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Bad command line.
    Usage,
    /// Unreadable or invalid scenario file.
    Config,
    /// Output directory or file problems.
    Io,
    /// A computation failed (divergence, solver non-convergence, ...).
    Numeric,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Usage => "usage",
            Category::Config => "config",
            Category::Io => "io",
            Category::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("error[{category}]: {message}")]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        // one line, whatever the source produced
        let message = message.into().split_whitespace().collect::<Vec<_>>().join(" ");
        Self { category, message }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Category::Config, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Category::Io, message)
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self::new(Category::Numeric, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.category {
            Category::Usage => 2,
            Category::Config => 3,
            Category::Io => 4,
            Category::Numeric => 5,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
