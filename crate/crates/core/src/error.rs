use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The transformation spec (or a preset parameter) is malformed or
    /// undefined at a requested stage.
    #[error("spec error: {0}")]
    Spec(String),

    /// A stage beyond what has been built (or can be built) was requested.
    #[error("depth error: requested stage {requested}, built depth {built}{}", fmt_diag(.diagnostic))]
    Depth {
        requested: usize,
        built: usize,
        diagnostic: Option<String>,
    },

    /// A configured resource bound was exceeded.
    #[error("resource cap exceeded: {what} (cap {cap})")]
    Resource { what: String, cap: u64 },

    /// The operation is only defined for a narrower family of specs.
    #[error("unsupported spec: {0}")]
    Unsupported(String),

    /// Strict mode: part of the source could not be resolved at the working stage.
    #[error("unresolved mass {measure} at stage {stage} (strict mode)")]
    Unresolved { measure: String, stage: usize },

    /// Malformed textual input (rationals, level-set syntax, JSON).
    #[error("parse error: {0}")]
    Parse(String),
}

fn fmt_diag(d: &Option<String>) -> String {
    match d {
        Some(d) => format!(" ({d})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn depth(requested: usize, built: usize) -> Self {
        Error::Depth {
            requested,
            built,
            diagnostic: None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
