use thiserror::Error;

/// A broken cover invariant, pointing at the offending edge and pair when
/// there is one.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct Violation {
    pub edge: Option<(usize, usize)>,
    pub pair: Option<(usize, usize)>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cover violation: {}", self.message)?;
        if let Some((u, v)) = self.edge {
            write!(f, " (edge {}-{}", u, v)?;
            if let Some((i, j)) = self.pair {
                write!(f, ", pair ({},{})", i, j)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Violation {
    pub fn new(message: impl Into<String>) -> Self {
        Violation {
            edge: None,
            pair: None,
            message: message.into(),
        }
    }

    pub fn at_edge(edge: (usize, usize), message: impl Into<String>) -> Self {
        Violation {
            edge: Some(edge),
            pair: None,
            message: message.into(),
        }
    }

    pub fn at_pair(edge: (usize, usize), pair: (usize, usize), message: impl Into<String>) -> Self {
        Violation {
            edge: Some(edge),
            pair: Some(pair),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error(transparent)]
    Cover(#[from] Violation),
    #[error("invalid relabeling: {0}")]
    Relabeling(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("retry cap exhausted: {0}")]
    RetryExhausted(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
