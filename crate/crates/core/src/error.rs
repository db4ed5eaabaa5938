use std::fmt;

use thiserror::Error;

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Release,
    Clogging,
    Residue,
    Molding,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Release => "release",
            Stage::Clogging => "clogging",
            Stage::Residue => "residue",
            Stage::Molding => "molding",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("release too slow: footprint not released within {max_time_min} min")]
    ReleaseTooSlow { max_time_min: f64 },

    #[error("unclottable: aperture still open after {max_deposition_um} um deposition")]
    Unclottable { max_deposition_um: f64 },

    #[error("under-determined calibration: {0}")]
    Underdetermined(String),

    #[error("plate solver failed: {0}")]
    Solver(String),

    #[error("no feasible thickness up to {t_max_um} um: {}", .violations.join("; "))]
    Infeasible { t_max_um: f64, violations: Vec<String> },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Process exit code: 2 for bad input, 3 for model failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
