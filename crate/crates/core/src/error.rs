use std::fmt;

use thiserror::Error;

/// Pipeline stage, used to tag errors that bubble up through the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    FourierTransform,
    IndefiniteIntegral,
    InverseTransform,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::FourierTransform => "step 1 (DE Fourier transform + NUFFT)",
            Stage::IndefiniteIntegral => "step 2 (sinc-Gauss indefinite integration)",
            Stage::InverseTransform => "step 3 (Euler-transform inverse FT)",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("measure density returned non-finite value {value} at j = {index} (y = {at})")]
    NonFiniteDensity { index: i64, at: f64, value: f64 },

    #[error("non-finite value {value} at index {index}: {context}")]
    NonFinite {
        context: &'static str,
        index: i64,
        value: f64,
    },

    #[error("samples do not cover indices {missing_lo}..={missing_hi}")]
    InsufficientCoverage { missing_lo: i64, missing_hi: i64 },

    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },

    #[error("kernel table mismatch: table has (r = {table_r}, n' = {table_n}), config has (r = {cfg_r}, n' = {cfg_n})")]
    TableMismatch {
        table_r: f64,
        table_n: usize,
        cfg_r: f64,
        cfg_n: usize,
    },

    #[error("kernel table size {m_table} too small for n' = {n_prime} (need m_table/2 >= n')")]
    TableSize { m_table: usize, n_prime: usize },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
