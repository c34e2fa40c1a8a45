//! Classical Fourier surrogates for data-reuploading quantum circuits.
//!
//! The crate simulates reuploading circuits ([`qsim`]), describes their
//! integer frequency spectrum ([`spectrum`]), fits truncated Fourier series
//! ([`surrogate`]) either on the full grid or on sampled frequencies
//! ([`pipeline`]), and ships the data handling ([`data`]) and experiment
//! drivers ([`experiments`]) used by the command-line tool.

mod bigint;
pub mod data;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod pipeline;
pub mod qsim;
pub mod seed;
pub mod spectrum;
pub mod surrogate;

pub use error::{Error, ErrorKind, Result};
