use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator {index} is not a bijection of 1..{degree}")]
    NotBijective { index: usize, degree: usize },

    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("word is not in the domain: S_w = {s_w:?}")]
    Domain { s_w: Vec<u32> },

    #[error("binary product undefined at step {step} of a domain word")]
    InconsistentProduct { step: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("locality axiom violated: {axiom} (witness {witness:?})")]
    Axiom { axiom: String, witness: Vec<u32> },

    #[error("no decomposition found for element {0}")]
    NotFound(u32),

    #[error("product formula needs a normal subsystem of N_F(T); use the locality route")]
    NormalityRequired,

    #[error("descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
