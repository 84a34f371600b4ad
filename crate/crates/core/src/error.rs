use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` is not finite ({value})")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("trajectory diverged at step {step}")]
    Divergence { step: usize },

    #[error("expected a positive value, got {0}")]
    NonPositive(f64),

    #[error("fixed points are complex (discriminant {discriminant})")]
    ComplexRoots { discriminant: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),

    #[error("eigenvalues lie on the stability boundary")]
    Unclassifiable,

    #[error("trace has {len} samples, detection needs at least {required}")]
    TraceTooShort { len: usize, required: usize },

    #[error("unknown sweep parameter `{0}` (expected one of a&v, b&c, d, k)")]
    UnknownParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
