use crate::complex_analytic::Complex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("evaluation at a pole ({at})")]
    PoleEvaluation { at: Complex },

    #[error("antiderivative of a power -1 term centered at {center} needs a logarithm")]
    LogarithmRequired { center: Complex },

    #[error("product of these terms is outside the term language")]
    UnsupportedProduct,

    #[error("zero at {at}: declared order {expected}, Taylor expansion gives {found:?}")]
    WrongZeroOrder {
        at: Complex,
        expected: usize,
        found: Option<usize>,
    },

    #[error("h vanishes at an undeclared point: {detail}")]
    MissingZero { detail: String },

    #[error("branch point at {at}: |f_z| vanishes")]
    BranchPoint { at: Complex },

    #[error("{at} is outside the domain: {reason}")]
    DomainViolation { at: Complex, reason: String },

    #[error("degenerate radii r1 = {r1}, r2 = {r2}")]
    DegenerateRadii { r1: f64, r2: f64 },

    #[error("quadratic has no admissible real roots: {detail}")]
    NoRealRoots { detail: String },

    #[error("degenerate triangle {index:?}")]
    DegenerateTriangle { index: Option<usize> },

    #[error("variation is nonzero at boundary vertex {vertex}")]
    VariationOnBoundary { vertex: usize },

    #[error("line search found no descent step (iteration {iter}, gradient norm {grad_norm:e})")]
    LineSearchFailure { iter: usize, grad_norm: f64 },

    #[error("energy is not finite (iteration {iter})")]
    NonFiniteEnergy { iter: usize },

    #[error("ramp step {step}: {source}")]
    RampStep { step: usize, source: Box<Error> },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
