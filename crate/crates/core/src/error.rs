use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a proper orthochronous Lorentz matrix: {0}")]
    NotLorentz(String),

    #[error("foliation vector must be unit timelike and future pointing (n.n = {norm}, n^0 = {t})")]
    InvalidFoliation { norm: f64, t: f64 },

    #[error("SL(2,C) element has determinant {0}, expected 1")]
    NotUnimodular(String),

    #[error("operation needs the {expected:?} fundamental representation, got {found:?}")]
    WrongRepresentation {
        expected: crate::sl2c::Rep,
        found: crate::sl2c::Rep,
    },

    #[error("momentum is off shell: p.p = {dot}, expected {expected}")]
    OffShell { dot: f64, expected: f64 },

    #[error("spin coefficients are not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid quantum numbers: {0}")]
    QuantumNumbers(String),

    #[error("particles live on different fibers: {0}")]
    FiberMismatch(String),

    #[error("symmetrized state vanishes (exclusion): {0}")]
    ZeroState(String),

    #[error("sign of p.n is undefined for p.n = 0")]
    UndefinedEnergySign,

    #[error("projection undefined: p^2 + (p.n)^2 = {0} is not positive")]
    DegenerateTransverse(f64),

    #[error("integration step rejected at tau = {tau}: relative drift {drift} of K")]
    StepRejected { tau: f64, drift: f64 },

    #[error("sampling too coarse: {samples_per_period:.3} samples per fringe period, need at least {required}")]
    Aliasing {
        samples_per_period: f64,
        required: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
