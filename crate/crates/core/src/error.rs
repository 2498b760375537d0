use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("photon number must be at least 1, got {0}")]
    PhotonNumber(u32),
    #[error("Fock cutoff {cutoff} too small: need cutoff > {required_above}")]
    Dimension { cutoff: usize, required_above: usize },
    #[error(
        "amplitude |alpha|^2 = {norm_sqr} exceeds the truncation guard for cutoff {cutoff}; need cutoff >= {required}"
    )]
    Truncation { norm_sqr: f64, cutoff: usize, required: usize },
    #[error("{name} expects {expected} settings, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unknown J inequality J{0} (valid: 1..=4)")]
    UnknownJ(u8),
    #[error("setting {0} is not finite")]
    NonFinite(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("undefined value: {0}")]
    Undefined(String),
    #[error("cannot parse complex amplitude {0:?} (expected a+bi)")]
    Parse(String),
}
