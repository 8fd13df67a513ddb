use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tunneling regime violated: E0 = {e0} eV is not below V = {v} eV")]
    TunnelingRegime { e0: f64, v: f64 },

    #[error("non-finite argument {0}")]
    NonFinite(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("pole search failed from seed k = {seed_re}{seed_im:+}i nm^-1: {reason}")]
    PoleSearch {
        seed_re: f64,
        seed_im: f64,
        reason: String,
    },

    #[error("pole seeding error: {0}")]
    Seeding(String),

    #[error("normalization failure for pole n = {n}: |norm| = {norm:e}")]
    Normalization { n: i64, norm: f64 },

    #[error("truncation did not converge: N = {n} gives {coarse:e}, doubled gives {fine:e}")]
    Truncation { n: usize, coarse: f64, fine: f64 },

    #[error("pole table of {n} states is too short to resolve t = {t} fs")]
    PoleTable { n: usize, t: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("local frequency undefined at x = {x} nm, t = {t} fs (|psi| = {amplitude:e})")]
    UndefinedFrequency { x: f64, t: f64, amplitude: f64 },

    #[error("no interior density maximum in window [{t_lo}, {t_hi}] fs at x = {x} nm")]
    MonotonicSignal { x: f64, t_lo: f64, t_hi: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("missing dependency: {0}")]
    MissingDependency(String),

    #[error("no pole/saddle transition at x = {x} nm: {reason}")]
    NoTransition { x: f64, reason: String },

    #[error("probe ({x} nm, {t} fs) lies outside the reflection-free region")]
    DomainTruncation { x: f64, t: f64 },

    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {value}")))
    }
}
