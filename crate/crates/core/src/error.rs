use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The top two eigenvalues coincide, so the nearest uniaxial tensor is not unique.
    #[error("uniaxial projection is ambiguous: top eigenvalue gap {gap:.3e} below tolerance {tol:.3e}")]
    Ambiguous { gap: f64, tol: f64 },

    #[error("tensor is outside the tubular neighbourhood: distance {dist:.6e} > {delta:.6e}")]
    OutsideNeighbourhood { dist: f64, delta: f64 },

    /// A sampled p-Hessian had a negative eigenvalue although condition (L) was satisfied.
    #[error(
        "p-Hessian has negative eigenvalue {min_eig:.6e} at |Q| = {q_norm:.4} although the constant conditions hold"
    )]
    CoercivityViolated { min_eig: f64, q_norm: f64 },

    #[error("density is not coercive: {0}")]
    NonCoercive(String),

    #[error("non-coercivity witness search failed after {iterations} doublings")]
    SearchFailed { iterations: usize },

    #[error("minimization diverged at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("at L = {l}: {source}")]
    AtL { l: f64, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
