//! Numerical laboratory for the hyperbolic circle problem over the modular
//! group PSL(2,Z), with emphasis on averages over Heegner points.
//!
//! The central object is the counting function
//!
//! ```text
//! N(z, w, X) = #{ gamma in PSL(2,Z) : 4 u(gamma z, w) + 2 <= X },
//! u(z, w) = |z - w|^2 / (4 Im z Im w),
//! ```
//!
//! whose main term is `3X` (the quotient has hyperbolic area pi/3). The crate
//! provides exact and floating-point counters, Heegner point sets attached to
//! imaginary quadratic discriminants, the special functions needed for the
//! spectral side (Selberg/Harish-Chandra transforms, Eisenstein series,
//! K-Bessel and Legendre functions), and batch experiment drivers with CSV and
//! JSON output.
//!
//! Modules, roughly bottom-up:
//!
//! * [`specfun`]: complex Gamma, Hurwitz and Riemann zeta, Dirichlet
//!   L-functions, Gauss hypergeometric series, K-Bessel integrals.
//! * [`halfplane`]: points of the upper half-plane, integer Moebius action,
//!   hyperbolic distance, reduction to the standard fundamental domain.
//! * [`qforms`]: reduced binary quadratic forms, class groups, Heegner points,
//!   Kronecker symbols.
//! * [`counting`]: the lattice-point counters (fast row-based and brute-force
//!   oracle) and Heegner-averaged error terms.
//! * [`kernels`]: ball and smoothed point-pair kernels, their
//!   Selberg/Harish-Chandra transforms, spherical functions.
//! * [`automorphic`]: Eisenstein series, scattering coefficient, Maass form
//!   evaluation from coefficient data, Weyl sums over Heegner points.
//! * [`spectral`]: Laplace eigenvalue lists and oscillating spectral sums.
//! * [`experiment`]: reproducible scan drivers and table emission.
//! * [`cli`]: the `hyplab` command-line front end.

pub mod automorphic;
pub mod cli;
pub mod counting;
pub mod experiment;
pub mod halfplane;
pub mod kernels;
pub mod qforms;
pub mod spectral;
pub mod specfun;

mod quad;

use std::fmt;

/// Crate-wide error type.
///
/// The variants mirror how failures are reported to callers and,
/// via the CLI, as process exit codes: invalid input (2), data errors (2),
/// numeric failures (3).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Arguments outside a function's documented domain.
    InvalidInput(String),
    /// Malformed or insufficient external data (files, coefficient lists).
    Data(String),
    /// A numerical method failed to reach its accuracy target.
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Data(m) => write!(f, "data error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

fn data_err(msg: impl Into<String>) -> Error {
    Error::Data(msg.into())
}
