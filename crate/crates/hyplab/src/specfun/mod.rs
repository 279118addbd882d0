//! Special functions underlying the spectral side: complex Gamma, Gauss
//! hypergeometric series, Hurwitz/Riemann/Dirichlet zeta functions, and
//! Bessel functions.
//!
//! Everything here is implemented directly (series, Euler-Maclaurin tails,
//! quadrature of integral representations) and validated against frozen
//! multiple-precision reference values plus functional equations.

mod bessel;
mod gamma;
mod hyp2f1;
mod zeta;

pub use bessel::{bessel_j1_ratio, kbessel};
pub use gamma::cgamma;
pub use hyp2f1::gauss_2f1;
pub use zeta::{dirichlet_l, hurwitz_zeta, hurwitz_zeta_star, xi, zeta};
