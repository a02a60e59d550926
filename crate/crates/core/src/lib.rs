//! Exact arithmetic for pencils of conics with rational degenerate fibres.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: rationals, valuations, square classes, Legendre and Hilbert symbols,
//!   F₂-linear algebra on square classes.
//! * [`quadform`]: the norm forms `x² − a y²`: automorphs, fundamental domains,
//!   representation numbers and local densities.
//! * [`pencil`]: conic bundle data, the map δ, the Brauer group and norm-form systems.
//! * [`localsolve`]: real and p-adic solubility of norm-form systems with witnesses,
//!   and local isotropy of diagonal quaternary forms.
//! * [`counting`]: primary-solution counts `N(B)` and the singular-series prediction.
//! * [`brauermanin`]: local invariants, the Brauer–Manin pairing on fibre parameters
//!   and obstruction scans.
//! * [`delpezzo`]: conic bundles `f x² + g y² + h z² = 0`, degree 2 and degree 1
//!   del Pezzo constructions and their minimality tests.
//!
//! Polynomial and real-number code is generic over the scalar type (see [`scalar`]);
//! the aliases below fix the exact types used throughout.

pub mod brauermanin;
pub mod counting;
pub mod delpezzo;
pub mod error;
pub mod exactnum;
pub mod interval;
pub mod localsolve;
pub mod pencil;
pub mod poly;
pub mod quadform;
pub mod scalar;

pub use error::{Error, Result};

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational number, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;
/// Univariate polynomial with exact rational coefficients.
pub type RationalPoly = poly::Poly<Rational>;
/// Univariate polynomial with `f64` coefficients.
pub type FloatPoly = poly::Poly<f64>;

pub use exactnum::{Place, SquareClass};
