//! Kempf's distortion function on the Kepler manifold `T*S^n \ 0`.
//!
//! The crate evaluates the distortion function `T_m` from its kernel series and
//! from an exact closed form, derives the finite Tian–Yau–Zelditch expansion
//! coefficients in exact rational arithmetic, measures the exponentially small
//! remainder, and computes the obstruction two-form `(i/2m) ∂∂̄ log T_m` on the
//! isotropic cone model of the manifold.
//!
//! The algebraic containers ([`ExpPoly`], [`LaurentSeries`]) are generic over
//! their coefficient type; the aliases below fix the exact instantiations used
//! throughout the crate.

pub mod cli;
pub mod error;
pub mod exppoly;
pub mod geometry;
pub mod kempf;
pub mod laurent;
pub mod numeric;
pub mod obstruction;
pub mod tyz;
pub mod verify;

pub use error::{Error, Result};
pub use exppoly::{Coeff, ExpPoly, ExpTerm, RateGroup, StableEvaluator};
pub use laurent::LaurentSeries;

/// Arbitrary-precision rational, the backbone of every exact computation.
pub type Rational = num_rational::BigRational;

/// Exponential-polynomial with exact rational coefficients.
pub type RationalExpPoly = ExpPoly<Rational>;

/// Exponential-polynomial with double-precision coefficients.
pub type FloatExpPoly = ExpPoly<f64>;

/// Series in `1/y` with exact rational coefficients.
pub type RationalLaurent = LaurentSeries<Rational>;

/// Series in `1/y` with double-precision coefficients.
pub type FloatLaurent = LaurentSeries<f64>;

/// Complex scalar used for ambient cone coordinates.
pub type Complex = num_complex::Complex64;

/// Parses `"p/q"` or `"p"` into a [`Rational`].
pub fn rational(text: &str) -> Result<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| Error::InvalidArgument(format!("bad rational {text:?}: {e}")))
}

/// Builds the rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
