//! Signed-measure expansions around the Poisson distribution on the
//! integers: Charlier-polynomial correction terms, explicit
//! characteristic-function inversion bounds for the point, Kolmogorov and
//! total-variation metrics, translated-Poisson moment matching for general
//! one-parameter families, and three worked experiments (a heavy-tailed
//! convolution, independent sums, prime-divisor counts).

pub mod apps;
pub mod bounds;
pub mod charlier;
pub mod coeffs;
pub mod error;
pub mod families;
pub mod measure;

pub use error::{Error, Result};
pub use measure::{char_fn, convolve, difference, distance, tail_mass, Metric, SignedMeasure};
