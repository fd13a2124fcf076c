//! The three worked experiments built on top of the core expansion
//! machinery: a single convolution, sums of independent variables, and
//! prime-divisor counts.

pub mod convolution;
pub mod primes;
pub mod sums;
