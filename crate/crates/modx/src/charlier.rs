//! Charlier polynomials, Poisson pmf and tails, and the Poisson-Charlier
//! signed measures nu_r with their tail bounds.

use crate::error::{Error, Result};
use crate::measure::{compensated_sum, SignedMeasure};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Largest Charlier order we evaluate in double precision. Beyond this the
/// alternating sum cancels catastrophically.
pub const MAX_CHARLIER_ORDER: u32 = 30;

/// Truncation policy for infinite-support constructions: keep points with
/// |pmf| >= TRUNC_EPS inside mean +/- TRUNC_SDS standard deviations, record
/// the dropped absolute mass, never renormalize.
pub const TRUNC_EPS: f64 = 1e-18;
pub const TRUNC_SDS: f64 = 40.0;

/// Specification of a Poisson-Charlier measure nu_r(lambda; a~_1..a~_r).
/// The zeroth coefficient is implicitly 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuSpec {
    pub lambda: f64,
    pub a_tilde: Vec<f64>,
}

impl NuSpec {
    pub fn order(&self) -> usize {
        self.a_tilde.len()
    }

    /// A-bar_r = 1 + sum_l 2^l |a~_l|, the tail-bound prefactor.
    pub fn a_bar(&self) -> f64 {
        1.0 + self
            .a_tilde
            .iter()
            .enumerate()
            .map(|(i, a)| 2f64.powi(i as i32 + 1) * a.abs())
            .sum::<f64>()
    }
}

/// Poisson pmf via log-space evaluation, stable for large lambda and j.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    assert!(lambda > 0.0);
    let j = j as f64;
    (-lambda + j * lambda.ln() - ln_gamma(j + 1.0)).exp()
}

/// Truncated Po(lambda) as a signed measure, per the library truncation
/// policy. The dropped mass lands in `truncated_mass`.
pub fn poisson_measure(lambda: f64) -> SignedMeasure {
    assert!(lambda > 0.0);
    let sd = lambda.sqrt();
    let lo = ((lambda - TRUNC_SDS * sd).floor().max(0.0)) as u64;
    let hi = (lambda + TRUNC_SDS * sd).ceil().max(1.0) as u64;
    let mut weights: Vec<f64> = Vec::with_capacity((hi - lo + 1) as usize);
    for j in lo..=hi {
        let p = poisson_pmf(lambda, j);
        weights.push(if p >= TRUNC_EPS { p } else { 0.0 });
    }
    let kept = compensated_sum(weights.iter().copied());
    SignedMeasure::new(lo as i64, weights, (1.0 - kept).max(0.0))
}

/// The l-th Charlier polynomial
/// C_l(j;lambda) = sum_{k=0}^l (-1)^k C(l,k) C(j,k) k! lambda^{-k},
/// evaluated as a compensated alternating sum with multiplicative term
/// updates.
pub fn charlier(l: u32, j: u64, lambda: f64) -> Result<f64> {
    if l > MAX_CHARLIER_ORDER {
        return Err(Error::InvalidInput(format!(
            "charlier order {l} exceeds stability cap {MAX_CHARLIER_ORDER}"
        )));
    }
    assert!(lambda > 0.0);
    let jf = j as f64;
    let lf = l as f64;
    let mut term = 1.0f64; // k = 0
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 0..=l as u64 {
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        // term_{k+1} = term_k * -(l-k)(j-k) / ((k+1) lambda)
        let kf = k as f64;
        term *= -((lf - kf) * (jf - kf)) / ((kf + 1.0) * lambda);
    }
    Ok(sum + comp)
}

/// Right-hand side of the Charlier magnitude bound
/// |C_l(j;lambda)| <= 2^{l-1} { |1-j/lambda|^l + (l/sqrt(lambda))^l }.
pub fn charlier_bound(l: u32, j: u64, lambda: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let lf = l as f64;
    let a = (1.0 - j as f64 / lambda).abs().powf(lf);
    let b = (lf / lambda.sqrt()).powf(lf);
    2f64.powf(lf - 1.0) * (a + b)
}

/// Chernoff tail bound for Z ~ Po(lambda):
/// max{P[Z > lambda(1+delta)], P[Z < lambda(1-delta)]}
///   <= exp{-lambda delta^2 / (2(1+delta/3))}, 0 < delta <= 1.
pub fn chernoff_tail(lambda: f64, delta: f64) -> f64 {
    assert!(delta > 0.0 && delta <= 1.0);
    (-lambda * delta * delta / (2.0 * (1.0 + delta / 3.0))).exp()
}

/// Build the signed measure
/// nu{j} = Po(lambda){j} { 1 + sum_{l=1}^r (-1)^l a~_l C_l(j;lambda) }.
pub fn build_nu(spec: &NuSpec) -> Result<SignedMeasure> {
    if spec.order() as u32 > MAX_CHARLIER_ORDER {
        return Err(Error::InvalidInput(format!(
            "nu order {} exceeds stability cap {MAX_CHARLIER_ORDER}",
            spec.order()
        )));
    }
    let po = poisson_measure(spec.lambda);
    let offset = po.offset;
    let mut weights = Vec::with_capacity(po.weights.len());
    for (k, &p) in po.weights.iter().enumerate() {
        let j = (offset + k as i64) as u64;
        let mut factor = 1.0;
        let mut sign = -1.0;
        for (i, &a) in spec.a_tilde.iter().enumerate() {
            factor += sign * a * charlier(i as u32 + 1, j, spec.lambda)?;
            sign = -sign;
        }
        weights.push(p * factor);
    }
    // Dropped |nu| mass: Poisson truncated mass inflated by the largest
    // Charlier perturbation factor at the retained edges.
    let edge_factor = {
        let lo_j = offset.max(0) as u64;
        let hi_j = (offset + po.weights.len() as i64 - 1) as u64;
        let mut f: f64 = 1.0;
        for &j in &[lo_j, hi_j] {
            let mut s = 1.0;
            for (i, &a) in spec.a_tilde.iter().enumerate() {
                s += a.abs() * charlier_bound(i as u32 + 1, j, spec.lambda);
            }
            f = f.max(s);
        }
        f
    };
    Ok(SignedMeasure::new(
        offset,
        weights,
        po.truncated_mass * edge_factor,
    ))
}

/// Which tail of nu the bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// |nu|{[0,m]}, valid for 0 <= m <= lambda.
    Lower,
    /// |nu|{[m,inf)}, valid for lambda + r <= m <= 2 lambda.
    Upper,
}

/// Tail bound |nu|{[0,m]} <= A-bar_r e^{-(lambda-m)^2/3lambda} (lower) and
/// |nu|{[m,inf)} <= A-bar_r e^{-(m-r-lambda)^2/3lambda} (upper).
pub fn nu_tail_bound(spec: &NuSpec, m: i64, side: TailSide) -> Result<f64> {
    let lambda = spec.lambda;
    let r = spec.order() as f64;
    let mf = m as f64;
    let a_bar = spec.a_bar();
    match side {
        TailSide::Lower => {
            if !(0.0..=lambda).contains(&mf) {
                return Err(Error::OutOfRegime(format!(
                    "lower tail bound requires 0 <= m <= lambda (m={m}, lambda={lambda})"
                )));
            }
            Ok(a_bar * (-(lambda - mf).powi(2) / (3.0 * lambda)).exp())
        }
        TailSide::Upper => {
            if mf < lambda + r || mf > 2.0 * lambda {
                return Err(Error::OutOfRegime(format!(
                    "upper tail bound requires lambda + r <= m <= 2 lambda (m={m}, lambda={lambda}, r={r})"
                )));
            }
            Ok(a_bar * (-(mf - r - lambda).powi(2) / (3.0 * lambda)).exp())
        }
    }
}
