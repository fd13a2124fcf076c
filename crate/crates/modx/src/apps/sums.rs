//! Worked example: Poisson-Charlier expansion for a sum of independent
//! integer-valued variables, built from summed factorial cumulants.

use crate::charlier::{build_nu, NuSpec};
use crate::coeffs::{factorial_cumulants, indept_sum_coeffs, CumulantSet};
use crate::error::{Error, Result};
use crate::measure::SignedMeasure;

fn measure_mean(m: &SignedMeasure) -> f64 {
    (m.min_support()..=m.max_support())
        .map(|j| j as f64 * m.at(j))
        .sum()
}

/// nu_r for S = X_1 + ... + X_n: lambda = sum of means, coefficients from
/// the summed factorial cumulants of orders 2..r+1. The sum is first
/// translated by an integer so the summed second factorial cumulant stays
/// within [-1/2, 1/2] (a growing kappa_2 wrecks the truncated exponential;
/// a translate always fixes it), and the result is shifted back.
pub fn independent_sum_expansion(pmfs: &[SignedMeasure], r: usize) -> Result<SignedMeasure> {
    if r == 0 || r > 4 {
        return Err(Error::InvalidInput(format!(
            "expansion order r must lie in 1..=4, got {r}"
        )));
    }
    if pmfs.is_empty() {
        return Err(Error::InvalidInput("need at least one summand".into()));
    }
    let mut lambda = 0.0f64;
    let mut kappa = vec![0.0f64; r];
    for (i, pmf) in pmfs.iter().enumerate() {
        if pmf.weights.iter().any(|&w| w < 0.0) || (pmf.total_mass() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "summand {i} is not a probability distribution"
            )));
        }
        lambda += measure_mean(pmf);
        let cs = factorial_cumulants(pmf, r + 1)?;
        for l in 2..=r + 1 {
            kappa[l - 2] += cs.get(l);
        }
    }
    if lambda <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sum must have positive mean, got {lambda}"
        )));
    }
    // translate S by m: lambda grows by m and the cumulants pick up the
    // series of m log(1+w), i.e. kappa_l += m (-1)^{l+1} (l-1)!
    let mut m = kappa[0].round();
    if lambda + m < 1.0 {
        m = (1.0 - lambda).ceil();
    }
    let mut fact = 1.0f64;
    for (i, k) in kappa.iter_mut().enumerate() {
        let l = i + 2;
        if l > 2 {
            fact *= (l - 1) as f64;
        }
        let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
        *k += sign * fact * m;
    }
    let atilde = indept_sum_coeffs(&CumulantSet { kappa }, r);
    let nu = build_nu(&NuSpec { lambda: lambda + m, a_tilde: atilde.coeffs })?;
    Ok(nu.shifted(-(m as i64)))
}
