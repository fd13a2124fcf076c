//! Explicit constants and bound evaluators: the characteristic-function
//! comparison bounds, their weakened multi-term variant, the Kolmogorov
//! corollary, the smooth total-variation bound, the parameter-change
//! bounds, and the total-variation expansion bound.

use crate::error::{Error, Result};
use crate::measure::{tail_mass, SignedMeasure};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Inputs shared by the bound evaluators. Not every field is used by every
/// bound; preconditions are checked per evaluator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Terms (gamma_m, t_m) of |psi_mu - psi_nu| <= sum gamma_m |theta|^{t_m}.
    pub gamma_terms: Vec<(f64, f64)>,
    /// Gaussian decay rate of the common factor chi.
    pub rho: f64,
    /// Additive slack in the psi comparison (multi-term variant only).
    #[serde(default)]
    pub epsilon: f64,
    /// Bound on |phi_mu - phi_nu| outside |theta| <= theta0.
    #[serde(default)]
    pub eta: f64,
    /// Splitting angle for the multi-term variant; in (0, pi].
    #[serde(default = "default_theta0")]
    pub theta0: f64,
    /// Prefactor gamma_2 of |chi(theta)| <= gamma_2 e^{-rho theta^2}.
    #[serde(default = "one")]
    pub gamma_chi: f64,
    /// Second-derivative constant gamma_3 of the smooth tv bound.
    #[serde(default)]
    pub gamma3: f64,
}

fn default_theta0() -> f64 {
    PI
}

fn one() -> f64 {
    1.0
}

impl BoundInputs {
    pub fn single(gamma1: f64, t: f64, rho: f64) -> Self {
        BoundInputs {
            gamma_terms: vec![(gamma1, t)],
            rho,
            epsilon: 0.0,
            eta: 0.0,
            theta0: PI,
            gamma_chi: 1.0,
            gamma3: 0.0,
        }
    }
}

/// Evaluated bounds plus every constant that fed them, for auditability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub loc_bound: f64,
    pub kolmogorov_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_bound: Option<f64>,
    /// For the multi-term part-2 bound: the interval bound is
    /// `kolmogorov_bound + (b0 - a0 + 1) * interval_slope`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_slope: Option<f64>,
    pub constants_used: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new() -> Self {
        BoundReport {
            loc_bound: 0.0,
            kolmogorov_bound: 0.0,
            tv_bound: None,
            interval_slope: None,
            constants_used: BTreeMap::new(),
        }
    }
}

/// t-th absolute moment of the standard normal:
/// m_t = 2^{t/2} Gamma((t+1)/2) / sqrt(pi).
pub fn normal_abs_moment(t: f64) -> f64 {
    assert!(t > -1.0);
    2f64.powf(t / 2.0) * gamma((t + 1.0) / 2.0) / PI.sqrt()
}

/// The four inversion constants for exponent t.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlphaConstants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha1_prime: f64,
    pub alpha2_prime: f64,
}

/// alpha_{1t} = max{ pi^t/(t+1), 2^{-(t+1)/2} m_t / sqrt(2 pi) };
/// alpha_{2t} = max{ 2^{-t/2} m_{t-1} sqrt(pi/2), pi^t/t }.
/// For t <= 1 the m_{t-1} branch is skipped (the moment formula is outside
/// its proof context there) and only pi^t/t is used.
/// The primed variants carry the (pi^2/2) factors that convert the decay
/// rate rho = 2 lambda / pi^2 into powers of lambda.
pub fn alpha_constants(t: f64) -> AlphaConstants {
    assert!(t > 0.0);
    let beta1 = PI.powf(t) / (t + 1.0);
    let beta1p = 2f64.powf(-(t + 1.0) / 2.0) * normal_abs_moment(t) / (2.0 * PI).sqrt();
    let alpha1 = beta1.max(beta1p);
    let alpha2 = if t > 1.0 {
        (2f64.powf(-t / 2.0) * normal_abs_moment(t - 1.0) * (PI / 2.0).sqrt())
            .max(PI.powf(t) / t)
    } else {
        PI.powf(t) / t
    };
    AlphaConstants {
        alpha1,
        alpha2,
        alpha1_prime: alpha1 * (PI * PI / 2.0).powf((t + 1.0) / 2.0),
        alpha2_prime: alpha2 * (PI * PI / 2.0).powf(t / 2.0),
    }
}

/// Basic inversion bound, single term:
/// d_loc <= alpha_{1t} gamma (rho v 1)^{-(t+1)/2};
/// sup over intervals (hence d_K) <= alpha_{2t} gamma (rho v 1)^{-t/2},
/// with gamma = gamma_1 gamma_2.
pub fn bound_th0(inputs: &BoundInputs) -> Result<BoundReport> {
    if inputs.gamma_terms.len() != 1 {
        return Err(Error::InvalidInput(
            "the single-term bound requires exactly one (gamma, t) term".into(),
        ));
    }
    let (gamma1, t) = inputs.gamma_terms[0];
    if t <= 0.0 || gamma1 < 0.0 {
        return Err(Error::InvalidInput("need t > 0 and gamma >= 0".into()));
    }
    let a = alpha_constants(t);
    let g = gamma1 * inputs.gamma_chi;
    let rc = inputs.rho.max(1.0);
    let mut rep = BoundReport::new();
    rep.loc_bound = a.alpha1 * g * rc.powf(-(t + 1.0) / 2.0);
    rep.kolmogorov_bound = a.alpha2 * g * rc.powf(-t / 2.0);
    rep.constants_used.insert("alpha1".into(), a.alpha1);
    rep.constants_used.insert("alpha2".into(), a.alpha2);
    rep.constants_used.insert("gamma".into(), g);
    rep.constants_used.insert("t".into(), t);
    rep.constants_used.insert("rho".into(), inputs.rho);
    Ok(rep)
}

fn alpha_tildes(inputs: &BoundInputs) -> (f64, f64) {
    let a1 = if inputs.rho > 0.0 {
        (inputs.theta0 / PI).min(1.0 / (2.0 * (PI * inputs.rho).sqrt()))
    } else {
        inputs.theta0 / PI
    };
    (a1, 1.0 - inputs.theta0 / PI)
}

/// Multi-term variant with slack. Part 1 goes into `loc_bound`; part 2 is
/// returned as intercept (`kolmogorov_bound`) plus per-point slope
/// (`interval_slope`): the bound over intervals within [a0,b0] is
/// intercept + (b0-a0+1)*slope.
pub fn bound_th0_prime(inputs: &BoundInputs) -> Result<BoundReport> {
    if inputs.theta0 <= 0.0 || inputs.theta0 > PI {
        return Err(Error::InvalidInput("theta0 must lie in (0, pi]".into()));
    }
    if inputs.gamma_terms.is_empty() {
        return Err(Error::InvalidInput("need at least one gamma term".into()));
    }
    let (at1, at2) = alpha_tildes(inputs);
    let g = inputs.gamma_chi;
    let rc = inputs.rho.max(1.0);
    let slack = at1 * g * inputs.epsilon + at2 * inputs.eta;
    let mut loc = slack;
    let mut kol = 0.0;
    for &(gm, tm) in &inputs.gamma_terms {
        let a = alpha_constants(tm);
        loc += gm * g * a.alpha1 * rc.powf(-(tm + 1.0) / 2.0);
        kol += gm * g * a.alpha2 * rc.powf(-tm / 2.0);
    }
    let mut rep = BoundReport::new();
    rep.loc_bound = loc;
    rep.kolmogorov_bound = kol;
    rep.interval_slope = Some(slack);
    rep.constants_used.insert("alpha_tilde1".into(), at1);
    rep.constants_used.insert("alpha_tilde2".into(), at2);
    rep.constants_used.insert("slack".into(), slack);
    rep.constants_used.insert("rho".into(), inputs.rho);
    Ok(rep)
}

/// Kolmogorov / total-variation corollary: minimize over windows [a,b]
/// the interval bound plus the absolute tails of both measures. With
/// `probability_mu` set, the variant 1 - nu{[a,b]} + 2 eps^K + tail(nu)
/// is used for d_K.
pub fn bound_cor0(
    inputs: &BoundInputs,
    mu: &SignedMeasure,
    nu: &SignedMeasure,
    probability_mu: bool,
) -> Result<BoundReport> {
    let base = bound_th0_prime(inputs)?;
    let slope = base.interval_slope.unwrap_or(0.0);
    let loc_sum: f64 = {
        // sum gamma_m gamma alpha_{1 t_m} (rho v 1)^{-(t_m+1)/2}
        let rc = inputs.rho.max(1.0);
        inputs
            .gamma_terms
            .iter()
            .map(|&(gm, tm)| {
                gm * inputs.gamma_chi * alpha_constants(tm).alpha1 * rc.powf(-(tm + 1.0) / 2.0)
            })
            .sum()
    };

    // Candidate endpoints: support endpoints plus mean +/- k*sd gridpoints.
    let mut candidates: Vec<i64> = vec![
        mu.min_support(),
        mu.max_support(),
        nu.min_support(),
        nu.max_support(),
    ];
    let mean = {
        let m: f64 = (mu.min_support()..=mu.max_support())
            .map(|j| j as f64 * mu.at(j))
            .sum();
        m
    };
    let var: f64 = (mu.min_support()..=mu.max_support())
        .map(|j| (j as f64 - mean).powi(2) * mu.at(j))
        .sum();
    let sd = var.abs().sqrt().max(1.0);
    for k in 1..=10 {
        candidates.push((mean - k as f64 * sd).floor() as i64);
        candidates.push((mean + k as f64 * sd).ceil() as i64);
    }
    candidates.sort_unstable();
    candidates.dedup();

    let mut best_k = f64::INFINITY;
    let mut best_tv = f64::INFINITY;
    for (i, &a) in candidates.iter().enumerate() {
        for &b in &candidates[i..] {
            let n = (b - a + 1) as f64;
            let eps_k = base.kolmogorov_bound + n * slope;
            let eps_1 = n * (loc_sum + slope);
            let tails = tail_mass(mu, a, b) + tail_mass(nu, a, b);
            let k_bound = if probability_mu {
                let alt = 1.0 - nu.mass_on(a, b) + 2.0 * eps_k + tail_mass(nu, a, b);
                (eps_k + tails).min(alt)
            } else {
                eps_k + tails
            };
            best_k = best_k.min(k_bound);
            best_tv = best_tv.min(eps_1 + tails);
        }
    }
    let mut rep = base;
    rep.kolmogorov_bound = best_k;
    rep.tv_bound = Some(best_tv);
    rep.interval_slope = None;
    Ok(rep)
}

/// beta_3(t, gamma_3) = m_{t-2} / (4t 2^{t/2} sqrt(pi))
///   * {4t + (2t+1) gamma_3 + (t+1) gamma_3^2}.
pub fn beta3(t: f64, gamma3: f64) -> f64 {
    normal_abs_moment(t - 2.0) / (4.0 * t * 2f64.powf(t / 2.0) * PI.sqrt())
        * (4.0 * t + (2.0 * t + 1.0) * gamma3 + (t + 1.0) * gamma3 * gamma3)
}

/// Smooth total-variation bound:
/// ||mu - nu|| <= alpha_3 gamma (rho v 1)^{-t/2}, with
/// alpha_3 = 2 beta_3 + 5 alpha_{1t} / (t(t-1)); requires t >= 2, rho >= 1.
pub fn bound_th0_tv(inputs: &BoundInputs) -> Result<BoundReport> {
    if inputs.gamma_terms.len() != 1 {
        return Err(Error::InvalidInput(
            "the tv bound requires exactly one (gamma, t) term".into(),
        ));
    }
    let (gamma1, t) = inputs.gamma_terms[0];
    if t < 2.0 {
        return Err(Error::OutOfRegime(format!("tv bound requires t >= 2, got {t}")));
    }
    if inputs.rho < 1.0 {
        return Err(Error::OutOfRegime(format!(
            "tv bound requires rho >= 1, got {}",
            inputs.rho
        )));
    }
    if inputs.gamma3 <= 0.0 {
        return Err(Error::OutOfRegime("tv bound requires gamma3 > 0".into()));
    }
    let b3 = beta3(t, inputs.gamma3);
    let a = alpha_constants(t);
    let alpha3 = 2.0 * b3 + 5.0 * a.alpha1 / (t * (t - 1.0));
    let g = gamma1 * inputs.gamma_chi;
    let mut rep = BoundReport::new();
    rep.tv_bound = Some(alpha3 * g * inputs.rho.max(1.0).powf(-t / 2.0));
    rep.loc_bound = a.alpha1 * g / (t * (t - 1.0)) * inputs.rho.max(1.0).powf(-(t + 1.0) / 2.0);
    rep.kolmogorov_bound = rep.tv_bound.unwrap() / 2.0;
    rep.constants_used.insert("beta3".into(), b3);
    rep.constants_used.insert("alpha3".into(), alpha3);
    rep.constants_used.insert("gamma3".into(), inputs.gamma3);
    Ok(rep)
}

/// Parameter-change report: bounds for swapping coefficients (nu1) and for
/// swapping the Poisson mean (nu2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewParsReport {
    pub loc_nu1: f64,
    pub kolmogorov_nu1: f64,
    pub loc_nu2: Option<f64>,
    pub kolmogorov_nu2: Option<f64>,
}

/// Bounds for altered expansion parameters. With rho = 2 lambda / pi^2 and
/// rho' = 2 lambda' / pi^2 and a_0 = 1:
/// d_loc(mu, nu1) <= sum alpha_{1l} |a_l - a'_l| (rho v 1)^{-(l+1)/2}, etc.;
/// the nu2 branch carries the factor (lambda - lambda') and requires
/// lambda > lambda' > 0.
pub fn bound_newpars(
    a: &[f64],
    a_prime: &[f64],
    lambda: f64,
    lambda_prime: Option<f64>,
) -> Result<NewParsReport> {
    if a.len() != a_prime.len() {
        return Err(Error::InvalidInput("coefficient vectors must share length".into()));
    }
    let rho = 2.0 * lambda / (PI * PI);
    let rc = rho.max(1.0);
    let mut loc1 = 0.0;
    let mut kol1 = 0.0;
    for (l, (&al, &alp)) in a.iter().zip(a_prime).enumerate() {
        let lf = (l + 1) as f64;
        let ac = alpha_constants(lf);
        let d = (al - alp).abs();
        loc1 += ac.alpha1 * d * rc.powf(-(lf + 1.0) / 2.0);
        kol1 += ac.alpha2 * d * rc.powf(-lf / 2.0);
    }
    let (loc2, kol2) = match lambda_prime {
        None => (None, None),
        Some(lp) => {
            if lp <= 0.0 || lambda <= lp {
                return Err(Error::OutOfRegime(format!(
                    "the mean-change branch requires lambda > lambda' > 0 (lambda={lambda}, lambda'={lp})"
                )));
            }
            let rpc = (2.0 * lp / (PI * PI)).max(1.0);
            let diff = lambda - lp;
            let mut loc = 0.0;
            let mut kol = 0.0;
            for l in 1..=(a.len() + 1) {
                let lf = l as f64;
                let ac = alpha_constants(lf);
                // a_{l-1} with a_0 = 1
                let coeff = if l == 1 { 1.0 } else { a[l - 2].abs() };
                loc += ac.alpha1 * coeff * rpc.powf(-(lf + 1.0) / 2.0);
                kol += ac.alpha2 * coeff * rpc.powf(-lf / 2.0);
            }
            (Some(diff * loc), Some(diff * kol))
        }
    };
    Ok(NewParsReport {
        loc_nu1: loc1,
        kolmogorov_nu1: kol1,
        loc_nu2: loc2,
        kolmogorov_nu2: kol2,
    })
}

/// Total-variation expansion bound. `k_plus_g` is K_{r delta} + G_{r delta},
/// t = r + delta, and `a_bar_r` stands in for the tail prefactor B_r.
/// Regimes: k_plus_g < 1, or k_plus_g >= 1 with lambda^{(r+1)/2} >= k_plus_g.
pub fn bound_th2(
    k_plus_g: f64,
    lambda: f64,
    t: f64,
    r: usize,
    a_bar_r: f64,
) -> Result<BoundReport> {
    if k_plus_g <= 0.0 || lambda <= 0.0 {
        return Err(Error::InvalidInput("need k_plus_g > 0 and lambda > 0".into()));
    }
    let a = alpha_constants(t);
    let rf = r as f64;
    let br = a_bar_r;
    let mut rep = BoundReport::new();
    let logmax = (lambda + 1.0).ln().sqrt();
    let tv = if k_plus_g < 1.0 {
        let beta3t = a.alpha1_prime * ((6.0 * (rf + 1.0)).sqrt() + rf + 4.0)
            + 2.0 * a.alpha2_prime
            + 4.0 * br;
        let beta3tp = a.alpha1_prime * (rf + 4.0) + a.alpha2 + 2.0 * br;
        let alpha4 = beta3t.max(beta3tp);
        rep.constants_used.insert("alpha4".into(), alpha4);
        alpha4
            * k_plus_g
            * lambda.max(1.0).powf(-t / 2.0)
            * 1f64.max(k_plus_g.ln().abs().sqrt()).max(logmax)
    } else if lambda.powf((rf + 1.0) / 2.0) >= k_plus_g {
        let alpha5 = a.alpha1_prime * ((6.0 * (rf + 1.0)).sqrt() + rf + 2.0)
            + 2.0 * a.alpha2_prime
            + 4.0 * br;
        rep.constants_used.insert("alpha5".into(), alpha5);
        alpha5 * k_plus_g * lambda.powf(-t / 2.0) * 1f64.max(logmax)
    } else {
        return Err(Error::OutOfRegime(format!(
            "K+G = {k_plus_g} >= 1 but lambda^((r+1)/2) = {} < K+G: no useful bound in this regime",
            lambda.powf((rf + 1.0) / 2.0)
        )));
    };
    rep.tv_bound = Some(tv);
    rep.kolmogorov_bound = tv / 2.0;
    rep.loc_bound = a.alpha1_prime * k_plus_g * lambda.max(1.0).powf(-(t + 1.0) / 2.0);
    rep.constants_used.insert("k_plus_g".into(), k_plus_g);
    rep.constants_used.insert("t".into(), t);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Simpson-rule quadrature oracle for the normal absolute moment.
    fn m_t_quadrature(t: f64) -> f64 {
        let n = 200_000;
        let hi = 40.0f64;
        let h = hi / n as f64;
        let f = |y: f64| y.powf(t) * (-y * y / 2.0).exp();
        let mut s = f(0.0) + f(hi);
        for i in 1..n {
            let y = i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(y);
        }
        2.0 * (s * h / 3.0) / (2.0 * PI).sqrt()
    }

    #[test]
    fn normal_moments() {
        assert!((normal_abs_moment(2.0) - 1.0).abs() < 1e-12);
        assert!((normal_abs_moment(4.0) - 3.0).abs() < 1e-12);
        assert!((normal_abs_moment(1.0) - 0.7978845608028654).abs() < 1e-12);
        for &t in &[1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
            let q = m_t_quadrature(t);
            assert!(
                (normal_abs_moment(t) - q).abs() < 1e-10,
                "t={t}: {} vs {q}",
                normal_abs_moment(t)
            );
        }
    }

    #[test]
    fn alpha_branch_evaluation() {
        // t = 1: beta' = m_1 / (2 sqrt(2 pi)) ~ 0.159 < pi/2
        let a = alpha_constants(1.0);
        assert!((a.alpha1 - PI / 2.0).abs() < 1e-12);
        // t = 2: max{ m_1 sqrt(pi/2) / 2, pi^2/2 } = pi^2/2
        let a = alpha_constants(2.0);
        assert!((a.alpha2 - PI * PI / 2.0).abs() < 1e-12);
        // alpha1 >= the beta' branch always
        for &t in &[0.5, 1.0, 2.0, 3.7] {
            let b = 2f64.powf(-(t + 1.0) / 2.0) * normal_abs_moment(t) / (2.0 * PI).sqrt();
            assert!(alpha_constants(t).alpha1 >= b);
        }
    }

    #[test]
    fn th0_clamp_and_linearity() {
        let rep = bound_th0(&BoundInputs::single(1.0, 1.0, 0.0)).unwrap();
        assert!((rep.loc_bound - alpha_constants(1.0).alpha1).abs() < 1e-14);
        let r1 = bound_th0(&BoundInputs::single(0.7, 2.0, 3.0)).unwrap();
        let r2 = bound_th0(&BoundInputs::single(1.4, 2.0, 3.0)).unwrap();
        assert!((r2.loc_bound - 2.0 * r1.loc_bound).abs() < 1e-14);
        assert!((r2.kolmogorov_bound - 2.0 * r1.kolmogorov_bound).abs() < 1e-14);
    }

    #[test]
    fn th0_prime_degenerate_cases() {
        // epsilon = eta = 0, one term: part 1 reduces to the single bound
        let mut inp = BoundInputs::single(0.5, 1.5, 4.0);
        inp.theta0 = PI;
        let p = bound_th0_prime(&inp).unwrap();
        let s = bound_th0(&inp).unwrap();
        assert!((p.loc_bound - s.loc_bound).abs() < 1e-14);
        // theta0 = pi kills the eta term
        inp.eta = 123.0;
        let p = bound_th0_prime(&inp).unwrap();
        assert!((p.loc_bound - s.loc_bound).abs() < 1e-14);
    }

    #[test]
    fn th0_prime_two_term_hand_value() {
        let inp = BoundInputs {
            gamma_terms: vec![(0.3, 1.0), (0.2, 2.0)],
            rho: 9.0,
            epsilon: 0.01,
            eta: 0.005,
            theta0: 2.0,
            gamma_chi: 1.5,
            gamma3: 0.0,
        };
        let p = bound_th0_prime(&inp).unwrap();
        let at1 = (2.0 / PI).min(1.0 / (2.0 * (PI * 9.0f64).sqrt()));
        let at2 = 1.0 - 2.0 / PI;
        let slack = at1 * 1.5 * 0.01 + at2 * 0.005;
        let a1 = alpha_constants(1.0);
        let a2 = alpha_constants(2.0);
        let loc = 0.3 * 1.5 * a1.alpha1 * 9f64.powf(-1.0)
            + 0.2 * 1.5 * a2.alpha1 * 9f64.powf(-1.5)
            + slack;
        let kol = 0.3 * 1.5 * a1.alpha2 * 9f64.powf(-0.5) + 0.2 * 1.5 * a2.alpha2 / 9.0;
        assert!((p.loc_bound - loc).abs() < 1e-14);
        assert!((p.kolmogorov_bound - kol).abs() < 1e-14);
        assert!((p.interval_slope.unwrap() - slack).abs() < 1e-14);
    }

    #[test]
    fn tv_formula_value() {
        // t = 2, gamma3 = 1: beta_3 = 1/sqrt(pi)
        assert!((beta3(2.0, 1.0) - 1.0 / PI.sqrt()).abs() < 1e-14);
        let mut inp = BoundInputs::single(1.0, 2.0, 2.0);
        inp.gamma3 = 1.0;
        let rep = bound_th0_tv(&inp).unwrap();
        let alpha3 = 2.0 / PI.sqrt() + 5.0 * alpha_constants(2.0).alpha1 / 2.0;
        assert!((rep.tv_bound.unwrap() - alpha3 / 2.0).abs() < 1e-12);
        // doubling gamma doubles the bound
        let mut inp2 = BoundInputs::single(2.0, 2.0, 2.0);
        inp2.gamma3 = 1.0;
        let rep2 = bound_th0_tv(&inp2).unwrap();
        assert!((rep2.tv_bound.unwrap() - 2.0 * rep.tv_bound.unwrap()).abs() < 1e-12);
        // hypotheses enforced
        assert!(bound_th0_tv(&BoundInputs::single(1.0, 1.5, 2.0)).is_err());
        assert!(bound_th0_tv(&BoundInputs::single(1.0, 2.0, 0.5)).is_err());
    }

    #[test]
    fn newpars_degenerate() {
        let r = bound_newpars(&[0.2, 0.1], &[0.2, 0.1], 10.0, None).unwrap();
        assert_eq!(r.loc_nu1, 0.0);
        assert_eq!(r.kolmogorov_nu1, 0.0);
        // lambda -> lambda' limit: factor (lambda - lambda') -> 0
        let r = bound_newpars(&[0.2], &[0.1], 50.0, Some(50.0 - 1e-9)).unwrap();
        assert!(r.loc_nu2.unwrap() < 1e-8);
        assert!(bound_newpars(&[0.2], &[0.1], 5.0, Some(6.0)).is_err());
    }

    #[test]
    fn newpars_hand_value() {
        let r = bound_newpars(&[0.2], &[0.1], 50.0, None).unwrap();
        let rho: f64 = 100.0 / (PI * PI);
        let a = alpha_constants(1.0);
        assert!((r.loc_nu1 - a.alpha1 * 0.1 * rho.powf(-1.0)).abs() < 1e-14);
        assert!((r.kolmogorov_nu1 - a.alpha2 * 0.1 * rho.powf(-0.5)).abs() < 1e-14);
    }

    #[test]
    fn th2_branches() {
        // K+G = 1, lambda large: second branch with max = sqrt(log(lambda+1))
        let rep = bound_th2(1.0, 100.0, 2.0, 1, 1.6).unwrap();
        assert!(rep.constants_used.contains_key("alpha5"));
        let a = alpha_constants(2.0);
        let alpha5 = a.alpha1_prime * ((12.0f64).sqrt() + 3.0) + 2.0 * a.alpha2_prime + 4.0 * 1.6;
        let expect = alpha5 * 1.0 * 100f64.powf(-1.0) * 101f64.ln().sqrt();
        assert!((rep.tv_bound.unwrap() - expect).abs() < 1e-10);
        // out of regime
        assert!(bound_th2(10.0, 1.5, 2.0, 1, 1.0).is_err());
        // small K+G branch
        let rep = bound_th2(0.5, 100.0, 2.0, 1, 1.6).unwrap();
        assert!(rep.constants_used.contains_key("alpha4"));
    }

    #[test]
    fn monotonicity_in_gamma_and_rho() {
        let mut last = 0.0;
        for g in [0.1, 0.5, 1.0, 2.0] {
            let r = bound_th0(&BoundInputs::single(g, 1.5, 5.0)).unwrap();
            assert!(r.loc_bound >= last);
            last = r.loc_bound;
        }
        let mut last = f64::INFINITY;
        for rho in [1.0, 2.0, 5.0, 50.0] {
            let r = bound_th0(&BoundInputs::single(1.0, 1.5, rho)).unwrap();
            assert!(r.loc_bound <= last);
            last = r.loc_bound;
        }
    }
}
