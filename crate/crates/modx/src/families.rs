//! Translated/two-point-mixed approximating distributions, the general
//! one-parameter family abstraction with its cf-decay measurement and
//! moment-matching solver, and the Poisson, compound-Poisson and Bessel
//! families.

use crate::charlier::{poisson_measure, TRUNC_EPS};
use crate::error::{Error, Result};
use crate::measure::{convolve, SignedMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of a two-point-mixed translate: the approximating measure is
/// p R_{lambda'}{j-m-1} + (1-p) R_{lambda'}{j-m}.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TranslatedParams {
    pub lambda_prime: f64,
    pub m: i64,
    pub p: f64,
}

/// A one-parameter family R_lambda of integer distributions with variance
/// increasing to infinity in lambda.
pub trait DiscreteFamily {
    fn lambda_min(&self) -> f64;
    fn mean(&self, lambda: f64) -> f64;
    fn variance(&self, lambda: f64) -> f64;
    fn cf(&self, lambda: f64, theta: f64) -> Complex64;
    /// Truncated pmf as a signed measure (library truncation policy).
    fn measure(&self, lambda: f64) -> SignedMeasure;
}

/// Q_{mp}(R_lambda){j} = p R{j-m-1} + (1-p) R{j-m}.
pub fn q_measure(family: &dyn DiscreteFamily, params: &TranslatedParams) -> SignedMeasure {
    let r = family.measure(params.lambda_prime);
    let a = r.shifted(params.m);
    let b = r.shifted(params.m + 1);
    a.linear_comb(1.0 - params.p, &b, params.p)
}

/// Characteristic function of Q: e^{im theta}(1 + p(e^{i theta}-1)) r(theta).
pub fn q_cf(
    family: &dyn DiscreteFamily,
    params: &TranslatedParams,
    theta: f64,
) -> Complex64 {
    let half = (0.5 * theta).sin();
    let w = Complex64::new(-2.0 * half * half, theta.sin());
    let shift = Complex64::new(
        (params.m as f64 * theta).cos(),
        (params.m as f64 * theta).sin(),
    );
    shift * (Complex64::new(1.0, 0.0) + params.p * w) * family.cf(params.lambda_prime, theta)
}

/// Mean-only matching: lambda' = lambda + a_1, no translation or mixing.
pub fn poisson_mean_match(lambda: f64, a1: f64) -> Result<TranslatedParams> {
    let lp = lambda + a1;
    if lp <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "mean-matched Poisson parameter lambda + a1 = {lp} must be positive"
        )));
    }
    Ok(TranslatedParams { lambda_prime: lp, m: 0, p: 0.0 })
}

/// Mean-and-variance matching within the translated Poisson family:
/// m = floor(a1 - (2 a2 - a1^2)), p = sqrt(frac(a1 - (2 a2 - a1^2))),
/// lambda' = lambda + (2 a2 - a1^2) - p(1-p). Both moment equations then
/// hold by construction.
pub fn translated_poisson_params(lambda: f64, a1: f64, a2: f64) -> Result<TranslatedParams> {
    let v = 2.0 * a2 - a1 * a1; // variance shift
    let x = a1 - v;
    let m = x.floor();
    let p = (x - m).sqrt();
    let lp = lambda + v - p * (1.0 - p);
    if lp <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "translated Poisson parameter lambda' = {lp} must be positive"
        )));
    }
    Ok(TranslatedParams { lambda_prime: lp, m: m as i64, p })
}

/// Moment-matching solver for a general family: find (lambda', m, p) with
/// m + mean(lambda') + p = mean_x and variance(lambda') + p(1-p) = var_x.
/// Requires var_x >= variance(lambda_min) + 1/4.
pub fn general_params_solver(
    family: &dyn DiscreteFamily,
    mean_x: f64,
    var_x: f64,
) -> Result<TranslatedParams> {
    let lmin = family.lambda_min();
    if var_x < family.variance(lmin) + 0.25 {
        return Err(Error::InvalidInput(format!(
            "solver requires var_x >= sigma^2(lambda_min) + 1/4 = {}",
            family.variance(lmin) + 0.25
        )));
    }
    // invert sigma^2 by bisection; sigma^2 is increasing
    let invert = |target: f64| -> f64 {
        let mut lo = lmin;
        let mut hi = lmin.max(1.0);
        while family.variance(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if family.variance(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-12 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let lambda_of = |p: f64| invert(var_x - p * (1.0 - p));
    // nudge guards against floor(0 - tiny) landing one integer low when the
    // target sits exactly on the lattice
    let x0 = mean_x - family.mean(lambda_of(0.0));
    let m_star = (x0 + 1e-9).floor();
    let f = |p: f64| mean_x - family.mean(lambda_of(p)) - m_star - p;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (flo, fhi) = (f(lo), f(hi));
    if flo <= 0.0 {
        // lattice-exact case: p = 0 already solves both equations
        if flo > -1e-8 {
            return Ok(TranslatedParams {
                lambda_prime: lambda_of(0.0),
                m: m_star as i64,
                p: 0.0,
            });
        }
        return Err(Error::InvalidInput(format!(
            "matching function does not bracket a root: f(0)={flo}, f(1)={fhi}"
        )));
    }
    if fhi >= 0.0 {
        return Err(Error::InvalidInput(format!(
            "matching function does not bracket a root: f(0)={flo}, f(1)={fhi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 {
            break;
        }
    }
    let mut p = 0.5 * (lo + hi);
    // near-lattice targets: inversion noise of order 1e-11 in f(0) turns into
    // p ~ sqrt(1e-11); snap those to the exact integer solution
    if p < 1e-5 && flo < 1e-8 {
        p = 0.0;
    }
    Ok(TranslatedParams {
        lambda_prime: lambda_of(p),
        m: m_star as i64,
        p,
    })
}

/// Grid measurement of the family's cf-decay function:
/// h(lambda) = inf_{0<|theta|<=pi} -log|r_lambda(theta)| / theta^2,
/// taken over a 4096-point grid and deflated by a 0.99 safety factor.
pub fn h_lambda(family: &dyn DiscreteFamily, lambda: f64) -> f64 {
    let mut inf = f64::INFINITY;
    for k in 1..=4096 {
        let theta = PI * k as f64 / 4096.0;
        let mag = family.cf(lambda, theta).norm();
        let v = if mag <= 0.0 {
            f64::INFINITY
        } else {
            -mag.ln() / (theta * theta)
        };
        inf = inf.min(v);
    }
    if inf.is_finite() {
        0.99 * inf.max(0.0)
    } else {
        f64::INFINITY
    }
}

/// The Poisson family R_lambda = Po(lambda).
pub struct PoissonFamily;

impl DiscreteFamily for PoissonFamily {
    fn lambda_min(&self) -> f64 {
        f64::MIN_POSITIVE
    }
    fn mean(&self, lambda: f64) -> f64 {
        lambda
    }
    fn variance(&self, lambda: f64) -> f64 {
        lambda
    }
    fn cf(&self, lambda: f64, theta: f64) -> Complex64 {
        let mag = (lambda * (theta.cos() - 1.0)).exp();
        let arg = lambda * theta.sin();
        Complex64::new(mag * arg.cos(), mag * arg.sin())
    }
    fn measure(&self, lambda: f64) -> SignedMeasure {
        poisson_measure(lambda)
    }
}

/// Compound Poisson: Y = sum_j j Z_j with Z_j ~ Po(lambda mu_j) independent,
/// mu a probability on the nonzero integers.
pub struct CompoundPoissonFamily {
    jump: SignedMeasure,
}

impl CompoundPoissonFamily {
    pub fn new(jump_dist: SignedMeasure) -> Result<Self> {
        if jump_dist.at(0) != 0.0 {
            return Err(Error::InvalidInput(
                "compound Poisson jump distribution must put no mass at 0".into(),
            ));
        }
        if jump_dist.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput(
                "jump distribution must be a probability".into(),
            ));
        }
        Ok(CompoundPoissonFamily { jump: jump_dist })
    }

    fn jumps(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        (self.jump.min_support()..=self.jump.max_support())
            .map(|j| (j, self.jump.at(j)))
            .filter(|&(_, w)| w > 0.0)
    }
}

impl DiscreteFamily for CompoundPoissonFamily {
    fn lambda_min(&self) -> f64 {
        f64::MIN_POSITIVE
    }
    fn mean(&self, lambda: f64) -> f64 {
        lambda * self.jumps().map(|(j, w)| j as f64 * w).sum::<f64>()
    }
    fn variance(&self, lambda: f64) -> f64 {
        lambda * self.jumps().map(|(j, w)| (j * j) as f64 * w).sum::<f64>()
    }
    fn cf(&self, lambda: f64, theta: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, w) in self.jumps() {
            let jt = j as f64 * theta;
            s += w * Complex64::new(jt.cos() - 1.0, jt.sin());
        }
        (lambda * s).exp()
    }
    fn measure(&self, lambda: f64) -> SignedMeasure {
        // convolve the per-jump layers; layer j is j*Z with Z ~ Po(lambda mu_j)
        let mut acc = SignedMeasure::dirac(0);
        for (j, w) in self.jumps() {
            let z = poisson_measure(lambda * w);
            // spread the Poisson onto the lattice jZ
            let span = (z.weights.len() - 1) as i64 * j.abs() + 1;
            let mut weights = vec![0.0f64; span as usize];
            let base = if j > 0 {
                z.min_support() * j
            } else {
                z.max_support() * j
            };
            for (k, &p) in z.weights.iter().enumerate() {
                let point = (z.min_support() + k as i64) * j;
                weights[(point - base) as usize] = p;
            }
            let layer = SignedMeasure::new(base, weights, z.truncated_mass);
            acc = convolve(&acc, &layer);
        }
        acc
    }
}

/// Bessel-type family B(lambda){j} = L(lambda)^{-1} lambda^j / (j!(j-1)!)
/// on j >= 1; normalization and moments by direct summation.
pub struct BesselFamily;

impl BesselFamily {
    /// Unnormalized terms lambda^j/(j!(j-1)!) until the tail drops below
    /// TRUNC_EPS relative to the running sum.
    fn terms(lambda: f64) -> Vec<f64> {
        let mut terms = Vec::new();
        let mut t = lambda; // j = 1
        let mut sum = 0.0;
        let mut j = 1u64;
        loop {
            terms.push(t);
            sum += t;
            j += 1;
            t *= lambda / (j as f64 * (j - 1) as f64);
            if t < TRUNC_EPS * sum && j > lambda.sqrt() as u64 + 2 {
                break;
            }
            if j > 10_000 {
                break;
            }
        }
        terms
    }
}

impl DiscreteFamily for BesselFamily {
    fn lambda_min(&self) -> f64 {
        1.0
    }
    fn mean(&self, lambda: f64) -> f64 {
        let terms = Self::terms(lambda);
        let l: f64 = terms.iter().sum();
        terms
            .iter()
            .enumerate()
            .map(|(i, t)| (i + 1) as f64 * t)
            .sum::<f64>()
            / l
    }
    fn variance(&self, lambda: f64) -> f64 {
        let terms = Self::terms(lambda);
        let l: f64 = terms.iter().sum();
        let m1: f64 = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (i + 1) as f64 * t)
            .sum::<f64>()
            / l;
        let m2: f64 = terms
            .iter()
            .enumerate()
            .map(|(i, t)| ((i + 1) as f64).powi(2) * t)
            .sum::<f64>()
            / l;
        m2 - m1 * m1
    }
    fn cf(&self, lambda: f64, theta: f64) -> Complex64 {
        let terms = Self::terms(lambda);
        let l: f64 = terms.iter().sum();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, t) in terms.iter().enumerate() {
            let jt = (i + 1) as f64 * theta;
            s += t * Complex64::new(jt.cos(), jt.sin());
        }
        s / l
    }
    fn measure(&self, lambda: f64) -> SignedMeasure {
        let terms = Self::terms(lambda);
        let l: f64 = terms.iter().sum();
        let weights: Vec<f64> = terms.iter().map(|t| t / l).collect();
        SignedMeasure::new(1, weights, 0.0)
    }
}
