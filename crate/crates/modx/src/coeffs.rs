//! Expansion-basis conversion, the Gamma_r residual constant, factorial
//! cumulants, and the coefficient machinery for sums of independent
//! integer variables.

use crate::error::{Error, Result};
use crate::measure::{compensated_sum, distance, Metric, SignedMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which polynomial basis a coefficient vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// psi_r(theta) = 1 + sum a_l (i theta)^l
    ThetaPower,
    /// psi~_r(theta) = 1 + sum a~_l (e^{i theta} - 1)^l
    WPower,
}

/// Coefficients a_1..a_r (or a~_1..a~_r); index 0 is implicitly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffs {
    pub basis: Basis,
    pub coeffs: Vec<f64>,
}

impl ExpansionCoeffs {
    pub fn theta_power(coeffs: Vec<f64>) -> Self {
        ExpansionCoeffs { basis: Basis::ThetaPower, coeffs }
    }

    pub fn w_power(coeffs: Vec<f64>) -> Self {
        ExpansionCoeffs { basis: Basis::WPower, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluate the expansion polynomial at theta.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let base = match self.basis {
            Basis::ThetaPower => Complex64::new(0.0, theta),
            Basis::WPower => {
                // cos(theta) - 1 via the half-angle form to avoid cancellation
                let half = (0.5 * theta).sin();
                Complex64::new(-2.0 * half * half, theta.sin())
            }
        };
        let mut acc = Complex64::new(1.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for &c in &self.coeffs {
            pow *= base;
            acc += c * pow;
        }
        acc
    }
}

/// An expansion together with its residual-bound metadata (K, delta):
/// |psi(theta) - psi_r(theta)| <= K |theta|^{r+delta}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundedExpansion {
    pub coeffs: ExpansionCoeffs,
    pub k: f64,
    pub delta: f64,
}

/// Factorial cumulants kappa_2..kappa_{r+1} (order 2 upward; the order-1
/// cumulant, the mean, travels separately).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CumulantSet {
    pub kappa: Vec<f64>,
}

impl CumulantSet {
    /// kappa_l for l >= 2.
    pub fn get(&self, l: usize) -> f64 {
        assert!(l >= 2);
        self.kappa.get(l - 2).copied().unwrap_or(0.0)
    }

    pub fn max_order(&self) -> usize {
        self.kappa.len() + 1
    }
}

/// Coefficient of (i theta)^j in w(theta)^l, where w = e^{i theta) - 1:
/// equals sum over compositions (s_1..s_l) of j-l of prod 1/(s_t+1)!.
/// Returned as the unit-lower-triangular matrix M[j][l], 1 <= l <= j <= r.
fn w_power_matrix(r: usize) -> Vec<Vec<f64>> {
    // series of w in powers of (i theta): coefficient of (i theta)^s is 1/s!
    let mut w_series = vec![0.0f64; r + 1];
    let mut fact = 1.0;
    for (s, slot) in w_series.iter_mut().enumerate().skip(1) {
        fact *= s as f64;
        *slot = 1.0 / fact;
    }
    let mut m = vec![vec![0.0f64; r + 1]; r + 1];
    let mut pow = vec![0.0f64; r + 1];
    pow[0] = 1.0; // w^0
    for l in 1..=r {
        let mut next = vec![0.0f64; r + 1];
        for (i, &a) in pow.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (s, &b) in w_series.iter().enumerate() {
                if i + s <= r {
                    next[i + s] += a * b;
                }
            }
        }
        pow = next;
        for j in l..=r {
            m[j][l] = pow[j];
        }
    }
    m
}

/// Forward direction of the basis identity: a_j = sum_l a~_l [w^l]_j.
pub fn to_theta_basis(atilde: &ExpansionCoeffs) -> ExpansionCoeffs {
    assert_eq!(atilde.basis, Basis::WPower);
    let r = atilde.order();
    let m = w_power_matrix(r);
    let a = (1..=r)
        .map(|j| {
            compensated_sum((1..=j).map(|l| atilde.coeffs[l - 1] * m[j][l]))
        })
        .collect();
    ExpansionCoeffs::theta_power(a)
}

/// Inverse direction: solve the unit-triangular system for a~ given a.
pub fn to_w_basis(a: &ExpansionCoeffs) -> ExpansionCoeffs {
    assert_eq!(a.basis, Basis::ThetaPower);
    let r = a.order();
    let m = w_power_matrix(r);
    let mut atilde = vec![0.0f64; r];
    for j in 1..=r {
        let partial = compensated_sum((1..j).map(|l| atilde[l - 1] * m[j][l]));
        // m[j][j] = 1
        atilde[j - 1] = a.coeffs[j - 1] - partial;
    }
    ExpansionCoeffs::w_power(atilde)
}

/// Theta grid used for residual suprema: dense log-spaced points near zero
/// plus a uniform sweep of [0.1, pi].
pub(crate) fn residual_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(8192);
    for k in 0..4096 {
        // log-spaced in [1e-8, 0.1]
        let t = 1e-8f64 * (0.1f64 / 1e-8).powf(k as f64 / 4095.0);
        grid.push(t);
    }
    for k in 0..4096 {
        grid.push(0.1 + (PI - 0.1) * k as f64 / 4095.0);
    }
    grid
}

/// Gamma_r: a valid constant with
/// |psi_r(theta) - psi~_r(theta)| <= Gamma_r |theta|^{r+1} on [-pi,pi],
/// computed as a grid supremum of the ratio, inflated by a 1.05 refinement
/// safety factor. The companion Theorem constant is G_{r delta} =
/// Gamma_r pi^{1-delta}.
pub fn gamma_r(a: &ExpansionCoeffs) -> f64 {
    assert_eq!(a.basis, Basis::ThetaPower);
    let r = a.order();
    if r == 0 {
        return 0.0;
    }
    let atilde = to_w_basis(a);
    // Below theta = 0.1 the direct difference of the two near-unit
    // evaluations drowns in rounding noise, so the residual is summed as a
    // series instead: psi_r - psi~_r = -sum_l a~_l R_l(theta), where R_l
    // collects the Taylor terms of w^l beyond degree r. The coefficient of
    // (i theta)^j in w^l is extracted from powers of the w series.
    let jmax = r + 40;
    let mut w_series = vec![0.0f64; jmax + 1];
    let mut fact = 1.0;
    for (s, slot) in w_series.iter_mut().enumerate().skip(1) {
        fact *= s as f64;
        *slot = 1.0 / fact;
    }
    // c[l][j] = [(i theta)^j] w^l for l <= r, j <= jmax
    let mut c = vec![vec![0.0f64; jmax + 1]; r + 1];
    c[0][0] = 1.0;
    for l in 1..=r {
        for j in 0..=jmax {
            c[l][j] = compensated_sum(
                (0..=j).map(|s| c[l - 1][j - s] * w_series.get(s).copied().unwrap_or(0.0)),
            );
        }
    }
    let small_residual = |theta: f64| -> f64 {
        let it = Complex64::new(0.0, theta);
        let mut total = Complex64::new(0.0, 0.0);
        for (l, &al) in atilde.coeffs.iter().enumerate() {
            let mut pow = it.powi(r as i32 + 1);
            let mut term = Complex64::new(0.0, 0.0);
            for j in r + 1..=jmax {
                term += c[l + 1][j] * pow;
                pow *= it;
            }
            total += al * term;
        }
        total.norm()
    };
    let mut sup: f64 = 0.0;
    for theta in residual_grid() {
        let diff = if theta < 0.1 {
            small_residual(theta)
        } else {
            (a.eval(theta) - atilde.eval(theta)).norm()
        };
        sup = sup.max(diff / theta.powi(r as i32 + 1));
    }
    sup * 1.05
}

/// G_{r delta} = Gamma_r * pi^{1-delta}.
pub fn g_r_delta(a: &ExpansionCoeffs, delta: f64) -> f64 {
    gamma_r(a) * PI.powf(1.0 - delta)
}

/// Factorial-cumulant order cap: factorial moments of truncated pmfs blow
/// up quickly beyond this.
pub const MAX_CUMULANT_ORDER: usize = 12;

/// Factorial cumulants of a finite-support probability:
/// kappa_l = l! [w^l] log E[(1+w)^X], from the factorial-moment series.
/// Returns kappa_2..kappa_{max_order}.
pub fn factorial_cumulants(pmf: &SignedMeasure, max_order: usize) -> Result<CumulantSet> {
    if max_order > MAX_CUMULANT_ORDER {
        return Err(Error::InvalidInput(format!(
            "cumulant order {max_order} exceeds cap {MAX_CUMULANT_ORDER}"
        )));
    }
    if pmf.min_support() < 0 {
        return Err(Error::InvalidInput(
            "factorial cumulants require a distribution on the nonnegative integers".into(),
        ));
    }
    // f_l = E[X_(l)] / l!  (coefficients of E[(1+w)^X])
    let mut f = vec![0.0f64; max_order + 1];
    f[0] = pmf.total_mass();
    for l in 1..=max_order {
        let lf = l as i64;
        f[l] = compensated_sum((pmf.min_support()..=pmf.max_support()).map(|j| {
            if j < lf {
                return 0.0;
            }
            let mut falling = 1.0;
            for i in 0..l {
                falling *= (j - i as i64) as f64;
            }
            pmf.at(j) * falling
        })) / (1..=l).map(|i| i as f64).product::<f64>();
    }
    // g = log(f): g_n = f_n - (1/n) sum_{k=1}^{n-1} k g_k f_{n-k}
    let mut g = vec![0.0f64; max_order + 1];
    for n in 1..=max_order {
        let mut s = f[n];
        for k in 1..n {
            s -= (k as f64 / n as f64) * g[k] * f[n - k];
        }
        g[n] = s;
    }
    let mut kappa = Vec::with_capacity(max_order.saturating_sub(1));
    for (l, &gl) in g.iter().enumerate().skip(2) {
        let fact: f64 = (1..=l).map(|i| i as f64).product();
        kappa.push(fact * gl);
    }
    Ok(CumulantSet { kappa })
}

/// Truncation order for the independent-sum expansion: L_r = max{1, 3(r-1)}.
pub fn l_r(r: usize) -> usize {
    1.max(3 * (r.saturating_sub(1)))
}

/// Coefficients a~^{(r)}_l of
/// A^{(r)}(w) = exp{ sum_{l=2}^{r+1} kappa_l w^l / l! },
/// truncated at order L_r. The order-1 coefficient is zero.
pub fn indept_sum_coeffs(cumulants: &CumulantSet, r: usize) -> ExpansionCoeffs {
    let lr = l_r(r);
    // exponent series p_l = kappa_l / l! for 2 <= l <= r+1
    let mut p = vec![0.0f64; lr + 1];
    for l in 2..=(r + 1).min(lr) {
        if l <= cumulants.max_order() {
            let fact: f64 = (1..=l).map(|i| i as f64).product();
            p[l] = cumulants.get(l) / fact;
        }
    }
    // exp of a power series: n a_n = sum_{k=1}^{n} k p_k a_{n-k}
    let mut a = vec![0.0f64; lr + 1];
    a[0] = 1.0;
    for n in 1..=lr {
        let mut s = 0.0;
        for k in 1..=n {
            s += k as f64 * p[k] * a[n - k];
        }
        a[n] = s / n as f64;
    }
    ExpansionCoeffs::w_power(a[1..].to_vec())
}

/// Overlap p = 1 - d_TV(L(A), L(B)+1), with d_TV the half-normalized total
/// variation distance.
pub fn overlap_p(pmf_a: &SignedMeasure, pmf_b: &SignedMeasure) -> f64 {
    let shifted = pmf_b.shifted(1);
    (1.0 - 0.5 * distance(Metric::Tv, pmf_a, &shifted)).clamp(0.0, 1.0)
}

/// Centering quantity K^{(n)} = |sum_j kappa_2(X_j)|.
pub fn centering_k(cumulant_sets: &[CumulantSet]) -> f64 {
    compensated_sum(cumulant_sets.iter().map(|c| c.get(2))).abs()
}
