//! Finite signed measures on the integers: metrics, differences, convolution
//! and characteristic-function evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Compensated (Neumaier) summation. All mass and cf sums go through this:
/// the quantities of interest can sit far below naive float-sum error on
/// supports of a few thousand points.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A finite signed measure on the integers, stored as a contiguous weight
/// list starting at `offset`. Leading and trailing zeros are trimmed at
/// construction, so equal measures have identical representations.
///
/// `truncated_mass` records absolute mass dropped by any truncation
/// (bookkeeping only; weights are never renormalized).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasure {
    pub offset: i64,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub truncated_mass: f64,
}

/// Which distance between signed measures to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Point metric: sup_j |mu{j} - nu{j}|.
    Loc,
    /// Kolmogorov: sup_j |mu{(-inf,j]} - nu{(-inf,j]}|.
    Kolmogorov,
    /// Total variation norm: sum_j |mu{j} - nu{j}|.
    Tv,
}

impl SignedMeasure {
    /// Canonical constructor: trims leading/trailing zero weights.
    /// An all-zero weight list collapses to the zero measure at offset 0.
    pub fn new(offset: i64, weights: Vec<f64>, truncated_mass: f64) -> Self {
        let first = weights.iter().position(|&w| w != 0.0);
        match first {
            None => SignedMeasure {
                offset: 0,
                weights: vec![0.0],
                truncated_mass,
            },
            Some(first) => {
                let last = weights.iter().rposition(|&w| w != 0.0).unwrap();
                SignedMeasure {
                    offset: offset + first as i64,
                    weights: weights[first..=last].to_vec(),
                    truncated_mass,
                }
            }
        }
    }

    /// Point mass at `j`.
    pub fn dirac(j: i64) -> Self {
        SignedMeasure {
            offset: j,
            weights: vec![1.0],
            truncated_mass: 0.0,
        }
    }

    /// Weight of the point `j` (zero outside the stored support).
    pub fn at(&self, j: i64) -> f64 {
        if j < self.offset {
            return 0.0;
        }
        let k = (j - self.offset) as usize;
        if k < self.weights.len() {
            self.weights[k]
        } else {
            0.0
        }
    }

    /// First support point.
    pub fn min_support(&self) -> i64 {
        self.offset
    }

    /// Last support point.
    pub fn max_support(&self) -> i64 {
        self.offset + self.weights.len() as i64 - 1
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Sum of |weights|.
    pub fn abs_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().map(|w| w.abs()))
    }

    /// Translate the measure by `shift`.
    pub fn shifted(&self, shift: i64) -> Self {
        SignedMeasure {
            offset: self.offset + shift,
            weights: self.weights.clone(),
            truncated_mass: self.truncated_mass,
        }
    }

    /// Pointwise linear combination `a*self + b*other`.
    pub fn linear_comb(&self, a: f64, other: &SignedMeasure, b: f64) -> Self {
        let lo = self.min_support().min(other.min_support());
        let hi = self.max_support().max(other.max_support());
        let weights = (lo..=hi)
            .map(|j| a * self.at(j) + b * other.at(j))
            .collect();
        SignedMeasure::new(
            lo,
            weights,
            a.abs() * self.truncated_mass + b.abs() * other.truncated_mass,
        )
    }

    /// Absolute mass on [a,b] intersected with the support.
    pub fn abs_mass_on(&self, a: i64, b: i64) -> f64 {
        let lo = a.max(self.min_support());
        let hi = b.min(self.max_support());
        if lo > hi {
            return 0.0;
        }
        compensated_sum((lo..=hi).map(|j| self.at(j).abs()))
    }

    /// Signed mass on [a,b].
    pub fn mass_on(&self, a: i64, b: i64) -> f64 {
        let lo = a.max(self.min_support());
        let hi = b.min(self.max_support());
        if lo > hi {
            return 0.0;
        }
        compensated_sum((lo..=hi).map(|j| self.at(j)))
    }

    /// CSV export with columns `j,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,weight\n");
        for (k, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.offset + k as i64, w));
        }
        out
    }
}

/// Distance between two canonical signed measures.
pub fn distance(kind: Metric, mu: &SignedMeasure, nu: &SignedMeasure) -> f64 {
    let lo = mu.min_support().min(nu.min_support());
    let hi = mu.max_support().max(nu.max_support());
    match kind {
        Metric::Loc => (lo..=hi)
            .map(|j| (mu.at(j) - nu.at(j)).abs())
            .fold(0.0, f64::max),
        Metric::Kolmogorov => {
            // Running CDF difference; compensated accumulation.
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut best = 0.0f64;
            for j in lo..=hi {
                let v = mu.at(j) - nu.at(j);
                let t = sum + v;
                if sum.abs() >= v.abs() {
                    comp += (sum - t) + v;
                } else {
                    comp += (v - t) + sum;
                }
                sum = t;
                best = best.max((sum + comp).abs());
            }
            best
        }
        Metric::Tv => compensated_sum((lo..=hi).map(|j| (mu.at(j) - nu.at(j)).abs())),
    }
}

/// Convolution (mu*nu){j} = sum_k mu{k} nu{j-k}. Offsets add; truncated
/// mass propagates additively as an upper bound.
pub fn convolve(mu: &SignedMeasure, nu: &SignedMeasure) -> SignedMeasure {
    let n = mu.weights.len() + nu.weights.len() - 1;
    let mut weights = vec![0.0f64; n];
    // Accumulate per output cell with a compensation term each.
    let mut comps = vec![0.0f64; n];
    for (a, &wa) in mu.weights.iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        for (b, &wb) in nu.weights.iter().enumerate() {
            let v = wa * wb;
            let idx = a + b;
            let s = weights[idx];
            let t = s + v;
            if s.abs() >= v.abs() {
                comps[idx] += (s - t) + v;
            } else {
                comps[idx] += (v - t) + s;
            }
            weights[idx] = t;
        }
    }
    for (w, c) in weights.iter_mut().zip(&comps) {
        *w += c;
    }
    let tm = mu.truncated_mass * nu.abs_mass()
        + nu.truncated_mass * mu.abs_mass()
        + mu.truncated_mass * nu.truncated_mass;
    SignedMeasure::new(mu.offset + nu.offset, weights, tm)
}

/// The l'th difference of mu, with characteristic function
/// (e^{i theta} - 1)^l phi_mu(theta). Computed as convolution with the
/// signed binomial kernel (delta_1 - delta_0)^{*l}.
pub fn difference(mu: &SignedMeasure, l: u32) -> SignedMeasure {
    if l == 0 {
        return mu.clone();
    }
    // kernel{k} = C(l,k)(-1)^{l-k}, k = 0..l
    let l = l as usize;
    let mut kernel = vec![0.0f64; l + 1];
    let mut binom = 1.0f64;
    for (k, slot) in kernel.iter_mut().enumerate() {
        let sign = if (l - k) % 2 == 0 { 1.0 } else { -1.0 };
        *slot = sign * binom;
        binom = binom * (l - k) as f64 / (k + 1) as f64;
    }
    let kernel = SignedMeasure::new(0, kernel, 0.0);
    convolve(mu, &kernel)
}

/// phi_sigma(theta) = sum_j e^{ij theta} sigma{j}, |theta| <= pi.
pub fn char_fn(sigma: &SignedMeasure, theta: f64) -> Complex64 {
    debug_assert!(theta.abs() <= std::f64::consts::PI + 1e-12);
    let re = compensated_sum(
        sigma
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| w * ((sigma.offset + k as i64) as f64 * theta).cos()),
    );
    let im = compensated_sum(
        sigma
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| w * ((sigma.offset + k as i64) as f64 * theta).sin()),
    );
    Complex64::new(re, im)
}

/// Absolute mass outside [a,b], plus any recorded truncated mass.
pub fn tail_mass(sigma: &SignedMeasure, a: i64, b: i64) -> f64 {
    assert!(a <= b, "tail_mass requires a <= b");
    let below = sigma.abs_mass_on(sigma.min_support(), a - 1);
    let above = sigma.abs_mass_on(b + 1, sigma.max_support());
    below + above + sigma.truncated_mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn poisson_direct(lambda: f64, n: usize) -> SignedMeasure {
        // independent recurrence-based pmf, used here as a plain test fixture
        let mut w = Vec::with_capacity(n);
        let mut p = (-lambda).exp();
        for j in 0..n {
            w.push(p);
            p *= lambda / (j + 1) as f64;
        }
        let tm = 1.0 - w.iter().sum::<f64>();
        SignedMeasure::new(0, w, tm.max(0.0))
    }

    #[test]
    fn trivial_distances() {
        let d0 = SignedMeasure::dirac(0);
        let d1 = SignedMeasure::dirac(1);
        assert_eq!(distance(Metric::Tv, &d0, &d0), 0.0);
        assert_eq!(distance(Metric::Kolmogorov, &d0, &d1), 1.0);
    }

    #[test]
    fn tv_poisson_vs_shifted_matches_direct_sum() {
        // golden value from direct summation of |Po(5){j} - Po(5){j-1}|
        let po = poisson_direct(5.0, 60);
        let shifted = po.shifted(1);
        let d = distance(Metric::Tv, &po, &shifted);
        let direct: f64 = (0..=60i64)
            .map(|j| (po.at(j) - po.at(j - 1)).abs())
            .sum();
        assert!((d - direct).abs() < 1e-14);
        assert!(d > 0.3 && d < 0.4);
    }

    #[test]
    fn convolve_diracs() {
        let c = convolve(&SignedMeasure::dirac(2), &SignedMeasure::dirac(3));
        assert_eq!(c, SignedMeasure::dirac(5));
    }

    #[test]
    fn convolve_bernoullis() {
        let be = SignedMeasure::new(0, vec![0.5, 0.5], 0.0);
        let c = convolve(&be, &be);
        assert_eq!(c.offset, 0);
        assert_eq!(c.weights, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn poisson_additivity_under_convolution() {
        let a = poisson_direct(1.0, 40);
        let c = convolve(&a, &a);
        let b = poisson_direct(2.0, 79);
        assert!(distance(Metric::Tv, &c, &b) < 1e-12);
    }

    #[test]
    fn difference_definition() {
        let d0 = SignedMeasure::dirac(0);
        assert_eq!(difference(&d0, 0), d0);
        let d = difference(&d0, 1);
        assert_eq!(d.offset, 0);
        assert_eq!(d.weights, vec![-1.0, 1.0]);
    }

    #[test]
    fn difference_cf_identity() {
        let po = poisson_direct(3.0, 40);
        let d2 = difference(&po, 2);
        for k in 0..1000 {
            let theta = -PI + 2.0 * PI * k as f64 / 999.0;
            let w = Complex64::new(theta.cos() - 1.0, theta.sin());
            let lhs = char_fn(&d2, theta);
            let rhs = w * w * char_fn(&po, theta);
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn difference_iterates() {
        let po = poisson_direct(3.0, 40);
        let once = difference(&difference(&po, 1), 2);
        let direct = difference(&po, 3);
        assert_eq!(once.offset, direct.offset);
        for (a, b) in once.weights.iter().zip(&direct.weights) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn char_fn_diracs() {
        let theta = 1.234;
        assert_eq!(char_fn(&SignedMeasure::dirac(0), theta), Complex64::new(1.0, 0.0));
        let c = char_fn(&SignedMeasure::dirac(5), theta);
        assert!((c - Complex64::new((5.0 * theta).cos(), (5.0 * theta).sin())).norm() < 1e-15);
    }

    #[test]
    fn char_fn_poisson_closed_form() {
        let po = poisson_direct(10.0, 80);
        for k in 0..200 {
            let theta = -PI + 2.0 * PI * k as f64 / 199.0;
            let cf = char_fn(&po, theta);
            let mag = (10.0 * (theta.cos() - 1.0)).exp();
            let arg = 10.0 * theta.sin();
            let exact = Complex64::new(mag * arg.cos(), mag * arg.sin());
            assert!((cf - exact).norm() <= 1e-10);
        }
    }

    #[test]
    fn tail_mass_examples() {
        assert_eq!(tail_mass(&SignedMeasure::dirac(0), -1, 1), 0.0);
        assert_eq!(tail_mass(&SignedMeasure::dirac(5), 0, 1), 1.0);
        let po = poisson_direct(20.0, 200);
        let direct: f64 = (0..10i64).map(|j| po.at(j)).sum::<f64>()
            + (31..200i64).map(|j| po.at(j)).sum::<f64>();
        let t = tail_mass(&po, 10, 30);
        assert!((t - direct - po.truncated_mass).abs() < 1e-15);
    }

    #[test]
    fn canonical_trimming() {
        let m = SignedMeasure::new(3, vec![0.0, 0.0, 1.0, 2.0, 0.0], 0.0);
        assert_eq!(m.offset, 5);
        assert_eq!(m.weights, vec![1.0, 2.0]);
    }
}
