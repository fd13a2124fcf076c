//! Worked example: prime-divisor counts. Sieves for omega(n) and Omega(n),
//! Euler-product expansion coefficients, and the translated-Poisson
//! parameters of the refined central limit behaviour.

use crate::charlier::{build_nu, poisson_measure, NuSpec};
use crate::error::{Error, Result};
use crate::families::{q_measure, PoissonFamily, TranslatedParams};
use crate::measure::{distance, Metric, SignedMeasure};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// zeta(2)..zeta(7), pinned against the defining series in the tests.
const ZETA: [f64; 6] = [
    PI * PI / 6.0,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
];

/// The primes up to `limit`, by Eratosthenes.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut is_comp = vec![false; n + 1];
        let mut primes = Vec::new();
        for p in 2..=n {
            if !is_comp[p] {
                primes.push(p as u64);
                let mut m = p * p;
                while m <= n {
                    is_comp[m] = true;
                    m += p;
                }
            }
        }
        PrimeTable { limit, primes }
    }
}

/// Exact prime-divisor counts for 1..=n_max: omega (distinct) and
/// big_omega (with multiplicity), one byte each.
#[derive(Debug, Clone)]
pub struct FactorCounts {
    pub n_max: u64,
    pub omega: Vec<u8>,
    pub big_omega: Vec<u8>,
}

pub fn sieve_factor_counts(n_max: u64) -> Result<FactorCounts> {
    if n_max < 2 || n_max > 100_000_000 {
        return Err(Error::InvalidInput(format!(
            "sieve limit must lie in 2..=10^8, got {n_max}"
        )));
    }
    let n = n_max as usize;
    let mut omega = vec![0u8; n + 1];
    let mut big_omega = vec![0u8; n + 1];
    for p in 2..=n {
        if omega[p] == 0 {
            // p is prime: one distinct factor for every multiple
            let mut m = p;
            while m <= n {
                omega[m] += 1;
                big_omega[m] += 1;
                m += p;
            }
            // extra multiplicity for each higher prime power
            let mut pk = p as u128 * p as u128;
            while pk <= n as u128 {
                let mut m = pk as usize;
                while m <= n {
                    big_omega[m] += 1;
                    m += pk as usize;
                }
                pk *= p as u128;
            }
        }
    }
    Ok(FactorCounts { n_max, omega, big_omega })
}

const CACHE_MAGIC: &[u8; 5] = b"MODX1";

impl FactorCounts {
    /// Compact binary cache: magic, n_max little-endian, then one byte per
    /// n in 1..=n_max with omega in the low nibble and min(Omega,15) high.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(13 + self.n_max as usize);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&self.n_max.to_le_bytes());
        for n in 1..=self.n_max as usize {
            buf.push(self.omega[n] | (self.big_omega[n].min(15) << 4));
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<FactorCounts> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        if buf.len() < 13 || &buf[..5] != CACHE_MAGIC {
            return Err(Error::InvalidInput(format!(
                "{} is not a factor-count cache",
                path.display()
            )));
        }
        let n_max = u64::from_le_bytes(buf[5..13].try_into().unwrap());
        if buf.len() != 13 + n_max as usize {
            return Err(Error::InvalidInput(format!(
                "cache {} is truncated",
                path.display()
            )));
        }
        let mut omega = vec![0u8; n_max as usize + 1];
        let mut big_omega = vec![0u8; n_max as usize + 1];
        for n in 1..=n_max as usize {
            let b = buf[12 + n];
            omega[n] = b & 0x0f;
            big_omega[n] = b >> 4;
        }
        Ok(FactorCounts { n_max, omega, big_omega })
    }

    /// Sieve, or reuse a cache under MODX_CACHE_DIR when present. Caches
    /// with capped Omega nibbles are only reused when n_max < 2^15, where
    /// the cap cannot bite.
    pub fn load_or_sieve(n_max: u64) -> Result<FactorCounts> {
        let dir = match std::env::var_os("MODX_CACHE_DIR") {
            Some(d) => d,
            None => return sieve_factor_counts(n_max),
        };
        let path = Path::new(&dir).join(format!("factors-{n_max}.bin"));
        if n_max < (1 << 15) {
            if let Ok(fc) = FactorCounts::load(&path) {
                if fc.n_max == n_max {
                    return Ok(fc);
                }
            }
        }
        let fc = sieve_factor_counts(n_max)?;
        if n_max < (1 << 15) {
            let _ = std::fs::create_dir_all(&dir);
            let _ = fc.save(&path);
        }
        Ok(fc)
    }

    /// Empirical distribution of the chosen count over 1..=n.
    pub fn empirical(&self, kind: CountKind, n: u64) -> SignedMeasure {
        assert!(n >= 1 && n <= self.n_max);
        let counts = match kind {
            CountKind::Omega => &self.omega,
            CountKind::BigOmega => &self.big_omega,
        };
        let max = counts[1..=n as usize].iter().copied().max().unwrap() as usize;
        let mut weights = vec![0.0f64; max + 1];
        for &c in &counts[1..=n as usize] {
            weights[c as usize] += 1.0;
        }
        for w in &mut weights {
            *w /= n as f64;
        }
        SignedMeasure::new(0, weights, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountKind {
    Omega,
    BigOmega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EulerKind {
    Phi1,
    Phi2,
}

/// Taylor coefficients (in w) of the Euler-product limit function for the
/// chosen count, with a per-run bound on the prime-cutoff truncation.
#[derive(Debug, Clone, Serialize)]
pub struct EulerExpansion {
    pub kind: EulerKind,
    pub coeffs: Vec<f64>,
    pub prime_cutoff: u64,
    pub tail_error: f64,
}

/// Sum over primes q <= cutoff of (q - shift)^{-k}, plus an integral tail
/// estimate cutoff^{1-k}/((k-1) log cutoff); returns (value, tail).
fn prime_power_sum(table: &PrimeTable, k: u32, shift: f64) -> (f64, f64) {
    let mut s = 0.0f64;
    for &q in table.primes.iter().rev() {
        s += (q as f64 - shift).powi(-(k as i32));
    }
    let p = table.limit as f64;
    let tail = p.powi(1 - k as i32) / ((k as f64 - 1.0) * p.ln());
    (s + tail, tail)
}

/// Mertens-style sum: gamma + sum_q (1/q + log(1 - 1/q)) over q <= cutoff.
/// Terms are ~ -1/(2q^2), so the dropped tail is about half the k=2 tail.
fn mertens_b1(table: &PrimeTable) -> (f64, f64) {
    let mut s = EULER_GAMMA;
    for &q in table.primes.iter().rev() {
        let x = 1.0 / q as f64;
        s += x + (-x).ln_1p();
    }
    let p = table.limit as f64;
    let tail = 0.5 / (p * p.ln());
    (s - tail, tail)
}

pub fn euler_expansion(kind: EulerKind, order: usize, prime_cutoff: u64) -> Result<EulerExpansion> {
    if order > 6 {
        return Err(Error::InvalidInput(format!(
            "expansion order capped at 6, got {order}"
        )));
    }
    if prime_cutoff < 1000 {
        return Err(Error::InvalidInput(format!(
            "prime cutoff must be at least 1000, got {prime_cutoff}"
        )));
    }
    let table = PrimeTable::new(prime_cutoff);
    // log Phi coefficients c_1..c_order
    let mut c = vec![0.0f64; order + 1];
    let mut tail_error = 0.0f64;
    let (b1, b1_tail) = mertens_b1(&table);
    tail_error = tail_error.max(b1_tail);
    match kind {
        EulerKind::Phi1 => {
            // log Phi_1 = -log Gamma(1+w) + sum_q [log(1+w/q) + w log(1-1/q)]
            if order >= 1 {
                c[1] = b1;
            }
            for k in 2..=order {
                let (pk, t) = prime_power_sum(&table, k as u32, 0.0);
                let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                c[k] = sign * (ZETA[k - 2] + pk) / k as f64;
                tail_error = tail_error.max(t / k as f64);
            }
        }
        EulerKind::Phi2 => {
            // log Phi_2 = -log Gamma(1+w)
            //   + sum_q [-log(1 - w/(q-1)) + w log(1-1/q)]
            if order >= 1 {
                let (s1, t1) = {
                    // sum_q 1/(q(q-1)) = sum_q [1/(q-1) - 1/q], converging
                    let mut s = 0.0f64;
                    for &q in table.primes.iter().rev() {
                        let qf = q as f64;
                        s += 1.0 / (qf * (qf - 1.0));
                    }
                    let p = table.limit as f64;
                    (s + 1.0 / p, 1.0 / p)
                };
                c[1] = b1 + s1;
                tail_error = tail_error.max(t1);
            }
            for k in 2..=order {
                let (sk, t) = prime_power_sum(&table, k as u32, 1.0);
                let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                c[k] = sign * ZETA[k - 2] / k as f64 + sk / k as f64;
                tail_error = tail_error.max(t / k as f64);
            }
        }
    }
    // exponentiate: n a_n = sum_{k=1}^n k c_k a_{n-k}, a_0 = 1
    let mut coeffs = vec![0.0f64; order + 1];
    coeffs[0] = 1.0;
    for n in 1..=order {
        let mut s = 0.0f64;
        for k in 1..=n {
            s += k as f64 * c[k] * coeffs[n - k];
        }
        coeffs[n] = s / n as f64;
    }
    Ok(EulerExpansion { kind, coeffs, prime_cutoff, tail_error })
}

/// Translated-Poisson parameters for the count, in offset form: the
/// lambda_prime field holds lambda' - log log n, which is n-free.
#[derive(Debug, Clone, Serialize)]
pub struct ErdosKacParams {
    pub params: TranslatedParams,
    pub x: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
}

pub fn erdos_kac_params(kind: CountKind, prime_cutoff: u64) -> Result<ErdosKacParams> {
    if prime_cutoff < 100_000 {
        return Err(Error::InvalidInput(format!(
            "parameter evaluation needs a prime cutoff of at least 10^5, got {prime_cutoff}"
        )));
    }
    let euler_kind = match kind {
        CountKind::Omega => EulerKind::Phi1,
        CountKind::BigOmega => EulerKind::Phi2,
    };
    let e = euler_expansion(euler_kind, 2, prime_cutoff)?;
    let a1 = e.coeffs[1];
    let a2 = e.coeffs[2] + 0.5 * e.coeffs[1];
    let v = 2.0 * a2 - a1 * a1;
    let x = a1 - v;
    let m = x.floor();
    let p = (x - m).sqrt();
    let offset = v - p * (1.0 - p);
    let b1 = euler_expansion(EulerKind::Phi1, 1, prime_cutoff)?.coeffs[1];
    Ok(ErdosKacParams {
        params: TranslatedParams { lambda_prime: offset, m: m as i64, p },
        x,
        a1,
        a2,
        b1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub n: u64,
    pub loglog_n: f64,
    pub empirical_mean: f64,
    pub d_k_poisson: f64,
    pub d_k_nu: Vec<f64>,
    pub d_k_translated: f64,
    pub d_loc_poisson: f64,
    pub d_loc_nu: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub kind: CountKind,
    pub r_max: usize,
    pub rows: Vec<CompareRow>,
}

/// Compares the empirical count distribution over 1..=n against Po(log log n),
/// the order-1..=r expansions, and the translated Poisson, over a decade
/// ladder ending at n_max.
pub fn erdos_kac_compare(n_max: u64, r: usize, kind: CountKind) -> Result<CompareReport> {
    if n_max < 10_000 {
        return Err(Error::InvalidInput(format!(
            "comparison needs n_max >= 10^4, got {n_max}"
        )));
    }
    if r == 0 || r > 4 {
        return Err(Error::InvalidInput(format!(
            "expansion order must lie in 1..=4, got {r}"
        )));
    }
    let fc = FactorCounts::load_or_sieve(n_max)?;
    let euler_kind = match kind {
        CountKind::Omega => EulerKind::Phi1,
        CountKind::BigOmega => EulerKind::Phi2,
    };
    let cutoff = 1_000_000u64;
    let e = euler_expansion(euler_kind, r, cutoff)?;
    let ek = erdos_kac_params(kind, cutoff)?;
    let fam = PoissonFamily;
    let mut ladder = vec![n_max];
    let mut n = n_max / 10;
    while n >= 10_000 {
        ladder.push(n);
        n /= 10;
    }
    ladder.reverse();
    let mut rows = Vec::new();
    for &n in &ladder {
        let emp = fc.empirical(kind, n);
        let l = (n as f64).ln().ln();
        let po = poisson_measure(l);
        let mut d_k_nu = Vec::new();
        let mut d_loc_nu = Vec::new();
        for rr in 1..=r {
            let nu = build_nu(&NuSpec { lambda: l, a_tilde: e.coeffs[1..=rr].to_vec() })?;
            d_k_nu.push(distance(Metric::Kolmogorov, &emp, &nu));
            d_loc_nu.push(distance(Metric::Loc, &emp, &nu));
        }
        let q = q_measure(
            &fam,
            &TranslatedParams {
                lambda_prime: l + ek.params.lambda_prime,
                m: ek.params.m,
                p: ek.params.p,
            },
        );
        let mean = (emp.min_support()..=emp.max_support())
            .map(|j| j as f64 * emp.at(j))
            .sum::<f64>();
        rows.push(CompareRow {
            n,
            loglog_n: l,
            empirical_mean: mean,
            d_k_poisson: distance(Metric::Kolmogorov, &emp, &po),
            d_k_nu,
            d_k_translated: distance(Metric::Kolmogorov, &emp, &q),
            d_loc_poisson: distance(Metric::Loc, &emp, &po),
            d_loc_nu,
        });
    }
    Ok(CompareReport { kind, r_max: r, rows })
}
