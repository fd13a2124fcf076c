//! End-to-end acceptance checks. Each numbered criterion prints a single
//! pass/fail line; the test fails if any criterion does.

use modx::apps::convolution::convolution_experiment;
use modx::apps::primes::{
    erdos_kac_params, euler_expansion, sieve_factor_counts, CountKind, EulerKind,
};
use modx::apps::sums::independent_sum_expansion;
use modx::bounds::{bound_th0, bound_th0_tv, BoundInputs};
use modx::charlier::{build_nu, charlier, charlier_bound, poisson_measure, poisson_pmf, NuSpec};
use modx::families::{
    general_params_solver, q_measure, BesselFamily, CompoundPoissonFamily, DiscreteFamily,
    PoissonFamily, TranslatedParams,
};
use modx::{char_fn, convolve, distance, Metric, SignedMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn criterion_1_mertens() -> Result<(), String> {
    let e = euler_expansion(EulerKind::Phi1, 1, 10_000_000).map_err(|e| e.to_string())?;
    let b1 = e.coeffs[1];
    if (b1 - 0.26149721).abs() < 1e-7 {
        Ok(())
    } else {
        Err(format!("B1 = {b1}, expected 0.26149721 within 1e-7"))
    }
}

fn criterion_2_omega_params() -> Result<(), String> {
    let ek = erdos_kac_params(CountKind::Omega, 2_000_000).map_err(|e| e.to_string())?;
    let mut errs = Vec::new();
    if (ek.x - 2.0971815).abs() >= 1e-6 {
        errs.push(format!("x = {}", ek.x));
    }
    if ek.params.m != 2 {
        errs.push(format!("m = {}", ek.params.m));
    }
    if (ek.params.p - 0.31173945).abs() >= 1e-6 {
        errs.push(format!("p = {}", ek.params.p));
    }
    if (ek.params.lambda_prime - (-2.0502422)).abs() >= 1e-6 {
        errs.push(format!("offset = {}", ek.params.lambda_prime));
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_3_big_omega_params() -> Result<(), String> {
    let ek = erdos_kac_params(CountKind::BigOmega, 2_000_000).map_err(|e| e.to_string())?;
    let mut errs = Vec::new();
    if ek.params.m != 0 {
        errs.push(format!("m = {}", ek.params.m));
    }
    if (ek.params.p - 0.5195).abs() >= 5e-4 {
        errs.push(format!("p = {}", ek.params.p));
    }
    if (ek.params.lambda_prime - 0.5152).abs() >= 5e-4 {
        errs.push(format!("offset = {}", ek.params.lambda_prime));
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_4_convolution_rates() -> Result<(), String> {
    let lambdas = [4.0, 16.0, 64.0, 256.0];
    let mut errs = Vec::new();
    for r in 0..=2usize {
        let report =
            convolution_experiment(4, &lambdas, r).map_err(|e| e.to_string())?;
        for row in &report.rows {
            if row.d_kolmogorov > row.kolmogorov_bound {
                errs.push(format!(
                    "r={r} lambda={}: d_K {} > bound {}",
                    row.lambda, row.d_kolmogorov, row.kolmogorov_bound
                ));
            }
        }
        let ds: Vec<f64> = report.rows.iter().map(|w| w.d_kolmogorov.ln()).collect();
        let ls: Vec<f64> = report.rows.iter().map(|w| w.lambda.ln()).collect();
        let slope = (ds[3] - ds[0]) / (ls[3] - ls[0]);
        let target = -((r as f64) + 1.0) / 2.0;
        if (slope - target).abs() >= 0.35 {
            errs.push(format!("r={r}: slope {slope} vs target {target}"));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_5_bound_soundness() -> Result<(), String> {
    // pairs nu(lambda; a~) vs nu(lambda; a~ + c e_l): the cf difference is
    // c w^l p_lambda(theta), so gamma_1 = |c|, t = l, rho = 2 lambda / pi^2
    // are provably valid inputs.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = Vec::new();
    for case in 0..200 {
        let lambda: f64 = rng.gen_range(0.5..60.0);
        let order = rng.gen_range(1..=4usize);
        let base: Vec<f64> = (0..order).map(|_| rng.gen_range(-0.2..0.2)).collect();
        let l = rng.gen_range(1..=order);
        let c: f64 = rng.gen_range(-0.3..0.3f64);
        let mut pert = base.clone();
        pert[l - 1] += c;
        let mu = build_nu(&NuSpec { lambda, a_tilde: base }).map_err(|e| e.to_string())?;
        let nu = build_nu(&NuSpec { lambda, a_tilde: pert }).map_err(|e| e.to_string())?;
        let slack = mu.truncated_mass + nu.truncated_mass + 1e-12;
        let rho = 2.0 * lambda / (PI * PI);
        let inputs = BoundInputs::single(c.abs(), l as f64, rho);
        let rep = bound_th0(&inputs).map_err(|e| e.to_string())?;
        let d_loc = distance(Metric::Loc, &mu, &nu);
        let d_k = distance(Metric::Kolmogorov, &mu, &nu);
        if d_loc > rep.loc_bound + slack {
            violations.push(format!("case {case}: d_loc {d_loc} > {}", rep.loc_bound));
        }
        if d_k > rep.kolmogorov_bound + slack {
            violations.push(format!("case {case}: d_K {d_k} > {}", rep.kolmogorov_bound));
        }
        // smooth tv bound where its hypotheses hold: l >= 2, rho >= 1; the
        // second-derivative constant for d = c w^l e^{i lambda sin theta}
        // is assembled from |w| <= |theta|, |w'| = 1, |w''| = 1
        if l >= 2 && rho >= 1.0 {
            let lf = l as f64;
            let gamma1 = c.abs()
                * (lf * (lf - 1.0)
                    + lf * PI * (1.0 + 2.0 * lambda)
                    + lambda * PI * PI * (lambda + 1.0));
            let mut tv_inputs = BoundInputs::single(gamma1, lf, rho);
            tv_inputs.gamma3 = PI * PI / 2.0;
            let tv_rep = bound_th0_tv(&tv_inputs).map_err(|e| e.to_string())?;
            let tv = distance(Metric::Tv, &mu, &nu);
            if tv > tv_rep.tv_bound.unwrap() + slack {
                violations.push(format!(
                    "case {case}: tv {tv} > {}",
                    tv_rep.tv_bound.unwrap()
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations.join("; "))
    }
}

fn criterion_6_orthogonality() -> Result<(), String> {
    let mut errs = Vec::new();
    for &lambda in &[2.0, 10.0, 50.0] {
        let jmax = (2.0 * lambda + 200.0) as u64;
        for k in 0..=6u32 {
            for l in 0..=6u32 {
                if k == l {
                    continue;
                }
                let mut s = 0.0f64;
                let mut comp = 0.0f64;
                for j in 0..=jmax {
                    let term = poisson_pmf(lambda, j)
                        * charlier(k, j, lambda).unwrap()
                        * charlier(l, j, lambda).unwrap();
                    let t = s + term;
                    comp += if s.abs() >= term.abs() {
                        (s - t) + term
                    } else {
                        (term - t) + s
                    };
                    s = t;
                }
                s += comp;
                if s.abs() >= 1e-8 {
                    errs.push(format!("k={k} l={l} lambda={lambda}: {s}"));
                }
            }
        }
        // envelope with zero violations over the full grid
        for l in 0..=8u32 {
            for j in 0..=(2.0 * lambda + 20.0) as u64 {
                let c = charlier(l, j, lambda).unwrap();
                let b = charlier_bound(l, j, lambda);
                if c.abs() > b * (1.0 + 1e-12) {
                    errs.push(format!("envelope l={l} j={j} lambda={lambda}"));
                }
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_7_nu_integrity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut errs = Vec::new();
    for case in 0..50 {
        let lambda: f64 = rng.gen_range(0.5..100.0);
        let order = rng.gen_range(0..=4usize);
        let a_tilde: Vec<f64> = (0..order).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let spec = NuSpec { lambda, a_tilde };
        let nu = build_nu(&spec).map_err(|e| e.to_string())?;
        if (nu.total_mass() - 1.0).abs() >= 1e-10 + nu.truncated_mass {
            errs.push(format!("case {case}: mass {}", nu.total_mass()));
        }
        for g in 0..512 {
            let theta = -PI + 2.0 * PI * (g as f64 + 0.5) / 512.0;
            let lhs = char_fn(&nu, theta);
            let half = (0.5 * theta).sin();
            let w = num_complex::Complex64::new(-2.0 * half * half, theta.sin());
            let mut psi = num_complex::Complex64::new(1.0, 0.0);
            let mut pow = num_complex::Complex64::new(1.0, 0.0);
            for &a in &spec.a_tilde {
                pow *= w;
                psi += a * pow;
            }
            let p_lambda = (lambda * w).exp();
            if (lhs - psi * p_lambda).norm() >= 1e-10 + nu.truncated_mass {
                errs.push(format!(
                    "case {case}: cf mismatch {} at theta={theta}",
                    (lhs - psi * p_lambda).norm()
                ));
                break;
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_8_moment_matching() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut errs = Vec::new();
    let jump = SignedMeasure::new(1, vec![0.6, 0.4], 0.0);
    let compound = CompoundPoissonFamily::new(jump).map_err(|e| e.to_string())?;
    let families: [(&str, &dyn DiscreteFamily); 3] = [
        ("poisson", &PoissonFamily),
        ("compound", &compound),
        ("bessel", &BesselFamily),
    ];
    for (name, fam) in families {
        for case in 0..20 {
            let var_floor = fam.variance(fam.lambda_min()) + 0.25;
            let var_x: f64 = var_floor + rng.gen_range(0.1..40.0);
            let mean_x: f64 = rng.gen_range(-5.0..40.0);
            let p = match general_params_solver(fam, mean_x, var_x) {
                Ok(p) => p,
                Err(e) => {
                    errs.push(format!("{name} case {case}: {e}"));
                    continue;
                }
            };
            let mean = p.m as f64 + fam.mean(p.lambda_prime) + p.p;
            let var = fam.variance(p.lambda_prime) + p.p * (1.0 - p.p);
            if (mean - mean_x).abs() >= 1e-9 {
                errs.push(format!("{name} case {case}: mean off by {}", mean - mean_x));
            }
            if (var - var_x).abs() >= 1e-9 {
                errs.push(format!("{name} case {case}: var off by {}", var - var_x));
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_9_erdos_kac_ordering() -> Result<(), String> {
    let n_max = 10_000_000u64;
    let fc = sieve_factor_counts(n_max).map_err(|e| e.to_string())?;
    let emp = fc.empirical(CountKind::Omega, n_max);
    let l = (n_max as f64).ln().ln();
    let po = poisson_measure(l);
    let d_po = distance(Metric::Kolmogorov, &emp, &po);
    let b1 = euler_expansion(EulerKind::Phi1, 1, 1_000_000)
        .map_err(|e| e.to_string())?
        .coeffs[1];
    let nu1 = build_nu(&NuSpec { lambda: l, a_tilde: vec![b1] }).map_err(|e| e.to_string())?;
    let d_nu = distance(Metric::Kolmogorov, &emp, &nu1);
    let ek = erdos_kac_params(CountKind::Omega, 1_000_000).map_err(|e| e.to_string())?;
    let q = q_measure(
        &PoissonFamily,
        &TranslatedParams {
            lambda_prime: l + ek.params.lambda_prime,
            m: ek.params.m,
            p: ek.params.p,
        },
    );
    let d_q = distance(Metric::Kolmogorov, &emp, &q);
    let mut errs = Vec::new();
    if d_nu >= d_po {
        errs.push(format!("d_K(nu1) = {d_nu} not below d_K(Po) = {d_po}"));
    }
    if d_q >= d_po {
        errs.push(format!("d_K(Q) = {d_q} not below d_K(Po) = {d_po}"));
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn criterion_10_bernoulli_sum() -> Result<(), String> {
    let be = SignedMeasure::new(0, vec![0.5, 0.5], 0.0);
    let mut exact = SignedMeasure::dirac(0);
    for _ in 0..100 {
        exact = convolve(&exact, &be);
    }
    let pmfs = vec![be; 100];
    let nu2 = independent_sum_expansion(&pmfs, 2).map_err(|e| e.to_string())?;
    let d_nu = distance(Metric::Kolmogorov, &exact, &nu2);
    let d_po = distance(Metric::Kolmogorov, &exact, &poisson_measure(50.0));
    if d_nu < d_po {
        Ok(())
    } else {
        Err(format!("d_K(nu2) = {d_nu} not below d_K(Po(50)) = {d_po}"))
    }
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("criterion 01 mertens constant", criterion_1_mertens),
        ("criterion 02 omega parameters", criterion_2_omega_params),
        ("criterion 03 big-omega parameters", criterion_3_big_omega_params),
        ("criterion 04 convolution rates", criterion_4_convolution_rates),
        ("criterion 05 bound soundness corpus", criterion_5_bound_soundness),
        ("criterion 06 charlier orthogonality", criterion_6_orthogonality),
        ("criterion 07 nu integrity", criterion_7_nu_integrity),
        ("criterion 08 moment matching", criterion_8_moment_matching),
        ("criterion 09 erdos-kac ordering", criterion_9_erdos_kac_ordering),
        ("criterion 10 bernoulli sum improvement", criterion_10_bernoulli_sum),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("{name}: PASS"),
            Err(msg) => {
                println!("{name}: FAIL ({msg})");
                failures.push(format!("{name}: {msg}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
