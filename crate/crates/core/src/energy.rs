//! Discrete Riesz and logarithmic energies, and their expected values under
//! determinantal point processes on `S^d`.
//!
//! All energies use the ordered-pair convention `Σ_{i≠j}`, so every unordered
//! pair contributes twice. The expectation formulas follow the same
//! convention.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{binomial, HarmonicEnsemble, IsotropicProjectionKernel, ProjectionKernel};
use crate::quadrature::{gauss_jacobi_rule, surface_ratio};
use crate::sampling::PointConfiguration;
use crate::specfun::{digamma, harmonic_number, hyp4f3_terminating, ln_beta, ln_gamma, CompensatedSum};

/// Rows per block in the pairwise sums.
const ROW_BLOCK: usize = 32;

/// Distances below this are treated as coincident points.
const COINCIDENT: f64 = 1e-14;

/// One row of an energy table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Riesz exponent, `0` for the logarithmic energy.
    pub s: f64,
    pub n: usize,
    pub discrete: Option<f64>,
    pub expected: Option<f64>,
    pub asymptotic: Option<f64>,
}

fn pair_sum(x: &PointConfiguration, f: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
    let n = x.len();
    let blocks: Vec<Result<CompensatedSum>> = (0..n.div_ceil(ROW_BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = CompensatedSum::new();
            for i in b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n) {
                let p = x.point(i);
                for j in 0..i {
                    let r = p
                        .iter()
                        .zip(x.point(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if r < COINCIDENT {
                        return Err(Error::SingularConfiguration { i: j, j: i });
                    }
                    acc.add(f(r));
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = CompensatedSum::new();
    for b in blocks {
        total.merge(&b?);
    }
    Ok(2.0 * total.value())
}

/// `E_s(x) = Σ_{i≠j} ‖x_i − x_j‖^{−s}`.
pub fn discrete_riesz(x: &PointConfiguration, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Riesz exponent must be positive, got {s}")));
    }
    pair_sum(x, |r| r.powf(-s))
}

/// `E_0(x) = Σ_{i≠j} log(1 / ‖x_i − x_j‖)`.
pub fn discrete_log(x: &PointConfiguration) -> Result<f64> {
    pair_sum(x, |r| -r.ln())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("sphere dimension must be >= 2, got {d}")));
    }
    Ok(())
}

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("argument checked positive by caller")
}

/// Continuous `s`-energy of the uniform measure,
/// `V_s = 2^{d−s−1} Γ((d+1)/2) Γ((d−s)/2) / (√π Γ(d−s/2))`, for `s < d`.
pub fn continuous_vs(d: usize, s: f64) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    if s >= df {
        return Err(Error::Pole { d, s });
    }
    let ln = (df - s - 1.0) * LN_2 + lg((df + 1.0) / 2.0) + lg((df - s) / 2.0)
        - 0.5 * PI.ln()
        - lg(df - s / 2.0);
    Ok(ln.exp())
}

/// Continuous logarithmic energy `V_log = (ψ₀(d) − ψ₀(d/2))/2 − log 2`.
pub fn continuous_vlog(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok(0.5 * (digamma(df)? - digamma(df / 2.0)?) - LN_2)
}

/// Expected Riesz `s`-energy of the harmonic ensemble, `0 < s < d`, in closed
/// form through the terminating `4F3` series.
pub fn expected_riesz_harmonic(d: usize, big_l: usize, s: f64) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain(format!("closed form needs 0 < s < d = {d}, got {s}")));
    }
    let e = HarmonicEnsemble::new(d, big_l)?;
    let n = e.n() as f64;
    let lf = big_l as f64;
    let ln_binom = lg(lf + df / 2.0 + 1.0) - lg(lf + 1.0) - lg(df / 2.0 + 1.0);
    let ln_prefactor = (df - 1.0 - s) * LN_2 + surface_ratio(d).ln() + 2.0 * n.ln() - 2.0 * ln_binom;
    let ln_gammas = lg((df - s) / 2.0) - lg(1.0 + df / 2.0) - lg(1.0 + s / 2.0);
    let ln_c = lg(lf + df / 2.0) + lg(lf + df / 2.0 + 1.0) + lg(lf + s / 2.0 + 1.0)
        - 2.0 * lg(lf + 1.0)
        - lg(lf - s / 2.0 + df);
    let correction = (ln_prefactor + ln_gammas + ln_c).exp() * hyp4f3_terminating(d, big_l, s)?;
    Ok(n * n * continuous_vs(d, s)? - correction)
}

/// Expected Riesz `s`-energy of any projection kernel by exact Gauss–Jacobi
/// quadrature, `0 < s < d + 2`.
///
/// For `s < d` the pair integral is split into `n² V_s` and the `K²` part.
/// For `d ≤ s < d + 2` only the difference `n² − K(t)²` is integrable; it is
/// divided by `1 − t` and the remaining power of `1 − t` goes into the weight.
pub fn expected_riesz_quadrature<K: ProjectionKernel + ?Sized>(k: &K, s: f64) -> Result<f64> {
    let d = k.dim();
    check_dim(d)?;
    let df = d as f64;
    if s >= df + 2.0 {
        return Err(Error::DivergentEnergy { s, limit: df + 2.0 });
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("Riesz exponent must be positive, got {s}")));
    }
    let n = k.trace() as f64;
    let m = k.max_degree() + d + 8;
    let ratio = surface_ratio(d) / 2f64.powf(s / 2.0);
    let half = df / 2.0 - 1.0;
    if s < df {
        let rule = gauss_jacobi_rule(half - s / 2.0, half, m)?;
        let mass = ((df - 1.0 - s / 2.0) * LN_2 + ln_beta(df / 2.0, df / 2.0 - s / 2.0)?).exp();
        let k2 = rule.integrate(|t| k.eval(t).powi(2));
        Ok(ratio * (n * n * mass - k2))
    } else {
        let rule = gauss_jacobi_rule(df / 2.0 - s / 2.0, half, m)?;
        let q = rule.integrate(|t| {
            let kt = k.eval(t);
            (n - kt) * (n + kt) / (1.0 - t)
        });
        Ok(ratio * q)
    }
}

/// `C_{s,d}` in `E_s ≈ n² V_s − C_{s,d} n^{1+s/d}` for the harmonic ensemble.
pub fn asymptotic_riesz_constant(d: usize, s: f64) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    if !(s > 0.0 && s < df) {
        return Err(Error::Domain(format!("needs 0 < s < d = {d}, got {s}")));
    }
    let ln_fact = lg(df + 1.0);
    let ln = (s - s / df) * LN_2 + continuous_vs(d, s)?.ln() + (s / df - 1.0) * ln_fact + df.ln()
        + lg(1.0 + df / 2.0)
        + lg((1.0 + s) / 2.0)
        + lg(df - s / 2.0)
        - 0.5 * PI.ln()
        - lg(1.0 + s / 2.0)
        - lg(1.0 + (s + df) / 2.0);
    Ok(ln.exp())
}

/// Two-term large-`n` prediction `n² V_s − C_{s,d} n^{1+s/d}`.
pub fn asymptotic_riesz(d: usize, n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(nf * nf * continuous_vs(d, s)? - asymptotic_riesz_constant(d, s)? * nf.powf(1.0 + s / d as f64))
}

/// Expected logarithmic energy of the harmonic ensemble,
/// `n² V_log − (n/2)(Σ_{k=1}^L 1/(d/2+k) + H_{L+d−1} + ψ₀(1/2) − ψ₀(d/2))`.
pub fn expected_log_harmonic(d: usize, big_l: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    let n = HarmonicEnsemble::new(d, big_l)?.n() as f64;
    let mut bracket: CompensatedSum = (1..=big_l).map(|k| 1.0 / (df / 2.0 + k as f64)).collect();
    bracket.add(harmonic_number(big_l + d - 1));
    bracket.add(digamma(0.5)?);
    bracket.add(-digamma(df / 2.0)?);
    Ok(n * n * continuous_vlog(d)? - 0.5 * n * bracket.value())
}

/// `C_d` in `E_0 ≈ n² V_log − (1/d) n log n + C_d n`.
pub fn log_asymptotic_constant(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok((2.0f64.ln() - lg(df + 1.0)) / df + LN_2 + digamma(df / 2.0)? + 1.0 / df)
}

/// Two-term prediction `n² V_log − (1/d) n log n + C_d n`.
pub fn asymptotic_log(d: usize, n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(nf * nf * continuous_vlog(d)? - nf * nf.ln() / d as f64 + log_asymptotic_constant(d)? * nf)
}

/// Leading coefficient `ω_{d−1}/(d ω_d)` of `E_d ≈ c n² log n`.
pub fn singular_leading_coefficient(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(surface_ratio(d) / d as f64)
}

/// The published second-order constant of the `s = d` expansion,
/// `(ω_{d−1}/(2ω_d))(ψ₀(d+1) − ψ₀(d/2+1)) − ψ₀(d/2) − 1/d − (1/d) log(2/d!)`.
///
/// Equals `γ − 3/8` at `d = 2`. See [`singular_n2_coefficient`] for the value
/// the expected energy actually approaches.
pub fn singular_asymptotic_constant(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok(surface_ratio(d) / 2.0 * (digamma(df + 1.0)? - digamma(df / 2.0 + 1.0)?)
        - digamma(df / 2.0)?
        - 1.0 / df
        - (2.0f64.ln() - lg(df + 1.0)) / df)
}

/// Limit of `(𝔼E_d − (ω_{d−1}/(dω_d)) n² log n) / n²` for the harmonic ensemble,
/// `(ω_{d−1}/ω_d)((ψ₀(d+1) − ψ₀(d/2+1))/2 − ψ₀(d/2) − 1/d − (1/d) log(2/d!))`.
pub fn singular_n2_coefficient(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    let inner = 0.5 * (digamma(df + 1.0)? - digamma(df / 2.0 + 1.0)?)
        - digamma(df / 2.0)?
        - 1.0 / df
        - (2.0f64.ln() - lg(df + 1.0)) / df;
    Ok(surface_ratio(d) * inner)
}

/// Two-term prediction `(ω_{d−1}/(dω_d)) n² log n + c n²` with the
/// coefficient from [`singular_n2_coefficient`].
pub fn asymptotic_singular(d: usize, n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(singular_leading_coefficient(d)? * nf * nf * nf.ln() + singular_n2_coefficient(d)? * nf * nf)
}

fn check_s2(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::Domain(format!("s = 2 formulas need d >= 3, got {d}")));
    }
    Ok(())
}

fn gegenbauer_at_one(d: usize, ell: usize) -> Result<f64> {
    Ok(binomial((d + ell - 2) as u64, ell as u64)? as f64)
}

/// `Q_{k,j} = ∫ (1−t)^{d/2−2} (1+t)^{d/2−1} C_k C_j dt
/// = binom(d+min(k,j)−2, min(k,j)) 2^{d−2} B(d/2, d/2−1)` for `d ≥ 3`.
pub fn q_integral(d: usize, k: usize, j: usize) -> Result<f64> {
    check_s2(d)?;
    let df = d as f64;
    let base = ((df - 2.0) * LN_2 + ln_beta(df / 2.0, df / 2.0 - 1.0)?).exp();
    Ok(gegenbauer_at_one(d, k.min(j))? * base)
}

/// `F(a) = aᵀ M a` with `M_{kj} = binom(d+min(k,j)−2, min(k,j))`, evaluated as
/// `Σ_ℓ a_ℓ M_{ℓℓ} (a_ℓ + 2 Σ_{j>ℓ} a_j)`.
pub fn kernel_quadratic_form(k: &IsotropicProjectionKernel) -> Result<f64> {
    check_s2(k.d())?;
    let a = k.coefficients();
    let mut tail = 0.0;
    let mut acc = CompensatedSum::new();
    for ell in (0..a.len()).rev() {
        if a[ell] != 0.0 {
            acc.add(a[ell] * gegenbauer_at_one(k.d(), ell)? * (a[ell] + 2.0 * tail));
        }
        tail += a[ell];
    }
    Ok(acc.value())
}

/// Expected Riesz 2-energy, `V₂ (n² − F(a))`, for `d ≥ 3`.
pub fn expected_e2_closed_form(k: &IsotropicProjectionKernel) -> Result<f64> {
    check_s2(k.d())?;
    let n = k.trace() as f64;
    Ok(continuous_vs(k.d(), 2.0)? * (n * n - kernel_quadratic_form(k)?))
}

/// Outcome of [`compare_kernels`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelComparison {
    /// Ordering of the expected 2-energies of `a` and `b`.
    pub ordering: Ordering,
    pub expected_a: f64,
    pub expected_b: f64,
    /// Whether every degree missing from `a` below one of its included
    /// degrees is also missing from `b`. When it holds, `a` is guaranteed to
    /// have the smaller expected energy.
    pub gap_condition: bool,
}

/// Compares the expected 2-energies of two kernels with equal `d ≥ 3` and trace.
pub fn compare_kernels(a: &IsotropicProjectionKernel, b: &IsotropicProjectionKernel) -> Result<KernelComparison> {
    if a.d() != b.d() {
        return Err(Error::Incomparable(format!("dimensions differ: {} vs {}", a.d(), b.d())));
    }
    if a.trace() != b.trace() {
        return Err(Error::Incomparable(format!("traces differ: {} vs {}", a.trace(), b.trace())));
    }
    let expected_a = expected_e2_closed_form(a)?;
    let expected_b = expected_e2_closed_form(b)?;
    let ordering = if a.degree_set() == b.degree_set() {
        Ordering::Equal
    } else {
        expected_a.total_cmp(&expected_b)
    };
    let top = a.degree_set().last().copied().unwrap_or(0);
    let gap_condition = (0..top)
        .filter(|i| a.coefficients()[*i] == 0.0)
        .all(|i| b.coefficients().get(i).is_none_or(|&c| c == 0.0));
    Ok(KernelComparison {
        ordering,
        expected_a,
        expected_b,
        gap_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::enumerate_projection_kernels;
    use crate::quadrature::integrate_weighted;
    use crate::sampling::{run_trials, sample_dpp, RngStream};
    use crate::specfun::{gegenbauer_eval, EULER_GAMMA};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn config(d: usize, pts: Vec<Vec<f64>>) -> PointConfiguration {
        PointConfiguration::new(d, pts).unwrap()
    }

    fn roots_of_unity(n: usize) -> PointConfiguration {
        let pts = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                vec![a.cos(), a.sin(), 0.0]
            })
            .collect();
        config(2, pts)
    }

    #[test]
    fn small_discrete_energies() {
        let antipodal = config(2, vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]]);
        assert!((discrete_riesz(&antipodal, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((discrete_log(&antipodal).unwrap() + 2.0 * LN_2).abs() < 1e-15);
        let tri = roots_of_unity(3);
        assert!((discrete_riesz(&tri, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(discrete_riesz(&tri, 0.0).is_err());
    }

    #[test]
    fn roots_of_unity_log_energy() {
        for n in [2usize, 5, 17, 100, 257] {
            let e = discrete_log(&roots_of_unity(n)).unwrap();
            let expect = -(n as f64) * (n as f64).ln();
            assert!((e - expect).abs() < 1e-10 * expect.abs(), "n={n}");
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let x = config(2, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert_eq!(discrete_riesz(&x, 1.0), Err(Error::SingularConfiguration { i: 0, j: 2 }));
        assert!(discrete_log(&x).is_err());
    }

    #[test]
    fn thread_count_does_not_change_energy() {
        let e = HarmonicEnsemble::new(2, 12).unwrap();
        let x = sample_dpp(&e, RngStream::new(4, 0)).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| discrete_riesz(&x, 1.3).unwrap());
        let b = four.install(|| discrete_riesz(&x, 1.3).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn continuous_energies() {
        assert!((continuous_vs(2, 1.0).unwrap() - 1.0).abs() < 1e-14);
        for d in 3..10 {
            let expect = (d as f64 - 1.0) / (2.0 * d as f64 - 4.0);
            assert!((continuous_vs(d, 2.0).unwrap() - expect).abs() < 1e-13);
        }
        assert!((continuous_vs(4, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(continuous_vs(3, 3.0), Err(Error::Pole { .. })));
        assert!((continuous_vlog(2).unwrap() - (0.5 - LN_2)).abs() < 1e-14);
        assert!((continuous_vlog(4).unwrap() - (5.0 / 12.0 - LN_2)).abs() < 1e-14);
    }

    #[test]
    fn vlog_is_derivative_of_vs() {
        for d in 2..=8 {
            let h = 1e-5;
            let fd = (-3.0 + 4.0 * continuous_vs(d, h).unwrap() - continuous_vs(d, 2.0 * h).unwrap()) / (2.0 * h);
            assert!((fd - continuous_vlog(d).unwrap()).abs() < 1e-8, "d={d}");
        }
    }

    #[test]
    fn vs_matches_beta_form() {
        // V_s = (ω_{d−1}/ω_d) 2^{d−1−s} B(d/2, d/2 − s/2)
        for d in 2..=6 {
            for &frac in &[0.1, 0.5, 0.9] {
                let s = frac * d as f64;
                let beta = surface_ratio(d)
                    * ((d as f64 - 1.0 - s) * LN_2 + ln_beta(d as f64 / 2.0, (d as f64 - s) / 2.0).unwrap()).exp();
                assert!(rel(continuous_vs(d, s).unwrap(), beta) < 1e-13);
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for d in 2..=6 {
            for l in [0usize, 1, 3, 8, 25] {
                let e = HarmonicEnsemble::new(d, l).unwrap();
                for &frac in &[0.15, 0.5, 0.9] {
                    let s = frac * d as f64;
                    let a = expected_riesz_harmonic(d, l, s).unwrap();
                    let b = expected_riesz_quadrature(&e, s).unwrap();
                    if l == 0 {
                        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
                    } else {
                        assert!(rel(a, b) < 1e-10, "d={d} L={l} s={s}: {a} vs {b}");
                        let n = e.n() as f64;
                        assert!(0.0 < a && a < n * n * continuous_vs(d, s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_domain() {
        let e = HarmonicEnsemble::new(2, 3).unwrap();
        assert!(matches!(expected_riesz_quadrature(&e, 4.0), Err(Error::DivergentEnergy { .. })));
        assert!(expected_riesz_quadrature(&e, 0.0).is_err());
        assert!(expected_riesz_harmonic(2, 3, 2.0).is_err());
        let one = IsotropicProjectionKernel::new(3, vec![0]).unwrap();
        assert!(expected_riesz_quadrature(&one, 1.0).unwrap().abs() < 1e-14);
        assert!(expected_riesz_quadrature(&one, 3.5).unwrap().abs() < 1e-14);
    }

    #[test]
    fn singular_range_is_continuous_in_s() {
        // the two quadrature branches meet at s = d
        let e = HarmonicEnsemble::new(3, 6).unwrap();
        let below = expected_riesz_quadrature(&e, 3.0 - 1e-7).unwrap();
        let at = expected_riesz_quadrature(&e, 3.0).unwrap();
        assert!(rel(below, at) < 1e-5);
        let above = expected_riesz_quadrature(&e, 4.5).unwrap();
        assert!(above > at);
    }

    #[test]
    fn log_energy_closed_form() {
        for d in 2..=8 {
            assert!(expected_log_harmonic(d, 0).unwrap().abs() < 1e-12, "d={d}");
        }
        // second-order one-sided derivative of the Riesz expectation at s = 0
        for d in 2..=4 {
            for l in [2usize, 5, 10, 20] {
                let n = HarmonicEnsemble::new(d, l).unwrap().n() as f64;
                let h = 1e-5;
                let g0 = n * (n - 1.0);
                let g1 = expected_riesz_harmonic(d, l, h).unwrap();
                let g2 = expected_riesz_harmonic(d, l, 2.0 * h).unwrap();
                let fd = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h);
                let e0 = expected_log_harmonic(d, l).unwrap();
                assert!(rel(fd, e0) < 1e-6, "d={d} L={l}: {fd} vs {e0}");
            }
        }
    }

    #[test]
    fn log_constants() {
        let c2 = 0.5 + LN_2 - EULER_GAMMA;
        assert!((log_asymptotic_constant(2).unwrap() - c2).abs() < 1e-13);
        assert!((c2 - 0.6159).abs() < 1e-4);
        // the error decays like 1/L
        let err = |d: usize, l: usize| {
            let n = HarmonicEnsemble::new(d, l).unwrap().n() as f64;
            let e = expected_log_harmonic(d, l).unwrap();
            let c = (e - n * n * continuous_vlog(d).unwrap() + n * n.ln() / d as f64) / n;
            (c - log_asymptotic_constant(d).unwrap()).abs()
        };
        for d in 2..=4 {
            let (a, b) = (err(d, 50), err(d, 200));
            assert!(b < a / 3.0, "d={d}: {a} {b}");
        }
        assert!(err(3, 200) < 0.01 * log_asymptotic_constant(3).unwrap().abs());
        let (a, b) = (asymptotic_log(2, 10_000).unwrap(), expected_log_harmonic(2, 99).unwrap());
        assert!(rel(a, b) < 1e-5);
    }

    #[test]
    fn riesz_asymptotic_constant() {
        // d = 2 lies below 2^{−s} Γ(1 − s/2)
        for i in 1..40 {
            let s = 0.05 * i as f64;
            let bound = 2f64.powf(-s) * crate::specfun::gamma(1.0 - s / 2.0);
            assert!(asymptotic_riesz_constant(2, s).unwrap() < bound, "s={s}");
        }
        let n = HarmonicEnsemble::new(3, 80).unwrap().n();
        let exact = expected_riesz_harmonic(3, 80, 1.5).unwrap();
        let approx = asymptotic_riesz(3, n, 1.5).unwrap();
        assert!(rel(approx, exact) < 1e-5);
    }

    #[test]
    fn singular_constants() {
        assert!((singular_asymptotic_constant(2).unwrap() - (EULER_GAMMA - 0.375)).abs() < 1e-13);
        assert!((singular_n2_coefficient(2).unwrap() - (EULER_GAMMA - 0.25) / 2.0).abs() < 1e-13);
        assert!((singular_leading_coefficient(2).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn singular_second_order_converges() {
        for d in [2usize, 3] {
            let l = 60;
            let e = HarmonicEnsemble::new(d, l).unwrap();
            let n = e.n() as f64;
            let value = expected_riesz_quadrature(&e, d as f64).unwrap();
            let lead = singular_leading_coefficient(d).unwrap() * n * n * n.ln();
            let second = (value - lead) / (n * n);
            let c = singular_n2_coefficient(d).unwrap();
            assert!(rel(second, c) < 0.05, "d={d}: {second} vs {c}");
        }
    }

    #[test]
    fn q_integral_against_defining_integral() {
        let d = 4;
        let lambda = (d as f64 - 1.0) / 2.0;
        for k in 0..=10 {
            for j in 0..=10 {
                let q = integrate_weighted(
                    -1.0,
                    1.0,
                    d as f64 / 2.0 - 2.0,
                    d as f64 / 2.0 - 1.0,
                    |t| gegenbauer_eval(lambda, k, t) * gegenbauer_eval(lambda, j, t),
                    20,
                )
                .unwrap();
                let closed = q_integral(d, k, j).unwrap();
                assert!(rel(q, closed) < 1e-10, "k={k} j={j}");
                assert_eq!(closed, q_integral(d, j, k).unwrap());
            }
        }
        assert!(q_integral(2, 0, 0).is_err());
    }

    #[test]
    fn quadratic_form_identities() {
        let d = 5;
        for degrees in [vec![0], vec![0, 1, 2, 3], vec![1, 4, 6], vec![2, 3, 9]] {
            let k = IsotropicProjectionKernel::new(d, degrees).unwrap();
            let a = k.coefficients();
            let mut brute = 0.0;
            for i in 0..a.len() {
                for j in 0..a.len() {
                    brute += a[i] * a[j] * gegenbauer_at_one(d, i.min(j)).unwrap();
                }
            }
            assert!(rel(kernel_quadratic_form(&k).unwrap(), brute) < 1e-13);
            let q = expected_riesz_quadrature(&k, 2.0).unwrap();
            let c = expected_e2_closed_form(&k).unwrap();
            if k.trace() == 1 {
                assert_eq!(c, 0.0);
            } else {
                assert!(rel(c, q) < 1e-10);
            }
        }
        let h = IsotropicProjectionKernel::new(2, vec![0, 1]).unwrap();
        assert!(expected_e2_closed_form(&h).is_err());
    }

    #[test]
    fn harmonic_kernel_is_optimal_at_196() {
        let kernels = enumerate_projection_kernels(4, 196, 12).unwrap();
        let harmonic = kernels.iter().find(|k| k.is_harmonic()).unwrap();
        for k in &kernels {
            let cmp = compare_kernels(harmonic, k).unwrap();
            assert!(cmp.gap_condition);
            if k.is_harmonic() {
                assert_eq!(cmp.ordering, Ordering::Equal);
            } else {
                assert_eq!(cmp.ordering, Ordering::Less);
            }
        }
    }

    #[test]
    fn comparison_errors_and_gap_condition() {
        let a = IsotropicProjectionKernel::new(4, vec![0, 2]).unwrap();
        let b = IsotropicProjectionKernel::new(4, vec![0, 1]).unwrap();
        let c = IsotropicProjectionKernel::new(3, vec![0, 2]).unwrap();
        assert!(matches!(compare_kernels(&a, &b), Err(Error::Incomparable(_))));
        assert!(matches!(compare_kernels(&a, &c), Err(Error::Incomparable(_))));
        // on S³, h_ℓ = (ℓ+1)², so {2, 3} and {4} both have trace 25
        let low = IsotropicProjectionKernel::new(3, vec![2, 3]).unwrap();
        let high = IsotropicProjectionKernel::new(3, vec![4]).unwrap();
        let fwd = compare_kernels(&low, &high).unwrap();
        assert!(fwd.gap_condition);
        assert_eq!(fwd.ordering, Ordering::Less);
        let back = compare_kernels(&high, &low).unwrap();
        assert!(!back.gap_condition);
        assert_eq!(back.ordering, Ordering::Greater);
    }

    #[test]
    fn monte_carlo_mean_energy_small() {
        let e = HarmonicEnsemble::new(2, 4).unwrap();
        let trials = 300;
        let vals = run_trials(trials, 17, |rng| discrete_riesz(&sample_dpp(&e, rng)?, 1.0)).unwrap();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        let se = (var / trials as f64).sqrt();
        let expect = expected_riesz_harmonic(2, 4, 1.0).unwrap();
        assert!((mean - expect).abs() < 4.0 * se, "mean {mean} expect {expect} se {se}");
    }
}
