//! Scalar special functions and orthogonal-polynomial recurrences.
//!
//! Everything here is pure `f64` arithmetic. Gamma ratios are always formed
//! as differences of [`ln_gamma`], never as quotients of `Γ` values, so the
//! formulas built on top survive degrees of several hundred.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Shift target for the asymptotic series of `ln Γ` and `ψ₀`.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// Parameters of a Jacobi polynomial `P_n^{(α,β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyParams {
    alpha: f64,
    beta: f64,
    degree: usize,
}

impl PolyParams {
    pub fn new(alpha: f64, beta: f64, degree: usize) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            degree,
        })
    }

    /// The Jacobi parameters `(1 + λ, λ)` with `λ = (d − 2)/2` that describe
    /// the reproducing kernel of polynomials of degree `≤ degree` on `S^d`.
    pub fn harmonic(d: usize, degree: usize) -> Result<Self> {
        let lambda = (d as f64 - 2.0) / 2.0;
        Self::new(1.0 + lambda, lambda, degree)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1}), k = 1..8
    let series = r
        * (1.0 / 12.0
            + r2 * (-1.0 / 360.0
                + r2 * (1.0 / 1260.0
                    + r2 * (-1.0 / 1680.0
                        + r2 * (1.0 / 1188.0
                            + r2 * (-691.0 / 360_360.0
                                + r2 * (1.0 / 156.0 + r2 * (-3617.0 / 122_400.0))))))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// Natural logarithm of `Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x >= ASYMPTOTIC_FROM {
        return Ok(stirling_ln_gamma(x));
    }
    // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < ASYMPTOTIC_FROM {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(stirling_ln_gamma(shifted) - product.ln())
}

/// `Γ(x)` for real `x`, using reflection for negative arguments.
///
/// Returns NaN at the poles `x = 0, -1, -2, ...`.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        return ln_gamma(x).map(f64::exp).unwrap_or(f64::NAN);
    }
    if x == x.floor() {
        return f64::NAN;
    }
    let reflected = ln_gamma(1.0 - x).map(f64::exp).unwrap_or(f64::NAN);
    PI / ((PI * x).sin() * reflected)
}

/// Digamma function `ψ₀ = (ln Γ)'` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut shifted = x;
    let mut shift = 0.0;
    while shifted < ASYMPTOTIC_FROM {
        shift += 1.0 / shifted;
        shifted += 1.0;
    }
    let r2 = 1.0 / (shifted * shifted);
    let series = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32_760.0 - r2 / 12.0))))));
    Ok(shifted.ln() - 0.5 / shifted - series - shift)
}

/// `H_k = 1 + 1/2 + ... + 1/k`, with `H_0 = 0`.
pub fn harmonic_number(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).collect::<CompensatedSum>().value()
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Generalised binomial coefficient `binom(x, k)` for real `x` and integer `k`.
pub fn binomial_real(x: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (x - k as f64 + i as f64) / i as f64)
}

/// Evaluates `P_n^{(α,β)}(t)` by the forward three-term recurrence in degree.
pub fn jacobi_eval(p: PolyParams, t: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    if p.degree == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * t;
    let ab2 = a * a - b * b;
    for n in 2..=p.degree {
        let n = n as f64;
        let c = 2.0 * n + a + b;
        let lead = 2.0 * n * (n + a + b) * (c - 2.0);
        let next = ((c - 1.0) * (c * (c - 2.0) * t + ab2) * cur
            - 2.0 * (n + a - 1.0) * (n + b - 1.0) * c * prev)
            / lead;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates the Gegenbauer polynomial `C_k^λ(t)` normalised so that
/// `C_k^λ(1) = binom(k + 2λ − 1, k)`.
pub fn gegenbauer_eval(lambda: f64, k: usize, t: f64) -> f64 {
    let mut out = 0.0;
    gegenbauer_scan(lambda, k, t, |j, c| {
        if j == k {
            out = c;
        }
    });
    out
}

/// Sum `Σ_k coeffs[k] · C_k^λ(t)` in one recurrence pass.
pub fn gegenbauer_series(lambda: f64, coeffs: &[f64], t: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    gegenbauer_scan(lambda, coeffs.len() - 1, t, |k, c| acc += coeffs[k] * c);
    acc
}

/// Calls `visit(k, C_k^λ(t))` for `k = 0..=kmax`.
pub fn gegenbauer_scan(lambda: f64, kmax: usize, t: f64, mut visit: impl FnMut(usize, f64)) {
    let mut prev = 1.0;
    visit(0, prev);
    if kmax == 0 {
        return;
    }
    let mut cur = 2.0 * lambda * t;
    visit(1, cur);
    for k in 2..=kmax {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda - 1.0) * t * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
        visit(k, cur);
    }
}

fn check_hyp_domain(d: usize, s: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("sphere dimension must be >= 2, got {d}")));
    }
    if !(0.0..=d as f64).contains(&s) {
        return Err(Error::Domain(format!("4F3 series requires 0 <= s <= d = {d}, got s = {s}")));
    }
    Ok(())
}

/// The balanced terminating series
/// `4F3(−L, d+L, (d−s)/2, −s/2; d/2+1, d−s/2+L, −s/2−L; 1)`.
///
/// Terms are built by running products of Pochhammer ratios and summed with
/// compensation. The endpoint values `s = 0` and `s = d` are exactly 1.
pub fn hyp4f3_terminating(d: usize, big_l: usize, s: f64) -> Result<f64> {
    check_hyp_domain(d, s)?;
    if s == 0.0 || s == d as f64 {
        return Ok(1.0);
    }
    let df = d as f64;
    let lf = big_l as f64;
    let mut term = 1.0;
    let mut sum = CompensatedSum::new();
    sum.add(term);
    for k in 0..big_l {
        let kf = k as f64;
        let num = (kf - lf) * (df + lf + kf) * ((df - s) / 2.0 + kf) * (kf - s / 2.0);
        let den = (df / 2.0 + 1.0 + kf) * (df - s / 2.0 + lf + kf) * (kf - s / 2.0 - lf) * (kf + 1.0);
        term *= num / den;
        if term == 0.0 {
            break;
        }
        sum.add(term);
    }
    Ok(sum.value())
}

/// The quotients `(−L)_k (d+L)_k / ((d−s/2+L)_k (−s/2−L)_k)` for `k = 0..=L`.
pub fn hyp4f3_balance_ratios(d: usize, big_l: usize, s: f64) -> Result<Vec<f64>> {
    check_hyp_domain(d, s)?;
    let df = d as f64;
    let lf = big_l as f64;
    let mut out = Vec::with_capacity(big_l + 1);
    let mut q = 1.0;
    out.push(q);
    for k in 0..big_l {
        let kf = k as f64;
        q *= (kf - lf) * (df + lf + kf) / ((df - s / 2.0 + lf + kf) * (kf - s / 2.0 - lf));
        out.push(q);
    }
    Ok(out)
}

/// Gauss's value `2F1((d−s)/2, −s/2; d/2+1; 1)
/// = Γ(1+d/2) Γ(1+s) / (Γ(1+s/2) Γ(1+(d+s)/2))`, valid for `s > −1`.
pub fn gauss_2f1_at_one(d: usize, s: f64) -> Result<f64> {
    if !(s > -1.0) {
        return Err(Error::Domain(format!("Gauss summation needs s > -1, got {s}")));
    }
    let df = d as f64;
    let ln = ln_gamma(1.0 + df / 2.0)? + ln_gamma(1.0 + s)?
        - ln_gamma(1.0 + s / 2.0)?
        - ln_gamma(1.0 + (df + s) / 2.0)?;
    Ok(ln.exp())
}
