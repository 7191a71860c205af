//! Gauss–Jacobi rules and the one-dimensional reduction of zonal integrals.
//!
//! Endpoint singularities such as `(1 − t)^{−s/2}` are always folded into the
//! Jacobi weight, so the polynomial integrands that show up in the energy
//! formulas are integrated exactly up to rounding.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{ln_beta, ln_gamma};

const QL_TOLERANCE: f64 = 1e-14;
const QL_MAX_ITER: usize = 50;

/// An `m`-point Gauss rule for the weight `(1 − t)^α (1 + t)^β` on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    alpha: f64,
    beta: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)`, approximating `∫ f(t) (1 − t)^α (1 + t)^β dt`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// `∫_{−1}^{1} (1 − t)^α (1 + t)^β dt = 2^{α+β+1} B(α+1, β+1)`.
pub fn jacobi_weight_mass(alpha: f64, beta: f64) -> Result<f64> {
    check_exponents(alpha, beta)?;
    Ok(((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_beta(alpha + 1.0, beta + 1.0)?).exp())
}

fn check_exponents(alpha: f64, beta: f64) -> Result<()> {
    if alpha > -1.0 && beta > -1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "weight (1-t)^{alpha} (1+t)^{beta} is not integrable on [-1, 1]"
        )))
    }
}

/// Builds the Gauss–Jacobi rule by the Golub–Welsch method.
pub fn gauss_jacobi_rule(alpha: f64, beta: f64, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::Domain("quadrature rule needs at least one node".into()));
    }
    let mu0 = jacobi_weight_mass(alpha, beta)?;
    let (a, b) = (alpha, beta);

    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    diag[0] = (b - a) / (a + b + 2.0);
    for (n, slot) in diag.iter_mut().enumerate().skip(1) {
        let n = n as f64;
        *slot = (b * b - a * a) / ((2.0 * n + a + b) * (2.0 * n + a + b + 2.0));
    }
    for n in 1..m {
        let nf = n as f64;
        let c = 2.0 * nf + a + b;
        let sq = if n == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (c * c * (c + 1.0) * (c - 1.0))
        };
        off[n - 1] = sq.sqrt();
    }

    let mut first = vec![0.0; m];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(t, z)| (t, mu0 * z * z))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        alpha,
        beta,
        nodes,
        weights,
    })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `off[i]` couples rows `i` and `i + 1`; `off[n-1]` is scratch. On return
/// `diag` holds the eigenvalues and `z` the first row of the eigenvector
/// matrix, which is all Golub–Welsch needs.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= QL_TOLERANCE * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Numerical(format!(
                    "tridiagonal eigenvalue {l} did not converge in {QL_MAX_ITER} iterations"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Surface area `ω_d = 2π^{(d+1)/2} / Γ((d+1)/2)` of the unit sphere `S^d`.
pub fn sphere_surface(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h).expect("positive argument")).exp()
}

/// `ω_{d−1} / ω_d = Γ((d+1)/2) / (√π Γ(d/2))`.
pub fn surface_ratio(d: usize) -> f64 {
    let df = d as f64;
    let ln = ln_gamma((df + 1.0) / 2.0).expect("positive argument")
        - ln_gamma(df / 2.0).expect("positive argument")
        - 0.5 * PI.ln();
    ln.exp()
}

/// `∫_{S^d} f dμ` for a zonal `f(x) = g(⟨x, e⟩) (1 − t)^{extra_α} (1 + t)^{extra_β}`,
/// reduced to `(ω_{d−1}/ω_d) ∫ g(t) (1 − t)^{d/2−1+extra_α} (1 + t)^{d/2−1+extra_β} dt`.
pub fn zonal_integral(
    d: usize,
    g: impl Fn(f64) -> f64,
    extra_alpha: f64,
    extra_beta: f64,
    m: usize,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("sphere dimension must be positive".into()));
    }
    let base = d as f64 / 2.0 - 1.0;
    let rule = gauss_jacobi_rule(base + extra_alpha, base + extra_beta, m)?;
    Ok(surface_ratio(d) * rule.integrate(g))
}

/// `∫_a^b g(t) (1 − t)^p (1 + t)^q dt` for `−1 ≤ a < b ≤ 1`.
///
/// Endpoint factors are moved into a Jacobi weight when the interval touches
/// `±1`; factors away from the interval ends are treated as part of `g`.
pub fn integrate_weighted(
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    g: impl Fn(f64) -> f64,
    m: usize,
) -> Result<f64> {
    if !(-1.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::Domain(format!("interval [{a}, {b}] is not inside [-1, 1]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let half = (b - a) / 2.0;
    let at = |u: f64| a + half * (u + 1.0);
    let touches_left = a == -1.0;
    let touches_right = b == 1.0;
    let value = match (touches_left, touches_right) {
        (true, true) => gauss_jacobi_rule(p, q, m)?.integrate(g),
        (false, true) => {
            // 1 − t = half (1 − u)
            let rule = gauss_jacobi_rule(p, 0.0, m)?;
            half.powf(p + 1.0)
                * rule.integrate(|u| {
                    let t = at(u);
                    g(t) * (1.0 + t).powf(q)
                })
        }
        (true, false) => {
            // 1 + t = half (1 + u)
            let rule = gauss_jacobi_rule(0.0, q, m)?;
            half.powf(q + 1.0)
                * rule.integrate(|u| {
                    let t = at(u);
                    g(t) * (1.0 - t).powf(p)
                })
        }
        (false, false) => {
            let rule = gauss_jacobi_rule(0.0, 0.0, m)?;
            half * rule.integrate(|u| {
                let t = at(u);
                g(t) * (1.0 - t).powf(p) * (1.0 + t).powf(q)
            })
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::HarmonicEnsemble;
    use crate::specfun::{jacobi_eval, PolyParams};
    use proptest::prelude::*;

    /// `∫ t^k (1−t)^α (1+t)^β dt` from `t^k = Σ_j binom(k,j) (1+t)^j (−1)^{k−j}`.
    fn monomial_moment(alpha: f64, beta: f64, k: usize) -> f64 {
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            total += sign * binom * jacobi_weight_mass(alpha, beta + j as f64).unwrap();
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        total
    }

    #[test]
    fn legendre_small_rules() {
        let r1 = gauss_jacobi_rule(0.0, 0.0, 1).unwrap();
        assert!(r1.nodes()[0].abs() < 1e-15);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-14);

        let r2 = gauss_jacobi_rule(0.0, 0.0, 2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[0] + x).abs() < 1e-15 && (r2.nodes()[1] - x).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-14 && (r2.weights()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(gauss_jacobi_rule(0.0, 0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(gauss_jacobi_rule(-1.0, 0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(zonal_integral(2, |_| 1.0, -1.0, 0.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn chebyshev_nodes() {
        // α = β = −1/2: nodes cos((2i−1)π/(2m)), weights π/m
        let m = 7;
        let rule = gauss_jacobi_rule(-0.5, -0.5, m).unwrap();
        for i in 0..m {
            let expect = -(((2 * i + 1) as f64) * PI / (2 * m) as f64).cos();
            assert!((rule.nodes()[i] - expect).abs() < 1e-14);
            assert!((rule.weights()[i] - PI / m as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn exactness_and_failure_at_2m() {
        for &(a, b) in &[(0.0, 0.0), (1.0, 0.0), (0.5, -0.5), (-0.3, 1.7), (2.0, 1.0)] {
            for m in 1..=6 {
                let rule = gauss_jacobi_rule(a, b, m).unwrap();
                for k in 0..2 * m {
                    let exact = monomial_moment(a, b, k);
                    let got = rule.integrate(|t| t.powi(k as i32));
                    assert!((got - exact).abs() <= 1e-9 * exact.abs().max(1.0), "a={a} b={b} m={m} k={k}");
                }
                // ∫ p_m² w > 0 while the rule sees zero
                let got = rule.integrate(|t| rule.nodes().iter().map(|x| (t - x).powi(2)).product());
                assert!(got.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_orthogonality() {
        let rule = gauss_jacobi_rule(1.0, 0.0, 12).unwrap();
        let p5 = PolyParams::new(1.0, 0.0, 5).unwrap();
        let p3 = PolyParams::new(1.0, 0.0, 3).unwrap();
        let cross = rule.integrate(|t| jacobi_eval(p5, t) * jacobi_eval(p3, t));
        assert!(cross.abs() < 1e-12);

        for d in 2..=6usize {
            let p = PolyParams::harmonic(d, 0).unwrap();
            let rule = gauss_jacobi_rule(p.alpha(), p.beta(), 40).unwrap();
            for l in 0..20 {
                let pl = PolyParams::harmonic(d, l).unwrap();
                let diag = rule.integrate(|t| jacobi_eval(pl, t).powi(2));
                for k in 0..l {
                    let pk = PolyParams::harmonic(d, k).unwrap();
                    let off = rule.integrate(|t| jacobi_eval(pl, t) * jacobi_eval(pk, t));
                    assert!(off.abs() <= 1e-10 * diag, "d={d} l={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn interlacing() {
        for &(a, b) in &[(0.0, 0.0), (1.5, 0.5), (-0.5, 2.0)] {
            for m in 1..30 {
                let r = gauss_jacobi_rule(a, b, m).unwrap();
                let s = gauss_jacobi_rule(a, b, m + 1).unwrap();
                for i in 0..m {
                    assert!(s.nodes()[i] < r.nodes()[i] && r.nodes()[i] < s.nodes()[i + 1]);
                }
            }
        }
    }

    #[test]
    fn surfaces() {
        assert!((sphere_surface(1) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(3) - 2.0 * PI * PI).abs() < 1e-13);
        for d in 2..10 {
            let r = sphere_surface(d - 1) / sphere_surface(d);
            assert!((surface_ratio(d) - r).abs() < 1e-14);
        }
    }

    #[test]
    fn zonal_basics() {
        for d in 1..=7 {
            assert!((zonal_integral(d, |_| 1.0, 0.0, 0.0, 3).unwrap() - 1.0).abs() < 1e-14);
        }
        // d = 2, s = 1: ∫ |x − y|^{−1} dμ = 1, with |x − y| = (2 − 2t)^{1/2}
        let v = zonal_integral(2, |_| 2f64.powf(-0.5), -0.5, 0.0, 4).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reproducing_kernel_trace() {
        for d in 2..=6 {
            for l in (0..=60).step_by(6) {
                let e = HarmonicEnsemble::new(d, l).unwrap();
                let n = e.n() as f64;
                let v = zonal_integral(d, |t| e.eval(t).powi(2) / n, 0.0, 0.0, l + d + 8).unwrap();
                assert!((v - 1.0).abs() < 1e-10, "d={d} L={l} v={v}");
            }
        }
    }

    #[test]
    fn weighted_pieces_add_up() {
        let g = |t: f64| 1.0 + t * t * t - 0.5 * t;
        let (p, q) = (0.3, -0.4);
        let whole = integrate_weighted(-1.0, 1.0, p, q, g, 20).unwrap();
        let parts = integrate_weighted(-1.0, -0.2, p, q, g, 40).unwrap()
            + integrate_weighted(-0.2, 0.4, p, q, g, 40).unwrap()
            + integrate_weighted(0.4, 1.0, p, q, g, 40).unwrap();
        assert!((whole - parts).abs() < 1e-12);
        assert_eq!(integrate_weighted(0.1, 0.1, p, q, g, 5).unwrap(), 0.0);
        assert!(integrate_weighted(0.5, 1.5, p, q, g, 5).is_err());
    }

    proptest! {
        #[test]
        fn weights_positive_and_mass(a in -0.95f64..4.0, b in -0.95f64..4.0, m in 1usize..60) {
            let rule = gauss_jacobi_rule(a, b, m).unwrap();
            let mass = jacobi_weight_mass(a, b).unwrap();
            prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
            prop_assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(rule.nodes().iter().all(|&t| t > -1.0 && t < 1.0));
            let total: f64 = rule.weights().iter().sum();
            prop_assert!((total - mass).abs() <= 1e-10 * mass);
        }

        #[test]
        fn random_polynomials_integrated_exactly(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 1..12),
            a in -0.9f64..2.0,
            b in -0.9f64..2.0,
        ) {
            let deg = coeffs.len() - 1;
            let m = deg / 2 + 1;
            let rule = gauss_jacobi_rule(a, b, m).unwrap();
            let got = rule.integrate(|t| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c));
            let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * monomial_moment(a, b, k)).sum();
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| (c * monomial_moment(a, b, k)).abs()).sum();
            prop_assert!((got - exact).abs() <= 1e-10 * scale.max(1e-300));
        }
    }
}
