//! Distribution statistics of point configurations on `S^d`: cap counts and
//! their variance, smooth linear statistics, cap discrepancy, separation and
//! close pairs.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{HarmonicEnsemble, ProjectionKernel};
use crate::quadrature::{gauss_jacobi_rule, QuadratureRule, integrate_weighted, surface_ratio, zonal_integral};
use crate::sampling::{dot, run_trials, sample_dpp, PointConfiguration, RngStream};

/// Nodes used for one-dimensional cap-area integrals.
const CAP_NODES: usize = 32;

/// Largest relative change allowed between `m` and `2m` nodes in
/// [`variance_cap_semianalytic`].
const VARIANCE_TOLERANCE: f64 = 1e-4;

/// A closed spherical cap `{y : ⟨y, center⟩ ≥ cos radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    center: Vec<f64>,
    radius: f64,
}

impl CapSpec {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let norm = dot(&center, &center).sqrt();
        if center.len() < 2 || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("cap center must be a unit vector, norm is {norm}")));
        }
        if !(radius > 0.0 && radius < PI) {
            return Err(Error::Domain(format!("cap radius must lie in (0, pi), got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Cap around the last coordinate axis of `R^{d+1}`.
    pub fn polar(d: usize, radius: f64) -> Result<Self> {
        let mut center = vec![0.0; d + 1];
        center[d] = 1.0;
        Self::new(center, radius)
    }

    /// Polar cap with normalized area `measure ∈ (0, 1)`.
    pub fn polar_with_measure(d: usize, measure: f64) -> Result<Self> {
        if !(measure > 0.0 && measure < 1.0) {
            return Err(Error::Domain(format!("cap measure must lie in (0, 1), got {measure}")));
        }
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if cap_measure(d, mid) < measure {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::polar(d, 0.5 * (lo + hi))
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Sphere dimension implied by the center.
    pub fn d(&self) -> usize {
        self.center.len() - 1
    }
}

/// A Monte Carlo or analytic statistic with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub statistic: String,
    pub estimate: f64,
    /// Present exactly when `trials > 1`.
    pub standard_error: Option<f64>,
    pub trials: usize,
    pub reference: Option<f64>,
}

impl StatReport {
    pub fn analytic(statistic: &str, estimate: f64) -> Self {
        Self {
            statistic: statistic.to_owned(),
            estimate,
            standard_error: None,
            trials: 1,
            reference: None,
        }
    }

    /// Mean of `samples` with its standard error.
    pub fn mean_of(statistic: &str, samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let standard_error = (n > 1).then(|| (sample_variance(samples) / n as f64).sqrt());
        Self {
            statistic: statistic.to_owned(),
            estimate: mean,
            standard_error,
            trials: n,
            reference: None,
        }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Jackknife standard error of the unbiased sample variance.
pub fn jackknife_variance_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    let s1: f64 = xs.iter().sum();
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    let m = (n - 1) as f64;
    let loo: Vec<f64> = xs
        .iter()
        .map(|x| {
            let a = s1 - x;
            let b = s2 - x * x;
            (b - a * a / m) / (m - 1.0)
        })
        .collect();
    let mean = loo.iter().sum::<f64>() / n as f64;
    (m / n as f64 * loo.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt()
}

/// Normalized area `μ(A)` of a cap of geodesic radius `radius` on `S^d`, `d ≥ 1`.
pub fn cap_measure(d: usize, radius: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    if radius >= PI {
        return 1.0;
    }
    if radius > PI / 2.0 {
        return 1.0 - cap_measure(d, PI - radius);
    }
    // μ = (ω_{d−1}/ω_d) ∫_0^r sin^{d−1}θ dθ, an entire integrand on a short interval
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    let rule = RULE.get_or_init(|| gauss_jacobi_rule(0.0, 0.0, CAP_NODES).expect("Legendre rule"));
    let half = radius / 2.0;
    let p = (d - 1) as i32;
    surface_ratio(d) * half * rule.integrate(|u| (half * (u + 1.0)).sin().powi(p))
}

/// `#{i : ⟨x_i, center⟩ ≥ cos radius}`.
pub fn count_in_cap(x: &PointConfiguration, cap: &CapSpec) -> usize {
    let c = cap.radius.cos();
    x.iter().filter(|p| dot(p, &cap.center) >= c).count()
}

/// Cap counts of `trials` independent draws, trial `t` using `RngStream::new(seed, t)`.
pub fn cap_counts<K: ProjectionKernel + ?Sized>(k: &K, cap: &CapSpec, trials: usize, seed: u64) -> Result<Vec<f64>> {
    run_trials(trials, seed, |rng| Ok(count_in_cap(&sample_dpp(k, rng)?, cap) as f64))
}

/// Monte Carlo variance of the cap count, with a jackknife standard error.
pub fn variance_cap_mc<K: ProjectionKernel + ?Sized>(
    k: &K,
    cap: &CapSpec,
    trials: usize,
    seed: u64,
) -> Result<StatReport> {
    if trials < 2 {
        return Err(Error::Domain("variance needs at least two trials".into()));
    }
    let counts = cap_counts(k, cap, trials, seed)?;
    Ok(StatReport {
        statistic: "cap_count_variance".into(),
        estimate: sample_variance(&counts),
        standard_error: Some(jackknife_variance_se(&counts)),
        trials,
        reference: None,
    })
}

/// `Var(n_A) = ∫_A ∫_{A^c} K(x, y)² dμ(y) dμ(x)` by nested quadrature with `m`
/// nodes per axis, cross-checked against `2m` nodes.
pub fn variance_cap_semianalytic<K: ProjectionKernel + ?Sized>(k: &K, cap: &CapSpec, m: usize) -> Result<f64> {
    if cap.d() != k.dim() {
        return Err(Error::Domain(format!(
            "cap lives on S^{} but the kernel on S^{}",
            cap.d(),
            k.dim()
        )));
    }
    if m == 0 {
        return Err(Error::Domain("need at least one node".into()));
    }
    // A and A^c play symmetric roles
    let r = cap.radius.min(PI - cap.radius);
    let coarse = cap_variance_raw(k, r, m)?;
    let fine = cap_variance_raw(k, r, 2 * m)?;
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    if (coarse - fine).abs() > VARIANCE_TOLERANCE * scale {
        return Err(Error::Accuracy(format!(
            "cap variance changed from {coarse} to {fine} when doubling {m} nodes"
        )));
    }
    Ok(fine)
}

/// `∫_a^b f` with `θ = (a+b)/2 − (b−a)/2 cos φ`, which smooths square-root
/// behaviour at both ends.
fn integrate_cos_sub(a: f64, b: f64, rule: &[(f64, f64)], f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    rule.iter()
        .map(|&(u, w)| {
            let phi = PI / 2.0 * (u + 1.0);
            w * PI / 2.0 * half * phi.sin() * f(mid - half * phi.cos())
        })
        .sum()
}

fn cap_variance_raw<K: ProjectionKernel + ?Sized>(k: &K, r: f64, m: usize) -> Result<f64> {
    let d = k.dim();
    let legendre = gauss_jacobi_rule(0.0, 0.0, m)?;
    let rule: Vec<(f64, f64)> = legendre.nodes().iter().copied().zip(legendre.weights().iter().copied()).collect();
    let sin_pow = |x: f64| x.sin().powi(d as i32 - 1);
    let k2 = |theta: f64| k.eval(theta.cos()).powi(2) * sin_pow(theta);

    let inner = |eta: f64| {
        let b1 = (r - eta).abs();
        let b2 = (r + eta).min(2.0 * PI - r - eta);
        let first = if eta < r { 0.0 } else { integrate_cos_sub(0.0, b1, &rule, k2) };
        let last = if r + eta <= PI { integrate_cos_sub(b2, PI, &rule, k2) } else { 0.0 };
        let middle = integrate_cos_sub(b1, b2, &rule, |theta| {
            let c = (r.cos() - eta.cos() * theta.cos()) / (eta.sin() * theta.sin());
            let inside = cap_measure(d - 1, c.clamp(-1.0, 1.0).acos());
            k2(theta) * (1.0 - inside)
        });
        first + middle + last
    };
    let outer = integrate_cos_sub(0.0, r, &rule, |eta| sin_pow(eta) * inner(eta));
    Ok(surface_ratio(d).powi(2) * outer)
}

/// Exact variance of `Σ_i φ(x_i)` for a single coordinate function `φ(x) = x_j`,
/// `(1/(d+1)) ∫∫ K(x, y)² (1 − ⟨x, y⟩) dμ dμ`.
pub fn variance_coordinate_statistic<K: ProjectionKernel + ?Sized>(k: &K) -> Result<f64> {
    let d = k.dim();
    let m = k.max_degree() + d + 8;
    Ok(zonal_integral(d, |t| k.eval(t).powi(2), 1.0, 0.0, m)? / (d as f64 + 1.0))
}

/// Lower bound on the spherical cap discrepancy
/// `sup_A |#(x ∩ A)/n − μ(A)|`.
///
/// The probe family consists of `probes` random centers drawn from `rng` and
/// the first `min(probes, n)` points of `x` as centers; for every center all
/// caps whose boundary passes through a point of `x` are checked, both with
/// and without that boundary point. Enlarging `probes` only adds caps.
pub fn discrepancy_estimate(x: &PointConfiguration, probes: usize, rng: RngStream) -> Result<f64> {
    if probes == 0 {
        return Err(Error::Domain("need at least one probe".into()));
    }
    let n = x.len();
    if n == 0 {
        return Ok(0.0);
    }
    let d = x.d();
    let random = crate::sampling::sample_uniform(d, probes, rng);
    let centers = random.iter().chain(x.iter().take(probes.min(n)));
    let nf = n as f64;
    let mut best: f64 = 0.0;
    let mut angles = vec![0.0; n];
    for c in centers {
        for (a, p) in angles.iter_mut().zip(x.iter()) {
            *a = dot(p, c).clamp(-1.0, 1.0).acos();
        }
        angles.sort_by(f64::total_cmp);
        for (k, &theta) in angles.iter().enumerate() {
            let mu = cap_measure(d, theta);
            let closed = ((k + 1) as f64 / nf - mu).abs();
            let open = (k as f64 / nf - mu).abs();
            best = best.max(closed).max(open);
        }
    }
    Ok(best)
}

/// Minimum pairwise Euclidean distance.
pub fn separation(x: &PointConfiguration) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Domain("separation needs at least two points".into()));
    }
    let mut best = f64::INFINITY;
    for i in 1..n {
        let p = x.point(i);
        for j in 0..i {
            let r2: f64 = p.iter().zip(x.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.min(r2);
        }
    }
    Ok(best.sqrt())
}

/// `G(t, x) = #{(i, j) : i < j, ‖x_i − x_j‖ ≤ t}`.
pub fn close_pair_count(x: &PointConfiguration, t: f64) -> usize {
    let t2 = t * t;
    let n = x.len();
    let mut count = 0;
    for i in 1..n {
        let p = x.point(i);
        for j in 0..i {
            let r2: f64 = p.iter().zip(x.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            if r2 <= t2 {
                count += 1;
            }
        }
    }
    count
}

/// Largest `t` covered by [`expected_close_pairs_bound`], `(d+6)/((2L+d)L)`.
pub fn close_pairs_threshold(e: &HarmonicEnsemble) -> f64 {
    let (d, l) = (e.d() as f64, e.degree() as f64);
    (d + 6.0) / ((2.0 * l + d) * l)
}

/// Upper bound `L(L+d) π_L² ω_{d−1} t^{d+2} / (2 (d+2)² ω_d)` on `𝔼 G(t, x)`.
pub fn expected_close_pairs_bound(e: &HarmonicEnsemble, t: f64) -> Result<f64> {
    let threshold = close_pairs_threshold(e);
    if !(0.0..=threshold).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, {threshold}], got {t}")));
    }
    let (d, l, n) = (e.d() as f64, e.degree() as f64, e.n() as f64);
    Ok(l * (l + d) * n * n * t.powf(d + 2.0) * surface_ratio(e.d()) / (2.0 * (d + 2.0).powi(2)))
}

/// Expected number of unordered pairs with `⟨x_i, x_j⟩ ∈ [lo, hi]`,
/// `(1/2)(ω_{d−1}/ω_d) ∫_lo^hi (n² − K(u)²)(1 − u²)^{d/2−1} du`.
pub fn expected_pair_count<K: ProjectionKernel + ?Sized>(k: &K, lo: f64, hi: f64) -> Result<f64> {
    let d = k.dim();
    let n = k.trace() as f64;
    let e = d as f64 / 2.0 - 1.0;
    let m = k.max_degree() + d + 8;
    let v = integrate_weighted(lo, hi, e, e, |u| n * n - k.eval(u).powi(2), m)?;
    Ok(0.5 * surface_ratio(d) * v)
}

/// Exact `𝔼 G(t, x)` for the process of `k`, `0 ≤ t ≤ 2`.
pub fn expected_close_pairs<K: ProjectionKernel + ?Sized>(k: &K, t: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&t) {
        return Err(Error::Domain(format!("distance must lie in [0, 2], got {t}")));
    }
    expected_pair_count(k, 1.0 - t * t / 2.0, 1.0)
}

/// Result of [`jacobi_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiBoundReport {
    pub d: usize,
    pub big_l: usize,
    pub grid: usize,
    /// Largest amount by which `1 − c s ≤ P_L(1−s)/P_L(1)` fails.
    pub lower_violation: f64,
    /// Largest amount by which `1 − (P_L(1−s)/P_L(1))² ≤ 2 c s` fails.
    pub square_violation: f64,
    pub holds: bool,
}

/// Checks `1 − c s ≤ r(s)` and `1 − r(s)² ≤ 2 c s` with `r = P_L(1−s)/P_L(1)`
/// and `c = (L² + Ld)/(d+2)` on a uniform grid of `s ∈ [0, (d+6)/((2L+d)L)]`.
pub fn jacobi_bound_check(d: usize, big_l: usize, grid: usize) -> Result<JacobiBoundReport> {
    if grid < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    if big_l == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    let e = HarmonicEnsemble::new(d, big_l)?;
    let top = close_pairs_threshold(&e);
    let (df, lf, n) = (d as f64, big_l as f64, e.n() as f64);
    let c = (lf * lf + lf * df) / (df + 2.0);
    let (mut lower, mut square) = (0.0f64, 0.0f64);
    for i in 0..grid {
        let s = top * i as f64 / (grid - 1) as f64;
        let r = e.eval((1.0 - s).max(-1.0)) / n;
        lower = lower.max((1.0 - c * s) - r);
        square = square.max((1.0 - r * r) - 2.0 * c * s);
    }
    Ok(JacobiBoundReport {
        d,
        big_l,
        grid,
        lower_violation: lower,
        square_violation: square,
        holds: lower <= 1e-12 && square <= 1e-12,
    })
}
