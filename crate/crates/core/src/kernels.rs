//! Rotation-invariant projection kernels on `S^d`.
//!
//! A projection kernel is a sum of zonal harmonics over a finite set of
//! degrees, `K(t) = Σ_{ℓ∈S} a_ℓ C_ℓ^{(d−1)/2}(t)` with `a_ℓ = (2ℓ+d−1)/(d−1)`.
//! The harmonic ensemble is the special case `S = {0, …, L}`, which also has
//! the closed Jacobi form `K_L(t) = π_L / binom(L+d/2, L) · P_L^{(1+λ,λ)}(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{binomial_real, gegenbauer_series, jacobi_eval, PolyParams};

/// Upper bound on the number of kernels [`enumerate_projection_kernels`] will list.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Exact binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("sphere dimension must be >= 2, got {d}")));
    }
    Ok(())
}

/// `h_ℓ = dim H_ℓ`, the dimension of degree-ℓ spherical harmonics on `S^d`.
pub fn dim_harmonic(d: usize, ell: usize) -> Result<u128> {
    check_dim(d)?;
    let b = binomial((ell + d - 2) as u64, ell as u64)?;
    let num = b
        .checked_mul((2 * ell + d - 1) as u128)
        .ok_or(Error::Overflow("harmonic dimension"))?;
    Ok(num / (d as u128 - 1))
}

/// `π_L = dim Π_L`, the dimension of polynomials of degree `≤ L` restricted to `S^d`.
pub fn dim_pi(d: usize, big_l: usize) -> Result<u128> {
    check_dim(d)?;
    let b = binomial((d + big_l - 1) as u64, big_l as u64)?;
    let num = b
        .checked_mul((2 * big_l + d) as u128)
        .ok_or(Error::Overflow("polynomial space dimension"))?;
    Ok(num / d as u128)
}

/// Schoenberg coefficient `a_ℓ = (2ℓ+d−1)/(d−1)` of an included degree.
pub fn schoenberg_coefficient(d: usize, ell: usize) -> f64 {
    (2 * ell + d - 1) as f64 / (d - 1) as f64
}

fn to_usize(v: u128, what: &'static str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Common interface of the projection kernels the sampler and the energy
/// formulas accept.
pub trait ProjectionKernel: Sync {
    /// Sphere dimension `d` of `S^d`.
    fn dim(&self) -> usize;
    /// `K(1)`, which is also the number of points of the process.
    fn trace(&self) -> usize;
    /// Zonal profile `K(t)` at `t = ⟨x, y⟩`.
    fn eval(&self, t: f64) -> f64;
    fn max_degree(&self) -> usize;
    /// Included degrees in increasing order.
    fn degrees(&self) -> Vec<usize>;
    fn spec(&self) -> KernelSpec;
}

/// The reproducing kernel of polynomials of degree `≤ L` on `S^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicEnsemble {
    d: usize,
    big_l: usize,
    n: usize,
    params: PolyParams,
    scale: f64,
}

impl HarmonicEnsemble {
    pub fn new(d: usize, big_l: usize) -> Result<Self> {
        check_dim(d)?;
        let n = to_usize(dim_pi(d, big_l)?, "point count")?;
        let params = PolyParams::harmonic(d, big_l)?;
        let scale = n as f64 / binomial_real(big_l as f64 + d as f64 / 2.0, big_l);
        Ok(Self {
            d,
            big_l,
            n,
            params,
            scale,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Maximal polynomial degree `L`.
    pub fn degree(&self) -> usize {
        self.big_l
    }

    /// `λ = (d − 2)/2`.
    pub fn lambda(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }

    /// Number of points `n = π_L`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.big_l == 0 {
            return 1.0;
        }
        self.scale * jacobi_eval(self.params, t)
    }

    pub fn to_isotropic(&self) -> IsotropicProjectionKernel {
        IsotropicProjectionKernel::new(self.d, (0..=self.big_l).collect())
            .expect("contiguous degree set is valid")
    }
}

impl ProjectionKernel for HarmonicEnsemble {
    fn dim(&self) -> usize {
        self.d
    }

    fn trace(&self) -> usize {
        self.n
    }

    fn eval(&self, t: f64) -> f64 {
        HarmonicEnsemble::eval(self, t)
    }

    fn max_degree(&self) -> usize {
        self.big_l
    }

    fn degrees(&self) -> Vec<usize> {
        (0..=self.big_l).collect()
    }

    fn spec(&self) -> KernelSpec {
        KernelSpec::Harmonic {
            d: self.d,
            big_l: self.big_l,
        }
    }
}

/// A projection kernel given by its set of included harmonic degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicProjectionKernel {
    d: usize,
    degrees: Vec<usize>,
    trace: usize,
    coeffs: Vec<f64>,
}

impl IsotropicProjectionKernel {
    /// Degrees may come in any order; duplicates are merged.
    pub fn new(d: usize, mut degrees: Vec<usize>) -> Result<Self> {
        check_dim(d)?;
        degrees.sort_unstable();
        degrees.dedup();
        let Some(&max) = degrees.last() else {
            return Err(Error::Domain("a projection kernel needs at least one degree".into()));
        };
        let mut trace: u128 = 0;
        let mut coeffs = vec![0.0; max + 1];
        for &ell in &degrees {
            trace = trace
                .checked_add(dim_harmonic(d, ell)?)
                .ok_or(Error::Overflow("kernel trace"))?;
            coeffs[ell] = schoenberg_coefficient(d, ell);
        }
        Ok(Self {
            d,
            degrees,
            trace: to_usize(trace, "kernel trace")?,
            coeffs,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree_set(&self) -> &[usize] {
        &self.degrees
    }

    /// Dense coefficient vector `a_0, …, a_{max}` (zero for excluded degrees).
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn trace(&self) -> usize {
        self.trace
    }

    /// True when the degree set is `{0, …, L}`.
    pub fn is_harmonic(&self) -> bool {
        self.degrees.iter().enumerate().all(|(i, &l)| i == l)
    }

    pub fn eval(&self, t: f64) -> f64 {
        gegenbauer_series((self.d as f64 - 1.0) / 2.0, &self.coeffs, t)
    }
}

impl ProjectionKernel for IsotropicProjectionKernel {
    fn dim(&self) -> usize {
        self.d
    }

    fn trace(&self) -> usize {
        self.trace
    }

    fn eval(&self, t: f64) -> f64 {
        IsotropicProjectionKernel::eval(self, t)
    }

    fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn degrees(&self) -> Vec<usize> {
        self.degrees.clone()
    }

    fn spec(&self) -> KernelSpec {
        KernelSpec::Degrees {
            d: self.d,
            degrees: self.degrees.clone(),
        }
    }
}

/// Serialized kernel description: `{"d": 2, "L": 8}` or `{"d": 4, "degrees": [0, 2]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Harmonic {
        d: usize,
        #[serde(rename = "L")]
        big_l: usize,
    },
    Degrees {
        d: usize,
        degrees: Vec<usize>,
    },
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        match self {
            KernelSpec::Harmonic { d, big_l } => Ok(Kernel::Harmonic(HarmonicEnsemble::new(*d, *big_l)?)),
            KernelSpec::Degrees { d, degrees } => Ok(Kernel::Isotropic(IsotropicProjectionKernel::new(
                *d,
                degrees.clone(),
            )?)),
        }
    }
}

/// Either kind of kernel, for callers that only know the kind at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Harmonic(HarmonicEnsemble),
    Isotropic(IsotropicProjectionKernel),
}

impl Kernel {
    pub fn as_isotropic(&self) -> IsotropicProjectionKernel {
        match self {
            Kernel::Harmonic(h) => h.to_isotropic(),
            Kernel::Isotropic(k) => k.clone(),
        }
    }

    /// The harmonic ensemble this kernel equals, if any.
    pub fn as_harmonic(&self) -> Option<HarmonicEnsemble> {
        match self {
            Kernel::Harmonic(h) => Some(h.clone()),
            Kernel::Isotropic(k) if k.is_harmonic() => {
                HarmonicEnsemble::new(k.d(), k.max_degree()).ok()
            }
            Kernel::Isotropic(_) => None,
        }
    }

    fn inner(&self) -> &dyn ProjectionKernel {
        match self {
            Kernel::Harmonic(h) => h,
            Kernel::Isotropic(k) => k,
        }
    }
}

impl ProjectionKernel for Kernel {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn trace(&self) -> usize {
        self.inner().trace()
    }

    fn eval(&self, t: f64) -> f64 {
        self.inner().eval(t)
    }

    fn max_degree(&self) -> usize {
        self.inner().max_degree()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner().degrees()
    }

    fn spec(&self) -> KernelSpec {
        self.inner().spec()
    }
}

/// Number of degree sets `S ⊆ {0, …, max_degree}` with `Σ_{ℓ∈S} h_ℓ = n`.
pub fn count_projection_kernels(d: usize, n: usize, max_degree: usize) -> Result<u128> {
    let table = subset_counts(d, n, max_degree)?;
    Ok(table.first().map_or(0, |row| row[n]))
}

/// `table[i][r]` counts subsets of `{i, …, max_degree}` whose dimensions sum to `r`.
fn subset_counts(d: usize, n: usize, max_degree: usize) -> Result<Vec<Vec<u128>>> {
    check_dim(d)?;
    if n == 0 {
        return Err(Error::Domain("kernel trace must be positive".into()));
    }
    let h = harmonic_dims_upto(d, n, max_degree)?;
    let mut table = vec![vec![0u128; n + 1]; max_degree + 2];
    table[max_degree + 1][0] = 1;
    for i in (0..=max_degree).rev() {
        for r in 0..=n {
            let mut c = table[i + 1][r];
            if let Some(hi) = h[i] {
                if hi <= r {
                    c = c.saturating_add(table[i + 1][r - hi]);
                }
            }
            table[i][r] = c;
        }
    }
    Ok(table)
}

/// `h_ℓ` for `ℓ ≤ max_degree`, `None` where it exceeds `n` (or overflows).
fn harmonic_dims_upto(d: usize, n: usize, max_degree: usize) -> Result<Vec<Option<usize>>> {
    (0..=max_degree)
        .map(|ell| match dim_harmonic(d, ell) {
            Ok(h) if h <= n as u128 => Ok(Some(h as usize)),
            Ok(_) | Err(Error::Overflow(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// All projection kernels on `S^d` with trace `n` using degrees `≤ max_degree`,
/// in lexicographic order of their sorted degree lists.
pub fn enumerate_projection_kernels(
    d: usize,
    n: usize,
    max_degree: usize,
) -> Result<Vec<IsotropicProjectionKernel>> {
    let table = subset_counts(d, n, max_degree)?;
    let total = table[0][n];
    if total > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            count: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    let h = harmonic_dims_upto(d, n, max_degree)?;
    let mut out = Vec::with_capacity(total as usize);
    let mut current = Vec::new();
    collect_subsets(&table, &h, 0, n, &mut current, &mut |degrees| {
        out.push(IsotropicProjectionKernel::new(d, degrees.to_vec()));
    });
    out.into_iter().collect()
}

fn collect_subsets(
    table: &[Vec<u128>],
    h: &[Option<usize>],
    start: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        emit(current);
        return;
    }
    for ell in start..h.len() {
        let Some(hl) = h[ell] else { continue };
        if hl <= remaining && table[ell + 1][remaining - hl] > 0 {
            current.push(ell);
            collect_subsets(table, h, ell + 1, remaining - hl, current, emit);
            current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::zonal_integral;
    use crate::specfun::gegenbauer_eval;
    use proptest::prelude::*;

    #[test]
    fn harmonic_dimensions() {
        for d in 2..=10 {
            assert_eq!(dim_harmonic(d, 0).unwrap(), 1);
            assert_eq!(dim_pi(d, 0).unwrap(), 1);
        }
        for l in 0..50 {
            assert_eq!(dim_harmonic(2, l).unwrap(), 2 * l as u128 + 1);
            assert_eq!(dim_pi(2, l).unwrap(), (l as u128 + 1).pow(2));
        }
        assert_eq!(dim_harmonic(3, 2).unwrap(), 9);
        assert_eq!(dim_pi(3, 2).unwrap(), 14);
        let h4: Vec<u128> = (0..13).map(|l| dim_harmonic(4, l).unwrap()).collect();
        assert_eq!(h4, vec![1, 5, 14, 30, 55, 91, 140, 204, 285, 385, 506, 650, 819]);
        assert!(dim_harmonic(1, 3).is_err());
    }

    #[test]
    fn pi_differences_are_harmonic_dims() {
        for d in 2..=10 {
            for l in 1..=100 {
                let diff = dim_pi(d, l).unwrap() - dim_pi(d, l - 1).unwrap();
                assert_eq!(diff, dim_harmonic(d, l).unwrap(), "d={d} L={l}");
            }
        }
    }

    #[test]
    fn wide_binomials_stay_exact() {
        assert_eq!(binomial(100, 50).unwrap(), 100_891_344_545_564_193_334_812_497_256);
        assert!(matches!(binomial(400, 200), Err(Error::Overflow(_))));
        // L = 500 on S^6
        assert!(dim_pi(6, 500).is_ok());
    }

    #[test]
    fn harmonic_kernel_values() {
        let e = HarmonicEnsemble::new(3, 7).unwrap();
        assert!((e.eval(1.0) - e.n() as f64).abs() < 1e-10 * e.n() as f64);
        let e0 = HarmonicEnsemble::new(5, 0).unwrap();
        assert_eq!(e0.eval(-0.3), 1.0);
        assert_eq!(e0.n(), 1);

        // Legendre sum Σ (2ℓ+1) P_ℓ(t)
        let e = HarmonicEnsemble::new(2, 3).unwrap();
        let t = 0.25;
        let direct: f64 = (0..=3).map(|l| (2 * l + 1) as f64 * gegenbauer_eval(0.5, l, t)).sum();
        assert!((e.eval(t) - direct).abs() < 1e-13);
    }

    #[test]
    fn two_representations_agree() {
        for d in 2..=8 {
            for l in [0usize, 1, 2, 5, 13, 40] {
                let e = HarmonicEnsemble::new(d, l).unwrap();
                let k = e.to_isotropic();
                assert_eq!(k.trace(), e.n());
                let n = e.n() as f64;
                for i in 0..=100 {
                    let t = -1.0 + 0.02 * i as f64;
                    assert!((e.eval(t) - k.eval(t)).abs() <= 1e-11 * n, "d={d} L={l} t={t}");
                }
            }
        }
    }

    #[test]
    fn kernel_bounded_by_trace() {
        for &(d, l) in &[(2usize, 10usize), (3, 8), (6, 5)] {
            let e = HarmonicEnsemble::new(d, l).unwrap();
            let n = e.n() as f64;
            for i in 0..=10_000 {
                let t = -1.0 + 2.0 * i as f64 / 10_000.0;
                assert!(e.eval(t).abs() <= n * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn projection_property() {
        for d in 2..=5 {
            for degrees in [vec![0], vec![1, 3], vec![0, 2, 7], (0..=60).collect::<Vec<_>>(), vec![5, 60]] {
                let k = IsotropicProjectionKernel::new(d, degrees).unwrap();
                let m = k.max_degree() + d + 8;
                let v = zonal_integral(d, |t| k.eval(t).powi(2), 0.0, 0.0, m).unwrap();
                let trace = k.trace() as f64;
                assert!((v - trace).abs() <= 1e-9 * trace, "d={d} v={v} trace={trace}");
                assert!((k.eval(1.0) - trace).abs() <= 1e-10 * trace);
            }
        }
    }

    #[test]
    fn kernel_validation() {
        assert!(IsotropicProjectionKernel::new(3, vec![]).is_err());
        assert!(IsotropicProjectionKernel::new(1, vec![0]).is_err());
        let k = IsotropicProjectionKernel::new(3, vec![2, 0, 2]).unwrap();
        assert_eq!(k.degree_set(), &[0, 2]);
        assert_eq!(k.trace(), 10);
        assert!(!k.is_harmonic());
        assert_eq!(IsotropicProjectionKernel::new(2, vec![0]).unwrap().eval(0.3), 1.0);
    }

    #[test]
    fn spec_round_trip() {
        let h: KernelSpec = serde_json::from_str(r#"{"d": 2, "L": 8}"#).unwrap();
        assert_eq!(h, KernelSpec::Harmonic { d: 2, big_l: 8 });
        let k: KernelSpec = serde_json::from_str(r#"{"d": 4, "degrees": [0, 2, 3]}"#).unwrap();
        assert_eq!(k.build().unwrap().trace(), 1 + 14 + 30);
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"d":2,"L":8}"#);
        assert_eq!(h.build().unwrap().spec(), h);
        assert!(serde_json::from_str::<KernelSpec>(r#"{"d": 4}"#).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_projection_kernels(4, 1, 12).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].degree_set(), &[0]);
        assert!(enumerate_projection_kernels(4, 2, 12).unwrap().is_empty());

        let list = enumerate_projection_kernels(4, 196, 12).unwrap();
        assert!(list.iter().any(|k| k.degree_set() == [0, 1, 2, 3, 4, 5]));
        for k in &list {
            assert_eq!(k.trace(), 196);
        }
        for w in list.windows(2) {
            assert!(w[0].degree_set() < w[1].degree_set());
        }
        assert_eq!(count_projection_kernels(4, 196, 12).unwrap(), list.len() as u128);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let d = 3;
        let max = 9;
        let h: Vec<usize> = (0..=max).map(|l| dim_harmonic(d, l).unwrap() as usize).collect();
        for n in 1..=120 {
            let mut brute: Vec<Vec<usize>> = (0u32..1 << (max + 1))
                .filter(|mask| (0..=max).filter(|l| mask >> l & 1 == 1).map(|l| h[l]).sum::<usize>() == n)
                .map(|mask| (0..=max).filter(|l| mask >> l & 1 == 1).collect())
                .collect();
            brute.sort();
            let got: Vec<Vec<usize>> = enumerate_projection_kernels(d, n, max)
                .unwrap()
                .into_iter()
                .map(|k| k.degree_set().to_vec())
                .collect();
            assert_eq!(got, brute, "n={n}");
        }
    }

    #[test]
    fn enumeration_limit() {
        // d = 2: h_ℓ = 2ℓ + 1, many subsets for large n
        match enumerate_projection_kernels(2, 840, 40) {
            Err(Error::EnumerationLimit { count, .. }) => assert!(count > ENUMERATION_LIMIT),
            other => panic!("expected enumeration limit, got {other:?}"),
        }
        assert!(enumerate_projection_kernels(4, 0, 5).is_err());
    }

    proptest! {
        #[test]
        fn trace_is_sum_of_dims(d in 2usize..8, mask in 1u32..(1 << 12)) {
            let degrees: Vec<usize> = (0..12).filter(|l| mask >> l & 1 == 1).collect();
            let expect: u128 = degrees.iter().map(|&l| dim_harmonic(d, l).unwrap()).sum();
            let k = IsotropicProjectionKernel::new(d, degrees).unwrap();
            prop_assert_eq!(k.trace() as u128, expect);
            let t1 = k.eval(1.0);
            prop_assert!((t1 - expect as f64).abs() <= 1e-10 * expect as f64);
        }
    }
}
