//! Expected Riesz and logarithmic energies of the harmonic ensemble: the
//! hypergeometric closed form, Gauss–Jacobi quadrature, and the two-term
//! asymptotic expansion side by side.

use sphere_dpp::energy::{
    asymptotic_log, asymptotic_riesz, expected_log_harmonic, expected_riesz_harmonic, expected_riesz_quadrature,
};
use sphere_dpp::{HarmonicEnsemble, ProjectionKernel};

fn main() -> sphere_dpp::Result<()> {
    let d = 2;
    println!("{:>4} {:>6} {:>5} {:>18} {:>18} {:>18}", "L", "n", "s", "closed form", "quadrature", "asymptotic");
    for big_l in [4, 16, 64] {
        let e = HarmonicEnsemble::new(d, big_l)?;
        let n = e.trace();
        for s in [0.5, 1.0, 1.5] {
            println!(
                "{big_l:>4} {n:>6} {s:>5} {:>18.6} {:>18.6} {:>18.6}",
                expected_riesz_harmonic(d, big_l, s)?,
                expected_riesz_quadrature(&e, s)?,
                asymptotic_riesz(d, n, s)?
            );
        }
        println!(
            "{big_l:>4} {n:>6} {:>5} {:>18.6} {:>18} {:>18.6}",
            "log",
            expected_log_harmonic(d, big_l)?,
            "",
            asymptotic_log(d, n)?
        );
    }
    Ok(())
}
