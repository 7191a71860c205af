//! Number variance of a spherical cap: nested quadrature against Monte Carlo,
//! and the Poisson value n μ(A) for comparison.

use sphere_dpp::stats::{cap_measure, variance_cap_mc, variance_cap_semianalytic, CapSpec};
use sphere_dpp::{HarmonicEnsemble, ProjectionKernel};

fn main() -> sphere_dpp::Result<()> {
    let cap = CapSpec::polar_with_measure(2, 0.3)?;
    println!("cap radius {:.4}, measure {:.3}", cap.radius(), cap_measure(2, cap.radius()));
    for big_l in [4, 8, 16] {
        let e = HarmonicEnsemble::new(2, big_l)?;
        let semi = variance_cap_semianalytic(&e, &cap, 2 * big_l + 32)?;
        let mc = variance_cap_mc(&e, &cap, 400, 1)?;
        println!(
            "L = {big_l:>2}: semianalytic {semi:.4}, Monte Carlo {:.4} ± {:.4}, Poisson {:.1}",
            mc.estimate,
            mc.standard_error.unwrap_or(f64::NAN),
            e.trace() as f64 * 0.3
        );
    }
    Ok(())
}
