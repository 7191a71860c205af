//! Constants of the large-n energy expansions, and the s-grid written by
//! `sphere-dpp fig-data constants`.

use sphere_dpp::energy::{
    asymptotic_riesz_constant, continuous_vs, log_asymptotic_constant, singular_asymptotic_constant,
    singular_n2_coefficient,
};
use sphere_dpp::specfun::gamma;

fn main() -> sphere_dpp::Result<()> {
    for d in 2..=4 {
        println!(
            "d = {d}: log constant {:.6}, s = d constants {:.6} / {:.6}",
            log_asymptotic_constant(d)?,
            singular_asymptotic_constant(d)?,
            singular_n2_coefficient(d)?
        );
    }
    println!("{:>5} {:>10} {:>10} {:>10}", "s", "V_s", "C_s", "2^-s G(1-s/2)");
    for i in 1..10 {
        let s = 0.2 * i as f64;
        println!(
            "{s:>5.1} {:>10.6} {:>10.6} {:>10.6}",
            continuous_vs(2, s)?,
            asymptotic_riesz_constant(2, s)?,
            2f64.powf(-s) * gamma(1.0 - s / 2.0)
        );
    }
    Ok(())
}
