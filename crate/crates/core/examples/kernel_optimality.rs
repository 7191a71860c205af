//! Among all isotropic projection kernels of a given trace on S⁴, the
//! harmonic one has the smallest expected 2-energy.

use sphere_dpp::energy::{expected_e2_closed_form, kernel_quadratic_form};
use sphere_dpp::kernels::enumerate_projection_kernels;

fn main() -> sphere_dpp::Result<()> {
    let (d, n) = (4, 196);
    let mut kernels = enumerate_projection_kernels(d, n, 12)?;
    kernels.sort_by(|a, b| {
        let (ea, eb) = (expected_e2_closed_form(a).unwrap(), expected_e2_closed_form(b).unwrap());
        ea.total_cmp(&eb)
    });
    println!("{} kernels with trace {n} on S^{d}", kernels.len());
    for k in &kernels {
        println!(
            "{:<24} F = {:>10.1}  E[E_2] = {:>12.3}{}",
            format!("{:?}", k.degree_set()),
            kernel_quadratic_form(k)?,
            expected_e2_closed_form(k)?,
            if k.is_harmonic() { "  <- harmonic" } else { "" }
        );
    }
    Ok(())
}
